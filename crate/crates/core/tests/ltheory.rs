mod common;

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use transfer_core::chain::ops::dual_complex;
use transfer_core::chain::{finiteness_obstruction, ChainComplex, ChainMap};
use transfer_core::control::ControlSpace;
use transfer_core::fixtures::chains::{random_complex, ComplexShape};
use transfer_core::fixtures::rng;
use transfer_core::ltheory::*;
use transfer_core::rational::qi;
use transfer_core::{Error, Matrix};

/// Characteristic polynomial coefficients (leading first) by Faddeev–LeVerrier over ℤ.
fn char_poly(m: &Matrix) -> Vec<BigInt> {
    let n = m.rows();
    let a: Vec<Vec<BigInt>> = m.to_dense().into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect();
    let mut coeffs = vec![BigInt::from(1)];
    let mut mk = vec![vec![BigInt::zero(); n]; n];
    for k in 1..=n {
        // M_k = A·M_{k−1} + c_{k−1} I
        let mut next = vec![vec![BigInt::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = BigInt::zero();
                for t in 0..n {
                    if !a[i][t].is_zero() && !mk[t][j].is_zero() {
                        s += &a[i][t] * &mk[t][j];
                    }
                }
                next[i][j] = s;
            }
            next[i][i] += &coeffs[k - 1];
        }
        let mut tr = BigInt::zero();
        for i in 0..n {
            for t in 0..n {
                tr += &a[i][t] * &next[t][i];
            }
        }
        coeffs.push(-tr / BigInt::from(k));
        mk = next;
    }
    coeffs
}

fn sign_changes(c: &[BigInt]) -> i64 {
    let nz: Vec<&BigInt> = c.iter().filter(|x| !x.is_zero()).collect();
    nz.windows(2).filter(|w| w[0].is_positive() != w[1].is_positive()).count() as i64
}

/// Signature by Descartes' rule on the (real-rooted) characteristic polynomial.
fn descartes_signature(m: &Matrix) -> Option<i64> {
    let c = char_poly(m);
    if c.last().is_some_and(|x| x.is_zero()) && m.rows() > 0 {
        return None;
    }
    let n = c.len() - 1;
    let neg: Vec<BigInt> = c.iter().enumerate().map(|(i, x)| if (n - i) % 2 == 1 { -x } else { x.clone() }).collect();
    Some(sign_changes(&c) - sign_changes(&neg))
}

/// Gram matrix of (A, B) ↦ tr(AB) on n×n matrices, E_{ji} ↔ e_i* ⊗ e_j.
fn trace_form(n: usize) -> Matrix {
    let unit = |r: usize, c: usize| {
        let mut m = vec![vec![0i64; n]; n];
        m[r][c] = 1;
        m
    };
    let mut trip = Vec::new();
    for x in 0..n * n {
        for y in 0..n * n {
            let (a, b) = (unit(x % n, x / n), unit(y % n, y / n));
            let tr: i64 = (0..n).map(|i| (0..n).map(|k| a[i][k] * b[k][i]).sum::<i64>()).sum();
            if tr != 0 {
                trip.push((x, y, tr));
            }
        }
    }
    Matrix::from_triplets(n * n, n * n, trip)
}

fn form(rows: &[Vec<i64>]) -> SymmetricForm {
    SymmetricForm::new(Matrix::from_dense(rows)).unwrap()
}

#[test]
fn trivial_signatures() {
    assert_eq!(signature(&form(&[vec![1]])), Ok(1));
    assert_eq!(signature(&form(&[vec![0, 1], vec![1, 0]])), Ok(0));
    assert_eq!(signature(&form(&[vec![0, 0], vec![0, 1]])), Err(Error::DegenerateForm));
    assert!(SymmetricForm::new(Matrix::from_dense(&[vec![0, 1], vec![0, 0]])).is_err());
}

#[test]
fn multiplicative_form_small_ranks() {
    assert_eq!(mult_hyperbolic_form(0).rank(), 0);
    assert_eq!(mult_hyperbolic_form(1).gram, Matrix::identity(1));
    assert_eq!(signature(&mult_hyperbolic_form(1)), Ok(1));
    assert_eq!(descartes_signature(&mult_hyperbolic_form(3).gram), Some(3));
    assert_eq!(signature(&mult_hyperbolic_form(3)), Ok(3));
    assert_eq!(descartes_signature(&mult_hyperbolic_form(4).gram), Some(4));
    assert_eq!(signature(&mult_hyperbolic_form(4)), Ok(4));
}

#[test]
fn multiplicative_form_is_trace_form() {
    for n in 0..=5 {
        let h = mult_hyperbolic_form(n);
        assert_eq!(h.gram, trace_form(n), "n = {n}");
        assert!(h.is_nonsingular());
    }
}

#[test]
fn decomposition_one_one() {
    let w = sum_decomposition_witness(1, 1);
    assert_eq!(w.verify(), Ok(()));
    let want = form(&[vec![1, 0, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 0, 1], vec![0, 0, 1, 0]]);
    assert_eq!(w.target, want);
    let b = common::rat(&w.base_change);
    let g = common::rat(&w.source.gram);
    let bt: common::RMat = (0..4).map(|i| (0..4).map(|j| b[j][i].clone()).collect()).collect();
    assert_eq!(common::mul(&common::mul(&bt, &g, 4), &b, 4), common::rat(&want.gram));
}

#[test]
fn decomposition_with_zero_summand_is_identity() {
    for p in 0..4 {
        let w = sum_decomposition_witness(p, 0);
        assert_eq!(w.base_change, Matrix::identity(p * p));
        assert_eq!(w.verify(), Ok(()));
    }
}

#[test]
fn decomposition_two_one() {
    let w = sum_decomposition_witness(2, 1);
    assert_eq!(w.verify(), Ok(()));
    let b = common::rat(&w.base_change);
    assert!(common::det(&b).abs() == common::R::from_integer(1.into()));
}

#[test]
fn point_complex() {
    let h = mult_hyperbolic_complex(&ChainComplex::point()).unwrap();
    assert_eq!(h.psi.comp(0), Matrix::identity(1));
    let r = euler_signature_check(&ChainComplex::point()).unwrap();
    assert_eq!((r.signature, r.euler), (1, 1));
    assert!(r.holds());
}

#[test]
fn multiplication_by_two_complex() {
    let c = ChainComplex::new(0, vec![1, 1], vec![Matrix::from_dense(&[vec![2]])]).unwrap();
    let h = mult_hyperbolic_complex(&c).unwrap();
    assert_eq!((h.d.lo, h.d.ranks.clone()), (-1, vec![1, 2, 1]));
    assert!(h.is_isomorphism());
    assert!(h.is_symmetric());
    let r = euler_signature_check(&c).unwrap();
    // summands ordered C_1^*⊗C_1, then C_0^*⊗C_0
    assert_eq!(r.form.gram, Matrix::from_dense(&[vec![-1, 0], vec![0, 1]]));
    assert!(r.holds());
    assert_eq!(r.signature, 0);
}

#[test]
fn euler_signature_on_ranks_three_two() {
    let d = Matrix::from_dense(&[vec![1, 0], vec![0, 2], vec![0, 0]]);
    let c = ChainComplex::new(0, vec![3, 2], vec![d]).unwrap();
    let r = euler_signature_check(&c).unwrap();
    assert_eq!(r.form.rank(), 13);
    assert_eq!(descartes_signature(&r.form.gram), Some(1));
    assert_eq!(r.signature, 1);
    assert!(r.holds());
}

#[test]
fn euler_signature_on_ranks_one_one_one() {
    let z = Matrix::zeros(1, 1);
    let c = ChainComplex::new(0, vec![1, 1, 1], vec![z.clone(), z]).unwrap();
    let r = euler_signature_check(&c).unwrap();
    assert_eq!(descartes_signature(&r.form.gram), Some(1));
    assert_eq!(r.signature, 1);
    assert!(r.holds());
}

#[test]
fn h_otimes_on_k0_is_the_euler_signature() {
    let c = ChainComplex::new(0, vec![3, 2], vec![Matrix::zeros(3, 2)]).unwrap();
    assert_eq!(h_otimes_class(&finiteness_obstruction(&c)), Ok(1));
}

#[test]
fn hyperbolic_quadratic_form_is_poincare() {
    let u = UltraQuadraticComplex::from_quadratic_form(&Matrix::from_dense(&[vec![0, 1], vec![0, 0]])).unwrap();
    let rep = verify_ultraquadratic(&u, None);
    assert!(rep.passed(), "{:?}", rep.violations);
}

#[test]
fn unit_quadratic_form_is_not_poincare() {
    let alpha = Matrix::identity(1);
    assert!(matches!(UltraQuadraticComplex::from_quadratic_form(&alpha), Err(Error::NotAnEquivalence(_))));
    // hand-made witness claiming [1] inverts [2]
    let c = Arc::new(ChainComplex::point());
    let cd = Arc::new(dual_complex(&c));
    let psi = ChainMap::from_fn(cd.clone(), c.clone(), 0, |_| alpha.clone()).unwrap();
    let g = ChainMap::from_fn(c.clone(), cd.clone(), 0, |_| Matrix::identity(1)).unwrap();
    let u = UltraQuadraticComplex::new(psi, g, ChainMap::zero(cd.clone(), cd, 1), ChainMap::zero(c.clone(), c, 1));
    let rep = verify_ultraquadratic(&u, None);
    assert!(!rep.passed());
    assert!(rep.violations.iter().any(|v| v.contains("not a chain homotopy equivalence")), "{:?}", rep.violations);
}

#[test]
fn positioned_quadratic_form_control() {
    let alpha = Matrix::from_dense(&[vec![0, 1], vec![0, 0]]);
    let c = Arc::new(ChainComplex::concentrated(0, 2).with_positions(2, vec![vec![0, 1]]).unwrap());
    let cd = Arc::new(dual_complex(&c));
    let psi = ChainMap::from_fn(cd.clone(), c.clone(), 0, |_| alpha.clone()).unwrap();
    let g = ChainMap::from_fn(c.clone(), cd.clone(), 0, |_| Matrix::from_dense(&[vec![0, 1], vec![1, 0]])).unwrap();
    let u = UltraQuadraticComplex::new(psi, g, ChainMap::zero(cd.clone(), cd, 1), ChainMap::zero(c.clone(), c, 1));
    let space = ControlSpace::line(2);
    let ok = verify_ultraquadratic(&u, Some((&space, qi(1))));
    assert!(ok.passed(), "{:?}", ok.violations);
    assert_eq!(ok.epsilon, Some(qi(1)));
    let tight = verify_ultraquadratic(&u, Some((&space, qi(0))));
    assert!(tight.violations.iter().any(|v| v.starts_with("ψ is 1-controlled")), "{:?}", tight.violations);
}

fn small() -> ComplexShape {
    ComplexShape { max_len: 4, max_rank: 2, ..Default::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn decomposition_congruence(p in 0usize..=5, q in 0usize..=5) {
        prop_assume!(p + q <= 5);
        let w = sum_decomposition_witness(p, q);
        prop_assert_eq!(w.verify(), Ok(()));
        prop_assert_eq!(signature(&w.target).unwrap_or(0), (p + q) as i64);
    }

    #[test]
    fn multiplicative_signature_is_rank(n in 1usize..=6) {
        prop_assert_eq!(signature(&mult_hyperbolic_form(n)), Ok(n as i64));
        prop_assert_eq!(descartes_signature(&mult_hyperbolic_form(n).gram), Some(n as i64));
    }

    #[test]
    fn psi_is_a_symmetric_isomorphism(seed in any::<u64>()) {
        let c = random_complex(&mut rng(seed), small());
        let h = mult_hyperbolic_complex(&c).unwrap();
        prop_assert!(h.is_isomorphism());
        prop_assert!(h.is_symmetric());
    }

    #[test]
    fn degree_zero_signature_is_euler_characteristic(seed in any::<u64>()) {
        let c = random_complex(&mut rng(seed), small());
        let r = euler_signature_check(&c).unwrap();
        prop_assert!(r.holds(), "{:?}", r);
        if r.form.rank() > 0 {
            prop_assert_eq!(descartes_signature(&r.form.gram), Some(c.euler_characteristic()));
        }
    }

    #[test]
    fn random_forms_agree_with_descartes(seed in any::<u64>(), n in 1usize..=5) {
        use rand::Rng;
        let mut r = rng(seed);
        let mut m = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in i..n {
                let v = r.gen_range(-2..=2);
                m[i][j] = v;
                m[j][i] = v;
            }
        }
        let f = form(&m);
        match descartes_signature(&f.gram) {
            Some(s) => prop_assert_eq!(signature(&f), Ok(s)),
            None => prop_assert_eq!(signature(&f), Err(Error::DegenerateForm)),
        }
    }
}
