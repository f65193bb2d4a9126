//! Symmetric forms over ℤ, signatures, the multiplicative hyperbolic form
//! H_⊗ and its chain-complex version, and ultra-quadratic Poincaré complexes.
//!
//! L-classes are only modelled over ℤ, where the signature is a complete
//! invariant of L⁰; elsewhere forms and complexes are kept as explicit data.

use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::chain::ops::{dual_complex, dual_map, iota, mu, signed_perm_inverse, tensor, tensor_layout, tensor_map};
use crate::chain::{flip, ChainComplex, ChainMap, Equivalence, K0Class};
use crate::control::{chain_map_epsilon, ControlSpace};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rational::{fmt_q, Q};

/// Symmetric bilinear form on ℤ^r given by its Gram matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetricForm {
    pub gram: Matrix,
}

impl SymmetricForm {
    pub fn new(gram: Matrix) -> Result<SymmetricForm> {
        if !gram.is_square() {
            return Err(Error::Shape(format!("Gram matrix is {:?}", gram.shape())));
        }
        if gram.transpose() != gram {
            return Err(Error::InvalidInput("Gram matrix is not symmetric".into()));
        }
        Ok(SymmetricForm { gram })
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    /// Determinant ±1.
    pub fn is_nonsingular(&self) -> bool {
        let d = self.gram.det();
        d == 1.into() || d == (-1).into()
    }

    pub fn direct_sum(parts: &[&SymmetricForm]) -> SymmetricForm {
        let grams: Vec<&Matrix> = parts.iter().map(|f| &f.gram).collect();
        SymmetricForm { gram: Matrix::block_diag(&grams) }
    }

    /// Bᵀ φ B: the form pulled back along the base change `b`.
    pub fn pullback(&self, b: &Matrix) -> SymmetricForm {
        SymmetricForm { gram: b.transpose().mul(&self.gram).mul(b) }
    }

    pub fn scale(&self, c: i64) -> SymmetricForm {
        SymmetricForm { gram: self.gram.scale(c) }
    }
}

/// The standard hyperbolic form H(ℤ^r) on ℤ^r* ⊕ ℤ^r.
pub fn hyperbolic_form(r: usize) -> SymmetricForm {
    let i = Matrix::identity(r);
    let z = Matrix::zeros(r, r);
    SymmetricForm { gram: Matrix::blocks(&[r, r], &[r, r], &[(0, 0, &z), (0, 1, &i), (1, 0, &i), (1, 1, &z)]) }
}

/// H_⊗(ℤⁿ) in the basis e_i* ⊗ e_j (index i·n + j): (α⊗x, β⊗y) ↦ α(y)·β(x).
pub fn mult_hyperbolic_form(n: usize) -> SymmetricForm {
    let trip = (0..n).flat_map(|i| (0..n).map(move |j| (i * n + j, j * n + i, 1)));
    SymmetricForm { gram: Matrix::from_triplets(n * n, n * n, trip) }
}

/// Exact congruence diagonalization over ℚ; returns the diagonal.
pub fn diagonalize(form: &SymmetricForm) -> Result<Vec<BigRational>> {
    congruence_diagonal(form.gram.to_rational(), false)
}

/// With `degenerate_ok`, radical directions contribute zeros instead of failing.
fn congruence_diagonal(mut a: Vec<Vec<BigRational>>, degenerate_ok: bool) -> Result<Vec<BigRational>> {
    let n = a.len();
    let mut diag = Vec::with_capacity(n);
    for k in 0..n {
        if a[k][k].is_zero() {
            if let Some(j) = (k + 1..n).find(|&j| !a[j][j].is_zero()) {
                a.swap(k, j);
                for row in a.iter_mut() {
                    row.swap(k, j);
                }
            } else if let Some(j) = (k + 1..n).find(|&j| !a[k][j].is_zero()) {
                // e_k ← e_k + e_j makes the pivot 2·a_kj
                for c in 0..n {
                    let v = a[j][c].clone();
                    a[k][c] += v;
                }
                for r in 0..n {
                    let v = a[r][j].clone();
                    a[r][k] += v;
                }
            } else if degenerate_ok {
                diag.push(BigRational::zero());
                continue;
            } else {
                return Err(Error::DegenerateForm);
            }
        }
        let piv = a[k][k].clone();
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &piv;
            for c in k..n {
                let v = &a[k][c] * &f;
                a[i][c] -= v;
            }
            for r in k..n {
                let v = &a[r][k] * &f;
                a[r][i] -= v;
            }
        }
        diag.push(piv);
    }
    Ok(diag)
}

/// Sylvester signature; degenerate forms are rejected.
pub fn signature(form: &SymmetricForm) -> Result<i64> {
    let diag = diagonalize(form)?;
    Ok(diag.iter().map(|d| if d.is_positive() { 1 } else { -1 }).sum())
}

/// Signature of a possibly degenerate rational symmetric matrix.
pub fn inertia_signature(a: Vec<Vec<BigRational>>) -> i64 {
    let diag = congruence_diagonal(a, true).expect("degenerate directions are skipped");
    diag.iter()
        .map(|d| {
            if d.is_positive() {
                1
            } else if d.is_negative() {
                -1
            } else {
                0
            }
        })
        .sum()
}

/// Basis of the rational kernel of `m`, one vector per free column.
pub fn kernel_basis(m: &Matrix) -> Vec<Vec<BigRational>> {
    let (rows, cols) = m.shape();
    let mut a = m.to_rational();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let piv = a[r][c].clone();
        for j in 0..cols {
            a[r][j] = &a[r][j] / &piv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..cols {
                    let v = &a[r][j] * &f;
                    a[i][j] -= v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![BigRational::zero(); cols];
            v[free] = BigRational::from_integer(1.into());
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[row][free].clone();
            }
            v
        })
        .collect()
}

/// Signature of the degree-0 homology form of a symmetric f: C^{-*} → C,
/// (u, v) ↦ u(f_0 v) on the cocycles of (C^{-*})_0; boundaries lie in the radical.
pub fn homology_signature(f: &ChainMap) -> Result<i64> {
    if f.degree != 0 || f.src.has_idempotents() || f.tgt.has_idempotents() {
        return Err(Error::InvalidInput("homology signature needs a degree-0 map of free complexes".into()));
    }
    let f0 = f.comp(0).to_rational();
    let basis = kernel_basis(&f.src.d(0));
    let apply = |v: &[BigRational]| -> Vec<BigRational> { f0.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect() };
    let images: Vec<Vec<BigRational>> = basis.iter().map(|v| apply(v)).collect();
    let gram = basis.iter().map(|u| images.iter().map(|w| u.iter().zip(w).map(|(a, b)| a * b).sum()).collect()).collect();
    Ok(inertia_signature(gram))
}

/// The signature of H_⊗ on a K₀(ℤ) class: Σ c · sign(H_⊗(ℤ^{rank p})).
pub fn h_otimes_class(k: &K0Class) -> Result<i64> {
    let mut total = 0;
    for (c, p) in &k.terms {
        total += c * signature(&mult_hyperbolic_form(p.rank()))?;
    }
    Ok(total)
}

/// A base change `b` with bᵀ · source · b = target.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormIsomorphism {
    pub source: SymmetricForm,
    pub target: SymmetricForm,
    pub base_change: Matrix,
}

impl FormIsomorphism {
    pub fn verify(&self) -> Result<()> {
        if self.base_change.inverse().is_none() {
            return Err(Error::IdentityFailure("base change is not invertible over ℤ".into()));
        }
        if self.source.pullback(&self.base_change) != self.target {
            return Err(Error::IdentityFailure("bᵀ φ b differs from the target form".into()));
        }
        Ok(())
    }
}

/// H_⊗(ℤ^{p+q}) ≅ H_⊗(ℤᵖ) ⊕ H_⊗(ℤ^q) ⊕ H(Q* ⊗ P), by a permutation of the tensor basis.
pub fn sum_decomposition_witness(p: usize, q: usize) -> FormIsomorphism {
    let m = p + q;
    let old = |i: usize, j: usize| i * m + j;
    // new basis, in order: P*⊗P, Q*⊗Q, Q*⊗P, P*⊗Q (the last dual to the third)
    let mut cols = Vec::with_capacity(m * m);
    for i in 0..p {
        for j in 0..p {
            cols.push(old(i, j));
        }
    }
    for i in 0..q {
        for j in 0..q {
            cols.push(old(p + i, p + j));
        }
    }
    for i in 0..q {
        for j in 0..p {
            cols.push(old(p + i, j));
        }
    }
    for i in 0..q {
        for j in 0..p {
            cols.push(old(j, p + i));
        }
    }
    let base_change = Matrix::from_triplets(m * m, m * m, cols.iter().enumerate().map(|(c, &r)| (r, c, 1)));
    let target = SymmetricForm::direct_sum(&[&mult_hyperbolic_form(p), &mult_hyperbolic_form(q), &hyperbolic_form(p * q)]);
    FormIsomorphism { source: mult_hyperbolic_form(m), target, base_change }
}

/// H_⊗(C) = (C^{-*} ⊗ C, ψ_C) with ψ_C: (C^{-*}⊗C)^{-*} → C^{-*}⊗C.
#[derive(Clone, Debug)]
pub struct MultHyperbolicComplex {
    pub c: Arc<ChainComplex>,
    pub d: Arc<ChainComplex>,
    pub d_dual: Arc<ChainComplex>,
    pub psi: ChainMap,
}

/// ψ_C = flip ∘ μ_C⁻¹, where μ_C = μ_{C^{-*},C} ∘ (ι ⊗ id): C ⊗ C^{-*} → (C^{-*}⊗C)^{-*}.
pub fn mult_hyperbolic_complex(c: &ChainComplex) -> Result<MultHyperbolicComplex> {
    let c = Arc::new(c.clone());
    let cd = Arc::new(dual_complex(&c));
    let d = Arc::new(tensor(&cd, &c));
    let iota_id = tensor_map(&iota(&c), &ChainMap::identity(cd.clone()));
    let mu_cd = mu(&cd, &c);
    let mu_c = mu_cd.after(&iota_id);
    let fl = flip(&c, &cd).with_ends(mu_c.src.clone(), d.clone())?;
    let psi = fl.after(&signed_perm_inverse(&mu_c)?);
    Ok(MultHyperbolicComplex { c, d, d_dual: mu_c.tgt.clone(), psi })
}

impl MultHyperbolicComplex {
    pub fn is_isomorphism(&self) -> bool {
        self.psi.is_chain_map() && signed_perm_inverse(&self.psi).is_ok()
    }

    /// ψ^{-*} = ι ∘ ψ.
    pub fn is_symmetric(&self) -> bool {
        let lhs = dual_map(&self.psi);
        let rhs = iota(&self.d).after(&self.psi);
        lhs.comps() == rhs.comps()
    }

    /// The form ψ_0⁻¹: D_0 → D_0^* on D_0 = ⊕_i C_i^* ⊗ C_i.
    pub fn degree_zero_form(&self) -> Result<SymmetricForm> {
        let inv = self.psi.comp(0).inverse().ok_or_else(|| Error::IdentityFailure("ψ_C is not invertible in degree 0".into()))?;
        SymmetricForm::new(inv)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EulerSignatureReport {
    pub form: SymmetricForm,
    pub signature: i64,
    pub euler: i64,
    /// Per degree i: whether the diagonal block is (−1)^i H_⊗(C_i).
    pub blocks: Vec<(i32, bool)>,
    pub off_block_zero: bool,
}

impl EulerSignatureReport {
    pub fn holds(&self) -> bool {
        self.signature == self.euler && self.off_block_zero && self.blocks.iter().all(|b| b.1)
    }
}

/// Degree-zero form of H_⊗(C): splits as ⊕ (−1)^i ψ_{C_i} and has signature χ(C).
pub fn euler_signature_check(c: &ChainComplex) -> Result<EulerSignatureReport> {
    if c.has_idempotents() {
        return Err(Error::InvalidInput("the check needs a free complex".into()));
    }
    let h = mult_hyperbolic_complex(c)?;
    let form = h.degree_zero_form()?;
    let cd = dual_complex(c);
    let layout = tensor_layout(&cd, c, 0);
    let mut blocks = Vec::new();
    let mut expected = Vec::new();
    for &(p, q, _) in &layout {
        debug_assert_eq!(p, -q);
        let sign = if q.rem_euclid(2) == 0 { 1 } else { -1 };
        expected.push(mult_hyperbolic_form(c.rank(q)).scale(sign));
    }
    let refs: Vec<&SymmetricForm> = expected.iter().collect();
    let want = SymmetricForm::direct_sum(&refs);
    for (k, &(_, q, off)) in layout.iter().enumerate() {
        let r = expected[k].rank();
        blocks.push((q, form.gram.submatrix(off, r, off, r) == expected[k].gram));
    }
    let off_block_zero = form.gram.entries().all(|(i, j, v)| want.gram.get(i, j) == v);
    let signature = if form.rank() == 0 { 0 } else { signature(&form)? };
    Ok(EulerSignatureReport { form, signature, euler: c.euler_characteristic(), blocks, off_block_zero })
}

/// ψ + ψ^{-*} as a map C^{-*} → C, using ι⁻¹: C^{-*-*} → C.
pub fn symmetrization(psi: &ChainMap) -> ChainMap {
    let dual = dual_map(psi);
    let mut comps = std::collections::BTreeMap::new();
    for n in psi.src.degrees() {
        let s = if n.rem_euclid(2) == 0 { 1 } else { -1 };
        comps.insert(n, psi.comp(n).add(&dual.comp(n).scale(s)));
    }
    ChainMap::new(psi.src.clone(), psi.tgt.clone(), 0, comps).expect("symmetrization shapes")
}

/// Ultra-quadratic Poincaré complex (C, ψ) with homotopy-inverse data for ψ + ψ^{-*}.
#[derive(Clone, Debug)]
pub struct UltraQuadraticComplex {
    pub c: Arc<ChainComplex>,
    pub psi: ChainMap,
    pub witness: Equivalence,
}

impl UltraQuadraticComplex {
    /// `g`: C → C^{-*}, `h` on C^{-*}, `k` on C; f is ψ + ψ^{-*}.
    pub fn new(psi: ChainMap, g: ChainMap, h: ChainMap, k: ChainMap) -> UltraQuadraticComplex {
        let f = symmetrization(&psi);
        UltraQuadraticComplex { c: psi.tgt.clone(), psi, witness: Equivalence { f, g, h, k } }
    }

    /// A quadratic form α on ℤ^r in degree 0; the witness is (α + αᵀ)⁻¹.
    pub fn from_quadratic_form(alpha: &Matrix) -> Result<UltraQuadraticComplex> {
        if !alpha.is_square() {
            return Err(Error::Shape(format!("form matrix is {:?}", alpha.shape())));
        }
        let r = alpha.rows();
        let c = Arc::new(ChainComplex::concentrated(0, r));
        let cd = Arc::new(dual_complex(&c));
        let psi = ChainMap::from_fn(cd.clone(), c.clone(), 0, |_| alpha.clone())?;
        let sym = alpha.add(&alpha.transpose());
        let inv = sym.inverse().ok_or_else(|| Error::NotAnEquivalence(format!("α + αᵀ has determinant {}, not a unit", sym.det())))?;
        let g = ChainMap::from_fn(c.clone(), cd.clone(), 0, |_| inv.clone())?;
        Ok(UltraQuadraticComplex::new(psi, g, ChainMap::zero(cd.clone(), cd, 1), ChainMap::zero(c.clone(), c, 1)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UltraQuadraticReport {
    pub violations: Vec<String>,
    #[serde(with = "crate::rational::opt_q_str", default)]
    pub epsilon: Option<Q>,
}

impl UltraQuadraticReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks ψ + ψ^{-*} against the witness exactly and, given a control space,
/// that ψ and all witness data are ε-controlled.
pub fn verify_ultraquadratic(u: &UltraQuadraticComplex, control: Option<(&ControlSpace, Q)>) -> UltraQuadraticReport {
    let mut violations = Vec::new();
    let cd = dual_complex(&u.c);
    if u.psi.degree != 0 || *u.psi.src != cd || *u.psi.tgt != *u.c {
        violations.push("ψ must be a degree-0 map C^{-*} → C".to_string());
        return UltraQuadraticReport { violations, epsilon: None };
    }
    if !u.psi.is_chain_map() {
        violations.push("ψ is not a chain map".into());
    }
    let sym = symmetrization(&u.psi);
    if u.witness.f.comps() != sym.comps() {
        violations.push("witness map differs from ψ + ψ^{-*}".into());
    }
    if let Err(e) = u.witness.verify() {
        violations.push(format!("ψ + ψ^{{-*}} is not a chain homotopy equivalence: {e}"));
    }
    let mut epsilon = None;
    if let Some((space, eps)) = control {
        let maps = [("ψ", &u.psi), ("g", &u.witness.g), ("h", &u.witness.h), ("k", &u.witness.k)];
        let mut worst = Q::zero();
        for (name, m) in maps {
            if m.src.positions.is_none() || m.tgt.positions.is_none() {
                violations.push(format!("{name} is not positioned"));
                continue;
            }
            let e = chain_map_epsilon(m, space);
            if e > eps {
                violations.push(format!("{name} is {}-controlled, bound {}", fmt_q(&e), fmt_q(&eps)));
            }
            worst = worst.max(e);
        }
        epsilon = Some(worst);
    }
    UltraQuadraticReport { violations, epsilon }
}
