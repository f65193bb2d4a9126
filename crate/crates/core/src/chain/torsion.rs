//! K₀ classes of projective complexes and K₁ self-torsion of self-equivalences.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::chain::complex::{ChainComplex, ChainMap, Equivalence};
use crate::chain::ops::cone;
use crate::error::{Error, Result};
use crate::matrix::{sign_of, Matrix};

/// Formal integer combination of idempotent classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct K0Class {
    pub terms: Vec<(i64, Matrix)>,
}

impl K0Class {
    /// Rank reduction ℤ-valued: Σ c·rank(p).
    pub fn rank(&self) -> i64 {
        self.terms.iter().map(|(c, p)| c * p.rank() as i64).sum()
    }

    pub fn free(rank: usize) -> K0Class {
        K0Class { terms: vec![(1, Matrix::identity(rank))] }
    }
}

/// o(C) = Σ (−1)^n [C_n].
pub fn finiteness_obstruction(c: &ChainComplex) -> K0Class {
    let terms = c.degrees().filter(|&n| c.rank(n) > 0).map(|n| (if n.rem_euclid(2) == 0 { 1 } else { -1 }, c.p(n))).collect();
    K0Class { terms }
}

/// A K₁ representative over ℤ with its determinant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct K1Class {
    pub rep: Matrix,
    #[serde(with = "bigint_str")]
    pub det: BigInt,
}

impl K1Class {
    pub fn of_matrix(m: Matrix) -> Result<K1Class> {
        if !m.is_square() {
            return Err(Error::Shape("K₁ representative must be square".into()));
        }
        let det = m.det();
        if det != BigInt::one() && det != -BigInt::one() {
            return Err(Error::NotAnEquivalence(format!("representative is not invertible over ℤ (det {det})")));
        }
        Ok(K1Class { rep: m, det })
    }

    /// Reduced invariant over ℤ: the determinant sign.
    pub fn det_sign(&self) -> i8 {
        sign_of(&self.det)
    }

    pub fn is_trivial(&self) -> bool {
        self.det_sign() == 1
    }
}

mod bigint_str {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        x.to_string().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Completes projective pieces (M, p) by (M, 1 − p) with identity self-maps, giving free data.
fn complete_to_free(eq: &Equivalence) -> Result<Equivalence> {
    let (c, d) = (&eq.f.src, &eq.f.tgt);
    if !c.has_idempotents() && !d.has_idempotents() {
        return Ok(eq.clone());
    }
    if c != d {
        return Err(Error::InvalidInput("projective completion needs a self-equivalence".into()));
    }
    let free = Arc::new(c.underlying_free());
    let comp = |m: &ChainMap| -> Result<ChainMap> {
        ChainMap::from_fn(free.clone(), free.clone(), 0, |n| {
            let p = c.p(n);
            m.comp(n).add(&Matrix::identity(p.rows()).sub(&p))
        })
    };
    Ok(Equivalence { f: comp(&eq.f)?, g: comp(&eq.g)?, h: eq.h.with_ends(free.clone(), free.clone())?, k: eq.k.with_ends(free.clone(), free.clone())? })
}

/// Contraction of cone(f) built from the witness: Γ = [[−h′, g], [k f h − f h h − k k f, k]]
/// with h′ = h + g k f − h g f.
pub fn cone_contraction(eq: &Equivalence, cn: &ChainComplex) -> Vec<(i32, Matrix)> {
    let (f, g, h, k) = (&eq.f, &eq.g, &eq.h, &eq.k);
    let (c, d) = (&f.src, &f.tgt);
    let hp = h.add(&g.after(k).after(f)).sub(&h.after(g).after(f));
    let p = k.after(f).after(h).sub(&f.after(h).after(h)).sub(&k.after(k).after(f));
    cn.degrees()
        .map(|n| {
            let rs = [c.rank(n), d.rank(n + 1)];
            let cs = [c.rank(n - 1), d.rank(n)];
            let a = hp.comp(n - 1).neg();
            let b = g.comp(n);
            let pp = p.comp(n - 1);
            let q = k.comp(n);
            (n, Matrix::blocks(&rs, &cs, &[(0, 0, &a), (0, 1, &b), (1, 0, &pp), (1, 1, &q)]))
        })
        .collect()
}

/// (d + Γ) restricted to odd degrees, landing in even degrees.
pub fn odd_to_even(cn: &ChainComplex, gamma: &[(i32, Matrix)]) -> Matrix {
    let gam = |n: i32| -> Matrix { gamma.iter().find(|(m, _)| *m == n).map(|(_, x)| x.clone()).unwrap_or_else(|| Matrix::zeros(cn.rank(n + 1), cn.rank(n))) };
    let odd: Vec<i32> = cn.degrees().filter(|n| n.rem_euclid(2) == 1).collect();
    let even: Vec<i32> = cn.degrees().filter(|n| n.rem_euclid(2) == 0).collect();
    let rs: Vec<usize> = even.iter().map(|&n| cn.rank(n)).collect();
    let cs: Vec<usize> = odd.iter().map(|&n| cn.rank(n)).collect();
    let mut owned: Vec<(usize, usize, Matrix)> = Vec::new();
    for (j, &n) in odd.iter().enumerate() {
        if let Some(i) = even.iter().position(|&m| m == n - 1) {
            owned.push((i, j, cn.d(n)));
        }
        if let Some(i) = even.iter().position(|&m| m == n + 1) {
            owned.push((i, j, gam(n)));
        }
    }
    let refs: Vec<(usize, usize, &Matrix)> = owned.iter().map(|(i, j, m)| (*i, *j, m)).collect();
    Matrix::blocks(&rs, &cs, &refs)
}

/// Torsion of the cone of an equivalence, from the witness contraction.
pub fn cone_torsion(eq: &Equivalence) -> Result<K1Class> {
    eq.verify()?;
    let eq = complete_to_free(eq)?;
    let cn = cone(&eq.f)?;
    let gamma = cone_contraction(&eq, &cn);
    for n in cn.degrees() {
        // d Γ_n + Γ_{n-1} d = 1 on cone_n
        let g_n = &gamma.iter().find(|(m, _)| *m == n).unwrap().1;
        let mut lhs = cn.d(n + 1).mul(g_n);
        if let Some((_, g_prev)) = gamma.iter().find(|(m, _)| *m == n - 1) {
            lhs = lhs.add(&g_prev.mul(&cn.d(n)));
        }
        if !lhs.is_identity() && !(cn.rank(n) == 0) {
            return Err(Error::NotAnEquivalence(format!("cone contraction fails in degree {n}")));
        }
    }
    K1Class::of_matrix(odd_to_even(&cn, &gamma))
}

/// Self-torsion [(C, f)] of a self-equivalence with its homotopy-inverse witness.
pub fn self_torsion(eq: &Equivalence) -> Result<K1Class> {
    if eq.f.src != eq.f.tgt {
        return Err(Error::InvalidInput("self-torsion needs f: C → C".into()));
    }
    cone_torsion(eq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::complex::ChainComplex;

    fn scalar_equiv(n: i32, v: i64) -> Equivalence {
        let c = Arc::new(ChainComplex::concentrated(n, 1));
        let f = ChainMap::from_fn(c.clone(), c.clone(), 0, |_| Matrix::scalar(1, v)).unwrap();
        let z = ChainMap::zero(c.clone(), c.clone(), 1);
        Equivalence { f: f.clone(), g: f, h: z.clone(), k: z }
    }

    #[test]
    fn identity_is_trivial() {
        let c = Arc::new(ChainComplex::new(0, vec![2, 1], vec![Matrix::from_dense(&[vec![1], vec![-1]])]).unwrap());
        assert!(self_torsion(&Equivalence::identity(c)).unwrap().is_trivial());
    }

    #[test]
    fn minus_one_in_degree_zero() {
        assert_eq!(self_torsion(&scalar_equiv(0, -1)).unwrap().det_sign(), -1);
    }

    #[test]
    fn minus_one_in_degree_one() {
        // the inverse of -1 is -1 again
        assert_eq!(self_torsion(&scalar_equiv(1, -1)).unwrap().det_sign(), -1);
    }

    #[test]
    fn degree_zero_class_is_the_matrix_class() {
        let c = Arc::new(ChainComplex::concentrated(0, 2));
        let v = Matrix::from_dense(&[vec![0, 1], vec![1, 0]]);
        let f = ChainMap::from_fn(c.clone(), c.clone(), 0, |_| v.clone()).unwrap();
        let z = ChainMap::zero(c.clone(), c.clone(), 1);
        let eq = Equivalence { f: f.clone(), g: f, h: z.clone(), k: z };
        assert_eq!(self_torsion(&eq).unwrap().det, v.det());
    }

    #[test]
    fn bad_witness_is_rejected() {
        let mut eq = scalar_equiv(0, -1);
        eq.g = eq.g.neg();
        assert!(matches!(self_torsion(&eq), Err(Error::NotAnEquivalence(_))));
    }

    #[test]
    fn obstruction_examples() {
        assert_eq!(finiteness_obstruction(&ChainComplex::zero()).rank(), 0);
        let c = ChainComplex::new(0, vec![3, 2], vec![Matrix::zeros(3, 2)]).unwrap();
        assert_eq!(finiteness_obstruction(&c).rank(), 1);
    }
}
