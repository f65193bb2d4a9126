//! Equivariant graded maps between induced complexes ℤ[G] ⊗ C, stored by letter.
//!
//! The component from the copy at g′ to the copy at g sits at letter g⁻¹g′,
//! so composition is convolution and the differential lives at the identity.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::chain::ops::{dual_complex, dual_map_between};
use crate::chain::{ChainComplex, ChainMap, Positions};
use crate::control::EquivariantMorphism;
use crate::error::{Error, Result};
use crate::groups::{Elem, FiniteSubset, GroupBackend};
use crate::matrix::Matrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EqChainMap {
    pub src: Arc<ChainComplex>,
    pub tgt: Arc<ChainComplex>,
    pub degree: i32,
    pub letters: BTreeMap<Elem, ChainMap>,
}

impl EqChainMap {
    pub fn new(src: Arc<ChainComplex>, tgt: Arc<ChainComplex>, degree: i32, letters: BTreeMap<Elem, ChainMap>) -> Result<EqChainMap> {
        for (a, m) in &letters {
            if m.degree != degree || *m.src != *src || *m.tgt != *tgt {
                return Err(Error::Shape(format!("letter {a:?} has the wrong ends or degree")));
            }
        }
        let letters = letters.into_iter().filter(|(_, m)| !m.is_zero()).collect();
        Ok(EqChainMap { src, tgt, degree, letters })
    }

    pub fn zero(src: Arc<ChainComplex>, tgt: Arc<ChainComplex>, degree: i32) -> EqChainMap {
        EqChainMap { src, tgt, degree, letters: BTreeMap::new() }
    }

    /// A map concentrated at the identity letter.
    pub fn plain(group: &GroupBackend, f: ChainMap) -> EqChainMap {
        let (src, tgt, degree) = (f.src.clone(), f.tgt.clone(), f.degree);
        let letters = if f.is_zero() { BTreeMap::new() } else { [(group.identity(), f)].into() };
        EqChainMap { src, tgt, degree, letters }
    }

    pub fn identity(group: &GroupBackend, c: Arc<ChainComplex>) -> EqChainMap {
        EqChainMap::plain(group, ChainMap::identity(c))
    }

    pub fn letter(&self, a: &Elem) -> ChainMap {
        self.letters.get(a).cloned().unwrap_or_else(|| ChainMap::zero(self.src.clone(), self.tgt.clone(), self.degree))
    }

    pub fn support_letters(&self) -> FiniteSubset {
        FiniteSubset::new(self.letters.keys().cloned().collect())
    }

    pub fn is_zero(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn add(&self, o: &EqChainMap) -> EqChainMap {
        let mut letters = self.letters.clone();
        for (a, m) in &o.letters {
            let v = letters.get(a).map_or_else(|| m.clone(), |x| x.add(m));
            letters.insert(a.clone(), v);
        }
        letters.retain(|_, m| !m.is_zero());
        EqChainMap { src: self.src.clone(), tgt: self.tgt.clone(), degree: self.degree, letters }
    }

    pub fn neg(&self) -> EqChainMap {
        self.map_letters(|_, m| m.neg())
    }

    pub fn sub(&self, o: &EqChainMap) -> EqChainMap {
        self.add(&o.neg())
    }

    fn map_letters(&self, f: impl Fn(&Elem, &ChainMap) -> ChainMap) -> EqChainMap {
        let letters = self.letters.iter().map(|(a, m)| (a.clone(), f(a, m))).filter(|(_, m)| !m.is_zero()).collect();
        EqChainMap { src: self.src.clone(), tgt: self.tgt.clone(), degree: self.degree, letters }
    }

    /// `self ∘ f` by convolution.
    pub fn after(&self, group: &GroupBackend, f: &EqChainMap) -> EqChainMap {
        let mut letters: BTreeMap<Elem, ChainMap> = BTreeMap::new();
        for (a, ma) in &self.letters {
            for (b, mb) in &f.letters {
                let p = ma.after(mb);
                let c = group.mul(a, b);
                let v = letters.get(&c).map_or_else(|| p.clone(), |x| x.add(&p));
                letters.insert(c, v);
            }
        }
        letters.retain(|_, m| !m.is_zero());
        EqChainMap { src: f.src.clone(), tgt: self.tgt.clone(), degree: self.degree + f.degree, letters }
    }

    /// Letterwise d∘f − (−1)^k f∘d.
    pub fn commutator_with_d(&self) -> EqChainMap {
        let letters = self.letters.iter().map(|(a, m)| (a.clone(), m.commutator_with_d())).filter(|(_, m)| !m.is_zero()).collect();
        EqChainMap { src: self.src.clone(), tgt: self.tgt.clone(), degree: self.degree - 1, letters }
    }

    pub fn is_chain_map(&self) -> bool {
        self.commutator_with_d().is_zero()
    }

    /// (f^{-*})_a = (f_{a⁻¹})^{-*}, between the dual complexes.
    pub fn dual(&self, group: &GroupBackend) -> EqChainMap {
        let dsrc = Arc::new(dual_complex(&self.tgt));
        let dtgt = Arc::new(dual_complex(&self.src));
        let letters = self.letters.iter().map(|(a, m)| (group.inv(a), dual_map_between(m, dsrc.clone(), dtgt.clone()))).collect();
        EqChainMap { src: dsrc, tgt: dtgt, degree: self.degree, letters }
    }

    /// Same letters between complexes with identical modules.
    pub fn with_ends(&self, src: Arc<ChainComplex>, tgt: Arc<ChainComplex>) -> Result<EqChainMap> {
        let letters = self.letters.iter().map(|(a, m)| Ok((a.clone(), m.with_ends(src.clone(), tgt.clone())?))).collect::<Result<_>>()?;
        Ok(EqChainMap { src, tgt, degree: self.degree, letters })
    }

    /// Σ_a χ(a) f_a: the image under a ring map ℤ[G] → ℤ given by a ±1 character.
    pub fn specialize(&self, chi: impl Fn(&Elem) -> i64) -> ChainMap {
        self.letters.iter().fold(ChainMap::zero(self.src.clone(), self.tgt.clone(), self.degree), |acc, (a, m)| acc.add(&m.scale(chi(a))))
    }

    /// The explicit map between the induced complexes of a finite group.
    pub fn expand(&self, group: &GroupBackend) -> Result<ChainMap> {
        let src = Arc::new(expand_complex(group, &self.src)?);
        let tgt = Arc::new(expand_complex(group, &self.tgt)?);
        self.expand_between(group, src, tgt)
    }

    /// Block (g, h) in degree n is letter g⁻¹h; copies are ordered as `group.elements()`.
    pub fn expand_between(&self, group: &GroupBackend, src: Arc<ChainComplex>, tgt: Arc<ChainComplex>) -> Result<ChainMap> {
        let elems = finite_elements(group)?;
        let k = self.degree;
        ChainMap::from_fn(src.clone(), tgt.clone(), k, |n| {
            let (ns, nt) = (self.src.rank(n), self.tgt.rank(n + k));
            let mut trip = Vec::new();
            for (gi, g) in elems.iter().enumerate() {
                for (hi, h) in elems.iter().enumerate() {
                    if let Some(m) = self.letters.get(&group.quot(g, h)) {
                        trip.extend(m.comp(n).entries().map(|(i, j, v)| (gi * nt + i, hi * ns + j, v)));
                    }
                }
            }
            Matrix::from_triplets(tgt.rank(n + k), src.rank(n), trip)
        })
    }
}

fn finite_elements(group: &GroupBackend) -> Result<Vec<Elem>> {
    group.elements().ok_or_else(|| Error::UndecidableBackend("expansion needs a finite group".into()))
}

/// ⊕_{g ∈ G} C with copy g at positions g·|Z| + z of G × Z.
pub fn expand_complex(group: &GroupBackend, c: &ChainComplex) -> Result<ChainComplex> {
    let elems = finite_elements(group)?;
    let k = elems.len();
    if c.len() == 0 {
        return Ok(ChainComplex::zero());
    }
    let rep = |m: &Matrix| Matrix::block_diag(&vec![m; k]);
    let ranks = c.ranks.iter().map(|r| r * k).collect();
    let diffs = c.degrees().skip(1).map(|n| rep(&c.d(n))).collect();
    let mut out = ChainComplex::new(c.lo, ranks, diffs)?;
    if c.has_idempotents() {
        out = out.with_idempotents(c.degrees().map(|n| rep(&c.p(n))).collect())?;
    }
    if let Some(Positions { npoints, at }) = &c.positions {
        let at = at.iter().map(|v| (0..k).flat_map(|g| v.iter().map(move |&z| g * npoints + z)).collect()).collect();
        out = out.with_positions(k * npoints, at)?;
    }
    Ok(out)
}

/// Inverse of an equivariant automorphism over a finite group, read off the
/// regular representation; `None` when it is not invertible over ℤ[G].
pub fn equivariant_inverse(group: &GroupBackend, alpha: &EquivariantMorphism) -> Result<Option<EquivariantMorphism>> {
    let elems = finite_elements(group)?;
    let all = FiniteSubset::new(elems.clone());
    let big = alpha.expand(group, &all);
    let Some(inv) = big.matrix.inverse() else { return Ok(None) };
    let (ns, nt) = (alpha.src.len(), alpha.tgt.len());
    // the identity copy's row block: letter h sits in block (e, h)
    let e_idx = elems.iter().position(|g| group.is_identity(g)).expect("identity is an element");
    let letters = elems.iter().enumerate().map(|(hi, h)| (h.clone(), inv.submatrix(e_idx * ns, ns, hi * nt, nt))).collect();
    Ok(Some(EquivariantMorphism::new(alpha.tgt.clone(), alpha.src.clone(), letters)?))
}

/// A homotopy of equivariant maps: dH + (−1)^k H d = target − source letterwise.
#[derive(Clone, Debug)]
pub struct EqHomotopy {
    pub source: EqChainMap,
    pub target: EqChainMap,
    pub h: EqChainMap,
}

impl EqHomotopy {
    /// [d, H] − (target − source).
    pub fn defect(&self) -> EqChainMap {
        self.h.commutator_with_d().sub(&self.target.sub(&self.source))
    }

    pub fn verify(&self) -> Result<()> {
        if !self.defect().is_zero() {
            return Err(Error::ConventionMismatch("dH + Hd ≠ target − source".into()));
        }
        Ok(())
    }
}
