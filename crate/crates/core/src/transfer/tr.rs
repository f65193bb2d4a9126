//! The twisted transfer tr^P ψ = Σ_a ψ_a ⊗ φ^P_a, the homotopy witnessing its
//! functoriality, and the classical Whitehead and L-theory transfers.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::chain::ops::{dual_complex, tensor, tensor_map_between};
use crate::chain::{ChainComplex, ChainMap};
use crate::control::{convolve, EquivariantMorphism};
use crate::error::{Error, Result};
use crate::groups::{Elem, GroupBackend};
use crate::matrix::Matrix;

use super::equivariant::{EqChainMap, EqHomotopy};
use super::schain::HomotopySChainComplex;

/// A free module of rank `r` in degree 0, sitting over a single point.
pub fn module_complex(r: usize) -> Arc<ChainComplex> {
    Arc::new(ChainComplex::concentrated(0, r).with_positions(1, vec![vec![0; r]]).expect("positions fit"))
}

/// A matrix as a degree-0 map between module complexes.
pub fn matrix_map(m: &Matrix) -> ChainMap {
    let (src, tgt) = (module_complex(m.cols()), module_complex(m.rows()));
    ChainMap::new(src, tgt, 0, [(0, m.clone())].into()).expect("matrix fits the module complexes")
}

/// M ⊗ C for a module of rank `r`.
pub fn induced_complex(r: usize, c: &ChainComplex) -> Arc<ChainComplex> {
    Arc::new(tensor(&module_complex(r), c))
}

/// Σ_a ψ_a ⊗ maps(a), all between M ⊗ C and N ⊗ C.
fn twisted(psi: &EquivariantMorphism, c: &ChainComplex, maps: impl Fn(&Elem) -> Result<ChainMap>) -> Result<EqChainMap> {
    let src = induced_complex(psi.src.len(), c);
    let tgt = induced_complex(psi.tgt.len(), c);
    let mut letters = BTreeMap::new();
    let mut degree = 0;
    for (a, m) in &psi.letters {
        let g = maps(a)?;
        degree = g.degree;
        letters.insert(a.clone(), tensor_map_between(&matrix_map(m), &g, src.clone(), tgt.clone()));
    }
    EqChainMap::new(src, tgt, degree, letters)
}

/// tr^P ψ. Fails with a support escape when a letter of ψ is outside S.
pub fn tr(psi: &EquivariantMorphism, p: &HomotopySChainComplex) -> Result<EqChainMap> {
    twisted(psi, &p.p, |a| p.phi(a).cloned())
}

/// K = Σ_{a,b} (ψ′_a ψ_b) ⊗ H_{a,b}, checked to be a homotopy
/// tr(ψ′)∘tr(ψ) → tr(ψ′∘ψ).
pub fn functoriality_witness(psi2: &EquivariantMorphism, psi: &EquivariantMorphism, p: &HomotopySChainComplex) -> Result<EqHomotopy> {
    let g = &p.group;
    let src = induced_complex(psi.src.len(), &p.p);
    let tgt = induced_complex(psi2.tgt.len(), &p.p);
    let mut letters: BTreeMap<Elem, ChainMap> = BTreeMap::new();
    for (a, ma) in &psi2.letters {
        for (b, mb) in &psi.letters {
            let h = p.homotopy(a, b)?;
            let term = tensor_map_between(&matrix_map(&ma.mul(mb)), h, src.clone(), tgt.clone());
            let c = g.mul(a, b);
            let v = letters.get(&c).map_or_else(|| term.clone(), |x| x.add(&term));
            letters.insert(c, v);
        }
    }
    let h = EqChainMap::new(src, tgt, 1, letters)?;
    let source = tr(psi2, p)?.after(g, &tr(psi, p)?);
    let target = tr(&convolve(g, psi2, psi, None)?, p)?;
    let out = EqHomotopy { source, target, h };
    out.verify()?;
    Ok(out)
}

/// A ⊗_t C: letter g is A_g ⊗ r(g), for monoid data r on a ℤ-chain complex.
pub fn whitehead_transfer(a: &EquivariantMorphism, c: &Arc<ChainComplex>, r: &BTreeMap<Elem, ChainMap>) -> Result<EqChainMap> {
    twisted(a, c, |g| r.get(g).cloned().ok_or_else(|| Error::InvalidInput(format!("no chain map r({g:?}) supplied"))))
}

/// ψ ⊗_t (C, φ) = (ψ ⊗_t C) ∘ (id ⊗ φ) on (M ⊗ C)^{-*} = M* ⊗ C^{-*}.
pub fn classical_l_transfer(
    group: &GroupBackend,
    psi: &EquivariantMorphism,
    c: &Arc<ChainComplex>,
    phi: &ChainMap,
    r: &BTreeMap<Elem, ChainMap>,
) -> Result<EqChainMap> {
    if psi.src.len() != psi.tgt.len() {
        return Err(Error::Shape("a form needs M* and M of equal rank".into()));
    }
    let m = psi.tgt.len();
    let cd = Arc::new(dual_complex(c));
    if phi.degree != 0 || *phi.src != *cd || *phi.tgt != **c {
        return Err(Error::InvalidInput("φ must be a degree-0 map C^{-*} → C".into()));
    }
    let dual_src = Arc::new(dual_complex(&induced_complex(m, c)));
    let idphi = tensor_map_between(&ChainMap::identity(module_complex(m)), phi, dual_src.clone(), induced_complex(m, c));
    let idphi = EqChainMap::plain(group, idphi);
    Ok(whitehead_transfer(psi, c, r)?.after(group, &idphi))
}
