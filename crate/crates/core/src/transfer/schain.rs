//! Chain homotopy S-actions (P, φ^P, H^P) and their control certificates.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::actions::HomotopySAction;
use crate::chain::{is_homotopy, ChainComplex, ChainMap};
use crate::control::{chain_map_epsilon, differential_epsilon, PointMap};
use crate::error::{Error, Result};
use crate::groups::{Elem, FiniteSubset, GroupBackend};
use crate::rational::{fmt_q, Q};
use crate::simplicial::{chain_complex_of, induced_chain_map, prism_homotopy, Placement, SimplicialComplex};

#[derive(Clone, Debug)]
pub struct HomotopySChainComplex {
    pub group: GroupBackend,
    pub s: FiniteSubset,
    pub p: Arc<ChainComplex>,
    pub phi: BTreeMap<Elem, ChainMap>,
    /// H_{g,h}: a homotopy φ_g∘φ_h → φ_{gh} for every composable pair.
    pub h: BTreeMap<(Elem, Elem), ChainMap>,
}

/// Measured control of a homotopy S-chain complex against a homotopy S-action.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SChainCertificate {
    /// Largest distance bridged by the differential (and idempotents).
    #[serde(with = "crate::rational::qser")]
    pub eps_d: Q,
    /// max d(x, φ_g(y)) over supp φ^P_g.
    #[serde(with = "crate::rational::qser")]
    pub eps_phi: Q,
    /// max over supp H^P_{g,h} of min_t d(x, H_{g,h}(y, t)).
    #[serde(with = "crate::rational::qser")]
    pub eps_h: Q,
}

impl SChainCertificate {
    pub fn epsilon(&self) -> Q {
        self.eps_d.max(self.eps_phi).max(self.eps_h)
    }
}

impl HomotopySChainComplex {
    /// The composable pairs (g, h) with g, h, gh ∈ S.
    pub fn composable(&self) -> Vec<(Elem, Elem)> {
        let mut out = Vec::new();
        for g in &self.s.elements {
            for h in &self.s.elements {
                if self.s.contains(&self.group.mul(g, h)) {
                    out.push((g.clone(), h.clone()));
                }
            }
        }
        out
    }

    pub fn phi(&self, g: &Elem) -> Result<&ChainMap> {
        self.phi.get(g).ok_or_else(|| Error::SupportEscape(format!("{} is not in S", self.group.name(g))))
    }

    pub fn homotopy(&self, g: &Elem, h: &Elem) -> Result<&ChainMap> {
        self.h
            .get(&(g.clone(), h.clone()))
            .ok_or_else(|| Error::HypothesisViolation(format!("H_{{{},{}}} is not defined", self.group.name(g), self.group.name(h))))
    }

    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        let e = self.group.identity();
        if !self.s.contains(&e) {
            v.push("S does not contain the identity".into());
        }
        for g in &self.s.elements {
            let name = self.group.name(g);
            match self.phi.get(g) {
                None => v.push(format!("φ_{name} missing")),
                Some(m) => {
                    if m.degree != 0 || *m.src != *self.p || *m.tgt != *self.p {
                        v.push(format!("φ_{name} is not a degree-0 self-map of P"));
                    } else if m.check().is_err() {
                        v.push(format!("φ_{name} is not a chain map of P"));
                    }
                }
            }
        }
        if !v.is_empty() {
            return v;
        }
        if self.phi[&e] != ChainMap::identity(self.p.clone()) {
            v.push("φ_e is not the identity".into());
        }
        for (g, h) in self.composable() {
            let name = format!("H_{{{},{}}}", self.group.name(&g), self.group.name(&h));
            let Some(hm) = self.h.get(&(g.clone(), h.clone())) else {
                v.push(format!("{name} missing"));
                continue;
            };
            if hm.degree != 1 || *hm.src != *self.p || *hm.tgt != *self.p {
                v.push(format!("{name} is not a degree-1 self-map of P"));
                continue;
            }
            if self.group.is_identity(&g) && self.group.is_identity(&h) && !hm.is_zero() {
                v.push("H_{e,e} is not zero".into());
            }
            let start = self.phi[&g].after(&self.phi[&h]);
            let end = &self.phi[&self.group.mul(&g, &h)];
            if !is_homotopy(hm, &start, end) {
                v.push(format!("{name} is not a homotopy φ_g∘φ_h → φ_gh"));
            }
        }
        v
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::HypothesisViolation(v.join("; ")))
        }
    }

    /// The trivial complex T: ℤ in degree 0 at `x0`, φ = id, H = 0.
    pub fn trivial(group: &GroupBackend, s: &FiniteSubset, npoints: usize, x0: usize) -> Result<HomotopySChainComplex> {
        let p = Arc::new(ChainComplex::point().with_positions(npoints, vec![vec![x0]])?);
        HomotopySChainComplex::constant(group, s, p)
    }

    /// Any complex with the strict trivial action φ = id, H = 0.
    pub fn constant(group: &GroupBackend, s: &FiniteSubset, p: Arc<ChainComplex>) -> Result<HomotopySChainComplex> {
        let s = FiniteSubset::with_identity(group, s.elements.clone());
        let id = ChainMap::identity(p.clone());
        let phi = s.elements.iter().map(|g| (g.clone(), id.clone())).collect();
        let mut out = HomotopySChainComplex { group: group.clone(), s, p: p.clone(), phi, h: BTreeMap::new() };
        out.h = out.composable().into_iter().map(|k| (k, ChainMap::zero(p.clone(), p.clone(), 1))).collect();
        out.validate()?;
        Ok(out)
    }

    /// Simplicial chains of `cx`, whose vertices are the points of the action's
    /// space: φ^P_g is induced by φ_g and H^P_{g,h} is the sum of prism
    /// homotopies between consecutive grid frames of H_{g,h}.
    pub fn from_simplicial(action: &HomotopySAction, cx: &SimplicialComplex, placement: &Placement) -> Result<HomotopySChainComplex> {
        let n = action.npoints();
        if cx.nvertices() != n {
            return Err(Error::InvalidInput(format!("complex has {} vertices, space has {n} points", cx.nvertices())));
        }
        let p = Arc::new(chain_complex_of(cx, Some((placement, n))));
        let induced = |m: &PointMap| induced_chain_map(cx, cx, &m.images, p.clone(), p.clone());
        let phi = action.phi.iter().map(|(g, m)| Ok((g.clone(), induced(m)?))).collect::<Result<BTreeMap<_, _>>>()?;
        let mut h = BTreeMap::new();
        for (key, frames) in &action.homotopies {
            let mut acc = ChainMap::zero(p.clone(), p.clone(), 1);
            for w in frames.windows(2) {
                if w[0] != w[1] {
                    acc = acc.add(&prism_homotopy(cx, cx, &w[0].images, &w[1].images, p.clone(), p.clone())?);
                }
            }
            h.insert(key.clone(), acc);
        }
        let out = HomotopySChainComplex { group: action.group.clone(), s: action.s.clone(), p, phi, h };
        out.validate()?;
        Ok(out)
    }

    /// Measures the three control constants against `action`.
    pub fn certify(&self, action: &HomotopySAction) -> Result<SChainCertificate> {
        let space = &action.space;
        if self.p.npoints() != Some(space.len()) {
            return Err(Error::InvalidInput("P is not positioned over the action's space".into()));
        }
        let mut eps_d = differential_epsilon(&self.p, space);
        if self.p.has_idempotents() {
            eps_d = eps_d.max(chain_map_epsilon(&ChainMap::identity(self.p.clone()), space));
        }
        let mut eps_phi = Q::default();
        for (g, m) in &self.phi {
            let pg = action.phi.get(g).ok_or_else(|| Error::SupportEscape(format!("{} is not in the action's S", action.group.name(g))))?;
            for (x, y) in m.support() {
                eps_phi = eps_phi.max(space.d(x, pg.apply(y)));
            }
        }
        let mut eps_h = Q::default();
        for (key, m) in &self.h {
            let frames = action.homotopies.get(key).ok_or_else(|| Error::HypothesisViolation(format!("the action has no homotopy for {key:?}")))?;
            for (x, y) in m.support() {
                let best = frames.iter().map(|f| space.d(x, f.apply(y))).min().expect("frames are nonempty");
                eps_h = eps_h.max(best);
            }
        }
        Ok(SChainCertificate { eps_d, eps_phi, eps_h })
    }

    /// Fails with the first constant above `eps`.
    pub fn check_certificate(&self, action: &HomotopySAction, eps: Q) -> Result<SChainCertificate> {
        let c = self.certify(action)?;
        for (name, v) in [("differential", c.eps_d), ("φ", c.eps_phi), ("H", c.eps_h)] {
            if v > eps {
                return Err(Error::ControlViolation(format!("{name} is {}-controlled, bound {}", fmt_q(&v), fmt_q(&eps))));
            }
        }
        Ok(c)
    }

    /// Pushes positions forward along a point map into `space`.
    pub fn pushforward(&self, npoints: usize, f: impl Fn(usize) -> usize) -> Result<HomotopySChainComplex> {
        let p = Arc::new(self.p.relabel(npoints, f)?);
        let re = |m: &ChainMap| m.with_ends(p.clone(), p.clone());
        Ok(HomotopySChainComplex {
            group: self.group.clone(),
            s: self.s.clone(),
            phi: self.phi.iter().map(|(g, m)| Ok((g.clone(), re(m)?))).collect::<Result<_>>()?,
            h: self.h.iter().map(|(k, m)| Ok((k.clone(), re(m)?))).collect::<Result<_>>()?,
            p,
        })
    }
}
