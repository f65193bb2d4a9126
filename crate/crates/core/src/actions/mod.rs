//! Homotopy S-actions on finite metric spaces, with homotopies sampled on a
//! finite time grid.
//!
//! A pair `(g, x)` of `G × X` is written as `(Elem, usize)` throughout.

mod cover;
mod domination;
mod metric;

pub use cover::{
    check_f_cover, contraction_audit, lambda_search, lebesgue_number, nerve_map, AuditReport, CoverMember, CoverReport, CoverSpec, NerveMap, Translate,
};
pub use domination::{validate_domination, DominationData, DominationReport};
pub use metric::{ActionMetric, DsResult, MetricTable, MoveTable};

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::control::{ControlSpace, PointMap};
use crate::error::{Error, Result};
use crate::groups::{Elem, FiniteSubset, GroupBackend};
use crate::rational::Q;

pub type Node = (Elem, usize);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ActionRecord", into = "ActionRecord")]
pub struct HomotopySAction {
    pub group: GroupBackend,
    pub space: ControlSpace,
    pub s: FiniteSubset,
    pub phi: BTreeMap<Elem, PointMap>,
    /// Grid frames of H_{g,h} for g, h, gh ∈ S; frame 0 is φ_g∘φ_h, the last is φ_{gh}.
    pub homotopies: BTreeMap<(Elem, Elem), Vec<PointMap>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct PhiRecord {
    g: Elem,
    map: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct HomotopyRecord {
    g: Elem,
    h: Elem,
    frames: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct ActionRecord {
    group: GroupBackend,
    space: ControlSpace,
    s: Vec<Elem>,
    phi: Vec<PhiRecord>,
    homotopies: Vec<HomotopyRecord>,
}

impl TryFrom<ActionRecord> for HomotopySAction {
    type Error = Error;

    fn try_from(r: ActionRecord) -> Result<HomotopySAction> {
        let n = r.space.len();
        let mk = |m: Vec<usize>| PointMap::new(m, n);
        let a = HomotopySAction {
            group: r.group.rebuild()?,
            space: r.space,
            s: FiniteSubset::new(r.s),
            phi: r.phi.into_iter().map(|p| Ok((p.g, mk(p.map)?))).collect::<Result<_>>()?,
            homotopies: r.homotopies.into_iter().map(|h| Ok(((h.g, h.h), h.frames.into_iter().map(mk).collect::<Result<Vec<_>>>()?))).collect::<Result<_>>()?,
        };
        a.validate()?;
        Ok(a)
    }
}

impl From<HomotopySAction> for ActionRecord {
    fn from(a: HomotopySAction) -> ActionRecord {
        ActionRecord {
            group: a.group,
            space: a.space,
            s: a.s.elements,
            phi: a.phi.into_iter().map(|(g, m)| PhiRecord { g, map: m.images }).collect(),
            homotopies: a.homotopies.into_iter().map(|((g, h), fr)| HomotopyRecord { g, h, frames: fr.into_iter().map(|m| m.images).collect() }).collect(),
        }
    }
}

impl HomotopySAction {
    /// Restriction of a genuine action `g ↦ act(g)` to S, with constant homotopies.
    pub fn genuine(group: GroupBackend, space: ControlSpace, s: FiniteSubset, act: impl Fn(&Elem) -> PointMap) -> Result<Self> {
        let s = FiniteSubset::with_identity(&group, s.elements);
        let phi: BTreeMap<Elem, PointMap> = s.elements.iter().map(|g| (g.clone(), act(g))).collect();
        let mut homotopies = BTreeMap::new();
        for g in &s.elements {
            for h in &s.elements {
                let gh = group.mul(g, h);
                if s.contains(&gh) {
                    homotopies.insert((g.clone(), h.clone()), vec![act(&gh)]);
                }
            }
        }
        let a = HomotopySAction { group, space, s, phi, homotopies };
        a.validate()?;
        Ok(a)
    }

    pub fn npoints(&self) -> usize {
        self.space.len()
    }

    /// Composable pairs (g, h) with gh ∈ S.
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

    /// Every violated axiom, by name.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        let n = self.npoints();
        let e = self.group.identity();
        if !self.s.contains(&e) {
            v.push("S does not contain the identity".to_string());
        }
        for g in &self.s.elements {
            match self.phi.get(g) {
                None => v.push(format!("φ missing for {}", self.group.name(g))),
                Some(m) if m.images.len() != n || m.target_len != n => v.push(format!("φ_{} is not a self-map of X", self.group.name(g))),
                _ => {}
            }
        }
        if let Some(pe) = self.phi.get(&e) {
            if *pe != PointMap::identity(n) {
                v.push("φ_e is not the identity".to_string());
            }
        }
        if !v.is_empty() {
            return v;
        }
        for (g, h) in self.composable() {
            let name = format!("H_{{{},{}}}", self.group.name(&g), self.group.name(&h));
            let Some(frames) = self.homotopies.get(&(g.clone(), h.clone())) else {
                v.push(format!("{name} missing"));
                continue;
            };
            if frames.is_empty() || frames.iter().any(|f| f.images.len() != n) {
                v.push(format!("{name} has malformed frames"));
                continue;
            }
            let start = self.phi[&h].then(&self.phi[&g]);
            if frames[0] != start {
                v.push(format!("{name} does not start at φ_g∘φ_h"));
            }
            if *frames.last().unwrap() != self.phi[&self.group.mul(&g, &h)] {
                v.push(format!("{name} does not end at φ_gh"));
            }
            if self.group.is_identity(&g) && self.group.is_identity(&h) && frames.iter().any(|f| *f != PointMap::identity(n)) {
                v.push("H_{e,e} is not constant at the identity".to_string());
            }
        }
        for (g, h) in self.homotopies.keys() {
            if !self.s.contains(&self.group.mul(g, h)) || !self.s.contains(g) || !self.s.contains(h) {
                v.push(format!("H given for non-composable pair ({}, {})", self.group.name(g), self.group.name(h)));
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

    /// F_g: all grid frames H_{r,s}(−, t) with rs = g.
    pub fn f_set(&self, g: &Elem) -> Result<BTreeSet<Vec<usize>>> {
        if !self.s.contains(g) {
            return Err(Error::InvalidInput(format!("{} is not in S", self.group.name(g))));
        }
        let mut out = BTreeSet::new();
        for ((r, s), frames) in &self.homotopies {
            if self.group.mul(r, s) == *g {
                out.extend(frames.iter().map(|f| f.images.clone()));
            }
        }
        Ok(out)
    }

    /// S^n(g, x), by layered search over the move relations.
    pub fn s_orbit(&self, n: usize, from: &Node, horizon: usize) -> Result<BTreeSet<Node>> {
        if n > horizon {
            return Err(Error::HorizonExceeded(format!("orbit depth {n} > horizon {horizon}")));
        }
        let moves = MoveTable::new(self)?;
        Ok(moves.orbit(&self.group, n, from))
    }

    /// Every map in some F_g or among the φ_g.
    pub fn all_maps(&self) -> BTreeSet<Vec<usize>> {
        let mut out: BTreeSet<Vec<usize>> = self.phi.values().map(|m| m.images.clone()).collect();
        for frames in self.homotopies.values() {
            out.extend(frames.iter().map(|f| f.images.clone()));
        }
        out
    }

    /// Moduli tables: β(ε) is the largest displacement of an ε-close pair
    /// under any φ_g or grid frame; α(ε) the largest grid δ with β(δ) ≤ ε.
    pub fn moduli(&self, grid: &[Q]) -> Moduli {
        let mut grid = grid.to_vec();
        grid.sort();
        grid.dedup();
        let maps = self.all_maps();
        let n = self.npoints();
        let beta: Vec<Q> = grid
            .iter()
            .map(|&eps| {
                let mut best = Q::default();
                for x in 0..n {
                    for y in 0..n {
                        if self.space.d(x, y) <= eps {
                            for m in &maps {
                                best = best.max(self.space.d(m[x], m[y]));
                            }
                        }
                    }
                }
                best
            })
            .collect();
        let alpha = grid.iter().map(|&eps| grid.iter().zip(&beta).filter(|(_, &b)| b <= eps).map(|(&d, _)| d).max()).collect();
        Moduli { grid, beta, alpha }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Moduli {
    #[serde(with = "crate::rational::qvec")]
    pub grid: Vec<Q>,
    #[serde(with = "crate::rational::qvec")]
    pub beta: Vec<Q>,
    #[serde(skip)]
    pub alpha: Vec<Option<Q>>,
}
