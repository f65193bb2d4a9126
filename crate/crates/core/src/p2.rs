//! Unordered pairs: the metric on P₂(X), stabilizers of pairs, induced
//! homotopy actions, and audits of the two comparison estimates.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::actions::{ActionMetric, HomotopySAction, Node};
use crate::control::{ControlSpace, PointMap};
use crate::error::{Error, Result};
use crate::groups::{family_member, Elem, FamilyPredicate, SubgroupDescription};
use crate::par::{self, Mode};
use crate::rational::{qi, Dist, Q};

/// (x:y), stored with x ≤ y.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "[usize; 2]", from = "[usize; 2]")]
pub struct UnorderedPair(pub usize, pub usize);

impl UnorderedPair {
    pub fn new(x: usize, y: usize) -> UnorderedPair {
        UnorderedPair(x.min(y), x.max(y))
    }

    pub fn is_diagonal(&self) -> bool {
        self.0 == self.1
    }

    pub fn map(&self, f: &PointMap) -> UnorderedPair {
        UnorderedPair::new(f.apply(self.0), f.apply(self.1))
    }
}

impl From<UnorderedPair> for [usize; 2] {
    fn from(p: UnorderedPair) -> [usize; 2] {
        [p.0, p.1]
    }
}

impl From<[usize; 2]> for UnorderedPair {
    fn from(a: [usize; 2]) -> UnorderedPair {
        UnorderedPair::new(a[0], a[1])
    }
}

/// min{d(x,x′) + d(y,y′), d(x,y′) + d(y,x′)} for any distance function.
pub fn pair_distance<T: Copy + std::ops::Add<Output = T> + Ord>(d: impl Fn(usize, usize) -> T, a: UnorderedPair, b: UnorderedPair) -> T {
    (d(a.0, b.0) + d(a.1, b.1)).min(d(a.0, b.1) + d(a.1, b.0))
}

/// P₂(X) as a control space; point i is `pairs[i]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct P2Space {
    pub space: ControlSpace,
    pub pairs: Vec<UnorderedPair>,
}

impl P2Space {
    pub fn index(&self, p: UnorderedPair) -> usize {
        self.pairs.binary_search(&p).expect("pair of this space")
    }
}

pub fn p2_metric(x: &ControlSpace) -> P2Space {
    let n = x.len();
    let pairs: Vec<UnorderedPair> = (0..n).flat_map(|a| (a..n).map(move |b| UnorderedPair(a, b))).collect();
    let dist = pairs.iter().map(|&a| pairs.iter().map(|&b| pair_distance(|i, j| x.d(i, j), a, b)).collect()).collect();
    let names = pairs.iter().map(|p| format!("({}:{})", x.names[p.0], x.names[p.1])).collect();
    P2Space { space: ControlSpace { names, dist }, pairs }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilizerReport {
    pub pair: UnorderedPair,
    pub stabilizer: Vec<Elem>,
    pub intersection: Vec<Elem>,
    pub index: usize,
    /// Some(true) when G_x, G_y ∈ F and G_(x:y) ∈ F₂; None when the premise fails.
    pub f2_member: Option<bool>,
}

fn genuine_maps(a: &HomotopySAction) -> Result<Vec<(Elem, PointMap)>> {
    let elems = a.group.elements().ok_or_else(|| Error::UndecidableBackend("stabilizers need a finite group".into()))?;
    let mut out = Vec::new();
    for g in &elems {
        let m = a.phi.get(g).ok_or_else(|| Error::HypothesisViolation("S must be all of G for a genuine action".into()))?;
        out.push((g.clone(), m.clone()));
    }
    for (g, mg) in &out {
        for (h, mh) in &out {
            if mh.then(mg) != a.phi[&a.group.mul(g, h)] {
                return Err(Error::HypothesisViolation("the action is not a homomorphism".into()));
            }
        }
    }
    Ok(out)
}

/// G_(x:y), G_x ∩ G_y and the index between them, for a genuine finite action.
pub fn p2_stabilizer_check(a: &HomotopySAction, pair: UnorderedPair, family: &FamilyPredicate) -> Result<StabilizerReport> {
    let maps = genuine_maps(a)?;
    let stabilizer: Vec<Elem> = maps.iter().filter(|(_, m)| pair.map(m) == pair).map(|(g, _)| g.clone()).collect();
    let fixes = |p: usize| maps.iter().filter(move |(_, m)| m.apply(p) == p).map(|(g, _)| g.clone()).collect::<Vec<_>>();
    let (gx, gy) = (fixes(pair.0), fixes(pair.1));
    let intersection: Vec<Elem> = gx.iter().filter(|g| gy.contains(g)).cloned().collect();
    let index = stabilizer.len() / intersection.len();
    if index * intersection.len() != stabilizer.len() || !(1..=2).contains(&index) {
        return Err(Error::IdentityFailure(format!("index of G_x ∩ G_y in G_(x:y) is {index}")));
    }
    let member = |gens: &[Elem], f2: bool| {
        family_member(&a.group, &FamilyPredicate { kind: family.kind.clone(), f2 }, &SubgroupDescription { generators: gens.to_vec() })
    };
    let f2_member = if member(&gx, family.f2)? && member(&gy, family.f2)? { Some(member(&stabilizer, true)?) } else { None };
    Ok(StabilizerReport { pair, stabilizer, intersection, index, f2_member })
}

/// The induced homotopy S-action (P₂(φ), P₂(H)) on P₂(X).
pub fn p2_action(a: &HomotopySAction) -> Result<(HomotopySAction, P2Space)> {
    let p2 = p2_metric(&a.space);
    let lift = |m: &PointMap| PointMap { images: p2.pairs.iter().map(|p| p2.index(p.map(m))).collect(), target_len: p2.pairs.len() };
    let b = HomotopySAction {
        group: a.group.clone(),
        space: p2.space.clone(),
        s: a.s.clone(),
        phi: a.phi.iter().map(|(g, m)| (g.clone(), lift(m))).collect(),
        homotopies: a.homotopies.iter().map(|(k, fr)| (k.clone(), fr.iter().map(lift).collect())).collect(),
    };
    b.validate()?;
    Ok((b, p2))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LipschitzReport {
    /// f is (δ, ε/2): d(x, x′) ≤ δ ⇒ d(fx, fx′) ≤ ε/2.
    pub hypothesis: bool,
    /// P₂(f) is (δ, ε) on all pairs of pairs.
    pub conclusion: bool,
    pub counterexample: Option<(UnorderedPair, UnorderedPair)>,
}

pub fn lipschitz_transfer_audit(x: &ControlSpace, y: &ControlSpace, f: &PointMap, delta: Q, eps: Q) -> LipschitzReport {
    let n = x.len();
    let hypothesis = (0..n).all(|a| (0..n).all(|b| x.d(a, b) > delta || y.d(f.apply(a), f.apply(b)) * qi(2) <= eps));
    let px = p2_metric(x);
    let mut counterexample = None;
    'outer: for (i, &z) in px.pairs.iter().enumerate() {
        for (j, &w) in px.pairs.iter().enumerate() {
            if px.space.d(i, j) <= delta && pair_distance(|a, b| y.d(a, b), z.map(f), w.map(f)) > eps {
                counterexample = Some((z, w));
                break 'outer;
            }
        }
    }
    LipschitzReport { hypothesis, conclusion: counterexample.is_none(), counterexample }
}

/// Points of G × P₂(X) as (g, pair).
pub type PairNode = (Elem, UnorderedPair);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaReport {
    pub pairs_checked: usize,
    /// Pairs skipped because a side was only known as a truncated lower bound.
    pub inconclusive: usize,
    pub max_ratio: Option<(i128, i128)>,
    pub violations: Vec<(PairNode, PairNode)>,
}

/// Checks d_{P₂(G×X)}(ωz, ωz′) ≤ 2·d_{G×P₂(X)}(z, z′) with ω(g,(x:y)) = ((g,x):(g,y)).
pub fn omega_audit(a: &HomotopySAction, lambda: Q, n_max: usize, samples: &[(PairNode, PairNode)], mode: Mode) -> Result<OmegaReport> {
    let (b, p2) = p2_action(a)?;
    let base = ActionMetric::new(a, lambda, n_max)?;
    let lifted = ActionMetric::new(&b, lambda, n_max)?;
    let rows = par::map(mode, samples, |(z, w)| {
        let rhs = lifted.distance(&(z.0.clone(), p2.index(z.1)), &(w.0.clone(), p2.index(w.1)));
        let mut truncated = rhs.truncated;
        let d = |p: &Node, q: &Node| {
            let r = base.distance(p, q);
            (r.value, r.truncated)
        };
        let (zx, zy) = ((z.0.clone(), z.1 .0), (z.0.clone(), z.1 .1));
        let (wx, wy) = ((w.0.clone(), w.1 .0), (w.0.clone(), w.1 .1));
        let (a1, t1) = d(&zx, &wx);
        let (a2, t2) = d(&zy, &wy);
        let (b1, t3) = d(&zx, &wy);
        let (b2, t4) = d(&zy, &wx);
        truncated |= t1 || t2 || t3 || t4;
        let lhs = a1.plus(a2).min(b1.plus(b2));
        (lhs, rhs.value, truncated)
    });
    let mut rep = OmegaReport { pairs_checked: 0, inconclusive: 0, max_ratio: None, violations: Vec::new() };
    let mut best: Option<Q> = None;
    for ((lhs, rhs, truncated), s) in rows.into_iter().zip(samples) {
        if truncated {
            rep.inconclusive += 1;
            continue;
        }
        rep.pairs_checked += 1;
        if lhs > rhs.scale(qi(2)) {
            rep.violations.push(s.clone());
        }
        if let (Dist::Finite(l), Dist::Finite(r)) = (lhs, rhs) {
            if r > Q::default() {
                let ratio = l / r;
                best = Some(best.map_or(ratio, |b: Q| b.max(ratio)));
            }
        }
    }
    rep.max_ratio = best.map(|r| (*r.numer(), *r.denom()));
    Ok(rep)
}

/// All pairs of points of G × P₂(X) over the given group elements.
pub fn all_pair_nodes(elems: &[Elem], npoints: usize) -> Vec<PairNode> {
    elems.iter().flat_map(|g| (0..npoints).flat_map(move |x| (x..npoints).map(move |y| (g.clone(), UnorderedPair(x, y))))).collect()
}

/// Distinct unordered pairs as a set, for functoriality checks.
pub fn image_pairs(f: &PointMap, pairs: &[UnorderedPair]) -> BTreeSet<UnorderedPair> {
    pairs.iter().map(|p| p.map(f)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs_are_canonical() {
        assert_eq!(UnorderedPair::new(3, 1), UnorderedPair::new(1, 3));
        let s = serde_json::to_string(&UnorderedPair::new(3, 1)).unwrap();
        assert_eq!(s, "[1,3]");
    }

    #[test]
    fn displayed_min_formula() {
        // d(x,x′)=1, d(y,y′)=2, d(x,y′)=5, d(y,x′)=5
        let d = |i: usize, j: usize| -> Q {
            let t = [[0, 0, 1, 5], [0, 0, 5, 2], [1, 5, 0, 0], [5, 2, 0, 0]];
            qi(t[i][j])
        };
        assert_eq!(pair_distance(d, UnorderedPair(0, 1), UnorderedPair(2, 3)), qi(3));
        let x = ControlSpace::line(3);
        let p = p2_metric(&x);
        assert_eq!(p.space.d(p.index(UnorderedPair(0, 2)), p.index(UnorderedPair(0, 2))), qi(0));
        assert_eq!(p.space.d(p.index(UnorderedPair(0, 2)), p.index(UnorderedPair(1, 1))), qi(2));
    }
}
