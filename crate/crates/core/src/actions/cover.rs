//! G-equivariant covers of G × X: the F-cover checks, Lebesgue numbers for
//! d_{S,Λ}, the nerve map and its contraction audit.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{ActionMetric, HomotopySAction, Node};
use crate::error::{Error, Result};
use crate::groups::{family_member, Elem, FamilyPredicate, GroupBackend, SubgroupDescription};
use crate::par::{self, Mode};
use crate::rational::{qi, Dist, Q};
use crate::simplicial::{l1_distance, shares_simplex, PointInComplex, SimplicialComplex};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverMember {
    pub name: String,
    pub points: Vec<Node>,
}

/// A cover of G × X. When `equivariant`, members are orbit representatives and
/// the cover is the set of all translates kU; otherwise members are listed in full.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverSpec {
    pub members: Vec<CoverMember>,
    pub equivariant: bool,
}

/// A cover set, identified by its point set; `member` and `by` record one way to produce it.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Translate {
    pub points: BTreeSet<Node>,
    pub member: usize,
    pub by: Elem,
}

fn translate_set(group: &GroupBackend, k: &Elem, pts: &[Node]) -> BTreeSet<Node> {
    pts.iter().map(|(g, x)| (group.mul(k, g), *x)).collect()
}

impl CoverSpec {
    /// Cover sets containing `p`.
    pub fn sets_containing(&self, group: &GroupBackend, p: &Node) -> Vec<Translate> {
        let mut out: BTreeMap<BTreeSet<Node>, Translate> = BTreeMap::new();
        for (i, m) in self.members.iter().enumerate() {
            if self.equivariant {
                for (g, y) in &m.points {
                    if *y == p.1 {
                        let k = group.mul(&p.0, &group.inv(g));
                        let pts = translate_set(group, &k, &m.points);
                        out.entry(pts.clone()).or_insert(Translate { points: pts, member: i, by: k });
                    }
                }
            } else if m.points.contains(p) {
                let pts: BTreeSet<Node> = m.points.iter().cloned().collect();
                out.entry(pts.clone()).or_insert(Translate { points: pts, member: i, by: group.identity() });
            }
        }
        out.into_values().collect()
    }

    /// All cover sets meeting the carrier.
    pub fn sets_meeting(&self, group: &GroupBackend, carrier: &[Node]) -> Vec<Translate> {
        let mut out: BTreeMap<BTreeSet<Node>, Translate> = BTreeMap::new();
        for p in carrier {
            for t in self.sets_containing(group, p) {
                out.entry(t.points.clone()).or_insert(t);
            }
        }
        out.into_values().collect()
    }

    pub fn translate_name(&self, group: &GroupBackend, t: &Translate) -> String {
        let base = &self.members[t.member].name;
        if group.is_identity(&t.by) {
            base.clone()
        } else {
            format!("{}·{}", group.name(&t.by), base)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverReport {
    pub violations: Vec<String>,
    pub multiplicity: usize,
    pub dimension: i64,
    /// G_U for each listed member.
    pub isotropy: Vec<(String, Vec<Elem>)>,
    pub s_long: Option<bool>,
}

impl CoverReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the F-cover conditions on a finite carrier: covering, invariance,
/// the dichotomy gU = U or gU ∩ U = ∅, G_U ∈ F, dim ≤ N, and S-longness when
/// an action is supplied.
pub fn check_f_cover(
    group: &GroupBackend,
    cover: &CoverSpec,
    family: &FamilyPredicate,
    n_dim: usize,
    carrier: &[Node],
    action: Option<(&HomotopySAction, usize)>,
) -> Result<CoverReport> {
    if cover.members.is_empty() {
        return Err(Error::EmptyCover);
    }
    let mut violations = Vec::new();
    let show = |p: &Node| format!("({}, {})", group.name(&p.0), p.1);

    // covering and multiplicity
    let mut multiplicity = 0;
    for p in carrier {
        let k = cover.sets_containing(group, p).len();
        if k == 0 {
            violations.push(format!("point {} is not covered", show(p)));
        }
        multiplicity = multiplicity.max(k);
    }
    let dimension = multiplicity as i64 - 1;
    if dimension > n_dim as i64 {
        violations.push(format!("cover dimension {dimension} exceeds N = {n_dim}"));
    }

    // invariance of an explicitly listed cover
    if !cover.equivariant {
        let elems = group
            .elements()
            .ok_or_else(|| Error::UndecidableBackend("invariance of an explicit cover needs a finite group; list orbit representatives instead".into()))?;
        let sets: BTreeSet<BTreeSet<Node>> = cover.members.iter().map(|m| m.points.iter().cloned().collect()).collect();
        for m in &cover.members {
            for g in &elems {
                if !sets.contains(&translate_set(group, g, &m.points)) {
                    violations.push(format!("{}({}) is not in the cover", group.name(g), m.name));
                    break;
                }
            }
        }
    }

    // dichotomy and isotropy
    let mut isotropy = Vec::new();
    for m in &cover.members {
        let u: BTreeSet<Node> = m.points.iter().cloned().collect();
        let ug: BTreeSet<&Elem> = m.points.iter().map(|p| &p.0).collect();
        let mut candidates: BTreeSet<Elem> = BTreeSet::new();
        for a in &ug {
            for b in &ug {
                candidates.insert(group.mul(a, &group.inv(b)));
            }
        }
        let mut stab = Vec::new();
        for g in candidates {
            let gu = translate_set(group, &g, &m.points);
            if gu == u {
                stab.push(g);
            } else if !gu.is_disjoint(&u) {
                violations.push(format!("{}({}) neither equals nor misses {}", group.name(&g), m.name, m.name));
            }
        }
        if !family_member(group, family, &SubgroupDescription { generators: stab.clone() })? {
            violations.push(format!("isotropy of {} is not in the family", m.name));
        }
        isotropy.push((m.name.clone(), stab));
    }

    // S-long: S^{|S|}(g, x) inside one cover set
    let s_long = match action {
        None => None,
        Some((a, horizon)) => {
            let starts: Vec<Node> = if cover.equivariant { (0..a.npoints()).map(|x| (group.identity(), x)).collect() } else { carrier.to_vec() };
            let mut ok = true;
            for p in &starts {
                let orbit = a.s_orbit(a.s.len(), p, horizon)?;
                if !cover.sets_containing(group, p).iter().any(|t| orbit.is_subset(&t.points)) {
                    violations.push(format!("no cover set contains S^|S|{}", show(p)));
                    ok = false;
                }
            }
            Some(ok)
        }
    };
    Ok(CoverReport { violations, multiplicity, dimension, isotropy, s_long })
}

/// min over carrier points of max over cover sets U ∋ p of d_{S,Λ}(p, ∁U).
pub fn lebesgue_number(metric: &ActionMetric, cover: &CoverSpec, carrier: &[Node], mode: Mode) -> Result<Dist> {
    if cover.members.is_empty() {
        return Err(Error::EmptyCover);
    }
    let group = &metric.action.group;
    let per_point = par::map(mode, carrier, |p| -> Result<Dist> {
        let mut best = Dist::zero();
        for t in cover.sets_containing(group, p) {
            best = best.max(metric.distance_to_complement(p, |q| t.points.contains(q))?);
        }
        Ok(best)
    });
    let mut out = Dist::Infinite;
    for d in per_point {
        out = out.min(d?);
    }
    Ok(out)
}

/// Least Λ on the grid whose Lebesgue number is at least m/2.
pub fn lambda_search(action: &HomotopySAction, cover: &CoverSpec, carrier: &[Node], grid: &[Q], m: Q, n_max: usize, mode: Mode) -> Result<Option<(Q, Dist)>> {
    let mut grid = grid.to_vec();
    grid.sort();
    for lam in grid {
        let metric = ActionMetric::new(action, lam, n_max)?;
        let leb = lebesgue_number(&metric, cover, carrier, mode)?;
        if leb >= Dist::Finite(m / qi(2)) {
            return Ok(Some((lam, leb)));
        }
    }
    Ok(None)
}

/// The nerve of the cover sets meeting the carrier and the map
/// p ↦ Σ_U d(p, ∁U) / Σ_V d(p, ∁V) · U.
#[derive(Clone, Debug)]
pub struct NerveMap {
    pub nerve: SimplicialComplex,
    pub sets: Vec<Translate>,
    pub carrier: Vec<Node>,
    pub images: Vec<PointInComplex>,
}

impl NerveMap {
    pub fn image_of(&self, p: &Node) -> Option<&PointInComplex> {
        self.carrier.iter().position(|q| q == p).map(|i| &self.images[i])
    }

    /// Checks f(k·p) = k·f(p) for each k and carrier point whose translate stays in the carrier.
    pub fn equivariance_failures(&self, group: &GroupBackend, ks: &[Elem]) -> Vec<(Elem, Node)> {
        let idx: BTreeMap<&BTreeSet<Node>, usize> = self.sets.iter().enumerate().map(|(i, t)| (&t.points, i)).collect();
        let mut bad = Vec::new();
        for k in ks {
            for (i, p) in self.carrier.iter().enumerate() {
                let kp = (group.mul(k, &p.0), p.1);
                let Some(img) = self.image_of(&kp) else { continue };
                let mut moved = BTreeMap::new();
                let mut ok = true;
                for (&v, &c) in &self.images[i].coords {
                    let pts: Vec<Node> = self.sets[v].points.iter().cloned().collect();
                    match idx.get(&translate_set(group, k, &pts)) {
                        Some(&w) => {
                            moved.insert(w, c);
                        }
                        None => ok = false,
                    }
                }
                if !ok || moved != img.coords {
                    bad.push((k.clone(), p.clone()));
                }
            }
        }
        bad
    }
}

pub fn nerve_map(metric: &ActionMetric, cover: &CoverSpec, carrier: &[Node], mode: Mode) -> Result<NerveMap> {
    if cover.members.is_empty() {
        return Err(Error::EmptyCover);
    }
    let group = &metric.action.group;
    let sets = cover.sets_meeting(group, carrier);
    let idx: BTreeMap<&BTreeSet<Node>, usize> = sets.iter().enumerate().map(|(i, t)| (&t.points, i)).collect();
    let raw = par::map(mode, carrier, |p| -> Result<BTreeMap<usize, Q>> {
        let mut w = BTreeMap::new();
        for t in cover.sets_containing(group, p) {
            let d = match metric.distance_to_complement(p, |q| t.points.contains(q))? {
                Dist::Finite(d) => d,
                // a set with empty complement absorbs the whole weight
                Dist::Infinite => return Ok(BTreeMap::from([(idx[&t.points], qi(1))])),
            };
            w.insert(idx[&t.points], d);
        }
        Ok(w)
    });
    let mut images = Vec::with_capacity(carrier.len());
    let mut facets: Vec<Vec<usize>> = Vec::new();
    let labels: Vec<String> = sets.iter().map(|t| cover.translate_name(group, t)).collect();
    let mut coords_all = Vec::new();
    for (p, w) in carrier.iter().zip(raw) {
        let w = w?;
        let total: Q = w.values().sum();
        assert!(!total.is_zero(), "zero nerve denominator at ({:?}, {})", p.0, p.1);
        let coords: BTreeMap<usize, Q> = w.into_iter().filter(|(_, d)| !d.is_zero()).map(|(k, d)| (k, d / total)).collect();
        facets.push(cover.sets_containing(group, p).iter().map(|t| idx[&t.points]).collect());
        coords_all.push(coords);
    }
    let nerve = SimplicialComplex::with_labels(labels, &facets)?;
    for coords in coords_all {
        images.push(PointInComplex::new(&nerve, coords)?);
    }
    Ok(NerveMap { nerve, sets, carrier: carrier.to_vec(), images })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    #[serde(with = "crate::rational::qser")]
    pub d: Q,
    pub n: usize,
    pub pairs_checked: usize,
    /// Pairs whose images do not share a simplex, where d¹ is only a lower bound.
    pub disjoint_support: usize,
    pub violations: Vec<(Node, Node)>,
}

/// On carrier pairs with d_{S,Λ} ≤ D/(4N), checks d¹(f p, f q) ≤ (16N²/D)·d_{S,Λ}(p, q).
pub fn contraction_audit(metric: &ActionMetric, nerve: &NerveMap, d: Q, n: usize, mode: Mode) -> AuditReport {
    let nq = qi(n as i128);
    let radius = d / (qi(4) * nq);
    let lip = qi(16) * nq * nq / d;
    let rows = par::map_range(mode, nerve.carrier.len(), |i| {
        let p = &nerve.carrier[i];
        let mut out = (0usize, 0usize, Vec::new());
        for j in i + 1..nerve.carrier.len() {
            let q = &nerve.carrier[j];
            let Dist::Finite(dpq) = metric.distance(p, q).value else { continue };
            if dpq > radius {
                continue;
            }
            out.0 += 1;
            let (a, b) = (&nerve.images[i], &nerve.images[j]);
            if !shares_simplex(&nerve.nerve, a, b) {
                out.1 += 1;
                continue;
            }
            if l1_distance(a, b).expect("same nerve") > lip * dpq {
                out.2.push((p.clone(), q.clone()));
            }
        }
        out
    });
    let mut rep = AuditReport { d, n, pairs_checked: 0, disjoint_support: 0, violations: Vec::new() };
    for (c, dj, v) in rows {
        rep.pairs_checked += c;
        rep.disjoint_support += dj;
        rep.violations.extend(v);
    }
    rep
}
