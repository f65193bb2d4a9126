//! The quasi-metric d_{S,Λ} on G × X as a shortest path: fiber edges of
//! weight Λ·d_X inside each copy of X, and unit-weight move edges
//! (g, z) ~ (g a⁻¹b, x′) whenever f(z) = f̃(x′) for some f ∈ F_a, f̃ ∈ F_b.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{HomotopySAction, Node};
use crate::error::{Error, Result};
use crate::groups::{Elem, GroupBackend};
use crate::par::{self, Mode};
use crate::rational::{qi, Dist, Q};

/// Move relations grouped by the letter c = a⁻¹b.
#[derive(Clone, Debug)]
pub struct MoveTable {
    /// `(c, adj)` with `adj[z]` the sorted x′ reachable from z.
    pub letters: Vec<(Elem, Vec<Vec<usize>>)>,
}

impl MoveTable {
    pub fn new(a: &HomotopySAction) -> Result<MoveTable> {
        a.validate()?;
        let n = a.npoints();
        let fs: BTreeMap<Elem, BTreeSet<Vec<usize>>> = a.s.elements.iter().map(|g| Ok((g.clone(), a.f_set(g)?))).collect::<Result<_>>()?;
        let mut rel: BTreeMap<Elem, Vec<BTreeSet<usize>>> = BTreeMap::new();
        for (ea, fa) in &fs {
            for (eb, fb) in &fs {
                let c = a.group.mul(&a.group.inv(ea), eb);
                let adj = rel.entry(c).or_insert_with(|| vec![BTreeSet::new(); n]);
                for ft in fb {
                    // fiber of f̃ over each image point
                    let mut pre: Vec<Vec<usize>> = vec![Vec::new(); n];
                    for (x, &y) in ft.iter().enumerate() {
                        pre[y].push(x);
                    }
                    for f in fa {
                        for z in 0..n {
                            adj[z].extend(pre[f[z]].iter().copied());
                        }
                    }
                }
            }
        }
        let letters = rel
            .into_iter()
            .filter(|(_, adj)| adj.iter().any(|s| !s.is_empty()))
            .map(|(c, adj)| (c, adj.into_iter().map(|s| s.into_iter().collect()).collect()))
            .collect();
        Ok(MoveTable { letters })
    }

    /// Neighbours of a node through one move.
    pub fn step<'a>(&'a self, group: &'a GroupBackend, (g, z): &'a Node) -> impl Iterator<Item = Node> + 'a {
        self.letters.iter().flat_map(move |(c, adj)| {
            let h = group.mul(g, c);
            adj[*z].iter().map(move |&x| (h.clone(), x))
        })
    }

    pub fn orbit(&self, group: &GroupBackend, n: usize, from: &Node) -> BTreeSet<Node> {
        let mut cur = BTreeSet::from([from.clone()]);
        for _ in 0..n {
            let mut next = cur.clone();
            for p in &cur {
                next.extend(self.step(group, p));
            }
            cur = next;
        }
        cur
    }
}

/// A d_{S,Λ} value. When `truncated`, `value` is only a lower bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DsResult {
    pub value: Dist,
    pub truncated: bool,
}

/// d_{S,Λ} for one action, Λ and move horizon.
#[derive(Clone, Debug)]
pub struct ActionMetric<'a> {
    pub action: &'a HomotopySAction,
    pub moves: MoveTable,
    pub lambda: Q,
    pub n_max: usize,
}

enum Visit {
    Continue,
    Stop,
}

impl<'a> ActionMetric<'a> {
    pub fn new(action: &'a HomotopySAction, lambda: Q, n_max: usize) -> Result<ActionMetric<'a>> {
        if lambda <= Q::zero() {
            return Err(Error::InvalidInput("Λ must be positive".into()));
        }
        Ok(ActionMetric { action, moves: MoveTable::new(action)?, lambda, n_max })
    }

    fn group(&self) -> &GroupBackend {
        &self.action.group
    }

    /// Dijkstra from `from`, calling `visit` on nodes in settled order. On
    /// infinite groups nodes at distance ≥ n_max + 1 are not expanded; the
    /// return value says whether that pruning happened.
    fn search(&self, from: &Node, bounded: bool, mut visit: impl FnMut(&Node, Q) -> Visit) -> bool {
        let bound = qi(self.n_max as i128 + 1);
        let n = self.action.npoints();
        let mut ids: HashMap<Node, usize> = HashMap::new();
        let mut nodes: Vec<Node> = Vec::new();
        let mut best: Vec<Option<Q>> = Vec::new();
        let mut done: Vec<bool> = Vec::new();
        let mut heap = BinaryHeap::new();
        let intern = |p: Node, ids: &mut HashMap<Node, usize>, nodes: &mut Vec<Node>, best: &mut Vec<Option<Q>>, done: &mut Vec<bool>| {
            *ids.entry(p.clone()).or_insert_with(|| {
                nodes.push(p);
                best.push(None);
                done.push(false);
                nodes.len() - 1
            })
        };
        let s = intern(from.clone(), &mut ids, &mut nodes, &mut best, &mut done);
        best[s] = Some(Q::zero());
        heap.push(Reverse((Q::zero(), s)));
        let mut pruned = false;
        while let Some(Reverse((d, u))) = heap.pop() {
            if done[u] || Some(d) > best[u] {
                continue;
            }
            if bounded && d >= bound {
                pruned = true;
                break;
            }
            done[u] = true;
            let p = nodes[u].clone();
            if let Visit::Stop = visit(&p, d) {
                return false;
            }
            let mut relax = |q: Node, w: Q, heap: &mut BinaryHeap<Reverse<(Q, usize)>>| {
                let v = intern(q, &mut ids, &mut nodes, &mut best, &mut done);
                let nd = d + w;
                if !done[v] && best[v].map_or(true, |b| nd < b) {
                    best[v] = Some(nd);
                    heap.push(Reverse((nd, v)));
                }
            };
            for z in 0..n {
                if z != p.1 {
                    relax((p.0.clone(), z), self.lambda * self.action.space.d(p.1, z), &mut heap);
                }
            }
            let next: Vec<Node> = self.moves.step(self.group(), &p).collect();
            for q in next {
                if q != p {
                    relax(q, qi(1), &mut heap);
                }
            }
        }
        pruned
    }

    fn bounded(&self) -> bool {
        !self.group().is_finite()
    }

    pub fn distance(&self, p: &Node, q: &Node) -> DsResult {
        let mut found = None;
        let pruned = self.search(p, self.bounded(), |x, d| {
            if x == q {
                found = Some(d);
                Visit::Stop
            } else {
                Visit::Continue
            }
        });
        match found {
            Some(d) => DsResult { value: Dist::Finite(d), truncated: false },
            None if pruned => DsResult { value: Dist::Finite(qi(self.n_max as i128 + 1)), truncated: true },
            None => DsResult { value: Dist::Infinite, truncated: false },
        }
    }

    /// All settled distances from `p` (the whole carrier for finite groups).
    pub fn distances_from(&self, p: &Node) -> (BTreeMap<Node, Q>, bool) {
        let mut out = BTreeMap::new();
        let pruned = self.search(p, self.bounded(), |x, d| {
            out.insert(x.clone(), d);
            Visit::Continue
        });
        (out, pruned)
    }

    /// d(p, complement of `inside`): the first settled node outside.
    /// Infinity when the complement is unreachable on a finite group.
    pub fn distance_to_complement(&self, p: &Node, inside: impl Fn(&Node) -> bool) -> Result<Dist> {
        let mut found = None;
        let pruned = self.search(p, self.bounded(), |x, d| {
            if inside(x) {
                Visit::Continue
            } else {
                found = Some(d);
                Visit::Stop
            }
        });
        match found {
            Some(d) => Ok(Dist::Finite(d)),
            None if pruned => Err(Error::HorizonExceeded(format!("complement not reached within {} moves", self.n_max))),
            None => Ok(Dist::Infinite),
        }
    }

    /// Full table on G × X for a finite group, computed from the fibers over e
    /// by G-invariance.
    pub fn table(&self, mode: Mode) -> Result<MetricTable> {
        let elems = self.group().elements().ok_or_else(|| Error::UndecidableBackend("a full metric table needs a finite group".into()))?;
        let n = self.action.npoints();
        let e = self.group().identity();
        let rows: Vec<BTreeMap<Node, Q>> = par::map_range(mode, n, |x| self.distances_from(&(e.clone(), x)).0);
        let points: Vec<Node> = elems.iter().flat_map(|g| (0..n).map(move |x| (g.clone(), x))).collect();
        let index: BTreeMap<Node, usize> = points.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        let g = self.group();
        let dist = par::map(mode, &points, |(a, x)| {
            let ai = g.inv(a);
            points.iter().map(|(b, y)| rows[*x].get(&(g.mul(&ai, b), *y)).map_or(Dist::Infinite, |&d| Dist::Finite(d))).collect()
        });
        Ok(MetricTable { points, index, dist })
    }
}

/// d_{S,Λ} on all of G × X for a finite group.
#[derive(Clone, Debug)]
pub struct MetricTable {
    pub points: Vec<Node>,
    pub index: BTreeMap<Node, usize>,
    pub dist: Vec<Vec<Dist>>,
}

impl MetricTable {
    pub fn d(&self, p: &Node, q: &Node) -> Dist {
        self.dist[self.index[p]][self.index[q]]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::actions::z2_swap;
    use crate::rational::q;

    #[test]
    fn z2_worked_values() {
        let a = z2_swap();
        let lam = q(1, 3);
        let m = ActionMetric::new(&a, lam, 4).unwrap();
        let (e, s) = (Elem::Table(0), Elem::Table(1));
        assert_eq!(m.distance(&(e.clone(), 0), &(e.clone(), 0)).value, Dist::zero());
        assert_eq!(m.distance(&(e.clone(), 0), &(s.clone(), 1)).value, Dist::Finite(qi(1)));
        assert_eq!(m.distance(&(e.clone(), 0), &(s.clone(), 0)).value, Dist::Finite(qi(1) + lam));
        assert_eq!(m.distance(&(e.clone(), 0), &(e, 1)).value, Dist::Finite(lam));
    }

    #[test]
    fn trivial_s_gives_infinity() {
        let a = z2_swap();
        let e = a.group.identity();
        let b = HomotopySAction::genuine(a.group.clone(), a.space.clone(), crate::groups::FiniteSubset::new(vec![e.clone()]), |_| {
            crate::control::PointMap::identity(2)
        })
        .unwrap();
        let m = ActionMetric::new(&b, qi(1), 3).unwrap();
        assert_eq!(m.distance(&(e, 0), &(Elem::Table(1), 0)).value, Dist::Infinite);
    }
}
