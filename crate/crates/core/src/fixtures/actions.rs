//! Named action, cover and domination fixtures.

use std::collections::BTreeMap;

use rand::Rng;

use crate::actions::{CoverMember, CoverSpec, DominationData, HomotopySAction, Node};
use crate::control::{ControlSpace, PointMap};
use crate::groups::{Elem, FiniteSubset, GroupBackend};
use crate::rational::{q, qi};
use crate::simplicial::{PointInComplex, SimplicialComplex};

/// ℤ/2 swapping two points at distance 1, S = {e, s}.
pub fn z2_swap() -> HomotopySAction {
    let g = GroupBackend::cyclic(2);
    let s = FiniteSubset::new(vec![Elem::Table(0), Elem::Table(1)]);
    HomotopySAction::genuine(g, ControlSpace::line(2), s, |a| match a {
        Elem::Table(0) => PointMap::identity(2),
        _ => PointMap::new(vec![1, 0], 2).unwrap(),
    })
    .unwrap()
}

/// ℤ/2 on a 3-point line with φ_s collapsing to x0; H_{s,s} runs from the
/// constant map through (0, 1, 1) to the identity on a grid with three frames.
pub fn three_point_homotopy() -> HomotopySAction {
    let g = GroupBackend::cyclic(2);
    let (e, s) = (Elem::Table(0), Elem::Table(1));
    let id = PointMap::identity(3);
    let c0 = PointMap::new(vec![0, 0, 0], 3).unwrap();
    let mid = PointMap::new(vec![0, 1, 1], 3).unwrap();
    let a = HomotopySAction {
        group: g,
        space: ControlSpace::line(3),
        s: FiniteSubset::new(vec![e.clone(), s.clone()]),
        phi: BTreeMap::from([(e.clone(), id.clone()), (s.clone(), c0.clone())]),
        homotopies: BTreeMap::from([
            ((e.clone(), e.clone()), vec![id.clone()]),
            ((e.clone(), s.clone()), vec![c0.clone()]),
            ((s.clone(), e.clone()), vec![c0.clone()]),
            ((s.clone(), s.clone()), vec![c0, mid, id]),
        ]),
    };
    a.validate().unwrap();
    a
}

/// Random homotopy S-action: arbitrary φ_g (g ≠ e) and up to two arbitrary
/// interior frames in each H_{g,h}.
pub fn random_action<R: Rng>(rng: &mut R, group: GroupBackend, space: ControlSpace, s: FiniteSubset) -> HomotopySAction {
    let n = space.len();
    let s = FiniteSubset::with_identity(&group, s.elements);
    let rand_map = |rng: &mut R| PointMap::new((0..n).map(|_| rng.gen_range(0..n)).collect(), n).unwrap();
    let phi: BTreeMap<Elem, PointMap> =
        s.elements.iter().map(|g| (g.clone(), if group.is_identity(g) { PointMap::identity(n) } else { rand_map(rng) })).collect();
    let mut homotopies = BTreeMap::new();
    for g in &s.elements {
        for h in &s.elements {
            let gh = group.mul(g, h);
            if !s.contains(&gh) {
                continue;
            }
            let frames = if group.is_identity(g) && group.is_identity(h) {
                vec![PointMap::identity(n)]
            } else {
                let mut f = vec![phi[h].then(&phi[g])];
                for _ in 0..rng.gen_range(0..=2) {
                    f.push(rand_map(rng));
                }
                f.push(phi[&gh].clone());
                f
            };
            homotopies.insert((g.clone(), h.clone()), frames);
        }
    }
    let a = HomotopySAction { group, space, s, phi, homotopies };
    a.validate().unwrap();
    a
}

/// Rotations and reflections of a square acting on its four corners,
/// with the cycle metric. `r^i s^j` sends corner v to i + (−1)^j v.
pub fn dihedral_square(s: &[usize]) -> HomotopySAction {
    let g = GroupBackend::dihedral(4);
    let space = ControlSpace::new(
        (0..4).map(|i| format!("c{i}")).collect(),
        (0..4).map(|a: i128| (0..4).map(|b: i128| qi((a - b).rem_euclid(4).min((b - a).rem_euclid(4)))).collect()).collect(),
    )
    .unwrap();
    let s = FiniteSubset::new(s.iter().map(|&i| Elem::Table(i)).collect());
    HomotopySAction::genuine(g, space, s, |a| {
        let Elem::Table(k) = a else { unreachable!() };
        let (i, j) = (k % 4, k / 4);
        PointMap::new((0..4).map(|v| if j == 0 { (i + v) % 4 } else { (i + 4 - v) % 4 }).collect(), 4).unwrap()
    })
    .unwrap()
}

/// Every point of G × X for a finite group.
pub fn full_carrier(a: &HomotopySAction) -> Vec<Node> {
    let elems = a.group.elements().expect("finite group");
    elems.into_iter().flat_map(|g| (0..a.npoints()).map(move |x| (g.clone(), x))).collect()
}

/// The one-set cover of G × X.
pub fn whole_cover(a: &HomotopySAction) -> CoverSpec {
    CoverSpec { members: vec![CoverMember { name: "all".into(), points: full_carrier(a) }], equivariant: false }
}

/// Path x0 … x8 at unit spacing, dominated by the 3-vertex path v0 - v1 - v2
/// with i(x_j) at parameter j/4 and p(v_k) = x_{4k}. The track walks each
/// point from p∘i(x) to x one step per frame.
pub fn path9_domination() -> DominationData {
    let space = ControlSpace::line(9);
    let complex = SimplicialComplex::path(3);
    let i: Vec<PointInComplex> = (0..9)
        .map(|j| {
            let (k, r) = (j / 4, j % 4);
            let coords: BTreeMap<usize, _> =
                if r == 0 { BTreeMap::from([(k, qi(1))]) } else { BTreeMap::from([(k, q(4 - r as i128, 4)), (k + 1, q(r as i128, 4))]) };
            PointInComplex::new(&complex, coords).unwrap()
        })
        .collect();
    let p = vec![0, 4, 8];
    let mut dd = DominationData { space, complex, i, p, track: Vec::new(), epsilon: qi(2), n: 1 };
    let start = dd.p_after_i();
    let mut frames = vec![start.clone()];
    let mut cur = start.images;
    while cur.iter().enumerate().any(|(x, &y)| x != y) {
        cur = cur
            .iter()
            .enumerate()
            .map(|(x, &y)| {
                if y < x {
                    y + 1
                } else if y > x {
                    y - 1
                } else {
                    y
                }
            })
            .collect();
        frames.push(PointMap::new(cur.clone(), 9).unwrap());
    }
    dd.track = frames;
    dd
}
