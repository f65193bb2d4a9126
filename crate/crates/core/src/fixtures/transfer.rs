//! Chain-level actions and group-ring matrices for the transfer pipelines.

use std::collections::BTreeMap;

use rand::Rng;

use crate::actions::HomotopySAction;
use crate::control::{convolve, ControlSpace, EquivariantMorphism};
use crate::groups::{Elem, FiniteSubset, GroupBackend};
use crate::matrix::Matrix;
use crate::simplicial::{Placement, SimplicialComplex};
use crate::transfer::HomotopySChainComplex;

use super::actions::{random_action, three_point_homotopy, z2_swap};
use super::control::random_equivariant;

/// ℤ/2 on the 3-point line with the collapsing φ_s, carried by the chains of
/// the path x0 - x1 - x2.
pub fn z2_path_fixture() -> (HomotopySAction, HomotopySChainComplex) {
    let a = three_point_homotopy();
    let p =
        HomotopySChainComplex::from_simplicial(&a, &SimplicialComplex::path(3), &Placement::of_vertices(vec![0, 1, 2])).expect("the path carries the action");
    (a, p)
}

/// The swap of two points, carried by the chains of an edge (a 2-term complex).
pub fn z2_edge_fixture() -> (HomotopySAction, HomotopySChainComplex) {
    let a = z2_swap();
    let p = HomotopySChainComplex::from_simplicial(&a, &SimplicialComplex::path(2), &Placement::of_vertices(vec![0, 1])).expect("the edge carries the swap");
    (a, p)
}

/// A random homotopy action of a finite group (S = G) on the 3-point line,
/// carried by the chains of the 2-simplex, where every map is simplicial and
/// any two maps are contiguous.
pub fn random_chain_action<R: Rng>(rng: &mut R, group: &GroupBackend) -> (HomotopySAction, HomotopySChainComplex) {
    let s = FiniteSubset::new(group.elements().expect("finite group"));
    let a = random_action(rng, group.clone(), ControlSpace::line(3), s);
    let p = HomotopySChainComplex::from_simplicial(&a, &SimplicialComplex::simplex(2), &Placement::of_vertices(vec![0, 1, 2]))
        .expect("the simplex carries every action");
    (a, p)
}

fn elementary(group: &GroupBackend, m: usize, i: usize, j: usize, a: &Elem, c: i64, x0: usize) -> EquivariantMorphism {
    let id = Matrix::identity(m);
    let e = Matrix::from_triplets(m, m, [(i, j, c)]);
    let mut letters = BTreeMap::from([(group.identity(), id)]);
    let v = letters.get(a).map_or_else(|| e.clone(), |x| x.add(&e));
    letters.insert(a.clone(), v);
    EquivariantMorphism::new(vec![x0; m], vec![x0; m], letters).unwrap()
}

/// A random invertible m×m matrix over ℤ[G] and its inverse, as a product of
/// elementary matrices with group-ring entries and a monomial unit.
pub fn random_unit<R: Rng>(rng: &mut R, group: &GroupBackend, m: usize, x0: usize) -> (EquivariantMorphism, EquivariantMorphism) {
    let elems = group.elements().expect("finite group");
    let g = elems[rng.gen_range(0..elems.len())].clone();
    let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
    let mono = |h: &Elem, s: i64| EquivariantMorphism::new(vec![x0; m], vec![x0; m], [(h.clone(), Matrix::scalar(m, s))].into()).unwrap();
    let mut u = mono(&g, sign);
    let mut ui = mono(&group.inv(&g), sign);
    for _ in 0..if m > 1 { rng.gen_range(1..=3) } else { 0 } {
        let i = rng.gen_range(0..m);
        let j = (i + rng.gen_range(1..m)) % m;
        let a = elems[rng.gen_range(0..elems.len())].clone();
        let c = if rng.gen_bool(0.5) { 1 } else { -1 };
        u = convolve(group, &elementary(group, m, i, j, &a, c, x0), &u, None).unwrap();
        ui = convolve(group, &ui, &elementary(group, m, i, j, &a, -c, x0), None).unwrap();
    }
    (u, ui)
}

/// α = [[X, U], [0, 0]] on ℤ[G]^{2m} with U a unit, so α + α* = [[X + X*, U], [U*, 0]]
/// is invertible.
pub fn random_quadratic<R: Rng>(rng: &mut R, group: &GroupBackend, m: usize, x0: usize) -> EquivariantMorphism {
    let elems = group.elements().expect("finite group");
    let (u, _) = random_unit(rng, group, m, x0);
    let x = random_equivariant(rng, &vec![x0; m], &vec![x0; m], &elems, 0.5);
    let mut letters = BTreeMap::new();
    for a in &elems {
        let (xa, ua) = (x.letter(a), u.letter(a));
        let blk = Matrix::blocks(&[m, m], &[m, m], &[(0, 0, &xa), (0, 1, &ua)]);
        letters.insert(a.clone(), blk);
    }
    EquivariantMorphism::new(vec![x0; 2 * m], vec![x0; 2 * m], letters).unwrap()
}
