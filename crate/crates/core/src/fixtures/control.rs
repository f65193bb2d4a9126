//! Random geometric modules, controlled and equivariant morphisms.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::control::{ControlSpace, ControlledMorphism, EquivariantMorphism, GeometricModule};
use crate::groups::{Elem, GroupBackend};
use crate::matrix::Matrix;
use crate::rational::qi;

/// Random points on a line with integer spacing up to 3.
pub fn random_line<R: Rng>(rng: &mut R, n: usize) -> ControlSpace {
    let mut xs = vec![0i128];
    for _ in 1..n {
        let last = *xs.last().unwrap();
        xs.push(last + rng.gen_range(1..=3));
    }
    ControlSpace::l1_points(&xs.iter().map(|&x| vec![qi(x)]).collect::<Vec<_>>())
}

pub fn random_module<R: Rng>(rng: &mut R, elems: &[Elem], npoints: usize, rank: usize) -> GeometricModule {
    GeometricModule::new((0..rank).map(|_| (elems.choose(rng).unwrap().clone(), rng.gen_range(0..npoints))).collect())
}

pub fn random_morphism<R: Rng>(rng: &mut R, src: &GeometricModule, tgt: &GeometricModule, density: f64) -> ControlledMorphism {
    let mut trip = Vec::new();
    for i in 0..tgt.rank() {
        for j in 0..src.rank() {
            if rng.gen_bool(density) {
                trip.push((i, j, rng.gen_range(-3..=3)));
            }
        }
    }
    ControlledMorphism::new(src.clone(), tgt.clone(), Matrix::from_triplets(tgt.rank(), src.rank(), trip)).unwrap()
}

/// Random equivariant morphism whose letters are drawn from `letters`.
pub fn random_equivariant<R: Rng>(rng: &mut R, src: &[usize], tgt: &[usize], letters: &[Elem], density: f64) -> EquivariantMorphism {
    let mut out = BTreeMap::new();
    for a in letters {
        if !rng.gen_bool(0.7) {
            continue;
        }
        let mut trip = Vec::new();
        for i in 0..tgt.len() {
            for j in 0..src.len() {
                if rng.gen_bool(density) {
                    trip.push((i, j, rng.gen_range(-2..=2)));
                }
            }
        }
        out.insert(a.clone(), Matrix::from_triplets(tgt.len(), src.len(), trip));
    }
    EquivariantMorphism::new(src.to_vec(), tgt.to_vec(), out).unwrap()
}

/// Group elements used as a sampling pool: the whole group if finite, else a ball of radius 2.
pub fn element_pool(g: &GroupBackend) -> Vec<Elem> {
    if let Some(e) = g.elements() {
        return e;
    }
    let gens: Vec<Elem> = (0..generator_count(g)).map(|i| g.generator(i)).collect();
    let s = crate::groups::FiniteSubset::with_identity(g, gens).symmetrize(g);
    g.ball(&s, 1, Default::default()).map(|b| b.elements).unwrap_or_else(|_| vec![g.identity()])
}

fn generator_count(g: &GroupBackend) -> usize {
    match &g.kind {
        crate::groups::GroupKind::FreeAbelian { rank } | crate::groups::GroupKind::Free { rank } => *rank,
        crate::groups::GroupKind::FiniteTable { .. } => 0,
    }
}
