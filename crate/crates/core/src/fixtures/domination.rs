//! Chain-level domination data i: C → D, r: D → C, h: r∘i ≃ id for the
//! finite replacement.

use std::sync::Arc;

use rand::Rng;

use crate::chain::ops::direct_sum;
use crate::chain::{ChainComplex, ChainMap};
use crate::control::ControlSpace;
use crate::matrix::Matrix;
use crate::simplicial::{chain_complex_of, induced_chain_map, Placement, SimplicialComplex};

use super::chains::{random_graded, unimodular, Built, Piece};

#[derive(Clone, Debug)]
pub struct ChainDomination {
    pub c: Arc<ChainComplex>,
    pub d: Arc<ChainComplex>,
    pub i: ChainMap,
    pub r: ChainMap,
    /// dh + hd = id − r∘i.
    pub h: ChainMap,
}

/// Chains of the 9-point path on `line(9)` dominated by the chains of the
/// 3-vertex path placed at 0, 4, 8. The returned space is the line.
pub fn path9_chain_domination() -> (ChainDomination, ControlSpace) {
    let big = SimplicialComplex::path(9);
    let small = SimplicialComplex::path(3);
    let c = Arc::new(chain_complex_of(&big, Some((&Placement::of_vertices((0..9).collect()), 9))));
    let d = Arc::new(chain_complex_of(&small, Some((&Placement::of_vertices(vec![0, 4, 8]), 9))));
    let near = |j: usize| (j + 1) / 4;
    let vmap: Vec<usize> = (0..9).map(near).collect();
    let i = induced_chain_map(&big, &small, &vmap, c.clone(), d.clone()).expect("coarsening is simplicial");
    let r0 = Matrix::from_triplets(9, 3, (0..3).map(|k| (4 * k, k, 1)));
    let r1 = Matrix::from_triplets(8, 2, (0..2).flat_map(|k| (4 * k..4 * k + 4).map(move |e| (e, k, 1))));
    let r = ChainMap::new(d.clone(), c.clone(), 0, [(0, r0), (1, r1)].into()).unwrap();
    // h(x_j) is the signed edge path from x_{4·near(j)} to x_j
    let h0 = Matrix::from_triplets(
        8,
        9,
        (0..9).flat_map(|j| {
            let a = 4 * near(j);
            let (lo, hi, s) = if a <= j { (a, j, 1) } else { (j, a, -1) };
            (lo..hi).map(move |e| (e, j, s))
        }),
    );
    let h = ChainMap::new(c.clone(), c.clone(), 1, [(0, h0)].into()).unwrap();
    (ChainDomination { c, d, i, r, h }, ControlSpace::line(9))
}

/// C = D and i = r = id, h = 0.
pub fn identity_domination<R: Rng>(rng: &mut R, n: i32) -> ChainDomination {
    let pieces = core_pieces(rng, n);
    let b = Built::assemble(rng, 0, n, pieces, 4);
    let id = ChainMap::identity(b.complex.clone());
    let h = ChainMap::zero(b.complex.clone(), b.complex.clone(), 1);
    ChainDomination { c: b.complex.clone(), d: b.complex, i: id.clone(), r: id, h }
}

fn core_pieces<R: Rng>(rng: &mut R, n: i32) -> Vec<Piece> {
    (0..rng.gen_range(1..=4))
        .map(|_| {
            let deg = rng.gen_range(0..=n);
            if deg > 0 && rng.gen_bool(0.5) {
                Piece::Arrow { deg, m: rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 } }
            } else {
                Piece::Cell { deg }
            }
        })
        .collect()
}

fn contractible<R: Rng>(rng: &mut R, hi: i32) -> Built {
    let count = rng.gen_range(0..=3);
    let pieces = (0..count).map(|_| Piece::Arrow { deg: rng.gen_range(1..=hi), m: if rng.gen_bool(0.5) { 1 } else { -1 } }).collect();
    Built::assemble(rng, 0, hi, pieces, 4)
}

/// Conjugates a complex by random unimodular matrices; returns it with the
/// isomorphisms from and to the original.
fn scramble<R: Rng>(rng: &mut R, c: &Arc<ChainComplex>) -> (Arc<ChainComplex>, ChainMap, ChainMap) {
    let qs: Vec<(Matrix, Matrix)> = c.degrees().map(|n| unimodular(rng, c.rank(n), 5)).collect();
    let at = |n: i32| &qs[(n - c.lo) as usize];
    let diffs = c.degrees().skip(1).map(|n| at(n - 1).0.mul(&c.d(n)).mul(&at(n).1)).collect();
    let out = Arc::new(ChainComplex::new(c.lo, c.ranks.clone(), diffs).expect("conjugate of a complex"));
    let to = ChainMap::from_fn(c.clone(), out.clone(), 0, |n| at(n).0.clone()).unwrap();
    let from = ChainMap::from_fn(out.clone(), c.clone(), 0, |n| at(n).1.clone()).unwrap();
    (out, to, from)
}

/// C = C0 ⊕ E′ dominated by D = C0 ⊕ E in degrees 0..n, with E, E′ contractible,
/// both sides scrambled by unimodular changes of basis, and r and i perturbed
/// by null-homotopic terms [d, s], [d, t] (h corrected to match).
pub fn random_domination<R: Rng>(rng: &mut R, n: i32) -> ChainDomination {
    let pieces = core_pieces(rng, n);
    let c0 = Built::assemble(rng, 0, n, pieces, 4).complex;
    let e = contractible(rng, n);
    let e2 = contractible(rng, n + 2);
    let craw = Arc::new(direct_sum(&c0, &e2.complex));
    let draw = Arc::new(direct_sum(&c0, &e.complex));
    let block =
        |rows: usize, cols: usize, m: &Matrix, r0: usize, c0: usize| Matrix::from_triplets(rows, cols, m.entries().map(|(x, y, v)| (r0 + x, c0 + y, v)));
    let i0 = ChainMap::from_fn(craw.clone(), draw.clone(), 0, |k| block(draw.rank(k), craw.rank(k), &Matrix::identity(c0.rank(k)), 0, 0)).unwrap();
    let r0 = ChainMap::from_fn(draw.clone(), craw.clone(), 0, |k| block(craw.rank(k), draw.rank(k), &Matrix::identity(c0.rank(k)), 0, 0)).unwrap();
    let sigma = e2.contraction().expect("unit arrows contract");
    let h0 = ChainMap::from_fn(craw.clone(), craw.clone(), 1, |k| block(craw.rank(k + 1), craw.rank(k), &sigma.comp(k), c0.rank(k + 1), c0.rank(k))).unwrap();

    let (c, to_c, from_c) = scramble(rng, &craw);
    let (d, to_d, from_d) = scramble(rng, &draw);
    let mut i = to_d.after(&i0).after(&from_c);
    let mut r = to_c.after(&r0).after(&from_d);
    let mut h = to_c.after(&h0).after(&from_c);

    let s = random_graded(rng, &d, &c, 1, 0.3);
    r = r.add(&s.commutator_with_d());
    h = h.sub(&s.after(&i));
    let t = random_graded(rng, &c, &d, 1, 0.3);
    i = i.add(&t.commutator_with_d());
    h = h.sub(&r.after(&t));
    ChainDomination { c, d, i, r, h }
}
