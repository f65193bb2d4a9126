mod common;

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use transfer_core::control::{differential_epsilon, ControlSpace};
use transfer_core::fixtures::rng;
use transfer_core::rational::{q, qi, Q};
use transfer_core::simplicial::*;

/// Exhaustive oracle: all vertex subsets of Σ¹(0)² that are chains in the
/// product order, pushed to unordered pairs and counted by dimension.
fn brute_p2_counts(cx: &SimplicialComplex) -> Vec<usize> {
    let faces: Vec<Simplex> = cx.simplices.iter().cloned().collect();
    let le = |a: &Simplex, b: &Simplex| a.iter().all(|v| b.contains(v));
    let verts: Vec<(usize, usize)> = (0..faces.len()).flat_map(|e| (0..faces.len()).map(move |f| (e, f))).collect();
    let mut out: BTreeSet<BTreeSet<(usize, usize)>> = BTreeSet::new();
    let n = verts.len();
    assert!(n <= 20, "oracle is exponential");
    for mask in 1u32..(1 << n) {
        let chosen: Vec<(usize, usize)> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| verts[i]).collect();
        let comparable = |x: &(usize, usize), y: &(usize, usize)| {
            (le(&faces[x.0], &faces[y.0]) && le(&faces[x.1], &faces[y.1])) || (le(&faces[y.0], &faces[x.0]) && le(&faces[y.1], &faces[x.1]))
        };
        if chosen.iter().all(|x| chosen.iter().all(|y| comparable(x, y))) {
            out.insert(chosen.iter().map(|&(e, f)| (e.min(f), e.max(f))).collect());
        }
    }
    let dmax = out.iter().map(|s| s.len()).max().unwrap();
    (1..=dmax).map(|k| out.iter().filter(|s| s.len() == k).count()).collect()
}

#[test]
fn p2_of_interval_counts() {
    let cx = SimplicialComplex::simplex(1);
    let p2 = p2_simplicial(&cx);
    assert_eq!(p2.complex.f_vector(), brute_p2_counts(&cx));
    assert_eq!(p2.complex.f_vector(), vec![6, 9, 4]);
    assert_eq!(p2.complex.dim(), 2);
    assert!(p2.complex.is_face_closed());
}

#[test]
fn swap_induces_automorphism_of_p2() {
    let cx = SimplicialComplex::simplex(1);
    let p2 = p2_simplicial(&cx);
    let f = induced_on_p2(&p2, &[1, 0]);
    assert!(p2.complex.is_simplicial_map(&p2.complex, &f));
    let img: BTreeSet<Simplex> = p2.complex.simplices.iter().map(|s| SimplicialComplex::image(&f, s)).collect();
    assert_eq!(img, p2.complex.simplices);
}

#[test]
fn dimensions_double() {
    for cx in [SimplicialComplex::point(), SimplicialComplex::simplex(1), SimplicialComplex::simplex(2), SimplicialComplex::circle()] {
        let d = cx.dim();
        let prod = product_structure(&cx);
        assert_eq!(prod.complex.dim(), 2 * d);
        assert!(prod.complex.is_face_closed());
        let p2 = p2_simplicial(&cx);
        assert_eq!(p2.complex.dim(), 2 * d);
        assert!(p2.complex.is_face_closed());
        assert!(subdivide(&cx).complex.is_face_closed());
    }
}

#[test]
fn induced_automorphisms_are_bijective() {
    let cases: Vec<(SimplicialComplex, Vec<usize>)> =
        vec![(SimplicialComplex::simplex(2), vec![1, 2, 0]), (SimplicialComplex::simplex(2), vec![0, 2, 1]), (SimplicialComplex::circle(), vec![2, 0, 1])];
    for (cx, perm) in cases {
        let p2 = p2_simplicial(&cx);
        let f = induced_on_p2(&p2, &perm);
        for k in 0..=p2.complex.dim() as usize {
            let src: BTreeSet<Simplex> = p2.complex.of_dim(k).into_iter().cloned().collect();
            let img: BTreeSet<Simplex> = src.iter().map(|s| SimplicialComplex::image(&f, s)).collect();
            assert_eq!(img, src, "dimension {k}");
        }
    }
}

#[test]
fn single_vertex_chain_complex() {
    let c = chain_complex_of(&SimplicialComplex::point(), None);
    assert_eq!((c.lo, c.ranks.clone()), (0, vec![1]));
}

#[test]
fn circle_homology_by_rank_oracle() {
    let c = chain_complex_of(&SimplicialComplex::circle(), None);
    assert_eq!(c.ranks, vec![3, 3]);
    let d1 = common::rat(&c.d(1));
    let r = common::pivot_columns(&d1, 3).len();
    // H₀ = coker d₁, H₁ = ker d₁
    assert_eq!(3 - r, 1, "H₀ rank");
    assert_eq!(3 - r, 1, "H₁ rank");
}

#[test]
fn placement_mesh_controls_differential() {
    let cx = SimplicialComplex::path(5);
    let space = ControlSpace::line(9);
    let mut pl = Placement::of_vertices(vec![0, 2, 4, 6, 8]);
    for i in 0..4 {
        pl = pl.with_simplex(&[i, i + 1], 2 * i + 1);
    }
    let mesh = placement_mesh(&cx, &pl, &space);
    assert_eq!(mesh, qi(1));
    let c = chain_complex_of(&cx, Some((&pl, space.len())));
    assert!(differential_epsilon(&c, &space) <= mesh);
}

#[test]
fn delta_search_on_point_returns_grid_max() {
    let grid = [q(1, 4), q(1, 2), qi(1)];
    let rep = delta_search(&mut rng(1), &SimplicialComplex::point(), q(1, 10), &grid, 200, 10_000).unwrap();
    assert_eq!(rep.delta, qi(1));
    assert!(delta_search(&mut rng(1), &SimplicialComplex::point(), qi(1), &grid, 20_000, 10_000).is_err());
}

#[test]
fn delta_search_on_interval() {
    let cx = SimplicialComplex::simplex(1);
    let grid: Vec<Q> = (1..=16).map(|k| q(k, 8)).collect();
    let rep = delta_search(&mut rng(7), &cx, qi(1), &grid, 10_000, 10_000).unwrap();
    assert_eq!(rep.delta, q(1, 2));
    // a fresh sample agrees with the certificate
    let p2 = p2_simplicial(&cx);
    let mut r = rng(99);
    for _ in 0..2_000 {
        let (x, y, x2, y2) = (random_point(&mut r, &cx, 5), random_point(&mut r, &cx, 5), random_point(&mut r, &cx, 5), random_point(&mut r, &cx, 5));
        if p2_induced_distance(&x, &y, &x2, &y2) <= rep.delta {
            assert!(l1_coords(&p2_coords(&p2, &x, &y), &p2_coords(&p2, &x2, &y2)) <= qi(1));
        }
    }
}

#[test]
fn delta_is_monotone_in_epsilon() {
    let cx = SimplicialComplex::simplex(1);
    let grid: Vec<Q> = (1..=16).map(|k| q(k, 8)).collect();
    let mut last = qi(0);
    for e in [q(1, 4), q(1, 2), qi(1), qi(2)] {
        let d = delta_search(&mut rng(3), &cx, e, &grid, 2_000, 10_000).unwrap().delta;
        assert!(d >= last);
        last = d;
    }
}

fn arb_point(cx: SimplicialComplex) -> impl Strategy<Value = PointInComplex> {
    any::<u64>().prop_map(move |s| random_point(&mut rng(s), &cx, 7))
}

proptest! {
    #[test]
    fn l1_is_a_metric_within_a_simplex(w in proptest::collection::vec((0i128..6, 0i128..6, 0i128..6), 3)) {
        let cx = SimplicialComplex::simplex(2);
        let pts: Vec<PointInComplex> = w
            .iter()
            .map(|&(a, b, c)| {
                let t = a + b + c + 1;
                PointInComplex::new(&cx, BTreeMap::from([(0, q(a + 1, t)), (1, q(b, t)), (2, q(c, t))])).unwrap()
            })
            .collect();
        for x in &pts {
            prop_assert_eq!(l1_distance(x, x).unwrap(), qi(0));
            for y in &pts {
                prop_assert_eq!(l1_distance(x, y).unwrap(), l1_distance(y, x).unwrap());
                for z in &pts {
                    prop_assert!(l1_distance(x, z).unwrap() <= l1_distance(x, y).unwrap() + l1_distance(y, z).unwrap());
                }
            }
        }
    }

    #[test]
    fn p2_coordinates_land_in_a_simplex(x in arb_point(SimplicialComplex::simplex(2)), y in arb_point(SimplicialComplex::simplex(2))) {
        let cx = SimplicialComplex::simplex(2);
        let p2 = p2_simplicial(&cx);
        let c = p2_coords(&p2, &x, &y);
        prop_assert!(PointInComplex::new(&p2.complex, c.clone()).is_ok());
        prop_assert_eq!(c, p2_coords(&p2, &y, &x));
    }

    #[test]
    fn p2_coords_of_the_diagonal(x in arb_point(SimplicialComplex::circle())) {
        let cx = SimplicialComplex::circle();
        let p2 = p2_simplicial(&cx);
        let c = p2_coords(&p2, &x, &x);
        for v in c.keys() {
            let (e, f) = p2.pairs[*v];
            prop_assert_eq!(e, f);
        }
    }
}
