use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::Rng;

use transfer_core::actions::HomotopySAction;
use transfer_core::control::{ControlSpace, PointMap};
use transfer_core::fixtures::actions::{dihedral_square, random_action, three_point_homotopy, z2_swap};
use transfer_core::fixtures::rng;
use transfer_core::groups::{Elem, FamilyKind, FamilyPredicate, FiniteSubset, GroupBackend};
use transfer_core::p2::*;
use transfer_core::par::Mode;
use transfer_core::rational::{q, qi, Q};

fn random_space(seed: u64, n: usize) -> ControlSpace {
    let mut r = rng(seed);
    let mut coords: Vec<Vec<Q>> = Vec::new();
    while coords.len() < n {
        let c = vec![qi(r.gen_range(0..6)), qi(r.gen_range(0..6))];
        if !coords.contains(&c) {
            coords.push(c);
        }
    }
    ControlSpace::l1_points(&coords)
}

#[test]
fn random_six_point_space_is_a_metric() {
    let x = random_space(11, 6);
    let p = p2_metric(&x);
    assert!(p.space.validate().is_ok());
    let n = p.pairs.len();
    assert_eq!(n, 21);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                assert!(p.space.d(a, c) <= p.space.d(a, b) + p.space.d(b, c));
            }
        }
    }
}

#[test]
fn trivial_action_stabilizer_is_everything() {
    let g = GroupBackend::cyclic(3);
    let a = HomotopySAction::genuine(g.clone(), ControlSpace::line(2), FiniteSubset::new(g.elements().unwrap()), |_| PointMap::identity(2)).unwrap();
    let rep = p2_stabilizer_check(&a, UnorderedPair(0, 1), &FamilyPredicate::new(FamilyKind::Finite, false)).unwrap();
    assert_eq!(rep.stabilizer, g.elements().unwrap());
    assert_eq!(rep.index, 1);
}

#[test]
fn swap_pair_has_index_two() {
    let a = z2_swap();
    let rep = p2_stabilizer_check(&a, UnorderedPair(0, 1), &FamilyPredicate::new(FamilyKind::Trivial, false)).unwrap();
    assert_eq!(rep.stabilizer, vec![Elem::Table(0), Elem::Table(1)]);
    assert_eq!(rep.intersection, vec![Elem::Table(0)]);
    assert_eq!(rep.index, 2);
    // G_p, G_q trivial; G_(p:q) = ℤ/2 is in the index-2 closure of the trivial family
    assert_eq!(rep.f2_member, Some(true));
}

#[test]
fn dihedral_diagonal_by_coset_enumeration() {
    let a = dihedral_square(&(0..8).collect::<Vec<_>>());
    let rep = p2_stabilizer_check(&a, UnorderedPair(0, 2), &FamilyPredicate::new(FamilyKind::Finite, false)).unwrap();
    // oracle: r^i s^j sends v to i + (−1)^j v
    let act = |k: usize, v: usize| if k < 4 { (k + v) % 4 } else { (k + 8 - v) % 4 };
    let stab: Vec<usize> = (0..8).filter(|&k| BTreeSet::from([act(k, 0), act(k, 2)]) == BTreeSet::from([0, 2])).collect();
    let inter: Vec<usize> = (0..8).filter(|&k| act(k, 0) == 0 && act(k, 2) == 2).collect();
    assert_eq!(rep.stabilizer, stab.iter().map(|&k| Elem::Table(k)).collect::<Vec<_>>());
    assert_eq!(rep.intersection, inter.iter().map(|&k| Elem::Table(k)).collect::<Vec<_>>());
    assert_eq!(rep.index, stab.len() / inter.len());
    assert_eq!((stab.len(), inter.len(), rep.index), (4, 2, 2));
}

#[test]
fn induced_genuine_action_stays_genuine() {
    let a = dihedral_square(&(0..8).collect::<Vec<_>>());
    let (b, p2) = p2_action(&a).unwrap();
    for (g, m) in &b.phi {
        for (h, n) in &b.phi {
            assert_eq!(n.then(m), b.phi[&a.group.mul(g, h)]);
        }
        for (i, p) in p2.pairs.iter().enumerate() {
            if p.is_diagonal() {
                assert!(p2.pairs[m.apply(i)].is_diagonal());
            }
        }
    }
}

#[test]
fn grid_homotopies_descend() {
    let a = three_point_homotopy();
    let (b, p2) = p2_action(&a).unwrap();
    for (k, frames) in &a.homotopies {
        let lifted = &b.homotopies[k];
        assert_eq!(lifted.len(), frames.len());
        for (f, lf) in frames.iter().zip(lifted) {
            for (i, p) in p2.pairs.iter().enumerate() {
                assert_eq!(p2.pairs[lf.apply(i)], UnorderedPair::new(f.apply(p.0), f.apply(p.1)));
            }
        }
    }
    assert!(b.validate().is_ok());
}

#[test]
fn isometry_transfer_passes() {
    let x = ControlSpace::line(5);
    let flip = PointMap::new(vec![4, 3, 2, 1, 0], 5).unwrap();
    let rep = lipschitz_transfer_audit(&x, &x, &flip, qi(1), qi(2));
    assert!(rep.hypothesis && rep.conclusion);
}

fn omega_samples(a: &HomotopySAction) -> Vec<(PairNode, PairNode)> {
    let nodes = all_pair_nodes(&a.group.elements().unwrap(), a.npoints());
    nodes.iter().flat_map(|z| nodes.iter().map(move |w| (z.clone(), w.clone()))).collect()
}

#[test]
fn omega_on_swap_exhaustive() {
    let a = z2_swap();
    for lam in [q(1, 2), qi(1), qi(3)] {
        let rep = omega_audit(&a, lam, 4, &omega_samples(&a), Mode::Parallel).unwrap();
        assert_eq!(rep.pairs_checked, 36);
        assert!(rep.violations.is_empty());
    }
}

#[test]
fn omega_on_diagonal_pairs_is_a_doubling() {
    // on diagonal pairs both sides are computed from the same chains: lhs = 2·d_{G×X}
    let a = dihedral_square(&[0, 1, 3]);
    let elems = a.group.elements().unwrap();
    let diag: Vec<PairNode> = elems.iter().flat_map(|g| (0..4).map(move |x| (g.clone(), UnorderedPair(x, x)))).collect();
    let samples: Vec<(PairNode, PairNode)> = diag.iter().take(8).flat_map(|z| diag.iter().map(move |w| (z.clone(), w.clone()))).collect();
    let rep = omega_audit(&a, qi(1), 6, &samples, Mode::Parallel).unwrap();
    assert!(rep.violations.is_empty());
    assert_eq!(rep.max_ratio, Some((2, 1)));
}

fn random_genuine(seed: u64) -> HomotopySAction {
    // cyclic group acting on a cycle by rotation, or trivially
    let mut r = rng(seed);
    let n = r.gen_range(2..=4usize);
    let g = GroupBackend::cyclic(n);
    let step = r.gen_range(0..n);
    HomotopySAction::genuine(g.clone(), ControlSpace::line(n), FiniteSubset::new(g.elements().unwrap()), |e| {
        let Elem::Table(k) = e else { unreachable!() };
        PointMap::new((0..n).map(|v| (v + k * step) % n).collect(), n).unwrap()
    })
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn projection_is_one_lipschitz(seed in any::<u64>()) {
        let x = random_space(seed, 5);
        let p = p2_metric(&x);
        for a in 0..5 {
            for b in 0..5 {
                for c in 0..5 {
                    for d in 0..5 {
                        let lhs = p.space.d(p.index(UnorderedPair::new(a, b)), p.index(UnorderedPair::new(c, d)));
                        prop_assert!(lhs <= x.d(a, c) + x.d(b, d));
                    }
                }
            }
        }
    }

    #[test]
    fn p2_is_functorial(f in proptest::collection::vec(0usize..5, 5), g in proptest::collection::vec(0usize..5, 5)) {
        let (f, g) = (PointMap::new(f, 5).unwrap(), PointMap::new(g, 5).unwrap());
        let gf = f.then(&g);
        for a in 0..5 {
            for b in 0..5 {
                let p = UnorderedPair::new(a, b);
                prop_assert_eq!(p.map(&gf), p.map(&f).map(&g));
            }
        }
    }

    #[test]
    fn stabilizer_index_is_one_or_two(seed in any::<u64>()) {
        let a = random_genuine(seed);
        let fam = FamilyPredicate::new(FamilyKind::Trivial, false);
        for x in 0..a.npoints() {
            for y in x..a.npoints() {
                let rep = p2_stabilizer_check(&a, UnorderedPair(x, y), &fam).unwrap();
                prop_assert!(rep.index == 1 || rep.index == 2);
                if let Some(m) = rep.f2_member {
                    prop_assert!(m);
                }
            }
        }
    }

    #[test]
    fn half_lipschitz_transfers(seed in any::<u64>(), dnum in 1i128..4) {
        let mut r = rng(seed);
        let x = random_space(seed, 4);
        let y = random_space(seed ^ 0xabc, 4);
        let f = PointMap::new((0..4).map(|_| r.gen_range(0..4)).collect(), 4).unwrap();
        let delta = qi(dnum);
        // smallest ε with f (δ, ε/2)
        let mut half = qi(0);
        for a in 0..4 {
            for b in 0..4 {
                if x.d(a, b) <= delta {
                    half = half.max(y.d(f.apply(a), f.apply(b)));
                }
            }
        }
        let rep = lipschitz_transfer_audit(&x, &y, &f, delta, half * qi(2));
        prop_assert!(rep.hypothesis);
        prop_assert!(rep.conclusion, "{:?}", rep.counterexample);
    }

    #[test]
    fn omega_estimate_on_random_actions(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = GroupBackend::cyclic(2);
        let space = ControlSpace::line(r.gen_range(2..=3));
        let a = random_action(&mut r, g.clone(), space, FiniteSubset::new(g.elements().unwrap()));
        let rep = omega_audit(&a, q(1, 2), 4, &omega_samples(&a), Mode::Parallel).unwrap();
        prop_assert!(rep.violations.is_empty(), "{:?}", rep.violations);
    }
}
