mod common;

use std::collections::BTreeMap;
use std::sync::Arc;

use proptest::prelude::*;
use transfer_core::actions::HomotopySAction;
use transfer_core::chain::ops::{dual_complex, dual_map, tensor_map_between};
use transfer_core::chain::{ChainComplex, ChainMap};
use transfer_core::control::{convolve, ControlSpace, EquivariantMorphism};
use transfer_core::fixtures::actions::random_action;
use transfer_core::fixtures::control::random_equivariant;
use transfer_core::fixtures::domination::{identity_domination, path9_chain_domination, random_domination};
use transfer_core::fixtures::rng;
use transfer_core::fixtures::transfer::{random_chain_action, random_quadratic, z2_edge_fixture, z2_path_fixture};
use transfer_core::groups::{Elem, FiniteSubset, GroupBackend};
use transfer_core::p2::UnorderedPair;
use transfer_core::rational::{q, qi, Q};
use transfer_core::transfer::pipelines::{audit_control, differential, eq_symmetrization, hyperbolic_alpha};
use transfer_core::transfer::tr::{classical_l_transfer, module_complex};
use transfer_core::transfer::*;
use transfer_core::{Error, Matrix};

fn e() -> Elem {
    Elem::Table(0)
}

fn s() -> Elem {
    Elem::Table(1)
}

fn morphism(pos: usize, m: usize, letters: &[(Elem, Matrix)]) -> EquivariantMorphism {
    EquivariantMorphism::new(vec![pos; m], vec![pos; m], letters.iter().cloned().collect()).unwrap()
}

/// Σ_a ψ_a ⊗ φ_a expanded over a finite group by hand: block (g, h) is ψ_a ⊗ φ_a with a = g⁻¹h.
fn hand_expansion(g: &GroupBackend, psi: &EquivariantMorphism, phi: &BTreeMap<Elem, ChainMap>, p: &ChainComplex, n: i32) -> Matrix {
    let elems = g.elements().unwrap();
    let (ms, mt, r) = (psi.src.len(), psi.tgt.len(), p.rank(n));
    let mut trip = Vec::new();
    for (gi, x) in elems.iter().enumerate() {
        for (hi, y) in elems.iter().enumerate() {
            let a = g.mul(&g.inv(x), y);
            let block = psi.letter(&a).kron(&phi[&a].comp(n));
            trip.extend(block.entries().map(|(i, j, v)| (gi * mt * r + i, hi * ms * r + j, v)));
        }
    }
    Matrix::from_triplets(elems.len() * mt * r, elems.len() * ms * r, trip)
}

/// d∘K + K∘d = target − source on explicit matrices of the expanded complex.
fn expanded_homotopy_holds(g: &GroupBackend, w: &EqHomotopy) -> bool {
    let big = expand_complex(g, &w.h.src).unwrap();
    let k = w.h.expand(g).unwrap();
    let src = w.source.expand(g).unwrap();
    let tgt = w.target.expand(g).unwrap();
    big.degrees().all(|n| {
        let lhs = big.d(n + 1).mul(&k.comp(n)).add(&k.comp(n - 1).mul(&big.d(n)));
        lhs == tgt.comp(n).sub(&src.comp(n))
    })
}

// tr

#[test]
fn tr_of_identity_is_identity() {
    let (_, p) = z2_path_fixture();
    let id = EquivariantMorphism::identity(&p.group, vec![0, 2]);
    let t = tr(&id, &p).unwrap();
    assert_eq!(t, EqChainMap::identity(&p.group, t.src.clone()));
}

#[test]
fn tr_over_the_trivial_complex_is_psi() {
    let g = GroupBackend::cyclic(2);
    let all = FiniteSubset::new(g.elements().unwrap());
    let t = HomotopySChainComplex::trivial(&g, &all, 3, 1).unwrap();
    let psi =
        EquivariantMorphism::new(vec![0, 1], vec![2], [(e(), Matrix::from_dense(&[vec![1, -2]])), (s(), Matrix::from_dense(&[vec![0, 3]]))].into()).unwrap();
    let out = tr(&psi, &t).unwrap();
    for (a, m) in &psi.letters {
        assert_eq!(out.letter(a).comp(0), *m);
    }
    assert_eq!(out.letters.len(), 2);
}

#[test]
fn tr_on_z2_matches_hand_expansion() {
    let (_, p) = z2_edge_fixture();
    let psi = morphism(0, 2, &[(e(), Matrix::from_dense(&[vec![1, 2], vec![0, -1]])), (s(), Matrix::from_dense(&[vec![0, 1], vec![3, 0]]))]);
    let big = tr(&psi, &p).unwrap().expand(&p.group).unwrap();
    for n in 0..=1 {
        assert_eq!(big.comp(n), hand_expansion(&p.group, &psi, &p.phi, &p.p, n), "degree {n}");
    }
}

#[test]
fn tr_rejects_letters_outside_s() {
    let g = GroupBackend::cyclic(3);
    let t = HomotopySChainComplex::trivial(&g, &FiniteSubset::new(vec![e()]), 1, 0).unwrap();
    let psi = morphism(0, 1, &[(Elem::Table(1), Matrix::identity(1))]);
    assert!(matches!(tr(&psi, &t), Err(Error::SupportEscape(_))));
}

// functoriality

#[test]
fn witness_vanishes_for_letters_at_the_identity() {
    let (_, p) = z2_path_fixture();
    let a = morphism(0, 2, &[(e(), Matrix::from_dense(&[vec![1, 1], vec![0, 1]]))]);
    let b = morphism(0, 2, &[(e(), Matrix::from_dense(&[vec![2, 0], vec![1, 1]]))]);
    let w = functoriality_witness(&a, &b, &p).unwrap();
    assert!(w.h.is_zero());
    assert_eq!(w.source, w.target);
}

#[test]
fn witness_vanishes_for_genuine_actions() {
    let (_, p) = z2_edge_fixture();
    let a = morphism(0, 1, &[(e(), Matrix::identity(1)), (s(), Matrix::scalar(1, 2))]);
    let b = morphism(0, 1, &[(s(), Matrix::scalar(1, -1))]);
    let w = functoriality_witness(&a, &b, &p).unwrap();
    assert!(w.h.is_zero());
    assert_eq!(w.source, w.target);
}

#[test]
fn witness_with_nontrivial_coherence_checks_entrywise() {
    let (_, p) = z2_path_fixture();
    let a = morphism(1, 1, &[(s(), Matrix::identity(1))]);
    let b = morphism(1, 1, &[(e(), Matrix::identity(1)), (s(), Matrix::scalar(1, 1))]);
    let w = functoriality_witness(&a, &b, &p).unwrap();
    assert!(!w.h.is_zero());
    assert!(expanded_homotopy_holds(&p.group, &w));
}

// finite replacement

#[test]
fn replacement_of_an_isomorphism() {
    let x = identity_domination(&mut rng(5), 2);
    let rep = finite_replacement(&x.c, &x.d, &x.i, &x.r, &x.h, None).unwrap();
    assert!(rep.identity_failures(&x.i, &x.r).is_empty());
    // f′ is the inclusion of the top block and g′ kills the lower ones
    let f = rep.f.comp(1);
    assert_eq!(f.rows(), x.c.rank(0) + x.c.rank(1));
    assert!(rep.l.comps().values().all(|m| m.is_zero()));
}

#[test]
fn replacement_of_the_path_domination() {
    let (x, space) = path9_chain_domination();
    let rep = finite_replacement(&x.c, &x.d, &x.i, &x.r, &x.h, Some((&space, qi(4)))).unwrap();
    assert_eq!(rep.p.lo, 0);
    assert_eq!(rep.p.hi(), 1);
    // direct checks of each family
    let id_p = ChainMap::identity(rep.p.clone());
    assert_eq!(rep.v.after(&rep.u), id_p);
    assert_eq!(rep.gprime.after(&rep.fprime), x.r.after(&x.i));
    assert_eq!(rep.k.commutator_with_d(), id_p.sub(&rep.f.after(&rep.g)));
    assert_eq!(rep.l.commutator_with_d(), ChainMap::identity(x.c.clone()).sub(&rep.g.after(&rep.f)));
    assert!(rep.epsilon.unwrap() <= qi(12));
}

#[test]
fn replacement_rejects_a_non_homotopy() {
    let (x, _) = path9_chain_domination();
    let bad = x.h.scale(2);
    assert!(matches!(finite_replacement(&x.c, &x.d, &x.i, &x.r, &bad, None), Err(Error::HypothesisViolation(_))));
}

#[test]
fn replacement_control_bound_is_enforced() {
    let (x, space) = path9_chain_domination();
    assert!(matches!(finite_replacement(&x.c, &x.d, &x.i, &x.r, &x.h, Some((&space, q(1, 2)))), Err(Error::ControlViolation(_))));
}

// K-transfer

#[test]
fn k_transfer_over_trivial_group_and_complex() {
    let g = GroupBackend::trivial();
    let space = ControlSpace::point();
    let all = FiniteSubset::new(vec![g.identity()]);
    let a = HomotopySAction::genuine(g.clone(), space, all.clone(), |_| transfer_core::control::PointMap::identity(1)).unwrap();
    let t = HomotopySChainComplex::trivial(&g, &all, 1, 0).unwrap();
    let alpha = EquivariantMorphism::new(vec![0, 0], vec![0, 0], [(g.identity(), Matrix::from_dense(&[vec![2, 1], vec![1, 1]]))].into()).unwrap();
    let k = k_transfer(&a, &t, &alpha, None, qi(1)).unwrap();
    assert_eq!(k.alpha_hat.letter(&g.identity()).comp(0), alpha.letter(&g.identity()));
    assert!(k.projections.iter().all(|p| p.agrees()));
}

#[test]
fn k_transfer_on_z2_certifies_and_projects() {
    let (a, p) = z2_path_fixture();
    // α = [[s, 1], [0, −1]]: determinant −1 under χ = 1 and +1 under the sign character
    let alpha = morphism(1, 2, &[(e(), Matrix::from_dense(&[vec![0, 1], vec![0, -1]])), (s(), Matrix::from_dense(&[vec![1, 0], vec![0, 0]]))]);
    let k = k_transfer(&a, &p, &alpha, None, qi(1)).unwrap();
    let signs: Vec<(Vec<i64>, i8)> = k.projections.iter().map(|p| (p.character.clone(), p.alpha_det_sign)).collect();
    assert!(signs.contains(&(vec![1, 1], -1)) && signs.contains(&(vec![1, -1], 1)));
    assert_eq!(k.certificate.epsilon(), qi(1));
    assert_eq!(k.audit.bound, qi(2));
    assert!(k.audit.worst <= qi(2));
    assert_eq!(k.projections.len(), 2);
    for pr in &k.projections {
        assert!(pr.agrees(), "{pr:?}");
    }
    assert!(expanded_homotopy_holds(&p.group, &k.h));
    assert!(expanded_homotopy_holds(&p.group, &k.k));
}

#[test]
fn k_transfer_of_identity_has_zero_homotopies() {
    let (a, p) = z2_path_fixture();
    let id = EquivariantMorphism::identity(&p.group, vec![0, 1]);
    let k = k_transfer(&a, &p, &id, None, qi(1)).unwrap();
    assert_eq!(k.alpha_hat, EqChainMap::identity(&p.group, k.c.clone()));
    assert!(k.h.h.is_zero() && k.k.h.is_zero());
}

#[test]
fn k_transfer_on_the_swapped_edge() {
    let (a, p) = z2_edge_fixture();
    let alpha = morphism(0, 1, &[(s(), Matrix::scalar(1, -1))]);
    let k = k_transfer(&a, &p, &alpha, None, qi(1)).unwrap();
    assert_eq!(k.audit.bound, qi(2));
    assert!(k.projections.iter().all(|p| p.agrees()));
}

#[test]
fn audit_reports_control_violations() {
    // the swap keeps the two fibers apart: d((e,0),(e,1)) = Λ
    let (a, p) = z2_edge_fixture();
    let d = differential(&p.group, &p.p);
    assert!(matches!(audit_control(&a, qi(2), qi(0), &[("d", &d)]), Err(Error::ControlViolation(_))));
    assert_eq!(audit_control(&a, qi(1), qi(0), &[("d", &d)]).unwrap().worst, qi(1));
}

#[test]
fn k_transfer_needs_products_in_s() {
    let g = GroupBackend::cyclic(3);
    let sset = FiniteSubset::new(vec![e(), Elem::Table(1), Elem::Table(2)]);
    let mut r = rng(2);
    let a = random_action(&mut r, g.clone(), ControlSpace::line(2), sset.clone());
    let p = HomotopySChainComplex::constant(
        &g,
        &FiniteSubset::new(vec![e(), Elem::Table(1)]),
        Arc::new(ChainComplex::point().with_positions(2, vec![vec![0]]).unwrap()),
    )
    .unwrap();
    let alpha = morphism(0, 1, &[(Elem::Table(1), Matrix::identity(1))]);
    let inv = morphism(0, 1, &[(Elem::Table(2), Matrix::identity(1))]);
    assert!(matches!(k_transfer(&a, &p, &alpha, Some(&inv), qi(1)), Err(Error::HypothesisViolation(_))));
}

// L symmetric complex

#[test]
fn l_symmetric_complex_of_the_trivial_complex() {
    let g = GroupBackend::cyclic(2);
    let all = FiniteSubset::new(g.elements().unwrap());
    let a = HomotopySAction::genuine(g.clone(), ControlSpace::point(), all.clone(), |_| transfer_core::control::PointMap::identity(1)).unwrap();
    let t = HomotopySChainComplex::trivial(&g, &all, 1, 0).unwrap();
    let l = l_symmetric_complex(&a, &t).unwrap();
    assert_eq!(l.d.p.ranks, vec![1]);
    assert_eq!(l.mu.comp(0), Matrix::identity(1));
}

#[test]
fn l_symmetric_complex_on_an_edge() {
    let (a, p) = z2_edge_fixture();
    let l = l_symmetric_complex(&a, &p).unwrap();
    // D = P^{-*} ⊗ P lives in −1..1 with ranks 2·1, 2·2 + 1·1, 1·2
    assert_eq!((l.d.p.lo, l.d.p.hi()), (-1, 1));
    assert_eq!(l.d.p.ranks, vec![2, 5, 2]);
    // φ^D_s = (φ_s)^{-*} ⊗ φ_s, entrywise from the swap and its dual
    let phi = &p.phi[&s()];
    let expect = tensor_map_between(&dual_map(phi), phi, l.d.p.clone(), l.d.p.clone());
    assert_eq!(l.d.phi[&s()], expect);
    // μ symmetric and equivariant, checked on explicit matrices
    let dd = dual_map(&l.mu);
    for n in l.d_dual.degrees() {
        let sign = if n.rem_euclid(2) == 0 { 1 } else { -1 };
        assert_eq!(dd.comp(n), l.mu.comp(n).scale(sign));
        let lhs = l.mu.comp(n).mul(&dual_map(&l.d.phi[&s()]).comp(n));
        assert_eq!(lhs, l.d.phi[&s()].comp(n).mul(&l.mu.comp(n)));
    }
    assert!(l.mu.support().iter().all(|(x, y)| x == y));
}

#[test]
fn l_symmetric_complex_certificate_matches_pair_distances() {
    let (a, p) = z2_path_fixture();
    let l = l_symmetric_complex(&a, &p).unwrap();
    let mut worst = Q::default();
    for (g, m) in &l.d.phi {
        let f = &a.phi[g];
        for (x, y) in m.support() {
            let (px, py) = (l.p2.pairs[x], l.p2.pairs[y]);
            let image = UnorderedPair::new(f.apply(py.0), f.apply(py.1));
            let d = (a.space.d(px.0, image.0) + a.space.d(px.1, image.1)).min(a.space.d(px.0, image.1) + a.space.d(px.1, image.0));
            worst = worst.max(d);
        }
    }
    assert_eq!(l.certificate.eps_phi, worst);
}

#[test]
fn l_symmetric_complex_needs_symmetric_s() {
    let g = GroupBackend::cyclic(3);
    let sset = FiniteSubset::new(vec![e(), Elem::Table(1)]);
    let a = random_action(&mut rng(4), g.clone(), ControlSpace::line(2), sset.clone());
    let p = HomotopySChainComplex::constant(&g, &sset, Arc::new(ChainComplex::point().with_positions(2, vec![vec![0]]).unwrap())).unwrap();
    assert!(matches!(l_symmetric_complex(&a, &p), Err(Error::HypothesisViolation(_))));
}

// L-transfer

#[test]
fn l_transfer_over_trivial_data_is_alpha() {
    let g = GroupBackend::trivial();
    let all = FiniteSubset::new(vec![g.identity()]);
    let a = HomotopySAction::genuine(g.clone(), ControlSpace::point(), all.clone(), |_| transfer_core::control::PointMap::identity(1)).unwrap();
    let t = HomotopySChainComplex::trivial(&g, &all, 1, 0).unwrap();
    let alpha = hyperbolic_alpha(&g, 1, 0);
    let l = l_transfer(&a, &t, &alpha, None, qi(1)).unwrap();
    assert_eq!(l.psi.letter(&g.identity()).comp(0), alpha.letter(&g.identity()));
    assert_eq!(l.audit.worst, qi(0));
    assert!(l.reaudit.unwrap().passed());
}

#[test]
fn l_transfer_on_z2_symmetrizes_exactly() {
    let (a, p) = z2_path_fixture();
    let g = &p.group;
    let alpha = EquivariantMorphism::new(
        vec![1, 1],
        vec![1, 1],
        [(e(), Matrix::from_dense(&[vec![0, 1], vec![0, 0]])), (s(), Matrix::from_dense(&[vec![1, 0], vec![0, 0]]))].into(),
    )
    .unwrap();
    let l = l_transfer(&a, &p, &alpha, None, q(1, 2)).unwrap();
    assert_eq!(l.audit.bound, qi(2));
    // the identity again on the expanded matrices
    let beta = alpha.add(&alpha.star(g));
    let cd = Arc::new(dual_complex(&l.c));
    let idmu = tensor_map_between(&ChainMap::identity(module_complex(2)), &l.sym.mu, cd.clone(), l.c.clone());
    let lhs = eq_symmetrization(g, &l.psi).expand(g).unwrap();
    let rhs = tr(&beta, &l.sym.d).unwrap().expand(g).unwrap();
    let idmu_big = EqChainMap::plain(g, idmu).expand(g).unwrap();
    for n in cd.degrees() {
        assert_eq!(lhs.comp(n), rhs.comp(n).mul(&idmu_big.comp(n)), "degree {n}");
    }
    assert!(l.reaudit.as_ref().unwrap().passed());
    assert!(l.projections.iter().all(|p| p.agrees()));
}

#[test]
fn l_transfer_rejects_a_singular_symmetrization() {
    let (a, p) = z2_path_fixture();
    let alpha = morphism(1, 1, &[(e(), Matrix::identity(1))]);
    assert!(matches!(l_transfer(&a, &p, &alpha, None, qi(1)), Err(Error::NotAnEquivalence(_))));
}

// classical transfers

#[test]
fn whitehead_transfer_on_the_point_is_a() {
    let g = GroupBackend::cyclic(2);
    let pt = Arc::new(ChainComplex::point());
    let r: BTreeMap<Elem, ChainMap> = g.elements().unwrap().into_iter().map(|x| (x, ChainMap::identity(pt.clone()))).collect();
    let a = morphism(0, 2, &[(e(), Matrix::from_dense(&[vec![1, 2], vec![0, 1]])), (s(), Matrix::from_dense(&[vec![0, -1], vec![1, 0]]))]);
    let w = whitehead_transfer(&a, &pt, &r).unwrap();
    for (x, m) in &a.letters {
        assert_eq!(w.letter(x).comp(0), *m);
    }
}

#[test]
fn whitehead_transfer_over_the_trivial_group_is_a_tensor_c() {
    let g = GroupBackend::trivial();
    let c = Arc::new(ChainComplex::new(0, vec![2, 1], vec![Matrix::from_dense(&[vec![1], vec![-1]])]).unwrap());
    let r = BTreeMap::from([(g.identity(), ChainMap::identity(c.clone()))]);
    let am = Matrix::from_dense(&[vec![2, 1], vec![1, 1]]);
    let a = EquivariantMorphism::new(vec![0, 0], vec![0, 0], [(g.identity(), am.clone())].into()).unwrap();
    let w = whitehead_transfer(&a, &c, &r).unwrap();
    for n in 0..=1 {
        assert_eq!(w.letter(&g.identity()).comp(n), am.kron(&Matrix::identity(c.rank(n))));
    }
}

#[test]
fn whitehead_transfer_with_a_twisting_automorphism() {
    let g = GroupBackend::cyclic(2);
    let c = Arc::new(ChainComplex::new(0, vec![1, 1], vec![Matrix::scalar(1, 2)]).unwrap());
    let minus = ChainMap::identity(c.clone()).neg();
    let r = BTreeMap::from([(e(), ChainMap::identity(c.clone())), (s(), minus.clone())]);
    let a = morphism(0, 1, &[(e(), Matrix::scalar(1, 3)), (s(), Matrix::scalar(1, 1))]);
    let w = whitehead_transfer(&a, &c, &r).unwrap();
    let big = w.expand(&g).unwrap();
    // rows/columns: copies e, s; letter e = 3, letter s = −1 in both degrees
    for n in 0..=1 {
        assert_eq!(big.comp(n), Matrix::from_dense(&[vec![3, -1], vec![-1, 3]]));
    }
    assert!(w.is_chain_map());
}

#[test]
fn classical_l_transfer_of_a_point_form() {
    let g = GroupBackend::cyclic(2);
    let pt = Arc::new(ChainComplex::point());
    let phi = ChainMap::new(Arc::new(dual_complex(&pt)), pt.clone(), 0, [(0, Matrix::identity(1))].into()).unwrap();
    let r: BTreeMap<Elem, ChainMap> = g.elements().unwrap().into_iter().map(|x| (x, ChainMap::identity(pt.clone()))).collect();
    let psi = morphism(0, 2, &[(e(), Matrix::from_dense(&[vec![0, 1], vec![0, 0]]))]);
    let out = classical_l_transfer(&g, &psi, &pt, &phi, &r).unwrap();
    assert_eq!(out.letter(&e()).comp(0), psi.letter(&e()));
}

// randomized identities

fn finite_groups() -> Vec<GroupBackend> {
    vec![GroupBackend::cyclic(2), GroupBackend::cyclic(3), GroupBackend::dihedral(3)]
}

fn random_letters(r: &mut impl rand::Rng, g: &GroupBackend, pos: usize, m: usize) -> EquivariantMorphism {
    random_equivariant(r, &vec![pos; m], &vec![pos; m], &g.elements().unwrap(), 0.5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn functoriality_holds_on_random_actions(seed in any::<u64>(), which in 0usize..3) {
        let g = &finite_groups()[which];
        let mut r = rng(seed);
        let (_, p) = random_chain_action(&mut r, g);
        let a = random_letters(&mut r, g, 0, 2);
        let b = random_letters(&mut r, g, 0, 2);
        let w = functoriality_witness(&a, &b, &p).unwrap();
        prop_assert!(expanded_homotopy_holds(g, &w));
    }

    #[test]
    fn genuine_actions_are_strictly_functorial(seed in any::<u64>(), m in 1usize..3) {
        let (_, p) = z2_edge_fixture();
        let g = &p.group;
        let mut r = rng(seed);
        let a = random_letters(&mut r, g, 0, m);
        let b = random_letters(&mut r, g, 0, m);
        let composite = tr(&convolve(g, &a, &b, None).unwrap(), &p).unwrap();
        prop_assert_eq!(tr(&a, &p).unwrap().after(g, &tr(&b, &p).unwrap()), composite);
    }

    #[test]
    fn replacement_identities_hold(seed in any::<u64>(), n in 1i32..4) {
        let x = random_domination(&mut rng(seed), n);
        let rep = finite_replacement(&x.c, &x.d, &x.i, &x.r, &x.h, None).unwrap();
        prop_assert!(rep.identity_failures(&x.i, &x.r).is_empty());
        let id_p = ChainMap::identity(rep.p.clone());
        prop_assert_eq!(rep.v.after(&rep.u), id_p.clone());
        prop_assert_eq!(rep.k.commutator_with_d(), id_p.sub(&rep.f.after(&rep.g)));
        prop_assert_eq!(rep.l.commutator_with_d(), ChainMap::identity(x.c.clone()).sub(&rep.g.after(&rep.f)));
    }

    #[test]
    fn mu_is_symmetric_and_equivariant(seed in any::<u64>(), which in 0usize..3) {
        let g = &finite_groups()[which];
        let (a, p) = random_chain_action(&mut rng(seed), g);
        let l = l_symmetric_complex(&a, &p).unwrap();
        let dd = dual_map(&l.mu);
        for n in l.d_dual.degrees() {
            let sign = if n.rem_euclid(2) == 0 { 1 } else { -1 };
            prop_assert_eq!(dd.comp(n), l.mu.comp(n).scale(sign));
        }
        for x in &l.d.s.elements {
            let back = dual_map(&l.d.phi[&g.inv(x)]);
            for n in l.d_dual.degrees() {
                prop_assert_eq!(l.mu.comp(n).mul(&back.comp(n)), l.d.phi[x].comp(n).mul(&l.mu.comp(n)));
            }
        }
    }

    #[test]
    fn l_transfer_symmetrization_is_exact(seed in any::<u64>(), which in 0usize..2) {
        let g = &finite_groups()[which];
        let mut r = rng(seed);
        let (a, p) = random_chain_action(&mut r, g);
        let alpha = random_quadratic(&mut r, g, 1, 0);
        // ε of D can be large for random actions; Λ = 1/ε keeps the bound at 2
        let eps = l_symmetric_complex(&a, &p).unwrap().certificate.epsilon();
        let lambda = if eps == qi(0) { qi(1) } else { qi(1) / eps };
        let l = l_transfer(&a, &p, &alpha, None, lambda);
        match l {
            Ok(l) => {
                prop_assert!(l.reaudit.unwrap().passed());
                prop_assert!(l.projections.iter().all(|x| x.agrees()));
            }
            Err(Error::ControlViolation(_)) => {}
            Err(e) => prop_assert!(false, "{e:?}"),
        }
    }
}
