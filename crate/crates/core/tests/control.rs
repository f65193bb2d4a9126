use proptest::prelude::*;
use rand::Rng;
use transfer_core::control::*;
use transfer_core::fixtures::control::*;
use transfer_core::fixtures::rng;
use transfer_core::groups::{Elem, FiniteSubset, GroupBackend};
use transfer_core::rational::qi;

fn backends() -> Vec<GroupBackend> {
    vec![GroupBackend::cyclic(4), GroupBackend::dihedral(3), GroupBackend::free_abelian(1), GroupBackend::free(2)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn control_is_additive(seed in any::<u64>(), which in 0usize..4) {
        let g = &backends()[which];
        let mut r = rng(seed);
        let pool = element_pool(g);
        let x = random_line(&mut r, 5);
        let a = random_module(&mut r, &pool, x.len(), 3);
        let b = random_module(&mut r, &pool, x.len(), 4);
        let c = random_module(&mut r, &pool, x.len(), 3);
        let f = random_morphism(&mut r, &a, &b, 0.4);
        let h = random_morphism(&mut r, &b, &c, 0.4);
        let cf = f.certificate(g, &x);
        let ch = h.certificate(g, &x);
        let comp = h.compose(&f).unwrap();
        let s = ch.letters.product(g, &cf.letters);
        prop_assert!(check_control(&comp, cf.epsilon + ch.epsilon, &s, g, &x));
    }

    #[test]
    fn convolution_matches_explicit_composition(seed in any::<u64>()) {
        let g = GroupBackend::free_abelian(1);
        let mut r = rng(seed);
        let letters: Vec<Elem> = (-1..=1).map(|i| Elem::Vector(vec![i])).collect();
        let p = random_equivariant(&mut r, &[0, 1], &[1, 2, 2], &letters, 0.5);
        let q = random_equivariant(&mut r, &[1, 2, 2], &[0], &letters, 0.5);
        let conv = convolve(&g, &q, &p, None).unwrap();
        let ball = FiniteSubset::new((-4..=4).map(|i| Elem::Vector(vec![i])).collect());
        let explicit = q.expand(&g, &ball).compose(&p.expand(&g, &ball)).unwrap();
        let direct = conv.expand(&g, &ball);
        // rows over the core [-2, 2] see every contributing column
        for (row, (h, _)) in direct.tgt.basis.iter().enumerate() {
            let Elem::Vector(v) = h else { unreachable!() };
            if v[0].abs() <= 2 {
                prop_assert_eq!(explicit.matrix.row(row), direct.matrix.row(row));
            }
        }
    }

    #[test]
    fn finite_convolution_is_exact(seed in any::<u64>()) {
        let g = GroupBackend::dihedral(4);
        let mut r = rng(seed);
        let pool = g.elements().unwrap();
        let p = random_equivariant(&mut r, &[0, 1], &[1, 2], &pool[..3], 0.5);
        let q = random_equivariant(&mut r, &[1, 2], &[0, 2], &pool[2..5], 0.5);
        let all = FiniteSubset::new(pool.clone());
        let conv = convolve(&g, &q, &p, Some(&all)).unwrap();
        let explicit = q.expand(&g, &all).compose(&p.expand(&g, &all)).unwrap();
        prop_assert_eq!(conv.expand(&g, &all), explicit);
    }

    #[test]
    fn pushforward_is_functorial(seed in any::<u64>()) {
        let g = GroupBackend::cyclic(3);
        let mut r = rng(seed);
        let pool = element_pool(&g);
        let a = random_module(&mut r, &pool, 6, 3);
        let b = random_module(&mut r, &pool, 6, 3);
        let f = random_morphism(&mut r, &a, &b, 0.5);
        let m1 = PointMap::new((0..6).map(|_| r.gen_range(0..4)).collect(), 4).unwrap();
        let m2 = PointMap::new((0..4).map(|_| r.gen_range(0..2)).collect(), 2).unwrap();
        prop_assert_eq!(f.pushforward(&m1.then(&m2)), f.pushforward(&m1).pushforward(&m2));
    }

    #[test]
    fn dual_support_is_transposed(seed in any::<u64>()) {
        let g = GroupBackend::cyclic(5);
        let mut r = rng(seed);
        let pool = element_pool(&g);
        let a = random_module(&mut r, &pool, 4, 3);
        let b = random_module(&mut r, &pool, 4, 2);
        let f = random_morphism(&mut r, &a, &b, 0.5);
        let t: std::collections::BTreeSet<_> = f.support().into_iter().map(|(x, y)| (y, x)).collect();
        prop_assert_eq!(f.dual().support(), t);
    }
}

#[test]
fn convolution_leaving_ball_is_reported() {
    let g = GroupBackend::free_abelian(1);
    let one = Elem::Vector(vec![1]);
    let p = EquivariantMorphism::new(vec![0], vec![0], [(one.clone(), transfer_core::Matrix::scalar(1, 1))].into()).unwrap();
    let ball = FiniteSubset::new((-1..=1).map(|i| Elem::Vector(vec![i])).collect());
    assert!(matches!(convolve(&g, &p, &p, Some(&ball)), Err(transfer_core::Error::HorizonExceeded(_))));
    assert_eq!(p.epsilon(&ControlSpace::point()), qi(0));
}
