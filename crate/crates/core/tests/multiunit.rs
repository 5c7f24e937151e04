mod common;

use gftpl_core::envs::multiunit::{
    all_allocations, build_gamma_mu, exact_multiunit_dp, mir_bundles, mir_dobzinski_nisan,
    mir_range, welfare, ExactMultiUnitOracle, MirOracle, MultiUnitEnv, MultiUnitProfile,
};
use gftpl_core::oracles::capprox_guarantee_check;
use gftpl_core::translation::all_pairs;
use gftpl_core::{verify_implementability, Environment, ExactEnumOracle, Oracle, OracleKind};
use proptest::prelude::*;
use rand::Rng;

fn brute_best(data: &[(f64, &MultiUnitProfile)], candidates: &[Vec<u32>]) -> (Vec<u32>, f64) {
    let mut best = (Vec::new(), f64::NEG_INFINITY);
    for q in candidates {
        let v: f64 = data.iter().map(|(w, p)| w * welfare(q, p).unwrap()).sum();
        if v > best.1 + 1e-12 {
            best = (q.clone(), v);
        }
    }
    best
}

#[test]
fn welfare_examples() {
    assert!(MultiUnitProfile::from_marginals(&[vec![0.5; 3]]).is_err());
    let zero = MultiUnitProfile::from_marginals(&[vec![0.0; 4], vec![0.0; 4]]).unwrap();
    assert_eq!(welfare(&[1, 3], &zero).unwrap(), 0.0);
    let p = MultiUnitProfile::uniform_for(3, 6, 1);
    assert!((welfare(&[1, 4, 1], &p).unwrap() - 4.0 / 6.0).abs() < 1e-15);

    let mut r = common::rng(3);
    let p = common::random_multiunit(&mut r, 2, 4);
    for q in common::brute_allocations(2, 4) {
        let direct: f64 = (0..2).map(|i| p.value(i, q[i])).sum();
        assert_eq!(welfare(&q, &p).unwrap(), direct);
    }
}

#[test]
fn dp_gives_the_contested_unit_to_the_higher_marginal() {
    let third = 1.0 / 3.0;
    for mu2 in [0.2, third, 0.5, 0.9] {
        let p = MultiUnitProfile::from_marginals(&[vec![third; 3], vec![mu2, 0.0, 0.0]]).unwrap();
        let q = exact_multiunit_dp(&[(1.0, &p)], 2, 3).unwrap();
        let (expected, _) = brute_best(&[(1.0, &p)], &common::brute_allocations(2, 3));
        assert_eq!(q, expected, "mu2 = {mu2}");
    }
}

#[test]
fn dp_breaks_ties_lexicographically() {
    let flat = MultiUnitProfile::from_marginals(&[vec![0.25; 3], vec![0.25; 3]]).unwrap();
    assert_eq!(
        exact_multiunit_dp(&[(1.0, &flat)], 2, 3).unwrap(),
        vec![0, 3]
    );
}

#[test]
fn mir_range_is_closed_and_sized() {
    for n in 1..=3 {
        for s in 1..=36 {
            let (b, full) = mir_bundles(n, s);
            let range = mir_range(n, s);
            assert!(b * n * n >= s && full * b <= s);
            for q in &range {
                assert_eq!(q.iter().sum::<u32>() as usize, s);
                let off = q
                    .iter()
                    .filter(|&&x| !(x as usize).is_multiple_of(b))
                    .count();
                assert!(off <= 1, "n={n} s={s} q={q:?}");
            }
            // Giving everything to one bidder is always available.
            for i in 0..n {
                let mut all = vec![0u32; n];
                all[i] = s as u32;
                assert!(range.contains(&all));
            }
        }
    }
}

#[test]
fn mir_is_exact_when_bundling_is_free() {
    let mut r = common::rng(12);
    for _ in 0..50 {
        let n = r.random_range(1..=3);
        let s = n * n * r.random_range(1..=3);
        // Constant marginals make welfare linear, so an optimum puts everything on one bidder.
        let marginals: Vec<Vec<f64>> = (0..n)
            .map(|_| vec![r.random::<f64>() / s as f64; s])
            .collect();
        let p = MultiUnitProfile::from_marginals(&marginals).unwrap();
        let data = [(1.0, &p)];
        let mir = mir_dobzinski_nisan(&data, s, n).unwrap();
        let exact = exact_multiunit_dp(&data, n, s).unwrap();
        assert!((welfare(&mir, &p).unwrap() - welfare(&exact, &p).unwrap()).abs() < 1e-12);
    }
}

#[test]
fn single_bidder_mir_is_exact() {
    let p = MultiUnitProfile::from_marginals(&[vec![0.1; 7]]).unwrap();
    assert_eq!(mir_dobzinski_nisan(&[(1.0, &p)], 7, 1).unwrap(), vec![7]);
}

#[test]
fn mir_reaches_half_of_the_optimum() {
    let mut r = common::rng(77);
    for _ in 0..200 {
        let n = r.random_range(1..=3);
        let s = r.random_range(1..=36);
        let entries: Vec<(f64, MultiUnitProfile)> = (0..r.random_range(1..=3))
            .map(|_| {
                (
                    r.random_range(0.1..2.0),
                    common::random_multiunit(&mut r, n, s),
                )
            })
            .collect();
        let data: Vec<(f64, &MultiUnitProfile)> = entries.iter().map(|(w, p)| (*w, p)).collect();
        let value = |q: &[u32]| {
            data.iter()
                .map(|(w, p)| w * welfare(q, p).unwrap())
                .sum::<f64>()
        };
        let mir = value(&mir_dobzinski_nisan(&data, s, n).unwrap());
        let exact = value(&exact_multiunit_dp(&data, n, s).unwrap());
        assert!(mir >= 0.5 * exact - 1e-9, "n={n} s={s}: {mir} vs {exact}");
        let (_, brute) = brute_best(&data, &mir_range(n, s));
        assert!((mir - brute).abs() < 1e-9);
    }
}

#[test]
fn full_class_admissibility() {
    let env = MultiUnitEnv::new(2, 4).unwrap();
    let report = build_gamma_mu(&env).unwrap().matrix.admissibility();
    assert_eq!(
        (report.kappa, report.delta, report.rows_distinct),
        (5, 0.25, true)
    );
}

#[test]
fn restricted_range_admissibility_for_every_size() {
    for n in 1..=3usize {
        for s in 1..=36 {
            let env = MultiUnitEnv::mir_range(n, s).unwrap();
            let spec = build_gamma_mu(&env).unwrap();
            let report = spec.matrix.admissibility();
            assert!(report.rows_distinct, "n={n} s={s}");
            assert!(
                report.kappa <= n * n + 1,
                "n={n} s={s}: kappa {}",
                report.kappa
            );
            assert!(
                report.delta >= 1.0 / (n * n) as f64 - 1e-12,
                "n={n} s={s}: delta {}",
                report.delta
            );
            assert!(verify_implementability(&spec, &env, &all_pairs(env.num_actions())).holds);
        }
    }
    let report = build_gamma_mu(&MultiUnitEnv::mir_range(2, 8).unwrap())
        .unwrap()
        .matrix
        .admissibility();
    assert_eq!((report.kappa, report.delta), (5, 0.25));
}

#[test]
fn full_class_columns_are_welfare_on_uniform_profiles() {
    for n in 1..=2 {
        for s in 1..=8 {
            let env = MultiUnitEnv::new(n, s).unwrap();
            let spec = build_gamma_mu(&env).unwrap();
            assert!(verify_implementability(&spec, &env, &all_pairs(env.num_actions())).holds);
        }
    }
}

#[test]
fn oracles_agree_with_enumeration() {
    let mut r = common::rng(41);
    let env = MultiUnitEnv::new(3, 6).unwrap();
    let mir_env = MultiUnitEnv::mir_range(3, 6).unwrap();
    for _ in 0..100 {
        let entries: Vec<(f64, MultiUnitProfile)> = (0..3)
            .map(|_| {
                (
                    r.random_range(0.0..2.0),
                    common::random_multiunit(&mut r, 3, 6),
                )
            })
            .collect();
        let data: Vec<(f64, &MultiUnitProfile)> = entries.iter().map(|(w, p)| (*w, p)).collect();
        assert_eq!(
            ExactMultiUnitOracle.optimize(&env, &data, 0.0).unwrap(),
            ExactEnumOracle.optimize(&env, &data, 0.0).unwrap()
        );
        assert_eq!(
            MirOracle.optimize(&mir_env, &data, 0.0).unwrap(),
            ExactEnumOracle.optimize(&mir_env, &data, 0.0).unwrap()
        );
        assert!(capprox_guarantee_check(&ExactMultiUnitOracle, &env, &data, 1.0).unwrap());
    }
    assert_eq!(
        <MirOracle as Oracle<MultiUnitEnv>>::kind(&MirOracle),
        OracleKind::Approx(0.5)
    );
}

#[test]
fn enumeration_order_is_lexicographic() {
    let all = all_allocations(3, 4);
    assert_eq!(all, common::brute_allocations(3, 4));
}

proptest! {
    #[test]
    fn dp_matches_exhaustive_search(seed in 0u64..10_000, n in 1usize..4, s in 1usize..7) {
        let mut r = common::rng(seed);
        let p = common::random_multiunit(&mut r, n, s);
        let data = [(1.0, &p)];
        let (brute, best) = brute_best(&data, &common::brute_allocations(n, s));
        let q = exact_multiunit_dp(&data, n, s).unwrap();
        prop_assert!((welfare(&q, &p).unwrap() - best).abs() < 1e-9);
        prop_assert_eq!(q, brute);
    }

    #[test]
    fn normalized_welfare_is_in_unit_interval(seed in 0u64..10_000, n in 1usize..4, s in 1usize..9) {
        let mut r = common::rng(seed);
        let p = common::random_multiunit(&mut r, n, s);
        let env = MultiUnitEnv::new(n, s).unwrap();
        let scale = env.payoff_scale();
        for x in 0..env.num_actions() {
            let g = scale.normalize(env.payoff(x, &p));
            prop_assert!((0.0..=1.0).contains(&g));
        }
    }
}
