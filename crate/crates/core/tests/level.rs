mod common;

use gftpl_core::envs::level::{
    build_gamma_sl, level_index, level_outcome, level_revenue, LevelAuction, LevelEnv,
};
use gftpl_core::translation::all_pairs;
use gftpl_core::{verify_implementability, Environment};
use proptest::prelude::*;
use rand::Rng;

#[test]
fn level_index_examples() {
    assert_eq!(level_index(&[0.0, 0.5], 0.3), 0);
    assert_eq!(level_index(&[0.3, 0.5], 0.29), -1);
    assert_eq!(level_index(&[0.2, 0.4, 0.8], 0.4), 1);
}

#[test]
fn tied_top_levels_go_to_the_first_bidder() {
    let th = vec![vec![0.2, 0.6], vec![0.1, 0.5]];
    assert_eq!(level_outcome(&th, &[0.7, 0.55]), Some((0, 0.6)));
}

#[test]
fn lone_last_bidder_pays_its_base_threshold() {
    let env = LevelEnv::new(3, 2, 3).unwrap();
    let e_n = [0.0, 0.0, 1.0];
    for x in 0..env.num_actions() {
        let a = env.auction(x);
        assert_eq!(a.revenue(&e_n), a.thresholds[2][0]);
    }
}

#[test]
fn distinguishing_profiles_charge_the_matching_threshold() {
    let env = LevelEnv::new(3, 2, 3).unwrap();
    for x in 0..env.num_actions() {
        let a = env.auction(x);
        for i in 0..2 {
            for l in 0..=3 {
                let mut v = vec![0.0; 3];
                v[i] = 1.0;
                v[2] = l as f64 / 3.0;
                // Bidder i sits at the top level and beats the later bidder weakly.
                let b = level_index(&a.thresholds[2], v[2]).max(0) as usize;
                assert_eq!(
                    a.outcome(&v),
                    Some((i, a.thresholds[i][b])),
                    "auction {x} profile {v:?}"
                );
            }
        }
    }
}

#[test]
fn every_gamma_entry_is_on_the_grid() {
    for m in 2..=4 {
        let env = LevelEnv::new(2, 2, m).unwrap();
        let spec = build_gamma_sl(&env).unwrap();
        for row in spec.matrix.rows() {
            for &e in row {
                let k = e * m as f64;
                assert!((k - k.round()).abs() < 1e-12 && (0.0..=1.0).contains(&e));
            }
        }
        assert!(verify_implementability(&spec, &env, &all_pairs(env.num_actions())).holds);
    }
}

#[test]
fn admissibility_constants_for_small_grids() {
    for m in 2..=4u32 {
        let env = LevelEnv::new(2, 2, m).unwrap();
        let report = build_gamma_sl(&env).unwrap().matrix.admissibility();
        assert_eq!(report.kappa, m as usize + 1, "m={m}");
        assert!((report.delta - 1.0 / m as f64).abs() < 1e-12, "m={m}");
        assert!(report.rows_distinct, "m={m}");
    }
}

#[test]
fn rows_identify_auctions() {
    let env = LevelEnv::new(3, 2, 2).unwrap();
    let spec = build_gamma_sl(&env).unwrap();
    let mut rows: Vec<Vec<f64>> = spec.matrix.rows().map(<[f64]>::to_vec).collect();
    rows.sort_by(|a, b| a.partial_cmp(b).unwrap());
    rows.dedup();
    assert_eq!(rows.len(), env.num_actions());
}

#[test]
fn invalid_thresholds_are_rejected() {
    assert!(LevelAuction::new(vec![vec![0.5, 0.5]]).is_err());
    assert!(LevelAuction::new(vec![vec![0.2, 1.5]]).is_err());
    assert!(LevelEnv::new(2, 4, 2).is_err());
}

/// Minimum winning bid of the winner by search over the half-grid. A zero bid never wins.
fn grid_minimum_winning_bid(
    thresholds: &[Vec<f64>],
    values: &[f64],
    winner: usize,
    m: u32,
) -> Option<f64> {
    (1..=2 * m).map(|h| h as f64 / (2 * m) as f64).find(|&bid| {
        let mut v = values.to_vec();
        v[winner] = bid;
        level_outcome(thresholds, &v).map(|(w, _)| w) == Some(winner)
    })
}

#[test]
fn payment_is_the_minimum_winning_grid_bid() {
    let m = 4;
    let mut r = common::rng(6);
    for _ in 0..2000 {
        let n = r.random_range(1..=3);
        let env_thresholds: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                let lo = r.random_range(0..m);
                let hi = r.random_range(lo + 1..=m);
                vec![lo as f64 / m as f64, hi as f64 / m as f64]
            })
            .collect();
        let profile = common::grid_profile(&mut r, n, m);
        let Some((w, pay)) = level_outcome(&env_thresholds, &profile.values) else {
            continue;
        };
        assert!(env_thresholds[w].contains(&pay));
        assert!(pay <= profile.values[w]);
        let min_bid = grid_minimum_winning_bid(&env_thresholds, &profile.values, w, m).unwrap();
        if pay > 0.0 {
            assert_eq!(
                min_bid, pay,
                "thresholds {env_thresholds:?} values {:?}",
                profile.values
            );
        } else {
            // Any positive bid at the base level already wins.
            assert_eq!(min_bid, 1.0 / (2 * m) as f64);
        }
    }
}

proptest! {
    #[test]
    fn revenue_is_bounded_by_the_top_value(seed in 0u64..10_000) {
        let env = LevelEnv::new(2, 2, 3).unwrap();
        let mut r = common::rng(seed);
        let x = r.random_range(0..env.num_actions());
        let p = common::uniform_profile(&mut r, 2);
        let rev = level_revenue(&env.auction(x).thresholds, &p.values);
        prop_assert!(rev >= 0.0 && rev <= p.values.iter().copied().fold(0.0, f64::max) + 1e-12);
    }
}
