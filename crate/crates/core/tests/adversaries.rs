mod common;

use gftpl_core::adversaries::{
    convergence_bound, generate, spectral_gap_lower_bound, stochastic_benchmark, AdversaryModel,
    ConvergenceMode, FiniteDistribution,
};
use gftpl_core::envs::level::LevelEnv;
use gftpl_core::envs::vcg::{BidProfile, VcgEnv};
use gftpl_core::{Environment, ExactEnumOracle, Oracle};
use proptest::prelude::*;

fn counts(ids: &[usize], k: usize) -> Vec<f64> {
    let mut c = vec![0.0; k];
    for &i in ids {
        c[i] += 1.0;
    }
    c
}

#[test]
fn generation_is_deterministic_per_seed() {
    let dist = FiniteDistribution::new(vec!['a', 'b', 'c'], vec![0.2, 0.3, 0.5]).unwrap();
    let models = [
        AdversaryModel::Iid {
            dist: dist.clone(),
            horizon: 300,
        },
        AdversaryModel::Sticky {
            dist: dist.clone(),
            rho: 0.7,
            horizon: 300,
        },
    ];
    for model in &models {
        let a = generate(model, 11).unwrap();
        assert_eq!(a.ids(), generate(model, 11).unwrap().ids());
        assert_ne!(a.ids(), generate(model, 12).unwrap().ids());
        assert_eq!(a.horizon(), 300);
    }
    let script = generate(&AdversaryModel::Scripted(vec![3, 1, 4]), 0).unwrap();
    assert_eq!(script.iter().copied().collect::<Vec<_>>(), vec![3, 1, 4]);
}

#[test]
fn invalid_models_are_rejected() {
    assert!(FiniteDistribution::new(vec![1, 2], vec![0.5, 0.6]).is_err());
    assert!(FiniteDistribution::new(vec![1, 2], vec![1.0]).is_err());
    let dist = FiniteDistribution::uniform(vec![1, 2]).unwrap();
    for rho in [0.4, 1.0] {
        assert!(generate(
            &AdversaryModel::Sticky {
                dist: dist.clone(),
                rho,
                horizon: 5
            },
            0
        )
        .is_err());
    }
}

#[test]
fn nearly_sticky_chain_never_moves() {
    let dist = FiniteDistribution::uniform(vec![0, 1, 2, 3]).unwrap();
    let seq = generate(
        &AdversaryModel::Sticky {
            dist,
            rho: 1.0 - 1e-12,
            horizon: 1000,
        },
        3,
    )
    .unwrap();
    assert!(seq.ids().iter().all(|&i| i == seq.id(0)));
}

#[test]
fn iid_frequencies_match_probabilities() {
    let t = 10_000;
    let dist = FiniteDistribution::uniform(vec![0, 1]).unwrap();
    let seq = generate(&AdversaryModel::Iid { dist, horizon: t }, 5).unwrap();
    let freq = counts(seq.ids(), 2)[0] / t as f64;
    let sigma = (0.25 / t as f64).sqrt();
    assert!((freq - 0.5).abs() <= 3.0 * sigma, "frequency {freq}");
}

#[test]
fn sticky_chain_is_stationary_with_the_right_transitions() {
    let t = 100_000;
    let rho = 0.9;
    let probs = [0.2, 0.3, 0.5];
    let dist = FiniteDistribution::new(vec![0, 1, 2], probs.to_vec()).unwrap();
    let seq = generate(
        &AdversaryModel::Sticky {
            dist,
            rho,
            horizon: t,
        },
        8,
    )
    .unwrap();
    let ids = seq.ids();
    let freq = counts(ids, 3);
    for (k, &p) in probs.iter().enumerate() {
        // Lag-k autocorrelation of an indicator is λ^k with λ = ρ, so the variance inflates by (1+ρ)/(1−ρ).
        let sigma = (p * (1.0 - p) * (1.0 + rho) / ((1.0 - rho) * t as f64)).sqrt();
        assert!((freq[k] / t as f64 - p).abs() <= 3.0 * sigma, "state {k}");
    }
    for (k, &p) in probs.iter().enumerate() {
        let visits: Vec<usize> = (0..t - 1).filter(|&i| ids[i] == k).collect();
        let stays = visits.iter().filter(|&&i| ids[i + 1] == k).count() as f64;
        let expected = rho + (1.0 - rho) * p;
        let sigma = (expected * (1.0 - expected) / visits.len() as f64).sqrt();
        assert!(
            (stays / visits.len() as f64 - expected).abs() <= 3.0 * sigma,
            "state {k}"
        );
    }
}

#[test]
fn spectral_gap_examples() {
    assert_eq!(spectral_gap_lower_bound(0.5).unwrap(), 0.03125);
    assert!((spectral_gap_lower_bound(0.9).unwrap() - 0.00125).abs() < 1e-15);
    assert!(spectral_gap_lower_bound(1.0 - 1e-9).unwrap() < 1e-18);
    assert!(spectral_gap_lower_bound(0.3).is_err());
}

#[test]
fn convergence_examples() {
    let iid = convergence_bound(500.0, 10_000, 0.05, ConvergenceMode::Iid).unwrap();
    assert!((iid - (40f64.ln() / 20_000.0).sqrt() - 0.05).abs() < 1e-12);
    assert!((iid - 0.06358).abs() < 1e-5);
    let markov = convergence_bound(
        500.0,
        10_000,
        0.05,
        ConvergenceMode::Markov { gamma: 1.0 / 32.0 },
    )
    .unwrap();
    assert!((markov - 0.4565).abs() < 1e-4);
    let one = convergence_bound(0.0, 100, 1.0, ConvergenceMode::Iid).unwrap();
    assert!((one - (2f64.ln() / 200.0).sqrt()).abs() < 1e-15);
    assert!(convergence_bound(0.0, 100, 0.05, ConvergenceMode::Markov { gamma: 0.0 }).is_err());
}

#[test]
fn point_mass_benchmark_is_the_single_profile_argmax() {
    let env = VcgEnv::new(2, 3, 1).unwrap();
    let mut r = common::rng(1);
    for _ in 0..20 {
        let y = common::uniform_profile(&mut r, 2);
        let (x, v) =
            stochastic_benchmark(&env, &FiniteDistribution::uniform(vec![y.clone()]).unwrap())
                .unwrap();
        assert_eq!(
            x,
            ExactEnumOracle.optimize(&env, &[(1.0, &y)], 0.0).unwrap()
        );
        assert_eq!(v, env.payoff(x, &y));
    }
}

#[test]
fn two_profile_benchmark_matches_the_weighted_oracle() {
    let env = VcgEnv::new(2, 3, 1).unwrap();
    let mut r = common::rng(2);
    for _ in 0..50 {
        let ys = vec![
            common::grid_profile(&mut r, 2, 3),
            common::grid_profile(&mut r, 2, 3),
        ];
        let p: f64 = rand::Rng::random(&mut r);
        let dist = FiniteDistribution::new(ys.clone(), vec![p, 1.0 - p]).unwrap();
        let (x, _) = stochastic_benchmark(&env, &dist).unwrap();
        let data = [(p, &ys[0]), (1.0 - p, &ys[1])];
        assert_eq!(x, ExactEnumOracle.optimize(&env, &data, 0.0).unwrap());
    }
}

#[test]
fn uniform_level_benchmark_matches_a_hand_table() {
    let env = LevelEnv::new(2, 2, 2).unwrap();
    let ys: Vec<BidProfile> = [[1.0, 0.0], [0.0, 1.0], [1.0, 0.5], [0.5, 0.5]]
        .iter()
        .map(|v| BidProfile::new(v.to_vec()))
        .collect();
    let dist = FiniteDistribution::uniform(ys.clone()).unwrap();
    let (x, v) = stochastic_benchmark(&env, &dist).unwrap();
    // A lone bidder pays its base threshold, at most 1/2. With ladders (1/2, 1) for both
    // bidders every profile pays 1/2, and no ladder does better on average.
    assert!((v - 0.5).abs() < 1e-12, "value {v}");
    let table: Vec<f64> = (0..env.num_actions())
        .map(|a| {
            ys.iter()
                .map(|y| env.auction(a).revenue(&y.values))
                .sum::<f64>()
                / 4.0
        })
        .collect();
    assert_eq!(table[x], v);
    assert!(table.iter().all(|&t| t <= v));
}

proptest! {
    #[test]
    fn benchmark_dominates_every_action(seed in 0u64..2000) {
        let env = VcgEnv::new(2, 4, 1).unwrap();
        let mut r = common::rng(seed);
        let ys: Vec<BidProfile> = (0..4).map(|_| common::uniform_profile(&mut r, 2)).collect();
        let dist = FiniteDistribution::uniform(ys.clone()).unwrap();
        let (_, v) = stochastic_benchmark(&env, &dist).unwrap();
        for x in 0..env.num_actions() {
            let e: f64 = ys.iter().map(|y| env.payoff(x, y)).sum::<f64>() / 4.0;
            prop_assert!(e <= v + 1e-12);
        }
    }
}
