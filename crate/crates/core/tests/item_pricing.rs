mod common;

use gftpl_core::envs::item_pricing::{
    build_gamma_ip, item_pricing_outcome, round_prices, Bidder, BidderModel, CombinatorialProfile,
    ItemPricingEnv,
};
use gftpl_core::envs::vcg::{build_gamma_vcg, VcgEnv};
use gftpl_core::translation::all_pairs;
use gftpl_core::{verify_implementability, Environment};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn single(bundle: u32, value: f64) -> CombinatorialProfile {
    CombinatorialProfile {
        bidders: vec![Bidder::SingleMinded { bundle, value }],
    }
}

fn weights<Y>(d: &[(f64, Y)]) -> Vec<f64> {
    d.iter().map(|(w, _)| *w).collect()
}

fn unit_demand(r: &mut ChaCha8Rng, n: usize, k: usize) -> CombinatorialProfile {
    CombinatorialProfile {
        bidders: (0..n)
            .map(|_| Bidder::UnitDemand {
                values: (0..k).map(|_| r.random()).collect(),
            })
            .collect(),
    }
}

fn single_minded(r: &mut ChaCha8Rng, n: usize, k: usize) -> CombinatorialProfile {
    CombinatorialProfile {
        bidders: (0..n)
            .map(|_| Bidder::SingleMinded {
                bundle: r.random_range(1..1u32 << k),
                value: r.random(),
            })
            .collect(),
    }
}

#[test]
fn lone_bidder_buys_iff_value_reaches_price() {
    let m = 5;
    let prices = [0.4, 0.6];
    for l in 0..2 {
        for h in 0..=m {
            let rev =
                item_pricing_outcome(&prices, &[None, None], &single(1 << l, h as f64 / m as f64))
                    .revenue;
            let expected = if h as f64 >= m as f64 * prices[l] - 1e-12 {
                prices[l]
            } else {
                0.0
            };
            assert!((rev - expected).abs() < 1e-12, "item {l}, h={h}");
        }
    }
}

#[test]
fn overpriced_items_sell_nothing() {
    let profile = CombinatorialProfile {
        bidders: vec![
            Bidder::UnitDemand {
                values: vec![0.2, 0.3],
            },
            Bidder::SingleMinded {
                bundle: 0b11,
                value: 0.9,
            },
        ],
    };
    assert_eq!(
        item_pricing_outcome(&[0.5, 0.5], &[None, None], &profile).revenue,
        0.0
    );
}

#[test]
fn sequential_unit_demand_allocation() {
    let profile = CombinatorialProfile {
        bidders: vec![
            Bidder::UnitDemand {
                values: vec![0.6, 0.9],
            },
            Bidder::UnitDemand {
                values: vec![0.4, 0.45],
            },
        ],
    };
    let out = item_pricing_outcome(&[0.3, 0.5], &[Some(1), Some(1)], &profile);
    assert_eq!(out.allocations, vec![0b10, 0b01]);
    assert!((out.revenue - 0.8).abs() < 1e-12);
}

#[test]
fn two_items_mirror_two_bidder_vcg_datasets() {
    let ip = build_gamma_ip(&ItemPricingEnv::new(2, 3, vec![None, None], 1).unwrap()).unwrap();
    let vcg = build_gamma_vcg(&VcgEnv::new(2, 3, 1).unwrap()).unwrap();
    for j in 0..vcg.num_columns() {
        assert_eq!(
            weights(&ip.datasets[j].entries),
            weights(&vcg.datasets[j].entries)
        );
        let neg = (
            &ip.negative_datasets.as_ref().unwrap()[j],
            &vcg.negative_datasets.as_ref().unwrap()[j],
        );
        assert_eq!(weights(&neg.0.entries), weights(&neg.1.entries));
    }
    for x in 0..9 {
        assert_eq!(ip.row(x), vcg.row(x));
    }
}

#[test]
fn small_price_grids_are_implementable_and_two_one_admissible() {
    for k in 1..=2 {
        for m in 2..=8 {
            let env = ItemPricingEnv::new(k, m, vec![Some(1); k], 1).unwrap();
            let spec = build_gamma_ip(&env).unwrap();
            let check = verify_implementability(&spec, &env, &all_pairs(env.num_actions()));
            assert!(
                check.holds,
                "k={k} m={m}: deviation {}",
                check.max_deviation
            );
            let report = spec.matrix.admissibility();
            assert_eq!(
                (report.kappa, report.delta, report.rows_distinct),
                (2, 1.0, true)
            );
        }
    }
}

#[test]
fn unit_demand_discounts_grow_with_price() {
    let mut r = common::rng(21);
    let m = 10;
    for _ in 0..500 {
        let k = r.random_range(1..=5);
        let a: Vec<f64> = (0..k).map(|_| r.random()).collect();
        let rounded = round_prices(&a, m, BidderModel::UnitDemand);
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&x, &y| a[x].total_cmp(&a[y]));
        // Before the lift to 1/m, gaps are nondecreasing and the l-th smallest is at most l/m.
        let unlifted: Vec<f64> = order
            .iter()
            .scan(0.0, |disc: &mut f64, &l| {
                let down = ((a[l] - *disc) * m as f64 + 1e-9).floor().max(0.0) / m as f64;
                *disc = a[l] - down;
                Some(*disc)
            })
            .collect();
        for (rank, w) in unlifted.windows(2).enumerate() {
            assert!(w[1] >= w[0] - 1e-12);
            assert!(w[1] <= (rank + 2) as f64 / m as f64 + 1e-12);
        }
        for &l in &order {
            assert!(
                rounded[l] >= 1.0 / m as f64 - 1e-12
                    && rounded[l] <= a[l].max(1.0 / m as f64) + 1e-12
            );
        }
    }
}

#[test]
fn rounding_loss_is_at_most_two_n_k_over_m() {
    let m = 20;
    let mut r = common::rng(31);
    for model in [BidderModel::UnitDemand, BidderModel::SingleMinded] {
        for _ in 0..1000 {
            let n = r.random_range(1..=4);
            let k = r.random_range(1..=4);
            let a: Vec<f64> = (0..k).map(|_| r.random()).collect();
            let profile = match model {
                BidderModel::UnitDemand => unit_demand(&mut r, n, k),
                BidderModel::SingleMinded => single_minded(&mut r, n, k),
            };
            let supply = vec![None; k];
            let loss = item_pricing_outcome(&a, &supply, &profile).revenue
                - item_pricing_outcome(&round_prices(&a, m, model), &supply, &profile).revenue;
            assert!(
                loss <= 2.0 * (n * k) as f64 / m as f64 + 1e-12,
                "{model:?}: loss {loss}"
            );
        }
    }
}

proptest! {
    #[test]
    fn allocations_respect_supply(seed in 0u64..5000, n in 1usize..6, k in 1usize..4, cap in 0u32..3) {
        let mut r = common::rng(seed);
        let profile = if seed % 2 == 0 { unit_demand(&mut r, n, k) } else { single_minded(&mut r, n, k) };
        let prices: Vec<f64> = (0..k).map(|_| r.random_range(1..=10) as f64 / 10.0).collect();
        let supply = vec![Some(cap); k];
        let out = item_pricing_outcome(&prices, &supply, &profile);
        for l in 0..k {
            let sold = out.allocations.iter().filter(|&&b| b >> l & 1 == 1).count() as u32;
            prop_assert!(sold <= cap);
        }
        let revenue: f64 = out
            .allocations
            .iter()
            .map(|&b| (0..k).filter(|l| b >> l & 1 == 1).map(|l| prices[l]).sum::<f64>())
            .sum();
        prop_assert!((revenue - out.revenue).abs() < 1e-12);
    }

    #[test]
    fn unlimited_supply_is_envy_free(seed in 0u64..5000, n in 1usize..5, k in 1usize..4) {
        let mut r = common::rng(seed);
        let profile = if seed % 2 == 0 { unit_demand(&mut r, n, k) } else { single_minded(&mut r, n, k) };
        let prices: Vec<f64> = (0..k).map(|_| r.random_range(1..=10) as f64 / 10.0).collect();
        let out = item_pricing_outcome(&prices, &vec![None; k], &profile);
        let cost = |b: u32| (0..k).filter(|l| b >> l & 1 == 1).map(|l| prices[l]).sum::<f64>();
        for (bidder, &got) in profile.bidders.iter().zip(&out.allocations) {
            let mine = bidder.value(got) - cost(got);
            for b in 0..1u32 << k {
                if matches!(bidder, Bidder::UnitDemand { .. }) && b.count_ones() > 1 {
                    continue;
                }
                prop_assert!(bidder.value(b) - cost(b) <= mine + 1e-9);
            }
        }
    }
}
