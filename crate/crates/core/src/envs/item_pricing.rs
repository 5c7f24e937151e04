//! Envy-free item pricing over `k` items.
//!
//! Bundles are bitmasks with item `ℓ` at bit `ℓ`. Among equal-utility bundles the
//! one whose sorted item list is lexicographically smallest wins.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::vcg::{bits_for, code_bit, grid_level, threshold_weights};
use crate::dataset::WeightedDataset;
use crate::env::{Environment, PayoffScale};
use crate::translation::{TranslationMatrix, TranslationSpec};
use crate::{Error, Result};

const UTILITY_TOL: f64 = 1e-12;

/// One bidder's valuation.
#[derive(Debug, Clone, PartialEq)]
pub enum Bidder {
    /// Values any bundle containing `bundle` at `value`, anything else at 0.
    SingleMinded { bundle: u32, value: f64 },
    /// Wants at most one item; `values[ℓ]` is the value of item `ℓ`.
    UnitDemand { values: Vec<f64> },
}

impl Bidder {
    pub fn value(&self, bundle: u32) -> f64 {
        match self {
            Bidder::SingleMinded {
                bundle: want,
                value,
            } => {
                if bundle & want == *want {
                    *value
                } else {
                    0.0
                }
            }
            Bidder::UnitDemand { values } => {
                if bundle.count_ones() == 1 {
                    values[bundle.trailing_zeros() as usize]
                } else {
                    0.0
                }
            }
        }
    }

    fn considers(&self, bundle: u32) -> bool {
        match self {
            Bidder::SingleMinded { .. } => true,
            Bidder::UnitDemand { .. } => bundle.count_ones() == 1,
        }
    }
}

/// Bidders in arrival order.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinatorialProfile {
    pub bidders: Vec<Bidder>,
}

/// Item supply; `None` is unlimited.
pub type Supply = Vec<Option<u32>>;

/// Bundles each bidder took and the total revenue.
#[derive(Debug, Clone, PartialEq)]
pub struct PricingOutcome {
    pub allocations: Vec<u32>,
    pub revenue: f64,
}

/// Orders bundles by their sorted item lists.
pub fn bundle_lex_cmp(mut a: u32, mut b: u32) -> Ordering {
    loop {
        match (a, b) {
            (0, 0) => return Ordering::Equal,
            (0, _) => return Ordering::Less,
            (_, 0) => return Ordering::Greater,
            _ => {
                let (la, lb) = (a.trailing_zeros(), b.trailing_zeros());
                if la != lb {
                    return la.cmp(&lb);
                }
                a &= a - 1;
                b &= b - 1;
            }
        }
    }
}

fn price_of(prices: &[f64], bundle: u32) -> f64 {
    (0..prices.len())
        .filter(|l| bundle >> l & 1 == 1)
        .map(|l| prices[l])
        .fold(0.0, |a, b| a + b)
}

/// Bidders arrive in order and each takes a feasible utility-maximizing bundle, buying when the
/// best utility is at least 0.
pub fn item_pricing_outcome(
    prices: &[f64],
    supply: &[Option<u32>],
    profile: &CombinatorialProfile,
) -> PricingOutcome {
    let k = prices.len();
    let mut left: Vec<Option<u32>> = supply.to_vec();
    let mut allocations = Vec::with_capacity(profile.bidders.len());
    let mut revenue = 0.0;
    for bidder in &profile.bidders {
        let available = (0..k)
            .filter(|&l| left[l] != Some(0))
            .fold(0u32, |m, l| m | 1 << l);
        let mut best: Option<(u32, f64)> = None;
        for bundle in 1u32..(1 << k) {
            if bundle & !available != 0 || !bidder.considers(bundle) {
                continue;
            }
            let u = bidder.value(bundle) - price_of(prices, bundle);
            best = match best {
                None => Some((bundle, u)),
                Some((b, bu)) => {
                    if u > bu + UTILITY_TOL
                        || (u >= bu - UTILITY_TOL && bundle_lex_cmp(bundle, b).is_lt())
                    {
                        Some((bundle, u))
                    } else {
                        Some((b, bu))
                    }
                }
            };
        }
        match best {
            Some((bundle, u)) if u >= -UTILITY_TOL => {
                for (l, slot) in left.iter_mut().enumerate().take(k) {
                    if bundle >> l & 1 == 1 {
                        if let Some(s) = slot {
                            *s -= 1;
                        }
                    }
                }
                revenue += price_of(prices, bundle);
                allocations.push(bundle);
            }
            _ => allocations.push(0),
        }
    }
    PricingOutcome {
        allocations,
        revenue,
    }
}

/// Bidder model used by [`round_prices`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BidderModel {
    SingleMinded,
    UnitDemand,
}

/// Maps continuous prices onto the grid `{1/m, …, 1}`.
///
/// Unit-demand rounding keeps the discount `a_ℓ − a′_ℓ` nondecreasing along the sorted prices
/// before lifting to `1/m`.
pub fn round_prices(prices: &[f64], m: u32, model: BidderModel) -> Vec<f64> {
    let mf = m as f64;
    match model {
        BidderModel::SingleMinded => prices
            .iter()
            .map(|&a| grid_level(a, m) as f64 / mf)
            .collect(),
        BidderModel::UnitDemand => {
            let mut order: Vec<usize> = (0..prices.len()).collect();
            order.sort_by(|&x, &y| prices[x].total_cmp(&prices[y]).then(x.cmp(&y)));
            let mut out = vec![0.0; prices.len()];
            let mut discount = 0.0;
            for &l in &order {
                let level = libm::floor((prices[l] - discount) * mf + 1e-9).max(0.0);
                let rounded = level / mf;
                discount = prices[l] - rounded;
                out[l] = rounded.max(1.0 / mf);
            }
            out
        }
    }
}

/// The discretized class `P_m` over `k` items with fixed supply.
#[derive(Debug, Clone, PartialEq)]
pub struct ItemPricingEnv {
    k: usize,
    m: u32,
    supply: Supply,
    max_bidders: usize,
    prices: Vec<Vec<f64>>,
}

impl ItemPricingEnv {
    /// `max_bidders` bounds profile size and sets the payoff range.
    pub fn new(k: usize, m: u32, supply: Supply, max_bidders: usize) -> Result<Self> {
        if k == 0 || k > 16 || m < 2 || supply.len() != k || max_bidders == 0 {
            return Err(Error::Parameter(format!(
                "item pricing needs 1 <= k <= 16, m >= 2, {k} supplies and max_bidders >= 1"
            )));
        }
        let count = (m as usize)
            .checked_pow(k as u32)
            .filter(|c| *c <= 1 << 24)
            .ok_or_else(|| Error::Parameter(format!("m^k too large for k={k}, m={m}")))?;
        let prices = (0..count)
            .map(|x| {
                let mut x = x;
                let mut p = vec![0.0; k];
                for l in (0..k).rev() {
                    p[l] = ((x % m as usize) + 1) as f64 / m as f64;
                    x /= m as usize;
                }
                p
            })
            .collect();
        Ok(ItemPricingEnv {
            k,
            m,
            supply,
            max_bidders,
            prices,
        })
    }

    pub fn items(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn supply(&self) -> &[Option<u32>] {
        &self.supply
    }

    pub fn prices(&self, x: usize) -> &[f64] {
        &self.prices[x]
    }

    pub fn levels(&self, x: usize) -> Vec<u32> {
        self.prices[x]
            .iter()
            .map(|a| libm::round(a * self.m as f64) as u32)
            .collect()
    }
}

impl Environment for ItemPricingEnv {
    type Adversary = CombinatorialProfile;

    fn num_actions(&self) -> usize {
        self.prices.len()
    }

    fn payoff(&self, action: usize, profile: &CombinatorialProfile) -> f64 {
        item_pricing_outcome(&self.prices[action], &self.supply, profile).revenue
    }

    fn payoff_scale(&self) -> PayoffScale {
        PayoffScale {
            offset: 0.0,
            range: self.max_bidders as f64,
        }
    }
}

/// Binary encoding of `m a_ℓ`; column datasets use one bidder wanting `{ℓ}` at `h/m`.
pub fn build_gamma_ip(env: &ItemPricingEnv) -> Result<TranslationSpec<CombinatorialProfile>> {
    let (k, m) = (env.k, env.m);
    let bits = bits_for(m);
    let rows: Vec<Vec<f64>> = (0..env.num_actions())
        .map(|x| {
            let z = env.levels(x);
            (0..k)
                .flat_map(|l| (0..bits).map(move |b| (l, b)))
                .map(|(l, b)| code_bit(z[l], b, bits))
                .collect()
        })
        .collect();
    let matrix = TranslationMatrix::from_rows(&rows)?;
    let datasets = |complement: bool| -> Vec<WeightedDataset<CombinatorialProfile>> {
        let mut out = Vec::new();
        for l in 0..k {
            for b in 0..bits {
                let w = threshold_weights(m, |z| {
                    let bit = code_bit(z, b, bits);
                    if complement {
                        1.0 - bit
                    } else {
                        bit
                    }
                });
                let entries = w
                    .into_iter()
                    .enumerate()
                    .map(|(h, w)| {
                        let bidder = Bidder::SingleMinded {
                            bundle: 1 << l,
                            value: (h + 1) as f64 / m as f64,
                        };
                        (
                            w,
                            CombinatorialProfile {
                                bidders: vec![bidder],
                            },
                        )
                    })
                    .collect();
                out.push(WeightedDataset::new(entries));
            }
        }
        out
    };
    TranslationSpec::new(matrix, datasets(false), Some(datasets(true)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequential_unit_demand_example() {
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
    fn lex_order_on_item_lists() {
        assert!(bundle_lex_cmp(0b001, 0b011).is_lt());
        assert!(bundle_lex_cmp(0b011, 0b010).is_lt());
        assert!(bundle_lex_cmp(0b101, 0b011).is_gt());
    }

    #[test]
    fn unit_demand_rounding_examples() {
        assert_eq!(
            round_prices(&[0.25, 0.55], 10, BidderModel::UnitDemand),
            vec![0.2, 0.5]
        );
        assert_eq!(
            round_prices(&[0.19, 0.21], 10, BidderModel::UnitDemand),
            vec![0.1, 0.1]
        );
        assert_eq!(
            round_prices(&[0.02, 0.77], 10, BidderModel::SingleMinded),
            vec![0.1, 0.7]
        );
    }
}
