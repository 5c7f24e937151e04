//! Bidding in simultaneous second-price auctions over `k` items.
//!
//! Valuations and bids live on the grid `{0, 1/m, …, 1}` and are stored as integer levels so
//! that the no-overbidding test is exact.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::dataset::WeightedDataset;
use crate::env::{Environment, PayoffScale};
use crate::translation::{TranslationMatrix, TranslationSpec};
use crate::{Error, Result};

/// Bundle values `v(q) = levels[q] / m`, indexed by bitmask, with `v(∅) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct BidderValuation {
    k: usize,
    m: u32,
    levels: Vec<u32>,
}

impl BidderValuation {
    pub fn new(k: usize, m: u32, levels: Vec<u32>) -> Result<Self> {
        if k == 0 || k > 10 || m == 0 {
            return Err(Error::Parameter(format!(
                "valuation needs 1 <= k <= 10 and m >= 1; got k={k}, m={m}"
            )));
        }
        if levels.len() != 1 << k {
            return Err(Error::Input(format!(
                "valuation table has {} entries, expected {}",
                levels.len(),
                1 << k
            )));
        }
        if levels[0] != 0 || levels.iter().any(|&l| l > m) {
            return Err(Error::Input(
                "valuation needs v(empty) = 0 and entries in 0..=m".into(),
            ));
        }
        Ok(BidderValuation { k, m, levels })
    }

    /// `v(q) = Σ_{j∈q} item_levels[j] / m`, capped at 1.
    pub fn additive(m: u32, item_levels: &[u32]) -> Result<Self> {
        let k = item_levels.len();
        let levels = (0..1u32 << k)
            .map(|q| {
                (0..k)
                    .filter(|j| q >> j & 1 == 1)
                    .map(|j| item_levels[j])
                    .sum::<u32>()
                    .min(m)
            })
            .collect();
        Self::new(k, m, levels)
    }

    pub fn items(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn level(&self, bundle: u32) -> u32 {
        self.levels[bundle as usize]
    }

    pub fn value(&self, bundle: u32) -> f64 {
        self.levels[bundle as usize] as f64 / self.m as f64
    }
}

/// Highest competing bid per item, in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdVector {
    pub thresholds: Vec<f64>,
}

/// Items won are those with `b_j > p_j`; utility is `v(q) − p · q`.
pub fn sispa_utility(bid: &[f64], thresholds: &[f64], valuation: &BidderValuation) -> f64 {
    let mut won = 0u32;
    let mut paid = 0.0;
    for (j, (&b, &p)) in bid.iter().zip(thresholds).enumerate() {
        if b > p {
            won |= 1 << j;
            paid += p;
        }
    }
    valuation.value(won) - paid
}

/// All grid bid levels `b` with `Σ_{j∈q} b_j ≤ v(q)` for every bundle `q`.
pub fn enumerate_bid_space(valuation: &BidderValuation) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut b = vec![0u32; valuation.k];
    fn rec(j: usize, b: &mut Vec<u32>, v: &BidderValuation, out: &mut Vec<Vec<u32>>) {
        if j == b.len() {
            out.push(b.clone());
            return;
        }
        for level in 0..=v.m {
            b[j] = level;
            // Bundles whose highest item is j are fully determined now.
            let ok = (0..1u32 << j).all(|low| {
                let q = low | 1 << j;
                (0..=j)
                    .filter(|i| q >> i & 1 == 1)
                    .map(|i| b[i])
                    .sum::<u32>()
                    <= v.level(q)
            });
            if !ok {
                break;
            }
            rec(j + 1, b, v, out);
        }
        b[j] = 0;
    }
    rec(0, &mut b, valuation, &mut out);
    out
}

/// Learner picks a no-overbidding grid bid; adversary picks thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct SispaEnv {
    valuation: BidderValuation,
    bids: Vec<Vec<f64>>,
    levels: Vec<Vec<u32>>,
}

impl SispaEnv {
    pub fn new(valuation: BidderValuation) -> Self {
        let levels = enumerate_bid_space(&valuation);
        let m = valuation.m as f64;
        let bids = levels
            .iter()
            .map(|b| b.iter().map(|&l| l as f64 / m).collect())
            .collect();
        SispaEnv {
            valuation,
            bids,
            levels,
        }
    }

    pub fn valuation(&self) -> &BidderValuation {
        &self.valuation
    }

    pub fn bid(&self, x: usize) -> &[f64] {
        &self.bids[x]
    }

    pub fn bid_levels(&self, x: usize) -> &[u32] {
        &self.levels[x]
    }
}

impl Environment for SispaEnv {
    type Adversary = ThresholdVector;

    fn num_actions(&self) -> usize {
        self.bids.len()
    }

    fn payoff(&self, action: usize, p: &ThresholdVector) -> f64 {
        sispa_utility(&self.bids[action], &p.thresholds, &self.valuation)
    }

    /// Utility lies in `[−k, 1]`.
    fn payoff_scale(&self) -> PayoffScale {
        let k = self.valuation.k as f64;
        PayoffScale {
            offset: -k,
            range: 1.0 + k,
        }
    }
}

/// Weight `w^j_ℓ = (1/m) / (v(e_j) − ℓ/m)` when `ℓ/m < v(e_j)`, else 0.
pub fn sispa_weight(valuation: &BidderValuation, j: usize, l: u32) -> f64 {
    let top = valuation.level(1 << j);
    if l < top {
        1.0 / (top - l) as f64
    } else {
        0.0
    }
}

/// `p^j_ℓ`: threshold `ℓ/m` on item `j` and 1 elsewhere.
pub fn sispa_threshold(k: usize, m: u32, j: usize, l: u32) -> ThresholdVector {
    let mut thresholds = vec![1.0; k];
    thresholds[j] = l as f64 / m as f64;
    ThresholdVector { thresholds }
}

/// `Γ_b = b` with `S_j = {(w^j_ℓ, p^j_ℓ)}_{ℓ<m}`.
pub fn build_gamma_ob(env: &SispaEnv) -> Result<TranslationSpec<ThresholdVector>> {
    let v = &env.valuation;
    let matrix = TranslationMatrix::from_rows(&env.bids)?;
    let datasets = (0..v.k)
        .map(|j| {
            let entries = (0..v.m)
                .map(|l| (sispa_weight(v, j, l), sispa_threshold(v.k, v.m, j, l)))
                .collect();
            WeightedDataset::new(entries)
        })
        .collect();
    TranslationSpec::new(matrix, datasets, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ties_lose_and_strict_wins_pay_threshold() {
        let v = BidderValuation::additive(4, &[2, 2]).unwrap();
        assert_eq!(sispa_utility(&[0.5, 0.25], &[0.5, 0.25], &v), 0.0);
        assert_eq!(sispa_utility(&[0.5, 0.25], &[0.25, 0.25], &v), 0.25);
    }

    #[test]
    fn bid_space_small_cases() {
        let zero = BidderValuation::new(2, 4, vec![0; 4]).unwrap();
        assert_eq!(enumerate_bid_space(&zero), vec![vec![0, 0]]);
        let one = BidderValuation::new(1, 4, vec![0, 2]).unwrap();
        assert_eq!(enumerate_bid_space(&one), vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn weights_follow_formula() {
        let v = BidderValuation::new(1, 4, vec![0, 3]).unwrap();
        let w: Vec<f64> = (0..4).map(|l| sispa_weight(&v, 0, l)).collect();
        assert_eq!(w, vec![1.0 / 3.0, 0.5, 1.0, 0.0]);
    }
}
