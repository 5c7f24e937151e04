//! Single-item s-level auctions.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::vcg::BidProfile;
use crate::dataset::WeightedDataset;
use crate::env::{Environment, PayoffScale};
use crate::translation::{TranslationMatrix, TranslationSpec};
use crate::{Error, Result};

/// Per-bidder strictly increasing thresholds `θ^i_0 < … < θ^i_{s−1}` in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelAuction {
    pub thresholds: Vec<Vec<f64>>,
}

impl LevelAuction {
    pub fn new(thresholds: Vec<Vec<f64>>) -> Result<Self> {
        for (i, t) in thresholds.iter().enumerate() {
            if t.is_empty()
                || t.windows(2).any(|w| w[0] >= w[1])
                || t[0] < 0.0
                || t[t.len() - 1] > 1.0
            {
                return Err(Error::Parameter(format!(
                    "thresholds of bidder {i} must be strictly increasing in [0,1]"
                )));
            }
        }
        Ok(LevelAuction { thresholds })
    }

    pub fn revenue(&self, values: &[f64]) -> f64 {
        level_revenue(&self.thresholds, values)
    }

    /// Winner and payment, or `None` when nobody reaches a level.
    pub fn outcome(&self, values: &[f64]) -> Option<(usize, f64)> {
        level_outcome(&self.thresholds, values)
    }
}

/// Index of the largest threshold `≤ v`, or −1.
pub fn level_index(thresholds: &[f64], v: f64) -> i32 {
    thresholds.iter().take_while(|&&t| t <= v).count() as i32 - 1
}

/// Level of a bidder inside an auction; a zero bid does not participate.
fn active_level(thresholds: &[f64], v: f64) -> i32 {
    if v > 0.0 {
        level_index(thresholds, v)
    } else {
        -1
    }
}

/// Highest level wins with ties to the smaller index. The winner pays the threshold of the
/// smallest level that still wins: it must beat earlier bidders strictly and later ones weakly.
/// Bidders with value 0 are absent.
pub fn level_outcome(thresholds: &[Vec<f64>], values: &[f64]) -> Option<(usize, f64)> {
    let mut winner = None;
    let mut top = -1;
    for (i, t) in thresholds.iter().enumerate() {
        let b = active_level(t, values[i]);
        if b > top {
            top = b;
            winner = Some(i);
        }
    }
    let w = winner?;
    let mut need = 0;
    for (j, t) in thresholds.iter().enumerate() {
        let b = active_level(t, values[j]);
        if j < w {
            need = need.max(b + 1);
        } else if j > w {
            need = need.max(b);
        }
    }
    Some((w, thresholds[w][need as usize]))
}

pub fn level_revenue(thresholds: &[Vec<f64>], values: &[f64]) -> f64 {
    level_outcome(thresholds, values).map_or(0.0, |(_, p)| p)
}

/// The class `S_{s,m}` for `n` bidders: every strictly increasing `s`-tuple from `{0, 1/m, …, 1}` per bidder.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelEnv {
    n: usize,
    s: usize,
    m: u32,
    auctions: Vec<LevelAuction>,
}

fn increasing_tuples(s: usize, m: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(s);
    fn rec(start: u32, s: usize, m: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == s {
            out.push(cur.clone());
            return;
        }
        for v in start..=m {
            cur.push(v);
            rec(v + 1, s, m, cur, out);
            cur.pop();
        }
    }
    rec(0, s, m, &mut cur, &mut out);
    out
}

impl LevelEnv {
    pub fn new(n: usize, s: usize, m: u32) -> Result<Self> {
        if n == 0 || s < 1 || (m as usize) + 1 < s {
            return Err(Error::Parameter(format!(
                "level auctions need n >= 1, s >= 1, m + 1 >= s; got n={n}, s={s}, m={m}"
            )));
        }
        let tuples = increasing_tuples(s, m);
        let count = tuples
            .len()
            .checked_pow(n as u32)
            .filter(|c| *c <= 1 << 22)
            .ok_or_else(|| Error::Parameter(format!("class too large for n={n}, s={s}, m={m}")))?;
        let auctions = (0..count)
            .map(|mut x| {
                let mut thresholds = vec![Vec::new(); n];
                for i in (0..n).rev() {
                    thresholds[i] = tuples[x % tuples.len()]
                        .iter()
                        .map(|&z| z as f64 / m as f64)
                        .collect();
                    x /= tuples.len();
                }
                LevelAuction { thresholds }
            })
            .collect();
        Ok(LevelEnv { n, s, m, auctions })
    }

    pub fn bidders(&self) -> usize {
        self.n
    }

    pub fn levels(&self) -> usize {
        self.s
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn auction(&self, x: usize) -> &LevelAuction {
        &self.auctions[x]
    }

    /// Index of an auction, or `None` if it is not in the class.
    pub fn action_of(&self, auction: &LevelAuction) -> Option<usize> {
        self.auctions.iter().position(|a| a == auction)
    }

    /// The distinguishing profiles `e_i + (ℓ/m) e_n` for `i < n`, `ℓ = 0..m`, then `e_n`.
    pub fn distinguishing_profiles(&self) -> Vec<BidProfile> {
        let n = self.n;
        let mut out = Vec::with_capacity((n - 1) * (self.m as usize + 1) + 1);
        for i in 0..n - 1 {
            for l in 0..=self.m {
                let mut v = vec![0.0; n];
                v[i] = 1.0;
                v[n - 1] = l as f64 / self.m as f64;
                out.push(BidProfile::new(v));
            }
        }
        out.push(BidProfile::single(n, n - 1, 1.0));
        out
    }
}

impl Environment for LevelEnv {
    type Adversary = BidProfile;

    fn num_actions(&self) -> usize {
        self.auctions.len()
    }

    fn payoff(&self, action: usize, profile: &BidProfile) -> f64 {
        self.auctions[action].revenue(&profile.values)
    }

    fn payoff_scale(&self) -> PayoffScale {
        PayoffScale::UNIT
    }
}

/// `Γ_{θ,v} = Rev(θ, v)` over the distinguishing profiles, with `S_v = {(1, v)}`.
pub fn build_gamma_sl(env: &LevelEnv) -> Result<TranslationSpec<BidProfile>> {
    let profiles = env.distinguishing_profiles();
    let rows: Vec<Vec<f64>> = (0..env.num_actions())
        .map(|x| profiles.iter().map(|v| env.payoff(x, v)).collect())
        .collect();
    let matrix = TranslationMatrix::from_rows(&rows)?;
    let datasets = profiles
        .into_iter()
        .map(|v| WeightedDataset::new(vec![(1.0, v)]))
        .collect();
    TranslationSpec::new(matrix, datasets, None)
}
