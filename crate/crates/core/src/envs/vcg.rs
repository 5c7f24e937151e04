//! s-unit VCG auctions with bidder-specific reserves.
//!
//! Reserves in the discretized class are `z/m` with `z ∈ {1..m}`. Column
//! `(i, β)` of the translation matrix is bit `β` (most significant first) of
//! `z_i mod 2^B`, `B = ⌈log₂ m⌉`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::dataset::WeightedDataset;
use crate::env::{Environment, PayoffScale};
use crate::translation::{TranslationMatrix, TranslationSpec};
use crate::{Error, Result};

/// Single-parameter values, one per bidder, each in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BidProfile {
    pub values: Vec<f64>,
}

impl BidProfile {
    pub fn new(values: Vec<f64>) -> Self {
        BidProfile { values }
    }

    /// `h · e_i` scaled: bidder `i` has value `value`, everyone else 0.
    pub fn single(n: usize, i: usize, value: f64) -> Self {
        let mut values = vec![0.0; n];
        values[i] = value;
        BidProfile { values }
    }
}

/// Winners and per-bidder payments of one auction.
#[derive(Debug, Clone, PartialEq)]
pub struct VcgOutcome {
    pub winners: Vec<bool>,
    pub payments: Vec<f64>,
}

impl VcgOutcome {
    pub fn revenue(&self) -> f64 {
        self.payments.iter().fold(0.0, |a, b| a + b)
    }
}

// Position of bidder i among qualifiers: higher value first, then smaller index.
fn rank(reserves: &[f64], bids: &[f64], i: usize) -> usize {
    (0..bids.len())
        .filter(|&j| bids[j] >= reserves[j])
        .filter(|&j| bids[j] > bids[i] || (bids[j] == bids[i] && j < i))
        .count()
}

fn threshold(reserves: &[f64], bids: &[f64], units: usize) -> f64 {
    (0..bids.len())
        .find(|&j| bids[j] >= reserves[j] && rank(reserves, bids, j) == units)
        .map_or(0.0, |j| bids[j])
}

/// Full outcome: qualifiers bid at least their reserve, the top `s` win, and each winner pays
/// `max(r_i, b)` where `b` is the `(s+1)`-th highest qualifying bid (0 if none).
pub fn vcg_outcome(reserves: &[f64], bids: &[f64], units: usize) -> VcgOutcome {
    let n = bids.len();
    let b = threshold(reserves, bids, units);
    let mut winners = vec![false; n];
    let mut payments = vec![0.0; n];
    for i in 0..n {
        if bids[i] >= reserves[i] && rank(reserves, bids, i) < units {
            winners[i] = true;
            payments[i] = reserves[i].max(b);
        }
    }
    VcgOutcome { winners, payments }
}

/// Revenue of [`vcg_outcome`] without allocating.
pub fn vcg_revenue(reserves: &[f64], values: &[f64], units: usize) -> f64 {
    let b = threshold(reserves, values, units);
    (0..values.len())
        .filter(|&i| values[i] >= reserves[i] && rank(reserves, values, i) < units)
        .map(|i| reserves[i].max(b))
        .fold(0.0, |a, b| a + b)
}

/// Maps continuous reserves into the grid: below `1/m` goes up to `1/m`, the rest round down.
pub fn round_reserves(reserves: &[f64], m: u32) -> Vec<f64> {
    reserves
        .iter()
        .map(|&r| grid_level(r, m) as f64 / m as f64)
        .collect()
}

/// `max(1, ⌊m r⌋)`, tolerant of values that sit on the grid up to float error.
pub(crate) fn grid_level(r: f64, m: u32) -> u32 {
    let z = libm::floor(r * m as f64 + 1e-9);
    (z.max(1.0) as u32).min(m)
}

/// `⌈log₂ m⌉` for `m ≥ 2`.
pub fn bits_for(m: u32) -> u32 {
    u32::BITS - (m - 1).leading_zeros()
}

/// Bit `beta` (0 = most significant) of `z mod 2^B`.
pub fn code_bit(z: u32, beta: u32, bits: u32) -> f64 {
    ((z >> (bits - 1 - beta)) & 1) as f64
}

/// Weights `w_1..w_m` such that `Σ_{h≥z} (z/m) w_h − c(z)` is constant in `z ∈ {1..m}`.
///
/// Requires `|c(z) − c(z−1)| ≤ 1`; all weights are then nonnegative.
pub fn threshold_weights(m: u32, column: impl Fn(u32) -> f64) -> Vec<f64> {
    let mf = m as f64;
    let diff = |z: u32| mf * (column(z) - column(z - 1));
    let mut w = vec![0.0; m as usize + 1];
    w[m as usize] = (2..=m).map(diff).fold(0.0, f64::max);
    let mut tail = w[m as usize];
    for z in (2..=m).rev() {
        let wz = (tail - diff(z)) / (z - 1) as f64;
        w[z as usize - 1] = wz;
        tail += wz;
    }
    w.remove(0);
    w
}

/// The discretized class `I_m` for `n` bidders and `s` units.
#[derive(Debug, Clone, PartialEq)]
pub struct VcgEnv {
    n: usize,
    m: u32,
    units: usize,
    reserves: Vec<Vec<f64>>,
}

impl VcgEnv {
    pub fn new(n: usize, m: u32, units: usize) -> Result<Self> {
        if n == 0 || m < 2 || units == 0 {
            return Err(Error::Parameter(format!(
                "VCG class needs n >= 1, m >= 2, s >= 1; got n={n}, m={m}, s={units}"
            )));
        }
        let count = (m as usize)
            .checked_pow(n as u32)
            .filter(|c| *c <= 1 << 24)
            .ok_or_else(|| Error::Parameter(format!("m^n too large for n={n}, m={m}")))?;
        let reserves = (0..count)
            .map(|x| {
                Self::levels_of(x, n, m)
                    .iter()
                    .map(|&z| z as f64 / m as f64)
                    .collect()
            })
            .collect();
        Ok(VcgEnv {
            n,
            m,
            units,
            reserves,
        })
    }

    fn levels_of(mut x: usize, n: usize, m: u32) -> Vec<u32> {
        let mut z = vec![0; n];
        for i in (0..n).rev() {
            z[i] = (x % m as usize) as u32 + 1;
            x /= m as usize;
        }
        z
    }

    pub fn bidders(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn units(&self) -> usize {
        self.units
    }

    /// Reserve levels `z_i = m r_i` of action `x`.
    pub fn levels(&self, x: usize) -> Vec<u32> {
        Self::levels_of(x, self.n, self.m)
    }

    pub fn reserves(&self, x: usize) -> &[f64] {
        &self.reserves[x]
    }

    /// Action index of a level vector, bidder 0 most significant.
    pub fn action_of(&self, levels: &[u32]) -> Option<usize> {
        if levels.len() != self.n || levels.iter().any(|&z| z == 0 || z > self.m) {
            return None;
        }
        Some(
            levels
                .iter()
                .fold(0, |acc, &z| acc * self.m as usize + (z - 1) as usize),
        )
    }

    pub fn bits(&self) -> u32 {
        bits_for(self.m)
    }
}

impl Environment for VcgEnv {
    type Adversary = BidProfile;

    fn num_actions(&self) -> usize {
        self.reserves.len()
    }

    fn payoff(&self, action: usize, profile: &BidProfile) -> f64 {
        vcg_revenue(&self.reserves[action], &profile.values, self.units)
    }

    fn payoff_scale(&self) -> PayoffScale {
        PayoffScale {
            offset: 0.0,
            range: self.n.min(self.units) as f64,
        }
    }
}

/// Binary-encoding matrix with `n ⌈log₂ m⌉` columns, datasets on `(h/m) e_i`, and negative
/// datasets from the complemented bits.
pub fn build_gamma_vcg(env: &VcgEnv) -> Result<TranslationSpec<BidProfile>> {
    let (n, m, bits) = (env.n, env.m, env.bits());
    let rows: Vec<Vec<f64>> = (0..env.num_actions())
        .map(|x| {
            let z = env.levels(x);
            (0..n)
                .flat_map(|i| (0..bits).map(move |b| (i, b)))
                .map(|(i, b)| code_bit(z[i], b, bits))
                .collect()
        })
        .collect();
    let matrix = TranslationMatrix::from_rows(&rows)?;
    let column_datasets = |complement: bool| -> Vec<WeightedDataset<BidProfile>> {
        let mut out = Vec::new();
        for i in 0..n {
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
                    .map(|(h, w)| (w, BidProfile::single(n, i, (h + 1) as f64 / m as f64)))
                    .collect();
                out.push(WeightedDataset::new(entries));
            }
        }
        out
    };
    TranslationSpec::new(matrix, column_datasets(false), Some(column_datasets(true)))
}
