#![allow(dead_code)]

use gftpl_core::envs::multiunit::MultiUnitProfile;
use gftpl_core::envs::vcg::BidProfile;
use gftpl_core::perturbation::rng_from_seed;
use gftpl_core::AdversarySequence;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rng_from_seed(seed)
}

/// Values drawn from the half-grid `{0, 1/(2m), …, 1}`.
pub fn grid_profile(rng: &mut ChaCha8Rng, n: usize, m: u32) -> BidProfile {
    BidProfile::new(
        (0..n)
            .map(|_| rng.random_range(0..=2 * m) as f64 / (2 * m) as f64)
            .collect(),
    )
}

pub fn uniform_profile(rng: &mut ChaCha8Rng, n: usize) -> BidProfile {
    BidProfile::new((0..n).map(|_| rng.random::<f64>()).collect())
}

pub fn grid_sequence(seed: u64, n: usize, m: u32, horizon: usize) -> AdversarySequence<BidProfile> {
    let mut r = rng(seed);
    AdversarySequence::from_actions((0..horizon).map(|_| grid_profile(&mut r, n, m)).collect())
}

/// Random marginals rescaled so each bidder's total value is a uniform draw in `[0, 1]`.
pub fn random_multiunit(rng: &mut ChaCha8Rng, n: usize, s: usize) -> MultiUnitProfile {
    let marginals: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let raw: Vec<f64> = (0..s).map(|_| rng.random::<f64>()).collect();
            let total: f64 = raw.iter().sum::<f64>().max(1e-12);
            let scale = rng.random::<f64>() / total;
            raw.iter().map(|x| x * scale).collect()
        })
        .collect();
    MultiUnitProfile::from_marginals(&marginals).unwrap()
}

/// VCG revenue computed by sorting, independent of the library's rank-based version.
pub fn naive_vcg_revenue(reserves: &[f64], values: &[f64], units: usize) -> f64 {
    let mut q: Vec<(f64, usize)> = (0..values.len())
        .filter(|&i| values[i] >= reserves[i])
        .map(|i| (values[i], i))
        .collect();
    q.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    let threshold = if q.len() > units { q[units].0 } else { 0.0 };
    q.iter()
        .take(units)
        .map(|&(_, i)| reserves[i].max(threshold))
        .sum()
}

/// Every allocation of `s` units among `n` bidders, by brute force over `(s+1)^n` vectors.
pub fn brute_allocations(n: usize, s: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let total = (s + 1).pow(n as u32);
    for mut code in 0..total {
        let mut q = vec![0u32; n];
        for i in (0..n).rev() {
            q[i] = (code % (s + 1)) as u32;
            code /= s + 1;
        }
        if q.iter().sum::<u32>() as usize == s {
            out.push(q);
        }
    }
    out.sort();
    out
}
