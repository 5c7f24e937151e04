//! Adversary sequence generators and stochastic benchmarks.

use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use crate::env::{AdversarySequence, Environment};
use crate::perturbation::rng_from_seed;
use crate::util::first_argmax;
use crate::{Error, Result};

/// Finite-support distribution over adversary actions.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteDistribution<Y> {
    support: Vec<Y>,
    probs: Vec<f64>,
    cumulative: Vec<f64>,
}

impl<Y> FiniteDistribution<Y> {
    pub fn new(support: Vec<Y>, probs: Vec<f64>) -> Result<Self> {
        if support.is_empty() || support.len() != probs.len() {
            return Err(Error::Parameter(
                "distribution needs one probability per support point".into(),
            ));
        }
        if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::Parameter("probabilities must be nonnegative".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Parameter(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        let mut acc = 0.0;
        let cumulative = probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Ok(FiniteDistribution {
            support,
            probs,
            cumulative,
        })
    }

    pub fn uniform(support: Vec<Y>) -> Result<Self> {
        let n = support.len();
        Self::new(support, alloc::vec![1.0 / n.max(1) as f64; n])
    }

    pub fn support(&self) -> &[Y] {
        &self.support
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        self.cumulative
            .iter()
            .position(|&c| u < c)
            .unwrap_or(self.support.len() - 1)
    }
}

/// How the adversary produces its sequence.
#[derive(Debug, Clone, PartialEq)]
pub enum AdversaryModel<Y> {
    /// A fixed list played in order.
    Scripted(Vec<Y>),
    /// `T` i.i.d. draws from `F`.
    Iid {
        dist: FiniteDistribution<Y>,
        horizon: usize,
    },
    /// `y_1 ~ F`; afterwards keep `y_{t−1}` with probability `ρ`, else redraw from `F`.
    Sticky {
        dist: FiniteDistribution<Y>,
        rho: f64,
        horizon: usize,
    },
}

/// Deterministic given `seed`. Ids in the returned sequence index the support (or script).
pub fn generate<Y: Clone>(model: &AdversaryModel<Y>, seed: u64) -> Result<AdversarySequence<Y>> {
    let mut rng = rng_from_seed(seed);
    match model {
        AdversaryModel::Scripted(ys) => Ok(AdversarySequence::from_actions(ys.clone())),
        AdversaryModel::Iid { dist, horizon } => {
            let order = (0..*horizon).map(|_| dist.draw(&mut rng)).collect();
            AdversarySequence::new(dist.support.clone(), order)
        }
        AdversaryModel::Sticky { dist, rho, horizon } => {
            if !(0.5..1.0).contains(rho) {
                return Err(Error::Parameter(format!(
                    "stickiness must lie in [0.5, 1), got {rho}"
                )));
            }
            let mut order = Vec::with_capacity(*horizon);
            for t in 0..*horizon {
                let keep = t > 0 && rng.random::<f64>() < *rho;
                let next = if keep {
                    order[t - 1]
                } else {
                    dist.draw(&mut rng)
                };
                order.push(next);
            }
            AdversarySequence::new(dist.support.clone(), order)
        }
    }
}

/// `(1 − ρ)² / 8`, a lower bound on the spectral gap of the sticky chain.
pub fn spectral_gap_lower_bound(rho: f64) -> Result<f64> {
    if !(0.5..1.0).contains(&rho) {
        return Err(Error::Parameter(format!(
            "stickiness must lie in [0.5, 1), got {rho}"
        )));
    }
    Ok((1.0 - rho) * (1.0 - rho) / 8.0)
}

/// Best action against `F` in expectation and its expected payoff. Exact by enumeration.
pub fn stochastic_benchmark<E: Environment>(
    env: &E,
    dist: &FiniteDistribution<E::Adversary>,
) -> Result<(usize, f64)> {
    let values: Vec<f64> = (0..env.num_actions())
        .map(|x| {
            dist.support
                .iter()
                .zip(&dist.probs)
                .map(|(y, p)| p * env.payoff(x, y))
                .sum()
        })
        .collect();
    let best = first_argmax(values.iter().copied())
        .ok_or_else(|| Error::Input("environment has no actions".into()))?;
    Ok((best, values[best]))
}

/// Dependence structure assumed by [`convergence_bound`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConvergenceMode {
    Iid,
    /// Stationary reversible chain with spectral gap at least `gamma`.
    Markov {
        gamma: f64,
    },
}

/// Gap between the benchmark and the average payoff that holds with probability `1 − δ`,
/// for payoffs in `[0, 1]`: a concentration term plus `regret / T`.
pub fn convergence_bound(
    regret: f64,
    horizon: usize,
    delta: f64,
    mode: ConvergenceMode,
) -> Result<f64> {
    if horizon == 0 || !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::Parameter(format!(
            "need T > 0 and delta in (0, 1]; got T={horizon}, delta={delta}"
        )));
    }
    let t = horizon as f64;
    let log_term = libm::log(2.0 / delta);
    let concentration = match mode {
        ConvergenceMode::Iid => libm::sqrt(log_term / (2.0 * t)),
        ConvergenceMode::Markov { gamma } => {
            if gamma.is_nan() || gamma <= 0.0 {
                return Err(Error::Parameter(format!(
                    "spectral gap must be positive, got {gamma}"
                )));
            }
            libm::sqrt(14.0 * log_term / (gamma * t))
        }
    };
    Ok(concentration + regret / t)
}
