//! Perturbation distributions and learning-rate formulas.

use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// Distribution of each coordinate of `α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Perturbation {
    /// Uniform on `[0, scale]` with `scale = 1/η`.
    PositiveUniform { scale: f64 },
    /// Uniform on `[−scale, scale]` with `scale = ν`.
    SymmetricUniform { scale: f64 },
}

impl Perturbation {
    pub fn positive(scale: f64) -> Result<Self> {
        check_scale(scale)?;
        Ok(Perturbation::PositiveUniform { scale })
    }

    pub fn symmetric(scale: f64) -> Result<Self> {
        check_scale(scale)?;
        Ok(Perturbation::SymmetricUniform { scale })
    }

    /// Positive uniform on `[0, 1/η]`.
    pub fn from_eta(eta: f64) -> Result<Self> {
        if !(eta.is_finite() && eta > 0.0) {
            return Err(Error::Parameter(format!("eta must be positive, got {eta}")));
        }
        Self::positive(1.0 / eta)
    }

    pub fn scale(&self) -> f64 {
        match *self {
            Perturbation::PositiveUniform { scale } | Perturbation::SymmetricUniform { scale } => {
                scale
            }
        }
    }

    pub fn support(&self) -> (f64, f64) {
        match *self {
            Perturbation::PositiveUniform { scale } => (0.0, scale),
            Perturbation::SymmetricUniform { scale } => (-scale, scale),
        }
    }

    pub fn is_positive(&self) -> bool {
        matches!(self, Perturbation::PositiveUniform { .. })
    }

    /// `P(α ∈ [a, b])` for one coordinate.
    pub fn interval_mass(&self, a: f64, b: f64) -> f64 {
        let (lo, hi) = self.support();
        let a = a.max(lo);
        let b = b.min(hi);
        if b <= a {
            0.0
        } else {
            (b - a) / (hi - lo)
        }
    }

    /// Dispersion pair `(ρ, L)` for an interval length `L`: the largest mass on any length-`L` interval.
    pub fn dispersion(&self, length: f64) -> (f64, f64) {
        let (lo, hi) = self.support();
        ((length / (hi - lo)).min(1.0), length)
    }
}

fn check_scale(scale: f64) -> Result<()> {
    if scale.is_finite() && scale > 0.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "perturbation scale must be positive, got {scale}"
        )))
    }
}

/// The seeded generator used for every draw in the crate.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Draws `N` i.i.d. coordinates of `α`.
pub fn sample_alpha(dist: &Perturbation, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng_from_seed(seed);
    let (lo, hi) = dist.support();
    (0..n)
        .map(|_| lo + (hi - lo) * rng.random::<f64>())
        .collect()
}

/// `η = sqrt(δ / ((1 + 2ε) T κ))`.
pub fn eta_for_uniform(kappa: f64, delta: f64, horizon: f64, epsilon: f64) -> Result<f64> {
    if !(kappa > 0.0 && delta > 0.0 && delta <= 1.0 && horizon > 0.0 && epsilon >= 0.0) {
        return Err(Error::Parameter(format!(
            "eta needs kappa, T > 0, delta in (0,1], epsilon >= 0; got kappa={kappa}, delta={delta}, T={horizon}, epsilon={epsilon}"
        )));
    }
    Ok(libm::sqrt(
        delta / ((1.0 + 2.0 * epsilon) * horizon * kappa),
    ))
}

/// Expected regret bound in normalized units for the positive uniform on `[0, 1/η]`:
/// stability `2TNκρ` with `ρ = η(1+2ε)/δ`, perturbation `N/η`, and `εT`.
pub fn uniform_regret_bound(
    n: usize,
    kappa: f64,
    delta: f64,
    horizon: f64,
    epsilon: f64,
    eta: f64,
) -> f64 {
    let n = n as f64;
    let rho = eta * (1.0 + 2.0 * epsilon) / delta;
    2.0 * horizon * n * kappa * rho + n / eta + epsilon * horizon
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eta_matches_formula() {
        let e = eta_for_uniform(2.0, 1.0, 100.0, 0.0).unwrap();
        assert!((e - libm::sqrt(1.0 / 200.0)).abs() < 1e-15);
        let e = eta_for_uniform(4.0, 0.25, 400.0, 0.1).unwrap();
        assert!((e - 0.011_410_9).abs() < 1e-6);
        assert!(eta_for_uniform(2.0, 0.0, 100.0, 0.0).is_err());
    }

    #[test]
    fn draws_respect_support_and_seed() {
        let d = Perturbation::positive(10.0).unwrap();
        let a = sample_alpha(&d, 500, 3);
        assert!(a.iter().all(|v| (0.0..=10.0).contains(v)));
        assert_eq!(a, sample_alpha(&d, 500, 3));
        let s = Perturbation::symmetric(2.0).unwrap();
        assert!(sample_alpha(&s, 500, 3)
            .iter()
            .all(|v| (-2.0..=2.0).contains(v)));
    }

    #[test]
    fn positive_uniform_mean_within_three_standard_errors() {
        let scale = 10.0;
        let a = sample_alpha(&Perturbation::positive(scale).unwrap(), 1000, 11);
        let mean = a.iter().sum::<f64>() / 1000.0;
        let se = scale / libm::sqrt(12.0) / libm::sqrt(1000.0);
        assert!((mean - scale / 2.0).abs() <= 3.0 * se);
    }

    #[test]
    fn interval_mass_is_eta_times_length() {
        let eta = 0.125;
        let d = Perturbation::from_eta(eta).unwrap();
        for (a, l) in [(0.0, 1.0), (2.5, 3.0), (5.0, 3.0)] {
            assert!((d.interval_mass(a, a + l) - eta * l).abs() < 1e-12);
        }
        assert_eq!(d.interval_mass(-3.0, -1.0), 0.0);
        assert!(Perturbation::positive(0.0).is_err());
    }
}
