//! Offline optimization oracles.

use alloc::format;
use alloc::vec::Vec;

use crate::dataset::view_objective;
use crate::env::Environment;
use crate::util::first_argmax;
use crate::{Error, Result};

/// Guarantee an oracle provides.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleKind {
    /// Within additive `ε` of the optimum.
    Exact,
    /// At least `C` times the optimum.
    Approx(f64),
}

/// Maximizes `Σ w f(x, y)` over the environment's actions.
pub trait Oracle<E: Environment> {
    fn optimize(&self, env: &E, data: &[(f64, &E::Adversary)], epsilon: f64) -> Result<usize>;

    fn kind(&self) -> OracleKind {
        OracleKind::Exact
    }
}

/// Exact argmax by enumerating every action; ties go to the smallest index.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactEnumOracle;

impl<E: Environment> Oracle<E> for ExactEnumOracle {
    fn optimize(&self, env: &E, data: &[(f64, &E::Adversary)], _epsilon: f64) -> Result<usize> {
        enumerate_argmax(env, data)
    }
}

pub(crate) fn enumerate_argmax<E: Environment>(
    env: &E,
    data: &[(f64, &E::Adversary)],
) -> Result<usize> {
    let n = env.num_actions();
    if n == 0 {
        return Err(Error::Oracle("empty action space".into()));
    }
    let values: Vec<f64> = (0..n).map(|x| view_objective(env, data, x)).collect();
    Ok(first_argmax(values.iter().copied()).expect("nonempty"))
}

/// Exact maximizer of `Σ w f(x, y)` for nonnegative integer weights.
pub trait IntegralOracle<E: Environment> {
    fn optimize_integral(&self, env: &E, data: &[(u64, &E::Adversary)]) -> Result<usize>;
}

/// Integral oracle by enumeration.
#[derive(Debug, Clone, Copy, Default)]
pub struct IntegralEnumOracle;

impl<E: Environment> IntegralOracle<E> for IntegralEnumOracle {
    fn optimize_integral(&self, env: &E, data: &[(u64, &E::Adversary)]) -> Result<usize> {
        let n = env.num_actions();
        if n == 0 {
            return Err(Error::Oracle("empty action space".into()));
        }
        let values: Vec<f64> = (0..n)
            .map(|x| data.iter().map(|(w, y)| *w as f64 * env.payoff(x, y)).sum())
            .collect();
        Ok(first_argmax(values.iter().copied()).expect("nonempty"))
    }
}

/// Maps `(w, y)` to `(⌊w |S| / ε⌋, y)`.
///
/// An exact optimum of the result is `ε`-optimal on the input when payoffs lie in `[0, 1]`.
pub fn integral_wrap<Y: Clone>(data: &[(f64, Y)], epsilon: f64) -> Result<Vec<(u64, Y)>> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::Parameter(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let factor = data.len() as f64 / epsilon;
    data.iter()
        .map(|(w, y)| {
            if !(w.is_finite() && *w >= 0.0) {
                return Err(Error::Oracle(format!(
                    "weight {w} is not a nonnegative finite real"
                )));
            }
            // Grid multiples that land just below an integer after scaling still map to it.
            Ok((libm::floor(w * factor + 1e-9) as u64, y.clone()))
        })
        .collect()
}

/// Real-weighted oracle built from an integral one by [`integral_wrap`].
///
/// `epsilon` is in raw payoff units; the wrap uses `epsilon / R` so the loss is at most `epsilon`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ViaIntegral<O>(pub O);

impl<E: Environment, O: IntegralOracle<E>> Oracle<E> for ViaIntegral<O> {
    fn optimize(&self, env: &E, data: &[(f64, &E::Adversary)], epsilon: f64) -> Result<usize> {
        let range = env.payoff_scale().range;
        let wrapped = integral_wrap(data, epsilon / range)?;
        self.0.optimize_integral(env, &wrapped)
    }
}

/// True iff the oracle's answer reaches `C · max − 1e-9` on `data`.
pub fn capprox_guarantee_check<E, O>(
    oracle: &O,
    env: &E,
    data: &[(f64, &E::Adversary)],
    c: f64,
) -> Result<bool>
where
    E: Environment,
    O: Oracle<E> + ?Sized,
{
    let x = oracle.optimize(env, data, 0.0)?;
    let best = enumerate_argmax(env, data)?;
    Ok(view_objective(env, data, x) >= c * view_objective(env, data, best) - 1e-9)
}
