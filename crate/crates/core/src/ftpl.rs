//! Generalized FTPL runners.
//!
//! All runners work in raw payoff units. The normalized objective
//! `Σ g(x, y_τ) + α · Γ_x` with `g = (f − offset) / R` has the same argmax as
//! `Σ f(x, y_τ) + R α · Γ_x`, so the perturbation is scaled by `R` and oracle
//! accuracy `ε` becomes `R ε`.

use alloc::format;
use alloc::vec::Vec;

use crate::dataset::view_objective;
use crate::env::{AdversarySequence, Environment};
use crate::oracles::Oracle;
use crate::translation::{TranslationMatrix, TranslationSpec};
use crate::util::{dot, first_argmax};
use crate::{Error, Result};

/// One round of play.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Round {
    pub action: usize,
    /// Adversary id within the sequence pool.
    pub adversary: usize,
    pub payoff: f64,
    /// Perturbed objective of the chosen action as seen by the chooser.
    pub objective: f64,
}

/// Record of a complete run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub horizon: usize,
    pub rounds: Vec<Round>,
    pub alpha: Vec<f64>,
    /// Normalized accuracy: the chooser is `ε`-optimal on the normalized objective.
    pub epsilon: f64,
    /// The leader after all `T` rounds, used for the stability term.
    pub final_action: usize,
}

impl RunTrace {
    pub fn actions(&self) -> impl Iterator<Item = usize> + '_ {
        self.rounds.iter().map(|r| r.action)
    }

    pub fn total_payoff(&self) -> f64 {
        self.rounds.iter().map(|r| r.payoff).sum()
    }
}

fn check_shapes<E: Environment>(env: &E, matrix: &TranslationMatrix, alpha: &[f64]) -> Result<()> {
    if env.num_actions() == 0 {
        return Err(Error::Configuration("environment has no actions".into()));
    }
    if matrix.num_rows() != env.num_actions() {
        return Err(Error::Configuration(format!(
            "translation matrix has {} rows for {} actions",
            matrix.num_rows(),
            env.num_actions()
        )));
    }
    if alpha.len() != matrix.num_columns() {
        return Err(Error::Configuration(format!(
            "alpha has {} entries for {} columns",
            alpha.len(),
            matrix.num_columns()
        )));
    }
    Ok(())
}

/// Explicit FTPL by enumeration: plays the exact leader of `Σ_{τ<t} f(x, y_τ) + R α · Γ_x`.
///
/// `epsilon` is only recorded; the exact leader is `ε`-optimal for any `ε ≥ 0`.
pub fn run_ftpl_explicit<E: Environment>(
    env: &E,
    matrix: &TranslationMatrix,
    alpha: &[f64],
    epsilon: f64,
    sequence: &AdversarySequence<E::Adversary>,
) -> Result<RunTrace> {
    check_shapes(env, matrix, alpha)?;
    let range = env.payoff_scale().range;
    let n = env.num_actions();
    let mut objective: Vec<f64> = (0..n).map(|x| range * dot(alpha, matrix.row(x))).collect();
    let mut rounds = Vec::with_capacity(sequence.horizon());
    for t in 0..sequence.horizon() {
        let x = first_argmax(objective.iter().copied()).expect("nonempty action set");
        let y = sequence.get(t);
        rounds.push(Round {
            action: x,
            adversary: sequence.id(t),
            payoff: env.payoff(x, y),
            objective: objective[x],
        });
        for (a, o) in objective.iter_mut().enumerate() {
            *o += env.payoff(a, y);
        }
    }
    let final_action = first_argmax(objective.iter().copied()).expect("nonempty action set");
    Ok(RunTrace {
        horizon: sequence.horizon(),
        rounds,
        alpha: alpha.to_vec(),
        epsilon,
        final_action,
    })
}

/// Oracle FTPL: each round asks the oracle for `Opt(history ∪ ⋃_j α_j S_j, 1/√T)`.
///
/// Requires `α ≥ 0`; use [`run_oracle_ftpl_signed`] for symmetric perturbations.
pub fn run_oracle_ftpl<E, O>(
    env: &E,
    spec: &TranslationSpec<E::Adversary>,
    alpha: &[f64],
    oracle: &O,
    sequence: &AdversarySequence<E::Adversary>,
) -> Result<RunTrace>
where
    E: Environment,
    O: Oracle<E> + ?Sized,
{
    if let Some(a) = alpha.iter().find(|a| **a < 0.0) {
        return Err(Error::Configuration(format!(
            "negative perturbation {a} needs negative datasets; use the signed runner"
        )));
    }
    run_with_oracle(env, spec, alpha, oracle, sequence)
}

/// Oracle FTPL with signed perturbations: column `j` contributes `|α_j| S_j^−` when `α_j < 0` and `α_j S_j` otherwise.
pub fn run_oracle_ftpl_signed<E, O>(
    env: &E,
    spec: &TranslationSpec<E::Adversary>,
    alpha: &[f64],
    oracle: &O,
    sequence: &AdversarySequence<E::Adversary>,
) -> Result<RunTrace>
where
    E: Environment,
    O: Oracle<E> + ?Sized,
{
    if spec.negative_datasets.is_none() {
        return Err(Error::Configuration(
            "signed runner needs negative datasets in the translation spec".into(),
        ));
    }
    run_with_oracle(env, spec, alpha, oracle, sequence)
}

/// Perturbation part of the oracle input, in raw units. Columns with `α_j = 0` are omitted.
pub fn perturbation_dataset<'a, Y>(
    spec: &'a TranslationSpec<Y>,
    alpha: &[f64],
    range: f64,
) -> Vec<(f64, &'a Y)> {
    let mut data = Vec::new();
    for (j, &a) in alpha.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        let column = if a < 0.0 {
            &spec.negative_datasets.as_ref().expect("checked by caller")[j]
        } else {
            &spec.datasets[j]
        };
        let scale = range * a.abs();
        data.extend(column.entries.iter().map(|(w, y)| (scale * w, y)));
    }
    data
}

fn run_with_oracle<E, O>(
    env: &E,
    spec: &TranslationSpec<E::Adversary>,
    alpha: &[f64],
    oracle: &O,
    sequence: &AdversarySequence<E::Adversary>,
) -> Result<RunTrace>
where
    E: Environment,
    O: Oracle<E> + ?Sized,
{
    check_shapes(env, &spec.matrix, alpha)?;
    let horizon = sequence.horizon();
    let epsilon = if horizon == 0 {
        0.0
    } else {
        1.0 / libm::sqrt(horizon as f64)
    };
    let range = env.payoff_scale().range;
    let raw_eps = range * epsilon;

    let mut data = perturbation_dataset(spec, alpha, range);
    data.reserve(horizon);
    let n = env.num_actions();
    let mut rounds = Vec::with_capacity(horizon);
    for t in 0..horizon {
        let x = oracle.optimize(env, &data, raw_eps)?;
        if x >= n {
            return Err(Error::Oracle(format!("oracle returned action {x} of {n}")));
        }
        let y = sequence.get(t);
        rounds.push(Round {
            action: x,
            adversary: sequence.id(t),
            payoff: env.payoff(x, y),
            objective: view_objective(env, &data, x),
        });
        data.push((1.0, y));
    }
    let final_action = oracle.optimize(env, &data, raw_eps)?;
    Ok(RunTrace {
        horizon,
        rounds,
        alpha: alpha.to_vec(),
        epsilon,
        final_action,
    })
}
