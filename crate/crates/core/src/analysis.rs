//! Regret accounting for finished runs.

use alloc::format;

use crate::env::{AdversarySequence, Environment};
use crate::ftpl::RunTrace;
use crate::translation::TranslationMatrix;
use crate::util::{dot, first_argmax};
use crate::{Error, Result};

/// Regret of a run and the three terms that bound it. All values are raw payoff units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceAnalysis {
    pub regret: f64,
    pub c_regret: f64,
    /// `Σ_t f(x_{t+1}, y_t) − f(x_t, y_t)` with `x_{T+1}` the final leader.
    pub stability_term: f64,
    /// `R α · (Γ_{x_1} − Γ_{x*})` with `x*` the best action in hindsight.
    pub perturbation_term: f64,
    /// `R ε T`.
    pub error_term: f64,
    /// `#{t ≤ T : x_{t+1} ≠ x_t}`, counting the final leader.
    pub switch_count: usize,
    pub best_action: usize,
    pub best_cumulative: f64,
    pub realized: f64,
}

impl TraceAnalysis {
    pub fn decomposition_bound(&self) -> f64 {
        self.stability_term + self.perturbation_term + self.error_term
    }

    /// `regret ≤ stability + perturbation + εT` up to `tol`.
    pub fn decomposition_holds(&self, tol: f64) -> bool {
        self.regret <= self.decomposition_bound() + tol
    }
}

/// Computes regret against the best fixed action by enumeration.
///
/// `c` scales the benchmark in `c_regret`; pass 1 for ordinary regret.
pub fn analyze_trace<E: Environment>(
    trace: &RunTrace,
    env: &E,
    matrix: &TranslationMatrix,
    sequence: &AdversarySequence<E::Adversary>,
    c: f64,
) -> Result<TraceAnalysis> {
    if trace.rounds.len() != sequence.horizon() || trace.horizon != sequence.horizon() {
        return Err(Error::Input(format!(
            "trace has {} rounds, sequence has {}",
            trace.rounds.len(),
            sequence.horizon()
        )));
    }
    if matrix.num_rows() != env.num_actions() || matrix.num_columns() != trace.alpha.len() {
        return Err(Error::Input(
            "translation matrix does not match trace or environment".into(),
        ));
    }
    let cumulative = sequence.cumulative_payoffs(env);
    let best_action = first_argmax(cumulative.iter().copied())
        .ok_or_else(|| Error::Input("environment has no actions".into()))?;
    let best_cumulative = cumulative[best_action];
    let realized = trace.total_payoff();
    let range = env.payoff_scale().range;

    let mut stability = 0.0;
    let mut switches = 0;
    for (t, round) in trace.rounds.iter().enumerate() {
        let next = trace
            .rounds
            .get(t + 1)
            .map_or(trace.final_action, |r| r.action);
        if next != round.action {
            switches += 1;
            stability += env.payoff(next, sequence.get(t)) - round.payoff;
        }
    }
    let perturbation_term = match trace.rounds.first() {
        Some(first) => {
            range
                * (dot(&trace.alpha, matrix.row(first.action))
                    - dot(&trace.alpha, matrix.row(best_action)))
        }
        None => 0.0,
    };
    Ok(TraceAnalysis {
        regret: best_cumulative - realized,
        c_regret: c * best_cumulative - realized,
        stability_term: stability,
        perturbation_term,
        error_term: range * trace.epsilon * trace.horizon as f64,
        switch_count: switches,
        best_action,
        best_cumulative,
        realized,
    })
}
