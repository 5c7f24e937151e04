//! Invariant checks for a configured environment.

use gftpl_core::contextual::verify_separator;
use gftpl_core::perturbation::rng_from_seed;
use gftpl_core::translation::{all_pairs, pseudo_complexity};
use gftpl_core::{
    analyze_trace, run_ftpl_explicit, run_oracle_ftpl, run_oracle_ftpl_signed, sample_alpha,
    verify_implementability, Environment, OracleKind, RunTrace, TranslationMatrix, TranslationSpec,
};
use rand::Rng;

use crate::config::{AlgorithmKind, ExperimentConfig, OracleChoice};
use crate::error::Result;
use crate::run::{
    sequence, with_experiment, Experiment, ExperimentVisitor, Standard, Transductive,
};

/// Implementability is checked on every pair up to this many actions, on a seeded sample above.
const ALL_PAIRS_LIMIT: usize = 1500;
const SAMPLED_PAIRS: usize = 100_000;
/// Horizon cap for the runs inside `verify`.
const VERIFY_HORIZON: usize = 200;
const TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    fn push(&mut self, name: &str, pass: bool, detail: String) {
        self.checks.push(Check {
            name: name.to_string(),
            pass,
            detail,
        });
    }
}

fn pairs(num_actions: usize) -> Vec<(usize, usize)> {
    if num_actions <= ALL_PAIRS_LIMIT {
        return all_pairs(num_actions);
    }
    let mut rng = rng_from_seed(0);
    (0..SAMPLED_PAIRS)
        .map(|_| {
            (
                rng.random_range(0..num_actions),
                rng.random_range(0..num_actions),
            )
        })
        .collect()
}

fn admissibility(report: &mut VerifyReport, matrix: &TranslationMatrix) {
    let a = matrix.admissibility();
    report.push(
        "admissibility",
        a.is_admissible(),
        format!(
            "kappa {}, delta {:.6}, rows distinct {}",
            a.kappa, a.delta, a.rows_distinct
        ),
    );
}

fn implementability<E: Environment>(
    report: &mut VerifyReport,
    spec: &TranslationSpec<E::Adversary>,
    env: &E,
) {
    let p = pairs(env.num_actions());
    let check = verify_implementability(spec, env, &p);
    report.push(
        "implementability",
        check.holds,
        format!(
            "{} pairs, max deviation {:.2e}, pseudo-complexity {:.3}",
            p.len(),
            check.max_deviation,
            pseudo_complexity(spec)
        ),
    );
}

fn decomposition<X: Experiment>(
    report: &mut VerifyReport,
    x: &X,
    config: &ExperimentConfig,
) -> Result<()> {
    let horizon = config.horizons()?[0].min(VERIFY_HORIZON);
    let seq = sequence(x.pool(), &config.adversary, horizon)?;
    let mut worst = f64::NEG_INFINITY;
    for &seed in &config.seeds {
        let trace = x.play(&seq, seed)?;
        let a = analyze_trace(&trace, x.env(), x.matrix(), &seq, config.c)?;
        worst = worst.max(a.regret - a.decomposition_bound());
    }
    report.push(
        "decomposition",
        worst <= TOL,
        format!(
            "T = {horizon}, {} seeds, max regret minus bound {worst:.3e}",
            config.seeds.len()
        ),
    );
    Ok(())
}

struct Verify<'a> {
    config: &'a ExperimentConfig,
}

impl ExperimentVisitor for Verify<'_> {
    type Output = VerifyReport;

    fn visit<E>(self, x: &Standard<E>) -> Result<VerifyReport>
    where
        E: Environment + Sync,
        E::Adversary: Send + Sync,
    {
        let config = self.config;
        let mut report = VerifyReport::default();
        let (env, spec) = (&x.setting.env, &x.setting.spec);
        admissibility(&mut report, &spec.matrix);
        implementability(&mut report, spec, env);
        let oracle = x.oracle.as_deref().filter(|o| {
            x.algorithm != AlgorithmKind::Explicit
                && config.algorithm.oracle != Some(OracleChoice::Integral)
                && o.kind() == OracleKind::Exact
        });
        if let Some(oracle) = oracle {
            let horizon = config.horizons()?[0].min(VERIFY_HORIZON);
            let seq = sequence(&x.setting.pool, &config.adversary, horizon)?;
            let payoffs = |t: &RunTrace| t.rounds.iter().map(|r| r.payoff).collect::<Vec<_>>();
            let mut same = 0;
            for &seed in &config.seeds {
                let alpha = sample_alpha(&x.perturbation(horizon)?, spec.num_columns(), seed);
                let explicit = run_ftpl_explicit(env, &spec.matrix, &alpha, 0.0, &seq)?;
                let via = if x.algorithm == AlgorithmKind::Signed {
                    run_oracle_ftpl_signed(env, spec, &alpha, oracle, &seq)?
                } else {
                    run_oracle_ftpl(env, spec, &alpha, oracle, &seq)?
                };
                same += usize::from(payoffs(&explicit) == payoffs(&via));
            }
            let n = config.seeds.len();
            report.push(
                "oracle equivalence",
                same == n,
                format!("T = {horizon}, {same} of {n} seeds give identical payoffs"),
            );
        }
        decomposition(&mut report, x, config)?;
        Ok(report)
    }

    fn visit_contextual(self, x: &Transductive) -> Result<VerifyReport> {
        let mut report = VerifyReport::default();
        let s = &x.setting;
        let sep = verify_separator(&s.env.class, &s.transductive_set);
        report.push(
            "separator",
            sep.holds,
            match sep.counterexample {
                Some((a, b)) => format!("policies {a} and {b} agree on the transductive set"),
                None => format!(
                    "{} policies separated by {} contexts",
                    s.env.class.len(),
                    s.transductive_set.len()
                ),
            },
        );
        admissibility(&mut report, &x.extension().matrix);
        implementability(&mut report, x.extension(), &s.env);
        decomposition(&mut report, x, self.config)?;
        Ok(report)
    }
}

/// Admissibility, implementability, oracle equivalence and the per-run regret decomposition.
pub fn verify(config: &ExperimentConfig) -> Result<VerifyReport> {
    with_experiment(config, Verify { config })
}
