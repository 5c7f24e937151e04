//! Seeded experiment execution.

use std::path::Path;
use std::time::Instant;

use gftpl_core::adversaries::{generate, AdversaryModel, FiniteDistribution};
use gftpl_core::contextual::{
    q_extension, run_transductive_ftpl, transductive_bound, transductive_nu, Contextual,
    ContextualEnv,
};
use gftpl_core::envs::multiunit::{ExactMultiUnitOracle, MirOracle, MultiUnitEnv};
use gftpl_core::envs::vcg::{BidProfile, VcgEnv};
use gftpl_core::oracles::{IntegralEnumOracle, ViaIntegral};
use gftpl_core::translation::TranslationMatrix;
use gftpl_core::{
    analyze_trace, eta_for_uniform, run_ftpl_explicit, run_oracle_ftpl, run_oracle_ftpl_signed,
    sample_alpha, AdversarySequence, Environment, ExactEnumOracle, Oracle, Perturbation, RunTrace,
    TranslationSpec,
};
use rayon::prelude::*;

use crate::config::{
    AdversaryConfig, AdversaryKind, AlgorithmKind, EnvironmentKind, ExperimentConfig, OracleChoice,
    UnitRange,
};
use crate::error::{HarnessError, Result};
use crate::setting::{self, ContextualSetting, Setting};
use crate::trace::{
    switch_fraction, trace_file_name, write_trace, HorizonSummary, Summary, SummaryRecord, TraceRow,
};

pub type DynOracle<E> = Box<dyn Oracle<E> + Send + Sync>;

/// A configured learner on a built environment.
pub trait Experiment: Sync {
    type Env: Environment + Sync;

    fn env(&self) -> &Self::Env;

    fn pool(&self) -> &[<Self::Env as Environment>::Adversary];

    /// Matrix the regret decomposition is measured against.
    fn matrix(&self) -> &TranslationMatrix;

    fn play(
        &self,
        sequence: &AdversarySequence<<Self::Env as Environment>::Adversary>,
        seed: u64,
    ) -> Result<RunTrace>;

    /// Expected-regret bound in raw units at horizon `T`.
    fn bound(&self, horizon: usize) -> Result<f64>;
}

fn epsilon_for(horizon: usize) -> f64 {
    1.0 / (horizon as f64).sqrt()
}

/// Admissibility constants `(κ, δ)`; errors when the matrix is not admissible.
pub fn constants(matrix: &TranslationMatrix) -> Result<(f64, f64)> {
    let report = matrix.admissibility();
    if !report.is_admissible() {
        return Err(HarnessError::config(
            "environment",
            "translation matrix is not admissible",
        ));
    }
    Ok((report.kappa as f64, report.delta))
}

/// Largest spread `max_x Γ_xj − min_x Γ_xj` over columns.
fn column_spread(matrix: &TranslationMatrix) -> f64 {
    (0..matrix.num_columns())
        .map(|j| {
            let (lo, hi) = matrix
                .rows()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
                    (lo.min(r[j]), hi.max(r[j]))
                });
            hi - lo
        })
        .fold(0.0, f64::max)
}

/// Explicit, oracle and signed runs on a base environment.
pub struct Standard<E: Environment> {
    pub setting: Setting<E>,
    pub algorithm: AlgorithmKind,
    pub oracle: Option<DynOracle<E>>,
    eta: Option<f64>,
    nu: Option<f64>,
    kappa: f64,
    delta: f64,
    spread: f64,
}

impl<E: Environment> Standard<E> {
    pub fn new(
        setting: Setting<E>,
        config: &ExperimentConfig,
        oracle: Option<DynOracle<E>>,
    ) -> Result<Self> {
        let algorithm = config.algorithm.kind;
        if algorithm == AlgorithmKind::Signed && setting.spec.negative_datasets.is_none() {
            return Err(HarnessError::config(
                "algorithm.kind",
                format!(
                    "{} has no negative datasets for signed runs",
                    config.environment.kind.name()
                ),
            ));
        }
        if algorithm != AlgorithmKind::Explicit && oracle.is_none() {
            return Err(HarnessError::config(
                "algorithm.oracle",
                "no oracle available",
            ));
        }
        let (kappa, delta) = constants(&setting.spec.matrix)?;
        let spread = column_spread(&setting.spec.matrix);
        Ok(Standard {
            setting,
            algorithm,
            oracle,
            eta: config.algorithm.eta,
            nu: config.algorithm.nu,
            kappa,
            delta,
            spread,
        })
    }

    /// `η` of the positive uniform; the signed runner defaults to `ν = 1/(2η)`, the same density.
    pub fn eta(&self, horizon: usize) -> Result<f64> {
        match self.eta {
            Some(eta) => Ok(eta),
            None => Ok(eta_for_uniform(
                self.kappa,
                self.delta,
                horizon as f64,
                epsilon_for(horizon),
            )?),
        }
    }

    pub fn nu(&self, horizon: usize) -> Result<f64> {
        match self.nu {
            Some(nu) => Ok(nu),
            None => Ok(0.5 / self.eta(horizon)?),
        }
    }

    pub fn perturbation(&self, horizon: usize) -> Result<Perturbation> {
        Ok(match self.algorithm {
            AlgorithmKind::Signed => Perturbation::symmetric(self.nu(horizon)?)?,
            _ => Perturbation::from_eta(self.eta(horizon)?)?,
        })
    }
}

impl<E> Experiment for Standard<E>
where
    E: Environment + Sync,
    E::Adversary: Sync,
{
    type Env = E;

    fn env(&self) -> &E {
        &self.setting.env
    }

    fn pool(&self) -> &[E::Adversary] {
        &self.setting.pool
    }

    fn matrix(&self) -> &TranslationMatrix {
        &self.setting.spec.matrix
    }

    fn play(&self, sequence: &AdversarySequence<E::Adversary>, seed: u64) -> Result<RunTrace> {
        let horizon = sequence.horizon();
        let spec = &self.setting.spec;
        let alpha = sample_alpha(&self.perturbation(horizon)?, spec.num_columns(), seed);
        let env = &self.setting.env;
        let oracle = || self.oracle.as_deref().expect("checked at construction");
        let trace = match self.algorithm {
            AlgorithmKind::Explicit => {
                run_ftpl_explicit(env, &spec.matrix, &alpha, epsilon_for(horizon), sequence)
            }
            AlgorithmKind::Oracle => run_oracle_ftpl(env, spec, &alpha, oracle(), sequence),
            AlgorithmKind::Signed => run_oracle_ftpl_signed(env, spec, &alpha, oracle(), sequence),
            AlgorithmKind::ContextualTransductive => unreachable!("rejected by config validation"),
        }?;
        Ok(trace)
    }

    /// `R (2TNκρ + N w s + εT)` with `w` the column spread and `s` the largest `|α_j|`.
    fn bound(&self, horizon: usize) -> Result<f64> {
        let t = horizon as f64;
        let eps = epsilon_for(horizon);
        let n = self.setting.spec.num_columns() as f64;
        let dist = self.perturbation(horizon)?;
        let (density, reach) = match dist {
            Perturbation::PositiveUniform { scale } => (1.0 / scale, scale),
            Perturbation::SymmetricUniform { scale } => (0.5 / scale, scale),
        };
        let rho = density * (1.0 + 2.0 * eps) / self.delta;
        let range = self.setting.env.payoff_scale().range;
        Ok(range * (2.0 * t * n * self.kappa * rho + n * self.spread * reach + eps * t))
    }
}

/// Transductive contextual runs over a VCG base.
pub struct Transductive {
    pub setting: ContextualSetting,
    extension: TranslationSpec<Contextual<BidProfile>>,
    nu: Option<f64>,
    kappa: f64,
    delta: f64,
}

impl Transductive {
    pub fn new(setting: ContextualSetting, config: &ExperimentConfig) -> Result<Self> {
        let (kappa, delta) = constants(&setting.base_spec.matrix)?;
        let extension = q_extension(
            &setting.base_spec,
            &setting.transductive_set,
            &setting.env.class,
        )
        .map_err(|e| HarnessError::config("environment.transductive_set", e.to_string()))?;
        Ok(Transductive {
            setting,
            extension,
            nu: config.algorithm.nu,
            kappa,
            delta,
        })
    }

    pub fn extension(&self) -> &TranslationSpec<Contextual<BidProfile>> {
        &self.extension
    }

    pub fn nu(&self, horizon: usize) -> Result<f64> {
        match self.nu {
            Some(nu) => Ok(nu),
            None => Ok(transductive_nu(
                self.kappa,
                self.delta,
                self.setting.base_spec.num_columns(),
                self.setting.transductive_set.len(),
                self.setting.env.base.num_actions(),
                horizon as f64,
                epsilon_for(horizon),
            )?),
        }
    }
}

impl Experiment for Transductive {
    type Env = ContextualEnv<VcgEnv>;

    fn env(&self) -> &Self::Env {
        &self.setting.env
    }

    fn pool(&self) -> &[<Self::Env as Environment>::Adversary] {
        &self.setting.pool
    }

    fn matrix(&self) -> &TranslationMatrix {
        &self.extension.matrix
    }

    fn play(
        &self,
        sequence: &AdversarySequence<<Self::Env as Environment>::Adversary>,
        seed: u64,
    ) -> Result<RunTrace> {
        let s = &self.setting;
        let nu = self.nu(sequence.horizon())?;
        Ok(run_transductive_ftpl(
            &s.env,
            &s.base_spec,
            &s.transductive_set,
            nu,
            sequence,
            seed,
        )?
        .trace)
    }

    fn bound(&self, horizon: usize) -> Result<f64> {
        let s = &self.setting;
        let normalized = transductive_bound(
            self.kappa,
            self.delta,
            s.base_spec.num_columns(),
            s.transductive_set.len(),
            s.env.base.num_actions(),
            horizon as f64,
            epsilon_for(horizon),
            self.nu(horizon)?,
        );
        Ok(s.env.payoff_scale().range * normalized)
    }
}

/// The adversary sequence at horizon `T`. Scripted pools cycle; random draws use the adversary seed.
pub fn sequence<Y: Clone>(
    pool: &[Y],
    adversary: &AdversaryConfig,
    horizon: usize,
) -> Result<AdversarySequence<Y>> {
    let dist = || match &adversary.probs {
        Some(p) => FiniteDistribution::new(pool.to_vec(), p.clone())
            .map_err(|e| HarnessError::config("adversary.probs", e.to_string())),
        None => Ok(FiniteDistribution::uniform(pool.to_vec())?),
    };
    let model = match adversary.kind {
        AdversaryKind::Scripted => {
            return Ok(AdversarySequence::new(
                pool.to_vec(),
                (0..horizon).map(|t| t % pool.len()).collect(),
            )?);
        }
        AdversaryKind::Iid => AdversaryModel::Iid {
            dist: dist()?,
            horizon,
        },
        AdversaryKind::Sticky => {
            let rho = adversary
                .rho
                .ok_or_else(|| HarnessError::config("adversary.rho", "required"))?;
            AdversaryModel::Sticky {
                dist: dist()?,
                rho,
                horizon,
            }
        }
    };
    Ok(generate(&model, adversary.seed)?)
}

/// `max_x Σ_{τ ≤ t} f(x, y_τ)` for every prefix.
pub fn best_in_hindsight<E: Environment>(
    env: &E,
    sequence: &AdversarySequence<E::Adversary>,
) -> Vec<f64> {
    let mut cum = vec![0.0; env.num_actions()];
    (0..sequence.horizon())
        .map(|t| {
            let y = sequence.get(t);
            for (x, c) in cum.iter_mut().enumerate() {
                *c += env.payoff(x, y);
            }
            cum.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        })
        .collect()
}

pub fn trace_rows(trace: &RunTrace, best: &[f64]) -> Vec<TraceRow> {
    let mut cum = 0.0;
    trace
        .rounds
        .iter()
        .zip(best)
        .enumerate()
        .map(|(t, (r, &b))| {
            cum += r.payoff;
            TraceRow {
                t: t + 1,
                action_id: r.action,
                adversary_id: r.adversary,
                payoff: r.payoff,
                cum_payoff: cum,
                best_in_hindsight_cum: b,
                cum_regret: b - cum,
            }
        })
        .collect()
}

/// Runs every `(T, seed)` pair, writes one trace per pair and returns the summary.
pub fn execute<X: Experiment>(
    x: &X,
    config: &ExperimentConfig,
    out: &Path,
    jobs: usize,
) -> Result<Summary>
where
    <X::Env as Environment>::Adversary: Send + Sync,
{
    std::fs::create_dir_all(out).map_err(|e| HarnessError::io(out, e))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| HarnessError::Input(format!("thread pool: {e}")))?;
    let mut horizons = Vec::new();
    for horizon in config.horizons()? {
        let seq = sequence(x.pool(), &config.adversary, horizon)?;
        let best = best_in_hindsight(x.env(), &seq);
        let bound = x.bound(horizon)?;
        let runs: Vec<SummaryRecord> = pool.install(|| {
            config
                .seeds
                .par_iter()
                .map(|&seed| {
                    let start = Instant::now();
                    let trace = x.play(&seq, seed)?;
                    let analysis = analyze_trace(&trace, x.env(), x.matrix(), &seq, config.c)?;
                    let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
                    write_trace(
                        &out.join(trace_file_name(horizon, seed)),
                        &trace_rows(&trace, &best),
                    )?;
                    Ok(SummaryRecord {
                        regret: analysis.regret,
                        c_regret: analysis.c_regret,
                        stability_term: analysis.stability_term,
                        perturbation_term: analysis.perturbation_term,
                        epsilon_term: analysis.error_term,
                        switch_fraction: switch_fraction(trace.actions()),
                        bound,
                        seed,
                        runtime_ms: config.record_runtime.then_some(runtime_ms),
                    })
                })
                .collect::<Result<_>>()
        })?;
        let mean_regret = runs.iter().map(|r| r.regret).sum::<f64>() / runs.len() as f64;
        horizons.push(HorizonSummary {
            horizon,
            mean_regret,
            runs,
        });
    }
    let regret_ratio = match horizons.as_slice() {
        [first, .., last] => Some(last.mean_regret / first.mean_regret),
        _ => None,
    };
    let summary = Summary {
        environment: config.environment.kind.name().to_string(),
        algorithm: config.algorithm.kind.name().to_string(),
        c: config.c,
        horizons,
        regret_ratio,
    };
    summary.write(&out.join("summary.json"))?;
    Ok(summary)
}

fn generic_oracle<E: Environment>(choice: Option<OracleChoice>) -> Result<DynOracle<E>> {
    match choice {
        None | Some(OracleChoice::Enumerate) => Ok(Box::new(ExactEnumOracle)),
        Some(OracleChoice::Integral) => Ok(Box::new(ViaIntegral(IntegralEnumOracle))),
        Some(other) => Err(HarnessError::config(
            "algorithm.oracle",
            format!("{other:?} is only available for multiunit environments").to_lowercase(),
        )),
    }
}

fn multiunit_oracle(
    choice: Option<OracleChoice>,
    range: UnitRange,
) -> Result<DynOracle<MultiUnitEnv>> {
    match (choice, range) {
        (None, UnitRange::Full) | (Some(OracleChoice::Dp), UnitRange::Full) => {
            Ok(Box::new(ExactMultiUnitOracle))
        }
        (None, UnitRange::Mir) | (Some(OracleChoice::Mir), UnitRange::Mir) => {
            Ok(Box::new(MirOracle))
        }
        (Some(OracleChoice::Dp), UnitRange::Mir) => Err(HarnessError::config(
            "algorithm.oracle",
            "dp optimizes the full range; use mir",
        )),
        (Some(OracleChoice::Mir), UnitRange::Full) => Err(HarnessError::config(
            "algorithm.oracle",
            "mir needs environment.range = \"mir\"",
        )),
        (other, _) => generic_oracle(other),
    }
}

/// Builds the configured experiment and hands it to `f`.
pub fn with_experiment<R>(
    config: &ExperimentConfig,
    f: impl ExperimentVisitor<Output = R>,
) -> Result<R> {
    let choice = config.algorithm.oracle;
    match config.environment.kind {
        EnvironmentKind::Vcg => f.visit(&Standard::new(
            setting::vcg(config)?,
            config,
            Some(generic_oracle(choice)?),
        )?),
        EnvironmentKind::Level => f.visit(&Standard::new(
            setting::level(config)?,
            config,
            Some(generic_oracle(choice)?),
        )?),
        EnvironmentKind::ItemPricing => f.visit(&Standard::new(
            setting::item_pricing(config)?,
            config,
            Some(generic_oracle(choice)?),
        )?),
        EnvironmentKind::Multiunit => {
            let oracle = multiunit_oracle(choice, config.environment.range)?;
            f.visit(&Standard::new(
                setting::multiunit(config)?,
                config,
                Some(oracle),
            )?)
        }
        EnvironmentKind::Sispa => f.visit(&Standard::new(
            setting::sispa(config)?,
            config,
            Some(generic_oracle(choice)?),
        )?),
        EnvironmentKind::Contextual => {
            f.visit_contextual(&Transductive::new(setting::contextual(config)?, config)?)
        }
    }
}

/// Callback over the concrete experiment type.
pub trait ExperimentVisitor {
    type Output;

    fn visit<E>(self, x: &Standard<E>) -> Result<Self::Output>
    where
        E: Environment + Sync,
        E::Adversary: Send + Sync;

    fn visit_contextual(self, x: &Transductive) -> Result<Self::Output>;
}

struct Execute<'a> {
    config: &'a ExperimentConfig,
    out: &'a Path,
    jobs: usize,
}

impl ExperimentVisitor for Execute<'_> {
    type Output = Summary;

    fn visit<E>(self, x: &Standard<E>) -> Result<Summary>
    where
        E: Environment + Sync,
        E::Adversary: Send + Sync,
    {
        execute(x, self.config, self.out, self.jobs)
    }

    fn visit_contextual(self, x: &Transductive) -> Result<Summary> {
        execute(x, self.config, self.out, self.jobs)
    }
}

/// Runs the experiment, writing `trace_T{T}_seed{seed}.csv` files and `summary.json` into `out`.
///
/// Output bytes depend only on the config unless `record_runtime` is set.
pub fn run_experiment(config: &ExperimentConfig, out: &Path, jobs: usize) -> Result<Summary> {
    with_experiment(config, Execute { config, out, jobs })
}
