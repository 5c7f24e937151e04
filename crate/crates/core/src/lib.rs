//! Oracle-efficient generalized follow-the-perturbed-leader.
//!
//! The learner picks actions from a finite set indexed `0..N`. A translation
//! matrix `Γ` assigns each action a row; the learner perturbs cumulative
//! payoff by `α · Γ_x` with a single draw of `α`. When every column of `Γ` is
//! implementable by a small weighted set of adversary actions, the perturbed
//! leader can be computed by one call to an offline optimization oracle.
//!
//! Crate layout:
//!
//! * [`env`] and [`dataset`]: environments, adversary sequences, weighted data.
//! * [`translation`]: admissibility, implementability, pseudo-complexity.
//! * [`perturbation`]: distributions for `α` and learning-rate formulas.
//! * [`ftpl`]: the explicit and oracle-based runners.
//! * [`analysis`]: regret and its three-term decomposition.
//! * [`oracles`]: exact enumeration, integral-weight reduction, approximation checks.
//! * [`envs`]: VCG, item pricing, level auctions, multi-unit and SiSPA bidding.
//! * [`contextual`]: policy classes and transductive contextual learning.
//! * [`adversaries`]: scripted, i.i.d. and Markov adversary generators.
#![no_std]

extern crate alloc;

pub mod adversaries;
pub mod analysis;
pub mod contextual;
pub mod dataset;
pub mod env;
pub mod envs;
pub mod error;
pub mod ftpl;
pub mod oracles;
pub mod perturbation;
pub mod translation;

mod util;

pub use analysis::{analyze_trace, TraceAnalysis};
pub use dataset::WeightedDataset;
pub use env::{AdversarySequence, Environment, PayoffScale};
pub use error::Error;
pub use ftpl::{run_ftpl_explicit, run_oracle_ftpl, run_oracle_ftpl_signed, Round, RunTrace};
pub use oracles::{ExactEnumOracle, Oracle, OracleKind};
pub use perturbation::{eta_for_uniform, sample_alpha, Perturbation};
pub use translation::{
    check_admissibility, pseudo_complexity, verify_implementability, AdmissibilityReport,
    TranslationMatrix, TranslationSpec,
};

/// Result alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;
