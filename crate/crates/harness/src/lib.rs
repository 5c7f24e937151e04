//! Declarative experiment runner: TOML configs in, per-seed trace CSVs, a summary JSON and regret
//! plots out.

pub mod config;
pub mod error;
pub mod plot;
pub mod run;
pub mod setting;
pub mod trace;
pub mod verify;

pub use config::ExperimentConfig;
pub use error::{HarnessError, Result};
pub use plot::{plot_traces, render_svg};
pub use run::run_experiment;
pub use trace::{read_trace, replay, Summary, SummaryRecord, TraceRow};
pub use verify::{verify, VerifyReport};
