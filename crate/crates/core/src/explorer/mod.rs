//! Instance generation, sweeps, counterexample hunting and report files.
//!
//! Every task derives its randomness from [`task_seed`] of the base seed and
//! the task index, so output depends only on the configuration. Results of
//! concurrent tasks are merged by a total sort before anything is written.

mod generate;
mod hunt;
mod io;
mod sweep;

pub use generate::{generate_instance, generate_lemma_case, haar_unitary, splitmix64, task_seed, SpectrumLaw};
pub use hunt::{hunt, hunt_with, SearchArgmin, SearchConfig, SearchResult};
pub use io::{from_jsonl, read_reports, to_jsonl, write_reports, write_summary_csv, ReportFile, SCHEMA_VERSION};
pub use sweep::{
    run_sweep, run_sweep_with, FailureRecord, ParamGrid, Record, ReportSet, Summary, SummaryRow, SweepConfig,
    SweepTarget,
};

/// How independent tasks are scheduled. Output does not depend on it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Execution {
    Serial,
    #[default]
    Parallel,
}

impl Execution {
    pub(crate) fn map<T: Send, R: Send>(self, items: Vec<T>, f: impl Fn(T) -> R + Sync + Send) -> Vec<R> {
        use rayon::prelude::*;
        match self {
            Execution::Serial => items.into_iter().map(f).collect(),
            Execution::Parallel => items.into_par_iter().map(f).collect(),
        }
    }
}
