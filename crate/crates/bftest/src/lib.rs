//! Seeded experiment harness for the `bftest-core` testers and lower-bound
//! experiments: configuration, parallel trial execution, sweeps, summaries
//! and CSV/JSON output.
//!
//! Trial `t` of a run draws all of its randomness from a ChaCha8 stream keyed
//! by the master seed with stream id `t`, so results do not depend on thread
//! scheduling and are sorted by trial index before output.

pub mod checks;
pub mod config;
pub mod error;
pub mod lb;
pub mod output;
pub mod runner;
pub mod sweep;

pub use config::{ExperimentConfig, LearnerKind, Plan, TargetKind, TesterId};
pub use error::{HarnessError, Result};
pub use runner::{run_plan, run_trials, summarize, trial_rng, SummaryStats, TrialResult};
pub use sweep::{minimal_queries, success_sweep, sweep, SuccessRow, SweepRow, SweepSpec};

/// Environment variable holding the default master seed.
pub const SEED_ENV: &str = "BFTEST_SEED";
