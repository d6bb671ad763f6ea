//! Manufactured-solution experiments, convergence sweeps and reports for `meshfd`.

pub mod cli;
pub mod config;
pub mod convergence;
pub mod error;
pub mod manufactured;
pub mod output;
pub mod pipeline;

pub use config::ExperimentConfig;
pub use convergence::{convergence_study, ConvergenceRecord, StudyOutcome};
pub use error::{HarnessError, Stage};
pub use manufactured::{manufactured_problem, ManufacturedProblem};
pub use pipeline::{run_solve, solve_with_rhs, RunOutcome};
