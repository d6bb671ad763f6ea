use std::fmt;

use thiserror::Error;

/// Pipeline stage in which a library error occurred.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Nodes,
    Kernel,
    Atlas,
    Assembly,
    Solve,
    Output,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Config => "config",
            Stage::Nodes => "nodes",
            Stage::Kernel => "kernel",
            Stage::Atlas => "atlas",
            Stage::Assembly => "assembly",
            Stage::Solve => "solve",
            Stage::Output => "output",
        })
    }
}

#[derive(Debug, Error)]
pub enum HarnessError {
    /// Bad invocation or unreadable/malformed config (exit code 2).
    #[error("{0}")]
    Usage(String),

    /// Structured failure inside the pipeline (exit code 1).
    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: meshfd::Error,
    },

    #[error("output failed: {0}")]
    Io(#[from] std::io::Error),

    #[error("could not encode report: {0}")]
    Json(#[from] serde_json::Error),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Usage(_) => 2,
            _ => 1,
        }
    }
}

pub(crate) trait StageExt<T> {
    fn stage(self, stage: Stage) -> Result<T, HarnessError>;
}

impl<T> StageExt<T> for meshfd::Result<T> {
    fn stage(self, stage: Stage) -> Result<T, HarnessError> {
        self.map_err(|source| HarnessError::Stage { stage, source })
    }
}
