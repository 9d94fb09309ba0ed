use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("node index {index} out of range for {n_nodes} nodes")]
    NodeOutOfRange { index: usize, n_nodes: usize },

    #[error("shape mismatch in {context}: expected {expected}, got {got}")]
    ShapeMismatch {
        context: &'static str,
        expected: String,
        got: String,
    },

    #[error("{}:{line}: {msg}", path.display())]
    Malformed {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("label {label} out of range for {n_classes} classes (node {node})")]
    LabelOutOfRange {
        node: usize,
        label: usize,
        n_classes: usize,
    },

    #[error("class {class} has {have} members but {need} are required")]
    InsufficientClass {
        class: usize,
        have: usize,
        need: usize,
    },

    #[error("fixed split mode requires a split file")]
    MissingSplitFile,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Training produced a non-finite loss. `sample` carries the (v, i)
    /// indices when the failure happened inside a posterior sampling job.
    #[error("training diverged at epoch {epoch}{}", sample_suffix(sample))]
    Diverged {
        epoch: usize,
        sample: Option<(usize, usize)>,
    },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Attach posterior-sample indices to a divergence error.
    pub(crate) fn tag_sample(self, v: usize, i: usize) -> Self {
        match self {
            Error::Diverged { epoch, .. } => Error::Diverged {
                epoch,
                sample: Some((v, i)),
            },
            other => other,
        }
    }
}

fn sample_suffix(sample: &Option<(usize, usize)>) -> String {
    match sample {
        Some((v, i)) => format!(" (zeta sample {v}, graph sample {i})"),
        None => String::new(),
    }
}
