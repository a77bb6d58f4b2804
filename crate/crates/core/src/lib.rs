//! Discovery of strain-energy functions for incompressible isotropic
//! hyperelastic materials.
//!
//! A recurrent policy samples prefix traversals of candidate energies
//! `Ψ(I_C, II_C)` (or stretch functions `ω(λ)`), each candidate is turned
//! into nominal stresses for homogeneous biaxial kinematics and scored
//! against multiaxial test data, and the policy is trained on the best
//! fraction of every batch.

pub mod baselines;
pub mod controller;
pub mod datasets;
pub mod expr;
pub mod mechanics;
pub mod model;
pub mod optim;
pub mod trainer;

pub use datasets::{DataPoint, Dataset, DeformationMode, Scenario};
pub use expr::{ExprTree, Library, Token};
pub use mechanics::{Formulation, StressPredictor};
pub use model::ModelFile;

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid library: {0}")]
    InvalidLibrary(String),
    #[error("invalid expression: {0}")]
    InvalidTree(String),
    #[error("invalid kinematics: {0}")]
    Kinematics(String),
    #[error("{path}:{line}: {msg}")]
    Csv {
        path: PathBuf,
        line: u64,
        msg: String,
    },
    #[error("invalid dataset: {0}")]
    Dataset(String),
    #[error("evaluation failed: {0}")]
    Evaluation(#[from] expr::InvalidCause),
    #[error("traversal not reachable under the prior: {0}")]
    Unreachable(String),
    #[error("{0}")]
    Degenerate(String),
    #[error("{0} is not implemented")]
    NotImplemented(String),
    #[error("fit failed: {0}")]
    Fit(String),
    #[error("formulation mismatch: {0}")]
    FormulationMismatch(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
