//! Error type shared by all simulator modules.

use std::fmt;

/// Errors from simulator operations.
#[derive(Debug, Clone, PartialEq)]
pub enum SimError {
    /// Input outside an operation's domain (e.g. nonpositive distance or spread).
    Domain(String),
    /// A matrix that must be positive semidefinite has an eigenvalue below the
    /// clipping threshold; usually indicates an invalid correlation matrix upstream.
    NotPsd { min_eigenvalue: f64, threshold: f64 },
    /// Antenna or user index out of range.
    Index(String),
    /// A linear solve against a matrix that should be positive definite failed.
    SolveFailure(String),
    /// Invalid run or scenario configuration.
    Config(String),
    /// The requested VUE density cannot satisfy the minimum inter-VUE gap.
    InfeasibleDensity { mean_headway_m: f64, min_gap_m: f64 },
    /// Two network nodes occupy the same horizontal position.
    CoincidentPositions,
    /// An ASE curve with no samples was passed to the optimizer.
    EmptyCurve,
    /// The regression design matrix is rank deficient.
    RankDeficient,
    /// A zero combining vector was passed to the SINR evaluation.
    ZeroVector,
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::Domain(msg) => write!(f, "domain error: {msg}"),
            SimError::NotPsd {
                min_eigenvalue,
                threshold,
            } => write!(
                f,
                "matrix is not positive semidefinite: min eigenvalue {min_eigenvalue:e} below -{threshold:e}"
            ),
            SimError::Index(msg) => write!(f, "index error: {msg}"),
            SimError::SolveFailure(msg) => write!(f, "linear solve failed: {msg}"),
            SimError::Config(msg) => write!(f, "config error: {msg}"),
            SimError::InfeasibleDensity {
                mean_headway_m,
                min_gap_m,
            } => write!(
                f,
                "infeasible VUE density: mean headway {mean_headway_m} m does not exceed minimum gap {min_gap_m} m"
            ),
            SimError::CoincidentPositions => write!(f, "coincident node positions"),
            SimError::EmptyCurve => write!(f, "empty ASE curve"),
            SimError::RankDeficient => write!(f, "rank-deficient regression design"),
            SimError::ZeroVector => write!(f, "zero combining vector"),
        }
    }
}

impl std::error::Error for SimError {}

pub type Result<T> = std::result::Result<T, SimError>;
