//! Exact small-n machinery: flip-graph enumeration, an independent
//! triangle-set oracle, exact rational transition matrices, stationary
//! distributions, reversibility verdicts and the asymptotic count evaluator.
//!
//! Everything here that claims exactness is exact: matrices, stationary
//! vectors and detailed-balance comparisons are computed and verified in
//! rational arithmetic with zero tolerance. Floating point appears only in
//! the power-iteration cross-check and the asymptotic evaluator.

mod enumerate;
mod io;
mod matrix;
mod oracle;
mod tutte;

pub use enumerate::{count_isomorphism_classes, enumerate_labeled, EnumerationLimits};
pub use io::{write_distribution, write_manifest, write_matrix};
pub use matrix::{
    power_iteration, reversibility_test, stationary_distribution, transition_matrix,
    ReversibilityReport, StationaryDistribution, TransitionMatrix, WitnessCycle, WitnessPair,
};
pub use oracle::{enumerate_triangle_sets, oracle_count};
pub use tutte::{tutte_asymptotic, tutte_exact_reference, HighPrecision, TutteEstimate};

use thiserror::Error;

use crate::triangulation::TriError;

#[derive(Debug, Error)]
pub enum ExactError {
    #[error(transparent)]
    Tri(#[from] TriError),
    #[error("n={0} exceeds the enumeration guard ({1}); raise the limit explicitly if intended")]
    GuardExceeded(usize, usize),
    #[error("state list is incomplete: {0}")]
    IncompleteStateList(String),
    #[error("transition matrix is reducible: {0}")]
    Reducible(String),
    #[error("stationary solve failed verification: {0}")]
    SolveFailed(String),
    #[error("matrix and state list disagree: {0}")]
    Mismatch(String),
}
