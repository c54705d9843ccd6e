//! Edge-flip Markov chains on triangulations of the sphere.
//!
//! The crate has four layers:
//!
//! * [`triangulation`] — a mutable combinatorial triangulation of the sphere
//!   on labeled nodes `1..n` with constant-expected-time flips, structural
//!   validation, canonical codes and a line-oriented text format.
//! * [`dynamics`] — the two link-selection rules (uniform over links, node
//!   first then an incident link), the chain stepper, exact rational
//!   selection/transition probabilities and cycle balance products.
//! * [`exact`] — small-n machinery: breadth-first enumeration of the flip
//!   graph, an independent triangle-set enumerator used as an oracle, exact
//!   rational transition matrices, stationary distributions, reversibility
//!   tests and the asymptotic count evaluator.
//! * [`stats`] — degree histograms and cumulative distributions, power-law /
//!   exponential fits, the curvature statistic, neighbor-degree correlation
//!   and windowed rejection tracking, with CSV emission.
//!
//! Probabilities on identity-checking paths are exact rationals; simulation
//! paths never compute probabilities at all (two-stage sampling), so there is
//! no float drift anywhere in the verification story.

pub mod dynamics;
pub mod exact;
pub mod stats;
pub mod triangulation;

/// Exact rational number used for all probability identities.
pub type Rational = num::BigRational;

/// Formats a rational as `num/den`, keeping the denominator even when it is 1.
pub fn ratio_str(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Builds a rational from a signed numerator/denominator pair.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}

pub use dynamics::{ChainState, SelectionRule, StepOutcome};
pub use triangulation::{FlipOutcome, LinkId, NodeId, Triangulation};
