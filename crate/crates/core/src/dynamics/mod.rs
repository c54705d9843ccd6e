//! Link-selection rules, the Markov chain stepper and exact transition
//! probabilities.
//!
//! One step of the chain selects a link according to the configured rule and
//! attempts to flip it; if the complementary link is already present the
//! state is unchanged (a self-loop) and the attempt counts as rejected. Time
//! is measured in attempts: budgets, counters and rates all include
//! rejections.
//!
//! The node-then-link rule is realized literally as two-stage sampling (a
//! node uniformly in `1..n`, then a link uniformly from its incidence list),
//! which is exactly the selection distribution
//! `P(l) = (1/n) (1/d1 + 1/d2)` with `d1`, `d2` the endpoint degrees.
//! Simulation never computes probabilities; the exact rational forms below
//! exist for identity checks and matrix assembly.

mod cycles;

pub use cycles::{
    cycle_balance_ratio, three_cycle_check, CycleError, ThreeCycleCheck, TREE_FOUR_CYCLE,
    TREE_THREE_CYCLE,
};

use std::fmt;

use num::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::triangulation::{FlipOutcome, LinkId, TriError, Triangulation};
use crate::Rational;

/// Which distribution a chain uses to select the link to flip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SelectionRule {
    /// Every link with probability 1/(3n-6).
    UniformLink,
    /// A node uniformly at random, then a link incident to it uniformly.
    NodeThenLink,
}

impl SelectionRule {
    pub const ALL: [SelectionRule; 2] = [SelectionRule::UniformLink, SelectionRule::NodeThenLink];

    pub fn name(self) -> &'static str {
        match self {
            SelectionRule::UniformLink => "uniform-link",
            SelectionRule::NodeThenLink => "node-then-link",
        }
    }
}

impl fmt::Display for SelectionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for SelectionRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uniform-link" | "uniform" => Ok(SelectionRule::UniformLink),
            "node-then-link" | "node" => Ok(SelectionRule::NodeThenLink),
            other => Err(format!(
                "unknown rule {other:?}; expected uniform-link or node-then-link"
            )),
        }
    }
}

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error(transparent)]
    Tri(#[from] TriError),
    #[error("link {0}-{1} is not flippable: the complementary link is present")]
    Unflippable(u32, u32),
}

/// Error raised by an observer, carrying context about where it failed.
#[derive(Debug, Error)]
#[error("observer {observer} failed at attempt {attempts}: {message}")]
pub struct ObserverError {
    pub observer: String,
    pub attempts: u64,
    pub message: String,
}

/// Statistics sink invoked after every attempted flip.
pub trait Observer {
    fn on_step(&mut self, chain: &ChainState, outcome: &StepOutcome) -> Result<(), ObserverError>;
}

/// One attempted flip: the selected link and what happened to it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepOutcome {
    pub chosen: LinkId,
    pub outcome: FlipOutcome,
}

/// A running Markov chain: triangulation, rule, seeded ChaCha8 stream and
/// attempt counters. Evolution is a pure function of `(seed, initial, rule)`.
#[derive(Debug, Clone)]
pub struct ChainState {
    tri: Triangulation,
    rule: SelectionRule,
    rng: ChaCha8Rng,
    attempts: u64,
    accepted: u64,
    rejected: u64,
}

impl ChainState {
    pub fn new(tri: Triangulation, rule: SelectionRule, seed: u64) -> Self {
        ChainState {
            tri,
            rule,
            rng: ChaCha8Rng::seed_from_u64(seed),
            attempts: 0,
            accepted: 0,
            rejected: 0,
        }
    }

    pub fn triangulation(&self) -> &Triangulation {
        &self.tri
    }

    pub fn rule(&self) -> SelectionRule {
        self.rule
    }

    pub fn attempts(&self) -> u64 {
        self.attempts
    }

    pub fn accepted(&self) -> u64 {
        self.accepted
    }

    pub fn rejected(&self) -> u64 {
        self.rejected
    }

    /// Consumes the chain, returning the final triangulation.
    pub fn into_triangulation(self) -> Triangulation {
        self.tri
    }

    /// Draws a link according to the rule. Bounded integers come from the
    /// generator's rejection-based range sampling, never from a modulus.
    pub fn sample_link(&mut self) -> LinkId {
        let slot = match self.rule {
            SelectionRule::UniformLink => self.rng.gen_range(0..self.tri.num_links()),
            SelectionRule::NodeThenLink => {
                let node = self.rng.gen_range(0..self.tri.n()) as u32;
                let inc = self.tri.incident_slots(node);
                inc[self.rng.gen_range(0..inc.len())].0 as usize
            }
        };
        self.tri.link_at_slot(slot)
    }

    /// One attempt: sample a link, try to flip it, update counters.
    pub fn step(&mut self) -> StepOutcome {
        let chosen = self.sample_link();
        let outcome = self.tri.flip_slot(chosen.slot());
        self.attempts += 1;
        match outcome {
            FlipOutcome::Flipped { .. } => self.accepted += 1,
            FlipOutcome::Rejected => self.rejected += 1,
        }
        StepOutcome { chosen, outcome }
    }

    /// Attempts a specific live link instead of sampling one; counters are
    /// updated as for `step`.
    pub fn attempt_link(&mut self, link: LinkId) -> Result<StepOutcome, TriError> {
        let outcome = self.tri.flip(link)?;
        self.attempts += 1;
        match outcome {
            FlipOutcome::Flipped { .. } => self.accepted += 1,
            FlipOutcome::Rejected => self.rejected += 1,
        }
        Ok(StepOutcome {
            chosen: link,
            outcome,
        })
    }

    /// Executes `budget` attempts, feeding every outcome to the observers.
    pub fn run(
        &mut self,
        budget: u64,
        observers: &mut [&mut dyn Observer],
    ) -> Result<(), ObserverError> {
        if observers.is_empty() {
            for _ in 0..budget {
                self.step();
            }
            return Ok(());
        }
        for _ in 0..budget {
            let out = self.step();
            for obs in observers.iter_mut() {
                obs.on_step(self, &out)?;
            }
        }
        Ok(())
    }
}

/// Exact selection probability of a live link under a rule.
pub fn link_probability(
    tri: &Triangulation,
    rule: SelectionRule,
    link: LinkId,
) -> Result<Rational, TriError> {
    let (a, b) = tri.link_endpoints(link)?;
    Ok(match rule {
        SelectionRule::UniformLink => Rational::new(1.into(), (tri.num_links() as i64).into()),
        SelectionRule::NodeThenLink => {
            let da = tri.degree(a)? as i64;
            let db = tri.degree(b)? as i64;
            let inv = Rational::new(1.into(), da.into()) + Rational::new(1.into(), db.into());
            inv / Rational::from_integer((tri.n() as i64).into())
        }
    })
}

/// Sum of the selection probabilities over all live links; equals 1 exactly
/// for every state and both rules.
pub fn check_normalization(tri: &Triangulation, rule: SelectionRule) -> Rational {
    let mut sum = Rational::zero();
    for link in tri.links() {
        sum += link_probability(tri, rule, link).expect("live link");
    }
    sum
}

/// Exact transition probability to the distinct state produced by flipping
/// `link`; errors if the flip would be rejected (no distinct target state).
pub fn flip_transition_probability(
    tri: &Triangulation,
    link: LinkId,
    rule: SelectionRule,
) -> Result<Rational, DynamicsError> {
    if !tri.is_flippable(link)? {
        let (a, b) = tri.link_endpoints(link)?;
        return Err(DynamicsError::Unflippable(a.get(), b.get()));
    }
    Ok(link_probability(tri, rule, link)?)
}

/// Probability mass of staying put: the total selection probability of the
/// unflippable links.
pub fn self_loop_mass(tri: &Triangulation, rule: SelectionRule) -> Rational {
    let mut sum = Rational::zero();
    for link in tri.links() {
        if !tri.is_flippable(link).expect("live link") {
            sum += link_probability(tri, rule, link).expect("live link");
        }
    }
    sum
}
