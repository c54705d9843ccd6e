//! Cycle balance products (Kolmogorov criterion) and the canonical cycle
//! constructions on the christmas tree.

use num::One;
use thiserror::Error;

use crate::triangulation::{canonical_code, FlipOutcome, NodeId, TriError, Triangulation};
use crate::{ratio_str, Rational};

use super::{link_probability, SelectionRule};

/// The 4-flip sequence on the christmas tree whose balance product witnesses
/// that the node-then-link chain is not reversible for n >= 7. Written as
/// node pairs so it survives link re-keying: flip {1,4}, then {2,5}, {3,4},
/// {5,6}. The walk returns to the christmas tree with nodes 4 and 5
/// exchanged.
pub const TREE_FOUR_CYCLE: [(u32, u32); 4] = [(1, 4), (2, 5), (3, 4), (5, 6)];

/// The 3-flip sequence that regenerates the christmas tree with nodes 3 and 4
/// exchanged (the aperiodicity construction): flip {1,4}, then {2,3}, {4,5}.
pub const TREE_THREE_CYCLE: [(u32, u32); 3] = [(1, 4), (2, 3), (4, 5)];

#[derive(Debug, Error)]
pub enum CycleError {
    #[error("step {step}: link {a}-{b} is not present")]
    MissingLink { step: usize, a: u32, b: u32 },
    #[error("step {step}: link {a}-{b} is not flippable")]
    Unflippable { step: usize, a: u32, b: u32 },
    #[error("flip sequence does not close: {detail}")]
    NotClosed { detail: String },
    #[error(transparent)]
    Tri(#[from] TriError),
}

/// Exact product of backward/forward transition-probability ratios along a
/// flip sequence that returns to the start: either to the identical link set
/// or, as for the canonical 4-cycle above, to an isomorphic copy of it.
/// Equals 1 on every such cycle iff the chain is reversible.
pub fn cycle_balance_ratio(
    start: &Triangulation,
    flips: &[(NodeId, NodeId)],
    rule: SelectionRule,
) -> Result<Rational, CycleError> {
    let mut t = start.clone();
    let mut product = Rational::one();
    for (step, &(a, b)) in flips.iter().enumerate() {
        let link = t
            .link_between(a, b)?
            .ok_or(CycleError::MissingLink {
                step: step + 1,
                a: a.get(),
                b: b.get(),
            })?;
        if !t.is_flippable(link)? {
            return Err(CycleError::Unflippable {
                step: step + 1,
                a: a.get(),
                b: b.get(),
            });
        }
        let forward = link_probability(&t, rule, link)?;
        let added = match t.flip(link)? {
            FlipOutcome::Flipped { added, .. } => added,
            FlipOutcome::Rejected => unreachable!("checked flippable"),
        };
        let new_link = t
            .link_between(added.0, added.1)?
            .expect("flip inserted this link");
        let backward = link_probability(&t, rule, new_link)?;
        product *= backward / forward;
    }
    if !t.same_link_set(start) {
        // Accept closure up to isomorphism: the canonical 4-cycle ends at a
        // relabeled christmas tree, and a balance violation on such a walk
        // still refutes reversibility because the stationary distribution is
        // invariant under relabeling.
        let same_class = canonical_code(&t)? == canonical_code(start)?;
        if !same_class {
            return Err(CycleError::NotClosed {
                detail: format!(
                    "after {} flips the link set is neither equal nor isomorphic to the start",
                    flips.len()
                ),
            });
        }
    }
    Ok(product)
}

/// Outcome of the 3-cycle construction.
#[derive(Debug, Clone)]
pub struct ThreeCycleCheck {
    pub passed: bool,
    pub detail: String,
}

/// Applies the three flips of `TREE_THREE_CYCLE` to `christmas_tree(n)` and
/// checks that the result is the christmas tree with node labels 3 and 4
/// transposed. Never errors; failures carry diagnostics.
pub fn three_cycle_check(n: usize) -> ThreeCycleCheck {
    let fail = |detail: String| ThreeCycleCheck {
        passed: false,
        detail,
    };
    if n < 7 {
        return fail(format!("requires n >= 7, got {n}"));
    }
    let mut t = match Triangulation::christmas_tree(n) {
        Ok(t) => t,
        Err(e) => return fail(e.to_string()),
    };
    for (step, &(a, b)) in TREE_THREE_CYCLE.iter().enumerate() {
        let link = match t.link_between(NodeId::new(a), NodeId::new(b)) {
            Ok(Some(l)) => l,
            Ok(None) => return fail(format!("step {}: link {a}-{b} missing", step + 1)),
            Err(e) => return fail(e.to_string()),
        };
        match t.flip(link) {
            Ok(FlipOutcome::Flipped { .. }) => {}
            Ok(FlipOutcome::Rejected) => {
                return fail(format!("step {}: flip of {a}-{b} rejected", step + 1))
            }
            Err(e) => return fail(e.to_string()),
        }
    }
    let mut perm: Vec<u32> = (1..=n as u32).collect();
    perm.swap(2, 3); // labels 3 and 4
    let transposed = Triangulation::christmas_tree(n)
        .expect("n >= 7")
        .apply_relabeling(&perm)
        .expect("transposition is a bijection");
    if t.same_link_set(&transposed) {
        ThreeCycleCheck {
            passed: true,
            detail: format!("three flips reproduce christmas_tree({n}) with nodes 3,4 swapped"),
        }
    } else {
        fail("final link set differs from the transposed christmas tree".into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio;

    fn pairs(raw: &[(u32, u32)]) -> Vec<(NodeId, NodeId)> {
        raw.iter()
            .map(|&(a, b)| (NodeId::new(a), NodeId::new(b)))
            .collect()
    }

    #[test]
    fn four_cycle_ratio_is_81_80_under_node_rule() {
        // Exact product of the four backward/forward ratios on the
        // christmas tree, n independent for n >= 7:
        //   (9/140)/(5/84) * (9/140)/(11/210) * (11/210)/(1/14) * (5/84)/(2/35)
        //   = 27/25 * 27/22 * 11/15 * 25/24 = 81/80.
        for n in [7usize, 8, 12] {
            let t = Triangulation::christmas_tree(n).unwrap();
            let r = cycle_balance_ratio(&t, &pairs(&TREE_FOUR_CYCLE), SelectionRule::NodeThenLink)
                .unwrap();
            assert_eq!(r, ratio(81, 80), "n={n}");
        }
    }

    #[test]
    fn four_cycle_ratio_is_one_under_uniform_rule() {
        let t = Triangulation::christmas_tree(9).unwrap();
        let r =
            cycle_balance_ratio(&t, &pairs(&TREE_FOUR_CYCLE), SelectionRule::UniformLink).unwrap();
        assert_eq!(r, ratio(1, 1));
        assert_eq!(ratio_str(&r), "1/1");
    }

    #[test]
    fn two_cycle_balances_exactly() {
        // Flip a link and flip the inserted link back: forward and backward
        // probabilities pair up, so the product is exactly 1 under both rules.
        let t = Triangulation::christmas_tree(7).unwrap();
        let cycle = pairs(&[(1, 4), (3, 5)]);
        for rule in SelectionRule::ALL {
            assert_eq!(cycle_balance_ratio(&t, &cycle, rule).unwrap(), ratio(1, 1));
        }
    }

    #[test]
    fn open_path_is_rejected() {
        let t = Triangulation::christmas_tree(8).unwrap();
        let err = cycle_balance_ratio(
            &t,
            &pairs(&[(1, 4)]),
            SelectionRule::NodeThenLink,
        )
        .unwrap_err();
        assert!(matches!(err, CycleError::NotClosed { .. }));
    }

    #[test]
    fn illegal_step_is_named() {
        let t = Triangulation::christmas_tree(8).unwrap();
        // {3,4} is unflippable in the tree.
        let err = cycle_balance_ratio(
            &t,
            &pairs(&[(3, 4), (1, 4)]),
            SelectionRule::NodeThenLink,
        )
        .unwrap_err();
        assert!(matches!(err, CycleError::Unflippable { step: 1, a: 3, b: 4 }));
        // {3,6} is not even a link.
        let err = cycle_balance_ratio(
            &t,
            &pairs(&[(3, 6)]),
            SelectionRule::NodeThenLink,
        )
        .unwrap_err();
        assert!(matches!(err, CycleError::MissingLink { step: 1, a: 3, b: 6 }));
    }

    #[test]
    fn four_cycle_degenerates_at_n6() {
        // At n=6 node 6 sits at the end of the branch path, the degree
        // pattern around the cycle symmetrizes and the product collapses to
        // exactly 1: the violation needs n >= 7.
        let t = Triangulation::christmas_tree(6).unwrap();
        let r = cycle_balance_ratio(&t, &pairs(&TREE_FOUR_CYCLE), SelectionRule::NodeThenLink)
            .unwrap();
        assert_eq!(r, ratio(1, 1));
    }

    #[test]
    fn three_cycle_transposes_nodes_3_and_4() {
        for n in [7usize, 10, 100] {
            let check = three_cycle_check(n);
            assert!(check.passed, "n={n}: {}", check.detail);
        }
        assert!(!three_cycle_check(6).passed);
    }
}
