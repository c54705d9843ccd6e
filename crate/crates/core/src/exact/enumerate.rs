//! Breadth-first enumeration of the labeled flip graph.

use std::collections::HashSet;

use super::ExactError;
use crate::triangulation::{canonical_code, Triangulation};

/// Resource guard for enumeration and the oracle. State counts explode with
/// n; the default keeps runs at desk scale.
#[derive(Debug, Clone, Copy)]
pub struct EnumerationLimits {
    pub max_n: usize,
}

impl Default for EnumerationLimits {
    fn default() -> Self {
        EnumerationLimits { max_n: 8 }
    }
}

/// Bitmask limit: link sets are keyed as bits over node pairs.
const MASK_MAX_N: usize = 16;

/// The link set as a bitmask over node pairs, the dedup key for labeled
/// states (a triangulation of the sphere is determined by its link set).
pub(crate) fn link_mask(t: &Triangulation) -> u128 {
    let n = t.n() as u64;
    let mut mask = 0u128;
    for (a, b) in t.link_pairs() {
        let (i, j) = (a as u64 - 1, b as u64 - 1);
        let idx = i * n - i * (i + 1) / 2 + (j - i - 1);
        mask |= 1u128 << idx;
    }
    mask
}

pub(crate) fn pair_bit(n: usize, a: u32, b: u32) -> u128 {
    let (i, j) = if a < b { (a, b) } else { (b, a) };
    let (i, j, n) = (i as u64 - 1, j as u64 - 1, n as u64);
    1u128 << (i * n - i * (i + 1) / 2 + (j - i - 1))
}

/// All labeled triangulations reachable from `seed` by flips, deduplicated by
/// link set and sorted by their serialized form. Since the flip graph on a
/// fixed node set is connected, this is the full labeled state space; the
/// triangle-set oracle provides the independent count to check that against.
pub fn enumerate_labeled(
    seed: &Triangulation,
    limits: &EnumerationLimits,
) -> Result<Vec<Triangulation>, ExactError> {
    let n = seed.n();
    if n > limits.max_n {
        return Err(ExactError::GuardExceeded(n, limits.max_n));
    }
    if n > MASK_MAX_N {
        return Err(ExactError::GuardExceeded(n, MASK_MAX_N));
    }
    let mut states: Vec<Triangulation> = vec![seed.clone()];
    let mut seen: HashSet<u128> = HashSet::new();
    seen.insert(link_mask(seed));
    let mut i = 0;
    while i < states.len() {
        let t = states[i].clone();
        let m = link_mask(&t);
        for link in t.links() {
            let (c, d) = t.opposite_vertices(link).expect("live link");
            let add = pair_bit(n, c.get(), d.get());
            if m & add != 0 {
                continue; // complementary link present: rejection
            }
            let (a, b) = t.link_endpoints(link).expect("live link");
            let m2 = (m & !pair_bit(n, a.get(), b.get())) | add;
            if seen.insert(m2) {
                let mut u = t.clone();
                u.flip(link).expect("live link");
                states.push(u);
            }
        }
        i += 1;
    }
    states.sort_by_cached_key(|t| t.serialize());
    Ok(states)
}

/// Number of distinct canonical codes among the states.
pub fn count_isomorphism_classes(states: &[Triangulation]) -> Result<usize, ExactError> {
    let mut codes = std::collections::BTreeSet::new();
    for t in states {
        codes.insert(canonical_code(t)?);
    }
    Ok(codes.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn enumerate(n: usize) -> Vec<Triangulation> {
        let seed = Triangulation::christmas_tree(n).unwrap();
        enumerate_labeled(&seed, &EnumerationLimits::default()).unwrap()
    }

    #[test]
    fn single_state_at_n4() {
        let states = enumerate(4);
        assert_eq!(states.len(), 1);
        assert_eq!(count_isomorphism_classes(&states).unwrap(), 1);
    }

    #[test]
    fn ten_labeled_states_at_n5() {
        let states = enumerate(5);
        assert_eq!(states.len(), 10);
        assert_eq!(count_isomorphism_classes(&states).unwrap(), 1);
        for t in &states {
            assert!(t.validate().is_empty());
        }
    }

    #[test]
    fn labeled_states_and_classes_at_n6() {
        let states = enumerate(6);
        assert_eq!(states.len(), 195);
        assert_eq!(count_isomorphism_classes(&states).unwrap(), 2);
    }

    #[test]
    fn bfs_closure_no_escapes() {
        // Every flip from every enumerated state lands inside the enumeration.
        let states = enumerate(6);
        let masks: HashSet<u128> = states.iter().map(link_mask).collect();
        for t in &states {
            for link in t.links() {
                if t.is_flippable(link).unwrap() {
                    let mut u = t.clone();
                    u.flip(link).unwrap();
                    assert!(masks.contains(&link_mask(&u)));
                }
            }
        }
    }

    #[test]
    fn guard_rejects_large_n() {
        let seed = Triangulation::christmas_tree(9).unwrap();
        assert!(matches!(
            enumerate_labeled(&seed, &EnumerationLimits::default()),
            Err(ExactError::GuardExceeded(9, 8))
        ));
    }

    #[test]
    fn output_is_sorted_and_deterministic() {
        let states = enumerate(5);
        let texts: Vec<String> = states.iter().map(|t| t.serialize()).collect();
        let mut sorted = texts.clone();
        sorted.sort();
        assert_eq!(texts, sorted);
    }
}
