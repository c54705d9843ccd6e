//! Canonical codes for triangulations, used to count isomorphism classes.
//!
//! Two triangulations receive equal codes iff they are combinatorially
//! isomorphic as unrooted maps, orientation-preserving or reversing. The code
//! is the lexicographic minimum, over all 2(3n-6) directed starting links and
//! both orientations, of a breadth-first traversal label sequence: vertices
//! are numbered in discovery order and each vertex emits the labels of its
//! neighbors in rotation order starting from its parent, terminated by 0.
//! Cost is O(n^2); intended for small n only.

use std::collections::HashMap;

use super::{TriError, Triangulation};

/// Opaque canonical form; equal iff isomorphic.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalCode(Vec<u8>);

impl CanonicalCode {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

/// Largest node count accepted by `canonical_code`; the successor table is
/// dense, so the quadratic cost and memory are only reasonable at small n.
pub const MAX_CANONICAL_NODES: usize = 2048;

/// Computes the canonical code of a valid triangulation.
pub fn canonical_code(t: &Triangulation) -> Result<CanonicalCode, TriError> {
    let n = t.n();
    if n > MAX_CANONICAL_NODES {
        return Err(TriError::TooManyNodes(n, MAX_CANONICAL_NODES));
    }
    let third = oriented_third(t)?;
    let degrees: Vec<usize> = t.degrees().collect();
    let code_len = 7 * n - 12;

    let mut best: Option<Vec<u16>> = None;
    let mut label = vec![0u16; n];
    let mut touched: Vec<u32> = Vec::with_capacity(n);
    let mut order: Vec<u32> = Vec::with_capacity(n);
    let mut first_nbr = vec![0u32; n];
    let mut code: Vec<u16> = Vec::with_capacity(code_len);

    for (a, b) in t.link_pairs() {
        let (a, b) = (a - 1, b - 1);
        for (s, start) in [(a, b), (b, a)] {
            for mirror in [false, true] {
                code.clear();
                order.clear();
                for &v in &touched {
                    label[v as usize] = 0;
                }
                touched.clear();

                label[s as usize] = 1;
                touched.push(s);
                label[start as usize] = 2;
                touched.push(start);
                order.push(s);
                order.push(start);
                first_nbr[s as usize] = start;
                first_nbr[start as usize] = s;
                let mut next_label = 3u16;

                let mut qi = 0;
                let mut ok = true;
                while qi < order.len() {
                    let u = order[qi];
                    qi += 1;
                    let v0 = first_nbr[u as usize];
                    let mut v = v0;
                    for _ in 0..degrees[u as usize] {
                        if label[v as usize] == 0 {
                            label[v as usize] = next_label;
                            next_label += 1;
                            touched.push(v);
                            order.push(v);
                            first_nbr[v as usize] = u;
                        }
                        code.push(label[v as usize]);
                        v = if mirror {
                            third[(v as usize) * n + u as usize]
                        } else {
                            third[(u as usize) * n + v as usize]
                        };
                        if v == u32::MAX {
                            ok = false;
                            break;
                        }
                    }
                    if !ok || v != v0 {
                        return Err(TriError::NotATriangulation(format!(
                            "rotation around node {} does not close",
                            u + 1
                        )));
                    }
                    code.push(0);
                }
                if order.len() != n {
                    return Err(TriError::NotATriangulation(
                        "traversal did not reach every node".into(),
                    ));
                }
                match &best {
                    Some(b) if *b <= code => {}
                    _ => best = Some(code.clone()),
                }
            }
        }
    }

    let best = best.ok_or_else(|| TriError::NotATriangulation("no links".into()))?;
    debug_assert_eq!(best.len(), code_len);
    let mut bytes = Vec::with_capacity(best.len() * 2);
    for sym in best {
        bytes.extend_from_slice(&sym.to_be_bytes());
    }
    Ok(CanonicalCode(bytes))
}

/// Coherently orients all triangles and returns the successor table:
/// `third[u*n + v] = w` means `(u, v, w)` is a positively oriented triangle,
/// equivalently `w` follows `v` in the rotation around `u`.
fn oriented_third(t: &Triangulation) -> Result<Vec<u32>, TriError> {
    let n = t.n();
    let tris: Vec<[u32; 3]> = t
        .triangle_list()
        .iter()
        .map(|t| t.map(|x| x - 1))
        .collect();
    let mut edge_tris: HashMap<(u32, u32), Vec<usize>> = HashMap::new();
    for (i, tri) in tris.iter().enumerate() {
        let [a, b, c] = *tri;
        for (x, y) in [(a, b), (a, c), (b, c)] {
            edge_tris.entry((x.min(y), x.max(y))).or_default().push(i);
        }
    }
    for (e, v) in &edge_tris {
        if v.len() != 2 {
            return Err(TriError::NotATriangulation(format!(
                "link {}-{} lies in {} triangles",
                e.0 + 1,
                e.1 + 1,
                v.len()
            )));
        }
    }

    let mut oriented: Vec<Option<[u32; 3]>> = vec![None; tris.len()];
    oriented[0] = Some(tris[0]);
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let [x, y, z] = oriented[i].unwrap();
        for (u, v) in [(x, y), (y, z), (z, x)] {
            let key = (u.min(v), u.max(v));
            for &j in &edge_tris[&key] {
                if j == i {
                    continue;
                }
                let other = tris[j]
                    .iter()
                    .copied()
                    .find(|&w| w != u && w != v)
                    .expect("shared edge neighbor has a third vertex");
                match oriented[j] {
                    None => {
                        oriented[j] = Some([v, u, other]);
                        queue.push_back(j);
                    }
                    Some(o) => {
                        let has_vu = [(o[0], o[1]), (o[1], o[2]), (o[2], o[0])]
                            .contains(&(v, u));
                        if !has_vu {
                            return Err(TriError::NotATriangulation(
                                "triangle orientations cannot be made coherent".into(),
                            ));
                        }
                    }
                }
            }
        }
    }

    let mut third = vec![u32::MAX; n * n];
    for o in oriented {
        let [x, y, z] = o.ok_or_else(|| {
            TriError::NotATriangulation("triangle adjacency is not connected".into())
        })?;
        for (u, v, w) in [(x, y, z), (y, z, x), (z, x, y)] {
            let cell = &mut third[(u as usize) * n + v as usize];
            if *cell != u32::MAX {
                return Err(TriError::NotATriangulation(format!(
                    "directed edge {}->{} lies in two positively oriented triangles",
                    u + 1,
                    v + 1
                )));
            }
            *cell = w;
        }
    }
    Ok(third)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triangulation::Triangulation;

    #[test]
    fn tetrahedron_matches_smallest_tree() {
        let a = canonical_code(&Triangulation::tetrahedron()).unwrap();
        let b = canonical_code(&Triangulation::christmas_tree(4).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn invariant_under_relabeling() {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for n in [5usize, 6, 7, 9] {
            let t = Triangulation::christmas_tree(n).unwrap();
            let base = canonical_code(&t).unwrap();
            for _ in 0..5 {
                let mut perm: Vec<u32> = (1..=n as u32).collect();
                perm.shuffle(&mut rng);
                let u = t.apply_relabeling(&perm).unwrap();
                assert_eq!(canonical_code(&u).unwrap(), base, "n={n} perm={perm:?}");
            }
        }
    }

    #[test]
    fn distinguishes_the_two_hexahedral_types() {
        // Octahedron vs the stacked 6-node triangulation.
        let octa = Triangulation::from_triangles(
            6,
            &[
                [1, 2, 5],
                [2, 3, 5],
                [3, 4, 5],
                [1, 4, 5],
                [1, 2, 6],
                [2, 3, 6],
                [3, 4, 6],
                [1, 4, 6],
            ],
        )
        .unwrap();
        let stacked = Triangulation::christmas_tree(6).unwrap();
        assert_ne!(
            canonical_code(&octa).unwrap(),
            canonical_code(&stacked).unwrap()
        );
    }
}
