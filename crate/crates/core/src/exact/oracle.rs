//! Independent enumeration of labeled sphere triangulations as raw triangle
//! sets. Shares no code with the flip engine: complexes are grown triangle by
//! triangle and checked by first principles, so its count is a genuine oracle
//! for the flip-graph enumeration.
//!
//! Growth scheme: seed with each candidate lex-minimal triangle, then
//! repeatedly complete the lexicographically smallest open edge (an edge in
//! exactly one triangle), branching over the apex. Every closed complex is
//! produced along exactly one path from exactly one seed, so complexes are
//! counted once. A closed complex is accepted iff it has 2n-4 triangles,
//! uses all n vertices and the link of every vertex is a single cycle
//! (together with the Euler count this forces a sphere).

use super::{EnumerationLimits, ExactError};

pub fn oracle_count(n: usize, limits: &EnumerationLimits) -> Result<u64, ExactError> {
    let mut count = 0u64;
    enumerate_impl(n, limits, &mut |_| count += 1)?;
    Ok(count)
}

/// All labeled triangulations of the sphere on nodes `1..n`, each as its
/// sorted triangle list, in deterministic order.
pub fn enumerate_triangle_sets(
    n: usize,
    limits: &EnumerationLimits,
) -> Result<Vec<Vec<[u32; 3]>>, ExactError> {
    let mut out = Vec::new();
    enumerate_impl(n, limits, &mut |tris| out.push(tris.to_vec()))?;
    out.sort_unstable();
    Ok(out)
}

struct Search {
    n: usize,
    max_tris: usize,
    max_edges: usize,
    /// flat n*n matrix: how many accepted triangles contain edge (i,j)
    edge_count: Vec<u8>,
    /// apexes of each edge (at most 2)
    apex: Vec<[u32; 2]>,
    distinct_edges: usize,
    tris: Vec<[u32; 3]>,
    seed: [u32; 3],
}

impl Search {
    fn eix(&self, a: u32, b: u32) -> usize {
        let (i, j) = if a < b { (a, b) } else { (b, a) };
        (i as usize - 1) * self.n + (j as usize - 1)
    }

    fn add(&mut self, t: [u32; 3]) {
        for (x, y, z) in [(t[0], t[1], t[2]), (t[0], t[2], t[1]), (t[1], t[2], t[0])] {
            let e = self.eix(x, y);
            let c = self.edge_count[e];
            if c == 0 {
                self.distinct_edges += 1;
            }
            self.apex[e][c as usize] = z;
            self.edge_count[e] = c + 1;
        }
        self.tris.push(t);
    }

    fn remove(&mut self) {
        let t = self.tris.pop().expect("non-empty");
        for (x, y) in [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])] {
            let e = self.eix(x, y);
            self.edge_count[e] -= 1;
            if self.edge_count[e] == 0 {
                self.distinct_edges -= 1;
            }
        }
    }

    fn smallest_open_edge(&self) -> Option<(u32, u32)> {
        for i in 1..=self.n as u32 {
            for j in (i + 1)..=self.n as u32 {
                if self.edge_count[self.eix(i, j)] == 1 {
                    return Some((i, j));
                }
            }
        }
        None
    }

    fn grow(&mut self, emit: &mut dyn FnMut(&[[u32; 3]])) {
        match self.smallest_open_edge() {
            None => {
                if self.tris.len() == self.max_tris && self.is_sphere() {
                    let mut sorted = self.tris.clone();
                    sorted.sort_unstable();
                    emit(&sorted);
                }
            }
            Some((a, b)) => {
                if self.tris.len() >= self.max_tris {
                    return; // the open edge can never be completed in budget
                }
                let existing = self.apex[self.eix(a, b)][0];
                for c in 1..=self.n as u32 {
                    if c == a || c == b || c == existing {
                        continue;
                    }
                    let mut t = [a, b, c];
                    t.sort_unstable();
                    if t < self.seed {
                        continue;
                    }
                    let (ea, eb) = (self.eix(a, c), self.eix(b, c));
                    if self.edge_count[ea] >= 2 || self.edge_count[eb] >= 2 {
                        continue;
                    }
                    let new_edges = (self.edge_count[ea] == 0) as usize
                        + (self.edge_count[eb] == 0) as usize;
                    if self.distinct_edges + new_edges > self.max_edges {
                        continue;
                    }
                    self.add(t);
                    self.grow(emit);
                    self.remove();
                }
            }
        }
    }

    /// Edge-closed complex with 2n-4 triangles: verify all n vertices occur
    /// and each vertex link is one cycle.
    fn is_sphere(&self) -> bool {
        let n = self.n;
        // link graph of every vertex: adjacency lists among its neighbors
        let mut nbrs: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n + 1];
        for t in &self.tris {
            let [a, b, c] = *t;
            nbrs[a as usize].push((b, c));
            nbrs[b as usize].push((a, c));
            nbrs[c as usize].push((a, b));
        }
        for v in 1..=n {
            let pairs = &nbrs[v];
            if pairs.is_empty() {
                return false; // vertex unused
            }
            // degree of each link-graph vertex must be 2 and the graph connected
            let mut adj: std::collections::HashMap<u32, Vec<u32>> =
                std::collections::HashMap::new();
            for &(x, y) in pairs {
                adj.entry(x).or_default().push(y);
                adj.entry(y).or_default().push(x);
            }
            if adj.values().any(|l| l.len() != 2) {
                return false;
            }
            let start = *adj.keys().min().expect("non-empty");
            let mut seen = std::collections::HashSet::from([start]);
            let mut stack = vec![start];
            while let Some(x) = stack.pop() {
                for &y in &adj[&x] {
                    if seen.insert(y) {
                        stack.push(y);
                    }
                }
            }
            if seen.len() != adj.len() {
                return false; // pinched vertex: link splits into several cycles
            }
        }
        true
    }
}

fn enumerate_impl(
    n: usize,
    limits: &EnumerationLimits,
    emit: &mut dyn FnMut(&[[u32; 3]]),
) -> Result<(), ExactError> {
    if n < 4 {
        return Err(ExactError::Tri(
            crate::triangulation::TriError::TooFewNodes(n),
        ));
    }
    if n > limits.max_n {
        return Err(ExactError::GuardExceeded(n, limits.max_n));
    }
    for a in 1..=(n as u32 - 2) {
        for b in (a + 1)..=(n as u32 - 1) {
            for c in (b + 1)..=(n as u32) {
                let seed = [a, b, c];
                let mut search = Search {
                    n,
                    max_tris: 2 * n - 4,
                    max_edges: 3 * n - 6,
                    edge_count: vec![0; n * n],
                    apex: vec![[0, 0]; n * n],
                    distinct_edges: 0,
                    tris: Vec::with_capacity(2 * n - 4),
                    seed,
                };
                search.add(seed);
                search.grow(emit);
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_flip_graph_at_small_n() {
        let limits = EnumerationLimits::default();
        assert_eq!(oracle_count(4, &limits).unwrap(), 1);
        assert_eq!(oracle_count(5, &limits).unwrap(), 10);
        assert_eq!(oracle_count(6, &limits).unwrap(), 195);
    }

    #[test]
    fn sets_are_valid_triangulations() {
        let limits = EnumerationLimits::default();
        for tris in enumerate_triangle_sets(5, &limits).unwrap() {
            let t = crate::triangulation::Triangulation::from_triangles(5, &tris).unwrap();
            assert!(t.validate().is_empty());
        }
    }

    #[test]
    fn rejects_sub_complexes_on_fewer_vertices() {
        // All complexes must use all n labels: none of the n=5 sets may be a
        // tetrahedron on 4 of the labels.
        let limits = EnumerationLimits::default();
        for tris in enumerate_triangle_sets(5, &limits).unwrap() {
            let mut used: std::collections::HashSet<u32> = std::collections::HashSet::new();
            for t in &tris {
                used.extend(t.iter().copied());
            }
            assert_eq!(used.len(), 5);
        }
    }
}
