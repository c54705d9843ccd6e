//! Combinatorial triangulations of the sphere with constant-expected-time
//! edge flips.
//!
//! A triangulation on `n` labeled nodes `1..n` is stored as a table of
//! 3n-6 link slots. Each slot knows its two endpoints, the two opposite
//! vertices of the two triangles sharing the link, and the positions of the
//! link inside its endpoints' incidence lists. A flip re-keys one slot
//! (bumping a generation counter so stale handles are detected), patches the
//! incidence lists of the four corner nodes and the opposite-vertex records
//! of the at most four quadrilateral boundary links. No hashing is involved:
//! adjacency queries scan the incidence list of the lower-degree endpoint,
//! which is constant time in expectation because the average degree is below
//! six in every triangulation of the sphere.

mod canonical;
mod serial;

pub use canonical::{canonical_code, CanonicalCode};

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Label of a node; stable over the lifetime of a triangulation, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(u32);

impl NodeId {
    pub fn new(label: u32) -> Self {
        NodeId(label)
    }

    /// The 1-based label.
    pub fn get(self) -> u32 {
        self.0
    }

    fn ix(self) -> usize {
        self.0 as usize - 1
    }

    fn from_ix(ix: u32) -> Self {
        NodeId(ix + 1)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Handle for a live undirected link. A flip retires the handle of the link
/// it removes and issues a fresh one for the link it inserts; retired handles
/// are rejected by every operation that takes a `LinkId`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LinkId {
    slot: u32,
    gen: u32,
}

impl LinkId {
    pub(crate) fn slot(self) -> usize {
        self.slot as usize
    }
}

impl fmt::Display for LinkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "link#{}.{}", self.slot, self.gen)
    }
}

/// Result of attempting a flip.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlipOutcome {
    /// The link `removed` was erased and `added` inserted in its place.
    Flipped {
        removed: (NodeId, NodeId),
        added: (NodeId, NodeId),
    },
    /// The complementary link already existed; the triangulation is unchanged.
    Rejected,
}

impl FlipOutcome {
    pub fn is_flipped(&self) -> bool {
        matches!(self, FlipOutcome::Flipped { .. })
    }
}

#[derive(Debug, Error)]
pub enum TriError {
    #[error("a triangulation of the sphere needs at least 4 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("node count {0} exceeds the supported maximum {1}")]
    TooManyNodes(usize, usize),
    #[error("stale or unknown {0}")]
    StaleLink(LinkId),
    #[error("node {0} is outside 1..={1}")]
    UnknownNode(NodeId, usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("not a triangulation of the sphere: {0}")]
    NotATriangulation(String),
}

/// A violated structural invariant, as data rather than an error.
#[derive(Debug, Clone)]
pub struct Violation {
    pub invariant: &'static str,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.invariant, self.detail)
    }
}

/// One link slot. `ends` are 0-based node indices; `opp` are the two
/// opposite vertices (the apexes of the two triangles sharing the link);
/// `pos[k]` is the index of this slot inside `incidence[ends[k]]`.
#[derive(Debug, Clone, Copy)]
struct LinkRecord {
    ends: [u32; 2],
    opp: [u32; 2],
    pos: [u32; 2],
    gen: u32,
}

/// Mutable combinatorial triangulation of the sphere on labeled nodes `1..n`.
#[derive(Debug, Clone)]
pub struct Triangulation {
    n: usize,
    records: Vec<LinkRecord>,
    /// Per node: `(slot, other_end)` for each incident link. Supports O(1)
    /// uniform sampling, O(1) append and O(1) swap-remove.
    incidence: Vec<Vec<(u32, u32)>>,
}

const MAX_NODES: usize = u16::MAX as usize;

impl Triangulation {
    /// The unique triangulation on 4 nodes (the complete graph K4).
    pub fn tetrahedron() -> Self {
        Self::christmas_tree(4).expect("n=4 is valid")
    }

    /// Deterministic double-wheel triangulation: hubs 1 and 2 joined to each
    /// other and to every node of the path 3-4-...-n. Degrees are
    /// d1 = d2 = n-1, d3 = dn = 3 and 4 elsewhere. Every triangulation can be
    /// reached from it by flips.
    pub fn christmas_tree(n: usize) -> Result<Self, TriError> {
        if n < 4 {
            return Err(TriError::TooFewNodes(n));
        }
        let n32 = n as u32;
        let mut tris: Vec<[u32; 3]> = vec![[1, 2, 3], [1, 2, n32]];
        for i in 3..n32 {
            tris.push([1, i, i + 1]);
            tris.push([2, i, i + 1]);
        }
        Self::from_triangles(n, &tris)
    }

    /// Builds a triangulation from its full triangle list (1-based labels).
    /// The list must describe a simplicial triangulation of the sphere on
    /// exactly the nodes `1..n`; every structural invariant is checked.
    pub fn from_triangles(n: usize, tris: &[[u32; 3]]) -> Result<Self, TriError> {
        if n < 4 {
            return Err(TriError::TooFewNodes(n));
        }
        if n > MAX_NODES {
            return Err(TriError::TooManyNodes(n, MAX_NODES));
        }
        let bad = |msg: String| TriError::NotATriangulation(msg);
        if tris.len() != 2 * n - 4 {
            return Err(bad(format!(
                "expected {} triangles for n={}, got {}",
                2 * n - 4,
                n,
                tris.len()
            )));
        }
        // Collect links and their apexes (0-based from here on).
        let mut apexes: BTreeMap<(u32, u32), Vec<u32>> = BTreeMap::new();
        for t in tris {
            let [a, b, c] = *t;
            if a == b || a == c || b == c {
                return Err(bad(format!("degenerate triangle {a} {b} {c}")));
            }
            for x in [a, b, c] {
                if x < 1 || x as usize > n {
                    return Err(bad(format!("node {x} outside 1..={n}")));
                }
            }
            let (a, b, c) = (a - 1, b - 1, c - 1);
            for ((x, y), z) in [((a, b), c), ((a, c), b), ((b, c), a)] {
                let key = (x.min(y), x.max(y));
                let entry = apexes.entry(key).or_default();
                if entry.len() == 2 {
                    return Err(bad(format!(
                        "link {}-{} lies in more than two triangles",
                        key.0 + 1,
                        key.1 + 1
                    )));
                }
                entry.push(z);
            }
        }
        if apexes.len() != 3 * n - 6 {
            return Err(bad(format!(
                "expected {} links, found {}",
                3 * n - 6,
                apexes.len()
            )));
        }
        let mut records = Vec::with_capacity(apexes.len());
        let mut incidence: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n];
        for (&(a, b), opp) in &apexes {
            if opp.len() != 2 {
                return Err(bad(format!(
                    "link {}-{} lies in {} triangle(s), expected two",
                    a + 1,
                    b + 1,
                    opp.len()
                )));
            }
            let slot = records.len() as u32;
            let pa = incidence[a as usize].len() as u32;
            incidence[a as usize].push((slot, b));
            let pb = incidence[b as usize].len() as u32;
            incidence[b as usize].push((slot, a));
            records.push(LinkRecord {
                ends: [a, b],
                opp: [opp[0], opp[1]],
                pos: [pa, pb],
                gen: 0,
            });
        }
        let t = Triangulation {
            n,
            records,
            incidence,
        };
        let violations = t.validate();
        if let Some(v) = violations.first() {
            return Err(bad(format!("{} ({} violation(s) total)", v, violations.len())));
        }
        Ok(t)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of live links; always 3n-6.
    pub fn num_links(&self) -> usize {
        self.records.len()
    }

    /// Number of triangles; always 2n-4.
    pub fn num_triangles(&self) -> usize {
        2 * self.n - 4
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> {
        (1..=self.n as u32).map(NodeId)
    }

    /// Iterates over all live link handles.
    pub fn links(&self) -> impl Iterator<Item = LinkId> + '_ {
        self.records
            .iter()
            .enumerate()
            .map(|(slot, r)| LinkId {
                slot: slot as u32,
                gen: r.gen,
            })
    }

    fn check_node(&self, v: NodeId) -> Result<u32, TriError> {
        if v.0 < 1 || v.0 as usize > self.n {
            return Err(TriError::UnknownNode(v, self.n));
        }
        Ok(v.0 - 1)
    }

    fn check_live(&self, l: LinkId) -> Result<usize, TriError> {
        let slot = l.slot as usize;
        if slot >= self.records.len() || self.records[slot].gen != l.gen {
            return Err(TriError::StaleLink(l));
        }
        Ok(slot)
    }

    pub(crate) fn link_at_slot(&self, slot: usize) -> LinkId {
        LinkId {
            slot: slot as u32,
            gen: self.records[slot].gen,
        }
    }

    /// The two endpoints of a live link.
    pub fn link_endpoints(&self, l: LinkId) -> Result<(NodeId, NodeId), TriError> {
        let slot = self.check_live(l)?;
        let [a, b] = self.records[slot].ends;
        Ok((NodeId::from_ix(a), NodeId::from_ix(b)))
    }

    /// The two opposite vertices of a live link: the apexes `C`, `D` of the
    /// two triangles `(A,B,C)` and `(A,B,D)` sharing the link.
    pub fn opposite_vertices(&self, l: LinkId) -> Result<(NodeId, NodeId), TriError> {
        let slot = self.check_live(l)?;
        let [c, d] = self.records[slot].opp;
        Ok((NodeId::from_ix(c), NodeId::from_ix(d)))
    }

    /// Whether `i` and `j` are joined by a link.
    pub fn are_linked(&self, i: NodeId, j: NodeId) -> Result<bool, TriError> {
        let a = self.check_node(i)?;
        let b = self.check_node(j)?;
        Ok(self.slot_between(a, b).is_some())
    }

    /// The link joining `i` and `j`, if any.
    pub fn link_between(&self, i: NodeId, j: NodeId) -> Result<Option<LinkId>, TriError> {
        let a = self.check_node(i)?;
        let b = self.check_node(j)?;
        Ok(self.slot_between(a, b).map(|s| self.link_at_slot(s as usize)))
    }

    /// Degree of a node.
    pub fn degree(&self, v: NodeId) -> Result<usize, TriError> {
        let ix = self.check_node(v)?;
        Ok(self.incidence[ix as usize].len())
    }

    pub(crate) fn degree_ix(&self, ix: u32) -> usize {
        self.incidence[ix as usize].len()
    }

    /// Degrees of all nodes in label order.
    pub fn degrees(&self) -> impl Iterator<Item = usize> + '_ {
        self.incidence.iter().map(Vec::len)
    }

    /// `(node, degree)` pairs in label order. The degree sum is 6n-12.
    pub fn degree_sequence(&self) -> Vec<(NodeId, usize)> {
        self.incidence
            .iter()
            .enumerate()
            .map(|(i, inc)| (NodeId::from_ix(i as u32), inc.len()))
            .collect()
    }

    /// True iff the complementary link of `l` is absent, i.e. the flip of `l`
    /// would be accepted.
    pub fn is_flippable(&self, l: LinkId) -> Result<bool, TriError> {
        let slot = self.check_live(l)?;
        Ok(self.is_flippable_slot(slot))
    }

    fn is_flippable_slot(&self, slot: usize) -> bool {
        let [c, d] = self.records[slot].opp;
        self.slot_between(c, d).is_none()
    }

    /// Erases `l = {A,B}` and inserts the complementary link `{C,D}` if it is
    /// absent; otherwise leaves the triangulation unchanged. Degrees change by
    /// -1 at A, B and +1 at C, D; the opposite-vertex records of the at most
    /// four quadrilateral boundary links are patched in place.
    pub fn flip(&mut self, l: LinkId) -> Result<FlipOutcome, TriError> {
        let slot = self.check_live(l)?;
        Ok(self.flip_slot(slot))
    }

    pub(crate) fn flip_slot(&mut self, slot: usize) -> FlipOutcome {
        let rec = self.records[slot];
        let [a, b] = rec.ends;
        let [c, d] = rec.opp;
        if self.slot_between(c, d).is_some() {
            return FlipOutcome::Rejected;
        }
        // Detach the slot from the incidence lists of a and b.
        self.remove_incidence(a, rec.pos[0]);
        self.remove_incidence(b, rec.pos[1]);
        // Attach it to c and d.
        let pc = self.incidence[c as usize].len() as u32;
        self.incidence[c as usize].push((slot as u32, d));
        let pd = self.incidence[d as usize].len() as u32;
        self.incidence[d as usize].push((slot as u32, c));
        self.records[slot] = LinkRecord {
            ends: [c, d],
            opp: [a, b],
            pos: [pc, pd],
            gen: rec.gen.wrapping_add(1),
        };
        // Triangles (a,b,c) and (a,b,d) became (a,c,d) and (b,c,d); patch the
        // apex records of the quadrilateral boundary.
        self.replace_apex(a, c, b, d);
        self.replace_apex(b, c, a, d);
        self.replace_apex(b, d, a, c);
        self.replace_apex(a, d, b, c);
        FlipOutcome::Flipped {
            removed: (NodeId::from_ix(a), NodeId::from_ix(b)),
            added: (NodeId::from_ix(c), NodeId::from_ix(d)),
        }
    }

    fn remove_incidence(&mut self, node: u32, pos: u32) {
        let list = &mut self.incidence[node as usize];
        list.swap_remove(pos as usize);
        if (pos as usize) < list.len() {
            let (moved_slot, _) = list[pos as usize];
            let r = &mut self.records[moved_slot as usize];
            if r.ends[0] == node {
                r.pos[0] = pos;
            } else {
                debug_assert_eq!(r.ends[1], node);
                r.pos[1] = pos;
            }
        }
    }

    fn replace_apex(&mut self, x: u32, y: u32, old: u32, new: u32) {
        let slot = self
            .slot_between(x, y)
            .expect("quadrilateral boundary link must exist");
        let r = &mut self.records[slot as usize];
        if r.opp[0] == old {
            r.opp[0] = new;
        } else {
            debug_assert_eq!(r.opp[1], old);
            r.opp[1] = new;
        }
    }

    /// Adjacency query on 0-based indices; scans the incidence list of the
    /// lower-degree endpoint (constant expected length).
    fn slot_between(&self, x: u32, y: u32) -> Option<u32> {
        let lx = &self.incidence[x as usize];
        let ly = &self.incidence[y as usize];
        let (list, target) = if lx.len() <= ly.len() {
            (lx, y)
        } else {
            (ly, x)
        };
        list.iter().find(|&&(_, o)| o == target).map(|&(s, _)| s)
    }

    pub(crate) fn incident_slots(&self, ix: u32) -> &[(u32, u32)] {
        &self.incidence[ix as usize]
    }

    /// The link set as sorted 1-based node pairs.
    pub fn link_pairs(&self) -> Vec<(u32, u32)> {
        let mut out: Vec<(u32, u32)> = self
            .records
            .iter()
            .map(|r| {
                let (a, b) = (r.ends[0] + 1, r.ends[1] + 1);
                (a.min(b), a.max(b))
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Link-set equality, the natural identity on labeled triangulations.
    pub fn same_link_set(&self, other: &Triangulation) -> bool {
        self.n == other.n && self.link_pairs() == other.link_pairs()
    }

    /// All triangles as sorted 1-based triples, lexicographically ordered.
    pub fn triangle_list(&self) -> Vec<[u32; 3]> {
        let mut set: Vec<[u32; 3]> = Vec::with_capacity(3 * (2 * self.n - 4));
        for r in &self.records {
            let [a, b] = r.ends;
            for apex in r.opp {
                let mut t = [a + 1, b + 1, apex + 1];
                t.sort_unstable();
                set.push(t);
            }
        }
        set.sort_unstable();
        set.dedup();
        set
    }

    /// Relabels the nodes: `perm[old_label - 1] = new_label`. The permutation
    /// must be a bijection on `1..=n`.
    pub fn apply_relabeling(&self, perm: &[u32]) -> Result<Triangulation, TriError> {
        if perm.len() != self.n {
            return Err(TriError::NotATriangulation(format!(
                "relabeling has {} entries for n={}",
                perm.len(),
                self.n
            )));
        }
        let tris: Vec<[u32; 3]> = self
            .triangle_list()
            .iter()
            .map(|t| t.map(|x| perm[x as usize - 1]))
            .collect();
        Self::from_triangles(self.n, &tris)
    }

    /// Checks every structural invariant and returns the violations found.
    /// An empty result certifies: Euler counts, simple graph, two triangles
    /// per link with distinct apexes, minimum degree 3, handshake sum,
    /// incidence/adjacency/back-reference consistency, single-cycle vertex
    /// links and connectivity.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.n;
        let mut push = |invariant: &'static str, detail: String| {
            out.push(Violation { invariant, detail });
        };
        if self.records.len() != 3 * n - 6 {
            push(
                "euler link count",
                format!("{} links, expected {}", self.records.len(), 3 * n - 6),
            );
        }
        // Simplicity and basic record sanity.
        let mut seen_pairs = std::collections::HashSet::new();
        for (slot, r) in self.records.iter().enumerate() {
            let [a, b] = r.ends;
            let [c, d] = r.opp;
            if a == b {
                push("no loops", format!("slot {slot} joins node {} to itself", a + 1));
                continue;
            }
            if a as usize >= n || b as usize >= n || c as usize >= n || d as usize >= n {
                push("node range", format!("slot {slot} references a node outside 1..={n}"));
                continue;
            }
            if !seen_pairs.insert((a.min(b), a.max(b))) {
                push(
                    "no parallel links",
                    format!("link {}-{} occurs twice", a.min(b) + 1, a.max(b) + 1),
                );
            }
            if c == d {
                push(
                    "distinct opposite vertices",
                    format!("link {}-{} has apex {} on both sides", a + 1, b + 1, c + 1),
                );
            }
            if c == a || c == b || d == a || d == b {
                push(
                    "apex disjoint from endpoints",
                    format!("link {}-{} has an endpoint as apex", a + 1, b + 1),
                );
            }
        }
        // Apexes must be realized by links: each triangle edge exists.
        for (slot, r) in self.records.iter().enumerate() {
            let [a, b] = r.ends;
            for apex in r.opp {
                if self.slot_between(a, apex).is_none() || self.slot_between(b, apex).is_none() {
                    push(
                        "triangle closure",
                        format!(
                            "slot {slot}: triangle {}-{}-{} is missing a side",
                            a + 1,
                            b + 1,
                            apex + 1
                        ),
                    );
                }
            }
        }
        // Triangle multiset: every sorted triple must appear exactly 3 times
        // (once per side), and the number of distinct triangles must be 2n-4.
        let mut triples: Vec<[u32; 3]> = Vec::new();
        for r in &self.records {
            let [a, b] = r.ends;
            for apex in r.opp {
                let mut t = [a, b, apex];
                t.sort_unstable();
                triples.push(t);
            }
        }
        triples.sort_unstable();
        let mut distinct = 0usize;
        let mut i = 0;
        while i < triples.len() {
            let mut j = i;
            while j < triples.len() && triples[j] == triples[i] {
                j += 1;
            }
            distinct += 1;
            if j - i != 3 {
                let t = triples[i];
                push(
                    "two triangles per link",
                    format!(
                        "triangle {}-{}-{} is recorded by {} of its 3 sides",
                        t[0] + 1,
                        t[1] + 1,
                        t[2] + 1,
                        j - i
                    ),
                );
            }
            i = j;
        }
        if distinct != 2 * n - 4 {
            push(
                "euler triangle count",
                format!("{} triangles, expected {}", distinct, 2 * n - 4),
            );
        }
        // Degrees.
        let mut degree_sum = 0usize;
        for (ix, inc) in self.incidence.iter().enumerate() {
            degree_sum += inc.len();
            if inc.len() < 3 {
                push(
                    "minimum degree 3",
                    format!("node {} has degree {}", ix + 1, inc.len()),
                );
            }
        }
        if degree_sum != 6 * n - 12 {
            push(
                "handshake sum",
                format!("degree sum {}, expected {}", degree_sum, 6 * n - 12),
            );
        }
        // Incidence lists versus records.
        for (ix, inc) in self.incidence.iter().enumerate() {
            let ix = ix as u32;
            for (pos, &(slot, other)) in inc.iter().enumerate() {
                if slot as usize >= self.records.len() {
                    push(
                        "incidence consistency",
                        format!("node {}: dangling slot {}", ix + 1, slot),
                    );
                    continue;
                }
                let r = &self.records[slot as usize];
                let side = if r.ends[0] == ix {
                    0
                } else if r.ends[1] == ix {
                    1
                } else {
                    push(
                        "incidence consistency",
                        format!("node {} lists slot {} but is not an endpoint", ix + 1, slot),
                    );
                    continue;
                };
                if r.ends[1 - side] != other {
                    push(
                        "incidence consistency",
                        format!(
                            "node {}: cached far end {} of slot {} disagrees with record",
                            ix + 1,
                            other + 1,
                            slot
                        ),
                    );
                }
                if r.pos[side] as usize != pos {
                    push(
                        "incidence back-reference",
                        format!("slot {} position in node {}'s list is stale", slot, ix + 1),
                    );
                }
            }
        }
        // Every record must be present in both endpoint lists exactly once.
        for (slot, r) in self.records.iter().enumerate() {
            for side in 0..2 {
                let node = r.ends[side] as usize;
                if node >= n {
                    continue;
                }
                let count = self.incidence[node]
                    .iter()
                    .filter(|&&(s, _)| s as usize == slot)
                    .count();
                if count != 1 {
                    push(
                        "incidence coverage",
                        format!(
                            "slot {} appears {} times in node {}'s incidence list",
                            slot,
                            count,
                            node + 1
                        ),
                    );
                }
            }
        }
        // The link of every vertex must be a single cycle through all its
        // neighbors (rules out pinched complexes).
        for v in 0..n as u32 {
            if let Some(detail) = self.vertex_link_defect(v) {
                push("vertex link is a single cycle", detail);
            }
        }
        // Connectivity.
        if n > 0 {
            let mut seen = vec![false; n];
            let mut stack = vec![0u32];
            seen[0] = true;
            let mut count = 1;
            while let Some(v) = stack.pop() {
                for &(_, o) in &self.incidence[v as usize] {
                    if (o as usize) < n && !seen[o as usize] {
                        seen[o as usize] = true;
                        count += 1;
                        stack.push(o);
                    }
                }
            }
            if count != n {
                push(
                    "connectivity",
                    format!("only {count} of {n} nodes reachable"),
                );
            }
        }
        out
    }

    /// Walks the rotation around `v` induced by the apex records; returns a
    /// description of the defect if the walk does not close into one cycle
    /// covering all neighbors.
    fn vertex_link_defect(&self, v: u32) -> Option<String> {
        let inc = &self.incidence[v as usize];
        let deg = inc.len();
        if deg < 3 {
            return None; // already reported as a degree violation
        }
        let start = inc[0].1;
        let first_slot = inc[0].0;
        let [c, d] = self.records[first_slot as usize].opp;
        let mut prev = start;
        let mut cur = c.min(d); // deterministic direction
        let mut steps = 1;
        while cur != start {
            if steps > deg {
                return Some(format!("node {}: rotation walk does not close", v + 1));
            }
            let slot = match self.slot_between(v, cur) {
                Some(s) => s,
                None => return Some(format!("node {}: rotation reaches a non-neighbor", v + 1)),
            };
            let [p, q] = self.records[slot as usize].opp;
            let next = if p == prev {
                q
            } else if q == prev {
                p
            } else {
                return Some(format!(
                    "node {}: apexes of link to {} do not chain the rotation",
                    v + 1,
                    cur + 1
                ));
            };
            prev = cur;
            cur = next;
            steps += 1;
        }
        if steps != deg {
            return Some(format!(
                "node {}: rotation closes after {} of {} neighbors",
                v + 1,
                steps,
                deg
            ));
        }
        None
    }

    #[cfg(test)]
    pub(crate) fn corrupt_incidence_for_test(&mut self, node: usize, entry: usize, other: u32) {
        self.incidence[node][entry].1 = other;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn link(t: &Triangulation, a: u32, b: u32) -> LinkId {
        t.link_between(NodeId::new(a), NodeId::new(b))
            .unwrap()
            .unwrap_or_else(|| panic!("link {a}-{b} should exist"))
    }

    #[test]
    fn tetrahedron_is_k4() {
        let t = Triangulation::tetrahedron();
        assert_eq!(t.n(), 4);
        assert_eq!(t.num_links(), 6);
        assert_eq!(
            t.link_pairs(),
            vec![(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]
        );
        assert!(t.degrees().all(|d| d == 3));
        assert_eq!(t.num_triangles(), 4);
        assert!(t.validate().is_empty());
    }

    #[test]
    fn christmas_tree_four_is_tetrahedron() {
        let t = Triangulation::christmas_tree(4).unwrap();
        assert!(t.same_link_set(&Triangulation::tetrahedron()));
    }

    #[test]
    fn christmas_tree_rejects_small_n() {
        assert!(matches!(
            Triangulation::christmas_tree(3),
            Err(TriError::TooFewNodes(3))
        ));
    }

    #[test]
    fn christmas_tree_seven_degrees() {
        let t = Triangulation::christmas_tree(7).unwrap();
        let degs: Vec<usize> = t.degrees().collect();
        assert_eq!(degs, vec![6, 6, 3, 4, 4, 4, 3]);
        assert_eq!(degs.iter().sum::<usize>(), 2 * (3 * 7 - 6));
        assert!(t.validate().is_empty());
    }

    #[test]
    fn christmas_tree_hundred_validates() {
        let t = Triangulation::christmas_tree(100).unwrap();
        assert!(t.validate().is_empty());
    }

    #[test]
    fn opposite_vertices_examples() {
        let t = Triangulation::tetrahedron();
        let (c, d) = t.opposite_vertices(link(&t, 1, 2)).unwrap();
        assert_eq!(
            (c.get().min(d.get()), c.get().max(d.get())),
            (3, 4)
        );

        let t = Triangulation::christmas_tree(7).unwrap();
        let (c, d) = t.opposite_vertices(link(&t, 1, 4)).unwrap();
        assert_eq!((c.get().min(d.get()), c.get().max(d.get())), (3, 5));
        let (c, d) = t.opposite_vertices(link(&t, 2, 5)).unwrap();
        assert_eq!((c.get().min(d.get()), c.get().max(d.get())), (4, 6));
    }

    #[test]
    fn tetrahedron_is_frozen() {
        let t = Triangulation::tetrahedron();
        for l in t.links().collect::<Vec<_>>() {
            assert!(!t.is_flippable(l).unwrap());
        }
        let mut t = t;
        let l = link(&t, 1, 2);
        assert_eq!(t.flip(l).unwrap(), FlipOutcome::Rejected);
        assert!(t.validate().is_empty());
    }

    #[test]
    fn flip_and_involution() {
        let mut t = Triangulation::christmas_tree(7).unwrap();
        let before = t.link_pairs();
        let out = t.flip(link(&t, 1, 4)).unwrap();
        match out {
            FlipOutcome::Flipped { removed, added } => {
                assert_eq!((removed.0.get(), removed.1.get()), (1, 4));
                let (c, d) = (added.0.get().min(added.1.get()), added.0.get().max(added.1.get()));
                assert_eq!((c, d), (3, 5));
            }
            FlipOutcome::Rejected => panic!("flip of 1-4 must be accepted"),
        }
        assert!(t.validate().is_empty());
        assert!(t.are_linked(NodeId::new(3), NodeId::new(5)).unwrap());
        assert!(!t.are_linked(NodeId::new(1), NodeId::new(4)).unwrap());
        // Flip back.
        let out = t.flip(link(&t, 3, 5)).unwrap();
        assert!(out.is_flipped());
        assert_eq!(t.link_pairs(), before);
        assert!(t.validate().is_empty());
    }

    #[test]
    fn stale_handle_is_rejected() {
        let mut t = Triangulation::christmas_tree(7).unwrap();
        let l = link(&t, 1, 4);
        t.flip(l).unwrap();
        assert!(matches!(t.flip(l), Err(TriError::StaleLink(_))));
        assert!(matches!(t.is_flippable(l), Err(TriError::StaleLink(_))));
        assert!(matches!(t.opposite_vertices(l), Err(TriError::StaleLink(_))));
    }

    #[test]
    fn degree_three_locks_incident_links() {
        let t = Triangulation::christmas_tree(8).unwrap();
        for v in [3u32, 8] {
            assert_eq!(t.degree(NodeId::new(v)).unwrap(), 3);
            for l in t.links().collect::<Vec<_>>() {
                let (a, b) = t.link_endpoints(l).unwrap();
                if a.get() == v || b.get() == v {
                    assert!(!t.is_flippable(l).unwrap(), "link {a}-{b} must be locked");
                }
            }
        }
    }

    #[test]
    fn flip_changes_exactly_four_degrees() {
        let mut t = Triangulation::christmas_tree(9).unwrap();
        let before: Vec<usize> = t.degrees().collect();
        t.flip(link(&t, 1, 5)).unwrap();
        let after: Vec<usize> = t.degrees().collect();
        let changed: Vec<(usize, i64)> = before
            .iter()
            .zip(&after)
            .enumerate()
            .filter(|(_, (x, y))| x != y)
            .map(|(i, (x, y))| (i + 1, *y as i64 - *x as i64))
            .collect();
        assert_eq!(changed.len(), 4);
        assert!(changed.iter().all(|(_, d)| d.abs() == 1));
        assert_eq!(changed.iter().map(|(_, d)| d).sum::<i64>(), 0);
    }

    #[test]
    fn flip_injectivity_from_fixed_state() {
        let t = Triangulation::christmas_tree(8).unwrap();
        let mut successors = Vec::new();
        for l in t.links().collect::<Vec<_>>() {
            if t.is_flippable(l).unwrap() {
                let mut u = t.clone();
                u.flip(l).unwrap();
                successors.push(u.link_pairs());
            }
        }
        let total = successors.len();
        successors.sort();
        successors.dedup();
        assert_eq!(successors.len(), total, "distinct links give distinct states");
    }

    #[test]
    fn validate_flags_corruption() {
        let mut t = Triangulation::christmas_tree(6).unwrap();
        assert!(t.validate().is_empty());
        t.corrupt_incidence_for_test(0, 0, 5);
        let violations = t.validate();
        assert!(!violations.is_empty());
        assert!(violations
            .iter()
            .any(|v| v.invariant.contains("incidence")));
    }

    #[test]
    fn from_triangles_rejects_overfull_link() {
        // Four triangles all sharing edge 1-2.
        let tris = [[1, 2, 3], [1, 2, 4], [1, 2, 5], [3, 4, 5], [1, 3, 4], [2, 3, 4]];
        let err = Triangulation::from_triangles(5, &tris).unwrap_err();
        assert!(matches!(err, TriError::NotATriangulation(_)));
        assert!(err.to_string().contains("more than two"));
    }

    #[test]
    fn relabeling_preserves_validity() {
        let t = Triangulation::christmas_tree(7).unwrap();
        let perm: Vec<u32> = vec![3, 1, 2, 7, 6, 5, 4];
        let u = t.apply_relabeling(&perm).unwrap();
        assert!(u.validate().is_empty());
        let mut degs_t: Vec<usize> = t.degrees().collect();
        let mut degs_u: Vec<usize> = u.degrees().collect();
        degs_t.sort_unstable();
        degs_u.sort_unstable();
        assert_eq!(degs_t, degs_u);
    }

    #[test]
    fn random_walk_stays_valid() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut t = Triangulation::christmas_tree(30).unwrap();
        let mut accepted = 0u32;
        for step in 0..20_000 {
            let slot = rng.gen_range(0..t.num_links());
            if t.flip_slot(slot).is_flipped() {
                accepted += 1;
            }
            if step % 2_000 == 0 {
                assert!(t.validate().is_empty(), "violation after step {step}");
            }
        }
        assert!(t.validate().is_empty());
        assert!(accepted > 0);
    }
}
