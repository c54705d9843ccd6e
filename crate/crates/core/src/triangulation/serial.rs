//! Line-oriented text format for triangulations.
//!
//! Header `tri n=<n> f=<2n-4>`, then 2n-4 lines `a b c` with each triple
//! sorted ascending and the lines sorted lexicographically. The format is
//! canonical: two triangulations with the same link set serialize to the
//! same text.

use super::{TriError, Triangulation};

impl Triangulation {
    /// Canonical text form (see module docs).
    pub fn serialize(&self) -> String {
        let tris = self.triangle_list();
        let mut out = String::with_capacity(16 + tris.len() * 12);
        out.push_str(&format!("tri n={} f={}\n", self.n, tris.len()));
        for t in tris {
            out.push_str(&format!("{} {} {}\n", t[0], t[1], t[2]));
        }
        out
    }

    /// Parses the text form, rebuilding links, adjacency and opposite-vertex
    /// records, and validates the result.
    pub fn deserialize(text: &str) -> Result<Self, TriError> {
        let parse_err = |line: usize, msg: String| TriError::Parse { line, msg };
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| parse_err(1, "empty input".into()))?;
        let mut n: Option<usize> = None;
        let mut f: Option<usize> = None;
        let mut parts = header.split_whitespace();
        if parts.next() != Some("tri") {
            return Err(parse_err(1, "header must start with 'tri'".into()));
        }
        for p in parts {
            if let Some(v) = p.strip_prefix("n=") {
                n = Some(v.parse().map_err(|_| {
                    parse_err(1, format!("bad node count {v:?}"))
                })?);
            } else if let Some(v) = p.strip_prefix("f=") {
                f = Some(v.parse().map_err(|_| {
                    parse_err(1, format!("bad triangle count {v:?}"))
                })?);
            } else {
                return Err(parse_err(1, format!("unexpected header field {p:?}")));
            }
        }
        let n = n.ok_or_else(|| parse_err(1, "header is missing n=".into()))?;
        let f = f.ok_or_else(|| parse_err(1, "header is missing f=".into()))?;
        if n < 4 {
            return Err(TriError::TooFewNodes(n));
        }
        if f != 2 * n - 4 {
            return Err(parse_err(
                1,
                format!("f={} does not match 2n-4={}", f, 2 * n - 4),
            ));
        }

        let mut tris: Vec<[u32; 3]> = Vec::with_capacity(f);
        let mut pair_counts: std::collections::HashMap<(u32, u32), u8> =
            std::collections::HashMap::new();
        let mut seen: std::collections::HashSet<[u32; 3]> = std::collections::HashSet::new();
        for (ix, line) in lines {
            let lineno = ix + 1;
            if line.trim().is_empty() {
                continue;
            }
            let nums: Vec<u32> = line
                .split_whitespace()
                .map(|w| {
                    w.parse::<u32>()
                        .map_err(|_| parse_err(lineno, format!("bad node id {w:?}")))
                })
                .collect::<Result<_, _>>()?;
            if nums.len() != 3 {
                return Err(parse_err(
                    lineno,
                    format!("expected 3 node ids, got {}", nums.len()),
                ));
            }
            let mut t = [nums[0], nums[1], nums[2]];
            t.sort_unstable();
            if t[0] == t[1] || t[1] == t[2] {
                return Err(parse_err(lineno, "degenerate triangle".into()));
            }
            if t[0] < 1 || t[2] as usize > n {
                return Err(parse_err(
                    lineno,
                    format!("node id outside 1..={n}"),
                ));
            }
            if !seen.insert(t) {
                return Err(parse_err(lineno, "duplicate triangle".into()));
            }
            for (x, y) in [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])] {
                let c = pair_counts.entry((x, y)).or_insert(0);
                *c += 1;
                if *c > 2 {
                    return Err(parse_err(
                        lineno,
                        format!("link {x}-{y} lies in more than two triangles"),
                    ));
                }
            }
            tris.push(t);
        }
        if tris.len() != f {
            return Err(parse_err(
                0,
                format!("expected {} triangle lines, got {}", f, tris.len()),
            ));
        }
        Self::from_triangles(n, &tris)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_christmas_tree() {
        let t = Triangulation::christmas_tree(50).unwrap();
        let text = t.serialize();
        let u = Triangulation::deserialize(&text).unwrap();
        assert!(u.same_link_set(&t));
        assert!(u.validate().is_empty());
        assert_eq!(u.serialize(), text);
    }

    #[test]
    fn header_is_canonical() {
        let t = Triangulation::tetrahedron();
        assert!(t.serialize().starts_with("tri n=4 f=4\n"));
    }

    #[test]
    fn rejects_link_in_three_triangles() {
        let text = "tri n=5 f=6\n1 2 3\n1 2 4\n1 2 5\n1 3 4\n2 3 4\n3 4 5\n";
        let err = Triangulation::deserialize(text).unwrap_err();
        match err {
            TriError::Parse { line, msg } => {
                assert_eq!(line, 4);
                assert!(msg.contains("more than two"));
            }
            other => panic!("expected parse error with line, got {other:?}"),
        }
    }

    #[test]
    fn rejects_malformed_header() {
        assert!(Triangulation::deserialize("nope\n").is_err());
        assert!(Triangulation::deserialize("tri n=7\n").is_err());
        assert!(Triangulation::deserialize("tri n=7 f=9\n").is_err());
    }

    #[test]
    fn rejects_bad_triple_counts() {
        let t = Triangulation::tetrahedron();
        let mut text = t.serialize();
        text.push_str("1 2 3\n");
        assert!(Triangulation::deserialize(&text).is_err());
    }

    #[test]
    fn rejects_non_sphere_triangle_list() {
        // Right count of triangles but a vertex pinch instead of a sphere:
        // reuse triangles so one line duplicates.
        let text = "tri n=5 f=6\n1 2 3\n1 2 3\n1 2 4\n1 3 4\n2 3 4\n3 4 5\n";
        let err = Triangulation::deserialize(text).unwrap_err();
        assert!(matches!(err, TriError::Parse { line: 3, .. }));
    }
}
