//! Plain-text emission of enumeration manifests, sparse matrices and
//! distributions.

use std::io::{self, Write};

use super::{StationaryDistribution, TransitionMatrix};
use crate::ratio_str;
use crate::triangulation::Triangulation;

/// States as consecutive serialized triangulations, separated by blank
/// lines; the position in the file is the state index.
pub fn write_manifest(w: &mut dyn Write, states: &[Triangulation]) -> io::Result<()> {
    for t in states {
        w.write_all(t.serialize().as_bytes())?;
        writeln!(w)?;
    }
    Ok(())
}

/// Sparse triples `i j num/den`, row-major, diagonal included.
pub fn write_matrix(w: &mut dyn Write, p: &TransitionMatrix) -> io::Result<()> {
    use num::Zero;
    for i in 0..p.size() {
        let mut wrote_diag = false;
        let d = p.diagonal(i);
        for &(j, ref q) in p.off_diagonal(i) {
            if !wrote_diag && j > i {
                if !d.is_zero() {
                    writeln!(w, "{} {} {}", i, i, ratio_str(d))?;
                }
                wrote_diag = true;
            }
            writeln!(w, "{} {} {}", i, j, ratio_str(q))?;
        }
        if !wrote_diag && !d.is_zero() {
            writeln!(w, "{} {} {}", i, i, ratio_str(d))?;
        }
    }
    Ok(())
}

/// Lines `i num/den`.
pub fn write_distribution(w: &mut dyn Write, pi: &StationaryDistribution) -> io::Result<()> {
    for (i, v) in pi.values().iter().enumerate() {
        writeln!(w, "{} {}", i, ratio_str(v))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::SelectionRule;
    use crate::exact::{
        enumerate_labeled, stationary_distribution, transition_matrix, EnumerationLimits,
    };

    #[test]
    fn emission_formats() {
        let seed = Triangulation::christmas_tree(5).unwrap();
        let states = enumerate_labeled(&seed, &EnumerationLimits::default()).unwrap();
        let p = transition_matrix(&states, SelectionRule::NodeThenLink).unwrap();
        let pi = stationary_distribution(&p, &states).unwrap();

        let mut buf = Vec::new();
        write_manifest(&mut buf, &states).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.matches("tri n=5 f=6").count(), 10);

        let mut buf = Vec::new();
        write_matrix(&mut buf, &p).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let first = text.lines().next().unwrap();
        let parts: Vec<&str> = first.split(' ').collect();
        assert_eq!(parts.len(), 3);
        assert!(parts[2].contains('/'));

        let mut buf = Vec::new();
        write_distribution(&mut buf, &pi).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 10);
        assert!(text.lines().all(|l| l.ends_with("1/10")));
    }
}
