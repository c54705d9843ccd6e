//! Exact rational transition matrices, stationary distributions and
//! reversibility verdicts.

use std::collections::{BTreeMap, HashMap};

use num::{One, Signed, ToPrimitive, Zero};

use super::enumerate::link_mask;
use super::ExactError;
use crate::dynamics::{link_probability, SelectionRule};
use crate::triangulation::{canonical_code, Triangulation};
use crate::{ratio_str, Rational};

/// Row-stochastic matrix over the enumerated states, stored sparsely: each
/// row keeps its off-diagonal entries (sorted by target) plus the diagonal
/// self-loop mass. Rows sum to exactly 1.
#[derive(Debug, Clone)]
pub struct TransitionMatrix {
    rows: Vec<Vec<(usize, Rational)>>,
    diag: Vec<Rational>,
}

impl TransitionMatrix {
    pub fn size(&self) -> usize {
        self.diag.len()
    }

    /// Entry `P[i][j]`.
    pub fn get(&self, i: usize, j: usize) -> Rational {
        if i == j {
            return self.diag[i].clone();
        }
        match self.rows[i].binary_search_by_key(&j, |&(c, _)| c) {
            Ok(k) => self.rows[i][k].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    pub fn diagonal(&self, i: usize) -> &Rational {
        &self.diag[i]
    }

    /// Off-diagonal entries of row `i`, sorted by target state.
    pub fn off_diagonal(&self, i: usize) -> &[(usize, Rational)] {
        &self.rows[i]
    }

    pub fn row_sum(&self, i: usize) -> Rational {
        let mut s = self.diag[i].clone();
        for (_, p) in &self.rows[i] {
            s += p;
        }
        s
    }

    pub fn is_symmetric(&self) -> bool {
        for i in 0..self.size() {
            for &(j, ref p) in &self.rows[i] {
                if j > i && *p != self.get(j, i) {
                    return false;
                }
            }
        }
        true
    }

    /// Number of nonzero entries including diagonals.
    pub fn nnz(&self) -> usize {
        self.diag.iter().filter(|d| !d.is_zero()).count()
            + self.rows.iter().map(Vec::len).sum::<usize>()
    }
}

/// Builds the exact transition matrix over `states` (a complete enumeration
/// for fixed n, in the order given). `P[i][j]` is the selection probability
/// of the unique link whose flip sends state i to state j; the diagonal is
/// the rejected mass. Errors if some flip leaves the state list.
pub fn transition_matrix(
    states: &[Triangulation],
    rule: SelectionRule,
) -> Result<TransitionMatrix, ExactError> {
    let index: HashMap<u128, usize> = states
        .iter()
        .enumerate()
        .map(|(i, t)| (link_mask(t), i))
        .collect();
    if index.len() != states.len() {
        return Err(ExactError::Mismatch("duplicate states in list".into()));
    }
    let mut rows = Vec::with_capacity(states.len());
    let mut diag = Vec::with_capacity(states.len());
    for (i, t) in states.iter().enumerate() {
        let mut row: BTreeMap<usize, Rational> = BTreeMap::new();
        let mut self_loop = Rational::zero();
        let mut work = t.clone();
        for link in t.links() {
            let p = link_probability(t, rule, link)?;
            if !t.is_flippable(link)? {
                self_loop += p;
                continue;
            }
            let slot = link.slot();
            work.flip_slot(slot);
            let j = *index.get(&link_mask(&work)).ok_or_else(|| {
                ExactError::IncompleteStateList(format!(
                    "a flip from state {i} leaves the enumeration"
                ))
            })?;
            // the flip is an involution on the same slot
            work.flip_slot(slot);
            *row.entry(j).or_insert_with(Rational::zero) += p;
        }
        let mut total = self_loop.clone();
        for p in row.values() {
            total += p;
        }
        if !total.is_one() {
            return Err(ExactError::SolveFailed(format!(
                "row {i} sums to {} instead of 1",
                ratio_str(&total)
            )));
        }
        rows.push(row.into_iter().collect());
        diag.push(self_loop);
    }
    Ok(TransitionMatrix { rows, diag })
}

/// Exact stationary distribution: nonnegative rationals summing to 1 with
/// `pi P = pi`.
#[derive(Debug, Clone)]
pub struct StationaryDistribution(Vec<Rational>);

impl StationaryDistribution {
    pub fn values(&self) -> &[Rational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> &Rational {
        &self.0[i]
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|r| r.to_f64().unwrap_or(f64::NAN)).collect()
    }
}

/// Matrices up to this size are solved by direct rational Gaussian
/// elimination; larger ones go through the relabeling-symmetry lumping
/// described below.
const DENSE_SOLVE_MAX: usize = 256;

/// Computes the unique stationary distribution of an irreducible chain,
/// exactly.
///
/// Small systems are solved by rational Gaussian elimination on the
/// transposed balance equations plus the normalization row. Larger systems
/// use the node-relabeling symmetry: states are grouped into isomorphism
/// orbits (the dynamics commutes with relabeling, so the chain lumps exactly
/// over orbits, which is checked row by row rather than assumed), the lumped
/// chain is solved densely, and the per-state values are the orbit values
/// divided by the orbit sizes. In both paths the result is verified against
/// the full matrix: `pi P = pi`, `sum pi = 1`, `pi > 0`, all exact; the
/// verification makes the answer unconditional because the stationary
/// distribution of an irreducible chain is unique.
pub fn stationary_distribution(
    p: &TransitionMatrix,
    states: &[Triangulation],
) -> Result<StationaryDistribution, ExactError> {
    let m = p.size();
    if m == 0 || states.len() != m {
        return Err(ExactError::Mismatch(format!(
            "{} states for a {}x{} matrix",
            states.len(),
            m,
            m
        )));
    }
    check_strong_connectivity(p)?;
    let pi = if m <= DENSE_SOLVE_MAX {
        solve_dense(p)?
    } else {
        solve_lumped(p, states)?
    };
    verify_stationary(p, &pi)?;
    Ok(StationaryDistribution(pi))
}

/// Irreducibility check: the off-diagonal support must be strongly
/// connected. For flip chains the support is symmetric, so forward
/// reachability alone would do; both directions are checked anyway.
fn check_strong_connectivity(p: &TransitionMatrix) -> Result<(), ExactError> {
    let m = p.size();
    let mut reverse: Vec<Vec<usize>> = vec![Vec::new(); m];
    for i in 0..m {
        for &(j, _) in p.off_diagonal(i) {
            reverse[j].push(i);
        }
    }
    let reach = |forward: bool| -> usize {
        let mut seen = vec![false; m];
        seen[0] = true;
        let mut stack = vec![0usize];
        let mut count = 1;
        while let Some(i) = stack.pop() {
            let neighbors: Vec<usize> = if forward {
                p.off_diagonal(i).iter().map(|&(j, _)| j).collect()
            } else {
                reverse[i].clone()
            };
            for j in neighbors {
                if !seen[j] {
                    seen[j] = true;
                    count += 1;
                    stack.push(j);
                }
            }
        }
        count
    };
    if reach(true) != m || reach(false) != m {
        return Err(ExactError::Reducible(
            "off-diagonal support is not strongly connected".into(),
        ));
    }
    Ok(())
}

fn verify_stationary(p: &TransitionMatrix, pi: &[Rational]) -> Result<(), ExactError> {
    let m = p.size();
    let mut col = vec![Rational::zero(); m];
    for i in 0..m {
        if pi[i].is_negative() || pi[i].is_zero() {
            return Err(ExactError::SolveFailed(format!(
                "pi[{i}] = {} is not positive",
                ratio_str(&pi[i])
            )));
        }
        col[i] += &pi[i] * p.diagonal(i);
        for &(j, ref q) in p.off_diagonal(i) {
            col[j] += &pi[i] * q;
        }
    }
    for j in 0..m {
        if col[j] != pi[j] {
            return Err(ExactError::SolveFailed(format!(
                "(pi P)[{j}] = {} but pi[{j}] = {}",
                ratio_str(&col[j]),
                ratio_str(&pi[j])
            )));
        }
    }
    let sum: Rational = pi.iter().cloned().sum();
    if !sum.is_one() {
        return Err(ExactError::SolveFailed(format!(
            "pi sums to {}",
            ratio_str(&sum)
        )));
    }
    Ok(())
}

/// Gaussian elimination on (P^T - I) with the last balance row replaced by
/// the normalization constraint.
fn solve_dense(p: &TransitionMatrix) -> Result<Vec<Rational>, ExactError> {
    let m = p.size();
    let mut a: Vec<Vec<Rational>> = vec![vec![Rational::zero(); m]; m];
    for i in 0..m {
        a[i][i] = p.diagonal(i).clone() - Rational::one();
        for &(j, ref q) in p.off_diagonal(i) {
            a[j][i] = q.clone(); // transpose
        }
    }
    for v in a[m - 1].iter_mut() {
        *v = Rational::one();
    }
    let mut b = vec![Rational::zero(); m];
    b[m - 1] = Rational::one();
    solve_linear(a, b)
}

fn solve_linear(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Result<Vec<Rational>, ExactError> {
    let m = b.len();
    for col in 0..m {
        let piv = (col..m)
            .find(|&r| !a[r][col].is_zero())
            .ok_or_else(|| ExactError::SolveFailed(format!("singular at column {col}")))?;
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = {
            let pv = &a[col][col];
            Rational::one() / pv.clone()
        };
        for r in 0..m {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] * &inv;
            let pivot_row = a[col].clone();
            let row = &mut a[r];
            for c in col..m {
                if !pivot_row[c].is_zero() {
                    let delta = &factor * &pivot_row[c];
                    row[c] -= delta;
                }
            }
            let delta = &factor * &b[col];
            b[r] -= delta;
        }
    }
    Ok((0..m).map(|i| &b[i] / &a[i][i]).collect())
}

/// Exact solve through the relabeling symmetry: group states by canonical
/// code, check row-by-row that the chain lumps over the orbits, solve the
/// small lumped chain densely and divide orbit mass by orbit size.
fn solve_lumped(
    p: &TransitionMatrix,
    states: &[Triangulation],
) -> Result<Vec<Rational>, ExactError> {
    let m = p.size();
    let mut orbit_index: BTreeMap<crate::triangulation::CanonicalCode, usize> = BTreeMap::new();
    let mut orbit_of = vec![0usize; m];
    for (i, t) in states.iter().enumerate() {
        let code = canonical_code(t)?;
        let next = orbit_index.len();
        let a = *orbit_index.entry(code).or_insert(next);
        orbit_of[i] = a;
    }
    let k = orbit_index.len();
    let mut orbit_size = vec![0usize; k];
    for &a in &orbit_of {
        orbit_size[a] += 1;
    }
    // lumped rows, verified identical across each orbit
    let mut lumped: Vec<Option<Vec<Rational>>> = vec![None; k];
    for i in 0..m {
        let a = orbit_of[i];
        let mut row = vec![Rational::zero(); k];
        row[a] += p.diagonal(i);
        for &(j, ref q) in p.off_diagonal(i) {
            row[orbit_of[j]] += q;
        }
        match &lumped[a] {
            None => lumped[a] = Some(row),
            Some(existing) => {
                if *existing != row {
                    return Err(ExactError::SolveFailed(format!(
                        "orbit {a} is not lumpable: state {i} has a different orbit row"
                    )));
                }
            }
        }
    }
    // dense solve of rho Q = rho, sum rho = 1
    let mut a_mat = vec![vec![Rational::zero(); k]; k];
    for (src, row) in lumped.iter().enumerate() {
        let row = row.as_ref().expect("every orbit has a row");
        for (dst, q) in row.iter().enumerate() {
            a_mat[dst][src] = q.clone(); // transpose
        }
        a_mat[src][src] -= Rational::one();
    }
    for v in a_mat[k - 1].iter_mut() {
        *v = Rational::one();
    }
    let mut b = vec![Rational::zero(); k];
    b[k - 1] = Rational::one();
    let rho = solve_linear(a_mat, b)?;
    Ok((0..m)
        .map(|i| {
            let a = orbit_of[i];
            &rho[a] / Rational::from_integer((orbit_size[a] as i64).into())
        })
        .collect())
}

/// Floating-point power iteration, used only as a cross-check of the exact
/// solves.
pub fn power_iteration(p: &TransitionMatrix, iterations: usize) -> Vec<f64> {
    let m = p.size();
    let mut x = vec![1.0 / m as f64; m];
    let diag: Vec<f64> = p.diag.iter().map(|r| r.to_f64().unwrap()).collect();
    let rows: Vec<Vec<(usize, f64)>> = p
        .rows
        .iter()
        .map(|row| row.iter().map(|(j, q)| (*j, q.to_f64().unwrap())).collect())
        .collect();
    let mut next = vec![0.0; m];
    for _ in 0..iterations {
        next.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..m {
            next[i] += x[i] * diag[i];
            for &(j, q) in &rows[i] {
                next[j] += x[i] * q;
            }
        }
        let norm: f64 = next.iter().sum();
        for (xi, ni) in x.iter_mut().zip(next.iter()) {
            *xi = ni / norm;
        }
    }
    x
}

/// A detailed-balance violation: `pi_i P[i][j] != pi_j P[j][i]`.
#[derive(Debug, Clone)]
pub struct WitnessPair {
    pub i: usize,
    pub j: usize,
    pub flow_forward: Rational,
    pub flow_backward: Rational,
}

/// A directed cycle whose forward and backward probability products differ,
/// certifying non-reversibility by the cycle criterion.
#[derive(Debug, Clone)]
pub struct WitnessCycle {
    /// State indices around the cycle (closing edge back to the first).
    pub states: Vec<usize>,
    pub forward: Rational,
    pub backward: Rational,
}

impl WitnessCycle {
    /// Backward/forward product ratio; 1 for a balanced cycle.
    pub fn ratio(&self) -> Rational {
        self.backward.clone() / self.forward.clone()
    }
}

#[derive(Debug, Clone)]
pub struct ReversibilityReport {
    pub reversible: bool,
    pub witness_pair: Option<WitnessPair>,
    pub witness_cycle: Option<WitnessCycle>,
}

/// Exact detailed-balance test of `pi` against `P`. On failure the report
/// carries the first violating pair and, when one exists, a violating cycle
/// of length at most 4 found in deterministic order.
pub fn reversibility_test(
    p: &TransitionMatrix,
    pi: &StationaryDistribution,
) -> ReversibilityReport {
    let m = p.size();
    debug_assert_eq!(pi.len(), m);
    let mut witness_pair = None;
    'scan: for i in 0..m {
        for &(j, ref q) in p.off_diagonal(i) {
            if j <= i {
                continue;
            }
            let forward = pi.get(i) * q;
            let backward = pi.get(j) * p.get(j, i);
            if forward != backward {
                witness_pair = Some(WitnessPair {
                    i,
                    j,
                    flow_forward: forward,
                    flow_backward: backward,
                });
                break 'scan;
            }
        }
    }
    if witness_pair.is_none() {
        return ReversibilityReport {
            reversible: true,
            witness_pair: None,
            witness_cycle: None,
        };
    }
    ReversibilityReport {
        reversible: false,
        witness_cycle: find_violating_cycle(p),
        witness_pair,
    }
}

/// First cycle of length 3, then 4, whose forward and backward products
/// differ. Deterministic scan order; stops at the first hit.
fn find_violating_cycle(p: &TransitionMatrix) -> Option<WitnessCycle> {
    let m = p.size();
    let make = |states: Vec<usize>| -> Option<WitnessCycle> {
        let k = states.len();
        let mut forward = Rational::one();
        let mut backward = Rational::one();
        for t in 0..k {
            let (u, v) = (states[t], states[(t + 1) % k]);
            let f = p.get(u, v);
            let b = p.get(v, u);
            if f.is_zero() || b.is_zero() {
                return None;
            }
            forward *= f;
            backward *= b;
        }
        if forward != backward {
            Some(WitnessCycle {
                states,
                forward,
                backward,
            })
        } else {
            None
        }
    };
    for i in 0..m {
        for &(j, _) in p.off_diagonal(i) {
            for &(k, _) in p.off_diagonal(j) {
                if k == i || k == j {
                    continue;
                }
                if let Some(w) = make(vec![i, j, k]) {
                    return Some(w);
                }
            }
        }
    }
    for i in 0..m {
        for &(j, _) in p.off_diagonal(i) {
            for &(k, _) in p.off_diagonal(j) {
                if k == i || k == j {
                    continue;
                }
                for &(l, _) in p.off_diagonal(k) {
                    if l == i || l == j || l == k {
                        continue;
                    }
                    if let Some(w) = make(vec![i, j, k, l]) {
                        return Some(w);
                    }
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{enumerate_labeled, EnumerationLimits};
    use crate::ratio;

    fn states(n: usize) -> Vec<Triangulation> {
        let seed = Triangulation::christmas_tree(n).unwrap();
        enumerate_labeled(&seed, &EnumerationLimits::default()).unwrap()
    }

    #[test]
    fn uniform_matrix_is_symmetric_and_stochastic() {
        for n in [5usize, 6] {
            let sts = states(n);
            let p = transition_matrix(&sts, SelectionRule::UniformLink).unwrap();
            assert!(p.is_symmetric(), "n={n}");
            for i in 0..p.size() {
                assert_eq!(p.row_sum(i), ratio(1, 1));
            }
        }
    }

    #[test]
    fn node_rule_rows_sum_to_one() {
        let sts = states(6);
        let p = transition_matrix(&sts, SelectionRule::NodeThenLink).unwrap();
        for i in 0..p.size() {
            assert_eq!(p.row_sum(i), ratio(1, 1));
        }
    }

    #[test]
    fn node_rule_entries_match_degree_formula_at_n5() {
        // All 10 states are bipyramids; every allowed flip removes a link
        // whose endpoints both have degree 4, so every off-diagonal entry is
        // (1/5)(1/4 + 1/4) = 1/10.
        let sts = states(5);
        let p = transition_matrix(&sts, SelectionRule::NodeThenLink).unwrap();
        for i in 0..p.size() {
            for &(_, ref q) in p.off_diagonal(i) {
                assert_eq!(*q, ratio(1, 10));
            }
        }
    }

    #[test]
    fn incomplete_state_list_is_detected() {
        let mut sts = states(5);
        sts.pop();
        let err = transition_matrix(&sts, SelectionRule::UniformLink).unwrap_err();
        assert!(matches!(err, ExactError::IncompleteStateList(_)));
    }

    #[test]
    fn uniform_stationary_is_uniform() {
        for n in [5usize, 6] {
            let sts = states(n);
            let m = sts.len() as i64;
            let p = transition_matrix(&sts, SelectionRule::UniformLink).unwrap();
            let pi = stationary_distribution(&p, &sts).unwrap();
            for v in pi.values() {
                assert_eq!(*v, ratio(1, m));
            }
        }
    }

    #[test]
    fn node_rule_stationary_n5_is_uniform_and_reversible() {
        let sts = states(5);
        let p = transition_matrix(&sts, SelectionRule::NodeThenLink).unwrap();
        let pi = stationary_distribution(&p, &sts).unwrap();
        for v in pi.values() {
            assert_eq!(*v, ratio(1, 10));
        }
        let report = reversibility_test(&p, &pi);
        assert!(report.reversible);
    }

    #[test]
    fn node_rule_stationary_n6_two_values_and_reversible() {
        // Two isomorphism orbits: 15 octahedral states carry 1/240 each and
        // the 180 stacked states 1/192 each.
        let sts = states(6);
        let p = transition_matrix(&sts, SelectionRule::NodeThenLink).unwrap();
        let pi = stationary_distribution(&p, &sts).unwrap();
        let mut values: Vec<Rational> = pi.values().to_vec();
        values.sort();
        values.dedup();
        assert_eq!(values, vec![ratio(1, 240), ratio(1, 192)]);
        let report = reversibility_test(&p, &pi);
        assert!(report.reversible);
    }

    #[test]
    fn power_iteration_agrees_with_exact_solve() {
        let sts = states(6);
        let p = transition_matrix(&sts, SelectionRule::NodeThenLink).unwrap();
        let pi = stationary_distribution(&p, &sts).unwrap();
        let approx = power_iteration(&p, 2000);
        for (a, b) in approx.iter().zip(pi.to_f64()) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn uniform_reversibility_passes() {
        let sts = states(6);
        let p = transition_matrix(&sts, SelectionRule::UniformLink).unwrap();
        let pi = stationary_distribution(&p, &sts).unwrap();
        let report = reversibility_test(&p, &pi);
        assert!(report.reversible);
        assert!(report.witness_pair.is_none());
    }
}
