use std::cmp::Ordering;

use crate::bitset::BitSet;
use crate::error::{ensure_domain, Result};
use crate::routing::{PathIndex, SeparationOracle};

use super::search::combinations;

/// `b[p] = 1` iff path `p` contains a failed node.
pub fn simulate_measurement(idx: &PathIndex, failures: &BitSet) -> BitSet {
    idx.path_union(failures)
}

/// Failure sets over path-covered nodes that explain a measurement. Nodes on
/// no path never appear in any equation, so they are listed once instead of
/// being multiplied into every solution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FailureSolutions {
    pub solutions: Vec<Vec<usize>>,
    pub unconstrained: Vec<usize>,
}

pub fn consistent_failure_sets(idx: &PathIndex, b: &BitSet, size_cap: usize) -> Result<FailureSolutions> {
    ensure_domain!(
        b.capacity() == idx.len(),
        "measurement has {} bits for {} paths",
        b.capacity(),
        idx.len()
    );
    let covered = idx.covered_nodes();
    let unconstrained = covered.complement().to_vec();
    let candidates: Vec<usize> = covered.iter().filter(|&v| idx.incidence(v).is_subset(b)).collect();
    let mut solutions = Vec::new();
    for k in 0..=size_cap.min(candidates.len()) {
        for f in combinations(&candidates, k) {
            let set = BitSet::from_indices(idx.node_count(), f.iter().copied());
            if &idx.path_union(&set) == b {
                solutions.push(f);
            }
        }
    }
    solutions.sort_by(|a, b| lex(a, b));
    Ok(FailureSolutions { solutions, unconstrained })
}

/// Covered-node sets of size at most `size_cap` whose path sets equal that
/// of `failures`. Works for any routing scheme.
pub fn consistent_with(oracle: &dyn SeparationOracle, failures: &BitSet, size_cap: usize) -> Vec<Vec<usize>> {
    let n = oracle.node_count();
    let covered = oracle.covered_avoiding(&BitSet::new(n));
    let mut pool = failures.union(&oracle.dead_after(failures));
    pool.intersect_with(&covered);
    let pool = pool.to_vec();
    let target = failures.intersection(&covered);
    let mut out = Vec::new();
    for k in 0..=size_cap.min(pool.len()) {
        for f in combinations(&pool, k) {
            let set = BitSet::from_indices(n, f.iter().copied());
            if target.difference(&set).is_subset(&oracle.dead_after(&set)) {
                out.push(f);
            }
        }
    }
    out.sort_by(|a, b| lex(a, b));
    out
}

fn lex(a: &[usize], b: &[usize]) -> Ordering {
    a.iter().cmp(b.iter())
}
