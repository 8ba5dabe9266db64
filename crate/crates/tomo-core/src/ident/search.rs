use std::cmp::Ordering;
use std::collections::HashMap;

use rayon::prelude::*;

use crate::bitset::BitSet;
use crate::routing::SeparationOracle;

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub mu: usize,
    /// Lexicographically smallest unseparated pair at level `mu + 1`.
    pub witness: Option<(BitSet, BitSet)>,
    pub pairs_examined: u64,
    /// No failing pair up to `limit`, and `limit` is below the node count.
    pub capped: bool,
}

/// All `k`-subsets of `pool`, in lexicographic order of positions.
pub fn combinations(pool: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > pool.len() {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().map(|&i| pool[i]).collect());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + pool.len() - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn pair_cmp(a: &(BitSet, BitSet), b: &(BitSet, BitSet)) -> Ordering {
    a.0.lex_cmp(&b.0).then_with(|| a.1.lex_cmp(&b.1))
}

fn min_pair(a: Option<(BitSet, BitSet)>, b: Option<(BitSet, BitSet)>) -> Option<(BitSet, BitSet)> {
    match (a, b) {
        (Some(x), Some(y)) => Some(if pair_cmp(&x, &y) == Ordering::Greater { y } else { x }),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Ascends k = 1, 2, ... up to `limit` looking for distinct sets U, W of
/// size at most k with identical path sets. `P(U) = P(W)` holds exactly when
/// every node of `U \ W` is dead once `W` fails and vice versa, so each U
/// only needs to be paired with subsets of `U ∪ dead(U)`.
pub fn search_mu(oracle: &dyn SeparationOracle, limit: usize) -> SearchOutcome {
    let n = oracle.node_count();
    let top = limit.min(n);
    let all: Vec<usize> = (0..n).collect();
    let mut dead: HashMap<BitSet, BitSet> = HashMap::new();
    let mut sets: Vec<BitSet> = Vec::new();
    let empty = BitSet::new(n);
    dead.insert(empty.clone(), oracle.dead_after(&empty));
    sets.push(empty);
    let mut pairs_examined = 0u64;

    for k in 1..=top {
        let level: Vec<BitSet> = combinations(&all, k)
            .into_iter()
            .map(|c| BitSet::from_indices(n, c))
            .collect();
        let level_dead: Vec<BitSet> = level.par_iter().map(|s| oracle.dead_after(s)).collect();
        for (s, d) in level.iter().zip(level_dead) {
            dead.insert(s.clone(), d);
        }
        sets.extend(level);

        let (count, failing) = sets
            .par_iter()
            .map(|u| scan_partners(u, k, &dead))
            .reduce(|| (0, None), |a, b| (a.0 + b.0, min_pair(a.1, b.1)));
        pairs_examined += count;
        if let Some(pair) = failing {
            return SearchOutcome {
                mu: k - 1,
                witness: Some(pair),
                pairs_examined,
                capped: false,
            };
        }
    }
    SearchOutcome {
        mu: top,
        witness: None,
        pairs_examined,
        capped: top < n,
    }
}

/// Pairs (U, W) with `U <lex W`, `max(|U|,|W|) = k` and `P(W) ⊆ P(U)` by
/// construction; returns how many were checked and the smallest W that
/// also satisfies `P(U) ⊆ P(W)`.
fn scan_partners(u: &BitSet, k: usize, dead: &HashMap<BitSet, BitSet>) -> (u64, Option<(BitSet, BitSet)>) {
    let pool = u.union(&dead[u]).to_vec();
    let sizes = if u.count() == k { 0..=k } else { k..=k };
    let mut count = 0u64;
    let mut best: Option<BitSet> = None;
    for j in sizes {
        for c in combinations(&pool, j) {
            let w = BitSet::from_indices(u.capacity(), c);
            if u.lex_cmp(&w) != Ordering::Less {
                continue;
            }
            count += 1;
            if u.difference(&w).is_subset(&dead[&w])
                && best.as_ref().map_or(true, |b| w.lex_cmp(b) == Ordering::Less)
            {
                best = Some(w);
            }
        }
    }
    (count, best.map(|w| (u.clone(), w)))
}
