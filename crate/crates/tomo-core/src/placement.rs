//! Monitor placements: the canonical grid and tree placements, the
//! minimal-degree heuristic, seeded random draws, and the monitor-balanced
//! check for undirected trees.

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_domain, Error, Result};
use crate::graph::Graph;
use crate::rng::rng;
use crate::topology::{Hypergrid, Orientation, TreeSpec};

/// Input nodes (linked to input monitors) and output nodes (linked to output
/// monitors). The two sides may overlap; each side is duplicate-free and kept
/// in ascending order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonitorPlacement {
    pub inputs: Vec<usize>,
    pub outputs: Vec<usize>,
}

impl MonitorPlacement {
    pub fn new(mut inputs: Vec<usize>, mut outputs: Vec<usize>) -> Result<Self> {
        ensure_domain!(!inputs.is_empty(), "placement without input nodes");
        ensure_domain!(!outputs.is_empty(), "placement without output nodes");
        for side in [&mut inputs, &mut outputs] {
            let before = side.len();
            side.sort_unstable();
            side.dedup();
            ensure_domain!(side.len() == before, "a node appears twice on one side of the placement");
        }
        Ok(MonitorPlacement { inputs, outputs })
    }

    pub fn validate_for(&self, g: &Graph) -> Result<()> {
        let n = g.node_count();
        for &v in self.inputs.iter().chain(&self.outputs) {
            ensure_domain!(v < n, "monitor node {v} outside 0..{n}");
        }
        Ok(())
    }

    pub fn is_input(&self, v: usize) -> bool {
        self.inputs.binary_search(&v).is_ok()
    }

    pub fn is_output(&self, v: usize) -> bool {
        self.outputs.binary_search(&v).is_ok()
    }

    /// Total number of monitor links, counting shared nodes twice.
    pub fn monitor_count(&self) -> usize {
        self.inputs.len() + self.outputs.len()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("placement serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: MonitorPlacement = serde_json::from_str(s).map_err(|e| Error::Parse {
            line: Some(e.line() as u32),
            message: e.to_string(),
        })?;
        MonitorPlacement::new(raw.inputs, raw.outputs)
    }
}

/// Grid placement: inputs on every low face (some coordinate equals 1),
/// outputs on every high face (some coordinate equals n). For d = 2 these are
/// the 2n-1 nodes of the first row and column, and of the last row and column.
pub fn chi_grid(n: usize, d: usize) -> Result<MonitorPlacement> {
    let hg = Hypergrid::new(n, d)?;
    let (mut inputs, mut outputs) = (Vec::new(), Vec::new());
    for id in 0..hg.node_count() {
        let x = hg.coord_of(id);
        if x.contains(&1) {
            inputs.push(id);
        }
        if x.contains(&n) {
            outputs.push(id);
        }
    }
    MonitorPlacement::new(inputs, outputs)
}

/// Tree placement: root in, leaves out (downward); reversed for upward trees.
pub fn chi_tree(spec: &TreeSpec) -> Result<MonitorPlacement> {
    let root = spec
        .root()
        .ok_or_else(|| Error::domain("tree without a root"))?;
    let leaves = spec.leaves();
    match spec.orientation {
        Orientation::Downward => MonitorPlacement::new(vec![root], leaves),
        Orientation::Upward => MonitorPlacement::new(leaves, vec![root]),
        Orientation::Undirected => Err(Error::domain("tree placement needs an oriented tree")),
    }
}

/// Order among equal-degree nodes for the minimal-degree heuristic.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum TieBreak {
    /// Smaller id first.
    #[default]
    AscendingId,
    /// `rank[v]` gives the priority of node `v` (smaller first).
    Ranked(Vec<usize>),
}

impl TieBreak {
    fn key(&self, v: usize) -> usize {
        match self {
            TieBreak::AscendingId => v,
            TieBreak::Ranked(rank) => rank[v],
        }
    }
}

/// Minimal-degree monitor placement: `d` rounds, each taking the two
/// lowest-degree unchosen nodes; the one earlier in the tie-break order
/// becomes an input, the other an output. Degrees are read once.
pub fn mdmp(g: &Graph, d: usize, tie_break: &TieBreak) -> Result<MonitorPlacement> {
    let n = g.node_count();
    ensure_domain!(d >= 1, "heuristic placement needs d >= 1");
    ensure_domain!(n >= 2 * d, "need {} nodes for {d} monitor pairs, graph has {n}", 2 * d);
    if let TieBreak::Ranked(rank) = tie_break {
        ensure_domain!(rank.len() == n, "tie-break rank has wrong length");
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (g.degree(v), tie_break.key(v)));
    let (mut inputs, mut outputs) = (Vec::with_capacity(d), Vec::with_capacity(d));
    for pair in order.chunks(2).take(d) {
        inputs.push(pair[0]);
        outputs.push(pair[1]);
    }
    MonitorPlacement::new(inputs, outputs)
}

/// Uniform draw of `k_in` inputs then `k_out` disjoint outputs.
pub fn random_placement(g: &Graph, k_in: usize, k_out: usize, seed: u64) -> Result<MonitorPlacement> {
    let n = g.node_count();
    ensure_domain!(k_in >= 1 && k_out >= 1, "placement needs at least one input and one output");
    ensure_domain!(k_in + k_out <= n, "{k_in}+{k_out} monitors do not fit on {n} nodes");
    let picked = sample(&mut rng(seed), n, k_in + k_out).into_vec();
    MonitorPlacement::new(picked[..k_in].to_vec(), picked[k_in..].to_vec())
}

/// A non-leaf node whose neighbour subtrees hold fewer than two input trees
/// or fewer than two output trees.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ImbalanceWitness {
    pub node: usize,
    pub input_subtrees: usize,
    pub output_subtrees: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Balance {
    Balanced,
    Unbalanced(ImbalanceWitness),
}

impl Balance {
    pub fn is_balanced(&self) -> bool {
        matches!(self, Balance::Balanced)
    }
}

/// Monitor-balanced check; the witness is the smallest violating node.
pub fn is_monitor_balanced(t: &Graph, chi: &MonitorPlacement) -> Result<Balance> {
    let n = t.node_count();
    ensure_domain!(!t.is_directed(), "monitor balance is defined for undirected trees");
    ensure_domain!(n > 0 && t.edge_count() == n - 1 && t.is_connected(), "input graph is not a tree");
    chi.validate_for(t)?;

    // Root at 0; count monitors per rooted subtree.
    let mut parent = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    let mut stack = vec![0];
    parent[0] = 0;
    while let Some(u) = stack.pop() {
        order.push(u);
        for &w in t.out_neighbors(u) {
            if parent[w] == usize::MAX {
                parent[w] = u;
                stack.push(w);
            }
        }
    }
    let mut ins = vec![0usize; n];
    let mut outs = vec![0usize; n];
    for &u in order.iter().rev() {
        ins[u] += usize::from(chi.is_input(u));
        outs[u] += usize::from(chi.is_output(u));
        if u != 0 {
            ins[parent[u]] += ins[u];
            outs[parent[u]] += outs[u];
        }
    }
    let (tot_in, tot_out) = (ins[0], outs[0]);
    for u in 0..n {
        if t.degree(u) < 2 {
            continue;
        }
        let (mut in_trees, mut out_trees) = (0, 0);
        for &w in t.out_neighbors(u) {
            let (i, o) = if u != 0 && w == parent[u] {
                (tot_in - ins[u], tot_out - outs[u])
            } else {
                (ins[w], outs[w])
            };
            in_trees += usize::from(i > 0);
            out_trees += usize::from(o > 0);
        }
        if in_trees < 2 || out_trees < 2 {
            return Ok(Balance::Unbalanced(ImbalanceWitness {
                node: u,
                input_subtrees: in_trees,
                output_subtrees: out_trees,
            }));
        }
    }
    Ok(Balance::Balanced)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{gen_hypergrid, gen_tree, Orientation};
    use proptest::prelude::*;

    #[test]
    fn chi_grid_two_dimensional() {
        let hg = Hypergrid::new(4, 2).unwrap();
        let chi = chi_grid(4, 2).unwrap();
        assert_eq!((chi.inputs.len(), chi.outputs.len()), (7, 7));
        assert_eq!(chi.monitor_count(), 4 * 4 - 2);
        let shared: Vec<_> = chi.inputs.iter().filter(|v| chi.is_output(**v)).copied().collect();
        let mut want = vec![hg.id_of(&[1, 4]).unwrap(), hg.id_of(&[4, 1]).unwrap()];
        want.sort();
        assert_eq!(shared, want);

        let hg3 = Hypergrid::new(3, 2).unwrap();
        let chi3 = chi_grid(3, 2).unwrap();
        let shared: Vec<_> = chi3.inputs.iter().filter(|v| chi3.is_output(**v)).copied().collect();
        let mut want = vec![hg3.id_of(&[1, 3]).unwrap(), hg3.id_of(&[3, 1]).unwrap()];
        want.sort();
        assert_eq!(shared, want);
        let origin = hg3.id_of(&[1, 1]).unwrap();
        assert!(chi3.is_input(origin) && !chi3.is_output(origin));
        assert!(chi_grid(2, 2).is_err());
    }

    #[test]
    fn chi_grid_covers_exactly_the_border() {
        for n in 3..6 {
            let hg = Hypergrid::new(n, 2).unwrap();
            let chi = chi_grid(n, 2).unwrap();
            let b1 = hg.border_nodes(1).unwrap();
            let b2 = hg.border_nodes(2).unwrap();
            for &v in &chi.inputs {
                assert!(b1.contains(&v) || b2.contains(&v));
            }
            for id in 0..hg.node_count() {
                let on_border = hg.coord_of(id).iter().any(|&c| c == 1 || c == n);
                assert_eq!(on_border, chi.is_input(id) || chi.is_output(id));
            }
        }
    }

    #[test]
    fn chi_grid_three_dimensional_faces() {
        let hg = Hypergrid::new(3, 3).unwrap();
        let chi = chi_grid(3, 3).unwrap();
        // 27 - 8 nodes have some coordinate equal to 1
        assert_eq!(chi.inputs.len(), 19);
        assert_eq!(chi.outputs.len(), 19);
        assert!(chi.is_input(hg.id_of(&[1, 2, 2]).unwrap()));
        assert!(!chi.is_input(hg.id_of(&[2, 2, 2]).unwrap()));
        assert!(!chi.is_output(hg.id_of(&[2, 2, 2]).unwrap()));
    }

    #[test]
    fn chi_tree_examples() {
        let down = TreeSpec::complete_binary(2, Orientation::Downward);
        let chi = chi_tree(&down).unwrap();
        assert_eq!(chi.inputs, vec![0]);
        assert_eq!(chi.outputs, vec![3, 4, 5, 6]);
        let up = TreeSpec::complete_binary(2, Orientation::Upward);
        let chi = chi_tree(&up).unwrap();
        assert_eq!(chi.inputs, vec![3, 4, 5, 6]);
        assert_eq!(chi.outputs, vec![0]);
        let und = TreeSpec::complete_binary(2, Orientation::Undirected);
        assert!(chi_tree(&und).is_err());
    }

    #[test]
    fn mdmp_examples() {
        let path = Graph::from_edges(4, false, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let chi = mdmp(&path, 1, &TieBreak::AscendingId).unwrap();
        assert_eq!((chi.inputs.clone(), chi.outputs.clone()), (vec![0], vec![3]));

        let star = Graph::from_edges(5, false, [(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let chi = mdmp(&star, 2, &TieBreak::AscendingId).unwrap();
        assert!(!chi.is_input(0) && !chi.is_output(0));
        assert_eq!(chi.inputs, vec![1, 3]);
        assert_eq!(chi.outputs, vec![2, 4]);

        let (g, hg) = gen_hypergrid(3, 2, false).unwrap();
        let chi = mdmp(&g, 2, &TieBreak::AscendingId).unwrap();
        for v in chi.inputs.iter().chain(&chi.outputs) {
            let c = hg.coord_of(*v);
            assert!(c.iter().all(|&x| x == 1 || x == 3), "{c:?} is not a corner");
        }
        assert!(mdmp(&path, 3, &TieBreak::AscendingId).is_err());
    }

    #[test]
    fn mdmp_ranked_tie_break() {
        let path = Graph::from_edges(4, false, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let chi = mdmp(&path, 1, &TieBreak::Ranked(vec![3, 2, 1, 0])).unwrap();
        assert_eq!((chi.inputs, chi.outputs), (vec![3], vec![0]));
    }

    #[test]
    fn random_placement_examples() {
        let g = Graph::from_edges(2, false, [(0, 1)]).unwrap();
        let chi = random_placement(&g, 1, 1, 7).unwrap();
        let mut all = vec![chi.inputs[0], chi.outputs[0]];
        all.sort();
        assert_eq!(all, vec![0, 1]);
        let (h, _) = gen_hypergrid(4, 2, false).unwrap();
        assert_eq!(random_placement(&h, 2, 2, 9).unwrap(), random_placement(&h, 2, 2, 9).unwrap());
        assert!(random_placement(&g, 2, 1, 1).is_err());
    }

    #[test]
    fn placement_json_round_trip() {
        let chi = MonitorPlacement::new(vec![3, 1], vec![1, 5]).unwrap();
        assert_eq!(chi.to_json(), r#"{"inputs":[1,3],"outputs":[1,5]}"#);
        assert_eq!(MonitorPlacement::from_json(&chi.to_json()).unwrap(), chi);
        assert!(MonitorPlacement::from_json(r#"{"inputs":[1,1],"outputs":[2]}"#).is_err());
        assert!(MonitorPlacement::from_json("{").is_err());
    }

    fn star(leaves: usize) -> Graph {
        Graph::from_edges(leaves + 1, false, (1..=leaves).map(|l| (0, l))).unwrap()
    }

    #[test]
    fn balanced_star() {
        let chi = MonitorPlacement::new(vec![1, 2], vec![3, 4]).unwrap();
        assert!(is_monitor_balanced(&star(4), &chi).unwrap().is_balanced());
    }

    #[test]
    fn every_leaf_monitored_both_ways_is_balanced() {
        let t = gen_tree(&TreeSpec::complete_binary(3, Orientation::Undirected)).unwrap();
        let leaves: Vec<_> = (7..15).collect();
        let chi = MonitorPlacement::new(leaves.clone(), leaves).unwrap();
        assert!(is_monitor_balanced(&t, &chi).unwrap().is_balanced());
    }

    #[test]
    fn line_through_internal_node_is_unbalanced() {
        // 0 - 1 - 2 with input above node 1 and a single output below it.
        let t = Graph::from_edges(3, false, [(0, 1), (1, 2)]).unwrap();
        let chi = MonitorPlacement::new(vec![0], vec![2]).unwrap();
        assert_eq!(
            is_monitor_balanced(&t, &chi).unwrap(),
            Balance::Unbalanced(ImbalanceWitness { node: 1, input_subtrees: 1, output_subtrees: 1 })
        );
    }

    #[test]
    fn balance_rejects_non_trees() {
        let tri = Graph::from_edges(3, false, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let chi = MonitorPlacement::new(vec![0], vec![1]).unwrap();
        assert!(is_monitor_balanced(&tri, &chi).is_err());
    }

    proptest! {
        #[test]
        fn mdmp_picks_lowest_degrees(seed in any::<u64>(), d in 1usize..4) {
            let g = crate::topology::gen_erdos_renyi(9, 0.4, seed, false).unwrap();
            let chi = mdmp(&g, d, &TieBreak::AscendingId).unwrap();
            let chosen: Vec<_> = chi.inputs.iter().chain(&chi.outputs).copied().collect();
            prop_assert!(chi.inputs.iter().all(|v| !chi.is_output(*v)));
            let max_chosen = chosen.iter().map(|&v| g.degree(v)).max().unwrap();
            let min_rest = (0..9).filter(|v| !chosen.contains(v)).map(|v| g.degree(v)).min().unwrap();
            prop_assert!(max_chosen <= min_rest);
        }

        #[test]
        fn balance_is_monotone_in_monitors(seed in any::<u64>(), extra in 0usize..12, to_inputs in any::<bool>()) {
            let spec = crate::topology::random_line_free_tree(12, seed, Orientation::Undirected).unwrap();
            let t = gen_tree(&spec).unwrap();
            let leaves = spec.leaves();
            let chi = MonitorPlacement::new(leaves.clone(), leaves).unwrap();
            prop_assume!(is_monitor_balanced(&t, &chi).unwrap().is_balanced());
            let v = extra % t.node_count();
            let (mut i, mut o) = (chi.inputs.clone(), chi.outputs.clone());
            if to_inputs { if !i.contains(&v) { i.push(v) } } else if !o.contains(&v) { o.push(v) }
            let bigger = MonitorPlacement::new(i, o).unwrap();
            prop_assert!(is_monitor_balanced(&t, &bigger).unwrap().is_balanced());
        }
    }
}
