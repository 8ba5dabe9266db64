//! Graph representation shared by every other module.
//!
//! Nodes are dense ids `0..n`. Directed and undirected graphs share one type;
//! operations that only make sense for one kind validate their arguments.

use std::collections::{BTreeSet, VecDeque};

use num_rational::Ratio;
use serde::Serialize;

use crate::bitset::BitSet;
use crate::error::{ensure_domain, Error, Result};

/// Upper limit on the node count of any constructed graph.
pub const MAX_NODES: usize = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    In,
    Out,
    Undirected,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Traversal {
    Forward,
    Backward,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    directed: bool,
    /// Normalized edges: `(u, v)` with `u < v` when undirected. Sorted.
    edges: Vec<(usize, usize)>,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
    labels: Option<Vec<String>>,
}

impl Graph {
    /// Builds a graph, collapsing duplicate edges. Self-loops are rejected.
    pub fn from_edges(
        n: usize,
        directed: bool,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        if n > MAX_NODES {
            return Err(Error::Capacity(format!(
                "{n} nodes exceeds the node-id space of {MAX_NODES}"
            )));
        }
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            ensure_domain!(u < n && v < n, "edge ({u},{v}) outside node range 0..{n}");
            ensure_domain!(u != v, "self-loop at node {u}");
            let e = if directed || u < v { (u, v) } else { (v, u) };
            set.insert(e);
        }
        let edges: Vec<_> = set.into_iter().collect();
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            out_adj[u].push(v);
            in_adj[v].push(u);
            if !directed {
                out_adj[v].push(u);
                in_adj[u].push(v);
            }
        }
        for l in out_adj.iter_mut().chain(in_adj.iter_mut()) {
            l.sort_unstable();
        }
        Ok(Graph {
            n,
            directed,
            edges,
            out_adj,
            in_adj,
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        ensure_domain!(
            labels.len() == self.n,
            "{} labels for {} nodes",
            labels.len(),
            self.n
        );
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && self.out_adj[u].binary_search(&v).is_ok()
    }

    /// Successors (all neighbours when undirected), ascending.
    #[inline]
    pub fn out_neighbors(&self, u: usize) -> &[usize] {
        &self.out_adj[u]
    }

    /// Predecessors (all neighbours when undirected), ascending.
    #[inline]
    pub fn in_neighbors(&self, u: usize) -> &[usize] {
        &self.in_adj[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        if self.directed {
            self.out_adj[u].len() + self.in_adj[u].len()
        } else {
            self.out_adj[u].len()
        }
    }

    pub fn in_degree(&self, u: usize) -> usize {
        self.in_adj[u].len()
    }

    pub fn out_degree(&self, u: usize) -> usize {
        self.out_adj[u].len()
    }

    fn check_node(&self, u: usize) -> Result<()> {
        ensure_domain!(u < self.n, "node {u} outside 0..{}", self.n);
        Ok(())
    }

    /// N(u), N_i(u) or N_o(u).
    pub fn neighbors(&self, u: usize, direction: Direction) -> Result<&[usize]> {
        self.check_node(u)?;
        match (direction, self.directed) {
            (Direction::Undirected, false) => Ok(&self.out_adj[u]),
            (Direction::Out, true) => Ok(&self.out_adj[u]),
            (Direction::In, true) => Ok(&self.in_adj[u]),
            (Direction::Undirected, true) => Err(Error::domain(
                "undirected neighbourhood requested on a directed graph",
            )),
            (_, false) => Err(Error::domain(
                "in/out neighbourhood requested on an undirected graph",
            )),
        }
    }

    pub fn degree_stats(&self) -> Result<DegreeStats> {
        ensure_domain!(self.n > 0, "degree statistics of an empty graph");
        let degs = (0..self.n).map(|u| self.degree(u));
        let delta_min = degs.clone().min().unwrap_or(0);
        let delta_max = degs.max().unwrap_or(0);
        let (mut dir_in, mut dir_out) = (None, None);
        if self.directed {
            let ins = (0..self.n).map(|u| self.in_degree(u));
            let outs = (0..self.n).map(|u| self.out_degree(u));
            dir_in = Some((ins.clone().min().unwrap(), ins.max().unwrap()));
            dir_out = Some((outs.clone().min().unwrap(), outs.max().unwrap()));
        }
        Ok(DegreeStats {
            delta_min,
            delta_max,
            delta_in_min: dir_in.map(|x| x.0),
            delta_in_max: dir_in.map(|x| x.1),
            delta_out_min: dir_out.map(|x| x.0),
            delta_out_max: dir_out.map(|x| x.1),
            average_degree: Ratio::new(2 * self.edges.len() as u64, self.n as u64),
        })
    }

    /// Nodes reachable from `u` (forward) or reaching `u` (backward) once
    /// `forbidden` is deleted. Contains `u`.
    pub fn reachable_set(
        &self,
        u: usize,
        forbidden: &BitSet,
        traversal: Traversal,
    ) -> Result<BitSet> {
        self.check_node(u)?;
        ensure_domain!(!forbidden.contains(u), "start node {u} is forbidden");
        Ok(self.reach_from(std::iter::once(u), forbidden, traversal))
    }

    /// Multi-source reachability in `G - forbidden`. Sources inside
    /// `forbidden` are ignored.
    pub fn reach_from(
        &self,
        sources: impl IntoIterator<Item = usize>,
        forbidden: &BitSet,
        traversal: Traversal,
    ) -> BitSet {
        let adj = match traversal {
            Traversal::Forward => &self.out_adj,
            Traversal::Backward => &self.in_adj,
        };
        let mut seen = BitSet::new(self.n);
        let mut queue = VecDeque::new();
        for s in sources {
            if !forbidden.contains(s) && !seen.contains(s) {
                seen.insert(s);
                queue.push_back(s);
            }
        }
        while let Some(x) = queue.pop_front() {
            for &y in &adj[x] {
                if !forbidden.contains(y) && !seen.contains(y) {
                    seen.insert(y);
                    queue.push_back(y);
                }
            }
        }
        seen
    }

    /// Every node adjacent to at least two others. Undirected graphs only.
    pub fn is_line_free(&self) -> Result<bool> {
        ensure_domain!(
            !self.directed,
            "line-freeness is defined for undirected graphs"
        );
        Ok((0..self.n).all(|u| self.out_adj[u].len() >= 2))
    }

    /// Weak connectivity for directed graphs. The empty graph counts as connected.
    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = BitSet::new(self.n);
        let mut stack = vec![0];
        seen.insert(0);
        while let Some(x) = stack.pop() {
            for &y in self.out_adj[x].iter().chain(&self.in_adj[x]) {
                if !seen.contains(y) {
                    seen.insert(y);
                    stack.push(y);
                }
            }
        }
        seen.count() == self.n
    }

    /// Kahn topological order, or `None` if the graph has a directed cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        if !self.directed {
            return None;
        }
        let mut indeg: Vec<usize> = (0..self.n).map(|u| self.in_degree(u)).collect();
        let mut ready: BTreeSet<usize> = (0..self.n).filter(|&u| indeg[u] == 0).collect();
        let mut order = Vec::with_capacity(self.n);
        while let Some(u) = ready.pop_first() {
            order.push(u);
            for &v in &self.out_adj[u] {
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    ready.insert(v);
                }
            }
        }
        (order.len() == self.n).then_some(order)
    }

    pub fn is_dag(&self) -> bool {
        self.topological_order().is_some()
    }

    /// BFS hop distances from `u` along out-edges.
    pub fn distances_from(&self, u: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        dist[u] = Some(0);
        let mut queue = VecDeque::from([u]);
        while let Some(x) = queue.pop_front() {
            let dx = dist[x].unwrap();
            for &y in &self.out_adj[x] {
                if dist[y].is_none() {
                    dist[y] = Some(dx + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// Same node set with extra edges added.
    pub fn with_added_edges(&self, extra: &[(usize, usize)]) -> Result<Graph> {
        let g = Graph::from_edges(
            self.n,
            self.directed,
            self.edges.iter().copied().chain(extra.iter().copied()),
        )?;
        Ok(Graph {
            labels: self.labels.clone(),
            ..g
        })
    }

    /// Relabels node `u` to `perm[u]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Graph> {
        ensure_domain!(perm.len() == self.n, "permutation length mismatch");
        Graph::from_edges(
            self.n,
            self.directed,
            self.edges.iter().map(|&(u, v)| (perm[u], perm[v])),
        )
    }
}

/// Degree summary. Directed graphs additionally carry in/out extremes; the
/// total degree of a directed node is in + out.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeStats {
    pub delta_min: usize,
    pub delta_max: usize,
    pub delta_in_min: Option<usize>,
    pub delta_in_max: Option<usize>,
    pub delta_out_min: Option<usize>,
    pub delta_out_max: Option<usize>,
    #[serde(serialize_with = "ser_ratio")]
    pub average_degree: Ratio<u64>,
}

fn ser_ratio<S: serde::Serializer>(r: &Ratio<u64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::gen_hypergrid;
    use proptest::prelude::*;

    fn cycle4() -> Graph {
        Graph::from_edges(4, false, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap()
    }

    fn path3() -> Graph {
        Graph::from_edges(3, false, [(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn neighbors_on_cycle_and_grid() {
        assert_eq!(cycle4().neighbors(1, Direction::Undirected).unwrap(), &[0, 2]);
        let (g, hg) = gen_hypergrid(4, 2, true).unwrap();
        let o = hg.id_of(&[1, 1]).unwrap();
        let mut out: Vec<_> = g.neighbors(o, Direction::Out).unwrap().to_vec();
        out.sort();
        let mut want = vec![hg.id_of(&[1, 2]).unwrap(), hg.id_of(&[2, 1]).unwrap()];
        want.sort();
        assert_eq!(out, want);
        assert!(g.neighbors(o, Direction::In).unwrap().is_empty());
    }

    #[test]
    fn neighbors_direction_errors() {
        assert!(cycle4().neighbors(0, Direction::In).is_err());
        assert!(cycle4().neighbors(9, Direction::Undirected).is_err());
        let (g, _) = gen_hypergrid(3, 2, true).unwrap();
        assert!(g.neighbors(0, Direction::Undirected).is_err());
    }

    #[test]
    fn self_loops_rejected_duplicates_collapsed() {
        assert!(Graph::from_edges(2, false, [(1, 1)]).is_err());
        let g = Graph::from_edges(2, false, [(0, 1), (1, 0), (0, 1)]).unwrap();
        assert_eq!(g.edge_count(), 1);
        let d = Graph::from_edges(2, true, [(0, 1), (1, 0)]).unwrap();
        assert_eq!(d.edge_count(), 2);
    }

    #[test]
    fn degree_stats_examples() {
        let (g, _) = gen_hypergrid(4, 2, false).unwrap();
        let s = g.degree_stats().unwrap();
        assert_eq!((s.delta_min, s.delta_max), (2, 4));
        let (g, _) = gen_hypergrid(3, 3, true).unwrap();
        assert_eq!(g.degree_stats().unwrap().delta_in_min, Some(0));
        assert_eq!(path3().degree_stats().unwrap().average_degree, Ratio::new(4, 3));
        let empty = Graph::from_edges(0, false, []).unwrap();
        assert!(empty.degree_stats().is_err());
    }

    #[test]
    fn reachable_set_examples() {
        let (g, hg) = gen_hypergrid(3, 2, true).unwrap();
        let none = BitSet::new(9);
        let src = hg.id_of(&[1, 1]).unwrap();
        let sink = hg.id_of(&[3, 3]).unwrap();
        assert_eq!(g.reachable_set(src, &none, Traversal::Forward).unwrap().count(), 9);
        assert_eq!(
            g.reachable_set(sink, &none, Traversal::Forward).unwrap().to_vec(),
            vec![sink]
        );
        let f = BitSet::from_indices(9, [hg.id_of(&[1, 2]).unwrap(), hg.id_of(&[2, 1]).unwrap()]);
        assert_eq!(g.reachable_set(src, &f, Traversal::Forward).unwrap().to_vec(), vec![src]);
        assert!(g.reachable_set(hg.id_of(&[1, 2]).unwrap(), &f, Traversal::Forward).is_err());
    }

    #[test]
    fn line_free_and_connected() {
        let (g, _) = gen_hypergrid(3, 2, false).unwrap();
        assert!(g.is_line_free().unwrap());
        assert!(!path3().is_line_free().unwrap());
        let tri = Graph::from_edges(3, false, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(tri.is_line_free().unwrap());

        assert!(!Graph::from_edges(4, false, [(0, 1), (2, 3)]).unwrap().is_connected());
        assert!(gen_hypergrid(4, 2, true).unwrap().0.is_connected());
        assert!(Graph::from_edges(1, false, []).unwrap().is_connected());
    }

    #[test]
    fn hypergrid_in_plus_out_equals_undirected_degree() {
        for (n, d) in [(3, 2), (4, 2), (3, 3)] {
            let (dg, _) = gen_hypergrid(n, d, true).unwrap();
            let (ug, _) = gen_hypergrid(n, d, false).unwrap();
            for u in 0..dg.node_count() {
                assert_eq!(dg.in_degree(u) + dg.out_degree(u), ug.degree(u));
            }
        }
    }

    fn arb_graph() -> impl Strategy<Value = Graph> {
        (2usize..9, any::<bool>()).prop_flat_map(|(n, directed)| {
            proptest::collection::vec((0..n, 0..n), 0..20).prop_map(move |es| {
                Graph::from_edges(n, directed, es.into_iter().filter(|(u, v)| u != v)).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn reachable_set_properties(g in arb_graph(), start in 0usize..9, f1 in proptest::collection::vec(0usize..9, 0..4), f2 in proptest::collection::vec(0usize..9, 0..3)) {
            let n = g.node_count();
            let u = start % n;
            let small = BitSet::from_indices(n, f1.iter().map(|x| x % n).filter(|&x| x != u));
            let mut big = small.clone();
            for x in f2.iter().map(|x| x % n).filter(|&x| x != u) { big.insert(x); }
            for t in [Traversal::Forward, Traversal::Backward] {
                let r_small = g.reachable_set(u, &small, t).unwrap();
                let r_big = g.reachable_set(u, &big, t).unwrap();
                prop_assert!(r_small.contains(u));
                prop_assert!(!r_small.intersects(&small));
                prop_assert!(r_big.is_subset(&r_small));
            }
        }

        #[test]
        fn degree_stats_permutation_invariant(g in arb_graph(), seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let mut perm: Vec<usize> = (0..g.node_count()).collect();
            perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let h = g.permuted(&perm).unwrap();
            let a = g.degree_stats().unwrap();
            let b = h.degree_stats().unwrap();
            prop_assert_eq!(&a, &b);
            prop_assert!(Ratio::from_integer(a.delta_min as u64) <= a.average_degree);
            prop_assert!(a.average_degree <= Ratio::from_integer(a.delta_max as u64));
        }
    }
}
