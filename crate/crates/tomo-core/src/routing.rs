//! Measurement paths under the three routing schemes.
//!
//! Simple-path routing (CSP) materializes every path into a [`PathIndex`].
//! The arbitrary-walk schemes cannot be enumerated, so they are answered by
//! reachability in [`WalkOracle`]. Both implement [`SeparationOracle`], which
//! is all the identifiability search needs.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::error::{ensure_domain, Error, Result};
use crate::graph::{Graph, Traversal};
use crate::placement::MonitorPlacement;

/// Default ceiling on enumerated simple paths.
pub const DEFAULT_PATH_BUDGET: usize = 5_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RoutingScheme {
    /// Simple paths between distinct input/output nodes.
    #[serde(rename = "csp")]
    Csp,
    /// Arbitrary walks with at least one edge.
    #[serde(rename = "cap-")]
    CapMinus,
    /// Arbitrary walks, including the single-node loop at a node that is both
    /// an input and an output.
    #[serde(rename = "cap")]
    Cap,
}

impl RoutingScheme {
    pub fn as_str(&self) -> &'static str {
        match self {
            RoutingScheme::Csp => "csp",
            RoutingScheme::CapMinus => "cap-",
            RoutingScheme::Cap => "cap",
        }
    }
}

impl fmt::Display for RoutingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RoutingScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csp" => Ok(RoutingScheme::Csp),
            "cap-" | "cap_minus" | "capminus" => Ok(RoutingScheme::CapMinus),
            "cap" => Ok(RoutingScheme::Cap),
            other => Err(Error::domain(format!("unknown routing scheme {other:?}"))),
        }
    }
}

/// Something that can tell which nodes stay observable when a set fails.
pub trait SeparationOracle: Sync {
    fn node_count(&self) -> usize;

    /// Nodes outside `avoid` that lie on at least one measurement path
    /// disjoint from `avoid`.
    fn covered_avoiding(&self, avoid: &BitSet) -> BitSet;

    /// Nodes outside `avoid` that no path disjoint from `avoid` can observe.
    fn dead_after(&self, avoid: &BitSet) -> BitSet {
        let mut dead = self.covered_avoiding(avoid).complement();
        dead.difference_with(avoid);
        dead
    }

    /// `P(U) != P(W)`: some path touches exactly one of the two sets.
    fn separates(&self, u: &BitSet, w: &BitSet) -> bool {
        let u_only = u.difference(w);
        let w_only = w.difference(u);
        self.covered_avoiding(w).intersects(&u_only) || self.covered_avoiding(u).intersects(&w_only)
    }
}

#[derive(Clone, Debug)]
pub struct CspOptions {
    pub path_budget: usize,
    /// Input nodes that may end a path but never start one.
    pub endpoint_only: Vec<usize>,
}

impl Default for CspOptions {
    fn default() -> Self {
        CspOptions {
            path_budget: DEFAULT_PATH_BUDGET,
            endpoint_only: Vec::new(),
        }
    }
}

/// Enumerated simple measurement paths and the node -> path incidence.
#[derive(Clone, Debug)]
pub struct PathIndex {
    node_count: usize,
    nodes: Vec<u32>,
    offsets: Vec<usize>,
    incidence: Vec<BitSet>,
    all: BitSet,
}

impl PathIndex {
    /// Builds an index from explicit paths (used for tests and imported
    /// path sets). Paths must be non-empty and within range.
    pub fn from_paths(node_count: usize, paths: &[Vec<usize>]) -> Result<Self> {
        let mut nodes = Vec::new();
        let mut offsets = vec![0];
        for p in paths {
            ensure_domain!(!p.is_empty(), "empty path");
            for &v in p {
                ensure_domain!(v < node_count, "path node {v} outside 0..{node_count}");
                nodes.push(v as u32);
            }
            offsets.push(nodes.len());
        }
        Ok(Self::finish(node_count, nodes, offsets))
    }

    fn finish(node_count: usize, nodes: Vec<u32>, offsets: Vec<usize>) -> Self {
        let count = offsets.len() - 1;
        let mut incidence = vec![BitSet::new(count); node_count];
        for i in 0..count {
            for &v in &nodes[offsets[i]..offsets[i + 1]] {
                incidence[v as usize].insert(i);
            }
        }
        PathIndex {
            node_count,
            nodes,
            offsets,
            incidence,
            all: BitSet::full(count),
        }
    }

    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn path(&self, i: usize) -> &[u32] {
        &self.nodes[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn paths(&self) -> impl Iterator<Item = &[u32]> + '_ {
        (0..self.len()).map(|i| self.path(i))
    }

    /// Path ids through `v`.
    pub fn incidence(&self, v: usize) -> &BitSet {
        &self.incidence[v]
    }

    pub fn all_paths(&self) -> &BitSet {
        &self.all
    }

    /// Union of the incidences of the nodes in `set`.
    pub fn path_union(&self, set: &BitSet) -> BitSet {
        let mut acc = BitSet::new(self.len());
        for v in set.iter() {
            acc.union_with(&self.incidence[v]);
        }
        acc
    }

    /// Nodes on at least one path.
    pub fn covered_nodes(&self) -> BitSet {
        BitSet::from_indices(
            self.node_count,
            (0..self.node_count).filter(|&v| !self.incidence[v].is_empty()),
        )
    }

    /// Newline-delimited, space-separated node ids. Debug output only.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for p in self.paths() {
            let line: Vec<String> = p.iter().map(u32::to_string).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }
}

impl SeparationOracle for PathIndex {
    fn node_count(&self) -> usize {
        self.node_count
    }

    fn covered_avoiding(&self, avoid: &BitSet) -> BitSet {
        let mut alive = self.all.clone();
        for v in avoid.iter() {
            alive.difference_with(&self.incidence[v]);
        }
        let mut out = BitSet::new(self.node_count);
        if alive.is_empty() {
            return out;
        }
        for v in 0..self.node_count {
            if self.incidence[v].intersects(&alive) {
                out.insert(v);
            }
        }
        out
    }
}

/// Every simple path from an input node to a different output node, by DFS
/// with neighbours in ascending order. Paths may pass through monitor nodes.
pub fn enumerate_csp_paths(g: &Graph, chi: &MonitorPlacement, path_budget: usize) -> Result<PathIndex> {
    enumerate_csp_paths_with(
        g,
        chi,
        &CspOptions {
            path_budget,
            ..CspOptions::default()
        },
    )
}

pub fn enumerate_csp_paths_with(g: &Graph, chi: &MonitorPlacement, opts: &CspOptions) -> Result<PathIndex> {
    chi.validate_for(g)?;
    let n = g.node_count();
    let mut is_output = vec![false; n];
    for &o in &chi.outputs {
        is_output[o] = true;
    }
    let mut nodes: Vec<u32> = Vec::new();
    let mut offsets = vec![0usize];
    let mut on_path = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    // cursor[i] = next neighbour position to try from stack[i]
    let mut cursor: Vec<usize> = Vec::new();

    for &s in &chi.inputs {
        if opts.endpoint_only.contains(&s) {
            continue;
        }
        stack.push(s);
        cursor.push(0);
        on_path[s] = true;
        while let Some(&top) = stack.last() {
            let depth = stack.len() - 1;
            let nbrs = g.out_neighbors(top);
            if cursor[depth] >= nbrs.len() {
                on_path[top] = false;
                stack.pop();
                cursor.pop();
                continue;
            }
            let next = nbrs[cursor[depth]];
            cursor[depth] += 1;
            if on_path[next] {
                continue;
            }
            stack.push(next);
            cursor.push(0);
            on_path[next] = true;
            if is_output[next] {
                if offsets.len() > opts.path_budget {
                    return Err(Error::BudgetExceeded {
                        budget: opts.path_budget,
                        emitted: offsets.len() - 1,
                    });
                }
                nodes.extend(stack.iter().map(|&v| v as u32));
                offsets.push(nodes.len());
            }
        }
    }
    Ok(PathIndex::finish(n, nodes, offsets))
}

/// `P(U) △ P(W) != ∅`, witnessed by the smallest differing path id.
pub fn csp_separates(idx: &PathIndex, u: &BitSet, w: &BitSet) -> Result<Option<usize>> {
    ensure_domain!(u != w, "separation query with identical sets");
    Ok(idx.path_union(u).first_difference(&idx.path_union(w)))
}

/// Reachability view of the walk-based schemes.
#[derive(Clone, Debug)]
pub struct WalkOracle<'a> {
    g: &'a Graph,
    inputs: BitSet,
    outputs: BitSet,
    allow_loop_paths: bool,
}

impl<'a> WalkOracle<'a> {
    pub fn new(g: &'a Graph, chi: &MonitorPlacement, scheme: RoutingScheme) -> Result<Self> {
        chi.validate_for(g)?;
        ensure_domain!(scheme != RoutingScheme::Csp, "walk oracle does not model simple-path routing");
        let n = g.node_count();
        Ok(WalkOracle {
            g,
            inputs: BitSet::from_indices(n, chi.inputs.iter().copied()),
            outputs: BitSet::from_indices(n, chi.outputs.iter().copied()),
            allow_loop_paths: scheme == RoutingScheme::Cap,
        })
    }

    fn reach(&self, avoid: &BitSet) -> (BitSet, BitSet) {
        let fwd = self.g.reach_from(self.inputs.iter(), avoid, Traversal::Forward);
        let bwd = self.g.reach_from(self.outputs.iter(), avoid, Traversal::Backward);
        (fwd, bwd)
    }

    /// A walk through `u` with at least one edge exists iff `u` is reachable
    /// from an input and reaches an output, and it has either a predecessor
    /// that is reachable from an input or a successor that reaches an output.
    fn walk_through(&self, u: usize, avoid: &BitSet, fwd: &BitSet, bwd: &BitSet) -> bool {
        if avoid.contains(u) || !fwd.contains(u) || !bwd.contains(u) {
            return false;
        }
        if self.allow_loop_paths && self.inputs.contains(u) && self.outputs.contains(u) {
            return true;
        }
        self.g.in_neighbors(u).iter().any(|&x| fwd.contains(x))
            || self.g.out_neighbors(u).iter().any(|&y| bwd.contains(y))
    }

    /// Witness walk touching some node of `touch` and avoiding `avoid`.
    pub fn separating_walk(&self, touch: &BitSet, avoid: &BitSet) -> Result<Option<Vec<usize>>> {
        ensure_domain!(!touch.intersects(avoid), "touch and avoid sets overlap");
        let (fwd, bwd) = self.reach(avoid);
        let Some(u) = touch.iter().find(|&u| self.walk_through(u, avoid, &fwd, &bwd)) else {
            return Ok(None);
        };
        if self.allow_loop_paths && self.inputs.contains(u) && self.outputs.contains(u) {
            return Ok(Some(vec![u]));
        }
        let n = self.g.node_count();
        let pred = self.g.in_neighbors(u).iter().copied().find(|&x| fwd.contains(x));
        let walk = match pred {
            Some(x) => {
                let mut w = self.route(x, avoid, Traversal::Backward, &self.inputs, n);
                w.reverse();
                w.extend(self.route(u, avoid, Traversal::Forward, &self.outputs, n));
                w
            }
            None => {
                let y = self
                    .g
                    .out_neighbors(u)
                    .iter()
                    .copied()
                    .find(|&y| bwd.contains(y))
                    .expect("covered node has a usable edge");
                let mut w = self.route(u, avoid, Traversal::Backward, &self.inputs, n);
                w.reverse();
                w.extend(self.route(y, avoid, Traversal::Forward, &self.outputs, n));
                w
            }
        };
        Ok(Some(walk))
    }

    /// Shortest route from `start` to the nearest node of `targets`, moving
    /// along `traversal` in `G - avoid`. Returned in traversal order.
    fn route(&self, start: usize, avoid: &BitSet, traversal: Traversal, targets: &BitSet, n: usize) -> Vec<usize> {
        let mut prev = vec![usize::MAX; n];
        let mut queue = std::collections::VecDeque::from([start]);
        prev[start] = start;
        while let Some(x) = queue.pop_front() {
            if targets.contains(x) {
                let mut out = vec![x];
                let mut cur = x;
                while cur != start {
                    cur = prev[cur];
                    out.push(cur);
                }
                out.reverse();
                return out;
            }
            let nbrs = match traversal {
                Traversal::Forward => self.g.out_neighbors(x),
                Traversal::Backward => self.g.in_neighbors(x),
            };
            for &y in nbrs {
                if !avoid.contains(y) && prev[y] == usize::MAX {
                    prev[y] = x;
                    queue.push_back(y);
                }
            }
        }
        unreachable!("route target was established by reachability")
    }
}

impl SeparationOracle for WalkOracle<'_> {
    fn node_count(&self) -> usize {
        self.g.node_count()
    }

    fn covered_avoiding(&self, avoid: &BitSet) -> BitSet {
        let (fwd, bwd) = self.reach(avoid);
        let mut out = fwd.intersection(&bwd);
        for u in out.clone().iter() {
            if !self.walk_through(u, avoid, &fwd, &bwd) {
                out.remove(u);
            }
        }
        out
    }
}

/// Whether a CAP⁻ walk touches `touch` while avoiding `avoid`, with a witness.
pub fn cap_minus_separating_path_exists(
    g: &Graph,
    chi: &MonitorPlacement,
    touch: &BitSet,
    avoid: &BitSet,
) -> Result<Option<Vec<usize>>> {
    WalkOracle::new(g, chi, RoutingScheme::CapMinus)?.separating_walk(touch, avoid)
}
