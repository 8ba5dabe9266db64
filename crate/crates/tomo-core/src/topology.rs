//! Generators for the topology families: hypergrids, trees and seeded random
//! graphs.

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::error::{ensure_domain, Error, Result};
use crate::graph::{Graph, MAX_NODES};
use crate::rng::rng;

/// Coordinate system of the hypergrid `[n]^d`.
///
/// Ids are mixed radix with coordinate 1 varying fastest:
/// `id = sum_i (x_i - 1) * n^(i-1)`. Coordinates are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Hypergrid {
    pub n: usize,
    pub d: usize,
}

impl Hypergrid {
    pub fn new(n: usize, d: usize) -> Result<Self> {
        ensure_domain!(n >= 3, "hypergrid side n={n} must be at least 3");
        ensure_domain!(d >= 1, "hypergrid dimension must be at least 1");
        let size = (0..d).try_fold(1usize, |acc, _| acc.checked_mul(n));
        match size {
            Some(s) if s <= MAX_NODES => Ok(Hypergrid { n, d }),
            _ => Err(Error::Capacity(format!("{n}^{d} nodes overflow the node-id space"))),
        }
    }

    pub fn node_count(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    pub fn coord_of(&self, id: usize) -> Vec<usize> {
        let mut rest = id;
        (0..self.d)
            .map(|_| {
                let c = rest % self.n + 1;
                rest /= self.n;
                c
            })
            .collect()
    }

    pub fn id_of(&self, coord: &[usize]) -> Result<usize> {
        ensure_domain!(
            coord.len() == self.d,
            "coordinate of length {} in dimension {}",
            coord.len(),
            self.d
        );
        let mut id = 0;
        for &c in coord.iter().rev() {
            ensure_domain!((1..=self.n).contains(&c), "coordinate {c} outside [1,{}]", self.n);
            id = id * self.n + (c - 1);
        }
        Ok(id)
    }

    /// The border set: nodes whose `i`-th coordinate (1-based) equals 1.
    pub fn border_nodes(&self, i: usize) -> Result<Vec<usize>> {
        ensure_domain!((1..=self.d).contains(&i), "dimension index {i} outside [1,{}]", self.d);
        Ok((0..self.node_count())
            .filter(|&id| self.coord_of(id)[i - 1] == 1)
            .collect())
    }
}

/// `H_{n,d}`: edge x -> x + e_i for every coordinate i with x_i < n.
pub fn gen_hypergrid(n: usize, d: usize, directed: bool) -> Result<(Graph, Hypergrid)> {
    let hg = Hypergrid::new(n, d)?;
    let mut edges = Vec::with_capacity(d * hg.node_count());
    for id in 0..hg.node_count() {
        let x = hg.coord_of(id);
        let mut stride = 1;
        for &xi in &x {
            if xi < n {
                edges.push((id, id + stride));
            }
            stride *= n;
        }
    }
    Ok((Graph::from_edges(hg.node_count(), directed, edges)?, hg))
}

pub fn border_nodes(n: usize, d: usize, i: usize) -> Result<Vec<usize>> {
    Hypergrid::new(n, d)?.border_nodes(i)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    /// Edges parent -> child; the root is the only source.
    Downward,
    /// Edges child -> parent; the root is the only sink.
    Upward,
    Undirected,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeSpec {
    pub parent: Vec<Option<usize>>,
    pub orientation: Orientation,
}

impl TreeSpec {
    pub fn node_count(&self) -> usize {
        self.parent.len()
    }

    pub fn root(&self) -> Option<usize> {
        self.parent.iter().position(Option::is_none)
    }

    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut ch = vec![Vec::new(); self.parent.len()];
        for (v, p) in self.parent.iter().enumerate() {
            if let Some(p) = *p {
                if p < ch.len() {
                    ch[p].push(v);
                }
            }
        }
        ch
    }

    /// Childless nodes, ascending.
    pub fn leaves(&self) -> Vec<usize> {
        self.children()
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_empty())
            .map(|(v, _)| v)
            .collect()
    }

    /// No node with exactly one child: such a node (or a one-child root)
    /// forms a line.
    pub fn is_line_free(&self) -> bool {
        self.children().iter().all(|c| c.len() != 1)
    }

    fn validate(&self) -> Result<usize> {
        let n = self.parent.len();
        ensure_domain!(n > 0, "empty tree");
        let roots: Vec<_> = (0..n).filter(|&v| self.parent[v].is_none()).collect();
        ensure_domain!(roots.len() == 1, "tree needs exactly one root, found {}", roots.len());
        for (v, p) in self.parent.iter().enumerate() {
            if let Some(p) = *p {
                ensure_domain!(p < n, "parent {p} of {v} out of range");
            }
        }
        // Every node must reach the root within n steps.
        for start in 0..n {
            let mut cur = start;
            let mut steps = 0;
            while let Some(p) = self.parent[cur] {
                cur = p;
                steps += 1;
                ensure_domain!(steps <= n, "parent map has a cycle through node {start}");
            }
        }
        Ok(roots[0])
    }

    pub fn complete_binary(depth: usize, orientation: Orientation) -> TreeSpec {
        let n = (1usize << (depth + 1)) - 1;
        let parent = (0..n).map(|v| (v > 0).then(|| (v - 1) / 2)).collect();
        TreeSpec { parent, orientation }
    }
}

pub fn gen_tree(spec: &TreeSpec) -> Result<Graph> {
    spec.validate()?;
    let edges = spec.parent.iter().enumerate().filter_map(|(v, p)| {
        p.map(|p| match spec.orientation {
            Orientation::Upward => (v, p),
            _ => (p, v),
        })
    });
    Graph::from_edges(
        spec.node_count(),
        spec.orientation != Orientation::Undirected,
        edges,
    )
}

/// Random tree in which every internal node has at least three neighbours
/// (so it contains no line). Grows by expanding a random leaf into 2 or 3
/// children until adding more would exceed `max_nodes`.
pub fn random_line_free_tree(max_nodes: usize, seed: u64, orientation: Orientation) -> Result<TreeSpec> {
    ensure_domain!(max_nodes >= 4, "a line-free tree needs at least 4 nodes");
    let mut r = rng(seed);
    let mut parent: Vec<Option<usize>> = vec![None, Some(0), Some(0), Some(0)];
    loop {
        let room = max_nodes - parent.len();
        if room < 2 || (parent.len() > 4 && r.gen_bool(0.25)) {
            break;
        }
        let children_of_leaf = 2 + usize::from(room >= 3 && r.gen_bool(0.5));
        let mut has_child = vec![false; parent.len()];
        for p in parent.iter().flatten() {
            has_child[*p] = true;
        }
        let leaves: Vec<usize> = (1..parent.len()).filter(|&v| !has_child[v]).collect();
        let leaf = *leaves.choose(&mut r).expect("tree always has leaves");
        for _ in 0..children_of_leaf {
            parent.push(Some(leaf));
        }
    }
    Ok(TreeSpec { parent, orientation })
}

/// G(n, p): every candidate edge independently with probability `p`.
/// Candidates are visited in lexicographic order; ordered pairs when directed.
pub fn gen_erdos_renyi(n: usize, p: f64, seed: u64, directed: bool) -> Result<Graph> {
    ensure_domain!((0.0..=1.0).contains(&p), "edge probability {p} outside [0,1]");
    let mut r = rng(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u == v || (!directed && v < u) {
                continue;
            }
            if r.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, directed, edges)
}

/// Random DAG: each pair `u < v` carries the edge `u -> v` with probability `p`.
pub fn gen_random_dag(n: usize, p: f64, seed: u64) -> Result<Graph> {
    ensure_domain!((0.0..=1.0).contains(&p), "edge probability {p} outside [0,1]");
    let mut r = rng(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if r.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, true, edges)
}
