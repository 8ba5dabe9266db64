//! DAGs as posets: closure, order embeddings and their distance classes,
//! brute-force embedding search, routing consistency and graph powers.

use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::error::{ensure_domain, Error, Result};
use crate::graph::{Graph, Traversal};
use crate::placement::MonitorPlacement;
use crate::routing::PathIndex;
use crate::topology::gen_hypergrid;

/// Largest target graph `find_embedding` will search.
pub const EMBED_CEILING: usize = 10;

/// Injective map from the nodes of one graph into another.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeMap {
    map: Vec<usize>,
    codomain: usize,
}

impl NodeMap {
    pub fn new(map: Vec<usize>, codomain: usize) -> Result<Self> {
        let mut seen = BitSet::new(codomain);
        for &t in &map {
            ensure_domain!(t < codomain, "image {t} outside 0..{codomain}");
            ensure_domain!(!seen.contains(t), "map is not injective at image {t}");
            seen.insert(t);
        }
        Ok(NodeMap { map, codomain })
    }

    pub fn identity(n: usize) -> Self {
        NodeMap {
            map: (0..n).collect(),
            codomain: n,
        }
    }

    pub fn apply(&self, u: usize) -> usize {
        self.map[u]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    pub fn domain_size(&self) -> usize {
        self.map.len()
    }

    pub fn codomain_size(&self) -> usize {
        self.codomain
    }

    pub fn is_bijective(&self) -> bool {
        self.map.len() == self.codomain
    }

    /// Preimage of `t`, if `t` is in the image.
    pub fn inverse(&self, t: usize) -> Option<usize> {
        self.map.iter().position(|&x| x == t)
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.map.iter().copied().enumerate().collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.pairs()).expect("pairs serialize")
    }

    /// Parses `[[from,to],...]`; the domain must be `0..len`.
    pub fn from_json(s: &str, codomain: usize) -> Result<Self> {
        let mut pairs: Vec<(usize, usize)> = serde_json::from_str(s).map_err(|e| Error::Parse {
            line: Some(e.line() as u32),
            message: e.to_string(),
        })?;
        pairs.sort_unstable();
        ensure_domain!(
            pairs.iter().enumerate().all(|(i, p)| p.0 == i),
            "node map domain must be 0..{}",
            pairs.len()
        );
        NodeMap::new(pairs.into_iter().map(|p| p.1).collect(), codomain)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DistanceRequirement {
    #[default]
    Any,
    Increasing,
    Preserving,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Requirement {
    pub bijective: bool,
    pub distance: DistanceRequirement,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingClass {
    pub distance_increasing: bool,
    pub distance_preserving: bool,
}

/// Strict reachability: `reach[u]` holds every `v != u` with a directed path
/// `u -> v`.
pub fn reachability(g: &Graph) -> Vec<BitSet> {
    let none = BitSet::new(g.node_count());
    (0..g.node_count())
        .map(|u| {
            let mut r = g.reach_from(g.out_neighbors(u).iter().copied(), &none, Traversal::Forward);
            r.remove(u);
            r
        })
        .collect()
}

fn all_distances(g: &Graph) -> Vec<Vec<Option<usize>>> {
    (0..g.node_count()).map(|u| g.distances_from(u)).collect()
}

fn require_dag(g: &Graph) -> Result<()> {
    ensure_domain!(g.is_directed() && g.is_dag(), "expected a directed acyclic graph");
    Ok(())
}

pub fn transitive_closure(g: &Graph) -> Result<Graph> {
    require_dag(g)?;
    let reach = reachability(g);
    let edges = reach.iter().enumerate().flat_map(|(u, r)| r.iter().map(move |v| (u, v)));
    let closed = Graph::from_edges(g.node_count(), true, edges)?;
    match g.labels() {
        Some(l) => closed.with_labels(l.to_vec()),
        None => Ok(closed),
    }
}

fn check_total(f: &NodeMap, g: &Graph, h: &Graph) -> Result<()> {
    ensure_domain!(f.domain_size() == g.node_count(), "map is not total on the source graph");
    ensure_domain!(f.codomain_size() == h.node_count(), "map codomain does not match the target graph");
    Ok(())
}

/// `u ⪯ v` in `g` iff `f(u) ⪯ f(v)` in `h`, for all node pairs.
pub fn is_order_embedding(f: &NodeMap, g: &Graph, h: &Graph) -> Result<bool> {
    require_dag(g)?;
    require_dag(h)?;
    check_total(f, g, h)?;
    let rg = reachability(g);
    let rh = reachability(h);
    let n = g.node_count();
    Ok((0..n).all(|u| (0..n).all(|v| u == v || rg[u].contains(v) == rh[f.apply(u)].contains(f.apply(v)))))
}

/// Distance comparison over comparable pairs only.
pub fn classify_embedding(f: &NodeMap, g: &Graph, h: &Graph) -> Result<EmbeddingClass> {
    check_total(f, g, h)?;
    let dg = all_distances(g);
    let dh = all_distances(h);
    let mut class = EmbeddingClass {
        distance_increasing: true,
        distance_preserving: true,
    };
    for (u, row) in dg.iter().enumerate() {
        for (v, d) in row.iter().enumerate() {
            let (Some(a), Some(b)) = (d, dh[f.apply(u)][f.apply(v)]) else {
                continue;
            };
            if u == v {
                continue;
            }
            if *a > b {
                class.distance_increasing = false;
            }
            if *a != b {
                class.distance_preserving = false;
            }
        }
    }
    Ok(class)
}

/// First order embedding of `g` into `h` in lexicographic order of the image
/// sequence that meets `req`.
pub fn find_embedding(g: &Graph, h: &Graph, req: Requirement) -> Result<Option<NodeMap>> {
    find_embedding_with_ceiling(g, h, req, EMBED_CEILING)
}

pub fn find_embedding_with_ceiling(g: &Graph, h: &Graph, req: Requirement, ceiling: usize) -> Result<Option<NodeMap>> {
    require_dag(g)?;
    require_dag(h)?;
    if h.node_count() > ceiling {
        return Err(Error::Capacity(format!(
            "embedding search limited to {ceiling} target nodes, got {}",
            h.node_count()
        )));
    }
    let (n, m) = (g.node_count(), h.node_count());
    if n > m || (req.bijective && n != m) {
        return Ok(None);
    }
    let search = Search {
        rg: reachability(g),
        rh: reachability(h),
        dg: all_distances(g),
        dh: all_distances(h),
        distance: req.distance,
    };
    let mut map = Vec::with_capacity(n);
    let mut used = vec![false; m];
    Ok(search.extend(&mut map, &mut used, n).then(|| NodeMap { map, codomain: m }))
}

struct Search {
    rg: Vec<BitSet>,
    rh: Vec<BitSet>,
    dg: Vec<Vec<Option<usize>>>,
    dh: Vec<Vec<Option<usize>>>,
    distance: DistanceRequirement,
}

impl Search {
    fn extend(&self, map: &mut Vec<usize>, used: &mut [bool], n: usize) -> bool {
        let v = map.len();
        if v == n {
            return true;
        }
        for t in 0..used.len() {
            if used[t] || !self.fits(map, v, t) {
                continue;
            }
            map.push(t);
            used[t] = true;
            if self.extend(map, used, n) {
                return true;
            }
            used[t] = false;
            map.pop();
        }
        false
    }

    fn fits(&self, map: &[usize], v: usize, t: usize) -> bool {
        map.iter().enumerate().all(|(a, &fa)| {
            self.rg[a].contains(v) == self.rh[fa].contains(t)
                && self.rg[v].contains(a) == self.rh[t].contains(fa)
                && self.distance_ok(self.dg[a][v], self.dh[fa][t])
                && self.distance_ok(self.dg[v][a], self.dh[t][fa])
        })
    }

    fn distance_ok(&self, dg: Option<usize>, dh: Option<usize>) -> bool {
        let (Some(a), Some(b)) = (dg, dh) else {
            return true;
        };
        match self.distance {
            DistanceRequirement::Any => true,
            DistanceRequirement::Increasing => a <= b,
            DistanceRequirement::Preserving => a == b,
        }
    }
}

/// Smallest `d <= d_max` such that `g` order-embeds into the directed
/// hypergrid `H_{n,d}`.
pub fn hypergrid_dimension_lower_bound(g: &Graph, n: usize, d_max: usize) -> Result<Option<usize>> {
    hypergrid_dimension_with_ceiling(g, n, d_max, EMBED_CEILING)
}

pub fn hypergrid_dimension_with_ceiling(g: &Graph, n: usize, d_max: usize, ceiling: usize) -> Result<Option<usize>> {
    for d in 1..=d_max {
        let (h, _) = gen_hypergrid(n, d, true)?;
        if find_embedding_with_ceiling(g, &h, Requirement::default(), ceiling)?.is_some() {
            return Ok(Some(d));
        }
    }
    Ok(None)
}

/// Any two paths that both visit `u` and `w` take the same route between
/// them.
pub fn is_routing_consistent(idx: &PathIndex) -> bool {
    let paths: Vec<&[u32]> = idx.paths().collect();
    for (i, p) in paths.iter().enumerate() {
        for q in &paths[i + 1..] {
            let shared: Vec<(usize, usize)> = p
                .iter()
                .enumerate()
                .filter_map(|(a, x)| q.iter().position(|y| y == x).map(|b| (a, b)))
                .collect();
            for (s, &(pa, qa)) in shared.iter().enumerate() {
                for &(pb, qb) in &shared[s + 1..] {
                    let seg_p = &p[pa..=pb];
                    let same = if qa <= qb {
                        seg_p == &q[qa..=qb]
                    } else {
                        seg_p.iter().eq(q[qb..=qa].iter().rev())
                    };
                    if !same {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Edge `(u, v)` whenever `1 <= d(u, v) <= k`.
pub fn graph_power(g: &Graph, k: usize) -> Result<Graph> {
    ensure_domain!(k >= 1, "graph power needs k >= 1");
    let n = g.node_count();
    let mut edges = Vec::new();
    for u in 0..n {
        for (v, d) in g.distances_from(u).into_iter().enumerate() {
            if matches!(d, Some(d) if d >= 1 && d <= k) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, g.is_directed(), edges)
}

/// Image of a placement under `f`.
pub fn push_forward_placement(f: &NodeMap, chi: &MonitorPlacement) -> Result<MonitorPlacement> {
    for &v in chi.inputs.iter().chain(&chi.outputs) {
        ensure_domain!(v < f.domain_size(), "placement node {v} outside the map's domain");
    }
    MonitorPlacement::new(
        chi.inputs.iter().map(|&v| f.apply(v)).collect(),
        chi.outputs.iter().map(|&v| f.apply(v)).collect(),
    )
}
