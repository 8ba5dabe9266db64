use serde::{Deserialize, Serialize};

use crate::graph::Graph;
use crate::placement::MonitorPlacement;

/// Structural upper bounds on μ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundsReport {
    /// `max(m̂, M̂) - 1`; μ cannot exceed it under simple-path routing.
    pub monitor_bound: usize,
    /// Minimum degree for undirected graphs, the source-aware `δ̂` for
    /// directed ones.
    pub degree_bound: usize,
    /// `min(n, ⌈2m/n⌉)`, undirected graphs only.
    pub edge_bound: Option<usize>,
    /// Undirected graphs only.
    pub line_free: Option<bool>,
    /// Inputs with incoming edges (directed only).
    pub complex_sources: Vec<usize>,
    /// Inputs without incoming edges (directed only).
    pub simple_sources: Vec<usize>,
}

pub fn bounds_report(g: &Graph, chi: &MonitorPlacement) -> BoundsReport {
    let n = g.node_count();
    let monitor_bound = chi.inputs.len().max(chi.outputs.len()) - 1;
    if !g.is_directed() {
        let delta = (0..n).map(|v| g.degree(v)).min().unwrap_or(0);
        let m = g.edge_count();
        return BoundsReport {
            monitor_bound,
            degree_bound: delta,
            edge_bound: Some(n.min((2 * m).div_ceil(n.max(1)))),
            line_free: g.is_line_free().ok(),
            complex_sources: Vec::new(),
            simple_sources: Vec::new(),
        };
    }
    let (complex, simple): (Vec<usize>, Vec<usize>) = chi.inputs.iter().partition(|&&v| g.in_degree(v) > 0);
    let over_rest = (0..n).filter(|v| chi.inputs.binary_search(v).is_err()).map(|v| g.in_degree(v));
    let over_complex = complex.iter().map(|&v| g.in_degree(v) + g.out_degree(v));
    BoundsReport {
        monitor_bound,
        degree_bound: over_rest.chain(over_complex).min().unwrap_or(n),
        edge_bound: None,
        line_free: None,
        complex_sources: complex,
        simple_sources: simple,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::placement::chi_grid;
    use crate::topology::gen_hypergrid;

    #[test]
    fn directed_grid_degree_bound_is_two() {
        for n in 3..=5 {
            let (g, _) = gen_hypergrid(n, 2, true).unwrap();
            let b = bounds_report(&g, &chi_grid(n, 2).unwrap());
            assert_eq!(b.degree_bound, 2);
            assert_eq!(b.simple_sources, vec![0]);
        }
    }

    #[test]
    fn undirected_grid_bounds() {
        let (g, _) = gen_hypergrid(4, 2, false).unwrap();
        let b = bounds_report(&g, &chi_grid(4, 2).unwrap());
        assert_eq!(b.degree_bound, 2);
        assert_eq!(b.edge_bound, Some(3));
        assert_eq!(b.line_free, Some(true));
    }

    #[test]
    fn edge_bound_arithmetic() {
        // 14 nodes, 16 edges: a 14-cycle plus two chords.
        let mut edges: Vec<(usize, usize)> = (0..14).map(|i| (i, (i + 1) % 14)).collect();
        edges.extend([(0, 7), (3, 10)]);
        let g = Graph::from_edges(14, false, edges).unwrap();
        let chi = MonitorPlacement::new(vec![0], vec![7]).unwrap();
        let b = bounds_report(&g, &chi);
        assert_eq!(b.edge_bound, Some(3));
        assert_eq!(b.monitor_bound, 0);
    }
}
