//! Minimal GraphML reader and writer: nodes, edges and an optional node
//! `label` attribute.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{ensure_domain, Error, Result};
use crate::graph::Graph;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphmlImport {
    pub graph: Graph,
    pub self_loops_dropped: usize,
    pub duplicate_edges: usize,
}

pub fn read_graphml(path: impl AsRef<Path>) -> Result<GraphmlImport> {
    parse_graphml(&std::fs::read_to_string(path)?)
}

pub fn parse_graphml(text: &str) -> Result<GraphmlImport> {
    let doc = roxmltree::Document::parse(text).map_err(|e| Error::Parse {
        line: Some(e.pos().row),
        message: e.to_string(),
    })?;
    let line_of = |n: roxmltree::Node| doc.text_pos_at(n.range().start).row;
    let err = |n: roxmltree::Node, message: String| Error::Parse {
        line: Some(line_of(n)),
        message,
    };

    let root = doc.root_element();
    if root.tag_name().name() != "graphml" {
        return Err(err(root, format!("expected <graphml>, found <{}>", root.tag_name().name())));
    }
    let label_key = root
        .children()
        .filter(|n| n.tag_name().name() == "key")
        .find(|n| {
            n.attribute("attr.name") == Some("label")
                && n.attribute("for").map_or(true, |f| f == "node" || f == "all")
        })
        .and_then(|n| n.attribute("id"));
    let graph_el = root
        .children()
        .find(|n| n.tag_name().name() == "graph")
        .ok_or_else(|| err(root, "no <graph> element".into()))?;
    let directed = graph_el.attribute("edgedefault") == Some("directed");

    let mut ids: HashMap<&str, usize> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    for node in graph_el.children().filter(|n| n.tag_name().name() == "node") {
        let id = node.attribute("id").ok_or_else(|| err(node, "node without id".into()))?;
        if ids.insert(id, labels.len()).is_some() {
            return Err(err(node, format!("duplicate node id {id:?}")));
        }
        let label = label_key
            .and_then(|k| {
                node.children()
                    .find(|d| d.tag_name().name() == "data" && d.attribute("key") == Some(k))
                    .and_then(|d| d.text())
            })
            .map(|t| t.trim().to_string())
            .unwrap_or_else(|| id.to_string());
        labels.push(label);
    }
    ensure_domain!(!labels.is_empty(), "graph has no nodes");

    let mut edges = Vec::new();
    let mut self_loops_dropped = 0;
    for edge in graph_el.children().filter(|n| n.tag_name().name() == "edge") {
        let end = |attr: &str| -> Result<usize> {
            let id = edge
                .attribute(attr)
                .ok_or_else(|| err(edge, format!("edge without {attr}")))?;
            ids.get(id)
                .copied()
                .ok_or_else(|| err(edge, format!("edge refers to unknown node {id:?}")))
        };
        let (u, v) = (end("source")?, end("target")?);
        if u == v {
            self_loops_dropped += 1;
        } else {
            edges.push((u, v));
        }
    }
    let raw = edges.len();
    let mut graph = Graph::from_edges(labels.len(), directed, edges)?;
    let duplicate_edges = raw - graph.edge_count();
    if label_key.is_some() {
        graph = graph.with_labels(labels)?;
    }
    Ok(GraphmlImport {
        graph,
        self_loops_dropped,
        duplicate_edges,
    })
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

pub fn write_graphml(g: &Graph) -> String {
    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    s.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
    if g.labels().is_some() {
        s.push_str("  <key attr.name=\"label\" attr.type=\"string\" for=\"node\" id=\"d0\"/>\n");
    }
    let dir = if g.is_directed() { "directed" } else { "undirected" };
    let _ = writeln!(s, "  <graph edgedefault=\"{dir}\">");
    for v in 0..g.node_count() {
        match g.labels() {
            Some(l) => {
                let _ = writeln!(s, "    <node id=\"{v}\"><data key=\"d0\">{}</data></node>", escape(&l[v]));
            }
            None => {
                let _ = writeln!(s, "    <node id=\"{v}\"/>");
            }
        }
    }
    for &(u, v) in g.edges() {
        let _ = writeln!(s, "    <edge source=\"{u}\" target=\"{v}\"/>");
    }
    s.push_str("  </graph>\n</graphml>\n");
    s
}
