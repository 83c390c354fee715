//! Graph serialization: DOT, GraphML, and a round-trippable JSON document.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::entities::EntityId;
use crate::export::{xml_escape, ExportError};
use crate::networks::{AssociationGraph, CoMentionWindow, ComponentPartition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphFormat {
    Dot,
    Graphml,
    Json,
}

impl GraphFormat {
    pub fn extension(self) -> &'static str {
        match self {
            GraphFormat::Dot => "dot",
            GraphFormat::Graphml => "graphml",
            GraphFormat::Json => "json",
        }
    }
}

/// Edge thickness: linear from the minimum weight at 1px to the maximum at
/// 8px; a constant 4px when all weights are equal.
fn penwidth(weight: u32, min_w: u32, max_w: u32) -> f64 {
    if min_w == max_w {
        4.0
    } else {
        1.0 + 7.0 * f64::from(weight - min_w) / f64::from(max_w - min_w)
    }
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Undirected DOT document with canonical-name labels and weight-scaled
/// `penwidth`.
pub fn graph_to_dot(graph: &AssociationGraph, labels: &BTreeMap<EntityId, String>) -> String {
    let mut out = String::from("graph associations {\n");
    let _ = writeln!(out, "  // window={}", graph.window.as_u8());
    for &node in &graph.nodes {
        let label = labels
            .get(&node)
            .cloned()
            .unwrap_or_else(|| format!("entity-{node}"));
        let _ = writeln!(out, "  n{} [label=\"{}\"];", node, dot_escape(&label));
    }
    let weights: Vec<u32> = graph.edges().map(|(_, w)| w).collect();
    let min_w = weights.iter().copied().min().unwrap_or(1);
    let max_w = weights.iter().copied().max().unwrap_or(1);
    for ((a, b), w) in graph.edges() {
        let _ = writeln!(
            out,
            "  n{} -- n{} [weight={}, penwidth={:.2}];",
            a,
            b,
            w,
            penwidth(w, min_w, max_w)
        );
    }
    out.push_str("}\n");
    out
}

/// GraphML with a string `label` attribute on nodes and an integer `weight`
/// attribute on edges.
pub fn graph_to_graphml(graph: &AssociationGraph, labels: &BTreeMap<EntityId, String>) -> String {
    let mut out = String::from(concat!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n",
        "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n",
        "  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n",
        "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"int\"/>\n",
    ));
    let _ = writeln!(
        out,
        "  <graph id=\"associations-w{}\" edgedefault=\"undirected\">",
        graph.window.as_u8()
    );
    for &node in &graph.nodes {
        let label = labels
            .get(&node)
            .cloned()
            .unwrap_or_else(|| format!("entity-{node}"));
        let _ = writeln!(
            out,
            "    <node id=\"n{}\"><data key=\"label\">{}</data></node>",
            node,
            xml_escape(&label)
        );
    }
    for (i, ((a, b), w)) in graph.edges().enumerate() {
        let _ = writeln!(
            out,
            "    <edge id=\"e{i}\" source=\"n{a}\" target=\"n{b}\"><data key=\"weight\">{w}</data></edge>"
        );
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}

#[derive(Debug, Serialize, Deserialize)]
struct GraphDoc {
    window: u8,
    paragraph_filter: String,
    nodes: Vec<NodeDoc>,
    edges: Vec<EdgeDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
struct NodeDoc {
    id: u32,
    label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    component: Option<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
struct EdgeDoc {
    source: u32,
    target: u32,
    weight: u32,
}

/// JSON document with nodes sorted by id and edges by (source, target).
/// Window and paragraph filter ride along so the import reproduces an equal
/// graph.
pub fn graph_to_json(
    graph: &AssociationGraph,
    partition: Option<&ComponentPartition>,
    labels: &BTreeMap<EntityId, String>,
) -> String {
    let doc = GraphDoc {
        window: graph.window.as_u8(),
        paragraph_filter: graph.paragraph_filter.clone(),
        nodes: graph
            .nodes
            .iter()
            .map(|&n| NodeDoc {
                id: n.0,
                label: labels
                    .get(&n)
                    .cloned()
                    .unwrap_or_else(|| format!("entity-{n}")),
                component: partition.and_then(|p| p.component_of(n)),
            })
            .collect(),
        edges: graph
            .edges()
            .map(|((a, b), w)| EdgeDoc {
                source: a.0,
                target: b.0,
                weight: w,
            })
            .collect(),
    };
    let mut json = serde_json::to_string_pretty(&doc).expect("graph doc serializes");
    json.push('\n');
    json
}

/// Inverse of [`graph_to_json`].
pub fn graph_from_json(json: &str) -> Result<AssociationGraph, ExportError> {
    let doc: GraphDoc = serde_json::from_str(json)?;
    let window = CoMentionWindow::try_from(doc.window)
        .map_err(|e| ExportError::Json(serde::de::Error::custom(e.to_string())))?;
    let nodes: BTreeSet<EntityId> = doc.nodes.iter().map(|n| EntityId(n.id)).collect();
    Ok(AssociationGraph::from_parts(
        nodes,
        doc.edges
            .iter()
            .map(|e| ((EntityId(e.source), EntityId(e.target)), e.weight)),
        window,
        doc.paragraph_filter,
    ))
}
