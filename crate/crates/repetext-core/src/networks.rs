//! Weighted undirected entity association graphs under the two co-mention
//! window definitions, with components, degrees, PageRank, and the
//! window-0 vs window-1 comparison.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::entities::{EntityId, Mention};

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("co-mention window must be 0 or 1, got {0}")]
    InvalidWindow(u8),
    #[error("pagerank requires a non-empty graph")]
    EmptyGraph,
    #[error("graphs are not comparable: {0}")]
    ProvenanceMismatch(String),
}

/// How far apart two mentions may be and still count as associated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoMentionWindow {
    /// Both entities mentioned in the same paragraph.
    SameParagraph,
    /// Same paragraph, or one entity in the immediately following paragraph.
    SameOrNext,
}

impl CoMentionWindow {
    pub fn as_u8(self) -> u8 {
        match self {
            CoMentionWindow::SameParagraph => 0,
            CoMentionWindow::SameOrNext => 1,
        }
    }
}

impl TryFrom<u8> for CoMentionWindow {
    type Error = NetworkError;

    fn try_from(value: u8) -> Result<Self, Self::Error> {
        match value {
            0 => Ok(CoMentionWindow::SameParagraph),
            1 => Ok(CoMentionWindow::SameOrNext),
            other => Err(NetworkError::InvalidWindow(other)),
        }
    }
}

fn ordered(a: EntityId, b: EntityId) -> (EntityId, EntityId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Undirected weighted graph over entity ids. Edge weights count the
/// paragraph indices that associate the pair; isolated nodes are retained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssociationGraph {
    pub nodes: BTreeSet<EntityId>,
    edges: BTreeMap<(EntityId, EntityId), u32>,
    pub window: CoMentionWindow,
    /// Human-readable description of the paragraph set the graph was built
    /// over; used to check comparability.
    pub paragraph_filter: String,
}

impl AssociationGraph {
    pub fn weight(&self, a: EntityId, b: EntityId) -> Option<u32> {
        self.edges.get(&ordered(a, b)).copied()
    }

    pub fn edges(&self) -> impl Iterator<Item = ((EntityId, EntityId), u32)> + '_ {
        self.edges.iter().map(|(&pair, &w)| (pair, w))
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Adjacency lists with weights, for traversal.
    fn adjacency(&self) -> BTreeMap<EntityId, Vec<(EntityId, u32)>> {
        let mut adj: BTreeMap<EntityId, Vec<(EntityId, u32)>> =
            self.nodes.iter().map(|&n| (n, Vec::new())).collect();
        for (&(a, b), &w) in &self.edges {
            adj.get_mut(&a).expect("edge endpoint in nodes").push((b, w));
            adj.get_mut(&b).expect("edge endpoint in nodes").push((a, w));
        }
        adj
    }

    /// Used by the JSON importer.
    pub fn from_parts(
        nodes: BTreeSet<EntityId>,
        edge_list: impl IntoIterator<Item = ((EntityId, EntityId), u32)>,
        window: CoMentionWindow,
        paragraph_filter: String,
    ) -> AssociationGraph {
        let mut edges = BTreeMap::new();
        for ((a, b), w) in edge_list {
            if a != b && w > 0 {
                edges.insert(ordered(a, b), w);
            }
        }
        AssociationGraph {
            nodes,
            edges,
            window,
            paragraph_filter,
        }
    }
}

/// Count, for every unordered entity pair, the paragraph indices that
/// associate them under `window`. Each paragraph index contributes at most
/// one to a pair's weight; multiple mentions of an entity within one
/// paragraph do not multiply weights.
pub fn build_graph(
    mentions: &[Mention],
    paragraph_set: &BTreeSet<usize>,
    window: CoMentionWindow,
    paragraph_filter: &str,
) -> AssociationGraph {
    let mut per_paragraph: BTreeMap<usize, BTreeSet<EntityId>> = BTreeMap::new();
    for m in mentions {
        if paragraph_set.contains(&m.paragraph_idx) {
            per_paragraph
                .entry(m.paragraph_idx)
                .or_default()
                .insert(m.entity_id);
        }
    }

    let nodes: BTreeSet<EntityId> = per_paragraph.values().flatten().copied().collect();
    let empty = BTreeSet::new();
    let mut edges: BTreeMap<(EntityId, EntityId), u32> = BTreeMap::new();
    for (&p, here) in &per_paragraph {
        let next = match window {
            CoMentionWindow::SameParagraph => &empty,
            CoMentionWindow::SameOrNext => {
                if paragraph_set.contains(&(p + 1)) {
                    per_paragraph.get(&(p + 1)).unwrap_or(&empty)
                } else {
                    &empty
                }
            }
        };

        // Pairs contributed by paragraph index p: both endpoints here, or
        // one endpoint here and the other in p+1.
        let mut contributed: BTreeSet<(EntityId, EntityId)> = BTreeSet::new();
        for &a in here {
            for &b in here.iter().chain(next.iter()) {
                if a != b {
                    contributed.insert(ordered(a, b));
                }
            }
        }
        for pair in contributed {
            *edges.entry(pair).or_insert(0) += 1;
        }
    }

    AssociationGraph {
        nodes,
        edges,
        window,
        paragraph_filter: paragraph_filter.to_string(),
    }
}

/// Disjoint connected components covering all nodes, largest first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentPartition {
    /// Sorted by size descending, then by smallest member id.
    pub components: Vec<BTreeSet<EntityId>>,
    pub node_to_component: BTreeMap<EntityId, usize>,
}

impl ComponentPartition {
    pub fn component_of(&self, id: EntityId) -> Option<usize> {
        self.node_to_component.get(&id).copied()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.components.iter().map(|c| c.len()).collect()
    }
}

pub fn connected_components(graph: &AssociationGraph) -> ComponentPartition {
    let adj = graph.adjacency();
    let mut seen: BTreeSet<EntityId> = BTreeSet::new();
    let mut components: Vec<BTreeSet<EntityId>> = Vec::new();
    for &start in &graph.nodes {
        if seen.contains(&start) {
            continue;
        }
        let mut component = BTreeSet::new();
        let mut queue = vec![start];
        seen.insert(start);
        while let Some(v) = queue.pop() {
            component.insert(v);
            for &(u, _) in &adj[&v] {
                if seen.insert(u) {
                    queue.push(u);
                }
            }
        }
        components.push(component);
    }

    components.sort_by(|a, b| {
        b.len()
            .cmp(&a.len())
            .then(a.iter().next().cmp(&b.iter().next()))
    });
    let node_to_component = components
        .iter()
        .enumerate()
        .flat_map(|(i, c)| c.iter().map(move |&n| (n, i)))
        .collect();
    ComponentPartition {
        components,
        node_to_component,
    }
}

/// Per-node (distinct neighbor count, sum of incident edge weights).
pub fn degree_weights(graph: &AssociationGraph) -> BTreeMap<EntityId, (usize, u64)> {
    let mut out: BTreeMap<EntityId, (usize, u64)> =
        graph.nodes.iter().map(|&n| (n, (0, 0))).collect();
    for ((a, b), w) in graph.edges() {
        let ea = out.get_mut(&a).expect("edge endpoint in nodes");
        ea.0 += 1;
        ea.1 += u64::from(w);
        let eb = out.get_mut(&b).expect("edge endpoint in nodes");
        eb.0 += 1;
        eb.1 += u64::from(w);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PageRankOptions {
    pub damping: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PageRankOptions {
    fn default() -> Self {
        PageRankOptions {
            damping: 0.85,
            tol: 1e-9,
            max_iter: 1000,
        }
    }
}

/// PageRank on the weighted undirected graph: each edge acts as two directed
/// arcs with transition probability proportional to its weight; isolated
/// nodes redistribute uniformly. Iteration stops when the L1 change drops
/// below `tol`. Scores sum to 1.
pub fn pagerank(
    graph: &AssociationGraph,
    opts: PageRankOptions,
) -> Result<BTreeMap<EntityId, f64>, NetworkError> {
    if graph.is_empty() {
        return Err(NetworkError::EmptyGraph);
    }
    let nodes: Vec<EntityId> = graph.nodes.iter().copied().collect();
    let index: HashMap<EntityId, usize> =
        nodes.iter().enumerate().map(|(i, &n)| (n, i)).collect();
    let n = nodes.len();

    let mut adj: Vec<Vec<(usize, u32)>> = vec![Vec::new(); n];
    let mut weighted_degree = vec![0u64; n];
    for ((a, b), w) in graph.edges() {
        let (ia, ib) = (index[&a], index[&b]);
        adj[ia].push((ib, w));
        adj[ib].push((ia, w));
        weighted_degree[ia] += u64::from(w);
        weighted_degree[ib] += u64::from(w);
    }

    let d = opts.damping;
    let uniform = 1.0 / n as f64;
    let mut scores = vec![uniform; n];
    for _ in 0..opts.max_iter {
        let dangling: f64 = (0..n)
            .filter(|&i| weighted_degree[i] == 0)
            .map(|i| scores[i])
            .sum();
        let base = (1.0 - d) / n as f64 + d * dangling / n as f64;
        let mut next = vec![base; n];
        for i in 0..n {
            if weighted_degree[i] == 0 {
                continue;
            }
            let share = d * scores[i] / weighted_degree[i] as f64;
            for &(j, w) in &adj[i] {
                next[j] += share * f64::from(w);
            }
        }
        let l1: f64 = scores
            .iter()
            .zip(next.iter())
            .map(|(a, b)| (a - b).abs())
            .sum();
        scores = next;
        if l1 < opts.tol {
            break;
        }
    }

    Ok(nodes.into_iter().zip(scores).collect())
}

/// Weight of one edge under both window definitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EdgeDelta {
    pub pair: (EntityId, EntityId),
    pub weight_same: u32,
    pub weight_widened: u32,
}

/// A widened-window component that merges several same-paragraph components.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MergedGroup {
    pub widened_component: usize,
    pub same_paragraph_components: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowComparison {
    /// Every window-0 edge exists in the window-1 graph.
    pub edges_subset: bool,
    /// Edges present only under the widened window.
    pub new_edges: Vec<((EntityId, EntityId), u32)>,
    /// Per-edge weights for edges of the window-0 graph.
    pub weight_deltas: Vec<EdgeDelta>,
    pub merged_groups: Vec<MergedGroup>,
    /// Window-0 component index pairs connected only under window 1.
    pub newly_connected_pairs: Vec<(usize, usize)>,
    /// Nodes whose removal re-disconnects some pair of merged window-0
    /// components.
    pub bridge_entities: Vec<EntityId>,
}

/// Compare the same-paragraph graph with the widened one built from the same
/// mentions and paragraph set.
pub fn subgraph_window_comparison(
    g0: &AssociationGraph,
    g1: &AssociationGraph,
) -> Result<WindowComparison, NetworkError> {
    if g0.window != CoMentionWindow::SameParagraph {
        return Err(NetworkError::ProvenanceMismatch(
            "first graph must use window 0".into(),
        ));
    }
    if g1.window != CoMentionWindow::SameOrNext {
        return Err(NetworkError::ProvenanceMismatch(
            "second graph must use window 1".into(),
        ));
    }
    if g0.paragraph_filter != g1.paragraph_filter {
        return Err(NetworkError::ProvenanceMismatch(format!(
            "paragraph filters differ: {:?} vs {:?}",
            g0.paragraph_filter, g1.paragraph_filter
        )));
    }
    if g0.nodes != g1.nodes {
        return Err(NetworkError::ProvenanceMismatch(
            "node sets differ; graphs were not built from the same mentions".into(),
        ));
    }

    let mut edges_subset = true;
    let mut weight_deltas = Vec::new();
    for ((a, b), w0) in g0.edges() {
        let w1 = g1.weight(a, b).unwrap_or(0);
        if w1 < w0 {
            edges_subset = false;
        }
        weight_deltas.push(EdgeDelta {
            pair: (a, b),
            weight_same: w0,
            weight_widened: w1,
        });
    }
    let new_edges: Vec<((EntityId, EntityId), u32)> = g1
        .edges()
        .filter(|((a, b), _)| g0.weight(*a, *b).is_none())
        .collect();

    let p0 = connected_components(g0);
    let p1 = connected_components(g1);

    let mut merged_groups = Vec::new();
    let mut newly_connected_pairs = Vec::new();
    for (ci, component) in p1.components.iter().enumerate() {
        let mut g0_components: BTreeSet<usize> = component
            .iter()
            .filter_map(|&n| p0.component_of(n))
            .collect();
        if g0_components.len() >= 2 {
            let members: Vec<usize> = g0_components.iter().copied().collect();
            for i in 0..members.len() {
                for j in (i + 1)..members.len() {
                    newly_connected_pairs.push((members[i], members[j]));
                }
            }
            merged_groups.push(MergedGroup {
                widened_component: ci,
                same_paragraph_components: std::mem::take(&mut g0_components)
                    .into_iter()
                    .collect(),
            });
        }
    }
    newly_connected_pairs.sort_unstable();

    let bridge_entities = find_bridges(g1, &p0, &merged_groups, &p1);

    Ok(WindowComparison {
        edges_subset,
        new_edges,
        weight_deltas,
        merged_groups,
        newly_connected_pairs,
        bridge_entities,
    })
}

/// A node is a bridge when deleting it from the widened graph disconnects
/// two window-0 components that its widened component had merged.
fn find_bridges(
    g1: &AssociationGraph,
    p0: &ComponentPartition,
    merged_groups: &[MergedGroup],
    p1: &ComponentPartition,
) -> Vec<EntityId> {
    let adj = g1.adjacency();
    let mut bridges = Vec::new();
    for group in merged_groups {
        let members = &p1.components[group.widened_component];
        for &candidate in members {
            // Connectivity over the component without the candidate.
            let mut seen: BTreeSet<EntityId> = BTreeSet::new();
            let mut part_of: BTreeMap<EntityId, usize> = BTreeMap::new();
            let mut parts = 0usize;
            for &start in members {
                if start == candidate || seen.contains(&start) {
                    continue;
                }
                let part = parts;
                parts += 1;
                let mut queue = vec![start];
                seen.insert(start);
                while let Some(v) = queue.pop() {
                    part_of.insert(v, part);
                    for &(u, _) in &adj[&v] {
                        if u != candidate && members.contains(&u) && seen.insert(u) {
                            queue.push(u);
                        }
                    }
                }
            }

            // The merged g0 components (their surviving nodes) must all stay
            // in one part; a g0 component whose nodes are all gone is
            // disregarded.
            let mut parts_hit: BTreeSet<usize> = BTreeSet::new();
            for &c0 in &group.same_paragraph_components {
                parts_hit
                    .extend(p0.components[c0].iter().filter_map(|n| part_of.get(n).copied()));
            }
            if parts_hit.len() >= 2 {
                bridges.push(candidate);
            }
        }
    }
    bridges.sort_unstable();
    bridges.dedup();
    bridges
}
