//! End-to-end library chain: corpus -> repeats -> mentions -> graphs ->
//! components -> labeling -> runs -> patterns -> exports, on a small text
//! with a known structure.

use std::collections::{BTreeMap, BTreeSet};

use repetext_core::corpus::{load_corpus, TokenizeOptions};
use repetext_core::entities::{entities_in_repeats, find_mentions, EntityId, Gazetteer};
use repetext_core::export::graph::{graph_from_json, graph_to_json};
use repetext_core::export::{band_to_svg, SvgOptions};
use repetext_core::networks::{
    build_graph, connected_components, pagerank, subgraph_window_comparison, CoMentionWindow,
    PageRankOptions,
};
use repetext_core::repeats::{extract_repeats, paragraphs_with_repeats, RepeatConfig};
use repetext_core::sequences::{
    band_data, compress_runs, count_patterns, label_paragraphs, MultiLabelPolicy,
};

// Alma/Brook co-mention paragraphs alternate with Cole/Dena ones; every
// mention paragraph carries the planted repeat "the bells rang twice that
// night". Paragraph 4 has mentions but no repeat.
const TEXT: &str = "\
Alma met Brook at the gate. The bells rang twice that night.

Cole wrote to Dena from the coast. The bells rang twice that night.

Alma and Brook counted the boats. The bells rang twice that night.

Dena sent Cole a photograph of nothing. The bells rang twice that night.

Alma fed the stove with yesterday's letters.

Brook slept in the chair. The bells rang twice that night.

Cole and Dena burned the photograph. The bells rang twice that night.
";

const GAZETTEER: &str = r#"[
  { "canonical": "Alma" },
  { "canonical": "Brook" },
  { "canonical": "Cole" },
  { "canonical": "Dena" }
]"#;

#[test]
fn full_library_chain() {
    let corpus = load_corpus(TEXT, TokenizeOptions::default()).unwrap();
    assert_eq!(corpus.stats.paragraph_count, 7);

    let config = RepeatConfig::default();
    let repeat_set = extract_repeats(&corpus, &config).unwrap();
    let planted = repeat_set
        .phrases
        .iter()
        .find(|p| p.phrase().contains("bells rang twice that night"))
        .expect("planted repeat found");
    assert_eq!(planted.count, 6);

    let marked = paragraphs_with_repeats(&repeat_set, 3);
    assert_eq!(marked, BTreeSet::from([0usize, 1, 2, 3, 5, 6]));

    let gazetteer = Gazetteer::from_json(GAZETTEER, false).unwrap();
    let mentions = find_mentions(&corpus, &gazetteer);
    assert_eq!(mentions.len(), 9);

    let (ids, paragraphs) = entities_in_repeats(&mentions, &repeat_set, 3);
    assert_eq!(ids.len(), 4);
    // Paragraph 4 has a mention but no repeat.
    assert!(!paragraphs.contains(&4));

    let g0 = build_graph(&mentions, &marked, CoMentionWindow::SameParagraph, "marked");
    let g1 = build_graph(&mentions, &marked, CoMentionWindow::SameOrNext, "marked");
    assert_eq!(g0.weight(EntityId(0), EntityId(1)), Some(2)); // Alma-Brook
    assert_eq!(g0.weight(EntityId(2), EntityId(3)), Some(2)); // Cole-Dena
    assert_eq!(g0.weight(EntityId(0), EntityId(2)), None);

    let p0 = connected_components(&g0);
    assert_eq!(p0.sizes(), vec![2, 2]);
    let p1 = connected_components(&g1);
    assert_eq!(p1.sizes(), vec![4]);

    let comparison = subgraph_window_comparison(&g0, &g1).unwrap();
    assert!(comparison.edges_subset);
    assert_eq!(comparison.merged_groups.len(), 1);

    let scores = pagerank(&g0, PageRankOptions::default()).unwrap();
    let total: f64 = scores.values().sum();
    assert!((total - 1.0).abs() < 1e-9);

    // Components sorted by smallest member: 0 = {Alma, Brook}, 1 = {Cole, Dena}.
    let selected = BTreeSet::from([0usize, 1]);
    let mut labeling =
        label_paragraphs(&mentions, &p0, &selected, corpus.stats.paragraph_count).unwrap();
    labeling.set_name(0, "AB");
    labeling.set_name(1, "CD");
    let runs = compress_runs(&labeling, &selected, None, MultiLabelPolicy::Break).unwrap();
    let stream: Vec<usize> = runs.runs.iter().map(|r| r.component).collect();
    // Paragraphs: AB(0), CD(1), AB(2), CD(3), AB(4), AB(5), CD(6); 4 and 5
    // merge into one run.
    assert_eq!(stream, vec![0, 1, 0, 1, 0, 1]);
    assert_eq!(runs.runs[4].length, 2);

    let patterns = count_patterns(&runs, 4).unwrap();
    assert_eq!(patterns.get(&[0, 1]), 3);
    assert_eq!(patterns.get(&[1, 0]), 2);
    assert_eq!(patterns.get(&[0, 1, 0]), 2);
    assert!(patterns.is_prefix_monotone());

    let colors = BTreeMap::from([(0usize, "#00FFFF".into()), (1usize, "#FFC0CB".into())]);
    let spec = band_data(&labeling, &[0, 1], &colors).unwrap();
    assert_eq!(spec.cells.len(), 7);
    let svg = band_to_svg(&spec, &SvgOptions::default()).unwrap();
    assert_eq!(svg.matches("class=\"cell\"").count(), 7);

    let names: BTreeMap<EntityId, String> = gazetteer
        .entities()
        .iter()
        .map(|e| (e.id, e.canonical.clone()))
        .collect();
    let json = graph_to_json(&g1, Some(&p1), &names);
    assert_eq!(graph_from_json(&json).unwrap(), g1);
}
