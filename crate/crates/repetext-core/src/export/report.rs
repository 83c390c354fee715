//! The summary report: one JSON document with a provenance block recording
//! every configuration choice, plus a plain-text digest of the same.

use std::fmt::Write as _;

use serde::Serialize;

use crate::corpus::{CorpusStats, TokenizeOptions};
use crate::repeats::RepeatConfig;
use crate::sequences::MultiLabelPolicy;

#[derive(Debug, Clone, Default, Serialize)]
pub struct Provenance {
    pub source_name: String,
    pub tokenize: TokenizeOptions,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub repeats: Option<RepeatConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_words: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gazetteer: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case_insensitive_match: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fragment_mentions_only: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sequence_policy: Option<SequencePolicy>,
    /// Present only when the run asked for a timestamp; omitted by default
    /// so identical runs produce identical bytes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp_unix: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SequencePolicy {
    pub selected: Vec<String>,
    pub max_gap: Option<usize>,
    pub multi_policy: MultiLabelPolicy,
    pub max_pattern_len: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct PhraseSummary {
    pub phrase: String,
    pub n: usize,
    pub count: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RepeatsBlock {
    pub pre_prune_count: usize,
    pub post_prune_count: usize,
    /// Paragraphs containing a repeat with more than `min_words` words.
    pub paragraphs_with_repeats: usize,
    pub top_by_length: Vec<PhraseSummary>,
    pub top_by_frequency: Vec<PhraseSummary>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EntitiesBlock {
    pub mention_count: usize,
    pub unique_entities_mentioned: usize,
    pub entities_in_repeat_paragraphs: usize,
    pub repeat_paragraphs_with_mentions: usize,
    pub candidate_count: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct GraphSummary {
    pub window: u8,
    pub nodes: usize,
    pub edges: usize,
    pub component_sizes: Vec<usize>,
    pub top_pagerank: Vec<(String, f64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonSummary {
    pub new_edges: usize,
    pub merged_component_groups: usize,
    pub bridge_entities: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GraphsBlock {
    pub windows: Vec<GraphSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comparison: Option<ComparisonSummary>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PatternRow {
    /// Comma-joined component display names.
    pub pattern: String,
    pub count: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SequencesBlock {
    pub selected: Vec<String>,
    pub run_count: usize,
    pub labeled_paragraphs: usize,
    pub patterns: Vec<PatternRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub provenance: Provenance,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corpus: Option<CorpusStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub repeats: Option<RepeatsBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entities: Option<EntitiesBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graphs: Option<GraphsBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sequences: Option<SequencesBlock>,
}

impl Report {
    pub fn new(provenance: Provenance) -> Report {
        Report {
            provenance,
            corpus: None,
            repeats: None,
            entities: None,
            graphs: None,
            sequences: None,
        }
    }
}

pub fn report_to_json(report: &Report) -> String {
    let mut json = serde_json::to_string_pretty(report).expect("report serializes");
    json.push('\n');
    json
}

/// Human-readable digest of the same numbers.
pub fn report_to_text(report: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# repetext report: {}", report.provenance.source_name);

    if let Some(stats) = &report.corpus {
        let _ = writeln!(out, "\n## Corpus");
        let _ = writeln!(out, "paragraphs: {}", stats.paragraph_count);
        let _ = writeln!(out, "sentences:  {}", stats.sentence_count);
        let _ = writeln!(out, "words:      {}", stats.word_count);
        let _ = writeln!(out, "tokens:     {}", stats.token_count);
    }

    if let Some(r) = &report.repeats {
        let _ = writeln!(out, "\n## Repeated phrases");
        let _ = writeln!(
            out,
            "repeated n-grams: {} before pruning, {} unique maximal",
            r.pre_prune_count, r.post_prune_count
        );
        let _ = writeln!(
            out,
            "paragraphs with a repeat above the word threshold: {}",
            r.paragraphs_with_repeats
        );
        if !r.top_by_length.is_empty() {
            let _ = writeln!(out, "longest:");
            for p in &r.top_by_length {
                let _ = writeln!(out, "  [n={} x{}] {}", p.n, p.count, p.phrase);
            }
        }
        if !r.top_by_frequency.is_empty() {
            let _ = writeln!(out, "most frequent:");
            for p in &r.top_by_frequency {
                let _ = writeln!(out, "  [x{} n={}] {}", p.count, p.n, p.phrase);
            }
        }
    }

    if let Some(e) = &report.entities {
        let _ = writeln!(out, "\n## Entities");
        let _ = writeln!(out, "mentions: {}", e.mention_count);
        let _ = writeln!(out, "unique entities mentioned: {}", e.unique_entities_mentioned);
        let _ = writeln!(
            out,
            "entities in repeat paragraphs: {} (over {} paragraphs)",
            e.entities_in_repeat_paragraphs, e.repeat_paragraphs_with_mentions
        );
        let _ = writeln!(out, "capitalized-run candidates: {}", e.candidate_count);
    }

    if let Some(g) = &report.graphs {
        let _ = writeln!(out, "\n## Association networks");
        for w in &g.windows {
            let _ = writeln!(
                out,
                "window {}: {} nodes, {} edges, components {:?}",
                w.window, w.nodes, w.edges, w.component_sizes
            );
            for (name, score) in &w.top_pagerank {
                let _ = writeln!(out, "  pagerank {score:.6} {name}");
            }
        }
        if let Some(c) = &g.comparison {
            let _ = writeln!(
                out,
                "widening adds {} edges and merges {} component group(s)",
                c.new_edges, c.merged_component_groups
            );
            if !c.bridge_entities.is_empty() {
                let _ = writeln!(out, "bridge entities: {}", c.bridge_entities.join(", "));
            }
        }
    }

    if let Some(s) = &report.sequences {
        let _ = writeln!(out, "\n## Paragraph sequences");
        let _ = writeln!(out, "selected components: {}", s.selected.join(", "));
        let _ = writeln!(
            out,
            "{} labeled paragraphs compress to {} runs",
            s.labeled_paragraphs, s.run_count
        );
        for row in &s.patterns {
            let _ = writeln!(out, "  <{}> {}", row.pattern, row.count);
        }
    }

    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stats_only_report_has_corpus_block_only() {
        let mut report = Report::new(Provenance {
            source_name: "fixture".into(),
            ..Provenance::default()
        });
        report.corpus = Some(CorpusStats {
            paragraph_count: 2,
            sentence_count: 2,
            word_count: 4,
            token_count: 6,
        });
        let json = report_to_json(&report);
        assert!(json.contains("\"corpus\""));
        assert!(!json.contains("\"repeats\""));
        assert!(!json.contains("timestamp_unix"));
        let text = report_to_text(&report);
        assert!(text.contains("paragraphs: 2"));
    }

    #[test]
    fn identical_reports_identical_bytes() {
        let report = Report::new(Provenance::default());
        assert_eq!(report_to_json(&report), report_to_json(&report));
    }
}
