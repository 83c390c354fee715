//! CSV and JSON table exports. CSV files are comma-separated, double-quote
//! escaped, UTF-8, LF-terminated, and always carry a header row. Paragraph
//! numbers in exported files are 1-based; token positions stay 0-based.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::entities::{CandidatePhrase, EntityId, Gazetteer, Mention};
use crate::export::ExportError;
use crate::repeats::RepeatSet;
use crate::sequences::{NetworkLabeling, PatternCounts, RunSequence};

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(writer: csv::Writer<Vec<u8>>) -> Result<String, ExportError> {
    let bytes = writer.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}

/// phrase, n, count, occurrences ("paragraph:pos" pairs, 1-based paragraph).
pub fn repeats_to_csv(set: &RepeatSet) -> Result<String, ExportError> {
    let mut w = csv_writer();
    w.write_record(["phrase", "n", "count", "occurrences"])?;
    for p in &set.phrases {
        let occurrences = p
            .occurrences
            .iter()
            .map(|o| format!("{}:{}", o.paragraph_idx + 1, o.start_pos_in_paragraph))
            .collect::<Vec<_>>()
            .join(";");
        w.write_record([
            p.phrase(),
            p.n.to_string(),
            p.count.to_string(),
            occurrences,
        ])?;
    }
    finish(w)
}

#[derive(Serialize)]
struct RepeatDocOccurrence {
    paragraph: usize,
    pos_in_paragraph: usize,
    global_start: usize,
}

#[derive(Serialize)]
struct RepeatDocPhrase {
    tokens: Vec<String>,
    n: usize,
    count: usize,
    occurrences: Vec<RepeatDocOccurrence>,
}

#[derive(Serialize)]
struct RepeatDoc<'a> {
    config: &'a crate::repeats::RepeatConfig,
    pre_prune_count: usize,
    post_prune_count: usize,
    phrases: Vec<RepeatDocPhrase>,
}

pub fn repeats_to_json(set: &RepeatSet) -> String {
    let doc = RepeatDoc {
        config: &set.config,
        pre_prune_count: set.pre_prune_count,
        post_prune_count: set.post_prune_count(),
        phrases: set
            .phrases
            .iter()
            .map(|p| RepeatDocPhrase {
                tokens: p.tokens.clone(),
                n: p.n,
                count: p.count,
                occurrences: p
                    .occurrences
                    .iter()
                    .map(|o| RepeatDocOccurrence {
                        paragraph: o.paragraph_idx + 1,
                        pos_in_paragraph: o.start_pos_in_paragraph,
                        global_start: o.global_start,
                    })
                    .collect(),
            })
            .collect(),
    };
    let mut json = serde_json::to_string_pretty(&doc).expect("repeat doc serializes");
    json.push('\n');
    json
}

/// entity_id, canonical, paragraph (1-based), start, end (token positions).
pub fn mentions_to_csv(mentions: &[Mention], gazetteer: &Gazetteer) -> Result<String, ExportError> {
    let mut w = csv_writer();
    w.write_record(["entity_id", "canonical", "paragraph", "start", "end"])?;
    for m in mentions {
        w.write_record([
            m.entity_id.to_string(),
            gazetteer.canonical_name(m.entity_id).to_string(),
            (m.paragraph_idx + 1).to_string(),
            m.token_span.0.to_string(),
            m.token_span.1.to_string(),
        ])?;
    }
    finish(w)
}

pub fn candidates_to_csv(candidates: &[CandidatePhrase]) -> Result<String, ExportError> {
    let mut w = csv_writer();
    w.write_record(["phrase", "count"])?;
    for c in candidates {
        w.write_record([c.phrase(), c.count.to_string()])?;
    }
    finish(w)
}

/// entity_id, canonical, score. Rows sorted by score descending, id ascending.
pub fn pagerank_to_csv(
    scores: &BTreeMap<EntityId, f64>,
    names: &BTreeMap<EntityId, String>,
) -> Result<String, ExportError> {
    let mut rows: Vec<(EntityId, f64)> = scores.iter().map(|(&id, &s)| (id, s)).collect();
    rows.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal).then(a.0.cmp(&b.0)));
    let mut w = csv_writer();
    w.write_record(["entity_id", "canonical", "score"])?;
    for (id, score) in rows {
        let name = names.get(&id).cloned().unwrap_or_else(|| format!("entity-{id}"));
        w.write_record([id.to_string(), name, format!("{score:.12}")])?;
    }
    finish(w)
}

/// entity_id, canonical, degree, weighted_degree. Rows sorted by weighted
/// degree descending, id ascending.
pub fn degrees_to_csv(
    degrees: &BTreeMap<EntityId, (usize, u64)>,
    names: &BTreeMap<EntityId, String>,
) -> Result<String, ExportError> {
    let mut rows: Vec<(EntityId, usize, u64)> = degrees
        .iter()
        .map(|(&id, &(d, w))| (id, d, w))
        .collect();
    rows.sort_by(|a, b| b.2.cmp(&a.2).then(a.0.cmp(&b.0)));
    let mut w = csv_writer();
    w.write_record(["entity_id", "canonical", "degree", "weighted_degree"])?;
    for (id, degree, weighted) in rows {
        let name = names.get(&id).cloned().unwrap_or_else(|| format!("entity-{id}"));
        w.write_record([
            id.to_string(),
            name,
            degree.to_string(),
            weighted.to_string(),
        ])?;
    }
    finish(w)
}

/// component, name, start_paragraph, end_paragraph, length (1-based
/// paragraph numbers).
pub fn runs_to_csv(
    run_seq: &RunSequence,
    labeling: &NetworkLabeling,
) -> Result<String, ExportError> {
    let mut w = csv_writer();
    w.write_record(["component", "name", "start_paragraph", "end_paragraph", "length"])?;
    for r in &run_seq.runs {
        w.write_record([
            r.component.to_string(),
            labeling.name_of(r.component).to_string(),
            (r.start_paragraph + 1).to_string(),
            (r.end_paragraph + 1).to_string(),
            r.length.to_string(),
        ])?;
    }
    finish(w)
}

/// (pattern, count) rows with component names joined by commas, sorted by
/// pattern length then count descending.
pub fn pattern_rows(counts: &PatternCounts, labeling: &NetworkLabeling) -> Vec<(String, u64)> {
    let mut rows: Vec<(usize, String, u64)> = counts
        .iter()
        .map(|(pattern, count)| {
            let name = pattern
                .iter()
                .map(|&c| labeling.name_of(c).to_string())
                .collect::<Vec<_>>()
                .join(",");
            (pattern.len(), name, count)
        })
        .collect();
    rows.sort_by(|a, b| a.0.cmp(&b.0).then(b.2.cmp(&a.2)).then(a.1.cmp(&b.1)));
    rows.into_iter().map(|(_, name, count)| (name, count)).collect()
}

/// pattern (comma-joined component names), count. Shorter patterns first,
/// then higher counts.
pub fn patterns_to_csv(
    counts: &PatternCounts,
    labeling: &NetworkLabeling,
) -> Result<String, ExportError> {
    let mut w = csv_writer();
    w.write_record(["pattern", "count"])?;
    for (pattern, count) in pattern_rows(counts, labeling) {
        w.write_record([pattern, count.to_string()])?;
    }
    finish(w)
}

pub fn patterns_to_json(counts: &PatternCounts, labeling: &NetworkLabeling) -> String {
    #[derive(Serialize)]
    struct Row {
        pattern: String,
        count: u64,
    }
    let rows: Vec<Row> = pattern_rows(counts, labeling)
        .into_iter()
        .map(|(pattern, count)| Row { pattern, count })
        .collect();
    let mut json = serde_json::to_string_pretty(&rows).expect("pattern rows serialize");
    json.push('\n');
    json
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{load_corpus, TokenizeOptions};
    use crate::entities::find_mentions;
    use crate::repeats::{extract_repeats, RepeatConfig};

    #[test]
    fn repeats_csv_has_header_and_lf() {
        let corpus = load_corpus("a b c a b c", TokenizeOptions::default()).unwrap();
        let set = extract_repeats(&corpus, &RepeatConfig::default()).unwrap();
        let csv = repeats_to_csv(&set).unwrap();
        assert!(csv.starts_with("phrase,n,count,occurrences\n"));
        assert!(csv.contains("a b c,3,2,1:0;1:3\n"));
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn mentions_csv_uses_one_based_paragraphs() {
        let corpus =
            load_corpus("nothing here\n\nKate was here", TokenizeOptions::default()).unwrap();
        let g = Gazetteer::from_json(r#"[{"canonical": "Kate"}]"#, false).unwrap();
        let mentions = find_mentions(&corpus, &g);
        let csv = mentions_to_csv(&mentions, &g).unwrap();
        assert_eq!(
            csv,
            "entity_id,canonical,paragraph,start,end\n0,Kate,2,0,1\n"
        );
    }

    #[test]
    fn csv_quotes_fields_with_commas() {
        let candidates = vec![CandidatePhrase {
            tokens: vec!["Gray,".into()],
            count: 1,
        }];
        let csv = candidates_to_csv(&candidates).unwrap();
        assert!(csv.contains("\"Gray,\",1\n"));
    }

    #[test]
    fn repeats_json_reports_both_counts() {
        let corpus = load_corpus("a b c a b c", TokenizeOptions::default()).unwrap();
        let set = extract_repeats(&corpus, &RepeatConfig::default()).unwrap();
        let json = repeats_to_json(&set);
        assert!(json.contains("\"pre_prune_count\": 3"));
        assert!(json.contains("\"post_prune_count\": 1"));
    }
}
