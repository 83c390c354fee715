//! Extraction of unique maximal repeated n-grams (2 ≤ n ≤ 32) over the
//! normalized token stream, with cross-length subset pruning.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, Token};

pub mod oracle;

pub const MIN_NGRAM: usize = 2;
pub const MAX_NGRAM: usize = 32;

#[derive(Debug, Error)]
pub enum RepeatError {
    #[error("invalid repeat config: {0}")]
    InvalidConfig(String),
    #[error("corpus has {tokens} tokens; the oracle is quadratic and refuses more than {limit}")]
    CorpusTooLarge { tokens: usize, limit: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepeatConfig {
    /// Smallest n-gram length searched.
    #[serde(default = "default_min_n")]
    pub min_n: usize,
    /// Largest n-gram length searched; the scan halts earlier at the first
    /// length with no repeats.
    #[serde(default = "default_max_n")]
    pub max_n: usize,
    /// Allow n-grams to cross paragraph boundaries.
    #[serde(default)]
    pub span_paragraphs: bool,
    /// Count occurrences that overlap an earlier occurrence of the same
    /// n-gram. When false, occurrences are kept greedily left to right.
    #[serde(default = "default_true")]
    pub count_overlapping: bool,
    /// Let punctuation tokens participate in n-grams.
    #[serde(default = "default_true")]
    pub include_punct: bool,
    /// Prune a shorter repeat only when every one of its occurrences lies
    /// inside an occurrence of a longer repeat, instead of whenever its
    /// token sequence appears inside a longer repeat.
    #[serde(default)]
    pub strict_maximality: bool,
}

fn default_min_n() -> usize {
    MIN_NGRAM
}
fn default_max_n() -> usize {
    MAX_NGRAM
}
fn default_true() -> bool {
    true
}

impl Default for RepeatConfig {
    fn default() -> Self {
        RepeatConfig {
            min_n: MIN_NGRAM,
            max_n: MAX_NGRAM,
            span_paragraphs: false,
            count_overlapping: true,
            include_punct: true,
            strict_maximality: false,
        }
    }
}

impl RepeatConfig {
    pub fn validate(&self) -> Result<(), RepeatError> {
        if self.min_n < MIN_NGRAM || self.min_n > self.max_n || self.max_n > MAX_NGRAM {
            return Err(RepeatError::InvalidConfig(format!(
                "require {} <= min_n <= max_n <= {}, got min_n={} max_n={}",
                MIN_NGRAM, MAX_NGRAM, self.min_n, self.max_n
            )));
        }
        Ok(())
    }
}

/// Where one occurrence of a repeated phrase starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Occurrence {
    pub paragraph_idx: usize,
    pub start_pos_in_paragraph: usize,
    pub global_start: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepeatedPhrase {
    /// Normalized token sequence.
    pub tokens: Vec<String>,
    pub n: usize,
    /// Sorted by global_start, strictly increasing.
    pub occurrences: Vec<Occurrence>,
    pub count: usize,
}

impl RepeatedPhrase {
    /// Number of word tokens in the phrase (punctuation tokens are single
    /// non-alphanumeric characters, so the first character decides).
    pub fn word_token_count(&self) -> usize {
        self.tokens
            .iter()
            .filter(|t| t.chars().next().is_some_and(|c| c.is_alphanumeric()))
            .count()
    }

    pub fn phrase(&self) -> String {
        self.tokens.join(" ")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepeatSet {
    /// Sorted by (n desc, count desc, first occurrence asc).
    pub phrases: Vec<RepeatedPhrase>,
    pub config: RepeatConfig,
    /// Number of repeated n-grams found before cross-length pruning.
    pub pre_prune_count: usize,
}

impl RepeatSet {
    pub fn post_prune_count(&self) -> usize {
        self.phrases.len()
    }
}

/// A token admitted to the n-gram stream, with its corpus coordinates.
#[derive(Debug, Clone, Copy)]
struct StreamToken {
    id: u32,
    paragraph_idx: usize,
    pos_in_paragraph: usize,
    global_pos: usize,
}

struct Stream<'c> {
    tokens: Vec<StreamToken>,
    /// Half-open ranges of stream indices that windows may not cross.
    segments: Vec<(usize, usize)>,
    norms: Vec<&'c str>,
}

fn build_stream<'c>(corpus: &'c Corpus, config: &RepeatConfig) -> Stream<'c> {
    let mut intern: HashMap<&str, u32> = HashMap::new();
    let mut norms: Vec<&str> = Vec::new();
    let mut tokens = Vec::new();
    let mut segments = Vec::new();

    let admit = |t: &Token| config.include_punct || t.is_word();
    for para in &corpus.paragraphs {
        let seg_start = tokens.len();
        for tok in para.tokens.iter().filter(|t| admit(t)) {
            let id = *intern.entry(tok.norm.as_str()).or_insert_with(|| {
                norms.push(tok.norm.as_str());
                (norms.len() - 1) as u32
            });
            tokens.push(StreamToken {
                id,
                paragraph_idx: tok.paragraph_idx,
                pos_in_paragraph: tok.pos_in_paragraph,
                global_pos: tok.global_pos,
            });
        }
        if !config.span_paragraphs && tokens.len() > seg_start {
            segments.push((seg_start, tokens.len()));
        }
    }
    if config.span_paragraphs && !tokens.is_empty() {
        segments.push((0, tokens.len()));
    }
    Stream {
        tokens,
        segments,
        norms,
    }
}

/// One repeated n-gram before pruning: its start positions in the stream.
struct RawPhrase {
    n: usize,
    /// Occurrences kept after the overlap policy, ascending.
    kept: Vec<u32>,
}

impl RawPhrase {
    fn seq<'a>(&self, ids: &'a [u32]) -> &'a [u32] {
        let s = self.kept[0] as usize;
        &ids[s..s + self.n]
    }
}

/// Apply the overlap policy to an ascending list of raw start positions.
fn keep_occurrences(raw: &[u32], n: usize, count_overlapping: bool) -> Vec<u32> {
    if count_overlapping {
        return raw.to_vec();
    }
    let mut kept = Vec::new();
    let mut next_free = 0u64;
    for &pos in raw {
        if u64::from(pos) >= next_free {
            kept.push(pos);
            next_free = u64::from(pos) + n as u64;
        }
    }
    kept
}

/// Extract all unique maximal repeated n-grams.
///
/// For each length from `min_n` upward every n-gram occurring at least twice
/// is collected; the scan halts at the first length with no repeats (a
/// repeated (n+1)-gram always contains a repeated n-gram) or at `max_n`.
/// Afterwards, repeats whose token sequence is a contiguous subsequence of a
/// longer repeat are discarded.
pub fn extract_repeats(corpus: &Corpus, config: &RepeatConfig) -> Result<RepeatSet, RepeatError> {
    config.validate()?;
    let stream = build_stream(corpus, config);
    let ids: Vec<u32> = stream.tokens.iter().map(|t| t.id).collect();

    let mut raw_phrases: Vec<RawPhrase> = Vec::new();
    // Positions at which some repeated n-gram of the previous length starts
    // (all raw occurrences, not just the kept ones: greedy filtering must not
    // hide candidate extensions).
    let mut candidates: Option<Vec<bool>> = None;

    for n in config.min_n..=config.max_n {
        let mut windows: HashMap<&[u32], Vec<u32>> = HashMap::new();
        for &(seg_start, seg_end) in &stream.segments {
            if seg_end - seg_start < n {
                continue;
            }
            for i in seg_start..=(seg_end - n) {
                if let Some(c) = &candidates {
                    if !(c[i] && c[i + 1]) {
                        continue;
                    }
                }
                windows.entry(&ids[i..i + n]).or_default().push(i as u32);
            }
        }

        let mut next_candidates = vec![false; ids.len()];
        let mut found = 0usize;
        for (_, raw) in windows {
            if raw.len() < 2 {
                continue;
            }
            let kept = keep_occurrences(&raw, n, config.count_overlapping);
            if kept.len() < 2 {
                continue;
            }
            found += 1;
            for &pos in &raw {
                next_candidates[pos as usize] = true;
            }
            raw_phrases.push(RawPhrase { n, kept });
        }

        if found == 0 {
            break;
        }
        candidates = Some(next_candidates);
    }

    let pre_prune_count = raw_phrases.len();
    let pruned = if config.strict_maximality {
        prune_strict(&raw_phrases, &ids)
    } else {
        prune_subsequences(&raw_phrases, &ids)
    };

    let mut phrases: Vec<RepeatedPhrase> = raw_phrases
        .iter()
        .zip(pruned.iter())
        .filter(|(_, &dropped)| !dropped)
        .map(|(raw, _)| materialize(raw, &stream))
        .collect();
    sort_phrases(&mut phrases);

    Ok(RepeatSet {
        phrases,
        config: *config,
        pre_prune_count,
    })
}

/// Default pruning: drop a phrase whose token sequence appears as a
/// contiguous window of any longer repeated phrase. Containment is
/// transitive, so checking against all longer repeats (pruned or not) gives
/// the same result as checking against retained ones.
fn prune_subsequences(raw_phrases: &[RawPhrase], ids: &[u32]) -> Vec<bool> {
    let mut lengths: BTreeSet<usize> = raw_phrases.iter().map(|p| p.n).collect();
    let max_len = lengths.pop_last().unwrap_or(0);
    let mut dropped = vec![false; raw_phrases.len()];
    for n in lengths {
        let mut windows: HashSet<&[u32]> = HashSet::new();
        for q in raw_phrases.iter().filter(|q| q.n > n) {
            for w in q.seq(ids).windows(n) {
                windows.insert(w);
            }
        }
        for (i, p) in raw_phrases.iter().enumerate() {
            if p.n == n && windows.contains(p.seq(ids)) {
                dropped[i] = true;
            }
        }
    }
    let _ = max_len;
    dropped
}

/// Strict variant: drop a phrase only when every kept occurrence lies inside
/// some kept occurrence of a longer repeated phrase.
fn prune_strict(raw_phrases: &[RawPhrase], _ids: &[u32]) -> Vec<bool> {
    let lengths: BTreeSet<usize> = raw_phrases.iter().map(|p| p.n).collect();
    let mut dropped = vec![false; raw_phrases.len()];
    for &n in &lengths {
        // Occurrence intervals of all strictly longer phrases, as
        // (start, end) sorted by start with a running max of end.
        let mut intervals: Vec<(u32, u64)> = raw_phrases
            .iter()
            .filter(|q| q.n > n)
            .flat_map(|q| q.kept.iter().map(|&s| (s, u64::from(s) + q.n as u64)))
            .collect();
        if intervals.is_empty() {
            continue;
        }
        intervals.sort_unstable();
        let mut prefix_max_end = Vec::with_capacity(intervals.len());
        let mut max_end = 0u64;
        for &(_, end) in &intervals {
            max_end = max_end.max(end);
            prefix_max_end.push(max_end);
        }

        let covered = |start: u32, end: u64| -> bool {
            let k = intervals.partition_point(|&(s, _)| s <= start);
            k > 0 && prefix_max_end[k - 1] >= end
        };
        for (i, p) in raw_phrases.iter().enumerate() {
            if p.n == n
                && p.kept
                    .iter()
                    .all(|&s| covered(s, u64::from(s) + p.n as u64))
            {
                dropped[i] = true;
            }
        }
    }
    dropped
}

fn materialize(raw: &RawPhrase, stream: &Stream<'_>) -> RepeatedPhrase {
    let first = raw.kept[0] as usize;
    let tokens: Vec<String> = stream.tokens[first..first + raw.n]
        .iter()
        .map(|t| stream.norms[t.id as usize].to_string())
        .collect();
    let occurrences: Vec<Occurrence> = raw
        .kept
        .iter()
        .map(|&s| {
            let t = stream.tokens[s as usize];
            Occurrence {
                paragraph_idx: t.paragraph_idx,
                start_pos_in_paragraph: t.pos_in_paragraph,
                global_start: t.global_pos,
            }
        })
        .collect();
    RepeatedPhrase {
        n: raw.n,
        count: occurrences.len(),
        tokens,
        occurrences,
    }
}

pub(crate) fn sort_phrases(phrases: &mut [RepeatedPhrase]) {
    phrases.sort_by(|a, b| {
        b.n.cmp(&a.n)
            .then(b.count.cmp(&a.count))
            .then(a.occurrences[0].global_start.cmp(&b.occurrences[0].global_start))
    });
}

/// Paragraphs containing at least one occurrence of a phrase with more than
/// `min_words` word tokens. Occurrences that span paragraphs count toward
/// the paragraph they start in.
pub fn paragraphs_with_repeats(repeat_set: &RepeatSet, min_words: usize) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    for phrase in &repeat_set.phrases {
        if phrase.word_token_count() > min_words {
            out.extend(phrase.occurrences.iter().map(|o| o.paragraph_idx));
        }
    }
    out
}

/// Longest phrases first; ties by higher count, then earliest occurrence.
pub fn top_by_length(repeat_set: &RepeatSet, k: usize) -> Vec<&RepeatedPhrase> {
    let mut refs: Vec<&RepeatedPhrase> = repeat_set.phrases.iter().collect();
    refs.sort_by(|a, b| {
        b.n.cmp(&a.n)
            .then(b.count.cmp(&a.count))
            .then(a.occurrences[0].global_start.cmp(&b.occurrences[0].global_start))
    });
    refs.truncate(k);
    refs
}

/// Most frequent phrases first; ties by longer n, then earliest occurrence.
pub fn top_by_frequency(repeat_set: &RepeatSet, k: usize) -> Vec<&RepeatedPhrase> {
    let mut refs: Vec<&RepeatedPhrase> = repeat_set.phrases.iter().collect();
    refs.sort_by(|a, b| {
        b.count
            .cmp(&a.count)
            .then(b.n.cmp(&a.n))
            .then(a.occurrences[0].global_start.cmp(&b.occurrences[0].global_start))
    });
    refs.truncate(k);
    refs
}

/// The corpus tokens one occurrence covers: starting at `global_start`, the
/// next `n` tokens that pass the config's punctuation filter.
pub fn occurrence_tokens<'c>(
    corpus: &'c Corpus,
    phrase: &RepeatedPhrase,
    occ: &Occurrence,
    config: &RepeatConfig,
) -> Vec<&'c Token> {
    let mut out = Vec::with_capacity(phrase.n);
    let mut pos = occ.global_start;
    while out.len() < phrase.n {
        let Some(tok) = corpus.token_at(pos) else {
            break;
        };
        if config.include_punct || tok.is_word() {
            out.push(tok);
        }
        pos += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{load_corpus, TokenizeOptions};

    fn corpus_of(text: &str) -> Corpus {
        load_corpus(text, TokenizeOptions::default()).unwrap()
    }

    fn extract(text: &str) -> RepeatSet {
        extract_repeats(&corpus_of(text), &RepeatConfig::default()).unwrap()
    }

    #[test]
    fn abc_abc_collapses_to_one_phrase() {
        let set = extract("a b c a b c");
        assert_eq!(set.phrases.len(), 1);
        let p = &set.phrases[0];
        assert_eq!(p.tokens, ["a", "b", "c"]);
        assert_eq!(p.count, 2);
        assert_eq!(
            p.occurrences.iter().map(|o| o.global_start).collect::<Vec<_>>(),
            [0, 3]
        );
        // "a b" and "b c" were found, then pruned.
        assert_eq!(set.pre_prune_count, 3);
    }

    #[test]
    fn overlapping_occurrences_count_by_default() {
        let set = extract("x y x y x");
        assert_eq!(set.phrases.len(), 1);
        let p = &set.phrases[0];
        assert_eq!(p.tokens, ["x", "y", "x"]);
        assert_eq!(p.count, 2);
        assert_eq!(
            p.occurrences.iter().map(|o| o.global_start).collect::<Vec<_>>(),
            [0, 2]
        );
    }

    #[test]
    fn non_overlapping_policy_changes_the_answer() {
        let config = RepeatConfig {
            count_overlapping: false,
            ..RepeatConfig::default()
        };
        let set = extract_repeats(&corpus_of("x y x y x"), &config).unwrap();
        // "x y x" now has one creditable occurrence, so "x y" and "y x" survive.
        let phrases: Vec<String> = set.phrases.iter().map(|p| p.phrase()).collect();
        assert_eq!(phrases, ["x y", "y x"]);
    }

    #[test]
    fn ngrams_do_not_span_paragraphs_by_default() {
        let text = "a b\n\nc a b c";
        let set = extract(text);
        let phrases: Vec<String> = set.phrases.iter().map(|p| p.phrase()).collect();
        assert_eq!(phrases, ["a b"]);

        let spanning = RepeatConfig {
            span_paragraphs: true,
            ..RepeatConfig::default()
        };
        let set = extract_repeats(&corpus_of(text), &spanning).unwrap();
        let phrases: Vec<String> = set.phrases.iter().map(|p| p.phrase()).collect();
        assert_eq!(phrases, ["a b c"]);
    }

    #[test]
    fn punctuation_participates_by_default() {
        let text = "stop here ? now\n\nstop here ? now";
        let set = extract(text);
        assert_eq!(set.phrases.len(), 1);
        assert_eq!(set.phrases[0].tokens, ["stop", "here", "?", "now"]);
        assert_eq!(set.phrases[0].word_token_count(), 3);

        let words_only = RepeatConfig {
            include_punct: false,
            ..RepeatConfig::default()
        };
        let set = extract_repeats(&corpus_of(text), &words_only).unwrap();
        assert_eq!(set.phrases.len(), 1);
        assert_eq!(set.phrases[0].tokens, ["stop", "here", "now"]);
    }

    #[test]
    fn short_corpus_yields_empty_set() {
        let set = extract("one");
        assert!(set.phrases.is_empty());
        assert_eq!(set.pre_prune_count, 0);
    }

    #[test]
    fn invalid_bounds_rejected() {
        let bad = RepeatConfig {
            min_n: 1,
            ..RepeatConfig::default()
        };
        assert!(extract_repeats(&corpus_of("a b a b"), &bad).is_err());
        let bad = RepeatConfig {
            max_n: 33,
            ..RepeatConfig::default()
        };
        assert!(extract_repeats(&corpus_of("a b a b"), &bad).is_err());
        let bad = RepeatConfig {
            min_n: 8,
            max_n: 4,
            ..RepeatConfig::default()
        };
        assert!(extract_repeats(&corpus_of("a b a b"), &bad).is_err());
    }

    #[test]
    fn strict_maximality_keeps_outside_occurrences() {
        // "a b" occurs at 0, 4, 8; "a b c" covers the occurrences at 0 and 4
        // only, so strict mode keeps "a b" while default mode prunes it.
        let text = "a b c d a b c e a b f";
        let default = extract(text);
        let default_phrases: Vec<String> = default.phrases.iter().map(|p| p.phrase()).collect();
        assert_eq!(default_phrases, ["a b c"]);

        let strict = RepeatConfig {
            strict_maximality: true,
            ..RepeatConfig::default()
        };
        let strict = extract_repeats(&corpus_of(text), &strict).unwrap();
        let strict_phrases: Vec<String> = strict.phrases.iter().map(|p| p.phrase()).collect();
        assert_eq!(strict_phrases, ["a b c", "a b"]);
    }

    #[test]
    fn paragraphs_with_repeats_thresholds_on_word_count() {
        let text = "one two three four .\n\nskip\n\none two three four .";
        let set = extract(text);
        assert_eq!(set.phrases.len(), 1);
        assert_eq!(set.phrases[0].word_token_count(), 4);
        assert_eq!(
            paragraphs_with_repeats(&set, 3),
            BTreeSet::from([0usize, 2])
        );
        assert!(paragraphs_with_repeats(&set, 4).is_empty());
    }

    #[test]
    fn top_queries_sort_and_truncate() {
        let text = "v w x y z k v w x y z k m n q m n r m n s";
        let set = extract(text);
        let phrases: Vec<String> = set.phrases.iter().map(|p| p.phrase()).collect();
        assert_eq!(phrases, ["v w x y z k", "m n"]);
        let longest = top_by_length(&set, 1);
        assert_eq!(longest[0].phrase(), "v w x y z k");
        let frequent = top_by_frequency(&set, 1);
        assert_eq!(frequent[0].phrase(), "m n");
        assert_eq!(frequent[0].count, 3);
        assert!(top_by_length(&set, 0).is_empty());
        assert_eq!(top_by_frequency(&set, 10).len(), 2);
    }

    #[test]
    fn occurrence_lookup_reproduces_phrase() {
        for config in [
            RepeatConfig::default(),
            RepeatConfig {
                include_punct: false,
                ..RepeatConfig::default()
            },
        ] {
            let corpus = corpus_of("stop here ? now and stop here ? now and rest");
            let set = extract_repeats(&corpus, &config).unwrap();
            for phrase in &set.phrases {
                for occ in &phrase.occurrences {
                    let toks = occurrence_tokens(&corpus, phrase, occ, &config);
                    let norms: Vec<&str> = toks.iter().map(|t| t.norm.as_str()).collect();
                    assert_eq!(norms, phrase.tokens.iter().map(String::as_str).collect::<Vec<_>>());
                }
            }
        }
    }
}
