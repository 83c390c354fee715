//! Brute-force reference implementation of repeat extraction, used to verify
//! the indexed scan. Every n-gram at every length is enumerated directly,
//! with no candidate filtering and no interning; pruning compares token
//! sequences pairwise. Quadratic, guarded to small corpora.

use std::collections::HashMap;

use crate::corpus::{Corpus, Token};
use crate::repeats::{Occurrence, RepeatConfig, RepeatError, RepeatSet, RepeatedPhrase};

pub const ORACLE_TOKEN_LIMIT: usize = 10_000;

struct NaivePhrase {
    tokens: Vec<String>,
    occurrences: Vec<usize>, // indices into the flat admitted-token list
}

/// Same contract and output as [`crate::repeats::extract_repeats`], computed
/// the slow way.
pub fn oracle_repeats(corpus: &Corpus, config: &RepeatConfig) -> Result<RepeatSet, RepeatError> {
    config.validate()?;
    let token_count = corpus.stats.token_count;
    if token_count > ORACLE_TOKEN_LIMIT {
        return Err(RepeatError::CorpusTooLarge {
            tokens: token_count,
            limit: ORACLE_TOKEN_LIMIT,
        });
    }

    // Admitted tokens, flat, plus the paragraph runs windows may not cross.
    let mut flat: Vec<&Token> = Vec::new();
    let mut runs: Vec<(usize, usize)> = Vec::new();
    for para in &corpus.paragraphs {
        let start = flat.len();
        for tok in &para.tokens {
            if config.include_punct || tok.is_word() {
                flat.push(tok);
            }
        }
        if flat.len() > start {
            runs.push((start, flat.len()));
        }
    }
    if config.span_paragraphs {
        runs = if flat.is_empty() {
            Vec::new()
        } else {
            vec![(0, flat.len())]
        };
    }

    let mut found: Vec<NaivePhrase> = Vec::new();
    for n in config.min_n..=config.max_n {
        let mut by_ngram: HashMap<Vec<String>, Vec<usize>> = HashMap::new();
        for &(start, end) in &runs {
            for i in start..(end + 1).saturating_sub(n) {
                let key: Vec<String> = flat[i..i + n].iter().map(|t| t.norm.clone()).collect();
                by_ngram.entry(key).or_default().push(i);
            }
        }

        let mut repeated_here = 0;
        for (tokens, all_positions) in by_ngram {
            let occurrences = if config.count_overlapping {
                all_positions
            } else {
                let mut kept = Vec::new();
                for pos in all_positions {
                    if kept.last().is_none_or(|&last| pos >= last + n) {
                        kept.push(pos);
                    }
                }
                kept
            };
            if occurrences.len() >= 2 {
                repeated_here += 1;
                found.push(NaivePhrase {
                    tokens,
                    occurrences,
                });
            }
        }
        if repeated_here == 0 {
            break;
        }
    }

    let pre_prune_count = found.len();
    let retained: Vec<&NaivePhrase> = found
        .iter()
        .filter(|p| {
            if config.strict_maximality {
                !every_occurrence_covered(p, &found)
            } else {
                !is_contiguous_subsequence_of_longer(p, &found)
            }
        })
        .collect();

    let mut phrases: Vec<RepeatedPhrase> = retained
        .into_iter()
        .map(|p| RepeatedPhrase {
            n: p.tokens.len(),
            count: p.occurrences.len(),
            tokens: p.tokens.clone(),
            occurrences: p
                .occurrences
                .iter()
                .map(|&i| {
                    let t = flat[i];
                    Occurrence {
                        paragraph_idx: t.paragraph_idx,
                        start_pos_in_paragraph: t.pos_in_paragraph,
                        global_start: t.global_pos,
                    }
                })
                .collect(),
        })
        .collect();
    crate::repeats::sort_phrases(&mut phrases);

    Ok(RepeatSet {
        phrases,
        config: *config,
        pre_prune_count,
    })
}

fn is_contiguous_subsequence_of_longer(p: &NaivePhrase, all: &[NaivePhrase]) -> bool {
    all.iter().any(|q| {
        q.tokens.len() > p.tokens.len() && q.tokens.windows(p.tokens.len()).any(|w| w == p.tokens)
    })
}

fn every_occurrence_covered(p: &NaivePhrase, all: &[NaivePhrase]) -> bool {
    let n = p.tokens.len();
    p.occurrences.iter().all(|&start| {
        all.iter().any(|q| {
            let m = q.tokens.len();
            m > n
                && q.occurrences
                    .iter()
                    .any(|&qs| qs <= start && start + n <= qs + m)
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{load_corpus, TokenizeOptions};
    use crate::repeats::extract_repeats;

    fn corpus_of(text: &str) -> Corpus {
        load_corpus(text, TokenizeOptions::default()).unwrap()
    }

    #[test]
    fn matches_extractor_on_micro_example() {
        let corpus = corpus_of("a b c a b c");
        let config = RepeatConfig::default();
        let fast = extract_repeats(&corpus, &config).unwrap();
        let slow = oracle_repeats(&corpus, &config).unwrap();
        assert_eq!(fast, slow);
        assert_eq!(slow.phrases.len(), 1);
        assert_eq!(slow.phrases[0].tokens, ["a", "b", "c"]);
    }

    #[test]
    fn single_token_corpus_is_empty() {
        let set = oracle_repeats(&corpus_of("lonely"), &RepeatConfig::default()).unwrap();
        assert!(set.phrases.is_empty());
    }

    #[test]
    fn guard_rejects_large_corpora() {
        let text = vec!["w"; ORACLE_TOKEN_LIMIT + 1].join(" ");
        let err = oracle_repeats(&corpus_of(&text), &RepeatConfig::default()).unwrap_err();
        assert!(matches!(err, RepeatError::CorpusTooLarge { .. }));
    }
}
