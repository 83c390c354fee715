//! Deterministic gazetteer-based mention detection, candidate-entity
//! suggestion, and the intersection of mentions with repeat-bearing
//! paragraphs.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{tokenize_fragment, Corpus, TokenKind};
use crate::repeats::{occurrence_tokens, paragraphs_with_repeats, RepeatSet};

#[derive(Debug, Error)]
pub enum GazetteerError {
    #[error("failed to read gazetteer: {0}")]
    Io(#[from] std::io::Error),
    #[error("gazetteer is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("alias {alias:?} is claimed by both {first:?} and {second:?}")]
    AliasCollision {
        alias: String,
        first: String,
        second: String,
    },
    #[error("entity {entity:?} has an empty alias")]
    EmptyAlias { entity: String },
    #[error("alias {alias:?} of entity {entity:?} contains no word token")]
    NoWordToken { alias: String, entity: String },
    #[error("unknown category {category:?} for entity {entity:?} (expected person, place, org, work, or other)")]
    UnknownCategory { category: String, entity: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EntityId(pub u32);

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Person,
    Place,
    Org,
    Work,
    Other,
}

impl Category {
    fn parse(s: &str) -> Option<Category> {
        Some(match s {
            "person" => Category::Person,
            "place" => Category::Place,
            "org" => Category::Org,
            "work" => Category::Work,
            "other" => Category::Other,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entity {
    pub id: EntityId,
    pub canonical: String,
    /// Distinct alias strings, canonical first.
    pub aliases: Vec<String>,
    pub category: Option<Category>,
}

/// Entry shape of the gazetteer JSON file.
#[derive(Debug, Deserialize)]
struct GazetteerEntry {
    canonical: String,
    #[serde(default)]
    aliases: Vec<String>,
    #[serde(default)]
    category: Option<String>,
}

/// A curated entity list with an alias index for longest-match scanning.
#[derive(Debug, Clone)]
pub struct Gazetteer {
    entities: Vec<Entity>,
    /// First alias token (match key) -> aliases starting with it, longest
    /// token sequence first.
    scan_index: HashMap<String, Vec<(Vec<String>, EntityId)>>,
    case_insensitive: bool,
}

impl Gazetteer {
    pub fn load(path: &Path, case_insensitive: bool) -> Result<Gazetteer, GazetteerError> {
        let raw = std::fs::read_to_string(path)?;
        Gazetteer::from_json(&raw, case_insensitive)
    }

    pub fn from_json(json: &str, case_insensitive: bool) -> Result<Gazetteer, GazetteerError> {
        let entries: Vec<GazetteerEntry> = serde_json::from_str(json)?;
        Gazetteer::from_entries(entries, case_insensitive)
    }

    fn from_entries(
        entries: Vec<GazetteerEntry>,
        case_insensitive: bool,
    ) -> Result<Gazetteer, GazetteerError> {
        let match_key = |s: &str| {
            if case_insensitive {
                s.to_lowercase()
            } else {
                s.to_string()
            }
        };

        let mut entities = Vec::with_capacity(entries.len());
        let mut alias_owner: HashMap<Vec<String>, (EntityId, String)> = HashMap::new();
        for (i, entry) in entries.into_iter().enumerate() {
            let id = EntityId(i as u32);
            let category = match entry.category.as_deref() {
                None => None,
                Some(c) => Some(Category::parse(c).ok_or_else(|| {
                    GazetteerError::UnknownCategory {
                        category: c.to_string(),
                        entity: entry.canonical.clone(),
                    }
                })?),
            };

            let mut aliases: Vec<String> = Vec::new();
            for alias in std::iter::once(&entry.canonical).chain(entry.aliases.iter()) {
                if alias.trim().is_empty() {
                    return Err(GazetteerError::EmptyAlias {
                        entity: entry.canonical.clone(),
                    });
                }
                if !aliases.contains(alias) {
                    aliases.push(alias.clone());
                }
            }

            for alias in &aliases {
                let tokens: Vec<String> = tokenize_fragment(alias)
                    .into_iter()
                    .map(|(s, _)| match_key(&s))
                    .collect();
                if !tokenize_fragment(alias)
                    .iter()
                    .any(|(_, k)| *k == TokenKind::Word)
                {
                    return Err(GazetteerError::NoWordToken {
                        alias: alias.clone(),
                        entity: entry.canonical.clone(),
                    });
                }
                match alias_owner.get(&tokens) {
                    Some((owner, owner_name)) if *owner != id => {
                        return Err(GazetteerError::AliasCollision {
                            alias: alias.clone(),
                            first: owner_name.clone(),
                            second: entry.canonical.clone(),
                        });
                    }
                    _ => {
                        alias_owner.insert(tokens, (id, entry.canonical.clone()));
                    }
                }
            }

            entities.push(Entity {
                id,
                canonical: entry.canonical,
                aliases,
                category,
            });
        }

        let mut scan_index: HashMap<String, Vec<(Vec<String>, EntityId)>> = HashMap::new();
        for (tokens, (id, _)) in alias_owner {
            scan_index
                .entry(tokens[0].clone())
                .or_default()
                .push((tokens, id));
        }
        for candidates in scan_index.values_mut() {
            candidates.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.0.cmp(&b.0)));
        }

        Ok(Gazetteer {
            entities,
            scan_index,
            case_insensitive,
        })
    }

    pub fn entities(&self) -> &[Entity] {
        &self.entities
    }

    pub fn entity(&self, id: EntityId) -> Option<&Entity> {
        self.entities.get(id.0 as usize)
    }

    pub fn canonical_name(&self, id: EntityId) -> &str {
        self.entity(id).map(|e| e.canonical.as_str()).unwrap_or("?")
    }

    pub fn entity_by_canonical(&self, canonical: &str) -> Option<&Entity> {
        self.entities.iter().find(|e| e.canonical == canonical)
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty()
    }

    fn match_key(&self, surface: &str) -> String {
        if self.case_insensitive {
            surface.to_lowercase()
        } else {
            surface.to_string()
        }
    }
}

/// One located entity mention. Token positions are paragraph-local, end
/// exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mention {
    pub entity_id: EntityId,
    pub paragraph_idx: usize,
    pub token_span: (usize, usize),
}

/// Left-to-right, longest-match-wins, non-overlapping scan. An alias matches
/// when its token sequence equals the consecutive corpus tokens, so
/// punctuation breaks a match unless the alias itself contains it.
pub fn find_mentions(corpus: &Corpus, gazetteer: &Gazetteer) -> Vec<Mention> {
    let mut mentions = Vec::new();
    for para in &corpus.paragraphs {
        let surfaces: Vec<String> = para
            .tokens
            .iter()
            .map(|t| gazetteer.match_key(&t.surface))
            .collect();
        let mut i = 0;
        while i < surfaces.len() {
            let mut advanced = false;
            if let Some(candidates) = gazetteer.scan_index.get(&surfaces[i]) {
                for (alias_tokens, id) in candidates {
                    let end = i + alias_tokens.len();
                    if end <= surfaces.len() && surfaces[i..end] == alias_tokens[..] {
                        mentions.push(Mention {
                            entity_id: *id,
                            paragraph_idx: para.idx,
                            token_span: (i, end),
                        });
                        i = end;
                        advanced = true;
                        break;
                    }
                }
            }
            if !advanced {
                i += 1;
            }
        }
    }
    mentions
}

/// Lowercase words allowed to join two capitalized tokens inside one
/// candidate run.
pub const CANDIDATE_CONNECTORS: [&str; 5] = ["de", "of", "van", "la", "the"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidatePhrase {
    pub tokens: Vec<String>,
    pub count: usize,
}

impl CandidatePhrase {
    pub fn phrase(&self) -> String {
        self.tokens.join(" ")
    }
}

/// Gazetteer authoring aid: maximal runs of capitalized word tokens,
/// optionally joined by connector words, ranked by frequency. A run that is
/// a single sentence-initial capitalized token is ignored.
pub fn candidate_entities(corpus: &Corpus) -> Vec<CandidatePhrase> {
    let mut counts: HashMap<Vec<String>, usize> = HashMap::new();
    for para in &corpus.paragraphs {
        let tokens = &para.tokens;
        let mut sentence_initial = true;
        let mut i = 0;
        while i < tokens.len() {
            let tok = &tokens[i];
            if tok.is_punct() {
                if tok.is_sentence_terminal() {
                    sentence_initial = true;
                }
                i += 1;
                continue;
            }
            if !is_capitalized(&tok.surface) {
                sentence_initial = false;
                i += 1;
                continue;
            }

            let run_is_sentence_initial = sentence_initial;
            let start = i;
            let mut end = i + 1;
            loop {
                if end < tokens.len()
                    && tokens[end].is_word()
                    && is_capitalized(&tokens[end].surface)
                {
                    end += 1;
                    continue;
                }
                // Bridge one or more connector words to a further
                // capitalized token, if present.
                let mut k = end;
                while k < tokens.len()
                    && tokens[k].is_word()
                    && CANDIDATE_CONNECTORS.contains(&tokens[k].surface.as_str())
                {
                    k += 1;
                }
                if k > end
                    && k < tokens.len()
                    && tokens[k].is_word()
                    && is_capitalized(&tokens[k].surface)
                {
                    end = k + 1;
                    continue;
                }
                break;
            }

            if !(end - start == 1 && run_is_sentence_initial) {
                let key: Vec<String> =
                    tokens[start..end].iter().map(|t| t.surface.clone()).collect();
                *counts.entry(key).or_insert(0) += 1;
            }
            sentence_initial = false;
            i = end;
        }
    }

    let mut out: Vec<CandidatePhrase> = counts
        .into_iter()
        .map(|(tokens, count)| CandidatePhrase { tokens, count })
        .collect();
    out.sort_by(|a, b| b.count.cmp(&a.count).then(a.tokens.cmp(&b.tokens)));
    out
}

fn is_capitalized(surface: &str) -> bool {
    surface.chars().next().is_some_and(|c| c.is_uppercase())
}

/// Restrict mentions to repeat-bearing paragraphs. Returns the distinct
/// entities mentioned there and the paragraph indices carrying them.
pub fn entities_in_repeats(
    mentions: &[Mention],
    repeat_set: &RepeatSet,
    min_words: usize,
) -> (BTreeSet<EntityId>, BTreeSet<usize>) {
    let paragraphs = paragraphs_with_repeats(repeat_set, min_words);
    let mut ids = BTreeSet::new();
    let mut hit_paragraphs = BTreeSet::new();
    for m in mentions {
        if paragraphs.contains(&m.paragraph_idx) {
            ids.insert(m.entity_id);
            hit_paragraphs.insert(m.paragraph_idx);
        }
    }
    (ids, hit_paragraphs)
}

/// Keep only mentions that lie entirely inside an occurrence of a repeated
/// phrase with more than `min_words` word tokens.
pub fn restrict_mentions_to_fragments(
    mentions: &[Mention],
    corpus: &Corpus,
    repeat_set: &RepeatSet,
    min_words: usize,
) -> Vec<Mention> {
    // Covered global token ranges, sorted, with a running max end.
    let mut intervals: Vec<(usize, usize)> = Vec::new();
    for phrase in &repeat_set.phrases {
        if phrase.word_token_count() <= min_words {
            continue;
        }
        for occ in &phrase.occurrences {
            let covered = occurrence_tokens(corpus, phrase, occ, &repeat_set.config);
            if let (Some(first), Some(last)) = (covered.first(), covered.last()) {
                intervals.push((first.global_pos, last.global_pos + 1));
            }
        }
    }
    intervals.sort_unstable();
    let mut prefix_max_end = Vec::with_capacity(intervals.len());
    let mut max_end = 0;
    for &(_, end) in &intervals {
        max_end = max_end.max(end);
        prefix_max_end.push(max_end);
    }

    mentions
        .iter()
        .filter(|m| {
            let para = &corpus.paragraphs[m.paragraph_idx];
            let start = para.tokens[m.token_span.0].global_pos;
            let end = para.tokens[m.token_span.1 - 1].global_pos + 1;
            let k = intervals.partition_point(|&(s, _)| s <= start);
            k > 0 && prefix_max_end[k - 1] >= end
        })
        .copied()
        .collect()
}
