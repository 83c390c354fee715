//! Plain-text ingestion: paragraph segmentation, tokenization with punctuation
//! retained, and corpus statistics.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Punctuation tokens that terminate a sentence.
pub const SENTENCE_TERMINALS: [&str; 4] = [".", "!", "?", "\u{2026}"];

/// Tokenizer settings.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizeOptions {
    /// Lowercase the normalized form of every token. Matching and repeat
    /// extraction run over normalized forms, so this makes them
    /// case-insensitive.
    #[serde(default)]
    pub case_fold: bool,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("input is not valid UTF-8 at byte offset {offset}")]
    InvalidUtf8 { offset: usize },
    #[error("input contains no paragraphs")]
    EmptyCorpus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TokenKind {
    Word,
    Punct,
}

/// A single token, addressable three ways: by paragraph-local position, by
/// corpus-global position, and by byte offset into the source text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    /// Exact source characters.
    pub surface: String,
    /// Surface after optional case folding.
    pub norm: String,
    pub kind: TokenKind,
    pub paragraph_idx: usize,
    pub pos_in_paragraph: usize,
    pub global_pos: usize,
    /// Byte offset of `surface` in the source text.
    pub byte_start: usize,
}

impl Token {
    pub fn is_word(&self) -> bool {
        self.kind == TokenKind::Word
    }

    pub fn is_punct(&self) -> bool {
        self.kind == TokenKind::Punct
    }

    pub fn is_sentence_terminal(&self) -> bool {
        self.is_punct() && SENTENCE_TERMINALS.contains(&self.surface.as_str())
    }
}

/// A block of text separated from its neighbors by one or more blank lines.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Paragraph {
    pub idx: usize,
    pub tokens: Vec<Token>,
    pub sentence_count: usize,
    /// Byte span of the paragraph in the source text (end exclusive).
    pub char_span: (usize, usize),
}

impl Paragraph {
    pub fn word_count(&self) -> usize {
        self.tokens.iter().filter(|t| t.is_word()).count()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub paragraph_count: usize,
    pub sentence_count: usize,
    pub word_count: usize,
    pub token_count: usize,
}

/// A tokenized, paragraph-segmented text. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    pub paragraphs: Vec<Paragraph>,
    pub stats: CorpusStats,
    pub source_name: String,
}

impl Corpus {
    /// All tokens in corpus order.
    pub fn tokens(&self) -> impl Iterator<Item = &Token> {
        self.paragraphs.iter().flat_map(|p| p.tokens.iter())
    }

    /// Look up a token by its global position.
    pub fn token_at(&self, global_pos: usize) -> Option<&Token> {
        let pi = self
            .paragraphs
            .partition_point(|p| p.tokens[0].global_pos <= global_pos)
            .checked_sub(1)?;
        let para = &self.paragraphs[pi];
        para.tokens.get(global_pos - para.tokens[0].global_pos)
    }
}

/// Decode and load a corpus from raw bytes. Reports the byte offset of the
/// first invalid UTF-8 sequence.
pub fn load_corpus_bytes(bytes: &[u8], options: TokenizeOptions) -> Result<Corpus, CorpusError> {
    let text = std::str::from_utf8(bytes).map_err(|e| CorpusError::InvalidUtf8 {
        offset: e.valid_up_to(),
    })?;
    load_corpus(text, options)
}

/// Segment `text` into paragraphs (maximal blocks separated by blank lines)
/// and tokenize each one. Line breaks inside a paragraph count as spaces.
pub fn load_corpus(text: &str, options: TokenizeOptions) -> Result<Corpus, CorpusError> {
    let mut paragraphs: Vec<Paragraph> = Vec::new();
    let mut block_start: Option<usize> = None;
    let mut block_end = 0usize;

    let mut offset = 0usize;
    for line in text.split_inclusive('\n') {
        let content = line.trim_end_matches(['\n', '\r']);
        if content.trim().is_empty() {
            if let Some(start) = block_start.take() {
                push_paragraph(&mut paragraphs, text, start, block_end, options);
            }
        } else {
            if block_start.is_none() {
                block_start = Some(offset);
            }
            block_end = offset + content.len();
        }
        offset += line.len();
    }
    if let Some(start) = block_start {
        push_paragraph(&mut paragraphs, text, start, block_end, options);
    }

    if paragraphs.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }

    let mut corpus = Corpus {
        stats: CorpusStats::default(),
        paragraphs,
        source_name: String::new(),
    };
    corpus.stats = corpus_stats(&corpus);
    Ok(corpus)
}

fn push_paragraph(
    paragraphs: &mut Vec<Paragraph>,
    text: &str,
    start: usize,
    end: usize,
    options: TokenizeOptions,
) {
    let idx = paragraphs.len();
    let global_base = paragraphs
        .last()
        .map(|p| p.tokens[0].global_pos + p.tokens.len())
        .unwrap_or(0);

    let mut tokens = Vec::new();
    for (byte_start, surface, kind) in tokenize_spans(&text[start..end]) {
        let surface = surface.to_string();
        let norm = if options.case_fold {
            surface.to_lowercase()
        } else {
            surface.clone()
        };
        tokens.push(Token {
            surface,
            norm,
            kind,
            paragraph_idx: idx,
            pos_in_paragraph: tokens.len(),
            global_pos: global_base + tokens.len(),
            byte_start: start + byte_start,
        });
    }
    debug_assert!(!tokens.is_empty(), "non-blank block produced no tokens");

    let terminal_count = tokens.iter().filter(|t| t.is_sentence_terminal()).count();
    let has_words = tokens.iter().any(|t| t.is_word());
    let sentence_count = if terminal_count == 0 && has_words {
        1
    } else {
        terminal_count
    };

    paragraphs.push(Paragraph {
        idx,
        tokens,
        sentence_count,
        char_span: (start, end),
    });
}

/// Recompute statistics from the paragraph list.
pub fn corpus_stats(corpus: &Corpus) -> CorpusStats {
    let mut stats = CorpusStats {
        paragraph_count: corpus.paragraphs.len(),
        ..CorpusStats::default()
    };
    for para in &corpus.paragraphs {
        stats.sentence_count += para.sentence_count;
        stats.token_count += para.tokens.len();
        stats.word_count += para.word_count();
    }
    stats
}

/// Tokenize a text fragment with the corpus rules, without positional
/// bookkeeping. Used for gazetteer aliases and tests.
pub fn tokenize_fragment(text: &str) -> Vec<(String, TokenKind)> {
    tokenize_spans(text)
        .into_iter()
        .map(|(_, s, k)| (s.to_string(), k))
        .collect()
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

/// Apostrophes and hyphens join a word when flanked by word characters on
/// both sides ("Kate's", "brother-in-law"). U+2019 is the typographic
/// apostrophe; dashes other than U+002D stay punctuation.
fn is_word_joiner(c: char) -> bool {
    matches!(c, '\'' | '\u{2019}' | '-')
}

/// A word token is a maximal run of letters/digits with internal
/// apostrophes/hyphens; every other non-whitespace character is a
/// single-character punctuation token.
fn tokenize_spans(text: &str) -> Vec<(usize, &str, TokenKind)> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some((start, c)) = chars.next() {
        if c.is_whitespace() {
            continue;
        }
        if !is_word_char(c) {
            out.push((start, &text[start..start + c.len_utf8()], TokenKind::Punct));
            continue;
        }
        let mut end = start + c.len_utf8();
        while let Some(&(i, next)) = chars.peek() {
            if is_word_char(next) {
                end = i + next.len_utf8();
                chars.next();
            } else if is_word_joiner(next) {
                let mut ahead = chars.clone();
                ahead.next();
                match ahead.peek() {
                    Some(&(j, after)) if is_word_char(after) => {
                        end = j + after.len_utf8();
                        chars.next(); // joiner
                        chars.next(); // following word char
                    }
                    _ => break,
                }
            } else {
                break;
            }
        }
        out.push((start, &text[start..end], TokenKind::Word));
    }
    out
}
