//! Core library for surfacing the repetition structure of a
//! paragraph-segmented text: unique maximal repeated n-grams, gazetteer
//! entity mentions, co-mention association networks, and alternating
//! paragraph-sequence patterns, together with deterministic exporters for
//! every product.

#![forbid(unsafe_code)]

pub mod corpus;
pub mod entities;
pub mod export;
pub mod networks;
pub mod repeats;
pub mod sequences;

pub use corpus::{load_corpus, load_corpus_bytes, Corpus, CorpusError, CorpusStats, Token, TokenizeOptions};
pub use entities::{
    candidate_entities, entities_in_repeats, find_mentions, CandidatePhrase, Entity, EntityId,
    Gazetteer, GazetteerError, Mention,
};
pub use networks::{
    build_graph, connected_components, degree_weights, pagerank, subgraph_window_comparison,
    AssociationGraph, CoMentionWindow, ComponentPartition, NetworkError, PageRankOptions,
    WindowComparison,
};
pub use repeats::{
    extract_repeats, paragraphs_with_repeats, top_by_frequency, top_by_length, RepeatConfig,
    RepeatError, RepeatSet, RepeatedPhrase,
};
pub use sequences::{
    band_data, compress_runs, count_patterns, label_paragraphs, BandSpec, MultiLabelPolicy,
    NetworkLabeling, PatternCounts, RunSequence, SequenceError,
};
