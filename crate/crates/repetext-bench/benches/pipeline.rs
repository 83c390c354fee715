//! Benchmarks for the hot paths: repeat extraction, mention scanning, and
//! PageRank.

use std::collections::BTreeSet;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use repetext_core::corpus::{load_corpus, Corpus, TokenizeOptions};
use repetext_core::entities::{find_mentions, EntityId, Gazetteer, Mention};
use repetext_core::networks::{
    build_graph, pagerank, AssociationGraph, CoMentionWindow, PageRankOptions,
};
use repetext_core::repeats::{extract_repeats, RepeatConfig};

fn synthetic_text(rng: &mut ChaCha8Rng, target_tokens: usize) -> String {
    let vocab: Vec<String> = (0..1000).map(|i| format!("w{i}")).collect();
    let names: Vec<String> = (0..30).map(|i| format!("Name{i}")).collect();
    let pick = |rng: &mut ChaCha8Rng| {
        let skew: f64 = rng.gen::<f64>();
        let idx = (skew * skew * skew * vocab.len() as f64) as usize;
        vocab[idx.min(vocab.len() - 1)].clone()
    };
    let pool: Vec<Vec<String>> = (0..50)
        .map(|_| {
            let len = rng.gen_range(4..=9);
            (0..len).map(|_| pick(rng)).collect()
        })
        .collect();

    let mut text = String::new();
    let mut tokens = 0usize;
    while tokens < target_tokens {
        let mut sentence: Vec<String> = (0..rng.gen_range(6..=14)).map(|_| pick(rng)).collect();
        if rng.gen_bool(0.4) {
            let phrase = &pool[rng.gen_range(0..pool.len())];
            let at = rng.gen_range(0..=sentence.len());
            sentence.splice(at..at, phrase.iter().cloned());
        }
        if rng.gen_bool(0.3) {
            let at = rng.gen_range(0..=sentence.len());
            sentence.insert(at, names[rng.gen_range(0..names.len())].clone());
        }
        tokens += sentence.len() + 1;
        text.push_str(&sentence.join(" "));
        text.push_str(" .\n\n");
    }
    text
}

fn gazetteer_for_names(count: usize) -> Gazetteer {
    let entries: Vec<serde_json::Value> = (0..count)
        .map(|i| serde_json::json!({ "canonical": format!("Name{i}") }))
        .collect();
    Gazetteer::from_json(&serde_json::to_string(&entries).unwrap(), false).unwrap()
}

fn bench_extract(c: &mut Criterion) {
    let mut group = c.benchmark_group("extract_repeats");
    for &size in &[10_000usize, 50_000] {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let text = synthetic_text(&mut rng, size);
        let corpus: Corpus = load_corpus(&text, TokenizeOptions::default()).unwrap();
        group.throughput(Throughput::Elements(corpus.stats.token_count as u64));
        group.bench_with_input(BenchmarkId::from_parameter(size), &corpus, |b, corpus| {
            b.iter(|| extract_repeats(corpus, &RepeatConfig::default()).unwrap());
        });
    }
    group.finish();
}

fn bench_mentions(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let text = synthetic_text(&mut rng, 50_000);
    let corpus = load_corpus(&text, TokenizeOptions::default()).unwrap();
    let gazetteer = gazetteer_for_names(30);
    c.bench_function("find_mentions_50k_tokens", |b| {
        b.iter(|| find_mentions(&corpus, &gazetteer));
    });
}

fn bench_pagerank(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mentions: Vec<Mention> = (0..4000)
        .map(|_| Mention {
            entity_id: EntityId(rng.gen_range(0..200)),
            paragraph_idx: rng.gen_range(0..1000),
            token_span: (0, 1),
        })
        .collect();
    let paragraphs: BTreeSet<usize> = (0..1000).collect();
    let graph: AssociationGraph = build_graph(
        &mentions,
        &paragraphs,
        CoMentionWindow::SameOrNext,
        "bench",
    );
    c.bench_function("pagerank_200_nodes", |b| {
        b.iter(|| pagerank(&graph, PageRankOptions::default()).unwrap());
    });
}

criterion_group!(benches, bench_extract, bench_mentions, bench_pagerank);
criterion_main!(benches);
