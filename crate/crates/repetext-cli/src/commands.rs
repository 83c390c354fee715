//! Stage orchestration behind the subcommands. Each subcommand runs its own
//! stage plus whatever upstream stages it needs; the expensive repeat
//! extraction is cached in the output directory keyed by a content hash of
//! the input and the stage config.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use repetext_core::corpus::{load_corpus_bytes, Corpus};
use repetext_core::entities::{
    candidate_entities, entities_in_repeats, find_mentions, restrict_mentions_to_fragments,
    EntityId, Gazetteer, Mention,
};
use repetext_core::export::report::{
    ComparisonSummary, EntitiesBlock, GraphSummary, GraphsBlock, PatternRow, PhraseSummary,
    Provenance, RepeatsBlock, Report, SequencePolicy, SequencesBlock,
};
use repetext_core::export::tables::{
    candidates_to_csv, degrees_to_csv, mentions_to_csv, pagerank_to_csv, pattern_rows,
    patterns_to_csv, patterns_to_json, repeats_to_csv, repeats_to_json, runs_to_csv,
};
use repetext_core::export::{
    band_to_svg, graph_to_dot, graph_to_graphml, graph_to_json, report_to_json, report_to_text,
    write_atomic,
};
use repetext_core::networks::{
    build_graph, connected_components, degree_weights, pagerank, subgraph_window_comparison,
    AssociationGraph, CoMentionWindow, ComponentPartition, PageRankOptions,
};
use repetext_core::repeats::{
    extract_repeats, paragraphs_with_repeats, top_by_frequency, top_by_length, RepeatSet,
    RepeatedPhrase,
};
use repetext_core::sequences::{
    band_data, compress_runs, count_patterns, label_paragraphs, NetworkLabeling, PatternCounts,
    RunSequence,
};

use crate::config::{GraphFormatChoice, GraphScope, RunConfig, DEFAULT_PALETTE};
use crate::CliError;

const TOP_BY_LENGTH: usize = 5;
const TOP_BY_FREQUENCY: usize = 10;
const TOP_PAGERANK: usize = 10;

pub struct Pipeline {
    config: RunConfig,
    out_dir: PathBuf,
    corpus: Option<Corpus>,
    input_digest: Option<[u8; 32]>,
    repeat_set: Option<RepeatSet>,
    gazetteer: Option<Gazetteer>,
    mentions: Option<Vec<Mention>>,
}

impl Pipeline {
    pub fn new(config: RunConfig) -> Pipeline {
        let out_dir = config.out_dir();
        Pipeline {
            config,
            out_dir,
            corpus: None,
            input_digest: None,
            repeat_set: None,
            gazetteer: None,
            mentions: None,
        }
    }

    fn window(&self) -> CoMentionWindow {
        CoMentionWindow::try_from(self.config.window).expect("window validated")
    }

    fn ensure_corpus(&mut self) -> Result<(), CliError> {
        if self.corpus.is_some() {
            return Ok(());
        }
        let path = self.config.input_path()?;
        let bytes = std::fs::read(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        self.input_digest = Some(Sha256::digest(&bytes).into());
        let mut corpus = load_corpus_bytes(&bytes, self.config.tokenize)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        corpus.source_name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        self.corpus = Some(corpus);
        Ok(())
    }

    fn corpus(&mut self) -> Result<&Corpus, CliError> {
        self.ensure_corpus()?;
        Ok(self.corpus.as_ref().expect("corpus just ensured"))
    }

    /// Content hash of the input bytes plus every option the repeat stage
    /// depends on. A changed input or config yields a different key, so
    /// stale cache entries are never read.
    fn repeats_cache_path(&self) -> PathBuf {
        let mut hasher = Sha256::new();
        hasher.update(self.input_digest.expect("corpus loaded before caching"));
        hasher.update(serde_json::to_string(&self.config.tokenize).expect("options serialize"));
        hasher.update(serde_json::to_string(&self.config.repeats).expect("options serialize"));
        let key = hasher.finalize();
        let hex: String = key.iter().take(8).map(|b| format!("{b:02x}")).collect();
        self.out_dir.join(".cache").join(format!("repeats-{hex}.json"))
    }

    fn ensure_repeats(&mut self) -> Result<(), CliError> {
        if self.repeat_set.is_some() {
            return Ok(());
        }
        self.ensure_corpus()?;
        let cache_path = self.repeats_cache_path();
        if let Ok(raw) = std::fs::read_to_string(&cache_path) {
            if let Ok(set) = serde_json::from_str::<RepeatSet>(&raw) {
                self.repeat_set = Some(set);
                return Ok(());
            }
        }

        let corpus = self.corpus.as_ref().expect("corpus ensured");
        let set = extract_repeats(corpus, &self.config.repeats)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        if let Some(parent) = cache_path.parent() {
            std::fs::create_dir_all(parent)
                .map_err(|e| CliError::Input(format!("cannot create cache dir: {e}")))?;
        }
        let json = serde_json::to_string(&set).expect("repeat set serializes");
        write_file(&cache_path, &json)?;
        self.repeat_set = Some(set);
        Ok(())
    }

    fn repeat_set(&mut self) -> Result<&RepeatSet, CliError> {
        self.ensure_repeats()?;
        Ok(self.repeat_set.as_ref().expect("repeats just ensured"))
    }

    fn ensure_gazetteer(&mut self) -> Result<(), CliError> {
        if self.gazetteer.is_some() {
            return Ok(());
        }
        let path = self.config.gazetteer_path()?;
        let gazetteer = Gazetteer::load(path, self.config.entities.case_insensitive)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        self.gazetteer = Some(gazetteer);
        Ok(())
    }

    fn gazetteer(&mut self) -> Result<&Gazetteer, CliError> {
        self.ensure_gazetteer()?;
        Ok(self.gazetteer.as_ref().expect("gazetteer just ensured"))
    }

    fn ensure_mentions(&mut self) -> Result<(), CliError> {
        if self.mentions.is_some() {
            return Ok(());
        }
        self.ensure_corpus()?;
        self.ensure_gazetteer()?;
        let corpus = self.corpus.as_ref().expect("corpus ensured");
        let gazetteer = self.gazetteer.as_ref().expect("gazetteer ensured");
        self.mentions = Some(find_mentions(corpus, gazetteer));
        Ok(())
    }

    fn mentions(&mut self) -> Result<&[Mention], CliError> {
        self.ensure_mentions()?;
        Ok(self.mentions.as_ref().expect("mentions just ensured"))
    }

    fn entity_names(&mut self) -> Result<BTreeMap<EntityId, String>, CliError> {
        Ok(self
            .gazetteer()?
            .entities()
            .iter()
            .map(|e| (e.id, e.canonical.clone()))
            .collect())
    }

    /// The paragraph set and mention stream the graphs are built over.
    fn graph_inputs(&mut self) -> Result<(Vec<Mention>, BTreeSet<usize>, String), CliError> {
        self.ensure_mentions()?;
        let (paragraph_set, label) = match self.config.graph_scope {
            GraphScope::Repeats => {
                let min_words = self.config.min_words;
                let set = paragraphs_with_repeats(self.repeat_set()?, min_words);
                (set, format!("repeat-paragraphs(min_words={min_words})"))
            }
            GraphScope::All => {
                let count = self.corpus()?.stats.paragraph_count;
                ((0..count).collect(), "all-paragraphs".to_string())
            }
        };
        let mentions = if self.config.entities.fragment_mentions_only {
            let min_words = self.config.min_words;
            self.ensure_repeats()?;
            let corpus = self.corpus.as_ref().expect("corpus ensured");
            let repeat_set = self.repeat_set.as_ref().expect("repeats ensured");
            let all = self.mentions.as_ref().expect("mentions ensured");
            restrict_mentions_to_fragments(all, corpus, repeat_set, min_words)
        } else {
            self.mentions.clone().expect("mentions ensured")
        };
        Ok((mentions, paragraph_set, label))
    }

    fn build_graph_at(&mut self, window: CoMentionWindow) -> Result<AssociationGraph, CliError> {
        let (mentions, paragraph_set, label) = self.graph_inputs()?;
        Ok(build_graph(&mentions, &paragraph_set, window, &label))
    }

    fn provenance(&mut self, stage: Stage) -> Result<Provenance, CliError> {
        let source_name = self.corpus()?.source_name.clone();
        let config = &self.config;
        let mut provenance = Provenance {
            source_name,
            tokenize: config.tokenize,
            ..Provenance::default()
        };
        if stage >= Stage::Repeats {
            provenance.repeats = Some(config.repeats);
            provenance.min_words = Some(config.min_words);
        }
        if stage >= Stage::Entities {
            provenance.gazetteer = config
                .gazetteer
                .as_ref()
                .map(|p| p.display().to_string());
            provenance.case_insensitive_match = Some(config.entities.case_insensitive);
        }
        if stage >= Stage::Graph {
            provenance.window = Some(config.window);
            provenance.fragment_mentions_only = Some(config.entities.fragment_mentions_only);
        }
        if config.export.timestamp {
            provenance.timestamp_unix = Some(
                std::time::SystemTime::now()
                    .duration_since(std::time::UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0),
            );
        }
        Ok(provenance)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Stage {
    Stats,
    Repeats,
    Entities,
    Graph,
    Sequences,
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    write_atomic(path, contents.as_bytes())
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

fn ensure_out_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Input(format!("cannot create {}: {e}", dir.display())))
}

fn phrase_summaries(phrases: &[&RepeatedPhrase]) -> Vec<PhraseSummary> {
    phrases
        .iter()
        .map(|p| PhraseSummary {
            phrase: p.phrase(),
            n: p.n,
            count: p.count,
        })
        .collect()
}

fn repeats_block(set: &RepeatSet, min_words: usize) -> RepeatsBlock {
    RepeatsBlock {
        pre_prune_count: set.pre_prune_count,
        post_prune_count: set.post_prune_count(),
        paragraphs_with_repeats: paragraphs_with_repeats(set, min_words).len(),
        top_by_length: phrase_summaries(&top_by_length(set, TOP_BY_LENGTH)),
        top_by_frequency: phrase_summaries(&top_by_frequency(set, TOP_BY_FREQUENCY)),
    }
}

fn graph_summary(
    graph: &AssociationGraph,
    partition: &ComponentPartition,
    names: &BTreeMap<EntityId, String>,
) -> Result<GraphSummary, CliError> {
    let scores = if graph.is_empty() {
        BTreeMap::new()
    } else {
        pagerank(graph, PageRankOptions::default())
            .map_err(|e| CliError::Usage(e.to_string()))?
    };
    let mut ranked: Vec<(EntityId, f64)> = scores.into_iter().collect();
    ranked.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.0.cmp(&b.0))
    });
    ranked.truncate(TOP_PAGERANK);
    Ok(GraphSummary {
        window: graph.window.as_u8(),
        nodes: graph.node_count(),
        edges: graph.edge_count(),
        component_sizes: partition.sizes(),
        top_pagerank: ranked
            .into_iter()
            .map(|(id, s)| {
                (
                    names.get(&id).cloned().unwrap_or_else(|| format!("entity-{id}")),
                    s,
                )
            })
            .collect(),
    })
}

/// Selected components with their display names.
struct Selection {
    ids: BTreeSet<usize>,
    names: BTreeMap<usize, String>,
}

fn load_component_labels(
    path: &Path,
    gazetteer: &Gazetteer,
    partition: &ComponentPartition,
) -> Result<BTreeMap<usize, String>, CliError> {
    let raw = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let mapping: BTreeMap<String, String> = serde_json::from_str(&raw).map_err(|e| {
        CliError::Input(format!(
            "labels file {} must be a JSON object of {{\"entity canonical\": \"display name\"}}: {e}",
            path.display()
        ))
    })?;
    let mut names = BTreeMap::new();
    for (canonical, display) in mapping {
        let entity = gazetteer.entity_by_canonical(&canonical).ok_or_else(|| {
            CliError::Input(format!(
                "labels file names unknown entity {canonical:?} (not in the gazetteer)"
            ))
        })?;
        match partition.component_of(entity.id) {
            Some(component) => {
                names.insert(component, display);
            }
            None => eprintln!(
                "note: labels file entity {canonical:?} has no mentions in the graph; label {display:?} unused"
            ),
        }
    }
    Ok(names)
}

fn resolve_selection(
    config: &RunConfig,
    gazetteer: &Gazetteer,
    partition: &ComponentPartition,
) -> Result<Selection, CliError> {
    let names = match &config.labels {
        Some(path) => load_component_labels(path, gazetteer, partition)?,
        None => BTreeMap::new(),
    };

    let mut ids: BTreeSet<usize> = BTreeSet::new();
    if config.sequences.selected.is_empty() {
        for (i, component) in partition.components.iter().enumerate() {
            if component.len() >= 2 {
                ids.insert(i);
            }
        }
        if ids.is_empty() {
            ids.extend(0..partition.components.len());
        }
    } else {
        let by_name: BTreeMap<&str, usize> =
            names.iter().map(|(&c, n)| (n.as_str(), c)).collect();
        for selector in &config.sequences.selected {
            if let Some(&component) = by_name.get(selector.as_str()) {
                ids.insert(component);
            } else if let Some(entity) = gazetteer.entity_by_canonical(selector) {
                match partition.component_of(entity.id) {
                    Some(component) => {
                        ids.insert(component);
                    }
                    None => {
                        return Err(CliError::Usage(format!(
                            "selected entity {selector:?} has no mentions in the graph"
                        )))
                    }
                }
            } else {
                return Err(CliError::Usage(format!(
                    "cannot resolve selected component {selector:?}: not a label-file display \
                     name and not a gazetteer canonical name"
                )));
            }
        }
    }
    if ids.is_empty() {
        return Err(CliError::Usage(
            "no components to select: the association graph is empty \
             (no entity mentions in the chosen paragraph set)"
                .into(),
        ));
    }
    Ok(Selection { ids, names })
}

fn band_colors(
    config: &RunConfig,
    ids: &BTreeSet<usize>,
    labeling: &NetworkLabeling,
) -> BTreeMap<usize, String> {
    ids.iter()
        .enumerate()
        .map(|(i, &component)| {
            let name = labeling.name_of(component);
            let color = config
                .export
                .colors
                .get(name)
                .cloned()
                .unwrap_or_else(|| DEFAULT_PALETTE[i % DEFAULT_PALETTE.len()].to_string());
            (component, color)
        })
        .collect()
}

struct SequenceProducts {
    labeling: NetworkLabeling,
    runs: RunSequence,
    patterns: PatternCounts,
    selected_names: Vec<String>,
}

fn sequence_products(
    pipeline: &mut Pipeline,
    partition: &ComponentPartition,
) -> Result<SequenceProducts, CliError> {
    pipeline.ensure_gazetteer()?;
    let selection = resolve_selection(
        &pipeline.config,
        pipeline.gazetteer.as_ref().expect("gazetteer ensured"),
        partition,
    )?;
    let paragraph_count = pipeline.corpus()?.stats.paragraph_count;
    let mentions = pipeline.mentions()?.to_vec();

    let mut labeling = label_paragraphs(&mentions, partition, &selection.ids, paragraph_count)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    for (&component, name) in &selection.names {
        labeling.set_name(component, name.clone());
    }

    let runs = compress_runs(
        &labeling,
        &selection.ids,
        pipeline.config.sequences.max_gap,
        pipeline.config.sequences.multi_policy,
    )
    .map_err(|e| CliError::Usage(e.to_string()))?;
    let patterns = count_patterns(&runs, pipeline.config.sequences.max_pattern_len)
        .map_err(|e| CliError::Usage(e.to_string()))?;

    let selected_names = selection
        .ids
        .iter()
        .map(|&c| labeling.name_of(c).to_string())
        .collect();

    Ok(SequenceProducts {
        labeling,
        runs,
        patterns,
        selected_names,
    })
}

fn write_sequence_files(
    pipeline: &Pipeline,
    products: &SequenceProducts,
    selection_ids: &BTreeSet<usize>,
) -> Result<(), CliError> {
    let out = &pipeline.out_dir;
    write_file(
        &out.join("runs.csv"),
        &runs_to_csv(&products.runs, &products.labeling)
            .map_err(|e| CliError::Input(e.to_string()))?,
    )?;
    write_file(
        &out.join("patterns.csv"),
        &patterns_to_csv(&products.patterns, &products.labeling)
            .map_err(|e| CliError::Input(e.to_string()))?,
    )?;
    write_file(
        &out.join("patterns.json"),
        &patterns_to_json(&products.patterns, &products.labeling),
    )?;

    let colors = band_colors(&pipeline.config, selection_ids, &products.labeling);
    let order: Vec<usize> = selection_ids.iter().copied().collect();
    let spec = band_data(&products.labeling, &order, &colors)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let svg = band_to_svg(&spec, &pipeline.config.export.svg)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    write_file(&out.join("band.svg"), &svg)
}

fn sequences_block(products: &SequenceProducts) -> SequencesBlock {
    SequencesBlock {
        selected: products.selected_names.clone(),
        run_count: products.runs.runs.len(),
        labeled_paragraphs: products.labeling.labels.len(),
        patterns: pattern_rows(&products.patterns, &products.labeling)
            .into_iter()
            .map(|(pattern, count)| PatternRow { pattern, count })
            .collect(),
    }
}

fn write_graph_files(
    pipeline: &Pipeline,
    graph: &AssociationGraph,
    partition: &ComponentPartition,
    names: &BTreeMap<EntityId, String>,
) -> Result<(), CliError> {
    let out = &pipeline.out_dir;
    let w = graph.window.as_u8();
    let format = pipeline.config.export.graph_format;
    if matches!(format, GraphFormatChoice::Dot | GraphFormatChoice::All) {
        write_file(&out.join(format!("graph-w{w}.dot")), &graph_to_dot(graph, names))?;
    }
    if matches!(format, GraphFormatChoice::Graphml | GraphFormatChoice::All) {
        write_file(
            &out.join(format!("graph-w{w}.graphml")),
            &graph_to_graphml(graph, names),
        )?;
    }
    if matches!(format, GraphFormatChoice::Json | GraphFormatChoice::All) {
        write_file(
            &out.join(format!("graph-w{w}.json")),
            &graph_to_json(graph, Some(partition), names),
        )?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ComponentDoc {
    component: usize,
    size: usize,
    members: Vec<String>,
}

fn components_json(
    partition: &ComponentPartition,
    names: &BTreeMap<EntityId, String>,
) -> String {
    let docs: Vec<ComponentDoc> = partition
        .components
        .iter()
        .enumerate()
        .map(|(i, component)| ComponentDoc {
            component: i,
            size: component.len(),
            members: component
                .iter()
                .map(|id| names.get(id).cloned().unwrap_or_else(|| format!("entity-{id}")))
                .collect(),
        })
        .collect();
    let mut json = serde_json::to_string_pretty(&docs).expect("components serialize");
    json.push('\n');
    json
}

/// Corpus statistics only.
pub fn cmd_stats(config: &RunConfig) -> Result<Report, CliError> {
    config.validate(false)?;
    let mut pipeline = Pipeline::new(config.clone());
    ensure_out_dir(&pipeline.out_dir)?;
    let mut report = Report::new(pipeline.provenance(Stage::Stats)?);
    report.corpus = Some(pipeline.corpus()?.stats);
    write_file(&pipeline.out_dir.join("report.json"), &report_to_json(&report))?;
    write_file(&pipeline.out_dir.join("report.txt"), &report_to_text(&report))?;
    Ok(report)
}

/// Repeated-phrase extraction and its tables.
pub fn cmd_repeats(config: &RunConfig) -> Result<Report, CliError> {
    config.validate(false)?;
    let mut pipeline = Pipeline::new(config.clone());
    ensure_out_dir(&pipeline.out_dir)?;
    let mut report = Report::new(pipeline.provenance(Stage::Repeats)?);
    report.corpus = Some(pipeline.corpus()?.stats);
    let min_words = config.min_words;
    pipeline.ensure_repeats()?;
    let set = pipeline.repeat_set.as_ref().expect("repeats ensured");
    report.repeats = Some(repeats_block(set, min_words));
    write_file(
        &pipeline.out_dir.join("repeats.csv"),
        &repeats_to_csv(set).map_err(|e| CliError::Input(e.to_string()))?,
    )?;
    write_file(&pipeline.out_dir.join("repeats.json"), &repeats_to_json(set))?;
    Ok(report)
}

/// Mention detection and candidate suggestions.
pub fn cmd_entities(config: &RunConfig) -> Result<Report, CliError> {
    config.validate(true)?;
    let mut pipeline = Pipeline::new(config.clone());
    ensure_out_dir(&pipeline.out_dir)?;
    let mut report = Report::new(pipeline.provenance(Stage::Entities)?);
    report.corpus = Some(pipeline.corpus()?.stats);
    report.entities = Some(entities_stage(&mut pipeline)?);
    report.repeats = Some(repeats_block(pipeline.repeat_set()?, config.min_words));
    Ok(report)
}

fn entities_stage(pipeline: &mut Pipeline) -> Result<EntitiesBlock, CliError> {
    let min_words = pipeline.config.min_words;
    pipeline.ensure_mentions()?;
    pipeline.ensure_repeats()?;

    let corpus = pipeline.corpus.as_ref().expect("corpus ensured");
    let gazetteer = pipeline.gazetteer.as_ref().expect("gazetteer ensured");
    let mentions = pipeline.mentions.as_ref().expect("mentions ensured");
    let repeat_set = pipeline.repeat_set.as_ref().expect("repeats ensured");

    let candidates = candidate_entities(corpus);
    let (entity_ids, repeat_paragraphs) = entities_in_repeats(mentions, repeat_set, min_words);
    let unique_mentioned: BTreeSet<EntityId> = mentions.iter().map(|m| m.entity_id).collect();

    let out = &pipeline.out_dir;
    write_file(
        &out.join("mentions.csv"),
        &mentions_to_csv(mentions, gazetteer).map_err(|e| CliError::Input(e.to_string()))?,
    )?;
    write_file(
        &out.join("candidates.csv"),
        &candidates_to_csv(&candidates).map_err(|e| CliError::Input(e.to_string()))?,
    )?;

    Ok(EntitiesBlock {
        mention_count: mentions.len(),
        unique_entities_mentioned: unique_mentioned.len(),
        entities_in_repeat_paragraphs: entity_ids.len(),
        repeat_paragraphs_with_mentions: repeat_paragraphs.len(),
        candidate_count: candidates.len(),
    })
}

/// Association graph at the configured window, components, PageRank.
pub fn cmd_graph(config: &RunConfig) -> Result<Report, CliError> {
    config.validate(true)?;
    let mut pipeline = Pipeline::new(config.clone());
    ensure_out_dir(&pipeline.out_dir)?;
    let mut report = Report::new(pipeline.provenance(Stage::Graph)?);
    report.corpus = Some(pipeline.corpus()?.stats);

    let names = pipeline.entity_names()?;
    let graph = pipeline.build_graph_at(pipeline.window())?;
    let partition = connected_components(&graph);
    write_graph_files(&pipeline, &graph, &partition, &names)?;
    write_file(
        &pipeline.out_dir.join("components.json"),
        &components_json(&partition, &names),
    )?;
    let scores = if graph.is_empty() {
        BTreeMap::new()
    } else {
        pagerank(&graph, PageRankOptions::default())
            .map_err(|e| CliError::Usage(e.to_string()))?
    };
    write_file(
        &pipeline.out_dir.join("pagerank.csv"),
        &pagerank_to_csv(&scores, &names).map_err(|e| CliError::Input(e.to_string()))?,
    )?;
    write_file(
        &pipeline.out_dir.join("degrees.csv"),
        &degrees_to_csv(&degree_weights(&graph), &names)
            .map_err(|e| CliError::Input(e.to_string()))?,
    )?;

    report.graphs = Some(GraphsBlock {
        windows: vec![graph_summary(&graph, &partition, &names)?],
        comparison: None,
    });
    Ok(report)
}

/// Run labeling, pattern counting, and the band plot.
pub fn cmd_sequences(config: &RunConfig) -> Result<Report, CliError> {
    config.validate(true)?;
    let mut pipeline = Pipeline::new(config.clone());
    ensure_out_dir(&pipeline.out_dir)?;
    let mut report = Report::new(pipeline.provenance(Stage::Sequences)?);
    report.corpus = Some(pipeline.corpus()?.stats);

    let graph = pipeline.build_graph_at(pipeline.window())?;
    let partition = connected_components(&graph);
    let products = sequence_products(&mut pipeline, &partition)?;
    let selection_ids: BTreeSet<usize> =
        products.runs.selected.iter().copied().collect();
    write_sequence_files(&pipeline, &products, &selection_ids)?;
    report.sequences = Some(sequences_block(&products));
    report.provenance.sequence_policy = Some(SequencePolicy {
        selected: products.selected_names.clone(),
        max_gap: config.sequences.max_gap,
        multi_policy: config.sequences.multi_policy,
        max_pattern_len: config.sequences.max_pattern_len,
    });
    Ok(report)
}

/// The whole pipeline: every artifact plus the summary report.
pub fn cmd_all(config: &RunConfig) -> Result<Report, CliError> {
    config.validate(true)?;
    let mut pipeline = Pipeline::new(config.clone());
    ensure_out_dir(&pipeline.out_dir)?;
    let mut report = Report::new(pipeline.provenance(Stage::Sequences)?);
    report.corpus = Some(pipeline.corpus()?.stats);

    // Repeats.
    let min_words = config.min_words;
    pipeline.ensure_repeats()?;
    {
        let set = pipeline.repeat_set.as_ref().expect("repeats ensured");
        report.repeats = Some(repeats_block(set, min_words));
        let csv = repeats_to_csv(set).map_err(|e| CliError::Input(e.to_string()))?;
        let json = repeats_to_json(set);
        write_file(&pipeline.out_dir.join("repeats.csv"), &csv)?;
        write_file(&pipeline.out_dir.join("repeats.json"), &json)?;
    }

    // Entities.
    report.entities = Some(entities_stage(&mut pipeline)?);

    // Graphs under both windows, plus the comparison.
    let names = pipeline.entity_names()?;
    let g0 = pipeline.build_graph_at(CoMentionWindow::SameParagraph)?;
    let g1 = pipeline.build_graph_at(CoMentionWindow::SameOrNext)?;
    let p0 = connected_components(&g0);
    let p1 = connected_components(&g1);
    write_graph_files(&pipeline, &g0, &p0, &names)?;
    write_graph_files(&pipeline, &g1, &p1, &names)?;

    let configured = match pipeline.window() {
        CoMentionWindow::SameParagraph => (&g0, &p0),
        CoMentionWindow::SameOrNext => (&g1, &p1),
    };
    write_file(
        &pipeline.out_dir.join("components.json"),
        &components_json(configured.1, &names),
    )?;
    let scores = if configured.0.is_empty() {
        BTreeMap::new()
    } else {
        pagerank(configured.0, PageRankOptions::default())
            .map_err(|e| CliError::Usage(e.to_string()))?
    };
    write_file(
        &pipeline.out_dir.join("pagerank.csv"),
        &pagerank_to_csv(&scores, &names).map_err(|e| CliError::Input(e.to_string()))?,
    )?;
    write_file(
        &pipeline.out_dir.join("degrees.csv"),
        &degrees_to_csv(&degree_weights(configured.0), &names)
            .map_err(|e| CliError::Input(e.to_string()))?,
    )?;

    let comparison = subgraph_window_comparison(&g0, &g1)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let mut comparison_json =
        serde_json::to_string_pretty(&comparison).expect("comparison serializes");
    comparison_json.push('\n');
    write_file(&pipeline.out_dir.join("comparison.json"), &comparison_json)?;

    report.graphs = Some(GraphsBlock {
        windows: vec![
            graph_summary(&g0, &p0, &names)?,
            graph_summary(&g1, &p1, &names)?,
        ],
        comparison: Some(ComparisonSummary {
            new_edges: comparison.new_edges.len(),
            merged_component_groups: comparison.merged_groups.len(),
            bridge_entities: comparison
                .bridge_entities
                .iter()
                .map(|id| names.get(id).cloned().unwrap_or_else(|| format!("entity-{id}")))
                .collect(),
        }),
    });

    // Sequences over the configured window's partition.
    let partition = match pipeline.window() {
        CoMentionWindow::SameParagraph => p0,
        CoMentionWindow::SameOrNext => p1,
    };
    let products = sequence_products(&mut pipeline, &partition)?;
    let selection_ids: BTreeSet<usize> =
        products.runs.selected.iter().copied().collect();
    write_sequence_files(&pipeline, &products, &selection_ids)?;
    report.sequences = Some(sequences_block(&products));
    report.provenance.sequence_policy = Some(SequencePolicy {
        selected: products.selected_names.clone(),
        max_gap: config.sequences.max_gap,
        multi_policy: config.sequences.multi_policy,
        max_pattern_len: config.sequences.max_pattern_len,
    });

    write_file(&pipeline.out_dir.join("report.json"), &report_to_json(&report))?;
    write_file(&pipeline.out_dir.join("report.txt"), &report_to_text(&report))?;
    Ok(report)
}
