use std::path::PathBuf;

use clap::{ArgAction, Parser, Subcommand};

use repetext_cli::config::{GraphFormatChoice, GraphScope, RunConfig};
use repetext_cli::{cmd_all, cmd_entities, cmd_graph, cmd_repeats, cmd_sequences, cmd_stats, CliError};
use repetext_core::export::report_to_text;
use repetext_core::sequences::MultiLabelPolicy;

/// Surface the repetition structure of a paragraph-segmented text: unique
/// maximal repeated n-grams, entity mentions, co-mention networks, and
/// paragraph sequence patterns.
#[derive(Debug, Parser)]
#[command(name = "repetext", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Plain-text input file (UTF-8).
    #[arg(long, global = true)]
    input: Option<PathBuf>,

    /// Output directory for every artifact.
    #[arg(long, global = true, env = "REPETEXT_OUT")]
    out: Option<PathBuf>,

    /// Gazetteer JSON (array of {"canonical", "aliases", "category"}).
    #[arg(long, global = true)]
    gazetteer: Option<PathBuf>,

    /// Component labels JSON ({"entity canonical": "display name"}).
    #[arg(long, global = true)]
    labels: Option<PathBuf>,

    /// Smallest n-gram length searched (>= 2).
    #[arg(long, global = true)]
    min_n: Option<usize>,

    /// Largest n-gram length searched (<= 32).
    #[arg(long, global = true)]
    max_n: Option<usize>,

    /// Let n-grams cross paragraph boundaries.
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    span_paragraphs: Option<bool>,

    /// Count occurrences that overlap an earlier one.
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    count_overlapping: Option<bool>,

    /// Let punctuation tokens participate in n-grams.
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    include_punct: Option<bool>,

    /// Prune a shorter repeat only when every occurrence lies inside a
    /// longer repeat's occurrence.
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    strict_maximality: Option<bool>,

    /// Lowercase normalized token forms.
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    case_fold: Option<bool>,

    /// Match gazetteer aliases case-insensitively.
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    case_insensitive_match: Option<bool>,

    /// Build graphs only from mentions inside repeated-phrase occurrences.
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    fragment_mentions_only: Option<bool>,

    /// Word-count threshold for repeat-bearing paragraphs (strictly more
    /// than this many words).
    #[arg(long, global = true)]
    min_words: Option<usize>,

    /// Co-mention window: 0 = same paragraph, 1 = same or next paragraph.
    #[arg(long, global = true)]
    window: Option<u8>,

    /// Paragraph set for graph building.
    #[arg(long, global = true, value_enum)]
    graph_scope: Option<GraphScopeArg>,

    /// Component selector (repeatable): a labels-file display name or an
    /// entity canonical name.
    #[arg(long, global = true, action = ArgAction::Append)]
    selected: Vec<String>,

    /// Unlabeled paragraphs tolerated inside one run.
    #[arg(long, global = true)]
    max_gap: Option<usize>,

    /// Multi-label paragraph handling.
    #[arg(long, global = true, value_enum)]
    multi_policy: Option<MultiPolicyArg>,

    /// Longest sequence pattern counted (>= 2).
    #[arg(long, global = true)]
    max_pattern_len: Option<usize>,

    /// Graph export format.
    #[arg(long, global = true, value_enum)]
    format: Option<GraphFormatArg>,

    /// Record a wall-clock timestamp in the report provenance.
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    timestamp: Option<bool>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Corpus statistics: paragraphs, sentences, words, tokens.
    Stats,
    /// Unique maximal repeated n-grams.
    Repeats,
    /// Gazetteer mention detection and candidate suggestions.
    Entities,
    /// Association graph, components, PageRank.
    Graph,
    /// Run labeling, sequence patterns, band plot.
    Sequences,
    /// The full pipeline plus the summary report.
    All,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum GraphScopeArg {
    Repeats,
    All,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum MultiPolicyArg {
    Break,
    EmitAll,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum GraphFormatArg {
    Dot,
    Graphml,
    Json,
    All,
}

impl Cli {
    /// Config-file values first, then flag overrides.
    fn effective_config(&self) -> Result<RunConfig, CliError> {
        let mut config = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        if let Some(v) = &self.input {
            config.input = Some(v.clone());
        }
        if let Some(v) = &self.out {
            config.out = Some(v.clone());
        }
        if let Some(v) = &self.gazetteer {
            config.gazetteer = Some(v.clone());
        }
        if let Some(v) = &self.labels {
            config.labels = Some(v.clone());
        }
        if let Some(v) = self.min_n {
            config.repeats.min_n = v;
        }
        if let Some(v) = self.max_n {
            config.repeats.max_n = v;
        }
        if let Some(v) = self.span_paragraphs {
            config.repeats.span_paragraphs = v;
        }
        if let Some(v) = self.count_overlapping {
            config.repeats.count_overlapping = v;
        }
        if let Some(v) = self.include_punct {
            config.repeats.include_punct = v;
        }
        if let Some(v) = self.strict_maximality {
            config.repeats.strict_maximality = v;
        }
        if let Some(v) = self.case_fold {
            config.tokenize.case_fold = v;
        }
        if let Some(v) = self.case_insensitive_match {
            config.entities.case_insensitive = v;
        }
        if let Some(v) = self.fragment_mentions_only {
            config.entities.fragment_mentions_only = v;
        }
        if let Some(v) = self.min_words {
            config.min_words = v;
        }
        if let Some(v) = self.window {
            config.window = v;
        }
        if let Some(v) = self.graph_scope {
            config.graph_scope = match v {
                GraphScopeArg::Repeats => GraphScope::Repeats,
                GraphScopeArg::All => GraphScope::All,
            };
        }
        if !self.selected.is_empty() {
            config.sequences.selected = self.selected.clone();
        }
        if let Some(v) = self.max_gap {
            config.sequences.max_gap = Some(v);
        }
        if let Some(v) = self.multi_policy {
            config.sequences.multi_policy = match v {
                MultiPolicyArg::Break => MultiLabelPolicy::Break,
                MultiPolicyArg::EmitAll => MultiLabelPolicy::EmitAll,
            };
        }
        if let Some(v) = self.max_pattern_len {
            config.sequences.max_pattern_len = v;
        }
        if let Some(v) = self.format {
            config.export.graph_format = match v {
                GraphFormatArg::Dot => GraphFormatChoice::Dot,
                GraphFormatArg::Graphml => GraphFormatChoice::Graphml,
                GraphFormatArg::Json => GraphFormatChoice::Json,
                GraphFormatArg::All => GraphFormatChoice::All,
            };
        }
        if let Some(v) = self.timestamp {
            config.export.timestamp = v;
        }
        Ok(config)
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let config = cli.effective_config()?;
    let report = match cli.command {
        Command::Stats => cmd_stats(&config)?,
        Command::Repeats => cmd_repeats(&config)?,
        Command::Entities => cmd_entities(&config)?,
        Command::Graph => cmd_graph(&config)?,
        Command::Sequences => cmd_sequences(&config)?,
        Command::All => cmd_all(&config)?,
    };
    print!("{}", report_to_text(&report));
    println!("\nartifacts written to {}", config.out_dir().display());
    Ok(())
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let is_help = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            std::process::exit(if is_help { 0 } else { 1 });
        }
    };
    if let Err(err) = run(&cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
