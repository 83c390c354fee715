//! Run configuration: a JSON config file mirroring these field names,
//! overridden by command-line flags (kebab-case of the same names).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use repetext_core::corpus::TokenizeOptions;
use repetext_core::export::{is_hex_color, SvgOptions};
use repetext_core::repeats::RepeatConfig;
use repetext_core::sequences::MultiLabelPolicy;

use crate::CliError;

/// Default palette assigned to selected components in order.
pub const DEFAULT_PALETTE: [&str; 10] = [
    "#00FFFF", "#FFC0CB", "#0000FF", "#FF0000", "#008000", "#FFA500", "#800080", "#A52A2A",
    "#808000", "#008080",
];

pub fn default_min_words() -> usize {
    3
}

fn default_max_pattern_len() -> usize {
    10
}

/// Which paragraphs the association graph is built over.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphScope {
    /// Paragraphs containing a repeated phrase above the word threshold.
    #[default]
    Repeats,
    /// Every paragraph of the corpus.
    All,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphFormatChoice {
    Dot,
    Graphml,
    Json,
    #[default]
    All,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntityOptions {
    /// Match gazetteer aliases case-insensitively.
    #[serde(default)]
    pub case_insensitive: bool,
    /// Build graphs only from mentions inside repeated-phrase occurrences.
    #[serde(default)]
    pub fragment_mentions_only: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceOptions {
    /// Component selectors: display names from the labels file, or entity
    /// canonical names. Empty selects every multi-entity component.
    #[serde(default)]
    pub selected: Vec<String>,
    /// Unlabeled paragraphs tolerated inside one run; absent = unbounded.
    #[serde(default)]
    pub max_gap: Option<usize>,
    #[serde(default)]
    pub multi_policy: MultiLabelPolicy,
    #[serde(default = "default_max_pattern_len")]
    pub max_pattern_len: usize,
}

impl Default for SequenceOptions {
    fn default() -> Self {
        SequenceOptions {
            selected: Vec::new(),
            max_gap: None,
            multi_policy: MultiLabelPolicy::default(),
            max_pattern_len: default_max_pattern_len(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExportSettings {
    #[serde(default)]
    pub graph_format: GraphFormatChoice,
    #[serde(default)]
    pub svg: SvgOptions,
    /// Component display name -> #RRGGBB, overriding the default palette.
    #[serde(default)]
    pub colors: BTreeMap<String, String>,
    /// Record a wall-clock timestamp in the report provenance. Off by
    /// default so identical runs produce identical bytes.
    #[serde(default)]
    pub timestamp: bool,
}

impl Default for ExportSettings {
    fn default() -> Self {
        ExportSettings {
            graph_format: GraphFormatChoice::default(),
            svg: SvgOptions::default(),
            colors: BTreeMap::new(),
            timestamp: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub gazetteer: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub tokenize: TokenizeOptions,
    #[serde(default)]
    pub repeats: RepeatConfig,
    /// Repeats must have strictly more than this many word tokens to mark a
    /// paragraph as repeat-bearing.
    #[serde(default = "default_min_words")]
    pub min_words: usize,
    #[serde(default)]
    pub entities: EntityOptions,
    /// Co-mention window: 0 = same paragraph, 1 = same or next.
    #[serde(default)]
    pub window: u8,
    #[serde(default)]
    pub graph_scope: GraphScope,
    #[serde(default)]
    pub sequences: SequenceOptions,
    #[serde(default)]
    pub export: ExportSettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            input: None,
            gazetteer: None,
            labels: None,
            out: None,
            tokenize: TokenizeOptions::default(),
            repeats: RepeatConfig::default(),
            min_words: default_min_words(),
            entities: EntityOptions::default(),
            window: 0,
            graph_scope: GraphScope::default(),
            sequences: SequenceOptions::default(),
            export: ExportSettings::default(),
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<RunConfig, CliError> {
        let raw = std::fs::read_to_string(path).map_err(|e| {
            CliError::Usage(format!("cannot read config {}: {e}", path.display()))
        })?;
        serde_json::from_str(&raw)
            .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    pub fn input_path(&self) -> Result<&Path, CliError> {
        self.input
            .as_deref()
            .ok_or_else(|| CliError::Usage("no input text given; pass --input PATH".into()))
    }

    pub fn gazetteer_path(&self) -> Result<&Path, CliError> {
        self.gazetteer.as_deref().ok_or_else(|| {
            CliError::Usage(
                "this command locates entity mentions and needs a gazetteer; \
                 pass --gazetteer PATH (a JSON array of {\"canonical\", \"aliases\", \"category\"} objects)"
                    .into(),
            )
        })
    }

    /// Bounds and path-existence checks shared by every command.
    pub fn validate(&self, needs_gazetteer: bool) -> Result<(), CliError> {
        let input = self.input_path()?;
        if !input.exists() {
            return Err(CliError::Usage(format!(
                "input {} does not exist",
                input.display()
            )));
        }
        if needs_gazetteer {
            let path = self.gazetteer_path()?;
            if !path.exists() {
                return Err(CliError::Usage(format!(
                    "gazetteer {} does not exist",
                    path.display()
                )));
            }
        }
        if let Some(labels) = &self.labels {
            if !labels.exists() {
                return Err(CliError::Usage(format!(
                    "labels file {} does not exist",
                    labels.display()
                )));
            }
        }
        self.repeats
            .validate()
            .map_err(|e| CliError::Usage(e.to_string()))?;
        if self.window > 1 {
            return Err(CliError::Usage(format!(
                "window must be 0 or 1, got {}",
                self.window
            )));
        }
        if self.sequences.max_pattern_len < 2 {
            return Err(CliError::Usage(format!(
                "max_pattern_len must be at least 2, got {}",
                self.sequences.max_pattern_len
            )));
        }
        self.export
            .svg
            .validate()
            .map_err(|e| CliError::Usage(e.to_string()))?;
        for (name, color) in &self.export.colors {
            if !is_hex_color(color) {
                return Err(CliError::Usage(format!(
                    "color for {name:?} must be #RRGGBB, got {color:?}"
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_sane() {
        let config = RunConfig::default();
        assert_eq!(config.min_words, 3);
        assert_eq!(config.window, 0);
        assert_eq!(config.sequences.max_pattern_len, 10);
        assert!(!config.export.timestamp);
    }

    #[test]
    fn partial_json_fills_defaults() {
        let config: RunConfig =
            serde_json::from_str(r#"{"input": "x.txt", "repeats": {"max_n": 16}}"#).unwrap();
        assert_eq!(config.repeats.max_n, 16);
        assert_eq!(config.repeats.min_n, 2);
        assert!(config.repeats.count_overlapping);
        assert_eq!(config.min_words, 3);
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"inptu": "x.txt"}"#).is_err());
    }

    #[test]
    fn validation_requires_existing_input() {
        let mut config = RunConfig {
            input: Some(PathBuf::from("/definitely/not/here.txt")),
            ..RunConfig::default()
        };
        assert!(matches!(config.validate(false), Err(CliError::Usage(_))));
        config.input = None;
        assert!(matches!(config.validate(false), Err(CliError::Usage(_))));
    }

    #[test]
    fn validation_rejects_bad_bounds() {
        let dir = std::env::temp_dir();
        let input = dir.join("repetext-config-test-input.txt");
        std::fs::write(&input, "hello world").unwrap();
        let mut config = RunConfig {
            input: Some(input.clone()),
            ..RunConfig::default()
        };
        assert!(config.validate(false).is_ok());
        config.window = 2;
        assert!(config.validate(false).is_err());
        config.window = 0;
        config.repeats.max_n = 1;
        assert!(config.validate(false).is_err());
        config.repeats.max_n = 32;
        config.sequences.max_pattern_len = 1;
        assert!(config.validate(false).is_err());
        config.sequences.max_pattern_len = 2;
        config
            .export
            .colors
            .insert("Harbor".into(), "cornflower".into());
        assert!(config.validate(false).is_err());
        std::fs::remove_file(&input).ok();
    }
}
