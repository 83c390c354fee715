//! Paragraph labeling by network component, run compression, and alternating
//! sequence pattern counting.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::entities::Mention;
use crate::networks::ComponentPartition;

#[derive(Debug, Error)]
pub enum SequenceError {
    #[error("component {0} is not in the partition")]
    UnknownComponent(usize),
    #[error("component {0} is not in the labeling universe")]
    UnlabeledComponent(usize),
    #[error("at least one component must be selected")]
    EmptySelection,
    #[error("pattern length must be at least 2, got {0}")]
    InvalidPatternLength(usize),
    #[error("color map has no color for component {0}")]
    MissingColor(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentName {
    pub id: usize,
    pub name: String,
}

/// Which selected components each paragraph references. Paragraphs with an
/// empty label set are simply absent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkLabeling {
    pub labels: BTreeMap<usize, BTreeSet<usize>>,
    pub component_universe: Vec<ComponentName>,
    pub paragraph_count: usize,
}

impl NetworkLabeling {
    pub fn name_of(&self, component: usize) -> &str {
        self.component_universe
            .iter()
            .find(|c| c.id == component)
            .map(|c| c.name.as_str())
            .unwrap_or("?")
    }

    pub fn set_name(&mut self, component: usize, name: impl Into<String>) {
        if let Some(entry) = self
            .component_universe
            .iter_mut()
            .find(|c| c.id == component)
        {
            entry.name = name.into();
        }
    }

    fn universe_ids(&self) -> BTreeSet<usize> {
        self.component_universe.iter().map(|c| c.id).collect()
    }
}

/// Label paragraph p with component c iff some mention in p belongs to an
/// entity of c. Component display names default to the component index.
pub fn label_paragraphs(
    mentions: &[Mention],
    partition: &ComponentPartition,
    selected: &BTreeSet<usize>,
    paragraph_count: usize,
) -> Result<NetworkLabeling, SequenceError> {
    if selected.is_empty() {
        return Err(SequenceError::EmptySelection);
    }
    for &c in selected {
        if c >= partition.components.len() {
            return Err(SequenceError::UnknownComponent(c));
        }
    }

    let mut labels: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for m in mentions {
        if let Some(c) = partition.component_of(m.entity_id) {
            if selected.contains(&c) {
                labels.entry(m.paragraph_idx).or_default().insert(c);
            }
        }
    }

    Ok(NetworkLabeling {
        labels,
        component_universe: selected
            .iter()
            .map(|&id| ComponentName {
                id,
                name: id.to_string(),
            })
            .collect(),
        paragraph_count,
    })
}

/// Handling of paragraphs labeled with more than one selected component.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MultiLabelPolicy {
    /// The paragraph ends the current run and starts none.
    #[default]
    Break,
    /// The paragraph acts as if it referenced each labeled component in
    /// ascending order, each extending or starting a run.
    EmitAll,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Run {
    pub component: usize,
    pub start_paragraph: usize,
    pub end_paragraph: usize,
    /// Number of contributing paragraphs, not the span width.
    pub length: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunSequence {
    pub runs: Vec<Run>,
    pub selected: Vec<usize>,
}

/// Project the labeling onto `selected` and compress consecutive references
/// into runs. Unlabeled paragraphs between equal-component references do not
/// break a run unless the count of intervening paragraphs exceeds `max_gap`.
pub fn compress_runs(
    labeling: &NetworkLabeling,
    selected: &BTreeSet<usize>,
    max_gap: Option<usize>,
    policy: MultiLabelPolicy,
) -> Result<RunSequence, SequenceError> {
    if selected.is_empty() {
        return Err(SequenceError::EmptySelection);
    }
    let universe = labeling.universe_ids();
    for &c in selected {
        if !universe.contains(&c) {
            return Err(SequenceError::UnlabeledComponent(c));
        }
    }

    let mut runs: Vec<Run> = Vec::new();
    let mut current: Option<Run> = None;
    let gap_ok = |last_end: usize, next: usize| match max_gap {
        None => true,
        Some(g) => next - last_end - 1 <= g,
    };
    let extend = |current: &mut Option<Run>, runs: &mut Vec<Run>, c: usize, p: usize| {
        match current {
            Some(run) if run.component == c && gap_ok(run.end_paragraph, p) => {
                run.end_paragraph = p;
                run.length += 1;
            }
            _ => {
                if let Some(done) = current.take() {
                    runs.push(done);
                }
                *current = Some(Run {
                    component: c,
                    start_paragraph: p,
                    end_paragraph: p,
                    length: 1,
                });
            }
        }
    };

    for (&p, label_set) in &labeling.labels {
        let projected: Vec<usize> = label_set
            .iter()
            .copied()
            .filter(|c| selected.contains(c))
            .collect();
        match (projected.len(), policy) {
            (0, _) => {}
            (1, _) => extend(&mut current, &mut runs, projected[0], p),
            (_, MultiLabelPolicy::Break) => {
                if let Some(done) = current.take() {
                    runs.push(done);
                }
            }
            (_, MultiLabelPolicy::EmitAll) => {
                for c in projected {
                    extend(&mut current, &mut runs, c, p);
                }
            }
        }
    }
    if let Some(done) = current.take() {
        runs.push(done);
    }

    Ok(RunSequence {
        runs,
        selected: selected.iter().copied().collect(),
    })
}

/// Counts of overlapping length-L windows over the run stream, for every
/// pattern of length 2..=max_len that actually occurs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PatternCounts {
    counts: BTreeMap<Vec<usize>, u64>,
}

impl PatternCounts {
    pub fn from_counts(counts: BTreeMap<Vec<usize>, u64>) -> PatternCounts {
        PatternCounts { counts }
    }

    pub fn get(&self, pattern: &[usize]) -> u64 {
        self.counts.get(pattern).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[usize], u64)> {
        self.counts.iter().map(|(p, &c)| (p.as_slice(), c))
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Every extension of a pattern by one component (on either side) can
    /// occur at most as often as the pattern itself.
    pub fn is_prefix_monotone(&self) -> bool {
        self.counts.iter().all(|(pattern, &count)| {
            if pattern.len() <= 2 {
                return true;
            }
            count <= self.get(&pattern[..pattern.len() - 1]) && count <= self.get(&pattern[1..])
        })
    }
}

pub fn count_patterns(
    run_seq: &RunSequence,
    max_len: usize,
) -> Result<PatternCounts, SequenceError> {
    if max_len < 2 {
        return Err(SequenceError::InvalidPatternLength(max_len));
    }
    let ids: Vec<usize> = run_seq.runs.iter().map(|r| r.component).collect();
    let mut counts: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
    for len in 2..=max_len {
        if ids.len() < len {
            break;
        }
        for window in ids.windows(len) {
            *counts.entry(window.to_vec()).or_insert(0) += 1;
        }
    }
    Ok(PatternCounts { counts })
}

/// One paragraph cell of the band strip: the colors to draw, top to bottom.
/// No colors means the paragraph is unlabeled (rendered white).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BandCell {
    pub paragraph_idx: usize,
    pub colors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LegendEntry {
    pub component: usize,
    pub name: String,
    pub color: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BandSpec {
    pub cells: Vec<BandCell>,
    pub legend: Vec<LegendEntry>,
}

/// Build the one-cell-per-paragraph strip description consumed by the SVG
/// renderer. Multi-label paragraphs stack one sub-cell per component in
/// `component_order`.
pub fn band_data(
    labeling: &NetworkLabeling,
    component_order: &[usize],
    color_map: &BTreeMap<usize, String>,
) -> Result<BandSpec, SequenceError> {
    let universe = labeling.universe_ids();
    for &c in component_order {
        if !universe.contains(&c) {
            return Err(SequenceError::UnlabeledComponent(c));
        }
        if !color_map.contains_key(&c) {
            return Err(SequenceError::MissingColor(c));
        }
    }

    let empty = BTreeSet::new();
    let cells = (0..labeling.paragraph_count)
        .map(|p| {
            let labels = labeling.labels.get(&p).unwrap_or(&empty);
            let colors = component_order
                .iter()
                .filter(|c| labels.contains(c))
                .map(|c| color_map[c].clone())
                .collect();
            BandCell {
                paragraph_idx: p,
                colors,
            }
        })
        .collect();
    let legend = component_order
        .iter()
        .map(|&c| LegendEntry {
            component: c,
            name: labeling.name_of(c).to_string(),
            color: color_map[&c].clone(),
        })
        .collect();
    Ok(BandSpec { cells, legend })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entities::EntityId;
    use crate::networks::{build_graph, connected_components, CoMentionWindow};

    fn mention(entity: u32, paragraph: usize) -> Mention {
        Mention {
            entity_id: EntityId(entity),
            paragraph_idx: paragraph,
            token_span: (0, 1),
        }
    }

    /// Partition with two components: {0,1} and {2}; entity 0/1 mark
    /// component A, entity 2 marks component B.
    fn two_component_partition() -> ComponentPartition {
        let mentions = [mention(0, 0), mention(1, 0), mention(2, 1)];
        let set = BTreeSet::from([0usize, 1]);
        let g = build_graph(&mentions, &set, CoMentionWindow::SameParagraph, "test");
        connected_components(&g)
    }

    fn labeling_of(paragraph_components: &[(usize, &[u32])]) -> NetworkLabeling {
        let partition = two_component_partition();
        let mentions: Vec<Mention> = paragraph_components
            .iter()
            .flat_map(|&(p, entities)| entities.iter().map(move |&e| mention(e, p)))
            .collect();
        let max_p = paragraph_components.iter().map(|&(p, _)| p).max().unwrap_or(0);
        label_paragraphs(&mentions, &partition, &BTreeSet::from([0, 1]), max_p + 1).unwrap()
    }

    fn run_components(seq: &RunSequence) -> Vec<usize> {
        seq.runs.iter().map(|r| r.component).collect()
    }

    #[test]
    fn labels_follow_component_membership() {
        let labeling = labeling_of(&[(0, &[0]), (1, &[2]), (2, &[0, 2]), (4, &[])]);
        assert_eq!(labeling.labels[&0], BTreeSet::from([0]));
        assert_eq!(labeling.labels[&1], BTreeSet::from([1]));
        assert_eq!(labeling.labels[&2], BTreeSet::from([0, 1]));
        assert!(!labeling.labels.contains_key(&3));
        assert_eq!(labeling.paragraph_count, 5);
    }

    #[test]
    fn unknown_selected_component_is_an_error() {
        let partition = two_component_partition();
        let err =
            label_paragraphs(&[], &partition, &BTreeSet::from([7]), 3).unwrap_err();
        assert!(matches!(err, SequenceError::UnknownComponent(7)));
    }

    #[test]
    fn runs_compress_adjacent_equal_labels() {
        // Component stream 2,2,3,2 from the worked example, with our two
        // components 0 and 1 standing in for 2 and 3.
        let labeling = labeling_of(&[(0, &[0]), (1, &[0]), (2, &[2]), (3, &[0])]);
        let seq =
            compress_runs(&labeling, &BTreeSet::from([0, 1]), None, MultiLabelPolicy::Break)
                .unwrap();
        assert_eq!(run_components(&seq), [0, 1, 0]);
        assert_eq!(
            seq.runs.iter().map(|r| r.length).collect::<Vec<_>>(),
            [2, 1, 1]
        );
    }

    #[test]
    fn multi_label_breaks_runs_by_default() {
        let labeling = labeling_of(&[(0, &[0]), (1, &[0, 2]), (2, &[0])]);
        let seq =
            compress_runs(&labeling, &BTreeSet::from([0, 1]), None, MultiLabelPolicy::Break)
                .unwrap();
        assert_eq!(run_components(&seq), [0, 0]);
        assert_eq!(
            seq.runs.iter().map(|r| r.length).collect::<Vec<_>>(),
            [1, 1]
        );
    }

    #[test]
    fn emit_all_expands_multi_labels_in_order() {
        let labeling = labeling_of(&[(0, &[0]), (1, &[0, 2]), (2, &[0])]);
        let seq = compress_runs(
            &labeling,
            &BTreeSet::from([0, 1]),
            None,
            MultiLabelPolicy::EmitAll,
        )
        .unwrap();
        // Stream 0,(0,1),0 expands to 0,0,1,0.
        assert_eq!(run_components(&seq), [0, 1, 0]);
        assert_eq!(
            seq.runs.iter().map(|r| r.length).collect::<Vec<_>>(),
            [2, 1, 1]
        );
    }

    #[test]
    fn single_label_is_a_single_run() {
        let labeling = labeling_of(&[(3, &[0])]);
        let seq =
            compress_runs(&labeling, &BTreeSet::from([0]), None, MultiLabelPolicy::Break)
                .unwrap();
        assert_eq!(seq.runs.len(), 1);
        assert_eq!(seq.runs[0].start_paragraph, 3);
        assert_eq!(seq.runs[0].length, 1);
    }

    #[test]
    fn unlabeled_gaps_merge_unless_max_gap_exceeded() {
        let labeling = labeling_of(&[(0, &[0]), (5, &[0])]);
        let unbounded =
            compress_runs(&labeling, &BTreeSet::from([0]), None, MultiLabelPolicy::Break)
                .unwrap();
        assert_eq!(unbounded.runs.len(), 1);
        assert_eq!(unbounded.runs[0].end_paragraph, 5);
        assert_eq!(unbounded.runs[0].length, 2);

        let bounded = compress_runs(
            &labeling,
            &BTreeSet::from([0]),
            Some(3),
            MultiLabelPolicy::Break,
        )
        .unwrap();
        assert_eq!(bounded.runs.len(), 2);

        let exactly = compress_runs(
            &labeling,
            &BTreeSet::from([0]),
            Some(4),
            MultiLabelPolicy::Break,
        )
        .unwrap();
        assert_eq!(exactly.runs.len(), 1);
    }

    #[test]
    fn projection_ignores_unselected_components() {
        let labeling = labeling_of(&[(0, &[0]), (1, &[2]), (2, &[0])]);
        let seq =
            compress_runs(&labeling, &BTreeSet::from([0]), None, MultiLabelPolicy::Break)
                .unwrap();
        // Paragraph 1 references only the unselected component: invisible.
        assert_eq!(run_components(&seq), [0]);
        assert_eq!(seq.runs[0].length, 2);
    }

    #[test]
    fn pattern_counts_over_windows() {
        let labeling = labeling_of(&[(0, &[0]), (1, &[2]), (2, &[0])]);
        let seq =
            compress_runs(&labeling, &BTreeSet::from([0, 1]), None, MultiLabelPolicy::Break)
                .unwrap();
        assert_eq!(run_components(&seq), [0, 1, 0]);
        let counts = count_patterns(&seq, 10).unwrap();
        assert_eq!(counts.get(&[0, 1]), 1);
        assert_eq!(counts.get(&[1, 0]), 1);
        assert_eq!(counts.get(&[0, 1, 0]), 1);
        assert_eq!(counts.get(&[1, 0, 1]), 0);
        assert!(counts.is_prefix_monotone());
    }

    #[test]
    fn single_run_has_no_patterns() {
        let labeling = labeling_of(&[(0, &[0])]);
        let seq =
            compress_runs(&labeling, &BTreeSet::from([0]), None, MultiLabelPolicy::Break)
                .unwrap();
        let counts = count_patterns(&seq, 5).unwrap();
        assert!(counts.is_empty());
    }

    #[test]
    fn pattern_length_below_two_rejected() {
        let labeling = labeling_of(&[(0, &[0])]);
        let seq =
            compress_runs(&labeling, &BTreeSet::from([0]), None, MultiLabelPolicy::Break)
                .unwrap();
        assert!(matches!(
            count_patterns(&seq, 1),
            Err(SequenceError::InvalidPatternLength(1))
        ));
    }

    #[test]
    fn band_cells_cover_every_paragraph() {
        let labeling = labeling_of(&[(2, &[0]), (4, &[0, 2])]);
        let colors = BTreeMap::from([
            (0usize, "#FFC0CB".to_string()),
            (1usize, "#0000FF".to_string()),
        ]);
        let spec = band_data(&labeling, &[0, 1], &colors).unwrap();
        assert_eq!(spec.cells.len(), 5);
        assert!(spec.cells[0].colors.is_empty());
        assert_eq!(spec.cells[2].colors, ["#FFC0CB"]);
        assert_eq!(spec.cells[4].colors, ["#FFC0CB", "#0000FF"]);
        assert_eq!(spec.legend.len(), 2);
    }

    #[test]
    fn band_requires_colors_for_every_component() {
        let labeling = labeling_of(&[(0, &[0])]);
        let colors = BTreeMap::from([(0usize, "#FFC0CB".to_string())]);
        let err = band_data(&labeling, &[0, 1], &colors).unwrap_err();
        assert!(matches!(err, SequenceError::MissingColor(1)));
    }

    #[test]
    fn display_names_apply() {
        let mut labeling = labeling_of(&[(0, &[0])]);
        assert_eq!(labeling.name_of(0), "0");
        labeling.set_name(0, "Harbor");
        assert_eq!(labeling.name_of(0), "Harbor");
    }
}
