//! Factor-based error analysis over gold/predicted treebank pairs.
//!
//! Every report tallies exact counts per bin and per system; percentages
//! are produced only at rendering time. "Correct" always follows the
//! labeled scheme: an arc counts only when head and label both match.
//! Precision cells bin arcs by the factor value in the PREDICTED graph,
//! recall cells by the value in the GOLD graph — the two sides are never
//! mixed. Every token takes part in the tallies; punctuation is not
//! filtered here.
//!
//! Reports render as aligned text tables and as JSON records; empty
//! cells (no arcs to measure) render as `N/A` rather than zero.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::eval::{round2, AlignError};
use crate::factors::{arc_degree, dependency_length, root_distance, sibling_count};
use crate::treebank::{DependencyGraph, Treebank};

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error("system `{system}`: {cause}")]
    Alignment { system: String, cause: AlignError },
    #[error("{side} graph of sentence {index} is not a valid dependency tree")]
    InvalidGraph { side: &'static str, index: usize },
    #[error("factor value {value} falls below the lowest bin")]
    BelowBins { value: usize },
    #[error("bin starts must be non-empty and strictly ascending")]
    BadBins,
    #[error("at least one system output is required")]
    NoSystems,
}

/// Integer bins given by their start values; the last bin is open-ended.
/// Starts `[1, 11, 21]` produce bins `1-10`, `11-20`, `>=21`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinSpec {
    starts: Vec<usize>,
    labels: Vec<String>,
}

impl BinSpec {
    pub fn from_starts(starts: &[usize]) -> Result<BinSpec, AnalysisError> {
        if starts.is_empty() || starts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(AnalysisError::BadBins);
        }
        let labels = starts
            .iter()
            .enumerate()
            .map(|(i, &a)| match starts.get(i + 1) {
                Some(&b) if b == a + 1 => a.to_string(),
                Some(&b) => format!("{a}-{}", b - 1),
                None => format!(">={a}"),
            })
            .collect();
        Ok(BinSpec {
            starts: starts.to_vec(),
            labels,
        })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Bin index holding `value`; values below the first start have none.
    pub fn index_of(&self, value: usize) -> Option<usize> {
        if value < self.starts[0] {
            return None;
        }
        Some(self.starts.partition_point(|&s| s <= value) - 1)
    }
}

fn default_sentence_length_bins() -> Vec<usize> {
    vec![1, 11, 21, 31, 41, 51]
}
fn default_dependency_length_bins() -> Vec<usize> {
    (1..=16).collect()
}
fn default_root_distance_bins() -> Vec<usize> {
    (1..=7).collect()
}
fn default_sibling_count_bins() -> Vec<usize> {
    (0..=10).collect()
}
fn default_degree_bins() -> Vec<usize> {
    vec![0, 1, 2, 3]
}

/// Bin starts for every binned report; each factor's last bin is open.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinConfig {
    #[serde(default = "default_sentence_length_bins")]
    pub sentence_length: Vec<usize>,
    #[serde(default = "default_dependency_length_bins")]
    pub dependency_length: Vec<usize>,
    #[serde(default = "default_root_distance_bins")]
    pub root_distance: Vec<usize>,
    #[serde(default = "default_sibling_count_bins")]
    pub sibling_count: Vec<usize>,
    #[serde(default = "default_degree_bins")]
    pub degree: Vec<usize>,
}

impl Default for BinConfig {
    fn default() -> Self {
        BinConfig {
            sentence_length: default_sentence_length_bins(),
            dependency_length: default_dependency_length_bins(),
            root_distance: default_root_distance_bins(),
            sibling_count: default_sibling_count_bins(),
            degree: default_degree_bins(),
        }
    }
}

/// The four per-arc structural factors measured with precision/recall.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcFactorKind {
    DependencyLength,
    RootDistance,
    SiblingCount,
    Degree,
}

impl ArcFactorKind {
    pub const ALL: [ArcFactorKind; 4] = [
        ArcFactorKind::DependencyLength,
        ArcFactorKind::RootDistance,
        ArcFactorKind::SiblingCount,
        ArcFactorKind::Degree,
    ];

    pub fn slug(self) -> &'static str {
        match self {
            ArcFactorKind::DependencyLength => "dependency_length",
            ArcFactorKind::RootDistance => "root_distance",
            ArcFactorKind::SiblingCount => "sibling_count",
            ArcFactorKind::Degree => "degree",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            ArcFactorKind::DependencyLength => "Precision/recall by dependency length",
            ArcFactorKind::RootDistance => "Precision/recall by distance to root",
            ArcFactorKind::SiblingCount => "Precision/recall by number of siblings",
            ArcFactorKind::Degree => "Precision/recall by arc degree",
        }
    }

    fn bin_starts(self, config: &BinConfig) -> &[usize] {
        match self {
            ArcFactorKind::DependencyLength => &config.dependency_length,
            ArcFactorKind::RootDistance => &config.root_distance,
            ArcFactorKind::SiblingCount => &config.sibling_count,
            ArcFactorKind::Degree => &config.degree,
        }
    }

    fn value(self, graph: &DependencyGraph, dep: usize) -> usize {
        match self {
            ArcFactorKind::DependencyLength => dependency_length(graph, dep),
            ArcFactorKind::RootDistance => root_distance(graph, dep),
            ArcFactorKind::SiblingCount => sibling_count(graph, dep),
            ArcFactorKind::Degree => arc_degree(graph, dep),
        }
    }
}

/// One parser's output over the whole treebank, in sentence order.
#[derive(Debug, Clone)]
pub struct SystemOutput {
    pub name: String,
    pub parses: Vec<DependencyGraph>,
}

impl SystemOutput {
    pub fn new(name: impl Into<String>, parses: Vec<DependencyGraph>) -> SystemOutput {
        SystemOutput {
            name: name.into(),
            parses,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    Accuracy,
    PrecisionRecall,
}

/// Per-system tallies inside one row.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SystemCell {
    /// Gold items in the row that this system got fully right
    /// (accuracy and recall numerator).
    pub correct: usize,
    /// Predicted arcs falling in the row (precision denominator).
    pub pred_support: usize,
    /// Of those, fully correct ones (precision numerator).
    pub pred_correct: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub bin: String,
    /// Items carried by the row for the mass column (sentences, tokens,
    /// or gold arcs depending on the report).
    pub mass_count: usize,
    /// Denominator for accuracy and recall.
    pub gold_support: usize,
    /// Average gold dependency length, on reports that carry it.
    pub dla: Option<f64>,
    pub cells: Vec<SystemCell>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactorReport {
    pub title: String,
    pub factor: String,
    pub kind: MetricKind,
    pub systems: Vec<String>,
    /// Denominator of the mass column.
    pub mass_total: usize,
    pub rows: Vec<ReportRow>,
}

fn ratio(hits: usize, total: usize) -> Option<f64> {
    (total > 0).then(|| 100.0 * hits as f64 / total as f64)
}

impl FactorReport {
    fn new(
        title: impl Into<String>,
        factor: impl Into<String>,
        kind: MetricKind,
        systems: &[SystemOutput],
        mass_total: usize,
        bins: impl IntoIterator<Item = String>,
    ) -> FactorReport {
        let rows = bins
            .into_iter()
            .map(|bin| ReportRow {
                bin,
                mass_count: 0,
                gold_support: 0,
                dla: None,
                cells: vec![SystemCell::default(); systems.len()],
            })
            .collect();
        FactorReport {
            title: title.into(),
            factor: factor.into(),
            kind,
            systems: systems.iter().map(|s| s.name.clone()).collect(),
            mass_total,
            rows,
        }
    }

    pub fn row(&self, bin: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.bin == bin)
    }

    pub fn mass_percent(&self, row: &ReportRow) -> f64 {
        if self.mass_total == 0 {
            0.0
        } else {
            100.0 * row.mass_count as f64 / self.mass_total as f64
        }
    }

    pub fn accuracy(&self, row: &ReportRow, system: usize) -> Option<f64> {
        (self.kind == MetricKind::Accuracy)
            .then(|| ratio(row.cells[system].correct, row.gold_support))
            .flatten()
    }

    pub fn precision(&self, row: &ReportRow, system: usize) -> Option<f64> {
        (self.kind == MetricKind::PrecisionRecall)
            .then(|| ratio(row.cells[system].pred_correct, row.cells[system].pred_support))
            .flatten()
    }

    pub fn recall(&self, row: &ReportRow, system: usize) -> Option<f64> {
        (self.kind == MetricKind::PrecisionRecall)
            .then(|| ratio(row.cells[system].correct, row.gold_support))
            .flatten()
    }

    fn two_way(&self) -> bool {
        self.systems.len() == 2
    }

    pub fn delta_accuracy(&self, row: &ReportRow) -> Option<f64> {
        self.two_way()
            .then(|| delta(self.accuracy(row, 0), self.accuracy(row, 1)))
            .flatten()
    }

    pub fn delta_precision(&self, row: &ReportRow) -> Option<f64> {
        self.two_way()
            .then(|| delta(self.precision(row, 0), self.precision(row, 1)))
            .flatten()
    }

    pub fn delta_recall(&self, row: &ReportRow) -> Option<f64> {
        self.two_way()
            .then(|| delta(self.recall(row, 0), self.recall(row, 1)))
            .flatten()
    }

    /// Aligned-column text table.
    pub fn to_text(&self) -> String {
        let mut header = vec!["bin".to_string(), "%".to_string()];
        let has_dla = self.rows.iter().any(|r| r.dla.is_some());
        if has_dla {
            header.push("DLA".to_string());
        }
        match self.kind {
            MetricKind::Accuracy => {
                for s in &self.systems {
                    header.push(s.clone());
                }
                if self.two_way() {
                    header.push("delta".to_string());
                }
            }
            MetricKind::PrecisionRecall => {
                for s in &self.systems {
                    header.push(format!("{s} P"));
                    header.push(format!("{s} R"));
                }
                if self.two_way() {
                    header.push("delta P".to_string());
                    header.push("delta R".to_string());
                }
            }
        }
        let mut lines = vec![header];
        for row in &self.rows {
            let mut cols = vec![row.bin.clone(), fmt2(Some(self.mass_percent(row)))];
            if has_dla {
                cols.push(fmt2(row.dla));
            }
            match self.kind {
                MetricKind::Accuracy => {
                    for s in 0..self.systems.len() {
                        cols.push(fmt2(self.accuracy(row, s)));
                    }
                    if self.two_way() {
                        cols.push(fmt2(self.delta_accuracy(row)));
                    }
                }
                MetricKind::PrecisionRecall => {
                    for s in 0..self.systems.len() {
                        cols.push(fmt2(self.precision(row, s)));
                        cols.push(fmt2(self.recall(row, s)));
                    }
                    if self.two_way() {
                        cols.push(fmt2(self.delta_precision(row)));
                        cols.push(fmt2(self.delta_recall(row)));
                    }
                }
            }
            lines.push(cols);
        }
        format!("== {} ==\n{}", self.title, render_table(&lines))
    }

    /// One JSON object per row, values pre-rounded to two decimals.
    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut cells = serde_json::Map::new();
                for (s, name) in self.systems.iter().enumerate() {
                    let cell = match self.kind {
                        MetricKind::Accuracy => json!({
                            "accuracy": self.accuracy(row, s).map(round2),
                        }),
                        MetricKind::PrecisionRecall => json!({
                            "precision": self.precision(row, s).map(round2),
                            "recall": self.recall(row, s).map(round2),
                            "pred_support": row.cells[s].pred_support,
                        }),
                    };
                    cells.insert(name.clone(), cell);
                }
                let mut obj = serde_json::Map::new();
                obj.insert("bin".into(), json!(row.bin));
                obj.insert("mass".into(), json!(round2(self.mass_percent(row))));
                obj.insert("gold_support".into(), json!(row.gold_support));
                if let Some(dla) = row.dla {
                    obj.insert("dla".into(), json!(round2(dla)));
                }
                obj.insert("systems".into(), Value::Object(cells));
                if self.two_way() {
                    match self.kind {
                        MetricKind::Accuracy => {
                            obj.insert("delta".into(), json!(self.delta_accuracy(row).map(round2)));
                        }
                        MetricKind::PrecisionRecall => {
                            obj.insert(
                                "delta_precision".into(),
                                json!(self.delta_precision(row).map(round2)),
                            );
                            obj.insert(
                                "delta_recall".into(),
                                json!(self.delta_recall(row).map(round2)),
                            );
                        }
                    }
                }
                Value::Object(obj)
            })
            .collect();
        json!({
            "title": self.title,
            "factor": self.factor,
            "kind": match self.kind {
                MetricKind::Accuracy => "accuracy",
                MetricKind::PrecisionRecall => "precision_recall",
            },
            "systems": self.systems,
            "rows": rows,
        })
    }
}

fn delta(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(round2(round2(x) - round2(y))),
        _ => None,
    }
}

fn fmt2(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{:.2}", round2(x)),
        None => "N/A".to_string(),
    }
}

fn render_table(lines: &[Vec<String>]) -> String {
    let cols = lines.iter().map(Vec::len).max().unwrap_or(0);
    let mut widths = vec![0usize; cols];
    for line in lines {
        for (i, cell) in line.iter().enumerate() {
            widths[i] = widths[i].max(cell.chars().count());
        }
    }
    let mut out = String::new();
    for line in lines {
        let mut rendered = String::new();
        for (i, cell) in line.iter().enumerate() {
            if i > 0 {
                rendered.push_str("  ");
            }
            let pad = widths[i] - cell.chars().count();
            if i == 0 {
                rendered.push_str(cell);
                rendered.push_str(&" ".repeat(pad));
            } else {
                rendered.push_str(&" ".repeat(pad));
                rendered.push_str(cell);
            }
        }
        out.push_str(rendered.trim_end());
        out.push('\n');
    }
    out
}

fn check_alignment(gold: &Treebank, systems: &[SystemOutput]) -> Result<(), AnalysisError> {
    if systems.is_empty() {
        return Err(AnalysisError::NoSystems);
    }
    for system in systems {
        if system.parses.len() != gold.len() {
            return Err(AnalysisError::Alignment {
                system: system.name.clone(),
                cause: AlignError::SentenceCount {
                    gold: gold.len(),
                    pred: system.parses.len(),
                },
            });
        }
        for (i, (sentence, parse)) in gold.sentences.iter().zip(&system.parses).enumerate() {
            if parse.n() != sentence.len() {
                return Err(AnalysisError::Alignment {
                    system: system.name.clone(),
                    cause: AlignError::SentenceLength {
                        index: i + 1,
                        gold: sentence.len(),
                        pred: parse.n(),
                    },
                });
            }
        }
    }
    Ok(())
}

fn labeled_match(gold: &DependencyGraph, pred: &DependencyGraph, dep: usize) -> bool {
    gold.head_of(dep) == pred.head_of(dep) && gold.label_of(dep) == pred.label_of(dep)
}

/// Labeled accuracy per sentence-length bin; mass is the share of
/// sentences, accuracy is pooled over the tokens of those sentences.
pub fn accuracy_by_sentence_length(
    gold: &Treebank,
    systems: &[SystemOutput],
    bins: &BinConfig,
) -> Result<FactorReport, AnalysisError> {
    check_alignment(gold, systems)?;
    let spec = BinSpec::from_starts(&bins.sentence_length)?;
    let mut report = FactorReport::new(
        "Accuracy by sentence length",
        "sentence_length",
        MetricKind::Accuracy,
        systems,
        gold.len(),
        spec.labels().to_vec(),
    );
    for (i, sentence) in gold.sentences.iter().enumerate() {
        let value = sentence.len();
        let bin = spec
            .index_of(value)
            .ok_or(AnalysisError::BelowBins { value })?;
        let gold_graph = sentence.graph();
        let row = &mut report.rows[bin];
        row.mass_count += 1;
        row.gold_support += sentence.len();
        for (s, system) in systems.iter().enumerate() {
            row.cells[s].correct += (1..=sentence.len())
                .filter(|&d| labeled_match(&gold_graph, &system.parses[i], d))
                .count();
        }
    }
    Ok(report)
}

/// Precision/recall per bin of one structural arc factor. Both the gold
/// and every predicted graph must be valid trees, since the factors walk
/// head chains and spans.
pub fn precision_recall_by_arc_factor(
    gold: &Treebank,
    systems: &[SystemOutput],
    factor: ArcFactorKind,
    bins: &BinConfig,
) -> Result<FactorReport, AnalysisError> {
    check_alignment(gold, systems)?;
    let spec = BinSpec::from_starts(factor.bin_starts(bins))?;
    let total_arcs: usize = gold.sentences.iter().map(|s| s.len()).sum();
    let mut report = FactorReport::new(
        factor.title(),
        factor.slug(),
        MetricKind::PrecisionRecall,
        systems,
        total_arcs,
        spec.labels().to_vec(),
    );
    for (i, sentence) in gold.sentences.iter().enumerate() {
        let gold_graph = sentence.graph();
        if !gold_graph.validate(false).is_valid() {
            return Err(AnalysisError::InvalidGraph {
                side: "gold",
                index: i + 1,
            });
        }
        for (s, system) in systems.iter().enumerate() {
            if !system.parses[i].validate(false).is_valid() {
                return Err(AnalysisError::InvalidGraph {
                    side: "predicted",
                    index: i + 1,
                });
            }
            let pred = &system.parses[i];
            for d in 1..=sentence.len() {
                let correct = labeled_match(&gold_graph, pred, d);
                let pv = factor.value(pred, d);
                let pbin = spec.index_of(pv).ok_or(AnalysisError::BelowBins { value: pv })?;
                report.rows[pbin].cells[s].pred_support += 1;
                report.rows[pbin].cells[s].pred_correct += usize::from(correct);
                let gv = factor.value(&gold_graph, d);
                let gbin = spec.index_of(gv).ok_or(AnalysisError::BelowBins { value: gv })?;
                report.rows[gbin].cells[s].correct += usize::from(correct);
            }
        }
        for d in 1..=sentence.len() {
            let gv = factor.value(&gold_graph, d);
            let gbin = spec.index_of(gv).ok_or(AnalysisError::BelowBins { value: gv })?;
            report.rows[gbin].mass_count += 1;
            report.rows[gbin].gold_support += 1;
        }
    }
    Ok(report)
}

fn sort_categorical(report: &mut FactorReport) {
    report
        .rows
        .sort_by(|a, b| b.mass_count.cmp(&a.mass_count).then(a.bin.cmp(&b.bin)));
}

/// Labeled accuracy per gold coarse POS of the dependent token.
pub fn accuracy_by_dependent_pos(
    gold: &Treebank,
    systems: &[SystemOutput],
) -> Result<FactorReport, AnalysisError> {
    check_alignment(gold, systems)?;
    let categories = gold.cpos_inventory();
    let index: BTreeMap<&str, usize> = categories
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_str(), i))
        .collect();
    let total_tokens: usize = gold.sentences.iter().map(|s| s.len()).sum();
    let mut report = FactorReport::new(
        "Accuracy by dependent POS",
        "dependent_pos",
        MetricKind::Accuracy,
        systems,
        total_tokens,
        categories.iter().cloned(),
    );
    for (i, sentence) in gold.sentences.iter().enumerate() {
        let gold_graph = sentence.graph();
        for d in 1..=sentence.len() {
            let row = &mut report.rows[index[sentence.token(d).cpos.as_str()]];
            row.mass_count += 1;
            row.gold_support += 1;
            for (s, system) in systems.iter().enumerate() {
                row.cells[s].correct += usize::from(labeled_match(&gold_graph, &system.parses[i], d));
            }
        }
    }
    sort_categorical(&mut report);
    Ok(report)
}

/// Precision/recall per dependency label, with each label's share of
/// gold arcs and its average gold dependency length (the DLA column).
pub fn precision_recall_by_deptype(
    gold: &Treebank,
    systems: &[SystemOutput],
) -> Result<FactorReport, AnalysisError> {
    check_alignment(gold, systems)?;
    let mut categories: Vec<String> = gold.label_inventory();
    for system in systems {
        for parse in &system.parses {
            for d in 1..=parse.n() {
                let label = parse.label_of(d);
                if !categories.iter().any(|c| c == label) {
                    categories.push(label.to_string());
                }
            }
        }
    }
    categories.sort();
    let index: BTreeMap<&str, usize> = categories
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_str(), i))
        .collect();
    let total_arcs: usize = gold.sentences.iter().map(|s| s.len()).sum();
    let mut report = FactorReport::new(
        "Precision/recall by dependency type",
        "dependency_type",
        MetricKind::PrecisionRecall,
        systems,
        total_arcs,
        categories.iter().cloned(),
    );
    let mut length_sums = vec![0usize; categories.len()];
    for (i, sentence) in gold.sentences.iter().enumerate() {
        let gold_graph = sentence.graph();
        for d in 1..=sentence.len() {
            let gbin = index[gold_graph.label_of(d)];
            report.rows[gbin].mass_count += 1;
            report.rows[gbin].gold_support += 1;
            length_sums[gbin] += dependency_length(&gold_graph, d);
            for (s, system) in systems.iter().enumerate() {
                let pred = &system.parses[i];
                let correct = labeled_match(&gold_graph, pred, d);
                report.rows[gbin].cells[s].correct += usize::from(correct);
                let pbin = index[pred.label_of(d)];
                report.rows[pbin].cells[s].pred_support += 1;
                report.rows[pbin].cells[s].pred_correct += usize::from(correct);
            }
        }
    }
    for (row, &sum) in report.rows.iter_mut().zip(&length_sums) {
        if row.gold_support > 0 {
            row.dla = Some(sum as f64 / row.gold_support as f64);
        }
    }
    sort_categorical(&mut report);
    Ok(report)
}

/// Accuracy of gold root arcs, partitioned by the coarse POS of the
/// gold root child; a root arc counts when the system reproduces both
/// the attachment to the root and the label.
pub fn root_relation_accuracy(
    gold: &Treebank,
    systems: &[SystemOutput],
) -> Result<FactorReport, AnalysisError> {
    check_alignment(gold, systems)?;
    let mut tallies: BTreeMap<String, ReportRow> = BTreeMap::new();
    let mut total = 0usize;
    for (i, sentence) in gold.sentences.iter().enumerate() {
        let gold_graph = sentence.graph();
        for d in 1..=sentence.len() {
            if gold_graph.head_of(d) != 0 {
                continue;
            }
            total += 1;
            let class = format!("Root - {}", sentence.token(d).cpos);
            let row = tallies.entry(class.clone()).or_insert_with(|| ReportRow {
                bin: class,
                mass_count: 0,
                gold_support: 0,
                dla: None,
                cells: vec![SystemCell::default(); systems.len()],
            });
            row.mass_count += 1;
            row.gold_support += 1;
            for (s, system) in systems.iter().enumerate() {
                row.cells[s].correct += usize::from(labeled_match(&gold_graph, &system.parses[i], d));
            }
        }
    }
    let mut report = FactorReport {
        title: "Accuracy of the root relation".to_string(),
        factor: "root_relation".to_string(),
        kind: MetricKind::Accuracy,
        systems: systems.iter().map(|s| s.name.clone()).collect(),
        mass_total: total,
        rows: tallies.into_values().collect(),
    };
    sort_categorical(&mut report);
    Ok(report)
}

/// How each dependent POS distributes over dependency labels in one
/// treebank (no systems involved).
#[derive(Debug, Clone, PartialEq)]
pub struct PosDeptypeRow {
    pub pos: String,
    pub token_count: usize,
    /// `(label, unrounded percentage)`, descending, above threshold.
    pub entries: Vec<(String, f64)>,
    /// Total percentage folded into "others", if any.
    pub others: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PosDeptypeReport {
    pub threshold: f64,
    pub total_tokens: usize,
    pub rows: Vec<PosDeptypeRow>,
}

impl PosDeptypeReport {
    pub fn to_text(&self) -> String {
        let mut lines = vec![vec![
            "POS".to_string(),
            "dependency types".to_string(),
        ]];
        for row in &self.rows {
            let mut parts: Vec<String> = row
                .entries
                .iter()
                .map(|(label, pct)| format!("{label} ({:.2}%)", round2(*pct)))
                .collect();
            if let Some(o) = row.others {
                parts.push(format!("others ({:.2}%)", round2(o)));
            }
            lines.push(vec![row.pos.clone(), parts.join(", ")]);
        }
        format!(
            "== Dependency types by dependent POS ==\n{}",
            render_table(&lines)
        )
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                json!({
                    "pos": row.pos,
                    "token_count": row.token_count,
                    "entries": row.entries.iter().map(|(label, pct)| {
                        json!({"label": label, "percent": round2(*pct)})
                    }).collect::<Vec<_>>(),
                    "others": row.others.map(round2),
                })
            })
            .collect();
        json!({
            "title": "Dependency types by dependent POS",
            "threshold": self.threshold,
            "rows": rows,
        })
    }
}

/// Distribution of dependency labels per dependent POS; labels holding
/// less than `threshold` percent of a POS's tokens fold into "others".
pub fn pos_deptype_distribution(gold: &Treebank, threshold: f64) -> PosDeptypeReport {
    let mut per_pos: BTreeMap<String, BTreeMap<String, usize>> = BTreeMap::new();
    let mut total_tokens = 0usize;
    for sentence in &gold.sentences {
        for d in 1..=sentence.len() {
            total_tokens += 1;
            let token = sentence.token(d);
            *per_pos
                .entry(token.cpos.clone())
                .or_default()
                .entry(token.deprel.clone())
                .or_default() += 1;
        }
    }
    let mut rows: Vec<PosDeptypeRow> = per_pos
        .into_iter()
        .map(|(pos, counts)| {
            let token_count: usize = counts.values().sum();
            let mut pairs: Vec<(String, usize)> = counts.into_iter().collect();
            pairs.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
            let mut entries = Vec::new();
            let mut folded = 0.0;
            for (label, count) in pairs {
                let pct = 100.0 * count as f64 / token_count as f64;
                if pct < threshold {
                    folded += pct;
                } else {
                    entries.push((label, pct));
                }
            }
            PosDeptypeRow {
                pos,
                token_count,
                entries,
                others: (folded > 0.0).then_some(folded),
            }
        })
        .collect();
    rows.sort_by(|a, b| b.token_count.cmp(&a.token_count).then(a.pos.cmp(&b.pos)));
    PosDeptypeReport {
        threshold,
        total_tokens,
        rows,
    }
}

/// Every report over one gold treebank and one or two system outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisBattery {
    pub reports: Vec<FactorReport>,
    pub distribution: PosDeptypeReport,
}

impl AnalysisBattery {
    pub fn to_text(&self) -> String {
        let mut parts: Vec<String> = self.reports.iter().map(FactorReport::to_text).collect();
        parts.push(self.distribution.to_text());
        parts.join("\n")
    }

    pub fn to_json(&self) -> Value {
        json!({
            "reports": self.reports.iter().map(FactorReport::to_json).collect::<Vec<_>>(),
            "distribution": self.distribution.to_json(),
        })
    }
}

/// Default percentage below which a label folds into "others".
pub const DISTRIBUTION_FOLD_THRESHOLD: f64 = 2.0;

/// Runs the whole battery: sentence-length accuracy, the four arc-factor
/// precision/recall tables, dependent-POS accuracy, dependency-type
/// precision/recall, root-relation accuracy, and the label distribution.
pub fn full_battery(
    gold: &Treebank,
    systems: &[SystemOutput],
    bins: &BinConfig,
) -> Result<AnalysisBattery, AnalysisError> {
    let mut reports = vec![accuracy_by_sentence_length(gold, systems, bins)?];
    for factor in ArcFactorKind::ALL {
        reports.push(precision_recall_by_arc_factor(gold, systems, factor, bins)?);
    }
    reports.push(accuracy_by_dependent_pos(gold, systems)?);
    reports.push(precision_recall_by_deptype(gold, systems)?);
    reports.push(root_relation_accuracy(gold, systems)?);
    Ok(AnalysisBattery {
        reports,
        distribution: pos_deptype_distribution(gold, DISTRIBUTION_FOLD_THRESHOLD),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::evaluate_graphs;
    use crate::eval::PunctuationPolicy;
    use crate::treebank::{Sentence, Token};

    fn tok(index: usize, pos: &str, head: usize, deprel: &str) -> Token {
        Token {
            index,
            form: format!("w{index}"),
            lemma: "_".to_string(),
            cpos: pos.to_string(),
            pos: pos.to_string(),
            feats: "_".to_string(),
            head,
            deprel: deprel.to_string(),
        }
    }

    fn sentence(heads: &[usize], labels: &[&str], pos: &[&str]) -> Sentence {
        let tokens = heads
            .iter()
            .zip(labels)
            .zip(pos)
            .enumerate()
            .map(|(i, ((&h, &l), &p))| tok(i + 1, p, h, l))
            .collect();
        Sentence::new(tokens).unwrap()
    }

    fn hand_pair() -> (Treebank, Vec<DependencyGraph>) {
        let pos = ["N", "V", "N", "A", "N", "R", "V", "N", "R", "CH"];
        let gold = sentence(
            &[2, 0, 2, 3, 4, 2, 6, 7, 2, 2],
            &["SUB", "ROOT", "DOB", "NMOD", "NMOD", "VMOD", "DOB", "NMOD", "ADV", "PUNCT"],
            &pos,
        );
        let pred = sentence(
            &[2, 0, 2, 3, 4, 2, 6, 2, 3, 3],
            &["SUB", "ROOT", "DOB", "NMOD", "NMOD", "VMOD", "DET", "NMOD", "ADV", "DOB"],
            &pos,
        );
        (Treebank::new(vec![gold]), vec![pred.graph()])
    }

    fn identity_systems(gold: &Treebank) -> Vec<SystemOutput> {
        let parses: Vec<DependencyGraph> = gold.sentences.iter().map(Sentence::graph).collect();
        vec![
            SystemOutput::new("a", parses.clone()),
            SystemOutput::new("b", parses),
        ]
    }

    #[test]
    fn bin_labels_cover_singles_ranges_and_the_open_tail() {
        let spec = BinSpec::from_starts(&[1, 2, 5, 11]).unwrap();
        assert_eq!(spec.labels(), ["1", "2-4", "5-10", ">=11"]);
        assert_eq!(spec.index_of(0), None);
        assert_eq!(spec.index_of(1), Some(0));
        assert_eq!(spec.index_of(4), Some(1));
        assert_eq!(spec.index_of(10), Some(2));
        assert_eq!(spec.index_of(999), Some(3));
        assert_eq!(BinSpec::from_starts(&[]), Err(AnalysisError::BadBins));
        assert_eq!(BinSpec::from_starts(&[3, 3]), Err(AnalysisError::BadBins));
    }

    #[test]
    fn identity_systems_score_one_hundred_everywhere() {
        let (gold, _) = hand_pair();
        let battery = full_battery(&gold, &identity_systems(&gold), &BinConfig::default()).unwrap();
        for report in &battery.reports {
            for row in &report.rows {
                match report.kind {
                    MetricKind::Accuracy => {
                        for s in 0..2 {
                            if let Some(a) = report.accuracy(row, s) {
                                assert_eq!(a, 100.0, "{} {}", report.title, row.bin);
                            }
                        }
                        if row.gold_support > 0 {
                            assert_eq!(report.delta_accuracy(row), Some(0.0));
                        }
                    }
                    MetricKind::PrecisionRecall => {
                        for s in 0..2 {
                            if let Some(p) = report.precision(row, s) {
                                assert_eq!(p, 100.0);
                            }
                            if let Some(r) = report.recall(row, s) {
                                assert_eq!(r, 100.0);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn masses_sum_to_one_hundred() {
        let (gold, pred) = hand_pair();
        let systems = vec![SystemOutput::new("sys", pred)];
        let battery = full_battery(&gold, &systems, &BinConfig::default()).unwrap();
        for report in &battery.reports {
            let sum: f64 = report.rows.iter().map(|r| report.mass_percent(r)).sum();
            assert!((sum - 100.0).abs() < 1e-9, "{}: {sum}", report.title);
        }
        for row in &battery.distribution.rows {
            let listed: f64 = row.entries.iter().map(|(_, p)| p).sum();
            let total = listed + row.others.unwrap_or(0.0);
            assert!((total - 100.0).abs() < 1e-9, "{}: {total}", row.pos);
        }
    }

    #[test]
    fn sentence_length_row_matches_overall_labeled_score() {
        let (gold, pred) = hand_pair();
        let systems = vec![SystemOutput::new("sys", pred.clone())];
        let report =
            accuracy_by_sentence_length(&gold, &systems, &BinConfig::default()).unwrap();
        let row = report.row("1-10").unwrap();
        assert_eq!(report.mass_percent(row), 100.0);
        assert_eq!(report.accuracy(row, 0).map(round2), Some(60.00));

        let las = evaluate_graphs(&gold, &pred, true, &PunctuationPolicy::default())
            .unwrap()
            .las;
        let pooled_correct: usize = report.rows.iter().map(|r| r.cells[0].correct).sum();
        let pooled_support: usize = report.rows.iter().map(|r| r.gold_support).sum();
        let recombined = 100.0 * pooled_correct as f64 / pooled_support as f64;
        assert!((recombined - las).abs() < 1e-9);
    }

    #[test]
    fn dependent_pos_rows_sort_by_mass_then_name_and_recombine() {
        let (gold, pred) = hand_pair();
        let systems = vec![SystemOutput::new("sys", pred)];
        let report = accuracy_by_dependent_pos(&gold, &systems).unwrap();
        let order: Vec<&str> = report.rows.iter().map(|r| r.bin.as_str()).collect();
        assert_eq!(order, ["N", "R", "V", "A", "CH"]);
        let n = report.row("N").unwrap();
        assert_eq!(report.accuracy(n, 0).map(round2), Some(75.00));
        let weighted: usize = report.rows.iter().map(|r| r.cells[0].correct).sum();
        assert_eq!(weighted, 6);
    }

    #[test]
    fn dependency_length_bins_keep_precision_and_recall_apart() {
        let (gold, pred) = hand_pair();
        let systems = vec![SystemOutput::new("sys", pred)];
        let report = precision_recall_by_arc_factor(
            &gold,
            &systems,
            ArcFactorKind::DependencyLength,
            &BinConfig::default(),
        )
        .unwrap();
        let one = report.row("1").unwrap();
        assert_eq!(report.precision(one, 0).map(round2), Some(80.00));
        assert_eq!(report.recall(one, 0).map(round2), Some(66.67));
        assert_eq!(one.cells[0].pred_support, 5);
        assert_eq!(one.gold_support, 6);

        // Two predicted arcs have length 6 but no gold arc does: the
        // precision cell exists while the recall cell is undefined.
        let six = report.row("6").unwrap();
        assert_eq!(six.cells[0].pred_support, 2);
        assert_eq!(report.precision(six, 0), Some(0.0));
        assert_eq!(report.recall(six, 0), None);
        assert_eq!(report.mass_percent(six), 0.0);
    }

    #[test]
    fn deptype_rows_carry_mass_length_and_both_metrics() {
        let (gold, pred) = hand_pair();
        let systems = vec![SystemOutput::new("sys", pred)];
        let report = precision_recall_by_deptype(&gold, &systems).unwrap();
        let nmod = report.row("NMOD").unwrap();
        assert_eq!(round2(report.mass_percent(nmod)), 30.00);
        assert_eq!(nmod.dla.map(round2), Some(1.00));
        assert_eq!(report.precision(nmod, 0).map(round2), Some(66.67));
        assert_eq!(report.recall(nmod, 0).map(round2), Some(66.67));

        // DET exists only in the prediction: no gold mass, no recall.
        let det = report.row("DET").unwrap();
        assert_eq!(det.gold_support, 0);
        assert_eq!(report.recall(det, 0), None);
        assert_eq!(report.precision(det, 0), Some(0.0));
        assert_eq!(report.rows[0].bin, "NMOD");
    }

    #[test]
    fn root_relation_partitions_gold_root_arcs() {
        let (gold, pred) = hand_pair();
        let systems = vec![SystemOutput::new("sys", pred)];
        let report = root_relation_accuracy(&gold, &systems).unwrap();
        assert_eq!(report.rows.len(), 1);
        let row = report.row("Root - V").unwrap();
        assert_eq!(report.mass_percent(row), 100.0);
        assert_eq!(report.accuracy(row, 0), Some(100.0));
    }

    #[test]
    fn distribution_folds_minor_labels_into_others() {
        let mut sentences = Vec::new();
        // 99 determiner tokens labeled DET, one labeled ADV.
        for i in 0..100 {
            let label = if i == 0 { "ADV" } else { "DET" };
            sentences.push(sentence(&[0, 1], &["ROOT", label], &["V", "M"]));
        }
        let gold = Treebank::new(sentences);
        let report = pos_deptype_distribution(&gold, 2.0);
        let m = report.rows.iter().find(|r| r.pos == "M").unwrap();
        assert_eq!(m.entries.len(), 1);
        assert_eq!(m.entries[0].0, "DET");
        assert_eq!(round2(m.entries[0].1), 99.00);
        assert_eq!(m.others.map(round2), Some(1.00));
        let v = report.rows.iter().find(|r| r.pos == "V").unwrap();
        assert_eq!(v.entries[0], ("ROOT".to_string(), 100.0));
        assert_eq!(v.others, None);
    }

    #[test]
    fn deltas_come_from_the_rounded_values() {
        let (gold, pred) = hand_pair();
        let identity: Vec<DependencyGraph> =
            gold.sentences.iter().map(Sentence::graph).collect();
        let systems = vec![
            SystemOutput::new("a", identity),
            SystemOutput::new("b", pred),
        ];
        let report = accuracy_by_sentence_length(&gold, &systems, &BinConfig::default()).unwrap();
        let row = report.row("1-10").unwrap();
        assert_eq!(report.delta_accuracy(row), Some(40.00));
        let text = report.to_text();
        assert!(text.contains("100.00"), "{text}");
        assert!(text.contains("60.00"), "{text}");
        assert!(text.contains("40.00"), "{text}");
    }

    #[test]
    fn misaligned_systems_are_rejected() {
        let (gold, _) = hand_pair();
        let systems = vec![SystemOutput::new("sys", Vec::new())];
        assert_eq!(
            accuracy_by_dependent_pos(&gold, &systems).unwrap_err(),
            AnalysisError::Alignment {
                system: "sys".to_string(),
                cause: AlignError::SentenceCount { gold: 1, pred: 0 },
            }
        );
        assert_eq!(
            full_battery(&gold, &[], &BinConfig::default()).unwrap_err(),
            AnalysisError::NoSystems
        );
    }

    #[test]
    fn cyclic_predictions_are_rejected_where_factors_walk_the_graph() {
        let (gold, _) = hand_pair();
        let mut heads = vec![0usize; 11];
        let labels: Vec<String> = (0..11).map(|_| "X".to_string()).collect();
        heads[1] = 2;
        heads[2] = 1;
        let cyclic = DependencyGraph::from_parts(heads, labels);
        let systems = vec![SystemOutput::new("sys", vec![cyclic])];
        assert_eq!(
            precision_recall_by_arc_factor(
                &gold,
                &systems,
                ArcFactorKind::RootDistance,
                &BinConfig::default()
            )
            .unwrap_err(),
            AnalysisError::InvalidGraph { side: "predicted", index: 1 },
        );
    }

    #[test]
    fn battery_renders_text_and_json() {
        let (gold, pred) = hand_pair();
        let systems = vec![SystemOutput::new("sys", pred)];
        let battery = full_battery(&gold, &systems, &BinConfig::default()).unwrap();
        assert_eq!(battery.reports.len(), 8);
        let text = battery.to_text();
        assert!(text.contains("== Accuracy by sentence length =="));
        assert!(text.contains("== Precision/recall by arc degree =="));
        assert!(text.contains("N/A"));
        let json = battery.to_json();
        assert_eq!(json["reports"].as_array().unwrap().len(), 8);
        assert_eq!(json["reports"][0]["rows"][0]["mass"], json!(100.0));
    }
}
