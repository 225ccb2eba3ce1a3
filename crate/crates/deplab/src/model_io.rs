//! Versioned text persistence for trained models.
//!
//! Layout (tab-separated weight lines, `\n` newlines):
//!
//! ```text
//! deplab-model 1
//! kind graph            (or: kind transition)
//! templates arc-v1      (or: config-v1)
//! labels <count>
//! <one label per line, inventory order>
//! weights <count>
//! <feature-id>\t<weight>             (graph models)
//! <feature-id>\t<move-id>\t<weight>  (transition models)
//! ```
//!
//! Weight lines are sorted by key and floats use Rust's shortest
//! round-trip formatting, so saving is byte-deterministic and loading
//! rebuilds exactly the same scores. The template tag in the header is
//! checked against the tag compiled into this build: a model trained
//! under a different template set refuses to load rather than silently
//! score garbage.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::graph::{ArcFactorModel, ARC_TEMPLATE_VERSION};
use crate::learn::AveragedWeights;
use crate::transition::{Transition, TransitionModel, CONFIG_TEMPLATE_VERSION};
use crate::Score;

const MAGIC: &str = "deplab-model 1";

#[derive(Debug, Error)]
pub enum ModelIoError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("`{kind}` model declares template set `{found}`, expected `{expected}`")]
    TemplateMismatch {
        kind: String,
        expected: String,
        found: String,
    },
    #[error("model is not finalized; finish training before saving")]
    NotFinalized,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn parse_err(line: usize, message: impl Into<String>) -> ModelIoError {
    ModelIoError::Parse {
        line,
        message: message.into(),
    }
}

/// A loaded model of either kind.
#[derive(Debug, Clone)]
pub enum AnyModel {
    Graph(ArcFactorModel<Score>),
    Transition(TransitionModel<Score>),
}

impl AnyModel {
    pub fn kind(&self) -> &'static str {
        match self {
            AnyModel::Graph(_) => "graph",
            AnyModel::Transition(_) => "transition",
        }
    }
}

fn render_header(out: &mut String, kind: &str, templates: &str, labels: &[String]) {
    let _ = writeln!(out, "{MAGIC}");
    let _ = writeln!(out, "kind {kind}");
    let _ = writeln!(out, "templates {templates}");
    let _ = writeln!(out, "labels {}", labels.len());
    for label in labels {
        let _ = writeln!(out, "{label}");
    }
}

/// Serializes a trained arc-factored model.
pub fn render_graph(model: &ArcFactorModel<Score>) -> Result<String, ModelIoError> {
    if model.weights().averaged_map().is_none() {
        return Err(ModelIoError::NotFinalized);
    }
    let entries = model.weights().averaged_entries();
    let mut out = String::new();
    render_header(&mut out, "graph", ARC_TEMPLATE_VERSION, model.labels());
    let _ = writeln!(out, "weights {}", entries.len());
    for (id, weight) in entries {
        let _ = writeln!(out, "{id}\t{weight}");
    }
    Ok(out)
}

/// Serializes a trained greedy shift-reduce model.
pub fn render_transition(model: &TransitionModel<Score>) -> Result<String, ModelIoError> {
    if model.weights().averaged_map().is_none() {
        return Err(ModelIoError::NotFinalized);
    }
    let entries = model.weights().averaged_entries();
    let mut out = String::new();
    render_header(&mut out, "transition", CONFIG_TEMPLATE_VERSION, model.labels());
    let _ = writeln!(out, "weights {}", entries.len());
    for ((id, move_id), weight) in entries {
        let _ = writeln!(out, "{id}\t{move_id}\t{weight}");
    }
    Ok(out)
}

struct Lines<'a> {
    inner: std::str::Lines<'a>,
    number: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<&'a str, ModelIoError> {
        self.number += 1;
        self.inner
            .next()
            .ok_or_else(|| parse_err(self.number, "unexpected end of file"))
    }

    fn expect_count(&mut self, keyword: &str) -> Result<usize, ModelIoError> {
        let line = self.next()?;
        let rest = line
            .strip_prefix(keyword)
            .and_then(|r| r.strip_prefix(' '))
            .ok_or_else(|| parse_err(self.number, format!("expected `{keyword} <count>`")))?;
        rest.parse()
            .map_err(|_| parse_err(self.number, format!("bad {keyword} count `{rest}`")))
    }
}

/// Parses a model file's contents.
pub fn parse_model(contents: &str) -> Result<AnyModel, ModelIoError> {
    let mut lines = Lines {
        inner: contents.lines(),
        number: 0,
    };
    let magic = lines.next()?;
    if magic != MAGIC {
        return Err(parse_err(1, format!("expected `{MAGIC}`, found `{magic}`")));
    }
    let kind_line = lines.next()?;
    let kind = kind_line
        .strip_prefix("kind ")
        .ok_or_else(|| parse_err(lines.number, "expected `kind <graph|transition>`"))?
        .to_string();
    let templates_line = lines.next()?;
    let found = templates_line
        .strip_prefix("templates ")
        .ok_or_else(|| parse_err(lines.number, "expected `templates <tag>`"))?;
    let expected = match kind.as_str() {
        "graph" => ARC_TEMPLATE_VERSION,
        "transition" => CONFIG_TEMPLATE_VERSION,
        other => return Err(parse_err(2, format!("unknown model kind `{other}`"))),
    };
    if found != expected {
        return Err(ModelIoError::TemplateMismatch {
            kind,
            expected: expected.to_string(),
            found: found.to_string(),
        });
    }

    let label_count = lines.expect_count("labels")?;
    if label_count == 0 {
        return Err(parse_err(lines.number, "label inventory must be non-empty"));
    }
    let mut labels = Vec::with_capacity(label_count);
    for _ in 0..label_count {
        let label = lines.next()?;
        if label.is_empty() {
            return Err(parse_err(lines.number, "empty label line"));
        }
        labels.push(label.to_string());
    }

    let weight_count = lines.expect_count("weights")?;
    let model = match kind.as_str() {
        "graph" => {
            let mut entries = Vec::with_capacity(weight_count);
            for _ in 0..weight_count {
                let line = lines.next()?;
                let (id, weight) = line
                    .split_once('\t')
                    .ok_or_else(|| parse_err(lines.number, "expected `<id>\\t<weight>`"))?;
                let id: u64 = id
                    .parse()
                    .map_err(|_| parse_err(lines.number, format!("bad feature id `{id}`")))?;
                let weight: Score = weight
                    .parse()
                    .map_err(|_| parse_err(lines.number, format!("bad weight `{weight}`")))?;
                entries.push((id, weight));
            }
            AnyModel::Graph(ArcFactorModel::from_parts(
                labels,
                AveragedWeights::from_averaged(entries),
            ))
        }
        _ => {
            let num_moves = Transition::count(label_count);
            let mut entries = Vec::with_capacity(weight_count);
            for _ in 0..weight_count {
                let line = lines.next()?;
                let mut parts = line.splitn(3, '\t');
                let (id, move_id, weight) = match (parts.next(), parts.next(), parts.next()) {
                    (Some(a), Some(b), Some(c)) => (a, b, c),
                    _ => {
                        return Err(parse_err(
                            lines.number,
                            "expected `<id>\\t<move-id>\\t<weight>`",
                        ))
                    }
                };
                let id: u64 = id
                    .parse()
                    .map_err(|_| parse_err(lines.number, format!("bad feature id `{id}`")))?;
                let move_id: u32 = move_id
                    .parse()
                    .map_err(|_| parse_err(lines.number, format!("bad move id `{move_id}`")))?;
                if move_id >= num_moves {
                    return Err(parse_err(
                        lines.number,
                        format!("move id {move_id} out of range for {label_count} labels"),
                    ));
                }
                let weight: Score = weight
                    .parse()
                    .map_err(|_| parse_err(lines.number, format!("bad weight `{weight}`")))?;
                entries.push(((id, move_id), weight));
            }
            AnyModel::Transition(TransitionModel::from_parts(
                labels,
                AveragedWeights::from_averaged(entries),
            ))
        }
    };
    if let Ok(extra) = lines.next() {
        if !extra.is_empty() {
            return Err(parse_err(lines.number, "trailing content after weights"));
        }
    }
    Ok(model)
}

pub fn save_graph(model: &ArcFactorModel<Score>, path: &Path) -> Result<(), ModelIoError> {
    fs::write(path, render_graph(model)?)?;
    Ok(())
}

pub fn save_transition(model: &TransitionModel<Score>, path: &Path) -> Result<(), ModelIoError> {
    fs::write(path, render_transition(model)?)?;
    Ok(())
}

pub fn load(path: &Path) -> Result<AnyModel, ModelIoError> {
    parse_model(&fs::read_to_string(path)?)
}
