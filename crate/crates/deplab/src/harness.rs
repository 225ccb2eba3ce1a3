//! Experiment driver behind the command-line tool: k-fold
//! cross-validation of one or both parsers plus the standalone
//! train/parse/eval/analyze pipelines.
//!
//! A cross-validation run writes a self-contained output directory:
//!
//! ```text
//! out/
//!   manifest.toml           effective configuration of the run
//!   folds.txt               sentence ordinals of each test fold
//!   models/fold{i}.{parser}.model
//!   predictions/fold{i}.{parser}.conll
//!   reports/evaluation.txt  pooled scores per parser (+ .json with folds)
//!   reports/analysis.txt    full factor battery (+ .json)
//! ```
//!
//! Every artifact is deterministic in the configuration: rerunning the
//! same config into a fresh directory reproduces every file byte for
//! byte.

use std::collections::BTreeSet;
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::analysis::{full_battery, AnalysisBattery, AnalysisError, BinConfig, SystemOutput};
use crate::eval::{
    evaluate_graphs, evaluate_with, round2, AlignError, EvalResult, PunctuationPolicy,
};
use crate::graph::train_graph_model;
use crate::learn::{TrainError, TrainOptions};
use crate::model_io::{self, AnyModel, ModelIoError};
use crate::transition::train_transition_model;
use crate::treebank::{
    serialize_conll, ConllError, DependencyGraph, Sentence, SplitError, Treebank,
};
use crate::Score;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{path}: {cause}", path = .path.display())]
    Treebank { path: PathBuf, cause: ConllError },
    #[error(transparent)]
    Split(#[from] SplitError),
    #[error(transparent)]
    Train(#[from] TrainError),
    #[error(transparent)]
    Model(#[from] ModelIoError),
    #[error(transparent)]
    Align(#[from] AlignError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("config: {0}")]
    Config(String),
}

/// One trainable parser.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParserKind {
    Graph,
    Transition,
}

impl ParserKind {
    pub fn slug(self) -> &'static str {
        match self {
            ParserKind::Graph => "graph",
            ParserKind::Transition => "transition",
        }
    }
}

impl FromStr for ParserKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "graph" => Ok(ParserKind::Graph),
            "transition" => Ok(ParserKind::Transition),
            other => Err(format!("unknown parser `{other}` (expected graph or transition)")),
        }
    }
}

/// Which parsers a cross-validation run covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParserChoice {
    Graph,
    Transition,
    Both,
}

impl ParserChoice {
    pub fn kinds(self) -> Vec<ParserKind> {
        match self {
            ParserChoice::Graph => vec![ParserKind::Graph],
            ParserChoice::Transition => vec![ParserKind::Transition],
            ParserChoice::Both => vec![ParserKind::Graph, ParserKind::Transition],
        }
    }
}

impl FromStr for ParserChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "graph" => Ok(ParserChoice::Graph),
            "transition" => Ok(ParserChoice::Transition),
            "both" => Ok(ParserChoice::Both),
            other => Err(format!(
                "unknown parser `{other}` (expected graph, transition, or both)"
            )),
        }
    }
}

fn default_parser() -> ParserChoice {
    ParserChoice::Both
}
fn default_k() -> usize {
    10
}
fn default_seed() -> u64 {
    1
}
fn default_epochs() -> u32 {
    10
}
fn default_include_punct() -> bool {
    true
}

/// Full description of a cross-validation experiment; serializable as
/// TOML so a run can be replayed from its manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub treebank: PathBuf,
    pub out: PathBuf,
    #[serde(default = "default_parser")]
    pub parser: ParserChoice,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_epochs")]
    pub epochs: u32,
    #[serde(default = "default_include_punct")]
    pub include_punct: bool,
    #[serde(default)]
    pub bins: BinConfig,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<ExperimentConfig, HarnessError> {
        toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<ExperimentConfig, HarnessError> {
        Self::from_toml_str(&fs::read_to_string(path)?)
    }
}

/// Reads a CoNLL treebank, attaching the path to any error.
pub fn read_treebank(path: &Path) -> Result<Treebank, HarnessError> {
    let file = fs::File::open(path).map_err(|e| HarnessError::Treebank {
        path: path.to_path_buf(),
        cause: ConllError::Io(e),
    })?;
    crate::treebank::parse_conll(BufReader::new(file)).map_err(|cause| HarnessError::Treebank {
        path: path.to_path_buf(),
        cause,
    })
}

/// Parses one sentence with a loaded model of either kind. Graph models
/// decode under the single-root constraint, matching how they train.
pub fn parse_with(model: &AnyModel, sentence: &Sentence) -> DependencyGraph {
    match model {
        AnyModel::Graph(m) => m.parse(sentence, true),
        AnyModel::Transition(m) => m.parse(sentence),
    }
}

/// Trains one parser on a treebank file and saves the model.
pub fn run_train(
    treebank_path: &Path,
    kind: ParserKind,
    options: &TrainOptions,
    model_out: &Path,
) -> Result<(), HarnessError> {
    let treebank = read_treebank(treebank_path)?;
    match kind {
        ParserKind::Graph => {
            model_io::save_graph(&train_graph_model::<Score>(&treebank, options)?, model_out)?
        }
        ParserKind::Transition => model_io::save_transition(
            &train_transition_model::<Score>(&treebank, options)?,
            model_out,
        )?,
    }
    Ok(())
}

/// Parses a CoNLL file with a saved model and writes the predictions as
/// CoNLL; the input's head and label columns are ignored.
pub fn run_parse(
    model_path: &Path,
    input_path: &Path,
    output_path: &Path,
) -> Result<(), HarnessError> {
    let model = model_io::load(model_path)?;
    let treebank = read_treebank(input_path)?;
    let parsed = Treebank::new(
        treebank
            .sentences
            .iter()
            .map(|s| s.with_parse(&parse_with(&model, s)))
            .collect(),
    );
    fs::write(output_path, serialize_conll(&parsed))?;
    Ok(())
}

/// Scores a prediction file against a gold file.
pub fn run_eval(
    gold_path: &Path,
    pred_path: &Path,
    include_punct: bool,
    policy: &PunctuationPolicy,
) -> Result<EvalResult, HarnessError> {
    let gold = read_treebank(gold_path)?;
    let pred = read_treebank(pred_path)?;
    Ok(evaluate_with(&gold, &pred, include_punct, policy)?)
}

/// Headline scores plus the full factor battery for one or two
/// prediction files.
#[derive(Debug)]
pub struct AnalyzeOutcome {
    pub headline: Vec<(String, EvalResult)>,
    pub battery: AnalysisBattery,
}

pub fn run_analyze(
    gold_path: &Path,
    pred_paths: &[PathBuf],
    include_punct: bool,
    bins: &BinConfig,
) -> Result<AnalyzeOutcome, HarnessError> {
    let gold = read_treebank(gold_path)?;
    let policy = PunctuationPolicy::default();
    let mut systems: Vec<SystemOutput> = Vec::new();
    let mut headline = Vec::new();
    for (i, path) in pred_paths.iter().enumerate() {
        let pred = read_treebank(path)?;
        let result = evaluate_with(&gold, &pred, include_punct, &policy)?;
        let mut name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| format!("system{}", i + 1));
        if systems.iter().any(|s| s.name == name) {
            name = format!("{name}-{}", i + 1);
        }
        headline.push((name.clone(), result));
        systems.push(SystemOutput::new(
            name,
            pred.sentences.iter().map(Sentence::graph).collect(),
        ));
    }
    let battery = full_battery(&gold, &systems, bins)?;
    Ok(AnalyzeOutcome { headline, battery })
}

/// Pooled scores per parser from a finished cross-validation run.
#[derive(Debug)]
pub struct CrossvalSummary {
    pub per_parser: Vec<(String, EvalResult)>,
    pub out_dir: PathBuf,
}

fn eval_to_json(result: &EvalResult) -> Value {
    json!({
        "tokens": result.token_count,
        "uas": round2(result.uas),
        "las": round2(result.las),
        "label_accuracy": round2(result.label_accuracy),
    })
}

/// Runs the whole experiment: per fold and parser, train on the other
/// folds, parse the test fold, and persist the model and predictions;
/// then pool the predictions into per-parser scores and the factor
/// battery.
pub fn run_crossval(config: &ExperimentConfig) -> Result<CrossvalSummary, HarnessError> {
    let treebank = read_treebank(&config.treebank)?;
    let folds: Vec<Vec<usize>> = treebank
        .fold_indices(config.k, config.seed)?
        .into_iter()
        .map(|mut fold| {
            fold.sort_unstable();
            fold
        })
        .collect();

    let out = &config.out;
    fs::create_dir_all(out.join("models"))?;
    fs::create_dir_all(out.join("predictions"))?;
    fs::create_dir_all(out.join("reports"))?;

    let mut folds_text = String::new();
    for (fi, fold) in folds.iter().enumerate() {
        folds_text.push_str(&format!("fold {fi}:"));
        for idx in fold {
            folds_text.push_str(&format!(" {idx}"));
        }
        folds_text.push('\n');
    }
    fs::write(out.join("folds.txt"), folds_text)?;

    let policy = PunctuationPolicy::default();
    let mut systems: Vec<SystemOutput> = Vec::new();
    let mut per_parser: Vec<(String, EvalResult)> = Vec::new();
    let mut eval_text = String::new();
    let mut eval_parsers = serde_json::Map::new();

    for kind in config.parser.kinds() {
        let slug = kind.slug();
        let mut pooled: Vec<Option<DependencyGraph>> = vec![None; treebank.len()];
        for (fi, fold) in folds.iter().enumerate() {
            let in_test: BTreeSet<usize> = fold.iter().copied().collect();
            let train_tb = Treebank::new(
                (0..treebank.len())
                    .filter(|i| !in_test.contains(i))
                    .map(|i| treebank.sentences[i].clone())
                    .collect(),
            );
            let options = TrainOptions {
                epochs: config.epochs,
                seed: config.seed + fi as u64,
                strict_root: true,
            };
            let model_path = out.join("models").join(format!("fold{fi}.{slug}.model"));
            let model = match kind {
                ParserKind::Graph => {
                    let m = train_graph_model::<Score>(&train_tb, &options)?;
                    model_io::save_graph(&m, &model_path)?;
                    AnyModel::Graph(m)
                }
                ParserKind::Transition => {
                    let m = train_transition_model::<Score>(&train_tb, &options)?;
                    model_io::save_transition(&m, &model_path)?;
                    AnyModel::Transition(m)
                }
            };
            let mut fold_sentences = Vec::with_capacity(fold.len());
            for &idx in fold {
                let sentence = &treebank.sentences[idx];
                let parse = parse_with(&model, sentence);
                fold_sentences.push(sentence.with_parse(&parse));
                pooled[idx] = Some(parse);
            }
            fs::write(
                out.join("predictions").join(format!("fold{fi}.{slug}.conll")),
                serialize_conll(&Treebank::new(fold_sentences)),
            )?;
        }
        let parses: Vec<DependencyGraph> = pooled
            .into_iter()
            .map(|p| p.expect("every sentence lands in exactly one test fold"))
            .collect();
        let result = evaluate_graphs(&treebank, &parses, config.include_punct, &policy)?;

        let fold_values: Vec<Value> = folds
            .iter()
            .map(|fold| {
                let counts = fold.iter().map(|&i| result.per_sentence[i]).collect();
                eval_to_json(&EvalResult::from_counts(counts))
            })
            .collect();
        let mut parser_json = eval_to_json(&result);
        parser_json["folds"] = Value::Array(fold_values);
        eval_parsers.insert(slug.to_string(), parser_json);
        eval_text.push_str(&format!("[{slug}]\n{result}\n\n"));

        systems.push(SystemOutput::new(slug, parses));
        per_parser.push((slug.to_string(), result));
    }

    fs::write(
        out.join("reports").join("evaluation.txt"),
        format!("{}\n", eval_text.trim_end()),
    )?;
    let eval_doc = json!({
        "include_punct": config.include_punct,
        "k": config.k,
        "seed": config.seed,
        "epochs": config.epochs,
        "parsers": Value::Object(eval_parsers),
    });
    fs::write(
        out.join("reports").join("evaluation.json"),
        serde_json::to_string_pretty(&eval_doc)? + "\n",
    )?;

    let battery = full_battery(&treebank, &systems, &config.bins)?;
    fs::write(out.join("reports").join("analysis.txt"), battery.to_text())?;
    fs::write(
        out.join("reports").join("analysis.json"),
        serde_json::to_string_pretty(&battery.to_json())? + "\n",
    )?;

    let manifest =
        toml::to_string_pretty(config).map_err(|e| HarnessError::Config(e.to_string()))?;
    fs::write(out.join("manifest.toml"), manifest)?;

    Ok(CrossvalSummary {
        per_parser,
        out_dir: out.clone(),
    })
}
