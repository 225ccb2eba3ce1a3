//! `deplab` — train, run, score, and analyze dependency parsers over
//! CoNLL treebanks.

use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::{ArgAction, Parser, Subcommand};

use deplab::analysis::BinConfig;
use deplab::eval::{round2, EvalResult, PunctuationPolicy};
use deplab::harness::{
    run_analyze, run_crossval, run_eval, run_parse, run_train, ExperimentConfig, ParserChoice,
    ParserKind,
};
use deplab::learn::TrainOptions;

#[derive(Parser)]
#[command(
    name = "deplab",
    version,
    about = "Dependency parsing laboratory: train, parse, evaluate, analyze, cross-validate"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a parser on a CoNLL treebank and save the model.
    Train {
        /// Gold treebank in CoNLL format.
        #[arg(long)]
        treebank: PathBuf,
        /// Which parser to train: graph or transition.
        #[arg(long, value_parser = ParserKind::from_str)]
        parser: ParserKind,
        /// Training epochs.
        #[arg(long, default_value_t = 10)]
        epochs: u32,
        /// Shuffling seed; the same seed reproduces the same model.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Where to write the model file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Parse a CoNLL file with a saved model and write the predictions.
    Parse {
        /// Model file produced by `train` or `crossval`.
        #[arg(long)]
        model: PathBuf,
        /// Input sentences in CoNLL format (head and label columns are
        /// ignored).
        #[arg(long)]
        input: PathBuf,
        /// Where to write the parsed CoNLL output.
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a prediction file against a gold file.
    Eval {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        pred: PathBuf,
        /// Count punctuation tokens (pass false to exclude them).
        #[arg(long, default_value_t = true, action = ArgAction::Set)]
        include_punct: bool,
        /// Dependency label that marks punctuation (case-insensitive).
        #[arg(long, default_value = "PUNCT")]
        punct_deprel: String,
        /// POS tag that also marks punctuation (exact match), if any.
        #[arg(long)]
        punct_pos: Option<String>,
    },
    /// Break one or two systems' scores down by structural factors.
    Analyze {
        #[arg(long)]
        gold: PathBuf,
        /// Prediction file; repeat the flag to compare two systems.
        #[arg(long = "pred", required = true)]
        preds: Vec<PathBuf>,
        /// Count punctuation in the headline scores (the factor tables
        /// always cover every token).
        #[arg(long, default_value_t = true, action = ArgAction::Set)]
        include_punct: bool,
        /// Emit JSON instead of text tables.
        #[arg(long)]
        json: bool,
    },
    /// K-fold cross-validation: train, parse, score, and analyze
    /// everything into an output directory.
    Crossval {
        /// TOML experiment config; command-line flags override it.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        treebank: Option<PathBuf>,
        /// Output directory for models, predictions, and reports.
        #[arg(long)]
        out: Option<PathBuf>,
        /// graph, transition, or both.
        #[arg(long, value_parser = ParserChoice::from_str)]
        parser: Option<ParserChoice>,
        /// Number of folds.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        epochs: Option<u32>,
        #[arg(long, action = ArgAction::Set)]
        include_punct: Option<bool>,
    },
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train { treebank, parser, epochs, seed, out } => {
            let options = TrainOptions { epochs, seed, strict_root: true };
            run_train(&treebank, parser, &options, &out)
                .with_context(|| format!("training a {} parser", parser.slug()))?;
            println!("model written to {}", out.display());
        }
        Command::Parse { model, input, out } => {
            run_parse(&model, &input, &out).context("parsing")?;
            println!("predictions written to {}", out.display());
        }
        Command::Eval { gold, pred, include_punct, punct_deprel, punct_pos } => {
            let policy = PunctuationPolicy { deprel: punct_deprel, pos_tag: punct_pos };
            let result = run_eval(&gold, &pred, include_punct, &policy).context("evaluating")?;
            print!("{result}");
        }
        Command::Analyze { gold, preds, include_punct, json } => {
            if preds.len() > 2 {
                bail!("analyze compares at most two prediction files");
            }
            let outcome = run_analyze(&gold, &preds, include_punct, &BinConfig::default())
                .context("analyzing")?;
            if json {
                let doc = serde_json::json!({
                    "systems": outcome
                        .headline
                        .iter()
                        .map(|(name, r)| (name.clone(), eval_json(r)))
                        .collect::<serde_json::Map<String, serde_json::Value>>(),
                    "analysis": outcome.battery.to_json(),
                });
                println!("{}", serde_json::to_string_pretty(&doc)?);
            } else {
                for (name, result) in &outcome.headline {
                    println!("[{name}]");
                    print!("{result}");
                    println!();
                }
                print!("{}", outcome.battery.to_text());
            }
        }
        Command::Crossval {
            config,
            treebank,
            out,
            parser,
            k,
            seed,
            epochs,
            include_punct,
        } => {
            let mut experiment = match config {
                Some(path) => ExperimentConfig::load(&path)
                    .with_context(|| format!("reading config {}", path.display()))?,
                None => {
                    let (Some(treebank), Some(out)) = (treebank.clone(), out.clone()) else {
                        bail!("without --config, both --treebank and --out are required");
                    };
                    ExperimentConfig {
                        treebank,
                        out,
                        parser: ParserChoice::Both,
                        k: 10,
                        seed: 1,
                        epochs: 10,
                        include_punct: true,
                        bins: BinConfig::default(),
                    }
                }
            };
            if let Some(v) = treebank {
                experiment.treebank = v;
            }
            if let Some(v) = out {
                experiment.out = v;
            }
            if let Some(v) = parser {
                experiment.parser = v;
            }
            if let Some(v) = k {
                experiment.k = v;
            }
            if let Some(v) = seed {
                experiment.seed = v;
            }
            if let Some(v) = epochs {
                experiment.epochs = v;
            }
            if let Some(v) = include_punct {
                experiment.include_punct = v;
            }
            let summary = run_crossval(&experiment).context("cross-validating")?;
            for (name, result) in &summary.per_parser {
                println!("[{name}]");
                print!("{result}");
                println!();
            }
            println!("reports written to {}", summary.out_dir.display());
        }
    }
    Ok(())
}

fn eval_json(result: &EvalResult) -> serde_json::Value {
    serde_json::json!({
        "tokens": result.token_count,
        "uas": round2(result.uas),
        "las": round2(result.las),
        "label_accuracy": round2(result.label_accuracy),
    })
}
