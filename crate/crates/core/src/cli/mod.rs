//! Command-line front end. Resources and thresholds come from a TOML run
//! configuration; flags override it. Exit codes: 0 success, 2 usage or
//! configuration error, 3 data or model error.

mod commands;
pub mod config;
pub mod records;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use crate::output::Format;

pub use commands::{
    cmd_agree, cmd_bias_fit, cmd_classify, cmd_emotions, cmd_report, cmd_train, AgreeArgs, BiasFitArgs, ClassifyArgs,
    Context, EmotionsArgs, ReportArgs, TrainArgs,
};
pub use config::RunConfig;

pub const CONFIG_ENV: &str = "ECOSENT_CONFIG";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DATA: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "ecosent",
    version,
    about = "Sentiment and emotion analysis of environmental social media posts"
)]
pub struct Cli {
    /// Run configuration (TOML).
    #[arg(long, global = true, env = CONFIG_ENV)]
    pub config: Option<PathBuf>,

    /// Output table format.
    #[arg(long, global = true, value_parser = parse_format)]
    pub format: Option<Format>,

    /// Directory for generated artifacts.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a sentiment model from a labeled CSV.
    Train(TrainCmd),
    /// Score and label posts with a trained model.
    Classify(ClassifyCmd),
    /// Compute per-post emotion profiles.
    Emotions(EmotionsCmd),
    /// Build trend, emotion, engagement, bias and evaluation tables.
    Report(ReportCmd),
    /// Aggregate annotations and measure inter-annotator agreement.
    Agree(AgreeCmd),
    /// Fit engagement against sentiment score.
    BiasFit(BiasFitCmd),
}

#[derive(Debug, Args)]
pub struct TrainCmd {
    /// Labeled CSV.
    #[arg(long)]
    input: PathBuf,
    /// Input uses the six-column Sentiment140 layout.
    #[arg(long)]
    sentiment140: bool,
    /// Train only on documents matching a keyword.
    #[arg(long)]
    keyword_filter: bool,
    #[arg(long)]
    min_freq: Option<u64>,
    #[arg(long)]
    smoothing_k: Option<f64>,
    /// Model path; defaults to model.json in the output directory.
    #[arg(long)]
    model_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ClassifyCmd {
    #[arg(long)]
    model: PathBuf,
    /// Posts JSONL.
    #[arg(long)]
    posts: PathBuf,
    #[command(flatten)]
    corpus: CorpusFlags,
}

#[derive(Debug, Args)]
pub struct EmotionsCmd {
    #[arg(long)]
    posts: PathBuf,
    /// Emotion lexicon; overrides the configured one.
    #[arg(long)]
    lexicon: Option<PathBuf>,
    #[command(flatten)]
    corpus: CorpusFlags,
}

#[derive(Debug, Args)]
pub struct ReportCmd {
    /// Output of `classify`.
    #[arg(long)]
    classified: PathBuf,
    #[arg(long)]
    posts: PathBuf,
    /// Output of `emotions`.
    #[arg(long)]
    profiles: Option<PathBuf>,
    /// Gold labels (`id,label`).
    #[arg(long)]
    gold: Option<PathBuf>,
    /// External tool predictions as NAME=PATH; repeatable.
    #[arg(long, value_parser = parse_external)]
    external: Vec<(String, PathBuf)>,
    /// Emotion columns over negative posts only or over all posts.
    #[arg(long, value_parser = ["negative", "all"])]
    emotion_scope: Option<String>,
    #[arg(long)]
    degree: Option<usize>,
    #[command(flatten)]
    corpus: CorpusFlags,
}

fn parse_external(s: &str) -> Result<(String, PathBuf), String> {
    match s.split_once('=') {
        Some((name, path)) if !name.is_empty() && !path.is_empty() => Ok((name.to_owned(), PathBuf::from(path))),
        _ => Err(format!("expected NAME=PATH, got '{s}'")),
    }
}

#[derive(Debug, Args)]
pub struct AgreeCmd {
    /// Annotation grid CSV (`item_id`, one column per annotator).
    #[arg(long)]
    annotations: PathBuf,
    /// Annotator weights JSON.
    #[arg(long)]
    weights: Option<PathBuf>,
    #[arg(long)]
    drop_fraction: Option<f64>,
}

#[derive(Debug, Args)]
pub struct BiasFitCmd {
    /// `score,engagement` table.
    #[arg(long, conflicts_with_all = ["classified", "posts"])]
    points: Option<PathBuf>,
    #[arg(long, requires = "posts")]
    classified: Option<PathBuf>,
    #[arg(long, requires = "classified")]
    posts: Option<PathBuf>,
    #[arg(long)]
    degree: Option<usize>,
    #[command(flatten)]
    corpus: CorpusFlags,
}

#[derive(Debug, Args)]
struct CorpusFlags {
    #[arg(long)]
    platform: Option<crate::corpus::Platform>,
    #[arg(long)]
    min_year: Option<i32>,
    #[arg(long)]
    max_year: Option<i32>,
}

impl CorpusFlags {
    fn apply(&self, cfg: &mut RunConfig) {
        if let Some(p) = self.platform {
            cfg.corpus.platform = p;
        }
        if self.min_year.is_some() {
            cfg.corpus.min_year = self.min_year;
        }
        if self.max_year.is_some() {
            cfg.corpus.max_year = self.max_year;
        }
    }
}

/// Map an error to its exit code.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_config() {
        EXIT_CONFIG
    } else {
        EXIT_DATA
    }
}

fn build_context(cli: &Cli) -> crate::Result<Context> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    match &cli.command {
        Command::Train(c) => {
            if let Some(v) = c.min_freq {
                cfg.train.min_freq = v;
            }
            if let Some(v) = c.smoothing_k {
                cfg.train.smoothing_k = v;
            }
        }
        Command::Classify(c) => c.corpus.apply(&mut cfg),
        Command::Emotions(c) => {
            c.corpus.apply(&mut cfg);
            if let Some(l) = &c.lexicon {
                cfg.resources.emotion_lexicon = Some(l.clone());
            }
        }
        Command::Report(c) => {
            c.corpus.apply(&mut cfg);
            if let Some(s) = &c.emotion_scope {
                cfg.report.emotion_scope = match s.as_str() {
                    "all" => crate::analytics::EmotionScope::All,
                    _ => crate::analytics::EmotionScope::Negative,
                };
            }
            if let Some(d) = c.degree {
                cfg.report.bias_degree = d;
            }
        }
        Command::Agree(c) => {
            if let Some(f) = c.drop_fraction {
                cfg.thresholds.drop_fraction = f;
            }
        }
        Command::BiasFit(c) => c.corpus.apply(&mut cfg),
    }
    if let Some(f) = cli.format {
        cfg.output.format = f;
    }
    if let Some(d) = &cli.out_dir {
        cfg.output.dir = d.clone();
    }
    cfg.validate()?;
    let dir = &cfg.output.dir;
    std::fs::create_dir_all(dir).map_err(|e| Error::Config(format!("cannot create {}: {e}", dir.display())))?;
    Ok(Context::new(cfg))
}

/// Execute a parsed command line; returns the written artifact paths.
pub fn execute(cli: &Cli) -> crate::Result<Vec<PathBuf>> {
    let ctx = build_context(cli)?;
    match &cli.command {
        Command::Train(c) => cmd_train(
            &ctx,
            &TrainArgs {
                input: c.input.clone(),
                sentiment140: c.sentiment140,
                keyword_filter: c.keyword_filter,
                model_out: c.model_out.clone(),
            },
        ),
        Command::Classify(c) => cmd_classify(
            &ctx,
            &ClassifyArgs {
                model: c.model.clone(),
                posts: c.posts.clone(),
            },
        ),
        Command::Emotions(c) => cmd_emotions(&ctx, &EmotionsArgs { posts: c.posts.clone() }),
        Command::Report(c) => cmd_report(
            &ctx,
            &ReportArgs {
                classified: c.classified.clone(),
                posts: c.posts.clone(),
                profiles: c.profiles.clone(),
                gold: c.gold.clone(),
                external: c.external.clone(),
            },
        ),
        Command::Agree(c) => cmd_agree(
            &ctx,
            &AgreeArgs {
                annotations: c.annotations.clone(),
                weights: c.weights.clone(),
            },
        ),
        Command::BiasFit(c) => cmd_bias_fit(
            &ctx,
            &BiasFitArgs {
                points: c.points.clone(),
                classified: c.classified.clone(),
                posts: c.posts.clone(),
                degree: c.degree,
            },
        ),
    }
}

/// Parse `args`, run, and return the process exit code. Usage errors exit
/// with 2 through clap.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
