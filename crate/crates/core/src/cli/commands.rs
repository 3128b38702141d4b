use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;

use crate::analytics::{
    confusion, emotion_trends, engagement_by_sentiment, fit_bias_curve, keyword_frequency, metrics, yearly_trends,
    MetricsReport, TrendInput,
};
use crate::annotation::{agreement_report, screen_annotators, to_label, weighted_score, AnnotationMatrix};
use crate::corpus::{
    filter_by_keywords, is_popular, is_viral, load_labeled_csv, load_posts, LabeledLayout, LineError, Polarity, Post,
};
use crate::emotion::{emotion_profile, prevailing_emotions, Emotion};
use crate::error::{Error, Result};
use crate::output::{fmt_f64, fmt_pct, Format, Table};
use crate::preprocess::{pipeline, TokenSeq};
use crate::sentiment::{classify, load_model, save_model, train, SentimentLabel};

use super::config::RunConfig;
use super::records::{read_classified, read_labels, read_points, read_profiles};

/// Resolved settings shared by every command.
#[derive(Debug, Clone)]
pub struct Context {
    pub config: RunConfig,
    pub out_dir: PathBuf,
    pub format: Format,
}

impl Context {
    pub fn new(config: RunConfig) -> Self {
        Context {
            out_dir: config.output.dir.clone(),
            format: config.output.format,
            config,
        }
    }

    fn emit(&self, table: &Table, stem: &str) -> Result<PathBuf> {
        let path = table.write(&self.out_dir, stem, self.format)?;
        info!("wrote {}", path.display());
        Ok(path)
    }
}

fn report_line_errors(path: &Path, errors: &[LineError]) {
    for e in errors {
        warn!("{}: skipped {e}", path.display());
    }
}

fn load_platform_posts(ctx: &Context, path: &Path) -> Result<Vec<Post>> {
    let report = load_posts(path, ctx.config.corpus.platform, ctx.config.window())?;
    report_line_errors(path, &report.errors);
    Ok(report.records)
}

#[derive(Debug, Clone, Default)]
pub struct TrainArgs {
    pub input: PathBuf,
    pub sentiment140: bool,
    pub keyword_filter: bool,
    /// Defaults to `<out-dir>/model.json`.
    pub model_out: Option<PathBuf>,
}

/// Train a model from a labeled CSV; writes the model and a
/// `train_summary` table of `metric,value` rows.
pub fn cmd_train(ctx: &Context, args: &TrainArgs) -> Result<Vec<PathBuf>> {
    let cfg = ctx.config.train_config()?;
    let resources = ctx.config.resource_set()?;
    let keywords = ctx.config.keywords()?;
    let layout = if args.sentiment140 {
        LabeledLayout::Sentiment140
    } else {
        ctx.config.layout()?
    };
    let loaded = load_labeled_csv(&args.input, layout)?;
    report_line_errors(&args.input, &loaded.errors);
    let loaded_docs = loaded.records.len();

    let filtered = filter_by_keywords(&loaded.records, &keywords);
    let docs: Vec<_> = if args.keyword_filter || ctx.config.train.keyword_filter {
        filtered.kept.to_vec()
    } else {
        loaded.records.iter().collect()
    };
    let corpus: Vec<(TokenSeq, Polarity)> = docs
        .par_iter()
        .map(|d| (pipeline(&d.text, &resources), d.label))
        .collect();
    let model = train(&corpus, &cfg)?;

    let model_path = args.model_out.clone().unwrap_or_else(|| ctx.out_dir.join("model.json"));
    save_model(&model, &model_path)?;
    info!("wrote {}", model_path.display());

    let mut summary = Table::new(["metric", "value"]);
    summary.push(["loaded_docs".to_owned(), loaded_docs.to_string()]);
    summary.push(["malformed_lines".to_owned(), loaded.errors.len().to_string()]);
    summary.push(["training_docs".to_owned(), model.stats.n_docs.to_string()]);
    summary.push(["positive_docs".to_owned(), model.stats.n_pos_docs.to_string()]);
    summary.push(["negative_docs".to_owned(), model.stats.n_neg_docs.to_string()]);
    summary.push(["vocab_size".to_owned(), model.vocab_size().to_string()]);
    summary.push(["keyword_matched_docs".to_owned(), filtered.kept.len().to_string()]);
    for (k, n) in &filtered.counts {
        summary.push([format!("keyword:{k}"), n.to_string()]);
    }
    Ok(vec![model_path, ctx.emit(&summary, "train_summary")?])
}

#[derive(Debug, Clone, Default)]
pub struct ClassifyArgs {
    pub model: PathBuf,
    pub posts: PathBuf,
}

/// Score and label every post; writes `classified` with `id,score,label`.
pub fn cmd_classify(ctx: &Context, args: &ClassifyArgs) -> Result<Vec<PathBuf>> {
    let model = load_model(&args.model)?;
    let resources = ctx.config.resource_set()?;
    let posts = load_platform_posts(ctx, &args.posts)?;
    let band = model.config.neutral_band;
    let scored: Vec<(f64, SentimentLabel)> = posts
        .par_iter()
        .map(|p| {
            let s = model.score(&pipeline(&p.text, &resources));
            (s, classify(s, band))
        })
        .collect();
    let mut t = Table::new(["id", "score", "label"]);
    for (p, (s, l)) in posts.iter().zip(scored) {
        t.push([p.id.clone(), fmt_f64(s), l.to_string()]);
    }
    Ok(vec![ctx.emit(&t, "classified")?])
}

#[derive(Debug, Clone, Default)]
pub struct EmotionsArgs {
    pub posts: PathBuf,
}

/// Per-post emotion profiles; writes `profiles` with the eight intensities,
/// token counts and the prevailing emotions joined by `;`.
pub fn cmd_emotions(ctx: &Context, args: &EmotionsArgs) -> Result<Vec<PathBuf>> {
    let lexicon = ctx.config.emotion_lexicon()?;
    let resources = ctx.config.resource_set()?;
    let posts = load_platform_posts(ctx, &args.posts)?;
    let profiles: Vec<_> = posts
        .par_iter()
        .map(|p| emotion_profile(&lexicon, &pipeline(&p.text, &resources)))
        .collect();
    let mut columns = vec!["id"];
    columns.extend(Emotion::ALL.iter().map(|e| e.as_str()));
    columns.extend(["matched_tokens", "total_tokens", "prevailing"]);
    let mut t = Table::new(columns);
    for (p, prof) in posts.iter().zip(&profiles) {
        let mut row = vec![p.id.clone()];
        row.extend(prof.intensity.iter().map(|v| fmt_f64(*v)));
        row.push(prof.matched_tokens.to_string());
        row.push(prof.total_tokens.to_string());
        let prevailing: Vec<&str> = prevailing_emotions(prof, ctx.config.thresholds.emotion)
            .into_iter()
            .map(Emotion::as_str)
            .collect();
        row.push(prevailing.join(";"));
        t.push(row);
    }
    Ok(vec![ctx.emit(&t, "profiles")?])
}

#[derive(Debug, Clone, Default)]
pub struct ReportArgs {
    pub classified: PathBuf,
    pub posts: PathBuf,
    pub profiles: Option<PathBuf>,
    pub gold: Option<PathBuf>,
    /// `(tool name, predictions file)` pairs for the comparison table.
    pub external: Vec<(String, PathBuf)>,
}

fn missing_ids<'a>(
    what: &str,
    wanted: impl IntoIterator<Item = &'a String>,
    have: &dyn Fn(&str) -> bool,
) -> Result<()> {
    let missing: Vec<&str> = wanted.into_iter().map(String::as_str).filter(|id| !have(id)).collect();
    if missing.is_empty() {
        return Ok(());
    }
    const SHOWN: usize = 20;
    let mut list = missing.iter().take(SHOWN).copied().collect::<Vec<_>>().join(", ");
    if missing.len() > SHOWN {
        list.push_str(&format!(", ... ({} total)", missing.len()));
    }
    Err(Error::data(None, format!("{what} missing ids: {list}")))
}

fn emotion_cell(e: Option<Emotion>) -> String {
    e.map_or_else(|| "-".to_owned(), |e| e.as_str().to_owned())
}

/// Trend, emotion, engagement, keyword and bias tables; with gold labels
/// also metrics and a tool comparison.
pub fn cmd_report(ctx: &Context, args: &ReportArgs) -> Result<Vec<PathBuf>> {
    let cfg = &ctx.config;
    let posts = load_platform_posts(ctx, &args.posts)?;
    let classified = read_classified(&args.classified)?;
    let post_ids: BTreeSet<&str> = posts.iter().map(|p| p.id.as_str()).collect();
    missing_ids("classified file", posts.iter().map(|p| &p.id), &|id| {
        classified.contains_key(id)
    })?;
    missing_ids("posts file", classified.keys(), &|id| post_ids.contains(id))?;
    let profiles = match &args.profiles {
        Some(path) => {
            let profiles = read_profiles(path)?;
            missing_ids("profiles file", posts.iter().map(|p| &p.id), &|id| {
                profiles.contains_key(id)
            })?;
            Some(profiles)
        }
        None => None,
    };

    let label = |p: &Post| classified[&p.id].label;
    let mut written = Vec::new();

    let popular: Vec<TrendInput> = posts
        .iter()
        .filter(|p| is_popular(p))
        .map(|p| TrendInput {
            year: p.year(),
            label: label(p),
            profile: profiles.as_ref().map(|m| m[&p.id]),
        })
        .collect();
    let scope = cfg.report.emotion_scope;
    let mut t = Table::new([
        "year",
        "popular",
        "positive",
        "positive_pct",
        "negative",
        "negative_pct",
        "neutral",
        "neutral_pct",
        "emotion",
    ]);
    for r in yearly_trends(&popular, scope) {
        t.push([
            r.year.map_or_else(|| "total".to_owned(), |y| y.to_string()),
            r.popular.to_string(),
            r.positive.to_string(),
            fmt_pct(r.positive_pct),
            r.negative.to_string(),
            fmt_pct(r.negative_pct),
            r.neutral.to_string(),
            fmt_pct(r.neutral_pct),
            emotion_cell(r.emotion),
        ]);
    }
    written.push(ctx.emit(&t, "trends")?);

    if profiles.is_some() {
        let mut columns = vec!["year", "profiles"];
        columns.extend(Emotion::ALL.iter().map(|e| e.as_str()));
        let mut t = Table::new(columns);
        for r in emotion_trends(&popular, scope) {
            let mut row = vec![r.year.to_string(), r.profiles.to_string()];
            row.extend(r.mean.iter().map(|v| fmt_f64(*v)));
            t.push(row);
        }
        written.push(ctx.emit(&t, "emotion_trends")?);
    }

    let platform = cfg.corpus.platform.as_str();
    let mut t = Table::new(["platform", "label", "posts", "mean_engagement"]);
    for (l, s) in engagement_by_sentiment(posts.iter().map(|p| (p, label(p)))) {
        t.push([platform.to_owned(), l.to_string(), s.posts.to_string(), fmt_f64(s.mean)]);
    }
    written.push(ctx.emit(&t, "engagement")?);

    let mut t = Table::new(["keyword", "posts"]);
    for (k, n) in keyword_frequency(&posts, &cfg.keywords()?) {
        t.push([k, n.to_string()]);
    }
    written.push(ctx.emit(&t, "keywords")?);

    let points: Vec<(f64, f64)> = posts
        .iter()
        .filter(|p| is_viral(p, &cfg.thresholds.viral))
        .map(|p| (classified[&p.id].score, p.engagement() as f64))
        .collect();
    written.push(ctx.emit(&bias_table(platform, &points, cfg.report.bias_degree), "bias_fit")?);

    if let Some(gold_path) = &args.gold {
        written.extend(evaluation(ctx, gold_path, &classified, &args.external)?);
    }
    Ok(written)
}

fn bias_table(platform: &str, points: &[(f64, f64)], degree: usize) -> Table {
    let mut t = Table::new(["platform", "degree", "n_points", "rmse", "status", "coefficients"]);
    match fit_bias_curve(points, degree) {
        Ok(fit) => {
            let coefs: Vec<String> = fit.coefficients.iter().map(|c| fmt_f64(*c)).collect();
            t.push([
                platform.to_owned(),
                degree.to_string(),
                fit.n_points.to_string(),
                fmt_f64(fit.rmse),
                "ok".to_owned(),
                coefs.join(" "),
            ]);
        }
        Err(Error::Fit(msg)) => {
            warn!("bias fit skipped for {platform}: {msg}");
            t.push([
                platform.to_owned(),
                degree.to_string(),
                points.len().to_string(),
                String::new(),
                "skipped".to_owned(),
                String::new(),
            ]);
        }
        Err(e) => {
            warn!("bias fit failed for {platform}: {e}");
            t.push([
                platform.to_owned(),
                degree.to_string(),
                points.len().to_string(),
                String::new(),
                "failed".to_owned(),
                String::new(),
            ]);
        }
    }
    t
}

fn evaluate(
    gold: &BTreeMap<String, SentimentLabel>,
    what: &str,
    pred: &dyn Fn(&str) -> Option<SentimentLabel>,
) -> Result<MetricsReport> {
    missing_ids(what, gold.keys(), &|id| pred(id).is_some())?;
    let g: Vec<SentimentLabel> = gold.values().copied().collect();
    let p: Vec<SentimentLabel> = gold.keys().map(|id| pred(id).expect("checked above")).collect();
    metrics(&confusion(&g, &p)?)
}

fn evaluation(
    ctx: &Context,
    gold_path: &Path,
    classified: &BTreeMap<String, super::records::Classified>,
    external: &[(String, PathBuf)],
) -> Result<Vec<PathBuf>> {
    let gold = read_labels(gold_path)?;
    let report = evaluate(&gold, "classified file", &|id| classified.get(id).map(|c| c.label))?;
    let mut written = Vec::new();

    let mut t = Table::new(["label", "precision", "recall", "f1", "support", "predicted"]);
    for c in &report.per_class {
        t.push([
            c.label.to_string(),
            fmt_f64(c.precision),
            fmt_f64(c.recall),
            fmt_f64(c.f1),
            c.support.to_string(),
            c.predicted.to_string(),
        ]);
    }
    written.push(ctx.emit(&t, "metrics_per_class")?);

    let mut t = Table::new(["metric", "value"]);
    let rows = [
        ("total", report.total.to_string()),
        ("accuracy", fmt_f64(report.accuracy)),
        ("macro_precision", fmt_f64(report.macro_precision)),
        ("macro_recall", fmt_f64(report.macro_recall)),
        ("macro_f1", fmt_f64(report.macro_f1)),
        ("weighted_precision", fmt_f64(report.weighted_precision)),
        ("weighted_recall", fmt_f64(report.weighted_recall)),
        ("weighted_f1", fmt_f64(report.weighted_f1)),
        ("zero_division", report.zero_division.join(";")),
    ];
    for (k, v) in rows {
        t.push([k.to_owned(), v]);
    }
    written.push(ctx.emit(&t, "metrics")?);

    let mut t = Table::new(["tool", "accuracy", "precision", "recall", "f1"]);
    let push = |t: &mut Table, name: &str, r: &MetricsReport| {
        t.push([
            name.to_owned(),
            fmt_f64(r.accuracy),
            fmt_f64(r.weighted_precision),
            fmt_f64(r.weighted_recall),
            fmt_f64(r.weighted_f1),
        ]);
    };
    push(&mut t, "pmi", &report);
    for (name, path) in external {
        let preds = read_labels(path)?;
        let r = evaluate(&gold, &format!("predictions for {name}"), &|id| preds.get(id).copied())?;
        push(&mut t, name, &r);
    }
    written.push(ctx.emit(&t, "comparison")?);
    Ok(written)
}

#[derive(Debug, Clone, Default)]
pub struct AgreeArgs {
    pub annotations: PathBuf,
    pub weights: Option<PathBuf>,
}

/// Screen annotators, then score items and measure agreement on the
/// remaining panel.
pub fn cmd_agree(ctx: &Context, args: &AgreeArgs) -> Result<Vec<PathBuf>> {
    let band = ctx.config.band()?;
    let matrix = AnnotationMatrix::load(&args.annotations, args.weights.as_deref())?;
    let (screened, screen) = screen_annotators(&matrix, ctx.config.thresholds.drop_fraction);
    for id in &screen.dropped {
        warn!(
            "annotator {id} dropped: outlier rate at or above {}",
            screen.drop_fraction
        );
    }
    let mut written = Vec::new();

    let mut t = Table::new(["item_id", "weighted_score", "label"]);
    for (i, item) in screened.items().iter().enumerate() {
        let s = weighted_score(&screened, i)?;
        t.push([item.clone(), fmt_f64(s), to_label(s, band).as_int().to_string()]);
    }
    written.push(ctx.emit(&t, "item_scores")?);

    let mut t = Table::new(["annotator", "expert", "weight", "outlier_rate", "dropped"]);
    for (a, (id, rate)) in matrix.annotators().iter().zip(&screen.outlier_rates) {
        debug_assert_eq!(&a.id, id);
        t.push([
            a.id.clone(),
            a.expert.to_string(),
            fmt_f64(a.weight),
            fmt_f64(*rate),
            screen.dropped.contains(&a.id).to_string(),
        ]);
    }
    written.push(ctx.emit(&t, "outliers")?);

    let agreement = agreement_report(&screened, band)?;
    let mut columns = vec!["annotator".to_owned()];
    columns.extend(agreement.annotators.iter().cloned());
    let mut t = Table::new(columns);
    for a in &agreement.annotators {
        let mut row = vec![a.clone()];
        for b in &agreement.annotators {
            row.push(fmt_f64(agreement.kappa(a, b).expect("pair present")));
        }
        t.push(row);
    }
    written.push(ctx.emit(&t, "kappa")?);

    let mut t = Table::new(["metric", "value"]);
    t.push(["items".to_owned(), screened.items().len().to_string()]);
    t.push(["annotators".to_owned(), screened.annotators().len().to_string()]);
    t.push(["dropped".to_owned(), screen.dropped.join(";")]);
    t.push(["mean_kappa".to_owned(), fmt_f64(agreement.mean_kappa)]);
    written.push(ctx.emit(&t, "agreement")?);
    Ok(written)
}

#[derive(Debug, Clone, Default)]
pub struct BiasFitArgs {
    /// A `score,engagement` table.
    pub points: Option<PathBuf>,
    /// Alternatively, classified output plus the posts it came from; only
    /// viral posts contribute.
    pub classified: Option<PathBuf>,
    pub posts: Option<PathBuf>,
    pub degree: Option<usize>,
}

pub fn cmd_bias_fit(ctx: &Context, args: &BiasFitArgs) -> Result<Vec<PathBuf>> {
    let degree = args.degree.unwrap_or(ctx.config.report.bias_degree);
    let platform = ctx.config.corpus.platform;
    let points = match (&args.points, &args.classified, &args.posts) {
        (Some(p), None, None) => read_points(p)?,
        (None, Some(c), Some(p)) => {
            let classified = read_classified(c)?;
            let posts = load_platform_posts(ctx, p)?;
            missing_ids("classified file", posts.iter().map(|p| &p.id), &|id| {
                classified.contains_key(id)
            })?;
            posts
                .iter()
                .filter(|p| is_viral(p, &ctx.config.thresholds.viral))
                .map(|p| (classified[&p.id].score, p.engagement() as f64))
                .collect()
        }
        _ => {
            return Err(Error::Config(
                "bias-fit needs either --points or both --classified and --posts".into(),
            ))
        }
    };
    let fit = fit_bias_curve(&points, degree)?;
    let mut t = Table::new(["platform", "degree", "n_points", "rmse", "coefficients"]);
    let coefs: Vec<String> = fit.coefficients.iter().map(|c| fmt_f64(*c)).collect();
    t.push([
        platform.as_str().to_owned(),
        degree.to_string(),
        fit.n_points.to_string(),
        fmt_f64(fit.rmse),
        coefs.join(" "),
    ]);
    Ok(vec![ctx.emit(&t, "bias_fit")?])
}
