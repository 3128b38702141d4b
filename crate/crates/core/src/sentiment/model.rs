use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::Polarity;
use crate::error::{Error, Result};
use crate::preprocess::TokenSeq;

use super::counts::{CooccurrenceCounts, Event};
use super::{TrainConfig, TrainMode};

pub const MODEL_FORMAT: &str = "ecosent-sentiment-model";
pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelStats {
    pub n_docs: u64,
    pub n_pos_docs: u64,
    pub n_neg_docs: u64,
}

/// Trained word orientations. Immutable once built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentimentModel {
    pub config: TrainConfig,
    pub stats: ModelStats,
    /// Semantic orientation per vocabulary word.
    pub so: BTreeMap<String, f64>,
    /// Training document frequency per vocabulary word.
    pub freq: BTreeMap<String, u64>,
}

impl SentimentModel {
    pub fn so(&self, word: &str) -> Option<f64> {
        self.so.get(word).copied()
    }

    pub fn vocab_size(&self) -> usize {
        self.so.len()
    }

    pub fn score(&self, ts: &TokenSeq) -> f64 {
        score_document(self, ts)
    }
}

/// Orientation of `w`, or `None` when its document frequency is below
/// `min_freq`.
pub fn semantic_orientation(counts: &CooccurrenceCounts, w: &str, cfg: &TrainConfig) -> Option<f64> {
    let freq = counts.doc_freq(w);
    if freq < cfg.min_freq || freq == 0 {
        return None;
    }
    let k = cfg.smoothing_k;
    let diff = match (cfg.mode, &cfg.seeds) {
        (TrainMode::SeedWords, Some(seeds)) => {
            let pos: f64 = seeds.positive.iter().map(|p| counts.pmi(w, Event::Word(p), k)).sum();
            let neg: f64 = seeds.negative.iter().map(|n| counts.pmi(w, Event::Word(n), k)).sum();
            pos - neg
        }
        _ => counts.pmi(w, Event::Class(Polarity::Positive), k) - counts.pmi(w, Event::Class(Polarity::Negative), k),
    };
    Some(diff / freq as f64)
}

/// Train on tokenized, labeled documents.
pub fn train(corpus: &[(TokenSeq, Polarity)], cfg: &TrainConfig) -> Result<SentimentModel> {
    cfg.validate()?;
    if corpus.is_empty() {
        return Err(Error::Training("corpus is empty".into()));
    }
    let seeds = match cfg.mode {
        TrainMode::SeedWords => cfg.seeds.as_ref(),
        TrainMode::ClassLabel => None,
    };
    let counts = corpus
        .par_iter()
        .fold(CooccurrenceCounts::default, |mut acc, (ts, label)| {
            acc.add(ts, *label, seeds);
            acc
        })
        .reduce(CooccurrenceCounts::default, CooccurrenceCounts::merge);
    if counts.n_pos_docs == 0 || counts.n_neg_docs == 0 {
        return Err(Error::Training(format!(
            "need at least one document per class, got {} positive and {} negative",
            counts.n_pos_docs, counts.n_neg_docs
        )));
    }
    Ok(from_counts(&counts, cfg))
}

/// Build a model from pre-computed (possibly merged) counts.
pub fn from_counts(counts: &CooccurrenceCounts, cfg: &TrainConfig) -> SentimentModel {
    let mut so = BTreeMap::new();
    let mut freq = BTreeMap::new();
    for (w, &df) in &counts.doc_freq {
        if let Some(v) = semantic_orientation(counts, w, cfg) {
            so.insert(w.clone(), v);
            freq.insert(w.clone(), df);
        }
    }
    if so.is_empty() {
        log::warn!("no word reaches min_freq = {}; model is empty", cfg.min_freq);
    }
    SentimentModel {
        config: cfg.clone(),
        stats: ModelStats {
            n_docs: counts.n_docs,
            n_pos_docs: counts.n_pos_docs,
            n_neg_docs: counts.n_neg_docs,
        },
        so,
        freq,
    }
}

/// Sum of token orientations; unknown tokens contribute 0.
pub fn score_document(m: &SentimentModel, ts: &TokenSeq) -> f64 {
    ts.iter().map(|t| m.so(t).unwrap_or(0.0)).sum()
}

#[derive(Serialize, Deserialize)]
struct Envelope {
    format: String,
    version: u32,
    checksum: String,
    model: SentimentModel,
}

fn checksum(m: &SentimentModel) -> Result<String> {
    let canonical = serde_json::to_vec(m)?;
    Ok(hex::encode(Sha256::digest(&canonical)))
}

/// Serialize to the canonical JSON model format.
pub fn model_to_string(m: &SentimentModel) -> Result<String> {
    if let Some((w, v)) = m.so.iter().find(|(_, v)| !v.is_finite()) {
        return Err(Error::ModelFormat(format!("non-finite orientation {v} for '{w}'")));
    }
    let env = Envelope {
        format: MODEL_FORMAT.to_owned(),
        version: MODEL_VERSION,
        checksum: checksum(m)?,
        model: m.clone(),
    };
    let mut s = serde_json::to_string_pretty(&env)?;
    s.push('\n');
    Ok(s)
}

pub fn model_from_str(s: &str) -> Result<SentimentModel> {
    let env: Envelope = serde_json::from_str(s).map_err(|e| Error::ModelFormat(e.to_string()))?;
    if env.format != MODEL_FORMAT {
        return Err(Error::ModelFormat(format!("unexpected format tag '{}'", env.format)));
    }
    if env.version != MODEL_VERSION {
        return Err(Error::ModelFormat(format!(
            "unsupported model version {} (expected {MODEL_VERSION})",
            env.version
        )));
    }
    if checksum(&env.model)? != env.checksum {
        return Err(Error::ModelFormat("checksum mismatch".into()));
    }
    env.model
        .config
        .validate()
        .map_err(|e| Error::ModelFormat(e.to_string()))?;
    if env.model.so.keys().ne(env.model.freq.keys()) {
        return Err(Error::ModelFormat("so and freq tables cover different words".into()));
    }
    if env.model.so.is_empty() {
        log::warn!("loaded an empty sentiment model");
    }
    Ok(env.model)
}

pub fn save_model(m: &SentimentModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let s = model_to_string(m)?;
    crate::output::write_atomic(path, s.as_bytes())
}

pub fn load_model(path: impl AsRef<Path>) -> Result<SentimentModel> {
    let path = path.as_ref();
    let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    model_from_str(&s)
}
