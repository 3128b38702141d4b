//! PMI semantic-orientation sentiment model.
//!
//! Each vocabulary word gets a semantic orientation: the summed PMI with
//! positive events minus the summed PMI with negative events, divided by the
//! word's document frequency. A document's score is the sum of its tokens'
//! orientations, and a neutral band around zero turns scores into labels.
//!
//! Probabilities are estimated from document presence with add-k smoothing:
//! `P(w) = (df(w) + k) / (n + 2k)` and `P(w, e) = (df(w, e) + k) / (n + 4k)`.
//! Logarithms are base 2; the default neutral band of ±0.1 assumes that base.

mod counts;
mod model;

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use counts::{count, CooccurrenceCounts, Event};
pub use model::{
    from_counts, load_model, model_from_str, model_to_string, save_model, score_document, semantic_orientation, train,
    ModelStats, SentimentModel, MODEL_FORMAT, MODEL_VERSION,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SentimentLabel {
    Negative,
    Neutral,
    Positive,
}

impl SentimentLabel {
    pub const ALL: [SentimentLabel; 3] = [
        SentimentLabel::Negative,
        SentimentLabel::Neutral,
        SentimentLabel::Positive,
    ];

    /// -1, 0, +1.
    pub fn as_int(self) -> i8 {
        match self {
            SentimentLabel::Negative => -1,
            SentimentLabel::Neutral => 0,
            SentimentLabel::Positive => 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SentimentLabel::Negative => "negative",
            SentimentLabel::Neutral => "neutral",
            SentimentLabel::Positive => "positive",
        }
    }
}

impl fmt::Display for SentimentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SentimentLabel {
    type Err = Error;

    /// Accepts names (any case, `neg`/`pos` abbreviations) and -1/0/1.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_lowercase().as_str() {
            "negative" | "neg" | "-1" => Ok(SentimentLabel::Negative),
            "neutral" | "neu" | "0" => Ok(SentimentLabel::Neutral),
            "positive" | "pos" | "1" | "+1" => Ok(SentimentLabel::Positive),
            other => Err(Error::Input(format!("unknown sentiment label '{other}'"))),
        }
    }
}

/// Closed score interval mapped to neutral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeutralBand {
    pub low: f64,
    pub high: f64,
}

impl NeutralBand {
    pub fn new(low: f64, high: f64) -> Result<Self> {
        if !(low.is_finite() && high.is_finite() && low < high) {
            return Err(Error::Config(format!(
                "neutral band requires low < high, got [{low}, {high}]"
            )));
        }
        Ok(NeutralBand { low, high })
    }
}

impl Default for NeutralBand {
    fn default() -> Self {
        NeutralBand { low: -0.1, high: 0.1 }
    }
}

/// Below the band is negative, above is positive, the band itself
/// (endpoints included) is neutral.
pub fn classify(score: f64, band: NeutralBand) -> SentimentLabel {
    if score < band.low {
        SentimentLabel::Negative
    } else if score > band.high {
        SentimentLabel::Positive
    } else {
        SentimentLabel::Neutral
    }
}

/// Positive and negative seed words for `TrainMode::SeedWords`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedLexicons {
    pub positive: BTreeSet<String>,
    pub negative: BTreeSet<String>,
}

impl SeedLexicons {
    pub fn new<P, N, S, T>(positive: P, negative: N) -> Result<Self>
    where
        P: IntoIterator<Item = S>,
        N: IntoIterator<Item = T>,
        S: AsRef<str>,
        T: AsRef<str>,
    {
        let norm = |s: &str| s.trim().to_lowercase();
        let positive: BTreeSet<String> = positive
            .into_iter()
            .map(|s| norm(s.as_ref()))
            .filter(|s| !s.is_empty())
            .collect();
        let negative: BTreeSet<String> = negative
            .into_iter()
            .map(|s| norm(s.as_ref()))
            .filter(|s| !s.is_empty())
            .collect();
        if positive.is_empty() || negative.is_empty() {
            return Err(Error::Config("seed lexicons must both be non-empty".into()));
        }
        if let Some(w) = positive.intersection(&negative).next() {
            return Err(Error::Config(format!("seed word '{w}' is both positive and negative")));
        }
        Ok(SeedLexicons { positive, negative })
    }

    /// Word-per-line seed files.
    pub fn load(positive: &Path, negative: &Path) -> Result<Self> {
        let read = |p: &Path| std::fs::read_to_string(p).map_err(|e| Error::io(p, e));
        let pos = read(positive)?;
        let neg = read(negative)?;
        Self::new(pos.lines(), neg.lines())
    }

    pub fn all(&self) -> impl Iterator<Item = &str> {
        self.positive.iter().chain(self.negative.iter()).map(String::as_str)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrainMode {
    /// The positive/negative events are the document class labels.
    #[default]
    ClassLabel,
    /// The events are co-occurrences with user-supplied seed words.
    SeedWords,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub mode: TrainMode,
    pub smoothing_k: f64,
    pub min_freq: u64,
    pub log_base: u32,
    pub neutral_band: NeutralBand,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seeds: Option<SeedLexicons>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            mode: TrainMode::ClassLabel,
            smoothing_k: 0.5,
            min_freq: 3,
            log_base: 2,
            neutral_band: NeutralBand::default(),
            seeds: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.smoothing_k.is_finite() && self.smoothing_k > 0.0) {
            return Err(Error::Config(format!(
                "smoothing_k must be > 0, got {}",
                self.smoothing_k
            )));
        }
        if self.min_freq < 1 {
            return Err(Error::Config("min_freq must be >= 1".into()));
        }
        if self.log_base != 2 {
            return Err(Error::Config(format!("log_base is fixed at 2, got {}", self.log_base)));
        }
        NeutralBand::new(self.neutral_band.low, self.neutral_band.high)?;
        if self.mode == TrainMode::SeedWords {
            match &self.seeds {
                Some(s) => {
                    SeedLexicons::new(&s.positive, &s.negative)?;
                }
                None => return Err(Error::Config("seed_words mode requires seed lexicons".into())),
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classify_examples() {
        let band = NeutralBand::default();
        assert_eq!(classify(1.7, band), SentimentLabel::Positive);
        assert_eq!(classify(-2.31, band), SentimentLabel::Negative);
        assert_eq!(classify(-0.19, band), SentimentLabel::Negative);
        assert_eq!(classify(0.0, band), SentimentLabel::Neutral);
        assert_eq!(classify(0.1, band), SentimentLabel::Neutral);
        assert_eq!(classify(-0.1, band), SentimentLabel::Neutral);
    }

    #[test]
    fn band_must_be_ordered() {
        assert!(NeutralBand::new(0.1, -0.1).is_err());
        assert!(NeutralBand::new(0.1, 0.1).is_err());
    }

    #[test]
    fn label_order_and_parse() {
        assert!(SentimentLabel::Negative < SentimentLabel::Neutral);
        assert!(SentimentLabel::Neutral < SentimentLabel::Positive);
        assert_eq!("-1".parse::<SentimentLabel>().unwrap(), SentimentLabel::Negative);
        assert_eq!("Positive".parse::<SentimentLabel>().unwrap(), SentimentLabel::Positive);
        assert!("meh".parse::<SentimentLabel>().is_err());
    }

    #[test]
    fn seeds_must_be_disjoint_and_non_empty() {
        assert!(SeedLexicons::new(["good"], ["good"]).is_err());
        assert!(SeedLexicons::new(Vec::<&str>::new(), ["bad"]).is_err());
        let s = SeedLexicons::new(["Good "], ["bad"]).unwrap();
        assert!(s.positive.contains("good"));
    }

    #[test]
    fn config_validation() {
        assert!(TrainConfig::default().validate().is_ok());
        let bad_k = TrainConfig {
            smoothing_k: 0.0,
            ..Default::default()
        };
        assert!(bad_k.validate().unwrap_err().is_config());
        let no_seeds = TrainConfig {
            mode: TrainMode::SeedWords,
            ..Default::default()
        };
        assert!(no_seeds.validate().is_err());
    }

    proptest::proptest! {
        #[test]
        fn classify_is_monotone(a in -5.0f64..5.0, b in -5.0f64..5.0) {
            let band = NeutralBand::default();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            proptest::prop_assert!(classify(lo, band) <= classify(hi, band));
        }
    }
}
