//! Word-emotion lexicon scoring.
//!
//! A document's profile distributes one unit of mass over the emotions its
//! tokens are tagged with: every (token occurrence, emotion) pair counts
//! once, and each intensity is that emotion's share of all pairs. A token
//! tagged with both fear and sadness therefore yields 0.5 / 0.5.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::preprocess::TokenSeq;

/// The eight emotions, declared in tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Emotion {
    Fear,
    Anger,
    Anticipation,
    Trust,
    Surprise,
    Sadness,
    Disgust,
    Joy,
}

impl Emotion {
    pub const ALL: [Emotion; 8] = [
        Emotion::Fear,
        Emotion::Anger,
        Emotion::Anticipation,
        Emotion::Trust,
        Emotion::Surprise,
        Emotion::Sadness,
        Emotion::Disgust,
        Emotion::Joy,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Emotion::Fear => "fear",
            Emotion::Anger => "anger",
            Emotion::Anticipation => "anticipation",
            Emotion::Trust => "trust",
            Emotion::Surprise => "surprise",
            Emotion::Sadness => "sadness",
            Emotion::Disgust => "disgust",
            Emotion::Joy => "joy",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Emotion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Emotion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Emotion::ALL
            .into_iter()
            .find(|e| e.as_str() == s.trim().to_lowercase())
            .ok_or_else(|| Error::Input(format!("unknown emotion '{s}'")))
    }
}

/// Categories present in NRC exports that are deliberately not used.
const IGNORED_CATEGORIES: [&str; 3] = ["positive", "negative", "anticip"];

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EmotionLexicon {
    assoc: BTreeMap<String, BTreeSet<Emotion>>,
}

impl EmotionLexicon {
    pub fn from_entries<S: AsRef<str>>(entries: impl IntoIterator<Item = (S, Emotion)>) -> Self {
        let mut assoc: BTreeMap<String, BTreeSet<Emotion>> = BTreeMap::new();
        for (w, e) in entries {
            assoc.entry(w.as_ref().to_lowercase()).or_default().insert(e);
        }
        EmotionLexicon { assoc }
    }

    /// Parse the three-column `word<TAB>emotion<TAB>flag` format.
    pub fn parse(text: &str) -> Result<Self> {
        let mut assoc: BTreeMap<String, BTreeSet<Emotion>> = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
            let [word, category, flag] = cols[..] else {
                return Err(Error::data(
                    i + 1,
                    format!("expected 3 tab-separated columns, got {}", cols.len()),
                ));
            };
            let category = category.to_lowercase();
            let flag = match flag {
                "0" => false,
                "1" => true,
                other => return Err(Error::data(i + 1, format!("flag must be 0 or 1, got '{other}'"))),
            };
            if IGNORED_CATEGORIES.contains(&category.as_str()) {
                continue;
            }
            let emotion: Emotion = category
                .parse()
                .map_err(|_| Error::data(i + 1, format!("unknown emotion '{category}'")))?;
            if flag && !word.is_empty() {
                assoc.entry(word.to_lowercase()).or_default().insert(emotion);
            }
        }
        if assoc.is_empty() {
            log::warn!("emotion lexicon has no entries");
        }
        Ok(EmotionLexicon { assoc })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn emotions(&self, word: &str) -> Option<&BTreeSet<Emotion>> {
        self.assoc.get(word)
    }

    pub fn len(&self) -> usize {
        self.assoc.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assoc.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmotionProfile {
    /// Indexed in `Emotion::ALL` order.
    pub intensity: [f64; 8],
    pub matched_tokens: usize,
    pub total_tokens: usize,
}

impl EmotionProfile {
    pub fn get(&self, e: Emotion) -> f64 {
        self.intensity[e.index()]
    }

    pub fn zero(total_tokens: usize) -> Self {
        EmotionProfile {
            intensity: [0.0; 8],
            matched_tokens: 0,
            total_tokens,
        }
    }
}

pub fn emotion_profile(lex: &EmotionLexicon, ts: &TokenSeq) -> EmotionProfile {
    let mut tags = [0usize; 8];
    let mut matched = 0;
    for tok in ts.iter() {
        if let Some(es) = lex.emotions(tok) {
            if !es.is_empty() {
                matched += 1;
            }
            for e in es {
                tags[e.index()] += 1;
            }
        }
    }
    let total_tags: usize = tags.iter().sum();
    if total_tags == 0 {
        return EmotionProfile::zero(ts.len());
    }
    let mut intensity = [0.0; 8];
    for (out, &n) in intensity.iter_mut().zip(&tags) {
        *out = n as f64 / total_tags as f64;
    }
    EmotionProfile {
        intensity,
        matched_tokens: matched,
        total_tokens: ts.len(),
    }
}

pub const PREVAILING_THRESHOLD: f64 = 0.25;

/// Emotions whose intensity is strictly above `threshold`.
pub fn prevailing_emotions(p: &EmotionProfile, threshold: f64) -> BTreeSet<Emotion> {
    Emotion::ALL.into_iter().filter(|&e| p.get(e) > threshold).collect()
}

/// Mean intensity per emotion across profiles; `None` for no profiles.
pub fn mean_intensity(profiles: &[EmotionProfile]) -> Option<[f64; 8]> {
    if profiles.is_empty() {
        return None;
    }
    let mut sum = [0.0; 8];
    for p in profiles {
        for (s, v) in sum.iter_mut().zip(p.intensity) {
            *s += v;
        }
    }
    Some(sum.map(|s| s / profiles.len() as f64))
}

/// Emotion with the highest mean intensity, ties going to the earlier
/// emotion in `Emotion::ALL`. `None` when there are no profiles or none
/// carries any emotion.
pub fn dominant_emotion(profiles: &[EmotionProfile]) -> Option<Emotion> {
    let means = mean_intensity(profiles)?;
    let mut best: Option<(Emotion, f64)> = None;
    for e in Emotion::ALL {
        let v = means[e.index()];
        if v > 0.0 && best.is_none_or(|(_, b)| v > b) {
            best = Some((e, v));
        }
    }
    best.map(|(e, _)| e)
}
