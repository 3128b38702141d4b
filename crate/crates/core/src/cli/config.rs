use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::analytics::EmotionScope;
use crate::corpus::{KeywordList, LabeledLayout, Platform, ViralThresholds, YearWindow};
use crate::emotion::{EmotionLexicon, PREVAILING_THRESHOLD};
use crate::error::{Error, Result};
use crate::output::Format;
use crate::preprocess::ResourceSet;
use crate::sentiment::{NeutralBand, SeedLexicons, TrainConfig, TrainMode};

/// Declarative run configuration, read from TOML. Relative paths are
/// resolved against the directory holding the config file.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub resources: Resources,
    pub train: TrainSection,
    pub corpus: CorpusSection,
    pub thresholds: Thresholds,
    pub report: ReportSection,
    pub output: OutputSection,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Resources {
    pub slang: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub emotion_lexicon: Option<PathBuf>,
    pub positive_seeds: Option<PathBuf>,
    pub negative_seeds: Option<PathBuf>,
    pub keywords: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSection {
    pub mode: TrainMode,
    pub smoothing_k: f64,
    pub min_freq: u64,
    pub neutral_band: [f64; 2],
    /// Keep only training documents matching a keyword.
    pub keyword_filter: bool,
    /// `header` (label,text columns) or `sentiment140`.
    pub layout: String,
}

impl Default for TrainSection {
    fn default() -> Self {
        let d = TrainConfig::default();
        TrainSection {
            mode: d.mode,
            smoothing_k: d.smoothing_k,
            min_freq: d.min_freq,
            neutral_band: [d.neutral_band.low, d.neutral_band.high],
            keyword_filter: false,
            layout: "header".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusSection {
    pub platform: Platform,
    pub min_year: Option<i32>,
    pub max_year: Option<i32>,
}

impl Default for CorpusSection {
    fn default() -> Self {
        CorpusSection {
            platform: Platform::Twitter,
            min_year: None,
            max_year: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    pub viral: ViralThresholds,
    pub emotion: f64,
    pub drop_fraction: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            viral: ViralThresholds::default(),
            emotion: PREVAILING_THRESHOLD,
            drop_fraction: crate::annotation::DEFAULT_DROP_FRACTION,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportSection {
    pub bias_degree: usize,
    pub emotion_scope: EmotionScope,
}

impl Default for ReportSection {
    fn default() -> Self {
        ReportSection {
            bias_degree: 2,
            emotion_scope: EmotionScope::Negative,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub format: Format,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: PathBuf::from("out"),
            format: Format::Csv,
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.resolve_paths(base);
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    fn resolve_paths(&mut self, base: &Path) {
        let r = &mut self.resources;
        for p in [
            &mut r.slang,
            &mut r.stopwords,
            &mut r.emotion_lexicon,
            &mut r.positive_seeds,
            &mut r.negative_seeds,
            &mut r.keywords,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        if self.output.dir.is_relative() {
            self.output.dir = base.join(&self.output.dir);
        }
    }

    /// Every referenced resource file must exist and thresholds be sane.
    pub fn validate(&self) -> Result<()> {
        let r = &self.resources;
        for (name, p) in [
            ("slang", &r.slang),
            ("stopwords", &r.stopwords),
            ("emotion_lexicon", &r.emotion_lexicon),
            ("positive_seeds", &r.positive_seeds),
            ("negative_seeds", &r.negative_seeds),
            ("keywords", &r.keywords),
        ] {
            if let Some(p) = p {
                if !p.is_file() {
                    return Err(Error::Config(format!("{name} file not found: {}", p.display())));
                }
            }
        }
        if r.positive_seeds.is_some() != r.negative_seeds.is_some() {
            return Err(Error::Config(
                "positive_seeds and negative_seeds must be given together".into(),
            ));
        }
        if !(self.thresholds.emotion > 0.0 && self.thresholds.emotion < 1.0) {
            return Err(Error::Config("emotion threshold must lie in (0, 1)".into()));
        }
        if !(self.thresholds.drop_fraction > 0.0 && self.thresholds.drop_fraction <= 1.0) {
            return Err(Error::Config("drop_fraction must lie in (0, 1]".into()));
        }
        if let (Some(lo), Some(hi)) = (self.corpus.min_year, self.corpus.max_year) {
            if lo > hi {
                return Err(Error::Config(format!("min_year {lo} exceeds max_year {hi}")));
            }
        }
        self.layout()?;
        self.train_config()?.validate()
    }

    pub fn layout(&self) -> Result<LabeledLayout> {
        match self.train.layout.to_lowercase().as_str() {
            "header" => Ok(LabeledLayout::Header),
            "sentiment140" => Ok(LabeledLayout::Sentiment140),
            other => Err(Error::Config(format!("unknown labeled layout '{other}'"))),
        }
    }

    pub fn band(&self) -> Result<NeutralBand> {
        NeutralBand::new(self.train.neutral_band[0], self.train.neutral_band[1])
    }

    pub fn seeds(&self) -> Result<Option<SeedLexicons>> {
        match (&self.resources.positive_seeds, &self.resources.negative_seeds) {
            (Some(p), Some(n)) => SeedLexicons::load(p, n).map(Some),
            _ => Ok(None),
        }
    }

    pub fn train_config(&self) -> Result<TrainConfig> {
        let seeds = match self.train.mode {
            TrainMode::SeedWords => {
                let s = self.seeds()?;
                if s.is_none() {
                    return Err(Error::Config(
                        "seed_words mode requires positive_seeds and negative_seeds".into(),
                    ));
                }
                s
            }
            TrainMode::ClassLabel => None,
        };
        Ok(TrainConfig {
            mode: self.train.mode,
            smoothing_k: self.train.smoothing_k,
            min_freq: self.train.min_freq,
            log_base: 2,
            neutral_band: self.band()?,
            seeds,
        })
    }

    pub fn window(&self) -> Option<YearWindow> {
        match (self.corpus.min_year, self.corpus.max_year) {
            (None, None) => None,
            (lo, hi) => Some(YearWindow {
                min_year: lo.unwrap_or(i32::MIN),
                max_year: hi.unwrap_or(i32::MAX),
            }),
        }
    }

    pub fn resource_set(&self) -> Result<ResourceSet> {
        ResourceSet::load(self.resources.slang.as_deref(), self.resources.stopwords.as_deref())
    }

    pub fn keywords(&self) -> Result<KeywordList> {
        match &self.resources.keywords {
            Some(p) => KeywordList::load(p),
            None => Ok(KeywordList::default()),
        }
    }

    pub fn emotion_lexicon(&self) -> Result<EmotionLexicon> {
        match &self.resources.emotion_lexicon {
            Some(p) => EmotionLexicon::load(p),
            None => Err(Error::Config("no emotion_lexicon configured".into())),
        }
    }
}
