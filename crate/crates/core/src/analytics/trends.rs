use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::{filter_by_keywords, KeywordList, Post};
use crate::emotion::{dominant_emotion, mean_intensity, Emotion, EmotionProfile};
use crate::sentiment::SentimentLabel;

/// One classified post as seen by the trend tables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrendInput {
    pub year: i32,
    pub label: SentimentLabel,
    pub profile: Option<EmotionProfile>,
}

/// Which posts feed the per-year emotion columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmotionScope {
    /// Only posts classified negative.
    #[default]
    Negative,
    All,
}

impl EmotionScope {
    fn admits(self, label: SentimentLabel) -> bool {
        self == EmotionScope::All || label == SentimentLabel::Negative
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendRow {
    /// `None` for the totals row.
    pub year: Option<i32>,
    pub popular: u64,
    pub positive: u64,
    pub positive_pct: f64,
    pub negative: u64,
    pub negative_pct: f64,
    pub neutral: u64,
    pub neutral_pct: f64,
    pub emotion: Option<Emotion>,
}

/// `100 * count / total`, rounded half-up to two decimals. Computed in
/// integers so that ties round the same way on every platform.
pub fn round_pct(count: u64, total: u64) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let hundredths = (20_000 * u128::from(count) + u128::from(total)) / (2 * u128::from(total));
    hundredths as f64 / 100.0
}

fn row(year: Option<i32>, items: &[&TrendInput], scope: EmotionScope) -> TrendRow {
    let count = |l| items.iter().filter(|p| p.label == l).count() as u64;
    let popular = items.len() as u64;
    let (pos, neg, neu) = (
        count(SentimentLabel::Positive),
        count(SentimentLabel::Negative),
        count(SentimentLabel::Neutral),
    );
    let profiles: Vec<EmotionProfile> = items
        .iter()
        .filter(|p| scope.admits(p.label))
        .filter_map(|p| p.profile)
        .collect();
    TrendRow {
        year,
        popular,
        positive: pos,
        positive_pct: round_pct(pos, popular),
        negative: neg,
        negative_pct: round_pct(neg, popular),
        neutral: neu,
        neutral_pct: round_pct(neu, popular),
        emotion: dominant_emotion(&profiles),
    }
}

/// One row per calendar year in ascending order, then a totals row.
pub fn yearly_trends(posts: &[TrendInput], scope: EmotionScope) -> Vec<TrendRow> {
    let mut by_year: BTreeMap<i32, Vec<&TrendInput>> = BTreeMap::new();
    for p in posts {
        by_year.entry(p.year).or_default().push(p);
    }
    let mut rows: Vec<TrendRow> = by_year.iter().map(|(y, items)| row(Some(*y), items, scope)).collect();
    let all: Vec<&TrendInput> = posts.iter().collect();
    rows.push(row(None, &all, scope));
    rows
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmotionTrendRow {
    pub year: i32,
    pub profiles: usize,
    /// Mean intensity in `Emotion::ALL` order.
    pub mean: [f64; 8],
}

/// Mean emotion intensity per year over the posts admitted by `scope`.
pub fn emotion_trends(posts: &[TrendInput], scope: EmotionScope) -> Vec<EmotionTrendRow> {
    let mut by_year: BTreeMap<i32, Vec<EmotionProfile>> = BTreeMap::new();
    for p in posts.iter().filter(|p| scope.admits(p.label)) {
        if let Some(profile) = p.profile {
            by_year.entry(p.year).or_default().push(profile);
        }
    }
    by_year
        .into_iter()
        .filter_map(|(year, ps)| {
            mean_intensity(&ps).map(|mean| EmotionTrendRow {
                year,
                profiles: ps.len(),
                mean,
            })
        })
        .collect()
}

/// Matched-post count per keyword, in keyword-list order.
pub fn keyword_frequency<'a>(posts: impl IntoIterator<Item = &'a Post>, kw: &KeywordList) -> Vec<(String, usize)> {
    filter_by_keywords(posts.into_iter().map(|p| p.text.as_str()), kw).counts
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EngagementSummary {
    pub posts: u64,
    pub mean: f64,
}

/// Mean platform engagement (retweets, upvotes or likes) per label.
/// Labels with no posts are absent.
pub fn engagement_by_sentiment<'a>(
    posts: impl IntoIterator<Item = (&'a Post, SentimentLabel)>,
) -> BTreeMap<SentimentLabel, EngagementSummary> {
    let mut acc: BTreeMap<SentimentLabel, (u64, u128)> = BTreeMap::new();
    for (p, l) in posts {
        let e = acc.entry(l).or_default();
        e.0 += 1;
        e.1 += u128::from(p.engagement());
    }
    acc.into_iter()
        .map(|(l, (n, sum))| {
            (
                l,
                EngagementSummary {
                    posts: n,
                    mean: sum as f64 / n as f64,
                },
            )
        })
        .collect()
}
