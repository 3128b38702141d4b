//! Reporting layer: classifier evaluation, yearly trend tables, keyword
//! and engagement summaries, and the engagement-vs-sentiment polynomial fit.

mod bias;
mod metrics;
mod trends;

pub use bias::{fit_bias_curve, BiasFit};
pub use metrics::{confusion, metrics, ClassMetrics, ConfusionMatrix, MetricsReport};
pub use trends::{
    emotion_trends, engagement_by_sentiment, keyword_frequency, round_pct, yearly_trends, EmotionScope,
    EmotionTrendRow, EngagementSummary, TrendInput, TrendRow,
};
