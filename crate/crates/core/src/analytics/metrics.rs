use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sentiment::SentimentLabel;

fn idx(l: SentimentLabel) -> usize {
    match l {
        SentimentLabel::Negative => 0,
        SentimentLabel::Neutral => 1,
        SentimentLabel::Positive => 2,
    }
}

/// Gold (row) by predicted (column) counts over the three labels.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: [[u64; 3]; 3],
}

impl ConfusionMatrix {
    pub fn get(&self, gold: SentimentLabel, pred: SentimentLabel) -> u64 {
        self.counts[idx(gold)][idx(pred)]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    fn support(&self, l: SentimentLabel) -> u64 {
        self.counts[idx(l)].iter().sum()
    }

    fn predicted(&self, l: SentimentLabel) -> u64 {
        self.counts.iter().map(|row| row[idx(l)]).sum()
    }
}

pub fn confusion(gold: &[SentimentLabel], pred: &[SentimentLabel]) -> Result<ConfusionMatrix> {
    if gold.len() != pred.len() {
        return Err(Error::Input(format!(
            "gold has {} labels, predictions {}",
            gold.len(),
            pred.len()
        )));
    }
    if gold.is_empty() {
        return Err(Error::Input("no labels to compare".into()));
    }
    let mut cm = ConfusionMatrix::default();
    for (&g, &p) in gold.iter().zip(pred) {
        cm.counts[idx(g)][idx(p)] += 1;
    }
    Ok(cm)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub label: SentimentLabel,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
    pub predicted: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub total: u64,
    pub accuracy: f64,
    /// Classes that occur in the gold labels or the predictions.
    pub per_class: Vec<ClassMetrics>,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub weighted_precision: f64,
    pub weighted_recall: f64,
    pub weighted_f1: f64,
    /// Metrics that hit a zero denominator and were set to 0, e.g.
    /// "precision:neutral".
    pub zero_division: Vec<String>,
}

impl MetricsReport {
    pub fn class(&self, l: SentimentLabel) -> Option<&ClassMetrics> {
        self.per_class.iter().find(|c| c.label == l)
    }
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// One-vs-rest precision, recall and F1 per class, with macro and
/// support-weighted averages.
pub fn metrics(cm: &ConfusionMatrix) -> Result<MetricsReport> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::Input("confusion matrix is empty".into()));
    }
    let mut zero_division = Vec::new();
    let mut per_class = Vec::new();
    for l in SentimentLabel::ALL {
        let support = cm.support(l);
        let predicted = cm.predicted(l);
        if support == 0 && predicted == 0 {
            continue;
        }
        let tp = cm.get(l, l);
        let precision = ratio(tp, predicted).unwrap_or_else(|| {
            zero_division.push(format!("precision:{l}"));
            0.0
        });
        let recall = ratio(tp, support).unwrap_or_else(|| {
            zero_division.push(format!("recall:{l}"));
            0.0
        });
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        per_class.push(ClassMetrics {
            label: l,
            precision,
            recall,
            f1,
            support,
            predicted,
        });
    }
    let k = per_class.len() as f64;
    let mean = |f: fn(&ClassMetrics) -> f64| per_class.iter().map(f).sum::<f64>() / k;
    let weighted =
        |f: fn(&ClassMetrics) -> f64| per_class.iter().map(|c| f(c) * c.support as f64).sum::<f64>() / total as f64;
    let diagonal: u64 = (0..3).map(|i| cm.counts[i][i]).sum();
    Ok(MetricsReport {
        total,
        accuracy: diagonal as f64 / total as f64,
        macro_precision: mean(|c| c.precision),
        macro_recall: mean(|c| c.recall),
        macro_f1: mean(|c| c.f1),
        weighted_precision: weighted(|c| c.precision),
        weighted_recall: weighted(|c| c.recall),
        weighted_f1: weighted(|c| c.f1),
        per_class,
        zero_division,
    })
}
