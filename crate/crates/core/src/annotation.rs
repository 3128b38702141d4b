//! Human annotation aggregation: expert-weighted scores, outlier screening,
//! label conversion and pairwise Cohen's kappa.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::hash::Hash;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sentiment::{classify, NeutralBand, SentimentLabel};

pub const MIN_SCORE: i8 = -5;
pub const MAX_SCORE: i8 = 5;
pub const EXPERT_WEIGHT: f64 = 2.0;
pub const DEFAULT_DROP_FRACTION: f64 = 0.6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Annotator {
    pub id: String,
    pub weight: f64,
    #[serde(default)]
    pub expert: bool,
}

impl Annotator {
    pub fn new(id: impl Into<String>, expert: bool) -> Self {
        Annotator {
            id: id.into(),
            weight: if expert { EXPERT_WEIGHT } else { 1.0 },
            expert,
        }
    }
}

/// Items × annotators grid of integer scores in [-5, 5].
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotationMatrix {
    items: Vec<String>,
    annotators: Vec<Annotator>,
    /// Row per item, column per annotator.
    scores: Vec<Vec<i8>>,
}

impl AnnotationMatrix {
    pub fn new(items: Vec<String>, annotators: Vec<Annotator>, scores: Vec<Vec<i8>>) -> Result<Self> {
        if scores.len() != items.len() {
            return Err(Error::Input(format!(
                "{} items but {} score rows",
                items.len(),
                scores.len()
            )));
        }
        for a in &annotators {
            if !(a.weight.is_finite() && a.weight > 0.0) {
                return Err(Error::Input(format!(
                    "annotator '{}' has non-positive weight {}",
                    a.id, a.weight
                )));
            }
        }
        let unique: BTreeSet<&str> = annotators.iter().map(|a| a.id.as_str()).collect();
        if unique.len() != annotators.len() {
            return Err(Error::Input("duplicate annotator id".into()));
        }
        for (item, row) in items.iter().zip(&scores) {
            if row.len() != annotators.len() {
                return Err(Error::Input(format!(
                    "item '{item}' has {} scores for {} annotators",
                    row.len(),
                    annotators.len()
                )));
            }
            if let Some(s) = row.iter().find(|s| !(MIN_SCORE..=MAX_SCORE).contains(*s)) {
                return Err(Error::Input(format!("item '{item}' has score {s} outside [-5, 5]")));
            }
        }
        Ok(AnnotationMatrix {
            items,
            annotators,
            scores,
        })
    }

    /// Read the CSV grid (`item_id`, then one column per annotator) and
    /// apply weights from the sidecar. Annotators missing from the sidecar
    /// get weight 1.
    pub fn read_csv<R: Read>(reader: R, weights: &WeightsFile) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.get(0).map(|h| h.eq_ignore_ascii_case("item_id")) != Some(true) {
            return Err(Error::data(1, "first column must be item_id"));
        }
        let declared = weights.resolved();
        let annotators: Vec<Annotator> = headers
            .iter()
            .skip(1)
            .map(|id| {
                declared
                    .iter()
                    .find(|a| a.id == id)
                    .cloned()
                    .unwrap_or_else(|| Annotator::new(id, false))
            })
            .collect();
        let mut items = Vec::new();
        let mut scores = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let line = rec.position().map(|p| p.line() as usize);
            let item = rec.get(0).unwrap_or_default().to_owned();
            let mut row = Vec::with_capacity(annotators.len());
            for (j, a) in annotators.iter().enumerate() {
                let cell = rec.get(j + 1).unwrap_or_default();
                if cell.is_empty() {
                    return Err(Error::data(
                        line,
                        format!("missing score for item '{item}', annotator '{}'", a.id),
                    ));
                }
                let v: i8 = cell
                    .parse()
                    .map_err(|_| Error::data(line, format!("score '{cell}' is not an integer")))?;
                if !(MIN_SCORE..=MAX_SCORE).contains(&v) {
                    return Err(Error::data(line, format!("score {v} outside [-5, 5]")));
                }
                row.push(v);
            }
            items.push(item);
            scores.push(row);
        }
        Self::new(items, annotators, scores)
    }

    pub fn load(csv_path: &Path, weights_path: Option<&Path>) -> Result<Self> {
        let weights = match weights_path {
            Some(p) => WeightsFile::load(p)?,
            None => WeightsFile::default(),
        };
        let f = std::fs::File::open(csv_path).map_err(|e| Error::io(csv_path, e))?;
        Self::read_csv(f, &weights)
    }

    pub fn items(&self) -> &[String] {
        &self.items
    }

    pub fn annotators(&self) -> &[Annotator] {
        &self.annotators
    }

    pub fn scores(&self, item: usize) -> &[i8] {
        &self.scores[item]
    }

    pub fn item_index(&self, id: &str) -> Option<usize> {
        self.items.iter().position(|i| i == id)
    }

    /// Same items, keeping only the annotators for which `keep` is true.
    pub fn retain_annotators(&self, keep: impl Fn(&Annotator) -> bool) -> AnnotationMatrix {
        let cols: Vec<usize> = (0..self.annotators.len())
            .filter(|&j| keep(&self.annotators[j]))
            .collect();
        AnnotationMatrix {
            items: self.items.clone(),
            annotators: cols.iter().map(|&j| self.annotators[j].clone()).collect(),
            scores: self
                .scores
                .iter()
                .map(|row| cols.iter().map(|&j| row[j]).collect())
                .collect(),
        }
    }
}

/// Sidecar declaring annotator weights and expert flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct WeightsFile {
    pub annotators: Vec<AnnotatorDecl>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotatorDecl {
    pub id: String,
    #[serde(default)]
    pub expert: bool,
    /// Defaults to 2 for experts, 1 otherwise.
    pub weight: Option<f64>,
}

impl WeightsFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let w: WeightsFile =
            serde_json::from_str(&text).map_err(|e| Error::data(None, format!("{}: {e}", path.display())))?;
        Ok(w)
    }

    fn resolved(&self) -> Vec<Annotator> {
        self.annotators
            .iter()
            .map(|d| Annotator {
                id: d.id.clone(),
                weight: d.weight.unwrap_or(if d.expert { EXPERT_WEIGHT } else { 1.0 }),
                expert: d.expert,
            })
            .collect()
    }
}

/// Weighted mean of an item's scores.
pub fn weighted_score(m: &AnnotationMatrix, item: usize) -> Result<f64> {
    if m.annotators.is_empty() {
        return Err(Error::UndefinedScore(format!(
            "item '{}' has no remaining annotators",
            m.items[item]
        )));
    }
    let (num, den) = m.scores[item]
        .iter()
        .zip(&m.annotators)
        .fold((0.0, 0.0), |(n, d), (&s, a)| {
            (n + a.weight * f64::from(s), d + a.weight)
        });
    Ok(num / den)
}

/// Indices of scores whose distance from the row mean strictly exceeds the
/// row's population standard deviation (the mean and deviation include the
/// score being tested).
pub fn outlier_positions(scores: &[i8]) -> BTreeSet<usize> {
    let n = scores.len() as i64;
    if n < 2 {
        return BTreeSet::new();
    }
    // |s - S/n| > sqrt(Q/n - (S/n)^2)  <=>  (n s - S)^2 > n Q - S^2, exactly.
    let sum: i64 = scores.iter().map(|&s| i64::from(s)).sum();
    let sq: i64 = scores.iter().map(|&s| i64::from(s) * i64::from(s)).sum();
    let spread = n * sq - sum * sum;
    scores
        .iter()
        .enumerate()
        .filter(|(_, &s)| {
            let d = n * i64::from(s) - sum;
            d * d > spread
        })
        .map(|(i, _)| i)
        .collect()
}

/// Annotator ids flagged as outliers on `item`.
pub fn detect_outliers(m: &AnnotationMatrix, item: usize) -> BTreeSet<String> {
    outlier_positions(&m.scores[item])
        .into_iter()
        .map(|j| m.annotators[j].id.clone())
        .collect()
}

/// Fraction of items on which each annotator is an outlier, in annotator order.
pub fn outlier_rates(m: &AnnotationMatrix) -> Vec<(String, f64)> {
    let mut hits = vec![0usize; m.annotators.len()];
    for row in &m.scores {
        for j in outlier_positions(row) {
            hits[j] += 1;
        }
    }
    let n_items = m.items.len();
    m.annotators
        .iter()
        .zip(hits)
        .map(|(a, h)| {
            let rate = if n_items == 0 { 0.0 } else { h as f64 / n_items as f64 };
            (a.id.clone(), rate)
        })
        .collect()
}

/// Ids whose outlier rate reaches `drop_fraction`.
pub fn annotators_to_drop(rates: &[(String, f64)], drop_fraction: f64) -> BTreeSet<String> {
    rates
        .iter()
        .filter(|(_, r)| *r >= drop_fraction)
        .map(|(id, _)| id.clone())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreenReport {
    pub drop_fraction: f64,
    pub outlier_rates: Vec<(String, f64)>,
    pub dropped: Vec<String>,
}

/// Remove annotators whose outlier rate is at least `drop_fraction`.
pub fn screen_annotators(m: &AnnotationMatrix, drop_fraction: f64) -> (AnnotationMatrix, ScreenReport) {
    let rates = outlier_rates(m);
    let dropped = annotators_to_drop(&rates, drop_fraction);
    let screened = m.retain_annotators(|a| !dropped.contains(&a.id));
    let report = ScreenReport {
        drop_fraction,
        outlier_rates: rates,
        dropped: m
            .annotators
            .iter()
            .filter(|a| dropped.contains(&a.id))
            .map(|a| a.id.clone())
            .collect(),
    };
    (screened, report)
}

pub fn to_label(score: f64, band: NeutralBand) -> SentimentLabel {
    classify(score, band)
}

/// Cohen's kappa with chance agreement from the product of the two raters'
/// per-category marginals. Defined as 1 when chance agreement is 1.
pub fn cohen_kappa<T: Eq + Hash>(a: &[T], b: &[T]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Input(format!(
            "label sequences differ in length: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::Input("label sequences are empty".into()));
    }
    let n = a.len() as f64;
    let agree = a.iter().zip(b).filter(|(x, y)| x == y).count() as f64;
    let mut ca: HashMap<&T, usize> = HashMap::new();
    let mut cb: HashMap<&T, usize> = HashMap::new();
    for x in a {
        *ca.entry(x).or_default() += 1;
    }
    for y in b {
        *cb.entry(y).or_default() += 1;
    }
    let mut chance_pairs = 0usize;
    for (cat, &na) in &ca {
        chance_pairs += na * cb.get(cat).copied().unwrap_or(0);
    }
    let po = agree / n;
    let pe = chance_pairs as f64 / (n * n);
    if pe == 1.0 {
        return Ok(1.0);
    }
    Ok((po - pe) / (1.0 - pe))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairKappa {
    pub a: String,
    pub b: String,
    pub kappa: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub annotators: Vec<String>,
    /// Unordered pairs, in annotator order.
    pub pairwise_kappa: Vec<PairKappa>,
    pub mean_kappa: f64,
    pub outlier_rates: BTreeMap<String, f64>,
}

impl AgreementReport {
    pub fn kappa(&self, a: &str, b: &str) -> Option<f64> {
        if a == b {
            return Some(1.0);
        }
        self.pairwise_kappa
            .iter()
            .find(|p| (p.a == a && p.b == b) || (p.a == b && p.b == a))
            .map(|p| p.kappa)
    }
}

/// Labels per annotator (column) derived from raw scores.
pub fn annotator_labels(m: &AnnotationMatrix, band: NeutralBand) -> Vec<Vec<SentimentLabel>> {
    (0..m.annotators.len())
        .map(|j| m.scores.iter().map(|row| to_label(f64::from(row[j]), band)).collect())
        .collect()
}

pub fn agreement_report(m: &AnnotationMatrix, band: NeutralBand) -> Result<AgreementReport> {
    if m.annotators.len() < 2 {
        return Err(Error::Input("agreement needs at least two annotators".into()));
    }
    let labels = annotator_labels(m, band);
    let mut pairs = Vec::new();
    for i in 0..m.annotators.len() {
        for j in i + 1..m.annotators.len() {
            pairs.push(PairKappa {
                a: m.annotators[i].id.clone(),
                b: m.annotators[j].id.clone(),
                kappa: cohen_kappa(&labels[i], &labels[j])?,
            });
        }
    }
    let mean_kappa = pairs.iter().map(|p| p.kappa).sum::<f64>() / pairs.len() as f64;
    Ok(AgreementReport {
        annotators: m.annotators.iter().map(|a| a.id.clone()).collect(),
        pairwise_kappa: pairs,
        mean_kappa,
        outlier_rates: outlier_rates(m).into_iter().collect(),
    })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// Visible rows of the six-annotator sample (two experts).
    pub(crate) fn sample_matrix() -> AnnotationMatrix {
        let annotators = vec![
            Annotator::new("EA1", true),
            Annotator::new("EA2", true),
            Annotator::new("A3", false),
            Annotator::new("A4", false),
            Annotator::new("A5", false),
            Annotator::new("A6", false),
        ];
        let rows: Vec<Vec<i8>> = vec![
            vec![3, 2, 3, 3, 1, 4],
            vec![-2, 0, 0, -2, -1, -2],
            vec![0, 0, 1, -1, 0, 2],
            vec![4, 5, 3, 2, 3, 3],
            vec![-4, -1, -2, 3, -2, 3],
            vec![5, 4, 5, 4, 3, 4],
        ];
        let items = ["1", "2", "3", "4", "5", "100"].map(String::from).to_vec();
        AnnotationMatrix::new(items, annotators, rows).unwrap()
    }

    #[test]
    fn weighted_scores_match_sample() {
        let m = sample_matrix();
        let expected = [2.625, -1.125, 0.25, 3.625, -1.0, 4.25];
        for (i, e) in expected.iter().enumerate() {
            assert!((weighted_score(&m, i).unwrap() - e).abs() < 1e-12, "row {i}");
        }
        let labels: Vec<i8> = (0..6)
            .map(|i| to_label(weighted_score(&m, i).unwrap(), NeutralBand::default()).as_int())
            .collect();
        assert_eq!(labels, vec![1, -1, 1, 1, -1, 1]);
    }

    #[test]
    fn weighted_score_of_constant_row() {
        let m = AnnotationMatrix::new(
            vec!["x".into()],
            vec![Annotator::new("a", true), Annotator::new("b", false)],
            vec![vec![-3, -3]],
        )
        .unwrap();
        assert_eq!(weighted_score(&m, 0).unwrap(), -3.0);
        let empty = m.retain_annotators(|_| false);
        assert!(matches!(weighted_score(&empty, 0), Err(Error::UndefinedScore(_))));
    }

    #[test]
    fn outlier_examples() {
        assert!(outlier_positions(&[3, 3, 3, 3]).is_empty());
        // mean 1, population std 2, |5 - 1| = 4 > 2
        assert_eq!(outlier_positions(&[0, 0, 0, 0, 5]), BTreeSet::from([4]));
        // mean 0, std 5, 5 > 5 is false
        assert!(outlier_positions(&[-5, 5]).is_empty());
        assert!(outlier_positions(&[4]).is_empty());
    }

    #[test]
    fn outlier_rule_matches_float_definition() {
        let rows: [&[i8]; 4] = [
            &[0, 0, 0, 0, 0, 5],
            &[5, 5, 0, 0, 0, 0],
            &[-4, -1, -2, 3, -2, 3],
            &[1, 2, 3],
        ];
        for row in rows {
            let n = row.len() as f64;
            let mean = row.iter().map(|&s| f64::from(s)).sum::<f64>() / n;
            let std = (row.iter().map(|&s| (f64::from(s) - mean).powi(2)).sum::<f64>() / n).sqrt();
            let float: BTreeSet<usize> = (0..row.len())
                .filter(|&i| (f64::from(row[i]) - mean).abs() > std)
                .collect();
            assert_eq!(outlier_positions(row), float, "{row:?}");
        }
    }

    #[test]
    fn screening_drops_at_threshold() {
        // a3 deviates on 60 of 100 items
        let mut rows = Vec::new();
        for i in 0..100 {
            if i < 60 {
                rows.push(vec![0, 0, 5]);
            } else {
                rows.push(vec![1, 1, 1]);
            }
        }
        let items = (0..100).map(|i| i.to_string()).collect();
        let anns = vec![
            Annotator::new("a1", false),
            Annotator::new("a2", false),
            Annotator::new("a3", false),
        ];
        let m = AnnotationMatrix::new(items, anns, rows).unwrap();
        let (screened, report) = screen_annotators(&m, DEFAULT_DROP_FRACTION);
        assert_eq!(report.dropped, vec!["a3".to_owned()]);
        assert_eq!(screened.annotators().len(), 2);
        assert_eq!(report.outlier_rates[2].1, 0.6);
    }

    #[test]
    fn rate_vector_below_threshold_drops_nobody() {
        let rates: Vec<(String, f64)> = [("EA1", 0.08), ("EA2", 0.25), ("A4", 0.29), ("A5", 0.35), ("A6", 0.36)]
            .iter()
            .map(|(a, r)| (a.to_string(), *r))
            .collect();
        assert!(annotators_to_drop(&rates, DEFAULT_DROP_FRACTION).is_empty());
    }

    #[test]
    fn single_annotator_never_dropped() {
        let m = AnnotationMatrix::new(vec!["x".into()], vec![Annotator::new("solo", false)], vec![vec![5]]).unwrap();
        let (_, report) = screen_annotators(&m, DEFAULT_DROP_FRACTION);
        assert!(report.dropped.is_empty());
    }

    #[test]
    fn sample_labels() {
        let band = NeutralBand::default();
        assert_eq!(to_label(2.63, band).as_int(), 1);
        assert_eq!(to_label(-1.13, band).as_int(), -1);
        assert_eq!(to_label(0.25, band), SentimentLabel::Positive);
    }

    #[test]
    fn kappa_examples() {
        let a = [1, 1, -1, -1];
        let b = [1, -1, -1, -1];
        // Po = 3/4; marginals a {1: 1/2, -1: 1/2}, b {1: 1/4, -1: 3/4}; Pe = 1/8 + 3/8
        assert!((cohen_kappa(&a, &b).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(cohen_kappa(&[1, -1], &[-1, 1]).unwrap(), -1.0);
        assert_eq!(cohen_kappa(&[1, 0, -1], &[1, 0, -1]).unwrap(), 1.0);
        assert_eq!(cohen_kappa(&[0, 0], &[0, 0]).unwrap(), 1.0);
        assert!(matches!(cohen_kappa(&[1], &[1, 1]), Err(Error::Input(_))));
    }

    #[test]
    fn agreement_means() {
        let same = AnnotationMatrix::new(
            vec!["a".into(), "b".into()],
            vec![Annotator::new("x", false), Annotator::new("y", false)],
            vec![vec![3, 3], vec![-2, -2]],
        )
        .unwrap();
        assert_eq!(agreement_report(&same, NeutralBand::default()).unwrap().mean_kappa, 1.0);

        // a and b agree perfectly; c relates to both with kappa 0.5.
        let rows = vec![vec![1, 1, 1], vec![1, 1, -1], vec![-1, -1, -1], vec![-1, -1, -1]];
        let m = AnnotationMatrix::new(
            (0..4).map(|i| i.to_string()).collect(),
            vec![
                Annotator::new("a", false),
                Annotator::new("b", false),
                Annotator::new("c", false),
            ],
            rows,
        )
        .unwrap();
        let r = agreement_report(&m, NeutralBand::default()).unwrap();
        assert_eq!(r.kappa("a", "b"), Some(1.0));
        assert!((r.kappa("a", "c").unwrap() - 0.5).abs() < 1e-12);
        assert!((r.mean_kappa - (1.0 + 0.5 + 0.5) / 3.0).abs() < 1e-12);
        assert_eq!(r.kappa("c", "a"), r.kappa("a", "c"));
    }

    #[test]
    fn csv_with_sidecar() {
        let csv = "item_id,EA1,A2\nt1,3,1\nt2,-2,0\n";
        let w: WeightsFile = serde_json::from_str(r#"{"annotators":[{"id":"EA1","expert":true}]}"#).unwrap();
        let m = AnnotationMatrix::read_csv(csv.as_bytes(), &w).unwrap();
        assert_eq!(m.annotators()[0].weight, 2.0);
        assert_eq!(m.annotators()[1].weight, 1.0);
        assert!((weighted_score(&m, 0).unwrap() - 7.0 / 3.0).abs() < 1e-15);

        let missing = "item_id,a,b\nt1,3,\n";
        assert!(matches!(
            AnnotationMatrix::read_csv(missing.as_bytes(), &WeightsFile::default()),
            Err(Error::Data { line: Some(2), .. })
        ));
        let out_of_range = "item_id,a\nt1,6\n";
        assert!(AnnotationMatrix::read_csv(out_of_range.as_bytes(), &WeightsFile::default()).is_err());
        let not_int = "item_id,a\nt1,1.5\n";
        assert!(AnnotationMatrix::read_csv(not_int.as_bytes(), &WeightsFile::default()).is_err());
    }
}
