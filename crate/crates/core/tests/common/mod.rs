//! Shared helpers for the integration tests: a brute-force PMI/SO oracle
//! over exact rationals, corpus generators and fixture paths.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use ecosent::corpus::Polarity;
use ecosent::preprocess::TokenSeq;
use num::{BigInt, BigRational, ToPrimitive};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

#[derive(Debug, Clone)]
pub struct Doc {
    pub tokens: Vec<String>,
    pub label: Polarity,
}

pub fn to_corpus(docs: &[Doc]) -> Vec<(TokenSeq, Polarity)> {
    docs.iter().map(|d| (d.tokens.iter().collect(), d.label)).collect()
}

fn rat(n: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn half() -> BigRational {
    BigRational::new(BigInt::from(1), BigInt::from(2))
}

/// Number of documents for which `pred` holds, by scanning every document.
fn docs_where(docs: &[Doc], pred: impl Fn(&Doc) -> bool) -> usize {
    docs.iter().filter(|d| pred(d)).count()
}

fn has(d: &Doc, w: &str) -> bool {
    d.tokens.iter().any(|t| t == w)
}

/// log2 of the exact smoothed ratio P(a, b) / (P(a) P(b)).
fn pmi(joint: usize, a: usize, b: usize, n: usize, k: &BigRational) -> f64 {
    let two = rat(2);
    let four = rat(4);
    let p_a = (rat(a) + k) / (rat(n) + &two * k);
    let p_b = (rat(b) + k) / (rat(n) + &two * k);
    let p_ab = (rat(joint) + k) / (rat(n) + &four * k);
    let ratio = p_ab / (p_a * p_b);
    ratio.to_f64().expect("finite ratio").log2()
}

fn vocabulary(docs: &[Doc], min_freq: usize) -> BTreeMap<String, usize> {
    let words: BTreeSet<&String> = docs.iter().flat_map(|d| d.tokens.iter()).collect();
    words
        .into_iter()
        .map(|w| (w.clone(), docs_where(docs, |d| has(d, w))))
        .filter(|(_, df)| *df >= min_freq)
        .collect()
}

/// Orientation per vocabulary word with the document classes as events.
pub fn oracle_so_class(docs: &[Doc], k: &BigRational, min_freq: usize) -> BTreeMap<String, f64> {
    let n = docs.len();
    let n_pos = docs_where(docs, |d| d.label == Polarity::Positive);
    let n_neg = n - n_pos;
    vocabulary(docs, min_freq)
        .into_iter()
        .map(|(w, df)| {
            let jp = docs_where(docs, |d| d.label == Polarity::Positive && has(d, &w));
            let jn = docs_where(docs, |d| d.label == Polarity::Negative && has(d, &w));
            let so = (pmi(jp, df, n_pos, n, k) - pmi(jn, df, n_neg, n, k)) / df as f64;
            (w, so)
        })
        .collect()
}

/// Orientation per vocabulary word with seed-word presence as events.
pub fn oracle_so_seeds(
    docs: &[Doc],
    positive: &BTreeSet<String>,
    negative: &BTreeSet<String>,
    k: &BigRational,
    min_freq: usize,
) -> BTreeMap<String, f64> {
    let n = docs.len();
    let side = |w: &str, df: usize, seeds: &BTreeSet<String>| -> f64 {
        seeds
            .iter()
            .map(|s| {
                let ds = docs_where(docs, |d| has(d, s));
                let joint = docs_where(docs, |d| has(d, w) && has(d, s));
                pmi(joint, df, ds, n, k)
            })
            .sum()
    };
    vocabulary(docs, min_freq)
        .into_iter()
        .map(|(w, df)| {
            let so = (side(&w, df, positive) - side(&w, df, negative)) / df as f64;
            (w, so)
        })
        .collect()
}

/// Score as the sum of oracle orientations over every token occurrence.
pub fn oracle_score(so: &BTreeMap<String, f64>, tokens: &[String]) -> f64 {
    tokens.iter().map(|t| so.get(t).copied().unwrap_or(0.0)).sum()
}

pub fn word(i: usize) -> String {
    format!("w{i}")
}

/// Random corpus of `n_docs` documents drawn from `vocab` words, each with
/// 1 to `max_len` tokens (repeats allowed).
pub fn random_corpus<R: Rng>(rng: &mut R, n_docs: usize, vocab: usize, max_len: usize) -> Vec<Doc> {
    (0..n_docs)
        .map(|_| {
            let len = rng.gen_range(1..=max_len);
            Doc {
                tokens: (0..len).map(|_| word(rng.gen_range(0..vocab))).collect(),
                label: if rng.gen_bool(0.5) {
                    Polarity::Positive
                } else {
                    Polarity::Negative
                },
            }
        })
        .collect()
}

/// Random corpus guaranteed to contain both classes.
pub fn random_two_class_corpus<R: Rng>(rng: &mut R, n_docs: usize, vocab: usize, max_len: usize) -> Vec<Doc> {
    assert!(n_docs >= 2);
    let mut docs = random_corpus(rng, n_docs, vocab, max_len);
    docs[0].label = Polarity::Positive;
    docs[1].label = Polarity::Negative;
    docs.shuffle(rng);
    docs
}

/// Every document type over `vocab` words: each non-empty word subset
/// paired with each label.
pub fn doc_types(vocab: usize) -> Vec<Doc> {
    let mut out = Vec::new();
    for mask in 1u32..(1 << vocab) {
        let tokens: Vec<String> = (0..vocab).filter(|i| mask & (1 << i) != 0).map(word).collect();
        for label in [Polarity::Positive, Polarity::Negative] {
            out.push(Doc {
                tokens: tokens.clone(),
                label,
            });
        }
    }
    out
}

/// Every multiset of `1..=max_docs` documents drawn from `types`. PMI
/// counts ignore document order, so multisets cover every corpus.
pub fn all_corpora(types: &[Doc], max_docs: usize) -> Vec<Vec<Doc>> {
    fn rec(types: &[Doc], start: usize, left: usize, cur: &mut Vec<Doc>, out: &mut Vec<Vec<Doc>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if left == 0 {
            return;
        }
        for i in start..types.len() {
            cur.push(types[i].clone());
            rec(types, i, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(types, 0, max_docs, &mut Vec::new(), &mut out);
    out
}

/// Train with `cfg` and compare orientations and document scores against
/// the oracle within `tol`. Single-class corpora must fail to train.
pub fn check_against_oracle(docs: &[Doc], cfg: &ecosent::sentiment::TrainConfig, tol: f64) -> Result<(), String> {
    let single_class = docs.iter().all(|d| d.label == docs[0].label);
    let model = match ecosent::sentiment::train(&to_corpus(docs), cfg) {
        Ok(_) if single_class => return Err(format!("single-class corpus trained: {docs:?}")),
        Ok(m) => m,
        Err(_) if single_class => return Ok(()),
        Err(e) => return Err(format!("training failed: {e}")),
    };
    let k = BigRational::from_float(cfg.smoothing_k).expect("finite k");
    let min_freq = cfg.min_freq as usize;
    let expected = match &cfg.seeds {
        Some(s) if cfg.mode == ecosent::sentiment::TrainMode::SeedWords => {
            oracle_so_seeds(docs, &s.positive, &s.negative, &k, min_freq)
        }
        _ => oracle_so_class(docs, &k, min_freq),
    };
    let got: Vec<&String> = model.so.keys().collect();
    let want: Vec<&String> = expected.keys().collect();
    if got != want {
        return Err(format!("vocabulary {got:?} != oracle {want:?} for {docs:?}"));
    }
    for (w, e) in &expected {
        let g = model.so[w];
        if (g - e).abs() > tol {
            return Err(format!("SO({w}) = {g}, oracle {e}, corpus {docs:?}"));
        }
    }
    for d in docs {
        let ts: TokenSeq = d.tokens.iter().collect();
        let (g, e) = (model.score(&ts), oracle_score(&expected, &d.tokens));
        if (g - e).abs() > tol {
            return Err(format!("score {g} vs oracle {e} for {:?}", d.tokens));
        }
    }
    Ok(())
}
