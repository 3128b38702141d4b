use std::collections::{BTreeMap, BTreeSet};

use crate::corpus::Polarity;
use crate::error::{Error, Result};
use crate::preprocess::TokenSeq;

use super::SeedLexicons;

/// Document-level presence counts over a labeled corpus.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CooccurrenceCounts {
    pub n_docs: u64,
    pub n_pos_docs: u64,
    pub n_neg_docs: u64,
    pub doc_freq: BTreeMap<String, u64>,
    pub class_doc_freq: BTreeMap<(String, Polarity), u64>,
    /// Documents containing both a word and a seed word. Only filled when
    /// counting with seeds.
    pub pair_doc_freq: BTreeMap<(String, String), u64>,
}

/// The second argument of a PMI: a class label or a seed word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Event<'a> {
    Class(Polarity),
    Word(&'a str),
}

impl CooccurrenceCounts {
    /// Add one document. Repeated tokens count once.
    pub fn add(&mut self, tokens: &TokenSeq, label: Polarity, seeds: Option<&SeedLexicons>) {
        self.n_docs += 1;
        match label {
            Polarity::Positive => self.n_pos_docs += 1,
            Polarity::Negative => self.n_neg_docs += 1,
        }
        let present: BTreeSet<&str> = tokens.iter().collect();
        for &w in &present {
            *self.doc_freq.entry(w.to_owned()).or_default() += 1;
            *self.class_doc_freq.entry((w.to_owned(), label)).or_default() += 1;
        }
        if let Some(seeds) = seeds {
            let seeds_here: Vec<&str> = seeds.all().filter(|s| present.contains(s)).collect();
            for &w in &present {
                for &s in &seeds_here {
                    *self.pair_doc_freq.entry((w.to_owned(), s.to_owned())).or_default() += 1;
                }
            }
        }
    }

    /// Fieldwise addition; associative and commutative.
    pub fn merge(mut self, other: CooccurrenceCounts) -> CooccurrenceCounts {
        self.n_docs += other.n_docs;
        self.n_pos_docs += other.n_pos_docs;
        self.n_neg_docs += other.n_neg_docs;
        for (k, v) in other.doc_freq {
            *self.doc_freq.entry(k).or_default() += v;
        }
        for (k, v) in other.class_doc_freq {
            *self.class_doc_freq.entry(k).or_default() += v;
        }
        for (k, v) in other.pair_doc_freq {
            *self.pair_doc_freq.entry(k).or_default() += v;
        }
        self
    }

    pub fn doc_freq(&self, w: &str) -> u64 {
        self.doc_freq.get(w).copied().unwrap_or(0)
    }

    pub fn class_doc_freq(&self, w: &str, c: Polarity) -> u64 {
        self.class_doc_freq.get(&(w.to_owned(), c)).copied().unwrap_or(0)
    }

    pub fn pair_doc_freq(&self, w: &str, seed: &str) -> u64 {
        self.pair_doc_freq
            .get(&(w.to_owned(), seed.to_owned()))
            .copied()
            .unwrap_or(0)
    }

    fn class_docs(&self, c: Polarity) -> u64 {
        match c {
            Polarity::Positive => self.n_pos_docs,
            Polarity::Negative => self.n_neg_docs,
        }
    }

    /// Smoothed marginal probability (count + k) / (n + 2k).
    pub fn p_marginal(&self, count: u64, k: f64) -> f64 {
        (count as f64 + k) / (self.n_docs as f64 + 2.0 * k)
    }

    /// Smoothed joint probability (count + k) / (n + 4k).
    pub fn p_joint(&self, count: u64, k: f64) -> f64 {
        (count as f64 + k) / (self.n_docs as f64 + 4.0 * k)
    }

    /// Base-2 pointwise mutual information between `w` and `e` with add-`k`
    /// smoothing. `k = 0` is allowed here and yields infinities on empty
    /// cells; training always uses `k > 0`.
    pub fn pmi(&self, w: &str, e: Event<'_>, k: f64) -> f64 {
        let (e_count, joint) = match e {
            Event::Class(c) => (self.class_docs(c), self.class_doc_freq(w, c)),
            Event::Word(s) => (self.doc_freq(s), self.pair_doc_freq(w, s)),
        };
        let p_w = self.p_marginal(self.doc_freq(w), k);
        let p_e = self.p_marginal(e_count, k);
        let p_we = self.p_joint(joint, k);
        (p_we / (p_w * p_e)).log2()
    }
}

/// Count a tokenized corpus.
pub fn count<'a, I>(corpus: I, seeds: Option<&SeedLexicons>) -> Result<CooccurrenceCounts>
where
    I: IntoIterator<Item = (&'a TokenSeq, Polarity)>,
{
    let mut c = CooccurrenceCounts::default();
    for (tokens, label) in corpus {
        c.add(tokens, label, seeds);
    }
    if c.n_docs == 0 {
        return Err(Error::Training("corpus is empty".into()));
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(v: &[&str]) -> TokenSeq {
        v.iter().collect()
    }

    #[test]
    fn two_doc_counts() {
        let a = ts(&["a", "b"]);
        let b = ts(&["a"]);
        let c = count([(&a, Polarity::Positive), (&b, Polarity::Negative)], None).unwrap();
        assert_eq!(c.doc_freq("a"), 2);
        assert_eq!(c.doc_freq("b"), 1);
        assert_eq!(c.class_doc_freq("a", Polarity::Positive), 1);
        assert_eq!(c.class_doc_freq("a", Polarity::Negative), 1);
        assert_eq!(c.class_doc_freq("b", Polarity::Positive), 1);
        assert_eq!(c.class_doc_freq("b", Polarity::Negative), 0);
        assert_eq!((c.n_docs, c.n_pos_docs, c.n_neg_docs), (2, 1, 1));
    }

    #[test]
    fn presence_semantics() {
        let a = ts(&["a", "a"]);
        let c = count([(&a, Polarity::Positive)], None).unwrap();
        assert_eq!(c.doc_freq("a"), 1);
    }

    #[test]
    fn empty_corpus_is_training_error() {
        assert!(matches!(count(std::iter::empty(), None), Err(Error::Training(_))));
    }

    #[test]
    fn pmi_is_zero_under_independence() {
        // w in half of each class: P(w,pos) = 1/4 = P(w) P(pos)
        let docs = [ts(&["w"]), ts(&["x"]), ts(&["w"]), ts(&["x"])];
        let labels = [
            Polarity::Positive,
            Polarity::Positive,
            Polarity::Negative,
            Polarity::Negative,
        ];
        let c = count(docs.iter().zip(labels), None).unwrap();
        assert_eq!(c.pmi("w", Event::Class(Polarity::Positive), 0.0), 0.0);
    }

    #[test]
    fn pmi_perfect_association() {
        let docs = [ts(&["w"]), ts(&["x"]), ts(&["x"])];
        let labels = [Polarity::Positive, Polarity::Negative, Polarity::Negative];
        let c = count(docs.iter().zip(labels), None).unwrap();
        let v = c.pmi("w", Event::Class(Polarity::Positive), 0.0);
        assert!((v - 3f64.log2()).abs() < 1e-15);
        assert!(v > 0.0);
    }

    #[test]
    fn seed_pairs_are_counted() {
        let seeds = SeedLexicons::new(["good"], ["bad"]).unwrap();
        let d1 = ts(&["sun", "good", "good"]);
        let d2 = ts(&["sun", "bad"]);
        let c = count([(&d1, Polarity::Positive), (&d2, Polarity::Negative)], Some(&seeds)).unwrap();
        assert_eq!(c.pair_doc_freq("sun", "good"), 1);
        assert_eq!(c.pair_doc_freq("sun", "bad"), 1);
        assert_eq!(c.pair_doc_freq("good", "good"), 1);
        assert_eq!(c.pair_doc_freq("bad", "good"), 0);
    }

    #[test]
    fn merge_equals_single_pass() {
        let docs = [ts(&["a", "b"]), ts(&["b", "c"]), ts(&["a"]), ts(&["c", "c", "d"])];
        let labels = [
            Polarity::Positive,
            Polarity::Negative,
            Polarity::Negative,
            Polarity::Positive,
        ];
        let all = count(docs.iter().zip(labels), None).unwrap();
        let left = count(docs[..1].iter().zip(labels), None).unwrap();
        let right = count(docs[1..].iter().zip(labels[1..].iter().copied()), None).unwrap();
        assert_eq!(left.clone().merge(right.clone()), all);
        assert_eq!(right.merge(left), all);
    }
}
