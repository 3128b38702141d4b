mod common;

use common::*;
use ecosent::analytics::fit_bias_curve;
use ecosent::corpus::Polarity;
use ecosent::preprocess::TokenSeq;
use ecosent::sentiment::{count, train, Event, TrainConfig};
use num::{BigRational, ToPrimitive, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn arb_corpus(max_docs: usize, vocab: usize) -> impl Strategy<Value = Vec<Doc>> {
    (2..=max_docs, any::<u64>()).prop_map(move |(n, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        random_two_class_corpus(&mut rng, n, vocab, 6)
    })
}

fn cfg1() -> TrainConfig {
    TrainConfig {
        min_freq: 1,
        ..TrainConfig::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn matches_oracle_up_to_ten_docs_and_words(docs in arb_corpus(10, 10)) {
        prop_assert_eq!(check_against_oracle(&docs, &cfg1(), 1e-12), Ok(()));
    }

    #[test]
    fn label_swap_negates_orientation(docs in arb_corpus(10, 8)) {
        let swapped: Vec<Doc> = docs
            .iter()
            .map(|d| Doc { tokens: d.tokens.clone(), label: d.label.flip() })
            .collect();
        let a = train(&to_corpus(&docs), &cfg1()).unwrap();
        let b = train(&to_corpus(&swapped), &cfg1()).unwrap();
        prop_assert!(a.so.keys().eq(b.so.keys()));
        for (w, v) in &a.so {
            prop_assert_eq!(b.so[w], -v);
        }
    }

    #[test]
    fn score_is_additive_over_concatenation(docs in arb_corpus(8, 8), i in 0usize..8, j in 0usize..8) {
        let m = train(&to_corpus(&docs), &cfg1()).unwrap();
        let d1 = &docs[i % docs.len()].tokens;
        let d2 = &docs[j % docs.len()].tokens;
        let joined: TokenSeq = d1.iter().chain(d2.iter()).collect();
        let sum = m.score(&d1.iter().collect()) + m.score(&d2.iter().collect());
        prop_assert!((m.score(&joined) - sum).abs() <= 1e-12);
    }

    /// Without smoothing every probability is a ratio of counts, so doubling
    /// the corpus leaves PMI and SO·freq unchanged while SO halves.
    #[test]
    fn duplicating_the_corpus_at_k_zero(docs in arb_corpus(8, 5)) {
        let once = to_corpus(&docs);
        let twice: Vec<(TokenSeq, Polarity)> = once.iter().chain(once.iter()).cloned().collect();
        let c1 = count(once.iter().map(|(t, l)| (t, *l)), None).unwrap();
        let c2 = count(twice.iter().map(|(t, l)| (t, *l)), None).unwrap();
        for w in c1.doc_freq.keys() {
            let cells = [Polarity::Positive, Polarity::Negative].map(|p| c1.class_doc_freq(w, p));
            // Log of an empty cell is -inf at k = 0; only finite cases compare.
            if cells.contains(&0) {
                continue;
            }
            let diff = |c: &ecosent::sentiment::CooccurrenceCounts| {
                c.pmi(w, Event::Class(Polarity::Positive), 0.0) - c.pmi(w, Event::Class(Polarity::Negative), 0.0)
            };
            for p in [Polarity::Positive, Polarity::Negative] {
                let (a, b) = (c1.pmi(w, Event::Class(p), 0.0), c2.pmi(w, Event::Class(p), 0.0));
                prop_assert!((a - b).abs() <= 1e-12, "pmi {} vs {}", a, b);
            }
            let (f1, f2) = (c1.doc_freq(w) as f64, c2.doc_freq(w) as f64);
            prop_assert_eq!(f2, 2.0 * f1);
            let (so1, so2) = (diff(&c1) / f1, diff(&c2) / f2);
            prop_assert!((so1 * f1 - so2 * f2).abs() <= 1e-12);
            prop_assert!((so2 - so1 / 2.0).abs() <= 1e-12);
        }
    }
}

/// Least squares by exact Gaussian elimination on the normal equations.
fn rational_least_squares(points: &[(f64, f64)], degree: usize) -> Vec<f64> {
    let cols = degree + 1;
    let r = |v: f64| BigRational::from_float(v).unwrap();
    let mut a = vec![vec![BigRational::zero(); cols + 1]; cols];
    for &(x, y) in points {
        let x = r(x);
        let powers: Vec<BigRational> = (0..cols)
            .scan(BigRational::from_integer(1.into()), |p, _| {
                let cur = p.clone();
                *p = &*p * &x;
                Some(cur)
            })
            .collect();
        for i in 0..cols {
            for j in 0..cols {
                a[i][j] += &powers[i] * &powers[j];
            }
            a[i][cols] += &powers[i] * r(y);
        }
    }
    for c in 0..cols {
        let pivot = (c..cols).find(|&i| !a[i][c].is_zero()).expect("full rank");
        a.swap(c, pivot);
        let pivot_row = a[c].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != c {
                let f = &row[c] / &pivot_row[c];
                for (x, p) in row.iter_mut().zip(&pivot_row).skip(c) {
                    *x -= &f * p;
                }
            }
        }
    }
    (0..cols).map(|i| (&a[i][cols] / &a[i][i]).to_f64().unwrap()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn bias_fit_matches_exact_normal_equations(
        degree in 0usize..=3,
        raw in prop::collection::btree_set(-400i32..=400, 5..25),
        noise in prop::collection::vec(-5.0f64..5.0, 25),
    ) {
        prop_assume!(raw.len() > degree);
        let points: Vec<(f64, f64)> = raw
            .iter()
            .zip(&noise)
            .map(|(&x, e)| {
                let x = f64::from(x) / 100.0;
                (x, 3.0 - x + 0.5 * x * x + e)
            })
            .collect();
        let fit = fit_bias_curve(&points, degree).unwrap();
        let exact = rational_least_squares(&points, degree);
        for (g, e) in fit.coefficients.iter().zip(&exact) {
            prop_assert!((g - e).abs() <= 1e-8 * (1.0 + e.abs()), "{:?} vs {:?}", fit.coefficients, exact);
        }
    }

    #[test]
    fn exact_polynomials_have_zero_residual(
        coefs in prop::collection::vec(-5.0f64..5.0, 1..=4),
        raw in prop::collection::btree_set(-300i32..=300, 4..20),
    ) {
        let degree = coefs.len() - 1;
        prop_assume!(raw.len() > degree);
        let points: Vec<(f64, f64)> = raw
            .iter()
            .map(|&x| {
                let x = f64::from(x) / 100.0;
                (x, coefs.iter().rev().fold(0.0, |acc, c| acc * x + c))
            })
            .collect();
        prop_assert!(fit_bias_curve(&points, degree).unwrap().rmse <= 1e-8);
    }
}
