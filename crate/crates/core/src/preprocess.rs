//! Text normalization: cleaning, case folding, tokenization, slang
//! expansion and stopword removal, applied in that order.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::OnceLock;

use regex::Regex;

use crate::error::{Error, Result};

/// Ordered lowercase tokens. Never holds empty or whitespace-bearing tokens.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct TokenSeq(Vec<String>);

impl TokenSeq {
    pub fn as_slice(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }

    pub fn join(&self) -> String {
        self.0.join(" ")
    }

    pub fn into_inner(self) -> Vec<String> {
        self.0
    }
}

impl<S: AsRef<str>> FromIterator<S> for TokenSeq {
    /// Builds a sequence by splitting each item on whitespace, so the
    /// no-empty/no-whitespace invariant holds for arbitrary input.
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        TokenSeq(
            iter.into_iter()
                .flat_map(|s| s.as_ref().split_whitespace().map(str::to_owned).collect::<Vec<_>>())
                .collect(),
        )
    }
}

/// Slang expansions and stopwords.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ResourceSet {
    slang: BTreeMap<String, Vec<String>>,
    stopwords: BTreeSet<String>,
}

impl ResourceSet {
    pub fn new<K, V, S>(slang: impl IntoIterator<Item = (K, V)>, stopwords: impl IntoIterator<Item = S>) -> Result<Self>
    where
        K: AsRef<str>,
        V: AsRef<str>,
        S: AsRef<str>,
    {
        let mut map = BTreeMap::new();
        for (k, v) in slang {
            let key = case_fold(k.as_ref().trim());
            let expansion: Vec<String> = case_fold(v.as_ref()).split_whitespace().map(str::to_owned).collect();
            if key.is_empty() || key.contains(char::is_whitespace) {
                return Err(Error::Config(format!("invalid slang key '{}'", k.as_ref())));
            }
            if expansion.is_empty() {
                return Err(Error::Config(format!("empty expansion for slang key '{key}'")));
            }
            map.insert(key, expansion);
        }
        let stopwords = stopwords
            .into_iter()
            .map(|s| case_fold(s.as_ref().trim()))
            .filter(|s| !s.is_empty())
            .collect();
        Ok(ResourceSet { slang: map, stopwords })
    }

    /// Parse a slang table: `slang<TAB>expansion` per line, `#` comments.
    pub fn parse_slang(text: &str) -> Result<Vec<(String, String)>> {
        let mut out = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('\t')
                .ok_or_else(|| Error::data(i + 1, "slang line needs two tab-separated columns"))?;
            out.push((k.to_owned(), v.to_owned()));
        }
        Ok(out)
    }

    pub fn parse_stopwords(text: &str) -> Vec<String> {
        text.lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(str::to_owned)
            .collect()
    }

    /// Load resources from files; either may be absent.
    pub fn load(slang: Option<&Path>, stopwords: Option<&Path>) -> Result<Self> {
        let read = |p: &Path| std::fs::read_to_string(p).map_err(|e| Error::io(p, e));
        let slang_rows = match slang {
            Some(p) => Self::parse_slang(&read(p)?).map_err(|e| match e {
                Error::Data { line, msg } => Error::Data {
                    line,
                    msg: format!("{}: {msg}", p.display()),
                },
                other => other,
            })?,
            None => Vec::new(),
        };
        let stop = match stopwords {
            Some(p) => Self::parse_stopwords(&read(p)?),
            None => Vec::new(),
        };
        Self::new(slang_rows, stop)
    }

    pub fn is_slang(&self, token: &str) -> bool {
        self.slang.contains_key(token)
    }

    pub fn is_stopword(&self, token: &str) -> bool {
        self.stopwords.contains(token)
    }
}

fn url_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)(?:https?://|www\.)\S*").unwrap())
}

fn mention_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"@\w*").unwrap())
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

/// Strip URLs, @-mentions, `#` and every character that is not a letter,
/// digit, whitespace or apostrophe; collapse whitespace.
pub fn clean(raw: &str) -> String {
    let no_urls = url_re().replace_all(raw, " ");
    let no_mentions = mention_re().replace_all(&no_urls, " ");
    let kept: String = no_mentions
        .chars()
        .filter_map(|c| {
            if c.is_whitespace() {
                Some(' ')
            } else if is_apostrophe(c) {
                Some('\'')
            } else if c.is_alphanumeric() {
                Some(c)
            } else {
                None
            }
        })
        .collect();
    kept.split_whitespace().collect::<Vec<_>>().join(" ")
}

pub fn case_fold(t: &str) -> String {
    t.to_lowercase()
}

/// Split on whitespace, dropping tokens made only of apostrophes.
pub fn tokenize(t: &str) -> TokenSeq {
    TokenSeq(
        t.split_whitespace()
            .filter(|tok| !tok.chars().all(is_apostrophe))
            .map(str::to_owned)
            .collect(),
    )
}

/// Replace slang tokens with their expansions. Single pass: expansions are
/// not themselves expanded.
pub fn expand_slang(ts: TokenSeq, r: &ResourceSet) -> TokenSeq {
    let mut out = Vec::with_capacity(ts.len());
    for tok in ts.0 {
        match r.slang.get(&tok) {
            Some(exp) => out.extend(exp.iter().cloned()),
            None => out.push(tok),
        }
    }
    TokenSeq(out)
}

pub fn remove_stopwords(ts: TokenSeq, r: &ResourceSet) -> TokenSeq {
    TokenSeq(ts.0.into_iter().filter(|t| !r.is_stopword(t)).collect())
}

/// Full normalization of one raw document.
pub fn pipeline(raw: &str, r: &ResourceSet) -> TokenSeq {
    let cleaned = clean(raw);
    let folded = case_fold(&cleaned);
    let tokens = tokenize(&folded);
    let expanded = expand_slang(tokens, r);
    remove_stopwords(expanded, r)
}


#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    fn resources() -> ResourceSet {
        ResourceSet::new(
            [("ppl", "people"), ("idk", "i do not know"), ("u", "you")],
            ["the", "is", "a", "i"],
        )
        .unwrap()
    }

    // Letters, digits, punctuation, markup and a few non-ASCII letters whose
    // lowercase forms stay single alphabetic characters.
    const TEXT: &str = "[a-zA-Z0-9 #@:/.!?'’éÉßΣ🌍-]{0,60}";

    proptest! {
        #[test]
        fn pipeline_is_idempotent(raw in TEXT) {
            let r = resources();
            let once = pipeline(&raw, &r);
            let twice = pipeline(&once.join(), &r);
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn output_has_no_markup(raw in "(https?://[a-z./]{1,10}|www\\.[a-z]{1,5}|@[a-z]{1,5}|#[a-zA-Z]{1,5}|[a-z]{1,5}| )+") {
            let out = pipeline(&raw, &resources());
            for t in out.iter() {
                prop_assert!(!t.contains('#') && !t.contains('@'));
                prop_assert!(!t.contains("http") || !t.contains("://"));
                prop_assert!(!t.contains("www."));
                prop_assert!(!t.is_empty() && !t.contains(char::is_whitespace));
                prop_assert_eq!(t.to_lowercase(), t);
            }
        }

        #[test]
        fn case_fold_is_idempotent(raw in "\\PC{0,40}") {
            let once = case_fold(&clean(&raw));
            prop_assert_eq!(case_fold(&once), once.clone());
        }
    }
}
