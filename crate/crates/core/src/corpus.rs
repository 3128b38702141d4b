//! Post and training-document data model, platform export loading, and
//! keyword / popularity / virality filters.

use std::collections::BTreeSet;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::str::FromStr;

use chrono::{DateTime, Datelike, NaiveDateTime, SubsecRound, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Keywords used to select environmental posts.
pub const DEFAULT_KEYWORDS: [&str; 21] = [
    "climate",
    "global warming",
    "environment",
    "nature",
    "pollution",
    "plastic",
    "green energy",
    "food waste",
    "water waste",
    "greenhouse",
    "recycling",
    "air quality",
    "eco-friendly",
    "emission",
    "renewable energy",
    "sustainable",
    "zero waste",
    "carbon dioxide",
    "ecology",
    "smog",
    "biodiversity",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Platform {
    Twitter,
    Reddit,
    Youtube,
}

impl Platform {
    pub const ALL: [Platform; 3] = [Platform::Twitter, Platform::Reddit, Platform::Youtube];

    pub fn as_str(self) -> &'static str {
        match self {
            Platform::Twitter => "twitter",
            Platform::Reddit => "reddit",
            Platform::Youtube => "youtube",
        }
    }
}

impl fmt::Display for Platform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Platform {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_lowercase().as_str() {
            "twitter" | "x" => Ok(Platform::Twitter),
            "reddit" => Ok(Platform::Reddit),
            "youtube" => Ok(Platform::Youtube),
            other => Err(Error::Input(format!("unknown platform '{other}'"))),
        }
    }
}

/// One social-media item.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Post {
    pub id: String,
    pub platform: Platform,
    pub text: String,
    #[serde(serialize_with = "ser_timestamp")]
    pub created_at: DateTime<Utc>,
    pub likes: u64,
    pub replies: u64,
    pub retweets: u64,
    pub quotes: u64,
    pub upvotes: u64,
    pub matched_keywords: BTreeSet<String>,
}

impl Post {
    pub fn year(&self) -> i32 {
        self.created_at.year()
    }

    /// The counter that measures reach on this post's platform:
    /// retweets on Twitter, upvotes on Reddit, likes on YouTube.
    pub fn engagement(&self) -> u64 {
        match self.platform {
            Platform::Twitter => self.retweets,
            Platform::Reddit => self.upvotes,
            Platform::Youtube => self.likes,
        }
    }

    /// Serialize as one canonical JSONL line (no trailing newline).
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("post serialization is infallible")
    }
}

fn ser_timestamp<S: serde::Serializer>(ts: &DateTime<Utc>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&ts.format("%Y-%m-%dT%H:%M:%SZ").to_string())
}

/// Parse an ISO-8601 timestamp, truncated to whole seconds. Naive
/// timestamps are taken as UTC.
pub fn parse_timestamp(s: &str) -> Option<DateTime<Utc>> {
    let s = s.trim();
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Some(dt.with_timezone(&Utc).trunc_subsecs(0));
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%:z"] {
        if let Ok(dt) = DateTime::parse_from_str(s, fmt) {
            return Some(dt.with_timezone(&Utc).trunc_subsecs(0));
        }
        if let Ok(naive) = NaiveDateTime::parse_from_str(s, fmt) {
            return Some(naive.and_utc().trunc_subsecs(0));
        }
    }
    None
}

#[derive(Debug, Deserialize)]
struct RawPost {
    id: serde_json::Value,
    platform: Option<String>,
    text: String,
    created_at: String,
    #[serde(default)]
    likes: u64,
    #[serde(default)]
    replies: u64,
    #[serde(default)]
    retweets: u64,
    #[serde(default)]
    quotes: u64,
    #[serde(default)]
    upvotes: u64,
    #[serde(default)]
    matched_keywords: BTreeSet<String>,
}

/// Inclusive calendar-year window a post's timestamp must fall in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct YearWindow {
    pub min_year: i32,
    pub max_year: i32,
}

impl YearWindow {
    pub fn contains(&self, year: i32) -> bool {
        (self.min_year..=self.max_year).contains(&year)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineError {
    /// 1-based line number.
    pub line: usize,
    pub message: String,
}

impl fmt::Display for LineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

/// Result of a tolerant load: every valid record plus a report of the
/// lines that were rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadReport<T> {
    pub records: Vec<T>,
    pub errors: Vec<LineError>,
}

impl<T> LoadReport<T> {
    pub fn is_clean(&self) -> bool {
        self.errors.is_empty()
    }
}

fn parse_post_line(line: &str, platform: Platform, window: Option<YearWindow>) -> Result<Post, String> {
    let raw: RawPost = serde_json::from_str(line).map_err(|e| e.to_string())?;
    let id = match raw.id {
        serde_json::Value::String(s) => s,
        serde_json::Value::Number(n) => n.to_string(),
        other => return Err(format!("id must be a string or number, got {other}")),
    };
    if id.is_empty() {
        return Err("empty id".into());
    }
    if let Some(p) = raw.platform {
        let p: Platform = p.parse().map_err(|e: Error| e.to_string())?;
        if p != platform {
            return Err(format!("platform '{p}' does not match expected '{platform}'"));
        }
    }
    let created_at =
        parse_timestamp(&raw.created_at).ok_or_else(|| format!("unparseable created_at '{}'", raw.created_at))?;
    if let Some(w) = window {
        if !w.contains(created_at.year()) {
            return Err(format!(
                "year {} outside window {}..={}",
                created_at.year(),
                w.min_year,
                w.max_year
            ));
        }
    }
    Ok(Post {
        id,
        platform,
        text: raw.text,
        created_at,
        likes: raw.likes,
        replies: raw.replies,
        retweets: raw.retweets,
        quotes: raw.quotes,
        upvotes: raw.upvotes,
        matched_keywords: raw.matched_keywords,
    })
}

/// Load a JSONL export of posts from one platform. Blank lines are
/// skipped; malformed records are reported with their line numbers.
pub fn load_posts(path: impl AsRef<Path>, platform: Platform, window: Option<YearWindow>) -> Result<LoadReport<Post>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_posts(BufReader::new(file), platform, window).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

pub fn read_posts<R: BufRead>(reader: R, platform: Platform, window: Option<YearWindow>) -> Result<LoadReport<Post>> {
    let mut records = Vec::new();
    let mut errors = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io("<posts>", e))?;
        if line.trim().is_empty() {
            continue;
        }
        match parse_post_line(&line, platform, window) {
            Ok(p) => records.push(p),
            Err(message) => errors.push(LineError { line: idx + 1, message }),
        }
    }
    Ok(LoadReport { records, errors })
}

pub fn write_posts<W: Write>(mut w: W, posts: &[Post]) -> std::io::Result<()> {
    for p in posts {
        writeln!(w, "{}", p.to_json_line())?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Negative,
    Positive,
}

impl Polarity {
    /// Sentiment140 label codes: 0 negative, 4 positive.
    pub fn from_code(code: &str) -> Option<Polarity> {
        match code.trim().trim_matches('"') {
            "0" => Some(Polarity::Negative),
            "4" => Some(Polarity::Positive),
            _ => None,
        }
    }

    pub fn flip(self) -> Polarity {
        match self {
            Polarity::Negative => Polarity::Positive,
            Polarity::Positive => Polarity::Negative,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledDoc {
    pub text: String,
    pub label: Polarity,
}

/// Column layout of a labeled training CSV.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LabeledLayout {
    /// Header row with `label` and `text` columns.
    #[default]
    Header,
    /// Headerless six-column Sentiment140 export:
    /// target, id, date, flag, user, text.
    Sentiment140,
}

/// Load a labeled corpus. Invalid bytes are replaced rather than rejected,
/// since the public Sentiment140 dump is not valid UTF-8 throughout.
pub fn load_labeled_csv(path: impl AsRef<Path>, layout: LabeledLayout) -> Result<LoadReport<LabeledDoc>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_labeled_csv(file, layout)
}

pub fn read_labeled_csv<R: Read>(reader: R, layout: LabeledLayout) -> Result<LoadReport<LabeledDoc>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(layout == LabeledLayout::Header)
        .flexible(true)
        .from_reader(reader);
    let (label_col, text_col) = match layout {
        LabeledLayout::Header => {
            let headers = rdr.byte_headers()?.clone();
            let find = |name: &str| {
                headers
                    .iter()
                    .position(|h| String::from_utf8_lossy(h).trim().eq_ignore_ascii_case(name))
                    .ok_or_else(|| Error::data(1, format!("missing '{name}' column")))
            };
            (find("label")?, find("text")?)
        }
        LabeledLayout::Sentiment140 => (0, 5),
    };

    let mut records = Vec::new();
    let mut errors = Vec::new();
    let mut rec = csv::ByteRecord::new();
    loop {
        match rdr.read_byte_record(&mut rec) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) => {
                let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
                errors.push(LineError {
                    line,
                    message: e.to_string(),
                });
                continue;
            }
        }
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        let field = |i: usize| rec.get(i).map(|b| String::from_utf8_lossy(b).into_owned());
        let (Some(code), Some(text)) = (field(label_col), field(text_col)) else {
            errors.push(LineError {
                line,
                message: "missing label or text field".into(),
            });
            continue;
        };
        match Polarity::from_code(&code) {
            Some(label) => records.push(LabeledDoc { text, label }),
            None => errors.push(LineError {
                line,
                message: format!("label must be 0 or 4, got '{code}'"),
            }),
        }
    }
    Ok(LoadReport { records, errors })
}

/// Ordered, non-empty list of lowercase keyword phrases.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeywordList(Vec<String>);

impl KeywordList {
    pub fn new<I, S>(keywords: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut out: Vec<String> = Vec::new();
        for k in keywords {
            let k = k.as_ref().trim().to_lowercase();
            if !k.is_empty() && !out.contains(&k) {
                out.push(k);
            }
        }
        if out.is_empty() {
            return Err(Error::Config("keyword list is empty".into()));
        }
        Ok(KeywordList(out))
    }

    /// One phrase per line; blank lines and `#` comments ignored.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::new(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#')),
        )
    }

    pub fn as_slice(&self) -> &[String] {
        &self.0
    }

    /// Keywords occurring as substrings of the case-folded text, in list order.
    pub fn matches<'a>(&'a self, text: &str) -> Vec<&'a str> {
        let folded = text.to_lowercase();
        self.0
            .iter()
            .filter(|k| folded.contains(k.as_str()))
            .map(String::as_str)
            .collect()
    }
}

impl Default for KeywordList {
    fn default() -> Self {
        KeywordList(DEFAULT_KEYWORDS.iter().map(|s| s.to_string()).collect())
    }
}

pub trait HasText {
    fn text(&self) -> &str;
}

impl HasText for Post {
    fn text(&self) -> &str {
        &self.text
    }
}

impl HasText for LabeledDoc {
    fn text(&self) -> &str {
        &self.text
    }
}

impl HasText for String {
    fn text(&self) -> &str {
        self
    }
}

impl HasText for str {
    fn text(&self) -> &str {
        self
    }
}

impl<T: HasText + ?Sized> HasText for &T {
    fn text(&self) -> &str {
        (**self).text()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KeywordFilter<T> {
    pub kept: Vec<T>,
    /// Per-keyword count of retained records, in keyword-list order.
    pub counts: Vec<(String, usize)>,
}

impl<T> KeywordFilter<T> {
    pub fn count(&self, keyword: &str) -> usize {
        self.counts.iter().find(|(k, _)| k == keyword).map_or(0, |(_, c)| *c)
    }
}

/// Keep records matching at least one keyword. A record matching several
/// keywords increments each of their counts.
pub fn filter_by_keywords<T: HasText>(docs: impl IntoIterator<Item = T>, kw: &KeywordList) -> KeywordFilter<T> {
    let mut counts: Vec<(String, usize)> = kw.as_slice().iter().map(|k| (k.clone(), 0)).collect();
    let mut kept = Vec::new();
    for doc in docs {
        let folded = doc.text().to_lowercase();
        let mut any = false;
        for (k, c) in counts.iter_mut() {
            if folded.contains(k.as_str()) {
                *c += 1;
                any = true;
            }
        }
        if any {
            kept.push(doc);
        }
    }
    KeywordFilter { kept, counts }
}

/// Record each post's matching keywords in `matched_keywords`.
pub fn tag_keywords(posts: &mut [Post], kw: &KeywordList) {
    for p in posts {
        p.matched_keywords = kw.matches(&p.text).into_iter().map(str::to_owned).collect();
    }
}

/// At least one like (Twitter, YouTube) or upvote (Reddit).
pub fn is_popular(p: &Post) -> bool {
    match p.platform {
        Platform::Twitter | Platform::Youtube => p.likes >= 1,
        Platform::Reddit => p.upvotes >= 1,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ViralThresholds {
    pub twitter_retweets: u64,
    pub reddit_upvotes: u64,
    pub youtube_likes: u64,
}

impl Default for ViralThresholds {
    fn default() -> Self {
        ViralThresholds {
            twitter_retweets: 30,
            reddit_upvotes: 200,
            youtube_likes: 100,
        }
    }
}

pub fn is_viral(p: &Post, t: &ViralThresholds) -> bool {
    match p.platform {
        Platform::Twitter => p.retweets >= t.twitter_retweets,
        Platform::Reddit => p.upvotes >= t.reddit_upvotes,
        Platform::Youtube => p.likes >= t.youtube_likes,
    }
}
