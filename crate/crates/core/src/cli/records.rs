//! Readers for the tables the commands exchange with each other. Each table
//! may be CSV or a JSON array of string-valued objects, chosen by extension.

use std::collections::BTreeMap;
use std::path::Path;

use crate::emotion::{Emotion, EmotionProfile};
use crate::error::{Error, Result};
use crate::sentiment::SentimentLabel;

/// A loaded table: rows keyed by column name, with 1-based source lines
/// (data rows start at line 2 for CSV, at 1 for JSON).
pub struct Rows {
    path: String,
    rows: Vec<(usize, BTreeMap<String, String>)>,
}

impl Rows {
    pub fn load(path: &Path) -> Result<Rows> {
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let rows = if is_json {
            let objs: Vec<BTreeMap<String, String>> =
                serde_json::from_str(&text).map_err(|e| Error::data(None, format!("{}: {e}", path.display())))?;
            objs.into_iter().enumerate().map(|(i, o)| (i + 1, o)).collect()
        } else {
            let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(text.as_bytes());
            let header: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_owned()).collect();
            let mut rows = Vec::new();
            for (i, rec) in rdr.records().enumerate() {
                let rec = rec?;
                let line = i + 2;
                if rec.len() != header.len() {
                    return Err(Error::data(
                        line,
                        format!(
                            "{}: expected {} fields, found {}",
                            path.display(),
                            header.len(),
                            rec.len()
                        ),
                    ));
                }
                rows.push((
                    line,
                    header.iter().cloned().zip(rec.iter().map(str::to_owned)).collect(),
                ));
            }
            rows
        };
        Ok(Rows {
            path: path.display().to_string(),
            rows,
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = Row<'_>> {
        self.rows.iter().map(move |(line, map)| Row {
            path: &self.path,
            line: *line,
            map,
        })
    }
}

pub struct Row<'a> {
    path: &'a str,
    line: usize,
    map: &'a BTreeMap<String, String>,
}

impl Row<'_> {
    pub fn get(&self, col: &str) -> Result<&str> {
        self.map
            .get(col)
            .map(|s| s.trim())
            .ok_or_else(|| Error::data(self.line, format!("{}: missing column '{col}'", self.path)))
    }

    pub fn parse<T: std::str::FromStr>(&self, col: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        let raw = self.get(col)?;
        raw.parse()
            .map_err(|e| Error::data(self.line, format!("{}: bad {col} '{raw}': {e}", self.path)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classified {
    pub id: String,
    pub score: f64,
    pub label: SentimentLabel,
}

/// Rows of `id,score,label`, keyed by id. Duplicate ids are data errors.
pub fn read_classified(path: &Path) -> Result<BTreeMap<String, Classified>> {
    let mut out = BTreeMap::new();
    for row in Rows::load(path)?.iter() {
        let c = Classified {
            id: row.get("id")?.to_owned(),
            score: row.parse("score")?,
            label: row.parse("label")?,
        };
        if out.insert(c.id.clone(), c).is_some() {
            return Err(Error::data(row.line, format!("{path:?}: duplicate id")));
        }
    }
    Ok(out)
}

/// Rows of `id,label`, keyed by id.
pub fn read_labels(path: &Path) -> Result<BTreeMap<String, SentimentLabel>> {
    let mut out = BTreeMap::new();
    for row in Rows::load(path)?.iter() {
        let id = row.get("id")?.to_owned();
        if out.insert(id, row.parse("label")?).is_some() {
            return Err(Error::data(row.line, format!("{path:?}: duplicate id")));
        }
    }
    Ok(out)
}

/// Emotion profiles as written by the `emotions` command, keyed by id.
pub fn read_profiles(path: &Path) -> Result<BTreeMap<String, EmotionProfile>> {
    let mut out = BTreeMap::new();
    for row in Rows::load(path)?.iter() {
        let mut intensity = [0.0; 8];
        for (slot, e) in intensity.iter_mut().zip(Emotion::ALL) {
            *slot = row.parse(e.as_str())?;
        }
        let profile = EmotionProfile {
            intensity,
            matched_tokens: row.parse("matched_tokens")?,
            total_tokens: row.parse("total_tokens")?,
        };
        if out.insert(row.get("id")?.to_owned(), profile).is_some() {
            return Err(Error::data(row.line, format!("{path:?}: duplicate id")));
        }
    }
    Ok(out)
}

/// `score,engagement` pairs.
pub fn read_points(path: &Path) -> Result<Vec<(f64, f64)>> {
    Rows::load(path)?
        .iter()
        .map(|row| Ok((row.parse("score")?, row.parse("engagement")?)))
        .collect()
}
