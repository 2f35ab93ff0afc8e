//! Word and sense vector tables.
//!
//! Tables are loaded once from whitespace-separated text (token followed by
//! vector components, optional `count dim` header) and are immutable
//! afterwards, so they can be shared read-only across evaluation threads.

use std::collections::HashMap;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default separator between lemma and sense id in sense tokens.
pub const DEFAULT_SENSE_SEPARATOR: char = '%';

/// Dense word-vector table keyed by token.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dimension: usize,
    entries: HashMap<String, Vec<f64>>,
}

/// Counters reported by the loaders.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadReport {
    /// Tokens that appeared more than once (last occurrence kept).
    pub duplicates: usize,
    /// Lines rejected because the token was not a valid sense key.
    pub skipped_lines: usize,
}

impl EmbeddingTable {
    /// Build a table from pre-parsed entries. Every vector must have length
    /// `dimension` and the map must end up non-empty.
    pub fn from_entries<I, S>(dimension: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Vec<f64>)>,
        S: Into<String>,
    {
        if dimension == 0 {
            return Err(Error::Invalid("embedding dimension must be > 0".into()));
        }
        let mut map = HashMap::new();
        for (token, vector) in entries {
            if vector.len() != dimension {
                return Err(Error::LengthMismatch {
                    left: dimension,
                    right: vector.len(),
                });
            }
            map.insert(token.into(), vector);
        }
        if map.is_empty() {
            return Err(Error::EmptyEmbeddings);
        }
        Ok(Self {
            dimension,
            entries: map,
        })
    }

    /// Load from text: one `token v1 .. vd` line per entry. With
    /// `expect_header` the first line must be `count dim` and both values
    /// are checked against the body. Duplicate tokens resolve last-wins and
    /// are counted in the report.
    pub fn from_reader<R: BufRead>(reader: R, expect_header: bool) -> Result<(Self, LoadReport)> {
        Self::load_lines(numbered_lines(reader), expect_header)
    }

    /// Load with header auto-detection: a first line of exactly two integer
    /// fields is treated as a `count dim` header.
    pub fn from_reader_auto<R: BufRead>(reader: R) -> Result<(Self, LoadReport)> {
        let mut lines = numbered_lines(reader).peekable();
        let first: String = loop {
            match lines.peek() {
                Some(Ok((_, line))) if line.trim().is_empty() => {
                    lines.next();
                }
                Some(Ok((_, line))) => break line.clone(),
                Some(Err(_)) | None => break String::new(),
            }
        };
        let fields: Vec<&str> = first.split_whitespace().collect();
        let looks_like_header =
            fields.len() == 2 && fields.iter().all(|f| f.parse::<usize>().is_ok());
        Self::load_lines(lines, looks_like_header)
    }

    fn load_lines<I>(mut lines: I, expect_header: bool) -> Result<(Self, LoadReport)>
    where
        I: Iterator<Item = Result<(usize, String)>>,
    {
        let mut header: Option<(usize, usize)> = None;
        if expect_header {
            let (line_no, line) = loop {
                match lines.next() {
                    Some(item) => {
                        let item = item?;
                        if !item.1.trim().is_empty() {
                            break item;
                        }
                    }
                    None => return Err(Error::EmptyEmbeddings),
                }
            };
            header = Some(parse_header(line_no, &line)?);
        }

        let mut dimension = header.map(|(_, dim)| dim);
        let mut entries = HashMap::new();
        let mut report = LoadReport::default();
        let mut data_lines = 0usize;

        for item in lines {
            let (line_no, line) = item?;
            let mut fields = line.split_whitespace();
            let token = match fields.next() {
                Some(token) => token,
                None => continue, // blank line
            };
            let vector = parse_components(line_no, fields)?;
            data_lines += 1;
            match dimension {
                None => {
                    if vector.is_empty() {
                        return Err(Error::Invalid(format!(
                            "line {line_no}: no vector components"
                        )));
                    }
                    dimension = Some(vector.len());
                }
                Some(dim) => {
                    if vector.len() != dim {
                        return Err(Error::DimensionMismatch {
                            line: line_no,
                            expected: dim,
                            found: vector.len(),
                        });
                    }
                }
            }
            if entries.insert(token.to_string(), vector).is_some() {
                report.duplicates += 1;
            }
        }

        if let Some((count, _)) = header {
            if count != data_lines {
                return Err(Error::HeaderBodyMismatch {
                    declared: count,
                    found: data_lines,
                });
            }
        }
        let dimension = dimension.ok_or(Error::EmptyEmbeddings)?;
        if entries.is_empty() {
            return Err(Error::EmptyEmbeddings);
        }
        Ok((
            Self {
                dimension,
                entries,
            },
            report,
        ))
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, token: &str) -> Option<&[f64]> {
        self.entries.get(token).map(Vec::as_slice)
    }

    pub fn contains(&self, token: &str) -> bool {
        self.entries.contains_key(token)
    }

    /// Multiply every stored vector by a constant. Cosine-based decisions
    /// must be invariant under this for positive factors.
    pub fn scaled(&self, factor: f64) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|(token, vector)| {
                (
                    token.clone(),
                    vector.iter().map(|component| component * factor).collect(),
                )
            })
            .collect();
        Self {
            dimension: self.dimension,
            entries,
        }
    }
}

/// Identity of one sense of a lemma, rendered as `lemma<sep>sense_id`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SenseKey {
    lemma: String,
    sense_id: String,
}

impl SenseKey {
    /// The lemma is lowercased; it must be non-empty and must not contain
    /// the separator used for rendering.
    pub fn new(lemma: &str, sense_id: &str) -> Self {
        Self {
            lemma: lemma.to_lowercase(),
            sense_id: sense_id.to_string(),
        }
    }

    /// Split a rendered token at the first separator occurrence. Returns
    /// `None` when the separator is absent or the lemma part is empty.
    pub fn parse(token: &str, separator: char) -> Option<Self> {
        let (lemma, sense_id) = token.split_once(separator)?;
        if lemma.is_empty() {
            return None;
        }
        Some(Self::new(lemma, sense_id))
    }

    pub fn render(&self, separator: char) -> String {
        format!("{}{}{}", self.lemma, separator, self.sense_id)
    }

    pub fn lemma(&self) -> &str {
        &self.lemma
    }

    pub fn sense_id(&self) -> &str {
        &self.sense_id
    }
}

/// Sense-vector table with a lemma index for enumerating a lexeme's senses.
#[derive(Debug, Clone, PartialEq)]
pub struct SenseEmbeddingTable {
    dimension: usize,
    entries: HashMap<SenseKey, Vec<f64>>,
    lemma_index: HashMap<String, Vec<SenseKey>>,
}

impl SenseEmbeddingTable {
    pub fn from_entries<I>(dimension: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (SenseKey, Vec<f64>)>,
    {
        if dimension == 0 {
            return Err(Error::Invalid("embedding dimension must be > 0".into()));
        }
        let mut map = HashMap::new();
        for (key, vector) in entries {
            if vector.len() != dimension {
                return Err(Error::LengthMismatch {
                    left: dimension,
                    right: vector.len(),
                });
            }
            map.insert(key, vector);
        }
        if map.is_empty() {
            return Err(Error::NoSenseKeys { skipped: 0 });
        }
        Ok(Self::index(dimension, map))
    }

    /// Load from text where each token renders a sense key. Lines whose
    /// token lacks the separator are skipped and counted.
    pub fn from_reader<R: BufRead>(reader: R, separator: char) -> Result<(Self, LoadReport)> {
        let mut dimension: Option<usize> = None;
        let mut entries: HashMap<SenseKey, Vec<f64>> = HashMap::new();
        let mut report = LoadReport::default();

        for item in numbered_lines(reader) {
            let (line_no, line) = item?;
            let mut fields = line.split_whitespace();
            let token = match fields.next() {
                Some(token) => token,
                None => continue,
            };
            let key = match SenseKey::parse(token, separator) {
                Some(key) => key,
                None => {
                    report.skipped_lines += 1;
                    continue;
                }
            };
            let vector = parse_components(line_no, fields)?;
            match dimension {
                None => {
                    if vector.is_empty() {
                        return Err(Error::Invalid(format!(
                            "line {line_no}: no vector components"
                        )));
                    }
                    dimension = Some(vector.len());
                }
                Some(dim) => {
                    if vector.len() != dim {
                        return Err(Error::DimensionMismatch {
                            line: line_no,
                            expected: dim,
                            found: vector.len(),
                        });
                    }
                }
            }
            if entries.insert(key, vector).is_some() {
                report.duplicates += 1;
            }
        }

        match dimension {
            Some(dim) if !entries.is_empty() => Ok((Self::index(dim, entries), report)),
            _ => Err(Error::NoSenseKeys {
                skipped: report.skipped_lines,
            }),
        }
    }

    fn index(dimension: usize, entries: HashMap<SenseKey, Vec<f64>>) -> Self {
        let mut lemma_index: HashMap<String, Vec<SenseKey>> = HashMap::new();
        for key in entries.keys() {
            lemma_index
                .entry(key.lemma().to_string())
                .or_default()
                .push(key.clone());
        }
        for keys in lemma_index.values_mut() {
            keys.sort_by(|a, b| a.sense_id().cmp(b.sense_id()));
        }
        Self {
            dimension,
            entries,
            lemma_index,
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &SenseKey) -> Option<&[f64]> {
        self.entries.get(key).map(Vec::as_slice)
    }

    pub fn contains_lemma(&self, lemma: &str) -> bool {
        self.lemma_index.contains_key(lemma)
    }

    pub fn lemma_count(&self) -> usize {
        self.lemma_index.len()
    }

    /// All senses of a lemma in lexicographic sense-id order; empty when
    /// the lemma is unknown.
    pub fn senses_of(&self, lemma: &str) -> Vec<(&SenseKey, &[f64])> {
        match self.lemma_index.get(lemma) {
            Some(keys) => keys
                .iter()
                .map(|key| (key, self.entries[key].as_slice()))
                .collect(),
            None => Vec::new(),
        }
    }

    /// Arithmetic mean of all sense vectors of a lemma; `None` when the
    /// lemma is unknown.
    pub fn sense_centroid(&self, lemma: &str) -> Option<Vec<f64>> {
        let keys = self.lemma_index.get(lemma)?;
        let mut sum = vec![0.0; self.dimension];
        for key in keys {
            for (accumulator, component) in sum.iter_mut().zip(&self.entries[key]) {
                *accumulator += component;
            }
        }
        let count = keys.len() as f64;
        for component in &mut sum {
            *component /= count;
        }
        Some(sum)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|(key, vector)| {
                (
                    key.clone(),
                    vector.iter().map(|component| component * factor).collect(),
                )
            })
            .collect();
        Self {
            dimension: self.dimension,
            entries,
            lemma_index: self.lemma_index.clone(),
        }
    }
}

/// Cosine similarity in [-1, 1]. Zero-norm inputs yield 0 so downstream
/// argmax stays total; use [`cosine_flagged`] to observe that case.
pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64> {
    cosine_flagged(u, v).map(|(value, _)| value)
}

/// Cosine similarity plus a degenerate-input flag (true when either vector
/// has zero norm).
pub fn cosine_flagged(u: &[f64], v: &[f64]) -> Result<(f64, bool)> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    let mut dot = 0.0;
    let mut norm_u = 0.0;
    let mut norm_v = 0.0;
    for (a, b) in u.iter().zip(v) {
        dot += a * b;
        norm_u += a * a;
        norm_v += b * b;
    }
    if norm_u == 0.0 || norm_v == 0.0 {
        return Ok((0.0, true));
    }
    let value = dot / (norm_u.sqrt() * norm_v.sqrt());
    Ok((value.clamp(-1.0, 1.0), false))
}

fn parse_header(line_no: usize, line: &str) -> Result<(usize, usize)> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != 2 {
        return Err(Error::MalformedHeader {
            header: line.trim().to_string(),
        });
    }
    let count = fields[0].parse::<usize>();
    let dim = fields[1].parse::<usize>();
    match (count, dim) {
        (Ok(count), Ok(dim)) if dim > 0 => Ok((count, dim)),
        _ => Err(Error::MalformedHeader {
            header: format!("line {line_no}: {}", line.trim()),
        }),
    }
}

fn parse_components<'a, I: Iterator<Item = &'a str>>(line_no: usize, fields: I) -> Result<Vec<f64>> {
    fields
        .map(|field| {
            field.parse::<f64>().map_err(|_| Error::NonNumericComponent {
                line: line_no,
                value: field.to_string(),
            })
        })
        .collect()
}

fn numbered_lines<R: BufRead>(reader: R) -> impl Iterator<Item = Result<(usize, String)>> {
    reader
        .lines()
        .enumerate()
        .map(|(index, line)| Ok((index + 1, line?)))
}
