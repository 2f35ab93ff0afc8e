//! Corpus-frequency bands for stratifying target lexemes.

use std::collections::HashMap;
use std::io::BufRead;

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng;
use crate::task::WsdInstance;

/// Default band edges: [1,1k) [1k,10k) [10k,50k) [50k,100k) [100k,inf).
pub const DEFAULT_EDGES: [u64; 5] = [1, 1_000, 10_000, 50_000, 100_000];

/// Merged edges for coarse stratification: the two lowest and the two
/// highest default bands collapsed into one each.
pub const MERGED_EDGES: [u64; 3] = [1, 10_000, 50_000];

/// Token counts plus band edges. Bands are right-open; the last edge opens
/// the unbounded top band.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyTable {
    counts: HashMap<String, u64>,
    edges: Vec<u64>,
}

/// A band assignment: index into the band list plus a display label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Band {
    pub index: usize,
    pub label: String,
}

impl FrequencyTable {
    pub fn new<I, S>(counts: I, edges: &[u64]) -> Result<Self>
    where
        I: IntoIterator<Item = (S, u64)>,
        S: Into<String>,
    {
        validate_edges(edges)?;
        Ok(Self {
            counts: counts.into_iter().map(|(t, c)| (t.into(), c)).collect(),
            edges: edges.to_vec(),
        })
    }

    /// Two-column `token<TAB>count` text (any whitespace accepted).
    pub fn from_reader<R: BufRead>(reader: R, edges: &[u64]) -> Result<Self> {
        validate_edges(edges)?;
        let mut counts = HashMap::new();
        for (index, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parsed = match fields.as_slice() {
                [token, count] => count.parse::<u64>().ok().map(|c| (token.to_string(), c)),
                _ => None,
            };
            match parsed {
                Some((token, count)) => {
                    counts.insert(token, count);
                }
                None => {
                    return Err(Error::MalformedFrequencyRow {
                        line: index + 1,
                        row: line.trim().to_string(),
                    })
                }
            }
        }
        Ok(Self {
            counts,
            edges: edges.to_vec(),
        })
    }

    /// Same counts under different band edges.
    pub fn with_edges(&self, edges: &[u64]) -> Result<Self> {
        validate_edges(edges)?;
        Ok(Self {
            counts: self.counts.clone(),
            edges: edges.to_vec(),
        })
    }

    pub fn count(&self, token: &str) -> u64 {
        self.counts.get(token).copied().unwrap_or(0)
    }

    pub fn edges(&self) -> &[u64] {
        &self.edges
    }

    pub fn band_count(&self) -> usize {
        self.edges.len()
    }

    pub fn band_of_count(&self, count: u64) -> Band {
        let index = self
            .edges
            .iter()
            .rposition(|&edge| count >= edge)
            .unwrap_or(0);
        Band {
            index,
            label: self.band_label(index),
        }
    }

    /// Band of a lemma; the flag marks unknown lemmas (count 0 lands in the
    /// lowest band).
    pub fn assign_band(&self, lemma: &str) -> (Band, bool) {
        let count = self.count(lemma);
        (self.band_of_count(count), count == 0)
    }

    pub fn band_label(&self, index: usize) -> String {
        let lower = format_count(self.edges[index]);
        match self.edges.get(index + 1) {
            Some(&upper) => format!("[{lower},{})", format_count(upper)),
            None => format!("[{lower},inf)"),
        }
    }

    pub fn band_labels(&self) -> Vec<String> {
        (0..self.band_count()).map(|i| self.band_label(i)).collect()
    }
}

fn validate_edges(edges: &[u64]) -> Result<()> {
    if edges.is_empty() || edges.windows(2).any(|pair| pair[0] >= pair[1]) {
        return Err(Error::BadBandEdges);
    }
    Ok(())
}

fn format_count(value: u64) -> String {
    if value >= 1_000_000 && value.is_multiple_of(1_000_000) {
        format!("{}m", value / 1_000_000)
    } else if value >= 1_000 && value.is_multiple_of(1_000) {
        format!("{}k", value / 1_000)
    } else {
        value.to_string()
    }
}

/// Sample an equal number of instances from every band: `k` seeded uniform
/// draws per band, where `k` is the smallest band size. Errors when a band
/// is empty, naming it.
pub fn sample_equal_bands(
    instances: &[WsdInstance],
    freq: &FrequencyTable,
    merged_edges: &[u64],
    seed: u64,
) -> Result<Vec<WsdInstance>> {
    let table = freq.with_edges(merged_edges)?;
    let mut by_band: Vec<Vec<usize>> = vec![Vec::new(); table.band_count()];
    for (index, instance) in instances.iter().enumerate() {
        let (band, _) = table.assign_band(&instance.lemma);
        by_band[band.index].push(index);
    }
    for (band_index, members) in by_band.iter().enumerate() {
        if members.is_empty() {
            return Err(Error::EmptyBand {
                band: table.band_label(band_index),
            });
        }
    }
    let k = by_band.iter().map(Vec::len).min().unwrap_or(0);

    let mut sampled = Vec::with_capacity(k * by_band.len());
    for (band_index, members) in by_band.iter().enumerate() {
        let mut stream = rng::stream(seed, &["bands", &table.band_label(band_index)]);
        let mut order: Vec<usize> = (0..members.len()).collect();
        for i in 0..k {
            let j = stream.gen_range(i..members.len());
            order.swap(i, j);
        }
        for &slot in order.iter().take(k) {
            sampled.push(instances[members[slot]].clone());
        }
    }
    Ok(sampled)
}
