//! Additive composition and sense strategies.
//!
//! A word in context is represented by the elementwise sum of its vector
//! and the vectors of its context window. Multi-sense tables produce one
//! composed variant per target sense; context words contribute their sense
//! centroid, which keeps the enumeration linear in the target's sense count
//! instead of exponential over the window.

use serde::{Deserialize, Serialize};

use crate::context::ContextWindow;
use crate::embedding::{cosine, EmbeddingTable, SenseEmbeddingTable, SenseKey};
use crate::error::{Error, Result};

/// How an out-of-vocabulary target word is handled during prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OovPolicy {
    /// Fall back to a uniform random pick, flagged as unscoreable.
    #[default]
    Random,
    /// Abort the evaluation.
    Fail,
}

/// Elementwise sum of a non-empty list of equal-length vectors.
pub fn compose(vectors: &[&[f64]]) -> Result<Vec<f64>> {
    let first = vectors.first().ok_or(Error::EmptyComposition)?;
    let mut sum = first.to_vec();
    for vector in &vectors[1..] {
        if vector.len() != sum.len() {
            return Err(Error::LengthMismatch {
                left: sum.len(),
                right: vector.len(),
            });
        }
        for (accumulator, component) in sum.iter_mut().zip(vector.iter()) {
            *accumulator += component;
        }
    }
    Ok(sum)
}

/// A contextualized representation plus the number of context words that
/// had no vector and were skipped.
#[derive(Debug, Clone, PartialEq)]
pub struct Composed {
    pub vector: Vec<f64>,
    pub oov_skipped: usize,
}

/// Target word plus all in-vocabulary window words, summed. Returns
/// `Ok(None)` when the target itself is out of vocabulary under the
/// `Random` policy; errors under `Fail`.
pub fn contextualize_single(
    table: &EmbeddingTable,
    target: &str,
    window: &ContextWindow,
    policy: OovPolicy,
) -> Result<Option<Composed>> {
    let target_vector = match table.get(target) {
        Some(vector) => vector,
        None => {
            return match policy {
                OovPolicy::Fail => Err(Error::TargetOov {
                    word: target.to_string(),
                }),
                OovPolicy::Random => Ok(None),
            }
        }
    };
    let mut vector = target_vector.to_vec();
    let mut oov_skipped = 0;
    for word in &window.words {
        match table.get(word) {
            Some(context_vector) => {
                for (accumulator, component) in vector.iter_mut().zip(context_vector) {
                    *accumulator += component;
                }
            }
            None => oov_skipped += 1,
        }
    }
    Ok(Some(Composed {
        vector,
        oov_skipped,
    }))
}

/// The sense identity attached to a composed variant: a concrete sense key
/// for multi-sense tables, or the single-vector marker.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SenseChoice {
    Mono,
    Sense(SenseKey),
}

impl std::fmt::Display for SenseChoice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Mono => write!(f, "mono"),
            Self::Sense(key) => write!(f, "{}", key.render('%')),
        }
    }
}

/// One composed representation under a particular sense assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct ComposedVariant {
    pub sense: SenseChoice,
    pub vector: Vec<f64>,
}

/// Variants of a contextualized multi-sense target, one per sense, plus
/// the count of context words whose lemma had no senses in the table.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiComposed {
    pub variants: Vec<ComposedVariant>,
    pub oov_skipped: usize,
}

/// One variant per sense of the target lemma: the sense vector plus the
/// sense centroid of every known context word, in window order.
pub fn contextualize_multi(
    table: &SenseEmbeddingTable,
    target_lemma: &str,
    window: &ContextWindow,
) -> Result<MultiComposed> {
    let senses = table.senses_of(target_lemma);
    if senses.is_empty() {
        return Err(Error::UnknownLemma {
            lemma: target_lemma.to_string(),
        });
    }
    let mut oov_skipped = 0;
    let centroids: Vec<Vec<f64>> = window
        .words
        .iter()
        .filter_map(|word| {
            let centroid = table.sense_centroid(word);
            if centroid.is_none() {
                oov_skipped += 1;
            }
            centroid
        })
        .collect();

    let variants = senses
        .into_iter()
        .map(|(key, sense_vector)| {
            let mut vector = sense_vector.to_vec();
            for centroid in &centroids {
                for (accumulator, component) in vector.iter_mut().zip(centroid) {
                    *accumulator += component;
                }
            }
            ComposedVariant {
                sense: SenseChoice::Sense(key.clone()),
                vector,
            }
        })
        .collect();
    Ok(MultiComposed {
        variants,
        oov_skipped,
    })
}

/// Maximum cosine over all variant pairs, with the argmax pair. Ties are
/// broken toward the lexicographically smallest (left sense, right sense)
/// pair so results do not depend on list order.
pub fn closest_variant_similarity(
    left: &[ComposedVariant],
    right: &[ComposedVariant],
) -> Result<(f64, SenseChoice, SenseChoice)> {
    if left.is_empty() || right.is_empty() {
        return Err(Error::EmptyComposition);
    }
    let mut best: Option<(f64, &SenseChoice, &SenseChoice)> = None;
    for a in left {
        for b in right {
            let value = cosine(&a.vector, &b.vector)?;
            let candidate = (value, &a.sense, &b.sense);
            best = Some(match best {
                None => candidate,
                Some(current) => {
                    if value > current.0
                        || (value == current.0
                            && (candidate.1, candidate.2) < (current.1, current.2))
                    {
                        candidate
                    } else {
                        current
                    }
                }
            });
        }
    }
    let (value, a, b) = best.expect("both lists are non-empty");
    Ok((value, a.clone(), b.clone()))
}

/// An embedding model: single-vector or multi-sense.
#[derive(Debug, Clone)]
pub enum Model {
    Single(EmbeddingTable),
    Multi(SenseEmbeddingTable),
}

impl Model {
    pub fn dimension(&self) -> usize {
        match self {
            Self::Single(table) => table.dimension(),
            Self::Multi(table) => table.dimension(),
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        match self {
            Self::Single(table) => Self::Single(table.scaled(factor)),
            Self::Multi(table) => Self::Multi(table.scaled(factor)),
        }
    }
}

/// A composed phrase vector under one sense assignment for each word.
#[derive(Debug, Clone, PartialEq)]
pub struct PhraseVariant {
    pub first: SenseChoice,
    pub second: SenseChoice,
    pub vector: Vec<f64>,
}

/// All composed variants of a two-word phrase: the cross product of the
/// words' senses for multi-sense tables, a single sum otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct SenseConfigurationSet {
    pub words: (String, String),
    pub variants: Vec<PhraseVariant>,
}

pub fn enumerate_phrase_configs(
    model: &Model,
    first_word: &str,
    second_word: &str,
) -> Result<SenseConfigurationSet> {
    let variants = match model {
        Model::Single(table) => {
            let first = table.get(first_word).ok_or_else(|| Error::UnknownWord {
                word: first_word.to_string(),
            })?;
            let second = table.get(second_word).ok_or_else(|| Error::UnknownWord {
                word: second_word.to_string(),
            })?;
            vec![PhraseVariant {
                first: SenseChoice::Mono,
                second: SenseChoice::Mono,
                vector: compose(&[first, second])?,
            }]
        }
        Model::Multi(table) => {
            let first_senses = table.senses_of(first_word);
            if first_senses.is_empty() {
                return Err(Error::UnknownLemma {
                    lemma: first_word.to_string(),
                });
            }
            let second_senses = table.senses_of(second_word);
            if second_senses.is_empty() {
                return Err(Error::UnknownLemma {
                    lemma: second_word.to_string(),
                });
            }
            let mut variants = Vec::with_capacity(first_senses.len() * second_senses.len());
            for (first_key, first_vector) in &first_senses {
                for (second_key, second_vector) in &second_senses {
                    variants.push(PhraseVariant {
                        first: SenseChoice::Sense((*first_key).clone()),
                        second: SenseChoice::Sense((*second_key).clone()),
                        vector: compose(&[first_vector, second_vector])?,
                    });
                }
            }
            variants
        }
    };
    Ok(SenseConfigurationSet {
        words: (first_word.to_string(), second_word.to_string()),
        variants,
    })
}

/// Aggregation over all cross-pair cosines of two configuration sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConfigMode {
    Max,
    Min,
    Mean,
}

pub fn configuration_similarity(
    left: &SenseConfigurationSet,
    right: &SenseConfigurationSet,
    mode: ConfigMode,
) -> Result<f64> {
    if left.variants.is_empty() || right.variants.is_empty() {
        return Err(Error::EmptyComposition);
    }
    let mut minimum = f64::INFINITY;
    let mut maximum = f64::NEG_INFINITY;
    let mut sum = 0.0;
    let mut count = 0usize;
    for a in &left.variants {
        for b in &right.variants {
            let value = cosine(&a.vector, &b.vector)?;
            minimum = minimum.min(value);
            maximum = maximum.max(value);
            sum += value;
            count += 1;
        }
    }
    Ok(match mode {
        ConfigMode::Max => maximum,
        ConfigMode::Min => minimum,
        // Rounding in the summation must not push the mean outside
        // [min, max].
        ConfigMode::Mean => (sum / count as f64).clamp(minimum, maximum),
    })
}
