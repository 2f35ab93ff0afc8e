//! Prediction strategies and evaluation for the discrimination task.
//!
//! Every strategy scores the options of an instance against the target
//! sentence and picks the argmax, breaking ties uniformly at random from a
//! stream derived from (seed, instance index, lemma), so results are
//! independent of evaluation order and parallel schedule.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::{BufRead, Write};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::compose::{
    closest_variant_similarity, contextualize_multi, contextualize_single, ComposedVariant,
    OovPolicy, SenseChoice,
};
use crate::context::{window_for, AnnotatedSentence, StopWords, WindowSpec};
use crate::embedding::{cosine, EmbeddingTable, SenseEmbeddingTable};
use crate::error::{Error, Result};
use crate::freq::FrequencyTable;
use crate::rng;
use crate::task::{Pos, WsdInstance};

/// Scores within this absolute distance of the maximum count as tied.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Outcome of scoring one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub instance_index: usize,
    pub lemma: String,
    pub pos: Pos,
    pub chosen_index: usize,
    pub gold_index: usize,
    pub correct: bool,
    pub scores: Vec<f64>,
    pub tie_broken: bool,
    pub unscoreable: bool,
    pub oov_context_words: usize,
}

fn instance_stream(seed: u64, index: usize, instance: &WsdInstance) -> ChaCha8Rng {
    rng::stream(
        seed,
        &[
            "predict",
            &index.to_string(),
            &instance.lemma,
            instance.pos.as_str(),
        ],
    )
}

/// Argmax with random tie-breaking among scores within [`TIE_TOLERANCE`]
/// of the maximum.
fn choose(scores: &[f64], stream: &mut ChaCha8Rng) -> (usize, bool) {
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let tied: Vec<usize> = (0..scores.len())
        .filter(|&i| scores[i] >= max - TIE_TOLERANCE)
        .collect();
    if tied.len() > 1 {
        (tied[stream.gen_range(0..tied.len())], true)
    } else {
        (tied[0], false)
    }
}

fn unscoreable_prediction(
    instance: &WsdInstance,
    index: usize,
    stream: &mut ChaCha8Rng,
) -> Prediction {
    let chosen = stream.gen_range(0..instance.options.len());
    Prediction {
        instance_index: index,
        lemma: instance.lemma.clone(),
        pos: instance.pos,
        chosen_index: chosen,
        gold_index: instance.gold_index,
        correct: chosen == instance.gold_index,
        scores: vec![0.0; instance.options.len()],
        tie_broken: false,
        unscoreable: true,
        oov_context_words: 0,
    }
}

fn prediction_from_scores(
    instance: &WsdInstance,
    index: usize,
    scores: Vec<f64>,
    oov_context_words: usize,
    stream: &mut ChaCha8Rng,
) -> Prediction {
    let (chosen, tie_broken) = choose(&scores, stream);
    Prediction {
        instance_index: index,
        lemma: instance.lemma.clone(),
        pos: instance.pos,
        chosen_index: chosen,
        gold_index: instance.gold_index,
        correct: chosen == instance.gold_index,
        scores,
        tie_broken,
        unscoreable: false,
        oov_context_words,
    }
}

fn target_sentence(instance: &WsdInstance) -> Result<AnnotatedSentence> {
    sentence_of(&instance.target.tokens, instance.target.target_index)
}

fn sentence_of(tokens: &[String], target_index: usize) -> Result<AnnotatedSentence> {
    AnnotatedSentence::new(tokens.to_vec(), target_index)
}

/// Single-vector strategy: compose the lemma with its context window and
/// pick the option whose composed representation is closest by cosine.
pub fn predict_single(
    table: &EmbeddingTable,
    instance: &WsdInstance,
    index: usize,
    window: WindowSpec,
    stopwords: &StopWords,
    policy: OovPolicy,
    seed: u64,
) -> Result<Prediction> {
    let mut stream = instance_stream(seed, index, instance);
    let target_window = window_for(&target_sentence(instance)?, window, stopwords)?;
    let target = match contextualize_single(table, &instance.lemma, &target_window, policy)? {
        Some(composed) => composed,
        None => return Ok(unscoreable_prediction(instance, index, &mut stream)),
    };

    let mut oov = target.oov_skipped;
    let mut scores = Vec::with_capacity(instance.options.len());
    for option in &instance.options {
        let option_window = window_for(
            &sentence_of(&option.tokens, option.target_index)?,
            window,
            stopwords,
        )?;
        let composed = contextualize_single(table, &instance.lemma, &option_window, policy)?
            .expect("target lemma was in vocabulary");
        oov += composed.oov_skipped;
        scores.push(cosine(&target.vector, &composed.vector)?);
    }
    Ok(prediction_from_scores(instance, index, scores, oov, &mut stream))
}

/// Multi-sense strategy: compose every sense of the lemma with the context
/// and score options by the closest composed sense pair.
pub fn predict_multi(
    table: &SenseEmbeddingTable,
    instance: &WsdInstance,
    index: usize,
    window: WindowSpec,
    stopwords: &StopWords,
    seed: u64,
) -> Result<Prediction> {
    predict_multi_restricted(table, instance, index, window, stopwords, seed, None)
}

/// Multi-sense strategy with pre-supplied sense labels: sentences found in
/// `labels` (keyed by space-joined tokens) have their variant list
/// restricted to the labeled sense; unlabeled sentences keep all senses.
pub fn predict_multi_oracle(
    table: &SenseEmbeddingTable,
    instance: &WsdInstance,
    index: usize,
    labels: &HashMap<String, String>,
    window: WindowSpec,
    stopwords: &StopWords,
    seed: u64,
) -> Result<Prediction> {
    predict_multi_restricted(table, instance, index, window, stopwords, seed, Some(labels))
}

fn predict_multi_restricted(
    table: &SenseEmbeddingTable,
    instance: &WsdInstance,
    index: usize,
    window: WindowSpec,
    stopwords: &StopWords,
    seed: u64,
    labels: Option<&HashMap<String, String>>,
) -> Result<Prediction> {
    let mut stream = instance_stream(seed, index, instance);
    if !table.contains_lemma(&instance.lemma) {
        return Ok(unscoreable_prediction(instance, index, &mut stream));
    }

    let target_window = window_for(&target_sentence(instance)?, window, stopwords)?;
    let target = contextualize_multi(table, &instance.lemma, &target_window)?;
    let target_variants = restrict_variants(
        table,
        &instance.lemma,
        target.variants,
        labels,
        &instance.target.tokens,
    )?;

    let mut oov = target.oov_skipped;
    let mut scores = Vec::with_capacity(instance.options.len());
    for option in &instance.options {
        let option_window = window_for(
            &sentence_of(&option.tokens, option.target_index)?,
            window,
            stopwords,
        )?;
        let composed = contextualize_multi(table, &instance.lemma, &option_window)?;
        let option_variants = restrict_variants(
            table,
            &instance.lemma,
            composed.variants,
            labels,
            &option.tokens,
        )?;
        oov += composed.oov_skipped;
        let (similarity, _, _) = closest_variant_similarity(&target_variants, &option_variants)?;
        scores.push(similarity);
    }
    Ok(prediction_from_scores(instance, index, scores, oov, &mut stream))
}

fn restrict_variants(
    table: &SenseEmbeddingTable,
    lemma: &str,
    variants: Vec<ComposedVariant>,
    labels: Option<&HashMap<String, String>>,
    tokens: &[String],
) -> Result<Vec<ComposedVariant>> {
    let Some(labels) = labels else {
        return Ok(variants);
    };
    let Some(sense_id) = labels.get(&tokens.join(" ")) else {
        return Ok(variants);
    };
    if !table
        .senses_of(lemma)
        .iter()
        .any(|(key, _)| key.sense_id() == sense_id)
    {
        return Err(Error::UnknownOracleSense {
            lemma: lemma.to_string(),
            sense_id: sense_id.clone(),
        });
    }
    Ok(variants
        .into_iter()
        .filter(|variant| match &variant.sense {
            SenseChoice::Sense(key) => key.sense_id() == sense_id,
            SenseChoice::Mono => false,
        })
        .collect())
}

/// Word-overlap baseline: number of distinct word types shared between the
/// target window and each option window.
pub fn predict_overlap(
    instance: &WsdInstance,
    index: usize,
    window: WindowSpec,
    stopwords: &StopWords,
    seed: u64,
) -> Result<Prediction> {
    let mut stream = instance_stream(seed, index, instance);
    let target_window = window_for(&target_sentence(instance)?, window, stopwords)?;
    let target_types: HashSet<&str> = target_window.words.iter().map(String::as_str).collect();

    let mut scores = Vec::with_capacity(instance.options.len());
    for option in &instance.options {
        let option_window = window_for(
            &sentence_of(&option.tokens, option.target_index)?,
            window,
            stopwords,
        )?;
        let option_types: HashSet<&str> = option_window.words.iter().map(String::as_str).collect();
        scores.push(target_types.intersection(&option_types).count() as f64);
    }
    Ok(prediction_from_scores(instance, index, scores, 0, &mut stream))
}

/// Random baseline: uniform over options.
pub fn predict_random(instance: &WsdInstance, index: usize, seed: u64) -> Prediction {
    let mut stream = instance_stream(seed, index, instance);
    let chosen = stream.gen_range(0..instance.options.len());
    Prediction {
        instance_index: index,
        lemma: instance.lemma.clone(),
        pos: instance.pos,
        chosen_index: chosen,
        gold_index: instance.gold_index,
        correct: chosen == instance.gold_index,
        scores: vec![0.0; instance.options.len()],
        tie_broken: instance.options.len() > 1,
        unscoreable: false,
        oov_context_words: 0,
    }
}

/// Accuracy for one group of instances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupStats {
    pub correct: usize,
    pub total: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandGroup {
    pub band: String,
    pub correct: usize,
    pub total: usize,
    pub accuracy: f64,
}

/// Accuracy with per-POS and (optionally) per-band breakdowns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub accuracy: f64,
    pub n_instances: usize,
    pub n_correct: usize,
    pub per_pos: BTreeMap<String, GroupStats>,
    pub per_band: Vec<BandGroup>,
    pub ties: usize,
    pub unscoreable: usize,
    pub oov_context_words: usize,
}

/// Aggregate predictions over their instances.
pub fn evaluate(
    predictions: &[Prediction],
    instances: &[WsdInstance],
    freq: Option<&FrequencyTable>,
) -> Result<EvalReport> {
    if predictions.len() != instances.len() {
        return Err(Error::CountMismatch {
            predictions: predictions.len(),
            instances: instances.len(),
        });
    }
    let mut n_correct = 0;
    let mut ties = 0;
    let mut unscoreable = 0;
    let mut oov_context_words = 0;
    let mut per_pos: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    let mut per_band: Vec<(String, usize, usize)> = freq
        .map(|f| f.band_labels().into_iter().map(|l| (l, 0, 0)).collect())
        .unwrap_or_default();

    for (prediction, instance) in predictions.iter().zip(instances) {
        if prediction.lemma != instance.lemma {
            return Err(Error::Invalid(format!(
                "prediction {} is for lemma {:?} but the instance is {:?}",
                prediction.instance_index, prediction.lemma, instance.lemma
            )));
        }
        let correct = prediction.chosen_index == instance.gold_index;
        n_correct += correct as usize;
        ties += prediction.tie_broken as usize;
        unscoreable += prediction.unscoreable as usize;
        oov_context_words += prediction.oov_context_words;

        let pos_entry = per_pos.entry(instance.pos.to_string()).or_insert((0, 0));
        pos_entry.0 += correct as usize;
        pos_entry.1 += 1;

        if let Some(freq) = freq {
            let (band, _) = freq.assign_band(&instance.lemma);
            per_band[band.index].1 += correct as usize;
            per_band[band.index].2 += 1;
        }
    }

    let stats = |correct: usize, total: usize| GroupStats {
        correct,
        total,
        accuracy: correct as f64 / total as f64,
    };
    Ok(EvalReport {
        accuracy: n_correct as f64 / instances.len() as f64,
        n_instances: instances.len(),
        n_correct,
        per_pos: per_pos
            .into_iter()
            .map(|(pos, (correct, total))| (pos, stats(correct, total)))
            .collect(),
        per_band: per_band
            .into_iter()
            .filter(|(_, _, total)| *total > 0)
            .map(|(band, correct, total)| BandGroup {
                band,
                correct,
                total,
                accuracy: correct as f64 / total as f64,
            })
            .collect(),
        ties,
        unscoreable,
        oov_context_words,
    })
}

/// Result of the randomized pairwise permutation test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignificanceResult {
    pub p_value: f64,
    pub observed_diff: f64,
    pub rounds: u64,
    pub seed: u64,
}

/// Two-sided randomized pairwise permutation test on per-instance
/// correctness. Each round independently swaps every (a, b) pair with
/// probability 1/2 and recomputes the absolute accuracy difference;
/// p = (#rounds with diff >= observed + 1) / (rounds + 1).
pub fn permutation_test(
    correct_a: &[bool],
    correct_b: &[bool],
    rounds: u64,
    seed: u64,
) -> Result<SignificanceResult> {
    if correct_a.len() != correct_b.len() {
        return Err(Error::VectorLengthMismatch {
            left: correct_a.len(),
            right: correct_b.len(),
        });
    }
    if correct_a.is_empty() {
        return Err(Error::NoObservations);
    }
    if rounds == 0 {
        return Err(Error::NoRounds);
    }

    // Work in integer pair differences: |mean(A) - mean(B)| >= observed
    // iff |sum of differences| >= the observed sum, exactly.
    let diffs: Vec<i64> = correct_a
        .iter()
        .zip(correct_b)
        .map(|(&a, &b)| a as i64 - b as i64)
        .collect();
    let observed: u64 = diffs.iter().sum::<i64>().unsigned_abs();

    let mut stream = rng::stream(seed, &["permutation"]);
    let mut exceed = 0u64;
    for _ in 0..rounds {
        let mut acc: i64 = 0;
        let mut bits: u64 = 0;
        let mut remaining = 0u32;
        for &diff in &diffs {
            if remaining == 0 {
                bits = stream.gen();
                remaining = 64;
            }
            acc += if bits & 1 == 1 { -diff } else { diff };
            bits >>= 1;
            remaining -= 1;
        }
        if acc.unsigned_abs() >= observed {
            exceed += 1;
        }
    }

    Ok(SignificanceResult {
        p_value: (exceed + 1) as f64 / (rounds + 1) as f64,
        observed_diff: observed as f64 / correct_a.len() as f64,
        rounds,
        seed,
    })
}

/// Write predictions as line-delimited records.
pub fn write_predictions<W: Write>(writer: &mut W, predictions: &[Prediction]) -> Result<()> {
    for prediction in predictions {
        serde_json::to_writer(&mut *writer, prediction)
            .map_err(|e| Error::Invalid(e.to_string()))?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_predictions<R: BufRead>(reader: R) -> Result<Vec<Prediction>> {
    let mut predictions = Vec::new();
    for (index, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let prediction: Prediction =
            serde_json::from_str(&line).map_err(|e| Error::MalformedTaskRecord {
                line: index + 1,
                reason: e.to_string(),
            })?;
        predictions.push(prediction);
    }
    Ok(predictions)
}
