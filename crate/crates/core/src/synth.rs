//! Synthetic inventories and embedding tables for calibration and
//! end-to-end checks.
//!
//! The orthogonal construction gives each sense slot its own basis
//! dimension. Sense vectors are basis vectors, and every example sentence
//! of a sense draws its context words from a slot-pure vocabulary whose
//! vectors point along the same basis dimension, so a contextualized
//! representation identifies its sense exactly in the noiseless case.

use std::collections::HashMap;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::embedding::{EmbeddingTable, SenseEmbeddingTable, SenseKey};
use crate::rng;
use crate::task::{Pos, SenseInventory, WsdInstance};

/// Aligned synthetic fixtures: an inventory plus a multi-sense table, its
/// single-vector conflation (lemma vectors are sense sums) and oracle
/// sense labels keyed by space-joined sentence tokens.
pub struct OrthogonalSetup {
    pub inventory: SenseInventory,
    pub word_table: EmbeddingTable,
    pub sense_table: SenseEmbeddingTable,
    pub labels: HashMap<String, String>,
}

/// Build the orthogonal construction. With `noise_sigma > 0`, every stored
/// vector receives independent Gaussian noise on each component.
pub fn orthogonal_setup(
    n_lexemes: usize,
    senses_per_lexeme: usize,
    examples_per_sense: usize,
    noise_sigma: f64,
    seed: u64,
) -> OrthogonalSetup {
    assert!(senses_per_lexeme >= 2);
    assert!(examples_per_sense >= 2);
    let dimension = senses_per_lexeme;
    let mut stream = rng::stream(seed, &["orthogonal"]);
    let noise = Normal::new(0.0, noise_sigma).expect("valid sigma");
    let noisy_basis = |slot: usize, stream: &mut rand_chacha::ChaCha8Rng| -> Vec<f64> {
        let mut vector = vec![0.0; dimension];
        vector[slot] = 1.0;
        if noise_sigma > 0.0 {
            for component in &mut vector {
                *component += noise.sample(stream);
            }
        }
        vector
    };

    // Slot-pure context vocabulary, shared across lexemes: two words per
    // (slot, example) position.
    let mut sense_entries: Vec<(SenseKey, Vec<f64>)> = Vec::new();
    let mut word_entries: Vec<(String, Vec<f64>)> = Vec::new();
    let mut context_words: Vec<Vec<(String, String)>> = Vec::with_capacity(senses_per_lexeme);
    for slot in 0..senses_per_lexeme {
        let mut slot_words = Vec::with_capacity(examples_per_sense);
        for example in 0..examples_per_sense {
            let pair: Vec<String> = ["l", "r"]
                .iter()
                .map(|side| format!("ctx{side}{slot}x{example}"))
                .collect();
            for word in &pair {
                let vector = noisy_basis(slot, &mut stream);
                sense_entries.push((SenseKey::new(word, "s0"), vector.clone()));
                word_entries.push((word.clone(), vector));
            }
            slot_words.push((pair[0].clone(), pair[1].clone()));
        }
        context_words.push(slot_words);
    }

    // Lexemes: every sense slot gets a basis sense vector; the word table
    // conflates a lemma to the sum of its noisy sense vectors.
    let mut labels = HashMap::new();
    let mut lexemes_json = Vec::with_capacity(n_lexemes);
    for index in 0..n_lexemes {
        let lemma = format!("lex{index}");
        let pos = Pos::ALL[index % Pos::ALL.len()];
        let mut conflated = vec![0.0; dimension];
        let mut senses_json = Vec::with_capacity(senses_per_lexeme);
        for (slot, slot_words) in context_words.iter().enumerate() {
            let vector = noisy_basis(slot, &mut stream);
            for (accumulator, component) in conflated.iter_mut().zip(&vector) {
                *accumulator += component;
            }
            let sense_id = format!("s{slot}");
            sense_entries.push((SenseKey::new(&lemma, &sense_id), vector));

            let examples: Vec<serde_json::Value> = slot_words
                .iter()
                .map(|(left, right)| {
                    let tokens = [left.as_str(), lemma.as_str(), right.as_str()];
                    labels.insert(tokens.join(" "), sense_id.clone());
                    serde_json::json!({ "tokens": tokens, "target_index": 1 })
                })
                .collect();
            senses_json.push(serde_json::json!({
                "sense_id": sense_id,
                "definition": format!("slot {slot}"),
                "examples": examples,
            }));
        }
        word_entries.push((lemma.clone(), conflated));
        lexemes_json.push(serde_json::json!({
            "lemma": lemma,
            "pos": pos.as_str(),
            "senses": senses_json,
        }));
    }

    let document = serde_json::json!({ "lexemes": lexemes_json }).to_string();
    let (inventory, report) = crate::task::ingest_inventory(&document).expect("valid fixture");
    assert_eq!(report.dropped_examples, 0);

    OrthogonalSetup {
        inventory,
        word_table: EmbeddingTable::from_entries(dimension, word_entries).expect("valid fixture"),
        sense_table: SenseEmbeddingTable::from_entries(dimension, sense_entries)
            .expect("valid fixture"),
        labels,
    }
}

/// Sorted distinct tokens and lemmas appearing in a set of instances.
pub fn vocabulary_of(instances: &[WsdInstance]) -> Vec<String> {
    let mut words: Vec<String> = instances
        .iter()
        .flat_map(|instance| {
            instance
                .target
                .tokens
                .iter()
                .chain(instance.options.iter().flat_map(|o| o.tokens.iter()))
                .chain(std::iter::once(&instance.lemma))
                .cloned()
        })
        .collect();
    words.sort_unstable();
    words.dedup();
    words
}

/// Random vectors for a vocabulary, exposed both as a one-sense-per-lemma
/// table and as the equivalent word table (identical vectors).
pub fn one_sense_tables(
    vocabulary: &[String],
    dimension: usize,
    seed: u64,
) -> (EmbeddingTable, SenseEmbeddingTable) {
    let mut word_entries = Vec::with_capacity(vocabulary.len());
    let mut sense_entries = Vec::with_capacity(vocabulary.len());
    for word in vocabulary {
        let mut stream = rng::stream(seed, &["one-sense", word]);
        let vector: Vec<f64> = (0..dimension).map(|_| stream.gen_range(-1.0..1.0)).collect();
        word_entries.push((word.clone(), vector.clone()));
        sense_entries.push((SenseKey::new(word, "s0"), vector));
    }
    (
        EmbeddingTable::from_entries(dimension, word_entries).expect("valid fixture"),
        SenseEmbeddingTable::from_entries(dimension, sense_entries).expect("valid fixture"),
    )
}

/// Random multi-sense table: every word gets `senses` in [2, 5] (drawn per
/// word) with uniform random vectors.
pub fn random_sense_table(
    vocabulary: &[String],
    dimension: usize,
    seed: u64,
) -> SenseEmbeddingTable {
    let mut entries = Vec::new();
    for word in vocabulary {
        let mut stream = rng::stream(seed, &["random-senses", word]);
        let senses = stream.gen_range(2..=5);
        for sense in 0..senses {
            let vector: Vec<f64> = (0..dimension).map(|_| stream.gen_range(-1.0..1.0)).collect();
            entries.push((SenseKey::new(word, &format!("s{sense}")), vector));
        }
    }
    SenseEmbeddingTable::from_entries(dimension, entries).expect("valid fixture")
}
