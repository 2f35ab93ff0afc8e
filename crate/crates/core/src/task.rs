//! Sense-inventory ingestion and discrimination-task generation.
//!
//! An inventory document maps lexemes (lemma + part of speech) to senses,
//! each carrying definition text and example sentences. Task generation
//! samples, per eligible lexeme, `n` senses, a target sense with two of its
//! examples (target sentence and gold option) and one example for every
//! other sense, then shuffles the options. All draws come from per-lexeme
//! seeded streams, so output is a pure function of (inventory bytes, spec).

use std::collections::{HashMap, HashSet};
use std::io::{BufRead, Write};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::context::tokenize;
use crate::error::{Error, Result};
use crate::rng;

/// Parts of speech covered by the task.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pos {
    Adjective,
    Noun,
    Verb,
}

impl Pos {
    pub const ALL: [Pos; 3] = [Pos::Adjective, Pos::Noun, Pos::Verb];

    pub fn as_str(&self) -> &'static str {
        match self {
            Pos::Adjective => "adjective",
            Pos::Noun => "noun",
            Pos::Verb => "verb",
        }
    }
}

impl std::str::FromStr for Pos {
    type Err = Error;

    fn from_str(value: &str) -> Result<Self> {
        match value {
            "adjective" => Ok(Pos::Adjective),
            "noun" => Ok(Pos::Noun),
            "verb" => Ok(Pos::Verb),
            other => Err(Error::Invalid(format!(
                "unknown part of speech {other:?} (expected adjective|noun|verb)"
            ))),
        }
    }
}

impl std::fmt::Display for Pos {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A tokenized sentence with the position of the target lexeme.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaggedSentence {
    pub tokens: Vec<String>,
    pub target_index: usize,
}

/// One sense of a lexeme.
#[derive(Debug, Clone, PartialEq)]
pub struct Sense {
    pub sense_id: String,
    pub definition: String,
    pub examples: Vec<TaggedSentence>,
}

/// A dictionary headword with its sense list.
#[derive(Debug, Clone, PartialEq)]
pub struct Lexeme {
    pub lemma: String,
    pub pos: Pos,
    pub senses: Vec<Sense>,
}

/// Validated sense inventory in document order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SenseInventory {
    pub lexemes: Vec<Lexeme>,
}

/// Counters reported by ingestion.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IngestReport {
    /// Examples dropped because no target occurrence could be located.
    pub dropped_examples: usize,
}

// Input schema. Examples are either raw strings (run through the fallback
// tokenizer) or pre-tokenized objects.
#[derive(Deserialize)]
struct InventoryDoc {
    lexemes: Vec<LexemeDoc>,
}

#[derive(Deserialize)]
struct LexemeDoc {
    lemma: String,
    pos: Pos,
    senses: Vec<SenseDoc>,
}

#[derive(Deserialize)]
struct SenseDoc {
    sense_id: String,
    #[serde(default)]
    definition: String,
    #[serde(default)]
    examples: Vec<ExampleDoc>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ExampleDoc {
    Raw(String),
    Tokenized {
        tokens: Vec<String>,
        target_index: usize,
    },
}

/// Parse and validate an inventory document. Examples without a locatable
/// target occurrence are dropped and counted.
pub fn ingest_inventory(document: &str) -> Result<(SenseInventory, IngestReport)> {
    let doc: InventoryDoc =
        serde_json::from_str(document).map_err(|e| Error::InventorySchema(e.to_string()))?;
    let mut report = IngestReport::default();
    let mut seen_lexemes = HashSet::new();
    let mut lexemes = Vec::with_capacity(doc.lexemes.len());

    for lexeme_doc in doc.lexemes {
        let lemma = lexeme_doc.lemma.trim().to_lowercase();
        if lemma.is_empty() {
            return Err(Error::InventorySchema("empty lemma".into()));
        }
        if !seen_lexemes.insert((lemma.clone(), lexeme_doc.pos)) {
            return Err(Error::DuplicateLexeme {
                lemma,
                pos: lexeme_doc.pos.to_string(),
            });
        }
        let mut seen_senses = HashSet::new();
        let mut senses = Vec::with_capacity(lexeme_doc.senses.len());
        for sense_doc in lexeme_doc.senses {
            if !seen_senses.insert(sense_doc.sense_id.clone()) {
                return Err(Error::DuplicateSenseId {
                    lemma,
                    pos: lexeme_doc.pos.to_string(),
                    sense_id: sense_doc.sense_id,
                });
            }
            let mut examples = Vec::with_capacity(sense_doc.examples.len());
            for example in sense_doc.examples {
                match locate_example(example, &lemma) {
                    Some(sentence) => examples.push(sentence),
                    None => report.dropped_examples += 1,
                }
            }
            senses.push(Sense {
                sense_id: sense_doc.sense_id,
                definition: sense_doc.definition,
                examples,
            });
        }
        lexemes.push(Lexeme {
            lemma,
            pos: lexeme_doc.pos,
            senses,
        });
    }
    Ok((SenseInventory { lexemes }, report))
}

fn locate_example(example: ExampleDoc, lemma: &str) -> Option<TaggedSentence> {
    match example {
        ExampleDoc::Raw(raw) => {
            let tokens = tokenize(&raw);
            let target_index = tokens.iter().position(|token| token == lemma)?;
            Some(TaggedSentence {
                tokens,
                target_index,
            })
        }
        ExampleDoc::Tokenized {
            tokens,
            target_index,
        } => {
            if target_index >= tokens.len() {
                return None;
            }
            let tokens = tokens.into_iter().map(|t| t.to_lowercase()).collect();
            Some(TaggedSentence {
                tokens,
                target_index,
            })
        }
    }
}

/// Whether a lexeme needs strictly more than `n` qualifying senses (the
/// default) or at least `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Eligibility {
    #[default]
    MoreThanN,
    AtLeastN,
}

/// Parameters of one task setup.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskSpec {
    pub pos: Option<Pos>,
    pub n_senses: u32,
    pub seed: u64,
    pub dev_fraction: f64,
    pub eligibility: Eligibility,
    /// Instances generated per eligible lexeme.
    pub repeats: u32,
}

impl Default for TaskSpec {
    fn default() -> Self {
        Self {
            pos: None,
            n_senses: 2,
            seed: 42,
            dev_fraction: 0.2,
            eligibility: Eligibility::default(),
            repeats: 1,
        }
    }
}

impl TaskSpec {
    pub fn new(n_senses: u32, seed: u64) -> Self {
        Self {
            n_senses,
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=5).contains(&self.n_senses) {
            return Err(Error::BadSenseCount(self.n_senses));
        }
        if !(self.dev_fraction > 0.0 && self.dev_fraction < 1.0) {
            return Err(Error::BadDevFraction(self.dev_fraction));
        }
        if self.repeats == 0 {
            return Err(Error::Invalid("repeats must be >= 1".into()));
        }
        Ok(())
    }
}

/// One candidate sentence with its (hidden) sense label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WsdOption {
    pub tokens: Vec<String>,
    pub target_index: usize,
    pub sense_id: String,
}

/// One discrimination instance: find the option expressing the same sense
/// of the lemma as the target sentence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WsdInstance {
    pub lemma: String,
    pub pos: Pos,
    pub target_sense_id: String,
    pub target: TaggedSentence,
    pub options: Vec<WsdOption>,
    pub gold_index: usize,
}

impl WsdInstance {
    /// Check the structural invariants of an instance.
    pub fn validate(&self) -> Result<()> {
        let fail = |reason: &str| {
            Err(Error::Invalid(format!(
                "instance for {} ({}): {reason}",
                self.lemma, self.pos
            )))
        };
        if self.options.len() < 2 {
            return fail("fewer than 2 options");
        }
        if self.gold_index >= self.options.len() {
            return fail("gold index out of range");
        }
        if self.options[self.gold_index].sense_id != self.target_sense_id {
            return fail("gold option does not carry the target sense");
        }
        let mut sense_ids = HashSet::new();
        for option in &self.options {
            if !sense_ids.insert(option.sense_id.as_str()) {
                return fail("duplicate option sense id");
            }
            if option.target_index >= option.tokens.len() {
                return fail("option target index out of range");
            }
        }
        if self.target.target_index >= self.target.tokens.len() {
            return fail("target index out of range");
        }
        let gold = &self.options[self.gold_index];
        if gold.tokens == self.target.tokens {
            return fail("gold option repeats the target sentence");
        }
        Ok(())
    }
}

/// Counters reported by generation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildReport {
    pub eligible_lexemes: usize,
    /// Eligible lexemes skipped because the sampled target sense had no two
    /// content-distinct examples.
    pub skipped_degenerate: usize,
}

fn qualifying_senses(lexeme: &Lexeme) -> Vec<usize> {
    (0..lexeme.senses.len())
        .filter(|&index| lexeme.senses[index].examples.len() >= 2)
        .collect()
}

fn is_eligible(lexeme: &Lexeme, n: u32, rule: Eligibility) -> bool {
    let qualifying = qualifying_senses(lexeme).len() as u32;
    match rule {
        Eligibility::MoreThanN => qualifying > n,
        Eligibility::AtLeastN => qualifying >= n,
    }
}

/// Lexemes with strictly more than `n` senses, counting only senses with
/// at least two example sentences.
pub fn eligible_lexemes(inventory: &SenseInventory, n: u32) -> Vec<&Lexeme> {
    eligible_lexemes_with(inventory, n, Eligibility::MoreThanN)
}

pub fn eligible_lexemes_with(
    inventory: &SenseInventory,
    n: u32,
    rule: Eligibility,
) -> Vec<&Lexeme> {
    inventory
        .lexemes
        .iter()
        .filter(|lexeme| is_eligible(lexeme, n, rule))
        .collect()
}

/// Uniform sample of `k` distinct indices in `0..len` (partial
/// Fisher-Yates, stable across platforms).
fn sample_indices(rng: &mut ChaCha8Rng, len: usize, k: usize) -> Vec<usize> {
    debug_assert!(k <= len);
    let mut indices: Vec<usize> = (0..len).collect();
    for i in 0..k {
        let j = rng.gen_range(i..len);
        indices.swap(i, j);
    }
    indices.truncate(k);
    indices
}

/// Generate one instance per eligible lexeme (times `spec.repeats`).
pub fn build_instances(
    inventory: &SenseInventory,
    spec: &TaskSpec,
) -> Result<(Vec<WsdInstance>, BuildReport)> {
    spec.validate()?;
    let n = spec.n_senses as usize;
    let mut instances = Vec::new();
    let mut report = BuildReport::default();

    for lexeme in &inventory.lexemes {
        if let Some(pos) = spec.pos {
            if lexeme.pos != pos {
                continue;
            }
        }
        if !is_eligible(lexeme, spec.n_senses, spec.eligibility) {
            continue;
        }
        report.eligible_lexemes += 1;
        let qualifying = qualifying_senses(lexeme);

        for repeat in 0..spec.repeats {
            let mut stream = rng::stream(
                spec.seed,
                &["build", &lexeme.lemma, lexeme.pos.as_str(), &repeat.to_string()],
            );
            match build_one(lexeme, &qualifying, n, &mut stream) {
                Some(instance) => instances.push(instance),
                None => report.skipped_degenerate += 1,
            }
        }
    }
    Ok((instances, report))
}

fn build_one(
    lexeme: &Lexeme,
    qualifying: &[usize],
    n: usize,
    stream: &mut ChaCha8Rng,
) -> Option<WsdInstance> {
    // Sample n senses, then the target among them.
    let chosen: Vec<usize> = sample_indices(stream, qualifying.len(), n)
        .into_iter()
        .map(|i| qualifying[i])
        .collect();
    let target_slot = stream.gen_range(0..n);
    let target_sense = &lexeme.senses[chosen[target_slot]];

    // Two content-distinct examples of the target sense: target sentence
    // and gold option.
    let order = sample_indices(stream, target_sense.examples.len(), target_sense.examples.len());
    let target_example = &target_sense.examples[order[0]];
    let gold_example = order[1..]
        .iter()
        .map(|&i| &target_sense.examples[i])
        .find(|example| example.tokens != target_example.tokens)?;

    let mut options = Vec::with_capacity(n);
    options.push(WsdOption {
        tokens: gold_example.tokens.clone(),
        target_index: gold_example.target_index,
        sense_id: target_sense.sense_id.clone(),
    });
    for (slot, &sense_index) in chosen.iter().enumerate() {
        if slot == target_slot {
            continue;
        }
        let sense = &lexeme.senses[sense_index];
        let example = &sense.examples[stream.gen_range(0..sense.examples.len())];
        options.push(WsdOption {
            tokens: example.tokens.clone(),
            target_index: example.target_index,
            sense_id: sense.sense_id.clone(),
        });
    }

    // Shuffle option order and find where the gold option landed.
    let order = sample_indices(stream, options.len(), options.len());
    let gold_index = order.iter().position(|&i| i == 0).expect("gold present");
    let options: Vec<WsdOption> = order.into_iter().map(|i| options[i].clone()).collect();

    Some(WsdInstance {
        lemma: lexeme.lemma.clone(),
        pos: lexeme.pos,
        target_sense_id: target_sense.sense_id.clone(),
        target: target_example.clone(),
        options,
        gold_index,
    })
}

/// Split instances at the lemma level: a lemma's instances land entirely in
/// dev or entirely in test.
pub fn split_dev_test(
    instances: &[WsdInstance],
    spec: &TaskSpec,
) -> (Vec<WsdInstance>, Vec<WsdInstance>) {
    let mut lemmas: Vec<&str> = instances
        .iter()
        .map(|instance| instance.lemma.as_str())
        .collect::<HashSet<_>>()
        .into_iter()
        .collect();
    lemmas.sort_unstable();

    let mut stream = rng::stream(spec.seed, &["split"]);
    let order = sample_indices(&mut stream, lemmas.len(), lemmas.len());
    let dev_count = (lemmas.len() as f64 * spec.dev_fraction).round() as usize;
    let dev_lemmas: HashSet<&str> = order[..dev_count.min(lemmas.len())]
        .iter()
        .map(|&i| lemmas[i])
        .collect();

    let mut dev = Vec::new();
    let mut test = Vec::new();
    for instance in instances {
        if dev_lemmas.contains(instance.lemma.as_str()) {
            dev.push(instance.clone());
        } else {
            test.push(instance.clone());
        }
    }
    (dev, test)
}

/// Write instances as line-delimited structured records.
pub fn write_instances<W: Write>(writer: &mut W, instances: &[WsdInstance]) -> Result<()> {
    for instance in instances {
        serde_json::to_writer(&mut *writer, instance)
            .map_err(|e| Error::Invalid(e.to_string()))?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

/// Read and validate a task file.
pub fn read_instances<R: BufRead>(reader: R) -> Result<Vec<WsdInstance>> {
    let mut instances = Vec::new();
    for (index, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let instance: WsdInstance =
            serde_json::from_str(&line).map_err(|e| Error::MalformedTaskRecord {
                line: index + 1,
                reason: e.to_string(),
            })?;
        instance
            .validate()
            .map_err(|e| Error::MalformedTaskRecord {
                line: index + 1,
                reason: e.to_string(),
            })?;
        instances.push(instance);
    }
    Ok(instances)
}

/// Instance counts per part of speech.
pub fn pos_counts(instances: &[WsdInstance]) -> HashMap<Pos, usize> {
    let mut counts = HashMap::new();
    for instance in instances {
        *counts.entry(instance.pos).or_insert(0) += 1;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example(words: &[&str], target: usize) -> serde_json::Value {
        serde_json::json!({ "tokens": words, "target_index": target })
    }

    /// A lexeme document with `senses` senses of `examples_per_sense`
    /// content-distinct examples each.
    fn lexeme_doc(lemma: &str, pos: &str, senses: usize, examples_per_sense: usize) -> serde_json::Value {
        let senses: Vec<serde_json::Value> = (0..senses)
            .map(|s| {
                let examples: Vec<serde_json::Value> = (0..examples_per_sense)
                    .map(|e| example(&[&format!("ctx{s}x{e}"), lemma, &format!("tail{e}")], 1))
                    .collect();
                serde_json::json!({
                    "sense_id": format!("s{s}"),
                    "definition": format!("sense {s} of {lemma}"),
                    "examples": examples,
                })
            })
            .collect();
        serde_json::json!({ "lemma": lemma, "pos": pos, "senses": senses })
    }

    fn inventory_doc(lexemes: Vec<serde_json::Value>) -> String {
        serde_json::json!({ "lexemes": lexemes }).to_string()
    }

    #[test]
    fn ingest_valid_document() {
        let doc = inventory_doc(vec![
            lexeme_doc("bank", "noun", 3, 2),
            lexeme_doc("run", "verb", 4, 2),
        ]);
        let (inventory, report) = ingest_inventory(&doc).unwrap();
        assert_eq!(inventory.lexemes.len(), 2);
        assert_eq!(report.dropped_examples, 0);
    }

    #[test]
    fn ingest_rejects_duplicate_sense_id() {
        let doc = serde_json::json!({
            "lexemes": [{
                "lemma": "bank",
                "pos": "noun",
                "senses": [
                    { "sense_id": "s1", "examples": [] },
                    { "sense_id": "s1", "examples": [] },
                ],
            }]
        })
        .to_string();
        let err = ingest_inventory(&doc).unwrap_err();
        match err {
            Error::DuplicateSenseId { sense_id, .. } => assert_eq!(sense_id, "s1"),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn ingest_rejects_duplicate_lexeme() {
        let doc = inventory_doc(vec![
            lexeme_doc("bank", "noun", 2, 2),
            lexeme_doc("bank", "noun", 3, 2),
        ]);
        assert!(matches!(
            ingest_inventory(&doc),
            Err(Error::DuplicateLexeme { .. })
        ));
    }

    #[test]
    fn ingest_drops_examples_without_target() {
        let doc = serde_json::json!({
            "lexemes": [{
                "lemma": "bank",
                "pos": "noun",
                "senses": [{
                    "sense_id": "s1",
                    "examples": [
                        "The bank closed early.",
                        "No such word appears here.",
                    ],
                }],
            }]
        })
        .to_string();
        let (inventory, report) = ingest_inventory(&doc).unwrap();
        assert_eq!(report.dropped_examples, 1);
        assert_eq!(inventory.lexemes[0].senses[0].examples.len(), 1);
        assert_eq!(inventory.lexemes[0].senses[0].examples[0].target_index, 1);
    }

    #[test]
    fn ingest_rejects_bad_schema() {
        assert!(matches!(
            ingest_inventory("{\"lexeme\": []}"),
            Err(Error::InventorySchema(_))
        ));
    }

    fn inventory_with(senses: usize, examples: usize) -> SenseInventory {
        let doc = inventory_doc(vec![lexeme_doc("bank", "noun", senses, examples)]);
        ingest_inventory(&doc).unwrap().0
    }

    #[test]
    fn exactly_n_qualifying_senses_is_excluded() {
        let inventory = inventory_with(2, 2);
        assert!(eligible_lexemes(&inventory, 2).is_empty());
        assert_eq!(
            eligible_lexemes_with(&inventory, 2, Eligibility::AtLeastN).len(),
            1
        );
    }

    #[test]
    fn senses_with_one_example_do_not_qualify() {
        // 3 senses, one with a single example: 2 qualify, so n=2 excludes.
        let mut inventory = inventory_with(3, 2);
        inventory.lexemes[0].senses[2].examples.truncate(1);
        assert!(eligible_lexemes(&inventory, 2).is_empty());
    }

    #[test]
    fn more_than_n_senses_is_included() {
        let inventory = inventory_with(4, 2);
        assert_eq!(eligible_lexemes(&inventory, 2).len(), 1);
    }

    #[test]
    fn builds_one_instance_per_eligible_lexeme() {
        let inventory = inventory_with(3, 2);
        let spec = TaskSpec::new(2, 7);
        let (instances, report) = build_instances(&inventory, &spec).unwrap();
        assert_eq!(instances.len(), 1);
        assert_eq!(instances[0].options.len(), 2);
        assert_eq!(report.eligible_lexemes, 1);
        instances[0].validate().unwrap();
    }

    #[test]
    fn generation_is_deterministic() {
        let doc = inventory_doc(vec![
            lexeme_doc("bank", "noun", 4, 3),
            lexeme_doc("run", "verb", 5, 2),
            lexeme_doc("black", "adjective", 3, 4),
        ]);
        let (inventory, _) = ingest_inventory(&doc).unwrap();
        let spec = TaskSpec::new(2, 7);
        let (first, _) = build_instances(&inventory, &spec).unwrap();
        let (second, _) = build_instances(&inventory, &spec).unwrap();
        assert_eq!(first, second);
        let bytes = |instances: &[WsdInstance]| {
            let mut out = Vec::new();
            write_instances(&mut out, instances).unwrap();
            out
        };
        assert_eq!(bytes(&first), bytes(&second));
    }

    #[test]
    fn generation_is_insertion_order_independent() {
        let a = inventory_doc(vec![
            lexeme_doc("bank", "noun", 4, 3),
            lexeme_doc("run", "verb", 5, 2),
        ]);
        let b = inventory_doc(vec![
            lexeme_doc("run", "verb", 5, 2),
            lexeme_doc("bank", "noun", 4, 3),
        ]);
        let spec = TaskSpec::new(3, 11);
        let (from_a, _) = build_instances(&ingest_inventory(&a).unwrap().0, &spec).unwrap();
        let (from_b, _) = build_instances(&ingest_inventory(&b).unwrap().0, &spec).unwrap();
        let find = |instances: &[WsdInstance], lemma: &str| {
            instances
                .iter()
                .find(|i| i.lemma == lemma)
                .cloned()
                .unwrap()
        };
        assert_eq!(find(&from_a, "bank"), find(&from_b, "bank"));
        assert_eq!(find(&from_a, "run"), find(&from_b, "run"));
    }

    #[test]
    fn gold_sentence_never_equals_target_sentence() {
        let doc = inventory_doc(vec![lexeme_doc("bank", "noun", 4, 3)]);
        let (inventory, _) = ingest_inventory(&doc).unwrap();
        // Exhaustive check over 1,000 seeded generations.
        for seed in 0..1000u64 {
            let spec = TaskSpec::new(3, seed);
            let (instances, _) = build_instances(&inventory, &spec).unwrap();
            for instance in &instances {
                instance.validate().unwrap();
                assert_ne!(instance.target.tokens, instance.options[instance.gold_index].tokens);
            }
        }
    }

    #[test]
    fn degenerate_senses_are_skipped() {
        // Every example of every sense has identical content: no gold
        // sentence distinct from the target can be drawn.
        let senses: Vec<serde_json::Value> = (0..3)
            .map(|s| {
                serde_json::json!({
                    "sense_id": format!("s{s}"),
                    "examples": [example(&["same", "bank"], 1), example(&["same", "bank"], 1)],
                })
            })
            .collect();
        let doc = inventory_doc(vec![
            serde_json::json!({ "lemma": "bank", "pos": "noun", "senses": senses }),
        ]);
        let (inventory, _) = ingest_inventory(&doc).unwrap();
        let (instances, report) = build_instances(&inventory, &TaskSpec::new(2, 1)).unwrap();
        assert!(instances.is_empty());
        assert_eq!(report.skipped_degenerate, 1);
    }

    #[test]
    fn split_respects_fraction_and_lemma_disjointness() {
        let lexemes: Vec<serde_json::Value> = (0..10)
            .map(|i| lexeme_doc(&format!("lemma{i}"), "noun", 3, 2))
            .collect();
        let (inventory, _) = ingest_inventory(&inventory_doc(lexemes)).unwrap();
        let spec = TaskSpec {
            dev_fraction: 0.2,
            ..TaskSpec::new(2, 5)
        };
        let (instances, _) = build_instances(&inventory, &spec).unwrap();
        let (dev, test) = split_dev_test(&instances, &spec);
        assert_eq!(dev.len(), 2);
        assert_eq!(test.len(), 8);

        let dev_lemmas: HashSet<&str> = dev.iter().map(|i| i.lemma.as_str()).collect();
        let test_lemmas: HashSet<&str> = test.iter().map(|i| i.lemma.as_str()).collect();
        assert!(dev_lemmas.is_disjoint(&test_lemmas));

        let (dev2, test2) = split_dev_test(&instances, &spec);
        assert_eq!(dev, dev2);
        assert_eq!(test, test2);
    }

    #[test]
    fn task_records_round_trip() {
        let (inventory, _) = ingest_inventory(&inventory_doc(vec![
            lexeme_doc("bank", "noun", 4, 3),
        ]))
        .unwrap();
        let (instances, _) = build_instances(&inventory, &TaskSpec::new(3, 9)).unwrap();
        let mut bytes = Vec::new();
        write_instances(&mut bytes, &instances).unwrap();
        let read_back = read_instances(bytes.as_slice()).unwrap();
        assert_eq!(instances, read_back);
    }

    #[test]
    fn spec_validation() {
        assert!(matches!(
            TaskSpec::new(1, 0).validate(),
            Err(Error::BadSenseCount(1))
        ));
        assert!(matches!(
            TaskSpec::new(6, 0).validate(),
            Err(Error::BadSenseCount(6))
        ));
        let spec = TaskSpec {
            dev_fraction: 1.0,
            ..TaskSpec::new(2, 0)
        };
        assert!(matches!(spec.validate(), Err(Error::BadDevFraction(_))));
    }
}
