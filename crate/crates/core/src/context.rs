//! Context window extraction around a target lexeme.
//!
//! Sentences arrive pre-tokenized (task files, CoNLL) or as raw strings run
//! through the fallback tokenizer. Stop words are removed before windowing;
//! the target token itself always survives.

use std::collections::HashSet;
use std::io::BufRead;

use crate::error::{Error, Result};

/// Bundled default stop-word list (common English function words).
const DEFAULT_STOPWORDS: &str = include_str!("../data/stopwords_en.txt");

/// A tokenized sentence with a marked target position and optional
/// lemma/dependency annotation layers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatedSentence {
    pub tokens: Vec<String>,
    pub target_index: usize,
    pub lemmas: Option<Vec<String>>,
    /// 1-based head positions, 0 = root.
    pub dep_heads: Option<Vec<usize>>,
    pub dep_labels: Option<Vec<String>>,
}

impl AnnotatedSentence {
    pub fn new(tokens: Vec<String>, target_index: usize) -> Result<Self> {
        if target_index >= tokens.len() {
            return Err(Error::Invalid(format!(
                "target index {target_index} out of range for {} tokens",
                tokens.len()
            )));
        }
        Ok(Self {
            tokens,
            target_index,
            lemmas: None,
            dep_heads: None,
            dep_labels: None,
        })
    }

    pub fn target_token(&self) -> &str {
        &self.tokens[self.target_index]
    }

    /// Re-point the target at the first token whose form (or lemma, when
    /// annotated) equals `lemma`. `None` when no occurrence exists.
    pub fn locate_target(&self, lemma: &str) -> Option<usize> {
        let lemma = lemma.to_lowercase();
        (0..self.tokens.len()).find(|&index| {
            self.tokens[index] == lemma
                || self
                    .lemmas
                    .as_ref()
                    .is_some_and(|lemmas| lemmas[index] == lemma)
        })
    }
}

/// How a context window was extracted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowKind {
    Bow { radius: usize },
    Dependency,
}

/// The extracted context: words around the target, target excluded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextWindow {
    pub words: Vec<String>,
    pub target_lemma: String,
    pub kind: WindowKind,
}

impl ContextWindow {
    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Lowercased stop-word set.
#[derive(Debug, Clone, Default)]
pub struct StopWords {
    words: HashSet<String>,
}

impl StopWords {
    pub fn none() -> Self {
        Self::default()
    }

    /// The bundled default list of English function words.
    pub fn english() -> Self {
        Self::from_words(DEFAULT_STOPWORDS.lines())
    }

    pub fn from_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let words = words
            .into_iter()
            .map(|word| word.as_ref().trim().to_lowercase())
            .filter(|word| !word.is_empty())
            .collect();
        Self { words }
    }

    /// One token per line, as in the bundled data file.
    pub fn from_reader<R: BufRead>(reader: R) -> Result<Self> {
        let mut words = Vec::new();
        for line in reader.lines() {
            words.push(line?);
        }
        Ok(Self::from_words(words))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Remove stop words, keeping the target token even if listed. Aligned
/// annotation layers shrink with the tokens; dependency layers are dropped
/// whenever any token was removed, since head indices no longer apply.
pub fn filter_stopwords(sentence: &AnnotatedSentence, stopwords: &StopWords) -> AnnotatedSentence {
    let keep: Vec<bool> = sentence
        .tokens
        .iter()
        .enumerate()
        .map(|(index, token)| index == sentence.target_index || !stopwords.contains(token))
        .collect();
    if keep.iter().all(|&k| k) {
        return sentence.clone();
    }

    let select = |values: &[String]| -> Vec<String> {
        values
            .iter()
            .zip(&keep)
            .filter(|(_, &k)| k)
            .map(|(value, _)| value.clone())
            .collect()
    };

    let tokens = select(&sentence.tokens);
    let lemmas = sentence.lemmas.as_deref().map(select);
    let target_index = keep[..sentence.target_index].iter().filter(|&&k| k).count();

    AnnotatedSentence {
        tokens,
        target_index,
        lemmas,
        dep_heads: None,
        dep_labels: None,
    }
}

/// Symmetric bag-of-words window: up to `radius` tokens each side of the
/// target, truncated at sentence boundaries, target excluded. An empty
/// window is legal (single-token sentences).
pub fn extract_bow_window(sentence: &AnnotatedSentence, radius: usize) -> ContextWindow {
    let target = sentence.target_index;
    let start = target.saturating_sub(radius);
    let end = (target + radius + 1).min(sentence.tokens.len());
    let words = sentence.tokens[start..end]
        .iter()
        .enumerate()
        .filter(|(offset, _)| start + offset != target)
        .map(|(_, token)| token.clone())
        .collect();
    ContextWindow {
        words,
        target_lemma: target_lemma_of(sentence),
        kind: WindowKind::Bow { radius },
    }
}

/// First-order dependency context: the target's head (when not root) plus
/// all tokens whose head is the target, in sentence order.
pub fn extract_dep_context(sentence: &AnnotatedSentence) -> Result<ContextWindow> {
    let heads = sentence
        .dep_heads
        .as_ref()
        .ok_or(Error::MissingDepAnnotation)?;
    let target = sentence.target_index;
    let target_position = target + 1; // heads are 1-based
    let mut indices: Vec<usize> = Vec::new();
    if heads[target] != 0 && heads[target] <= sentence.tokens.len() {
        indices.push(heads[target] - 1);
    }
    for (index, &head) in heads.iter().enumerate() {
        if head == target_position && index != target {
            indices.push(index);
        }
    }
    indices.sort_unstable();
    indices.dedup();
    let words = indices
        .into_iter()
        .map(|index| sentence.tokens[index].clone())
        .collect();
    Ok(ContextWindow {
        words,
        target_lemma: target_lemma_of(sentence),
        kind: WindowKind::Dependency,
    })
}

/// Window selection used by the evaluation strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowSpec {
    Bow { radius: usize },
    Dependency,
}

impl WindowSpec {
    /// Parse a CLI-style spec: "1", "2", "4" or "dep".
    pub fn parse(value: &str) -> Option<Self> {
        match value {
            "dep" => Some(Self::Dependency),
            "1" => Some(Self::Bow { radius: 1 }),
            "2" => Some(Self::Bow { radius: 2 }),
            "4" => Some(Self::Bow { radius: 4 }),
            _ => None,
        }
    }
}

impl std::fmt::Display for WindowSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Bow { radius } => write!(f, "{radius}"),
            Self::Dependency => write!(f, "dep"),
        }
    }
}

/// Produce the context window for a sentence under a spec, with stop words
/// removed. Bag-of-words windows filter the sentence first (so the window
/// reaches past removed words); dependency contexts are read off the intact
/// tree and stop words are then dropped from the extracted word list.
pub fn window_for(
    sentence: &AnnotatedSentence,
    spec: WindowSpec,
    stopwords: &StopWords,
) -> Result<ContextWindow> {
    match spec {
        WindowSpec::Bow { radius } => {
            let filtered = filter_stopwords(sentence, stopwords);
            Ok(extract_bow_window(&filtered, radius))
        }
        WindowSpec::Dependency => {
            let mut window = extract_dep_context(sentence)?;
            window.words.retain(|word| !stopwords.contains(word));
            Ok(window)
        }
    }
}

fn target_lemma_of(sentence: &AnnotatedSentence) -> String {
    match &sentence.lemmas {
        Some(lemmas) => lemmas[sentence.target_index].clone(),
        None => sentence.tokens[sentence.target_index].clone(),
    }
}

/// Fallback tokenizer for raw example sentences: whitespace split,
/// lowercase, leading/trailing punctuation trimmed.
pub fn tokenize(raw: &str) -> Vec<String> {
    raw.split_whitespace()
        .map(|token| {
            token
                .trim_matches(|c: char| !c.is_alphanumeric())
                .to_lowercase()
        })
        .filter(|token| !token.is_empty())
        .collect()
}

/// Parse CoNLL-style 10-column dependency files. Sentences are separated by
/// blank lines, `#` lines are comments, multiword ranges (`1-2`) are
/// skipped. Tokens are lowercased; the target index defaults to 0 and is
/// re-pointed by callers via [`AnnotatedSentence::locate_target`].
pub fn read_conllu<R: BufRead>(reader: R) -> Result<Vec<AnnotatedSentence>> {
    let mut sentences = Vec::new();
    let mut tokens: Vec<String> = Vec::new();
    let mut lemmas: Vec<String> = Vec::new();
    let mut heads: Vec<usize> = Vec::new();
    let mut labels: Vec<String> = Vec::new();

    let mut flush = |tokens: &mut Vec<String>,
                     lemmas: &mut Vec<String>,
                     heads: &mut Vec<usize>,
                     labels: &mut Vec<String>|
     -> Result<()> {
        if tokens.is_empty() {
            return Ok(());
        }
        if let Some(&bad) = heads.iter().find(|&&head| head > tokens.len()) {
            return Err(Error::Invalid(format!(
                "dependency head {bad} out of range for a {}-token sentence",
                tokens.len()
            )));
        }
        let mut sentence =
            AnnotatedSentence::new(std::mem::take(tokens), 0).map_err(|_| Error::Invalid(
                "empty sentence block".into(),
            ))?;
        sentence.lemmas = Some(std::mem::take(lemmas));
        sentence.dep_heads = Some(std::mem::take(heads));
        sentence.dep_labels = Some(std::mem::take(labels));
        sentences.push(sentence);
        Ok(())
    };

    for (index, line) in reader.lines().enumerate() {
        let line_no = index + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            flush(&mut tokens, &mut lemmas, &mut heads, &mut labels)?;
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let columns: Vec<&str> = line.split('\t').collect();
        if columns.len() != 10 {
            return Err(Error::ConlluColumns {
                line: line_no,
                found: columns.len(),
            });
        }
        // Multiword token ranges ("1-2") and empty nodes ("1.1") carry no
        // tree position of their own.
        if columns[0].contains('-') || columns[0].contains('.') {
            continue;
        }
        let head = columns[6]
            .parse::<usize>()
            .map_err(|_| Error::ConlluHead {
                line: line_no,
                value: columns[6].to_string(),
            })?;
        tokens.push(columns[1].to_lowercase());
        lemmas.push(columns[2].to_lowercase());
        heads.push(head);
        labels.push(columns[7].to_string());
    }
    flush(&mut tokens, &mut lemmas, &mut heads, &mut labels)?;
    Ok(sentences)
}
