//! Phrase-pair similarity scoring and rank correlation with human
//! judgments.

use std::collections::{BTreeMap, HashMap};
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::compose::{configuration_similarity, enumerate_phrase_configs, ConfigMode, Model};
use crate::error::{Error, Result};

/// Phrase-pair category: adjective-noun, noun-noun or verb-object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    AN,
    NN,
    VO,
}

impl Category {
    pub const ALL: [Category; 3] = [Category::AN, Category::NN, Category::VO];

    pub fn as_str(&self) -> &'static str {
        match self {
            Category::AN => "AN",
            Category::NN => "NN",
            Category::VO => "VO",
        }
    }

    fn parse(value: &str) -> Option<Self> {
        match value {
            "AN" => Some(Category::AN),
            "NN" => Some(Category::NN),
            "VO" => Some(Category::VO),
            _ => None,
        }
    }
}

impl std::fmt::Display for Category {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One participant's similarity judgment.
#[derive(Debug, Clone, PartialEq)]
pub struct Judgment {
    pub participant: String,
    pub score: f64,
}

/// Two 2-word phrases with all collected human judgments.
#[derive(Debug, Clone, PartialEq)]
pub struct PhrasePair {
    pub category: Category,
    pub phrase1: (String, String),
    pub phrase2: (String, String),
    pub judgments: Vec<Judgment>,
}

/// Parse a judgments file with columns
/// `participant, category, w1, w2, w3, w4, score` (tab- or
/// comma-delimited, optional header). Rows are grouped into one pair per
/// distinct (category, words) key, in first-appearance order.
pub fn load_pairs<R: BufRead>(reader: R) -> Result<Vec<PhrasePair>> {
    let mut pairs: Vec<PhrasePair> = Vec::new();
    let mut index_of: HashMap<(Category, [String; 4]), usize> = HashMap::new();
    let mut first_data_line = true;

    for (line_index, line) in reader.lines().enumerate() {
        let line_no = line_index + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let delimiter = if line.contains('\t') { '\t' } else { ',' };
        let fields: Vec<&str> = line.split(delimiter).map(str::trim).collect();
        if fields.len() != 7 {
            return Err(Error::MalformedJudgmentRow {
                line: line_no,
                reason: format!("expected 7 columns, found {}", fields.len()),
            });
        }
        // An optional header is recognised by its non-numeric score column.
        if first_data_line && fields[6].parse::<f64>().is_err() {
            first_data_line = false;
            continue;
        }
        first_data_line = false;

        let category = Category::parse(fields[1]).ok_or_else(|| Error::UnknownCategory {
            line: line_no,
            category: fields[1].to_string(),
        })?;
        let score: f64 = fields[6].parse().map_err(|_| Error::MalformedJudgmentRow {
            line: line_no,
            reason: format!("non-numeric score {:?}", fields[6]),
        })?;
        if !score.is_finite() {
            return Err(Error::MalformedJudgmentRow {
                line: line_no,
                reason: format!("non-finite score {:?}", fields[6]),
            });
        }
        let words = [
            fields[2].to_lowercase(),
            fields[3].to_lowercase(),
            fields[4].to_lowercase(),
            fields[5].to_lowercase(),
        ];
        let judgment = Judgment {
            participant: fields[0].to_string(),
            score,
        };
        match index_of.get(&(category, words.clone())) {
            Some(&index) => pairs[index].judgments.push(judgment),
            None => {
                index_of.insert((category, words.clone()), pairs.len());
                let [w1, w2, w3, w4] = words;
                pairs.push(PhrasePair {
                    category,
                    phrase1: (w1, w2),
                    phrase2: (w3, w4),
                    judgments: vec![judgment],
                });
            }
        }
    }
    Ok(pairs)
}

/// Scoring mode: plain additive composition for single-sense tables, or an
/// aggregate over all sense configurations for multi-sense tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreMode {
    Single,
    Max,
    Min,
    Mean,
}

impl ScoreMode {
    pub fn parse(value: &str) -> Option<Self> {
        match value {
            "single" => Some(Self::Single),
            "max" => Some(Self::Max),
            "min" => Some(Self::Min),
            "mean" => Some(Self::Mean),
            _ => None,
        }
    }

    fn config_mode(&self) -> ConfigMode {
        match self {
            // A single-sense table yields singleton configuration sets, so
            // any aggregate returns the plain composed similarity.
            Self::Single | Self::Max => ConfigMode::Max,
            Self::Min => ConfigMode::Min,
            Self::Mean => ConfigMode::Mean,
        }
    }
}

impl std::fmt::Display for ScoreMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Self::Single => "single",
            Self::Max => "max",
            Self::Min => "min",
            Self::Mean => "mean",
        };
        f.write_str(name)
    }
}

/// Model similarity of one pair, or `None` when any of the four words has
/// no representation (the pair is skipped and counted by the caller).
pub fn score_pair(model: &Model, pair: &PhrasePair, mode: ScoreMode) -> Result<Option<f64>> {
    if matches!((mode, model), (ScoreMode::Single, Model::Multi(_))) {
        return Err(Error::ModeMismatch);
    }
    let configs1 = match enumerate_phrase_configs(model, &pair.phrase1.0, &pair.phrase1.1) {
        Ok(configs) => configs,
        Err(Error::UnknownWord { .. }) | Err(Error::UnknownLemma { .. }) => return Ok(None),
        Err(other) => return Err(other),
    };
    let configs2 = match enumerate_phrase_configs(model, &pair.phrase2.0, &pair.phrase2.1) {
        Ok(configs) => configs,
        Err(Error::UnknownWord { .. }) | Err(Error::UnknownLemma { .. }) => return Ok(None),
        Err(other) => return Err(other),
    };
    configuration_similarity(&configs1, &configs2, mode.config_mode()).map(Some)
}

/// Spearman rank correlation with average ranks for ties. `Ok(None)` marks
/// the undefined case where either side is constant.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<Option<f64>> {
    if xs.len() != ys.len() {
        return Err(Error::VectorLengthMismatch {
            left: xs.len(),
            right: ys.len(),
        });
    }
    if xs.len() < 2 {
        return Err(Error::TooFewObservations(xs.len()));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::Invalid("non-finite correlation input".into()));
    }
    let rank_x = average_ranks(xs);
    let rank_y = average_ranks(ys);
    Ok(pearson(&rank_x, &rank_y).map(|rho| rho.clamp(-1.0, 1.0)))
}

/// Average ranks (1-based); tied values share the mean of their positions.
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start;
        while end + 1 < order.len() && values[order[end + 1]] == values[order[start]] {
            end += 1;
        }
        let shared = (start + end) as f64 / 2.0 + 1.0;
        for &position in &order[start..=end] {
            ranks[position] = shared;
        }
        start = end + 1;
    }
    ranks
}

fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let mut covariance = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        covariance += (x - mean_x) * (y - mean_y);
        var_x += (x - mean_x) * (x - mean_x);
        var_y += (y - mean_y) * (y - mean_y);
    }
    if var_x == 0.0 || var_y == 0.0 {
        return None;
    }
    Some(covariance / (var_x * var_y).sqrt())
}

/// How observations are formed for the correlation: one per individual
/// judgment (model score repeated), or one per pair against the mean
/// judgment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum JudgmentMode {
    #[default]
    PerJudgment,
    PerPairAverage,
}

impl JudgmentMode {
    pub fn parse(value: &str) -> Option<Self> {
        match value {
            "per-judgment" => Some(Self::PerJudgment),
            "pair-average" => Some(Self::PerPairAverage),
            _ => None,
        }
    }
}

/// Spearman's rho per category plus the cross-category average.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub rho_per_category: BTreeMap<String, f64>,
    pub average_rho: f64,
    pub n_judgments_used: usize,
    pub skipped_pairs: usize,
    /// Categories with fewer than 2 scoreable pairs, or an undefined rho.
    pub omitted_categories: Vec<String>,
}

/// Score every pair once and correlate with the human judgments per
/// category.
pub fn evaluate_correlation(
    model: &Model,
    pairs: &[PhrasePair],
    mode: ScoreMode,
    judgment_mode: JudgmentMode,
) -> Result<CorrelationReport> {
    let mut model_scores: Vec<Option<f64>> = Vec::with_capacity(pairs.len());
    for pair in pairs {
        model_scores.push(score_pair(model, pair, mode)?);
    }
    evaluate_correlation_scored(pairs, &model_scores, judgment_mode)
}

/// Correlate from precomputed per-pair model scores (`None` marks a
/// skipped pair). Lets callers score pairs in parallel.
pub fn evaluate_correlation_scored(
    pairs: &[PhrasePair],
    model_scores: &[Option<f64>],
    judgment_mode: JudgmentMode,
) -> Result<CorrelationReport> {
    if pairs.len() != model_scores.len() {
        return Err(Error::CountMismatch {
            predictions: model_scores.len(),
            instances: pairs.len(),
        });
    }
    let skipped_pairs = model_scores.iter().filter(|s| s.is_none()).count();

    let mut rho_per_category = BTreeMap::new();
    let mut omitted = Vec::new();
    let mut n_judgments_used = 0;

    for category in Category::ALL {
        let mut humans = Vec::new();
        let mut models = Vec::new();
        let mut scored_pairs = 0;
        for (pair, score) in pairs.iter().zip(model_scores) {
            if pair.category != category {
                continue;
            }
            let Some(score) = score else { continue };
            scored_pairs += 1;
            n_judgments_used += pair.judgments.len();
            match judgment_mode {
                JudgmentMode::PerJudgment => {
                    for judgment in &pair.judgments {
                        humans.push(judgment.score);
                        models.push(*score);
                    }
                }
                JudgmentMode::PerPairAverage => {
                    let mean = pair.judgments.iter().map(|j| j.score).sum::<f64>()
                        / pair.judgments.len() as f64;
                    humans.push(mean);
                    models.push(*score);
                }
            }
        }
        if scored_pairs < 2 {
            omitted.push(category.to_string());
            continue;
        }
        match spearman(&humans, &models)? {
            Some(rho) => {
                rho_per_category.insert(category.to_string(), rho);
            }
            None => omitted.push(category.to_string()),
        }
    }

    if rho_per_category.is_empty() {
        return Err(Error::NoUsableCategories);
    }
    let average_rho =
        rho_per_category.values().sum::<f64>() / rho_per_category.len() as f64;
    Ok(CorrelationReport {
        rho_per_category,
        average_rho,
        n_judgments_used,
        skipped_pairs,
        omitted_categories: omitted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::EmbeddingTable;
    use approx::assert_relative_eq;

    #[test]
    fn rows_group_into_pairs_by_phrase() {
        let text = "p1\tAN\tblack\tdog\tdark\thound\t6\np2\tAN\tblack\tdog\tdark\thound\t5\n";
        let pairs = load_pairs(text.as_bytes()).unwrap();
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].judgments.len(), 2);
        assert_eq!(pairs[0].phrase1, ("black".to_string(), "dog".to_string()));
    }

    #[test]
    fn unknown_category_names_the_row() {
        let text = "p1\tXY\ta\tb\tc\td\t3\n";
        let err = load_pairs(text.as_bytes()).unwrap_err();
        match err {
            Error::UnknownCategory { line, category } => {
                assert_eq!(line, 1);
                assert_eq!(category, "XY");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn six_rows_over_three_pairs() {
        let text = "\
p1,AN,black,dog,dark,hound,6
p2,AN,black,dog,dark,hound,5
p1,NN,coast,line,shore,edge,4
p2,NN,coast,line,shore,edge,2
p1,VO,buy,land,leave,house,2
p2,VO,buy,land,leave,house,1
";
        let pairs = load_pairs(text.as_bytes()).unwrap();
        assert_eq!(pairs.len(), 3);
    }

    #[test]
    fn optional_header_is_skipped() {
        let text = "participant,category,w1,w2,w3,w4,score\np1,AN,a,b,c,d,3\n";
        let pairs = load_pairs(text.as_bytes()).unwrap();
        assert_eq!(pairs.len(), 1);
    }

    #[test]
    fn malformed_rows_are_errors() {
        assert!(matches!(
            load_pairs("p1,AN,a,b,c,d\n".as_bytes()),
            Err(Error::MalformedJudgmentRow { line: 1, .. })
        ));
        assert!(matches!(
            load_pairs("p1,AN,a,b,c,d,3\np2,AN,a,b,c,d,x\n".as_bytes()),
            Err(Error::MalformedJudgmentRow { line: 2, .. })
        ));
    }

    fn single_model(entries: &[(&str, &[f64])]) -> Model {
        Model::Single(
            EmbeddingTable::from_entries(
                entries[0].1.len(),
                entries.iter().map(|(t, v)| (*t, v.to_vec())),
            )
            .unwrap(),
        )
    }

    fn pair(category: Category, words: [&str; 4]) -> PhrasePair {
        PhrasePair {
            category,
            phrase1: (words[0].to_string(), words[1].to_string()),
            phrase2: (words[2].to_string(), words[3].to_string()),
            judgments: vec![Judgment {
                participant: "p1".into(),
                score: 1.0,
            }],
        }
    }

    #[test]
    fn identical_phrases_score_one() {
        let model = single_model(&[("a", &[1.0, 2.0]), ("b", &[0.5, 0.0])]);
        let p = pair(Category::AN, ["a", "b", "a", "b"]);
        let score = score_pair(&model, &p, ScoreMode::Single).unwrap().unwrap();
        assert_relative_eq!(score, 1.0);
    }

    #[test]
    fn orthogonal_phrases_score_zero() {
        let model = single_model(&[
            ("a", &[1.0, 0.0]),
            ("b", &[0.0, 0.0]),
            ("c", &[0.0, 1.0]),
        ]);
        let p = pair(Category::NN, ["a", "b", "c", "b"]);
        let score = score_pair(&model, &p, ScoreMode::Single).unwrap().unwrap();
        assert_relative_eq!(score, 0.0);
    }

    #[test]
    fn oov_pair_is_skipped() {
        let model = single_model(&[("a", &[1.0, 0.0]), ("b", &[0.0, 1.0])]);
        let p = pair(Category::VO, ["a", "b", "a", "missing"]);
        assert_eq!(score_pair(&model, &p, ScoreMode::Single).unwrap(), None);
    }

    #[test]
    fn spearman_identical_rankings() {
        let rho = spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]).unwrap().unwrap();
        assert_relative_eq!(rho, 1.0);
    }

    #[test]
    fn spearman_reversed_rankings() {
        let rho = spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap().unwrap();
        assert_relative_eq!(rho, -1.0);
    }

    #[test]
    fn spearman_partial_agreement() {
        // Oracle: 1 - 6*sum(d^2)/(n(n^2-1)) with d = (0, -1, 1, 0).
        let rho = spearman(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0])
            .unwrap()
            .unwrap();
        assert_relative_eq!(rho, 0.8, epsilon = 1e-12);
    }

    #[test]
    fn spearman_rejects_bad_input() {
        assert!(matches!(
            spearman(&[1.0], &[1.0, 2.0]),
            Err(Error::VectorLengthMismatch { .. })
        ));
        assert!(matches!(
            spearman(&[1.0], &[1.0]),
            Err(Error::TooFewObservations(1))
        ));
    }

    #[test]
    fn spearman_constant_input_is_undefined() {
        assert_eq!(spearman(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).unwrap(), None);
    }

    #[test]
    fn spearman_handles_ties_with_average_ranks() {
        // Independent average-rank oracle, computed by O(n^2) counting.
        let xs = [1.0, 2.0, 2.0, 3.0];
        let ys = [1.0, 2.0, 3.0, 4.0];
        let oracle_ranks = |values: &[f64]| -> Vec<f64> {
            values
                .iter()
                .map(|&v| {
                    let less = values.iter().filter(|&&w| w < v).count() as f64;
                    let equal = values.iter().filter(|&&w| w == v).count() as f64;
                    less + (equal + 1.0) / 2.0
                })
                .collect()
        };
        let rx = oracle_ranks(&xs);
        let ry = oracle_ranks(&ys);
        let expected = pearson(&rx, &ry).unwrap();
        let rho = spearman(&xs, &ys).unwrap().unwrap();
        assert_relative_eq!(rho, expected, epsilon = 1e-12);
    }

    fn judged_pairs(category: Category, scores: &[(f64, [&str; 4])]) -> Vec<PhrasePair> {
        scores
            .iter()
            .map(|(score, words)| {
                let mut p = pair(category, *words);
                p.judgments = vec![
                    Judgment { participant: "p1".into(), score: *score + 0.5 },
                    Judgment { participant: "p2".into(), score: *score - 0.5 },
                ];
                p
            })
            .collect()
    }

    #[test]
    fn perfect_model_reaches_rho_one() {
        // Three word vectors with distinct pairwise cosines; human mean
        // judgments are set to the model scores themselves.
        let model = single_model(&[
            ("a", &[1.0, 0.0]),
            ("b", &[0.8, 0.6]),
            ("c", &[0.0, 1.0]),
            ("d", &[0.6, 0.8]),
        ]);
        let mut pairs = Vec::new();
        for (words, category) in [
            (["a", "b", "c", "d"], Category::AN),
            (["a", "c", "b", "d"], Category::AN),
            (["a", "d", "b", "c"], Category::AN),
        ] {
            let p = pair(category, words);
            let score = score_pair(&model, &p, ScoreMode::Single).unwrap().unwrap();
            pairs.extend(judged_pairs(category, &[(score, words)]));
        }
        let report =
            evaluate_correlation(&model, &pairs, ScoreMode::Single, JudgmentMode::PerPairAverage)
                .unwrap();
        assert_relative_eq!(report.rho_per_category["AN"], 1.0);
        assert_relative_eq!(report.average_rho, 1.0);
        assert_eq!(report.skipped_pairs, 0);
        assert_eq!(report.omitted_categories, vec!["NN", "VO"]);
    }

    #[test]
    fn single_mode_on_multi_table_is_rejected() {
        use crate::embedding::{SenseEmbeddingTable, SenseKey};
        let table = SenseEmbeddingTable::from_entries(
            2,
            vec![(SenseKey::new("a", "s1"), vec![1.0, 0.0])],
        )
        .unwrap();
        let p = pair(Category::AN, ["a", "a", "a", "a"]);
        assert!(matches!(
            score_pair(&Model::Multi(table), &p, ScoreMode::Single),
            Err(Error::ModeMismatch)
        ));
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn values() -> impl Strategy<Value = Vec<(f64, f64)>> {
            proptest::collection::vec(
                (
                    proptest::sample::select(vec![-3.0, -1.0, 0.0, 0.5, 1.0, 2.0, 7.0]),
                    -100.0..100.0f64,
                ),
                2..30,
            )
        }

        proptest! {
            #[test]
            fn spearman_is_symmetric(pairs in values()) {
                let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
                let ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
                let a = spearman(&xs, &ys).unwrap();
                let b = spearman(&ys, &xs).unwrap();
                match (a, b) {
                    (Some(a), Some(b)) => prop_assert!((a - b).abs() <= 1e-12),
                    (a, b) => prop_assert_eq!(a.is_none(), b.is_none()),
                }
            }

            #[test]
            fn spearman_is_monotone_transform_invariant(pairs in values()) {
                let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
                let ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
                // Strictly increasing transform of xs: exp scaled.
                let transformed: Vec<f64> = xs.iter().map(|x| (x / 10.0).exp() * 3.0).collect();
                let a = spearman(&xs, &ys).unwrap();
                let b = spearman(&transformed, &ys).unwrap();
                match (a, b) {
                    (Some(a), Some(b)) => prop_assert!((a - b).abs() <= 1e-9),
                    (a, b) => prop_assert_eq!(a.is_none(), b.is_none()),
                }
            }

            #[test]
            fn spearman_is_bounded(pairs in values()) {
                if let Some(rho) = spearman(
                    &pairs.iter().map(|p| p.0).collect::<Vec<_>>(),
                    &pairs.iter().map(|p| p.1).collect::<Vec<_>>(),
                ).unwrap() {
                    prop_assert!((-1.0..=1.0).contains(&rho));
                }
            }
        }
    }
}
