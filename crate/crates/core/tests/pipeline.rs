//! End-to-end library pipeline checks on synthetic data.

use std::collections::HashSet;

use sensebench::compose::{Model, OovPolicy};
use sensebench::context::{read_conllu, window_for, StopWords, WindowSpec};
use sensebench::phrase::{
    evaluate_correlation, score_pair, Category, Judgment, JudgmentMode, PhrasePair, ScoreMode,
};
use sensebench::rng;
use sensebench::synth::{orthogonal_setup, random_sense_table};
use sensebench::task::{build_instances, split_dev_test, TaskSpec, WsdInstance};
use sensebench::wsd::{
    evaluate, permutation_test, predict_multi, predict_multi_oracle, predict_random,
    predict_single, Prediction,
};

use rand::Rng;

const BOW2: WindowSpec = WindowSpec::Bow { radius: 2 };

fn accuracy(predictions: &[Prediction]) -> f64 {
    predictions.iter().filter(|p| p.correct).count() as f64 / predictions.len() as f64
}

#[test]
fn separable_pipeline_beats_random() {
    // Moderate noise: the compositional strategy stays informative but no
    // longer perfect.
    let setup = orthogonal_setup(200, 4, 2, 0.3, 40);
    let spec = TaskSpec::new(3, 41);
    let (instances, _) = build_instances(&setup.inventory, &spec).unwrap();
    assert_eq!(instances.len(), 200);

    let (dev, test) = split_dev_test(&instances, &spec);
    assert_eq!(dev.len() + test.len(), instances.len());
    assert_eq!(dev.len(), 40);
    let dev_lemmas: HashSet<&str> = dev.iter().map(|i| i.lemma.as_str()).collect();
    assert!(test.iter().all(|i| !dev_lemmas.contains(i.lemma.as_str())));

    let stopwords = StopWords::none();
    let single: Vec<Prediction> = test
        .iter()
        .enumerate()
        .map(|(index, instance)| {
            predict_single(
                &setup.word_table,
                instance,
                index,
                BOW2,
                &stopwords,
                OovPolicy::Fail,
                42,
            )
            .unwrap()
        })
        .collect();
    let random: Vec<Prediction> = test
        .iter()
        .enumerate()
        .map(|(index, instance)| predict_random(instance, index, 42))
        .collect();

    let single_report = evaluate(&single, &test, None).unwrap();
    let random_report = evaluate(&random, &test, None).unwrap();
    assert!(
        single_report.accuracy > random_report.accuracy + 0.2,
        "single {:.3} vs random {:.3}",
        single_report.accuracy,
        random_report.accuracy
    );

    let correct_single: Vec<bool> = single.iter().map(|p| p.correct).collect();
    let correct_random: Vec<bool> = random.iter().map(|p| p.correct).collect();
    let significance = permutation_test(&correct_single, &correct_random, 2000, 43).unwrap();
    assert!(
        significance.p_value < 0.05,
        "expected a significant gap, got p = {}",
        significance.p_value
    );
}

#[test]
fn oracle_labels_do_not_hurt() {
    let stopwords = StopWords::none();
    let run = |sigma: f64, seed: u64| -> (f64, f64) {
        let setup = orthogonal_setup(300, 4, 2, sigma, seed);
        let (instances, _) = build_instances(&setup.inventory, &TaskSpec::new(3, seed + 1)).unwrap();
        let multi: Vec<Prediction> = instances
            .iter()
            .enumerate()
            .map(|(index, instance)| {
                predict_multi(&setup.sense_table, instance, index, BOW2, &stopwords, 7).unwrap()
            })
            .collect();
        let oracle: Vec<Prediction> = instances
            .iter()
            .enumerate()
            .map(|(index, instance)| {
                predict_multi_oracle(
                    &setup.sense_table,
                    instance,
                    index,
                    &setup.labels,
                    BOW2,
                    &stopwords,
                    7,
                )
                .unwrap()
            })
            .collect();
        (accuracy(&oracle), accuracy(&multi))
    };

    // Noiseless: both are perfect.
    let (oracle_clean, multi_clean) = run(0.0, 50);
    assert_eq!(oracle_clean, 1.0);
    assert_eq!(multi_clean, 1.0);

    // Under heavy noise the unlabeled strategy degrades; access to target
    // sense labels must not score worse.
    let (oracle_noisy, multi_noisy) = run(0.6, 51);
    assert!(
        oracle_noisy >= multi_noisy,
        "oracle {oracle_noisy:.3} below unlabeled {multi_noisy:.3}"
    );
}

#[test]
fn conllu_feeds_dependency_windows() {
    let text = "\
1\tThe\tthe\tDET\t_\t_\t3\tdet\t_\t_
2\tblack\tblack\tADJ\t_\t_\t3\tamod\t_\t_
3\tdog\tdog\tNOUN\t_\t_\t4\tnsubj\t_\t_
4\tbarked\tbark\tVERB\t_\t_\t0\troot\t_\t_

1\tShe\tshe\tPRON\t_\t_\t2\tnsubj\t_\t_
2\truffled\truffle\tVERB\t_\t_\t0\troot\t_\t_
3\tfeathers\tfeather\tNOUN\t_\t_\t2\tobj\t_\t_
";
    let sentences = read_conllu(text.as_bytes()).unwrap();
    assert_eq!(sentences.len(), 2);

    let mut first = sentences[0].clone();
    first.target_index = first.locate_target("dog").unwrap();
    let window = window_for(&first, WindowSpec::Dependency, &StopWords::english()).unwrap();
    // Head "barked" and dependents "the", "black"; "the" is a stop word.
    assert_eq!(window.words, vec!["black", "barked"]);

    let mut second = sentences[1].clone();
    second.target_index = second.locate_target("ruffle").unwrap();
    assert_eq!(second.target_token(), "ruffled");
    let window = window_for(&second, WindowSpec::Dependency, &StopWords::english()).unwrap();
    assert_eq!(window.words, vec!["feathers"]);
}

#[test]
fn phrase_mode_ordering_holds_through_score_pair() {
    let vocabulary: Vec<String> = (0..60).map(|i| format!("w{i}")).collect();
    let model = Model::Multi(random_sense_table(&vocabulary, 6, 60));
    let mut stream = rng::stream(61, &["pairs"]);
    for _ in 0..100 {
        let mut pick = || vocabulary[stream.gen_range(0..vocabulary.len())].clone();
        let pair = PhrasePair {
            category: Category::AN,
            phrase1: (pick(), pick()),
            phrase2: (pick(), pick()),
            judgments: vec![Judgment {
                participant: "p".into(),
                score: 1.0,
            }],
        };
        let max = score_pair(&model, &pair, ScoreMode::Max).unwrap().unwrap();
        let min = score_pair(&model, &pair, ScoreMode::Min).unwrap().unwrap();
        let mean = score_pair(&model, &pair, ScoreMode::Mean).unwrap().unwrap();
        assert!(min <= mean && mean <= max, "min {min} mean {mean} max {max}");
    }
}

#[test]
fn judgment_modes_are_bounded_and_total() {
    let vocabulary: Vec<String> = (0..40).map(|i| format!("w{i}")).collect();
    let model = Model::Multi(random_sense_table(&vocabulary, 6, 70));
    let mut stream = rng::stream(71, &["judgments"]);
    let mut pairs = Vec::new();
    for category in Category::ALL {
        for _ in 0..8 {
            let mut pick = || vocabulary[stream.gen_range(0..vocabulary.len())].clone();
            pairs.push(PhrasePair {
                category,
                phrase1: (pick(), pick()),
                phrase2: (pick(), pick()),
                judgments: (0..3)
                    .map(|p| Judgment {
                        participant: format!("p{p}"),
                        score: stream.gen_range(1..8) as f64,
                    })
                    .collect(),
            });
        }
    }
    for judgment_mode in [JudgmentMode::PerJudgment, JudgmentMode::PerPairAverage] {
        let report = evaluate_correlation(&model, &pairs, ScoreMode::Mean, judgment_mode).unwrap();
        for rho in report.rho_per_category.values() {
            assert!((-1.0..=1.0).contains(rho));
        }
        assert!((-1.0..=1.0).contains(&report.average_rho));
    }
}

#[test]
fn instances_round_trip_through_records() {
    let setup = orthogonal_setup(20, 4, 2, 0.0, 80);
    let (instances, _) = build_instances(&setup.inventory, &TaskSpec::new(2, 81)).unwrap();
    let mut bytes = Vec::new();
    sensebench::task::write_instances(&mut bytes, &instances).unwrap();
    let read_back: Vec<WsdInstance> = sensebench::task::read_instances(bytes.as_slice()).unwrap();
    assert_eq!(instances, read_back);
}
