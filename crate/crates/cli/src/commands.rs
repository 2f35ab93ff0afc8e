//! Subcommand implementations.

use std::collections::HashMap;
use std::fs;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use rayon::prelude::*;

use sensebench::compose::{Model, OovPolicy};
use sensebench::context::{StopWords, WindowSpec};
use sensebench::embedding::{EmbeddingTable, SenseEmbeddingTable};
use sensebench::freq::{sample_equal_bands, FrequencyTable};
use sensebench::phrase::{self, JudgmentMode, ScoreMode};
use sensebench::task::{self, Eligibility, Pos, TaskSpec, WsdInstance};
use sensebench::wsd::{self, Prediction};

use crate::table;
use crate::{
    CliError, EligibilityArg, EvalPhraseArgs, EvalWsdArgs, FreqBandsArgs, OovPolicyArg,
    OutputFormat, PosArg, RhoOverArg, ScoreModeArg, SignificanceArgs, StrategyArg, TaskBuildArgs,
};

type CliResult = Result<(), CliError>;

fn usage(message: impl Into<String>) -> CliError {
    CliError::Usage(message.into())
}

fn open(path: &str) -> Result<BufReader<File>, CliError> {
    Ok(BufReader::new(File::open(path).with_context(|| {
        format!("cannot open {path}")
    })?))
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    Ok(BufWriter::new(File::create(path).with_context(|| {
        format!("cannot create {}", path.display())
    })?))
}

fn load_stopwords(path: Option<&str>) -> Result<StopWords, CliError> {
    match path {
        Some(path) => Ok(StopWords::from_reader(open(path)?)
            .with_context(|| format!("cannot read stop words from {path}"))?),
        None => Ok(StopWords::english()),
    }
}

fn load_word_table(path: &str) -> Result<EmbeddingTable, CliError> {
    let (table, report) = EmbeddingTable::from_reader_auto(open(path)?)
        .with_context(|| format!("cannot load embeddings from {path}"))?;
    if report.duplicates > 0 {
        eprintln!(
            "warning: {} duplicate tokens in {path} (last occurrence kept)",
            report.duplicates
        );
    }
    Ok(table)
}

fn load_sense_table(path: &str, separator: char) -> Result<SenseEmbeddingTable, CliError> {
    let (table, report) = SenseEmbeddingTable::from_reader(open(path)?, separator)
        .with_context(|| format!("cannot load sense embeddings from {path}"))?;
    if report.skipped_lines > 0 {
        eprintln!(
            "warning: {} lines in {path} lacked the {separator:?} separator and were skipped",
            report.skipped_lines
        );
    }
    if report.duplicates > 0 {
        eprintln!(
            "warning: {} duplicate sense keys in {path} (last occurrence kept)",
            report.duplicates
        );
    }
    Ok(table)
}

fn load_labels(path: &str) -> Result<HashMap<String, String>, CliError> {
    let mut labels = HashMap::new();
    for (index, line) in open(path)?.lines().enumerate() {
        let line = line.with_context(|| format!("cannot read {path}"))?;
        if line.trim().is_empty() {
            continue;
        }
        let (sentence, sense_id) = line.split_once('\t').ok_or_else(|| {
            CliError::Data(anyhow::anyhow!(
                "{path} line {}: expected \"sentence<TAB>sense_id\"",
                index + 1
            ))
        })?;
        labels.insert(sentence.to_string(), sense_id.trim().to_string());
    }
    Ok(labels)
}

fn parse_radius(value: &str) -> Result<WindowSpec, CliError> {
    WindowSpec::parse(value)
        .ok_or_else(|| usage(format!("--radius must be 1, 2, 4 or dep, got {value:?}")))
}

fn thread_pool(jobs: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .context("cannot build thread pool")
        .map_err(CliError::Data)
}

fn read_task(path: &str) -> Result<Vec<WsdInstance>, CliError> {
    let instances =
        task::read_instances(open(path)?).with_context(|| format!("cannot read task file {path}"))?;
    if instances.is_empty() {
        return Err(CliError::Data(anyhow::anyhow!(
            "task file {path} contains no instances"
        )));
    }
    Ok(instances)
}

impl From<PosArg> for Pos {
    fn from(value: PosArg) -> Self {
        match value {
            PosArg::Adjective => Pos::Adjective,
            PosArg::Noun => Pos::Noun,
            PosArg::Verb => Pos::Verb,
        }
    }
}

pub fn task_build(args: TaskBuildArgs) -> CliResult {
    if args.n_senses.is_empty() {
        return Err(usage("--n-senses needs at least one value"));
    }
    for &n in &args.n_senses {
        if !(2..=5).contains(&n) {
            return Err(usage(format!("--n-senses values must be in [2,5], got {n}")));
        }
    }
    if !(args.dev_fraction > 0.0 && args.dev_fraction < 1.0) {
        return Err(usage(format!(
            "--dev-fraction must be in (0,1), got {}",
            args.dev_fraction
        )));
    }
    if args.repeats == 0 {
        return Err(usage("--repeats must be >= 1"));
    }

    let document = fs::read_to_string(&args.inventory)
        .with_context(|| format!("cannot read inventory {}", args.inventory))?;
    let (inventory, ingest) = task::ingest_inventory(&document)
        .with_context(|| format!("invalid inventory {}", args.inventory))?;
    if ingest.dropped_examples > 0 {
        eprintln!(
            "warning: {} examples dropped (no locatable target occurrence)",
            ingest.dropped_examples
        );
    }

    fs::create_dir_all(&args.output)
        .with_context(|| format!("cannot create output directory {}", args.output))?;
    let output_dir = PathBuf::from(&args.output);

    // counts[pos][n] = (dev, test)
    let mut counts: HashMap<Pos, HashMap<u32, (usize, usize)>> = HashMap::new();
    for &n in &args.n_senses {
        let spec = TaskSpec {
            pos: args.pos.map(Pos::from),
            n_senses: n,
            seed: args.seed,
            dev_fraction: args.dev_fraction,
            eligibility: match args.eligibility {
                EligibilityArg::MoreThan => Eligibility::MoreThanN,
                EligibilityArg::AtLeast => Eligibility::AtLeastN,
            },
            repeats: args.repeats,
        };
        let (instances, build) = task::build_instances(&inventory, &spec)?;
        if build.skipped_degenerate > 0 {
            eprintln!(
                "warning: n={n}: {} eligible lexemes skipped (no two content-distinct target examples)",
                build.skipped_degenerate
            );
        }
        let (dev, test) = task::split_dev_test(&instances, &spec);
        let dev_path = output_dir.join(format!("wsd_n{n}_dev.jsonl"));
        let test_path = output_dir.join(format!("wsd_n{n}_test.jsonl"));
        task::write_instances(&mut create(&dev_path)?, &dev)?;
        task::write_instances(&mut create(&test_path)?, &test)?;

        let dev_counts = task::pos_counts(&dev);
        let test_counts = task::pos_counts(&test);
        for pos in Pos::ALL {
            let entry = counts.entry(pos).or_default();
            entry.insert(
                n,
                (
                    dev_counts.get(&pos).copied().unwrap_or(0),
                    test_counts.get(&pos).copied().unwrap_or(0),
                ),
            );
        }
    }

    match args.format {
        OutputFormat::Table => {
            let mut rows = Vec::new();
            let mut header = vec!["pos".to_string()];
            for &n in &args.n_senses {
                header.push(format!("{n} senses (dev/test)"));
            }
            rows.push(header);
            let mut totals: HashMap<u32, (usize, usize)> = HashMap::new();
            for pos in Pos::ALL {
                let mut row = vec![pos.to_string()];
                for &n in &args.n_senses {
                    let (dev, test) = counts[&pos].get(&n).copied().unwrap_or((0, 0));
                    let total = totals.entry(n).or_default();
                    total.0 += dev;
                    total.1 += test;
                    row.push(format!("{dev}/{test}"));
                }
                rows.push(row);
            }
            let mut total_row = vec!["total".to_string()];
            for &n in &args.n_senses {
                let (dev, test) = totals.get(&n).copied().unwrap_or((0, 0));
                total_row.push(format!("{dev}/{test}"));
            }
            rows.push(total_row);
            print!("{}", table::render(&rows));
        }
        OutputFormat::Records => {
            for &n in &args.n_senses {
                for pos in Pos::ALL {
                    let (dev, test) = counts[&pos].get(&n).copied().unwrap_or((0, 0));
                    println!(
                        "{}",
                        serde_json::json!({
                            "n_senses": n,
                            "pos": pos.as_str(),
                            "dev": dev,
                            "test": test,
                        })
                    );
                }
            }
        }
    }
    Ok(())
}

enum Runner<'a> {
    Single {
        table: &'a EmbeddingTable,
        policy: OovPolicy,
    },
    Multi {
        table: &'a SenseEmbeddingTable,
    },
    MultiOracle {
        table: &'a SenseEmbeddingTable,
        labels: &'a HashMap<String, String>,
    },
    Overlap,
    Random,
}

impl Runner<'_> {
    fn predict(
        &self,
        instance: &WsdInstance,
        index: usize,
        window: WindowSpec,
        stopwords: &StopWords,
        seed: u64,
    ) -> sensebench::Result<Prediction> {
        match self {
            Runner::Single { table, policy } => {
                wsd::predict_single(table, instance, index, window, stopwords, *policy, seed)
            }
            Runner::Multi { table } => {
                wsd::predict_multi(table, instance, index, window, stopwords, seed)
            }
            Runner::MultiOracle { table, labels } => {
                wsd::predict_multi_oracle(table, instance, index, labels, window, stopwords, seed)
            }
            Runner::Overlap => wsd::predict_overlap(instance, index, window, stopwords, seed),
            Runner::Random => Ok(wsd::predict_random(instance, index, seed)),
        }
    }
}

pub fn eval_wsd(args: EvalWsdArgs) -> CliResult {
    let window = parse_radius(&args.radius)?;
    match args.strategy {
        StrategyArg::Single => {
            if args.embeddings.is_none() {
                return Err(usage("strategy single requires --embeddings"));
            }
            if args.sense_embeddings.is_some() {
                return Err(usage("strategy single takes --embeddings, not --sense-embeddings"));
            }
        }
        StrategyArg::Multi | StrategyArg::MultiOracle => {
            if args.sense_embeddings.is_none() {
                return Err(usage(format!(
                    "strategy {} requires --sense-embeddings",
                    strategy_name(args.strategy)
                )));
            }
            if args.embeddings.is_some() {
                return Err(usage(format!(
                    "strategy {} takes --sense-embeddings, not --embeddings",
                    strategy_name(args.strategy)
                )));
            }
            if args.strategy == StrategyArg::MultiOracle && args.labels.is_none() {
                return Err(usage("strategy multi-oracle requires --labels"));
            }
        }
        StrategyArg::Overlap | StrategyArg::Random => {}
    }

    let instances = read_task(&args.task)?;
    let stopwords = load_stopwords(args.stopwords.as_deref())?;
    let word_table = match &args.embeddings {
        Some(path) => Some(load_word_table(path)?),
        None => None,
    };
    let sense_table = match &args.sense_embeddings {
        Some(path) => Some(load_sense_table(path, args.sense_separator)?),
        None => None,
    };
    let labels = match &args.labels {
        Some(path) => Some(load_labels(path)?),
        None => None,
    };
    let freq = match &args.freq_table {
        Some(path) => Some(
            FrequencyTable::from_reader(open(path)?, &sensebench::freq::DEFAULT_EDGES)
                .with_context(|| format!("cannot load frequency table {path}"))?,
        ),
        None => None,
    };

    let runner = match args.strategy {
        StrategyArg::Single => Runner::Single {
            table: word_table.as_ref().expect("validated above"),
            policy: match args.oov_policy {
                OovPolicyArg::Random => OovPolicy::Random,
                OovPolicyArg::Fail => OovPolicy::Fail,
            },
        },
        StrategyArg::Multi => Runner::Multi {
            table: sense_table.as_ref().expect("validated above"),
        },
        StrategyArg::MultiOracle => Runner::MultiOracle {
            table: sense_table.as_ref().expect("validated above"),
            labels: labels.as_ref().expect("validated above"),
        },
        StrategyArg::Overlap => Runner::Overlap,
        StrategyArg::Random => Runner::Random,
    };

    let pool = thread_pool(args.jobs)?;
    let predictions: sensebench::Result<Vec<Prediction>> = pool.install(|| {
        instances
            .par_iter()
            .enumerate()
            .map(|(index, instance)| {
                runner.predict(instance, index, window, &stopwords, args.seed)
            })
            .collect()
    });
    let predictions = predictions?;
    let report = wsd::evaluate(&predictions, &instances, freq.as_ref())?;

    if let Some(path) = &args.predictions {
        wsd::write_predictions(&mut create(Path::new(path))?, &predictions)?;
    }
    if let Some(path) = &args.report {
        let mut writer = create(Path::new(path))?;
        serde_json::to_writer_pretty(&mut writer, &report).context("cannot write report")?;
        writer.write_all(b"\n").context("cannot write report")?;
    }

    match args.format {
        OutputFormat::Table => {
            println!(
                "strategy: {}  radius: {}  seed: {}",
                strategy_name(args.strategy),
                window,
                args.seed
            );
            println!(
                "instances: {}  correct: {}  accuracy: {:.4}",
                report.n_instances, report.n_correct, report.accuracy
            );
            println!(
                "ties: {}  unscoreable: {}  oov-context-words: {}",
                report.ties, report.unscoreable, report.oov_context_words
            );
            let mut rows = vec![table::row(&["pos", "correct", "total", "accuracy"])];
            for (pos, stats) in &report.per_pos {
                rows.push(vec![
                    pos.clone(),
                    stats.correct.to_string(),
                    stats.total.to_string(),
                    format!("{:.4}", stats.accuracy),
                ]);
            }
            println!();
            print!("{}", table::render(&rows));
            if !report.per_band.is_empty() {
                let mut rows = vec![table::row(&["band", "correct", "total", "accuracy"])];
                for band in &report.per_band {
                    rows.push(vec![
                        band.band.clone(),
                        band.correct.to_string(),
                        band.total.to_string(),
                        format!("{:.4}", band.accuracy),
                    ]);
                }
                println!();
                print!("{}", table::render(&rows));
            }
        }
        OutputFormat::Records => {
            println!(
                "{}",
                serde_json::to_string(&report).context("cannot serialize report")?
            );
        }
    }
    Ok(())
}

fn strategy_name(strategy: StrategyArg) -> &'static str {
    match strategy {
        StrategyArg::Single => "single",
        StrategyArg::Multi => "multi",
        StrategyArg::MultiOracle => "multi-oracle",
        StrategyArg::Overlap => "overlap",
        StrategyArg::Random => "random",
    }
}

pub fn eval_phrase(args: EvalPhraseArgs) -> CliResult {
    let mode = match args.mode {
        ScoreModeArg::Single => ScoreMode::Single,
        ScoreModeArg::Max => ScoreMode::Max,
        ScoreModeArg::Min => ScoreMode::Min,
        ScoreModeArg::Mean => ScoreMode::Mean,
    };
    let judgment_mode = match args.rho_over {
        RhoOverArg::PerJudgment => JudgmentMode::PerJudgment,
        RhoOverArg::PairAverage => JudgmentMode::PerPairAverage,
    };
    let model = match (&args.embeddings, &args.sense_embeddings) {
        (Some(path), None) => Model::Single(load_word_table(path)?),
        (None, Some(path)) => Model::Multi(load_sense_table(path, args.sense_separator)?),
        (Some(_), Some(_)) => {
            return Err(usage("give exactly one of --embeddings or --sense-embeddings"))
        }
        (None, None) => return Err(usage("one of --embeddings or --sense-embeddings is required")),
    };
    if mode == ScoreMode::Single && matches!(model, Model::Multi(_)) {
        return Err(usage("mode single requires --embeddings (a single-sense table)"));
    }

    let pairs = phrase::load_pairs(open(&args.judgments)?)
        .with_context(|| format!("cannot read judgments {}", args.judgments))?;
    let pool = thread_pool(args.jobs)?;
    let scores: sensebench::Result<Vec<Option<f64>>> = pool.install(|| {
        pairs
            .par_iter()
            .map(|pair| phrase::score_pair(&model, pair, mode))
            .collect()
    });
    let report = phrase::evaluate_correlation_scored(&pairs, &scores?, judgment_mode)?;

    if let Some(path) = &args.report {
        let mut writer = create(Path::new(path))?;
        serde_json::to_writer_pretty(&mut writer, &report).context("cannot write report")?;
        writer.write_all(b"\n").context("cannot write report")?;
    }

    match args.format {
        OutputFormat::Table => {
            let categories = ["AN", "NN", "VO"];
            let mut rows = vec![{
                let mut header = vec!["mode".to_string()];
                header.extend(categories.iter().map(|c| c.to_string()));
                header.push("Average".to_string());
                header
            }];
            let mut row = vec![mode.to_string()];
            for category in categories {
                row.push(match report.rho_per_category.get(category) {
                    Some(rho) => format!("{rho:.4}"),
                    None => "-".to_string(),
                });
            }
            row.push(format!("{:.4}", report.average_rho));
            rows.push(row);
            print!("{}", table::render(&rows));
            println!();
            println!(
                "pairs: {}  skipped (oov): {}  judgments used: {}",
                pairs.len(),
                report.skipped_pairs,
                report.n_judgments_used
            );
            if !report.omitted_categories.is_empty() {
                eprintln!(
                    "warning: categories omitted (fewer than 2 scoreable pairs or undefined rho): {}",
                    report.omitted_categories.join(", ")
                );
            }
        }
        OutputFormat::Records => {
            println!(
                "{}",
                serde_json::to_string(&report).context("cannot serialize report")?
            );
        }
    }
    Ok(())
}

pub fn significance(args: SignificanceArgs) -> CliResult {
    if args.rounds == 0 {
        return Err(usage("--rounds must be >= 1"));
    }
    let a = wsd::read_predictions(open(&args.predictions_a)?)
        .with_context(|| format!("cannot read {}", args.predictions_a))?;
    let b = wsd::read_predictions(open(&args.predictions_b)?)
        .with_context(|| format!("cannot read {}", args.predictions_b))?;
    if a.len() != b.len() {
        return Err(CliError::Data(anyhow::anyhow!(
            "prediction files differ in length: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    for (index, (pa, pb)) in a.iter().zip(&b).enumerate() {
        if pa.instance_index != pb.instance_index || pa.lemma != pb.lemma || pa.pos != pb.pos {
            return Err(CliError::Data(anyhow::anyhow!(
                "prediction files do not cover the same instances (diverge at record {})",
                index + 1
            )));
        }
    }

    let correct_a: Vec<bool> = a.iter().map(|p| p.correct).collect();
    let correct_b: Vec<bool> = b.iter().map(|p| p.correct).collect();
    let accuracy = |bits: &[bool]| bits.iter().filter(|&&c| c).count() as f64 / bits.len() as f64;
    let result = wsd::permutation_test(&correct_a, &correct_b, args.rounds, args.seed)?;

    match args.format {
        OutputFormat::Table => {
            let rows = vec![
                table::row(&[
                    "accuracy-a",
                    "accuracy-b",
                    "observed-diff",
                    "rounds",
                    "p-value",
                    "seed",
                ]),
                vec![
                    format!("{:.4}", accuracy(&correct_a)),
                    format!("{:.4}", accuracy(&correct_b)),
                    format!("{:.4}", result.observed_diff),
                    result.rounds.to_string(),
                    format!("{:.6}", result.p_value),
                    result.seed.to_string(),
                ],
            ];
            print!("{}", table::render(&rows));
        }
        OutputFormat::Records => {
            println!(
                "{}",
                serde_json::to_string(&result).context("cannot serialize result")?
            );
        }
    }
    Ok(())
}

pub fn freq_bands(args: FreqBandsArgs) -> CliResult {
    if args.edges.is_empty() || args.edges.windows(2).any(|pair| pair[0] >= pair[1]) {
        return Err(usage("--edges must be non-empty and strictly increasing"));
    }
    if args.sample && args.output.is_none() {
        return Err(usage("--sample requires --output"));
    }

    let instances = read_task(&args.task)?;
    let freq = FrequencyTable::from_reader(open(&args.freq_table)?, &args.edges)
        .with_context(|| format!("cannot load frequency table {}", args.freq_table))?;

    let mut per_band = vec![0usize; freq.band_count()];
    let mut unknown = 0usize;
    for instance in &instances {
        let (band, flagged) = freq.assign_band(&instance.lemma);
        per_band[band.index] += 1;
        unknown += flagged as usize;
    }
    if unknown > 0 {
        eprintln!("warning: {unknown} instances have lemmas unknown to the frequency table (lowest band)");
    }

    let sampled = if args.sample {
        let sampled = sample_equal_bands(&instances, &freq, &args.edges, args.seed)?;
        let output = args.output.as_ref().expect("validated above");
        task::write_instances(&mut create(Path::new(output))?, &sampled)?;
        Some(sampled)
    } else {
        None
    };

    match args.format {
        OutputFormat::Table => {
            let mut rows = vec![if sampled.is_some() {
                table::row(&["band", "instances", "sampled"])
            } else {
                table::row(&["band", "instances"])
            }];
            for (index, label) in freq.band_labels().into_iter().enumerate() {
                let mut row = vec![label.clone(), per_band[index].to_string()];
                if let Some(sampled) = &sampled {
                    let count = sampled
                        .iter()
                        .filter(|i| freq.assign_band(&i.lemma).0.index == index)
                        .count();
                    row.push(count.to_string());
                }
                rows.push(row);
            }
            print!("{}", table::render(&rows));
        }
        OutputFormat::Records => {
            for (index, label) in freq.band_labels().into_iter().enumerate() {
                let mut record = serde_json::json!({
                    "band": label,
                    "instances": per_band[index],
                });
                if let Some(sampled) = &sampled {
                    let count = sampled
                        .iter()
                        .filter(|i| freq.assign_band(&i.lemma).0.index == index)
                        .count();
                    record["sampled"] = serde_json::json!(count);
                }
                println!("{record}");
            }
        }
    }
    Ok(())
}
