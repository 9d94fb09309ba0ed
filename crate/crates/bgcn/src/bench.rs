//! Experiment harness: repeated trials over a dataset, CSV persistence,
//! and the degree-stratified error analysis.
//!
//! A run writes five artifacts into its output directory:
//!
//! - `trials.csv` — one row per (trial, method) with the exact test-set
//!   correctness bitmap; byte-identical across reruns of the same command.
//! - `summary.csv` — per-method mean accuracy with both the sample standard
//!   deviation and the standard error across trials.
//! - `degree_analysis.csv` — when both methods ran: per-trial counts of
//!   test nodes the posterior method corrects or breaks relative to the
//!   baseline, split at the median test-set degree, plus summary rows.
//! - `timings.csv` — wall-clock time per (trial, method); kept out of
//!   `trials.csv` so the deterministic outputs stay byte-identical.
//! - `run_config.json` — the full configuration echo.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{fixed_split_path, load_dataset_dir, make_split, NodeData, Split, SplitMode};
use crate::error::{Error, Result};
use crate::gcnn::{argmax_rows, forward, train, Hyperparams};
use crate::graph::{normalized_adjacency, Graph};
use crate::posterior::{bgcn_predict, classify, BgcnConfig};
use crate::rng::{derive2, derive3, fnv1a, stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Gcnn,
    Bgcn,
}

impl Method {
    fn index(self) -> u64 {
        match self {
            Method::Gcnn => 0,
            Method::Bgcn => 1,
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::Gcnn => write!(f, "gcnn"),
            Method::Bgcn => write!(f, "bgcn"),
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gcnn" => Ok(Method::Gcnn),
            "bgcn" => Ok(Method::Bgcn),
            other => Err(Error::InvalidConfig(format!(
                "unknown method `{other}` (expected gcnn or bgcn)"
            ))),
        }
    }
}

/// Everything one experiment run needs. Serialized verbatim into
/// `run_config.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dataset_dir: PathBuf,
    pub dataset_name: String,
    pub split_mode: SplitMode,
    pub labels_per_class: usize,
    pub methods: Vec<Method>,
    pub n_trials: usize,
    pub master_seed: u64,
    pub epsilon: f64,
    pub v_samples: usize,
    pub g_samples: usize,
    pub w_samples: usize,
    pub predict_on_sampled_graph: bool,
    pub hyper: Hyperparams,
    pub out_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn new(dataset_dir: impl Into<PathBuf>, out_dir: impl Into<PathBuf>) -> Self {
        let dataset_dir = dataset_dir.into();
        let dataset_name = dataset_dir
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "dataset".to_string());
        Self {
            dataset_dir,
            dataset_name,
            split_mode: SplitMode::Random,
            labels_per_class: 5,
            methods: vec![Method::Gcnn, Method::Bgcn],
            n_trials: 50,
            master_seed: 0,
            epsilon: crate::copying::CopyingConfig::DEFAULT_EPSILON,
            v_samples: 5,
            g_samples: 5,
            w_samples: 5,
            predict_on_sampled_graph: false,
            hyper: Hyperparams::default(),
            out_dir: out_dir.into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_trials == 0 {
            return Err(Error::InvalidConfig("n_trials must be at least 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidConfig("no methods selected".into()));
        }
        self.hyper.validate()?;
        crate::copying::CopyingConfig::new(self.epsilon)?;
        Ok(())
    }

    fn bgcn_config(&self, seed: u64) -> BgcnConfig {
        BgcnConfig {
            v_samples: self.v_samples,
            g_samples: self.g_samples,
            w_samples: self.w_samples,
            copying: crate::copying::CopyingConfig::new(self.epsilon)
                .expect("validated at run start"),
            gcnn: self.hyper.clone(),
            seed,
            predict_on_sampled_graph: self.predict_on_sampled_graph,
            keep_sample_outputs: false,
        }
    }
}

/// Result of one (trial, method) execution.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub trial_id: usize,
    pub method: Method,
    pub split_seed: u64,
    pub split_hash: u64,
    pub n_test: usize,
    pub n_correct: usize,
    /// Exactly `n_correct / n_test`.
    pub accuracy: f64,
    /// Correctness per test node, aligned with the ascending test-node list.
    pub bitmap: Vec<bool>,
    pub wall_ms: u64,
    pub error: Option<String>,
}

impl TrialResult {
    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }
}

/// One aggregated line of `summary.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub dataset: String,
    pub split_mode: SplitMode,
    pub labels_per_class: usize,
    pub method: Method,
    pub n_trials: usize,
    pub mean_accuracy_pct: f64,
    pub std_pct: f64,
    pub stderr_pct: f64,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub trials: Vec<TrialResult>,
    pub summary: Vec<SummaryRow>,
    pub degree_analysis: Option<DegreeAnalysis>,
    pub any_failed: bool,
}

fn split_hash(split: &Split) -> u64 {
    let mut bytes = Vec::with_capacity(16 + 8 * (split.train.len() + split.test.len()));
    bytes.push(match split.mode {
        SplitMode::Fixed => 0u8,
        SplitMode::Random => 1u8,
    });
    bytes.extend_from_slice(&(split.labels_per_class as u64).to_le_bytes());
    bytes.extend_from_slice(&(split.train.len() as u64).to_le_bytes());
    for &n in split.train.iter().chain(&split.test) {
        bytes.extend_from_slice(&(n as u64).to_le_bytes());
    }
    fnv1a(&bytes)
}

/// Accuracy of predictions over the test nodes of a split.
pub fn evaluate_on_test(
    predictions: &[usize],
    data: &NodeData,
    split: &Split,
) -> (Vec<bool>, usize) {
    let bitmap: Vec<bool> = split
        .test
        .iter()
        .map(|&node| predictions[node] == data.labels()[node])
        .collect();
    let n_correct = bitmap.iter().filter(|&&b| b).count();
    (bitmap, n_correct)
}

fn run_method(
    method: Method,
    graph: &Graph,
    data: &NodeData,
    split: &Split,
    cfg: &ExperimentConfig,
    seed: u64,
) -> Result<Vec<usize>> {
    match method {
        Method::Gcnn => {
            let op = normalized_adjacency(graph);
            let params = train(
                &op,
                data.features(),
                data.labels(),
                data.n_classes(),
                &split.train,
                &cfg.hyper,
                seed,
            )?;
            let out = forward(&params, &op, data.features(), None)?;
            Ok(argmax_rows(&out.probs().view()))
        }
        Method::Bgcn => {
            let pred = bgcn_predict(graph, data, split, &cfg.bgcn_config(seed))?;
            Ok(classify(&pred))
        }
    }
}

/// Run all trials, persist the artifacts into `cfg.out_dir`, and return the
/// in-memory outcome. Trials execute in parallel; outputs are ordered by
/// trial id and written serially, so identical configurations produce
/// byte-identical `trials.csv` / `summary.csv` / `degree_analysis.csv`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    cfg.validate()?;
    let (graph, data) = load_dataset_dir(&cfg.dataset_dir)?;

    let fixed_split = match cfg.split_mode {
        SplitMode::Fixed => Some(make_split(
            &data,
            SplitMode::Fixed,
            cfg.labels_per_class,
            cfg.master_seed,
            Some(&fixed_split_path(&cfg.dataset_dir)),
        )?),
        SplitMode::Random => None,
    };

    let trial_ids: Vec<usize> = (0..cfg.n_trials).collect();
    let per_trial: Vec<(Vec<TrialResult>, Option<Split>)> = trial_ids
        .par_iter()
        .map(|&t| run_trial(t, cfg, &graph, &data, fixed_split.as_ref()))
        .collect();

    let mut trials = Vec::with_capacity(cfg.n_trials * cfg.methods.len());
    let mut paired = Vec::new();
    for (results, split) in per_trial {
        if let (Some(split), true) = (split, cfg.methods.len() == 2) {
            let find = |m: Method| results.iter().find(|r| r.method == m && r.is_ok());
            if let (Some(g), Some(b)) = (find(Method::Gcnn), find(Method::Bgcn)) {
                paired.push(PairedTrial {
                    trial_id: g.trial_id,
                    test_nodes: split.test.clone(),
                    baseline_correct: g.bitmap.clone(),
                    posterior_correct: b.bitmap.clone(),
                });
            }
        }
        trials.extend(results);
    }

    let summary = summarize(cfg, &trials);
    let degree_analysis = if paired.is_empty() {
        None
    } else {
        Some(degree_error_analysis(&paired, &graph)?)
    };
    let any_failed = trials.iter().any(|t| !t.is_ok());

    std::fs::create_dir_all(&cfg.out_dir)?;
    write_trials_csv(&cfg.out_dir.join("trials.csv"), cfg, &trials)?;
    write_summary_csv(&cfg.out_dir.join("summary.csv"), &summary)?;
    write_timings_csv(&cfg.out_dir.join("timings.csv"), &trials)?;
    if let Some(analysis) = &degree_analysis {
        write_degree_csv(&cfg.out_dir.join("degree_analysis.csv"), analysis)?;
    }
    serde_json::to_writer_pretty(
        std::io::BufWriter::new(std::fs::File::create(cfg.out_dir.join("run_config.json"))?),
        cfg,
    )?;

    Ok(ExperimentOutcome {
        trials,
        summary,
        degree_analysis,
        any_failed,
    })
}

fn run_trial(
    t: usize,
    cfg: &ExperimentConfig,
    graph: &Graph,
    data: &NodeData,
    fixed_split: Option<&Split>,
) -> (Vec<TrialResult>, Option<Split>) {
    let split_seed = derive2(cfg.master_seed, stream::SPLIT, t as u64);
    let split = match fixed_split {
        Some(s) => Ok(s.clone()),
        None => make_split(
            data,
            SplitMode::Random,
            cfg.labels_per_class,
            split_seed,
            None,
        ),
    };
    let split = match split {
        Ok(s) => s,
        Err(e) => {
            let failure = |method: Method| TrialResult {
                trial_id: t,
                method,
                split_seed,
                split_hash: 0,
                n_test: 0,
                n_correct: 0,
                accuracy: 0.0,
                bitmap: Vec::new(),
                wall_ms: 0,
                error: Some(e.to_string()),
            };
            return (cfg.methods.iter().map(|&m| failure(m)).collect(), None);
        }
    };
    let hash = split_hash(&split);

    let results = cfg
        .methods
        .iter()
        .map(|&method| {
            let seed = derive3(cfg.master_seed, stream::TRIAL, t as u64, method.index());
            let started = Instant::now();
            match run_method(method, graph, data, &split, cfg, seed) {
                Ok(predictions) => {
                    let (bitmap, n_correct) = evaluate_on_test(&predictions, data, &split);
                    TrialResult {
                        trial_id: t,
                        method,
                        split_seed,
                        split_hash: hash,
                        n_test: split.test.len(),
                        n_correct,
                        accuracy: n_correct as f64 / split.test.len() as f64,
                        bitmap,
                        wall_ms: started.elapsed().as_millis() as u64,
                        error: None,
                    }
                }
                Err(e) => TrialResult {
                    trial_id: t,
                    method,
                    split_seed,
                    split_hash: hash,
                    n_test: split.test.len(),
                    n_correct: 0,
                    accuracy: 0.0,
                    bitmap: Vec::new(),
                    wall_ms: started.elapsed().as_millis() as u64,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    (results, Some(split))
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation (n−1 denominator); zero for fewer than two
/// values.
pub fn sample_std(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    (values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (values.len() - 1) as f64).sqrt()
}

fn summarize(cfg: &ExperimentConfig, trials: &[TrialResult]) -> Vec<SummaryRow> {
    cfg.methods
        .iter()
        .map(|&method| {
            let accs: Vec<f64> = trials
                .iter()
                .filter(|t| t.method == method && t.is_ok())
                .map(|t| 100.0 * t.accuracy)
                .collect();
            let (mean_pct, std_pct) = if accs.is_empty() {
                (f64::NAN, f64::NAN)
            } else {
                (mean(&accs), sample_std(&accs))
            };
            SummaryRow {
                dataset: cfg.dataset_name.clone(),
                split_mode: cfg.split_mode,
                labels_per_class: cfg.labels_per_class,
                method,
                n_trials: accs.len(),
                mean_accuracy_pct: mean_pct,
                std_pct,
                stderr_pct: if accs.is_empty() {
                    f64::NAN
                } else {
                    std_pct / (accs.len() as f64).sqrt()
                },
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Degree-stratified error analysis
// ---------------------------------------------------------------------------

/// Paired correctness bitmaps of one trial, both aligned with `test_nodes`.
#[derive(Debug, Clone)]
pub struct PairedTrial {
    pub trial_id: usize,
    pub test_nodes: Vec<usize>,
    pub baseline_correct: Vec<bool>,
    pub posterior_correct: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GroupCounts {
    /// Test nodes in the group where the posterior method is right and the
    /// baseline wrong.
    pub corrected: usize,
    /// The reverse.
    pub broken: usize,
    pub n_nodes: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialDegreeCounts {
    pub trial_id: usize,
    pub low: GroupCounts,
    pub high: GroupCounts,
}

/// Boxplot-style summary of a count distribution across trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupStats {
    pub mean: f64,
    pub median: f64,
    pub p25: f64,
    pub p75: f64,
    pub p05: f64,
    pub p95: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeAnalysis {
    pub per_trial: Vec<TrialDegreeCounts>,
    pub corrected_low: GroupStats,
    pub corrected_high: GroupStats,
    pub broken_low: GroupStats,
    pub broken_high: GroupStats,
}

/// Linear-interpolation percentile of pre-sorted values, `p` in [0, 100].
pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty());
    let rank = p / 100.0 * (sorted.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    let frac = rank - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

fn stats_of(mut values: Vec<f64>) -> GroupStats {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    GroupStats {
        mean: mean(&values),
        median: percentile(&values, 50.0),
        p25: percentile(&values, 25.0),
        p75: percentile(&values, 75.0),
        p05: percentile(&values, 5.0),
        p95: percentile(&values, 95.0),
    }
}

/// Stratify each trial's test set at the median test-set degree (nodes at
/// the median go to the low group) and count, per group, the test nodes the
/// posterior method corrects or breaks relative to the baseline.
pub fn degree_error_analysis(pairs: &[PairedTrial], graph: &Graph) -> Result<DegreeAnalysis> {
    if pairs.is_empty() {
        return Err(Error::InvalidConfig(
            "degree analysis needs at least one paired trial".into(),
        ));
    }
    let mut per_trial = Vec::with_capacity(pairs.len());
    for pair in pairs {
        if pair.baseline_correct.len() != pair.test_nodes.len()
            || pair.posterior_correct.len() != pair.test_nodes.len()
        {
            return Err(Error::ShapeMismatch {
                context: "degree analysis bitmaps",
                expected: format!("{} entries", pair.test_nodes.len()),
                got: format!(
                    "{} baseline, {} posterior",
                    pair.baseline_correct.len(),
                    pair.posterior_correct.len()
                ),
            });
        }
        let degrees: Vec<f64> = pair
            .test_nodes
            .iter()
            .map(|&n| graph.degree(n).map(|d| d as f64))
            .collect::<Result<_>>()?;
        let mut sorted = degrees.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = percentile(&sorted, 50.0);

        let mut low = GroupCounts::default();
        let mut high = GroupCounts::default();
        for (idx, &deg) in degrees.iter().enumerate() {
            let group = if deg <= median { &mut low } else { &mut high };
            group.n_nodes += 1;
            match (pair.posterior_correct[idx], pair.baseline_correct[idx]) {
                (true, false) => group.corrected += 1,
                (false, true) => group.broken += 1,
                _ => {}
            }
        }
        per_trial.push(TrialDegreeCounts {
            trial_id: pair.trial_id,
            low,
            high,
        });
    }

    let collect = |f: fn(&TrialDegreeCounts) -> usize| -> Vec<f64> {
        per_trial.iter().map(|t| f(t) as f64).collect()
    };
    Ok(DegreeAnalysis {
        corrected_low: stats_of(collect(|t| t.low.corrected)),
        corrected_high: stats_of(collect(|t| t.high.corrected)),
        broken_low: stats_of(collect(|t| t.low.broken)),
        broken_high: stats_of(collect(|t| t.high.broken)),
        per_trial,
    })
}

// ---------------------------------------------------------------------------
// CSV persistence
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
struct TrialCsvRow {
    trial_id: usize,
    method: Method,
    dataset: String,
    split_mode: SplitMode,
    labels_per_class: usize,
    split_seed: u64,
    split_hash: String,
    status: String,
    n_test: usize,
    n_correct: usize,
    accuracy: f64,
    bitmap: String,
    error: String,
}

fn bitmap_to_string(bitmap: &[bool]) -> String {
    bitmap.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn bitmap_from_string(s: &str) -> Vec<bool> {
    s.chars().map(|c| c == '1').collect()
}

fn write_trials_csv(path: &Path, cfg: &ExperimentConfig, trials: &[TrialResult]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    for t in trials {
        writer.serialize(TrialCsvRow {
            trial_id: t.trial_id,
            method: t.method,
            dataset: cfg.dataset_name.clone(),
            split_mode: cfg.split_mode,
            labels_per_class: cfg.labels_per_class,
            split_seed: t.split_seed,
            split_hash: format!("{:016x}", t.split_hash),
            status: if t.is_ok() { "ok" } else { "failed" }.to_string(),
            n_test: t.n_test,
            n_correct: t.n_correct,
            accuracy: t.accuracy,
            bitmap: bitmap_to_string(&t.bitmap),
            error: t.error.clone().unwrap_or_default(),
        })?;
    }
    writer.flush()?;
    Ok(())
}

/// Read back the rows of a `trials.csv`.
pub fn read_trials_csv(path: &Path) -> Result<Vec<TrialResult>> {
    let mut reader = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for row in reader.deserialize::<TrialCsvRow>() {
        let row = row?;
        out.push(TrialResult {
            trial_id: row.trial_id,
            method: row.method,
            split_seed: row.split_seed,
            split_hash: u64::from_str_radix(&row.split_hash, 16)
                .map_err(|e| Error::InvalidConfig(format!("bad split_hash: {e}")))?,
            n_test: row.n_test,
            n_correct: row.n_correct,
            accuracy: row.accuracy,
            bitmap: bitmap_from_string(&row.bitmap),
            wall_ms: 0,
            error: (row.status != "ok").then_some(row.error),
        });
    }
    Ok(out)
}

fn write_summary_csv(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_summary_csv(path: &Path) -> Result<Vec<SummaryRow>> {
    let mut reader = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for row in reader.deserialize::<SummaryRow>() {
        out.push(row?);
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
struct TimingCsvRow {
    trial_id: usize,
    method: Method,
    wall_ms: u64,
}

fn write_timings_csv(path: &Path, trials: &[TrialResult]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    for t in trials {
        writer.serialize(TimingCsvRow {
            trial_id: t.trial_id,
            method: t.method,
            wall_ms: t.wall_ms,
        })?;
    }
    writer.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct DegreeCsvRow {
    record: String,
    trial_or_stat: String,
    group: String,
    corrected: f64,
    broken: f64,
    n_nodes: String,
}

fn write_degree_csv(path: &Path, analysis: &DegreeAnalysis) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    for t in &analysis.per_trial {
        for (group, counts) in [("low", t.low), ("high", t.high)] {
            writer.serialize(DegreeCsvRow {
                record: "trial".into(),
                trial_or_stat: t.trial_id.to_string(),
                group: group.into(),
                corrected: counts.corrected as f64,
                broken: counts.broken as f64,
                n_nodes: counts.n_nodes.to_string(),
            })?;
        }
    }
    type StatGetter = fn(&GroupStats) -> f64;
    let stats: [(&str, StatGetter); 6] = [
        ("mean", |s| s.mean),
        ("median", |s| s.median),
        ("p25", |s| s.p25),
        ("p75", |s| s.p75),
        ("p05", |s| s.p05),
        ("p95", |s| s.p95),
    ];
    for (name, get) in stats {
        for (group, corrected, broken) in [
            ("low", &analysis.corrected_low, &analysis.broken_low),
            ("high", &analysis.corrected_high, &analysis.broken_high),
        ] {
            writer.serialize(DegreeCsvRow {
                record: "summary".into(),
                trial_or_stat: name.into(),
                group: group.into(),
                corrected: get(corrected),
                broken: get(broken),
                n_nodes: String::new(),
            })?;
        }
    }
    writer.flush()?;
    Ok(())
}

/// Recompute the degree analysis for a finished run directory: reload the
/// dataset named in `run_config.json`, rebuild each trial's split from its
/// persisted seed, pair the bitmaps, and rewrite `degree_analysis.csv`.
pub fn degree_analysis_from_dir(
    run_dir: &Path,
    dataset_override: Option<&Path>,
) -> Result<DegreeAnalysis> {
    let cfg: ExperimentConfig = serde_json::from_reader(std::io::BufReader::new(
        std::fs::File::open(run_dir.join("run_config.json"))?,
    ))?;
    let dataset_dir = dataset_override.unwrap_or(&cfg.dataset_dir);
    let (graph, data) = load_dataset_dir(dataset_dir)?;
    let trials = read_trials_csv(&run_dir.join("trials.csv"))?;

    let mut by_trial: BTreeMap<usize, Vec<&TrialResult>> = BTreeMap::new();
    for t in trials.iter().filter(|t| t.is_ok()) {
        by_trial.entry(t.trial_id).or_default().push(t);
    }

    let fixed_split = match cfg.split_mode {
        SplitMode::Fixed => Some(make_split(
            &data,
            SplitMode::Fixed,
            cfg.labels_per_class,
            cfg.master_seed,
            Some(&fixed_split_path(dataset_dir)),
        )?),
        SplitMode::Random => None,
    };

    let mut pairs = Vec::new();
    for (trial_id, rows) in by_trial {
        let find = |m: Method| rows.iter().find(|r| r.method == m);
        let (Some(g), Some(b)) = (find(Method::Gcnn), find(Method::Bgcn)) else {
            continue;
        };
        let split = match &fixed_split {
            Some(s) => s.clone(),
            None => make_split(
                &data,
                SplitMode::Random,
                cfg.labels_per_class,
                g.split_seed,
                None,
            )?,
        };
        pairs.push(PairedTrial {
            trial_id,
            test_nodes: split.test,
            baseline_correct: g.bitmap.clone(),
            posterior_correct: b.bitmap.clone(),
        });
    }
    let analysis = degree_error_analysis(&pairs, &graph)?;
    write_degree_csv(&run_dir.join("degree_analysis.csv"), &analysis)?;
    Ok(analysis)
}
