//! Benchmark CLI. `bench run` executes repeated trials of the selected
//! methods over a dataset directory and persists CSV results;
//! `bench degree-analysis` recomputes the degree-stratified error analysis
//! of a finished run; `bench synth` writes a synthetic dataset for smoke
//! testing. `BENCH_THREADS` caps worker parallelism.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bgcn::bench::{self, ExperimentConfig, Method};
use bgcn::data::SplitMode;
use bgcn::synth::{self, SynthConfig};

#[derive(Parser)]
#[command(name = "bench", about = "Node classification benchmark runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run repeated trials and write trials.csv / summary.csv.
    Run(RunArgs),
    /// Recompute degree_analysis.csv for a finished paired run.
    DegreeAnalysis(DegreeAnalysisArgs),
    /// Generate a synthetic dataset directory.
    Synth(SynthArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Dataset directory (edges.tsv, features.tsv, labels.tsv[, fixed_split.tsv]).
    #[arg(long)]
    dataset: PathBuf,
    /// Split protocol.
    #[arg(long, value_parser = parse_split_mode)]
    split: SplitMode,
    /// Labeled nodes per class.
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(["5", "10", "20"]))]
    labels_per_class: String,
    /// Comma-separated list of methods to run.
    #[arg(long, value_delimiter = ',', default_value = "gcnn,bgcn")]
    methods: Vec<String>,
    /// Number of trials.
    #[arg(long, default_value_t = 50)]
    trials: usize,
    /// Master seed; every trial, split and sampler derives from it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Probability that a node keeps its observed edges in a sampled graph.
    #[arg(long, default_value_t = 0.01)]
    epsilon: f64,
    /// Copy-source vector draws (V).
    #[arg(long, default_value_t = 5)]
    v: usize,
    /// Graph draws per copy-source vector (N_G).
    #[arg(long, default_value_t = 5)]
    ng: usize,
    /// Dropout weight draws per trained network (S).
    #[arg(long, default_value_t = 5)]
    s_samples: usize,
    /// Training epochs per network.
    #[arg(long, default_value_t = 200)]
    epochs: usize,
    /// Hidden units of the two-layer network.
    #[arg(long, default_value_t = 16)]
    hidden: usize,
    /// Dropout rate (training and prediction-time sampling).
    #[arg(long, default_value_t = 0.5)]
    dropout: f64,
    /// Adam learning rate.
    #[arg(long, default_value_t = 0.01)]
    lr: f64,
    /// First-layer weight decay.
    #[arg(long, default_value_t = 5e-4)]
    weight_decay: f64,
    /// Evaluate posterior networks on their own sampled graph instead of
    /// the observed one.
    #[arg(long, default_value_t = false)]
    predict_on_sampled_graph: bool,
    /// Output directory for the CSV artifacts.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DegreeAnalysisArgs {
    /// Directory of a finished `bench run`.
    #[arg(long = "in")]
    run_dir: PathBuf,
    /// Override the dataset directory recorded in run_config.json.
    #[arg(long)]
    dataset: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    /// Output dataset directory.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 400)]
    nodes: usize,
    #[arg(long, default_value_t = 4)]
    classes: usize,
    #[arg(long, default_value_t = 64)]
    features: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Train nodes per class listed in fixed_split.tsv.
    #[arg(long, default_value_t = 20)]
    split_per_class: usize,
}

fn parse_split_mode(s: &str) -> Result<SplitMode, String> {
    match s {
        "fixed" => Ok(SplitMode::Fixed),
        "random" => Ok(SplitMode::Random),
        other => Err(format!("expected `fixed` or `random`, got `{other}`")),
    }
}

fn init_thread_pool() {
    if let Ok(value) = std::env::var("BENCH_THREADS") {
        match value.parse::<usize>() {
            Ok(n) if n > 0 => {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                    .expect("worker pool is only configured once");
            }
            _ => eprintln!("ignoring invalid BENCH_THREADS value `{value}`"),
        }
    }
}

fn main() -> ExitCode {
    init_thread_pool();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> bgcn::Result<ExitCode> {
    match cli.command {
        Command::Run(args) => {
            let methods: Vec<Method> = args
                .methods
                .iter()
                .map(|m| m.parse())
                .collect::<bgcn::Result<_>>()?;
            let mut cfg = ExperimentConfig::new(args.dataset, args.out);
            cfg.split_mode = args.split;
            cfg.labels_per_class = args.labels_per_class.parse().expect("validated by clap");
            cfg.methods = methods;
            cfg.n_trials = args.trials;
            cfg.master_seed = args.seed;
            cfg.epsilon = args.epsilon;
            cfg.v_samples = args.v;
            cfg.g_samples = args.ng;
            cfg.w_samples = args.s_samples;
            cfg.predict_on_sampled_graph = args.predict_on_sampled_graph;
            cfg.hyper.epochs = args.epochs;
            cfg.hyper.hidden_units = args.hidden;
            cfg.hyper.dropout_rate = args.dropout;
            cfg.hyper.learning_rate = args.lr;
            cfg.hyper.weight_decay = args.weight_decay;

            let outcome = bench::run_experiment(&cfg)?;
            for row in &outcome.summary {
                println!(
                    "{} {} {}/class {}: {:.1} ± {:.1} (stderr {:.2}) over {} trials",
                    row.dataset,
                    row.split_mode,
                    row.labels_per_class,
                    row.method,
                    row.mean_accuracy_pct,
                    row.std_pct,
                    row.stderr_pct,
                    row.n_trials
                );
            }
            if let Some(analysis) = &outcome.degree_analysis {
                println!(
                    "degree analysis: corrected low {:.2} / high {:.2}, broken low {:.2} / high {:.2} (means)",
                    analysis.corrected_low.mean,
                    analysis.corrected_high.mean,
                    analysis.broken_low.mean,
                    analysis.broken_high.mean
                );
            }
            let failed = outcome.trials.iter().filter(|t| !t.is_ok()).count();
            if failed > 0 {
                eprintln!("{failed} trial executions failed; see trials.csv");
                return Ok(ExitCode::FAILURE);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::DegreeAnalysis(args) => {
            let analysis = bench::degree_analysis_from_dir(&args.run_dir, args.dataset.as_deref())?;
            println!(
                "{} paired trials; corrected mean low {:.2} / high {:.2}, broken mean low {:.2} / high {:.2}",
                analysis.per_trial.len(),
                analysis.corrected_low.mean,
                analysis.corrected_high.mean,
                analysis.broken_low.mean,
                analysis.broken_high.mean
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Synth(args) => {
            let cfg = SynthConfig {
                n_nodes: args.nodes,
                n_classes: args.classes,
                n_features: args.features,
                seed: args.seed,
                ..SynthConfig::default()
            };
            let (graph, data) = synth::generate(&cfg)?;
            synth::write_dataset(&args.out, &graph, &data, args.split_per_class)?;
            println!(
                "wrote {} nodes, {} edges, {} classes to {}",
                graph.n_nodes(),
                graph.n_edges(),
                data.n_classes(),
                args.out.display()
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}
