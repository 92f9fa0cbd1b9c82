use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use apirank_cli::{
    cmd_evaluate, cmd_ingest, cmd_recommend, cmd_train, CliError, CliResult, EvaluateOptions, Profile, RunConfig,
    DEFAULT_SWEEP,
};
use apirank_core::ranker::NegativeSampling;
use clap::{Args, Parser, Subcommand};

/// Recommend web APIs for a software project from historical usage data.
#[derive(Parser)]
#[command(name = "apirank", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Clean a raw corpus (drop deprecated records and dangling links,
    /// scrub API names from project descriptions).
    Ingest {
        /// Raw JSONL corpus.
        raw: PathBuf,
        /// Output path for the cleaned corpus.
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Train a ranking model on every project of a cleaned corpus.
    Train {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        training: Training,
        /// Where to write the model.
        #[arg(long, default_value = "model.json")]
        model: PathBuf,
    },
    /// Rank APIs for a project profile with a trained model.
    Recommend {
        #[arg(long, default_value = "model.json")]
        model: PathBuf,
        /// Project description text.
        #[arg(long, default_value = "", conflicts_with = "profile")]
        description: String,
        /// Comma-separated keywords.
        #[arg(long, default_value = "", conflicts_with = "profile")]
        keywords: String,
        /// JSONL file holding one project record.
        #[arg(long)]
        profile: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        top_n: usize,
    },
    /// Cross-validate the model (and optionally baselines) on a corpus.
    Evaluate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        training: Training,
        #[arg(long, default_value_t = 10)]
        folds: usize,
        /// Also evaluate the popularity and text-similarity baselines.
        #[arg(long)]
        baselines: bool,
        /// Also run the training-size sweep on fold 0.
        #[arg(long)]
        sweep: bool,
        /// Training fractions for the sweep.
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_SWEEP)]
        fractions: Vec<f64>,
        /// Also write per-fold metrics as CSV.
        #[arg(long)]
        csv: bool,
        /// Directory for report files.
        #[arg(long, default_value = "report")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    /// Cleaned JSONL corpus.
    #[arg(long)]
    corpus: PathBuf,
    /// Seed for every random choice (folds, ties, negative sampling).
    #[arg(long, env = "APIRANK_SEED", default_value_t = apirank_cli::DEFAULT_SEED)]
    seed: u64,
    /// Stop-word file, one word per line; defaults to the built-in list.
    #[arg(long)]
    stoplist: Option<PathBuf>,
    /// Noun filter: heuristic or passthrough.
    #[arg(long, default_value = apirank_core::textproc::DEFAULT_NOUN_FILTER)]
    noun_filter: String,
    /// Prepend each project's name to its description.
    #[arg(long)]
    include_project_name: bool,
}

#[derive(Args)]
struct Training {
    /// Regularization strength.
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    /// Neighbor counts for the collaborative features, strictly increasing.
    #[arg(long, value_delimiter = ',', default_values_t = [5usize, 10, 15, 20, 25])]
    k_grid: Vec<usize>,
    /// Negatives per used API: ALL or a positive integer.
    #[arg(long, default_value = "ALL")]
    negative_rate: NegativeSampling,
}

fn run_config(common: Common, training: Training) -> RunConfig {
    RunConfig {
        corpus: common.corpus,
        seed: common.seed,
        stoplist: common.stoplist,
        noun_filter: common.noun_filter,
        include_project_name: common.include_project_name,
        lambda: training.lambda,
        k_grid: training.k_grid,
        negative_rate: training.negative_rate,
        ..RunConfig::default()
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Ingest { raw, out: path } => cmd_ingest(&raw, &path, &mut out).map(drop),
        Command::Train { common, training, model } => {
            let cfg = RunConfig {
                model,
                ..run_config(common, training)
            };
            cmd_train(&cfg, &mut out).map(drop)
        }
        Command::Recommend {
            model,
            description,
            keywords,
            profile,
            top_n,
        } => {
            let profile = match profile {
                Some(path) => Profile::from_jsonl(&path)?,
                None => Profile::from_flags(&description, &keywords),
            };
            cmd_recommend(&model, &profile, top_n, &mut out).map(drop)
        }
        Command::Evaluate {
            common,
            training,
            folds,
            baselines,
            sweep,
            fractions,
            csv,
            out: out_dir,
        } => {
            let cfg = RunConfig {
                folds,
                ..run_config(common, training)
            };
            let opts = EvaluateOptions {
                baselines,
                sweep: if sweep { fractions } else { Vec::new() },
                csv,
                out_dir,
            };
            cmd_evaluate(&cfg, &opts, &mut out).map(drop)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError { kind, message }) => {
            let _ = std::io::stdout().flush();
            eprintln!("error: {message}");
            ExitCode::from(kind.code() as u8)
        }
    }
}
