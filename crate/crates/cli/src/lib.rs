//! Command implementations behind the `apirank` binary. Each command writes
//! its human-readable output to the given writer so it can be tested
//! without spawning a process.

use std::collections::BTreeSet;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use apirank_core::corpus::{self, normalize_keywords, Corpus, CorpusFormat, Record};
use apirank_core::eval::{self, EvalConfig, EvalReport, SweepReport};
use apirank_core::features::FeatureConfig;
use apirank_core::ranker::{NegativeSampling, RankerConfig, RankingModel};
use apirank_core::recommend::{recommenders, EXEMPLAR, PAIRWISE, POPREC};
use apirank_core::space::{Documents, FittedSpace};
use apirank_core::textproc::{noun_filters, StopList, TextConfig, TokenBag, DEFAULT_NOUN_FILTER};
use apirank_core::Error;

pub const DEFAULT_SEED: u64 = 42;

/// Process exit status categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitKind {
    /// Bad arguments or unusable input files.
    Usage,
    /// Training or another internal step failed.
    Internal,
}

impl ExitKind {
    pub fn code(self) -> i32 {
        match self {
            ExitKind::Usage => 2,
            ExitKind::Internal => 1,
        }
    }
}

#[derive(Debug, thiserror::Error)]
#[error("{message}")]
pub struct CliError {
    pub kind: ExitKind,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            kind: ExitKind::Usage,
            message: message.into(),
        }
    }

    pub fn code(&self) -> i32 {
        self.kind.code()
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let kind = match e {
            Error::Train(_) | Error::Dimension { .. } => ExitKind::Internal,
            _ => ExitKind::Usage,
        };
        Self {
            kind,
            message: e.to_string(),
        }
    }
}

impl From<corpus::CorpusError> for CliError {
    fn from(e: corpus::CorpusError) -> Self {
        Error::from(e).into()
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::usage(format!("{}: {e}", path.display()))
}

fn out_err(e: std::io::Error) -> CliError {
    CliError {
        kind: ExitKind::Internal,
        message: format!("writing output: {e}"),
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Parameters shared by `train`, `recommend` and `evaluate`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub corpus: PathBuf,
    pub model: PathBuf,
    pub lambda: f64,
    pub k_grid: Vec<usize>,
    pub negative_rate: NegativeSampling,
    pub seed: u64,
    pub top_n: usize,
    pub folds: usize,
    pub stoplist: Option<PathBuf>,
    pub noun_filter: String,
    pub include_project_name: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            corpus: PathBuf::from("corpus.jsonl"),
            model: PathBuf::from("model.json"),
            lambda: 1.0,
            k_grid: vec![5, 10, 15, 20, 25],
            negative_rate: NegativeSampling::All,
            seed: DEFAULT_SEED,
            top_n: 10,
            folds: 10,
            stoplist: None,
            noun_filter: DEFAULT_NOUN_FILTER.to_string(),
            include_project_name: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> CliResult<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(CliError::usage(format!("lambda must be positive, got {}", self.lambda)));
        }
        if self.top_n == 0 {
            return Err(CliError::usage("top-n must be positive"));
        }
        if self.folds < 2 {
            return Err(CliError::usage("folds must be at least 2"));
        }
        FeatureConfig::new(self.k_grid.clone(), self.seed)?;
        noun_filters().get(&self.noun_filter)?;
        Ok(())
    }

    pub fn feature_config(&self) -> CliResult<FeatureConfig> {
        Ok(FeatureConfig::new(self.k_grid.clone(), self.seed)?)
    }

    pub fn ranker_config(&self) -> RankerConfig {
        RankerConfig {
            lambda: self.lambda,
            negatives: self.negative_rate,
            ..RankerConfig::default()
        }
    }

    pub fn text_config(&self) -> CliResult<TextConfig> {
        let stoplist = match &self.stoplist {
            None => None,
            Some(path) => Some(StopList::load(path)?.sorted_words()),
        };
        Ok(TextConfig {
            noun_filter: self.noun_filter.clone(),
            include_project_name: self.include_project_name,
            stoplist,
        })
    }
}

pub fn load_corpus(path: &Path) -> CliResult<Corpus> {
    Ok(corpus::load_corpus(path, CorpusFormat::Jsonl)?)
}

/// Loads, cleans and scrubs a raw corpus and writes it as JSONL.
pub fn cmd_ingest(raw: &Path, out_path: &Path, out: &mut dyn Write) -> CliResult<corpus::CleanReport> {
    let raw_corpus = load_corpus(raw)?;
    let (cleaned, report) = corpus::clean(&raw_corpus);
    let scrubbed = corpus::scrub_api_mentions(&cleaned);
    let mut buf = Vec::new();
    scrubbed.write_jsonl(&mut buf).map_err(out_err)?;
    fs::write(out_path, buf).map_err(|e| io_err(out_path, e))?;
    writeln!(
        out,
        "removed {} APIs, {} projects, {} usage links; kept {} APIs, {} projects",
        report.removed_apis,
        report.removed_projects,
        report.removed_links,
        scrubbed.apis.len(),
        scrubbed.projects.len()
    )
    .map_err(out_err)?;
    let textless = scrubbed.textless_projects().len();
    if textless > 0 {
        writeln!(out, "{textless} projects have no description or keywords").map_err(out_err)?;
    }
    Ok(report)
}

/// Trains on every project of the corpus and writes the model file.
pub fn cmd_train(cfg: &RunConfig, out: &mut dyn Write) -> CliResult<RankingModel> {
    cfg.validate()?;
    let corpus = load_corpus(&cfg.corpus)?;
    let text = cfg.text_config()?;
    let docs = Documents::build(&corpus, &text.pipeline()?);
    let all: Vec<usize> = (0..corpus.projects.len()).collect();
    let space = FittedSpace::fit(&corpus, &docs, &all, cfg.feature_config()?)?;
    let model = RankingModel::fit(Arc::new(space), &cfg.ranker_config(), text)?;
    model.save(&cfg.model)?;

    let summary = model.summary.as_ref().expect("freshly trained model has a summary");
    let w = |e| out_err(e);
    writeln!(out, "trained on {} projects, {} APIs, {} triples (negatives: {})",
        corpus.projects.len(), corpus.apis.len(), summary.triples, summary.negatives).map_err(w)?;
    writeln!(out, "final R = {:.6}  (E = {:.6}, lambda = {})", summary.objective, summary.loss, model.lambda).map_err(w)?;
    writeln!(out, "outer iterations: {}  ({:?})", summary.iterations, summary.termination).map_err(w)?;
    for ((name, desc), t) in model.space.config.feature_names().iter().zip(model.space.config.feature_descriptions()).zip(&model.theta) {
        writeln!(out, "  {name:<4} {desc:<18} {t:>10.6}").map_err(w)?;
    }
    writeln!(out, "model written to {}", cfg.model.display()).map_err(w)?;
    Ok(model)
}

/// A profile to recommend for.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Profile {
    pub id: String,
    pub name: String,
    pub description: String,
    pub keywords: BTreeSet<String>,
}

impl Profile {
    /// `keywords` is comma-separated.
    pub fn from_flags(description: &str, keywords: &str) -> Self {
        Self {
            description: description.to_string(),
            keywords: normalize_keywords(keywords.split(',')),
            ..Self::default()
        }
    }

    /// First non-blank line of a JSONL file holding one project record.
    pub fn from_jsonl(path: &Path) -> CliResult<Self> {
        let file = fs::File::open(path).map_err(|e| io_err(path, e))?;
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| io_err(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            return match serde_json::from_str::<Record>(&line) {
                Ok(Record::Project(p)) => Ok(Self {
                    id: p.id,
                    name: p.name,
                    description: p.long_description,
                    keywords: p.keywords,
                }),
                Ok(Record::Api(_)) => Err(CliError::usage(format!(
                    "{}:{}: expected a project record, found an API",
                    path.display(),
                    i + 1
                ))),
                Err(e) => Err(CliError::usage(format!("{}:{}: {e}", path.display(), i + 1))),
            };
        }
        Err(CliError::usage(format!("{}: no profile record", path.display())))
    }
}

/// Ranks all APIs of a saved model for `profile` and prints the top `top_n`.
pub fn cmd_recommend(model_path: &Path, profile: &Profile, top_n: usize, out: &mut dyn Write) -> CliResult<Vec<(String, f64)>> {
    if top_n == 0 {
        return Err(CliError::usage("top-n must be positive"));
    }
    let model = RankingModel::load(model_path)?;
    let pipeline = model.text.pipeline()?;
    let text = if model.text.include_project_name && !profile.name.is_empty() {
        format!("{} {}", profile.name, profile.description)
    } else {
        profile.description.clone()
    };
    let bag: TokenBag = pipeline.build_document(&text, &profile.keywords);
    let query = model.space.query(profile.id.clone(), &bag, &profile.keywords);
    let list = model.rank(&query)?;
    let mut shown = Vec::new();
    writeln!(out, "{:>4}  {:<24} {:<32} {:>10}", "rank", "api", "name", "score").map_err(out_err)?;
    for (r, (a, score)) in list.top(top_n).enumerate() {
        let api = &model.space.apis[a];
        writeln!(out, "{:>4}  {:<24} {:<32} {:>10.6}", r + 1, api.id, api.name, score).map_err(out_err)?;
        shown.push((api.id.clone(), score));
    }
    Ok(shown)
}

/// What `evaluate` should compute besides the learned model's CV run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EvaluateOptions {
    pub baselines: bool,
    /// Training fractions for the sweep; empty means no sweep.
    pub sweep: Vec<f64>,
    pub csv: bool,
    pub out_dir: PathBuf,
}

pub const DEFAULT_SWEEP: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

#[derive(Debug)]
pub struct EvaluateOutput {
    pub report: EvalReport,
    pub sweep: Option<SweepReport>,
}

/// Cross-validation (plus optional baselines and sweep). Writes
/// `report.json`, `report.txt` and `timings.json` into the output
/// directory, and `report.csv`, `sweep.json`, `sweep.txt` when asked.
/// Everything except `timings.json` is reproducible for a fixed seed.
pub fn cmd_evaluate(cfg: &RunConfig, opts: &EvaluateOptions, out: &mut dyn Write) -> CliResult<EvaluateOutput> {
    cfg.validate()?;
    let corpus = load_corpus(&cfg.corpus)?;
    let mut methods = vec![PAIRWISE.to_string()];
    if opts.baselines {
        methods.extend([POPREC.to_string(), EXEMPLAR.to_string()]);
    }
    let eval_cfg = EvalConfig {
        features: cfg.feature_config()?,
        ranker: cfg.ranker_config(),
        text: cfg.text_config()?,
        folds: cfg.folds,
        cutoffs: vec![5, 10],
        methods,
    };
    let registry = recommenders();
    let report = eval::run_cv(&corpus, &eval_cfg, &registry)?;
    let sweep = if opts.sweep.is_empty() {
        None
    } else {
        let single = EvalConfig {
            methods: vec![PAIRWISE.to_string()],
            ..eval_cfg.clone()
        };
        Some(eval::training_size_sweep(&corpus, &opts.sweep, &single, &registry)?)
    };

    fs::create_dir_all(&opts.out_dir).map_err(|e| io_err(&opts.out_dir, e))?;
    let write = |name: &str, contents: String| -> CliResult<()> {
        let path = opts.out_dir.join(name);
        fs::write(&path, contents).map_err(|e| io_err(&path, e))
    };
    let mut text = format!(
        "{}-fold cross-validation: {} APIs, {} projects, seed {}\n\n{}",
        eval_cfg.folds,
        report.n_apis,
        report.n_projects,
        cfg.seed,
        eval::render_table(&report)
    );
    let weights = eval::render_weight_table(&report);
    if !weights.is_empty() {
        text.push('\n');
        text.push_str(&weights);
    }
    write("report.json", pretty(&report)?)?;
    write("report.txt", text.clone())?;
    write("timings.json", pretty(&report.timings_json())?)?;
    if opts.csv {
        write("report.csv", eval::report_csv(&report))?;
    }
    out.write_all(text.as_bytes()).map_err(out_err)?;
    if let Some(s) = &sweep {
        let table = format!("\nTraining-size sweep ({} test projects)\n{}", s.n_test, eval::render_sweep_table(s));
        write("sweep.json", pretty(s)?)?;
        write("sweep.txt", table.clone())?;
        out.write_all(table.as_bytes()).map_err(out_err)?;
    }
    for m in &report.methods {
        writeln!(
            out,
            "{}: mean training {:.3} s/fold, {:.6} s per recommendation",
            m.method,
            m.mean_train_seconds(),
            m.mean_recommend_seconds()
        )
        .map_err(out_err)?;
    }
    writeln!(out, "reports written to {}", opts.out_dir.display()).map_err(out_err)?;
    Ok(EvaluateOutput { report, sweep })
}

fn pretty<T: serde::Serialize>(v: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| CliError {
        kind: ExitKind::Internal,
        message: e.to_string(),
    })?;
    s.push('\n');
    Ok(s)
}
