//! Cross-validated evaluation of recommenders and the training-size sweep.

mod folds;
pub mod metrics;
mod report;

use std::collections::HashSet;
use std::sync::Arc;
use std::time::Instant;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::features::FeatureConfig;
use crate::ranker::RankerConfig;
use crate::recommend::{RecommenderBuilder, PAIRWISE};
use crate::registry::Registry;
use crate::rng::substream;
use crate::space::{Documents, FittedSpace};
use crate::textproc::TextConfig;

pub use folds::FoldPlan;
pub use metrics::{average_precision, hit_at_n, reciprocal_rank, Cutoff, MetricSuite};
pub use report::{render_sweep_table, render_table, render_weight_table, report_csv};

/// Everything an evaluation run depends on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub features: FeatureConfig,
    pub ranker: RankerConfig,
    pub text: TextConfig,
    pub folds: usize,
    /// N values for Hit@N and MAP@N.
    pub cutoffs: Vec<usize>,
    /// Registry names, evaluated in this order.
    pub methods: Vec<String>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            features: FeatureConfig::default(),
            ranker: RankerConfig::default(),
            text: TextConfig::default(),
            folds: 10,
            cutoffs: vec![5, 10],
            methods: vec![PAIRWISE.to_string()],
        }
    }
}

impl EvalConfig {
    pub fn seed(&self) -> u64 {
        self.features.seed
    }
}

/// Wall-clock timings of one method on one fold.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FoldTiming {
    pub train_seconds: f64,
    pub recommend_seconds_per_project: f64,
}

/// One method's results on one train/test split.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitOutcome {
    pub method: String,
    pub metrics: MetricSuite,
    pub weights: Option<Vec<f64>>,
    pub timing: FoldTiming,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodReport {
    pub method: String,
    pub folds: Vec<MetricSuite>,
    pub mean: MetricSuite,
    /// Per-fold learned weights, for methods that learn any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_weights: Option<Vec<f64>>,
    /// Wall-clock data; not part of the serialized report so that report
    /// files are reproducible.
    #[serde(skip)]
    pub timings: Vec<FoldTiming>,
}

impl MethodReport {
    pub fn mean_train_seconds(&self) -> f64 {
        mean(self.timings.iter().map(|t| t.train_seconds))
    }

    pub fn mean_recommend_seconds(&self) -> f64 {
        mean(self.timings.iter().map(|t| t.recommend_seconds_per_project))
    }
}

fn mean(it: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = it.collect();
    if v.is_empty() {
        0.0
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub n_apis: usize,
    pub n_projects: usize,
    pub config: EvalConfig,
    pub feature_names: Vec<String>,
    pub methods: Vec<MethodReport>,
}

impl EvalReport {
    pub fn method(&self, name: &str) -> Option<&MethodReport> {
        self.methods.iter().find(|m| m.method == name)
    }

    /// Timings as JSON, kept apart from the reproducible report.
    pub fn timings_json(&self) -> serde_json::Value {
        serde_json::Value::Object(
            self.methods
                .iter()
                .map(|m| {
                    (
                        m.method.clone(),
                        serde_json::json!({
                            "folds": m.timings,
                            "mean_train_seconds": m.mean_train_seconds(),
                            "mean_recommend_seconds_per_project": m.mean_recommend_seconds(),
                        }),
                    )
                })
                .collect(),
        )
    }
}

/// Ground-truth API positions of each project.
fn truth_sets(corpus: &Corpus) -> Vec<HashSet<usize>> {
    corpus
        .usage_positions()
        .into_iter()
        .map(|u| u.into_iter().collect())
        .collect()
}

/// Shared per-corpus inputs of all splits.
pub struct EvalContext<'a> {
    pub corpus: &'a Corpus,
    pub docs: Documents,
    truth: Vec<HashSet<usize>>,
}

impl<'a> EvalContext<'a> {
    pub fn new(corpus: &'a Corpus, text: &TextConfig) -> Result<Self> {
        let pipeline = text.pipeline()?;
        Ok(Self {
            corpus,
            docs: Documents::build(corpus, &pipeline),
            truth: truth_sets(corpus),
        })
    }

    pub fn truth(&self, project: usize) -> &HashSet<usize> {
        &self.truth[project]
    }

    /// Fits a space on `training`, builds each method, and scores it on
    /// `test`.
    pub fn evaluate_split(
        &self,
        training: &[usize],
        test: &[usize],
        config: &EvalConfig,
        registry: &Registry<dyn RecommenderBuilder>,
    ) -> Result<Vec<SplitOutcome>> {
        let space = Arc::new(FittedSpace::fit(
            self.corpus,
            &self.docs,
            training,
            config.features.clone(),
        )?);
        let queries: Vec<_> = test
            .iter()
            .map(|&p| {
                let project = &self.corpus.projects[p];
                space.query(project.id.clone(), &self.docs.projects[p], &project.keywords)
            })
            .collect();

        let mut out = Vec::with_capacity(config.methods.len());
        for name in &config.methods {
            let builder = registry.get(name)?;
            let started = Instant::now();
            let rec = builder.build(space.clone(), &config.ranker, &config.text)?;
            let train_seconds = started.elapsed().as_secs_f64();

            let per_project: Vec<(MetricSuite, f64)> = queries
                .par_iter()
                .zip(test.par_iter())
                .map(|(q, &p)| -> Result<(MetricSuite, f64)> {
                    let t = Instant::now();
                    let list = rec.rank(q)?;
                    let secs = t.elapsed().as_secs_f64();
                    Ok((MetricSuite::of_list(list.order(), self.truth(p), &config.cutoffs), secs))
                })
                .collect::<Result<_>>()?;
            let metrics = MetricSuite::mean(per_project.iter().map(|(m, _)| m));
            let recommend = mean(per_project.iter().map(|(_, s)| *s));
            out.push(SplitOutcome {
                method: name.clone(),
                metrics,
                weights: rec.weights().map(<[f64]>::to_vec),
                timing: FoldTiming {
                    train_seconds,
                    recommend_seconds_per_project: recommend,
                },
            });
        }
        Ok(out)
    }
}

fn check_methods(config: &EvalConfig, registry: &Registry<dyn RecommenderBuilder>) -> Result<()> {
    if config.methods.is_empty() {
        return Err(Error::config("no recommenders selected"));
    }
    for m in &config.methods {
        registry.get(m)?;
    }
    if config.cutoffs.is_empty() || config.cutoffs.contains(&0) {
        return Err(Error::config("cutoffs must be non-empty and positive"));
    }
    Ok(())
}

/// k-fold cross-validation: each fold fits its own vocabulary, neighbor
/// index and popularity counts on the remaining folds, trains, and ranks
/// every API for each held-out project.
pub fn run_cv(corpus: &Corpus, config: &EvalConfig, registry: &Registry<dyn RecommenderBuilder>) -> Result<EvalReport> {
    check_methods(config, registry)?;
    let plan = FoldPlan::new(corpus.projects.len(), config.folds, config.seed())?;
    let ctx = EvalContext::new(corpus, &config.text)?;

    let mut per_method: Vec<Vec<SplitOutcome>> = vec![Vec::new(); config.methods.len()];
    for fold in 0..plan.len() {
        let outcomes = ctx.evaluate_split(&plan.training(fold), plan.test(fold), config, registry)?;
        log::info!("fold {}/{} done", fold + 1, plan.len());
        for (slot, o) in per_method.iter_mut().zip(outcomes) {
            slot.push(o);
        }
    }

    let methods = config
        .methods
        .iter()
        .zip(per_method)
        .map(|(name, outcomes)| {
            let folds: Vec<MetricSuite> = outcomes.iter().map(|o| o.metrics.clone()).collect();
            let weights: Option<Vec<Vec<f64>>> = outcomes.iter().map(|o| o.weights.clone()).collect();
            let mean_weights = weights.as_ref().map(|w| {
                let dim = w[0].len();
                (0..dim).map(|j| w.iter().map(|f| f[j]).sum::<f64>() / w.len() as f64).collect()
            });
            MethodReport {
                method: name.clone(),
                mean: MetricSuite::mean(&folds),
                folds,
                weights,
                mean_weights,
                timings: outcomes.iter().map(|o| o.timing).collect(),
            }
        })
        .collect();

    Ok(EvalReport {
        n_apis: corpus.apis.len(),
        n_projects: corpus.projects.len(),
        feature_names: config.features.feature_descriptions(),
        config: config.clone(),
        methods,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub fraction: f64,
    pub n_train: usize,
    pub metrics: MetricSuite,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub method: String,
    pub n_test: usize,
    pub rows: Vec<SweepRow>,
}

/// Trains on growing, nested subsets of fold 0's training projects and
/// evaluates on fold 0. Only the first configured method is swept.
pub fn training_size_sweep(
    corpus: &Corpus,
    fractions: &[f64],
    config: &EvalConfig,
    registry: &Registry<dyn RecommenderBuilder>,
) -> Result<SweepReport> {
    check_methods(config, registry)?;
    if let Some(f) = fractions.iter().find(|f| !(**f > 0.0 && **f <= 1.0)) {
        return Err(Error::config(format!("training fraction {f} outside (0, 1]")));
    }
    let plan = FoldPlan::new(corpus.projects.len(), config.folds, config.seed())?;
    let ctx = EvalContext::new(corpus, &config.text)?;
    let test = plan.test(0);
    let subsets = nested_subsets(&plan.training(0), fractions, config.seed());

    let single = EvalConfig {
        methods: vec![config.methods[0].clone()],
        ..config.clone()
    };
    let mut rows = Vec::with_capacity(fractions.len());
    for (&fraction, subset) in fractions.iter().zip(&subsets) {
        let outcome = ctx.evaluate_split(subset, test, &single, registry)?;
        rows.push(SweepRow {
            fraction,
            n_train: subset.len(),
            metrics: outcome.into_iter().next().expect("one method").metrics,
        });
    }
    Ok(SweepReport {
        method: single.methods[0].clone(),
        n_test: test.len(),
        rows,
    })
}

/// Prefixes of one seeded permutation of `pool`, one per fraction (rounded,
/// at least one element), each returned sorted. A smaller fraction's subset
/// is contained in every larger one's.
pub fn nested_subsets(pool: &[usize], fractions: &[f64], seed: u64) -> Vec<Vec<usize>> {
    let mut order = pool.to_vec();
    order.shuffle(&mut substream(seed, "sweep", ""));
    fractions
        .iter()
        .map(|f| {
            let n = ((f * order.len() as f64).round() as usize).clamp(1, order.len().max(1));
            let mut s = order[..n.min(order.len())].to_vec();
            s.sort_unstable();
            s
        })
        .collect()
}
