//! Personalized pairwise ranking model.
//!
//! Each training triple `(p, a, a')` pairs a project with an API it uses and
//! one it does not. The model scores `f(p, a) = θ·x(p, a)` and is trained by
//! minimizing the L2-regularized squared hinge on `f(p, a) − f(p, a')` with a
//! truncated Newton method.

pub mod newton;
mod objective;
mod persist;

use std::sync::Arc;

use rand::seq::index::sample;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{Error, Result};
use crate::features::{FeatureVector, NeighborEntry, ProjectQuery};
use crate::rng::{order_by_score, substream};
use crate::space::FittedSpace;
use crate::textproc::TextConfig;

pub use newton::{IterationRecord, NewtonOptions, Termination};
pub use objective::{ActiveSet, Evaluation, PairwiseObjective};
pub use persist::{ModelFile, MODEL_FORMAT_VERSION};

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("training set is empty: no project has both a used and an unused API")]
    EmptyTrainingSet,
    #[error("regularization parameter must be positive and finite, got {0}")]
    InvalidLambda(f64),
    #[error("non-finite objective {objective} at outer iteration {iteration}; {detail}")]
    NonFinite {
        iteration: usize,
        objective: f64,
        detail: String,
    },
}

/// `(project, used API, unused API)`; positions into the neighbor index and
/// the API table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Triple {
    pub project: usize,
    pub positive: usize,
    pub negative: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NegativeSampling {
    /// Every unused API for every used one.
    All,
    /// This many unused APIs, drawn without replacement, per used API.
    PerPositive(usize),
}

impl std::str::FromStr for NegativeSampling {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("all") {
            return Ok(NegativeSampling::All);
        }
        match s.parse::<usize>() {
            Ok(n) if n > 0 => Ok(NegativeSampling::PerPositive(n)),
            _ => Err(format!("expected ALL or a positive integer, got '{s}'")),
        }
    }
}

impl std::fmt::Display for NegativeSampling {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NegativeSampling::All => write!(f, "ALL"),
            NegativeSampling::PerPositive(n) => write!(f, "{n}"),
        }
    }
}

/// Builds triples for the indexed projects. Projects that use every API
/// have no negatives and are skipped; their ids are returned.
pub fn build_triples(
    projects: &[NeighborEntry],
    n_apis: usize,
    sampling: NegativeSampling,
    seed: u64,
) -> (Vec<Triple>, Vec<String>) {
    let mut triples = Vec::new();
    let mut skipped = Vec::new();
    for (p, entry) in projects.iter().enumerate() {
        let mut used = vec![false; n_apis];
        for &a in &entry.used_apis {
            used[a] = true;
        }
        let negatives: Vec<usize> = (0..n_apis).filter(|&a| !used[a]).collect();
        if negatives.is_empty() {
            log::warn!("project '{}' uses every API; no negatives, skipped", entry.id);
            skipped.push(entry.id.clone());
            continue;
        }
        let mut positives = entry.used_apis.clone();
        positives.sort_unstable();
        positives.dedup();
        match sampling {
            NegativeSampling::All => {
                for &a in &positives {
                    triples.extend(negatives.iter().map(|&n| Triple {
                        project: p,
                        positive: a,
                        negative: n,
                    }));
                }
            }
            NegativeSampling::PerPositive(rate) => {
                let mut rng = substream(seed, "negatives", &entry.id);
                for &a in &positives {
                    let take = rate.min(negatives.len());
                    let mut picked: Vec<usize> =
                        sample(&mut rng, negatives.len(), take).into_iter().map(|i| negatives[i]).collect();
                    picked.sort_unstable();
                    triples.extend(picked.into_iter().map(|n| Triple {
                        project: p,
                        positive: a,
                        negative: n,
                    }));
                }
            }
        }
    }
    (triples, skipped)
}

/// `Σ_p |A_p| · (|A| − |A_p|)`, the size of the full triple set.
pub fn full_triple_count(projects: &[NeighborEntry], n_apis: usize) -> usize {
    projects
        .iter()
        .map(|e| {
            let k = e.used_apis.len();
            if k >= n_apis {
                0
            } else {
                k * (n_apis - k)
            }
        })
        .sum()
}

/// Pairwise feature differences `Δx = x(p, a) − x(p, a')`, one row per
/// triple.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet {
    dim: usize,
    diffs: Vec<f64>,
    triples: Vec<Triple>,
}

impl TrainingSet {
    pub fn from_rows(dim: usize, diffs: Vec<f64>, triples: Vec<Triple>) -> Self {
        assert_eq!(diffs.len(), dim * triples.len(), "one row per triple");
        Self { dim, diffs, triples }
    }

    /// Builds rows from raw `(positive features, negative features)` pairs.
    pub fn from_pairs(dim: usize, pairs: &[(Vec<f64>, Vec<f64>)]) -> Self {
        let mut diffs = Vec::with_capacity(dim * pairs.len());
        for (pos, neg) in pairs {
            assert_eq!(pos.len(), dim);
            assert_eq!(neg.len(), dim);
            diffs.extend(pos.iter().zip(neg).map(|(a, b)| a - b));
        }
        let triples = (0..pairs.len())
            .map(|i| Triple {
                project: i,
                positive: 0,
                negative: 1,
            })
            .collect();
        Self { dim, diffs, triples }
    }

    /// Computes every indexed project's feature rows (neighbors exclude the
    /// project itself) and materializes the differences for `triples`.
    pub fn from_space(space: &FittedSpace, triples: Vec<Triple>) -> Result<Self> {
        let dim = space.config.dim();
        let fx = space.extractor();
        // triples are grouped by project in ascending order
        let mut groups: Vec<(usize, std::ops::Range<usize>)> = Vec::new();
        let mut start = 0;
        while start < triples.len() {
            let p = triples[start].project;
            let mut end = start;
            while end < triples.len() && triples[end].project == p {
                end += 1;
            }
            groups.push((p, start..end));
            start = end;
        }
        let blocks: Vec<Vec<f64>> = groups
            .par_iter()
            .map(|(p, range)| -> Result<Vec<f64>> {
                let m = fx.matrix(&space.training_query(*p))?;
                let mut block = Vec::with_capacity(range.len() * dim);
                for t in &triples[range.clone()] {
                    let (pos, neg) = (m.row(t.positive), m.row(t.negative));
                    block.extend(pos.iter().zip(neg).map(|(a, b)| a - b));
                }
                Ok(block)
            })
            .collect::<Result<_>>()?;
        let diffs = blocks.concat();
        Ok(Self { dim, diffs, triples })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn diffs(&self) -> &[f64] {
        &self.diffs
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.diffs[i * self.dim..(i + 1) * self.dim]
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    /// Triples whose score difference is not strictly positive under `theta`.
    pub fn ordering_errors(&self, theta: &[f64]) -> usize {
        self.diffs
            .chunks_exact(self.dim)
            .filter(|row| objective::dot(theta, row) <= 0.0)
            .count()
    }
}

/// Learned weights plus the optimizer record.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedWeights {
    pub theta: Vec<f64>,
    pub lambda: f64,
    pub objective: f64,
    pub loss: f64,
    pub trace: Vec<IterationRecord>,
    pub termination: Termination,
}

impl TrainedWeights {
    pub fn iterations(&self) -> usize {
        self.trace.iter().filter(|r| r.step > 0.0).count()
    }
}

/// Minimizes the regularized pairwise loss from `init` (zeros if `None`).
pub fn train(
    set: &TrainingSet,
    lambda: f64,
    opts: &NewtonOptions,
    init: Option<&[f64]>,
) -> std::result::Result<TrainedWeights, TrainError> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(TrainError::InvalidLambda(lambda));
    }
    if set.is_empty() {
        return Err(TrainError::EmptyTrainingSet);
    }
    // max(0, 1 - NaN) silently yields 0, so bad rows must be caught here.
    let bad_rows = set
        .diffs()
        .chunks_exact(set.dim())
        .filter(|r| r.iter().any(|v| !v.is_finite()))
        .count();
    if bad_rows > 0 {
        return Err(TrainError::NonFinite {
            iteration: 0,
            objective: f64::NAN,
            detail: format!("{bad_rows} of {} feature-difference rows contain NaN or infinity", set.len()),
        });
    }
    let obj = PairwiseObjective::new(set, lambda);
    let x0 = init.map(<[f64]>::to_vec).unwrap_or_else(|| vec![0.0; set.dim()]);
    assert_eq!(x0.len(), set.dim(), "initial θ has the wrong dimension");
    let res = newton::minimize(&obj, x0, opts).map_err(|f| match f {
        newton::NewtonFailure::NonFinite { iteration, objective } => TrainError::NonFinite {
            iteration,
            objective,
            detail: "objective or gradient became non-finite".to_string(),
        },
    })?;
    let loss = obj.loss(&res.x);
    Ok(TrainedWeights {
        theta: res.x,
        lambda,
        objective: res.objective,
        loss,
        trace: res.trace,
        termination: res.termination,
    })
}

/// Training parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankerConfig {
    pub lambda: f64,
    pub negatives: NegativeSampling,
    /// With `All`, fall back to `fallback_rate` negatives per positive when
    /// the full triple set would exceed this many rows.
    pub triple_budget: usize,
    pub fallback_rate: usize,
    pub optimizer: NewtonOptions,
}

impl Default for RankerConfig {
    fn default() -> Self {
        Self {
            lambda: 1.0,
            negatives: NegativeSampling::All,
            triple_budget: 2_000_000,
            fallback_rate: 10,
            optimizer: NewtonOptions::default(),
        }
    }
}

impl RankerConfig {
    /// The sampling actually used for `space`.
    pub fn effective_sampling(&self, space: &FittedSpace) -> NegativeSampling {
        match self.negatives {
            NegativeSampling::All => {
                let full = full_triple_count(space.index.entries(), space.n_apis());
                if full > self.triple_budget {
                    log::warn!(
                        "{full} triples exceed the budget of {}; sampling {} negatives per positive",
                        self.triple_budget,
                        self.fallback_rate
                    );
                    NegativeSampling::PerPositive(self.fallback_rate)
                } else {
                    NegativeSampling::All
                }
            }
            other => other,
        }
    }
}

/// Summary stored alongside a trained model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingSummary {
    pub triples: usize,
    pub negatives: NegativeSampling,
    pub objective: f64,
    pub loss: f64,
    pub iterations: usize,
    pub termination: Termination,
}

/// Scores in descending order; ties in random seeded order.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedList {
    order: Vec<usize>,
    scores: Vec<f64>,
}

impl RankedList {
    /// Sorts `scores` (indexed by API position) descending; equal scores are
    /// shuffled by the stream `(seed, "ties", key)`.
    pub fn from_scores(scores: &[f64], seed: u64, key: &str) -> Self {
        Self::from_scores_with_stream(scores, seed, "ties", key)
    }

    pub fn from_scores_with_stream(scores: &[f64], seed: u64, label: &str, key: &str) -> Self {
        let mut rng = substream(seed, label, key);
        let order = order_by_score(scores, &mut rng);
        let sorted = order.iter().map(|&i| scores[i]).collect();
        Self { order, scores: sorted }
    }

    /// API positions, best first.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Scores aligned with [`order`](Self::order).
    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn top(&self, n: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.order.iter().copied().zip(self.scores.iter().copied()).take(n)
    }
}

/// A trained ranking model bound to the space it was trained in.
#[derive(Debug, Clone)]
pub struct RankingModel {
    pub theta: Vec<f64>,
    pub lambda: f64,
    pub space: Arc<FittedSpace>,
    pub text: TextConfig,
    pub summary: Option<TrainingSummary>,
}

impl RankingModel {
    pub fn dim(&self) -> usize {
        self.theta.len()
    }

    /// `Σ θ_j x_j`.
    pub fn score(&self, x: &FeatureVector) -> Result<f64> {
        score_with(&self.theta, &x.0)
    }

    pub fn rank(&self, query: &ProjectQuery) -> Result<RankedList> {
        rank_apis(&self.theta, &self.space, query)
    }

    /// Fits and trains on the projects indexed in `space`.
    pub fn fit(space: Arc<FittedSpace>, cfg: &RankerConfig, text: TextConfig) -> Result<Self> {
        let sampling = cfg.effective_sampling(&space);
        let (triples, _skipped) = build_triples(space.index.entries(), space.n_apis(), sampling, space.seed());
        let set = TrainingSet::from_space(&space, triples)?;
        let w = train(&set, cfg.lambda, &cfg.optimizer, None)?;
        let summary = TrainingSummary {
            triples: set.len(),
            negatives: sampling,
            objective: w.objective,
            loss: w.loss,
            iterations: w.iterations(),
            termination: w.termination,
        };
        Ok(Self {
            theta: w.theta,
            lambda: cfg.lambda,
            space,
            text,
            summary: Some(summary),
        })
    }
}

pub fn score_with(theta: &[f64], x: &[f64]) -> Result<f64> {
    if theta.len() != x.len() {
        return Err(Error::Dimension {
            expected: theta.len(),
            actual: x.len(),
        });
    }
    Ok(objective::dot(theta, x))
}

/// Scores every API for `query` with weights `theta` and sorts descending.
pub fn rank_apis(theta: &[f64], space: &FittedSpace, query: &ProjectQuery) -> Result<RankedList> {
    if theta.len() != space.config.dim() {
        return Err(Error::Dimension {
            expected: space.config.dim(),
            actual: theta.len(),
        });
    }
    let m = space.extractor().matrix(query)?;
    let scores: Vec<f64> = m.rows().map(|row| objective::dot(theta, row)).collect();
    Ok(RankedList::from_scores(&scores, space.seed(), &query.id))
}
