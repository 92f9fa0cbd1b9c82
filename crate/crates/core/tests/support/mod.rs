//! Independent reference implementations shared by the integration tests
//! and the acceptance suite.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashSet};

use apirank_core::corpus::Corpus;
use apirank_core::features::{FeatureConfig, ProjectQuery};
use apirank_core::ranker::{PairwiseObjective, TrainingSet};
use apirank_core::rng::substream;
use apirank_core::space::{Documents, FittedSpace};
use apirank_core::textproc::{TextConfig, TokenBag};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

// ---------------------------------------------------------------- optimizer

/// Random difference rows built from feature vectors in [0, 1).
pub fn random_set(rng: &mut ChaCha8Rng, dim: usize, rows: usize) -> TrainingSet {
    let pairs: Vec<(Vec<f64>, Vec<f64>)> = (0..rows)
        .map(|_| {
            let pos = (0..dim).map(|_| rng.gen_range(0.0..1.0)).collect();
            let neg = (0..dim).map(|_| rng.gen_range(0.0..1.0)).collect();
            (pos, neg)
        })
        .collect();
    TrainingSet::from_pairs(dim, &pairs)
}

pub fn random_vec(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> Vec<f64> {
    (0..dim).map(|_| rng.gen_range(-scale..scale)).collect()
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// ‖g − g_fd‖ / ‖g‖ with central differences of step 1e-6.
pub fn gradient_rel_error(set: &TrainingSet, lambda: f64, theta: &[f64]) -> f64 {
    let obj = PairwiseObjective::new(set, lambda);
    let g = obj.loss_and_gradient(theta).gradient;
    let h = 1e-6;
    let diff: Vec<f64> = (0..theta.len())
        .map(|j| {
            let mut up = theta.to_vec();
            let mut down = theta.to_vec();
            up[j] += h;
            down[j] -= h;
            g[j] - (obj.value(&up) - obj.value(&down)) / (2.0 * h)
        })
        .collect();
    norm(&diff) / norm(&g).max(1e-12)
}

/// Max |Hv − H_dense v| with H = 2/|D| Σ_active Δx Δxᵀ + λI materialized.
pub fn hv_max_error(set: &TrainingSet, lambda: f64, theta: &[f64], v: &[f64]) -> f64 {
    let dim = set.dim();
    let mut h = vec![vec![0.0; dim]; dim];
    for i in 0..set.len() {
        let row = set.row(i);
        let s: f64 = row.iter().zip(theta).map(|(x, t)| x * t).sum();
        if 1.0 - s > 0.0 {
            for a in 0..dim {
                for b in 0..dim {
                    h[a][b] += 2.0 * row[a] * row[b] / set.len() as f64;
                }
            }
        }
    }
    for (a, r) in h.iter_mut().enumerate() {
        r[a] += lambda;
    }
    let got = PairwiseObjective::new(set, lambda).hessian_vector_product(theta, v);
    h.iter()
        .zip(&got)
        .map(|(r, g)| (r.iter().zip(v).map(|(x, y)| x * y).sum::<f64>() - g).abs())
        .fold(0.0, f64::max)
}

/// Straight-line regularized objective.
pub fn naive_objective(set: &TrainingSet, lambda: f64, theta: &[f64]) -> f64 {
    let mut e = 0.0;
    for i in 0..set.len() {
        let s: f64 = set.row(i).iter().zip(theta).map(|(x, t)| x * t).sum();
        let m = (1.0 - s).max(0.0);
        e += m * m;
    }
    e / set.len() as f64 + 0.5 * lambda * theta.iter().map(|t| t * t).sum::<f64>()
}

/// Pairs whose positive side dominates on feature 0 by at least 0.4.
pub fn separable_set(rng: &mut ChaCha8Rng, dim: usize, rows: usize) -> TrainingSet {
    let pairs: Vec<(Vec<f64>, Vec<f64>)> = (0..rows)
        .map(|_| {
            let mut pos: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.0..0.1)).collect();
            let neg: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.0..0.1)).collect();
            pos[0] = rng.gen_range(0.5..1.0);
            (pos, neg)
        })
        .collect();
    TrainingSet::from_pairs(dim, &pairs)
}

// ------------------------------------------------------------------ metrics

/// Brute force: re-scans the prefix at every relevant position.
pub fn oracle_ap(ranked: &[usize], truth: &HashSet<usize>, depth: usize) -> f64 {
    let depth = depth.min(ranked.len());
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..depth {
        if truth.contains(&ranked[i]) {
            let correct = (0..=i).filter(|&j| truth.contains(&ranked[j])).count();
            num += correct as f64 / (i + 1) as f64;
            den += 1.0;
        }
    }
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

pub fn oracle_hit(ranked: &[usize], truth: &HashSet<usize>, n: usize) -> f64 {
    let mut hit = 0.0;
    for (i, a) in ranked.iter().enumerate() {
        if i < n && truth.contains(a) {
            hit = 1.0;
        }
    }
    hit
}

pub fn oracle_rr(ranked: &[usize], truth: &HashSet<usize>) -> f64 {
    match ranked.iter().position(|a| truth.contains(a)) {
        Some(i) => 1.0 / (i as f64 + 1.0),
        None => 0.0,
    }
}

// ----------------------------------------------------------------- features

type Vector = BTreeMap<String, f64>;

fn tfidf(df: &BTreeMap<String, u32>, n_docs: u32, bag: &TokenBag) -> Vector {
    let mut v = Vector::new();
    for (t, tf) in bag.iter() {
        if let Some(&d) = df.get(t) {
            let w = f64::from(tf) * (f64::from(n_docs) / f64::from(d)).ln();
            if w > 0.0 {
                v.insert(t.to_string(), w);
            }
        }
    }
    v
}

fn cosine(a: &Vector, b: &Vector) -> f64 {
    let na = a.values().map(|w| w * w).sum::<f64>().sqrt();
    let nb = b.values().map(|w| w * w).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    let mut dot = 0.0;
    for (t, w) in a {
        if let Some(u) = b.get(t) {
            dot += w * u;
        }
    }
    (dot / (na * nb)).clamp(0.0, 1.0)
}

fn keyword_sim(a: &BTreeSet<String>, b: &BTreeSet<String>) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let common = a.iter().filter(|k| b.contains(*k)).count() as f64;
    (common / ((a.len() * b.len()) as f64).sqrt()).min(1.0)
}

struct Neighbor {
    id: String,
    text: Vector,
    keywords: BTreeSet<String>,
    used: BTreeSet<usize>,
}

/// Feature rows recomputed from token bags with no shared code beyond text
/// preprocessing and the documented tie stream.
pub struct FeatureOracle<'a> {
    corpus: &'a Corpus,
    docs: &'a Documents,
    config: FeatureConfig,
    df: BTreeMap<String, u32>,
    n_docs: u32,
    neighbors: Vec<Neighbor>,
    apis: Vec<(Vector, BTreeSet<String>)>,
}

impl<'a> FeatureOracle<'a> {
    pub fn new(corpus: &'a Corpus, docs: &'a Documents, training: &[usize], config: FeatureConfig) -> Self {
        let mut df = BTreeMap::new();
        let mut n_docs = 0;
        for d in docs.apis.iter().chain(training.iter().map(|&p| &docs.projects[p])) {
            n_docs += 1;
            for (t, _) in d.iter() {
                *df.entry(t.to_string()).or_insert(0) += 1;
            }
        }
        let usage = corpus.usage_positions();
        let neighbors = training
            .iter()
            .map(|&p| Neighbor {
                id: corpus.projects[p].id.clone(),
                text: tfidf(&df, n_docs, &docs.projects[p]),
                keywords: corpus.projects[p].keywords.clone(),
                used: usage[p].iter().copied().collect(),
            })
            .collect();
        let apis = corpus
            .apis
            .iter()
            .zip(&docs.apis)
            .map(|(a, bag)| (tfidf(&df, n_docs, bag), a.keywords.clone()))
            .collect();
        Self {
            corpus,
            docs,
            config,
            df,
            n_docs,
            neighbors,
            apis,
        }
    }

    /// One random key per candidate, drawn in candidate order, breaks ties.
    fn top_k(&self, query_id: &str, sims: impl Fn(&Neighbor) -> f64, label: &str, k: usize) -> Vec<usize> {
        let candidates: Vec<usize> = (0..self.neighbors.len()).filter(|&i| self.neighbors[i].id != query_id).collect();
        let mut rng = substream(self.config.seed, label, query_id);
        let mut scored: Vec<(f64, u64, usize)> = candidates
            .iter()
            .enumerate()
            .map(|(pos, &i)| (sims(&self.neighbors[i]), rng.gen::<u64>(), pos))
            .collect();
        scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        scored.into_iter().take(k).map(|s| candidates[s.2]).collect()
    }

    /// Feature rows of every API for corpus project `p`.
    pub fn rows(&self, p: usize) -> Vec<Vec<f64>> {
        let project = &self.corpus.projects[p];
        let text = tfidf(&self.df, self.n_docs, &self.docs.projects[p]);
        let grid = &self.config.k_grid;
        let kmax = *grid.last().unwrap();
        let by_text = self.top_k(&project.id, |n| cosine(&text, &n.text), "neighbors-text", kmax);
        let by_key = self.top_k(&project.id, |n| keyword_sim(&project.keywords, &n.keywords), "neighbors-keyword", kmax);
        (0..self.apis.len())
            .map(|a| {
                let mut x = Vec::new();
                for list in [&by_text, &by_key] {
                    for &k in grid {
                        let hits = list[..k].iter().filter(|&&n| self.neighbors[n].used.contains(&a)).count();
                        x.push(hits as f64 / k as f64);
                    }
                }
                x.push(cosine(&text, &self.apis[a].0));
                x.push(keyword_sim(&project.keywords, &self.apis[a].1));
                x
            })
            .collect()
    }
}

/// Library query for corpus project `p` (a training project's own entry
/// if it is indexed, so it is excluded from its neighbors).
pub fn query_for(space: &FittedSpace, corpus: &Corpus, docs: &Documents, p: usize) -> ProjectQuery {
    let pr = &corpus.projects[p];
    space.query(pr.id.clone(), &docs.projects[p], &pr.keywords)
}

/// Compares every feature of `projects` against the oracle. Returns
/// `(values compared, values that differ in any bit)`.
pub fn feature_mismatches(corpus: &Corpus, training: &[usize], projects: &[usize], config: &FeatureConfig) -> (usize, usize) {
    let docs = Documents::build(corpus, &TextConfig::default().pipeline().unwrap());
    let space = FittedSpace::fit(corpus, &docs, training, config.clone()).unwrap();
    let oracle = FeatureOracle::new(corpus, &docs, training, config.clone());
    let fx = space.extractor();
    let (mut compared, mut bad) = (0, 0);
    for &p in projects {
        let m = fx.matrix(&query_for(&space, corpus, &docs, p)).unwrap();
        for (a, row) in oracle.rows(p).iter().enumerate() {
            for (x, y) in m.row(a).iter().zip(row) {
                compared += 1;
                if x.to_bits() != y.to_bits() {
                    bad += 1;
                }
            }
        }
    }
    (compared, bad)
}

/// Rewrites the held-out projects' usage and text, refits on the same
/// training projects, and reports whether any space component or feature
/// value changed.
pub fn leakage_detected(corpus: &Corpus, training: &[usize], test: &[usize], config: &FeatureConfig) -> bool {
    let pipeline = TextConfig::default().pipeline().unwrap();
    let docs = Documents::build(corpus, &pipeline);
    let base = FittedSpace::fit(corpus, &docs, training, config.clone()).unwrap();

    let mut perturbed = corpus.clone();
    let mut rng = substream(1, "perturb", "");
    for &p in test {
        let project = &mut perturbed.projects[p];
        project.used_apis = (0..5)
            .map(|_| corpus.apis[rng.gen_range(0..corpus.apis.len())].id.clone())
            .collect();
        project.long_description = "entirely different words about zebras and volcanoes".into();
    }
    let pdocs = Documents::build(&perturbed, &pipeline);
    let moved = FittedSpace::fit(&perturbed, &pdocs, training, config.clone()).unwrap();
    if base != moved {
        return true;
    }
    // Same queries (original text) against both spaces.
    training.iter().chain(test).any(|&p| {
        let q = query_for(&base, corpus, &docs, p);
        base.extractor().matrix(&q).unwrap() != moved.extractor().matrix(&q).unwrap()
    })
}
