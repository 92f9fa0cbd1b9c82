//! Project–API interaction features.
//!
//! For a query project the feature row of API `a` is
//!
//! * one CF score per `k` in the grid over text-similar neighbors,
//! * one CF score per `k` over keyword-similar neighbors,
//! * text cosine between project and API,
//! * keyword overlap between project and API,
//!
//! where a CF score is the fraction of the `k` nearest training projects
//! that use `a`. With the default grid `{5, 10, 15, 20, 25}` that is 12
//! features.

use std::collections::BTreeSet;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{order_by_score, substream};
use crate::vsm::{cosine, SparseVector};

pub const DEFAULT_K_GRID: [usize; 5] = [5, 10, 15, 20, 25];

/// Overlap of two keyword sets normalized by the geometric mean of their
/// sizes; 0 if either is empty.
pub fn keyword_similarity(a: &BTreeSet<String>, b: &BTreeSet<String>) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let common = a.intersection(b).count() as f64;
    let denom = ((a.len() * b.len()) as f64).sqrt();
    (common / denom).min(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    Text,
    Keyword,
}

impl Channel {
    fn label(self) -> &'static str {
        match self {
            Channel::Text => "neighbors-text",
            Channel::Keyword => "neighbors-keyword",
        }
    }
}

/// The query side: a project's tf-idf vector and keywords.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ProjectQuery {
    pub id: String,
    pub text: SparseVector,
    pub keywords: BTreeSet<String>,
}

/// One training project in the neighbor index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeighborEntry {
    pub id: String,
    pub text: SparseVector,
    pub keywords: BTreeSet<String>,
    /// Positions of the used APIs in the API table.
    pub used_apis: Vec<usize>,
}

impl NeighborEntry {
    pub fn uses(&self, api: usize) -> bool {
        self.used_apis.contains(&api)
    }
}

/// Training-fold projects with their usage rows.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct NeighborIndex {
    entries: Vec<NeighborEntry>,
}

impl NeighborIndex {
    pub fn new(entries: Vec<NeighborEntry>) -> Self {
        Self { entries }
    }

    pub fn entries(&self) -> &[NeighborEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.entries.iter().any(|e| e.id == id)
    }

    /// Usage count of each API over the indexed projects.
    pub fn usage_counts(&self, n_apis: usize) -> Vec<usize> {
        let mut counts = vec![0; n_apis];
        for e in &self.entries {
            for &a in &e.used_apis {
                counts[a] += 1;
            }
        }
        counts
    }

    fn similarity(&self, query: &ProjectQuery, entry: &NeighborEntry, channel: Channel) -> f64 {
        match channel {
            Channel::Text => cosine(&query.text, &entry.text),
            Channel::Keyword => keyword_similarity(&query.keywords, &entry.keywords),
        }
    }

    /// The `k` most similar indexed projects (excluding one with the query's
    /// own id), as positions into `entries()`. Ties are broken by a seeded
    /// shuffle keyed on the query id, so for a fixed query the list for `k`
    /// is a prefix of the list for any larger `k`.
    pub fn top_k(&self, query: &ProjectQuery, k: usize, channel: Channel, seed: u64) -> Result<Vec<usize>> {
        let candidates: Vec<usize> = (0..self.entries.len())
            .filter(|&i| self.entries[i].id != query.id)
            .collect();
        if k == 0 {
            return Err(Error::config("neighbor count k must be positive"));
        }
        if k > candidates.len() {
            return Err(Error::config(format!(
                "k = {k} exceeds the {} projects available as neighbors of '{}'",
                candidates.len(),
                query.id
            )));
        }
        let sims: Vec<f64> = candidates
            .iter()
            .map(|&i| self.similarity(query, &self.entries[i], channel))
            .collect();
        let mut rng = substream(seed, channel.label(), &query.id);
        let order = order_by_score(&sims, &mut rng);
        Ok(order.into_iter().take(k).map(|o| candidates[o]).collect())
    }

    /// Fraction of the `k` nearest neighbors that use `api`.
    pub fn cf_score(&self, query: &ProjectQuery, api: usize, k: usize, channel: Channel, seed: u64) -> Result<f64> {
        let top = self.top_k(query, k, channel, seed)?;
        let hits = top.iter().filter(|&&i| self.entries[i].uses(api)).count();
        Ok(hits as f64 / k as f64)
    }
}

/// Neighbor grid and the seed used for neighbor tie breaking.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureConfig {
    pub k_grid: Vec<usize>,
    pub seed: u64,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            k_grid: DEFAULT_K_GRID.to_vec(),
            seed: 42,
        }
    }
}

impl FeatureConfig {
    pub fn new(k_grid: Vec<usize>, seed: u64) -> Result<Self> {
        let cfg = Self { k_grid, seed };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k_grid.is_empty() {
            return Err(Error::config("k-grid is empty"));
        }
        if self.k_grid[0] == 0 || self.k_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::config(format!(
                "k-grid must be positive and strictly increasing, got {:?}",
                self.k_grid
            )));
        }
        Ok(())
    }

    /// `2·|grid| + 2`.
    pub fn dim(&self) -> usize {
        2 * self.k_grid.len() + 2
    }

    pub fn max_k(&self) -> usize {
        *self.k_grid.last().expect("validated non-empty grid")
    }

    pub fn text_sim_feature(&self) -> usize {
        2 * self.k_grid.len()
    }

    pub fn keyword_sim_feature(&self) -> usize {
        2 * self.k_grid.len() + 1
    }

    /// `x1`, `x2`, … labels.
    pub fn feature_names(&self) -> Vec<String> {
        (1..=self.dim()).map(|j| format!("x{j}")).collect()
    }

    /// Human-readable description of each feature.
    pub fn feature_descriptions(&self) -> Vec<String> {
        let mut d = Vec::with_capacity(self.dim());
        for k in &self.k_grid {
            d.push(format!("CF text, k={k}"));
        }
        for k in &self.k_grid {
            d.push(format!("CF keyword, k={k}"));
        }
        d.push("Sim text".into());
        d.push("Sim keyword".into());
        d
    }
}

/// Row-major `n_apis × dim` feature block for one query project.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    dim: usize,
    values: Vec<f64>,
}

impl FeatureMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_rows(&self) -> usize {
        self.values.len() / self.dim
    }

    pub fn row(&self, api: usize) -> &[f64] {
        &self.values[api * self.dim..(api + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.dim)
    }
}

/// Features of a single pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeatureVector(pub Vec<f64>);

/// Per-API data needed on the API side of the features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApiEntry {
    pub id: String,
    pub name: String,
    pub text: SparseVector,
    pub keywords: BTreeSet<String>,
}

/// Computes feature rows against a fixed neighbor index and API table.
#[derive(Debug, Clone, Copy)]
pub struct FeatureExtractor<'a> {
    pub config: &'a FeatureConfig,
    pub index: &'a NeighborIndex,
    pub apis: &'a [ApiEntry],
}

/// A query's neighbor lists, `max_k` long, computed once per query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Neighborhood {
    pub text: Vec<usize>,
    pub keyword: Vec<usize>,
}

impl<'a> FeatureExtractor<'a> {
    pub fn neighborhood(&self, query: &ProjectQuery) -> Result<Neighborhood> {
        let k = self.config.max_k();
        Ok(Neighborhood {
            text: self.index.top_k(query, k, Channel::Text, self.config.seed)?,
            keyword: self.index.top_k(query, k, Channel::Keyword, self.config.seed)?,
        })
    }

    /// Feature rows for every API.
    pub fn matrix(&self, query: &ProjectQuery) -> Result<FeatureMatrix> {
        let hood = self.neighborhood(query)?;
        let dim = self.config.dim();
        let grid = &self.config.k_grid;
        let mut values = vec![0.0; self.apis.len() * dim];

        for (offset, list) in [(0, &hood.text), (grid.len(), &hood.keyword)] {
            for (g, &k) in grid.iter().enumerate() {
                let col = offset + g;
                for &n in &list[..k] {
                    for &a in &self.index.entries()[n].used_apis {
                        values[a * dim + col] += 1.0;
                    }
                }
                for a in 0..self.apis.len() {
                    values[a * dim + col] /= k as f64;
                }
            }
        }
        let text_col = self.config.text_sim_feature();
        let key_col = self.config.keyword_sim_feature();
        for (a, api) in self.apis.iter().enumerate() {
            values[a * dim + text_col] = cosine(&query.text, &api.text);
            values[a * dim + key_col] = keyword_similarity(&query.keywords, &api.keywords);
        }
        Ok(FeatureMatrix { dim, values })
    }

    /// Features of one `(query, api)` pair.
    pub fn extract(&self, query: &ProjectQuery, api: usize) -> Result<FeatureVector> {
        let seed = self.config.seed;
        let mut x = Vec::with_capacity(self.config.dim());
        for channel in [Channel::Text, Channel::Keyword] {
            for &k in &self.config.k_grid {
                x.push(self.index.cf_score(query, api, k, channel, seed)?);
            }
        }
        let entry = &self.apis[api];
        x.push(cosine(&query.text, &entry.text));
        x.push(keyword_similarity(&query.keywords, &entry.keywords));
        Ok(FeatureVector(x))
    }
}

/// Writes `project_id,api_id,x1..xJ,label` rows.
pub fn write_feature_csv<W: Write>(
    mut out: W,
    config: &FeatureConfig,
    rows: impl IntoIterator<Item = (String, String, Vec<f64>, bool)>,
) -> std::io::Result<()> {
    write!(out, "project_id,api_id")?;
    for name in config.feature_names() {
        write!(out, ",{name}")?;
    }
    writeln!(out, ",label")?;
    for (p, a, x, label) in rows {
        write!(out, "{},{}", csv_field(&p), csv_field(&a))?;
        for v in x {
            write!(out, ",{v}")?;
        }
        writeln!(out, ",{}", u8::from(label))?;
    }
    Ok(())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
