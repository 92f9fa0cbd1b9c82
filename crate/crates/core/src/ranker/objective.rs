//! L2-regularized squared-hinge pairwise loss over feature differences.

use rayon::prelude::*;

use super::newton::SecondOrder;
use super::TrainingSet;

/// Rows per parallel work unit. Partial sums are combined in chunk order,
/// so results are bit-identical regardless of thread count.
const CHUNK_ROWS: usize = 4096;

/// Regularized loss `R = E + λ/2 ‖θ‖²` with
/// `E = 1/|D| Σ max(0, 1 − θ·Δx)²` over the rows `Δx` of a training set.
#[derive(Debug, Clone, Copy)]
pub struct PairwiseObjective<'a> {
    set: &'a TrainingSet,
    lambda: f64,
}

/// Value and gradient at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    /// Regularized objective `R`.
    pub objective: f64,
    /// Unregularized pairwise loss `E`.
    pub loss: f64,
    pub gradient: Vec<f64>,
}

/// Rows with positive margin at a fixed θ. The generalized Hessian of the
/// squared hinge uses only these.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActiveSet {
    rows: Vec<u32>,
}

impl ActiveSet {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

impl<'a> PairwiseObjective<'a> {
    pub fn new(set: &'a TrainingSet, lambda: f64) -> Self {
        Self { set, lambda }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    fn dim(&self) -> usize {
        self.set.dim()
    }

    fn reg(&self, theta: &[f64]) -> f64 {
        0.5 * self.lambda * theta.iter().map(|t| t * t).sum::<f64>()
    }

    /// `E` alone.
    pub fn loss(&self, theta: &[f64]) -> f64 {
        let n = self.set.len();
        let partial: Vec<f64> = self
            .set
            .diffs()
            .par_chunks(CHUNK_ROWS * self.dim())
            .map(|chunk| {
                chunk
                    .chunks_exact(self.dim())
                    .map(|row| {
                        let m = 1.0 - dot(theta, row);
                        if m > 0.0 {
                            m * m
                        } else {
                            0.0
                        }
                    })
                    .sum::<f64>()
            })
            .collect();
        partial.iter().sum::<f64>() / n as f64
    }

    pub fn value(&self, theta: &[f64]) -> f64 {
        self.loss(theta) + self.reg(theta)
    }

    pub fn loss_and_gradient(&self, theta: &[f64]) -> Evaluation {
        let dim = self.dim();
        let n = self.set.len() as f64;
        let partial: Vec<(f64, Vec<f64>)> = self
            .set
            .diffs()
            .par_chunks(CHUNK_ROWS * dim)
            .map(|chunk| {
                let mut loss = 0.0;
                let mut grad = vec![0.0; dim];
                for row in chunk.chunks_exact(dim) {
                    let m = 1.0 - dot(theta, row);
                    if m > 0.0 {
                        loss += m * m;
                        for (g, x) in grad.iter_mut().zip(row) {
                            *g -= m * x;
                        }
                    }
                }
                (loss, grad)
            })
            .collect();

        let mut loss = 0.0;
        let mut grad = vec![0.0; dim];
        for (l, g) in &partial {
            loss += l;
            for (acc, v) in grad.iter_mut().zip(g) {
                *acc += v;
            }
        }
        let loss = loss / n;
        for (g, t) in grad.iter_mut().zip(theta) {
            *g = 2.0 * *g / n + self.lambda * t;
        }
        Evaluation {
            objective: loss + self.reg(theta),
            loss,
            gradient: grad,
        }
    }

    pub fn active_set(&self, theta: &[f64]) -> ActiveSet {
        let dim = self.dim();
        let rows = self
            .set
            .diffs()
            .chunks_exact(dim)
            .enumerate()
            .filter(|(_, row)| 1.0 - dot(theta, row) > 0.0)
            .map(|(i, _)| i as u32)
            .collect();
        ActiveSet { rows }
    }

    /// `(2/|D|) Σ_active Δx (Δx·v) + λ v`.
    pub fn hessian_vector_product_at(&self, active: &ActiveSet, v: &[f64]) -> Vec<f64> {
        let dim = self.dim();
        let n = self.set.len() as f64;
        let diffs = self.set.diffs();
        let partial: Vec<Vec<f64>> = active
            .rows
            .par_chunks(CHUNK_ROWS)
            .map(|rows| {
                let mut acc = vec![0.0; dim];
                for &r in rows {
                    let row = &diffs[r as usize * dim..(r as usize + 1) * dim];
                    let s = dot(row, v);
                    for (a, x) in acc.iter_mut().zip(row) {
                        *a += s * x;
                    }
                }
                acc
            })
            .collect();
        let mut out = vec![0.0; dim];
        for p in &partial {
            for (o, x) in out.iter_mut().zip(p) {
                *o += x;
            }
        }
        for (o, vi) in out.iter_mut().zip(v) {
            *o = 2.0 * *o / n + self.lambda * vi;
        }
        out
    }

    /// Generalized Hessian-vector product with the active set taken at `theta`.
    pub fn hessian_vector_product(&self, theta: &[f64], v: &[f64]) -> Vec<f64> {
        self.hessian_vector_product_at(&self.active_set(theta), v)
    }
}

impl SecondOrder for PairwiseObjective<'_> {
    type Curvature = ActiveSet;

    fn dim(&self) -> usize {
        self.set.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        PairwiseObjective::value(self, x)
    }

    fn value_and_gradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let e = self.loss_and_gradient(x);
        (e.objective, e.gradient)
    }

    fn curvature(&self, x: &[f64]) -> ActiveSet {
        self.active_set(x)
    }

    fn hess_vec(&self, c: &ActiveSet, v: &[f64]) -> Vec<f64> {
        self.hessian_vector_product_at(c, v)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
