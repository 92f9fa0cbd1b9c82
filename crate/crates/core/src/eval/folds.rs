use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::substream;

/// Disjoint test partitions of the project positions `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub seed: u64,
    folds: Vec<Vec<usize>>,
}

impl FoldPlan {
    /// Seeded shuffle, then round-robin assignment; fold sizes differ by at
    /// most one. Each fold's positions are kept sorted.
    pub fn new(n_projects: usize, n_folds: usize, seed: u64) -> Result<Self> {
        if n_folds < 2 {
            return Err(Error::config(format!("need at least 2 folds, got {n_folds}")));
        }
        if n_projects < n_folds {
            return Err(Error::config(format!(
                "{n_folds}-fold cross-validation needs at least {n_folds} projects, corpus has {n_projects}"
            )));
        }
        let mut order: Vec<usize> = (0..n_projects).collect();
        order.shuffle(&mut substream(seed, "folds", ""));
        let mut folds = vec![Vec::new(); n_folds];
        for (i, p) in order.into_iter().enumerate() {
            folds[i % n_folds].push(p);
        }
        for f in &mut folds {
            f.sort_unstable();
        }
        Ok(Self { seed, folds })
    }

    pub fn len(&self) -> usize {
        self.folds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.folds.is_empty()
    }

    pub fn test(&self, fold: usize) -> &[usize] {
        &self.folds[fold]
    }

    /// All positions outside `fold`, sorted.
    pub fn training(&self, fold: usize) -> Vec<usize> {
        let mut t: Vec<usize> = self
            .folds
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != fold)
            .flat_map(|(_, f)| f.iter().copied())
            .collect();
        t.sort_unstable();
        t
    }
}
