//! Self-describing JSON model file.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{RankingModel, TrainingSummary};
use crate::error::{Error, Result};
use crate::features::{ApiEntry, FeatureConfig, NeighborIndex};
use crate::space::FittedSpace;
use crate::textproc::TextConfig;
use crate::vsm::{LogBase, Vocabulary, VocabularyFile};

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Everything needed to rank APIs for a new profile without the corpus.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFile {
    pub version: u32,
    pub theta: Vec<f64>,
    pub lambda: f64,
    pub log_base: LogBase,
    pub k_grid: Vec<usize>,
    pub seed: u64,
    pub vocab: VocabularyFile,
    pub text: TextConfig,
    pub apis: Vec<ApiEntry>,
    pub neighbors: NeighborIndex,
    #[serde(default)]
    pub training: Option<TrainingSummary>,
}

impl From<&RankingModel> for ModelFile {
    fn from(m: &RankingModel) -> Self {
        Self {
            version: MODEL_FORMAT_VERSION,
            theta: m.theta.clone(),
            lambda: m.lambda,
            log_base: m.space.vocab.log_base(),
            k_grid: m.space.config.k_grid.clone(),
            seed: m.space.config.seed,
            vocab: VocabularyFile::from(&m.space.vocab),
            text: m.text.clone(),
            apis: m.space.apis.clone(),
            neighbors: m.space.index.clone(),
            training: m.summary.clone(),
        }
    }
}

impl ModelFile {
    pub fn into_model(self) -> Result<RankingModel> {
        if self.version != MODEL_FORMAT_VERSION {
            return Err(Error::config(format!(
                "unsupported model format version {} (expected {MODEL_FORMAT_VERSION})",
                self.version
            )));
        }
        let config = FeatureConfig::new(self.k_grid, self.seed)?;
        if self.theta.len() != config.dim() {
            return Err(Error::Dimension {
                expected: config.dim(),
                actual: self.theta.len(),
            });
        }
        let n_apis = self.apis.len();
        if let Some(bad) = self
            .neighbors
            .entries()
            .iter()
            .flat_map(|e| e.used_apis.iter())
            .find(|&&a| a >= n_apis)
        {
            return Err(Error::config(format!("neighbor uses API position {bad} beyond {n_apis} APIs")));
        }
        let vocab = Vocabulary::try_from(self.vocab)?;
        let space = FittedSpace {
            config,
            vocab,
            apis: self.apis,
            index: self.neighbors,
        };
        Ok(RankingModel {
            theta: self.theta,
            lambda: self.lambda,
            space: Arc::new(space),
            text: self.text,
            summary: self.training,
        })
    }
}

impl RankingModel {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&ModelFile::from(self))?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut json = self.to_json()?;
        json.push('\n');
        std::fs::write(path, json).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let file: ModelFile = serde_json::from_str(&text).map_err(|e| Error::Model {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        file.into_model().map_err(|e| Error::Model {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }
}
