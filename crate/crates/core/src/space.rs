//! A fitted retrieval space: vocabulary, API table and neighbor index built
//! from one set of training projects.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::corpus::Corpus;
use crate::error::Result;
use crate::features::{ApiEntry, FeatureConfig, FeatureExtractor, NeighborEntry, NeighborIndex, ProjectQuery};
use crate::textproc::{TextPipeline, TokenBag};
use crate::vsm::Vocabulary;

/// Token bags for every API and project of a corpus, in corpus order.
#[derive(Debug, Clone, PartialEq)]
pub struct Documents {
    pub apis: Vec<TokenBag>,
    pub projects: Vec<TokenBag>,
}

impl Documents {
    pub fn build(corpus: &Corpus, pipeline: &TextPipeline) -> Self {
        Self {
            apis: corpus.apis.par_iter().map(|a| pipeline.api_document(a)).collect(),
            projects: corpus
                .projects
                .par_iter()
                .map(|p| pipeline.project_document(p))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FittedSpace {
    pub config: FeatureConfig,
    pub vocab: Vocabulary,
    pub apis: Vec<ApiEntry>,
    pub index: NeighborIndex,
}

impl FittedSpace {
    /// Fits the vocabulary on all API documents plus the training projects'
    /// documents and indexes the training projects. `training` holds project
    /// positions; it is sorted first so the result does not depend on its
    /// order.
    pub fn fit(corpus: &Corpus, docs: &Documents, training: &[usize], config: FeatureConfig) -> Result<Self> {
        config.validate()?;
        let mut training = training.to_vec();
        training.sort_unstable();
        training.dedup();

        let vocab = Vocabulary::fit(
            docs.apis
                .iter()
                .chain(training.iter().map(|&p| &docs.projects[p])),
        )?;
        let apis = corpus
            .apis
            .iter()
            .zip(&docs.apis)
            .map(|(a, bag)| ApiEntry {
                id: a.id.clone(),
                name: a.name.clone(),
                text: vocab.tfidf(bag),
                keywords: a.keywords.clone(),
            })
            .collect();
        let usage = corpus.usage_positions();
        let entries = training
            .iter()
            .map(|&p| {
                let project = &corpus.projects[p];
                NeighborEntry {
                    id: project.id.clone(),
                    text: vocab.tfidf(&docs.projects[p]),
                    keywords: project.keywords.clone(),
                    used_apis: usage[p].clone(),
                }
            })
            .collect();
        Ok(Self {
            config,
            vocab,
            apis,
            index: NeighborIndex::new(entries),
        })
    }

    pub fn n_apis(&self) -> usize {
        self.apis.len()
    }

    pub fn seed(&self) -> u64 {
        self.config.seed
    }

    pub fn extractor(&self) -> FeatureExtractor<'_> {
        FeatureExtractor {
            config: &self.config,
            index: &self.index,
            apis: &self.apis,
        }
    }

    /// Query for an arbitrary profile bag. Terms outside the vocabulary are
    /// dropped.
    pub fn query(&self, id: impl Into<String>, bag: &TokenBag, keywords: &std::collections::BTreeSet<String>) -> ProjectQuery {
        ProjectQuery {
            id: id.into(),
            text: self.vocab.tfidf(bag),
            keywords: keywords.clone(),
        }
    }

    /// Query for an indexed training project, built from its stored entry.
    pub fn training_query(&self, entry: usize) -> ProjectQuery {
        let e = &self.index.entries()[entry];
        ProjectQuery {
            id: e.id.clone(),
            text: e.text.clone(),
            keywords: e.keywords.clone(),
        }
    }

    pub fn api_positions(&self) -> HashMap<&str, usize> {
        self.apis.iter().enumerate().map(|(i, a)| (a.id.as_str(), i)).collect()
    }
}
