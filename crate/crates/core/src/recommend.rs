//! Interchangeable recommendation strategies, selected by name.
//!
//! A [`RecommenderBuilder`] turns a fitted space (one training fold) into a
//! [`Recommender`]. The built-in registry holds:
//!
//! | name       | strategy                                              |
//! |------------|-------------------------------------------------------|
//! | `pairwise` | learned linear model over the interaction features    |
//! | `poprec`   | global usage counts in the training projects          |
//! | `exemplar` | text cosine between project and API descriptions      |

use std::sync::Arc;

use crate::error::Result;
use crate::features::ProjectQuery;
use crate::ranker::{RankedList, RankerConfig, RankingModel};
use crate::registry::Registry;
use crate::space::FittedSpace;
use crate::textproc::TextConfig;
use crate::vsm::cosine;

pub trait Recommender: Send + Sync {
    fn name(&self) -> &str;

    /// Every API of the space, best first.
    fn rank(&self, query: &ProjectQuery) -> Result<RankedList>;

    /// Learned feature weights, if the strategy has any.
    fn weights(&self) -> Option<&[f64]> {
        None
    }
}

pub trait RecommenderBuilder: Send + Sync {
    fn name(&self) -> &'static str;

    fn build(&self, space: Arc<FittedSpace>, ranker: &RankerConfig, text: &TextConfig) -> Result<Box<dyn Recommender>>;
}

impl Recommender for RankingModel {
    fn name(&self) -> &str {
        PAIRWISE
    }

    fn rank(&self, query: &ProjectQuery) -> Result<RankedList> {
        RankingModel::rank(self, query)
    }

    fn weights(&self) -> Option<&[f64]> {
        Some(&self.theta)
    }
}

pub const PAIRWISE: &str = "pairwise";
pub const POPREC: &str = "poprec";
pub const EXEMPLAR: &str = "exemplar";

#[derive(Debug, Default, Clone, Copy)]
pub struct PairwiseBuilder;

impl RecommenderBuilder for PairwiseBuilder {
    fn name(&self) -> &'static str {
        PAIRWISE
    }

    fn build(&self, space: Arc<FittedSpace>, ranker: &RankerConfig, text: &TextConfig) -> Result<Box<dyn Recommender>> {
        Ok(Box::new(RankingModel::fit(space, ranker, text.clone())?))
    }
}

/// The same list for every project: APIs by training usage count.
pub fn baseline_poprec(space: &FittedSpace) -> RankedList {
    let counts = space.index.usage_counts(space.n_apis());
    let scores: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    RankedList::from_scores_with_stream(&scores, space.seed(), "poprec-ties", "")
}

/// APIs by text cosine to the project. Shares the tie stream with the
/// learned ranker, so it equals that ranker with θ on the text-similarity
/// feature alone.
pub fn baseline_exemplar(space: &FittedSpace, query: &ProjectQuery) -> RankedList {
    let scores: Vec<f64> = space.apis.iter().map(|a| cosine(&query.text, &a.text)).collect();
    RankedList::from_scores(&scores, space.seed(), &query.id)
}

pub struct PopRec {
    list: RankedList,
}

impl Recommender for PopRec {
    fn name(&self) -> &str {
        POPREC
    }

    fn rank(&self, _query: &ProjectQuery) -> Result<RankedList> {
        Ok(self.list.clone())
    }
}

#[derive(Debug, Default, Clone, Copy)]
pub struct PopRecBuilder;

impl RecommenderBuilder for PopRecBuilder {
    fn name(&self) -> &'static str {
        POPREC
    }

    fn build(&self, space: Arc<FittedSpace>, _: &RankerConfig, _: &TextConfig) -> Result<Box<dyn Recommender>> {
        Ok(Box::new(PopRec {
            list: baseline_poprec(&space),
        }))
    }
}

pub struct Exemplar {
    space: Arc<FittedSpace>,
}

impl Recommender for Exemplar {
    fn name(&self) -> &str {
        EXEMPLAR
    }

    fn rank(&self, query: &ProjectQuery) -> Result<RankedList> {
        Ok(baseline_exemplar(&self.space, query))
    }
}

#[derive(Debug, Default, Clone, Copy)]
pub struct ExemplarBuilder;

impl RecommenderBuilder for ExemplarBuilder {
    fn name(&self) -> &'static str {
        EXEMPLAR
    }

    fn build(&self, space: Arc<FittedSpace>, _: &RankerConfig, _: &TextConfig) -> Result<Box<dyn Recommender>> {
        Ok(Box::new(Exemplar { space }))
    }
}

/// Registry with the three built-in strategies.
pub fn recommenders() -> Registry<dyn RecommenderBuilder> {
    let mut reg: Registry<dyn RecommenderBuilder> = Registry::new("recommender");
    reg.register(PAIRWISE, Arc::new(PairwiseBuilder));
    reg.register(POPREC, Arc::new(PopRecBuilder));
    reg.register(EXEMPLAR, Arc::new(ExemplarBuilder));
    reg
}
