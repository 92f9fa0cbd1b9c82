//! Personalized web-API recommendation.
//!
//! Projects and APIs are turned into TF-IDF vectors; each (project, API)
//! pair gets a small feature vector of text similarities and neighbor-based
//! usage scores, and a linear model trained with a pairwise squared-hinge
//! loss orders the APIs. Baselines and cross-validated evaluation are
//! included.
//!
//! Pipeline: [`corpus`] → [`textproc`] → [`vsm`] → [`features`] (via
//! [`space`]) → [`ranker`] → [`recommend`] / [`eval`].

pub mod corpus;
pub mod error;
pub mod eval;
pub mod features;
pub mod ranker;
pub mod recommend;
pub mod registry;
pub mod rng;
pub mod space;
pub mod synthetic;
pub mod textproc;
pub mod vsm;

pub use error::{Error, Result};
