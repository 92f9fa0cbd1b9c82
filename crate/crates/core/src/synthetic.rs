//! Seeded synthetic corpora with planted topic clusters.
//!
//! Each cluster owns a vocabulary, a keyword pool and a block of APIs, and
//! is split into sub-topics with their own words and a small "core" subset
//! of the block. Projects describe themselves with cluster and sub-topic
//! words and use mostly core APIs of their sub-topic.
//! API descriptions carry only a faint cluster signal, so text alone
//! cannot tell core APIs from the rest of the block.

use std::collections::BTreeSet;

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{ApiProfile, Corpus, ProjectProfile};
use crate::rng::substream;
use crate::textproc::StopList;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub n_projects: usize,
    pub n_apis: usize,
    pub n_clusters: usize,
    /// Sub-topics per cluster. Each has its own core APIs and words, so
    /// telling them apart needs close neighbors (and hence more data).
    pub subtopics: usize,
    /// Core APIs per sub-topic; projects draw most usages from these.
    pub core_apis: usize,
    /// Usages per project drawn from the cluster core.
    pub uses_per_project: usize,
    /// Probability of one extra usage drawn from all APIs.
    pub noise_use: f64,
    /// Zipf exponent of sub-topic popularity; 0 makes all equally common.
    pub popularity_skew: f64,
    /// Cluster words in each project description.
    pub project_words: usize,
    /// Sub-topic words in each project description.
    pub subtopic_words: usize,
    /// Shared filler words in each description.
    pub filler_words: usize,
    /// Cluster words in each API description.
    pub api_cluster_words: usize,
    pub words_per_cluster: usize,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    /// The planted-structure corpus used by the evaluation tests.
    fn default() -> Self {
        Self {
            n_projects: 1000,
            n_apis: 300,
            n_clusters: 5,
            subtopics: 6,
            core_apis: 4,
            uses_per_project: 3,
            noise_use: 0.3,
            popularity_skew: 1.0,
            project_words: 4,
            subtopic_words: 4,
            filler_words: 4,
            api_cluster_words: 1,
            words_per_cluster: 40,
            seed: 7,
        }
    }
}

impl SyntheticConfig {
    /// Unstructured-looking corpus for oracle tests: many small clusters,
    /// noisy usage.
    pub fn random(n_projects: usize, n_apis: usize, seed: u64) -> Self {
        Self {
            n_projects,
            n_apis,
            n_clusters: 20,
            subtopics: 1,
            core_apis: 8,
            uses_per_project: 2,
            noise_use: 0.8,
            popularity_skew: 0.0,
            project_words: 5,
            subtopic_words: 0,
            filler_words: 6,
            api_cluster_words: 2,
            words_per_cluster: 15,
            seed,
        }
    }
}

const ONSETS: &[&str] = &["b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z"];
const VOWELS: &[&str] = &["a", "e", "i", "o", "u"];

/// `n` distinct three-syllable words that are not stop words.
fn word_pool(n: usize, rng: &mut ChaCha8Rng) -> Vec<String> {
    let stop = StopList::smart();
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let w: String = (0..3)
            .map(|_| format!("{}{}", ONSETS.choose(rng).unwrap(), VOWELS.choose(rng).unwrap()))
            .collect();
        if !stop.contains(&w) && seen.insert(w.clone()) {
            out.push(w);
        }
    }
    out
}

fn pick_words(pool: &[String], n: usize, rng: &mut ChaCha8Rng) -> Vec<String> {
    (0..n).map(|_| pool.choose(rng).unwrap().clone()).collect()
}

/// Words owned by each sub-topic.
const SUBTOPIC_POOL: usize = 8;
const FILLER_POOL: usize = 60;
const KEYWORD_POOL: usize = 6;

/// Generates a corpus; identical configs give identical corpora.
pub fn planted_corpus(cfg: &SyntheticConfig) -> Corpus {
    assert!(cfg.n_clusters > 0 && cfg.n_apis >= cfg.n_clusters, "need at least one API per cluster");
    assert!(cfg.subtopics > 0 && cfg.core_apis > 0, "sub-topics and core sizes must be positive");
    let mut rng = substream(cfg.seed, "synthetic", "");
    let c = cfg.n_clusters;
    let n_sub = c * cfg.subtopics;
    let words = word_pool(
        c * cfg.words_per_cluster + n_sub * SUBTOPIC_POOL + FILLER_POOL + c * KEYWORD_POOL,
        &mut rng,
    );
    let (topic, rest) = words.split_at(c * cfg.words_per_cluster);
    let (sub, rest) = rest.split_at(n_sub * SUBTOPIC_POOL);
    let (filler, kw) = rest.split_at(FILLER_POOL);
    let topic: Vec<&[String]> = topic.chunks(cfg.words_per_cluster).collect();
    let sub: Vec<&[String]> = sub.chunks(SUBTOPIC_POOL).collect();
    let keywords: Vec<&[String]> = kw.chunks(KEYWORD_POOL).collect();

    // APIs are assigned to clusters round-robin.
    let cluster_of_api = |a: usize| a % c;
    let apis: Vec<ApiProfile> = (0..cfg.n_apis)
        .map(|a| {
            let cl = cluster_of_api(a);
            let mut text = pick_words(filler, 6, &mut rng);
            text.extend(pick_words(topic[cl], cfg.api_cluster_words, &mut rng));
            text.shuffle(&mut rng);
            let mut kws = BTreeSet::new();
            kws.insert(keywords[cl].choose(&mut rng).unwrap().clone());
            kws.insert(filler.choose(&mut rng).unwrap().clone());
            ApiProfile {
                id: format!("api-{a:04}"),
                name: format!("Api{a}"),
                short_description: String::new(),
                long_description: text.join(" "),
                keywords: kws,
                deprecated: false,
            }
        })
        .collect();

    // Core APIs of sub-topic s: consecutive slices of the cluster's block,
    // wrapping around when the block is small.
    let core: Vec<Vec<usize>> = (0..n_sub)
        .map(|st| {
            let cl = st / cfg.subtopics;
            let block: Vec<usize> = (0..cfg.n_apis).filter(|&a| cluster_of_api(a) == cl).collect();
            let offset = (st % cfg.subtopics) * cfg.core_apis;
            (0..cfg.core_apis).map(|i| block[(offset + i) % block.len()]).collect()
        })
        .collect();

    // Popularity ranks are shuffled so that popular sub-topics are spread
    // over clusters.
    let mut rank: Vec<usize> = (0..n_sub).collect();
    rank.shuffle(&mut rng);
    let weights: Vec<f64> = rank.iter().map(|&r| ((r + 1) as f64).powf(-cfg.popularity_skew)).collect();
    let pick_subtopic = WeightedIndex::new(&weights).expect("positive weights");

    let projects = (0..cfg.n_projects)
        .map(|p| {
            let st = pick_subtopic.sample(&mut rng);
            let cl = st / cfg.subtopics;
            let mut text = pick_words(topic[cl], cfg.project_words, &mut rng);
            text.extend(pick_words(sub[st], cfg.subtopic_words, &mut rng));
            text.extend(pick_words(filler, cfg.filler_words, &mut rng));
            text.shuffle(&mut rng);
            let kws: BTreeSet<String> = pick_words(keywords[cl], 2, &mut rng).into_iter().collect();
            let n_core = cfg.uses_per_project.min(core[st].len());
            let mut used: BTreeSet<String> = core[st]
                .choose_multiple(&mut rng, n_core)
                .map(|&a| apis[a].id.clone())
                .collect();
            if rng.gen_bool(cfg.noise_use) {
                used.insert(apis[rng.gen_range(0..cfg.n_apis)].id.clone());
            }
            ProjectProfile {
                id: format!("proj-{p:05}"),
                name: format!("Project{p}"),
                long_description: text.join(" "),
                keywords: kws,
                used_apis: used,
                deprecated: false,
            }
        })
        .collect();

    Corpus {
        apis,
        projects,
        provenance: format!("synthetic:{}", serde_json::to_string(cfg).expect("serializable")),
    }
}
