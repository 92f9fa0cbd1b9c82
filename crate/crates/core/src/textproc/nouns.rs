//! Noun filters: keep the tokens likely to be nouns.

use std::collections::HashSet;
use std::sync::{Arc, OnceLock};

use crate::registry::Registry;

/// Maps a token sequence to the subsequence of noun tokens.
///
/// Implementations must return a subsequence of the input: order preserved,
/// nothing added.
pub trait NounFilter: Send + Sync + std::fmt::Debug {
    fn name(&self) -> &'static str;
    fn filter(&self, tokens: &[String]) -> Vec<String>;
}

/// Keeps everything.
#[derive(Debug, Default, Clone, Copy)]
pub struct PassThrough;

impl NounFilter for PassThrough {
    fn name(&self) -> &'static str {
        "passthrough"
    }

    fn filter(&self, tokens: &[String]) -> Vec<String> {
        tokens.to_vec()
    }
}

/// Drops closed-class words (pronouns, determiners, conjunctions,
/// prepositions, auxiliaries) and `-ly` adverbs; keeps the rest.
#[derive(Debug, Default, Clone, Copy)]
pub struct ClosedClassFilter;

const CLOSED_CLASS: &[&str] = &[
    // pronouns
    "i", "me", "my", "mine", "myself", "you", "your", "yours", "yourself", "yourselves", "he",
    "him", "his", "himself", "she", "her", "hers", "herself", "it", "its", "itself", "we", "us",
    "our", "ours", "ourselves", "they", "them", "their", "theirs", "themselves", "who", "whom",
    "whose", "which", "what", "whatever", "whoever", "whichever", "someone", "anyone",
    "everyone", "somebody", "anybody", "everybody", "nobody", "something", "anything",
    "everything", "nothing", "one", "ones",
    // determiners and quantifiers
    "a", "an", "the", "this", "that", "these", "those", "each", "every", "either", "neither",
    "some", "any", "all", "both", "no", "none", "many", "much", "more", "most", "few", "fewer",
    "less", "least", "several", "such", "another", "other", "own", "same",
    // conjunctions
    "and", "or", "but", "nor", "so", "yet", "if", "then", "than", "because", "while", "whether",
    "although", "though", "unless", "since", "whereas", "when", "where", "why", "how",
    // prepositions
    "about", "above", "across", "after", "against", "along", "among", "around", "as", "at",
    "before", "behind", "below", "beneath", "beside", "besides", "between", "beyond", "by",
    "despite", "down", "during", "except", "for", "from", "in", "inside", "into", "like",
    "near", "of", "off", "on", "onto", "out", "outside", "over", "past", "per", "through",
    "throughout", "to", "toward", "towards", "under", "underneath", "until", "up", "upon",
    "via", "with", "within", "without",
    // auxiliaries and modals
    "am", "is", "are", "was", "were", "be", "been", "being", "do", "does", "did", "done",
    "doing", "have", "has", "had", "having", "can", "could", "will", "would", "shall",
    "should", "may", "might", "must", "ought",
    // particles and common adverbs
    "not", "also", "very", "too", "just", "only", "even", "still", "already", "again", "ever",
    "never", "always", "often", "here", "there", "now", "well", "really", "quite", "rather",
];

/// `-ly` words that are usually nouns or verbs.
const LY_KEEP: &[&str] = &[
    "family", "supply", "apply", "reply", "assembly", "italy", "july", "rally", "ally",
    "anomaly", "monopoly", "butterfly", "firefly", "bully", "belly", "jelly", "lily", "fly",
    "multiply", "comply", "imply",
];

fn closed_class() -> &'static HashSet<&'static str> {
    static SET: OnceLock<HashSet<&'static str>> = OnceLock::new();
    SET.get_or_init(|| CLOSED_CLASS.iter().copied().collect())
}

impl ClosedClassFilter {
    fn keeps(token: &str) -> bool {
        if closed_class().contains(token) {
            return false;
        }
        if token.len() > 4 && token.ends_with("ly") && !LY_KEEP.contains(&token) {
            return false;
        }
        true
    }
}

impl NounFilter for ClosedClassFilter {
    fn name(&self) -> &'static str {
        "heuristic"
    }

    fn filter(&self, tokens: &[String]) -> Vec<String> {
        tokens
            .iter()
            .filter(|t| Self::keeps(t))
            .cloned()
            .collect()
    }
}

/// Registry of the built-in filters: `heuristic` (default) and `passthrough`.
pub fn noun_filters() -> Registry<dyn NounFilter> {
    let mut reg: Registry<dyn NounFilter> = Registry::new("noun filter");
    reg.register("heuristic", Arc::new(ClosedClassFilter));
    reg.register("passthrough", Arc::new(PassThrough));
    reg
}

pub const DEFAULT_NOUN_FILTER: &str = "heuristic";
