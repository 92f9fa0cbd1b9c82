//! Profile text to token bags: tokenize, keep nouns, merge keywords, drop
//! stop words, stem, count.

mod nouns;
mod porter;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::corpus::{ApiProfile, ProjectProfile};
use crate::error::{Error, Result};

pub use nouns::{noun_filters, ClosedClassFilter, NounFilter, PassThrough, DEFAULT_NOUN_FILTER};
pub use porter::stem;

/// Splits on every non-alphanumeric character and lowercases. Order is kept.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// A set of words removed before stemming.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StopList {
    words: HashSet<String>,
}

const SMART_STOPLIST: &str = include_str!("../../data/smart_stoplist.txt");

impl StopList {
    /// The 570-word SMART English stop list.
    pub fn smart() -> Self {
        Self::parse(SMART_STOPLIST)
    }

    pub fn empty() -> Self {
        Self {
            words: HashSet::new(),
        }
    }

    /// One word per line; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Self {
        let words = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_lowercase)
            .collect();
        Self { words }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::parse(&text))
    }

    pub fn from_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            words: words.into_iter().map(Into::into).collect(),
        }
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Sorted word list, for serialization.
    pub fn sorted_words(&self) -> Vec<String> {
        let mut w: Vec<String> = self.words.iter().cloned().collect();
        w.sort();
        w
    }
}

impl Default for StopList {
    fn default() -> Self {
        Self::smart()
    }
}

pub fn remove_stopwords(tokens: &[String], stoplist: &StopList) -> Vec<String> {
    tokens
        .iter()
        .filter(|t| !stoplist.contains(t))
        .cloned()
        .collect()
}

/// Multiset of stemmed tokens.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenBag {
    counts: BTreeMap<String, u32>,
}

impl TokenBag {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, token: impl Into<String>) {
        let token = token.into();
        debug_assert!(!token.is_empty() && !token.contains(char::is_whitespace));
        *self.counts.entry(token).or_insert(0) += 1;
    }

    pub fn count(&self, token: &str) -> u32 {
        self.counts.get(token).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u32)> {
        self.counts.iter().map(|(t, c)| (t.as_str(), *c))
    }

    /// Number of distinct tokens.
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.counts.values().map(|&c| u64::from(c)).sum()
    }
}

impl<S: Into<String>> FromIterator<S> for TokenBag {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        let mut bag = TokenBag::new();
        for t in iter {
            bag.add(t);
        }
        bag
    }
}

/// Serializable description of a [`TextPipeline`], stored in model files so
/// new profiles are preprocessed exactly like the training data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextConfig {
    pub noun_filter: String,
    #[serde(default)]
    pub include_project_name: bool,
    /// Custom stop words; `None` means the built-in SMART list.
    #[serde(default)]
    pub stoplist: Option<Vec<String>>,
}

impl Default for TextConfig {
    fn default() -> Self {
        Self {
            noun_filter: DEFAULT_NOUN_FILTER.to_string(),
            include_project_name: false,
            stoplist: None,
        }
    }
}

impl TextConfig {
    pub fn pipeline(&self) -> Result<TextPipeline> {
        let filter = noun_filters().get(&self.noun_filter)?;
        let stoplist = match &self.stoplist {
            None => StopList::smart(),
            Some(words) => StopList::from_words(words.iter().cloned()),
        };
        Ok(TextPipeline::new(stoplist, filter).with_project_name(self.include_project_name))
    }
}

/// The configured preprocessing chain shared by training and deployment.
#[derive(Debug, Clone)]
pub struct TextPipeline {
    pub stoplist: Arc<StopList>,
    pub noun_filter: Arc<dyn NounFilter>,
    /// Prepend the project name to the project description.
    pub include_project_name: bool,
}

impl Default for TextPipeline {
    fn default() -> Self {
        Self {
            stoplist: Arc::new(StopList::smart()),
            noun_filter: Arc::new(ClosedClassFilter),
            include_project_name: false,
        }
    }
}

impl TextPipeline {
    pub fn new(stoplist: StopList, noun_filter: Arc<dyn NounFilter>) -> Self {
        Self {
            stoplist: Arc::new(stoplist),
            noun_filter,
            include_project_name: false,
        }
    }

    pub fn with_project_name(mut self, include: bool) -> Self {
        self.include_project_name = include;
        self
    }

    /// tokenize → noun filter → append keyword tokens → drop stop words →
    /// stem → count. Keywords skip the noun filter.
    pub fn build_document(&self, description: &str, keywords: &BTreeSet<String>) -> TokenBag {
        let mut tokens = self.noun_filter.filter(&tokenize(description));
        for kw in keywords {
            tokens.extend(tokenize(kw));
        }
        remove_stopwords(&tokens, &self.stoplist)
            .iter()
            .map(|t| stem(t))
            .filter(|t| !t.is_empty())
            .collect()
    }

    pub fn api_document(&self, api: &ApiProfile) -> TokenBag {
        self.build_document(&api.textual_description(), &api.keywords)
    }

    pub fn project_document(&self, project: &ProjectProfile) -> TokenBag {
        if self.include_project_name && !project.name.is_empty() {
            let text = format!("{} {}", project.name, project.long_description);
            self.build_document(&text, &project.keywords)
        } else {
            self.build_document(&project.long_description, &project.keywords)
        }
    }
}
