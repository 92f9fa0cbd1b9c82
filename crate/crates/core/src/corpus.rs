//! API and project profiles, JSONL ingestion, and dataset cleaning.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}:{line}: malformed record: {message}")]
    Malformed {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{path}: duplicate {kind} id '{id}' on lines {first_line} and {second_line}")]
    DuplicateId {
        path: PathBuf,
        kind: &'static str,
        id: String,
        first_line: usize,
        second_line: usize,
    },
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Input formats understood by [`load_corpus`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CorpusFormat {
    #[default]
    Jsonl,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiProfile {
    pub id: String,
    pub name: String,
    #[serde(default)]
    pub short_description: String,
    #[serde(default)]
    pub long_description: String,
    #[serde(default, deserialize_with = "de_keywords")]
    pub keywords: BTreeSet<String>,
    #[serde(default)]
    pub deprecated: bool,
}

impl ApiProfile {
    /// Name, short description and long description joined into one text.
    pub fn textual_description(&self) -> String {
        [
            self.name.as_str(),
            self.short_description.as_str(),
            self.long_description.as_str(),
        ]
        .iter()
        .filter(|s| !s.is_empty())
        .copied()
        .collect::<Vec<_>>()
        .join(" ")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectProfile {
    pub id: String,
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub long_description: String,
    #[serde(default, deserialize_with = "de_keywords")]
    pub keywords: BTreeSet<String>,
    #[serde(default)]
    pub used_apis: BTreeSet<String>,
    #[serde(default)]
    pub deprecated: bool,
}

impl ProjectProfile {
    /// No description text and no keywords: every text feature will be zero.
    pub fn is_textless(&self) -> bool {
        self.long_description.trim().is_empty() && self.keywords.is_empty()
    }
}

/// Keywords are lowercased and trimmed; empty entries are dropped.
pub fn normalize_keywords<I, S>(raw: I) -> BTreeSet<String>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    raw.into_iter()
        .map(|k| k.as_ref().trim().to_lowercase())
        .filter(|k| !k.is_empty())
        .collect()
}

fn de_keywords<'de, D>(de: D) -> Result<BTreeSet<String>, D::Error>
where
    D: serde::Deserializer<'de>,
{
    let raw = Vec::<String>::deserialize(de)?;
    Ok(normalize_keywords(raw))
}

/// One JSONL line.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Record {
    Api(ApiProfile),
    Project(ProjectProfile),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    pub apis: Vec<ApiProfile>,
    pub projects: Vec<ProjectProfile>,
    pub provenance: String,
}

/// Counts reported by [`clean`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CleanReport {
    pub removed_apis: usize,
    pub removed_projects: usize,
    pub removed_links: usize,
}

impl CleanReport {
    pub fn is_noop(&self) -> bool {
        *self == CleanReport::default()
    }
}

impl Corpus {
    pub fn api_positions(&self) -> HashMap<&str, usize> {
        self.apis
            .iter()
            .enumerate()
            .map(|(i, a)| (a.id.as_str(), i))
            .collect()
    }

    pub fn project_positions(&self) -> HashMap<&str, usize> {
        self.projects
            .iter()
            .enumerate()
            .map(|(i, p)| (p.id.as_str(), i))
            .collect()
    }

    /// `(project id, api id)` pairs whose API is not in the corpus.
    pub fn unresolved_links(&self) -> Vec<(String, String)> {
        let apis = self.api_positions();
        self.projects
            .iter()
            .flat_map(|p| {
                p.used_apis
                    .iter()
                    .filter(|a| !apis.contains_key(a.as_str()))
                    .map(move |a| (p.id.clone(), a.clone()))
            })
            .collect()
    }

    pub fn textless_projects(&self) -> Vec<&str> {
        self.projects
            .iter()
            .filter(|p| p.is_textless())
            .map(|p| p.id.as_str())
            .collect()
    }

    /// For each project, the positions of its used APIs in `self.apis`.
    /// Unresolved ids are skipped.
    pub fn usage_positions(&self) -> Vec<Vec<usize>> {
        let apis = self.api_positions();
        self.projects
            .iter()
            .map(|p| {
                p.used_apis
                    .iter()
                    .filter_map(|a| apis.get(a.as_str()).copied())
                    .collect()
            })
            .collect()
    }

    pub fn records(&self) -> impl Iterator<Item = Record> + '_ {
        self.apis
            .iter()
            .cloned()
            .map(Record::Api)
            .chain(self.projects.iter().cloned().map(Record::Project))
    }

    /// Writes the corpus as JSONL: APIs first, then projects, in stored order.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for rec in self.records() {
            serde_json::to_writer(&mut out, &rec)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

pub fn load_corpus(path: impl AsRef<Path>, format: CorpusFormat) -> Result<Corpus, CorpusError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    match format {
        CorpusFormat::Jsonl => read_jsonl(BufReader::new(file), path),
    }
}

/// Parses JSONL records. `origin` is used only in error messages.
pub fn read_jsonl<R: BufRead>(reader: R, origin: &Path) -> Result<Corpus, CorpusError> {
    let mut corpus = Corpus {
        provenance: origin.display().to_string(),
        ..Corpus::default()
    };
    let mut api_lines: HashMap<String, usize> = HashMap::new();
    let mut project_lines: HashMap<String, usize> = HashMap::new();

    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|source| CorpusError::Io {
            path: origin.to_path_buf(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let record: Record =
            serde_json::from_str(&line).map_err(|e| CorpusError::Malformed {
                path: origin.to_path_buf(),
                line: lineno,
                message: e.to_string(),
            })?;
        let (kind, id, seen) = match &record {
            Record::Api(a) => ("api", a.id.clone(), &mut api_lines),
            Record::Project(p) => ("project", p.id.clone(), &mut project_lines),
        };
        if id.is_empty() {
            return Err(CorpusError::Malformed {
                path: origin.to_path_buf(),
                line: lineno,
                message: "empty id".into(),
            });
        }
        if let Some(&first_line) = seen.get(&id) {
            return Err(CorpusError::DuplicateId {
                path: origin.to_path_buf(),
                kind,
                id,
                first_line,
                second_line: lineno,
            });
        }
        seen.insert(id, lineno);
        match record {
            Record::Api(a) => corpus.apis.push(a),
            Record::Project(p) => corpus.projects.push(p),
        }
    }

    let unresolved = corpus.unresolved_links();
    if !unresolved.is_empty() {
        log::warn!(
            "{}: {} used-API links do not resolve (first: {} -> {})",
            origin.display(),
            unresolved.len(),
            unresolved[0].0,
            unresolved[0].1
        );
    }
    Ok(corpus)
}

/// Drops deprecated records, dangling usage links, and projects left with no
/// used API.
pub fn clean(corpus: &Corpus) -> (Corpus, CleanReport) {
    let mut report = CleanReport::default();
    let apis: Vec<ApiProfile> = corpus.apis.iter().filter(|a| !a.deprecated).cloned().collect();
    report.removed_apis = corpus.apis.len() - apis.len();
    let live: HashSet<&str> = apis.iter().map(|a| a.id.as_str()).collect();

    let mut projects = Vec::with_capacity(corpus.projects.len());
    for p in &corpus.projects {
        if p.deprecated {
            report.removed_projects += 1;
            continue;
        }
        let used: BTreeSet<String> = p
            .used_apis
            .iter()
            .filter(|a| live.contains(a.as_str()))
            .cloned()
            .collect();
        report.removed_links += p.used_apis.len() - used.len();
        if used.is_empty() {
            report.removed_projects += 1;
            continue;
        }
        projects.push(ProjectProfile {
            used_apis: used,
            ..p.clone()
        });
    }

    let cleaned = Corpus {
        apis,
        projects,
        provenance: corpus.provenance.clone(),
    };
    (cleaned, report)
}

/// Removes every whole-word, case-insensitive mention of each used API's
/// name from the project's long description, then collapses whitespace.
pub fn scrub_api_mentions(corpus: &Corpus) -> Corpus {
    let names: HashMap<&str, &str> = corpus
        .apis
        .iter()
        .map(|a| (a.id.as_str(), a.name.as_str()))
        .collect();
    let projects = corpus
        .projects
        .iter()
        .map(|p| {
            let used: Vec<&str> = p
                .used_apis
                .iter()
                .filter_map(|id| names.get(id.as_str()).copied())
                .collect();
            ProjectProfile {
                long_description: scrub_names(&p.long_description, &used),
                ..p.clone()
            }
        })
        .collect();
    Corpus {
        apis: corpus.apis.clone(),
        projects,
        provenance: corpus.provenance.clone(),
    }
}

/// Removes whole-word case-insensitive occurrences of each name in `names`.
/// Longer names go first so "Google Maps" is not left as "Maps" by "Google".
/// Repeats until nothing matches, since a removal can join two fragments
/// into a fresh occurrence.
pub fn scrub_names(text: &str, names: &[&str]) -> String {
    let mut needles: Vec<Vec<char>> = names
        .iter()
        .map(|n| n.trim())
        .filter(|n| !n.is_empty())
        .map(|n| n.chars().flat_map(char::to_lowercase).collect())
        .collect();
    needles.sort_by(|a: &Vec<char>, b| b.len().cmp(&a.len()).then(a.cmp(b)));
    needles.dedup();

    let mut current = normalize_whitespace(text);
    loop {
        let mut changed = false;
        for needle in &needles {
            if let Some(next) = remove_word_matches(&current, needle) {
                current = normalize_whitespace(&next);
                changed = true;
            }
        }
        if !changed {
            return current;
        }
    }
}

fn normalize_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// `None` when there is no bounded match.
fn remove_word_matches(text: &str, needle: &[char]) -> Option<String> {
    let chars: Vec<char> = text.chars().collect();
    let lower: Vec<char> = chars
        .iter()
        .map(|c| {
            let mut l = c.to_lowercase();
            match (l.next(), l.next()) {
                (Some(x), None) => x,
                _ => *c,
            }
        })
        .collect();
    let n = needle.len();
    if n == 0 || n > chars.len() {
        return None;
    }
    let mut out = String::with_capacity(text.len());
    let mut i = 0;
    let mut found = false;
    while i < chars.len() {
        let bounded_left = i == 0 || !chars[i - 1].is_alphanumeric();
        if bounded_left
            && i + n <= chars.len()
            && lower[i..i + n] == *needle
            && (i + n == chars.len() || !chars[i + n].is_alphanumeric())
        {
            found = true;
            out.push(' ');
            i += n;
        } else {
            out.push(chars[i]);
            i += 1;
        }
    }
    found.then_some(out)
}
