//! Vector space model: shared vocabulary, tf-idf weights, sparse cosine.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::textproc::TokenBag;

/// Logarithm used for idf. Only the natural log is supported; the tag is
/// stored in model files so a reader can check it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum LogBase {
    #[default]
    #[serde(rename = "e")]
    Natural,
}

impl LogBase {
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Natural => x.ln(),
        }
    }
}

/// Term index plus document frequencies over the fitting collection.
///
/// Terms are indexed in lexicographic order, so the same document set yields
/// the same vocabulary no matter the order documents arrive in.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    terms: Vec<String>,
    index: HashMap<String, usize>,
    df: Vec<u32>,
    n_docs: u32,
    log_base: LogBase,
}

impl Vocabulary {
    pub fn fit<'a, I>(documents: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a TokenBag>,
    {
        let mut df: HashMap<&str, u32> = HashMap::new();
        let mut n_docs: u32 = 0;
        for doc in documents {
            n_docs += 1;
            for (term, _) in doc.iter() {
                *df.entry(term).or_insert(0) += 1;
            }
        }
        if n_docs == 0 {
            return Err(Error::config("cannot fit a vocabulary on zero documents"));
        }
        let sorted: BTreeSet<&str> = df.keys().copied().collect();
        let terms: Vec<String> = sorted.into_iter().map(String::from).collect();
        let df_vec = terms.iter().map(|t| df[t.as_str()]).collect();
        Ok(Self::from_parts(terms, df_vec, n_docs, LogBase::Natural))
    }

    fn from_parts(terms: Vec<String>, df: Vec<u32>, n_docs: u32, log_base: LogBase) -> Self {
        let index = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Self {
            terms,
            index,
            df,
            n_docs,
            log_base,
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_docs(&self) -> u32 {
        self.n_docs
    }

    pub fn log_base(&self) -> LogBase {
        self.log_base
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn term(&self, index: usize) -> &str {
        &self.terms[index]
    }

    pub fn df(&self, term: &str) -> Option<u32> {
        self.index_of(term).map(|i| self.df[i])
    }

    pub fn idf_at(&self, index: usize) -> f64 {
        self.log_base
            .log(f64::from(self.n_docs) / f64::from(self.df[index]))
    }

    /// `TF × log(N / DF)` for each in-vocabulary term; zero weights are
    /// omitted.
    pub fn tfidf(&self, doc: &TokenBag) -> SparseVector {
        let mut entries: Vec<(u32, f64)> = doc
            .iter()
            .filter_map(|(term, tf)| {
                let i = self.index_of(term)?;
                let w = f64::from(tf) * self.idf_at(i);
                (w > 0.0).then_some((i as u32, w))
            })
            .collect();
        entries.sort_unstable_by_key(|e| e.0);
        SparseVector { entries }
    }
}

/// On-disk form: `(term, index, df)` triples plus `n_docs` and the log tag.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VocabularyFile {
    pub n_docs: u32,
    pub log_base: LogBase,
    pub terms: Vec<(String, usize, u32)>,
}

impl From<&Vocabulary> for VocabularyFile {
    fn from(v: &Vocabulary) -> Self {
        Self {
            n_docs: v.n_docs,
            log_base: v.log_base,
            terms: v
                .terms
                .iter()
                .enumerate()
                .map(|(i, t)| (t.clone(), i, v.df[i]))
                .collect(),
        }
    }
}

impl TryFrom<VocabularyFile> for Vocabulary {
    type Error = Error;

    fn try_from(f: VocabularyFile) -> Result<Self> {
        let n = f.terms.len();
        let mut terms = vec![String::new(); n];
        let mut df = vec![0u32; n];
        let mut seen = vec![false; n];
        for (term, idx, d) in f.terms {
            if idx >= n || seen[idx] {
                return Err(Error::config(format!("vocabulary index {idx} is not dense")));
            }
            if d == 0 || d > f.n_docs {
                return Err(Error::config(format!(
                    "document frequency {d} of '{term}' outside [1, {}]",
                    f.n_docs
                )));
            }
            seen[idx] = true;
            terms[idx] = term;
            df[idx] = d;
        }
        Ok(Vocabulary::from_parts(terms, df, f.n_docs, f.log_base))
    }
}

/// Sorted `(index, weight)` pairs with strictly increasing indices and no
/// stored zeros.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SparseVector {
    entries: Vec<(u32, f64)>,
}

impl SparseVector {
    /// Sorts, merges duplicate indices by summing, and drops zeros.
    pub fn from_pairs(mut pairs: Vec<(u32, f64)>) -> Self {
        pairs.sort_by_key(|p| p.0);
        let mut entries: Vec<(u32, f64)> = Vec::with_capacity(pairs.len());
        for (i, w) in pairs {
            match entries.last_mut() {
                Some(last) if last.0 == i => last.1 += w,
                _ => entries.push((i, w)),
            }
        }
        entries.retain(|e| e.1 != 0.0);
        Self { entries }
    }

    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|e| e.1 * e.1).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &SparseVector) -> f64 {
        let (a, b) = (&self.entries, &other.entries);
        let (mut i, mut j, mut sum) = (0, 0, 0.0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    sum += a[i].1 * b[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        sum
    }

    pub fn scaled(&self, alpha: f64) -> SparseVector {
        SparseVector::from_pairs(self.entries.iter().map(|&(i, w)| (i, w * alpha)).collect())
    }

    /// Checks the sorted-unique-nonzero invariant.
    pub fn is_well_formed(&self) -> bool {
        self.entries.windows(2).all(|w| w[0].0 < w[1].0) && self.entries.iter().all(|e| e.1 != 0.0)
    }
}

/// Cosine similarity; 0 when either vector has zero norm.
pub fn cosine(a: &SparseVector, b: &SparseVector) -> f64 {
    let na = a.norm();
    let nb = b.norm();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (a.dot(b) / (na * nb)).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bag(pairs: &[(&str, u32)]) -> TokenBag {
        let mut b = TokenBag::new();
        for &(t, c) in pairs {
            for _ in 0..c {
                b.add(t);
            }
        }
        b
    }

    #[test]
    fn fit_counts_document_frequency() {
        let docs = [bag(&[("a", 1), ("b", 2)]), bag(&[("b", 1)])];
        let v = Vocabulary::fit(&docs).unwrap();
        assert_eq!(v.df("a"), Some(1));
        assert_eq!(v.df("b"), Some(2));
        assert_eq!(v.n_docs(), 2);

        let v = Vocabulary::fit(&[bag(&[("a", 1)])]).unwrap();
        assert_eq!((v.df("a"), v.n_docs()), (Some(1), 1));

        let docs = [bag(&[("a", 1)]), bag(&[("b", 1)]), bag(&[("c", 3)])];
        let v = Vocabulary::fit(&docs).unwrap();
        assert!(["a", "b", "c"].iter().all(|t| v.df(t) == Some(1)));
    }

    #[test]
    fn fit_rejects_empty_collection() {
        assert!(matches!(Vocabulary::fit(&[]), Err(Error::Config(_))));
    }

    #[test]
    fn term_in_every_document_has_zero_weight() {
        let docs = [bag(&[("a", 1), ("b", 1)]), bag(&[("a", 3)])];
        let v = Vocabulary::fit(&docs).unwrap();
        let vec = v.tfidf(&docs[1]);
        assert!(vec.is_empty());
    }

    #[test]
    fn tfidf_hand_value() {
        let docs = [bag(&[("a", 2)]), bag(&[("b", 1)]), bag(&[("b", 1)]), bag(&[("c", 1)])];
        let v = Vocabulary::fit(&docs).unwrap();
        let vec = v.tfidf(&docs[0]);
        assert_eq!(vec.nnz(), 1);
        assert!((vec.entries()[0].1 - 2.772_588_722_239_781).abs() < 1e-12);
        assert!(v.tfidf(&TokenBag::new()).is_empty());
    }

    #[test]
    fn out_of_vocabulary_terms_are_dropped() {
        let docs = [bag(&[("a", 1)]), bag(&[("b", 1)])];
        let v = Vocabulary::fit(&docs).unwrap();
        let vec = v.tfidf(&bag(&[("a", 1), ("zzz", 5)]));
        assert_eq!(vec.nnz(), 1);
    }

    #[test]
    fn vocabulary_ignores_document_order() {
        let docs = [bag(&[("z", 1), ("a", 1)]), bag(&[("m", 2)]), bag(&[("a", 1)])];
        let mut rev = docs.to_vec();
        rev.reverse();
        assert_eq!(Vocabulary::fit(&docs).unwrap(), Vocabulary::fit(&rev).unwrap());
    }

    #[test]
    fn vocabulary_file_roundtrip() {
        let docs = [bag(&[("a", 1), ("b", 2)]), bag(&[("b", 1), ("c", 1)])];
        let v = Vocabulary::fit(&docs).unwrap();
        let file = VocabularyFile::from(&v);
        let json = serde_json::to_string(&file).unwrap();
        assert!(json.contains("\"log_base\":\"e\""));
        let back = Vocabulary::try_from(serde_json::from_str::<VocabularyFile>(&json).unwrap()).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn cosine_examples() {
        let a = SparseVector::from_pairs(vec![(0, 1.0), (1, 1.0)]);
        let b = SparseVector::from_pairs(vec![(1, 1.0), (2, 1.0)]);
        assert!((cosine(&a, &b) - 0.5).abs() < 1e-15);
        assert!((cosine(&a, &a) - 1.0).abs() < 1e-15);
        let c = SparseVector::from_pairs(vec![(5, 2.0)]);
        assert_eq!(cosine(&a, &c), 0.0);
        assert_eq!(cosine(&a, &SparseVector::default()), 0.0);
    }

    fn sparse() -> impl Strategy<Value = SparseVector> {
        proptest::collection::vec((0u32..30, 0.01f64..10.0), 0..12).prop_map(SparseVector::from_pairs)
    }

    fn dense(v: &SparseVector) -> Vec<f64> {
        let mut d = vec![0.0; 30];
        for &(i, w) in v.entries() {
            d[i as usize] = w;
        }
        d
    }

    proptest! {
        #[test]
        fn cosine_is_symmetric(a in sparse(), b in sparse()) {
            prop_assert_eq!(cosine(&a, &b), cosine(&b, &a));
        }

        #[test]
        fn cosine_is_scale_invariant(a in sparse(), b in sparse(), alpha in 0.001f64..1000.0) {
            prop_assert!((cosine(&a.scaled(alpha), &b) - cosine(&a, &b)).abs() < 1e-12);
        }

        #[test]
        fn sparse_dot_matches_dense(a in sparse(), b in sparse()) {
            let (da, db) = (dense(&a), dense(&b));
            let oracle: f64 = da.iter().zip(&db).map(|(x, y)| x * y).sum();
            prop_assert!((a.dot(&b) - oracle).abs() <= 1e-12 * oracle.abs().max(1.0));
            prop_assert!(a.is_well_formed());
        }

        #[test]
        fn tfidf_weights_are_nonnegative_and_zero_only_when_ubiquitous(
            docs in proptest::collection::vec(proptest::collection::vec(0u8..6, 1..6), 1..8)
        ) {
            let bags: Vec<TokenBag> = docs
                .iter()
                .map(|d| d.iter().map(|t| format!("t{t}")).collect())
                .collect();
            let vocab = Vocabulary::fit(&bags).unwrap();
            for b in &bags {
                let v = vocab.tfidf(b);
                prop_assert!(v.is_well_formed());
                for (term, _) in b.iter() {
                    let idx = vocab.index_of(term).unwrap() as u32;
                    let stored = v.entries().iter().find(|e| e.0 == idx);
                    let ubiquitous = vocab.df(term) == Some(vocab.n_docs());
                    prop_assert_eq!(stored.is_none(), ubiquitous);
                    if let Some(e) = stored { prop_assert!(e.1 > 0.0); }
                }
            }
        }
    }
}
