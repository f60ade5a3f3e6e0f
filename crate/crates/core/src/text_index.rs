//! Per-field inverted index with Okapi BM25 and tf-idf scoring.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{descending, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Posting {
    pub doc_id: String,
    pub term_frequency: u32,
}

/// Term → postings for one field, plus the length statistics BM25 needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvertedIndex {
    pub field_name: String,
    postings: BTreeMap<String, Vec<Posting>>,
    doc_length: BTreeMap<String, usize>,
    avg_doc_length: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bm25Params<T> {
    pub k1: T,
    pub b: T,
}

impl<T: Scalar> Default for Bm25Params<T> {
    fn default() -> Self {
        Bm25Params {
            k1: T::of(1.2),
            b: T::of(0.75),
        }
    }
}

impl<T: Scalar> Bm25Params<T> {
    pub fn new(k1: T, b: T) -> Result<Self> {
        if !(k1 >= T::zero()) || !(b >= T::zero() && b <= T::one()) {
            return Err(Error::InvalidArgument(format!(
                "bm25 parameters out of range: k1={k1}, b={b}"
            )));
        }
        Ok(Bm25Params { k1, b })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scorer {
    Bm25,
    Tfidf,
}

impl InvertedIndex {
    /// Builds the index. The result does not depend on the order of `docs`.
    pub fn build<I, D, S>(field_name: &str, docs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (D, Vec<S>)>,
        D: Into<String>,
        S: AsRef<str>,
    {
        let mut doc_length = BTreeMap::new();
        let mut postings: BTreeMap<String, Vec<Posting>> = BTreeMap::new();
        for (doc_id, tokens) in docs {
            let doc_id = doc_id.into();
            if doc_length.contains_key(&doc_id) {
                return Err(Error::DuplicateDoc(doc_id));
            }
            let mut counts: HashMap<&str, u32> = HashMap::new();
            for t in &tokens {
                *counts.entry(t.as_ref()).or_default() += 1;
            }
            for (term, tf) in counts {
                postings.entry(term.to_string()).or_default().push(Posting {
                    doc_id: doc_id.clone(),
                    term_frequency: tf,
                });
            }
            doc_length.insert(doc_id, tokens.len());
        }
        for list in postings.values_mut() {
            list.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));
        }
        // Summing in doc_id order keeps the mean bit-identical across input orders.
        let total: usize = doc_length.values().sum();
        let avg_doc_length = if doc_length.is_empty() {
            0.0
        } else {
            total as f64 / doc_length.len() as f64
        };
        Ok(InvertedIndex {
            field_name: field_name.to_string(),
            postings,
            doc_length,
            avg_doc_length,
        })
    }

    pub fn doc_count(&self) -> usize {
        self.doc_length.len()
    }

    pub fn avg_doc_length(&self) -> f64 {
        self.avg_doc_length
    }

    pub fn doc_length(&self, doc_id: &str) -> Option<usize> {
        self.doc_length.get(doc_id).copied()
    }

    pub fn contains(&self, doc_id: &str) -> bool {
        self.doc_length.contains_key(doc_id)
    }

    pub fn postings(&self, term: &str) -> &[Posting] {
        self.postings.get(term).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.postings.keys().map(String::as_str)
    }

    pub fn doc_ids(&self) -> impl Iterator<Item = &str> {
        self.doc_length.keys().map(String::as_str)
    }

    pub fn doc_frequency(&self, term: &str) -> usize {
        self.postings(term).len()
    }

    pub fn term_frequency(&self, term: &str, doc_id: &str) -> u32 {
        let list = self.postings(term);
        list.binary_search_by(|p| p.doc_id.as_str().cmp(doc_id))
            .map(|i| list[i].term_frequency)
            .unwrap_or(0)
    }

    fn check_doc(&self, doc_id: &str) -> Result<usize> {
        self.doc_length(doc_id)
            .ok_or_else(|| Error::UnknownDoc(doc_id.to_string()))
    }

    /// `ln((N - df + 0.5) / (df + 0.5) + 1)`, never negative.
    pub fn bm25_idf<T: Scalar>(&self, term: &str) -> T {
        let n = T::of_usize(self.doc_count());
        let df = T::of_usize(self.doc_frequency(term));
        let half = T::of(0.5);
        ((n - df + half) / (df + half) + T::one()).ln()
    }

    pub fn bm25_score<T: Scalar, S: AsRef<str>>(
        &self,
        params: &Bm25Params<T>,
        query: &[S],
        doc_id: &str,
    ) -> Result<T> {
        let len = T::of_usize(self.check_doc(doc_id)?);
        let avgdl = T::of(self.avg_doc_length);
        let norm = T::one() - params.b + params.b * len / avgdl;
        let mut score = T::zero();
        for term in distinct(query) {
            let tf = self.term_frequency(term, doc_id);
            if tf == 0 {
                continue;
            }
            let tf = T::of(tf as f64);
            score += self.bm25_idf::<T>(term) * tf * (params.k1 + T::one())
                / (tf + params.k1 * norm);
        }
        Ok(score)
    }

    /// `Σ (1 + ln tf) · ln(N / df)` over distinct matching query terms.
    pub fn tfidf_score<T: Scalar, S: AsRef<str>>(&self, query: &[S], doc_id: &str) -> Result<T> {
        self.check_doc(doc_id)?;
        let n = T::of_usize(self.doc_count());
        let mut score = T::zero();
        for term in distinct(query) {
            let tf = self.term_frequency(term, doc_id);
            if tf == 0 {
                continue;
            }
            let df = T::of_usize(self.doc_frequency(term));
            score += (T::one() + T::of(tf as f64).ln()) * (n / df).ln();
        }
        Ok(score)
    }

    /// Top-`k` documents with positive score, ties by ascending doc id.
    pub fn search<T: Scalar, S: AsRef<str>>(
        &self,
        params: &Bm25Params<T>,
        query: &[S],
        k: usize,
        scorer: Scorer,
    ) -> Vec<(String, T)> {
        let candidates: BTreeSet<&str> = distinct(query)
            .flat_map(|t| self.postings(t).iter().map(|p| p.doc_id.as_str()))
            .collect();
        let mut hits: Vec<(String, T)> = candidates
            .into_iter()
            .filter_map(|doc| {
                let s = match scorer {
                    Scorer::Bm25 => self.bm25_score(params, query, doc),
                    Scorer::Tfidf => self.tfidf_score(query, doc),
                }
                .ok()?;
                (s > T::zero()).then(|| (doc.to_string(), s))
            })
            .collect();
        sort_ranked(&mut hits);
        hits.truncate(k);
        hits
    }
}

/// Sorts `(doc_id, score)` by score descending, then doc id ascending.
pub fn sort_ranked<T: Scalar>(hits: &mut [(String, T)]) {
    hits.sort_by(|a, b| descending(a.1, b.1).then_with(|| a.0.cmp(&b.0)));
}

fn distinct<S: AsRef<str>>(query: &[S]) -> impl Iterator<Item = &str> {
    let mut seen = BTreeSet::new();
    query
        .iter()
        .map(AsRef::as_ref)
        .filter(move |t| seen.insert(*t))
}
