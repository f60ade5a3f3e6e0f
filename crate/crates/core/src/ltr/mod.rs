//! Learning to rank: query-document similarity features, pairwise training
//! data and a RankNet re-ranker.

mod ranknet;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::corpus::RelevanceJudgment;
use crate::embeddings::cosine;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::text_index::{sort_ranked, Bm25Params, InvertedIndex};

pub use ranknet::{
    pairwise_loss, train_ranknet, RankNet, RankNetConfig, Ranker, RANKNET_CHECKPOINT_VERSION,
};

pub const NUM_FEATURES: usize = 3;

/// Text BM25, semantic cosine and category BM25, always in that order.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FeatureVector<T> {
    pub text_bm25: T,
    pub semantic_cosine: T,
    pub category_bm25: T,
}

impl<T: Scalar> FeatureVector<T> {
    pub fn new(text_bm25: T, semantic_cosine: T, category_bm25: T) -> Self {
        FeatureVector {
            text_bm25,
            semantic_cosine,
            category_bm25,
        }
    }

    pub fn to_array(self) -> [T; NUM_FEATURES] {
        [self.text_bm25, self.semantic_cosine, self.category_bm25]
    }

    pub fn from_array(a: [T; NUM_FEATURES]) -> Self {
        FeatureVector::new(a[0], a[1], a[2])
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }
}

/// Per-feature range seen on the training set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureStats<T> {
    pub min: [T; NUM_FEATURES],
    pub max: [T; NUM_FEATURES],
}

impl<T: Scalar> FeatureStats<T> {
    pub fn new(min: [T; NUM_FEATURES], max: [T; NUM_FEATURES]) -> Result<Self> {
        for i in 0..NUM_FEATURES {
            if !(min[i].is_finite() && max[i].is_finite() && min[i] <= max[i]) {
                return Err(Error::InvalidArgument(format!(
                    "feature {i}: min {} / max {} is not a finite range",
                    min[i], max[i]
                )));
            }
        }
        Ok(FeatureStats { min, max })
    }

    pub fn fit<'a, I>(features: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a FeatureVector<T>>,
    {
        let mut min = [T::infinity(); NUM_FEATURES];
        let mut max = [T::neg_infinity(); NUM_FEATURES];
        let mut seen = false;
        for f in features {
            seen = true;
            for (i, v) in f.to_array().into_iter().enumerate() {
                min[i] = min[i].min(v);
                max[i] = max[i].max(v);
            }
        }
        if !seen {
            return Err(Error::EmptyDataset);
        }
        FeatureStats::new(min, max)
    }
}

/// Min-max scaling into `[0, 1]`, clamped; a constant feature maps to 0.5.
pub fn normalize<T: Scalar>(features: &FeatureVector<T>, stats: &FeatureStats<T>) -> FeatureVector<T> {
    let x = features.to_array();
    let mut out = [T::zero(); NUM_FEATURES];
    for i in 0..NUM_FEATURES {
        let range = stats.max[i] - stats.min[i];
        out[i] = if range <= T::zero() {
            T::of(0.5)
        } else {
            ((x[i] - stats.min[i]) / range).max(T::zero()).min(T::one())
        };
    }
    FeatureVector::from_array(out)
}

/// Scores one judged or candidate document for a query.
#[allow(clippy::too_many_arguments)]
pub fn extract_features<T: Scalar, S: AsRef<str>>(
    params: &Bm25Params<T>,
    query_tokens: &[S],
    query_vector: &[T],
    doc_id: &str,
    text_index: &InvertedIndex,
    category_index: &InvertedIndex,
    doc_vectors: &HashMap<String, Vec<T>>,
) -> Result<FeatureVector<T>> {
    let doc_vector = doc_vectors
        .get(doc_id)
        .ok_or_else(|| Error::UnknownDoc(doc_id.to_string()))?;
    Ok(FeatureVector {
        text_bm25: text_index.bm25_score(params, query_tokens, doc_id)?,
        semantic_cosine: cosine(query_vector, doc_vector)?,
        category_bm25: category_index.bm25_score(params, query_tokens, doc_id)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingPair<T> {
    pub query_id: String,
    pub features_pos: FeatureVector<T>,
    pub features_neg: FeatureVector<T>,
}

/// Features keyed by `(query_id, doc_id)`.
pub type FeatureStore<T> = BTreeMap<(String, String), FeatureVector<T>>;

/// Every relevant × irrelevant document combination within each query,
/// ordered by query, then relevant doc id, then irrelevant doc id.
pub fn build_training_pairs<T: Scalar>(
    judgments: &[RelevanceJudgment],
    features: &FeatureStore<T>,
) -> Result<Vec<TrainingPair<T>>> {
    let mut by_query: BTreeMap<&str, (BTreeSet<&str>, BTreeSet<&str>)> = BTreeMap::new();
    for j in judgments {
        let entry = by_query.entry(&j.query_id).or_default();
        if j.label > 0 {
            entry.0.insert(&j.doc_id);
        } else {
            entry.1.insert(&j.doc_id);
        }
    }
    let lookup = |q: &str, d: &str| {
        features
            .get(&(q.to_string(), d.to_string()))
            .copied()
            .ok_or_else(|| Error::InvalidArgument(format!("no features for ({q}, {d})")))
    };
    let mut pairs = Vec::new();
    for (query, (relevant, irrelevant)) in by_query {
        for pos in &relevant {
            let features_pos = lookup(query, pos)?;
            for neg in &irrelevant {
                pairs.push(TrainingPair {
                    query_id: query.to_string(),
                    features_pos,
                    features_neg: lookup(query, neg)?,
                });
            }
        }
    }
    Ok(pairs)
}

/// Orders candidates by model score, ties by doc id. Output is a
/// permutation of the input.
pub fn rerank<T: Scalar>(
    model: &RankNet<T>,
    stats: &FeatureStats<T>,
    candidates: &[(String, FeatureVector<T>)],
) -> Vec<(String, T)> {
    let mut scored: Vec<(String, T)> = candidates
        .iter()
        .map(|(id, f)| (id.clone(), model.score(&normalize(f, stats))))
        .collect();
    sort_ranked(&mut scored);
    scored
}
