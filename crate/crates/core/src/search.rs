//! Query pipeline (lexical baselines or cosine first pass plus RankNet
//! re-rank) and the MAP@k / MRR evaluation harness.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{tokenize, Corpus, Query, RelevanceJudgment};
use crate::embeddings::{cosine, EmbeddingTable};
use crate::error::{Error, Result};
use crate::ltr::{
    build_training_pairs, extract_features, rerank, FeatureStore, FeatureVector, RankNetConfig,
    Ranker,
};
use crate::scalar::Scalar;
use crate::text_index::{sort_ranked, Bm25Params, InvertedIndex, Scorer};

pub const SNIPPET_CHARS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Tfidf,
    Bm25,
    Ranknet,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Tfidf, Mode::Bm25, Mode::Ranknet];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Tfidf => "tfidf",
            Mode::Bm25 => "bm25",
            Mode::Ranknet => "ranknet",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tfidf" => Ok(Mode::Tfidf),
            "bm25" => Ok(Mode::Bm25),
            "ranknet" => Ok(Mode::Ranknet),
            other => Err(Error::InvalidArgument(format!("unknown search mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// First-pass candidates handed to the re-ranker.
    pub candidate_depth: usize,
    pub result_count: usize,
    pub mode: Mode,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            candidate_depth: 50,
            result_count: 10,
            mode: Mode::Bm25,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.result_count == 0 || self.candidate_depth == 0 {
            return Err(Error::InvalidArgument(
                "result count and candidate depth must be positive".into(),
            ));
        }
        if self.result_count > self.candidate_depth {
            return Err(Error::InvalidArgument(format!(
                "result count {} exceeds candidate depth {}",
                self.result_count, self.candidate_depth
            )));
        }
        Ok(())
    }

    pub fn with_mode(self, mode: Mode) -> Self {
        SearchConfig { mode, ..self }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult<T> {
    pub doc_id: String,
    pub score: T,
    pub rank: usize,
    pub snippet: String,
}

fn snippet(text: &str) -> String {
    text.chars().take(SNIPPET_CHARS).collect()
}

/// Tokens of a review's category list, used as the category field.
pub fn category_tokens(categories: &[String]) -> Vec<String> {
    categories.iter().flat_map(|c| tokenize(c)).collect()
}

/// Everything a query needs, immutable once built.
#[derive(Debug, Clone)]
pub struct SearchEngine<T> {
    pub corpus: Corpus,
    pub text_index: InvertedIndex,
    pub category_index: InvertedIndex,
    pub embeddings: EmbeddingTable<T>,
    pub doc_vectors: HashMap<String, Vec<T>>,
    pub ranker: Option<Ranker<T>>,
    pub bm25: Bm25Params<T>,
}

impl<T: Scalar> SearchEngine<T> {
    /// Indexes the corpus. Documents without a precomputed vector get the
    /// mean of their word vectors.
    pub fn build(
        corpus: Corpus,
        embeddings: EmbeddingTable<T>,
        precomputed: Option<&HashMap<String, Vec<T>>>,
    ) -> Result<Self> {
        let text_index = InvertedIndex::build(
            "text",
            corpus.reviews.iter().map(|r| (r.id.clone(), tokenize(&r.text))),
        )?;
        let category_index = InvertedIndex::build(
            "categories",
            corpus
                .reviews
                .iter()
                .map(|r| (r.id.clone(), category_tokens(&r.categories))),
        )?;
        let mut doc_vectors = HashMap::with_capacity(corpus.reviews.len());
        for r in &corpus.reviews {
            let v = match precomputed.and_then(|p| p.get(&r.id)) {
                Some(v) if v.len() == embeddings.dim() => v.clone(),
                Some(v) => {
                    return Err(Error::DimensionMismatch {
                        expected: embeddings.dim(),
                        actual: v.len(),
                    })
                }
                None => embeddings.embed(&tokenize(&r.text)),
            };
            doc_vectors.insert(r.id.clone(), v);
        }
        Ok(SearchEngine {
            corpus,
            text_index,
            category_index,
            embeddings,
            doc_vectors,
            ranker: None,
            bm25: Bm25Params::default(),
        })
    }

    pub fn with_ranker(mut self, ranker: Option<Ranker<T>>) -> Self {
        self.ranker = ranker;
        self
    }

    pub fn query_vector<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<T> {
        self.embeddings.embed(tokens)
    }

    pub fn features(&self, query_text: &str, doc_id: &str) -> Result<FeatureVector<T>> {
        let tokens = tokenize(query_text);
        let qv = self.query_vector(&tokens);
        self.features_for(&tokens, &qv, doc_id)
    }

    fn features_for(&self, tokens: &[String], qv: &[T], doc_id: &str) -> Result<FeatureVector<T>> {
        extract_features(
            &self.bm25,
            tokens,
            qv,
            doc_id,
            &self.text_index,
            &self.category_index,
            &self.doc_vectors,
        )
    }

    /// Features for every judged (query, document) pair.
    pub fn feature_store(
        &self,
        queries: &[Query],
        judgments: &[RelevanceJudgment],
    ) -> Result<FeatureStore<T>> {
        let texts: HashMap<&str, &str> = queries
            .iter()
            .map(|q| (q.id.as_str(), q.text.as_str()))
            .collect();
        let mut store = FeatureStore::new();
        for j in judgments {
            let text = texts.get(j.query_id.as_str()).ok_or_else(|| {
                Error::InvalidArgument(format!("judgment for unknown query `{}`", j.query_id))
            })?;
            store.insert(
                (j.query_id.clone(), j.doc_id.clone()),
                self.features(text, &j.doc_id)?,
            );
        }
        Ok(store)
    }

    /// Builds pairs from the judgments and trains a ranker on them.
    pub fn train_ranker(
        &self,
        queries: &[Query],
        judgments: &[RelevanceJudgment],
        config: &RankNetConfig,
    ) -> Result<(Ranker<T>, Vec<f64>)> {
        let store = self.feature_store(queries, judgments)?;
        let pairs = build_training_pairs(judgments, &store)?;
        Ranker::fit(store.values(), &pairs, config)
    }

    /// Exhaustive cosine ranking of all documents, truncated to `depth`.
    fn first_pass(&self, qv: &[T], depth: usize) -> Result<Vec<String>> {
        let mut scored = self
            .doc_vectors
            .iter()
            .map(|(id, v)| Ok((id.clone(), cosine(qv, v)?)))
            .collect::<Result<Vec<(String, T)>>>()?;
        sort_ranked(&mut scored);
        scored.truncate(depth);
        Ok(scored.into_iter().map(|(id, _)| id).collect())
    }

    /// Every document sharing a term with the query, best first. Unlike
    /// the index's own search this keeps zero-score matches (tf-idf gives a
    /// term found in every document an idf of 0).
    fn lexical(&self, tokens: &[String], k: usize, scorer: Scorer) -> Result<Vec<(String, T)>> {
        let matching: BTreeSet<&str> = tokens
            .iter()
            .flat_map(|t| self.text_index.postings(t).iter().map(|p| p.doc_id.as_str()))
            .collect();
        let mut scored = matching
            .into_iter()
            .map(|doc| {
                let score = match scorer {
                    Scorer::Bm25 => self.text_index.bm25_score(&self.bm25, tokens, doc)?,
                    Scorer::Tfidf => self.text_index.tfidf_score(tokens, doc)?,
                };
                Ok((doc.to_string(), score))
            })
            .collect::<Result<Vec<(String, T)>>>()?;
        sort_ranked(&mut scored);
        scored.truncate(k);
        Ok(scored)
    }

    pub fn run_query(&self, query_text: &str, config: &SearchConfig) -> Result<Vec<SearchResult<T>>> {
        config.validate()?;
        let tokens = tokenize(query_text);
        if tokens.is_empty() {
            if config.mode == Mode::Ranknet && self.ranker.is_none() {
                return Err(Error::MissingRanker);
            }
            return Ok(Vec::new());
        }
        let hits = match config.mode {
            Mode::Tfidf | Mode::Bm25 => {
                let scorer = if config.mode == Mode::Tfidf {
                    Scorer::Tfidf
                } else {
                    Scorer::Bm25
                };
                self.lexical(&tokens, config.result_count, scorer)?
            }
            Mode::Ranknet => {
                let ranker = self.ranker.as_ref().ok_or(Error::MissingRanker)?;
                let qv = self.query_vector(&tokens);
                if qv.iter().all(|v| *v == T::zero()) {
                    // No known word: the first pass has nothing to rank by.
                    return Ok(Vec::new());
                }
                let candidates = self
                    .first_pass(&qv, config.candidate_depth)?
                    .into_iter()
                    .map(|id| Ok((id.clone(), self.features_for(&tokens, &qv, &id)?)))
                    .collect::<Result<Vec<_>>>()?;
                let mut ranked = rerank(&ranker.model, &ranker.stats, &candidates);
                ranked.truncate(config.result_count);
                ranked
            }
        };
        Ok(hits
            .into_iter()
            .enumerate()
            .map(|(i, (doc_id, score))| SearchResult {
                snippet: self
                    .corpus
                    .review(&doc_id)
                    .map(|r| snippet(&r.text))
                    .unwrap_or_default(),
                doc_id,
                score,
                rank: i + 1,
            })
            .collect())
    }

    /// Runs every query in every mode with the same depth and result count.
    pub fn evaluate(
        &self,
        queries: &[Query],
        judgments: &[RelevanceJudgment],
        modes: &[Mode],
        config: &SearchConfig,
    ) -> Result<Vec<EvalReport>> {
        let mut relevant: BTreeMap<&str, BTreeSet<String>> = BTreeMap::new();
        let mut judged: BTreeSet<&str> = BTreeSet::new();
        for j in judgments {
            judged.insert(&j.query_id);
            let set = relevant.entry(&j.query_id).or_default();
            if j.label > 0 {
                set.insert(j.doc_id.clone());
            }
        }
        if let Some(q) = queries.iter().find(|q| !judged.contains(q.id.as_str())) {
            return Err(Error::NoJudgments(q.id.clone()));
        }
        modes
            .iter()
            .map(|&mode| {
                let cfg = config.with_mode(mode);
                let per_query = queries
                    .iter()
                    .map(|q| {
                        let ranked: Vec<String> = self
                            .run_query(&q.text, &cfg)?
                            .into_iter()
                            .map(|r| r.doc_id)
                            .collect();
                        Ok(QueryMetrics::compute(&q.id, &ranked, &relevant[q.id.as_str()]))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(EvalReport::from_queries(mode, per_query))
            })
            .collect()
    }
}

/// `(1/min(|rel|, k)) · Σ_{i ≤ k, dᵢ relevant} precision@i`, 0 without
/// relevant documents.
pub fn average_precision_at_k<S: AsRef<str>>(ranked: &[S], relevant: &BTreeSet<String>, k: usize) -> f64 {
    assert!(k >= 1, "k must be at least 1");
    if relevant.is_empty() {
        return 0.0;
    }
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (i, doc) in ranked.iter().take(k).enumerate() {
        if relevant.contains(doc.as_ref()) {
            hits += 1;
            sum += hits as f64 / (i + 1) as f64;
        }
    }
    sum / relevant.len().min(k) as f64
}

/// `1 / rank` of the first relevant document, 0 if none is retrieved.
pub fn reciprocal_rank<S: AsRef<str>>(ranked: &[S], relevant: &BTreeSet<String>) -> f64 {
    ranked
        .iter()
        .position(|d| relevant.contains(d.as_ref()))
        .map_or(0.0, |i| 1.0 / (i + 1) as f64)
}

pub const METRIC_NAMES: [&str; 4] = ["MAP@1", "MAP@3", "MAP@5", "MRR"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryMetrics {
    pub query_id: String,
    /// Keyed by the names in [`METRIC_NAMES`].
    pub metrics: BTreeMap<String, f64>,
}

impl QueryMetrics {
    fn compute(query_id: &str, ranked: &[String], relevant: &BTreeSet<String>) -> Self {
        let values = [
            average_precision_at_k(ranked, relevant, 1),
            average_precision_at_k(ranked, relevant, 3),
            average_precision_at_k(ranked, relevant, 5),
            reciprocal_rank(ranked, relevant),
        ];
        QueryMetrics {
            query_id: query_id.to_string(),
            metrics: METRIC_NAMES
                .iter()
                .map(|n| n.to_string())
                .zip(values)
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub mode: Mode,
    /// Means over queries, keyed by the names in [`METRIC_NAMES`].
    pub metrics: BTreeMap<String, f64>,
    pub per_query: Vec<QueryMetrics>,
}

impl EvalReport {
    fn from_queries(mode: Mode, per_query: Vec<QueryMetrics>) -> Self {
        let n = per_query.len().max(1) as f64;
        let metrics = METRIC_NAMES
            .iter()
            .map(|name| {
                let total: f64 = per_query.iter().map(|q| q.metrics[*name]).sum();
                (name.to_string(), total / n)
            })
            .collect();
        EvalReport {
            mode,
            metrics,
            per_query,
        }
    }

    pub fn metric(&self, name: &str) -> f64 {
        self.metrics.get(name).copied().unwrap_or(f64::NAN)
    }
}

/// Fixed-width table, one row per mode.
pub fn format_reports(reports: &[EvalReport]) -> String {
    let mut out = format!("{:<8}", "mode");
    for name in METRIC_NAMES {
        out.push_str(&format!("{name:>8}"));
    }
    out.push('\n');
    for r in reports {
        out.push_str(&format!("{:<8}", r.mode.as_str()));
        for name in METRIC_NAMES {
            out.push_str(&format!("{:>8.4}", r.metric(name)));
        }
        out.push('\n');
    }
    out
}
