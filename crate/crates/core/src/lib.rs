//! Food-review analytics: star-class sentiment with a bidirectional LSTM,
//! adjective-noun opinion tags from dependency annotations, and review
//! search that re-ranks BM25/semantic/category features with RankNet.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the scalar for the common cases.

pub mod corpus;
pub mod embeddings;
pub mod error;
pub mod ltr;
pub mod scalar;
pub mod search;
pub mod sentiment;
pub mod tagging;
pub mod text_index;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type LstmModel64 = sentiment::LstmModel<f64>;
pub type LstmModel32 = sentiment::LstmModel<f32>;
pub type SentimentClassifier64 = sentiment::SentimentClassifier<f64>;
pub type EmbeddingTable64 = embeddings::EmbeddingTable<f64>;
pub type EmbeddingTable32 = embeddings::EmbeddingTable<f32>;
pub type Bm25Params64 = text_index::Bm25Params<f64>;
pub type RankNet64 = ltr::RankNet<f64>;
pub type Ranker64 = ltr::Ranker<f64>;
pub type FeatureVector64 = ltr::FeatureVector<f64>;
pub type SearchEngine64 = search::SearchEngine<f64>;
pub type SearchEngine32 = search::SearchEngine<f32>;
pub type SearchResult64 = search::SearchResult<f64>;
