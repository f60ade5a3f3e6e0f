use std::collections::HashMap;

use plateful::corpus::Review;
use plateful::search::SearchConfig;
use plateful::sentiment::{polarity, Polarity};
use plateful::tagging::{text_tags, TagPair};
use plateful::{Result, SearchEngine64, SentimentClassifier64};
use serde::Serialize;

/// A tag as shown next to a review: its text and colour.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TagView {
    pub text: String,
    pub polarity: Polarity,
    pub negated: bool,
}

impl TagView {
    pub fn new(pair: &TagPair, review: Polarity) -> Self {
        TagView {
            text: pair.to_string(),
            polarity: pair.polarity(review),
            negated: pair.negated,
        }
    }
}

/// Cached per-review analysis: sentiment class, polarity and coloured tags.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Analysis {
    pub sentiment_class: usize,
    pub polarity: Polarity,
    pub tags: Vec<TagView>,
}

impl Analysis {
    pub fn of(text: &str, sentiment_class: usize) -> Result<Self> {
        let polarity = polarity(sentiment_class)?;
        let tags = text_tags(text).iter().map(|p| TagView::new(p, polarity)).collect();
        Ok(Analysis {
            sentiment_class,
            polarity,
            tags,
        })
    }
}

/// One immutable snapshot of everything the API serves.
///
/// Stored reviews use their label as the sentiment class; submitted reviews
/// are stored with the predicted class as their label.
#[derive(Debug, Clone)]
pub struct EngineState {
    pub engine: SearchEngine64,
    pub sentiment: Option<SentimentClassifier64>,
    pub search: SearchConfig,
    precomputed: Option<HashMap<String, Vec<f64>>>,
    analyses: HashMap<String, Analysis>,
}

impl EngineState {
    /// `precomputed` holds the document vectors the engine was built with, so
    /// rebuilds keep them.
    pub fn new(
        engine: SearchEngine64,
        sentiment: Option<SentimentClassifier64>,
        precomputed: Option<HashMap<String, Vec<f64>>>,
    ) -> Result<Self> {
        let analyses = engine
            .corpus
            .reviews
            .iter()
            .map(|r| Ok((r.id.clone(), Analysis::of(&r.text, r.label as usize)?)))
            .collect::<Result<_>>()?;
        Ok(EngineState {
            engine,
            sentiment,
            search: SearchConfig::default(),
            precomputed,
            analyses,
        })
    }

    pub fn with_search_config(mut self, search: SearchConfig) -> Self {
        self.search = search;
        self
    }

    pub fn analysis(&self, review_id: &str) -> Option<&Analysis> {
        self.analyses.get(review_id)
    }

    /// A full rebuild with `review` appended; `self` is left untouched.
    pub fn with_review(&self, review: Review) -> Result<Self> {
        let corpus = self.engine.corpus.with_review(review.clone())?;
        let engine = SearchEngine64::build(
            corpus,
            self.engine.embeddings.clone(),
            self.precomputed.as_ref(),
        )?
        .with_ranker(self.engine.ranker.clone());
        let mut analyses = self.analyses.clone();
        analyses.insert(review.id.clone(), Analysis::of(&review.text, review.label as usize)?);
        Ok(EngineState {
            engine,
            sentiment: self.sentiment.clone(),
            search: self.search,
            precomputed: self.precomputed.clone(),
            analyses,
        })
    }
}
