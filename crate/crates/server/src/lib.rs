//! HTTP JSON API: search, review browsing with coloured tags, and review
//! submission with live sentiment prediction.
//!
//! Readers clone an `Arc` of the current [`EngineState`]; a submission builds
//! a complete new state under a writer lock and swaps it in, so every request
//! sees one consistent snapshot.

mod error;
mod state;

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::{Arc, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::routing::{get, post};
use axum::{Json, Router};
use plateful::corpus::{normalize_categories, FoodService, Review};
use plateful::search::{Mode, SearchConfig};
use plateful::sentiment::Polarity;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tokio::sync::Mutex;

pub use error::ApiError;
pub use state::{Analysis, EngineState, TagView};

pub const DEFAULT_PAGE_SIZE: usize = 20;
pub const MAX_PAGE_SIZE: usize = 200;

struct Shared {
    snapshot: RwLock<Arc<EngineState>>,
    writer: Mutex<()>,
}

/// Cheaply cloneable handle shared by every request.
#[derive(Clone)]
pub struct AppState {
    shared: Arc<Shared>,
}

impl AppState {
    pub fn new(state: EngineState) -> Self {
        AppState {
            shared: Arc::new(Shared {
                snapshot: RwLock::new(Arc::new(state)),
                writer: Mutex::new(()),
            }),
        }
    }

    pub fn snapshot(&self) -> Arc<EngineState> {
        self.shared
            .snapshot
            .read()
            .unwrap_or_else(|e| e.into_inner())
            .clone()
    }

    fn swap(&self, state: EngineState) {
        *self.shared.snapshot.write().unwrap_or_else(|e| e.into_inner()) = Arc::new(state);
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/health", get(health))
        .route("/api/services", get(list_services))
        .route("/api/services/{id}/reviews", get(list_reviews))
        .route("/api/search", get(search))
        .route("/api/reviews", post(submit_review))
        .with_state(state)
}

/// Binds `addr` and serves until the process is stopped.
pub async fn serve(state: EngineState, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(AppState::new(state))).await
}

async fn health() -> Json<Value> {
    Json(json!({ "status": "ok" }))
}

#[derive(Debug, Serialize)]
struct ServiceView<'a> {
    #[serde(flatten)]
    service: &'a FoodService,
    review_count: usize,
    /// Mean star class (0-4) of the service's reviews.
    average_label: Option<f64>,
}

async fn list_services(State(app): State<AppState>) -> Json<Value> {
    let snap = app.snapshot();
    let corpus = &snap.engine.corpus;
    let views: Vec<ServiceView> = corpus
        .services
        .iter()
        .map(|s| {
            let labels: Vec<f64> = corpus
                .reviews
                .iter()
                .filter(|r| r.service_id == s.id)
                .map(|r| r.label as f64)
                .collect();
            ServiceView {
                service: s,
                review_count: labels.len(),
                average_label: (!labels.is_empty())
                    .then(|| labels.iter().sum::<f64>() / labels.len() as f64),
            }
        })
        .collect();
    Json(json!(views))
}

fn param<T: std::str::FromStr>(
    params: &HashMap<String, String>,
    name: &str,
    default: T,
) -> Result<T, ApiError> {
    match params.get(name) {
        None => Ok(default),
        Some(raw) => raw
            .trim()
            .parse()
            .map_err(|_| ApiError::BadRequest(format!("invalid `{name}`: `{raw}`"))),
    }
}

#[derive(Debug, Serialize)]
struct ReviewView<'a> {
    id: &'a str,
    service_id: &'a str,
    text: &'a str,
    categories: &'a [String],
    timestamp: i64,
    #[serde(flatten)]
    analysis: &'a Analysis,
}

async fn list_reviews(
    State(app): State<AppState>,
    Path(id): Path<String>,
    Query(params): Query<HashMap<String, String>>,
) -> Result<Json<Value>, ApiError> {
    let snap = app.snapshot();
    if snap.engine.corpus.service(&id).is_none() {
        return Err(ApiError::NotFound(format!("unknown service `{id}`")));
    }
    let page: usize = param(&params, "page", 1)?;
    let page_size: usize = param(&params, "page_size", DEFAULT_PAGE_SIZE)?;
    if page == 0 || page_size == 0 || page_size > MAX_PAGE_SIZE {
        return Err(ApiError::BadRequest(format!(
            "page must be at least 1 and page_size within 1..={MAX_PAGE_SIZE}"
        )));
    }
    let mut reviews: Vec<&Review> = snap
        .engine
        .corpus
        .reviews
        .iter()
        .filter(|r| r.service_id == id)
        .collect();
    reviews.sort_by(|a, b| b.timestamp.cmp(&a.timestamp).then_with(|| a.id.cmp(&b.id)));
    let total = reviews.len();
    let views: Vec<ReviewView> = reviews
        .into_iter()
        .skip((page - 1).saturating_mul(page_size))
        .take(page_size)
        .map(|r| ReviewView {
            id: &r.id,
            service_id: &r.service_id,
            text: &r.text,
            categories: &r.categories,
            timestamp: r.timestamp,
            analysis: snap.analysis(&r.id).expect("analysis cached for every review"),
        })
        .collect();
    Ok(Json(json!({
        "service_id": id,
        "page": page,
        "page_size": page_size,
        "total": total,
        "reviews": views,
    })))
}

#[derive(Debug, Serialize)]
struct ResultView<'a> {
    doc_id: String,
    rank: usize,
    score: f64,
    snippet: String,
    tags: &'a [TagView],
}

async fn search(
    State(app): State<AppState>,
    Query(params): Query<HashMap<String, String>>,
) -> Result<Json<Value>, ApiError> {
    let q = params
        .get("q")
        .map(|q| q.trim())
        .filter(|q| !q.is_empty())
        .ok_or_else(|| ApiError::BadRequest("missing query parameter `q`".into()))?;
    let snap = app.snapshot();
    let mode: Mode = match params.get("mode") {
        None => snap.search.mode,
        Some(m) => m.parse()?,
    };
    let k: usize = param(&params, "k", snap.search.result_count)?;
    let config = SearchConfig {
        candidate_depth: snap.search.candidate_depth.max(k),
        result_count: k,
        mode,
    };
    let results = snap.engine.run_query(q, &config)?;
    let views: Vec<ResultView> = results
        .into_iter()
        .map(|r| ResultView {
            tags: snap.analysis(&r.doc_id).map_or(&[], |a| &a.tags),
            doc_id: r.doc_id,
            rank: r.rank,
            score: r.score,
            snippet: r.snippet,
        })
        .collect();
    Ok(Json(json!({ "query": q, "mode": mode, "results": views })))
}

/// A review as submitted: the corpus schema without a label.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NewReview {
    #[serde(default)]
    id: Option<String>,
    service_id: String,
    text: String,
    #[serde(default)]
    categories: Vec<String>,
    #[serde(default)]
    timestamp: Option<i64>,
}

#[derive(Debug, Serialize)]
struct Submitted {
    review: Review,
    sentiment_class: usize,
    polarity: Polarity,
    probabilities: Vec<f64>,
    tags: Vec<TagView>,
}

fn fresh_id(state: &EngineState) -> String {
    let corpus = &state.engine.corpus;
    (corpus.reviews.len() + 1..)
        .map(|n| format!("u{n:04}"))
        .find(|id| corpus.review(id).is_none())
        .expect("unbounded id space")
}

async fn submit_review(
    State(app): State<AppState>,
    body: Bytes,
) -> Result<(StatusCode, Json<Submitted>), ApiError> {
    let new: NewReview = serde_json::from_slice(&body)
        .map_err(|e| ApiError::BadRequest(format!("malformed review: {e}")))?;
    if new.text.trim().is_empty() {
        return Err(ApiError::BadRequest("review text is empty".into()));
    }
    if new.id.as_deref().is_some_and(|id| id.trim().is_empty()) {
        return Err(ApiError::BadRequest("review id is empty".into()));
    }

    let _writer = app.shared.writer.lock().await;
    let current = app.snapshot();
    let classifier = current
        .sentiment
        .as_ref()
        .ok_or_else(|| ApiError::Conflict("sentiment model not loaded".into()))?;
    let service = current
        .engine
        .corpus
        .service(&new.service_id)
        .ok_or_else(|| ApiError::NotFound(format!("unknown service `{}`", new.service_id)))?;
    let id = new.id.unwrap_or_else(|| fresh_id(&current));
    if current.engine.corpus.review(&id).is_some() {
        return Err(ApiError::Conflict(format!("review `{id}` already exists")));
    }
    let (class, probabilities) = classifier.predict(&new.text)?;
    let categories = if new.categories.is_empty() {
        service.categories.clone()
    } else {
        normalize_categories(&new.categories)
    };
    let timestamp = new.timestamp.unwrap_or_else(|| {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs() as i64)
    });
    let review = Review {
        id,
        service_id: new.service_id,
        text: new.text,
        label: class as u8,
        categories,
        timestamp,
    };

    let stored = review.clone();
    let next = tokio::task::spawn_blocking(move || current.with_review(stored))
        .await
        .map_err(|e| ApiError::Task(e.to_string()))??;
    let analysis = next.analysis(&review.id).cloned().expect("analysis of the new review");
    app.swap(next);
    Ok((
        StatusCode::CREATED,
        Json(Submitted {
            review,
            sentiment_class: analysis.sentiment_class,
            polarity: analysis.polarity,
            probabilities,
            tags: analysis.tags,
        }),
    ))
}
