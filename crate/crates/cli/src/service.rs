//! JSON-over-HTTP front end.
//!
//! Routes: `POST /v1/check`, `GET /v1/articles/{id}`, `POST /v1/ingest`
//! (only when `allow_ingest` is set) and `GET /v1/health`. Errors are
//! `{"error", "detail"}` objects with a 4xx status for bad requests and a
//! 5xx status when a scorer backend fails.

use std::net::SocketAddr;
use std::sync::{Arc, RwLock};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use scichk_core::claims::ClaimError;
use scichk_core::scorers::ScorerError;
use scichk_core::{parse_claim, ClaimQuery, ClaimVerb, Corpus, PipelineError};
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;
use tower_http::cors::{AllowOrigin, Any, CorsLayer};

use crate::config::{ConfigError, EngineConfig};
use crate::engine::Engine;

#[derive(Clone)]
pub struct AppState {
    engine: Arc<Engine>,
    corpus: Arc<RwLock<Arc<Corpus>>>,
    allow_ingest: bool,
}

impl AppState {
    pub fn new(engine: Engine, corpus: Corpus, allow_ingest: bool) -> Self {
        Self {
            engine: Arc::new(engine),
            corpus: Arc::new(RwLock::new(Arc::new(corpus))),
            allow_ingest,
        }
    }

    /// The corpus as of now; later ingests do not affect the snapshot.
    pub fn snapshot(&self) -> Arc<Corpus> {
        self.corpus.read().expect("corpus lock poisoned").clone()
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    error: &'static str,
    detail: String,
}

impl ApiError {
    fn new(status: StatusCode, error: &'static str, detail: impl Into<String>) -> Self {
        Self {
            status,
            error,
            detail: detail.into(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.error, "detail": self.detail }))).into_response()
    }
}

impl From<ClaimError> for ApiError {
    fn from(e: ClaimError) -> Self {
        let name = match e {
            ClaimError::NoVerbMatch(_) => "NoVerbMatch",
            ClaimError::EmptySlot(_) => "EmptySlot",
            ClaimError::NotAQuestion(_) => "NotAQuestion",
        };
        ApiError::new(StatusCode::BAD_REQUEST, name, e.to_string())
    }
}

impl From<PipelineError> for ApiError {
    fn from(e: PipelineError) -> Self {
        let (status, name) = match &e {
            PipelineError::Scorer(ScorerError::BackendTimeout { .. }) => (StatusCode::GATEWAY_TIMEOUT, "BackendTimeout"),
            PipelineError::Scorer(ScorerError::BackendUnreachable { .. }) => (StatusCode::BAD_GATEWAY, "BackendUnreachable"),
            PipelineError::Scorer(ScorerError::BackendStatus { .. }) => (StatusCode::BAD_GATEWAY, "BackendStatus"),
            PipelineError::Scorer(ScorerError::BackendProtocol { .. }) => (StatusCode::BAD_GATEWAY, "BackendProtocol"),
            err if err.is_backend() => (StatusCode::BAD_GATEWAY, "SpanOutOfWindow"),
            _ => (StatusCode::INTERNAL_SERVER_ERROR, "Internal"),
        };
        ApiError::new(status, name, e.to_string())
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum CheckRequest {
    Question { question: String },
    Slots { agent: String, verb: String, disease: String },
}

fn parse_check_request(body: &[u8]) -> Result<ClaimQuery, ApiError> {
    let req: CheckRequest = serde_json::from_slice(body).map_err(|_| {
        ApiError::new(
            StatusCode::BAD_REQUEST,
            "BadRequest",
            "expected a JSON object with either \"question\" or \"agent\", \"verb\" and \"disease\" strings",
        )
    })?;
    Ok(match req {
        CheckRequest::Question { question } => parse_claim(&question)?,
        CheckRequest::Slots { agent, verb, disease } => {
            let verb: ClaimVerb = verb.parse()?;
            ClaimQuery::new(&agent, verb, &disease)?
        }
    })
}

fn json_body(status: StatusCode, body: String) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

async fn check(State(state): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let claim = parse_check_request(&body)?;
    let corpus = state.snapshot();
    let engine = state.engine.clone();
    let report = tokio::task::spawn_blocking(move || engine.check(&corpus, &claim))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "Internal", e.to_string()))??;
    Ok(json_body(StatusCode::OK, report.to_json() + "\n"))
}

async fn article(State(state): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let corpus = state.snapshot();
    let doc = corpus
        .get(&id)
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "NotFound", format!("no article with id {id:?}")))?;
    let body = serde_json::to_string_pretty(doc)
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "Internal", e.to_string()))?;
    Ok(json_body(StatusCode::OK, body + "\n"))
}

#[derive(Serialize)]
struct IngestResponse {
    ingested: usize,
    skipped: usize,
    documents: usize,
    errors: Vec<String>,
}

async fn ingest(State(state): State<AppState>, body: Bytes) -> Result<Json<IngestResponse>, ApiError> {
    if !state.allow_ingest {
        return Err(ApiError::new(
            StatusCode::FORBIDDEN,
            "IngestDisabled",
            "ingest is disabled; set allow_ingest = true to enable it",
        ));
    }
    tokio::task::spawn_blocking(move || {
        let mut slot = state.corpus.write().expect("corpus lock poisoned");
        let mut next = Corpus::clone(&slot);
        let report = next
            .ingest_jsonl(&body[..])
            .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "BadRequest", e.to_string()))?;
        let documents = next.len();
        *slot = Arc::new(next);
        Ok(Json(IngestResponse {
            ingested: report.stats.ingested,
            skipped: report.stats.skipped,
            documents,
            errors: report.errors.iter().map(ToString::to_string).collect(),
        }))
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "Internal", e.to_string()))?
}

async fn health(State(state): State<AppState>) -> Json<serde_json::Value> {
    Json(json!({ "status": "ok", "documents": state.snapshot().len() }))
}

async fn not_found() -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "NotFound", "no such route")
}

fn cors(origin: Option<&str>) -> Result<CorsLayer, ConfigError> {
    let allow = match origin {
        None | Some("*") => AllowOrigin::from(Any),
        Some(o) => AllowOrigin::exact(
            HeaderValue::from_str(o).map_err(|e| ConfigError::Invalid(format!("cors_origin {o:?}: {e}")))?,
        ),
    };
    Ok(CorsLayer::new()
        .allow_origin(allow)
        .allow_methods([Method::GET, Method::POST])
        .allow_headers([header::CONTENT_TYPE]))
}

pub fn router(state: AppState, cors_origin: Option<&str>) -> Result<Router, ConfigError> {
    Ok(Router::new()
        .route("/v1/check", post(check))
        .route("/v1/articles/{id}", get(article))
        .route("/v1/ingest", post(ingest))
        .route("/v1/health", get(health))
        .fallback(not_found)
        .layer(cors(cors_origin)?)
        .with_state(state))
}

#[derive(Debug, Error)]
pub enum ServeError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("corpus: {0}")]
    Corpus(#[from] scichk_core::CorpusError),
    #[error("cannot bind {addr}: {source}")]
    Bind { addr: String, source: std::io::Error },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Loads the corpus named by the config and serves until Ctrl-C.
pub fn serve(config: &EngineConfig) -> Result<(), ServeError> {
    let engine = Engine::new(config)?;
    let path = config
        .corpus
        .as_deref()
        .ok_or_else(|| ConfigError::Invalid("serve needs a corpus path (key `corpus`)".into()))?;
    let (corpus, load) = Corpus::load(path)?;
    for e in &load.errors {
        eprintln!("scichk: skipped corpus entry: {e}");
    }
    let app = router(AppState::new(engine, corpus, config.allow_ingest), config.cors_origin.as_deref())?;

    let runtime = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(&config.bind)
            .await
            .map_err(|source| ServeError::Bind {
                addr: config.bind.clone(),
                source,
            })?;
        let addr: SocketAddr = listener.local_addr()?;
        eprintln!("scichk: serving {} documents on http://{addr}", load.stats.ingested);
        axum::serve(listener, app)
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await?;
        Ok(())
    })
}
