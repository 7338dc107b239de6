use std::sync::Arc;
use std::time::Instant;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use motvec_core::analogy::solve_analogy;
use motvec_core::query::{cosine, neighbors, Scored};
use motvec_core::viz::{build_plot, ClusterPlot, VizRequest};
use motvec_core::Error as CoreError;

use crate::registry::{LoadedModel, ModelRegistry};

pub type AppState = Arc<ModelRegistry>;

#[derive(Debug)]
pub enum ApiError {
    UnknownModel(String),
    Oov(String),
    BadRequest(String),
    Internal(String),
}

impl From<CoreError> for ApiError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::OovWord(token) => ApiError::Oov(token),
            CoreError::InvalidArgument(_)
            | CoreError::TooFewPoints { .. }
            | CoreError::PerplexityTooLarge { .. }
            | CoreError::Shape(_) => ApiError::BadRequest(e.to_string()),
            other => ApiError::Internal(other.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, body) = match self {
            ApiError::UnknownModel(model) => (
                StatusCode::NOT_FOUND,
                json!({"error": "unknownModel", "message": format!("no model named {model:?}"), "model": model}),
            ),
            ApiError::Oov(token) => (
                StatusCode::UNPROCESSABLE_ENTITY,
                json!({"error": "oovWord", "message": format!("word not in vocabulary: {token}"), "token": token}),
            ),
            ApiError::BadRequest(message) => (
                StatusCode::BAD_REQUEST,
                json!({"error": "badRequest", "message": message}),
            ),
            ApiError::Internal(message) => (
                StatusCode::INTERNAL_SERVER_ERROR,
                json!({"error": "internal", "message": message}),
            ),
        };
        (status, Json(body)).into_response()
    }
}

/// Malformed or ill-typed JSON is a 400, not axum's default 422, which is
/// reserved here for out-of-vocabulary words.
fn parse<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body)
        .map_err(|e| ApiError::BadRequest(format!("invalid request body: {e}")))
}

fn model<'a>(registry: &'a ModelRegistry, name: Option<&str>) -> Result<&'a LoadedModel, ApiError> {
    registry
        .get(name)
        .ok_or_else(|| ApiError::UnknownModel(name.unwrap_or_default().to_owned()))
}

/// Run `f` against the chosen model off the async executor and wrap its
/// output with `model` and `elapsedMs`.
async fn with_model<T, F>(
    state: AppState,
    name: Option<String>,
    f: F,
) -> Result<Json<Value>, ApiError>
where
    T: Serialize + Send + 'static,
    F: FnOnce(&LoadedModel) -> Result<T, ApiError> + Send + 'static,
{
    let started = Instant::now();
    let (model_name, out) = tokio::task::spawn_blocking(move || {
        let m = model(&state, name.as_deref())?;
        Ok::<_, ApiError>((m.name.clone(), f(m)?))
    })
    .await
    .map_err(|e| ApiError::Internal(e.to_string()))??;
    let mut value = serde_json::to_value(out).map_err(|e| ApiError::Internal(e.to_string()))?;
    let obj = value.as_object_mut().expect("responses are JSON objects");
    obj.insert("model".into(), Value::String(model_name));
    obj.insert(
        "elapsedMs".into(),
        json!(started.elapsed().as_secs_f64() * 1e3),
    );
    Ok(Json(value))
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ModelInfo {
    pub name: String,
    pub vocab_size: usize,
    pub dim: usize,
}

pub async fn list_models(State(state): State<AppState>) -> Json<Value> {
    let models: Vec<ModelInfo> = state
        .models()
        .iter()
        .map(|m| ModelInfo {
            name: m.name.clone(),
            vocab_size: m.embeddings.len(),
            dim: m.embeddings.dim(),
        })
        .collect();
    Json(json!({"models": models, "default": state.default_name()}))
}

fn default_k() -> usize {
    10
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalogyRequest {
    pub model: Option<String>,
    pub a: String,
    pub b: String,
    pub c: String,
    #[serde(default = "default_k")]
    pub k: usize,
}

#[derive(Debug, Serialize)]
pub struct Ranked {
    pub results: Vec<Scored>,
}

pub async fn analogy(State(state): State<AppState>, body: Bytes) -> Result<Json<Value>, ApiError> {
    let req: AnalogyRequest = parse(&body)?;
    with_model(state, req.model.clone(), move |m| {
        Ok(Ranked {
            results: solve_analogy(&m.view, &req.a, &req.b, &req.c, req.k)?,
        })
    })
    .await
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimilarityRequest {
    pub model: Option<String>,
    pub w1: String,
    pub w2: String,
}

#[derive(Debug, Serialize)]
pub struct Similarity {
    pub cosine: f64,
}

pub async fn similarity(
    State(state): State<AppState>,
    body: Bytes,
) -> Result<Json<Value>, ApiError> {
    let req: SimilarityRequest = parse(&body)?;
    with_model(state, req.model.clone(), move |m| {
        Ok(Similarity {
            cosine: cosine(&m.view, &req.w1, &req.w2)?,
        })
    })
    .await
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NeighborsRequest {
    pub model: Option<String>,
    pub word: String,
    #[serde(default = "default_k")]
    pub k: usize,
}

pub async fn nearest(State(state): State<AppState>, body: Bytes) -> Result<Json<Value>, ApiError> {
    let req: NeighborsRequest = parse(&body)?;
    with_model(state, req.model.clone(), move |m| {
        Ok(Ranked {
            results: neighbors(&m.view, &req.word, req.k)?,
        })
    })
    .await
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VisualizeRequest {
    pub model: Option<String>,
    pub word: String,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_clusters")]
    pub k: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_n() -> usize {
    200
}

fn default_clusters() -> usize {
    8
}

fn default_seed() -> u64 {
    1
}

pub async fn visualize(
    State(state): State<AppState>,
    body: Bytes,
) -> Result<Json<Value>, ApiError> {
    let req: VisualizeRequest = parse(&body)?;
    with_model(
        state,
        req.model.clone(),
        move |m| -> Result<ClusterPlot, ApiError> {
            Ok(build_plot(
                &m.view,
                &VizRequest::new(req.word, req.n, req.k, req.seed),
            )?)
        },
    )
    .await
}
