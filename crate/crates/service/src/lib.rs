//! HTTP JSON API over one or more embedding models: analogies, cosine
//! similarity, nearest neighbors and neighborhood scatter plots.

pub mod api;
pub mod config;
pub mod registry;

use std::path::PathBuf;
use std::sync::Arc;

use axum::http::{header, HeaderValue, Method};
use axum::routing::{get, post};
use axum::Router;
use tower_http::cors::{AllowOrigin, Any, CorsLayer};
use tower_http::services::ServeDir;

pub use config::{ModelEntry, ServerConfig};
pub use registry::ModelRegistry;

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error("cannot read config {path}: {source}")]
    ConfigRead {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid config {path}: {source}")]
    ConfigParse {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("cannot load model {name:?}: {source}")]
    ModelLoad {
        name: String,
        source: motvec_core::Error,
    },
    #[error("no models configured")]
    EmptyRegistry,
    #[error("model {0:?} is configured twice")]
    DuplicateModel(String),
    #[error("default model {0:?} is not among the configured models")]
    UnknownDefault(String),
    #[error("invalid CORS origin {0:?}")]
    InvalidOrigin(String),
    #[error("cannot bind {addr}: {source}")]
    Bind {
        addr: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn cors(origins: Option<&[String]>) -> Result<CorsLayer, ServiceError> {
    let allow = match origins {
        None => AllowOrigin::from(Any),
        Some(list) => {
            let values = list
                .iter()
                .map(|o| {
                    HeaderValue::from_str(o).map_err(|_| ServiceError::InvalidOrigin(o.clone()))
                })
                .collect::<Result<Vec<_>, _>>()?;
            AllowOrigin::list(values)
        }
    };
    Ok(CorsLayer::new()
        .allow_origin(allow)
        .allow_methods([Method::GET, Method::POST])
        .allow_headers([header::CONTENT_TYPE]))
}

/// The API routes, with UI assets served from `static_dir` when given.
pub fn router(
    registry: Arc<ModelRegistry>,
    cors_origins: Option<&[String]>,
    static_dir: Option<PathBuf>,
) -> Result<Router, ServiceError> {
    let mut app = Router::new()
        .route("/api/models", get(api::list_models))
        .route("/api/analogy", post(api::analogy))
        .route("/api/similarity", post(api::similarity))
        .route("/api/neighbors", post(api::nearest))
        .route("/api/visualize", post(api::visualize))
        .with_state(registry);
    if let Some(dir) = static_dir {
        app = app.fallback_service(ServeDir::new(dir));
    }
    Ok(app.layer(cors(cors_origins)?))
}

/// Load every model, bind, and serve until interrupted.
pub async fn serve(config: ServerConfig) -> Result<(), ServiceError> {
    let registry = Arc::new(ModelRegistry::load(&config)?);
    let app = router(
        registry.clone(),
        config.cors_origins.as_deref(),
        config.static_dir.clone(),
    )?;
    let listener = tokio::net::TcpListener::bind(&config.bind)
        .await
        .map_err(|source| ServiceError::Bind {
            addr: config.bind.clone(),
            source,
        })?;
    eprintln!(
        "serving {} model(s) on http://{}",
        registry.models().len(),
        listener.local_addr()?
    );
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
