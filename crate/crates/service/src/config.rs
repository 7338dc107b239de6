use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::ServiceError;

/// Environment variable that overrides the configured bind address.
pub const BIND_ENV: &str = "MOTVEC_BIND";
pub const DEFAULT_BIND: &str = "127.0.0.1:8080";

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct ModelEntry {
    pub name: String,
    pub path: PathBuf,
}

/// `{"models": [{"name", "path"}], "default", "bind"}` plus optional CORS
/// origins and a directory of static UI assets.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ServerConfig {
    pub models: Vec<ModelEntry>,
    #[serde(default)]
    pub default: Option<String>,
    #[serde(default = "default_bind")]
    pub bind: String,
    /// Allowed browser origins; absent means any origin.
    #[serde(default)]
    pub cors_origins: Option<Vec<String>>,
    #[serde(default)]
    pub static_dir: Option<PathBuf>,
}

fn default_bind() -> String {
    DEFAULT_BIND.to_owned()
}

impl ServerConfig {
    /// Read a config file. Relative model paths resolve against the
    /// config file's directory.
    pub fn load(path: &Path) -> Result<Self, ServiceError> {
        let text = std::fs::read_to_string(path).map_err(|source| ServiceError::ConfigRead {
            path: path.to_owned(),
            source,
        })?;
        let mut config: ServerConfig =
            serde_json::from_str(&text).map_err(|source| ServiceError::ConfigParse {
                path: path.to_owned(),
                source,
            })?;
        let base = path.parent().unwrap_or(Path::new("."));
        for m in &mut config.models {
            if m.path.is_relative() {
                m.path = base.join(&m.path);
            }
        }
        if let Some(dir) = &mut config.static_dir {
            if dir.is_relative() {
                *dir = base.join(&*dir);
            }
        }
        Ok(config)
    }

    /// Apply the bind-address override from the environment, if set.
    pub fn with_env_overrides(mut self) -> Self {
        if let Ok(bind) = std::env::var(BIND_ENV) {
            if !bind.trim().is_empty() {
                self.bind = bind;
            }
        }
        self
    }
}
