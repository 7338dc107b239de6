use std::collections::HashMap;

use motvec_core::{store, EmbeddingSet, NormalizedView};

use crate::config::ServerConfig;
use crate::ServiceError;

pub struct LoadedModel {
    pub name: String,
    pub embeddings: EmbeddingSet,
    pub view: NormalizedView,
}

/// Immutable set of named models, every view built up front.
pub struct ModelRegistry {
    models: Vec<LoadedModel>,
    index: HashMap<String, usize>,
    default: usize,
}

impl ModelRegistry {
    /// `models` in listing order; `default` falls back to the first model.
    pub fn new(
        models: Vec<(String, EmbeddingSet)>,
        default: Option<&str>,
    ) -> Result<Self, ServiceError> {
        if models.is_empty() {
            return Err(ServiceError::EmptyRegistry);
        }
        let mut index = HashMap::new();
        let mut loaded = Vec::with_capacity(models.len());
        for (i, (name, embeddings)) in models.into_iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(ServiceError::DuplicateModel(name));
            }
            let view = NormalizedView::new(&embeddings);
            loaded.push(LoadedModel {
                name,
                embeddings,
                view,
            });
        }
        let default = match default {
            Some(name) => *index
                .get(name)
                .ok_or_else(|| ServiceError::UnknownDefault(name.to_owned()))?,
            None => 0,
        };
        Ok(ModelRegistry {
            models: loaded,
            index,
            default,
        })
    }

    /// Load every configured model; any unreadable file aborts.
    pub fn load(config: &ServerConfig) -> Result<Self, ServiceError> {
        let mut models = Vec::with_capacity(config.models.len());
        for entry in &config.models {
            let emb = store::load(&entry.path).map_err(|source| ServiceError::ModelLoad {
                name: entry.name.clone(),
                source,
            })?;
            models.push((entry.name.clone(), emb));
        }
        Self::new(models, config.default.as_deref())
    }

    pub fn get(&self, name: Option<&str>) -> Option<&LoadedModel> {
        match name {
            None => Some(&self.models[self.default]),
            Some(n) => self.index.get(n).map(|&i| &self.models[i]),
        }
    }

    pub fn models(&self) -> &[LoadedModel] {
        &self.models
    }

    pub fn default_name(&self) -> &str {
        &self.models[self.default].name
    }
}
