use std::sync::Arc;

use clap::ValueEnum;
use ldfs::embedding::{EmbeddingBackend, HashedEmbedder};
use ldfs::instrument::NoopScorer;
use ldfs::remote::{RemoteClient, RemoteConfig, RemoteEmbedder, RemoteScorer, ServerInfo};
use ldfs::scorer::{LexicalScorer, ScoreBackend};
use serde_json::{json, Value};

use crate::error::{config_error, Category, CategoryExt};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EmbedChoice {
    Hashed,
    Remote,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScorerChoice {
    Lexical,
    Remote,
    Noop,
}

pub struct Backends {
    pub embedder: Box<dyn EmbeddingBackend>,
    pub scorer: Box<dyn ScoreBackend>,
    pub server: Option<ServerInfo>,
}

impl Backends {
    pub fn build(
        embed: EmbedChoice,
        scorer: ScorerChoice,
        token_limit: Option<usize>,
        server_url: Option<&str>,
    ) -> anyhow::Result<Self> {
        let client = if embed == EmbedChoice::Remote || scorer == ScorerChoice::Remote {
            let url = server_url.ok_or_else(|| {
                config_error(format!(
                    "a remote backend needs --server-url or {}",
                    ldfs::remote::SERVER_URL_ENV
                ))
            })?;
            let client = Arc::new(RemoteClient::new(RemoteConfig::new(url)).category(Category::Backend)?);
            client.health().category(Category::Backend)?;
            Some(client)
        } else {
            None
        };
        let server = client
            .as_ref()
            .map(|c| c.info())
            .transpose()
            .category(Category::Backend)?;
        let embedder: Box<dyn EmbeddingBackend> = match embed {
            EmbedChoice::Hashed => Box::new(HashedEmbedder),
            EmbedChoice::Remote => Box::new(
                RemoteEmbedder::connect(Arc::clone(client.as_ref().expect("client"))).category(Category::Backend)?,
            ),
        };
        let scorer: Box<dyn ScoreBackend> = match scorer {
            ScorerChoice::Lexical => Box::new(LexicalScorer::new(Some(
                token_limit.unwrap_or(ldfs::scorer::DEFAULT_TOKEN_LIMIT),
            ))),
            ScorerChoice::Noop => Box::new(NoopScorer),
            ScorerChoice::Remote => {
                let remote =
                    RemoteScorer::connect(Arc::clone(client.as_ref().expect("client"))).category(Category::Backend)?;
                match token_limit {
                    Some(limit) => Box::new(remote.with_token_limit(Some(limit))),
                    None => Box::new(remote),
                }
            }
        };
        Ok(Backends {
            embedder,
            scorer,
            server,
        })
    }

    pub fn describe(&self) -> Value {
        json!({
            "embed_backend_id": self.embedder.backend_id(),
            "embed_dim": self.embedder.dim(),
            "score_backend_id": self.scorer.backend_id(),
            "score_variant": self.scorer.variant(),
            "score_token_limit": self.scorer.token_limit(),
            "server": self.server,
        })
    }
}

/// Bounds the global rayon pool; `None` keeps the default.
pub fn configure_jobs(jobs: Option<usize>) -> anyhow::Result<()> {
    if let Some(j) = jobs {
        if j == 0 {
            return Err(config_error("--jobs must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .category(Category::Config)?;
    }
    Ok(())
}

/// The command-line spelling of a value enum.
pub fn value_name<T: ValueEnum>(v: &T) -> String {
    v.to_possible_value()
        .map(|p| p.get_name().to_string())
        .unwrap_or_default()
}
