//! HTTP client for the model server.
//!
//! Endpoints: `GET /healthz`, `GET /v1/info`, `POST /v1/embed`,
//! `POST /v1/score`, all with JSON bodies. Requests are idempotent, so
//! transport failures and `503 Service Unavailable` are retried with
//! exponential backoff; any other non-success status or unusable body is a
//! protocol error and is not retried.

use std::sync::{Arc, Condvar, Mutex};
use std::time::Duration;

use log::debug;
use reqwest::blocking::Client;
use reqwest::StatusCode;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::embedding::{EmbeddingBackend, EmbeddingVector};
use crate::error::BackendError;
use crate::scorer::{ScoreBackend, ScorePair};

/// Environment variable holding the server base URL.
pub const SERVER_URL_ENV: &str = "LDFS_SERVER_URL";

#[derive(Debug, Clone, PartialEq)]
pub struct RemoteConfig {
    pub base_url: String,
    pub timeout: Duration,
    /// Upper bound on concurrent requests from this client.
    pub max_in_flight: usize,
    /// Items per request; larger inputs are split.
    pub max_batch: usize,
    pub max_retries: u32,
    pub initial_backoff: Duration,
}

impl RemoteConfig {
    pub fn new(base_url: impl Into<String>) -> Self {
        RemoteConfig {
            base_url: base_url.into().trim_end_matches('/').to_string(),
            timeout: Duration::from_secs(120),
            max_in_flight: 4,
            max_batch: 64,
            max_retries: 3,
            initial_backoff: Duration::from_millis(200),
        }
    }
}

/// Contents of `GET /v1/info`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ServerInfo {
    pub embed_backend_id: String,
    pub score_backend_id: String,
    pub dim: usize,
    #[serde(default)]
    pub embed_token_limit: Option<usize>,
    #[serde(default)]
    pub score_token_limit: Option<usize>,
    pub score_variant: String,
}

#[derive(Serialize)]
struct EmbedRequest<'a> {
    texts: &'a [&'a str],
}

#[derive(Deserialize)]
struct EmbedResponse {
    vectors: Vec<Vec<f64>>,
    dim: usize,
}

#[derive(Serialize)]
struct WirePair<'a> {
    context: &'a str,
    target: &'a str,
}

#[derive(Serialize)]
struct ScoreRequest<'a> {
    pairs: Vec<WirePair<'a>>,
}

#[derive(Deserialize)]
struct ScoreResponse {
    scores: Vec<f64>,
    #[allow(dead_code)]
    variant: String,
}

#[derive(Debug)]
struct Permits {
    free: Mutex<usize>,
    released: Condvar,
}

impl Permits {
    fn acquire(&self) -> PermitGuard<'_> {
        let mut free = self.free.lock().expect("permit lock");
        while *free == 0 {
            free = self.released.wait(free).expect("permit lock");
        }
        *free -= 1;
        PermitGuard(self)
    }
}

struct PermitGuard<'a>(&'a Permits);

impl Drop for PermitGuard<'_> {
    fn drop(&mut self) {
        *self.0.free.lock().expect("permit lock") += 1;
        self.0.released.notify_one();
    }
}

#[derive(Debug)]
pub struct RemoteClient {
    config: RemoteConfig,
    http: Client,
    permits: Permits,
}

impl RemoteClient {
    pub fn new(config: RemoteConfig) -> Result<Self, BackendError> {
        let http = Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| BackendError::Transport {
                endpoint: config.base_url.clone(),
                message: e.to_string(),
            })?;
        let permits = Permits {
            free: Mutex::new(config.max_in_flight.max(1)),
            released: Condvar::new(),
        };
        Ok(RemoteClient { config, http, permits })
    }

    pub fn config(&self) -> &RemoteConfig {
        &self.config
    }

    fn url(&self, path: &str) -> String {
        format!("{}{}", self.config.base_url, path)
    }

    fn send<T: DeserializeOwned>(
        &self,
        path: &str,
        build: impl Fn(&Client, &str) -> reqwest::blocking::RequestBuilder,
    ) -> Result<T, BackendError> {
        let url = self.url(path);
        let _permit = self.permits.acquire();
        let mut backoff = self.config.initial_backoff;
        let mut attempt = 0;
        loop {
            let outcome = match build(&self.http, &url).send() {
                Err(e) => Err(BackendError::Transport {
                    endpoint: url.clone(),
                    message: e.to_string(),
                }),
                Ok(resp) if resp.status() == StatusCode::SERVICE_UNAVAILABLE => Err(BackendError::Transport {
                    endpoint: url.clone(),
                    message: "503 service unavailable".to_string(),
                }),
                Ok(resp) if !resp.status().is_success() => {
                    let status = resp.status();
                    let body = resp.text().unwrap_or_default();
                    return Err(BackendError::Protocol {
                        endpoint: url,
                        message: format!("{status}: {}", body.chars().take(200).collect::<String>()),
                    });
                }
                Ok(resp) => {
                    return resp.json::<T>().map_err(|e| BackendError::Protocol {
                        endpoint: url,
                        message: format!("malformed response body: {e}"),
                    })
                }
            };
            match outcome {
                Err(e) if attempt < self.config.max_retries => {
                    debug!("retrying {url} after {backoff:?}: {e}");
                    std::thread::sleep(backoff);
                    backoff *= 2;
                    attempt += 1;
                }
                other => return other,
            }
        }
    }

    /// `GET /healthz`; succeeds once the server reports its models loaded.
    pub fn health(&self) -> Result<(), BackendError> {
        self.send::<serde_json::Value>("/healthz", |c, u| c.get(u)).map(|_| ())
    }

    pub fn info(&self) -> Result<ServerInfo, BackendError> {
        self.send("/v1/info", |c, u| c.get(u))
    }

    fn embed_chunk(&self, texts: &[&str], dim: usize) -> Result<Vec<EmbeddingVector>, BackendError> {
        let resp: EmbedResponse = self.send("/v1/embed", |c, u| c.post(u).json(&EmbedRequest { texts }))?;
        let endpoint = self.url("/v1/embed");
        if resp.vectors.len() != texts.len() {
            return Err(BackendError::Protocol {
                endpoint,
                message: format!("expected {} vectors, got {}", texts.len(), resp.vectors.len()),
            });
        }
        if resp.dim != dim {
            return Err(BackendError::DimensionMismatch {
                expected: dim,
                got: resp.dim,
            });
        }
        resp.vectors
            .into_iter()
            .map(|v| {
                if v.len() != dim {
                    return Err(BackendError::DimensionMismatch {
                        expected: dim,
                        got: v.len(),
                    });
                }
                EmbeddingVector::from_raw(v).map_err(|e| BackendError::Protocol {
                    endpoint: endpoint.clone(),
                    message: e.to_string(),
                })
            })
            .collect()
    }

    fn score_chunk(&self, pairs: &[ScorePair<'_>]) -> Result<Vec<f64>, BackendError> {
        let request = || ScoreRequest {
            pairs: pairs
                .iter()
                .map(|p| WirePair {
                    context: p.context,
                    target: p.target,
                })
                .collect(),
        };
        let resp: ScoreResponse = self.send("/v1/score", |c, u| c.post(u).json(&request()))?;
        if resp.scores.len() != pairs.len() {
            return Err(BackendError::Protocol {
                endpoint: self.url("/v1/score"),
                message: format!("expected {} scores, got {}", pairs.len(), resp.scores.len()),
            });
        }
        Ok(resp.scores)
    }
}

/// Embedding backend served by the model server.
#[derive(Debug, Clone)]
pub struct RemoteEmbedder {
    client: Arc<RemoteClient>,
    backend_id: String,
    dim: usize,
}

impl RemoteEmbedder {
    /// Checks health and reads the backend id and dimension from `/v1/info`.
    pub fn connect(client: Arc<RemoteClient>) -> Result<Self, BackendError> {
        client.health()?;
        let info = client.info()?;
        Ok(RemoteEmbedder {
            client,
            backend_id: info.embed_backend_id,
            dim: info.dim,
        })
    }
}

impl EmbeddingBackend for RemoteEmbedder {
    fn backend_id(&self) -> &str {
        &self.backend_id
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn embed_batch(&self, texts: &[&str]) -> Result<Vec<EmbeddingVector>, BackendError> {
        let mut out = Vec::with_capacity(texts.len());
        for chunk in texts.chunks(self.client.config.max_batch.max(1)) {
            out.extend(self.client.embed_chunk(chunk, self.dim)?);
        }
        Ok(out)
    }
}

/// Conditional log-likelihood scorer served by the model server.
#[derive(Debug, Clone)]
pub struct RemoteScorer {
    client: Arc<RemoteClient>,
    backend_id: String,
    variant: String,
    token_limit: Option<usize>,
}

impl RemoteScorer {
    pub fn connect(client: Arc<RemoteClient>) -> Result<Self, BackendError> {
        client.health()?;
        let info = client.info()?;
        Ok(RemoteScorer {
            client,
            backend_id: info.score_backend_id,
            variant: info.score_variant,
            token_limit: info.score_token_limit,
        })
    }

    /// Overrides the token limit reported by the server.
    pub fn with_token_limit(mut self, limit: Option<usize>) -> Self {
        self.token_limit = limit;
        self
    }
}

impl ScoreBackend for RemoteScorer {
    fn backend_id(&self) -> &str {
        &self.backend_id
    }

    fn token_limit(&self) -> Option<usize> {
        self.token_limit
    }

    fn variant(&self) -> &str {
        &self.variant
    }

    fn score_batch(&self, pairs: &[ScorePair<'_>]) -> Result<Vec<f64>, BackendError> {
        let mut out = Vec::with_capacity(pairs.len());
        for chunk in pairs.chunks(self.client.config.max_batch.max(1)) {
            out.extend(self.client.score_chunk(chunk)?);
        }
        Ok(out)
    }
}
