//! HTTP client for model servers implementing the scorer wire protocol.
//!
//! `POST {endpoint}/v1/eqa` takes `{"question", "tokens", "window_index",
//! "doc_id"}` and answers `{"answerable", "start", "end", "score"}` where
//! `start`/`end` are inclusive indexes into `tokens`.
//!
//! `POST {endpoint}/v1/bqa` takes `{"question", "context"}` and answers
//! `{"yes", "no", "neutral"}` summing to one.
//!
//! Every response is validated before use; a bad response is an error, never
//! a partial result.

use std::sync::{Condvar, Mutex};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{BooleanDistribution, BqaClassifier, EqaScorer, ScorerError};
use crate::tokenizer2d::{TokenRange, Window, WindowError, WindowSpanAnswer};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);
pub const DEFAULT_RETRIES: usize = 2;
pub const DEFAULT_MAX_IN_FLIGHT: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct RemoteConfig {
    pub timeout: Duration,
    /// Extra attempts after a transport failure.
    pub retries: usize,
    pub max_in_flight: usize,
}

impl Default for RemoteConfig {
    fn default() -> Self {
        Self {
            timeout: DEFAULT_TIMEOUT,
            retries: DEFAULT_RETRIES,
            max_in_flight: DEFAULT_MAX_IN_FLIGHT,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct EqaRequest<'a> {
    pub question: &'a str,
    pub tokens: Vec<&'a str>,
    pub window_index: usize,
    pub doc_id: &'a str,
}

#[derive(Debug, Deserialize)]
struct EqaResponse {
    answerable: bool,
    #[serde(default)]
    start: Option<i64>,
    #[serde(default)]
    end: Option<i64>,
    score: f64,
}

#[derive(Debug, Serialize)]
pub struct BqaRequest<'a> {
    pub question: &'a str,
    pub context: &'a str,
}

#[derive(Debug, Deserialize)]
struct BqaResponse {
    yes: f64,
    no: f64,
    neutral: f64,
}

/// Counting semaphore bounding concurrent requests.
#[derive(Debug)]
struct Gate {
    free: Mutex<usize>,
    freed: Condvar,
}

impl Gate {
    fn new(slots: usize) -> Self {
        Self {
            free: Mutex::new(slots.max(1)),
            freed: Condvar::new(),
        }
    }

    fn enter(&self) -> GateGuard<'_> {
        let mut free = self.free.lock().unwrap_or_else(|e| e.into_inner());
        while *free == 0 {
            free = self.freed.wait(free).unwrap_or_else(|e| e.into_inner());
        }
        *free -= 1;
        GateGuard(self)
    }
}

struct GateGuard<'a>(&'a Gate);

impl Drop for GateGuard<'_> {
    fn drop(&mut self) {
        *self.0.free.lock().unwrap_or_else(|e| e.into_inner()) += 1;
        self.0.freed.notify_one();
    }
}

/// Shared transport: connection pool, timeout, retry and concurrency policy.
#[derive(Debug)]
pub struct RemoteClient {
    agent: ureq::Agent,
    config: RemoteConfig,
    gate: Gate,
}

impl RemoteClient {
    pub fn new(config: RemoteConfig) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(config.timeout))
            .http_status_as_error(false)
            .max_idle_connections_per_host(config.max_in_flight.max(1))
            .build()
            .new_agent();
        Self {
            agent,
            gate: Gate::new(config.max_in_flight),
            config,
        }
    }

    pub fn config(&self) -> &RemoteConfig {
        &self.config
    }

    /// POSTs `body` as JSON and returns the raw 200 response text.
    pub fn post_json<B: Serialize>(&self, url: &str, body: &B) -> Result<String, ScorerError> {
        let _slot = self.gate.enter();
        let attempts = self.config.retries + 1;
        let mut last_reason = String::new();
        for _ in 0..attempts {
            match self.agent.post(url).send_json(body) {
                Ok(mut resp) => {
                    let status = resp.status().as_u16();
                    let text = resp.body_mut().read_to_string().map_err(|e| match e {
                        ureq::Error::Timeout(_) => ScorerError::BackendTimeout {
                            endpoint: url.to_string(),
                        },
                        other => ScorerError::BackendProtocol {
                            reason: format!("unreadable body: {other}"),
                            payload: String::new(),
                        },
                    })?;
                    if status != 200 {
                        return Err(ScorerError::BackendStatus {
                            endpoint: url.to_string(),
                            status,
                            body: text,
                        });
                    }
                    return Ok(text);
                }
                Err(ureq::Error::Timeout(_)) => {
                    return Err(ScorerError::BackendTimeout {
                        endpoint: url.to_string(),
                    })
                }
                Err(
                    e @ (ureq::Error::Io(_)
                    | ureq::Error::ConnectionFailed
                    | ureq::Error::HostNotFound
                    | ureq::Error::Protocol(_)),
                ) => last_reason = e.to_string(),
                Err(other) => {
                    return Err(ScorerError::BackendUnreachable {
                        endpoint: url.to_string(),
                        attempts: 1,
                        reason: other.to_string(),
                    })
                }
            }
        }
        Err(ScorerError::BackendUnreachable {
            endpoint: url.to_string(),
            attempts,
            reason: last_reason,
        })
    }
}

fn endpoint_url(base: &str, path: &str) -> String {
    format!("{}{path}", base.trim_end_matches('/'))
}

fn protocol(reason: impl Into<String>, payload: &str) -> ScorerError {
    ScorerError::BackendProtocol {
        reason: reason.into(),
        payload: payload.to_string(),
    }
}

/// Checks an EQA payload against the window it was requested for.
pub fn parse_eqa_response(payload: &str, window: &Window<'_>) -> Result<WindowSpanAnswer, ScorerError> {
    let resp: EqaResponse =
        serde_json::from_str(payload).map_err(|e| protocol(format!("bad eqa response: {e}"), payload))?;
    if !resp.score.is_finite() {
        return Err(protocol("score is not finite", payload));
    }
    if !resp.answerable {
        return Ok(WindowSpanAnswer::unanswerable(window.index, resp.score));
    }
    let (Some(start), Some(end)) = (resp.start, resp.end) else {
        return Err(protocol("answerable response without start/end", payload));
    };
    if start < 0 || end < 0 {
        return Err(protocol("negative token index", payload));
    }
    let len = window.tokens.len();
    if end < start || end as usize >= len {
        return Err(ScorerError::Window(WindowError::SpanOutOfWindow {
            window: window.index,
            start: start as usize,
            end: end as usize,
            len,
        }));
    }
    Ok(WindowSpanAnswer {
        window_index: window.index,
        span: Some(TokenRange {
            start: start as usize,
            end: end as usize,
        }),
        score: resp.score,
    })
}

pub fn parse_bqa_response(payload: &str) -> Result<BooleanDistribution, ScorerError> {
    let resp: BqaResponse =
        serde_json::from_str(payload).map_err(|e| protocol(format!("bad bqa response: {e}"), payload))?;
    BooleanDistribution::new(resp.yes, resp.no, resp.neutral)
        .map_err(|e| protocol(e.to_string(), payload))
}

pub struct RemoteEqa<'c> {
    client: &'c RemoteClient,
    url: String,
}

impl<'c> RemoteEqa<'c> {
    pub fn new(client: &'c RemoteClient, endpoint: &str) -> Self {
        Self {
            client,
            url: endpoint_url(endpoint, "/v1/eqa"),
        }
    }
}

impl EqaScorer for RemoteEqa<'_> {
    fn score(&self, question: &str, window: &Window<'_>) -> Result<WindowSpanAnswer, ScorerError> {
        let request = EqaRequest {
            question,
            tokens: window.token_texts(),
            window_index: window.index,
            doc_id: window.doc_id,
        };
        let payload = self.client.post_json(&self.url, &request)?;
        parse_eqa_response(&payload, window)
    }
}

pub struct RemoteBqa<'c> {
    client: &'c RemoteClient,
    url: String,
}

impl<'c> RemoteBqa<'c> {
    pub fn new(client: &'c RemoteClient, endpoint: &str) -> Self {
        Self {
            client,
            url: endpoint_url(endpoint, "/v1/bqa"),
        }
    }
}

impl BqaClassifier for RemoteBqa<'_> {
    fn classify(&self, question: &str, context: &str) -> Result<BooleanDistribution, ScorerError> {
        let payload = self.client.post_json(&self.url, &BqaRequest { question, context })?;
        parse_bqa_response(&payload)
    }
}
