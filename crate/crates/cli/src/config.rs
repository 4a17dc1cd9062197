//! Engine configuration: a flat `key = value` file with `SCICHK_<KEY>`
//! environment overrides.

use std::path::{Path, PathBuf};
use std::time::Duration;

use scichk_core::corpus::DEFAULT_RETRIEVAL_LIMIT;
use scichk_core::pipeline::{CheckOptions, DEFAULT_BALANCED_MARGIN};
use scichk_core::scorers::remote::{DEFAULT_MAX_IN_FLIGHT, DEFAULT_RETRIES, DEFAULT_TIMEOUT};
use scichk_core::scorers::RemoteConfig;
use scichk_core::tokenizer2d::{DEFAULT_SENTENCES_PER_WINDOW, DEFAULT_STRIDE, DEFAULT_TOKEN_BUDGET};
use scichk_core::WindowConfig;
use thiserror::Error;

pub const ENV_PREFIX: &str = "SCICHK_";
pub const DEFAULT_BIND: &str = "127.0.0.1:8080";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config line {line}: expected key = value, got {text:?}")]
    Syntax { line: usize, text: String },
    #[error("unknown config key {0:?}")]
    UnknownKey(String),
    #[error("invalid value {value:?} for {key}: {reason}")]
    InvalidValue { key: String, value: String, reason: String },
    #[error("{0}")]
    Invalid(String),
    #[error("cannot read config {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendMode {
    Baseline,
    Remote,
}

impl std::str::FromStr for BackendMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "baseline" => Ok(BackendMode::Baseline),
            "remote" => Ok(BackendMode::Remote),
            other => Err(format!("expected baseline or remote, got {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EngineConfig {
    pub window_t: usize,
    pub window_p: usize,
    pub token_budget: usize,
    pub balanced_margin: f64,
    pub retrieval_limit: usize,
    pub backend: BackendMode,
    pub eqa_endpoint: Option<String>,
    pub bqa_endpoint: Option<String>,
    pub max_in_flight: usize,
    pub timeout: Duration,
    pub retries: usize,
    pub corpus: Option<PathBuf>,
    pub bind: String,
    pub cors_origin: Option<String>,
    pub allow_ingest: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            window_t: DEFAULT_SENTENCES_PER_WINDOW,
            window_p: DEFAULT_STRIDE,
            token_budget: DEFAULT_TOKEN_BUDGET,
            balanced_margin: DEFAULT_BALANCED_MARGIN,
            retrieval_limit: DEFAULT_RETRIEVAL_LIMIT,
            backend: BackendMode::Baseline,
            eqa_endpoint: None,
            bqa_endpoint: None,
            max_in_flight: DEFAULT_MAX_IN_FLIGHT,
            timeout: DEFAULT_TIMEOUT,
            retries: DEFAULT_RETRIES,
            corpus: None,
            bind: DEFAULT_BIND.to_string(),
            cors_origin: None,
            allow_ingest: false,
        }
    }
}

pub const KEYS: &[&str] = &[
    "window_t",
    "window_p",
    "token_budget",
    "balanced_margin",
    "retrieval_limit",
    "backend",
    "eqa_endpoint",
    "bqa_endpoint",
    "max_in_flight",
    "timeout_secs",
    "retries",
    "corpus",
    "bind",
    "cors_origin",
    "allow_ingest",
];

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e: T::Err| ConfigError::InvalidValue {
        key: key.to_string(),
        value: value.to_string(),
        reason: e.to_string(),
    })
}

fn optional(value: &str) -> Option<String> {
    (!value.is_empty()).then(|| value.to_string())
}

impl EngineConfig {
    /// Applies one setting. Keys are case-insensitive; an empty value clears
    /// optional settings.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let key = key.trim().to_ascii_lowercase();
        let value = value.trim();
        match key.as_str() {
            "window_t" => self.window_t = parse(&key, value)?,
            "window_p" => self.window_p = parse(&key, value)?,
            "token_budget" => self.token_budget = parse(&key, value)?,
            "balanced_margin" => self.balanced_margin = parse(&key, value)?,
            "retrieval_limit" => self.retrieval_limit = parse(&key, value)?,
            "backend" => self.backend = parse(&key, value)?,
            "eqa_endpoint" => self.eqa_endpoint = optional(value),
            "bqa_endpoint" => self.bqa_endpoint = optional(value),
            "max_in_flight" => self.max_in_flight = parse(&key, value)?,
            "timeout_secs" => self.timeout = Duration::from_secs_f64(parse::<f64>(&key, value).and_then(|s| {
                if s.is_finite() && s > 0.0 {
                    Ok(s)
                } else {
                    Err(ConfigError::InvalidValue {
                        key: key.clone(),
                        value: value.to_string(),
                        reason: "must be a positive number of seconds".into(),
                    })
                }
            })?),
            "retries" => self.retries = parse(&key, value)?,
            "corpus" => self.corpus = optional(value).map(PathBuf::from),
            "bind" => self.bind = value.to_string(),
            "cors_origin" => self.cors_origin = optional(value),
            "allow_ingest" => self.allow_ingest = parse(&key, value)?,
            _ => return Err(ConfigError::UnknownKey(key)),
        }
        Ok(())
    }

    /// Reads `key = value` lines. Blank lines and lines starting with `#`
    /// are ignored.
    pub fn apply_file_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::Syntax {
                    line: i + 1,
                    text: raw.to_string(),
                });
            };
            self.set(key, value)?;
        }
        Ok(())
    }

    /// Applies every `SCICHK_<KEY>` variable whose key is known; other
    /// variables with the prefix are ignored.
    pub fn apply_env<I: IntoIterator<Item = (String, String)>>(&mut self, vars: I) -> Result<(), ConfigError> {
        let mut vars: Vec<(String, String)> = vars
            .into_iter()
            .filter_map(|(k, v)| {
                let key = k.strip_prefix(ENV_PREFIX)?.to_ascii_lowercase();
                KEYS.contains(&key.as_str()).then_some((key, v))
            })
            .collect();
        vars.sort();
        for (k, v) in vars {
            self.set(&k, &v)?;
        }
        Ok(())
    }

    /// Defaults, then the file (if any), then the process environment.
    pub fn load(path: Option<&Path>) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
                path: path.to_path_buf(),
                source,
            })?;
            cfg.apply_file_text(&text)?;
        }
        cfg.apply_env(std::env::vars())?;
        Ok(cfg)
    }

    pub fn window(&self) -> Result<WindowConfig, ConfigError> {
        WindowConfig::new(self.window_t, self.window_p, self.token_budget)
            .map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn check_options(&self) -> Result<CheckOptions, ConfigError> {
        Ok(CheckOptions {
            window: self.window()?,
            balanced_margin: self.balanced_margin,
            limit: self.retrieval_limit,
        })
    }

    pub fn remote(&self) -> RemoteConfig {
        RemoteConfig {
            timeout: self.timeout,
            retries: self.retries,
            max_in_flight: self.max_in_flight,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.window()?;
        if !(0.0..=1.0).contains(&self.balanced_margin) {
            return Err(ConfigError::Invalid(format!(
                "balanced_margin {} outside [0, 1]",
                self.balanced_margin
            )));
        }
        if self.retrieval_limit == 0 {
            return Err(ConfigError::Invalid("retrieval_limit must be at least 1".into()));
        }
        if self.max_in_flight == 0 {
            return Err(ConfigError::Invalid("max_in_flight must be at least 1".into()));
        }
        let endpoints = self.eqa_endpoint.is_some() || self.bqa_endpoint.is_some();
        match self.backend {
            BackendMode::Remote if self.eqa_endpoint.is_none() || self.bqa_endpoint.is_none() => Err(
                ConfigError::Invalid("backend = remote needs both eqa_endpoint and bqa_endpoint".into()),
            ),
            BackendMode::Baseline if endpoints => Err(ConfigError::Invalid(
                "eqa_endpoint/bqa_endpoint are only valid with backend = remote".into(),
            )),
            _ => Ok(()),
        }
    }
}
