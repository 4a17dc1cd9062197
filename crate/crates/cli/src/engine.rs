//! Scorer selection shared by the CLI and the service.

use scichk_core::metrics::{evaluate_bqa, evaluate_eqa, BoolExample, EqaExample, MetricReport, MetricsError};
use scichk_core::scorers::{RemoteBqa, RemoteClient, RemoteEqa};
use scichk_core::{
    check_claim, BqaClassifier, CheckOptions, ClaimQuery, ConsensusReport, Corpus, EqaScorer, LexicalEqa,
    PipelineError, RuleBqa,
};

use crate::config::{BackendMode, ConfigError, EngineConfig};

enum Backend {
    Baseline { eqa: LexicalEqa, bqa: RuleBqa },
    Remote { client: RemoteClient, eqa_endpoint: String, bqa_endpoint: String },
}

/// A validated configuration plus the scorers it selects.
pub struct Engine {
    options: CheckOptions,
    backend: Backend,
}

impl Engine {
    pub fn new(config: &EngineConfig) -> Result<Self, ConfigError> {
        config.validate()?;
        let backend = match config.backend {
            BackendMode::Baseline => Backend::Baseline {
                eqa: LexicalEqa,
                bqa: RuleBqa::default(),
            },
            BackendMode::Remote => Backend::Remote {
                client: RemoteClient::new(config.remote()),
                eqa_endpoint: config.eqa_endpoint.clone().unwrap_or_default(),
                bqa_endpoint: config.bqa_endpoint.clone().unwrap_or_default(),
            },
        };
        Ok(Self {
            options: config.check_options()?,
            backend,
        })
    }

    pub fn options(&self) -> &CheckOptions {
        &self.options
    }

    fn with_scorers<T>(&self, f: impl FnOnce(&dyn EqaScorer, &dyn BqaClassifier) -> T) -> T {
        match &self.backend {
            Backend::Baseline { eqa, bqa } => f(eqa, bqa),
            Backend::Remote {
                client,
                eqa_endpoint,
                bqa_endpoint,
            } => f(&RemoteEqa::new(client, eqa_endpoint), &RemoteBqa::new(client, bqa_endpoint)),
        }
    }

    pub fn check(&self, corpus: &Corpus, claim: &ClaimQuery) -> Result<ConsensusReport, PipelineError> {
        self.with_scorers(|eqa, bqa| check_claim(corpus, claim, &self.options, eqa, bqa))
    }

    pub fn eval_eqa(&self, data: &[EqaExample]) -> Result<MetricReport, MetricsError> {
        self.with_scorers(|eqa, _| evaluate_eqa(data, &self.options.window, eqa))
    }

    pub fn eval_bqa(&self, data: &[BoolExample]) -> Result<MetricReport, MetricsError> {
        self.with_scorers(|_, bqa| evaluate_bqa(data, bqa))
    }
}
