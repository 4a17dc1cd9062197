//! Front ends for the claim checker: configuration handling, an HTTP
//! service and a command-line interface sharing one [`engine::Engine`].

pub mod cli;
pub mod config;
pub mod engine;
pub mod service;
pub mod text;

pub use cli::run;
pub use config::{BackendMode, ConfigError, EngineConfig};
pub use engine::Engine;
