//! Command-line entry point.
//!
//! Exit codes: 0 on success, 1 for usage or configuration errors, 2 for
//! runtime and backend failures.

use std::ffi::OsString;
use std::fs::OpenOptions;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use scichk_core::metrics::{load_boolq, load_squad};
use scichk_core::{parse_claim, AbstractRecord, Corpus};

use crate::config::{BackendMode, ConfigError, EngineConfig};
use crate::engine::Engine;
use crate::service::serve;
use crate::text::render_report_text;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "scichk", version, about = "Check yes/no claims against a corpus of scientific abstracts")]
pub struct Cli {
    /// key = value configuration file; SCICHK_<KEY> variables override it.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Add the records of a JSONL file to a corpus file.
    Ingest {
        #[arg(long, value_name = "FILE")]
        corpus: PathBuf,
        #[arg(long, value_name = "JSONL")]
        input: PathBuf,
    },
    /// Check a claim such as "Does aspirin prevent stroke?".
    Check {
        claim: String,
        #[arg(long, value_name = "FILE")]
        corpus: Option<PathBuf>,
        /// Print the report as JSON (the default).
        #[arg(long, conflicts_with = "text")]
        json: bool,
        /// Print a human-readable summary with underlined evidence.
        #[arg(long)]
        text: bool,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Score a backend against a labelled dataset.
    Eval {
        task: EvalKind,
        #[arg(long, value_name = "FILE")]
        dataset: PathBuf,
        /// Also write per-example scores as TSV.
        #[arg(long, value_name = "FILE")]
        per_example: Option<PathBuf>,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long, value_name = "ADDR")]
        bind: Option<String>,
        #[arg(long, value_name = "FILE")]
        corpus: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EvalKind {
    Eqa,
    Bqa,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BackendArg {
    Baseline,
    Remote,
}

/// Overrides applied on top of the configuration file and environment.
#[derive(Args, Debug)]
struct EngineArgs {
    /// Sentences per window.
    #[arg(long = "t", value_name = "N")]
    window_t: Option<usize>,
    /// Sentences shared by consecutive windows.
    #[arg(long = "p", value_name = "N")]
    window_p: Option<usize>,
    #[arg(long, value_name = "N")]
    budget: Option<usize>,
    #[arg(long, value_name = "R")]
    margin: Option<f64>,
    #[arg(long, value_name = "N")]
    limit: Option<usize>,
    #[arg(long, value_enum)]
    backend: Option<BackendArg>,
    #[arg(long, value_name = "URL")]
    eqa_endpoint: Option<String>,
    #[arg(long, value_name = "URL")]
    bqa_endpoint: Option<String>,
}

impl EngineArgs {
    fn apply(&self, cfg: &mut EngineConfig) {
        let set = |slot: &mut usize, v: Option<usize>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(&mut cfg.window_t, self.window_t);
        set(&mut cfg.window_p, self.window_p);
        set(&mut cfg.token_budget, self.budget);
        set(&mut cfg.retrieval_limit, self.limit);
        if let Some(m) = self.margin {
            cfg.balanced_margin = m;
        }
        if let Some(b) = self.backend {
            cfg.backend = match b {
                BackendArg::Baseline => BackendMode::Baseline,
                BackendArg::Remote => BackendMode::Remote,
            };
        }
        if self.eqa_endpoint.is_some() {
            cfg.eqa_endpoint = self.eqa_endpoint.clone();
        }
        if self.bqa_endpoint.is_some() {
            cfg.bqa_endpoint = self.bqa_endpoint.clone();
        }
    }
}

/// A failure with its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: e.to_string(),
        }
    }
}

fn runtime(e: impl std::fmt::Display) -> Failure {
    Failure {
        code: EXIT_RUNTIME,
        message: e.to_string(),
    }
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: e.to_string(),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{rendered}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{rendered}");
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(cli, out, err) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "scichk: {}", f.message);
            f.code
        }
    }
}

fn load_corpus(path: &Path, err: &mut dyn Write) -> Result<Corpus, Failure> {
    let (corpus, report) = Corpus::load(path).map_err(|e| runtime(format!("{}: {e}", path.display())))?;
    for e in &report.errors {
        let _ = writeln!(err, "scichk: {}: skipped {e}", path.display());
    }
    Ok(corpus)
}

fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let mut cfg = EngineConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::Ingest { corpus, input } => ingest(&corpus, &input, out, err),
        Command::Check {
            claim,
            corpus,
            json: _,
            text,
            engine,
        } => {
            engine.apply(&mut cfg);
            let claim = parse_claim(&claim).map_err(usage)?;
            let path = corpus
                .or_else(|| cfg.corpus.clone())
                .ok_or_else(|| usage("check needs --corpus FILE (or `corpus` in the config)"))?;
            let engine = Engine::new(&cfg)?;
            let corpus = load_corpus(&path, err)?;
            let report = engine.check(&corpus, &claim).map_err(runtime)?;
            let rendered = if text {
                render_report_text(&report, &corpus)
            } else {
                report.to_json() + "\n"
            };
            out.write_all(rendered.as_bytes()).map_err(runtime)
        }
        Command::Eval {
            task,
            dataset,
            per_example,
            engine,
        } => {
            engine.apply(&mut cfg);
            let engine = Engine::new(&cfg)?;
            let read_err = |e: std::io::Error| runtime(format!("{}: {e}", dataset.display()));
            let report = match task {
                EvalKind::Eqa => {
                    let json = std::fs::read_to_string(&dataset).map_err(read_err)?;
                    let data = load_squad(&json).map_err(runtime)?;
                    engine.eval_eqa(&data).map_err(runtime)?
                }
                EvalKind::Bqa => {
                    let file = std::fs::File::open(&dataset).map_err(read_err)?;
                    let data = load_boolq(BufReader::new(file)).map_err(runtime)?;
                    engine.eval_bqa(&data).map_err(runtime)?
                }
            };
            if let Some(path) = per_example {
                std::fs::write(&path, report.to_tsv()).map_err(|e| runtime(format!("{}: {e}", path.display())))?;
            }
            writeln!(out, "{}", report.to_json()).map_err(runtime)
        }
        Command::Serve { bind, corpus } => {
            if let Some(b) = bind {
                cfg.bind = b;
            }
            if corpus.is_some() {
                cfg.corpus = corpus;
            }
            serve(&cfg).map_err(|e| match e {
                crate::service::ServeError::Config(c) => Failure::from(c),
                other => runtime(other),
            })
        }
    }
}

/// Loads the corpus file (if it exists), adds every valid new record of
/// `input` and appends those records to the corpus file.
fn ingest(corpus_path: &Path, input: &Path, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let mut corpus = if corpus_path.exists() {
        load_corpus(corpus_path, err)?
    } else {
        Corpus::new()
    };
    let before = corpus.len();
    let reader = BufReader::new(std::fs::File::open(input).map_err(|e| runtime(format!("{}: {e}", input.display())))?);
    let mut accepted = Vec::new();
    let mut skipped = 0usize;
    for (n, line) in reader.lines().enumerate() {
        let line = line.map_err(runtime)?;
        if line.trim().is_empty() {
            continue;
        }
        let result = serde_json::from_str::<AbstractRecord>(&line)
            .map_err(|e| e.to_string())
            .and_then(|rec| corpus.ingest(rec.clone()).map(|_| rec).map_err(|e| e.to_string()));
        match result {
            Ok(rec) => accepted.push(serde_json::to_string(&rec).map_err(runtime)?),
            Err(e) => {
                skipped += 1;
                let _ = writeln!(err, "scichk: {}:{}: skipped: {e}", input.display(), n + 1);
            }
        }
    }
    if !accepted.is_empty() {
        let needs_newline = std::fs::read(corpus_path)
            .map(|b| b.last().is_some_and(|&c| c != b'\n'))
            .unwrap_or(false);
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(corpus_path)
            .map_err(|e| runtime(format!("{}: {e}", corpus_path.display())))?;
        let mut buf = String::new();
        if needs_newline {
            buf.push('\n');
        }
        for line in &accepted {
            buf.push_str(line);
            buf.push('\n');
        }
        file.write_all(buf.as_bytes()).map_err(runtime)?;
    }
    writeln!(
        out,
        "ingested {} skipped {} total {} (was {before})",
        accepted.len(),
        skipped,
        corpus.len()
    )
    .map_err(runtime)
}
