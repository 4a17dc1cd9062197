//! Helpers shared by the integration tests: fixture paths, an in-process
//! request runner for the service router and a minimal HTTP stub backend.

#![allow(dead_code)]

use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::thread;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use scichk::service::{router, AppState};
use scichk::{Engine, EngineConfig};
use scichk_core::Corpus;
use tower::ServiceExt;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(name)
}

pub fn load_corpus(name: &str) -> Corpus {
    Corpus::load(&fixture(name)).unwrap().0
}

pub const CLAIM: &str = "Does hydroxychloroquine cure covid-19?";

/// Runs one request through a freshly built router.
pub fn call(state: &AppState, method: &str, uri: &str, body: &str) -> (StatusCode, String) {
    let app = router(state.clone(), None).unwrap();
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(Body::from(body.to_string()))
        .unwrap();
    let rt = tokio::runtime::Builder::new_current_thread().enable_all().build().unwrap();
    rt.block_on(async move {
        let resp = app.oneshot(req).await.unwrap();
        let status = resp.status();
        let bytes = resp.into_body().collect().await.unwrap().to_bytes();
        (status, String::from_utf8(bytes.to_vec()).unwrap())
    })
}

pub fn state(config: &EngineConfig, corpus: Corpus) -> AppState {
    AppState::new(Engine::new(config).unwrap(), corpus, config.allow_ingest)
}

pub type Handler = dyn Fn(&str, &str) -> (u16, String) + Send + Sync;

/// A blocking HTTP/1.1 server answering every request through `handler`
/// (given the path and body) with `Connection: close`.
pub struct StubBackend {
    pub url: String,
    pub hits: Arc<AtomicUsize>,
}

impl StubBackend {
    pub fn start(handler: Arc<Handler>) -> Self {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let url = format!("http://{}", listener.local_addr().unwrap());
        let hits = Arc::new(AtomicUsize::new(0));
        let counter = hits.clone();
        thread::spawn(move || {
            for stream in listener.incoming() {
                let Ok(stream) = stream else { continue };
                let handler = handler.clone();
                let counter = counter.clone();
                thread::spawn(move || {
                    counter.fetch_add(1, Ordering::SeqCst);
                    let _ = serve_one(stream, &*handler);
                });
            }
        });
        Self { url, hits }
    }

    pub fn hits(&self) -> usize {
        self.hits.load(Ordering::SeqCst)
    }
}

fn serve_one(stream: TcpStream, handler: &Handler) -> std::io::Result<()> {
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut request_line = String::new();
    reader.read_line(&mut request_line)?;
    let path = request_line.split_whitespace().nth(1).unwrap_or("/").to_string();
    let mut length = 0usize;
    loop {
        let mut line = String::new();
        reader.read_line(&mut line)?;
        let line = line.trim_end();
        if line.is_empty() {
            break;
        }
        if let Some((k, v)) = line.split_once(':') {
            if k.eq_ignore_ascii_case("content-length") {
                length = v.trim().parse().unwrap_or(0);
            }
        }
    }
    let mut body = vec![0u8; length];
    reader.read_exact(&mut body)?;
    let (status, payload) = handler(&path, &String::from_utf8_lossy(&body));
    let mut stream = stream;
    write!(
        stream,
        "HTTP/1.1 {status} Stub\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{payload}",
        payload.len()
    )?;
    stream.flush()
}

/// Remote answers that mirror the lexical and rule baselines, so a remote
/// engine pointed at this stub reproduces the baseline report.
pub fn baseline_mirror() -> Arc<Handler> {
    use scichk_core::scorers::rule_bqa_classify;
    Arc::new(|path: &str, body: &str| {
        let v: serde_json::Value = serde_json::from_str(body).unwrap();
        let question = v["question"].as_str().unwrap();
        match path {
            "/v1/eqa" => {
                let tokens: Vec<String> = v["tokens"]
                    .as_array()
                    .unwrap()
                    .iter()
                    .map(|t| t.as_str().unwrap().to_string())
                    .collect();
                let answer = mirror_eqa(question, &tokens);
                (200, answer.to_string())
            }
            "/v1/bqa" => {
                let d = rule_bqa_classify(question, v["context"].as_str().unwrap());
                (
                    200,
                    serde_json::json!({"yes": d.yes(), "no": d.no(), "neutral": d.neutral()}).to_string(),
                )
            }
            _ => (404, "{}".into()),
        }
    })
}

/// Rebuilds a one-document window from the token texts and runs the
/// lexical baseline on it.
fn mirror_eqa(question: &str, tokens: &[String]) -> serde_json::Value {
    use scichk_core::scorers::lexical_eqa_score;
    use scichk_core::{make_windows, AbstractRecord, Document, WindowConfig};
    let doc = Document::from_record(AbstractRecord {
        id: "stub".into(),
        abstract_text: tokens.join(" "),
        title: None,
        url: None,
        year: None,
    })
    .unwrap();
    let windows = make_windows(&doc, &WindowConfig::new(usize::MAX / 2, 0, tokens.len().max(1)).unwrap()).unwrap();
    let answer = lexical_eqa_score(question, &windows[0]);
    match answer.span {
        Some(s) => serde_json::json!({"answerable": true, "start": s.start, "end": s.end, "score": answer.score}),
        None => serde_json::json!({"answerable": false, "score": answer.score}),
    }
}
