//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

mod support;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use axum::http::StatusCode;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use scichk::{BackendMode, Engine, EngineConfig};
use scichk_core::metrics::{best_overlap, exact_match, lcs_len, rouge_l, rouge_n, rouge_tokens};
use scichk_core::pipeline::VoteCounts;
use scichk_core::scorers::{decode_span_with, DecodeParams, ScorerError, SpanProbabilities};
use scichk_core::synth::{filler_abstract, synthetic_corpus};
use scichk_core::tokenizer2d::{TokenRange, WindowError};
use scichk_core::{
    check_article, check_claim, make_windows, parse_claim, AbstractRecord, CheckOptions, Consensus, Corpus,
    Document, LexicalEqa, PipelineError, RuleBqa, StanceLabel, WindowConfig,
};
use support::{baseline_mirror, call, fixture, load_corpus, state, StubBackend, CLAIM};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {{
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    }};
}

fn doc_with_sentences(rng: &mut StdRng, sentences: usize) -> Document {
    Document::from_record(AbstractRecord {
        id: "d".into(),
        abstract_text: filler_abstract(rng, sentences, 1..=9),
        title: None,
        url: None,
        year: None,
    })
    .unwrap()
}

/// Windows produced by stepping a t-sentence frame until the last sentence
/// is covered.
fn brute_slider(s: usize, t: usize, p: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut first = 0;
    loop {
        let last = (first + t - 1).min(s - 1);
        out.push((first, last));
        if last == s - 1 {
            return out;
        }
        first += t - p;
    }
}

fn spans(doc: &Document, cfg: &WindowConfig) -> Vec<(usize, usize)> {
    make_windows(doc, cfg)
        .unwrap()
        .iter()
        .map(|w| (w.sentence_first, w.sentence_last))
        .collect()
}

fn criterion_1() -> Outcome {
    let mut rng = StdRng::seed_from_u64(1);
    let started = Instant::now();
    for case in 0..1000 {
        let s = rng.gen_range(1..=60);
        let t = rng.gen_range(1..=10);
        let p = rng.gen_range(0..t);
        let cfg = WindowConfig::new(t, p, 350).unwrap();
        let doc = doc_with_sentences(&mut rng, s);
        ensure!(doc.sentences.len() == s, "case {case}: generator made {} sentences", doc.sentences.len());
        let got = spans(&doc, &cfg);
        let formula = if s <= t { 1 } else { (s - t).div_ceil(t - p) + 1 };
        ensure!(got.len() == formula, "case {case} S={s} t={t} p={p}: {} windows, formula {formula}", got.len());
        ensure!(got == brute_slider(s, t, p), "case {case} S={s} t={t} p={p}: {got:?}");
        let mut covered = vec![false; s];
        for (a, b) in &got {
            covered[*a..=*b].iter_mut().for_each(|c| *c = true);
        }
        ensure!(covered.iter().all(|&c| c), "case {case}: uncovered sentence");
    }
    let elapsed = started.elapsed();
    ensure!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    Ok(format!("1000 cases match the slider and the count formula in {elapsed:.2?}"))
}

fn criterion_2() -> Outcome {
    let mut rng = StdRng::seed_from_u64(2);
    let default = WindowConfig::new(7, 0, 350).unwrap();
    for s in 1..=14 {
        let n = spans(&doc_with_sentences(&mut rng, s), &default).len();
        ensure!(n <= 2, "t=7 p=0 S={s}: {n} windows");
    }
    let got = spans(&doc_with_sentences(&mut rng, 5), &WindowConfig::new(3, 1, 350).unwrap());
    ensure!(got == [(0, 2), (2, 4)], "t=3 p=1 S=5: {got:?}");
    Ok("t=7,p=0 gives at most 2 windows for S<=14; t=3,p=1,S=5 gives [0..2],[2..4]".into())
}

fn brute_decode(rows: &[[f64; 2]], na: f64, params: &DecodeParams) -> (Option<TokenRange>, f64) {
    let mut best: Option<(f64, TokenRange)> = None;
    for end in 0..rows.len() {
        for start in end.saturating_sub(params.max_span_len)..=end {
            let joint = rows[start][0] * rows[end][1];
            if best.is_none_or(|(b, _)| joint > b) {
                best = Some((joint, TokenRange { start, end }));
            }
        }
    }
    let (score, span) = best.unwrap();
    let ok = score > 0.0 && na <= score && score >= params.na_threshold;
    (ok.then_some(span), score)
}

fn criterion_3() -> Outcome {
    let mut rng = StdRng::seed_from_u64(3);
    let (mut mismatches, mut no_answer) = (0, 0);
    for _ in 0..500 {
        let n = rng.gen_range(1..=64);
        let zero_rate = rng.gen_range(0.0..0.6);
        let mut p = || if rng.gen_bool(zero_rate) { 0.0 } else { rng.gen_range(0.0..=1.0) };
        let rows: Vec<[f64; 2]> = (0..n).map(|_| [p(), p()]).collect();
        let na = match rng.gen_range(0..3) {
            0 => 0.0,
            1 => rng.gen_range(0.0..=1.0),
            _ => 1.0,
        };
        let params = DecodeParams {
            na_threshold: if rng.gen_bool(0.5) { 0.0 } else { rng.gen_range(0.0..0.5) },
            max_span_len: if rng.gen_bool(0.5) { 100 } else { rng.gen_range(0..10) },
        };
        let got = decode_span_with(&SpanProbabilities::new(rows.clone(), na).unwrap(), &params).unwrap();
        let (span, score) = brute_decode(&rows, na, &params);
        if got.span != span || got.score != score {
            mismatches += 1;
        }
        if span.is_none() {
            no_answer += 1;
        }
    }
    ensure!(mismatches == 0, "{mismatches} mismatches");
    ensure!(no_answer > 0, "no unanswerable matrix was generated");
    Ok(format!("500 matrices, 0 mismatches ({no_answer} unanswerable)"))
}

fn brute_lcs(a: &[String], b: &[String]) -> usize {
    (0u32..1 << a.len())
        .filter_map(|mask| {
            let sub: Vec<&String> = (0..a.len()).filter(|i| mask >> i & 1 == 1).map(|i| &a[i]).collect();
            let mut it = b.iter();
            sub.iter().all(|x| it.any(|y| y == *x)).then_some(sub.len())
        })
        .max()
        .unwrap_or(0)
}

fn criterion_4() -> Outcome {
    #[derive(serde::Deserialize)]
    struct Case {
        id: String,
        prediction: String,
        golds: Vec<String>,
        em: f64,
        f1: f64,
        recall: f64,
    }
    let cases: Vec<Case> =
        serde_json::from_str(&std::fs::read_to_string(fixture("squad_reference.json")).unwrap()).unwrap();
    ensure!(cases.len() == 50, "fixture has {} cases", cases.len());
    let mut worst = 0.0f64;
    for c in &cases {
        let o = best_overlap(&c.prediction, &c.golds);
        for (name, got, want) in [
            ("em", exact_match(&c.prediction, &c.golds), c.em),
            ("f1", o.f1, c.f1),
            ("recall", o.recall, c.recall),
        ] {
            let diff = (got - want).abs();
            worst = worst.max(diff);
            ensure!(diff <= 1e-9, "{} {name}: {got} vs reference {want}", c.id);
        }
    }

    let mut rng = StdRng::seed_from_u64(4);
    let vocab = ["the", "cat", "sat", "on", "mat", "dog", "ran"];
    for _ in 0..500 {
        let mut sentence = || {
            let n = rng.gen_range(0..=10);
            (0..n).map(|_| *vocab.choose(&mut rng).unwrap()).collect::<Vec<_>>().join(" ")
        };
        let (p, r) = (sentence(), sentence());
        let (pt, rt) = (rouge_tokens(&p), rouge_tokens(&r));
        let l = brute_lcs(&pt, &rt);
        ensure!(lcs_len(&pt, &rt) == l, "LCS {p:?} / {r:?}");
        let want = if l == 0 {
            0.0
        } else {
            let (pp, rr) = (l as f64 / pt.len() as f64, l as f64 / rt.len() as f64);
            2.0 * pp * rr / (pp + rr)
        };
        ensure!((rouge_l(&p, &r) - want).abs() < 1e-12, "ROUGE-L {p:?} / {r:?}");
    }

    let gold = vec!["b c d".to_string()];
    let o = best_overlap("x b c", &gold);
    ensure!((o.f1 - 2.0 / 3.0).abs() < 1e-15 && (o.recall - 2.0 / 3.0).abs() < 1e-15, "F1 example: {o:?}");
    let literal = best_overlap("a b c", &gold);
    let r1 = rouge_n("the cat sat", "the cat", 1);
    ensure!((r1 - 0.8).abs() < 1e-15, "ROUGE-1 example: {r1}");
    let rl = rouge_l("the cat sat on mat", "the cat on the mat");
    ensure!((rl - 0.8).abs() < 1e-15, "ROUGE-L example: {rl}");
    Ok(format!(
        "50 reference cases within {worst:.1e}; 500 ROUGE-L pairs match enumeration; F1 2/3 (tokens x b c; \
         the literal \"a b c\" scores {:.6} because \"a\" is an article), ROUGE-1 0.8, ROUGE-L 0.8",
        literal.f1
    ))
}

const UNDERLINED: [&[&str]; 2] = [
    &[
        "No significant difference was found in terms of rates of usage of hydroxychloroquine or colchicine between those who were found positive for SARS-CoV-2 and those who were found negative",
        "These findings raise doubts regarding the protective role of these medications in the battle against SARS-CoV-2 infection.",
    ],
    &[
        "Hydroxychloroquine has received worldwide attention as a potential treatment for covid-19 because of positive results from small studies.",
        "this study do not support its use in patients admitted to hospital with covid-19 who require oxygen.",
    ],
];

fn criterion_5() -> Outcome {
    let worked = load_corpus("hcq_abstracts.jsonl");
    let q = parse_claim("Does Hydroxychloroquine cure COVID-19 ?").unwrap();
    let sentence_windows = WindowConfig::new(1, 0, 350).unwrap();
    for (id, underlined) in ["worked-1", "worked-2"].into_iter().zip(UNDERLINED) {
        let v = check_article(worked.get(id).unwrap(), &q, &sentence_windows, &LexicalEqa, &RuleBqa::default())
            .map_err(|e| e.to_string())?;
        ensure!(v.label == StanceLabel::No, "{id}: label {} ({:?})", v.label, v.distribution);
        ensure!(
            underlined.iter().any(|u| v.evidence.text.contains(u)),
            "{id}: evidence misses the underlined sentences: {:?}",
            v.evidence.text
        );
    }

    let golden = std::fs::read_to_string(fixture("hcq_claim_report.json")).unwrap();
    let golden = golden.trim_end();
    let corpus = load_corpus("hcq_claim_corpus.jsonl");
    let claim = parse_claim(CLAIM).unwrap();
    for run in 0..3 {
        let r = check_claim(&corpus, &claim, &CheckOptions::default(), &LexicalEqa, &RuleBqa::default())
            .map_err(|e| e.to_string())?;
        ensure!(r.label == Consensus::Negative, "run {run}: label {}", r.label);
        ensure!(r.to_json() == golden, "library run {run} differs from the golden report");
    }

    let cli = Command::new(env!("CARGO_BIN_EXE_scichk"))
        .args(["check", CLAIM, "--corpus", fixture("hcq_claim_corpus.jsonl").to_str().unwrap(), "--json"])
        .env_remove("SCICHK_BACKEND")
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(cli.status.success(), "cli exit {:?}", cli.status.code());
    let cli_out = String::from_utf8(cli.stdout).unwrap();
    ensure!(cli_out.trim_end() == golden, "CLI output differs from the golden report");

    let (status, service_out) = call(
        &state(&EngineConfig::default(), corpus.clone()),
        "POST",
        "/v1/check",
        r#"{"agent":"hydroxychloroquine","verb":"cure","disease":"covid-19"}"#,
    );
    ensure!(status == StatusCode::OK, "service status {status}");
    ensure!(service_out == cli_out, "service and CLI bodies differ");

    let stub = StubBackend::start(baseline_mirror());
    let remote = Engine::new(&remote_config(&stub.url)).unwrap();
    let via_wire = remote.check(&corpus, &claim).map_err(|e| e.to_string())?;
    ensure!(via_wire.to_json() == golden, "remote mirror of the baselines differs from the golden report");

    Ok("both worked abstracts answer no with underlined evidence; golden report identical across 3 library runs, \
        the CLI, the service and the wire protocol"
        .into())
}

fn criterion_6() -> Outcome {
    let mut rng = StdRng::seed_from_u64(6);
    let margin = 0.2;
    let label = |votes: &[StanceLabel]| VoteCounts::tally(votes.iter().copied()).consensus(margin);
    for case in 0..10_000 {
        let n = rng.gen_range(0..30);
        let mut votes: Vec<StanceLabel> = (0..n).map(|_| *StanceLabel::ALL.choose(&mut rng).unwrap()).collect();
        let base = label(&votes);
        votes.shuffle(&mut rng);
        ensure!(label(&votes) == base, "case {case}: permutation changed the label");
        let mut padded = votes.clone();
        for _ in 0..rng.gen_range(1..10) {
            let at = rng.gen_range(0..=padded.len());
            padded.insert(at, StanceLabel::Neutral);
        }
        let after = label(&padded);
        let flipped = matches!(
            (base, after),
            (Consensus::Affirmative, Consensus::Negative) | (Consensus::Negative, Consensus::Affirmative)
        );
        ensure!(!flipped && after == base, "case {case}: neutral insertion moved {base} to {after}");
        let c = VoteCounts::tally(votes.iter().copied());
        if c.yes + c.no == 0 {
            ensure!(base == Consensus::Neutral, "case {case}: {c:?} gave {base}");
        } else if c.yes == c.no {
            ensure!(base == Consensus::Balanced, "case {case}: tie {c:?} gave {base}");
        }
    }
    ensure!(label(&[]) == Consensus::Neutral, "empty vote");
    Ok("10000 multisets: permutation invariant, neutral insertion inert, empty/neutral-only Neutral, ties Balanced"
        .into())
}

fn remote_config(url: &str) -> EngineConfig {
    EngineConfig {
        backend: BackendMode::Remote,
        eqa_endpoint: Some(url.to_string()),
        bqa_endpoint: Some(url.to_string()),
        timeout: Duration::from_secs(5),
        retries: 1,
        ..Default::default()
    }
}

/// A stub that answers like the baselines except on one route, where it
/// returns `(status, payload)`.
fn faulty(route: &'static str, status: u16, payload: &'static str) -> StubBackend {
    let good = baseline_mirror();
    StubBackend::start(Arc::new(move |path, body| {
        if path == route {
            (status, payload.to_string())
        } else {
            good(path, body)
        }
    }))
}

fn criterion_7() -> Outcome {
    let corpus = load_corpus("hcq_claim_corpus.jsonl");
    let claim = parse_claim(CLAIM).unwrap();
    let golden = std::fs::read_to_string(fixture("hcq_claim_report.json")).unwrap();

    type Check = fn(&PipelineError) -> bool;
    let cases: [(&str, StubBackend, Check, &str); 4] = [
        (
            "simplex violation",
            faulty("/v1/bqa", 200, r#"{"yes":0.7,"no":0.7,"neutral":0.1}"#),
            |e| matches!(e, PipelineError::Scorer(ScorerError::BackendProtocol { .. })),
            "BackendProtocol",
        ),
        (
            "out-of-range span",
            faulty("/v1/eqa", 200, r#"{"answerable":true,"start":0,"end":9999,"score":0.9}"#),
            |e| {
                matches!(
                    e,
                    PipelineError::Scorer(ScorerError::Window(WindowError::SpanOutOfWindow { end: 9999, .. }))
                )
            },
            "SpanOutOfWindow",
        ),
        (
            "non-200",
            faulty("/v1/bqa", 500, r#"{"error":"model crashed"}"#),
            |e| matches!(e, PipelineError::Scorer(ScorerError::BackendStatus { status: 500, .. })),
            "BackendStatus",
        ),
        (
            "non-JSON body",
            faulty("/v1/eqa", 200, "<html>oops</html>"),
            |e| matches!(e, PipelineError::Scorer(ScorerError::BackendProtocol { .. })),
            "BackendProtocol",
        ),
    ];
    for (name, stub, expected, wire_name) in cases {
        let cfg = remote_config(&stub.url);
        match Engine::new(&cfg).unwrap().check(&corpus, &claim) {
            Ok(_) => return Err(format!("{name}: produced a report")),
            Err(e) => ensure!(expected(&e), "{name}: wrong error {e}"),
        }
        let (status, body) = call(&state(&cfg, corpus.clone()), "POST", "/v1/check", &format!(r#"{{"question":"{CLAIM}"}}"#));
        ensure!(status == StatusCode::BAD_GATEWAY, "{name}: service status {status}");
        let v: serde_json::Value = serde_json::from_str(&body).map_err(|e| format!("{name}: {e}"))?;
        ensure!(v["error"] == wire_name, "{name}: service error {body}");
        ensure!(v.get("articles").is_none(), "{name}: error body carries report data");
    }

    let unreachable = remote_config("http://127.0.0.1:9");
    match Engine::new(&unreachable).unwrap().check(&corpus, &claim) {
        Err(PipelineError::Scorer(ScorerError::BackendUnreachable { attempts: 2, .. })) => {}
        other => return Err(format!("unreachable backend: {:?}", other.map(|r| r.label))),
    }

    let healthy = StubBackend::start(baseline_mirror());
    let report = Engine::new(&remote_config(&healthy.url)).unwrap().check(&corpus, &claim).map_err(|e| e.to_string())?;
    ensure!(report.to_json() == golden.trim_end(), "healthy backend after failures differs from golden");
    Ok("simplex violation, out-of-range span, non-200, non-JSON and unreachable each raise their typed error and \
        a 502 with no report; a healthy backend then reproduces the golden report"
        .into())
}

fn criterion_8() -> Outcome {
    let mut rng = StdRng::seed_from_u64(8);
    let mut corpus = Corpus::new();
    for rec in synthetic_corpus(&mut rng, 1000, "aspirin", "stroke") {
        corpus.ingest(rec).map_err(|e| e.to_string())?;
    }
    let claim = parse_claim("Does aspirin prevent stroke?").unwrap();
    let opts = CheckOptions {
        limit: 1000,
        ..Default::default()
    };
    let started = Instant::now();
    let verdicts = corpus
        .documents()
        .map(|d| check_article(d, &claim, &opts.window, &LexicalEqa, &RuleBqa::default()))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let report = check_claim(&corpus, &claim, &opts, &LexicalEqa, &RuleBqa::default()).map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();
    ensure!(verdicts.len() == 1000, "{} verdicts", verdicts.len());
    ensure!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    let c = report.counts;
    Ok(format!(
        "1000 abstracts checked one by one, then as one claim, in {elapsed:.2?} ({} retrieved: yes {} no {} neutral {})",
        report.articles.len(),
        c.yes,
        c.no,
        c.neutral
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("window arithmetic", criterion_1),
        ("anchored window cases", criterion_2),
        ("span decoding", criterion_3),
        ("metric oracles", criterion_4),
        ("end-to-end fixtures", criterion_5),
        ("aggregation laws", criterion_6),
        ("wire-protocol conformance", criterion_7),
        ("throughput", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("criterion {} ({name}): PASS: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
