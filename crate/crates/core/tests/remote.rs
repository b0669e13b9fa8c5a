use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

use ldfs::embedding::{embed, EmbeddingBackend};
use ldfs::remote::{RemoteClient, RemoteConfig, RemoteEmbedder, RemoteScorer};
use ldfs::scorer::{score_pairs, ScoreBackend, ScorePair};
use ldfs::BackendError;
use serde_json::{json, Value};

struct Request {
    method: String,
    path: String,
    body: Value,
}

type Handler = dyn Fn(&Request) -> (u16, String) + Send + Sync;

struct MockServer {
    url: String,
    requests: Arc<Mutex<Vec<(String, String, Value)>>>,
}

fn read_request(stream: &TcpStream) -> Option<Request> {
    let mut reader = BufReader::new(stream);
    let mut line = String::new();
    reader.read_line(&mut line).ok()?;
    let mut parts = line.split_whitespace();
    let method = parts.next()?.to_string();
    let path = parts.next()?.to_string();
    let mut length = 0;
    loop {
        let mut header = String::new();
        reader.read_line(&mut header).ok()?;
        let header = header.trim_end();
        if header.is_empty() {
            break;
        }
        if let Some((name, value)) = header.split_once(':') {
            if name.eq_ignore_ascii_case("content-length") {
                length = value.trim().parse().ok()?;
            }
        }
    }
    let mut body = vec![0; length];
    reader.read_exact(&mut body).ok()?;
    let body = serde_json::from_slice(&body).unwrap_or(Value::Null);
    Some(Request { method, path, body })
}

fn serve(handler: Box<Handler>) -> MockServer {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}", listener.local_addr().unwrap());
    let requests = Arc::new(Mutex::new(Vec::new()));
    let log = Arc::clone(&requests);
    let handler: Arc<Handler> = Arc::from(handler);
    thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { break };
            let handler = Arc::clone(&handler);
            let log = Arc::clone(&log);
            thread::spawn(move || {
                if let Some(req) = read_request(&stream) {
                    log.lock()
                        .unwrap()
                        .push((req.method.clone(), req.path.clone(), req.body.clone()));
                    let (status, body) = handler(&req);
                    let reply = format!(
                        "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                        body.len()
                    );
                    let _ = stream.write_all(reply.as_bytes());
                }
            });
        }
    });
    MockServer { url, requests }
}

fn info_body() -> String {
    json!({
        "embed_backend_id": "mock-embed",
        "score_backend_id": "mock-score",
        "dim": 3,
        "embed_token_limit": 512,
        "score_token_limit": 1024,
        "score_variant": "mean"
    })
    .to_string()
}

/// Embeds each text as (len, 1, 0); scores each pair as -(target length).
fn model_handler(req: &Request) -> (u16, String) {
    match (req.method.as_str(), req.path.as_str()) {
        ("GET", "/healthz") => (200, json!({"status": "ok"}).to_string()),
        ("GET", "/v1/info") => (200, info_body()),
        ("POST", "/v1/embed") => {
            let texts = req.body["texts"].as_array().unwrap();
            let vectors: Vec<Value> = texts
                .iter()
                .map(|t| json!([t.as_str().unwrap().len() as f64, 1.0, 0.0]))
                .collect();
            (200, json!({"vectors": vectors, "dim": 3}).to_string())
        }
        ("POST", "/v1/score") => {
            let pairs = req.body["pairs"].as_array().unwrap();
            let scores: Vec<f64> = pairs
                .iter()
                .map(|p| {
                    assert!(p["context"].is_string());
                    -(p["target"].as_str().unwrap().len() as f64)
                })
                .collect();
            (200, json!({"scores": scores, "variant": "mean"}).to_string())
        }
        _ => (404, json!({"error": "not found"}).to_string()),
    }
}

fn client(url: &str, max_batch: usize) -> Arc<RemoteClient> {
    let mut config = RemoteConfig::new(url);
    config.max_batch = max_batch;
    config.max_retries = 2;
    config.initial_backoff = Duration::from_millis(5);
    config.timeout = Duration::from_secs(5);
    Arc::new(RemoteClient::new(config).unwrap())
}

#[test]
fn info_and_health() {
    let server = serve(Box::new(model_handler));
    let c = client(&server.url, 8);
    c.health().unwrap();
    let info = c.info().unwrap();
    assert_eq!(info.embed_backend_id, "mock-embed");
    assert_eq!(info.dim, 3);
    assert_eq!(info.score_token_limit, Some(1024));
    assert_eq!(info.score_variant, "mean");
}

#[test]
fn embed_round_trip_preserves_order_across_chunks() {
    let server = serve(Box::new(model_handler));
    let embedder = RemoteEmbedder::connect(client(&server.url, 2)).unwrap();
    assert_eq!(embedder.backend_id(), "mock-embed");
    assert_eq!(embedder.dim(), 3);
    let texts = ["a", "bbbb", "cc", "   ", "ddddddd"];
    let vectors = embed(&embedder, &texts).unwrap();
    assert_eq!(vectors.len(), 5);
    assert!(vectors[3].is_zero());
    for (t, v) in texts.iter().zip(&vectors) {
        if t.trim().is_empty() {
            continue;
        }
        let raw = [t.len() as f64, 1.0, 0.0];
        let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        for (got, want) in v.values().iter().zip(raw) {
            assert!((got - want / norm).abs() < 1e-12);
        }
    }
    let embeds: Vec<_> = server
        .requests
        .lock()
        .unwrap()
        .iter()
        .filter(|(_, p, _)| p == "/v1/embed")
        .map(|(_, _, b)| b["texts"].as_array().unwrap().len())
        .collect();
    assert_eq!(embeds, vec![2, 2]);
}

#[test]
fn score_round_trip() {
    let server = serve(Box::new(model_handler));
    let scorer = RemoteScorer::connect(client(&server.url, 3)).unwrap();
    assert_eq!(scorer.backend_id(), "mock-score");
    assert_eq!(scorer.variant(), "mean");
    assert_eq!(scorer.token_limit(), Some(1024));
    let targets = ["x", "yy", "zzz", "wwww"];
    let pairs: Vec<ScorePair> = targets
        .iter()
        .map(|t| ScorePair {
            target: t,
            context: "ctx",
        })
        .collect();
    let scores = score_pairs(&scorer, &pairs).unwrap();
    assert_eq!(scores, vec![-1.0, -2.0, -3.0, -4.0]);
    let bodies: Vec<Value> = server
        .requests
        .lock()
        .unwrap()
        .iter()
        .filter(|(_, p, _)| p == "/v1/score")
        .map(|(_, _, b)| b.clone())
        .collect();
    assert_eq!(bodies.len(), 2);
    assert_eq!(bodies[0]["pairs"][0], json!({"context": "ctx", "target": "x"}));
}

#[test]
fn nothing_listening_is_transport_error() {
    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let c = client(&format!("http://127.0.0.1:{port}"), 8);
    let err = c.health().unwrap_err();
    assert!(err.is_transport(), "{err:?}");
}

#[test]
fn bad_status_is_protocol_error_without_retry() {
    let server = serve(Box::new(|_: &Request| (400, json!({"error": "bad"}).to_string())));
    let err = client(&server.url, 8).info().unwrap_err();
    assert!(matches!(err, BackendError::Protocol { .. }), "{err:?}");
    assert_eq!(server.requests.lock().unwrap().len(), 1);
}

#[test]
fn malformed_body_is_protocol_error() {
    let server = serve(Box::new(|req: &Request| match req.path.as_str() {
        "/v1/info" => (200, "{not json".to_string()),
        _ => (200, json!({"status": "ok"}).to_string()),
    }));
    let err = client(&server.url, 8).info().unwrap_err();
    assert!(matches!(err, BackendError::Protocol { .. }), "{err:?}");
}

#[test]
fn wrong_score_count_is_protocol_error() {
    let server = serve(Box::new(|req: &Request| match req.path.as_str() {
        "/v1/score" => (200, json!({"scores": [1.0], "variant": "mean"}).to_string()),
        _ => model_handler(req),
    }));
    let scorer = RemoteScorer::connect(client(&server.url, 8)).unwrap();
    let pairs = [
        ScorePair {
            target: "a",
            context: "b",
        },
        ScorePair {
            target: "c",
            context: "d",
        },
    ];
    assert!(matches!(scorer.score_batch(&pairs), Err(BackendError::Protocol { .. })));
}

#[test]
fn dimension_mismatch_detected() {
    let server = serve(Box::new(|req: &Request| match req.path.as_str() {
        "/v1/embed" => (200, json!({"vectors": [[1.0, 0.0]], "dim": 2}).to_string()),
        _ => model_handler(req),
    }));
    let embedder = RemoteEmbedder::connect(client(&server.url, 8)).unwrap();
    let err = embedder.embed_batch(&["hello"]).unwrap_err();
    assert!(
        matches!(err, BackendError::DimensionMismatch { expected: 3, got: 2 }),
        "{err:?}"
    );
}

#[test]
fn unavailable_is_retried() {
    let calls = Arc::new(AtomicUsize::new(0));
    let seen = Arc::clone(&calls);
    let server = serve(Box::new(move |req: &Request| {
        if seen.fetch_add(1, Ordering::SeqCst) < 2 {
            (503, json!({"error": "loading"}).to_string())
        } else {
            model_handler(req)
        }
    }));
    client(&server.url, 8).health().unwrap();
    assert_eq!(calls.load(Ordering::SeqCst), 3);

    calls.store(0, Ordering::SeqCst);
    let server = serve(Box::new(|_: &Request| (503, "{}".to_string())));
    let err = client(&server.url, 8).health().unwrap_err();
    assert!(err.is_transport());
    assert_eq!(server.requests.lock().unwrap().len(), 3);
}
