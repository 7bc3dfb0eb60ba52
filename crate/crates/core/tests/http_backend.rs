use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use opinion_bench::backends::{BackendConfig, BackendError, ChatMessage, HttpBackend, LlmBackend};
use serde_json::{json, Value};

/// Canned reply for one request.
#[derive(Clone)]
struct Reply {
    status: u16,
    body: String,
    delay: Duration,
}

fn reply(status: u16, body: Value) -> Reply {
    Reply {
        status,
        body: body.to_string(),
        delay: Duration::ZERO,
    }
}

fn completion(text: &str) -> Value {
    json!({"choices": [{"message": {"role": "assistant", "content": text}}]})
}

/// Minimal HTTP/1.1 server answering each connection with the next canned
/// reply (the last one repeats). Records request bodies and peak
/// concurrency.
struct Stub {
    url: String,
    bodies: Arc<Mutex<Vec<Value>>>,
    peak: Arc<AtomicUsize>,
}

fn read_request(stream: &mut TcpStream) -> Option<Value> {
    let mut reader = BufReader::new(stream);
    let mut len = 0usize;
    loop {
        let mut line = String::new();
        if reader.read_line(&mut line).ok()? == 0 {
            return None;
        }
        let line = line.trim_end();
        if line.is_empty() {
            break;
        }
        if let Some((k, v)) = line.split_once(':') {
            if k.eq_ignore_ascii_case("content-length") {
                len = v.trim().parse().ok()?;
            }
        }
    }
    let mut body = vec![0; len];
    reader.read_exact(&mut body).ok()?;
    serde_json::from_slice(&body).ok()
}

fn serve(replies: Vec<Reply>) -> Stub {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/v1/chat/completions", listener.local_addr().unwrap());
    let bodies = Arc::new(Mutex::new(Vec::new()));
    let peak = Arc::new(AtomicUsize::new(0));
    let (b, p) = (Arc::clone(&bodies), Arc::clone(&peak));
    std::thread::spawn(move || {
        let live = Arc::new(AtomicUsize::new(0));
        for (n, stream) in listener.incoming().enumerate() {
            let Ok(mut stream) = stream else { continue };
            let r = replies[n.min(replies.len() - 1)].clone();
            let (b, p, live) = (Arc::clone(&b), Arc::clone(&p), Arc::clone(&live));
            std::thread::spawn(move || {
                let now = live.fetch_add(1, Ordering::SeqCst) + 1;
                p.fetch_max(now, Ordering::SeqCst);
                if let Some(body) = read_request(&mut stream) {
                    b.lock().unwrap().push(body);
                }
                std::thread::sleep(r.delay);
                let reason = if r.status == 200 { "OK" } else { "Status" };
                let msg = format!(
                    "HTTP/1.1 {} {reason}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{}",
                    r.status,
                    r.body.len(),
                    r.body
                );
                live.fetch_sub(1, Ordering::SeqCst);
                let _ = stream.write_all(msg.as_bytes());
            });
        }
    });
    Stub { url, bodies, peak }
}

fn config(url: &str) -> BackendConfig {
    BackendConfig {
        endpoint: url.to_string(),
        model: "stub-model".into(),
        api_key_env: None,
        backoff_base_ms: 10,
        timeout_secs: 5.0,
        ..BackendConfig::default()
    }
}

fn prompt() -> Vec<ChatMessage> {
    vec![
        ChatMessage::system("You are a shopping agent."),
        ChatMessage::human("Determine which next command to use."),
    ]
}

#[test]
fn echo_round_trip_and_request_shape() {
    let stub = serve(vec![reply(200, completion("ok"))]);
    let mut backend = HttpBackend::new(config(&stub.url)).unwrap();
    assert_eq!(backend.complete(&prompt()).unwrap(), "ok");
    let body = stub.bodies.lock().unwrap()[0].clone();
    assert_eq!(body["model"], "stub-model");
    assert_eq!(body["temperature"], 0.01);
    assert_eq!(body["messages"][0]["role"], "system");
    assert_eq!(body["messages"][1]["role"], "user");
    assert_eq!(body["messages"][1]["content"], "Determine which next command to use.");
}

#[test]
fn rate_limited_twice_then_ok_backs_off_one_then_two_seconds() {
    let stub = serve(vec![
        reply(429, json!({"error": "slow down"})),
        reply(429, json!({"error": "slow down"})),
        reply(200, completion("ok")),
    ]);
    let cfg = BackendConfig {
        backoff_base_ms: 1000,
        ..config(&stub.url)
    };
    let mut backend = HttpBackend::new(cfg).unwrap();
    let start = Instant::now();
    assert_eq!(backend.complete(&prompt()).unwrap(), "ok");
    assert!(start.elapsed() >= Duration::from_secs(3), "{:?}", start.elapsed());
    assert_eq!(backend.attempts(), 3);
}

#[test]
fn empty_choices_is_empty_completion() {
    let stub = serve(vec![reply(200, json!({"choices": []}))]);
    let mut backend = HttpBackend::new(config(&stub.url)).unwrap();
    assert_eq!(backend.complete(&prompt()), Err(BackendError::EmptyCompletion));
}

#[test]
fn server_errors_exhaust_retries() {
    let stub = serve(vec![reply(503, json!({}))]);
    let cfg = BackendConfig {
        max_retries: 2,
        ..config(&stub.url)
    };
    let mut backend = HttpBackend::new(cfg).unwrap();
    assert_eq!(backend.complete(&prompt()), Err(BackendError::HttpStatus(503)));
    assert_eq!(backend.attempts(), 3);
}

#[test]
fn client_errors_are_not_retried() {
    let stub = serve(vec![reply(400, json!({"error": "bad"}))]);
    let mut backend = HttpBackend::new(config(&stub.url)).unwrap();
    assert_eq!(backend.complete(&prompt()), Err(BackendError::HttpStatus(400)));
    assert_eq!(backend.attempts(), 1);
}

#[test]
fn missing_key_fails_before_any_request() {
    let cfg = BackendConfig {
        api_key_env: Some("OPINION_BENCH_TEST_UNSET_KEY".into()),
        ..config("http://127.0.0.1:9/unused")
    };
    let mut backend = HttpBackend::new(cfg).unwrap();
    assert_eq!(
        backend.complete(&prompt()),
        Err(BackendError::AuthMissing("OPINION_BENCH_TEST_UNSET_KEY".into()))
    );
    assert_eq!(backend.attempts(), 0);
}

#[test]
fn clones_share_the_in_flight_limit() {
    let slow = Reply {
        delay: Duration::from_millis(150),
        ..reply(200, completion("ok"))
    };
    let stub = serve(vec![slow]);
    let cfg = BackendConfig {
        max_concurrency: 2,
        ..config(&stub.url)
    };
    let backend = HttpBackend::new(cfg).unwrap();
    let handles: Vec<_> = (0..6)
        .map(|_| {
            let mut b = backend.clone();
            std::thread::spawn(move || b.complete(&prompt()).unwrap())
        })
        .collect();
    for h in handles {
        assert_eq!(h.join().unwrap(), "ok");
    }
    assert_eq!(backend.attempts(), 6);
    assert!(stub.peak.load(Ordering::SeqCst) <= 2);
}
