//! The live HTTP backend against a local socket server.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

use promptaug::llm::{ChatRequest, Gateway, GatewayError, HttpBackend, RetryPolicy};

/// Serves canned (status, body) replies in order and records request bodies.
fn serve(replies: Vec<(u16, String)>) -> (String, Arc<Mutex<Vec<String>>>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/v1/chat/completions", listener.local_addr().unwrap());
    let seen = Arc::new(Mutex::new(Vec::new()));
    let log = Arc::clone(&seen);
    thread::spawn(move || {
        for (status, body) in replies {
            let Ok((stream, _)) = listener.accept() else { return };
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut length = 0;
            loop {
                let mut line = String::new();
                reader.read_line(&mut line).unwrap();
                if line == "\r\n" || line.is_empty() {
                    break;
                }
                if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
                    length = v.trim().parse().unwrap();
                }
            }
            let mut request = vec![0; length];
            reader.read_exact(&mut request).unwrap();
            log.lock().unwrap().push(String::from_utf8(request).unwrap());
            let mut stream = stream;
            write!(
                stream,
                "HTTP/1.1 {status} X\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{body}",
                body.len()
            )
            .unwrap();
        }
    });
    (url, seen)
}

fn completion(text: &str) -> String {
    serde_json::json!({"choices": [{"message": {"role": "assistant", "content": text}, "finish_reason": "stop"}]}).to_string()
}

fn gateway(url: &str) -> Gateway {
    let backend = HttpBackend::new(url, "test-model", "secret", Duration::from_secs(5)).unwrap();
    Gateway::builder(backend)
        .retry(RetryPolicy {
            max_retries: 3,
            base_delay: Duration::from_millis(10),
        })
        .build()
}

#[test]
fn retries_rate_limits_then_succeeds() {
    let (url, seen) = serve(vec![
        (429, "{}".into()),
        (429, "{}".into()),
        (200, completion("1. hello there")),
    ]);
    let gw = gateway(&url);
    let reply = gw.complete(&ChatRequest::generation("In a numbered list, write 1 new comment")).unwrap();
    assert_eq!(reply.text, "1. hello there");
    assert_eq!(reply.attempt_count, 3);
    let bodies = seen.lock().unwrap();
    assert_eq!(bodies.len(), 3);
    let body: serde_json::Value = serde_json::from_str(&bodies[0]).unwrap();
    assert_eq!(body["model"], "test-model");
    assert_eq!(body["messages"][0]["role"], "user");
}

#[test]
fn unauthorized_fails_without_retry() {
    let (url, seen) = serve(vec![(401, "{}".into()), (200, completion("never"))]);
    let gw = gateway(&url);
    let err = gw.complete(&ChatRequest::generation("hi")).unwrap_err();
    assert!(matches!(err, GatewayError::Unauthorized(401)), "{err:?}");
    assert_eq!(seen.lock().unwrap().len(), 1);
}

#[test]
fn missing_key_is_rejected() {
    assert!(matches!(
        HttpBackend::new("http://localhost:1", "m", " ", Duration::from_secs(1)),
        Err(GatewayError::MissingCredential)
    ));
}
