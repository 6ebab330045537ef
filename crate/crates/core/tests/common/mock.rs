//! Minimal HTTP/1.1 server speaking the embedding wire contract.

use std::collections::VecDeque;
use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::{Arc, Mutex};

use serde_json::{json, Value};

/// Deterministic stand-in encoder: strictly positive components derived
/// from an FNV-1a hash of the text.
pub fn encode(text: &str, dim: usize) -> Vec<f64> {
    (0..dim)
        .map(|i| {
            let mut h: u64 = 0xcbf2_9ce4_8422_2325 ^ (i as u64).wrapping_mul(0x9e37_79b9);
            for b in text.bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x0100_0000_01b3);
            }
            0.05 + (h % 1000) as f64 / 1000.0
        })
        .collect()
}

#[derive(Clone)]
pub struct Reply {
    status: u16,
    body: String,
}

impl Reply {
    pub fn status(status: u16) -> Self {
        Reply { status, body: r#"{"error": "unavailable"}"#.into() }
    }

    pub fn json(status: u16, body: &str) -> Self {
        Reply { status, body: body.into() }
    }
}

#[derive(Default)]
struct State {
    hits: usize,
    bodies: Vec<String>,
    script: VecDeque<Reply>,
}

pub struct MockServer {
    port: u16,
    state: Arc<Mutex<State>>,
}

impl MockServer {
    /// Serves `encode` for every request.
    pub fn encoder(dim: usize) -> Self {
        Self::scripted(Vec::new(), dim)
    }

    /// Answers `/embed` with `script` in order, then falls back to `encode`.
    pub fn scripted(script: Vec<Reply>, dim: usize) -> Self {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let port = listener.local_addr().unwrap().port();
        let state = Arc::new(Mutex::new(State { script: script.into(), ..State::default() }));
        let shared = Arc::clone(&state);
        std::thread::spawn(move || {
            for stream in listener.incoming().flatten() {
                let state = Arc::clone(&shared);
                std::thread::spawn(move || serve(stream, &state, dim));
            }
        });
        MockServer { port, state }
    }

    pub fn url(&self) -> String {
        format!("http://127.0.0.1:{}", self.port)
    }

    /// Requests served on `/embed`.
    pub fn hits(&self) -> usize {
        self.state.lock().unwrap().hits
    }

    pub fn bodies(&self) -> Vec<String> {
        self.state.lock().unwrap().bodies.clone()
    }
}

fn serve(stream: TcpStream, state: &Mutex<State>, dim: usize) {
    let mut reader = BufReader::new(stream.try_clone().unwrap());
    let mut request_line = String::new();
    if reader.read_line(&mut request_line).is_err() {
        return;
    }
    let mut content_length = 0;
    loop {
        let mut line = String::new();
        if reader.read_line(&mut line).unwrap_or(0) == 0 || line == "\r\n" {
            break;
        }
        if let Some((k, v)) = line.split_once(':') {
            if k.eq_ignore_ascii_case("content-length") {
                content_length = v.trim().parse().unwrap_or(0);
            }
        }
    }
    let mut body = vec![0; content_length];
    reader.read_exact(&mut body).unwrap();
    let body = String::from_utf8(body).unwrap();

    let path = request_line.split_whitespace().nth(1).unwrap_or("/").to_owned();
    let reply = if path == "/health" {
        Reply::json(200, &json!({"status": "ok", "model": "mock-encoder", "dim": dim}).to_string())
    } else if path == "/embed" {
        let mut st = state.lock().unwrap();
        st.hits += 1;
        st.bodies.push(body.clone());
        match st.script.pop_front() {
            Some(r) => r,
            None => {
                let req: Value = serde_json::from_str(&body).unwrap();
                let vectors: Vec<Vec<f64>> =
                    req["texts"].as_array().unwrap().iter().map(|t| encode(t.as_str().unwrap(), dim)).collect();
                Reply::json(200, &json!({"dim": dim, "vectors": vectors}).to_string())
            }
        }
    } else {
        Reply::json(404, "{}")
    };
    let mut stream = stream;
    let _ = write!(
        stream,
        "HTTP/1.1 {} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{}",
        reply.status,
        reply.body.len(),
        reply.body
    );
    let _ = stream.flush();
}
