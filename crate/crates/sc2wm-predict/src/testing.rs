//! Stub chat-completion server for exercising the remote predictor.
//!
//! Test support only; nothing here is part of the production surface. The
//! server speaks just enough HTTP/1.1 for a blocking JSON client: one
//! thread per connection, `Connection: close` on every reply.

use std::io::{Read, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

/// Maps `(request index, request body)` to `(status, reply body)`.
pub type Responder = dyn Fn(usize, &str) -> (u16, String) + Send + Sync;

pub struct StubServer {
    /// Full chat-completions URL on a fresh local port.
    pub endpoint: String,
    heads: Arc<Mutex<Vec<String>>>,
    bodies: Arc<Mutex<Vec<String>>>,
    hits: Arc<AtomicUsize>,
    peak: Arc<AtomicUsize>,
}

impl StubServer {
    /// Serves on a fresh local port, one thread per connection. `delay`
    /// runs between reading a request and writing its response, so
    /// concurrent load is observable in [`StubServer::peak`].
    pub fn spawn(delay: Duration, respond: Box<Responder>) -> StubServer {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let endpoint = format!("http://{}/v1/chat/completions", listener.local_addr().unwrap());
        let server = StubServer {
            endpoint,
            heads: Arc::new(Mutex::new(Vec::new())),
            bodies: Arc::new(Mutex::new(Vec::new())),
            hits: Arc::new(AtomicUsize::new(0)),
            peak: Arc::new(AtomicUsize::new(0)),
        };
        let heads = Arc::clone(&server.heads);
        let bodies = Arc::clone(&server.bodies);
        let hits = Arc::clone(&server.hits);
        let peak = Arc::clone(&server.peak);
        let respond: Arc<Responder> = Arc::from(respond);
        let current = Arc::new(AtomicUsize::new(0));
        thread::spawn(move || {
            for stream in listener.incoming() {
                let Ok(stream) = stream else { break };
                let heads = Arc::clone(&heads);
                let bodies = Arc::clone(&bodies);
                let hits = Arc::clone(&hits);
                let peak = Arc::clone(&peak);
                let current = Arc::clone(&current);
                let respond = Arc::clone(&respond);
                thread::spawn(move || {
                    handle(stream, delay, &*respond, &heads, &bodies, &hits, &peak, &current)
                });
            }
        });
        server
    }

    /// Number of requests fully read so far.
    pub fn hits(&self) -> usize {
        self.hits.load(Ordering::SeqCst)
    }

    /// Highest number of simultaneously in-flight requests observed.
    pub fn peak(&self) -> usize {
        self.peak.load(Ordering::SeqCst)
    }

    /// Request heads (start line plus headers), in arrival order.
    pub fn heads(&self) -> Vec<String> {
        self.heads.lock().unwrap().clone()
    }

    /// Request bodies, in arrival order.
    pub fn bodies(&self) -> Vec<String> {
        self.bodies.lock().unwrap().clone()
    }
}

#[allow(clippy::too_many_arguments)]
fn handle(
    mut stream: TcpStream,
    delay: Duration,
    respond: &Responder,
    heads: &Mutex<Vec<String>>,
    bodies: &Mutex<Vec<String>>,
    hits: &AtomicUsize,
    peak: &AtomicUsize,
    current: &AtomicUsize,
) {
    stream.set_read_timeout(Some(Duration::from_secs(10))).unwrap();
    let mut buf = Vec::new();
    let mut chunk = [0u8; 4096];
    let head_end = loop {
        if let Some(pos) = find(&buf, b"\r\n\r\n") {
            break pos + 4;
        }
        match stream.read(&mut chunk) {
            Ok(0) | Err(_) => return,
            Ok(n) => buf.extend_from_slice(&chunk[..n]),
        }
    };
    let head = String::from_utf8_lossy(&buf[..head_end]).to_string();
    let content_length = head
        .lines()
        .find_map(|line| {
            let (key, value) = line.split_once(':')?;
            if key.eq_ignore_ascii_case("content-length") {
                value.trim().parse::<usize>().ok()
            } else {
                None
            }
        })
        .unwrap_or(0);
    while buf.len() < head_end + content_length {
        match stream.read(&mut chunk) {
            Ok(0) | Err(_) => return,
            Ok(n) => buf.extend_from_slice(&chunk[..n]),
        }
    }
    let body = String::from_utf8_lossy(&buf[head_end..head_end + content_length]).to_string();

    let index = hits.fetch_add(1, Ordering::SeqCst);
    let in_flight = current.fetch_add(1, Ordering::SeqCst) + 1;
    peak.fetch_max(in_flight, Ordering::SeqCst);
    heads.lock().unwrap().push(head);
    bodies.lock().unwrap().push(body.clone());

    thread::sleep(delay);
    let (status, reply) = respond(index, &body);
    let reason = match status {
        200 => "OK",
        500 => "Internal Server Error",
        _ => "Error",
    };
    let response = format!(
        "HTTP/1.1 {status} {reason}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{reply}",
        reply.len()
    );
    let _ = stream.write_all(response.as_bytes());
    let _ = stream.flush();
    current.fetch_sub(1, Ordering::SeqCst);
}

fn find(haystack: &[u8], needle: &[u8]) -> Option<usize> {
    haystack.windows(needle.len()).position(|w| w == needle)
}

/// Minimal well-formed chat-completion reply carrying `content`.
pub fn chat_reply(content: &str) -> String {
    serde_json::json!({
        "choices": [{"message": {"role": "assistant", "content": content}}]
    })
    .to_string()
}
