//! A canned-reply HTTP server that imitates the chat and generate routes
//! of a local model server. Used by protocol tests and `aeroagent probe`
//! smoke checks; it never runs a model.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

use tiny_http::{Header, Response, Server};

/// What the stub sends back on one route.
#[derive(Debug, Clone)]
pub struct Reply {
    pub status: u16,
    pub body: String,
    pub delay: Duration,
}

impl Reply {
    pub fn json(status: u16, body: impl Into<String>) -> Self {
        Self { status, body: body.into(), delay: Duration::ZERO }
    }

    pub fn delayed(mut self, delay: Duration) -> Self {
        self.delay = delay;
        self
    }
}

/// Chat-route body carrying `content` as the assistant message.
pub fn chat_body(content: &str) -> String {
    format!(
        "{{\"model\":\"stub\",\"created_at\":\"1970-01-01T00:00:00Z\",\"message\":{{\"role\":\"assistant\",\"content\":{}}},\"done\":true}}",
        json_string(content)
    )
}

/// Generate-route body carrying `content` as the completion.
pub fn generate_body(content: &str) -> String {
    format!(
        "{{\"model\":\"stub\",\"created_at\":\"1970-01-01T00:00:00Z\",\"response\":{},\"done\":true}}",
        json_string(content)
    )
}

fn json_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// A request the stub received.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Recorded {
    pub method: String,
    pub path: String,
    pub body: String,
}

pub struct StubServer {
    server: Arc<Server>,
    addr: SocketAddr,
    requests: Arc<Mutex<Vec<Recorded>>>,
}

impl StubServer {
    /// Binds an ephemeral localhost port. Unknown paths answer 404.
    pub fn start(routes: impl IntoIterator<Item = (&'static str, Reply)>) -> std::io::Result<Self> {
        Self::bind("127.0.0.1:0", routes)
    }

    pub fn bind(addr: &str, routes: impl IntoIterator<Item = (&'static str, Reply)>) -> std::io::Result<Self> {
        let server = Server::http(addr).map_err(std::io::Error::other)?;
        let addr = server
            .server_addr()
            .to_ip()
            .ok_or_else(|| std::io::Error::other("stub bound to a non-IP address"))?;
        let server = Arc::new(server);
        let routes: HashMap<String, Reply> = routes.into_iter().map(|(p, r)| (p.to_string(), r)).collect();
        let requests = Arc::new(Mutex::new(Vec::new()));
        let (srv, log) = (Arc::clone(&server), Arc::clone(&requests));
        thread::spawn(move || {
            for mut request in srv.incoming_requests() {
                let mut body = String::new();
                let _ = request.as_reader().read_to_string(&mut body);
                let path = request.url().split('?').next().unwrap_or("").to_string();
                log.lock().expect("stub log").push(Recorded {
                    method: request.method().to_string(),
                    path: path.clone(),
                    body,
                });
                let reply = routes.get(&path).cloned().unwrap_or_else(|| Reply::json(404, "{\"error\":\"not found\"}"));
                // each request is served on its own thread so a delayed reply cannot stall the next one
                thread::spawn(move || {
                    thread::sleep(reply.delay);
                    let header = Header::from_bytes("Content-Type", "application/json").expect("static header");
                    let response = Response::from_string(reply.body).with_status_code(reply.status).with_header(header);
                    let _ = request.respond(response);
                });
            }
        });
        Ok(Self { server, addr, requests })
    }

    /// Ollama-style server whose chat route always answers `content`.
    pub fn chat(content: &str) -> std::io::Result<Self> {
        Self::start([("/api/chat", Reply::json(200, chat_body(content)))])
    }

    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn base_url(&self) -> String {
        format!("http://{}", self.addr)
    }

    pub fn requests(&self) -> Vec<Recorded> {
        self.requests.lock().expect("stub log").clone()
    }
}

impl Drop for StubServer {
    fn drop(&mut self) {
        self.server.unblock();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn escapes_json() {
        assert_eq!(json_string("a\"b\\c\nd"), "\"a\\\"b\\\\c\\nd\"");
        assert!(chat_body("Move(1.0);").contains("\"content\":\"Move(1.0);\""));
    }
}
