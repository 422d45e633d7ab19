//! Stateless HTTP facade: `POST /api/v1/<op>` with a JSON [`Request`] body,
//! `GET /api/v1/spaces`. Response bodies are the command line's stdout, byte
//! for byte; errors are `{"name", "message"}` with status 400, 404 or 422.

use std::sync::Arc;

use tiny_http::{Header, Method, Response as HttpResponse, Server};

use crate::ops::{self, ApiError, ErrorKind, Op, Request};

pub const PREFIX: &str = "/api/v1/";

#[derive(Debug, Clone, PartialEq)]
pub struct Reply {
    pub status: u16,
    pub body: String,
    pub request_id: Option<String>,
}

impl Reply {
    fn error(e: &ApiError, request_id: Option<String>) -> Reply {
        let status = match e.kind {
            ErrorKind::Malformed => 400,
            ErrorKind::NotFound => 404,
            ErrorKind::Domain => 422,
        };
        Reply { status, body: format!("{}\n", e.to_json()), request_id }
    }
}

/// Handles one request. `header_id` is the `X-Request-Id` header, if any; a
/// body `id` field takes precedence.
pub fn handle(method: &str, url: &str, body: &[u8], header_id: Option<String>) -> Reply {
    let path = url.split('?').next().unwrap_or("");
    let op = match path.strip_prefix(PREFIX).and_then(Op::from_path) {
        Some(op) => op,
        None => return Reply::error(&ApiError::not_found(format!("no endpoint {path}")), header_id),
    };
    let want = if op.is_get() { "GET" } else { "POST" };
    if method != want {
        let e = ApiError::malformed("MethodNotAllowed", format!("{path} expects {want}"));
        return Reply { status: 405, ..Reply::error(&e, header_id) };
    }
    let req: Request = if op.is_get() {
        Request::default()
    } else {
        match serde_json::from_slice(body) {
            Ok(r) => r,
            Err(e) => return Reply::error(&ApiError::malformed("MalformedRequest", e.to_string()), header_id),
        }
    };
    let request_id = req.id.clone().or(header_id);
    match ops::run(op, &req) {
        Ok(json) => Reply { status: 200, body: format!("{json}\n"), request_id },
        Err(e) => Reply::error(&e, request_id),
    }
}

fn header(name: &str, value: &str) -> Header {
    Header::from_bytes(name.as_bytes(), value.as_bytes()).expect("ASCII header")
}

fn respond(server_req: tiny_http::Request, origin: &str) {
    let mut server_req = server_req;
    let cors = [
        header("Access-Control-Allow-Origin", origin),
        header("Access-Control-Allow-Methods", "GET, POST, OPTIONS"),
        header("Access-Control-Allow-Headers", "Content-Type, X-Request-Id"),
        header("Access-Control-Expose-Headers", "X-Request-Id"),
    ];
    if *server_req.method() == Method::Options {
        let mut resp = HttpResponse::empty(204);
        for h in cors {
            resp.add_header(h);
        }
        let _ = server_req.respond(resp);
        return;
    }
    let mut body = Vec::new();
    let reply = match server_req.as_reader().read_to_end(&mut body) {
        Ok(_) => {
            let header_id = server_req
                .headers()
                .iter()
                .find(|h| h.field.equiv("X-Request-Id"))
                .map(|h| h.value.as_str().to_string());
            handle(server_req.method().as_str(), server_req.url(), &body, header_id)
        }
        Err(e) => Reply::error(&ApiError::malformed("MalformedRequest", e.to_string()), None),
    };
    let mut resp = HttpResponse::from_string(reply.body).with_status_code(reply.status);
    resp.add_header(header("Content-Type", "application/json"));
    for h in cors {
        resp.add_header(h);
    }
    if let Some(id) = reply.request_id.filter(|id| id.is_ascii() && !id.contains(['\r', '\n'])) {
        resp.add_header(header("X-Request-Id", &id));
    }
    let _ = server_req.respond(resp);
}

/// Serves requests on `server` with `workers` threads until the process ends.
pub fn serve(server: Server, origin: &str, workers: usize) {
    let server = Arc::new(server);
    let handles: Vec<_> = (0..workers.max(1))
        .map(|_| {
            let server = Arc::clone(&server);
            let origin = origin.to_string();
            std::thread::spawn(move || {
                for req in server.incoming_requests() {
                    respond(req, &origin);
                }
            })
        })
        .collect();
    for h in handles {
        let _ = h.join();
    }
}

pub fn bind(addr: &str) -> Result<Server, String> {
    Server::http(addr).map_err(|e| format!("cannot listen on {addr}: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spaces_is_a_get() {
        let r = handle("GET", "/api/v1/spaces", b"", None);
        assert_eq!(r.status, 200);
        assert!(r.body.starts_with(r#"{"spaces":["E1","E2""#));
        assert_eq!(handle("POST", "/api/v1/spaces", b"{}", None).status, 405);
    }

    #[test]
    fn status_codes() {
        assert_eq!(handle("POST", "/api/v1/nope", b"{}", None).status, 404);
        let bad = handle("POST", "/api/v1/classify", b"{not json", Some("r1".into()));
        assert_eq!((bad.status, bad.request_id.as_deref()), (400, Some("r1")));
        assert!(bad.body.contains(r#""name":"MalformedRequest""#));
    }

    #[test]
    fn body_id_is_echoed() {
        let r = handle("GET", "/api/v1/spaces?x=1", b"", Some("h".into()));
        assert_eq!(r.request_id.as_deref(), Some("h"));
        let body = br#"{"id": "abc", "scene": {"space": "E2"}, "biflipper": "x"}"#;
        let r = handle("POST", "/api/v1/encode", body, Some("h".into()));
        assert_eq!((r.status, r.request_id.as_deref()), (400, Some("abc")));
    }
}
