//! The service over a real socket.

use std::thread;

use flipcalc_cli::service;

fn start() -> String {
    let server = service::bind("127.0.0.1:0").unwrap();
    let addr = server.server_addr().to_ip().unwrap();
    thread::spawn(move || service::serve(server, "http://localhost:5173", 4));
    format!("http://{addr}/api/v1")
}

const ROTATIONS: &str = r#"{"space": "E2", "flippers": [
    {"id": "l1", "kind": "line", "coords": [0, 0, 1, 0]},
    {"id": "l2", "kind": "line", "coords": [0, 0, 1, 1]},
    {"id": "m1", "kind": "line", "coords": [2, 0, 0, 1]},
    {"id": "m2", "kind": "line", "coords": [2, 0, -1, 1]}],
    "biflippers": [{"id": "r1", "tail": "l1", "head": "l2"}, {"id": "r2", "tail": "m1", "head": "m2"}]}"#;

fn body(extra: &str) -> String {
    format!(r#"{{"id": "req-1", "scene": {ROTATIONS}, {extra}}}"#)
}

#[test]
fn compose_over_http() {
    let base = start();
    let resp = ureq::post(&format!("{base}/compose")).send_string(&body(r#""first": "r1", "second": "r2""#)).unwrap();
    assert_eq!(resp.status(), 200);
    assert_eq!(resp.header("X-Request-Id"), Some("req-1"));
    assert_eq!(resp.header("Access-Control-Allow-Origin"), Some("http://localhost:5173"));
    let json: serde_json::Value = serde_json::from_str(&resp.into_string().unwrap()).unwrap();
    assert!(json["steps"].as_array().is_some_and(|s| !s.is_empty()));
}

#[test]
fn errors_over_http() {
    let base = start();
    let err = ureq::post(&format!("{base}/rebase"))
        .send_string(&body(r#""biflipper": "r1", "flipper": "m1", "side": "tail""#))
        .unwrap_err();
    let ureq::Error::Status(code, resp) = err else { panic!("transport error") };
    assert_eq!(code, 422);
    let json: serde_json::Value = serde_json::from_str(&resp.into_string().unwrap()).unwrap();
    assert_eq!(json["name"], "NotCompatible");
    let ureq::Error::Status(code, _) = ureq::get(&format!("{base}/nowhere")).call().unwrap_err() else { panic!() };
    assert_eq!(code, 404);
    let ureq::Error::Status(code, _) = ureq::post(&format!("{base}/classify")).send_string("{").unwrap_err() else {
        panic!()
    };
    assert_eq!(code, 400);
}

#[test]
fn spaces_and_preflight() {
    let base = start();
    let body = ureq::get(&format!("{base}/spaces")).call().unwrap().into_string().unwrap();
    assert_eq!(body, "{\"spaces\":[\"E1\",\"E2\",\"E3\",\"S2\",\"RP2\",\"H2\",\"H3\",\"MOEB\"]}\n");
    let pre = ureq::request("OPTIONS", &format!("{base}/compose")).call().unwrap();
    assert_eq!(pre.status(), 204);
    assert!(pre.header("Access-Control-Allow-Methods").unwrap().contains("POST"));
}

#[test]
fn concurrent_requests_agree() {
    let base = start();
    let payload = body(r#""first": "r1", "second": "r2""#);
    let expected = ureq::post(&format!("{base}/compose")).send_string(&payload).unwrap().into_string().unwrap();
    let handles: Vec<_> = (0..16)
        .map(|_| {
            let (url, payload) = (format!("{base}/compose"), payload.clone());
            thread::spawn(move || ureq::post(&url).send_string(&payload).unwrap().into_string().unwrap())
        })
        .collect();
    for h in handles {
        assert_eq!(h.join().unwrap(), expected);
    }
}
