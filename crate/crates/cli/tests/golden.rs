//! Byte comparison against the golden corpus, and parity of the HTTP handler
//! with the command line. `BLESS=1 cargo test --test golden` rewrites the
//! expected files.

#[path = "golden/mod.rs"]
mod golden;

use std::path::{Path, PathBuf};
use std::process::Command;

use flipcalc_cli::ops::Op;
use flipcalc_cli::service;
use serde_json::{json, Map, Value};

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn run(args: &[String]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_flipcalc")).args(args).current_dir(root()).output().unwrap()
}

#[test]
fn outputs_match_the_corpus() {
    let root = root();
    let bless = std::env::var_os("BLESS").is_some();
    let mut failures = Vec::new();
    for case in golden::cases(&root).unwrap() {
        let got = golden::render(&run(&case.args));
        if bless {
            std::fs::write(golden::Case::expected_path(&root, &case.name), &got).unwrap();
        } else if got != case.expected {
            failures.push(format!("{}:\n{got}", case.name));
        }
    }
    assert!(failures.is_empty(), "{} mismatches\n{}", failures.len(), failures.join("\n"));
}

#[test]
fn corpus_is_large_enough() {
    let cases = golden::cases(&root()).unwrap();
    let scenes: std::collections::BTreeSet<_> =
        cases.iter().filter(|c| c.scene.starts_with("scenes/")).map(|c| &c.scene).collect();
    let on_disk = std::fs::read_dir(root().join("scenes")).unwrap().count();
    assert!(scenes.len() >= 20 && on_disk >= 20);
    assert!(cases.iter().all(|c| !c.expected.is_empty()), "unblessed case");
}

/// The HTTP request equivalent to a command line, if there is one.
fn to_request(args: &[String]) -> Option<(Op, Value)> {
    let op = match args[0].as_str() {
        "encode" => Op::Encode,
        "classify" => Op::Classify,
        "compose" => Op::Compose,
        "equiv" => Op::Equivalent,
        "rebase" => Op::Rebase,
        "linked" => Op::Linked,
        "reduce" => Op::Reduce,
        "quat" => Op::QuaternionLift,
        _ => return None,
    };
    let scene = std::fs::read_to_string(root().join(&args[1])).ok()?;
    let mut body = Map::new();
    body.insert("scene".into(), serde_json::from_str(&scene).ok()?);
    let mut it = args[2..].iter();
    while let Some(flag) = it.next() {
        match flag.as_str() {
            "--strict" => {
                body.insert("mode".into(), json!("strict"));
            }
            "--fallback" => {
                body.insert("mode".into(), json!("fallback"));
            }
            "--json" => {}
            "--svg" => return None,
            "--tol" => {
                let t: f64 = it.next()?.parse().ok()?;
                body.insert("tol".into(), json!(t));
            }
            f => {
                body.insert(f.trim_start_matches("--").into(), json!(it.next()?));
            }
        }
    }
    Some((op, Value::Object(body)))
}

#[test]
fn service_bodies_equal_cli_output() {
    let mut checked = 0;
    for case in golden::cases(&root()).unwrap() {
        let Some((op, body)) = to_request(&case.args) else { continue };
        let out = run(&case.args);
        let reply = service::handle("POST", &format!("/api/v1/{}", op.path()), body.to_string().as_bytes(), None);
        let code = out.status.code().unwrap();
        let expected_status = match code {
            0 => 200,
            1 => 422,
            _ => 400,
        };
        assert_eq!(reply.status, expected_status, "{}", case.name);
        if code == 0 {
            assert_eq!(reply.body.as_bytes(), &out.stdout[..], "{}", case.name);
        } else {
            let name: Value = serde_json::from_str(&reply.body).unwrap();
            let stderr = String::from_utf8_lossy(&out.stderr);
            assert!(stderr.starts_with(&format!("error: {}:", name["name"].as_str().unwrap())), "{}", case.name);
        }
        checked += 1;
    }
    assert!(checked >= 20, "only {checked} cases have a service equivalent");
}

#[test]
fn responses_do_not_depend_on_request_order() {
    let requests: Vec<(String, Vec<u8>)> = golden::cases(&root())
        .unwrap()
        .iter()
        .filter_map(|c| to_request(&c.args))
        .map(|(op, body)| (format!("/api/v1/{}", op.path()), body.to_string().into_bytes()))
        .collect();
    let forward: Vec<_> = requests.iter().map(|(p, b)| service::handle("POST", p, b, None)).collect();
    let mut backward: Vec<_> = requests.iter().rev().map(|(p, b)| service::handle("POST", p, b, None)).collect();
    backward.reverse();
    assert_eq!(forward, backward);
    let mut order: Vec<usize> = (0..requests.len()).collect();
    order.sort_by_key(|i| (i * 7919) % requests.len());
    for i in order {
        let (p, b) = &requests[i];
        assert_eq!(service::handle("POST", p, b, None), forward[i]);
    }
}
