//! Operations shared by the command line and the HTTP service. Both front
//! ends build a [`Request`], call [`run`] and print the returned JSON.

use flipcalc::biflipper::{classify, encode, equivalent, rebase, Biflipper, Side};
use flipcalc::headtotail::{head_to_tail, linked, H2TResult, Mode};
use flipcalc::quaternion::lift_biflipper;
use flipcalc::wordreduce::reduce;
use flipcalc::{SpaceTag, Tolerance};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::jsonfmt;
use crate::scene::{Scene, SceneDoc};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad JSON, unknown ids, invalid flippers: exit 2, HTTP 400.
    Malformed,
    /// An error raised by the calculus: exit 1, HTTP 422.
    Domain,
    /// Unknown endpoint: HTTP 404.
    NotFound,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApiError {
    pub kind: ErrorKind,
    pub name: String,
    pub message: String,
}

impl ApiError {
    pub fn malformed(name: &str, message: impl Into<String>) -> ApiError {
        ApiError { kind: ErrorKind::Malformed, name: name.into(), message: message.into() }
    }

    pub fn not_found(message: impl Into<String>) -> ApiError {
        ApiError { kind: ErrorKind::NotFound, name: "UnknownEndpoint".into(), message: message.into() }
    }

    /// `{"name", "message"}`.
    pub fn to_json(&self) -> String {
        jsonfmt::to_string(&json!({ "name": self.name, "message": self.message }))
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::Domain => 1,
            ErrorKind::Malformed | ErrorKind::NotFound => 2,
        }
    }
}

impl From<flipcalc::Error> for ApiError {
    fn from(e: flipcalc::Error) -> ApiError {
        ApiError { kind: ErrorKind::Domain, name: e.name().into(), message: e.to_string() }
    }
}

impl std::fmt::Display for ApiError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.name, self.message)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Encode,
    Classify,
    Compose,
    Equivalent,
    Rebase,
    Linked,
    Reduce,
    QuaternionLift,
    Spaces,
}

impl Op {
    pub const ALL: [Op; 9] = [
        Op::Encode,
        Op::Classify,
        Op::Compose,
        Op::Equivalent,
        Op::Rebase,
        Op::Linked,
        Op::Reduce,
        Op::QuaternionLift,
        Op::Spaces,
    ];

    /// Path below `/api/v1/`.
    pub fn path(self) -> &'static str {
        match self {
            Op::Encode => "encode",
            Op::Classify => "classify",
            Op::Compose => "compose",
            Op::Equivalent => "equivalent",
            Op::Rebase => "rebase",
            Op::Linked => "linked",
            Op::Reduce => "reduce",
            Op::QuaternionLift => "quaternion/lift",
            Op::Spaces => "spaces",
        }
    }

    pub fn from_path(p: &str) -> Option<Op> {
        Op::ALL.into_iter().find(|op| op.path() == p)
    }

    pub fn is_get(self) -> bool {
        self == Op::Spaces
    }
}

/// Request body. Which of the optional fields are needed depends on the op.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Request {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scene: Option<SceneDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub biflipper: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub word: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flipper: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side: Option<Side>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

fn need<'a>(field: &'a Option<String>, name: &str) -> Result<&'a str, ApiError> {
    field.as_deref().ok_or_else(|| ApiError::malformed("MissingField", format!("`{name}` is required")))
}

impl Request {
    pub fn tolerance(&self) -> Result<Tolerance, ApiError> {
        match self.tol {
            None => Ok(Tolerance::default()),
            Some(t) if t > 0.0 && t.is_finite() => Ok(Tolerance::new(t)),
            Some(t) => Err(ApiError::malformed("BadTolerance", format!("tolerance must be positive, got {t}"))),
        }
    }

    pub fn scene(&self) -> Result<Scene, ApiError> {
        let doc = self.scene.as_ref().ok_or_else(|| ApiError::malformed("MissingField", "`scene` is required"))?;
        Scene::from_doc(doc)
    }
}

/// Composition with everything needed to draw it.
pub struct Composition {
    pub scene: Scene,
    pub first: Biflipper,
    pub second: Biflipper,
    pub result: H2TResult,
}

pub fn compose(req: &Request) -> Result<Composition, ApiError> {
    let scene = req.scene()?;
    let tol = req.tolerance()?;
    let first = scene.biflipper(need(&req.first, "first")?)?.clone();
    let second = scene.biflipper(need(&req.second, "second")?)?.clone();
    let mode = req.mode.unwrap_or(Mode::Fallback);
    let result = head_to_tail(&first, &second, mode, tol)?;
    Ok(Composition { scene, first, second, result })
}

fn matrix_rows(m: &flipcalc::numkernel::Mat) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

/// Runs one operation and returns its JSON (no trailing newline).
pub fn run(op: Op, req: &Request) -> Result<String, ApiError> {
    req.tolerance()?;
    let out = match op {
        Op::Spaces => {
            let spaces: Vec<&str> = SpaceTag::ALL.iter().map(|s| s.as_str()).collect();
            jsonfmt::to_string(&json!({ "spaces": spaces }))
        }
        Op::Encode => {
            let scene = req.scene()?;
            let t = encode(scene.biflipper(need(&req.biflipper, "biflipper")?)?);
            jsonfmt::to_string(&json!({ "space": t.space(), "matrix": matrix_rows(t.matrix()) }))
        }
        Op::Classify => {
            let scene = req.scene()?;
            let t = match (&req.biflipper, &req.word) {
                (Some(b), None) => encode(scene.biflipper(b)?),
                (None, Some(w)) => scene.word(w)?.encode(),
                _ => return Err(ApiError::malformed("MissingField", "give exactly one of `biflipper` and `word`")),
            };
            jsonfmt::to_string(&classify(&t)?)
        }
        Op::Compose => jsonfmt::to_string(&compose(req)?.result),
        Op::Equivalent => {
            let scene = req.scene()?;
            let (a, b) = (scene.biflipper(need(&req.a, "a")?)?, scene.biflipper(need(&req.b, "b")?)?);
            jsonfmt::to_string(&json!({ "equivalent": equivalent(a, b, req.tolerance()?)? }))
        }
        Op::Rebase => {
            let scene = req.scene()?;
            let t = encode(scene.biflipper(need(&req.biflipper, "biflipper")?)?);
            let e = scene.flipper(need(&req.flipper, "flipper")?)?;
            let side = req.side.ok_or_else(|| ApiError::malformed("MissingField", "`side` is required"))?;
            jsonfmt::to_string(&rebase(&t, e, side, req.tolerance()?)?)
        }
        Op::Linked => {
            let scene = req.scene()?;
            let t = encode(scene.biflipper(need(&req.first, "first")?)?);
            let s = encode(scene.biflipper(need(&req.second, "second")?)?);
            jsonfmt::to_string(&json!({ "flipper": linked(&s, &t, req.tolerance()?) }))
        }
        Op::Reduce => {
            let scene = req.scene()?;
            let (word, derivation) = reduce(scene.word(need(&req.word, "word")?)?);
            jsonfmt::to_string(&json!({ "word": word, "derivation": derivation }))
        }
        Op::QuaternionLift => {
            let scene = req.scene()?;
            let q = lift_biflipper(scene.biflipper(need(&req.biflipper, "biflipper")?)?)?;
            jsonfmt::to_string(&json!({ "quaternion": q }))
        }
    };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn request(scene: &str, extra: serde_json::Value) -> Request {
        let mut v = extra;
        v["scene"] = serde_json::from_str(scene).unwrap();
        serde_json::from_value(v).unwrap()
    }

    const TRANSLATION: &str = r#"{"space": "E2", "flippers": [
        {"id": "p", "kind": "point", "coords": [0, 0]},
        {"id": "q", "kind": "point", "coords": [1, 0]},
        {"id": "r", "kind": "point", "coords": [3, 2]},
        {"id": "s", "kind": "point", "coords": [4, 2]}],
        "biflippers": [{"id": "b1", "tail": "p", "head": "q"}, {"id": "b2", "tail": "r", "head": "s"}]}"#;

    #[test]
    fn point_pair_classifies_as_translation() {
        let out = run(Op::Classify, &request(TRANSLATION, json!({"biflipper": "b1"}))).unwrap();
        assert_eq!(out, r#"{"space":"E2","label":"translation","vector":[2,0]}"#);
    }

    #[test]
    fn translates_are_equivalent() {
        let out = run(Op::Equivalent, &request(TRANSLATION, json!({"a": "b1", "b": "b2"}))).unwrap();
        assert_eq!(out, r#"{"equivalent":true}"#);
    }

    #[test]
    fn errors_carry_core_names() {
        let err = run(Op::Classify, &request(TRANSLATION, json!({"biflipper": "nope"}))).unwrap_err();
        assert_eq!((err.kind, err.name.as_str()), (ErrorKind::Malformed, "UnknownReference"));
        let err = run(Op::QuaternionLift, &request(TRANSLATION, json!({"biflipper": "b1"}))).unwrap_err();
        assert_eq!((err.kind, err.name.as_str()), (ErrorKind::Domain, "WrongFlipperKind"));
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn op_paths_round_trip() {
        for op in Op::ALL {
            assert_eq!(Op::from_path(op.path()), Some(op));
        }
        assert_eq!(Op::from_path("nope"), None);
    }
}
