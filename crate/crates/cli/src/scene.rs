//! Scene documents: named flippers, biflippers and words of one space.

use std::collections::BTreeMap;

use flipcalc::biflipper::Biflipper;
use flipcalc::flips::Flipper;
use flipcalc::numkernel::Chart;
use flipcalc::wordreduce::ReflectionWord;
use flipcalc::SpaceTag;
use serde::{Deserialize, Serialize};

use crate::ops::ApiError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlipperEntry {
    pub id: String,
    pub kind: String,
    #[serde(default)]
    pub coords: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chart: Option<Chart>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BiflipperEntry {
    pub id: String,
    pub tail: String,
    pub head: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WordEntry {
    pub id: String,
    pub letters: Vec<String>,
}

/// The scene file as written on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneDoc {
    pub space: SpaceTag,
    #[serde(default)]
    pub flippers: Vec<FlipperEntry>,
    #[serde(default)]
    pub biflippers: Vec<BiflipperEntry>,
    #[serde(default)]
    pub words: Vec<WordEntry>,
}

/// A scene with every reference resolved.
#[derive(Debug, Clone)]
pub struct Scene {
    pub space: SpaceTag,
    pub flippers: BTreeMap<String, Flipper>,
    /// Kept in file order for rendering.
    pub biflippers: Vec<(String, Biflipper)>,
    pub words: BTreeMap<String, ReflectionWord>,
}

fn unique<'a>(what: &str, ids: impl Iterator<Item = &'a String>) -> Result<(), ApiError> {
    let mut seen = std::collections::BTreeSet::new();
    for id in ids {
        if !seen.insert(id) {
            return Err(ApiError::malformed("DuplicateId", format!("{what} id `{id}` is used twice")));
        }
    }
    Ok(())
}

impl Scene {
    pub fn from_doc(doc: &SceneDoc) -> Result<Scene, ApiError> {
        let space = doc.space;
        unique("flipper", doc.flippers.iter().map(|f| &f.id))?;
        unique("biflipper", doc.biflippers.iter().map(|f| &f.id))?;
        unique("word", doc.words.iter().map(|f| &f.id))?;
        let mut flippers = BTreeMap::new();
        for f in &doc.flippers {
            let flipper = Flipper::from_coords(space, &f.kind, &f.coords, f.chart)
                .map_err(|e| ApiError::malformed(e.name(), format!("flipper `{}`: {e}", f.id)))?;
            flippers.insert(f.id.clone(), flipper);
        }
        let get = |id: &str| {
            flippers
                .get(id)
                .cloned()
                .ok_or_else(|| ApiError::malformed("UnknownReference", format!("no flipper `{id}`")))
        };
        let mut biflippers = Vec::new();
        for b in &doc.biflippers {
            let bf = Biflipper::new(get(&b.tail)?, get(&b.head)?)
                .map_err(|e| ApiError::malformed(e.name(), format!("biflipper `{}`: {e}", b.id)))?;
            biflippers.push((b.id.clone(), bf));
        }
        let mut words = BTreeMap::new();
        for w in &doc.words {
            let letters = w.letters.iter().map(|l| get(l)).collect::<Result<Vec<_>, _>>()?;
            let word = ReflectionWord::new(letters)
                .map_err(|e| ApiError::malformed(e.name(), format!("word `{}`: {e}", w.id)))?;
            words.insert(w.id.clone(), word);
        }
        Ok(Scene { space, flippers, biflippers, words })
    }

    pub fn parse(text: &str) -> Result<Scene, ApiError> {
        let doc: SceneDoc = serde_json::from_str(text)
            .map_err(|e| ApiError::malformed("MalformedScene", format!("scene JSON: {e}")))?;
        Scene::from_doc(&doc)
    }

    pub fn flipper(&self, id: &str) -> Result<&Flipper, ApiError> {
        self.flippers.get(id).ok_or_else(|| ApiError::malformed("UnknownReference", format!("no flipper `{id}`")))
    }

    pub fn biflipper(&self, id: &str) -> Result<&Biflipper, ApiError> {
        self.biflippers
            .iter()
            .find(|(k, _)| k == id)
            .map(|(_, b)| b)
            .ok_or_else(|| ApiError::malformed("UnknownReference", format!("no biflipper `{id}`")))
    }

    pub fn word(&self, id: &str) -> Result<&ReflectionWord, ApiError> {
        self.words.get(id).ok_or_else(|| ApiError::malformed("UnknownReference", format!("no word `{id}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SCENE: &str = r#"{
        "space": "E2",
        "flippers": [
            {"id": "p", "kind": "point", "coords": [0, 0]},
            {"id": "q", "kind": "point", "coords": [1, 0]},
            {"id": "l", "kind": "line", "coords": [0, 0, 0, 1]}
        ],
        "biflippers": [{"id": "b1", "tail": "p", "head": "q"}],
        "words": [{"id": "w", "letters": ["l", "l"]}]
    }"#;

    #[test]
    fn resolves_references() {
        let s = Scene::parse(SCENE).unwrap();
        assert_eq!(s.space, SpaceTag::E2);
        assert_eq!(s.flippers.len(), 3);
        assert!(s.biflipper("b1").is_ok());
        assert_eq!(s.word("w").unwrap().len(), 2);
    }

    #[test]
    fn rejects_dangling_and_duplicate_ids() {
        let dangling = SCENE.replace(r#""head": "q""#, r#""head": "zz""#);
        assert_eq!(Scene::parse(&dangling).unwrap_err().name, "UnknownReference");
        let dup = SCENE.replace(r#""id": "q""#, r#""id": "p""#);
        assert_eq!(Scene::parse(&dup).unwrap_err().name, "DuplicateId");
        assert_eq!(Scene::parse("{").unwrap_err().name, "MalformedScene");
    }
}
