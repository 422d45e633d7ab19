//! Golden corpus: `cases.txt` lists command lines, `expected/<name>.out`
//! holds the exit status and both output streams of each.

use std::path::{Path, PathBuf};
use std::process::Output;

#[derive(Debug, Clone)]
pub struct Case {
    pub name: String,
    /// Scene file, or empty for commands without one.
    pub scene: String,
    pub args: Vec<String>,
    pub expected: String,
}

impl Case {
    pub fn expected_path(root: &Path, name: &str) -> PathBuf {
        root.join("expected").join(format!("{name}.out"))
    }
}

/// Parses `cases.txt`. A missing expected file reads as empty.
pub fn cases(root: &Path) -> std::io::Result<Vec<Case>> {
    let text = std::fs::read_to_string(root.join("cases.txt"))?;
    let mut out = Vec::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        let (name, cmd) = line
            .split_once(':')
            .ok_or_else(|| std::io::Error::new(std::io::ErrorKind::InvalidData, format!("bad case line: {line}")))?;
        let args: Vec<String> = cmd.split_whitespace().map(String::from).collect();
        let scene = args.iter().find(|a| a.ends_with(".json")).cloned().unwrap_or_default();
        let expected = std::fs::read_to_string(Case::expected_path(root, name.trim())).unwrap_or_default();
        out.push(Case { name: name.trim().to_string(), scene, args, expected });
    }
    Ok(out)
}

pub fn render(out: &Output) -> String {
    format!(
        "exit: {}\n--- stdout\n{}--- stderr\n{}",
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    )
}
