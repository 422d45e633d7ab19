//! Words of reflections in lines of `E2` and their reduction by pencil and
//! involution relations.
//!
//! Letters are listed in application order: the word `[w1, .., wn]` stands for
//! `F_wn o .. o F_w1`, so `w1` acts first. A point letter is read as two
//! perpendicular lines through it.
//!
//! The reducer works on the leftmost window of four letters. Two letters that
//! agree are cancelled. Otherwise a line `m` common to the pencils of the two
//! pairs is found and both pairs are rewritten to end and start with `m`,
//! which then cancels. When both pairs are parallel in different directions
//! the middle pair is first turned by a right angle about its meeting point.
//! An odd word stops at one letter when its last three lines share a pencil and
//! at three letters otherwise (a glide reflection needs three).

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::flips::{Flipper, FlipperKind, Isometry};
use crate::numkernel::{affine_matrix, Mat, SpaceTag, Vector};

/// Lines meeting farther out than this are treated as parallel.
pub const FAR_INTERSECTION: f64 = 1e12;

const SAME_EPS: f64 = 1e-9;

/// A line `n . x = c` with unit normal `n`, first non-zero entry positive.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Line {
    n: [f64; 2],
    c: f64,
}

impl Line {
    fn new(n: [f64; 2], c: f64) -> Line {
        let len = n[0].hypot(n[1]);
        let (mut n, mut c) = ([n[0] / len, n[1] / len], c / len);
        if n[0] < -1e-15 || (n[0].abs() <= 1e-15 && n[1] < 0.0) {
            n = [-n[0], -n[1]];
            c = -c;
        }
        Line { n, c }
    }

    fn through(p: [f64; 2], n: [f64; 2]) -> Line {
        Line::new(n, n[0] * p[0] + n[1] * p[1])
    }

    fn of_flipper(f: &Flipper) -> Line {
        let n = f.normal().expect("line letter");
        let a = f.affine().expect("Euclidean letter").anchor();
        Line::new([n[0], n[1]], n[0] * a[0] + n[1] * a[1])
    }

    fn to_flipper(self) -> Flipper {
        let [nx, ny] = self.n;
        Flipper::e_line(&[self.c * nx, self.c * ny], &[-ny, nx]).expect("unit normal")
    }

    fn matrix(self) -> Mat {
        let [nx, ny] = self.n;
        let r = Mat::from_row_slice(2, 2, &[1.0 - 2.0 * nx * nx, -2.0 * nx * ny, -2.0 * nx * ny, 1.0 - 2.0 * ny * ny]);
        affine_matrix(&r, &Vector::from_column_slice(&[2.0 * self.c * nx, 2.0 * self.c * ny]))
    }

    /// Line of a reflection matrix.
    fn of_reflection(m: &Mat) -> Line {
        // I - R = 2 n n^T
        let d = [[1.0 - m[(0, 0)], -m[(0, 1)]], [-m[(1, 0)], 1.0 - m[(1, 1)]]];
        let col = if d[0][0].abs() >= d[1][1].abs() { [d[0][0], d[1][0]] } else { [d[0][1], d[1][1]] };
        let len = col[0].hypot(col[1]);
        let n = [col[0] / len, col[1] / len];
        let c = (n[0] * m[(0, 2)] + n[1] * m[(1, 2)]) / 2.0;
        Line::new(n, c)
    }

    fn same(self, other: Line) -> bool {
        let scale = self.c.abs().max(other.c.abs()).max(1.0);
        (self.n[0] - other.n[0]).abs() <= SAME_EPS
            && (self.n[1] - other.n[1]).abs() <= SAME_EPS
            && (self.c - other.c).abs() <= SAME_EPS * scale
    }

    fn contains(self, p: [f64; 2]) -> bool {
        let scale = p[0].abs().max(p[1].abs()).max(1.0);
        (self.n[0] * p[0] + self.n[1] * p[1] - self.c).abs() <= 1e-8 * scale
    }
}

#[derive(Debug, Clone, Copy)]
enum Pencil {
    Concurrent([f64; 2]),
    Parallel([f64; 2]),
}

fn pencil(a: Line, b: Line) -> Pencil {
    let det = a.n[0] * b.n[1] - a.n[1] * b.n[0];
    if det != 0.0 {
        let p = [(a.c * b.n[1] - b.c * a.n[1]) / det, (a.n[0] * b.c - b.n[0] * a.c) / det];
        if p[0].hypot(p[1]) < FAR_INTERSECTION {
            return Pencil::Concurrent(p);
        }
    }
    Pencil::Parallel(a.n)
}

fn parallel_normals(a: [f64; 2], b: [f64; 2]) -> bool {
    (a[0] * b[1] - a[1] * b[0]).abs() <= SAME_EPS
}

impl Pencil {
    fn kind(self) -> StepKind {
        match self {
            Pencil::Concurrent(_) => StepKind::PencilConcurrent,
            Pencil::Parallel(_) => StepKind::PencilParallel,
        }
    }

    fn holds(self, l: Line) -> bool {
        match self {
            Pencil::Concurrent(p) => l.contains(p),
            Pencil::Parallel(n) => parallel_normals(n, l.n),
        }
    }
}

/// A line shared by two pencils, `None` for two distinct parallel classes.
fn common_line(p: Pencil, q: Pencil, fallback: Line) -> Option<Line> {
    match (p, q) {
        (Pencil::Concurrent(a), Pencil::Concurrent(b)) => {
            let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
            let scale = a[0].abs().max(a[1].abs()).max(1.0);
            if dx.hypot(dy) <= 1e-9 * scale {
                Some(fallback)
            } else {
                Some(Line::through(a, [-dy, dx]))
            }
        }
        (Pencil::Concurrent(a), Pencil::Parallel(n)) | (Pencil::Parallel(n), Pencil::Concurrent(a)) => {
            Some(Line::through(a, n))
        }
        (Pencil::Parallel(n1), Pencil::Parallel(n2)) => parallel_normals(n1, n2).then_some(fallback),
    }
}

/// `F_a o F_b o F_c` as a line, for three lines of one pencil. The product is
/// an involution, so the order of the factors may be reversed.
fn triple(a: Line, b: Line, c: Line) -> Line {
    Line::of_reflection(&(a.matrix() * b.matrix() * c.matrix()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepKind {
    Involution,
    PencilParallel,
    PencilConcurrent,
}

impl StepKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StepKind::Involution => "involution",
            StepKind::PencilParallel => "pencil-parallel",
            StepKind::PencilConcurrent => "pencil-concurrent",
        }
    }
}

/// One rewrite: `replaced` starting at `position` becomes `replacement`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Step {
    pub kind: StepKind,
    pub position: usize,
    pub replaced: Vec<Flipper>,
    pub replacement: Vec<Flipper>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Derivation {
    pub steps: Vec<Step>,
}

/// A word of line reflections in `E2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectionWord {
    letters: Vec<Flipper>,
}

impl ReflectionWord {
    /// Builds a word, expanding point letters into two perpendicular lines.
    pub fn new(letters: Vec<Flipper>) -> Result<ReflectionWord> {
        let mut out = Vec::with_capacity(letters.len());
        for f in letters {
            if f.space() != SpaceTag::E2 {
                return Err(Error::SpaceMismatch(SpaceTag::E2, f.space()));
            }
            match f.kind() {
                FlipperKind::Line => out.push(f),
                FlipperKind::Point => {
                    let p = f.affine().expect("E2 point").anchor();
                    out.push(Line::through([p[0], p[1]], [1.0, 0.0]).to_flipper());
                    out.push(Line::through([p[0], p[1]], [0.0, 1.0]).to_flipper());
                }
                k => return Err(Error::WrongFlipperKind(format!("word letters are lines or points, got {k}"))),
            }
        }
        Ok(ReflectionWord { letters: out })
    }

    pub fn empty() -> ReflectionWord {
        ReflectionWord { letters: Vec::new() }
    }

    pub fn letters(&self) -> &[Flipper] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// The isometry `F_wn o .. o F_w1`.
    pub fn encode(&self) -> Isometry {
        encode_flippers(&self.letters)
    }

    fn lines(&self) -> Vec<Line> {
        self.letters.iter().map(Line::of_flipper).collect()
    }

    fn from_lines(lines: &[Line]) -> ReflectionWord {
        ReflectionWord { letters: lines.iter().map(|l| l.to_flipper()).collect() }
    }
}

impl Serialize for ReflectionWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ReflectionWord", 2)?;
        st.serialize_field("space", SpaceTag::E2.as_str())?;
        st.serialize_field("letters", &self.letters)?;
        st.end()
    }
}

fn encode_flippers(letters: &[Flipper]) -> Isometry {
    letters.iter().fold(Isometry::identity(SpaceTag::E2), |acc, f| f.flip().compose(&acc).expect("E2 letters"))
}

struct Reducer {
    word: Vec<Line>,
    steps: Vec<Step>,
}

impl Reducer {
    fn rewrite(&mut self, kind: StepKind, position: usize, len: usize, replacement: Vec<Line>) {
        let replaced: Vec<Line> = self.word.splice(position..position + len, replacement.iter().copied()).collect();
        self.steps.push(Step {
            kind,
            position,
            replaced: replaced.iter().map(|l| l.to_flipper()).collect(),
            replacement: replacement.iter().map(|l| l.to_flipper()).collect(),
        });
    }

    fn cancel_adjacent(&mut self) -> bool {
        match self.word.windows(2).position(|w| w[0].same(w[1])) {
            Some(i) => {
                self.rewrite(StepKind::Involution, i, 2, Vec::new());
                true
            }
            None => false,
        }
    }

    /// Rewrites the pair at `i` to end with `m`.
    fn end_with(&mut self, i: usize, m: Line) {
        let (a, b) = (self.word[i], self.word[i + 1]);
        if b == m {
            return;
        }
        let kind = pencil(a, b).kind();
        self.rewrite(kind, i, 2, vec![triple(a, b, m), m]);
    }

    /// Rewrites the pair at `i` to start with `m`.
    fn start_with(&mut self, i: usize, m: Line) {
        let (c, d) = (self.word[i], self.word[i + 1]);
        if c == m {
            return;
        }
        let kind = pencil(c, d).kind();
        self.rewrite(kind, i, 2, vec![m, triple(m, c, d)]);
    }

    fn snap(m: Line, b: Line, c: Line) -> Line {
        if m.same(b) {
            b
        } else if m.same(c) {
            c
        } else {
            m
        }
    }

    /// Shortens the window of four letters at `i` to two.
    fn window(&mut self, i: usize) {
        let [a, b, c, d] = [self.word[i], self.word[i + 1], self.word[i + 2], self.word[i + 3]];
        let (p, q) = (pencil(a, b), pencil(c, d));
        let m = match common_line(p, q, b) {
            Some(m) => Self::snap(m, b, c),
            None => {
                // both pairs parallel, middle pair meets: turn it by a right angle
                let Pencil::Concurrent(r) = pencil(b, c) else { unreachable!("distinct parallel classes meet") };
                let b2 = Line::through(r, [-b.n[1], b.n[0]]);
                self.rewrite(StepKind::PencilConcurrent, i + 1, 2, vec![b2, triple(b2, b, c)]);
                return self.window(i);
            }
        };
        self.end_with(i, m);
        self.start_with(i + 2, m);
        self.rewrite(StepKind::Involution, i + 1, 2, Vec::new());
    }

    /// Three letters of one pencil collapse to one.
    fn collapse_three(&mut self) -> bool {
        let [a, b, c] = [self.word[0], self.word[1], self.word[2]];
        if !pencil(a, b).holds(c) {
            return false;
        }
        self.end_with(0, c);
        self.rewrite(StepKind::Involution, 1, 2, Vec::new());
        true
    }

    fn run(&mut self) {
        loop {
            if self.cancel_adjacent() {
                continue;
            }
            match self.word.len() {
                n if n >= 4 => self.window(0),
                3 => {
                    if !self.collapse_three() {
                        return;
                    }
                }
                _ => return,
            }
        }
    }
}

/// Reduces a word to at most two letters (three for a glide reflection),
/// preserving the isometry and the parity of the length.
pub fn reduce(w: &ReflectionWord) -> (ReflectionWord, Derivation) {
    let mut r = Reducer { word: w.lines(), steps: Vec::new() };
    r.run();
    (ReflectionWord::from_lines(&r.word), Derivation { steps: r.steps })
}

/// Whether the word encodes the identity.
pub fn is_identity(w: &ReflectionWord) -> bool {
    reduce(w).0.is_empty()
}

/// Whether the lines share one pencil.
pub fn in_one_pencil(lines: &[Flipper]) -> bool {
    let ls: Vec<Line> = lines.iter().map(Line::of_flipper).collect();
    let Some(first) = ls.first() else { return true };
    let Some(other) = ls.iter().find(|l| !l.same(*first)) else { return true };
    let p = pencil(*first, *other);
    ls.iter().all(|l| p.holds(*l))
}

impl Derivation {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Applies the steps to `input`, checking each one against the current
    /// word and the encoded isometry (entry-wise within `eps`).
    pub fn replay(&self, input: &ReflectionWord, eps: f64) -> Result<ReflectionWord> {
        let mut word = input.letters.clone();
        let mut current = encode_flippers(&word);
        for (k, step) in self.steps.iter().enumerate() {
            let bad = |what: &str| Error::InvalidDerivation(format!("step {k}: {what}"));
            let end = step.position + step.replaced.len();
            if end > word.len() {
                return Err(bad("out of range"));
            }
            let matches = word[step.position..end].iter().zip(&step.replaced).all(|(x, y)| x.approx_eq(y, 1e-8));
            if !matches {
                return Err(bad("replaced letters do not match the word"));
            }
            match step.kind {
                StepKind::Involution => {
                    let ok = step.replaced.len() == 2
                        && step.replacement.is_empty()
                        && Line::of_flipper(&step.replaced[0]).same(Line::of_flipper(&step.replaced[1]));
                    if !ok {
                        return Err(bad("not a repeated letter"));
                    }
                }
                StepKind::PencilConcurrent | StepKind::PencilParallel => {
                    let all: Vec<Flipper> = step.replaced.iter().chain(&step.replacement).cloned().collect();
                    if step.replaced.len() != 2 || step.replacement.len() != 2 || !in_one_pencil(&all) {
                        return Err(bad("lines are not in one pencil"));
                    }
                }
            }
            word.splice(step.position..end, step.replacement.iter().cloned());
            let next = encode_flippers(&word);
            if (next.matrix() - current.matrix()).amax() > eps {
                return Err(bad("isometry changed"));
            }
            current = next;
        }
        Ok(ReflectionWord { letters: word })
    }
}
