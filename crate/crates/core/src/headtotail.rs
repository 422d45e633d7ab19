//! Head-to-tail composition.
//!
//! To compose `S ∘ T` we look for a flipper `E` that can serve as the head of
//! a biflipper of `T` and as the tail of a biflipper of `S`. Then
//! `T = F_E ∘ F_A` and `S = F_D ∘ F_E`, so `S ∘ T = F_D ∘ F_A`.
//!
//! Candidates for `E` are built from the geometry of the two isometries
//! (centers, axes, mirrors, common perpendiculars, pencil intersections) and
//! each is checked with [`rebase`]. When no candidate works the pair is not
//! linked; fallback mode then runs the multi-step reductions.

use serde::{Serialize, Serializer};

use crate::biflipper::{
    axis_frame, classify, decompose, encode, invariant_pencil, rebase, transform_commuting, Biflipper, IsometryClass,
    Label, Side,
};
use crate::error::{Error, Result};
use crate::flips::{line_frame, Flipper, Isometry};
use crate::numkernel::{
    cross3, hyperboloid_normalize, lorentz_cross, reference_perpendicular, AffineSubspace, BilinearForm,
    IsometryMatrix, Mat, SpaceTag, Tolerance, Vector,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Strict,
    Fallback,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MoveKind {
    RotateAboutCenter,
    TranslateAlongAxis,
    ScrewAdjust,
    Rebase,
    CommutingTransform,
}

impl MoveKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MoveKind::RotateAboutCenter => "rotate-about-center",
            MoveKind::TranslateAlongAxis => "translate-along-axis",
            MoveKind::ScrewAdjust => "screw-adjust",
            MoveKind::Rebase => "rebase",
            MoveKind::CommutingTransform => "commuting-transform",
        }
    }
}

/// One equivalence move: `before` and `after` encode the same isometry.
#[derive(Debug, Clone, PartialEq)]
pub struct Move {
    pub kind: MoveKind,
    /// The flipper the move is organised around: the new common flipper for
    /// rebases, the commuting flipper for commuting transforms.
    pub flipper: Flipper,
    pub before: Biflipper,
    pub after: Biflipper,
}

impl Serialize for Move {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Move", 4)?;
        st.serialize_field("kind", &self.kind)?;
        st.serialize_field("flipper", &self.flipper)?;
        st.serialize_field("before", &self.before)?;
        st.serialize_field("after", &self.after)?;
        st.end()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct H2TResult {
    pub biflipper: Biflipper,
    pub steps: Vec<Move>,
}

impl H2TResult {
    /// Whether every recorded move preserves the encoded isometry.
    pub fn steps_valid(&self, tol: Tolerance) -> bool {
        self.steps
            .iter()
            .all(|m| crate::biflipper::equivalent(&m.before, &m.after, tol).unwrap_or(false))
    }
}

fn move_kind(label: Label) -> MoveKind {
    match label {
        Label::Rotation | Label::PointSymmetry | Label::LineSymmetry | Label::Elliptic => MoveKind::RotateAboutCenter,
        Label::Translation
        | Label::GlideReflection
        | Label::HyperbolicTranslation
        | Label::ParallelMotion
        | Label::Parabolic => MoveKind::TranslateAlongAxis,
        Label::ScrewMotion | Label::GlideLineSymmetry | Label::Loxodromic => MoveKind::ScrewAdjust,
        _ => MoveKind::Rebase,
    }
}

fn record(before: &Biflipper, after: &Biflipper, flipper: &Flipper) -> Move {
    let kind = classify(&encode(before)).map(|c| move_kind(c.label)).unwrap_or(MoveKind::Rebase);
    Move { kind, flipper: flipper.clone(), before: before.clone(), after: after.clone() }
}

fn admissible(t: &Isometry, s: &Isometry, e: &Flipper, tol: Tolerance) -> bool {
    rebase(t, e, Side::Head, tol).is_ok() && rebase(s, e, Side::Tail, tol).is_ok()
}

/// Joins `bT` and `bS` along the common flipper `e`.
fn join(bt: &Biflipper, bs: &Biflipper, e: &Flipper, tol: Tolerance) -> Result<H2TResult> {
    let (t, s) = (encode(bt), encode(bs));
    let bt2 = rebase(&t, e, Side::Head, tol)?;
    let bs2 = rebase(&s, e, Side::Tail, tol)?;
    let steps = vec![record(bt, &bt2, e), record(bs, &bs2, e)];
    Ok(H2TResult { biflipper: Biflipper::new(bt2.tail().clone(), bs2.head().clone())?, steps })
}

/// Composes `S ∘ T` given `bT` (applied first) and `bS`.
pub fn head_to_tail(bt: &Biflipper, bs: &Biflipper, mode: Mode, tol: Tolerance) -> Result<H2TResult> {
    if bt.space() != bs.space() {
        return Err(Error::SpaceMismatch(bt.space(), bs.space()));
    }
    let (t, s) = (encode(bt), encode(bs));
    let res = if let Some(e) = common_flipper(&t, &s, Some(bt), Some(bs), tol) {
        join(bt, bs, &e, tol)?
    } else {
        match mode {
            Mode::Strict => return Err(Error::NotLinked),
            Mode::Fallback => reduce(bt, bs, tol)?,
        }
    };
    Ok(settle(res, &s.compose(&t)?, tol))
}

/// Encoding error above which a result is moved to a better placed biflipper.
const SETTLE_ERROR: f64 = 1e-11;

/// Flippers far from the origin have huge coordinates, and their product then
/// cancels away most significant digits. When that happens the result is
/// replaced by the best encoding of `st` among its canonical biflipper and
/// rebases of `st` onto the flippers at hand, recorded as one more move.
fn settle(mut res: H2TResult, st: &Isometry, tol: Tolerance) -> H2TResult {
    let err = |b: &Biflipper| crate::batch::matrix_error(&encode(b), st);
    let best_err = err(&res.biflipper);
    if best_err <= SETTLE_ERROR {
        return res;
    }
    let mut pool = vec![res.biflipper.clone()];
    pool.extend(decompose(st));
    let balanced = if st.space() == SpaceTag::H2 { h2_balanced(st) } else { Vec::new() };
    let mut options: Vec<(Biflipper, Flipper)> = Vec::new();
    for b in &pool {
        options.extend(rebase(st, b.tail(), Side::Tail, tol).ok().map(|r| (r, b.tail().clone())));
        options.extend(rebase(st, b.head(), Side::Head, tol).ok().map(|r| (r, b.head().clone())));
    }
    if let Some(b) = pool.get(1) {
        options.push((b.clone(), b.tail().clone()));
    }
    options.extend(balanced.into_iter().map(|b| {
        let f = b.tail().clone();
        (b, f)
    }));
    let mut best = options.into_iter().map(|(b, f)| (err(&b), b, f)).min_by(|x, y| x.0.total_cmp(&y.0));
    if let Some((e, b, f)) = &mut best {
        if *e > SETTLE_ERROR {
            if let Some((re, rb)) = refine(b, st) {
                if re < *e {
                    *f = rb.tail().clone();
                    (*e, *b) = (re, rb);
                }
            }
        }
    }
    if let Some((e, b, f)) = best {
        if e < best_err {
            let step = record(&res.biflipper, &b, &f);
            res.steps.push(step);
            res.biflipper = b;
        }
    }
    res
}

/// Gauss-Newton polish of the wire coordinates of `b` toward `encode(b) = st`.
/// Returns the best iterate and its error.
fn refine(b: &Biflipper, st: &Isometry) -> Option<(f64, Biflipper)> {
    let (tc, hc) = (b.tail().to_coords(), b.head().to_coords());
    let split = tc.coords.len();
    let build = |x: &[f64]| -> Option<Biflipper> {
        let t = Flipper::from_coords(st.space(), &tc.kind, &x[..split], tc.chart).ok()?;
        let h = Flipper::from_coords(st.space(), &hc.kind, &x[split..], hc.chart).ok()?;
        Biflipper::new(t, h).ok()
    };
    let residual = |b: &Biflipper| Vector::from_iterator(st.matrix().len(), (encode(b).matrix() - st.matrix()).iter().copied());
    let mut x: Vec<f64> = tc.coords.iter().chain(&hc.coords).copied().collect();
    let mut cur = build(&x)?;
    let mut best = (crate::batch::matrix_error(&encode(&cur), st), cur.clone());
    for _ in 0..8 {
        let r = residual(&cur);
        let mut jac = Mat::zeros(r.len(), x.len());
        for i in 0..x.len() {
            let h = 1e-7 * x[i].abs().max(1.0);
            let (mut up, mut down) = (x.clone(), x.clone());
            up[i] += h;
            down[i] -= h;
            let (Some(bu), Some(bd)) = (build(&up), build(&down)) else { return Some(best) };
            jac.set_column(i, &((residual(&bu) - residual(&bd)) / (2.0 * h)));
        }
        let svd = jac.svd(true, true);
        let cut = 1e-10 * svd.singular_values.max();
        let Ok(dx) = svd.solve(&r, cut) else { break };
        x.iter_mut().zip(dx.iter()).for_each(|(a, d)| *a -= d);
        cur = build(&x)?;
        let e = crate::batch::matrix_error(&encode(&cur), st);
        if e < best.0 {
            best = (e, cur.clone());
        }
    }
    Some(best)
}

/// Eigenvector of the eigenvalue of largest modulus, scaled to time component 1.
fn dominant_null(m: &Mat) -> Option<Vector> {
    let mut v = (0..m.ncols()).map(|j| m.column(j).into_owned()).max_by(|a, b| a.norm().total_cmp(&b.norm()))?;
    for _ in 0..200 {
        let w = m * &v;
        v = &w / w.norm();
    }
    (v[0].abs() > 1e-300).then(|| &v / v[0])
}

/// Biflippers of an H2 translation or glide reflection placed symmetrically
/// about the point of the axis nearest the origin, with the axis taken from
/// the dominant eigenvectors of `st` and of its inverse `G stᵀ G`.
fn h2_balanced(st: &Isometry) -> Vec<Biflipper> {
    let m = st.matrix();
    let g = Mat::from_diagonal(&Vector::from_vec(vec![1.0, -1.0, -1.0]));
    let inv = &g * m.transpose() * &g;
    let (Some(a), Some(b)) = (dominant_null(m), dominant_null(&inv)) else { return Vec::new() };
    let ab = a[0] * b[0] - a[1] * b[1] - a[2] * b[2];
    let grow = (m * &a)[0] / a[0];
    if !(ab > 1e-12 && grow > 1.0) {
        return Vec::new();
    }
    let r = (2.0 * ab).sqrt();
    let (mid, tan) = ((&a + &b) / r, (&a - &b) / r);
    let q = grow.ln() / 4.0;
    let along = |s: f64| (&mid * s.cosh() + &tan * s.sinh(), &mid * s.sinh() + &tan * s.cosh());
    let ((p1, n1), (p2, n2)) = (along(-q), along(q));
    let line = |n: &Vector| Flipper::with_normal(SpaceTag::H2, n).ok();
    let point = |x: &Vector| Flipper::span(SpaceTag::H2, std::slice::from_ref(x)).ok();
    let pairs = [
        (line(&n1), line(&n2)),
        (line(&n2), line(&n1)),
        (point(&p1), line(&n2)),
        (line(&n1), point(&p2)),
        (line(&n2), point(&p1)),
        (point(&p2), line(&n1)),
    ];
    pairs.into_iter().filter_map(|(t, h)| Biflipper::new(t?, h?).ok()).collect()
}

/// A flipper that can be the head of a biflipper of `t` and the tail of one
/// of `s`, if any.
pub fn linked(s: &Isometry, t: &Isometry, tol: Tolerance) -> Option<Flipper> {
    if s.space() != t.space() {
        return None;
    }
    common_flipper(t, s, None, None, tol)
}

fn common_flipper(
    t: &Isometry,
    s: &Isometry,
    bt: Option<&Biflipper>,
    bs: Option<&Biflipper>,
    tol: Tolerance,
) -> Option<Flipper> {
    let ok = |e: &Flipper| admissible(t, s, e, tol);
    let mut first: Vec<Flipper> = Vec::new();
    if let Some(b) = bt {
        first.push(b.head().clone());
    }
    if let Some(b) = bs {
        first.push(b.tail().clone());
    }
    if let Some(e) = first.into_iter().find(|e| ok(e)) {
        return Some(e);
    }
    let (ct, cs) = (classify(t).ok()?, classify(s).ok()?);
    if let Some(e) = candidates(t, s, &ct, &cs).into_iter().find(|e| ok(e)) {
        return Some(e);
    }
    let mut last = Vec::new();
    if let Ok(b) = decompose(t) {
        last.push(b.head().clone());
    }
    if let Ok(b) = decompose(s) {
        last.push(b.tail().clone());
    }
    last.push(Flipper::whole(t.space()));
    last.into_iter().find(|e| ok(e))
}

fn candidates(t: &Isometry, s: &Isometry, ct: &IsometryClass, cs: &IsometryClass) -> Vec<Flipper> {
    match t.space() {
        SpaceTag::E1 => e1_candidates(ct, cs),
        SpaceTag::E2 | SpaceTag::E3 => euclidean_candidates(t.space(), ct, cs),
        SpaceTag::S2 | SpaceTag::RP2 => sphere_candidates(t.space(), ct, cs),
        SpaceTag::H2 => h2_candidates(ct, cs),
        SpaceTag::H3 | SpaceTag::Moeb => lorentz3_candidates(t, s),
    }
}

fn vecp(p: &Option<Vec<f64>>) -> Option<Vector> {
    p.as_deref().map(Vector::from_column_slice)
}

fn e1_candidates(ct: &IsometryClass, cs: &IsometryClass) -> Vec<Flipper> {
    let mut pts = vec![Vector::zeros(1)];
    pts.extend([ct, cs].iter().filter_map(|c| vecp(&c.params.center)));
    pts.into_iter()
        .filter_map(|p| Flipper::from_affine(SpaceTag::E1, AffineSubspace::point(p)).ok())
        .collect()
}

/// Geometric features of a Euclidean isometry used to build candidates.
#[derive(Default)]
struct EFeatures {
    points: Vec<Vector>,
    lines: Vec<(Vector, Vector)>,
    planes: Vec<(Vector, Vector)>,
    dirs: Vec<Vector>,
}

fn efeatures(c: &IsometryClass) -> EFeatures {
    let p = &c.params;
    let mut f = EFeatures::default();
    let e3 = c.space == SpaceTag::E3;
    match c.label {
        Label::Translation => f.dirs.extend(vecp(&p.vector)),
        Label::Rotation | Label::PointSymmetry | Label::LineSymmetry | Label::ScrewMotion | Label::GlideLineSymmetry => {
            if let Some(ctr) = vecp(&p.center) {
                f.points.push(ctr);
            }
            if let (Some(pt), Some(d)) = (vecp(&p.point), vecp(&p.direction)) {
                f.points.push(pt.clone());
                f.lines.push((pt, d));
            }
        }
        Label::Reflection | Label::GlideReflection if e3 => {
            let (pt, n) = (vecp(&p.point).unwrap(), vecp(&p.normal).unwrap());
            f.points.push(pt.clone());
            f.planes.push((pt, n.clone()));
            f.dirs.push(n);
            f.dirs.extend(vecp(&p.vector));
        }
        Label::Reflection | Label::GlideReflection => {
            let (pt, d) = (vecp(&p.point).unwrap(), vecp(&p.direction).unwrap());
            f.points.push(pt.clone());
            f.lines.push((pt, d.clone()));
            f.dirs.push(d);
        }
        Label::RotaryReflection => {
            let (ctr, d) = (vecp(&p.center).unwrap(), vecp(&p.direction).unwrap());
            f.points.push(ctr.clone());
            f.lines.push((ctr, d));
        }
        Label::CentralSymmetry => f.points.extend(vecp(&p.center)),
        _ => {}
    }
    f
}

/// Common perpendicular of two lines of `E3`, as `(point, direction)`.
///
/// Parallel lines give the perpendicular through the first anchor toward the
/// second line; coincident lines give the reference perpendicular through
/// the first anchor; intersecting lines give the line through the
/// intersection along the cross product.
pub fn common_perpendicular(p1: &Vector, u1: &Vector, p2: &Vector, u2: &Vector) -> (Vector, Vector) {
    let u1 = u1.normalize();
    let u2 = u2.normalize();
    let w = cross3(&u1, &u2);
    if w.norm() > 1e-9 {
        // closest point on line 1: p1 + s u1 with (p1 + s u1 - p2 - r u2) ⊥ u1, u2
        let d = p2 - p1;
        let b = u1.dot(&u2);
        let denom = 1.0 - b * b;
        let s = (d.dot(&u1) - b * d.dot(&u2)) / denom;
        return (p1 + &u1 * s, w.normalize());
    }
    let d = p2 - p1;
    let perp = &d - &u1 * d.dot(&u1);
    if perp.norm() > 1e-9 {
        (p1.clone(), perp.normalize())
    } else {
        (p1.clone(), reference_perpendicular(&u1))
    }
}

fn euclidean_candidates(space: SpaceTag, ct: &IsometryClass, cs: &IsometryClass) -> Vec<Flipper> {
    let n = space.euclidean_dim().unwrap();
    let e3 = n == 3;
    let (ft, fs) = (efeatures(ct), efeatures(cs));
    let mut out: Vec<Flipper> = Vec::new();
    let push_line = |out: &mut Vec<Flipper>, p: &Vector, d: &Vector| {
        if d.norm() > 1e-9 {
            if let Ok(f) = Flipper::from_affine(space, AffineSubspace::new(p.clone(), &[d.normalize()]).unwrap()) {
                out.push(f);
            }
        }
    };
    let plane = |p: &Vector, nrm: &Vector| -> Option<Flipper> {
        if !e3 || nrm.norm() <= 1e-9 {
            return None;
        }
        Flipper::e_plane(p.as_slice(), nrm.normalize().as_slice()).ok()
    };
    let point = |p: &Vector| Flipper::from_affine(space, AffineSubspace::point(p.clone())).ok();

    let mut dirs: Vec<Vector> = Vec::new();
    for f in [&ft, &fs] {
        dirs.extend(f.dirs.iter().cloned());
        dirs.extend(f.lines.iter().map(|l| l.1.clone()));
        dirs.extend(f.planes.iter().map(|p| p.1.clone()));
    }
    dirs.retain(|d| d.norm() > 1e-9);
    let mut all_dirs: Vec<Vector> = dirs.iter().map(|d| d.normalize()).collect();
    if e3 {
        for i in 0..dirs.len() {
            for j in i + 1..dirs.len() {
                let c = cross3(&dirs[i], &dirs[j]);
                if c.norm() > 1e-9 {
                    all_dirs.push(c.normalize());
                }
            }
        }
        for d in &dirs {
            all_dirs.push(reference_perpendicular(&d.normalize()));
        }
    } else {
        let perps: Vec<Vector> = all_dirs.iter().map(|d| Vector::from_vec(vec![-d[1], d[0]])).collect();
        all_dirs.extend(perps);
    }
    for i in 0..n {
        let mut e = Vector::zeros(n);
        e[i] = 1.0;
        all_dirs.push(e);
    }

    let mut extra_points: Vec<Vector> = Vec::new();
    // axis pairs
    for (p1, u1) in &ft.lines {
        for (p2, u2) in &fs.lines {
            if e3 {
                let (q, w) = common_perpendicular(p1, u1, p2, u2);
                push_line(&mut out, &q, &w);
            } else {
                let m = Mat::from_columns(&[u1.clone(), -u2.clone()]);
                if let Some(st) = m.lu().solve(&(p2 - p1)) {
                    extra_points.push(p1 + u1 * st[0]);
                }
            }
        }
    }
    if e3 {
        // an axis against a direction of the other map
        for (lines, other) in [(&ft.lines, &fs), (&fs.lines, &ft)] {
            for (p, u) in lines.iter() {
                let mut ds: Vec<Vector> = other.dirs.clone();
                ds.extend(other.planes.iter().map(|q| q.1.clone()));
                for d in ds {
                    let c = cross3(u, &d);
                    let c = if c.norm() > 1e-9 { c } else { reference_perpendicular(&u.normalize()) };
                    push_line(&mut out, p, &c);
                }
            }
        }
        // axis meets mirror
        for (lines, planes) in [(&ft.lines, &fs.planes), (&fs.lines, &ft.planes)] {
            for (p, u) in lines.iter() {
                for (q, nrm) in planes.iter() {
                    let den = u.dot(nrm);
                    if den.abs() > 1e-9 {
                        extra_points.push(p + u * (nrm.dot(&(q - p)) / den));
                    }
                }
            }
        }
        // mirrors meet
        for (p1, n1) in &ft.planes {
            for (p2, n2) in &fs.planes {
                let k = cross3(n1, n2);
                if k.norm() > 1e-9 {
                    let m = Mat::from_rows(&[n1.transpose(), n2.transpose(), k.transpose()]);
                    if let Some(x) = m.lu().solve(&Vector::from_vec(vec![n1.dot(p1), n2.dot(p2), 0.0])) {
                        push_line(&mut out, &x, &k);
                        extra_points.push(x);
                    }
                }
            }
        }
    }
    let mut points: Vec<Vector> = Vec::new();
    points.extend(extra_points);
    points.extend(ft.points.iter().cloned());
    points.extend(fs.points.iter().cloned());
    points.push(Vector::zeros(n));
    // lines joining features of the two maps
    for p in &ft.points {
        for q in &fs.points {
            push_line(&mut out, p, &(q - p));
        }
    }
    // perpendiculars dropped from a point onto an axis
    for (lines, pts) in [(&ft.lines, &fs.points), (&fs.lines, &ft.points)] {
        for (p, u) in lines.iter() {
            let u = u.normalize();
            for q in pts.iter() {
                let foot = p + &u * (q - p).dot(&u);
                push_line(&mut out, &foot, &(q - &foot));
            }
        }
    }
    for p in &points {
        out.extend(point(p));
        for d in &all_dirs {
            push_line(&mut out, p, d);
            out.extend(plane(p, d));
        }
    }
    if e3 {
        // planes through an axis
        for f in [&ft, &fs] {
            for (p, u) in &f.lines {
                for w in all_dirs.iter().cloned().chain(points.iter().map(|q| q - p)) {
                    out.extend(plane(p, &cross3(u, &w)));
                }
            }
        }
    }
    out
}

fn sphere_axes(c: &IsometryClass) -> Vec<Vector> {
    let p = &c.params;
    let mut v = Vec::new();
    v.extend(vecp(&p.direction));
    v.extend(vecp(&p.normal));
    v
}

fn sphere_candidates(space: SpaceTag, ct: &IsometryClass, cs: &IsometryClass) -> Vec<Flipper> {
    let mut axes_t = sphere_axes(ct);
    let mut axes_s = sphere_axes(cs);
    let basis = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]].map(|e| Vector::from_column_slice(&e));
    if axes_t.is_empty() {
        axes_t.extend(basis.iter().cloned());
    }
    if axes_s.is_empty() {
        axes_s.extend(basis.iter().cloned());
    }
    let mut vs: Vec<Vector> = Vec::new();
    for a in &axes_t {
        for b in &axes_s {
            let c = cross3(a, b);
            vs.push(if c.norm() > 1e-9 { c.normalize() } else { reference_perpendicular(&a.normalize()) });
        }
    }
    for a in axes_t.iter().chain(axes_s.iter()) {
        vs.push(a.normalize());
        vs.push(reference_perpendicular(&a.normalize()));
    }
    vs.extend(basis.iter().cloned());
    let mut out = Vec::new();
    for v in &vs {
        out.extend(Flipper::span(space, &[v.clone()]).ok());
        if space == SpaceTag::S2 {
            out.extend(Flipper::with_normal(space, v).ok());
        }
    }
    out
}

/// Carrier data of an `H2` isometry: points of interest and pencil carriers.
fn h2_features(c: &IsometryClass) -> (Vec<Vector>, Vec<Vector>) {
    let p = &c.params;
    let form = BilinearForm::lorentz(2);
    let mut points = Vec::new();
    let mut carriers = Vec::new();
    match c.label {
        Label::Rotation | Label::PointSymmetry => {
            let ctr = vecp(&p.center).unwrap();
            points.push(ctr.clone());
            carriers.push(ctr);
        }
        Label::HyperbolicTranslation | Label::GlideReflection => {
            let ideal = vecp(&p.ideal).unwrap();
            let (m, t) = axis_frame(&ideal.rows(0, 3).into_owned(), &ideal.rows(3, 3).into_owned());
            carriers.push(form.normalize(&lorentz_cross(&m, &t)).unwrap());
            points.push(m);
        }
        Label::Reflection => {
            let k = vecp(&p.normal).unwrap();
            let mut o = Vector::zeros(3);
            o[0] = 1.0;
            let foot = &o - &k * (form.inner(&o, &k) / form.norm_sq(&k));
            points.extend(hyperboloid_normalize(&foot));
            carriers.push(k);
        }
        Label::ParallelMotion => carriers.push(vecp(&p.ideal).unwrap()),
        _ => {}
    }
    (points, carriers)
}

fn h2_candidates(ct: &IsometryClass, cs: &IsometryClass) -> Vec<Flipper> {
    use crate::biflipper::{causal, Causal};
    let (pt, kt) = h2_features(ct);
    let (ps, ks) = (h2_features(cs).0, h2_features(cs).1);
    let mut out = Vec::new();
    let line = |n: &Vector| Flipper::with_normal(SpaceTag::H2, n).ok();
    let point = |x: &Vector| hyperboloid_normalize(x).and_then(|x| Flipper::span(SpaceTag::H2, &[x]).ok());
    for a in &kt {
        for b in &ks {
            let x = lorentz_cross(a, b);
            if x.norm() <= 1e-12 {
                continue;
            }
            match causal(&x) {
                Causal::Spacelike => out.extend(line(&x)),
                Causal::Timelike => out.extend(point(&x)),
                Causal::Null => {}
            }
        }
    }
    let mut o = Vector::zeros(3);
    o[0] = 1.0;
    let fixed = [Vector::from_vec(vec![0.0, 1.0, 0.0]), Vector::from_vec(vec![0.0, 0.0, 1.0])];
    for (points, carriers) in [(&pt, &ks), (&ps, &kt)] {
        for q in points.iter() {
            out.extend(point(q));
            for k in carriers.iter().chain(fixed.iter()) {
                let x = lorentz_cross(q, k);
                if x.norm() > 1e-12 {
                    out.extend(line(&x));
                }
            }
        }
    }
    for k in kt.iter().chain(ks.iter()) {
        if causal(k) == Causal::Spacelike {
            out.extend(line(k));
        }
        let x = lorentz_cross(k, &o);
        if x.norm() > 1e-12 {
            out.extend(line(&x));
        }
    }
    out.extend(point(&o));
    out
}

fn lorentz3_candidates(t: &Isometry, s: &Isometry) -> Vec<Flipper> {
    let space = t.space();
    let mut out = Vec::new();
    let (at, as_) = match (crate::biflipper::lorentz3_axis(t.matrix()), crate::biflipper::lorentz3_axis(s.matrix())) {
        (Some(a), Some(b)) => (a, b),
        _ => return out,
    };
    let fa = Flipper::span(space, &at);
    let fb = Flipper::span(space, &as_);
    if let (Ok(fa), Ok(fb)) = (fa, fb) {
        let m = fb.flip_matrix() * fa.flip_matrix();
        if let Some(z) = crate::biflipper::lorentz3_axis(&m) {
            out.extend(Flipper::span(space, &z).ok());
        }
    }
    out
}

fn generic(bt: &Biflipper, bs: &Biflipper) -> Result<H2TResult> {
    let st = IsometryMatrix::from_raw(bt.space(), encode(bs).matrix() * encode(bt).matrix());
    Ok(H2TResult { biflipper: decompose(&st)?, steps: Vec::new() })
}

fn reduce(bt: &Biflipper, bs: &Biflipper, tol: Tolerance) -> Result<H2TResult> {
    match bt.space() {
        SpaceTag::E3 => reduce_e3(bt, bs, tol),
        SpaceTag::H2 => reduce_h2(bt, bs, tol).or_else(|_| generic(bt, bs)),
        _ => generic(bt, bs),
    }
}

/// Composes `S ∘ T`, trying a direct head-to-tail first and the reductions
/// for non-linked or degenerate pairs otherwise.
pub fn compose_with_fallback(s: &Isometry, t: &Isometry, tol: Tolerance) -> Result<H2TResult> {
    if s.space() != t.space() {
        return Err(Error::SpaceMismatch(t.space(), s.space()));
    }
    head_to_tail(&decompose(t)?, &decompose(s)?, Mode::Fallback, tol)
}

fn rotary_data(c: &IsometryClass) -> Option<(Vector, Vector)> {
    let p = &c.params;
    match c.label {
        Label::RotaryReflection => Some((vecp(&p.center)?, vecp(&p.direction)?)),
        Label::CentralSymmetry => Some((vecp(&p.center)?, Vector::from_vec(vec![0.0, 0.0, 1.0]))),
        _ => None,
    }
}

fn e3_plane(p: &Vector, n: &Vector) -> Result<Flipper> {
    Flipper::e_plane(p.as_slice(), n.normalize().as_slice())
}

fn e3_line(p: &Vector, d: &Vector) -> Result<Flipper> {
    Flipper::e_line(p.as_slice(), d.normalize().as_slice())
}

fn reduce_e3(bt: &Biflipper, bs: &Biflipper, tol: Tolerance) -> Result<H2TResult> {
    let (t, s) = (encode(bt), encode(bs));
    let (ct, cs) = (classify(&t)?, classify(&s)?);
    match (rotary_data(&ct), rotary_data(&cs)) {
        (Some(_), Some(rs)) => two_rotary(bt, bs, rs, tol),
        (Some(rt), None) if s.preserves_orientation() => rotary_then_screw(bt, bs, rt, tol),
        (None, Some(rs)) if t.preserves_orientation() => {
            // (S ∘ T)^-1 = T^-1 ∘ S^-1 with the rotary reflection first
            let inner = rotary_then_screw(&bs.swap(), &bt.swap(), rs, tol)?;
            Ok(H2TResult { biflipper: inner.biflipper.swap(), steps: inner.steps })
        }
        _ => generic(bt, bs),
    }
}

/// Two rotary reflections: split into plane pairs, turn the middle planes into
/// lines with a commuting flip, and compose the resulting screws.
fn two_rotary(bt: &Biflipper, bs: &Biflipper, rs: (Vector, Vector), tol: Tolerance) -> Result<H2TResult> {
    let (t, s) = (encode(bt), encode(bs));
    let mut steps = Vec::new();
    let b1 = decompose(&t)?;
    steps.push(record(bt, &b1, b1.head()));
    let plane_b = b1.head().clone();
    let nb = plane_b.normal().ok_or_else(|| Error::DegenerateAxes("expected a plane head".into()))?;
    let (cs, us) = rs;
    let nc = cross3(&us, &nb);
    let nc = if nc.norm() > 1e-9 { nc.normalize() } else { reference_perpendicular(&us.normalize()) };
    let plane_c = e3_plane(&cs, &nc)?;
    let b2 = rebase(&s, &plane_c, Side::Tail, tol)?;
    steps.push(record(bs, &b2, &plane_c));
    let k = cross3(&nb, &nc).normalize();
    let pb = plane_b.affine().unwrap().anchor().clone();
    let m = Mat::from_rows(&[nb.transpose(), nc.transpose(), k.transpose()]);
    let x = m
        .lu()
        .solve(&Vector::from_vec(vec![nb.dot(&pb), nc.dot(&cs), 0.0]))
        .ok_or_else(|| Error::DegenerateAxes("planes do not meet".into()))?;
    let plane_e = e3_plane(&x, &k)?;
    let middle = Biflipper::new(plane_b, plane_c)?;
    let middle2 = transform_commuting(&middle, &plane_e, tol)?;
    steps.push(Move {
        kind: MoveKind::CommutingTransform,
        flipper: plane_e,
        before: middle.clone(),
        after: middle2.clone(),
    });
    let u1 = Biflipper::new(b1.tail().clone(), middle2.tail().clone())?;
    let u2 = Biflipper::new(middle2.head().clone(), b2.head().clone())?;
    let inner = head_to_tail(&u1, &u2, Mode::Strict, tol)?;
    steps.extend(inner.steps);
    Ok(H2TResult { biflipper: inner.biflipper, steps })
}

/// A rotary reflection followed by an orientation-preserving map.
fn rotary_then_screw(bt: &Biflipper, bs: &Biflipper, rt: (Vector, Vector), tol: Tolerance) -> Result<H2TResult> {
    let t = encode(bt);
    let (c, u) = rt;
    let u = u.normalize();
    let mut steps = Vec::new();
    let na = reference_perpendicular(&u);
    let plane_a = e3_plane(&c, &na)?;
    let b1 = rebase(&t, &plane_a, Side::Tail, tol)?;
    steps.push(record(bt, &b1, &plane_a));
    // F_A = F_E ∘ F_F with E = A ∩ F the axis, F ⊥ A
    let line_e = e3_line(&c, &u)?;
    let nf = cross3(&na, &u).normalize();
    let plane_f = e3_plane(&c, &nf)?;
    let screw = Biflipper::new(line_e, b1.head().clone())?;
    let inner = head_to_tail(&screw, bs, Mode::Strict, tol)?;
    steps.extend(inner.steps);
    let uiso = encode(&inner.biflipper);
    let cu = classify(&uiso)?;
    let p = &cu.params;
    let (tail_line, merged) = match cu.label {
        Label::Identity => {
            return Ok(H2TResult { biflipper: Biflipper::new(plane_f, Flipper::whole(SpaceTag::E3))?, steps });
        }
        Label::Translation => {
            let v = vecp(&p.vector).unwrap();
            let d = cross3(&nf, &v);
            let d = if d.norm() > 1e-9 { d.normalize() } else { reference_perpendicular(&nf) };
            let y = e3_line(&c, &d)?;
            (y, e3_plane(&c, &cross3(&nf, &d))?)
        }
        _ => {
            let (foot, z) = (vecp(&p.point).unwrap(), vecp(&p.direction).unwrap().normalize());
            let den = z.dot(&nf);
            if den.abs() > 1e-9 {
                let x0 = &foot + &z * (nf.dot(&(&c - &foot)) / den);
                let d = cross3(&nf, &z).normalize();
                (e3_line(&x0, &d)?, e3_plane(&x0, &cross3(&nf, &d))?)
            } else {
                let y = e3_line(&foot, &nf)?;
                let q = &foot + &nf * nf.dot(&(&c - &foot));
                (y, Flipper::e_point(q.as_slice())?)
            }
        }
    };
    let b3 = rebase(&uiso, &tail_line, Side::Tail, tol)?;
    steps.push(record(&inner.biflipper, &b3, &tail_line));
    Ok(H2TResult { biflipper: Biflipper::new(merged, b3.head().clone())?, steps })
}

/// Degenerate hyperbolic pairs: replace `T` by a rotation and compose again.
fn reduce_h2(bt: &Biflipper, bs: &Biflipper, tol: Tolerance) -> Result<H2TResult> {
    let (t, s) = (encode(bt), encode(bs));
    let mut steps = Vec::new();
    let b1 = decompose(&t)?;
    steps.push(record(bt, &b1, b1.head()));
    let b2 = decompose(&s)?;
    steps.push(record(bs, &b2, b2.tail()));
    let (a, b, c, d) = (b1.tail(), b1.head(), b2.tail(), b2.head());
    let middle = Biflipper::new(b.clone(), c.clone())?;
    let u = encode(&middle);
    if u.is_identity(tol) {
        return Ok(H2TResult { biflipper: Biflipper::new(a.clone(), d.clone())?, steps });
    }
    let q = match a.kind() {
        crate::flips::FlipperKind::Point => a.vector().unwrap(),
        crate::flips::FlipperKind::Line => line_frame(a.linear().unwrap()).0,
        _ => return Err(Error::NotLinked),
    };
    let pencil = invariant_pencil(&u)?;
    let l = match pencil.line_through(&q) {
        Some(l) => l,
        None => Flipper::with_normal(SpaceTag::H2, &lorentz_cross(&q, &Vector::from_vec(vec![0.0, 0.0, 1.0])))?,
    };
    let middle2 = rebase(&u, &l, Side::Tail, tol)?;
    steps.push(Move { kind: MoveKind::Rebase, flipper: l.clone(), before: middle, after: middle2.clone() });
    let r = Biflipper::new(a.clone(), l)?;
    let v = Biflipper::new(middle2.head().clone(), d.clone())?;
    let inner = head_to_tail(&r, &v, Mode::Strict, tol)?;
    steps.extend(inner.steps);
    Ok(H2TResult { biflipper: inner.biflipper, steps })
}

fn line_pair(b: &Biflipper) -> Result<((Vector, Vector), (Vector, Vector))> {
    let get = |f: &Flipper| -> Result<(Vector, Vector)> {
        if f.space() != SpaceTag::E3 || f.kind() != crate::flips::FlipperKind::Line {
            return Err(Error::DegenerateAxes("screw biflippers need two lines of E3".into()));
        }
        Ok((f.affine().unwrap().anchor().clone(), f.direction().unwrap()))
    };
    let (l1, l2) = (get(b.tail())?, get(b.head())?);
    if cross3(&l1.1, &l2.1).norm() <= 1e-9 {
        return Err(Error::DegenerateAxes("the lines of a screw biflipper are parallel or identical".into()));
    }
    Ok((l1, l2))
}

/// Composes two screw biflippers by sliding both along their axes until they
/// share the common perpendicular of the axes.
pub fn compose_screws(b1: &Biflipper, b2: &Biflipper, tol: Tolerance) -> Result<H2TResult> {
    let ((p1, u1), (q1, v1)) = line_pair(b1)?;
    let ((p2, u2), (q2, v2)) = line_pair(b2)?;
    let (xp, xd) = common_perpendicular(&p1, &u1, &q1, &v1);
    let (yp, yd) = common_perpendicular(&p2, &u2, &q2, &v2);
    let (zp, zd) = common_perpendicular(&xp, &xd, &yp, &yd);
    let z = e3_line(&zp, &zd)?;
    join(b1, b2, &z, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::biflipper::same_isometry;
    use crate::numkernel::{affine_matrix, rotation2, rotation3, vec2, vec3};
    use std::f64::consts::FRAC_PI_2;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn iso(space: SpaceTag, m: Mat) -> Isometry {
        IsometryMatrix::new(space, m).unwrap()
    }

    fn check(bt: &Biflipper, bs: &Biflipper, mode: Mode) -> H2TResult {
        let r = head_to_tail(bt, bs, mode, tol()).unwrap();
        let want = IsometryMatrix::from_raw(bt.space(), encode(bs).matrix() * encode(bt).matrix());
        assert!(same_isometry(&encode(&r.biflipper), &want, Tolerance::new(1e-8)));
        assert!(r.steps_valid(Tolerance::new(1e-8)));
        r
    }

    #[test]
    fn two_quarter_turns() {
        let t = iso(SpaceTag::E2, affine_matrix(&rotation2(FRAC_PI_2), &vec2(0.0, 0.0)));
        let c = vec2(2.0, 0.0);
        let r = rotation2(FRAC_PI_2);
        let s = iso(SpaceTag::E2, affine_matrix(&r, &((Mat::identity(2, 2) - &r) * c)));
        let out = check(&decompose(&t).unwrap(), &decompose(&s).unwrap(), Mode::Strict);
        let k = classify(&encode(&out.biflipper)).unwrap();
        assert_eq!(k.label, Label::PointSymmetry);
        let ctr = k.params.center.unwrap();
        assert!((ctr[0] - 1.0).abs() < 1e-12 && (ctr[1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_glides() {
        let g1 = iso(SpaceTag::E2, affine_matrix(&Mat::from_diagonal(&vec2(1.0, -1.0)), &vec2(1.0, 0.0)));
        let g2 = iso(SpaceTag::E2, affine_matrix(&Mat::from_diagonal(&vec2(-1.0, 1.0)), &vec2(0.0, 1.0)));
        let out = check(&decompose(&g1).unwrap(), &decompose(&g2).unwrap(), Mode::Strict);
        let k = classify(&encode(&out.biflipper)).unwrap();
        assert_eq!(k.label, Label::PointSymmetry);
        let ctr = k.params.center.unwrap();
        assert!((ctr[0] + 0.5).abs() < 1e-12 && (ctr[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn sphere_half_turns() {
        let x = iso(SpaceTag::S2, Mat::from_diagonal(&vec3(1.0, -1.0, -1.0)));
        let z = iso(SpaceTag::S2, Mat::from_diagonal(&vec3(-1.0, -1.0, 1.0)));
        let out = check(&decompose(&x).unwrap(), &decompose(&z).unwrap(), Mode::Strict);
        let k = classify(&encode(&out.biflipper)).unwrap();
        assert_eq!(k.label, Label::LineSymmetry);
        assert_eq!(k.params.direction.map(|d| d[1].round()), Some(1.0));
    }

    fn screw(axis_pt: Vector, u: Vector, angle: f64, shift: f64) -> Isometry {
        let u = u.normalize();
        let r = rotation3(&u, angle);
        let t = (Mat::identity(3, 3) - &r) * axis_pt + &u * shift;
        iso(SpaceTag::E3, affine_matrix(&r, &t))
    }

    #[test]
    fn screws_compose_along_common_perpendicular() {
        let s1 = screw(vec3(0.0, 0.0, 0.0), vec3(0.0, 0.0, 1.0), FRAC_PI_2, 2.0);
        let b = decompose(&s1).unwrap();
        let out = compose_screws(&b, &b, tol()).unwrap();
        let k = classify(&encode(&out.biflipper)).unwrap();
        assert_eq!(k.label, Label::GlideLineSymmetry);
        assert!((k.params.length.unwrap() - 4.0).abs() < 1e-12);

        let s2 = screw(vec3(1.0, 2.0, 0.0), vec3(1.0, 0.0, 0.0), 0.7, -0.4);
        let b2 = decompose(&s2).unwrap();
        let out = compose_screws(&b, &b2, tol()).unwrap();
        let want = IsometryMatrix::from_raw(SpaceTag::E3, s2.matrix() * s1.matrix());
        assert!(same_isometry(&encode(&out.biflipper), &want, Tolerance::new(1e-8)));

        let inv = compose_screws(&b, &b.swap(), tol()).unwrap();
        assert!(encode(&inv.biflipper).is_identity(Tolerance::new(1e-9)));
    }

    fn rotary(c: Vector, u: Vector, phi: f64) -> Isometry {
        let u = u.normalize();
        let r = rotation3(&u, phi) * (Mat::identity(3, 3) - &u * u.transpose() * 2.0);
        let t = (Mat::identity(3, 3) - &r) * c;
        iso(SpaceTag::E3, affine_matrix(&r, &t))
    }

    #[test]
    fn unlinked_rotary_pair() {
        // skew axes, common perpendicular along y through neither center
        let t = rotary(vec3(0.0, 0.0, 1.0), vec3(1.0, 0.0, 0.0), 1.0);
        let s = rotary(vec3(0.0, 2.0, -1.0), vec3(0.0, 0.0, 1.0), 0.6);
        assert!(linked(&s, &t, tol()).is_none());
        let (bt, bs) = (decompose(&t).unwrap(), decompose(&s).unwrap());
        assert_eq!(head_to_tail(&bt, &bs, Mode::Strict, tol()), Err(Error::NotLinked));
        let out = check(&bt, &bs, Mode::Fallback);
        assert!(out.steps.iter().any(|m| m.kind == MoveKind::CommutingTransform));
    }

    #[test]
    fn rotary_then_screw_both_ways() {
        let t = rotary(vec3(0.0, 0.0, 1.0), vec3(1.0, 0.0, 0.0), 1.0);
        let s = screw(vec3(0.0, 2.0, 0.0), vec3(0.3, 0.4, 1.0), 0.8, 0.5);
        let (bt, bs) = (decompose(&t).unwrap(), decompose(&s).unwrap());
        check(&bt, &bs, Mode::Fallback);
        check(&bs, &bt, Mode::Fallback);
    }

    #[test]
    fn orientation_preserving_e3_always_linked() {
        let s1 = screw(vec3(0.0, 0.0, 0.0), vec3(0.0, 0.0, 1.0), 1.0, 1.0);
        for s2 in [
            screw(vec3(1.0, 0.0, 0.0), vec3(0.0, 0.0, 1.0), 0.3, 2.0),
            screw(vec3(0.0, 0.0, 0.0), vec3(0.0, 0.0, 1.0), 0.3, 2.0),
            screw(vec3(0.0, 0.0, 3.0), vec3(1.0, 1.0, 0.0), 2.0, 0.0),
            iso(SpaceTag::E3, affine_matrix(&Mat::identity(3, 3), &vec3(1.0, 2.0, 3.0))),
        ] {
            assert!(linked(&s2, &s1, tol()).is_some());
            check(&decompose(&s1).unwrap(), &decompose(&s2).unwrap(), Mode::Strict);
        }
    }
}
