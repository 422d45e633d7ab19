//! Flippers and their flips.
//!
//! A flipper is stored as the fixed subspace of its flip in the model of its
//! space: an affine subspace for `E1`..`E3`, a linear subspace otherwise.
//! The flip itself is always `2P - I`.
//!
//! Storage conventions:
//! * `S2`: a great circle is the plane through the origin cutting it out, an
//!   antipodal pair is the line through the pair.
//! * `RP2`: flips are kept in `SO(3)`. The flip in a projective line equals the
//!   flip in its polar point, so every proper flipper is stored as that point.
//! * `H2`, `H3`: the Lorentz subspace whose projectivisation is the flipper.
//! * `MOEB`: the inducing `H3` flipper. Planes are circles, lines are point
//!   pairs (their two ideal endpoints). `H3` points induce fixed-point-free
//!   involutions of the sphere and are rejected.

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numkernel::{
    cross3, first_nonzero_positive, hyperboloid_normalize, model_convert, null_space, AffineSubspace, BilinearForm,
    Chart, IsometryMatrix, LinearSubspace, Mat, SpaceTag, Tolerance, Vector, RANK_TOL,
};

pub type Isometry = IsometryMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlipperKind {
    Whole,
    Point,
    Line,
    Plane,
    PointPair,
    Circle,
}

impl FlipperKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FlipperKind::Whole => "whole",
            FlipperKind::Point => "point",
            FlipperKind::Line => "line",
            FlipperKind::Plane => "plane",
            FlipperKind::PointPair => "point-pair",
            FlipperKind::Circle => "circle",
        }
    }
}

impl std::fmt::Display for FlipperKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Locus {
    Affine(AffineSubspace),
    Linear(LinearSubspace),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Flipper {
    space: SpaceTag,
    kind: FlipperKind,
    locus: Locus,
}

fn kind_for(space: SpaceTag, dim: usize) -> Option<FlipperKind> {
    use FlipperKind::*;
    use SpaceTag::*;
    let kind = match (space, dim) {
        (E1, 0) | (E2, 0) | (E3, 0) => Point,
        (E2, 1) | (E3, 1) => Line,
        (E3, 2) => Plane,
        (E1, 1) | (E2, 2) | (E3, 3) => Whole,
        (S2, 1) => PointPair,
        (S2, 2) => Circle,
        (S2, 3) | (RP2, 3) => Whole,
        (RP2, 1) => Point,
        (H2, 1) | (H3, 1) => Point,
        (H2, 2) | (H3, 2) => Line,
        (H3, 3) => Plane,
        (H2, 3) | (H3, 4) | (Moeb, 4) => Whole,
        (Moeb, 2) => PointPair,
        (Moeb, 3) => Circle,
        _ => return None,
    };
    Some(kind)
}

impl Flipper {
    pub fn whole(space: SpaceTag) -> Flipper {
        let locus = match space.euclidean_dim() {
            Some(n) => Locus::Affine(AffineSubspace::whole(n)),
            None => Locus::Linear(LinearSubspace::whole(space.form())),
        };
        Flipper { space, kind: FlipperKind::Whole, locus }
    }

    pub fn from_affine(space: SpaceTag, sub: AffineSubspace) -> Result<Flipper> {
        let n = space
            .euclidean_dim()
            .ok_or_else(|| Error::InvalidFlipper(format!("{space} flippers are not affine")))?;
        if sub.ambient_dim() != n {
            return Err(Error::InvalidFlipper(format!("{space} needs {n} coordinates")));
        }
        let kind = kind_for(space, sub.dim()).ok_or_else(|| Error::InvalidFlipper("bad dimension".into()))?;
        Ok(Flipper { space, kind, locus: Locus::Affine(sub) })
    }

    /// Flipper given by a linear subspace of the model.
    ///
    /// Fails with `EmptyFixedSet` when the subspace does not meet the model
    /// (spacelike subspaces in `H2`/`H3`, points in `MOEB`, `{0}` in `S2`).
    pub fn from_linear(space: SpaceTag, sub: LinearSubspace) -> Result<Flipper> {
        if space.is_euclidean() {
            return Err(Error::InvalidFlipper(format!("{space} flippers are affine")));
        }
        if sub.form() != space.form() {
            return Err(Error::InvalidFlipper("subspace lives in the wrong model".into()));
        }
        if sub.dim() == 0 {
            return Err(Error::EmptyFixedSet);
        }
        if space.is_lorentzian() && sub.positive_index() != 1 {
            return Err(Error::EmptyFixedSet);
        }
        if space == SpaceTag::RP2 && sub.dim() == 2 {
            // a single representative of the point/polar-line pair
            return Flipper::from_linear(space, sub.complement()?);
        }
        let kind = kind_for(space, sub.dim()).ok_or(Error::EmptyFixedSet)?;
        Ok(Flipper { space, kind, locus: Locus::Linear(sub) })
    }

    pub fn span(space: SpaceTag, vectors: &[Vector]) -> Result<Flipper> {
        if space == SpaceTag::RP2 && vectors.len() == 2 {
            let s = LinearSubspace::new(vectors, space.form())?;
            return Flipper::from_linear(space, s);
        }
        let s = LinearSubspace::new(vectors, space.form()).map_err(|e| match e {
            Error::DegenerateRestriction => Error::InvalidFlipper("degenerate subspace".into()),
            other => other,
        })?;
        Flipper::from_linear(space, s)
    }

    /// Hyperplane form-orthogonal to `normal`: a great circle in `S2`, a line
    /// in `H2`, a plane in `H3`, a circle in `MOEB`, a point in `RP2`.
    pub fn with_normal(space: SpaceTag, normal: &Vector) -> Result<Flipper> {
        if space.is_euclidean() {
            return Err(Error::InvalidFlipper("use an anchor and a normal in Euclidean spaces".into()));
        }
        if space == SpaceTag::RP2 {
            return Flipper::span(space, &[normal.clone()]);
        }
        let form = space.form();
        if normal.len() != form.dim() || normal.norm() == 0.0 || !normal.iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidFlipper("bad normal vector".into()));
        }
        let line = LinearSubspace::new(&[normal.clone()], form)
            .map_err(|_| Error::InvalidFlipper("normal is null".into()))?;
        Flipper::from_linear(space, line.complement()?)
    }

    /// Point flipper of a Euclidean space.
    pub fn e_point(p: &[f64]) -> Result<Flipper> {
        let space = euclidean_space(p.len())?;
        Flipper::from_affine(space, AffineSubspace::point(Vector::from_column_slice(p)))
    }

    /// Line through `anchor` with direction `dir` in `E2` or `E3`.
    pub fn e_line(anchor: &[f64], dir: &[f64]) -> Result<Flipper> {
        let space = euclidean_space(anchor.len())?;
        if dir.len() != anchor.len() {
            return Err(Error::InvalidFlipper("direction length mismatch".into()));
        }
        let sub = AffineSubspace::new(Vector::from_column_slice(anchor), &[Vector::from_column_slice(dir)])
            .map_err(|_| Error::InvalidFlipper("zero direction".into()))?;
        Flipper::from_affine(space, sub)
    }

    /// Plane of `E3` through `anchor` with the given normal.
    pub fn e_plane(anchor: &[f64], normal: &[f64]) -> Result<Flipper> {
        if anchor.len() != 3 || normal.len() != 3 {
            return Err(Error::InvalidFlipper("E3 planes need 3 + 3 coordinates".into()));
        }
        let n = Vector::from_column_slice(normal);
        if n.norm() <= 1e-12 || !n.iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidFlipper("zero normal".into()));
        }
        let dirs = orthogonal_complement3(&n.normalize());
        let sub = AffineSubspace::new(Vector::from_column_slice(anchor), &dirs)?;
        Flipper::from_affine(SpaceTag::E3, sub)
    }

    pub fn space(&self) -> SpaceTag {
        self.space
    }

    pub fn kind(&self) -> FlipperKind {
        self.kind
    }

    pub fn is_whole(&self) -> bool {
        self.kind == FlipperKind::Whole
    }

    pub fn affine(&self) -> Option<&AffineSubspace> {
        match &self.locus {
            Locus::Affine(a) => Some(a),
            Locus::Linear(_) => None,
        }
    }

    pub fn linear(&self) -> Option<&LinearSubspace> {
        match &self.locus {
            Locus::Linear(l) => Some(l),
            Locus::Affine(_) => None,
        }
    }

    /// Dimension of the fixed subspace in the model.
    pub fn model_dim(&self) -> usize {
        match &self.locus {
            Locus::Affine(a) => a.dim(),
            Locus::Linear(l) => l.dim(),
        }
    }

    /// Canonical vector of a one-dimensional linear flipper: hyperboloid
    /// points get `x0 > 0`, sphere vectors get a positive first coordinate.
    pub fn vector(&self) -> Option<Vector> {
        let l = self.linear()?;
        if l.dim() != 1 {
            return None;
        }
        let v = &l.basis()[0];
        if self.space.is_lorentzian() {
            hyperboloid_normalize(v)
        } else {
            let mut v = v.normalize();
            first_nonzero_positive(&mut v, 1e-12);
            Some(v)
        }
    }

    /// Unit normal of a hyperplane flipper, with its first non-zero entry positive.
    /// Euclidean lines of `E2` and planes of `E3` included.
    pub fn normal(&self) -> Option<Vector> {
        let mut n = match &self.locus {
            Locus::Affine(a) => {
                let n = a.ambient_dim();
                if a.dim() + 1 != n {
                    return None;
                }
                a.direction().complement().ok()?.basis()[0].clone()
            }
            Locus::Linear(l) => {
                if l.dim() + 1 != l.ambient_dim() {
                    return None;
                }
                l.complement().ok()?.basis()[0].clone()
            }
        };
        first_nonzero_positive(&mut n, 1e-12);
        Some(n)
    }

    /// Unit direction of a Euclidean line.
    pub fn direction(&self) -> Option<Vector> {
        let a = self.affine()?;
        if a.dim() != 1 {
            return None;
        }
        let mut d = a.direction().basis()[0].clone();
        first_nonzero_positive(&mut d, 1e-12);
        Some(d)
    }

    /// Flip matrix `2P - I`; `RP2` flips are `2vv^T - I` with determinant `+1`.
    pub fn flip_matrix(&self) -> Mat {
        match &self.locus {
            Locus::Affine(a) => a.reflection_matrix(),
            Locus::Linear(l) => l.reflection_matrix(),
        }
    }

    pub fn flip(&self) -> Isometry {
        IsometryMatrix::from_raw(self.space, self.flip_matrix())
    }

    /// Image of the flipper under an isometry of the same space.
    pub fn image(&self, t: &Isometry) -> Result<Flipper> {
        if t.space() != self.space {
            return Err(Error::SpaceMismatch(self.space, t.space()));
        }
        match &self.locus {
            Locus::Affine(a) => {
                let r = t.linear_part();
                let dirs: Vec<Vector> = a.direction().basis().iter().map(|d| &r * d).collect();
                let sub = AffineSubspace::new(t.apply(a.anchor()), &dirs)?;
                Flipper::from_affine(self.space, sub)
            }
            Locus::Linear(l) => {
                if self.is_whole() {
                    return Ok(self.clone());
                }
                let vs: Vec<Vector> = l.basis().iter().map(|b| t.matrix() * b).collect();
                Flipper::span(self.space, &vs)
            }
        }
    }

    pub fn approx_eq(&self, other: &Flipper, eps: f64) -> bool {
        if self.space != other.space || self.kind != other.kind {
            return false;
        }
        match (&self.locus, &other.locus) {
            (Locus::Affine(a), Locus::Affine(b)) => a.approx_eq(b, eps),
            (Locus::Linear(a), Locus::Linear(b)) => a.approx_eq(b, eps),
            _ => false,
        }
    }

    /// Whether a Euclidean point lies on the flipper.
    pub fn contains_point(&self, p: &Vector, eps: f64) -> bool {
        match &self.locus {
            Locus::Affine(a) => a.contains(p, eps),
            Locus::Linear(l) => l.contains(p, eps),
        }
    }
}

fn euclidean_space(n: usize) -> Result<SpaceTag> {
    match n {
        1 => Ok(SpaceTag::E1),
        2 => Ok(SpaceTag::E2),
        3 => Ok(SpaceTag::E3),
        _ => Err(Error::InvalidFlipper(format!("no Euclidean space of dimension {n}"))),
    }
}

/// Two orthonormal vectors completing unit `n` to a basis of `R^3`.
pub(crate) fn orthogonal_complement3(n: &Vector) -> Vec<Vector> {
    let e = crate::numkernel::reference_perpendicular(n);
    let f = cross3(n, &e);
    vec![e, f]
}

/// The flip of a flipper.
pub fn flip_of(f: &Flipper) -> Isometry {
    f.flip()
}

/// Recovers the flipper of an involution.
pub fn flipper_of_involution(t: &Isometry, tol: Tolerance) -> Result<Flipper> {
    let space = t.space();
    let tol = tol.for_space(space);
    let m = if space == SpaceTag::RP2 && t.det() < 0.0 { -t.matrix() } else { t.matrix().clone() };
    let t = IsometryMatrix::from_raw(space, m);
    let scale = t.matrix().amax().max(1.0);
    let sq = IsometryMatrix::from_raw(space, t.matrix() * t.matrix());
    let sq_tol = Tolerance { abs_eps: tol.abs_eps.max(1e-9) * scale * scale, ..tol };
    if !sq.is_identity(sq_tol) {
        return Err(Error::NotInvolution);
    }
    match space.euclidean_dim() {
        Some(n) => {
            let r = t.linear_part();
            let fixed = null_space(&(&r - Mat::identity(n, n)), RANK_TOL);
            let anchor = t.translation() / 2.0;
            let sub = AffineSubspace::new(anchor, &fixed)?;
            Flipper::from_affine(space, sub)
        }
        None => {
            let k = space.form().dim();
            let fixed = null_space(&(t.matrix() - Mat::identity(k, k)), RANK_TOL);
            if fixed.is_empty() {
                return Err(Error::EmptyFixedSet);
            }
            if fixed.len() == k {
                return Ok(Flipper::whole(space));
            }
            let sub = LinearSubspace::new(&fixed, space.form()).map_err(|_| Error::EmptyFixedSet)?;
            Flipper::from_linear(space, sub)
        }
    }
}

/// Wire form of a flipper: `{"kind", "coords", "chart"?}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlipperCoords {
    pub kind: String,
    #[serde(default)]
    pub coords: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chart: Option<Chart>,
}

impl Flipper {
    /// Parses wire coordinates.
    ///
    /// | space | kind | coords |
    /// |---|---|---|
    /// | `E*` | point | the point |
    /// | `E2`, `E3` | line | anchor then direction |
    /// | `E3` | plane | anchor then normal |
    /// | `S2` | circle (alias line) | normal |
    /// | `S2` | point-pair (alias point) | a representative, or 2 stereo-plane numbers |
    /// | `RP2` | point | a representative |
    /// | `RP2` | line | its normal, stored as the polar point |
    /// | `H2` disk | point / line | 2 / two points, 4 (`|u| >= 1` means ideal) |
    /// | `H2` hyperboloid | point / line | 3 / normal (3) or spanning pair (6) |
    /// | `H3` ball | point / line / plane | 3 / 6 / 9 |
    /// | `H3` hyperboloid | point / line / plane | 4 / spanning pair (8) / normal (4) |
    /// | `MOEB` sphere | circle / point-pair | `[n, d]` for `n.x = d` / two unit vectors |
    /// | `MOEB` stereo-plane | circle / point-pair | `[cx, cy, r]` / two points |
    /// | `MOEB` hyperboloid | circle / point-pair | normal (4) / spanning pair (8) |
    ///
    /// Every space also accepts `whole` with no coordinates.
    pub fn from_coords(space: SpaceTag, kind: &str, coords: &[f64], chart: Option<Chart>) -> Result<Flipper> {
        if !coords.iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidFlipper("non-finite coordinate".into()));
        }
        let bad = |what: &str| Error::InvalidFlipper(format!("{space} {kind}: {what}"));
        if kind == "whole" {
            if !coords.is_empty() {
                return Err(bad("takes no coordinates"));
            }
            return Ok(Flipper::whole(space));
        }
        let v = |s: &[f64]| Vector::from_column_slice(s);
        match space {
            SpaceTag::E1 | SpaceTag::E2 | SpaceTag::E3 => {
                let n = space.euclidean_dim().unwrap();
                match (kind, coords.len()) {
                    ("point", l) if l == n => Flipper::e_point(coords),
                    ("line", l) if l == 2 * n && n >= 2 => Flipper::e_line(&coords[..n], &coords[n..]),
                    ("plane", 6) if n == 3 => Flipper::e_plane(&coords[..3], &coords[3..]),
                    _ => Err(bad("unsupported kind or wrong coordinate count")),
                }
            }
            SpaceTag::S2 => {
                let chart = chart.unwrap_or(Chart::Sphere);
                match (kind, coords.len(), chart) {
                    ("circle" | "line", 3, Chart::Sphere) => Flipper::with_normal(space, &v(coords)),
                    ("point-pair" | "point", 3, Chart::Sphere) => Flipper::span(space, &[v(coords)]),
                    ("point-pair" | "point", 2, Chart::StereoPlane) => {
                        let p = model_convert(coords, Chart::StereoPlane, Chart::Sphere)?;
                        Flipper::span(space, &[v(&p)])
                    }
                    _ => Err(bad("unsupported kind, chart or coordinate count")),
                }
            }
            SpaceTag::RP2 => match (kind, coords.len()) {
                ("point" | "line", 3) => Flipper::span(space, &[v(coords)]),
                _ => Err(bad("needs 3 homogeneous coordinates")),
            },
            SpaceTag::H2 | SpaceTag::H3 => {
                let dim = if space == SpaceTag::H2 { 2 } else { 3 };
                let default = if dim == 2 { Chart::PoincareDisk } else { Chart::PoincareBall };
                match chart.unwrap_or(default) {
                    Chart::Hyperboloid => {
                        let k = dim + 1;
                        match (kind, coords.len()) {
                            ("point", l) if l == k => {
                                let x = hyperboloid_normalize(&v(coords))
                                    .ok_or_else(|| bad("point must be timelike"))?;
                                Flipper::span(space, &[x])
                            }
                            ("line", 3) if dim == 2 => Flipper::with_normal(space, &v(coords)),
                            ("line", l) if l == 2 * k => Flipper::span(space, &[v(&coords[..k]), v(&coords[k..])]),
                            ("plane", 4) if dim == 3 => Flipper::with_normal(space, &v(coords)),
                            _ => Err(bad("unsupported kind or coordinate count")),
                        }
                    }
                    c @ (Chart::PoincareDisk | Chart::PoincareBall) => {
                        if (c == Chart::PoincareDisk) != (dim == 2) {
                            return Err(Error::UnsupportedChart(c.to_string(), space.to_string()));
                        }
                        let pts = coords.chunks(dim).map(ball_to_model).collect::<Result<Vec<_>>>()?;
                        if coords.len() % dim != 0 {
                            return Err(bad("coordinate count"));
                        }
                        match (kind, pts.len()) {
                            ("point", 1) => {
                                if pts[0][0] <= 0.0 || BilinearForm::lorentz(dim).norm_sq(&pts[0]) <= 0.0 {
                                    return Err(Error::OutOfDomain("point on or beyond the absolute".into()));
                                }
                                Flipper::span(space, &pts)
                            }
                            ("line", 2) | ("plane", 3) => Flipper::span(space, &pts),
                            _ => Err(bad("unsupported kind or coordinate count")),
                        }
                    }
                    other => Err(Error::UnsupportedChart(other.to_string(), space.to_string())),
                }
            }
            SpaceTag::Moeb => match (chart.unwrap_or(Chart::Sphere), kind, coords.len()) {
                (Chart::Sphere, "circle", 4) => {
                    let n = v(&coords[..3]);
                    let len = n.norm();
                    if len <= 1e-12 {
                        return Err(bad("zero normal"));
                    }
                    let d = coords[3] / len;
                    if d.abs() >= 1.0 {
                        return Err(bad("plane misses the sphere"));
                    }
                    let mut big = Vector::zeros(4);
                    big[0] = d;
                    big.rows_mut(1, 3).copy_from(&(n / len));
                    Flipper::with_normal(space, &big)
                }
                (Chart::Sphere, "point-pair", 6) => {
                    let a = sphere_null(&coords[..3])?;
                    let b = sphere_null(&coords[3..])?;
                    Flipper::span(space, &[a, b])
                }
                (Chart::StereoPlane, "circle", 3) => {
                    let (cx, cy, r) = (coords[0], coords[1], coords[2]);
                    if r <= 0.0 {
                        return Err(bad("radius must be positive"));
                    }
                    let pts: Vec<Vector> = [0.0, 2.0, 4.0]
                        .iter()
                        .map(|t: &f64| {
                            let (s, c) = t.sin_cos();
                            model_convert(&[cx + r * c, cy + r * s], Chart::StereoPlane, Chart::Sphere)
                                .map(|p| sphere_null(&p).unwrap())
                        })
                        .collect::<Result<_>>()?;
                    Flipper::span(space, &pts)
                }
                (Chart::StereoPlane, "point-pair", 4) => {
                    let a = model_convert(&coords[..2], Chart::StereoPlane, Chart::Sphere)?;
                    let b = model_convert(&coords[2..], Chart::StereoPlane, Chart::Sphere)?;
                    Flipper::span(space, &[sphere_null(&a)?, sphere_null(&b)?])
                }
                (Chart::Hyperboloid, "circle", 4) => Flipper::with_normal(space, &v(coords)),
                (Chart::Hyperboloid, "point-pair", 8) => Flipper::span(space, &[v(&coords[..4]), v(&coords[4..])]),
                (Chart::Hyperboloid, "point", 4) => Flipper::span(space, &[v(coords)]),
                _ => Err(bad("unsupported kind, chart or coordinate count")),
            },
        }
    }

    /// Canonical wire coordinates (see [`Flipper::from_coords`]). Hyperbolic
    /// flippers are written in the hyperboloid chart, Moebius flippers in the
    /// sphere chart.
    pub fn to_coords(&self) -> FlipperCoords {
        let kind = self.kind;
        let mut chart = None;
        let coords: Vec<f64> = if self.is_whole() {
            Vec::new()
        } else {
            match self.space {
                SpaceTag::E1 | SpaceTag::E2 | SpaceTag::E3 => {
                    let a = self.affine().unwrap();
                    let mut c: Vec<f64> = a.anchor().iter().copied().collect();
                    match kind {
                        FlipperKind::Line => c.extend(self.direction().unwrap().iter()),
                        FlipperKind::Plane => c.extend(self.normal().unwrap().iter()),
                        _ => {}
                    }
                    c
                }
                SpaceTag::S2 => match kind {
                    FlipperKind::Circle => self.normal().unwrap().iter().copied().collect(),
                    _ => self.vector().unwrap().iter().copied().collect(),
                },
                SpaceTag::RP2 => self.vector().unwrap().iter().copied().collect(),
                SpaceTag::H2 | SpaceTag::H3 => {
                    chart = Some(Chart::Hyperboloid);
                    match kind {
                        FlipperKind::Point => self.vector().unwrap().iter().copied().collect(),
                        FlipperKind::Line if self.space == SpaceTag::H2 => {
                            self.normal().unwrap().iter().copied().collect()
                        }
                        FlipperKind::Line => {
                            let (m, t) = line_frame(self.linear().unwrap());
                            m.iter().chain(t.iter()).copied().collect()
                        }
                        _ => self.normal().unwrap().iter().copied().collect(),
                    }
                }
                SpaceTag::Moeb => {
                    chart = Some(Chart::Sphere);
                    match kind {
                        FlipperKind::Circle => {
                            let big = self.normal().unwrap();
                            let s = big.rows(1, 3).norm();
                            let mut c: Vec<f64> = big.rows(1, 3).iter().map(|x| x / s).collect();
                            c.push(big[0] / s);
                            c
                        }
                        _ => {
                            let (a, b) = self.endpoints().unwrap();
                            a.iter().chain(b.iter()).copied().collect()
                        }
                    }
                }
            }
        };
        FlipperCoords { kind: kind.as_str().to_string(), coords, chart }
    }

    /// Ideal endpoints of a hyperbolic line (or a Moebius point pair) as unit
    /// vectors of the absolute, in decreasing lexicographic order.
    pub fn endpoints(&self) -> Option<(Vector, Vector)> {
        let l = self.linear()?;
        if !self.space.is_lorentzian() || l.dim() != 2 {
            return None;
        }
        let (m, t) = line_frame(l);
        let n = m.len();
        let p = (&m + &t) / (m[0] + t[0]);
        let q = (&m - &t) / (m[0] - t[0]);
        let a = p.rows(1, n - 1).into_owned();
        let b = q.rows(1, n - 1).into_owned();
        let lex = |x: &Vector, y: &Vector| {
            for i in 0..x.len() {
                if (x[i] - y[i]).abs() > 1e-12 {
                    return x[i] > y[i];
                }
            }
            true
        };
        Some(if lex(&a, &b) { (a, b) } else { (b, a) })
    }
}

/// Foot `m` of `e0` on a hyperbolic line and a unit tangent `t` there, with
/// the first non-zero entry of `t` positive.
pub(crate) fn line_frame(l: &LinearSubspace) -> (Vector, Vector) {
    let n = l.ambient_dim();
    let form = l.form();
    let mut e0 = Vector::zeros(n);
    e0[0] = 1.0;
    let m = hyperboloid_normalize(&(l.projector() * &e0)).expect("hyperbolic line contains timelike vectors");
    let other = l
        .basis()
        .iter()
        .map(|b| b - &m * form.inner(b, &m))
        .max_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap())
        .unwrap();
    let mut t = form.normalize(&other).unwrap();
    first_nonzero_positive(&mut t, 1e-12);
    (m, t)
}

fn ball_to_model(u: &[f64]) -> Result<Vector> {
    let r2: f64 = u.iter().map(|x| x * x).sum();
    if r2 < 1.0 {
        let chart = if u.len() == 2 { Chart::PoincareDisk } else { Chart::PoincareBall };
        Ok(Vector::from_vec(model_convert(u, chart, Chart::Hyperboloid)?))
    } else {
        // ideal point in the direction of u
        let r = r2.sqrt();
        let mut v = vec![1.0];
        v.extend(u.iter().map(|x| x / r));
        Ok(Vector::from_vec(v))
    }
}

fn sphere_null(p: &[f64]) -> Result<Vector> {
    let n = Vector::from_column_slice(p);
    let len = n.norm();
    if len <= 1e-12 {
        return Err(Error::InvalidFlipper("zero vector".into()));
    }
    let mut v = Vector::zeros(4);
    v[0] = 1.0;
    v.rows_mut(1, 3).copy_from(&(n / len));
    Ok(v)
}

impl Serialize for Flipper {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let c = self.to_coords();
        let mut st = serializer.serialize_struct("Flipper", if c.chart.is_some() { 3 } else { 2 })?;
        st.serialize_field("kind", &c.kind)?;
        st.serialize_field("coords", &c.coords)?;
        if let Some(chart) = c.chart {
            st.serialize_field("chart", &chart)?;
        }
        st.end()
    }
}
