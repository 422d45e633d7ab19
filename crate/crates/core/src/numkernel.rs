//! Numeric foundation shared by every geometry.
//!
//! All spaces are handled through linear or affine matrix models:
//!
//! | space      | model                                   | matrix size |
//! |------------|-----------------------------------------|-------------|
//! | `E1`..`E3` | affine maps `x -> Rx + t`, `R` orthogonal | `(n+1)x(n+1)` |
//! | `S2`       | `O(3)`                                  | `3x3`       |
//! | `RP2`      | `SO(3)` (compared projectively)         | `3x3`       |
//! | `H2`       | orthochronous `O(1,2)`                  | `3x3`       |
//! | `H3`, `MOEB` | orthochronous `O(1,3)`                | `4x4`       |
//!
//! Lorentzian forms put the positive direction first: `diag(+1, -1, .., -1)`.
//! Hyperboloid points therefore satisfy `<x, x> = +1` with `x0 > 0`.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Mat = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Default absolute tolerance for every "within tolerance" claim.
pub const DEFAULT_EPS: f64 = 1e-9;
/// Singular values below this (relative to the matrix scale) count as zero.
pub const RANK_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SpaceTag {
    E1,
    E2,
    E3,
    S2,
    RP2,
    H2,
    H3,
    #[serde(rename = "MOEB")]
    Moeb,
}

impl SpaceTag {
    pub const ALL: [SpaceTag; 8] = [
        SpaceTag::E1,
        SpaceTag::E2,
        SpaceTag::E3,
        SpaceTag::S2,
        SpaceTag::RP2,
        SpaceTag::H2,
        SpaceTag::H3,
        SpaceTag::Moeb,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SpaceTag::E1 => "E1",
            SpaceTag::E2 => "E2",
            SpaceTag::E3 => "E3",
            SpaceTag::S2 => "S2",
            SpaceTag::RP2 => "RP2",
            SpaceTag::H2 => "H2",
            SpaceTag::H3 => "H3",
            SpaceTag::Moeb => "MOEB",
        }
    }

    /// Dimension of a Euclidean space, `None` for the linear models.
    pub fn euclidean_dim(self) -> Option<usize> {
        match self {
            SpaceTag::E1 => Some(1),
            SpaceTag::E2 => Some(2),
            SpaceTag::E3 => Some(3),
            _ => None,
        }
    }

    pub fn is_euclidean(self) -> bool {
        self.euclidean_dim().is_some()
    }

    /// Spaces modelled inside a Lorentzian vector space.
    pub fn is_lorentzian(self) -> bool {
        matches!(self, SpaceTag::H2 | SpaceTag::H3 | SpaceTag::Moeb)
    }

    /// Form on the linear part of the model.
    pub fn form(self) -> BilinearForm {
        match self {
            SpaceTag::E1 => BilinearForm::euclidean(1),
            SpaceTag::E2 => BilinearForm::euclidean(2),
            SpaceTag::E3 | SpaceTag::S2 | SpaceTag::RP2 => BilinearForm::euclidean(3),
            SpaceTag::H2 => BilinearForm::lorentz(2),
            SpaceTag::H3 | SpaceTag::Moeb => BilinearForm::lorentz(3),
        }
    }

    pub fn matrix_dim(self) -> usize {
        match self.euclidean_dim() {
            Some(n) => n + 1,
            None => self.form().dim(),
        }
    }
}

impl fmt::Display for SpaceTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SpaceTag {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        SpaceTag::ALL
            .iter()
            .copied()
            .find(|t| t.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown space tag `{s}`"))
    }
}

/// Diagonal form `diag(+1 x positive, -1 x negative)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BilinearForm {
    pub positive: usize,
    pub negative: usize,
}

impl BilinearForm {
    pub fn new(positive: usize, negative: usize) -> Self {
        assert!(positive + negative > 0, "form on a zero-dimensional space");
        BilinearForm { positive, negative }
    }

    pub fn euclidean(n: usize) -> Self {
        BilinearForm::new(n, 0)
    }

    /// Lorentzian form of the hyperbolic `n`-space model.
    pub fn lorentz(n: usize) -> Self {
        BilinearForm::new(1, n)
    }

    pub fn dim(&self) -> usize {
        self.positive + self.negative
    }

    pub fn is_definite(&self) -> bool {
        self.negative == 0
    }

    pub fn sign(&self, i: usize) -> f64 {
        if i < self.positive {
            1.0
        } else {
            -1.0
        }
    }

    pub fn gram(&self) -> Mat {
        Mat::from_fn(self.dim(), self.dim(), |i, j| if i == j { self.sign(i) } else { 0.0 })
    }

    pub fn inner(&self, a: &Vector, b: &Vector) -> f64 {
        (0..self.dim()).map(|i| self.sign(i) * a[i] * b[i]).sum()
    }

    pub fn norm_sq(&self, a: &Vector) -> f64 {
        self.inner(a, a)
    }

    /// Applies the Gram matrix to a vector.
    pub fn lower(&self, a: &Vector) -> Vector {
        Vector::from_fn(self.dim(), |i, _| self.sign(i) * a[i])
    }

    /// Scales `v` to form-norm `+-1`. Fails on (numerically) null vectors.
    pub fn normalize(&self, v: &Vector) -> Option<Vector> {
        let q = self.norm_sq(v);
        let scale = v.norm_squared().max(1.0);
        if q.abs() <= 1e-13 * scale {
            None
        } else {
            Some(v / q.abs().sqrt())
        }
    }

    /// Form-adjoint inverse of a form isometry: `G M^T G`.
    pub fn isometry_inverse(&self, m: &Mat) -> Mat {
        let g = self.gram();
        &g * m.transpose() * &g
    }
}

/// A linear subspace, stored with a canonical form-orthonormal basis and its
/// form-orthogonal projector.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSubspace {
    form: BilinearForm,
    basis: Vec<Vector>,
    projector: Mat,
}

impl LinearSubspace {
    /// Builds the span of `vectors`.
    ///
    /// Fails with `DegenerateRestriction` when the vectors are dependent or
    /// the form restricted to their span is singular.
    pub fn new(vectors: &[Vector], form: BilinearForm) -> Result<Self> {
        let n = form.dim();
        if vectors.iter().any(|v| v.len() != n) {
            return Err(Error::InvalidFlipper(format!(
                "vector length does not match ambient dimension {n}"
            )));
        }
        if vectors.is_empty() {
            return Ok(LinearSubspace { form, basis: Vec::new(), projector: Mat::zeros(n, n) });
        }
        if vectors.len() > n {
            return Err(Error::DegenerateRestriction);
        }
        let b = Mat::from_columns(vectors);
        let scale = b.norm().max(1e-300);
        let sv = b.clone().singular_values();
        let smax = sv.max();
        if sv.min() <= RANK_TOL * smax || smax <= 1e-12 * scale {
            return Err(Error::DegenerateRestriction);
        }
        // Normalise columns before testing the restriction for degeneracy.
        let b = Mat::from_columns(&vectors.iter().map(|v| v / v.norm()).collect::<Vec<_>>());
        let g = form.gram();
        let restricted = b.transpose() * &g * &b;
        let rsv = restricted.clone().singular_values();
        if rsv.min() <= RANK_TOL * rsv.max().max(1.0) {
            return Err(Error::DegenerateRestriction);
        }
        let inv = restricted.try_inverse().ok_or(Error::DegenerateRestriction)?;
        let projector = &b * inv * b.transpose() * &g;
        let basis = pivoted_orthonormal(&projector, vectors.len(), form)?;
        Ok(LinearSubspace { form, basis, projector })
    }

    /// The whole ambient space.
    pub fn whole(form: BilinearForm) -> Self {
        let n = form.dim();
        let basis = (0..n).map(|i| Vector::from_fn(n, |j, _| if i == j { 1.0 } else { 0.0 })).collect();
        LinearSubspace { form, basis, projector: Mat::identity(n, n) }
    }

    pub fn form(&self) -> BilinearForm {
        self.form
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.form.dim()
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn projector(&self) -> &Mat {
        &self.projector
    }

    /// Number of basis vectors with positive form-norm.
    pub fn positive_index(&self) -> usize {
        self.basis.iter().filter(|b| self.form.norm_sq(b) > 0.0).count()
    }

    pub fn contains(&self, v: &Vector, eps: f64) -> bool {
        (&self.projector * v - v).amax() <= eps * v.amax().max(1.0)
    }

    /// Form-orthogonal complement.
    pub fn complement(&self) -> Result<Self> {
        let n = self.ambient_dim();
        let q = Mat::identity(n, n) - &self.projector;
        if n == self.dim() {
            return Ok(LinearSubspace { form: self.form, basis: Vec::new(), projector: Mat::zeros(n, n) });
        }
        let basis = pivoted_orthonormal(&q, n - self.dim(), self.form)?;
        LinearSubspace::new(&basis, self.form)
    }

    /// `2P - I`: the involution fixing exactly this subspace.
    pub fn reflection_matrix(&self) -> Mat {
        let n = self.ambient_dim();
        &self.projector * 2.0 - Mat::identity(n, n)
    }

    pub fn approx_eq(&self, other: &Self, eps: f64) -> bool {
        self.form == other.form
            && self.dim() == other.dim()
            && (&self.projector - &other.projector).amax() <= eps
    }
}

/// Pivoted form-Gram-Schmidt over the columns of `cols`.
///
/// Picks the column with the largest absolute form-norm at each step (ties
/// resolved by lowest index) so that equal subspaces yield identical bases.
fn pivoted_orthonormal(cols: &Mat, k: usize, form: BilinearForm) -> Result<Vec<Vector>> {
    let mut cands: Vec<Vector> = (0..cols.ncols()).map(|j| cols.column(j).into_owned()).collect();
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        let mut best = None;
        let mut best_q = 0.0;
        for (i, c) in cands.iter().enumerate() {
            let q = form.norm_sq(c).abs();
            if q > best_q + 1e-14 {
                best_q = q;
                best = Some(i);
            }
        }
        let pick = if best_q > 1e-10 {
            cands[best.unwrap()].clone()
        } else {
            // Every remaining column is null; a sum of two independent null
            // vectors in a non-degenerate span is not.
            let mut order: Vec<usize> = (0..cands.len()).collect();
            order.sort_by(|&a, &b| cands[b].norm().partial_cmp(&cands[a].norm()).unwrap());
            let mut found = None;
            'outer: for (ia, &a) in order.iter().enumerate() {
                for &b in &order[ia + 1..] {
                    for s in [1.0, -1.0] {
                        let c = &cands[a] + &cands[b] * s;
                        if form.norm_sq(&c).abs() > 1e-10 {
                            found = Some(c);
                            break 'outer;
                        }
                    }
                }
            }
            found.ok_or(Error::DegenerateRestriction)?
        };
        let mut b = form.normalize(&pick).ok_or(Error::DegenerateRestriction)?;
        canonical_sign(&mut b);
        let bb = form.norm_sq(&b);
        for c in cands.iter_mut() {
            let coef = form.inner(c, &b) / bb;
            *c -= &b * coef;
        }
        out.push(b);
    }
    Ok(out)
}

/// Flips `v` so that its largest-magnitude entry (lowest index on ties) is positive.
pub fn canonical_sign(v: &mut Vector) {
    let mut idx = 0;
    let mut best = -1.0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > best + 1e-12 {
            best = x.abs();
            idx = i;
        }
    }
    if v[idx] < 0.0 {
        *v *= -1.0;
    }
}

/// Flips `v` so that its first entry above `eps` in magnitude is positive.
pub fn first_nonzero_positive(v: &mut Vector, eps: f64) {
    if let Some(x) = v.iter().find(|x| x.abs() > eps) {
        if *x < 0.0 {
            *v *= -1.0;
        }
    }
}

/// A non-empty affine subspace of a Euclidean space. The anchor is the foot
/// of the perpendicular from the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineSubspace {
    anchor: Vector,
    direction: LinearSubspace,
}

impl AffineSubspace {
    pub fn new(anchor: Vector, directions: &[Vector]) -> Result<Self> {
        if !anchor.iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidFlipper("anchor is not finite".into()));
        }
        let form = BilinearForm::euclidean(anchor.len());
        let direction = LinearSubspace::new(directions, form)?;
        let anchor = &anchor - direction.projector() * &anchor;
        Ok(AffineSubspace { anchor, direction })
    }

    pub fn point(p: Vector) -> Self {
        let n = p.len();
        AffineSubspace { anchor: p, direction: LinearSubspace::new(&[], BilinearForm::euclidean(n)).unwrap() }
    }

    pub fn whole(n: usize) -> Self {
        AffineSubspace { anchor: Vector::zeros(n), direction: LinearSubspace::whole(BilinearForm::euclidean(n)) }
    }

    pub fn anchor(&self) -> &Vector {
        &self.anchor
    }

    pub fn direction(&self) -> &LinearSubspace {
        &self.direction
    }

    pub fn dim(&self) -> usize {
        self.direction.dim()
    }

    pub fn ambient_dim(&self) -> usize {
        self.anchor.len()
    }

    pub fn contains(&self, p: &Vector, eps: f64) -> bool {
        let d = p - &self.anchor;
        (self.direction.projector() * &d - d).amax() <= eps
    }

    /// Orthogonal projection of `p` onto the subspace.
    pub fn project(&self, p: &Vector) -> Vector {
        &self.anchor + self.direction.projector() * (p - &self.anchor)
    }

    /// Affine involution fixing exactly this subspace.
    pub fn reflection_matrix(&self) -> Mat {
        let n = self.ambient_dim();
        let r = self.direction.reflection_matrix();
        let t = (Mat::identity(n, n) - &r) * &self.anchor;
        affine_matrix(&r, &t)
    }

    pub fn approx_eq(&self, other: &Self, eps: f64) -> bool {
        self.direction.approx_eq(&other.direction, eps) && (&self.anchor - &other.anchor).amax() <= eps
    }
}

/// `[[R, t], [0, 1]]`.
pub fn affine_matrix(r: &Mat, t: &Vector) -> Mat {
    let n = r.nrows();
    let mut m = Mat::identity(n + 1, n + 1);
    m.view_mut((0, 0), (n, n)).copy_from(r);
    m.view_mut((0, n), (n, 1)).copy_from(t);
    m
}

/// Tolerance for matrix comparisons.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs_eps: f64,
    pub projective: bool,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { abs_eps: DEFAULT_EPS, projective: false }
    }
}

impl Tolerance {
    pub fn new(abs_eps: f64) -> Self {
        assert!(abs_eps > 0.0, "tolerance must be positive");
        Tolerance { abs_eps, projective: false }
    }

    pub fn projective(mut self) -> Self {
        self.projective = true;
        self
    }

    /// Projective comparison is implied for `RP2`.
    pub fn for_space(self, space: SpaceTag) -> Self {
        Tolerance { projective: self.projective || space == SpaceTag::RP2, ..self }
    }
}

/// An isometry carried by its model matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct IsometryMatrix {
    space: SpaceTag,
    matrix: Mat,
}

impl IsometryMatrix {
    /// Validates the matrix against the model of `space`.
    pub fn new(space: SpaceTag, matrix: Mat) -> Result<Self> {
        let n = space.matrix_dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::InvalidIsometry(format!("{space} needs a {n}x{n} matrix")));
        }
        if !matrix.iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidIsometry("non-finite entry".into()));
        }
        let form = space.form();
        let k = form.dim();
        let lin = matrix.view((0, 0), (k, k)).into_owned();
        let scale = lin.amax().max(1.0).powi(2);
        let g = form.gram();
        let defect = (lin.transpose() * &g * &lin - &g).amax();
        if defect > 1e-7 * scale {
            return Err(Error::InvalidIsometry(format!("does not preserve the form (defect {defect:.3e})")));
        }
        if space.is_euclidean() {
            let last = matrix.row(n - 1);
            let ok = (0..n - 1).all(|j| last[j].abs() <= 1e-9) && (last[n - 1] - 1.0).abs() <= 1e-9;
            if !ok {
                return Err(Error::InvalidIsometry("last row must be (0, .., 0, 1)".into()));
            }
        }
        if space.is_lorentzian() && matrix[(0, 0)] <= 0.0 {
            return Err(Error::InvalidIsometry("not orthochronous".into()));
        }
        Ok(IsometryMatrix { space, matrix })
    }

    pub(crate) fn from_raw(space: SpaceTag, matrix: Mat) -> Self {
        debug_assert_eq!(matrix.nrows(), space.matrix_dim());
        IsometryMatrix { space, matrix }
    }

    pub fn identity(space: SpaceTag) -> Self {
        let n = space.matrix_dim();
        IsometryMatrix { space, matrix: Mat::identity(n, n) }
    }

    pub fn space(&self) -> SpaceTag {
        self.space
    }

    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }

    /// `self o first`: apply `first`, then `self`.
    pub fn compose(&self, first: &IsometryMatrix) -> Result<IsometryMatrix> {
        if self.space != first.space {
            return Err(Error::SpaceMismatch(self.space, first.space));
        }
        Ok(IsometryMatrix { space: self.space, matrix: &self.matrix * &first.matrix })
    }

    pub fn inverse(&self) -> IsometryMatrix {
        let matrix = match self.space.euclidean_dim() {
            Some(_) => {
                let rt = self.linear_part().transpose();
                let t = self.translation();
                affine_matrix(&rt, &(-(&rt * t)))
            }
            None => self.space.form().isometry_inverse(&self.matrix),
        };
        IsometryMatrix { space: self.space, matrix }
    }

    pub fn conjugate_by(&self, t: &IsometryMatrix) -> Result<IsometryMatrix> {
        t.compose(self)?.compose(&t.inverse())
    }

    /// Linear part: the rotation block for Euclidean spaces, the full matrix otherwise.
    pub fn linear_part(&self) -> Mat {
        let k = self.space.form().dim();
        self.matrix.view((0, 0), (k, k)).into_owned()
    }

    /// Translation column of a Euclidean isometry (zero for linear models).
    pub fn translation(&self) -> Vector {
        match self.space.euclidean_dim() {
            Some(n) => self.matrix.view((0, n), (n, 1)).column(0).into_owned(),
            None => Vector::zeros(self.space.form().dim()),
        }
    }

    pub fn det(&self) -> f64 {
        self.linear_part().determinant()
    }

    pub fn preserves_orientation(&self) -> bool {
        self.det() > 0.0
    }

    /// Image of a point in model coordinates (Euclidean points or model vectors).
    pub fn apply(&self, p: &Vector) -> Vector {
        if self.space.is_euclidean() {
            self.linear_part() * p + self.translation()
        } else {
            &self.matrix * p
        }
    }

    pub fn is_identity(&self, tol: Tolerance) -> bool {
        approx_equal(self, &IsometryMatrix::identity(self.space), tol.for_space(self.space)).unwrap_or(false)
    }

    pub fn is_involution(&self, tol: Tolerance) -> bool {
        let sq = IsometryMatrix { space: self.space, matrix: &self.matrix * &self.matrix };
        sq.is_identity(tol)
    }

    pub fn commutes_with(&self, other: &IsometryMatrix, tol: Tolerance) -> Result<bool> {
        approx_equal(&self.compose(other)?, &other.compose(self)?, tol.for_space(self.space))
    }
}

/// Largest entry-wise distance between two matrices of equal shape.
pub fn max_entry_distance(a: &Mat, b: &Mat) -> f64 {
    (a - b).amax()
}

/// Entry-wise comparison; projective comparisons also accept `-m2`.
pub fn approx_equal(m1: &IsometryMatrix, m2: &IsometryMatrix, tol: Tolerance) -> Result<bool> {
    if m1.space != m2.space {
        return Err(Error::SpaceMismatch(m1.space, m2.space));
    }
    let d = max_entry_distance(&m1.matrix, &m2.matrix);
    if d <= tol.abs_eps {
        return Ok(true);
    }
    if tol.projective {
        let dn = (&m1.matrix + &m2.matrix).amax();
        return Ok(dn <= tol.abs_eps);
    }
    Ok(false)
}

/// Orthonormal null space of a square matrix, via SVD.
pub fn null_space(m: &Mat, tol: f64) -> Vec<Vector> {
    let n = m.ncols();
    let svd = m.clone().svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let scale = svd.singular_values.max().max(1.0);
    let mut out = Vec::new();
    for (i, s) in svd.singular_values.iter().enumerate() {
        if *s <= tol * scale {
            out.push(vt.row(i).transpose().into_owned());
        }
    }
    // Square inputs only: the thin SVD of an n x n matrix has n singular values.
    debug_assert!(svd.singular_values.len() == n || !out.is_empty() || n > m.nrows());
    out
}

pub fn vec3(x: f64, y: f64, z: f64) -> Vector {
    Vector::from_vec(vec![x, y, z])
}

pub fn vec2(x: f64, y: f64) -> Vector {
    Vector::from_vec(vec![x, y])
}

pub fn cross3(a: &Vector, b: &Vector) -> Vector {
    vec3(a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])
}

/// Vector form-orthogonal to `a` and `b` in `R^{1,2}`.
pub fn lorentz_cross(a: &Vector, b: &Vector) -> Vector {
    BilinearForm::lorentz(2).lower(&cross3(a, b))
}

/// Rotation of `R^3` about unit `axis` by `angle` (right-hand rule).
pub fn rotation3(axis: &Vector, angle: f64) -> Mat {
    let (s, c) = angle.sin_cos();
    let (x, y, z) = (axis[0], axis[1], axis[2]);
    let k = Mat::from_row_slice(3, 3, &[0.0, -z, y, z, 0.0, -x, -y, x, 0.0]);
    Mat::identity(3, 3) + &k * s + &k * &k * (1.0 - c)
}

pub fn rotation2(angle: f64) -> Mat {
    let (s, c) = angle.sin_cos();
    Mat::from_row_slice(2, 2, &[c, -s, s, c])
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut x = a.rem_euclid(TAU);
    if x > PI {
        x -= TAU;
    }
    if x <= -PI {
        x += TAU;
    }
    x
}

/// Some unit vector orthogonal to unit `u` in `R^3`, chosen deterministically
/// from the coordinate axis least aligned with `u`.
pub fn reference_perpendicular(u: &Vector) -> Vector {
    let mut idx = 0;
    for i in 1..3 {
        if u[i].abs() < u[idx].abs() - 1e-12 {
            idx = i;
        }
    }
    let mut e = Vector::zeros(3);
    e[idx] = 1.0;
    let v = &e - u * u.dot(&e);
    v.normalize()
}

/// Rescales a timelike vector onto the upper sheet `<x, x> = 1, x0 > 0`.
pub fn hyperboloid_normalize(x: &Vector) -> Option<Vector> {
    let form = BilinearForm::lorentz(x.len() - 1);
    let q = form.norm_sq(x);
    if q <= 1e-13 * x.norm_squared().max(1.0) {
        return None;
    }
    let y = x / q.sqrt();
    Some(if y[0] < 0.0 { -y } else { y })
}

/// Rescales a null (or near-null) vector so that `x0 = 1`.
pub fn null_normalize(x: &Vector) -> Vector {
    let y = x / x[0];
    y
}

/// Lorentz boost sending `e0` to the hyperboloid point `c`.
pub fn boost_to(c: &Vector) -> Mat {
    let n = c.len();
    let c0 = c[0];
    let cv = c.rows(1, n - 1).into_owned();
    let mut b = Mat::zeros(n, n);
    b[(0, 0)] = c0;
    for i in 1..n {
        b[(0, i)] = cv[i - 1];
        b[(i, 0)] = cv[i - 1];
        for j in 1..n {
            let id = if i == j { 1.0 } else { 0.0 };
            b[(i, j)] = id + cv[i - 1] * cv[j - 1] / (1.0 + c0);
        }
    }
    b
}

/// Null vector of a rank-2 `3x3` matrix from the best-conditioned pair of rows.
pub fn kernel3(m: &Mat) -> Option<Vector> {
    let rows: Vec<Vector> = (0..3).map(|i| m.row(i).transpose().into_owned()).collect();
    let mut best = Vector::zeros(3);
    for (a, b) in [(0, 1), (0, 2), (1, 2)] {
        let c = cross3(&rows[a], &rows[b]);
        if c.norm() > best.norm() {
            best = c;
        }
    }
    let scale = m.amax().max(1e-300).powi(2);
    if best.norm() <= 1e-12 * scale {
        None
    } else {
        Some(best.normalize())
    }
}

/// The `k` right singular vectors with the smallest singular values.
pub fn smallest_singular_vectors(m: &Mat, k: usize) -> Vec<Vector> {
    let svd = m.clone().svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&a, &b| svd.singular_values[a].partial_cmp(&svd.singular_values[b]).unwrap());
    idx.into_iter().take(k).map(|i| vt.row(i).transpose().into_owned()).collect()
}

/// Coordinate charts used for input and rendering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Chart {
    PoincareDisk,
    PoincareBall,
    Hyperboloid,
    Sphere,
    StereoPlane,
}

impl Chart {
    pub fn as_str(self) -> &'static str {
        match self {
            Chart::PoincareDisk => "poincare-disk",
            Chart::PoincareBall => "poincare-ball",
            Chart::Hyperboloid => "hyperboloid",
            Chart::Sphere => "sphere",
            Chart::StereoPlane => "stereo-plane",
        }
    }
}

impl FromStr for Chart {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        [Chart::PoincareDisk, Chart::PoincareBall, Chart::Hyperboloid, Chart::Sphere, Chart::StereoPlane]
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown chart `{s}`"))
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Converts a point between charts. Supported pairs: Poincare disk/ball and
/// hyperboloid, sphere and stereographic plane (projection from `(0,0,1)`).
pub fn model_convert(point: &[f64], from: Chart, to: Chart) -> Result<Vec<f64>> {
    use Chart::*;
    check_domain(point, from)?;
    let out = match (from, to) {
        (a, b) if a == b => point.to_vec(),
        (PoincareDisk, Hyperboloid) | (PoincareBall, Hyperboloid) => {
            let r2: f64 = point.iter().map(|x| x * x).sum();
            let d = 1.0 - r2;
            let mut v = vec![(1.0 + r2) / d];
            v.extend(point.iter().map(|x| 2.0 * x / d));
            v
        }
        (Hyperboloid, PoincareDisk) | (Hyperboloid, PoincareBall) => {
            let want = if to == PoincareDisk { 3 } else { 4 };
            if point.len() != want {
                return Err(Error::OutOfDomain(format!("{} needs a {}-vector", to, want)));
            }
            let d = 1.0 + point[0];
            point[1..].iter().map(|x| x / d).collect()
        }
        (Sphere, StereoPlane) => {
            let d = 1.0 - point[2];
            vec![point[0] / d, point[1] / d]
        }
        (StereoPlane, Sphere) => {
            let r2 = point[0] * point[0] + point[1] * point[1];
            let d = r2 + 1.0;
            vec![2.0 * point[0] / d, 2.0 * point[1] / d, (r2 - 1.0) / d]
        }
        _ => return Err(Error::UnsupportedChart(from.to_string(), to.to_string())),
    };
    Ok(out)
}

fn check_domain(p: &[f64], chart: Chart) -> Result<()> {
    if !p.iter().all(|x| x.is_finite()) {
        return Err(Error::OutOfDomain("non-finite coordinate".into()));
    }
    let r2: f64 = p.iter().map(|x| x * x).sum();
    match chart {
        Chart::PoincareDisk | Chart::PoincareBall => {
            let want = if chart == Chart::PoincareDisk { 2 } else { 3 };
            if p.len() != want {
                return Err(Error::OutOfDomain(format!("{chart} needs {want} coordinates")));
            }
            if r2 >= 1.0 {
                return Err(Error::OutOfDomain(format!("{chart} point with norm >= 1")));
            }
        }
        Chart::Hyperboloid => {
            if p.len() < 2 {
                return Err(Error::OutOfDomain("hyperboloid point too short".into()));
            }
            let q = p[0] * p[0] - p[1..].iter().map(|x| x * x).sum::<f64>();
            if p[0] <= 0.0 || (q - 1.0).abs() > 1e-6 * p[0] * p[0] {
                return Err(Error::OutOfDomain("not on the upper hyperboloid sheet".into()));
            }
        }
        Chart::Sphere => {
            if p.len() != 3 || (r2 - 1.0).abs() > 1e-9 {
                return Err(Error::OutOfDomain("not a unit vector of R^3".into()));
            }
            if (p[2] - 1.0).abs() <= 1e-12 {
                return Err(Error::OutOfDomain("projection pole".into()));
            }
        }
        Chart::StereoPlane => {
            if p.len() != 2 {
                return Err(Error::OutOfDomain("stereo-plane needs 2 coordinates".into()));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e2_line(p: [f64; 2], d: [f64; 2]) -> AffineSubspace {
        AffineSubspace::new(vec2(p[0], p[1]), &[vec2(d[0], d[1])]).unwrap()
    }

    #[test]
    fn mirror_in_x_axis() {
        let m = e2_line([0.0, 0.0], [1.0, 0.0]).reflection_matrix();
        let img = &m * Vector::from_vec(vec![3.0, 2.0, 1.0]);
        assert!((img - Vector::from_vec(vec![3.0, -2.0, 1.0])).amax() < 1e-15);
    }

    #[test]
    fn whole_space_reflects_to_identity() {
        let m = AffineSubspace::whole(2).reflection_matrix();
        assert_eq!(m, Mat::identity(3, 3));
        let l = LinearSubspace::whole(BilinearForm::lorentz(2)).reflection_matrix();
        assert_eq!(l, Mat::identity(3, 3));
    }

    #[test]
    fn timelike_point_reflection_in_lorentz_space() {
        let form = BilinearForm::new(1, 2);
        let s = LinearSubspace::new(&[vec3(1.0, 0.0, 0.0)], form).unwrap();
        let m = s.reflection_matrix();
        let expected = Mat::from_diagonal(&vec3(1.0, -1.0, -1.0));
        assert!((&m - &expected).amax() < 1e-15);
        let g = form.gram();
        assert!((&m * &m - Mat::identity(3, 3)).amax() < 1e-15);
        assert!((m.transpose() * &g * &m - &g).amax() < 1e-15);
        assert!((&m * vec3(1.0, 0.0, 0.0) - vec3(1.0, 0.0, 0.0)).amax() < 1e-15);
    }

    #[test]
    fn null_span_is_degenerate() {
        let form = BilinearForm::lorentz(2);
        let err = LinearSubspace::new(&[vec3(1.0, 1.0, 0.0)], form).unwrap_err();
        assert_eq!(err, Error::DegenerateRestriction);
        // tangent to the light cone
        let err = LinearSubspace::new(&[vec3(1.0, 1.0, 0.0), vec3(0.0, 0.0, 1.0)], form).unwrap_err();
        assert_eq!(err, Error::DegenerateRestriction);
    }

    #[test]
    fn dependent_vectors_rejected() {
        let form = BilinearForm::euclidean(3);
        assert!(LinearSubspace::new(&[vec3(1.0, 0.0, 0.0), vec3(2.0, 0.0, 0.0)], form).is_err());
    }

    #[test]
    fn span_of_two_null_vectors_is_fine() {
        let form = BilinearForm::lorentz(2);
        let s = LinearSubspace::new(&[vec3(1.0, 1.0, 0.0), vec3(1.0, -1.0, 0.0)], form).unwrap();
        assert_eq!(s.dim(), 2);
        assert_eq!(s.positive_index(), 1);
    }

    #[test]
    fn canonical_basis_does_not_depend_on_spanning_set() {
        let form = BilinearForm::euclidean(3);
        let a = LinearSubspace::new(&[vec3(1.0, 1.0, 0.0), vec3(0.0, 1.0, 1.0)], form).unwrap();
        let b = LinearSubspace::new(&[vec3(1.0, 2.0, 1.0), vec3(1.0, 0.0, -1.0)], form).unwrap();
        for (x, y) in a.basis().iter().zip(b.basis()) {
            assert!((x - y).amax() < 1e-12);
        }
    }

    #[test]
    fn approx_equal_examples() {
        let i = IsometryMatrix::identity(SpaceTag::E2);
        assert!(approx_equal(&i, &i, Tolerance::default()).unwrap());
        let mut bumped = i.matrix().clone();
        bumped[(0, 0)] += 1e-6;
        let b = IsometryMatrix::from_raw(SpaceTag::E2, bumped);
        assert!(!approx_equal(&i, &b, Tolerance::default()).unwrap());

        let m = IsometryMatrix::new(SpaceTag::S2, rotation3(&vec3(0.0, 0.0, 1.0), 0.3)).unwrap();
        let neg = IsometryMatrix::from_raw(SpaceTag::S2, -m.matrix());
        assert!(approx_equal(&m, &neg, Tolerance::default().projective()).unwrap());
        assert!(!approx_equal(&m, &neg, Tolerance::default()).unwrap());

        let h = IsometryMatrix::identity(SpaceTag::H2);
        assert_eq!(
            approx_equal(&i, &h, Tolerance::default()),
            Err(Error::SpaceMismatch(SpaceTag::E2, SpaceTag::H2))
        );
    }

    #[test]
    fn chart_examples() {
        let h = model_convert(&[0.0, 0.0], Chart::PoincareDisk, Chart::Hyperboloid).unwrap();
        assert_eq!(h, vec![1.0, 0.0, 0.0]);
        let p = model_convert(&[1.0, 0.0, 0.0], Chart::Sphere, Chart::StereoPlane).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-15 && p[1].abs() < 1e-15);
        let h = model_convert(&[0.5, 0.0], Chart::PoincareDisk, Chart::Hyperboloid).unwrap();
        // (1 + 1/4, 1) / (3/4)
        assert!((h[0] - 5.0 / 3.0).abs() < 1e-15 && (h[1] - 4.0 / 3.0).abs() < 1e-15);
        assert!((h[0] * h[0] - h[1] * h[1] - h[2] * h[2] - 1.0).abs() < 1e-12);
        let back = model_convert(&h, Chart::Hyperboloid, Chart::PoincareDisk).unwrap();
        assert!((back[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn chart_domain_errors() {
        assert!(matches!(
            model_convert(&[0.0, 0.0, 1.0], Chart::Sphere, Chart::StereoPlane),
            Err(Error::OutOfDomain(_))
        ));
        assert!(matches!(
            model_convert(&[0.6, 0.8], Chart::PoincareDisk, Chart::Hyperboloid),
            Err(Error::OutOfDomain(_))
        ));
        assert!(matches!(
            model_convert(&[0.1, 0.1], Chart::PoincareDisk, Chart::Sphere),
            Err(Error::UnsupportedChart(..))
        ));
    }

    #[test]
    fn wrap_angle_range() {
        use std::f64::consts::PI;
        assert_eq!(wrap_angle(PI), PI);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-15);
        assert!((wrap_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
    }
}
