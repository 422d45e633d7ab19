//! Quaternions, vector-arcs and the double cover of the rotation group.

use std::ops::{Mul, Neg};

use serde::{Deserialize, Serialize};

use crate::biflipper::Biflipper;
use crate::error::{Error, Result};
use crate::flips::FlipperKind;
use crate::numkernel::{cross3, vec3, Mat, SpaceTag, Vector};

/// `a + b i + c j + d k`, serialized as `[a, b, c, d]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct Quaternion {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl From<[f64; 4]> for Quaternion {
    fn from(x: [f64; 4]) -> Self {
        Quaternion::new(x[0], x[1], x[2], x[3])
    }
}

impl From<Quaternion> for [f64; 4] {
    fn from(q: Quaternion) -> Self {
        [q.a, q.b, q.c, q.d]
    }
}

pub const UNIT_EPS: f64 = 1e-12;

impl Quaternion {
    pub const ONE: Quaternion = Quaternion { a: 1.0, b: 0.0, c: 0.0, d: 0.0 };
    pub const I: Quaternion = Quaternion { a: 0.0, b: 1.0, c: 0.0, d: 0.0 };
    pub const J: Quaternion = Quaternion { a: 0.0, b: 0.0, c: 1.0, d: 0.0 };
    pub const K: Quaternion = Quaternion { a: 0.0, b: 0.0, c: 0.0, d: 1.0 };

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Quaternion { a, b, c, d }
    }

    /// The pure quaternion of a vector of `R^3`.
    pub fn pure(v: &Vector) -> Self {
        Quaternion::new(0.0, v[0], v[1], v[2])
    }

    pub fn scalar(&self) -> f64 {
        self.a
    }

    pub fn vector(&self) -> Vector {
        vec3(self.b, self.c, self.d)
    }

    pub fn conj(&self) -> Self {
        Quaternion::new(self.a, -self.b, -self.c, -self.d)
    }

    pub fn norm(&self) -> f64 {
        (self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d).sqrt()
    }

    pub fn is_unit(&self) -> bool {
        (self.norm() - 1.0).abs() <= UNIT_EPS
    }

    fn check_unit(&self) -> Result<()> {
        if self.is_unit() {
            Ok(())
        } else {
            Err(Error::NonUnit(self.norm()))
        }
    }

    /// `cos(angle/2) + u sin(angle/2)` for a unit axis `u`.
    pub fn from_axis_angle(u: &Vector, angle: f64) -> Self {
        let u = u.normalize();
        let (s, c) = (angle / 2.0).sin_cos();
        Quaternion::new(c, u[0] * s, u[1] * s, u[2] * s)
    }

    pub fn max_abs_diff(&self, o: &Quaternion) -> f64 {
        [self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d].iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// The representative of `±q` with `a > 0`, ties broken by `b`, `c`, `d`.
    pub fn canonical_sign(self) -> Self {
        for x in [self.a, self.b, self.c, self.d] {
            if x.abs() > 1e-15 {
                return if x < 0.0 { -self } else { self };
            }
        }
        self
    }

    /// The rotation matrix of `p -> q p q*`.
    pub fn rotation_matrix(&self) -> Result<Mat> {
        self.check_unit()?;
        let cols: Vec<Vector> = (0..3)
            .map(|i| {
                let mut e = Vector::zeros(3);
                e[i] = 1.0;
                (self * Quaternion::pure(&e) * self.conj()).vector()
            })
            .collect();
        Ok(Mat::from_columns(&cols))
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, q: Quaternion) -> Quaternion {
        let p = self;
        Quaternion::new(
            p.a * q.a - p.b * q.b - p.c * q.c - p.d * q.d,
            p.a * q.b + p.b * q.a + p.c * q.d - p.d * q.c,
            p.a * q.c - p.b * q.d + p.c * q.a + p.d * q.b,
            p.a * q.d + p.b * q.c - p.c * q.b + p.d * q.a,
        )
    }
}

impl Mul<Quaternion> for &Quaternion {
    type Output = Quaternion;
    fn mul(self, q: Quaternion) -> Quaternion {
        *self * q
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        Quaternion::new(-self.a, -self.b, -self.c, -self.d)
    }
}

pub fn qmul(p: Quaternion, q: Quaternion) -> Quaternion {
    p * q
}

pub fn qconj(q: Quaternion) -> Quaternion {
    q.conj()
}

pub fn qnorm(q: Quaternion) -> f64 {
    q.norm()
}

/// Unit vectors `w+`, `w-` with `v w+ = q` and `w- v = q`.
pub fn vector_factorization(q: Quaternion, v: &Vector) -> Result<(Vector, Vector)> {
    q.check_unit()?;
    if (v.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::OutOfDomain("v must be a unit vector".into()));
    }
    let qv = q.vector();
    if v.dot(&qv).abs() > 1e-9 {
        return Err(Error::NotPerpendicular);
    }
    let cross = cross3(&qv, v);
    Ok((-v * q.a + &cross, -v * q.a - &cross))
}

/// An arc of a great circle, representing the unit quaternion `-start end`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorArc {
    pub start: [f64; 3],
    pub end: [f64; 3],
}

impl VectorArc {
    pub fn new(start: &Vector, end: &Vector) -> Result<Self> {
        for x in [start, end] {
            if (x.norm() - 1.0).abs() > 1e-9 {
                return Err(Error::OutOfDomain("arc endpoints must be unit vectors".into()));
            }
        }
        Ok(VectorArc { start: [start[0], start[1], start[2]], end: [end[0], end[1], end[2]] })
    }

    pub fn start(&self) -> Vector {
        Vector::from_column_slice(&self.start)
    }

    pub fn end(&self) -> Vector {
        Vector::from_column_slice(&self.end)
    }

    pub fn quaternion(&self) -> Quaternion {
        -(Quaternion::pure(&self.start()) * Quaternion::pure(&self.end()))
    }

    fn from_vectors(start: Vector, end: Vector) -> Self {
        VectorArc { start: [start[0], start[1], start[2]], end: [end[0], end[1], end[2]] }
    }
}

fn lex_larger(a: &Vector, b: &Vector) -> bool {
    for i in 0..3 {
        if (a[i] - b[i]).abs() > 1e-12 {
            return a[i] > b[i];
        }
    }
    true
}

/// Head-to-tail product of vector-arcs: `A` is re-sited to end where `B`
/// starts, and the result runs from the new start of `A` to the new end of `B`.
pub fn arc_mul(a: &VectorArc, b: &VectorArc) -> VectorArc {
    let (qa, qb) = (a.quaternion(), b.quaternion());
    let na = cross3(&a.start(), &a.end());
    let nb = cross3(&b.start(), &b.end());
    if na.norm() <= 1e-12 {
        // ±1: a zero-length arc or an arc between antipodes
        return if qa.a > 0.0 { b.clone() } else { VectorArc::from_vectors(b.start(), -b.end()) };
    }
    if nb.norm() <= 1e-12 {
        return if qb.a > 0.0 { a.clone() } else { VectorArc::from_vectors(a.start(), -a.end()) };
    }
    let c = cross3(&na, &nb);
    let p = if c.norm() <= 1e-12 {
        b.start()
    } else {
        let p = c.normalize();
        if lex_larger(&p, &-&p) {
            p
        } else {
            -p
        }
    };
    let pq = Quaternion::pure(&p);
    let s = (qa * pq).vector();
    let e = (pq * qb).vector();
    VectorArc::from_vectors(s, e)
}

/// `q p q*`.
pub fn rotate(q: Quaternion, p: &Vector) -> Result<Vector> {
    q.check_unit()?;
    Ok((q * Quaternion::pure(p) * q.conj()).vector())
}

/// The unit quaternion `w v` of an `S2` biflipper of point pairs `{±v}`
/// (tail) and `{±w}` (head), sign-canonicalised.
pub fn lift_biflipper(b: &Biflipper) -> Result<Quaternion> {
    if b.space() != SpaceTag::S2 {
        return Err(Error::WrongFlipperKind(format!("expected S2 point pairs, got a {} biflipper", b.space())));
    }
    for f in [b.tail(), b.head()] {
        if f.kind() != FlipperKind::PointPair {
            return Err(Error::WrongFlipperKind(format!("expected point pairs, got {}", f.kind())));
        }
    }
    let v = b.tail().vector().expect("pair");
    let w = b.head().vector().expect("pair");
    Ok((Quaternion::pure(&w) * Quaternion::pure(&v)).canonical_sign())
}
