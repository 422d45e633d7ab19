//! Biflippers: ordered pairs of flippers encoding an isometry as the
//! composition of two flips, head after tail.

mod classify;
mod decompose;
mod pencil;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::flips::{flipper_of_involution, Flipper, Isometry};
use crate::numkernel::{AffineSubspace, IsometryMatrix, Mat, SpaceTag, Tolerance, Vector};

pub use classify::{classify, ClassParams, IsometryClass, Label, ANGLE_EPS, LENGTH_EPS, LORENTZ_BAND};
#[allow(unused_imports)]
pub(crate) use classify::{axis_angle, axis_frame, causal, parabolic_exp, parabolic_normal, same_isometry, Causal};
pub use decompose::decompose;
pub(crate) use decompose::lorentz3_axis;
pub use pencil::{invariant_pencil, Pencil, PencilKind};

#[derive(Debug, Clone, PartialEq)]
pub struct Biflipper {
    tail: Flipper,
    head: Flipper,
}

impl Biflipper {
    pub fn new(tail: Flipper, head: Flipper) -> Result<Biflipper> {
        if tail.space() != head.space() {
            return Err(Error::SpaceMismatch(tail.space(), head.space()));
        }
        Ok(Biflipper { tail, head })
    }

    pub fn tail(&self) -> &Flipper {
        &self.tail
    }

    pub fn head(&self) -> &Flipper {
        &self.head
    }

    pub fn space(&self) -> SpaceTag {
        self.tail.space()
    }

    /// Neither flipper is the whole space.
    pub fn is_proper(&self) -> bool {
        !self.tail.is_whole() && !self.head.is_whole()
    }

    /// The reversed pair, which encodes the inverse isometry.
    pub fn swap(&self) -> Biflipper {
        Biflipper { tail: self.head.clone(), head: self.tail.clone() }
    }

    pub fn encode(&self) -> Isometry {
        encode(self)
    }

    pub fn approx_eq(&self, other: &Biflipper, eps: f64) -> bool {
        self.tail.approx_eq(&other.tail, eps) && self.head.approx_eq(&other.head, eps)
    }
}

impl Serialize for Biflipper {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Biflipper", 2)?;
        st.serialize_field("tail", &self.tail)?;
        st.serialize_field("head", &self.head)?;
        st.end()
    }
}

/// `F_head ∘ F_tail`.
pub fn encode(b: &Biflipper) -> Isometry {
    IsometryMatrix::from_raw(b.space(), b.head.flip_matrix() * b.tail.flip_matrix())
}

pub fn equivalent(b1: &Biflipper, b2: &Biflipper, tol: Tolerance) -> Result<bool> {
    if b1.space() != b2.space() {
        return Err(Error::SpaceMismatch(b1.space(), b2.space()));
    }
    Ok(same_isometry(&encode(b1), &encode(b2), tol))
}

fn commutes(a: &Isometry, b: &Isometry, tol: Tolerance) -> bool {
    let ab = IsometryMatrix::from_raw(a.space(), a.matrix() * b.matrix());
    let ba = IsometryMatrix::from_raw(a.space(), b.matrix() * a.matrix());
    same_isometry(&ab, &ba, tol)
}

/// Replaces `(A, B)` by `(A', B')` with `F_A' = F_A ∘ F_C` and
/// `F_B' = F_B ∘ F_C` when `F_C` commutes with both flips.
pub fn transform_commuting(b: &Biflipper, c: &Flipper, tol: Tolerance) -> Result<Biflipper> {
    if c.space() != b.space() {
        return Err(Error::SpaceMismatch(b.space(), c.space()));
    }
    let fc = c.flip();
    let (fa, fb) = (b.tail.flip(), b.head.flip());
    if !commutes(&fa, &fc, tol) || !commutes(&fb, &fc, tol) {
        return Err(Error::NotCommuting);
    }
    let space = b.space();
    let a2 = flipper_of_involution(&IsometryMatrix::from_raw(space, fa.matrix() * fc.matrix()), tol)?;
    let b2 = flipper_of_involution(&IsometryMatrix::from_raw(space, fb.matrix() * fc.matrix()), tol)?;
    Biflipper::new(a2, b2)
}

/// `(T(A), T(B))` for `T` in the centralizer of the encoded isometry.
pub fn conjugate(b: &Biflipper, t: &Isometry, tol: Tolerance) -> Result<Biflipper> {
    if t.space() != b.space() {
        return Err(Error::SpaceMismatch(b.space(), t.space()));
    }
    if !commutes(&encode(b), t, tol) {
        return Err(Error::NotInCentralizer);
    }
    Biflipper::new(b.tail.image(t)?, b.head.image(t)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Tail,
    Head,
}

impl std::str::FromStr for Side {
    type Err = Error;
    fn from_str(s: &str) -> Result<Side> {
        match s {
            "tail" => Ok(Side::Tail),
            "head" => Ok(Side::Head),
            other => Err(Error::OutOfDomain(format!("side must be tail or head, got {other}"))),
        }
    }
}

/// A biflipper of `t` with `e` in the given position.
pub fn rebase(t: &Isometry, e: &Flipper, side: Side, tol: Tolerance) -> Result<Biflipper> {
    if t.space() != e.space() {
        return Err(Error::SpaceMismatch(t.space(), e.space()));
    }
    let space = t.space();
    let fe = e.flip_matrix();
    let product = match side {
        Side::Tail => t.matrix() * &fe,
        Side::Head => &fe * t.matrix(),
    };
    let other = flipper_of_involution(&IsometryMatrix::from_raw(space, product), tol).map_err(|err| match err {
        Error::NotInvolution => Error::NotCompatible("the product with the flip is not an involution".into()),
        Error::EmptyFixedSet => Error::NotCompatible("the product involution has no fixed points".into()),
        other => other,
    })?;
    match side {
        Side::Tail => Biflipper::new(e.clone(), other),
        Side::Head => Biflipper::new(other, e.clone()),
    }
}

/// Flippers `(A, B)` with `T = F_B ∘ F_A`.
pub fn strong_reversibility_witness(t: &Isometry) -> Option<(Flipper, Flipper)> {
    decompose(t).ok().map(|b| (b.tail, b.head))
}

fn product_flipper(a: &Flipper, c: &Flipper, space: SpaceTag) -> Result<Flipper> {
    let (fa, fc) = (a.affine().expect("euclidean"), c.affine().expect("euclidean"));
    let (k, l) = (fa.ambient_dim(), fc.ambient_dim());
    let mut anchor = Vector::zeros(k + l);
    anchor.rows_mut(0, k).copy_from(fa.anchor());
    anchor.rows_mut(k, l).copy_from(fc.anchor());
    let mut dirs = Vec::new();
    for d in fa.direction().basis() {
        let mut x = Vector::zeros(k + l);
        x.rows_mut(0, k).copy_from(d);
        dirs.push(x);
    }
    for d in fc.direction().basis() {
        let mut x = Vector::zeros(k + l);
        x.rows_mut(k, l).copy_from(d);
        dirs.push(x);
    }
    Flipper::from_affine(space, AffineSubspace::new(anchor, &dirs)?)
}

/// Direct product `(A×C, B×D)` of Euclidean biflippers.
pub fn product_biflipper(bk: &Biflipper, bl: &Biflipper) -> Result<Biflipper> {
    for s in [bk.space(), bl.space()] {
        if !s.is_euclidean() {
            return Err(Error::NonEuclideanFactor(s));
        }
    }
    let n = bk.space().euclidean_dim().unwrap() + bl.space().euclidean_dim().unwrap();
    let space = match n {
        2 => SpaceTag::E2,
        3 => SpaceTag::E3,
        _ => return Err(Error::UnsupportedSpace(bk.space())),
    };
    Biflipper::new(product_flipper(&bk.tail, &bl.tail, space)?, product_flipper(&bk.head, &bl.head, space)?)
}

/// Block product of two affine isometries.
pub fn product_isometry(s: &Isometry, t: &Isometry) -> Result<Isometry> {
    let (k, l) = match (s.space().euclidean_dim(), t.space().euclidean_dim()) {
        (Some(k), Some(l)) => (k, l),
        (None, _) => return Err(Error::NonEuclideanFactor(s.space())),
        (_, None) => return Err(Error::NonEuclideanFactor(t.space())),
    };
    let space = match k + l {
        2 => SpaceTag::E2,
        3 => SpaceTag::E3,
        _ => return Err(Error::UnsupportedSpace(s.space())),
    };
    let mut r = Mat::zeros(k + l, k + l);
    r.view_mut((0, 0), (k, k)).copy_from(&s.linear_part());
    r.view_mut((k, k), (l, l)).copy_from(&t.linear_part());
    let mut tr = Vector::zeros(k + l);
    tr.rows_mut(0, k).copy_from(&s.translation());
    tr.rows_mut(k, l).copy_from(&t.translation());
    IsometryMatrix::new(space, crate::numkernel::affine_matrix(&r, &tr))
}
