//! Canonical biflippers of isometries.
//!
//! Canonical choices, per space:
//!
//! * identity: `(whole, whole)` everywhere.
//! * `E1`: translation by `v` is `(0, v/2)`; a point symmetry is `(center, whole)`.
//! * `E2`: translation by `v` is the point pair `(0, v/2)`; a rotation is the
//!   pair of lines through the center, the tail horizontal and the head at
//!   half the angle; a reflection is `(foot point, perpendicular line)`; a
//!   glide is `(point on the axis, perpendicular line half a glide ahead)`.
//! * `E3`: translations as in `E2`; screws and rotations use the reference
//!   perpendicular `e` of the axis: tail through the axis foot along `e`,
//!   head half a translation further along, turned by half the angle. Plane
//!   reflections and glides are `(point, line along the normal)`, rotary
//!   reflections `(line through the center, plane through the center)`.
//! * `S2`: rotations are point pairs `(e, rot(angle/2) e)`; reflections and
//!   rotary reflections are `(point pair, great circle)`.
//! * `RP2`: points `(e, rot(angle/2) e)`.
//! * `H2`: all orientation-preserving maps give line pairs of the invariant
//!   pencil; reflections and glides give `(point, line)`.
//! * `H3`, `MOEB`: line pairs, or `(plane, line)` for orientation-reversing
//!   maps. In `MOEB` lines read as point pairs and planes as circles.

use super::classify::{classify, lorentz3_roots, parabolic_exp, parabolic_normal, axis_frame, ClassParams, Label};
use super::Biflipper;
use crate::error::{Error, Result};
use crate::flips::{Flipper, Isometry};
use crate::numkernel::{
    boost_to, cross3, hyperboloid_normalize, lorentz_cross, reference_perpendicular, rotation3, smallest_singular_vectors,
    vec3, AffineSubspace, BilinearForm, IsometryMatrix, LinearSubspace, Mat, SpaceTag, Vector,
};

fn vecp(p: &Option<Vec<f64>>) -> Vector {
    Vector::from_column_slice(p.as_deref().expect("class data present"))
}

fn vec_or_zero(p: &Option<Vec<f64>>, n: usize) -> Vector {
    p.as_deref().map(Vector::from_column_slice).unwrap_or_else(|| Vector::zeros(n))
}

fn point(space: SpaceTag, p: Vector) -> Result<Flipper> {
    Flipper::from_affine(space, AffineSubspace::point(p))
}

fn line(space: SpaceTag, p: Vector, d: Vector) -> Result<Flipper> {
    Flipper::from_affine(space, AffineSubspace::new(p, &[d])?)
}

fn plane(p: Vector, normal: &Vector) -> Result<Flipper> {
    let n = normal.normalize();
    let e = reference_perpendicular(&n);
    let f = cross3(&n, &e);
    Flipper::from_affine(SpaceTag::E3, AffineSubspace::new(p, &[e, f])?)
}

fn whole_pair(space: SpaceTag) -> Biflipper {
    Biflipper { tail: Flipper::whole(space), head: Flipper::whole(space) }
}

fn pair(tail: Flipper, head: Flipper) -> Result<Biflipper> {
    Biflipper::new(tail, head)
}

/// A biflipper encoding `t`, chosen canonically per class.
pub fn decompose(t: &Isometry) -> Result<Biflipper> {
    let space = t.space();
    match space {
        SpaceTag::H3 | SpaceTag::Moeb => return decompose_lorentz3(t),
        _ => {}
    }
    let c = classify(t)?;
    if c.label == Label::Identity {
        return Ok(whole_pair(space));
    }
    let p = &c.params;
    match space {
        SpaceTag::E1 => decompose_e1(c.label, p),
        SpaceTag::E2 => decompose_e2(c.label, p),
        SpaceTag::E3 => decompose_e3(c.label, p),
        SpaceTag::S2 | SpaceTag::RP2 => decompose_sphere(space, c.label, p),
        SpaceTag::H2 => decompose_h2(c.label, p),
        SpaceTag::H3 | SpaceTag::Moeb => unreachable!(),
    }
}

fn decompose_e1(label: Label, p: &ClassParams) -> Result<Biflipper> {
    let s = SpaceTag::E1;
    match label {
        Label::Translation => pair(point(s, Vector::zeros(1))?, point(s, vecp(&p.vector) / 2.0)?),
        Label::PointSymmetry => pair(point(s, vecp(&p.center))?, Flipper::whole(s)),
        _ => Err(Error::InvalidIsometry(format!("unexpected E1 label {}", label.as_str()))),
    }
}

fn decompose_e2(label: Label, p: &ClassParams) -> Result<Biflipper> {
    let s = SpaceTag::E2;
    let v2 = |x: f64, y: f64| Vector::from_vec(vec![x, y]);
    match label {
        Label::Translation => pair(point(s, Vector::zeros(2))?, point(s, vecp(&p.vector) / 2.0)?),
        Label::Rotation | Label::PointSymmetry => {
            let c = vecp(&p.center);
            let half = p.angle.expect("angle") / 2.0;
            pair(line(s, c.clone(), v2(1.0, 0.0))?, line(s, c, v2(half.cos(), half.sin()))?)
        }
        Label::Reflection | Label::GlideReflection => {
            let d = vecp(&p.direction);
            let n = v2(-d[1], d[0]);
            let foot = vecp(&p.point);
            let g = vec_or_zero(&p.vector, 2);
            pair(point(s, foot.clone())?, line(s, foot + g / 2.0, n)?)
        }
        _ => Err(Error::InvalidIsometry(format!("unexpected E2 label {}", label.as_str()))),
    }
}

fn decompose_e3(label: Label, p: &ClassParams) -> Result<Biflipper> {
    let s = SpaceTag::E3;
    match label {
        Label::Translation => pair(point(s, Vector::zeros(3))?, point(s, vecp(&p.vector) / 2.0)?),
        Label::Rotation | Label::LineSymmetry | Label::ScrewMotion | Label::GlideLineSymmetry => {
            let u = vecp(&p.direction);
            let foot = vecp(&p.point);
            let along = vec_or_zero(&p.vector, 3);
            let e = reference_perpendicular(&u);
            let e2 = rotation3(&u, p.angle.expect("angle") / 2.0) * &e;
            pair(line(s, foot.clone(), e)?, line(s, foot + along / 2.0, e2)?)
        }
        Label::Reflection | Label::GlideReflection => {
            let n = vecp(&p.normal);
            let foot = vecp(&p.point);
            let g = vec_or_zero(&p.vector, 3);
            pair(point(s, foot.clone())?, line(s, foot + g / 2.0, n)?)
        }
        Label::RotaryReflection => rotary_e3(vecp(&p.center), vecp(&p.direction), p.angle.expect("angle")),
        Label::CentralSymmetry => rotary_e3(vecp(&p.center), vec3(0.0, 0.0, 1.0), std::f64::consts::PI),
        _ => Err(Error::InvalidIsometry(format!("unexpected E3 label {}", label.as_str()))),
    }
}

fn rotary_e3(c: Vector, u: Vector, phi: f64) -> Result<Biflipper> {
    let e = reference_perpendicular(&u);
    let normal = cross3(&u, &(rotation3(&u, phi / 2.0) * &e));
    pair(line(SpaceTag::E3, c.clone(), e)?, plane(c, &normal)?)
}

fn decompose_sphere(space: SpaceTag, label: Label, p: &ClassParams) -> Result<Biflipper> {
    let pt = |v: Vector| Flipper::span(space, &[v]);
    let circle = |n: Vector| Flipper::with_normal(space, &n);
    match label {
        Label::Rotation | Label::LineSymmetry => {
            let u = vecp(&p.direction);
            let e = reference_perpendicular(&u);
            let e2 = rotation3(&u, p.angle.expect("angle") / 2.0) * &e;
            pair(pt(e)?, pt(e2)?)
        }
        Label::Reflection => {
            let n = vecp(&p.normal);
            let e = reference_perpendicular(&n);
            pair(pt(e.clone())?, circle(cross3(&n, &e))?)
        }
        Label::RotaryReflection | Label::CentralSymmetry => {
            let (u, phi) = if label == Label::CentralSymmetry {
                (vec3(0.0, 0.0, 1.0), std::f64::consts::PI)
            } else {
                (vecp(&p.direction), p.angle.expect("angle"))
            };
            let e = reference_perpendicular(&u);
            let normal = cross3(&u, &(rotation3(&u, phi / 2.0) * &e));
            pair(pt(e)?, circle(normal)?)
        }
        _ => Err(Error::InvalidIsometry(format!("unexpected {space} label {}", label.as_str()))),
    }
}

fn e0(n: usize) -> Vector {
    let mut o = Vector::zeros(n);
    o[0] = 1.0;
    o
}

fn decompose_h2(label: Label, p: &ClassParams) -> Result<Biflipper> {
    let s = SpaceTag::H2;
    let form = BilinearForm::lorentz(2);
    let with_normal = |n: Vector| Flipper::with_normal(s, &n);
    match label {
        Label::Rotation | Label::PointSymmetry => {
            let b = boost_to(&vecp(&p.center));
            let half = p.angle.expect("angle") / 2.0;
            pair(with_normal(&b * vec3(0.0, 0.0, 1.0))?, with_normal(&b * vec3(0.0, -half.sin(), half.cos()))?)
        }
        Label::HyperbolicTranslation | Label::GlideReflection => {
            let ideal = vecp(&p.ideal);
            let (m, t) = axis_frame(&ideal.rows(0, 3).into_owned(), &ideal.rows(3, 3).into_owned());
            let half = p.length.expect("length") / 2.0;
            let t2 = &m * half.sinh() + &t * half.cosh();
            let tail = if label == Label::GlideReflection { Flipper::span(s, &[m])? } else { with_normal(t)? };
            pair(tail, with_normal(t2)?)
        }
        Label::Reflection => {
            let k = vecp(&p.normal);
            let o = e0(3);
            let foot = &o - &k * (form.inner(&o, &k) / form.norm_sq(&k));
            let m = hyperboloid_normalize(&foot).expect("mirror meets the plane");
            pair(Flipper::span(s, &[m.clone()])?, with_normal(lorentz_cross(&m, &k))?)
        }
        Label::ParallelMotion => {
            let xi = vecp(&p.ideal);
            let n = parabolic_normal(&xi);
            let half = parabolic_exp(&xi, p.shift.expect("shift") / 2.0);
            pair(with_normal(n.clone())?, with_normal(half * n)?)
        }
        _ => Err(Error::InvalidIsometry(format!("unexpected H2 label {}", label.as_str()))),
    }
}

/// Form-orthonormal frame of a subspace spanned by `vs`, timelike vector first.
fn lorentz_frame(form: BilinearForm, sub: &LinearSubspace) -> Vec<Vector> {
    let mut out: Vec<Vector> = Vec::new();
    let first = hyperboloid_normalize(&(sub.projector() * e0(form.dim())));
    if let Some(m) = first {
        out.push(m);
    }
    for b in sub.basis() {
        let mut x = b.clone();
        for f in &out {
            x -= f * (form.inner(&x, f) / form.norm_sq(f));
        }
        if let Some(y) = form.normalize(&x) {
            if y.norm() < 1e9 {
                out.push(y);
            }
        }
        if out.len() == sub.dim() {
            break;
        }
    }
    out
}

fn decompose_lorentz3(t: &Isometry) -> Result<Biflipper> {
    let space = t.space();
    let m = t.matrix();
    let i4 = Mat::identity(4, 4);
    let scale = m.amax().max(1.0);
    if (m - &i4).amax() <= super::ANGLE_EPS * scale {
        return Ok(whole_pair(space));
    }
    let (l1, l2) = if t.det() > 0.0 {
        lorentz3_even(m)?
    } else {
        return lorentz3_odd(space, m);
    };
    pair(Flipper::span(space, &l1)?, Flipper::span(space, &l2)?)
}

/// The invariant line (as two spanning vectors) of an orientation-preserving
/// loxodromic or elliptic element of `O(1,3)`.
pub(crate) fn lorentz3_axis(m: &Mat) -> Option<Vec<Vector>> {
    if m.determinant() < 0.0 {
        return None;
    }
    let i4 = Mat::identity(4, 4);
    let (u1, u2) = lorentz3_roots(m);
    let a = if u1 - 2.0 > 1e-9 {
        let minv = BilinearForm::lorentz(3).isometry_inverse(m);
        smallest_singular_vectors(&(m + &minv - &i4 * u1), 2)
    } else if 2.0 - u2 > 1e-9 {
        smallest_singular_vectors(&(m - &i4), 2)
    } else {
        return None;
    };
    let sub = LinearSubspace::new(&a, BilinearForm::lorentz(3)).ok()?;
    (sub.positive_index() == 1).then(|| sub.basis().to_vec())
}

type LinePair = (Vec<Vector>, Vec<Vector>);

fn lorentz3_even(m: &Mat) -> Result<LinePair> {
    let form = BilinearForm::lorentz(3);
    let g = form.gram();
    let i4 = Mat::identity(4, 4);
    let (u1, u2) = lorentz3_roots(m);
    let o = e0(4);
    let bad = || Error::InvalidIsometry("cannot decompose H3 isometry".into());
    if u1 - 2.0 <= 1e-9 && 2.0 - u2 <= 1e-9 {
        // parabolic
        let a = m - &i4;
        let n = &a - &a * &a / 2.0;
        let n2 = &n * &n;
        let mut xi = (0..4)
            .map(|j| n2.column(j).into_owned())
            .max_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap())
            .unwrap();
        if xi[0] < 0.0 {
            xi = -xi;
        }
        let half = &i4 + &n / 2.0 + &n2 / 8.0;
        let l2 = vec![&half * &xi, &half * &o];
        return Ok((vec![xi, o], l2));
    }
    let minv = form.isometry_inverse(m);
    let a = if u1 - 2.0 > 1e-9 {
        smallest_singular_vectors(&(m + &minv - &i4 * u1), 2)
    } else {
        smallest_singular_vectors(&(m - &i4), 2)
    };
    let asub = LinearSubspace::new(&a, form).map_err(|_| bad())?;
    let foot = hyperboloid_normalize(&(asub.projector() * &o)).ok_or_else(bad)?;
    let w = lorentz_frame(form, &asub.complement()?);
    if w.len() != 2 {
        return Err(bad());
    }
    let (w1, w2) = (&w[0], &w[1]);
    let mw1 = m * w1;
    let phi = (-form.inner(&mw1, w2)).atan2(-form.inner(&mw1, w1));
    let w_half = w1 * (phi / 2.0).cos() + w2 * (phi / 2.0).sin();
    let mm = m * &foot;
    let ch = form.inner(&mm, &foot).max(1.0);
    let ell = ch.acosh();
    let foot2 = if ell > 1e-12 {
        let tv = (&mm - &foot * ch) / ell.sinh();
        &foot * (ell / 2.0).cosh() + tv * (ell / 2.0).sinh()
    } else {
        foot.clone()
    };
    let _ = g;
    Ok((vec![foot, w1.clone()], vec![foot2, w_half]))
}

fn lorentz3_odd(space: SpaceTag, m: &Mat) -> Result<Biflipper> {
    let form = BilinearForm::lorentz(3);
    let g = form.gram();
    let i4 = Mat::identity(4, 4);
    let bad = || Error::InvalidIsometry("cannot decompose orientation-reversing H3 isometry".into());
    let n = smallest_singular_vectors(&(m + &i4), 1).remove(0);
    let n = form.normalize(&n).ok_or_else(bad)?;
    if form.norm_sq(&n) >= 0.0 {
        return Err(bad());
    }
    let fn_ = &i4 - &n * (n.transpose() * &g) * (2.0 / form.norm_sq(&n));
    let mp = &fn_ * m;
    let pi_sub = LinearSubspace::new(&[n.clone()], form)?.complement()?;
    let frame = lorentz_frame(form, &pi_sub);
    if frame.len() != 3 {
        return Err(bad());
    }
    let b = Mat::from_columns(&frame);
    let j = Mat::from_diagonal(&vec3(1.0, -1.0, -1.0));
    let restricted = &j * b.transpose() * &g * &mp * &b;
    let scale = mp.amax().max(1.0);
    if (&mp - &i4).amax() <= 1e-9 * scale {
        // reflection in the plane n^⊥
        let foot = frame[0].clone();
        let sigma = frame[1].clone();
        let third = frame[2].clone();
        let tail = Flipper::span(space, &[foot.clone(), n.clone(), third.clone()])?;
        let head = Flipper::span(space, &[foot, third])?;
        let _ = sigma;
        return pair(tail, head);
    }
    let h2 = IsometryMatrix::from_raw(SpaceTag::H2, restricted);
    let inner = decompose(&h2)?;
    let lift = |f: &Flipper| -> Vec<Vector> {
        f.linear().expect("linear").basis().iter().map(|v| &b * v).collect()
    };
    let mut tail = lift(inner.tail());
    tail.push(n);
    pair(Flipper::span(space, &tail)?, Flipper::span(space, &lift(inner.head()))?)
}
