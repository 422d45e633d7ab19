//! Classification of isometries and re-synthesis from class data.
//!
//! Parameters per label (all coordinates in the model of the space):
//!
//! | space | label | parameters |
//! |---|---|---|
//! | `E1` | translation | `vector` |
//! | `E1` | point-symmetry | `center` |
//! | `E2` | translation | `vector` |
//! | `E2` | rotation, point-symmetry | `center`, `angle` |
//! | `E2` | reflection | `point` on the mirror, mirror `direction` |
//! | `E2` | glide-reflection | `point`, `direction`, glide `vector` |
//! | `E3` | translation | `vector` |
//! | `E3` | rotation, line-symmetry | axis `point` (foot from origin), `direction`, `angle` |
//! | `E3` | screw-motion, glide-line-symmetry | as rotation plus `vector` along the axis and its `length` |
//! | `E3` | reflection | `point` on the plane, `normal` |
//! | `E3` | glide-reflection | `point`, `normal`, `vector` |
//! | `E3` | rotary-reflection | fixed `center`, axis `direction`, `angle` |
//! | `E3` | central-symmetry | `center` |
//! | `S2` | rotation, line-symmetry | `direction`, `angle` |
//! | `S2` | reflection | `normal` |
//! | `S2` | rotary-reflection | `direction`, `angle` |
//! | `S2` | central-symmetry | none |
//! | `RP2` | rotation | `direction`, `angle` |
//! | `H2` | rotation, point-symmetry | `center` (hyperboloid), `angle` |
//! | `H2` | hyperbolic-translation, glide-reflection | axis `normal`, `length`, `ideal` = forward then backward endpoint |
//! | `H2` | reflection | mirror `normal` |
//! | `H2` | parallel-motion | `ideal` fixed point, signed `shift` |
//! | `H3`, `MOEB` | elliptic, parabolic, loxodromic | `length`, `angle` where defined |
//!
//! Angles lie in `(-pi, pi]`; the rotation turns from the tail flipper toward
//! the head flipper of the canonical decomposition.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flips::Isometry;
use crate::numkernel::{
    affine_matrix, boost_to, cross3, first_nonzero_positive, hyperboloid_normalize, kernel3, lorentz_cross, rotation2,
    rotation3, vec3, BilinearForm, IsometryMatrix, Mat, SpaceTag, Tolerance, Vector,
};

/// Angles below this are zero.
pub const ANGLE_EPS: f64 = 1e-9;
/// Translation parts below this are zero.
pub const LENGTH_EPS: f64 = 1e-9;
/// Band around zero for the Lorentz norm when telling timelike, null and
/// spacelike vectors apart.
pub const LORENTZ_BAND: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Label {
    Identity,
    Translation,
    Rotation,
    Reflection,
    GlideReflection,
    PointSymmetry,
    LineSymmetry,
    CentralSymmetry,
    ScrewMotion,
    RotaryReflection,
    GlideLineSymmetry,
    ParallelMotion,
    HyperbolicTranslation,
    Elliptic,
    Parabolic,
    Loxodromic,
    OrientationReversingMoebius,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Identity => "identity",
            Label::Translation => "translation",
            Label::Rotation => "rotation",
            Label::Reflection => "reflection",
            Label::GlideReflection => "glide-reflection",
            Label::PointSymmetry => "point-symmetry",
            Label::LineSymmetry => "line-symmetry",
            Label::CentralSymmetry => "central-symmetry",
            Label::ScrewMotion => "screw-motion",
            Label::RotaryReflection => "rotary-reflection",
            Label::GlideLineSymmetry => "glide-line-symmetry",
            Label::ParallelMotion => "parallel-motion",
            Label::HyperbolicTranslation => "hyperbolic-translation",
            Label::Elliptic => "elliptic",
            Label::Parabolic => "parabolic",
            Label::Loxodromic => "loxodromic",
            Label::OrientationReversingMoebius => "orientation-reversing-moebius",
        }
    }

    /// Isometries whose whole group action is a rotation-like motion about a
    /// center or an axis.
    pub fn is_rotational(self) -> bool {
        matches!(self, Label::Rotation | Label::PointSymmetry | Label::LineSymmetry)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ClassParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normal: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vector: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ideal: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsometryClass {
    pub space: SpaceTag,
    pub label: Label,
    #[serde(flatten)]
    pub params: ClassParams,
}

fn v(x: &Vector) -> Vec<f64> {
    x.iter().copied().collect()
}

fn get(p: &Option<Vec<f64>>, what: &str) -> Result<Vector> {
    p.as_ref()
        .map(|x| Vector::from_column_slice(x))
        .ok_or_else(|| Error::InvalidIsometry(format!("class data lacks `{what}`")))
}

fn get_f(p: Option<f64>, what: &str) -> Result<f64> {
    p.ok_or_else(|| Error::InvalidIsometry(format!("class data lacks `{what}`")))
}

fn near_pi(theta: f64) -> bool {
    (theta.abs() - std::f64::consts::PI).abs() <= ANGLE_EPS
}

/// Axis and angle in `[0, pi]` of a rotation of `R^3`, the axis oriented so
/// that the angle is non-negative. The axis of a half-turn has its first
/// non-zero entry positive.
pub(crate) fn axis_angle(r: &Mat) -> (Vector, f64) {
    let c = ((r.trace() - 1.0) / 2.0).clamp(-1.0, 1.0);
    let vee = vec3(r[(2, 1)] - r[(1, 2)], r[(0, 2)] - r[(2, 0)], r[(1, 0)] - r[(0, 1)]);
    let s = (vee.norm() / 2.0).min(1.0);
    let theta = s.atan2(c);
    if theta <= ANGLE_EPS {
        return (vec3(0.0, 0.0, 1.0), theta);
    }
    let u = if c >= 0.0 {
        vee.normalize()
    } else {
        // symmetric part (1 - cos) u u^T, well conditioned past a quarter turn
        let m = (r + r.transpose()) / 2.0 - Mat::identity(3, 3) * c;
        let col = (0..3)
            .map(|j| m.column(j).into_owned())
            .max_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap())
            .unwrap();
        let mut u = col.normalize();
        if vee.norm() > 1e-13 {
            if u.dot(&vee) < 0.0 {
                u = -u;
            }
        } else {
            first_nonzero_positive(&mut u, 1e-12);
        }
        u
    };
    (u, theta)
}

/// Classifies an isometry.
pub fn classify(t: &Isometry) -> Result<IsometryClass> {
    let (label, params) = match t.space() {
        SpaceTag::E1 => classify_e1(t),
        SpaceTag::E2 => classify_e2(t),
        SpaceTag::E3 => classify_e3(t),
        SpaceTag::S2 => classify_s2(t),
        SpaceTag::RP2 => classify_rp2(t),
        SpaceTag::H2 => classify_h2(t)?,
        SpaceTag::H3 | SpaceTag::Moeb => classify_coarse(t),
    };
    Ok(IsometryClass { space: t.space(), label, params })
}

fn classify_e1(t: &Isometry) -> (Label, ClassParams) {
    let m = t.matrix();
    let (r, tr) = (m[(0, 0)], m[(0, 1)]);
    if r > 0.0 {
        if tr.abs() <= LENGTH_EPS {
            (Label::Identity, ClassParams::default())
        } else {
            (Label::Translation, ClassParams { vector: Some(vec![tr]), ..Default::default() })
        }
    } else {
        (Label::PointSymmetry, ClassParams { center: Some(vec![tr / 2.0]), ..Default::default() })
    }
}

fn classify_e2(t: &Isometry) -> (Label, ClassParams) {
    let r = t.linear_part();
    let tr = t.translation();
    if t.det() > 0.0 {
        let theta = r[(1, 0)].atan2(r[(0, 0)]);
        if theta.abs() <= ANGLE_EPS {
            if tr.norm() <= LENGTH_EPS {
                return (Label::Identity, ClassParams::default());
            }
            return (Label::Translation, ClassParams { vector: Some(v(&tr)), ..Default::default() });
        }
        let c = (Mat::identity(2, 2) - &r).lu().solve(&tr).expect("rotation fixes a point");
        let label = if near_pi(theta) { Label::PointSymmetry } else { Label::Rotation };
        (label, ClassParams { center: Some(v(&c)), angle: Some(theta), ..Default::default() })
    } else {
        let phi = r[(1, 0)].atan2(r[(0, 0)]) / 2.0;
        let d = Vector::from_vec(vec![phi.cos(), phi.sin()]);
        let n = Vector::from_vec(vec![-phi.sin(), phi.cos()]);
        let g = &d * tr.dot(&d);
        let p = &n * (tr.dot(&n) / 2.0);
        let mut params = ClassParams { point: Some(v(&p)), direction: Some(v(&d)), ..Default::default() };
        if g.norm() <= LENGTH_EPS {
            (Label::Reflection, params)
        } else {
            params.vector = Some(v(&g));
            (Label::GlideReflection, params)
        }
    }
}

fn classify_e3(t: &Isometry) -> (Label, ClassParams) {
    let r = t.linear_part();
    let tr = t.translation();
    let i3 = Mat::identity(3, 3);
    if t.det() > 0.0 {
        let (u, theta) = axis_angle(&r);
        if theta <= ANGLE_EPS {
            if tr.norm() <= LENGTH_EPS {
                return (Label::Identity, ClassParams::default());
            }
            return (Label::Translation, ClassParams { vector: Some(v(&tr)), ..Default::default() });
        }
        let d = tr.dot(&u);
        let perp = &tr - &u * d;
        // (I - R) p = perp solved in the plane normal to u
        let p = (&perp + cross3(&u, &perp) / (theta / 2.0).tan()) / 2.0;
        let mut params =
            ClassParams { point: Some(v(&p)), direction: Some(v(&u)), angle: Some(theta), ..Default::default() };
        let half = near_pi(theta);
        if d.abs() <= LENGTH_EPS {
            (if half { Label::LineSymmetry } else { Label::Rotation }, params)
        } else {
            params.vector = Some(v(&(&u * d)));
            params.length = Some(d.abs());
            (if half { Label::GlideLineSymmetry } else { Label::ScrewMotion }, params)
        }
    } else {
        let (u, alpha) = axis_angle(&(-&r));
        if alpha <= ANGLE_EPS {
            return (Label::CentralSymmetry, ClassParams { center: Some(v(&(&tr / 2.0))), ..Default::default() });
        }
        if near_pi(alpha) {
            let mut n = u;
            first_nonzero_positive(&mut n, 1e-12);
            let tn = tr.dot(&n);
            let g = &tr - &n * tn;
            let p = &n * (tn / 2.0);
            let mut params = ClassParams { point: Some(v(&p)), normal: Some(v(&n)), ..Default::default() };
            if g.norm() <= LENGTH_EPS {
                return (Label::Reflection, params);
            }
            params.vector = Some(v(&g));
            return (Label::GlideReflection, params);
        }
        let c = (&i3 - &r).lu().solve(&tr).expect("rotary reflection fixes a point");
        let params = ClassParams {
            center: Some(v(&c)),
            direction: Some(v(&(-u))),
            angle: Some(std::f64::consts::PI - alpha),
            ..Default::default()
        };
        (Label::RotaryReflection, params)
    }
}

fn classify_s2(t: &Isometry) -> (Label, ClassParams) {
    let r = t.matrix().clone();
    if t.det() > 0.0 {
        let (u, theta) = axis_angle(&r);
        if theta <= ANGLE_EPS {
            return (Label::Identity, ClassParams::default());
        }
        let label = if near_pi(theta) { Label::LineSymmetry } else { Label::Rotation };
        (label, ClassParams { direction: Some(v(&u)), angle: Some(theta), ..Default::default() })
    } else {
        let (u, alpha) = axis_angle(&(-&r));
        if alpha <= ANGLE_EPS {
            return (Label::CentralSymmetry, ClassParams::default());
        }
        if near_pi(alpha) {
            let mut n = u;
            first_nonzero_positive(&mut n, 1e-12);
            return (Label::Reflection, ClassParams { normal: Some(v(&n)), ..Default::default() });
        }
        let params = ClassParams {
            direction: Some(v(&(-u))),
            angle: Some(std::f64::consts::PI - alpha),
            ..Default::default()
        };
        (Label::RotaryReflection, params)
    }
}

fn classify_rp2(t: &Isometry) -> (Label, ClassParams) {
    let r = if t.det() < 0.0 { -t.matrix() } else { t.matrix().clone() };
    let (u, theta) = axis_angle(&r);
    if theta <= ANGLE_EPS {
        return (Label::Identity, ClassParams::default());
    }
    (Label::Rotation, ClassParams { direction: Some(v(&u)), angle: Some(theta), ..Default::default() })
}

/// Kind of a vector of `R^{1,2}` after Euclidean normalisation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Causal {
    Timelike,
    Null,
    Spacelike,
}

pub(crate) fn causal(x: &Vector) -> Causal {
    let form = BilinearForm::lorentz(x.len() - 1);
    let q = form.norm_sq(&x.normalize());
    if q > LORENTZ_BAND {
        Causal::Timelike
    } else if q < -LORENTZ_BAND {
        Causal::Spacelike
    } else {
        Causal::Null
    }
}

fn e0(n: usize) -> Vector {
    let mut o = Vector::zeros(n);
    o[0] = 1.0;
    o
}

/// Unit spacelike vector orthogonal to the ideal point `xi` and to `e0`; the
/// generator of parallel motions at `xi`.
pub(crate) fn parabolic_normal(xi: &Vector) -> Vector {
    let n = lorentz_cross(xi, &e0(3));
    BilinearForm::lorentz(2).normalize(&n).expect("spacelike")
}

/// `exp(s N)` for `N = xi n^T G - n xi^T G`.
pub(crate) fn parabolic_exp(xi: &Vector, s: f64) -> Mat {
    let g = BilinearForm::lorentz(2).gram();
    let n = parabolic_normal(xi);
    let nmat = xi * (n.transpose() * &g) - &n * (xi.transpose() * &g);
    Mat::identity(3, 3) + &nmat * s + &nmat * &nmat * (s * s / 2.0)
}

/// Foot and unit tangent of the axis through ideal points `p+`, `p-`,
/// oriented toward `p+`.
pub(crate) fn axis_frame(pp: &Vector, pm: &Vector) -> (Vector, Vector) {
    let form = BilinearForm::lorentz(pp.len() - 1);
    let k = (2.0 * form.inner(pp, pm)).sqrt();
    ((pp + pm) / k, (pp - pm) / k)
}

fn eigen_null(m: &Mat, lambda: f64) -> Option<Vector> {
    let k = kernel3(&(m - Mat::identity(3, 3) * lambda))?;
    Some(&k / k[0])
}

fn classify_h2(t: &Isometry) -> Result<(Label, ClassParams)> {
    let m = t.matrix();
    let form = BilinearForm::lorentz(2);
    let i3 = Mat::identity(3, 3);
    let scale = m.amax().max(1.0);
    let bad = || Error::InvalidIsometry("cannot analyse H2 isometry".into());
    if t.det() > 0.0 {
        if (m - &i3).amax() <= ANGLE_EPS * scale {
            return Ok((Label::Identity, ClassParams::default()));
        }
        let k = kernel3(&(m - &i3)).ok_or_else(bad)?;
        match causal(&k) {
            Causal::Timelike => {
                let c = hyperboloid_normalize(&k).ok_or_else(bad)?;
                let b = boost_to(&c);
                let local = form.isometry_inverse(&b) * m * &b;
                let theta = local[(2, 1)].atan2(local[(1, 1)]);
                let label = if near_pi(theta) { Label::PointSymmetry } else { Label::Rotation };
                Ok((label, ClassParams { center: Some(v(&c)), angle: Some(theta), ..Default::default() }))
            }
            Causal::Spacelike => {
                let ell = ((m.trace() - 1.0) / 2.0).max(1.0).acosh();
                let pp = eigen_null(m, ell.exp()).ok_or_else(bad)?;
                let pm = eigen_null(m, (-ell).exp()).ok_or_else(bad)?;
                let mut n = form.normalize(&lorentz_cross(&pp, &pm)).ok_or_else(bad)?;
                first_nonzero_positive(&mut n, 1e-12);
                let ideal: Vec<f64> = pp.iter().chain(pm.iter()).copied().collect();
                Ok((
                    Label::HyperbolicTranslation,
                    ClassParams { normal: Some(v(&n)), length: Some(ell), ideal: Some(ideal), ..Default::default() },
                ))
            }
            Causal::Null => {
                let xi = if k[0] < 0.0 { -&k } else { k };
                let xi = &xi / xi[0];
                let n = parabolic_normal(&xi);
                let s = form.inner(&(m * e0(3)), &n);
                Ok((Label::ParallelMotion, ClassParams { ideal: Some(v(&xi)), shift: Some(s), ..Default::default() }))
            }
        }
    } else {
        let k = kernel3(&(m + &i3)).ok_or_else(bad)?;
        let mut n = form.normalize(&k).ok_or_else(bad)?;
        first_nonzero_positive(&mut n, 1e-12);
        let sq = m * m;
        if (&sq - &i3).amax() <= 1e-9 * scale * scale {
            return Ok((Label::Reflection, ClassParams { normal: Some(v(&n)), ..Default::default() }));
        }
        let ell = ((m.trace() + 1.0) / 2.0).max(1.0).acosh();
        let pp = eigen_null(m, ell.exp()).ok_or_else(bad)?;
        let pm = eigen_null(m, (-ell).exp()).ok_or_else(bad)?;
        let ideal: Vec<f64> = pp.iter().chain(pm.iter()).copied().collect();
        Ok((
            Label::GlideReflection,
            ClassParams { normal: Some(v(&n)), length: Some(ell), ideal: Some(ideal), ..Default::default() },
        ))
    }
}

/// Roots `(2 cosh l, 2 cos theta)` of the characteristic data of an
/// orientation-preserving element of `O(1,3)`.
pub(crate) fn lorentz3_roots(m: &Mat) -> (f64, f64) {
    let t = m.trace();
    let s = (t * t - (m * m).trace()) / 2.0;
    let disc = (t * t - 4.0 * (s - 2.0)).max(0.0).sqrt();
    let u1 = (t + disc) / 2.0;
    (u1, t - u1)
}

fn classify_coarse(t: &Isometry) -> (Label, ClassParams) {
    let m = t.matrix();
    if t.det() < 0.0 {
        return (Label::OrientationReversingMoebius, ClassParams::default());
    }
    let scale = m.amax().max(1.0);
    if (m - Mat::identity(4, 4)).amax() <= ANGLE_EPS * scale {
        return (Label::Identity, ClassParams::default());
    }
    let (u1, u2) = lorentz3_roots(m);
    let ell = (u1 / 2.0).max(1.0).acosh();
    let theta = (u2 / 2.0).clamp(-1.0, 1.0).acos();
    if u1 - 2.0 > 1e-9 {
        (Label::Loxodromic, ClassParams { length: Some(ell), angle: Some(theta), ..Default::default() })
    } else if 2.0 - u2 > 1e-9 {
        (Label::Elliptic, ClassParams { angle: Some(theta), ..Default::default() })
    } else {
        (Label::Parabolic, ClassParams::default())
    }
}

impl IsometryClass {
    /// Rebuilds the isometry described by the class data.
    pub fn synthesize(&self) -> Result<Isometry> {
        let p = &self.params;
        let space = self.space;
        let m = match space {
            SpaceTag::E1 => match self.label {
                Label::Identity => Mat::identity(2, 2),
                Label::Translation => affine_matrix(&Mat::identity(1, 1), &get(&p.vector, "vector")?),
                Label::PointSymmetry => affine_matrix(&(-Mat::identity(1, 1)), &(get(&p.center, "center")? * 2.0)),
                _ => return Err(Error::InvalidIsometry(format!("{} is not an E1 label", self.label.as_str()))),
            },
            SpaceTag::E2 => synth_e2(self)?,
            SpaceTag::E3 => synth_e3(self)?,
            SpaceTag::S2 | SpaceTag::RP2 => synth_sphere(self)?,
            SpaceTag::H2 => synth_h2(self)?,
            SpaceTag::H3 | SpaceTag::Moeb => return Err(Error::UnsupportedSpace(space)),
        };
        Ok(IsometryMatrix::from_raw(space, m))
    }

    pub fn angle(&self) -> Option<f64> {
        self.params.angle
    }
}

fn synth_e2(c: &IsometryClass) -> Result<Mat> {
    let p = &c.params;
    let i2 = Mat::identity(2, 2);
    Ok(match c.label {
        Label::Identity => Mat::identity(3, 3),
        Label::Translation => affine_matrix(&i2, &get(&p.vector, "vector")?),
        Label::Rotation | Label::PointSymmetry => {
            let r = rotation2(get_f(p.angle, "angle")?);
            let t = (&i2 - &r) * get(&p.center, "center")?;
            affine_matrix(&r, &t)
        }
        Label::Reflection | Label::GlideReflection => {
            let d = get(&p.direction, "direction")?.normalize();
            let r = &d * d.transpose() * 2.0 - &i2;
            let g = p.vector.as_ref().map(|x| Vector::from_column_slice(x)).unwrap_or_else(|| Vector::zeros(2));
            let t = (&i2 - &r) * get(&p.point, "point")? + g;
            affine_matrix(&r, &t)
        }
        other => return Err(Error::InvalidIsometry(format!("{} is not an E2 label", other.as_str()))),
    })
}

fn synth_e3(c: &IsometryClass) -> Result<Mat> {
    let p = &c.params;
    let i3 = Mat::identity(3, 3);
    let opt = |x: &Option<Vec<f64>>| x.as_ref().map(|x| Vector::from_column_slice(x)).unwrap_or_else(|| Vector::zeros(3));
    Ok(match c.label {
        Label::Identity => Mat::identity(4, 4),
        Label::Translation => affine_matrix(&i3, &get(&p.vector, "vector")?),
        Label::Rotation | Label::LineSymmetry | Label::ScrewMotion | Label::GlideLineSymmetry => {
            let u = get(&p.direction, "direction")?.normalize();
            let r = rotation3(&u, get_f(p.angle, "angle")?);
            let t = (&i3 - &r) * get(&p.point, "point")? + opt(&p.vector);
            affine_matrix(&r, &t)
        }
        Label::Reflection | Label::GlideReflection => {
            let n = get(&p.normal, "normal")?.normalize();
            let r = &i3 - &n * n.transpose() * 2.0;
            let t = (&i3 - &r) * get(&p.point, "point")? + opt(&p.vector);
            affine_matrix(&r, &t)
        }
        Label::RotaryReflection => {
            let u = get(&p.direction, "direction")?.normalize();
            let r = rotation3(&u, get_f(p.angle, "angle")?) * (&i3 - &u * u.transpose() * 2.0);
            let t = (&i3 - &r) * get(&p.center, "center")?;
            affine_matrix(&r, &t)
        }
        Label::CentralSymmetry => affine_matrix(&(-&i3), &(get(&p.center, "center")? * 2.0)),
        other => return Err(Error::InvalidIsometry(format!("{} is not an E3 label", other.as_str()))),
    })
}

fn synth_sphere(c: &IsometryClass) -> Result<Mat> {
    let p = &c.params;
    let i3 = Mat::identity(3, 3);
    Ok(match c.label {
        Label::Identity => i3,
        Label::Rotation | Label::LineSymmetry => {
            rotation3(&get(&p.direction, "direction")?.normalize(), get_f(p.angle, "angle")?)
        }
        Label::Reflection if c.space == SpaceTag::S2 => {
            let n = get(&p.normal, "normal")?.normalize();
            &i3 - &n * n.transpose() * 2.0
        }
        Label::RotaryReflection if c.space == SpaceTag::S2 => {
            let u = get(&p.direction, "direction")?.normalize();
            rotation3(&u, get_f(p.angle, "angle")?) * (&i3 - &u * u.transpose() * 2.0)
        }
        Label::CentralSymmetry if c.space == SpaceTag::S2 => -i3,
        other => return Err(Error::InvalidIsometry(format!("{} is not a {} label", other.as_str(), c.space))),
    })
}

/// Lorentz matrix acting on the frame `(m, t, k)` of an axis by a boost of
/// length `ell` and by `k -> sign k`.
pub(crate) fn axis_motion(pp: &Vector, pm: &Vector, ell: f64, sign: f64) -> Mat {
    let (m, t) = axis_frame(pp, pm);
    let form = BilinearForm::lorentz(2);
    let k = form.normalize(&lorentz_cross(&m, &t)).expect("spacelike");
    let e = Mat::from_columns(&[m, t, k]);
    let (ch, sh) = (ell.cosh(), ell.sinh());
    let a = Mat::from_row_slice(3, 3, &[ch, sh, 0.0, sh, ch, 0.0, 0.0, 0.0, sign]);
    // frame is form-orthonormal with signature (+, -, -): E^{-1} = G E^T G
    let g = form.gram();
    &e * a * (&g * e.transpose() * &g)
}

fn synth_h2(c: &IsometryClass) -> Result<Mat> {
    let p = &c.params;
    let form = BilinearForm::lorentz(2);
    Ok(match c.label {
        Label::Identity => Mat::identity(3, 3),
        Label::Rotation | Label::PointSymmetry => {
            let ctr = get(&p.center, "center")?;
            let b = boost_to(&ctr);
            let mut local = Mat::identity(3, 3);
            local.view_mut((1, 1), (2, 2)).copy_from(&rotation2(get_f(p.angle, "angle")?));
            &b * local * form.isometry_inverse(&b)
        }
        Label::HyperbolicTranslation | Label::GlideReflection => {
            let ideal = get(&p.ideal, "ideal")?;
            let pp = ideal.rows(0, 3).into_owned();
            let pm = ideal.rows(3, 3).into_owned();
            let sign = if c.label == Label::GlideReflection { -1.0 } else { 1.0 };
            axis_motion(&pp, &pm, get_f(p.length, "length")?, sign)
        }
        Label::Reflection => {
            let n = get(&p.normal, "normal")?;
            let g = form.gram();
            Mat::identity(3, 3) - &n * (n.transpose() * &g) * (2.0 / form.norm_sq(&n))
        }
        Label::ParallelMotion => parabolic_exp(&get(&p.ideal, "ideal")?, get_f(p.shift, "shift")?),
        other => return Err(Error::InvalidIsometry(format!("{} is not an H2 label", other.as_str()))),
    })
}

/// Equality of isometries with the tolerance scaled to the matrix size.
pub(crate) fn same_isometry(a: &Isometry, b: &Isometry, tol: Tolerance) -> bool {
    let scale = a.matrix().amax().max(b.matrix().amax()).max(1.0);
    crate::numkernel::approx_equal(a, b, Tolerance { abs_eps: tol.abs_eps * scale, ..tol.for_space(a.space()) })
        .unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::vec2;
    use std::f64::consts::PI;

    fn e2(r: Mat, t: Vector) -> Isometry {
        IsometryMatrix::new(SpaceTag::E2, affine_matrix(&r, &t)).unwrap()
    }

    #[test]
    fn glide_with_vertical_axis() {
        // (x, y) -> (-x, y - 2)
        let t = e2(Mat::from_diagonal(&vec2(-1.0, 1.0)), vec2(0.0, -2.0));
        let c = classify(&t).unwrap();
        assert_eq!(c.label, Label::GlideReflection);
        let g = c.params.vector.clone().unwrap();
        assert!(g[0].abs() < 1e-15 && (g[1] + 2.0).abs() < 1e-15);
        let p = c.params.point.clone().unwrap();
        assert!(p[0].abs() < 1e-15);
        let d = c.params.direction.clone().unwrap();
        assert!(d[0].abs() < 1e-15 && (d[1] - 1.0).abs() < 1e-15);
        assert!(same_isometry(&c.synthesize().unwrap(), &t, Tolerance::default()));
    }

    #[test]
    fn half_turn_is_point_symmetry() {
        let t = e2(rotation2(PI), vec2(2.0, 0.0));
        let c = classify(&t).unwrap();
        assert_eq!(c.label, Label::PointSymmetry);
        let ctr = c.params.center.unwrap();
        assert!((ctr[0] - 1.0).abs() < 1e-12 && ctr[1].abs() < 1e-12);
    }

    #[test]
    fn e3_rotary_round_trip() {
        let u = vec3(0.0, 0.0, 1.0);
        let r = rotation3(&u, PI / 2.0) * Mat::from_diagonal(&vec3(1.0, 1.0, -1.0));
        let t = IsometryMatrix::new(SpaceTag::E3, affine_matrix(&r, &vec3(0.0, 0.0, 0.0))).unwrap();
        let c = classify(&t).unwrap();
        assert_eq!(c.label, Label::RotaryReflection);
        assert!((c.params.angle.unwrap().abs() - PI / 2.0).abs() < 1e-12);
        assert!(same_isometry(&c.synthesize().unwrap(), &t, Tolerance::default()));
    }

    #[test]
    fn e3_screw_round_trip() {
        let u = vec3(1.0, 2.0, 2.0) / 3.0;
        let r = rotation3(&u, 2.0);
        let p = vec3(1.0, -1.0, 0.5);
        let t = (Mat::identity(3, 3) - &r) * &p + &u * 1.5;
        let m = IsometryMatrix::new(SpaceTag::E3, affine_matrix(&r, &t)).unwrap();
        let c = classify(&m).unwrap();
        assert_eq!(c.label, Label::ScrewMotion);
        assert!((c.params.angle.unwrap() - 2.0).abs() < 1e-12);
        assert!((c.params.length.unwrap() - 1.5).abs() < 1e-12);
        assert!(same_isometry(&c.synthesize().unwrap(), &m, Tolerance::default()));
    }

    #[test]
    fn s2_antipodal_map() {
        let m = IsometryMatrix::new(SpaceTag::S2, -Mat::identity(3, 3)).unwrap();
        assert_eq!(classify(&m).unwrap().label, Label::CentralSymmetry);
    }

    #[test]
    fn h2_examples_round_trip() {
        let form = BilinearForm::lorentz(2);
        let c = hyperboloid_normalize(&vec3(1.0, 0.3, -0.2)).unwrap();
        let b = boost_to(&c);
        let mut local = Mat::identity(3, 3);
        local.view_mut((1, 1), (2, 2)).copy_from(&rotation2(0.7));
        let rot = IsometryMatrix::new(SpaceTag::H2, &b * local * form.isometry_inverse(&b)).unwrap();
        let k = classify(&rot).unwrap();
        assert_eq!(k.label, Label::Rotation);
        assert!((k.params.angle.unwrap() - 0.7).abs() < 1e-12);
        assert!(same_isometry(&k.synthesize().unwrap(), &rot, Tolerance::default()));

        let pp = vec3(1.0, 0.6, 0.8);
        let pm = vec3(1.0, -1.0, 0.0);
        let tr = IsometryMatrix::new(SpaceTag::H2, axis_motion(&pp, &pm, 1.3, 1.0)).unwrap();
        let k = classify(&tr).unwrap();
        assert_eq!(k.label, Label::HyperbolicTranslation);
        assert!((k.params.length.unwrap() - 1.3).abs() < 1e-12);
        assert!(same_isometry(&k.synthesize().unwrap(), &tr, Tolerance::default()));

        let gl = IsometryMatrix::new(SpaceTag::H2, axis_motion(&pp, &pm, 0.4, -1.0)).unwrap();
        let k = classify(&gl).unwrap();
        assert_eq!(k.label, Label::GlideReflection);
        assert!(same_isometry(&k.synthesize().unwrap(), &gl, Tolerance::default()));

        let xi = vec3(1.0, 0.0, 1.0);
        let par = IsometryMatrix::new(SpaceTag::H2, parabolic_exp(&xi, 0.8)).unwrap();
        let k = classify(&par).unwrap();
        assert_eq!(k.label, Label::ParallelMotion);
        assert!((k.params.shift.unwrap() - 0.8).abs() < 1e-12);
        assert!(same_isometry(&k.synthesize().unwrap(), &par, Tolerance::default()));
    }

    #[test]
    fn coarse_labels() {
        let m = Mat::from_diagonal(&Vector::from_vec(vec![1.0, -1.0, -1.0, 1.0]));
        let t = IsometryMatrix::new(SpaceTag::H3, m).unwrap();
        let c = classify(&t).unwrap();
        assert_eq!(c.label, Label::Elliptic);
        assert!((c.params.angle.unwrap() - PI).abs() < 1e-12);
        assert_eq!(c.synthesize(), Err(Error::UnsupportedSpace(SpaceTag::H3)));
    }

    #[test]
    fn class_json_is_flat() {
        let t = e2(Mat::identity(2, 2), vec2(2.0, 0.0));
        let s = serde_json::to_string(&classify(&t).unwrap()).unwrap();
        assert_eq!(s, r#"{"space":"E2","label":"translation","vector":[2.0,0.0]}"#);
    }
}
