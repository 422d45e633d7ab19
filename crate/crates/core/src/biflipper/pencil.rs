//! Pencils of lines in the hyperbolic plane.

use serde::{Serialize, Serializer};

use super::classify::{axis_frame, classify, Label};
use crate::error::{Error, Result};
use crate::flips::{Flipper, Isometry};
use crate::numkernel::{lorentz_cross, BilinearForm, SpaceTag, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PencilKind {
    /// Lines through a point.
    Elliptic,
    /// Lines through an ideal point.
    Parabolic,
    /// Lines perpendicular to a line.
    Hyperbolic,
}

/// A pencil of `H2` lines, all of whose normals are orthogonal to `carrier`.
///
/// The carrier is the center (hyperboloid point), the ideal point (`x0 = 1`),
/// or the unit normal of the common perpendicular.
#[derive(Debug, Clone, PartialEq)]
pub struct Pencil {
    kind: PencilKind,
    carrier: Vector,
}

impl Pencil {
    pub fn new(kind: PencilKind, carrier: Vector) -> Result<Pencil> {
        if carrier.len() != 3 {
            return Err(Error::OutOfDomain("H2 pencils need a 3-vector".into()));
        }
        let form = BilinearForm::lorentz(2);
        let q = form.norm_sq(&carrier.normalize());
        let ok = match kind {
            PencilKind::Elliptic => q > super::LORENTZ_BAND,
            PencilKind::Parabolic => q.abs() <= 1e-7,
            PencilKind::Hyperbolic => q < -super::LORENTZ_BAND,
        };
        if !ok {
            return Err(Error::OutOfDomain("pencil carrier does not match its kind".into()));
        }
        let carrier = match kind {
            PencilKind::Elliptic => crate::numkernel::hyperboloid_normalize(&carrier).unwrap(),
            PencilKind::Parabolic => &carrier / carrier[0],
            PencilKind::Hyperbolic => form.normalize(&carrier).unwrap(),
        };
        Ok(Pencil { kind, carrier })
    }

    pub fn kind(&self) -> PencilKind {
        self.kind
    }

    pub fn carrier(&self) -> &Vector {
        &self.carrier
    }

    /// The line of the pencil through `q`; `None` when `q` is the carrier.
    pub fn line_through(&self, q: &Vector) -> Option<Flipper> {
        let n = lorentz_cross(q, &self.carrier);
        if n.norm() <= 1e-12 * q.norm().max(1.0) * self.carrier.norm().max(1.0) {
            return None;
        }
        Flipper::with_normal(SpaceTag::H2, &n).ok()
    }

    pub fn contains(&self, line: &Flipper, eps: f64) -> bool {
        if line.space() != SpaceTag::H2 || line.model_dim() != 2 {
            return false;
        }
        let n = line.normal().expect("line");
        let form = BilinearForm::lorentz(2);
        let n = form.normalize(&n).unwrap_or(n);
        let c = match self.kind {
            PencilKind::Parabolic => self.carrier.normalize(),
            _ => self.carrier.clone(),
        };
        form.inner(&n, &c).abs() <= eps
    }
}

impl Serialize for Pencil {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Pencil", 2)?;
        st.serialize_field("kind", &self.kind)?;
        let c: Vec<f64> = self.carrier.iter().copied().collect();
        match self.kind {
            PencilKind::Elliptic => st.serialize_field("center", &c)?,
            PencilKind::Parabolic => st.serialize_field("ideal", &c)?,
            PencilKind::Hyperbolic => st.serialize_field("axis", &c)?,
        }
        st.end()
    }
}

/// The pencil containing every line of every line-line biflipper of `t`.
pub fn invariant_pencil(t: &Isometry) -> Result<Pencil> {
    if t.space() != SpaceTag::H2 {
        return Err(Error::UnsupportedSpace(t.space()));
    }
    let c = classify(t)?;
    let p = &c.params;
    let vec_of = |x: &Option<Vec<f64>>| Vector::from_column_slice(x.as_deref().expect("class data"));
    match c.label {
        Label::Identity => Err(Error::IdentityHasNoPencil),
        Label::Rotation | Label::PointSymmetry => Pencil::new(PencilKind::Elliptic, vec_of(&p.center)),
        Label::ParallelMotion => Pencil::new(PencilKind::Parabolic, vec_of(&p.ideal)),
        Label::Reflection => Pencil::new(PencilKind::Hyperbolic, vec_of(&p.normal)),
        Label::HyperbolicTranslation | Label::GlideReflection => {
            let ideal = vec_of(&p.ideal);
            let (m, tn) = axis_frame(&ideal.rows(0, 3).into_owned(), &ideal.rows(3, 3).into_owned());
            Pencil::new(PencilKind::Hyperbolic, lorentz_cross(&m, &tn))
        }
        _ => Err(Error::UnsupportedSpace(t.space())),
    }
}
