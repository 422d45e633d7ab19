use thiserror::Error;

use crate::numkernel::SpaceTag;

/// Errors raised by the calculus. Variant names double as the wire-level
/// error names used by the command line and the HTTP service.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("form restricted to the subspace is degenerate")]
    DegenerateRestriction,
    #[error("space mismatch: {0} vs {1}")]
    SpaceMismatch(SpaceTag, SpaceTag),
    #[error("point outside the chart domain: {0}")]
    OutOfDomain(String),
    #[error("invalid flipper: {0}")]
    InvalidFlipper(String),
    #[error("invalid isometry: {0}")]
    InvalidIsometry(String),
    #[error("map is not an involution")]
    NotInvolution,
    #[error("involution has an empty fixed set")]
    EmptyFixedSet,
    #[error("operation not supported in {0}")]
    UnsupportedSpace(SpaceTag),
    #[error("flip does not commute with both flips of the biflipper")]
    NotCommuting,
    #[error("isometry does not commute with the encoded isometry")]
    NotInCentralizer,
    #[error("flipper cannot be used here: {0}")]
    NotCompatible(String),
    #[error("the identity has no invariant pencil")]
    IdentityHasNoPencil,
    #[error("factor is not Euclidean: {0}")]
    NonEuclideanFactor(SpaceTag),
    #[error("isometries admit no biflippers with a common flipper")]
    NotLinked,
    #[error("screw axes are not well defined: {0}")]
    DegenerateAxes(String),
    #[error("vector is not perpendicular to the vector part")]
    NotPerpendicular,
    #[error("quaternion is not a unit quaternion (norm {0})")]
    NonUnit(f64),
    #[error("wrong flipper kind: {0}")]
    WrongFlipperKind(String),
    #[error("derivation does not replay: {0}")]
    InvalidDerivation(String),
    #[error("unsupported chart conversion from {0} to {1}")]
    UnsupportedChart(String, String),
}

impl Error {
    /// Stable error name, identical to the variant name.
    pub fn name(&self) -> &'static str {
        match self {
            Error::DegenerateRestriction => "DegenerateRestriction",
            Error::SpaceMismatch(..) => "SpaceMismatch",
            Error::OutOfDomain(_) => "OutOfDomain",
            Error::InvalidFlipper(_) => "InvalidFlipper",
            Error::InvalidIsometry(_) => "InvalidIsometry",
            Error::NotInvolution => "NotInvolution",
            Error::EmptyFixedSet => "EmptyFixedSet",
            Error::UnsupportedSpace(_) => "UnsupportedSpace",
            Error::NotCommuting => "NotCommuting",
            Error::NotInCentralizer => "NotInCentralizer",
            Error::NotCompatible(_) => "NotCompatible",
            Error::IdentityHasNoPencil => "IdentityHasNoPencil",
            Error::NonEuclideanFactor(_) => "NonEuclideanFactor",
            Error::NotLinked => "NotLinked",
            Error::DegenerateAxes(_) => "DegenerateAxes",
            Error::NotPerpendicular => "NotPerpendicular",
            Error::NonUnit(_) => "NonUnit",
            Error::WrongFlipperKind(_) => "WrongFlipperKind",
            Error::InvalidDerivation(_) => "InvalidDerivation",
            Error::UnsupportedChart(..) => "UnsupportedChart",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
