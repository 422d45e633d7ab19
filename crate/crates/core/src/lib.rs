//! Isometries of low-dimensional classical geometries, each handled as an
//! ordered pair of flips.

pub mod batch;
pub mod biflipper;
pub mod error;
pub mod flips;
pub mod headtotail;
pub mod numkernel;
pub mod quaternion;
pub mod sample;
pub mod wordreduce;

pub use error::{Error, Result};
pub use numkernel::{SpaceTag, Tolerance};
