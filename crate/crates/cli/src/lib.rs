//! Command line and HTTP front ends for `flipcalc`.

pub mod jsonfmt;
pub mod ops;
pub mod render;
pub mod scene;
pub mod service;
