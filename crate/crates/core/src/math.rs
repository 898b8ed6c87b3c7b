//! Float math routed through `libm` so the crate builds without `std`
//! and evaluates identically in tests and in shipped code.

pub(crate) use libm::{cos, erfc, exp, fabs, log as ln, pow as powf, sin, sqrt, tgamma};

pub(crate) const E: f64 = core::f64::consts::E;
pub(crate) const PI: f64 = core::f64::consts::PI;
pub(crate) const SQRT_2: f64 = core::f64::consts::SQRT_2;
