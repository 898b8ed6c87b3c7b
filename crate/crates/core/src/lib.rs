//! Tolerance-enforced (ε-strong) simulation of one-dimensional Brownian
//! motion and of L/G-class diffusions.
//!
//! The approximation is piecewise constant and guaranteed to stay within a
//! prescribed tube of half-width ε around the target path. It is built from
//! successive exit times of heat-ball domains bounded by
//!
//! ```text
//! φ_ε(t) = sqrt(t ln(ε² e / t)),   t ∈ (0, e ε²],
//! ```
//!
//! whose Brownian exit law is known exactly: the exit time equals `e ε² W`
//! with `W` log-gamma distributed, and the exit position sits on the moving
//! boundary with a Rademacher sign.
//!
//! Module map:
//! - [`distributions`]: exact samplers for the exit law (`W`, `Γ(3/2,2)`),
//!   its density/CDF/moments and the Laplace-transform bounds.
//! - [`skeleton`]: the Brownian skeleton chain `(U_n, s_n, x_n)`, path
//!   evaluation and step counting.
//! - [`diffusion`]: time-changed representations `X_t = f(t, x0 + B_ρ(t))`
//!   for L/G-class SDEs and their ε-strong approximations.
//! - [`stats`]: renewal asymptotics, CLT standardization, tail bounds,
//!   regression and Kolmogorov-Smirnov distances.
//! - [`oracle`]: deliberately dumb cross-checks (fine-grid exit simulation,
//!   Euler-Maruyama baseline).
//!
//! The crate is `no_std` (with `alloc`); everything that touches files,
//! clocks or threads lives in the companion CLI crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod diffusion;
pub mod distributions;
pub mod error;
mod math;
pub mod numerics;
pub mod oracle;
pub mod rng;
pub mod skeleton;
pub mod stats;

pub use error::Error;

pub type Result<T> = core::result::Result<T, Error>;
