//! The Brownian skeleton: successive heat-ball exit times and positions.
//!
//! With `A_n ~ Γ(3/2, 2)` and Rademacher signs `Z_n`, the chain scaled by a
//! tube function `η > 0` is
//!
//! ```text
//! U_n = ε² η²(x_{n−1}) e^{1−A_n},     s_n = U_1 + … + U_n,
//! x_n = x_{n−1} + Z_n η(x_{n−1}) φ_ε(U_n / η²(x_{n−1})),
//! ```
//!
//! and the piecewise-constant path `x_t = x_n` on `[s_n, s_{n+1})` stays
//! within `ε·η` of a Brownian path in distribution. With `η ≡ 1` it is an
//! ε-strong Brownian approximation outright.

use alloc::string::String;
use alloc::vec::Vec;

use crate::distributions::{sample_gamma32, sample_rademacher};
use crate::error::Error;
use crate::math::{exp, ln, sqrt, E};
use crate::rng::RngStream;
use crate::Result;

/// Default per-path step budget; pathological η choices fail loudly instead
/// of hanging.
pub const DEFAULT_STEP_CAP: u64 = 1_000_000_000;

/// The heat-ball boundary `φ_ε(t) = sqrt(t ln(ε² e / t))` on `(0, e ε²]`.
#[derive(Clone, Copy, Debug)]
pub struct PhiDomain {
    epsilon: f64,
    r_eps: f64,
}

impl PhiDomain {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::InvalidArgument(alloc::format!(
                "phi domain needs epsilon > 0, got {epsilon}"
            )));
        }
        Ok(Self {
            epsilon,
            r_eps: E * (epsilon * epsilon),
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Support endpoint `r_ε = e ε²`.
    pub fn r_eps(&self) -> f64 {
        self.r_eps
    }

    /// Boundary value at `t`; zero outside `(0, e ε²]`.
    ///
    /// Near the right endpoint the log argument is clamped at 1 from below:
    /// rounding can push `ε² e / t` a few ulps under 1 where φ is
    /// continuously 0 anyway, and the clamp keeps the square root real.
    pub fn value(&self, t: f64) -> f64 {
        self.value_with_ln_scale(t, 1.0)
    }

    /// [`PhiDomain::value`] with the log argument scaled by `ln_scale`.
    ///
    /// `ln_scale = 1` is the true boundary. Other values deform the domain
    /// and exist solely as a negative-control hook for validation suites.
    pub fn value_with_ln_scale(&self, t: f64, ln_scale: f64) -> f64 {
        if t <= 0.0 || t > self.r_eps {
            return 0.0;
        }
        let mut q = ln_scale * self.epsilon * self.epsilon * E / t;
        if t > self.r_eps * (1.0 - 1e-12) {
            q = q.max(1.0);
        }
        sqrt(t * ln(q))
    }
}

/// One skeleton step: sojourn `u`, cumulative time `s`, position `x`, and
/// the Rademacher sign `z` consumed (0 on the stored origin step).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SkeletonStep {
    pub u: f64,
    pub s: f64,
    pub x: f64,
    pub z: i8,
}

/// A generated skeleton path. Steps sit in generation order; step 0 is the
/// origin `(0, x0)`, so indices match the chain's 1-based convention and
/// `steps().len() - 1` is the step count.
#[derive(Clone, Debug)]
pub struct SkeletonPath {
    epsilon: f64,
    eta_id: String,
    steps: Vec<SkeletonStep>,
}

impl SkeletonPath {
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Label of the tube function the path was generated with.
    pub fn eta_id(&self) -> &str {
        &self.eta_id
    }

    pub fn steps(&self) -> &[SkeletonStep] {
        &self.steps
    }

    pub fn x0(&self) -> f64 {
        self.steps[0].x
    }

    /// Last cumulative time (the unique `s ≥ horizon` for generated paths).
    pub fn total_time(&self) -> f64 {
        self.steps[self.steps.len() - 1].s
    }

    /// Number of generated steps `N` (origin excluded).
    pub fn step_count(&self) -> u64 {
        (self.steps.len() - 1) as u64
    }

    /// Piecewise-constant evaluation: `x_t = x_n` for `t ∈ [s_n, s_{n+1})`.
    pub fn evaluate(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) || t > self.total_time() {
            return Err(Error::InvalidArgument(alloc::format!(
                "evaluation time {t} outside [0, {}]",
                self.total_time()
            )));
        }
        let idx = self.steps.partition_point(|step| step.s <= t);
        Ok(self.steps[idx - 1].x)
    }

    /// `N_t = inf{n ≥ 1 : s_n ≥ t}`, the covering step count.
    pub fn count_steps(&self, t: f64) -> Result<u64> {
        if !(t >= 0.0) || t > self.total_time() {
            return Err(Error::InvalidArgument(alloc::format!(
                "count time {t} outside [0, {}]",
                self.total_time()
            )));
        }
        let idx = self.steps.partition_point(|step| step.s < t);
        Ok(idx.max(1) as u64)
    }
}

/// Advances the chain by one step with explicit variates `a` (gamma) and
/// `z` (sign); the sampling wrapper is [`next_step`].
pub fn next_step_with<H: Fn(f64) -> f64>(
    prev: &SkeletonStep,
    eta: &H,
    epsilon: f64,
    a: f64,
    z: i8,
) -> Result<SkeletonStep> {
    let eta_x = eta(prev.x);
    if !(eta_x > 0.0) || !eta_x.is_finite() {
        return Err(Error::Model(alloc::format!(
            "tube scaling eta({}) = {eta_x} must be positive and finite",
            prev.x
        )));
    }
    // e^{1−A} ≤ e since A ≥ 0; floored so the clock always advances.
    let e1ma = exp(1.0 - a).max(1e-300);
    // φ's argument is ε² e^{1−A} = u/η² computed without the round-trip
    // division, so it lands in (0, e ε²] exactly as constructed.
    let phi_arg = epsilon * epsilon * e1ma;
    let u = eta_x * eta_x * phi_arg;
    let phi = PhiDomain::new(epsilon)?.value(phi_arg);
    Ok(SkeletonStep {
        u,
        s: prev.s + u,
        x: prev.x + z as f64 * eta_x * phi,
        z,
    })
}

/// Draws `(A, Z)` from the stream and advances the chain by one step.
pub fn next_step<H: Fn(f64) -> f64>(
    prev: &SkeletonStep,
    eta: &H,
    epsilon: f64,
    stream: &mut RngStream,
) -> Result<SkeletonStep> {
    let a = sample_gamma32(stream);
    let z = sample_rademacher(stream);
    next_step_with(prev, eta, epsilon, a, z)
}

/// Generates the skeleton from `(0, x0)` until the clock first reaches
/// `horizon`, with the default step budget.
pub fn generate_until<H: Fn(f64) -> f64>(
    x0: f64,
    horizon: f64,
    eta: H,
    epsilon: f64,
    stream: &mut RngStream,
) -> Result<SkeletonPath> {
    generate_until_capped(x0, horizon, eta, epsilon, stream, DEFAULT_STEP_CAP, "custom")
}

/// [`generate_until`] with an explicit step budget and η label.
pub fn generate_until_capped<H: Fn(f64) -> f64>(
    x0: f64,
    horizon: f64,
    eta: H,
    epsilon: f64,
    stream: &mut RngStream,
    step_cap: u64,
    eta_id: &str,
) -> Result<SkeletonPath> {
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::InvalidArgument(alloc::format!(
            "horizon must be positive, got {horizon}"
        )));
    }
    PhiDomain::new(epsilon)?;
    let mut steps = Vec::new();
    steps.push(SkeletonStep {
        u: 0.0,
        s: 0.0,
        x: x0,
        z: 0,
    });
    let mut n: u64 = 0;
    loop {
        let step = next_step(&steps[steps.len() - 1], &eta, epsilon, stream)?;
        steps.push(step);
        n += 1;
        if step.s >= horizon {
            break;
        }
        if n >= step_cap {
            return Err(Error::Runaway {
                steps: n,
                epsilon,
                horizon,
            });
        }
    }
    Ok(SkeletonPath {
        epsilon,
        eta_id: String::from(eta_id),
        steps,
    })
}

/// Streaming variant of [`generate_until_capped`] that returns only the
/// covering count `N_horizon` without materializing the path.
pub fn count_until<H: Fn(f64) -> f64>(
    x0: f64,
    horizon: f64,
    eta: H,
    epsilon: f64,
    stream: &mut RngStream,
    step_cap: u64,
) -> Result<u64> {
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::InvalidArgument(alloc::format!(
            "horizon must be positive, got {horizon}"
        )));
    }
    PhiDomain::new(epsilon)?;
    let mut prev = SkeletonStep {
        u: 0.0,
        s: 0.0,
        x: x0,
        z: 0,
    };
    let mut n: u64 = 0;
    loop {
        prev = next_step(&prev, &eta, epsilon, stream)?;
        n += 1;
        if prev.s >= horizon {
            return Ok(n);
        }
        if n >= step_cap {
            return Err(Error::Runaway {
                steps: n,
                epsilon,
                horizon,
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const UNIT: fn(f64) -> f64 = |_| 1.0;

    #[test]
    fn phi_peak_and_endpoints() {
        let eps = 0.3;
        let phi = PhiDomain::new(eps).unwrap();
        assert_relative_eq!(phi.value(eps * eps), eps, epsilon = 1e-15);
        assert_eq!(phi.value(phi.r_eps()), 0.0);
        assert_eq!(phi.value(0.0), 0.0);
        assert_eq!(phi.value(-1.0), 0.0);
        assert_eq!(phi.value(phi.r_eps() * 1.0000001), 0.0);
        // Hand evaluation: φ(ε²/e) = sqrt((ε²/e) ln e²) = ε sqrt(2/e).
        assert_relative_eq!(
            phi.value(eps * eps / E),
            eps * sqrt(2.0 / E),
            epsilon = 1e-14
        );
    }

    #[test]
    fn phi_has_no_nan_near_right_endpoint() {
        let phi = PhiDomain::new(0.1).unwrap();
        let r = phi.r_eps();
        for k in 1..=100 {
            let t = r * (1.0 - 1e-15 * k as f64);
            let v = phi.value(t);
            assert!(v.is_finite() && v >= 0.0, "phi({t}) = {v}");
        }
        assert!(phi.value(r).is_finite());
    }

    #[test]
    fn forced_step_hits_tube_edge() {
        // A = 1 makes u = ε², where φ peaks at ε.
        let origin = SkeletonStep {
            u: 0.0,
            s: 0.0,
            x: 2.0,
            z: 0,
        };
        let eps = 0.05;
        let step = next_step_with(&origin, &UNIT, eps, 1.0, 1).unwrap();
        assert_relative_eq!(step.u, eps * eps, epsilon = 1e-18);
        assert_relative_eq!(step.x, 2.0 + eps, epsilon = 1e-15);

        // A → ∞ collapses the sojourn and freezes the position.
        let step = next_step_with(&origin, &UNIT, eps, 1e9, -1).unwrap();
        assert!(step.u > 0.0 && step.u < 1e-200);
        assert_relative_eq!(step.x, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn next_step_rejects_degenerate_eta() {
        let origin = SkeletonStep {
            u: 0.0,
            s: 0.0,
            x: 0.0,
            z: 0,
        };
        let zero = |_: f64| 0.0;
        assert!(matches!(
            next_step_with(&origin, &zero, 0.1, 1.0, 1),
            Err(Error::Model(_))
        ));
    }

    #[test]
    fn single_step_when_horizon_is_tiny() {
        let mut stream = RngStream::new(3, 0);
        let path = generate_until(0.0, 1e-12, UNIT, 0.5, &mut stream).unwrap();
        assert_eq!(path.step_count(), 1);
        assert!(path.total_time() >= 1e-12);
    }

    #[test]
    fn evaluation_follows_left_closed_convention() {
        let mut stream = RngStream::new(5, 1);
        let path = generate_until(1.5, 0.01, UNIT, 0.1, &mut stream).unwrap();
        assert_eq!(path.evaluate(0.0).unwrap(), 1.5);
        let steps = path.steps();
        for n in 1..steps.len() {
            assert_eq!(path.evaluate(steps[n].s).unwrap(), steps[n].x);
            let mid = 0.5 * (steps[n - 1].s + steps[n].s);
            assert_eq!(path.evaluate(mid).unwrap(), steps[n - 1].x);
        }
        assert!(path.evaluate(path.total_time() + 1.0).is_err());
        assert!(path.evaluate(-0.5).is_err());
    }

    #[test]
    fn count_convention_is_one_based() {
        let mut stream = RngStream::new(6, 2);
        let path = generate_until(0.0, 0.02, UNIT, 0.1, &mut stream).unwrap();
        assert_eq!(path.count_steps(0.0).unwrap(), 1);
        let s1 = path.steps()[1].s;
        assert_eq!(path.count_steps(s1).unwrap(), 1);
        if path.steps().len() > 2 {
            assert_eq!(path.count_steps(s1 * 1.0000001).unwrap(), 2);
        }
    }

    #[test]
    fn runaway_budget_reports_diagnostics() {
        let mut stream = RngStream::new(1, 0);
        let err = generate_until_capped(0.0, 1.0, UNIT, 1e-6, &mut stream, 100, "unit")
            .unwrap_err();
        match err {
            Error::Runaway { steps, .. } => assert_eq!(steps, 100),
            other => panic!("expected runaway, got {other:?}"),
        }
    }

    #[test]
    fn count_until_matches_path_generation() {
        for seed in 0..5 {
            let mut a = RngStream::new(seed, 9);
            let mut b = RngStream::new(seed, 9);
            let path = generate_until(0.3, 0.5, UNIT, 0.2, &mut a).unwrap();
            let n = count_until(0.3, 0.5, UNIT, 0.2, &mut b, DEFAULT_STEP_CAP).unwrap();
            assert_eq!(path.step_count(), n);
        }
    }

    #[test]
    fn same_stream_reproduces_path() {
        let mut a = RngStream::new(123, 7);
        let mut b = RngStream::new(123, 7);
        let pa = generate_until(0.0, 1.0, UNIT, 0.3, &mut a).unwrap();
        let pb = generate_until(0.0, 1.0, UNIT, 0.3, &mut b).unwrap();
        assert_eq!(pa.steps(), pb.steps());
    }
}
