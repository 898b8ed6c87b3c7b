//! Shared numerical routines: adaptive Simpson quadrature, monotone
//! bisection, and panel-cached cumulative integrals.

use alloc::format;
use alloc::vec::Vec;

use crate::error::Error;
use crate::math::fabs;
use crate::Result;

/// Default absolute tolerance for adaptive quadrature.
pub const QUAD_TOL: f64 = 1e-10;
/// Hard cap on the number of subintervals the adaptive rule may create.
pub const QUAD_MAX_INTERVALS: usize = 1_000_000;
/// Absolute tolerance for bisection-based function inversion.
pub const BISECT_TOL: f64 = 1e-12;
/// Iteration cap for bisection.
pub const BISECT_MAX_ITER: u32 = 200;

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    (fa + 4.0 * fm + fb) * h / 6.0
}

/// Adaptive Simpson integration of `f` over `[a, b]` to absolute tolerance
/// `tol`. Processes the interval queue iteratively so deep refinement cannot
/// overflow the call stack; errors out if `max_intervals` subdivisions do
/// not suffice.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    max_intervals: usize,
) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(Error::InvalidArgument(format!(
            "bad quadrature interval [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(0.0);
    }

    struct Segment {
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
    }

    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = simpson(fa, fm, fb, b - a);
    let mut stack = Vec::with_capacity(64);
    stack.push(Segment {
        a,
        b,
        fa,
        fm,
        fb,
        whole,
        tol,
    });

    let mut total = 0.0;
    let mut used: usize = 1;
    while let Some(seg) = stack.pop() {
        let m = 0.5 * (seg.a + seg.b);
        let lm = 0.5 * (seg.a + m);
        let rm = 0.5 * (m + seg.b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(seg.fa, flm, seg.fm, m - seg.a);
        let right = simpson(seg.fm, frm, seg.fb, seg.b - m);
        let err = left + right - seg.whole;
        // The usual 1/15 Richardson factor for Simpson's rule.
        if fabs(err) <= 15.0 * seg.tol || (seg.b - seg.a) < 1e-14 * fabs(seg.b).max(1.0) {
            total += left + right + err / 15.0;
        } else {
            used += 2;
            if used > max_intervals {
                return Err(Error::NonConvergent(format!(
                    "adaptive Simpson exceeded {max_intervals} intervals on [{a}, {b}]"
                )));
            }
            let half_tol = 0.5 * seg.tol;
            stack.push(Segment {
                a: seg.a,
                b: m,
                fa: seg.fa,
                fm: flm,
                fb: seg.fm,
                whole: left,
                tol: half_tol,
            });
            stack.push(Segment {
                a: m,
                b: seg.b,
                fa: seg.fm,
                fm: frm,
                fb: seg.fb,
                whole: right,
                tol: half_tol,
            });
        }
    }
    Ok(total)
}

/// Fixed composite Simpson rule with `n` (even) subintervals. Used for the
/// short in-panel tails of cached integrals where adaptivity is overkill.
pub fn composite_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, n: usize) -> f64 {
    debug_assert!(n >= 2 && n % 2 == 0);
    if a == b {
        return 0.0;
    }
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + k as f64 * h);
    }
    acc * h / 3.0
}

/// Inverts a non-decreasing function by bisection: returns `t` in
/// `[lo, hi]` with `f(t) ≈ target` to absolute tolerance `tol`.
pub fn bisect_increasing<F: Fn(f64) -> f64>(
    f: &F,
    target: f64,
    lo: f64,
    hi: f64,
    tol: f64,
    max_iter: u32,
) -> Result<f64> {
    let (mut lo, mut hi) = (lo, hi);
    let flo = f(lo);
    let fhi = f(hi);
    if target < flo - tol || target > fhi + tol {
        return Err(Error::InvalidArgument(format!(
            "bisection target {target} outside range [{flo}, {fhi}]"
        )));
    }
    for _ in 0..max_iter {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if hi - lo > tol * 16.0 {
        return Err(Error::NonConvergent(format!(
            "bisection stalled on [{lo}, {hi}] after {max_iter} iterations"
        )));
    }
    Ok(0.5 * (lo + hi))
}

/// Cumulative integral `t ↦ ∫_a^t f(s) ds` cached on equal-width panels.
///
/// Panel boundary values are produced once by adaptive Simpson; evaluation
/// between boundaries adds a short fixed-rule tail, so lookups are cheap and
/// the cache is immutable after construction.
pub struct CachedIntegral<F> {
    a: f64,
    h: f64,
    cum: Vec<f64>,
    f: F,
}

impl<F: Fn(f64) -> f64> CachedIntegral<F> {
    pub fn build(f: F, a: f64, b: f64, panels: usize, panel_tol: f64) -> Result<Self> {
        debug_assert!(panels >= 1 && b > a);
        let h = (b - a) / panels as f64;
        let mut cum = Vec::with_capacity(panels + 1);
        cum.push(0.0);
        let mut acc = 0.0;
        for k in 0..panels {
            let lo = a + k as f64 * h;
            let hi = if k + 1 == panels { b } else { lo + h };
            acc += adaptive_simpson(&f, lo, hi, panel_tol, QUAD_MAX_INTERVALS)?;
            cum.push(acc);
        }
        Ok(Self { a, h, cum, f })
    }

    pub fn lower(&self) -> f64 {
        self.a
    }

    pub fn upper(&self) -> f64 {
        self.a + self.h * (self.cum.len() - 1) as f64
    }

    /// Value of the cumulative integral at `t` (clamped to the cached range).
    pub fn eval(&self, t: f64) -> f64 {
        let t = t.clamp(self.a, self.upper());
        let idx = (((t - self.a) / self.h) as usize).min(self.cum.len() - 2);
        let t0 = self.a + idx as f64 * self.h;
        if t == t0 {
            return self.cum[idx];
        }
        self.cum[idx] + composite_simpson(&self.f, t0, t, 8)
    }

    /// True when the cached node values are strictly increasing.
    pub fn strictly_increasing(&self) -> bool {
        self.cum.windows(2).all(|w| w[1] > w[0])
    }
}
