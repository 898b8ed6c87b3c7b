//! The heat-ball exit law and its relatives.
//!
//! The normalized Brownian exit time of the φ_ε-domain is `W` on `(0, 1]`
//! with density
//!
//! ```text
//! f_W(t) = (−ln t)^(α−1) t^(1/β−1) / (Γ(α) β^α),    (α, β) = (3/2, 2),
//! ```
//!
//! a log-gamma law: `W = e^{−A}` with `A ~ Γ(3/2, 2)`. Exact samplers,
//! moments, the alternating-series/quadrature Laplace transform and its
//! closed-form decay bounds all live here. The unnormalized exit time is
//! `U₁ = e ε² W`, wrapped by [`ExitLaw`].

use alloc::format;

use crate::error::Error;
use crate::math::{exp, ln, powf, sqrt, tgamma, E, PI};
use crate::numerics::{adaptive_simpson, QUAD_MAX_INTERVALS, QUAD_TOL};
use crate::rng::RngStream;
use crate::Result;

/// Above this λ the alternating Laplace series loses too many digits to
/// cancellation and evaluation switches to quadrature.
pub const LAPLACE_SERIES_CROSSOVER: f64 = 30.0;

/// Samples below this are clamped so downstream logarithms stay finite.
pub const W_FLOOR: f64 = 1e-300;

/// Parameters `(α, β)` of a log-gamma law on `(0, 1]`, both at least 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogGammaSpec {
    alpha: f64,
    beta: f64,
}

impl LogGammaSpec {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha >= 1.0) || !(beta >= 1.0) || !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "log-gamma parameters need alpha >= 1 and beta >= 1, got ({alpha}, {beta})"
            )));
        }
        Ok(Self { alpha, beta })
    }

    /// The `(3/2, 2)` law of the normalized heat-ball exit time.
    pub fn brownian_exit() -> Self {
        Self {
            alpha: 1.5,
            beta: 2.0,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    fn norm_const(&self) -> f64 {
        1.0 / (tgamma(self.alpha) * powf(self.beta, self.alpha))
    }

    /// Upper endpoint for integrals in the substituted variable `w` where
    /// `t = e^{−w²}`; beyond it the integrand is below ~1e-16 of the mass.
    fn w_cutoff(&self) -> f64 {
        sqrt(45.0 * self.beta)
    }

    /// Density `f_W(t)`; zero outside `(0, 1]`.
    pub fn pdf(&self, t: f64) -> f64 {
        if t <= 0.0 || t > 1.0 {
            return 0.0;
        }
        let v = self.norm_const() * powf(-ln(t), self.alpha - 1.0) * powf(t, 1.0 / self.beta - 1.0);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    }

    /// `E[W^k] = (1 + kβ)^{−α}` for integer `k ≥ 1`.
    pub fn moment(&self, k: u32) -> Result<f64> {
        if k < 1 {
            return Err(Error::InvalidArgument(
                "moment order must be at least 1".into(),
            ));
        }
        Ok(powf(1.0 + k as f64 * self.beta, -self.alpha))
    }

    /// `P(W ≤ x)` by adaptive quadrature of the density.
    ///
    /// The substitution `t = e^{−w²}` removes both endpoint singularities:
    /// the density transforms to `2 w^{2α−1} e^{−w²/β} / (Γ(α) β^α)`.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        if x <= 0.0 {
            return Ok(0.0);
        }
        if x >= 1.0 {
            return Ok(1.0);
        }
        let w0 = sqrt(-ln(x));
        let w1 = self.w_cutoff();
        if w0 >= w1 {
            return Ok(0.0);
        }
        let c2 = 2.0 * self.norm_const();
        let p = 2.0 * self.alpha - 1.0;
        let binv = 1.0 / self.beta;
        let integrand = move |w: f64| c2 * powf(w, p) * exp(-w * w * binv);
        adaptive_simpson(&integrand, w0, w1, QUAD_TOL, QUAD_MAX_INTERVALS)
            .map(|v| v.clamp(0.0, 1.0))
    }

    /// `E[e^{−λW}]` to absolute truncation tolerance `tol`.
    ///
    /// Uses the alternating series `Σ (−1)^k λ^k / (k! (1+kβ)^α)` for
    /// λ ≤ [`LAPLACE_SERIES_CROSSOVER`] and quadrature of `e^{−λt} f_W(t)`
    /// above it; a series that fails to converge falls back to quadrature.
    pub fn laplace(&self, lambda: f64, tol: f64) -> Result<f64> {
        if lambda < 0.0 || !lambda.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "laplace transform needs lambda >= 0, got {lambda}"
            )));
        }
        if lambda == 0.0 {
            return Ok(1.0);
        }
        if lambda <= LAPLACE_SERIES_CROSSOVER {
            if let Some(v) = self.laplace_series(lambda, tol) {
                return Ok(v);
            }
        }
        self.laplace_quadrature(lambda)
    }

    fn laplace_series(&self, lambda: f64, tol: f64) -> Option<f64> {
        const MAX_TERMS: u32 = 500;
        let mut term = 1.0f64;
        let mut sum = 1.0f64;
        for k in 0..MAX_TERMS {
            let kf = k as f64;
            let ratio = lambda / (kf + 1.0)
                * powf((1.0 + kf * self.beta) / (1.0 + (kf + 1.0) * self.beta), self.alpha);
            term *= ratio;
            let signed = if k % 2 == 0 { -term } else { term };
            sum += signed;
            if term < tol && kf + 1.0 > lambda {
                return Some(sum.clamp(0.0, 1.0));
            }
        }
        None
    }

    fn laplace_quadrature(&self, lambda: f64) -> Result<f64> {
        let c2 = 2.0 * self.norm_const();
        let p = 2.0 * self.alpha - 1.0;
        let binv = 1.0 / self.beta;
        let integrand =
            move |w: f64| c2 * powf(w, p) * exp(-w * w * binv) * exp(-lambda * exp(-w * w));
        adaptive_simpson(&integrand, 0.0, self.w_cutoff(), QUAD_TOL, QUAD_MAX_INTERVALS)
            .map(|v| v.clamp(0.0, 1.0))
    }

    /// Closed-form decay bound `E[e^{−λW}] ≤ bound(λ)`: `ω(α,β,β′) λ^{−1/β′}`
    /// when α > 1, and `Γ(1/β) / (β λ^{1/β})` when α = 1.
    pub fn laplace_upper_bound(&self, lambda: f64, beta_prime: f64) -> Result<f64> {
        if self.alpha == 1.0 {
            Ok(laplace_bound_alpha1(self.beta) * powf(lambda, -1.0 / self.beta))
        } else {
            let omega = laplace_bound_omega(self.alpha, self.beta, beta_prime)?;
            Ok(omega * powf(lambda, -1.0 / beta_prime))
        }
    }
}

/// The constant `ω(α, β, β′)` in the Laplace decay bound for α > 1:
///
/// ```text
/// ω = (α−1)^{α−1} Γ(1/β′) / (Γ(α) β^α e^{α−1} (β^{−1} − β′^{−1})^{α−1})
/// ```
pub fn laplace_bound_omega(alpha: f64, beta: f64, beta_prime: f64) -> Result<f64> {
    if !(alpha > 1.0) {
        return Err(Error::InvalidArgument(format!(
            "omega constant requires alpha > 1, got {alpha}; use the alpha = 1 companion bound"
        )));
    }
    if !(beta_prime > beta) {
        return Err(Error::InvalidArgument(format!(
            "omega constant requires beta' > beta, got beta'={beta_prime}, beta={beta}"
        )));
    }
    let am1 = alpha - 1.0;
    let num = powf(am1, am1) * tgamma(1.0 / beta_prime);
    let den = tgamma(alpha) * powf(beta, alpha) * exp(am1) * powf(1.0 / beta - 1.0 / beta_prime, am1);
    Ok(num / den)
}

/// Coefficient of the α = 1 companion bound `E[e^{−λW}] ≤ Γ(1/β)/(β λ^{1/β})`.
pub fn laplace_bound_alpha1(beta: f64) -> f64 {
    tgamma(1.0 / beta) / beta
}

/// The law of the raw exit time `U₁ = e ε² W` of the φ_ε-domain.
#[derive(Clone, Copy, Debug)]
pub struct ExitLaw {
    epsilon: f64,
    r_eps: f64,
}

impl ExitLaw {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "exit law needs epsilon > 0, got {epsilon}"
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

    /// Density `f_{U₁}(t) = sqrt(ln(ε² e / t)) / (ε sqrt(2 e π t))` on
    /// `(0, r_ε)`, zero outside.
    pub fn density(&self, t: f64) -> f64 {
        if t <= 0.0 || t >= self.r_eps {
            return 0.0;
        }
        let lg = ln(self.epsilon * self.epsilon * E / t).max(0.0);
        sqrt(lg) / (self.epsilon * sqrt(2.0 * E * PI * t))
    }

    /// `P(U₁ ≤ t)`, i.e. the `(3/2, 2)` log-gamma CDF at `t / (e ε²)`.
    pub fn cdf(&self, t: f64) -> Result<f64> {
        LogGammaSpec::brownian_exit().cdf(t / self.r_eps)
    }
}

/// Deterministic map behind [`sample_w`]: `W = u² e^{−g²}`, clamped to
/// `[`[`W_FLOOR`]`, 1]`.
pub fn w_from_uniform_normal(u: f64, g: f64) -> f64 {
    (u * u * exp(-g * g)).clamp(W_FLOOR, 1.0)
}

/// Draws `W = U² e^{−G²}` (U uniform, G standard normal), the normalized
/// heat-ball exit time.
pub fn sample_w(stream: &mut RngStream) -> f64 {
    let u = stream.uniform();
    let g = stream.standard_normal();
    w_from_uniform_normal(u, g)
}

/// Deterministic map behind [`sample_gamma32`]: `A = −2 ln u + g²`.
pub fn gamma32_from_uniform_normal(u: f64, g: f64) -> f64 {
    -2.0 * ln(u) + g * g
}

/// Draws `A ~ Γ(3/2, 2)` as `−2 ln U + G²`, i.e. `Γ(1,2) + Γ(1/2,2)`.
///
/// On a shared stream this is pathwise consistent with [`sample_w`]:
/// `W = e^{−A}` up to floating-point rounding.
pub fn sample_gamma32(stream: &mut RngStream) -> f64 {
    let u = stream.uniform();
    let g = stream.standard_normal();
    gamma32_from_uniform_normal(u, g)
}

/// ±1 with probability 1/2 each.
pub fn sample_rademacher(stream: &mut RngStream) -> i8 {
    stream.rademacher()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn spec_requires_unit_lower_bounds() {
        assert!(LogGammaSpec::new(0.9, 2.0).is_err());
        assert!(LogGammaSpec::new(1.5, 0.5).is_err());
        assert!(LogGammaSpec::new(1.0, 1.0).is_ok());
    }

    #[test]
    fn pdf_edge_values() {
        let w = LogGammaSpec::brownian_exit();
        assert_eq!(w.pdf(1.0), 0.0); // (−ln 1)^{1/2} = 0
        assert_eq!(w.pdf(0.0), 0.0);
        assert_eq!(w.pdf(-0.3), 0.0);
        assert_eq!(w.pdf(1.7), 0.0);
        let uniform = LogGammaSpec::new(1.0, 1.0).unwrap();
        assert_relative_eq!(uniform.pdf(0.5), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn moments_match_closed_form() {
        let w = LogGammaSpec::brownian_exit();
        assert_relative_eq!(w.moment(1).unwrap(), powf(3.0, -1.5), epsilon = 1e-15);
        assert_relative_eq!(w.moment(2).unwrap(), powf(5.0, -1.5), epsilon = 1e-15);
        let uniform = LogGammaSpec::new(1.0, 1.0).unwrap();
        assert_relative_eq!(uniform.moment(1).unwrap(), 0.5, epsilon = 1e-15);
        assert!(w.moment(0).is_err());
    }

    #[test]
    fn forced_inputs_give_identity_sample() {
        assert_eq!(w_from_uniform_normal(1.0, 0.0), 1.0);
        let w = w_from_uniform_normal(1e-200, 30.0);
        assert!(w >= W_FLOOR);
    }

    #[test]
    fn laplace_at_zero_is_total_mass() {
        let w = LogGammaSpec::brownian_exit();
        assert_eq!(w.laplace(0.0, 1e-12).unwrap(), 1.0);
    }

    #[test]
    fn laplace_matches_high_precision_reference() {
        // Reference values computed with 30-digit arithmetic.
        let w = LogGammaSpec::brownian_exit();
        assert_relative_eq!(
            w.laplace(1.0, 1e-12).unwrap(),
            0.844613447200901500,
            epsilon = 1e-11
        );
        assert_relative_eq!(
            w.laplace(100.0, 1e-12).unwrap(),
            0.178945554730274980,
            epsilon = 1e-9
        );
    }

    #[test]
    fn series_and_quadrature_agree_near_crossover() {
        let w = LogGammaSpec::brownian_exit();
        for &lambda in &[5.0, 15.0, 25.0, 30.0] {
            let s = w.laplace_series(lambda, 1e-12).unwrap();
            let q = w.laplace_quadrature(lambda).unwrap();
            assert!((s - q).abs() < 2e-7, "lambda={lambda}: series {s} vs quad {q}");
        }
    }

    #[test]
    fn omega_constant_matches_lanczos_oracle() {
        // Independent route: Lanczos ln-gamma instead of libm's tgamma.
        fn ln_gamma_lanczos(x: f64) -> f64 {
            let coef = [
                76.18009172947146,
                -86.50532032941677,
                24.01409824083091,
                -1.231739572450155,
                0.1208650973866179e-2,
                -0.5395239384953e-5,
            ];
            let tmp = x + 5.5;
            let mut a = 1.000000000190015;
            let mut denom = x;
            for c in coef {
                denom += 1.0;
                a += c / denom;
            }
            (x + 0.5) * tmp.ln() - tmp + (2.5066282746310005 * a / x).ln()
        }
        let (alpha, beta, bp) = (1.5f64, 2.0f64, 4.0f64);
        let oracle = ((alpha - 1.0).powf(alpha - 1.0) * ln_gamma_lanczos(1.0 / bp).exp())
            / (ln_gamma_lanczos(alpha).exp()
                * beta.powf(alpha)
                * (alpha - 1.0).exp()
                * (1.0 / beta - 1.0 / bp).powf(alpha - 1.0));
        let omega = laplace_bound_omega(alpha, beta, bp).unwrap();
        assert_relative_eq!(omega, oracle, epsilon = 1e-10);
        assert_relative_eq!(omega, 1.2406774756764702, epsilon = 1e-12);
    }

    #[test]
    fn omega_rejects_bad_parameters() {
        assert!(laplace_bound_omega(1.0, 2.0, 4.0).is_err());
        assert!(laplace_bound_omega(1.5, 2.0, 2.0).is_err());
    }

    #[test]
    fn alpha1_bound_is_gamma_over_beta() {
        // Γ(1/2)/2 = sqrt(pi)/2.
        assert_relative_eq!(
            laplace_bound_alpha1(2.0),
            sqrt(PI) / 2.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn exit_law_support() {
        let law = ExitLaw::new(0.1).unwrap();
        assert_relative_eq!(law.r_eps(), E * 0.01, epsilon = 1e-16);
        assert_eq!(law.cdf(0.0).unwrap(), 0.0);
        assert_eq!(law.cdf(-1.0).unwrap(), 0.0);
        assert_eq!(law.cdf(law.r_eps()).unwrap(), 1.0);
        assert_eq!(law.density(-0.1), 0.0);
        assert_eq!(law.density(law.r_eps() + 1e-9), 0.0);
        assert!(law.density(0.5 * law.r_eps()) > 0.0);
    }

    #[test]
    fn exit_cdf_is_nondecreasing_on_grid() {
        let law = ExitLaw::new(0.1).unwrap();
        let mut prev = -1.0;
        for k in 0..=1000 {
            let t = law.r_eps() * k as f64 / 1000.0;
            let v = law.cdf(t).unwrap();
            assert!(v >= prev - 1e-12, "cdf decreased at t={t}");
            prev = v;
        }
    }

    #[test]
    fn gamma_and_w_samplers_are_pathwise_consistent() {
        let mut a = RngStream::new(11, 0);
        let mut b = RngStream::new(11, 0);
        for _ in 0..1000 {
            let w = sample_w(&mut a);
            let g = sample_gamma32(&mut b);
            assert_relative_eq!(w, exp(-g), epsilon = 1e-12);
        }
    }
}
