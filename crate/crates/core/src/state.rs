//! The Gaussian-coefficient state on the circle,
//!
//! ```text
//! ψ(θ) = Σ_n c(n) e^{inθ}/√(2π),   c(n) = (N/√λ) e^{−in θ̄} e^{−(n−l̄)²/(2λ)},
//! ```
//!
//! with `l̄ = l + ε`, and its three equivalent evaluation routes: the Fourier
//! sum, a ϑ₃ series with nome `e^{−1/(2λ)}` (fast for small λ) and the
//! Poisson-resummed ϑ₃ series with nome `e^{−2λπ²}` (fast for large λ).
//!
//! The normalization `N` is kept as `ln N`: for ε near ½ and tiny λ it
//! grows like `e^{ε²/(2λ)}` and overflows long before the coefficients do.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special_fn::{theta3_scaled, SeriesConfig, ThetaArg};

/// λ at which the two nomes `e^{−1/(2λ)}` and `e^{−2λπ²}` coincide.
pub const REPRESENTATION_SWITCH: f64 = 1.0 / (2.0 * PI);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateParams {
    pub lambda: f64,
    pub l: i64,
    pub eps: f64,
    pub theta_bar: f64,
}

impl StateParams {
    pub fn new(lambda: f64, l: i64, eps: f64, theta_bar: f64) -> Result<Self> {
        let p = Self {
            lambda,
            l,
            eps,
            theta_bar,
        };
        p.validate()?;
        Ok(p)
    }

    /// Parameters from the nome `q = e^{−1/(2λ)}`, i.e. `λ = −1/(2 ln q)`.
    pub fn from_nome(q: f64, l: i64, eps: f64, theta_bar: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::invalid("q", format!("must lie in (0, 1), got {q}")));
        }
        Self::new(lambda_from_nome(q), l, eps, theta_bar)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return Err(Error::invalid(
                "lambda",
                format!("must be positive and finite, got {}", self.lambda),
            ));
        }
        if !(0.0..1.0).contains(&self.eps) {
            return Err(Error::invalid("eps", format!("must lie in [0, 1), got {}", self.eps)));
        }
        if !(-PI..=PI).contains(&self.theta_bar) {
            return Err(Error::invalid(
                "theta_bar",
                format!("must lie in [-π, π], got {}", self.theta_bar),
            ));
        }
        Ok(())
    }

    pub fn l_bar(&self) -> f64 {
        self.l as f64 + self.eps
    }

    pub fn nome(&self) -> f64 {
        (-0.5 / self.lambda).exp()
    }
}

pub fn lambda_from_nome(q: f64) -> f64 {
    -1.0 / (2.0 * q.ln())
}

/// Reduces an angle into [−π, π).
pub fn reduce_angle(theta: f64) -> f64 {
    (theta + PI).rem_euclid(2.0 * PI) - PI
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Representation {
    /// Theta-function form below λ = 1/(2π), Poisson form above.
    #[default]
    Auto,
    Fourier,
    ThetaFn,
    Poisson,
}

/// A normalized state together with its coefficients on the truncation window.
#[derive(Debug, Clone)]
pub struct NormalizedState {
    params: StateParams,
    series: SeriesConfig,
    log_norm: f64,
    window_start: i64,
    /// `|c(n)|` for `n = window_start + k`.
    magnitudes: Vec<f64>,
}

/// Builds the normalized state. `N` does not depend on `l` or `θ̄`.
pub fn normalize(params: StateParams, cfg: &SeriesConfig) -> Result<NormalizedState> {
    NormalizedState::new(params, *cfg)
}

impl NormalizedState {
    pub fn new(params: StateParams, series: SeriesConfig) -> Result<Self> {
        params.validate()?;
        series.validate()?;
        let lambda = params.lambda;
        let log_sum = log_gaussian_lattice_sum(lambda, params.eps, &series)?;
        // N² = λ / Σ e^{−(n−ε)²/λ}
        let log_norm = 0.5 * (lambda.ln() - log_sum);

        let half_width = window_half_width(lambda, series.term_tolerance);
        let l_bar = params.l_bar();
        let window_start = (l_bar - half_width).floor() as i64;
        let window_end = (l_bar + half_width).ceil() as i64;
        let prefactor = log_norm - 0.5 * lambda.ln();
        let magnitudes = (window_start..=window_end)
            .map(|n| {
                let d = n as f64 - l_bar;
                (prefactor - d * d / (2.0 * lambda)).exp()
            })
            .collect();

        Ok(Self {
            params,
            series,
            log_norm,
            window_start,
            magnitudes,
        })
    }

    pub fn params(&self) -> &StateParams {
        &self.params
    }

    pub fn series_config(&self) -> &SeriesConfig {
        &self.series
    }

    pub fn lambda(&self) -> f64 {
        self.params.lambda
    }

    pub fn l_bar(&self) -> f64 {
        self.params.l_bar()
    }

    /// `q = e^{−1/(2λ)}`.
    pub fn q(&self) -> f64 {
        self.params.nome()
    }

    pub fn log_norm(&self) -> f64 {
        self.log_norm
    }

    /// `N`; may overflow to infinity for very small λ, see [`Self::log_norm`].
    pub fn norm(&self) -> f64 {
        self.log_norm.exp()
    }

    /// Inclusive range of `n` carrying non-negligible coefficients.
    pub fn window(&self) -> (i64, i64) {
        (self.window_start, self.window_start + self.magnitudes.len() as i64 - 1)
    }

    /// `c(n)` for any integer n.
    pub fn coeff(&self, n: i64) -> Complex64 {
        let phase = -(n as f64) * self.params.theta_bar;
        Complex64::from_polar(self.coeff_magnitude(n), phase)
    }

    /// `|c(n)|`.
    pub fn coeff_magnitude(&self, n: i64) -> f64 {
        let k = n - self.window_start;
        if k >= 0 && (k as usize) < self.magnitudes.len() {
            return self.magnitudes[k as usize];
        }
        let d = n as f64 - self.l_bar();
        (self.log_norm - 0.5 * self.lambda().ln() - d * d / (2.0 * self.lambda())).exp()
    }

    /// `|c(n)|²`.
    pub fn probability(&self, n: i64) -> f64 {
        let m = self.coeff_magnitude(n);
        m * m
    }

    /// `ln |c(n)|²`, finite even where `|c(n)|²` underflows.
    pub fn log_probability(&self, n: i64) -> f64 {
        let d = n as f64 - self.l_bar();
        2.0 * self.log_norm - self.lambda().ln() - d * d / self.lambda()
    }

    /// `(n, c(n))` over the truncation window.
    pub fn coefficients(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let (lo, hi) = self.window();
        (lo..=hi).map(move |n| (n, self.coeff(n)))
    }

    /// `ψ(θ)` by the requested route.
    pub fn psi(&self, theta: f64, rep: Representation) -> Result<Complex64> {
        let phi = reduce_angle(reduce_angle(theta) - self.params.theta_bar);
        match rep {
            Representation::Auto if self.lambda() < REPRESENTATION_SWITCH => self.psi_theta_fn(phi),
            Representation::Auto => self.psi_poisson(phi),
            Representation::Fourier => Ok(self.psi_fourier(phi)),
            Representation::ThetaFn => self.psi_theta_fn(phi),
            Representation::Poisson => self.psi_poisson(phi),
        }
    }

    fn psi_fourier(&self, phi: f64) -> Complex64 {
        let sum: Complex64 = self
            .magnitudes
            .iter()
            .enumerate()
            .map(|(k, &m)| Complex64::from_polar(m, (self.window_start + k as i64) as f64 * phi))
            .sum();
        sum / (2.0 * PI).sqrt()
    }

    // ψ = N/√(2πλ) e^{ilφ} e^{−ε²/(2λ)} ϑ₃(φ/2 − iε/(2λ), e^{−1/(2λ)})
    fn psi_theta_fn(&self, phi: f64) -> Result<Complex64> {
        let (lambda, eps) = (self.lambda(), self.params.eps);
        let arg = ThetaArg::from_log_nome(Complex64::new(0.5 * phi, -eps / (2.0 * lambda)), -0.5 / lambda)?;
        let log_scale = self.log_norm - 0.5 * (2.0 * PI * lambda).ln() - eps * eps / (2.0 * lambda);
        let theta = theta3_scaled(arg, log_scale, &self.series)?;
        Ok(Complex64::from_polar(1.0, self.params.l as f64 * phi) * theta)
    }

    // ψ = N e^{il̄φ} e^{−λφ²/2} ϑ₃(π(l̄ + iλφ), e^{−2λπ²}); the integer part of
    // l̄ drops out of the ϑ₃ argument by π-periodicity.
    fn psi_poisson(&self, phi: f64) -> Result<Complex64> {
        let (lambda, eps) = (self.lambda(), self.params.eps);
        let arg = ThetaArg::from_log_nome(Complex64::new(PI * eps, PI * lambda * phi), -2.0 * lambda * PI * PI)?;
        let log_scale = self.log_norm - 0.5 * lambda * phi * phi;
        let theta = theta3_scaled(arg, log_scale, &self.series)?;
        Ok(Complex64::from_polar(1.0, self.l_bar() * phi) * theta)
    }

    /// `|ψ(θ)|² = |ϑ₃(φ/2 − iε/(2λ), q)|² / (2π ϑ₃(−iε/λ, q²))` with `φ = θ − θ̄`.
    /// Independent of `l`.
    pub fn density(&self, theta: f64) -> Result<f64> {
        let phi = reduce_angle(reduce_angle(theta) - self.params.theta_bar);
        let (lambda, eps) = (self.lambda(), self.params.eps);
        // Scale both ϑ₃ so their largest term is O(1).
        let nearest = eps.min(1.0 - eps);
        let shift = (eps * eps - nearest * nearest) / (2.0 * lambda);
        let num_arg = ThetaArg::from_log_nome(Complex64::new(0.5 * phi, -eps / (2.0 * lambda)), -0.5 / lambda)?;
        let den_arg = ThetaArg::from_log_nome(Complex64::new(0.0, -eps / lambda), -1.0 / lambda)?;
        let num = theta3_scaled(num_arg, -shift, &self.series)?.norm_sqr();
        let den = theta3_scaled(den_arg, -2.0 * shift, &self.series)?.re;
        Ok(num / (2.0 * PI * den))
    }
}

/// Half-width K of the coefficient window, `ceil(√(2λ ln(1/tol))) + 5`.
fn window_half_width(lambda: f64, tol: f64) -> f64 {
    (2.0 * lambda * (1.0 / tol).ln()).sqrt().ceil() + 5.0
}

/// `ln Σ_n e^{−(n−ε)²/λ}`: direct sum below the switch, Poisson-resummed
/// `√(πλ) ϑ₃(−επ, e^{−λπ²})` above it.
fn log_gaussian_lattice_sum(lambda: f64, eps: f64, cfg: &SeriesConfig) -> Result<f64> {
    if lambda < REPRESENTATION_SWITCH {
        let k = window_half_width(lambda, cfg.term_tolerance) as i64;
        let nearest = eps.min(1.0 - eps);
        let base = nearest * nearest / lambda;
        let sum: f64 = (-k..=k + 1)
            .map(|n| {
                let d = n as f64 - eps;
                (base - d * d / lambda).exp()
            })
            .sum();
        Ok(sum.ln() - base)
    } else {
        let arg = ThetaArg::from_log_nome(Complex64::new(-eps * PI, 0.0), -lambda * PI * PI)?;
        let theta = theta3_scaled(arg, 0.0, cfg)?.re;
        Ok(0.5 * (PI * lambda).ln() + theta.ln())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn state(lambda: f64, l: i64, eps: f64, theta_bar: f64) -> NormalizedState {
        normalize(
            StateParams::new(lambda, l, eps, theta_bar).unwrap(),
            &SeriesConfig::default(),
        )
        .unwrap()
    }

    #[test]
    fn params_are_validated() {
        assert!(StateParams::new(0.0, 0, 0.0, 0.0).is_err());
        assert!(StateParams::new(-1.0, 0, 0.0, 0.0).is_err());
        assert!(StateParams::new(1.0, 0, 1.0, 0.0).is_err());
        assert!(StateParams::new(1.0, 0, -0.1, 0.0).is_err());
        assert!(StateParams::new(1.0, 0, 0.5, 3.5).is_err());
        assert!(StateParams::from_nome(1.0, 0, 0.0, 0.0).is_err());
        let p = StateParams::from_nome(0.5, 0, 0.0, 0.0).unwrap();
        assert_relative_eq!(p.nome(), 0.5, max_relative = 1e-15);
    }

    #[test]
    fn coefficients_are_normalized() {
        for &(lambda, eps) in &[(1e-3, 0.5), (0.05, 0.3), (0.5, 0.0), (5.0, 0.9), (100.0, 0.25)] {
            let s = state(lambda, 3, eps, 0.4);
            let total: f64 = s.coefficients().map(|(_, c)| c.norm_sqr()).sum();
            assert!((total - 1.0).abs() < 1e-12, "λ={lambda} ε={eps}: {total}");
        }
    }

    #[test]
    fn norm_small_and_large_lambda() {
        let s = state(1e-3, 0, 0.0, 0.0);
        assert_relative_eq!(s.norm().powi(2), 1e-3, max_relative = 1e-12);
        for eps in [0.0, 0.3, 0.7] {
            let s = state(100.0, 0, eps, 0.0);
            assert_relative_eq!(s.norm().powi(2), (100.0 / PI).sqrt(), max_relative = 1e-12);
        }
    }

    #[test]
    fn norm_independent_of_l() {
        for lambda in [0.01, 0.3, 4.0] {
            let a = state(lambda, 0, 0.35, 0.0);
            let b = state(lambda, 7, 0.35, 1.0);
            assert_relative_eq!(a.log_norm(), b.log_norm(), max_relative = 1e-14);
        }
    }

    #[test]
    fn limit_state_coefficients() {
        let s = state(1e-3, 4, 0.5, 0.0);
        assert_relative_eq!(s.probability(4), 0.5, max_relative = 1e-12);
        assert_relative_eq!(s.probability(5), 0.5, max_relative = 1e-12);
        for n in [1, 2, 3, 6, 7] {
            assert!(s.log_probability(n) < -100.0 * 10f64.ln());
        }
    }

    #[test]
    fn zero_phase_gives_positive_real_coefficients() {
        let s = state(0.7, -2, 0.2, 0.0);
        for (_, c) in s.coefficients() {
            assert!(c.re > 0.0 && c.im == 0.0);
        }
    }

    #[test]
    fn limit_state_psi() {
        let s = state(1e-3, 0, 0.5, 0.0);
        for rep in [Representation::Auto, Representation::Fourier, Representation::ThetaFn] {
            let v = s.psi(0.0, rep).unwrap();
            assert_relative_eq!(v.re, 1.0 / PI.sqrt(), max_relative = 1e-12);
        }
        for theta in [-3.0, -1.0, 0.2, 2.0] {
            let d = s.density(theta).unwrap();
            assert_relative_eq!(d, (1.0 + theta.cos()) / (2.0 * PI), max_relative = 1e-10);
        }
    }

    #[test]
    fn tiny_lambda_stays_finite() {
        let s = state(1e-4, 2, 0.5, 0.0);
        let v = s.psi(0.3, Representation::Auto).unwrap();
        let f = s.psi(0.3, Representation::Fourier).unwrap();
        assert!(v.re.is_finite());
        assert!((v - f).norm() < 1e-12);
        assert!((s.density(0.3).unwrap() - f.norm_sqr()).abs() < 1e-12);
    }

    #[test]
    fn representations_agree() {
        for lambda in [0.05, REPRESENTATION_SWITCH, 0.5, 5.0] {
            let s = state(lambda, 2, 0.3, 0.7);
            for i in 0..41 {
                let theta = -PI + 2.0 * PI * i as f64 / 40.0;
                let f = s.psi(theta, Representation::Fourier).unwrap();
                let t = s.psi(theta, Representation::ThetaFn).unwrap();
                let p = s.psi(theta, Representation::Poisson).unwrap();
                let scale = f.norm().max(1e-3);
                assert!((f - t).norm() < 1e-12 * scale.max(1.0), "λ={lambda} θ={theta}");
                assert!((f - p).norm() < 1e-12 * scale.max(1.0), "λ={lambda} θ={theta}");
                let d = s.density(theta).unwrap();
                assert!((d - f.norm_sqr()).abs() < 1e-12, "λ={lambda} θ={theta}");
            }
        }
    }

    #[test]
    fn angle_reduction() {
        assert_relative_eq!(reduce_angle(3.0 * PI / 2.0), -PI / 2.0, max_relative = 1e-15);
        assert_eq!(reduce_angle(PI), -PI);
        assert_eq!(reduce_angle(0.25), 0.25);
    }
}
