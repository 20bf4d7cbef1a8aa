//! Jacobi ϑ₃, its z-derivatives, the unnormalized sinc function and the
//! Dirichlet/Fejér kernels.
//!
//! ϑ₃ is defined by the lattice sum
//!
//! ```text
//! ϑ₃(z, q) = Σ_{n∈ℤ} q^{n²} e^{2inz},   0 ≤ q < 1
//! ```
//!
//! Terms are formed in log space, `n² ln q − 2n Im(z) + log_scale`, so very
//! small nomes and large imaginary arguments (both show up for λ → 0) stay
//! representable. The caller can fold an overall factor `e^{log_scale}` into
//! every term with [`theta3_scaled`] when ϑ₃ itself would overflow.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Truncation policy for the lattice sums.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesConfig {
    /// Stop once a symmetric pair of terms is below this fraction of the
    /// accumulated term magnitude.
    pub term_tolerance: f64,
    pub max_terms: usize,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        Self {
            term_tolerance: 1e-16,
            max_terms: 10_000,
        }
    }
}

impl SeriesConfig {
    pub fn new(term_tolerance: f64, max_terms: usize) -> Result<Self> {
        let cfg = Self {
            term_tolerance,
            max_terms,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.term_tolerance > 0.0) || !self.term_tolerance.is_finite() {
            return Err(Error::invalid(
                "term_tolerance",
                format!("must be positive and finite, got {}", self.term_tolerance),
            ));
        }
        if self.max_terms == 0 {
            return Err(Error::invalid("max_terms", "must be at least 1"));
        }
        Ok(())
    }
}

/// Argument pair `(z, q)` of ϑ₃.
///
/// The nome is stored as `ln q` so that nomes like `e^{-1/(2λ)}` with
/// λ ~ 1e-4 do not underflow to zero. `ln q = -∞` encodes `q = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaArg {
    z: Complex64,
    log_nome: f64,
}

impl ThetaArg {
    pub fn new(z: Complex64, q: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&q) {
            return Err(Error::domain("theta3", format!("nome must lie in [0, 1), got {q}")));
        }
        Self::from_log_nome(z, q.ln())
    }

    /// Builds the argument from `ln q`, which must be negative (or `-∞`).
    pub fn from_log_nome(z: Complex64, log_nome: f64) -> Result<Self> {
        if !(log_nome < 0.0) || log_nome.is_nan() {
            return Err(Error::domain(
                "theta3",
                format!("log-nome must be negative, got {log_nome}"),
            ));
        }
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::domain("theta3", format!("argument must be finite, got {z}")));
        }
        Ok(Self { z, log_nome })
    }

    pub fn real(x: f64, q: f64) -> Result<Self> {
        Self::new(Complex64::new(x, 0.0), q)
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn nome(&self) -> f64 {
        self.log_nome.exp()
    }

    pub fn log_nome(&self) -> f64 {
        self.log_nome
    }
}

/// `ϑ₃(z, q) = Σ q^{n²} e^{2inz}`.
pub fn theta3(arg: ThetaArg, cfg: &SeriesConfig) -> Result<Complex64> {
    lattice_sum(arg, 0, 0.0, cfg)
}

/// `e^{log_scale} · ϑ₃(z, q)`, with the scale applied term by term.
pub fn theta3_scaled(arg: ThetaArg, log_scale: f64, cfg: &SeriesConfig) -> Result<Complex64> {
    lattice_sum(arg, 0, log_scale, cfg)
}

/// `∂ᵏϑ₃/∂zᵏ` for `k ∈ {1, 2}`, i.e. the series with each term multiplied by `(2in)ᵏ`.
pub fn theta3_dz(arg: ThetaArg, order: u32, cfg: &SeriesConfig) -> Result<Complex64> {
    if !(1..=2).contains(&order) {
        return Err(Error::invalid(
            "order",
            format!("derivative order must be 1 or 2, got {order}"),
        ));
    }
    lattice_sum(arg, order, 0.0, cfg)
}

fn lattice_sum(arg: ThetaArg, order: u32, log_scale: f64, cfg: &SeriesConfig) -> Result<Complex64> {
    cfg.validate()?;
    let ThetaArg { z, log_nome } = arg;
    let (x, y) = (z.re, z.im);

    // (2in)^order = (2|n|)^order · (±i)^order
    let term = |n: i64| -> Complex64 {
        if n == 0 {
            return if order == 0 {
                Complex64::new(log_scale.exp(), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
        }
        let nf = n as f64;
        let mut log_mag = nf * nf * log_nome - 2.0 * nf * y + log_scale;
        if order > 0 {
            log_mag += order as f64 * (2.0 * nf.abs()).ln();
        }
        let mut phase = 2.0 * nf * x;
        if order > 0 {
            phase += order as f64 * nf.signum() * std::f64::consts::FRAC_PI_2;
        }
        Complex64::from_polar(log_mag.exp(), phase)
    };

    if log_nome == f64::NEG_INFINITY {
        return Ok(term(0));
    }

    // Beyond |n| > peak the log-magnitude is decreasing on both sides.
    let peak = y.abs() / (-log_nome) + order as f64;
    let mut sum = term(0);
    let mut acc = sum.norm();
    for n in 1..=cfg.max_terms as i64 {
        let (up, down) = (term(n), term(-n));
        let mag = up.norm() + down.norm();
        sum += up + down;
        acc += mag;
        if n as f64 > peak && mag <= cfg.term_tolerance * acc {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence {
        what: "theta3 series",
        work: cfg.max_terms,
        unit: "terms",
    })
}

/// Unnormalized cardinal sine, `sin(x)/x` with `sinc(0) = 1`.
///
/// The unnormalized convention is the one under which the integer-p
/// marginals reproduce `|c(p)|²`: `sinc(2πk) = 0` for every nonzero integer k.
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

const KERNEL_SINGULARITY: f64 = 1e-9;

/// Periodic Dirichlet kernel `sin((n+½)θ) / sin(θ/2)`.
pub fn dirichlet_kernel(n: u32, theta: f64) -> f64 {
    let s = (0.5 * theta).sin();
    if s.abs() < KERNEL_SINGULARITY {
        return 2.0 * n as f64 + 1.0;
    }
    ((n as f64 + 0.5) * theta).sin() / s
}

/// Fejér kernel `sin²(Mθ/2) / (M sin²(θ/2))`, the Cesàro mean of
/// `D(0, θ), …, D(M−1, θ)`. Nonnegative; `M = 0` is treated as `M = 1`.
pub fn fejer_kernel(m: u32, theta: f64) -> f64 {
    let m = m.max(1) as f64;
    let s = (0.5 * theta).sin();
    if s.abs() < KERNEL_SINGULARITY {
        return m;
    }
    let num = (0.5 * m * theta).sin();
    num * num / (m * s * s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    // Independent partial-sum oracle: straight loop, no log space.
    fn oracle(z: Complex64, q: f64, order: i32, terms: i64) -> Complex64 {
        (-terms..=terms)
            .map(|n| {
                let f = Complex64::new(0.0, 2.0 * n as f64).powi(order);
                f * q.powi((n * n) as i32) * (Complex64::i() * 2.0 * n as f64 * z).exp()
            })
            .sum()
    }

    #[test]
    fn zero_nome_keeps_only_central_term() {
        let cfg = SeriesConfig::default();
        let v = theta3(ThetaArg::new(c(0.7, -3.0), 0.0).unwrap(), &cfg).unwrap();
        assert_eq!(v, c(1.0, 0.0));
    }

    #[test]
    fn small_nome_values() {
        let cfg = SeriesConfig::default();
        let v = theta3(ThetaArg::real(0.0, 0.1).unwrap(), &cfg).unwrap();
        let want = oracle(c(0.0, 0.0), 0.1, 0, 10);
        assert_relative_eq!(v.re, want.re, max_relative = 1e-15);
        assert_relative_eq!(v.re, 1.200200002, max_relative = 1e-15);

        let v = theta3(ThetaArg::real(PI / 2.0, 0.1).unwrap(), &cfg).unwrap();
        let alt: f64 = (-10i64..=10)
            .map(|n| (-1f64).powi(n as i32) * 0.1f64.powi((n * n) as i32))
            .sum();
        assert_relative_eq!(v.re, alt, max_relative = 1e-14);
        assert_relative_eq!(v.re, 0.8001999980000002, max_relative = 1e-14);
        assert!(v.im.abs() < 1e-15);
    }

    #[test]
    fn derivative_values() {
        let cfg = SeriesConfig::default();
        let a = ThetaArg::real(0.0, 0.3).unwrap();
        assert!(theta3_dz(a, 1, &cfg).unwrap().norm() < 1e-15);

        let a = ThetaArg::real(0.0, 0.1).unwrap();
        let v = theta3_dz(a, 2, &cfg).unwrap();
        let want = oracle(c(0.0, 0.0), 0.1, 2, 10);
        assert_relative_eq!(v.re, want.re, max_relative = 1e-14);
        assert_relative_eq!(v.re, -0.8032000720000128, max_relative = 1e-14);
    }

    #[test]
    fn derivative_matches_central_difference() {
        let cfg = SeriesConfig::default();
        let h = 1e-5;
        for &(z, q) in &[(c(0.3, 0.1), 0.4), (c(-1.1, -0.2), 0.7), (c(2.0, 0.0), 0.2)] {
            let at = |z: Complex64| theta3(ThetaArg::new(z, q).unwrap(), &cfg).unwrap();
            let d1 = theta3_dz(ThetaArg::new(z, q).unwrap(), 1, &cfg).unwrap();
            let fd1 = (at(z + h) - at(z - h)) / (2.0 * h);
            assert!((d1 - fd1).norm() < 1e-8, "{d1} vs {fd1}");
            let d2 = theta3_dz(ThetaArg::new(z, q).unwrap(), 2, &cfg).unwrap();
            let fd2 = (at(z + 1e-3) - 2.0 * at(z) + at(z - 1e-3)) / 1e-6;
            assert!((d2 - fd2).norm() < 1e-5 * d2.norm().max(1.0), "{d2} vs {fd2}");
        }
    }

    #[test]
    fn derivative_order_is_checked() {
        let a = ThetaArg::real(0.0, 0.5).unwrap();
        assert!(theta3_dz(a, 3, &SeriesConfig::default()).is_err());
        assert!(theta3_dz(a, 0, &SeriesConfig::default()).is_err());
    }

    #[test]
    fn invalid_arguments_rejected() {
        assert!(ThetaArg::real(0.0, 1.0).is_err());
        assert!(ThetaArg::real(0.0, -0.1).is_err());
        assert!(ThetaArg::new(c(f64::NAN, 0.0), 0.5).is_err());
        assert!(ThetaArg::from_log_nome(c(0.0, 0.0), 0.0).is_err());
        assert!(SeriesConfig::new(0.0, 10).is_err());
        assert!(SeriesConfig::new(1e-16, 0).is_err());
    }

    #[test]
    fn work_limit_reports_non_convergence() {
        let cfg = SeriesConfig::new(1e-16, 3).unwrap();
        let r = theta3(ThetaArg::real(0.0, 0.99).unwrap(), &cfg);
        assert!(matches!(r, Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn large_imaginary_argument_sums_past_peak() {
        // ϑ₃(-iy, q) with y = 10, q = e^{-1}: terms peak near n = 10.
        let cfg = SeriesConfig::default();
        let a = ThetaArg::from_log_nome(c(0.0, -10.0), -1.0).unwrap();
        let v = theta3(a, &cfg).unwrap();
        let want: f64 = (-60i64..=60).map(|n| (-(n * n) as f64 + 20.0 * n as f64).exp()).sum();
        assert_relative_eq!(v.re, want, max_relative = 1e-14);
    }

    #[test]
    fn scaled_matches_unscaled() {
        let cfg = SeriesConfig::default();
        let a = ThetaArg::new(c(0.4, 0.3), 0.6).unwrap();
        let v = theta3(a, &cfg).unwrap();
        let s = theta3_scaled(a, -5.0, &cfg).unwrap();
        assert_relative_eq!(s.re, v.re * (-5f64).exp(), max_relative = 1e-14);
        assert_relative_eq!(s.im, v.im * (-5f64).exp(), max_relative = 1e-13);
    }

    #[test]
    fn sinc_values() {
        assert_eq!(sinc(0.0), 1.0);
        assert!(sinc(PI).abs() < 1e-16);
        assert_relative_eq!(sinc(PI / 2.0), 2.0 / PI, max_relative = 1e-15);
        for k in 1..20 {
            assert!(sinc(2.0 * PI * k as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn kernel_limits() {
        for n in 0..10 {
            assert_eq!(dirichlet_kernel(n, 0.0), 2.0 * n as f64 + 1.0);
            assert_eq!(dirichlet_kernel(n, 2.0 * PI), 2.0 * n as f64 + 1.0);
        }
        for theta in [-3.0, -0.1, 0.5, 2.9] {
            assert_relative_eq!(dirichlet_kernel(0, theta), 1.0, max_relative = 1e-15);
        }
        for m in 1..10 {
            assert_eq!(fejer_kernel(m, 0.0), m as f64);
        }
    }

    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(a + i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn kernels_have_unit_mean() {
        for n in [0, 1, 5, 17] {
            let v = simpson(|t| dirichlet_kernel(n, t), -PI, PI, 4000) / (2.0 * PI);
            assert!((v - 1.0).abs() < 1e-9, "D({n}): {v}");
        }
        for m in [1, 2, 8, 33] {
            let v = simpson(|t| fejer_kernel(m, t), -PI, PI, 4000) / (2.0 * PI);
            assert!((v - 1.0).abs() < 1e-9, "F({m}): {v}");
        }
    }

    #[test]
    fn fejer_is_cesaro_mean_of_dirichlet() {
        for m in 1..=50u32 {
            for theta in [-3.1, -1.0, 0.0, 1e-10, 0.37, 2.5, 6.0] {
                let mean: f64 = (0..m).map(|k| dirichlet_kernel(k, theta)).sum::<f64>() / m as f64;
                let f = fejer_kernel(m, theta);
                assert!((f - mean).abs() < 1e-12, "M={m} θ={theta}: {f} vs {mean}");
            }
        }
    }
}
