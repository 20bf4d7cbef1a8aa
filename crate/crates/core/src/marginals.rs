//! Marginal distributions of both Wigner functions.
//!
//! p-marginals are sinc series over `|c(n)|²`; θ-marginals come either in
//! closed form or, for integer p, as the Cesàro (Fejér) mean of partial sums
//! of point Wigner values.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_from, QuadratureConfig};
use crate::special_fn::sinc;
use crate::state::NormalizedState;
use crate::wigner::{wigner, Method, Variant};

/// `W[p] = Σ_n |c(n)|² sinc[2π(n−p)]`.
pub fn marginal_p_full(state: &NormalizedState, p: f64) -> f64 {
    sinc_series(state, p, 2.0 * PI)
}

/// `W_{1/2}[p] = Σ_n |c(n)|² sinc[π(n−p)]`.
pub fn marginal_p_half(state: &NormalizedState, p: f64) -> f64 {
    sinc_series(state, p, PI)
}

pub fn marginal_p(state: &NormalizedState, p: f64, variant: Variant) -> f64 {
    match variant {
        Variant::Full => marginal_p_full(state, p),
        Variant::Half => marginal_p_half(state, p),
    }
}

fn sinc_series(state: &NormalizedState, p: f64, scale: f64) -> f64 {
    let (lo, hi) = state.window();
    (lo..=hi)
        .map(|n| state.probability(n) * sinc(scale * (n as f64 - p)))
        .sum()
}

/// `W[θ] = (|ψ(θ)|² + |ψ(θ+π)|²)/2`, the integer-p sum of `W[θ,p]`.
pub fn marginal_theta_full(state: &NormalizedState, theta: f64) -> Result<f64> {
    Ok(0.5 * (state.density(theta)? + state.density(theta + PI)?))
}

/// `W_{1/2}[θ] = |ψ(θ)|²`.
pub fn marginal_theta_half(state: &NormalizedState, theta: f64) -> Result<f64> {
    state.density(theta)
}

pub fn marginal_theta(state: &NormalizedState, theta: f64, variant: Variant) -> Result<f64> {
    match variant {
        Variant::Full => marginal_theta_full(state, theta),
        Variant::Half => marginal_theta_half(state, theta),
    }
}

/// Cesàro mean `σ(M,θ) = (1/M) Σ_{k=0}^{M−1} σ_k(θ)` of the partial sums
/// `σ_k(θ) = Σ_{p=−k}^{k} W[θ,p]`, built from point Wigner values at
/// integer p.
pub fn cesaro_marginal_theta(state: &NormalizedState, theta: f64, m: usize, variant: Variant) -> Result<f64> {
    if m == 0 {
        return Err(Error::invalid("M", "Cesàro order must be at least 1"));
    }
    let cfg = QuadratureConfig::default();
    let point = |p: i64| -> Result<f64> { Ok(wigner(state, variant, theta, p as f64, Method::Series, &cfg)?.value) };

    let mut partial = point(0)?;
    let mut total = partial;
    for k in 1..m as i64 {
        partial += point(k)? + point(-k)?;
        total += partial;
    }
    Ok(total / m as f64)
}

/// Truncated p-integral of a p-marginal together with an estimate of the
/// part cut off.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizationEstimate {
    /// `∫ W[p] dp` over `|p − l| ≤ P`, by quadrature.
    pub truncated: f64,
    /// Leading-order contribution of `|p − l| > P` from the sinc envelope.
    pub tail: f64,
}

impl NormalizationEstimate {
    pub fn total(&self) -> f64 {
        self.truncated + self.tail
    }
}

/// `∫ W[p] dp` over `|p − l| ≤ p_cutoff` by composite quadrature; tends to
/// ½ (full) or 1 (half) as the cutoff grows.
pub fn marginal_p_normalization(state: &NormalizedState, variant: Variant, p_cutoff: f64) -> Result<f64> {
    marginal_p_normalization_estimate(state, variant, p_cutoff, &QuadratureConfig::default()).map(|e| e.truncated)
}

pub fn marginal_p_normalization_estimate(
    state: &NormalizedState,
    variant: Variant,
    p_cutoff: f64,
    cfg: &QuadratureConfig,
) -> Result<NormalizationEstimate> {
    if !(p_cutoff > 0.0) || !p_cutoff.is_finite() {
        return Err(Error::invalid(
            "p_cutoff",
            format!("must be positive and finite, got {p_cutoff}"),
        ));
    }
    let center = state.params().l as f64;
    let (a, b) = (center - p_cutoff, center + p_cutoff);
    // The integrand oscillates with unit period in p: start near one panel per unit.
    let initial = (2.0 * p_cutoff).ceil() as usize;
    let cfg = QuadratureConfig {
        max_panels: cfg.max_panels.max(8 * initial),
        ..*cfg
    };
    let truncated = integrate_from(|p| Ok(marginal_p(state, p, variant)), a, b, initial, &cfg)?;

    // ∫_X^∞ sin(kx)/(kx) dx ≈ cos(kX)/(k²X) for large X
    let k = match variant {
        Variant::Full => 2.0 * PI,
        Variant::Half => PI,
    };
    let tail_from = |x: f64| (k * x).cos() / (k * k * x);
    let (lo, hi) = state.window();
    let tail = (lo..=hi)
        .map(|n| {
            let n = n as f64;
            state.probability(n as i64) * (tail_from(b - n) + tail_from(n - a))
        })
        .sum();
    Ok(NormalizationEstimate { truncated, tail })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate;
    use crate::special_fn::SeriesConfig;
    use crate::state::{normalize, StateParams};
    use approx::assert_relative_eq;

    fn state(lambda: f64, l: i64, eps: f64, theta_bar: f64) -> NormalizedState {
        normalize(
            StateParams::new(lambda, l, eps, theta_bar).unwrap(),
            &SeriesConfig::default(),
        )
        .unwrap()
    }

    #[test]
    fn born_rule_at_integer_p() {
        let s = state(0.9, 4, 0.35, 0.5);
        let mut total = 0.0;
        for p in -2..=10 {
            let want = s.probability(p);
            assert!((marginal_p_full(&s, p as f64) - want).abs() < 1e-12);
            assert!((marginal_p_half(&s, p as f64) - want).abs() < 1e-12);
            total += marginal_p_full(&s, p as f64);
        }
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn limit_state_p_marginals() {
        let s = state(1e-3, 3, 0.5, 0.0);
        assert!(marginal_p_full(&s, 3.5).abs() < 1e-15);
        assert_relative_eq!(marginal_p_full(&s, 3.0), 0.5, max_relative = 1e-12);
        assert_relative_eq!(marginal_p_half(&s, 3.5), 2.0 / PI, max_relative = 1e-12);
        assert_relative_eq!(marginal_p_half(&s, 1.5), -2.0 / (15.0 * PI), max_relative = 1e-10);
    }

    #[test]
    fn limit_state_theta_marginals() {
        let s = state(1e-3, 0, 0.5, 0.0);
        for theta in [-3.0, -1.0, 0.0, 0.5, 2.5] {
            assert!((marginal_theta_full(&s, theta).unwrap() - 1.0 / (2.0 * PI)).abs() < 1e-12);
        }
        assert!((marginal_theta_half(&s, 0.0).unwrap() - 1.0 / PI).abs() < 1e-12);
    }

    #[test]
    fn theta_marginals_normalized_and_positive() {
        let cfg = QuadratureConfig::default();
        for &(lambda, eps) in &[(0.05, 0.5), (0.7, 0.2), (20.0, 0.9)] {
            let s = state(lambda, 1, eps, 0.0);
            for v in [Variant::Full, Variant::Half] {
                let total: f64 = integrate(|t| marginal_theta(&s, t, v), -PI, PI, &cfg).unwrap();
                assert!((total - 1.0).abs() < 1e-10, "λ={lambda} {v:?}: {total}");
                for i in 0..50 {
                    let t = -PI + 2.0 * PI * i as f64 / 49.0;
                    assert!(marginal_theta(&s, t, v).unwrap() >= 0.0);
                }
            }
        }
    }

    #[test]
    fn theta_marginal_periodic() {
        let s = state(0.4, 2, 0.6, 0.1);
        for t in [-2.5, 0.0, 1.1] {
            let a = marginal_theta_full(&s, t).unwrap();
            let b = marginal_theta_full(&s, t + 2.0 * PI).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn cesaro_first_term_is_single_wigner_value() {
        let s = state(0.5, 0, 0.3, 0.0);
        let cfg = QuadratureConfig::default();
        for theta in [-1.0, 0.0, 2.0] {
            let w = wigner(&s, Variant::Full, theta, 0.0, Method::Series, &cfg)
                .unwrap()
                .value;
            assert_eq!(cesaro_marginal_theta(&s, theta, 1, Variant::Full).unwrap(), w);
        }
        assert!(cesaro_marginal_theta(&s, 0.0, 0, Variant::Full).is_err());
    }

    #[test]
    fn cesaro_limit_state_rate() {
        let s = state(1e-3, 0, 0.5, 0.0);
        let target = 1.0 / (2.0 * PI);
        let e32 = (cesaro_marginal_theta(&s, 0.0, 32, Variant::Full).unwrap() - target).abs();
        let e64 = (cesaro_marginal_theta(&s, 0.0, 64, Variant::Full).unwrap() - target).abs();
        assert!(e32 > 0.0);
        assert!(e64 <= 0.5 * e32 * 1.2, "{e32} {e64}");
    }

    #[test]
    fn cesaro_half_converges_to_density() {
        let s = state(0.5, 0, 0.3, 0.0);
        for theta in [-2.0, 0.0, 1.0] {
            let target = s.density(theta).unwrap();
            let e16 = (cesaro_marginal_theta(&s, theta, 16, Variant::Half).unwrap() - target).abs();
            let e128 = (cesaro_marginal_theta(&s, theta, 128, Variant::Half).unwrap() - target).abs();
            assert!(e128 < e16, "θ={theta}: {e16} {e128}");
            assert!(e128 < 5e-3, "θ={theta}: {e128}");
        }
    }

    #[test]
    fn p_marginal_matches_theta_integral_of_wigner() {
        let s = state(0.6, 1, 0.25, 0.0);
        let cfg = QuadratureConfig::default();
        for &p in &[-0.7, 0.3, 0.5, 1.25, 2.9] {
            for v in [Variant::Full, Variant::Half] {
                let w: f64 = integrate(
                    |t| Ok(wigner(&s, v, t, p, Method::Quadrature, &cfg)?.value),
                    -PI,
                    PI,
                    &cfg,
                )
                .unwrap();
                assert!((w - marginal_p(&s, p, v)).abs() < 1e-8, "p={p} {v:?}");
            }
        }
    }

    #[test]
    fn p_normalization() {
        let s = state(1.0, 0, 0.3, 0.0);
        let cfg = QuadratureConfig::default();
        let full = marginal_p_normalization_estimate(&s, Variant::Full, 200.0, &cfg).unwrap();
        let half = marginal_p_normalization_estimate(&s, Variant::Half, 200.0, &cfg).unwrap();
        assert!((full.truncated - 0.5).abs() < 1e-2);
        assert!((half.truncated - 1.0).abs() < 2e-2);
        assert!((full.total() - 0.5).abs() < (full.truncated - 0.5).abs().max(1e-6));
        assert!((half.total() - 1.0).abs() < 1e-5, "{half:?}");
        let tiny = marginal_p_normalization(&s, Variant::Full, 1e-6).unwrap();
        assert!(tiny.abs() < 1e-5);
        assert!(marginal_p_normalization(&s, Variant::Full, 0.0).is_err());
    }
}
