//! Angular-momentum and angle uncertainties, their asymptotic forms and the
//! (ΔL, Δθ) uncertainty curve.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::marginals::marginal_theta;
use crate::quadrature::{integrate, QuadratureConfig};
use crate::special_fn::SeriesConfig;
use crate::state::{normalize, NormalizedState, StateParams};
use crate::wigner::Variant;

/// `⟨L⟩ = l + Σ_n n |c(n+l)|²`.
pub fn mean_l(state: &NormalizedState) -> f64 {
    let l = state.params().l;
    let (lo, hi) = state.window();
    let shifted: f64 = (lo..=hi).map(|n| (n - l) as f64 * state.probability(n)).sum();
    l as f64 + shifted
}

/// `⟨L²⟩ = l² + Σ_n n(n+2l) |c(n+l)|²`.
pub fn mean_l2(state: &NormalizedState) -> f64 {
    let l = state.params().l;
    let (lo, hi) = state.window();
    let shifted: f64 = (lo..=hi)
        .map(|n| {
            let k = (n - l) as f64;
            k * (k + 2.0 * l as f64) * state.probability(n)
        })
        .sum();
    (l * l) as f64 + shifted
}

/// `ln (ΔL)²`.
///
/// Uses `(ΔL)² = ½ Σ_{n,m} |c(n)|²|c(m)|² (n−m)²`, a sum of positive terms,
/// accumulated with log-sum-exp. It stays finite where the variance itself
/// underflows (ε away from ½ and tiny λ).
pub fn ln_var_l(state: &NormalizedState) -> f64 {
    let (lo, hi) = state.window();
    let logs: Vec<f64> = (lo..=hi).map(|n| state.log_probability(n)).collect();
    let mut terms = Vec::with_capacity(logs.len() * logs.len() / 2);
    for i in 0..logs.len() {
        for j in i + 1..logs.len() {
            terms.push(logs[i] + logs[j] + 2.0 * ((j - i) as f64).ln());
        }
    }
    log_sum_exp(&terms)
}

/// `(ΔL)² = ⟨L²⟩ − ⟨L⟩²`; depends on ε and λ only.
pub fn var_l(state: &NormalizedState) -> f64 {
    ln_var_l(state).exp()
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Large-λ form of (ΔL)² and the band it implies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticVariance {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
}

/// `λ/2 − 2π²λ² e^{−π²λ} cos(2πε)`, with band `λ/2 ± 2π²λ² e^{−π²λ}`.
/// Defined for λ ≥ 1.
pub fn var_l_asymptotic(lambda: f64, eps: f64) -> Result<AsymptoticVariance> {
    if !(lambda >= 1.0) {
        return Err(Error::domain(
            "var_l_asymptotic",
            format!("large-λ form needs λ ≥ 1, got {lambda}"),
        ));
    }
    let amplitude = 2.0 * PI * PI * lambda * lambda * (-PI * PI * lambda).exp();
    Ok(AsymptoticVariance {
        value: 0.5 * lambda - amplitude * (2.0 * PI * eps).cos(),
        lower: 0.5 * lambda - amplitude,
        upper: 0.5 * lambda + amplitude,
    })
}

/// Small-λ form of (ΔL)²: `r/(1+r)²` with `r = e^{−(1−2ε)/λ}`.
pub fn var_l_small_lambda(lambda: f64, eps: f64) -> f64 {
    let r = (-(1.0 - 2.0 * eps) / lambda).exp();
    r / ((1.0 + r) * (1.0 + r))
}

/// `(Δθ)² = ∫_{−π}^{π} θ² W(θ) dθ` for the chosen θ-marginal. Second moments
/// are taken about θ = 0, so θ̄ must be 0.
pub fn var_theta(state: &NormalizedState, marginal: Variant, cfg: &QuadratureConfig) -> Result<f64> {
    if state.params().theta_bar != 0.0 {
        return Err(Error::invalid(
            "theta_bar",
            "angle moments are taken about θ = 0 and need θ̄ = 0",
        ));
    }
    integrate(|t| Ok(t * t * marginal_theta(state, t, marginal)?), -PI, PI, cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    Small,
    Large,
}

/// Closed-form limits of (Δθ)² at ε = ½:
///
/// | marginal | small λ | large λ |
/// |---|---|---|
/// | half | π²/3 − 2 − 3e^{−1/λ} | 1/(2λ) |
/// | full | π²/3 + e^{−1/λ} | π²/2 + 1/(2λ) − √(π/λ) |
pub fn var_theta_asymptotic(lambda: f64, marginal: Variant, regime: Regime) -> f64 {
    let pi2 = PI * PI;
    match (marginal, regime) {
        (Variant::Half, Regime::Small) => pi2 / 3.0 - 2.0 - 3.0 * (-1.0 / lambda).exp(),
        (Variant::Half, Regime::Large) => 1.0 / (2.0 * lambda),
        (Variant::Full, Regime::Small) => pi2 / 3.0 + (-1.0 / lambda).exp(),
        (Variant::Full, Regime::Large) => pi2 / 2.0 + 1.0 / (2.0 * lambda) - (PI / lambda).sqrt(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub lambda: f64,
    pub delta_l: f64,
    pub delta_theta_full: f64,
    pub delta_theta_half: f64,
}

/// `count` λ values log-spaced over [min, max].
pub fn log_spaced(min: f64, max: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![min];
    }
    let (a, b) = (min.ln(), max.ln());
    (0..count)
        .map(|i| match i {
            0 => min,
            _ if i == count - 1 => max,
            _ => (a + (b - a) * i as f64 / (count - 1) as f64).exp(),
        })
        .collect()
}

/// λ sweep used for the uncertainty curve by default.
pub fn default_lambda_sweep(count: usize) -> Vec<f64> {
    log_spaced(1e-3, 1e2, count)
}

/// `(ΔL, Δθ_full, Δθ_half)` for each λ at θ̄ = 0. Points are independent
/// and evaluated in parallel; output order follows `lambdas`.
pub fn uncertainty_curve(
    eps: f64,
    l: i64,
    lambdas: &[f64],
    series: &SeriesConfig,
    cfg: &QuadratureConfig,
) -> Result<Vec<CurvePoint>> {
    lambdas
        .par_iter()
        .map(|&lambda| curve_point(StateParams::new(lambda, l, eps, 0.0)?, series, cfg))
        .collect()
}

pub fn curve_point(params: StateParams, series: &SeriesConfig, cfg: &QuadratureConfig) -> Result<CurvePoint> {
    let state = normalize(params, series)?;
    Ok(CurvePoint {
        lambda: params.lambda,
        delta_l: var_l(&state).sqrt(),
        delta_theta_full: var_theta(&state, Variant::Full, cfg)?.sqrt(),
        delta_theta_half: var_theta(&state, Variant::Half, cfg)?.sqrt(),
    })
}
