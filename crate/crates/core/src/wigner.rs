//! The two circular Wigner functions
//!
//! ```text
//! W[θ,p]     = ∫_{−π}^{π} dθ′/(2π) e^{−2ipθ′} ψ(θ+θ′) ψ*(θ−θ′)
//! W_{1/2}[θ,p] = (1/2π) ∫_{−π}^{π} dθ′ e^{−ipθ′} ψ(θ+θ′/2) ψ*(θ−θ′/2)
//! ```
//!
//! evaluated by direct quadrature, by the coefficient double series (the θ′
//! integral done in closed form as a sinc), and, for `W`, by the ϑ₃ form of
//! the integrand.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadratureConfig};
use crate::special_fn::{sinc, theta3_scaled, ThetaArg};
use crate::state::{reduce_angle, NormalizedState, Representation, StateParams};

/// Imaginary parts above this signal a broken evaluation rather than rounding.
pub const IMAG_RESIDUE_LIMIT: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// `W[θ,p]`, bounded by 1/(2π).
    Full,
    /// `W_{1/2}[θ,p]`, bounded by 1/π.
    Half,
}

impl Variant {
    pub fn bound(self) -> f64 {
        match self {
            Variant::Full => 1.0 / (2.0 * PI),
            Variant::Half => 1.0 / PI,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Full => "full",
            Variant::Half => "half",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Quadrature,
    Series,
    /// ϑ₃ form of the integrand; `W` only, requires θ̄ = 0.
    ThetaForm,
}

/// A Wigner value with the imaginary part that was discarded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WignerValue {
    pub value: f64,
    pub imag_residue: f64,
}

impl WignerValue {
    fn from_complex(z: Complex64, what: &'static str) -> Result<Self> {
        if z.im.abs() > IMAG_RESIDUE_LIMIT || !z.re.is_finite() {
            return Err(Error::Consistency {
                what,
                detail: format!("value {z} is not real"),
            });
        }
        Ok(Self {
            value: z.re,
            imag_residue: z.im.abs(),
        })
    }
}

pub fn wigner_full(state: &NormalizedState, theta: f64, p: f64, method: Method, cfg: &QuadratureConfig) -> Result<f64> {
    wigner_full_detailed(state, theta, p, method, cfg).map(|w| w.value)
}

pub fn wigner_half(state: &NormalizedState, theta: f64, p: f64, method: Method, cfg: &QuadratureConfig) -> Result<f64> {
    wigner_half_detailed(state, theta, p, method, cfg).map(|w| w.value)
}

pub fn wigner(
    state: &NormalizedState,
    variant: Variant,
    theta: f64,
    p: f64,
    method: Method,
    cfg: &QuadratureConfig,
) -> Result<WignerValue> {
    match variant {
        Variant::Full => wigner_full_detailed(state, theta, p, method, cfg),
        Variant::Half => wigner_half_detailed(state, theta, p, method, cfg),
    }
}

pub fn wigner_full_detailed(
    state: &NormalizedState,
    theta: f64,
    p: f64,
    method: Method,
    cfg: &QuadratureConfig,
) -> Result<WignerValue> {
    let z = match method {
        Method::Quadrature => {
            let f = |t: f64| -> Result<Complex64> {
                let a = state.psi(theta + t, Representation::Auto)?;
                let b = state.psi(theta - t, Representation::Auto)?;
                Ok(Complex64::from_polar(1.0, -2.0 * p * t) * a * b.conj())
            };
            integrate(f, -PI, PI, cfg)? / (2.0 * PI)
        }
        Method::Series if p.fract() == 0.0 => full_integer_p(state, theta, p as i64),
        Method::Series => series(state, theta, p, Variant::Full),
        Method::ThetaForm => full_theta_form(state, theta, p, cfg)?,
    };
    WignerValue::from_complex(z, "wigner_full")
}

pub fn wigner_half_detailed(
    state: &NormalizedState,
    theta: f64,
    p: f64,
    method: Method,
    cfg: &QuadratureConfig,
) -> Result<WignerValue> {
    let z = match method {
        Method::Quadrature => {
            let f = |t: f64| -> Result<Complex64> {
                let a = state.psi(theta + 0.5 * t, Representation::Auto)?;
                let b = state.psi(theta - 0.5 * t, Representation::Auto)?;
                Ok(Complex64::from_polar(1.0, -p * t) * a * b.conj())
            };
            integrate(f, -PI, PI, cfg)? / (2.0 * PI)
        }
        Method::Series => series(state, theta, p, Variant::Half),
        Method::ThetaForm => {
            return Err(Error::invalid(
                "method",
                "the theta-function form is only available for the full Wigner function",
            ))
        }
    };
    WignerValue::from_complex(z, "wigner_half")
}

/// Coefficient double series
///
/// ```text
/// full: (1/2π) Σ_{n,m} c(n)c*(m) e^{i(n−m)θ} sinc[π(n+m−2p)]
/// half: (1/2π) Σ_{n,m} c(n)c*(m) e^{i(n−m)θ} sinc[π((n+m)/2 − p)]
/// ```
///
/// over the coefficient window. The sinc factor depends on `n + m` only.
pub fn series(state: &NormalizedState, theta: f64, p: f64, variant: Variant) -> Complex64 {
    let (lo, hi) = state.window();
    let theta = reduce_angle(theta);
    let a: Vec<Complex64> = (lo..=hi)
        .map(|n| state.coeff(n) * Complex64::from_polar(1.0, n as f64 * theta))
        .collect();
    let width = a.len();
    let kernel: Vec<f64> = (0..2 * width - 1)
        .map(|k| {
            let s = (2 * lo + k as i64) as f64;
            match variant {
                Variant::Full => sinc(PI * (s - 2.0 * p)),
                Variant::Half => sinc(PI * (0.5 * s - p)),
            }
        })
        .collect();
    let mut sum = Complex64::new(0.0, 0.0);
    for (i, ai) in a.iter().enumerate() {
        let mut row = Complex64::new(0.0, 0.0);
        for (j, aj) in a.iter().enumerate() {
            row += aj.conj() * kernel[i + j];
        }
        sum += ai * row;
    }
    sum / (2.0 * PI)
}

/// Integer-p collapse of the full series: `(1/2π) Σ_n c(n) c*(2p−n) e^{2i(n−p)θ}`.
pub fn full_integer_p(state: &NormalizedState, theta: f64, p: i64) -> Complex64 {
    let (lo, hi) = state.window();
    let theta = reduce_angle(theta);
    let sum: Complex64 = (lo..=hi)
        .filter(|n| (lo..=hi).contains(&(2 * p - n)))
        .map(|n| {
            state.coeff(n) * state.coeff(2 * p - n).conj() * Complex64::from_polar(1.0, 2.0 * (n - p) as f64 * theta)
        })
        .sum();
    sum / (2.0 * PI)
}

// W = 1/(2π ϑ₃(−iε/λ, q²)) ∫dθ′/(2π) e^{−2imθ′} ϑ₃((θ+θ′)/2 − iε/(2λ), q) ϑ₃((θ−θ′)/2 + iε/(2λ), q)
// with m = p − l.
fn full_theta_form(state: &NormalizedState, theta: f64, p: f64, cfg: &QuadratureConfig) -> Result<Complex64> {
    let params = state.params();
    if params.theta_bar != 0.0 {
        return Err(Error::invalid(
            "theta_bar",
            "the theta-function form of W assumes θ̄ = 0",
        ));
    }
    let (lambda, eps) = (params.lambda, params.eps);
    let m = p - params.l as f64;
    let series_cfg = state.series_config();
    let nearest = eps.min(1.0 - eps);
    let shift = (eps * eps - nearest * nearest) / (2.0 * lambda);
    let log_q = -0.5 / lambda;
    let y = eps / (2.0 * lambda);

    let den_arg = ThetaArg::from_log_nome(Complex64::new(0.0, -eps / lambda), 2.0 * log_q)?;
    let den = theta3_scaled(den_arg, -2.0 * shift, series_cfg)?.re;

    let f = |t: f64| -> Result<Complex64> {
        let a = ThetaArg::from_log_nome(Complex64::new(0.5 * (theta + t), -y), log_q)?;
        let b = ThetaArg::from_log_nome(Complex64::new(0.5 * (theta - t), y), log_q)?;
        let ta = theta3_scaled(a, -shift, series_cfg)?;
        let tb = theta3_scaled(b, -shift, series_cfg)?;
        Ok(Complex64::from_polar(1.0, -2.0 * m * t) * ta * tb)
    };
    let integral = integrate(f, -PI, PI, cfg)? / (2.0 * PI);
    Ok(integral / (2.0 * PI * den))
}

/// Uniformly spaced samples `a, …, b` (both ends included).
pub fn linspace(a: f64, b: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![a];
    }
    // Offsets from the midpoint are exactly antisymmetric, so grids over
    // symmetric ranges are exactly mirror-symmetric.
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let last = (count - 1) as f64;
    (0..count)
        .map(|i| match i {
            0 => a,
            _ if i == count - 1 => b,
            _ => mid + half * ((2 * i) as f64 - last) / last,
        })
        .collect()
}

/// Wigner values sampled on a rectangular (θ, p) grid; rows are θ, columns p.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WignerGrid {
    pub variant: Variant,
    pub theta_values: Vec<f64>,
    pub p_values: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    pub state: StateParams,
    pub max_abs_imag_residue: f64,
    /// Largest series-vs-quadrature difference over the spot-checked cells.
    pub spot_check_max_diff: f64,
    pub spot_checked_cells: usize,
}

impl WignerGrid {
    pub fn value(&self, i_theta: usize, i_p: usize) -> f64 {
        self.values[i_theta][i_p]
    }

    pub fn min(&self) -> f64 {
        self.values.iter().flatten().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `(θ, p, value)` for the most negative cell.
    pub fn argmin(&self) -> (f64, f64, f64) {
        let mut best = (0.0, 0.0, f64::INFINITY);
        for (i, row) in self.values.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v < best.2 {
                    best = (self.theta_values[i], self.p_values[j], v);
                }
            }
        }
        best
    }
}

/// Every `SPOT_CHECK_STRIDE`-th cell is re-evaluated by quadrature.
const SPOT_CHECK_STRIDE: usize = 100;
const SPOT_CHECK_LIMIT: f64 = 1e-8;

/// Evaluates a Wigner function on `theta_count` points over [−π, π] and
/// `p_count` points over [p_min, p_max] with the series method, spot-checking
/// one cell in a hundred by quadrature. Rows are computed in parallel.
pub fn eval_grid(
    state: &NormalizedState,
    variant: Variant,
    theta_count: usize,
    p_min: f64,
    p_max: f64,
    p_count: usize,
    cfg: &QuadratureConfig,
) -> Result<WignerGrid> {
    if theta_count < 2 {
        return Err(Error::invalid(
            "theta_count",
            format!("must be at least 2, got {theta_count}"),
        ));
    }
    if p_count < 2 {
        return Err(Error::invalid("p_count", format!("must be at least 2, got {p_count}")));
    }
    if !(p_min < p_max) || !p_min.is_finite() || !p_max.is_finite() {
        return Err(Error::invalid(
            "p_min",
            format!("need finite p_min < p_max, got [{p_min}, {p_max}]"),
        ));
    }
    cfg.validate()?;
    let theta_values = linspace(-PI, PI, theta_count);
    let p_values = linspace(p_min, p_max, p_count);

    struct Row {
        values: Vec<f64>,
        residue: f64,
        spot_diff: f64,
        spot_count: usize,
    }

    let rows: Vec<Row> = theta_values
        .par_iter()
        .enumerate()
        .map(|(i, &theta)| -> Result<Row> {
            let mut row = Row {
                values: Vec::with_capacity(p_count),
                residue: 0.0,
                spot_diff: 0.0,
                spot_count: 0,
            };
            for (j, &p) in p_values.iter().enumerate() {
                let w = wigner(state, variant, theta, p, Method::Series, cfg)?;
                row.residue = row.residue.max(w.imag_residue);
                if (i * p_count + j).is_multiple_of(SPOT_CHECK_STRIDE) {
                    let q = wigner(state, variant, theta, p, Method::Quadrature, cfg)?;
                    row.residue = row.residue.max(q.imag_residue);
                    row.spot_diff = row.spot_diff.max((q.value - w.value).abs());
                    row.spot_count += 1;
                }
                row.values.push(w.value);
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;

    let max_abs_imag_residue = rows.iter().map(|r| r.residue).fold(0.0, f64::max);
    let spot_check_max_diff = rows.iter().map(|r| r.spot_diff).fold(0.0, f64::max);
    let spot_checked_cells = rows.iter().map(|r| r.spot_count).sum();
    if spot_check_max_diff > SPOT_CHECK_LIMIT {
        return Err(Error::Consistency {
            what: "eval_grid",
            detail: format!("series and quadrature differ by {spot_check_max_diff:e}"),
        });
    }
    Ok(WignerGrid {
        variant,
        theta_values,
        p_values,
        values: rows.into_iter().map(|r| r.values).collect(),
        state: *state.params(),
        max_abs_imag_residue,
        spot_check_max_diff,
        spot_checked_cells,
    })
}
