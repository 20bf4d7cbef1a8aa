//! Composite Gauss-Legendre quadrature with panel doubling.

use std::ops::{Add, Mul};
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum QuadratureRule {
    #[default]
    GaussLegendreComposite,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Successive panel-doubling estimates must agree to this absolute tolerance.
    pub abs_tolerance: f64,
    pub max_panels: usize,
    pub rule: QuadratureRule,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tolerance: 1e-10,
            max_panels: 4096,
            rule: QuadratureRule::GaussLegendreComposite,
        }
    }
}

impl QuadratureConfig {
    pub fn with_tolerance(abs_tolerance: f64) -> Result<Self> {
        let cfg = Self {
            abs_tolerance,
            ..Self::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tolerance > 0.0) {
            return Err(Error::invalid(
                "abs_tolerance",
                format!("must be positive, got {}", self.abs_tolerance),
            ));
        }
        if self.max_panels < 2 {
            return Err(Error::invalid("max_panels", "must be at least 2"));
        }
        Ok(())
    }
}

/// Values that can be integrated: real or complex.
pub trait Integrand: Copy + Add<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn distance(self, other: Self) -> f64;
}

impl Integrand for f64 {
    fn zero() -> Self {
        0.0
    }
    fn distance(self, other: Self) -> f64 {
        (self - other).abs()
    }
}

impl Integrand for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn distance(self, other: Self) -> f64 {
        (self - other).norm()
    }
}

/// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Newton iteration on P_n from the Chebyshev initial guess.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be positive");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Fixed composite rule: `panels` equal subintervals of [a, b].
    pub fn integrate_panels<T, F>(&self, f: &F, a: f64, b: f64, panels: usize) -> Result<T>
    where
        T: Integrand,
        F: Fn(f64) -> Result<T>,
    {
        let width = (b - a) / panels as f64;
        let half = 0.5 * width;
        let mut total = T::zero();
        for k in 0..panels {
            let mid = a + (k as f64 + 0.5) * width;
            let mut panel = T::zero();
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                panel = panel + f(mid + half * x)? * *w;
            }
            total = total + panel * half;
        }
        Ok(total)
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

const PANEL_ORDER: usize = 20;

fn panel_rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(PANEL_ORDER))
}

/// Integrates `f` over [a, b], doubling the panel count (from 2) until two
/// successive estimates agree to `cfg.abs_tolerance`.
pub fn integrate<T, F>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<T>
where
    T: Integrand,
    F: Fn(f64) -> Result<T>,
{
    integrate_from(f, a, b, 2, cfg)
}

/// As [`integrate`], starting from `initial_panels` (useful for integrands
/// known to oscillate many times over [a, b]).
pub fn integrate_from<T, F>(f: F, a: f64, b: f64, initial_panels: usize, cfg: &QuadratureConfig) -> Result<T>
where
    T: Integrand,
    F: Fn(f64) -> Result<T>,
{
    cfg.validate()?;
    let rule = panel_rule();
    let mut panels = initial_panels.max(1);
    let mut prev = rule.integrate_panels(&f, a, b, panels)?;
    while panels * 2 <= cfg.max_panels {
        panels *= 2;
        let next = rule.integrate_panels(&f, a, b, panels)?;
        if next.distance(prev) < cfg.abs_tolerance {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::NonConvergence {
        what: "composite Gauss-Legendre quadrature",
        work: panels,
        unit: "panels",
    })
}
