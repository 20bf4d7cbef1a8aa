//! Gaussian-coefficient states on the circle, their two circular Wigner
//! functions, all marginal distributions and the angle/angular-momentum
//! uncertainties derived from them.

// `!(x > 0.0)` is used deliberately so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod marginals;
pub mod moments;
pub mod quadrature;
pub mod special_fn;
pub mod state;
pub mod wigner;

pub use error::{Error, Result};
pub use marginals::{
    cesaro_marginal_theta, marginal_p, marginal_p_normalization, marginal_p_normalization_estimate, marginal_theta,
    NormalizationEstimate,
};
pub use moments::{
    curve_point, default_lambda_sweep, uncertainty_curve, var_l, var_l_asymptotic, var_theta, AsymptoticVariance,
    CurvePoint, Regime,
};
pub use quadrature::{QuadratureConfig, QuadratureRule};
pub use special_fn::{dirichlet_kernel, fejer_kernel, sinc, theta3, theta3_dz, SeriesConfig, ThetaArg};
pub use state::{normalize, NormalizedState, Representation, StateParams};
pub use wigner::{eval_grid, wigner, wigner_full, wigner_half, Method, Variant, WignerGrid, WignerValue};
