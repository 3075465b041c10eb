//! Riemann theta function `theta(u, B) = sum_n e(-1/2 n^T B n + n^T u)` with
//! `e(x) = exp(2 pi x)`, its `u`-derivatives and its `B`-derivatives.
//!
//! The convention has no imaginary unit in the exponent: `B` lives in the
//! Siegel *right* half-space (`Re B` positive definite). The classical
//! upper half-space convention is recovered by `z = -i u`, `tau = i B`.
//!
//! Derivatives `D^a_u theta` are mixed partials
//! `d^|a| theta / du_1^a_1 ... du_g^a_g`; term-by-term differentiation
//! gives `sum_n (2 pi)^|a| n^a e(...)`.

mod eval;
pub mod lattice;
mod truncation;
mod types;

pub use eval::{theta, theta_db, theta_du, ThetaSums};
pub use truncation::{
    max_radius, truncation_radius, TruncationBudget, DEFAULT_MAX_RADIUS, EPS_FLOOR, MAX_RADIUS_ENV,
};
pub use types::{MultiIndex, SiegelMatrix, ThetaPoint};
