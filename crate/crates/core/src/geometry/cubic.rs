//! The plane cubic satisfied by `(kappa_2, kappa_3)` in genus one.
//!
//! With `e_1, e_2, e_3` the values of `D^2 log theta` at the even half
//! periods `0, i/2, B/2`, and `nu_k = (2 pi)^k kappa_k`,
//!
//! ```text
//! nu_3^2 = -4 nu_2^3 + a_nu nu_2^2 + b_nu nu_2 + c_nu
//! a_nu = 4 (e1 + e2 + e3),  b_nu = -4 (e1 e2 + e1 e3 + e2 e3),  c_nu = 4 e1 e2 e3
//! ```
//!
//! Differentiating once more in `u` and dividing by `2 nu_3` gives
//! `nu_4 = -6 nu_2^2 + a_nu nu_2 + b_nu / 2`; eliminating `a_nu` between the
//! two yields `nu_2 nu_4 + 2 nu_2^3 - nu_3^2 + (b_nu / 2) nu_2 + c_nu = 0`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::distribution::MomentTable;
use crate::error::{Error, Result};
use crate::theta::{MultiIndex, SiegelMatrix, ThetaPoint};

use super::GEOMETRY_EPS;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicCoefficients {
    /// `(e1 + e2 + e3) / pi^2`
    pub a: Complex64,
    /// `-(e1 e2 + e1 e3 + e2 e3) / (4 pi^4)`
    pub b: Complex64,
    /// `e1 e2 e3 / (16 pi^6)`
    pub c: Complex64,
    pub e1: Complex64,
    pub e2: Complex64,
    pub e3: Complex64,
}

impl CubicCoefficients {
    fn from_e(e1: Complex64, e2: Complex64, e3: Complex64) -> Self {
        let s1 = e1 + e2 + e3;
        let s2 = e1 * e2 + e1 * e3 + e2 * e3;
        let s3 = e1 * e2 * e3;
        Self {
            a: s1 / PI.powi(2),
            b: -s2 / (4.0 * PI.powi(4)),
            c: s3 / (16.0 * PI.powi(6)),
            e1,
            e2,
            e3,
        }
    }

    pub fn a_nu(&self) -> Complex64 {
        (self.e1 + self.e2 + self.e3) * 4.0
    }

    pub fn b_nu(&self) -> Complex64 {
        -(self.e1 * self.e2 + self.e1 * self.e3 + self.e2 * self.e3) * 4.0
    }

    pub fn c_nu(&self) -> Complex64 {
        self.e1 * self.e2 * self.e3 * 4.0
    }

    /// `-4 x^3 + a x^2 + b x + c` in cumulant units.
    pub fn eval(&self, kappa2: Complex64) -> Complex64 {
        ((-4.0 * kappa2 + self.a) * kappa2 + self.b) * kappa2 + self.c
    }

    /// The same cubic in `nu` units; its roots are `e1, e2, e3`.
    pub fn eval_nu(&self, nu2: Complex64) -> Complex64 {
        ((-4.0 * nu2 + self.a_nu()) * nu2 + self.b_nu()) * nu2 + self.c_nu()
    }
}

fn second_log_derivative(u: Complex64, b: &SiegelMatrix) -> Result<Complex64> {
    let p = ThetaPoint::new(vec![u], b.clone())?;
    MomentTable::compute(&p, 2, GEOMETRY_EPS)?.log_derivative(&MultiIndex::new(vec![2]))
}

fn scalar(b: Complex64) -> Result<SiegelMatrix> {
    SiegelMatrix::scalar(b)
}

/// Coefficients of the cubic for the genus-one parameter `b`.
pub fn cubic_coefficients(b: Complex64) -> Result<CubicCoefficients> {
    let bm = scalar(b)?;
    let e1 = second_log_derivative(Complex64::new(0.0, 0.0), &bm)?;
    let e2 = second_log_derivative(Complex64::new(0.0, 0.5), &bm)?;
    let e3 = second_log_derivative(b * 0.5, &bm)?;
    Ok(CubicCoefficients::from_e(e1, e2, e3))
}

/// Absolute residuals of the three identities at `(u, b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicResiduals {
    pub r_cubic: f64,
    pub r_quartic: f64,
    pub r_det: f64,
    /// `|theta| / sum |summand|` at `(u, b)`; small values mean the
    /// residuals are dominated by cancellation.
    pub conditioning: f64,
    /// Largest modulus among the terms that cancel in the three identities
    /// (at least 1). Rounding alone leaves residuals of order
    /// `1e-14 * scale`, so absolute residuals grow near the divisor.
    pub scale: f64,
}

impl CubicResiduals {
    pub fn max(&self) -> f64 {
        self.r_cubic.max(self.r_quartic).max(self.r_det)
    }
}

pub fn verify_cubic(u: Complex64, b: Complex64) -> Result<CubicResiduals> {
    let coeffs = cubic_coefficients(b)?;
    verify_cubic_with(u, b, &coeffs)
}

/// As [`verify_cubic`] with precomputed coefficients.
pub fn verify_cubic_with(
    u: Complex64,
    b: Complex64,
    coeffs: &CubicCoefficients,
) -> Result<CubicResiduals> {
    let p = ThetaPoint::new(vec![u], scalar(b)?)?;
    let t = MomentTable::compute(&p, 4, GEOMETRY_EPS)?;
    if t.log_theta().re <= (10.0 * GEOMETRY_EPS).ln() {
        return Err(Error::DivisorHit {
            modulus: t.log_theta().re.exp(),
        });
    }
    let k = |n: u32| t.cumulant(&MultiIndex::new(vec![n]));
    let (k2, k3) = (k(2)?, k(3)?);
    let nu = |n: u32| -> Result<Complex64> { Ok(k(n)? * (2.0 * PI).powi(n as i32)) };
    let (n2, n3, n4) = (nu(2)?, nu(3)?, nu(4)?);
    let (a, bn, c) = (coeffs.a_nu(), coeffs.b_nu(), coeffs.c_nu());
    let scale = [
        (k3 * k3).norm(),
        (4.0 * k2 * k2 * k2).norm(),
        n4.norm(),
        (6.0 * n2 * n2).norm(),
        (n2 * n4).norm(),
        (2.0 * n2 * n2 * n2).norm(),
        (n3 * n3).norm(),
        1.0,
    ]
    .into_iter()
    .fold(0.0, f64::max);
    Ok(CubicResiduals {
        r_cubic: (k3 * k3 - coeffs.eval(k2)).norm(),
        r_quartic: (n4 + 6.0 * n2 * n2 - a * n2 - bn / 2.0).norm(),
        r_det: (n2 * n4 + 2.0 * n2 * n2 * n2 - n3 * n3 + bn / 2.0 * n2 + c).norm(),
        conditioning: t.conditioning(),
        scale,
    })
}
