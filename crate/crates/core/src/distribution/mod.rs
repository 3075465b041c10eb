//! Discrete Gaussian distributions on `Z^g`.
//!
//! The mass function is `p(n) = e(-1/2 n^T B n + n^T u) / theta(u, B)`. For
//! real `(u, B)` this is an honest probability distribution; for complex
//! parameters it is a complex-valued one, and every expectation is the
//! corresponding lattice sum weighted by the complex masses.

mod actions;
mod intmat;
mod moments;

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::theta::lattice::LatticeBall;
use crate::theta::{MultiIndex, ThetaPoint, ThetaSums, TruncationBudget};

pub use actions::{SplitSpec, Witness, SAME_DISTRIBUTION_TOL};
pub use moments::{cumulants_from_moments, MomentKey, MomentKind, MomentTable};

/// Working tolerance used when none is given.
pub const DEFAULT_EPS: f64 = 1e-13;

/// A discrete Gaussian with its normalising constant cached.
#[derive(Debug, Clone)]
pub struct DiscreteGaussian {
    point: ThetaPoint,
    theta: Complex64,
    log_theta: Complex64,
    budget: TruncationBudget,
    eps: f64,
}

/// Entropy value together with a flag set when the logarithm of a
/// non-real theta value had to be taken on the principal branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Entropy {
    pub value: Complex64,
    pub branch_ambiguous: bool,
}

impl DiscreteGaussian {
    /// Fails with [`Error::DivisorHit`] when `|theta(u, B)| <= 10 eps`.
    pub fn new(point: ThetaPoint, eps: f64) -> Result<Self> {
        let sums = ThetaSums::compute(&point, 0, eps)?;
        let theta = sums.theta();
        // Compare in log space so that huge normalisers do not overflow.
        let log_mod = sums.log_theta().re;
        if log_mod <= (10.0 * eps).ln() {
            return Err(Error::DivisorHit {
                modulus: log_mod.exp(),
            });
        }
        Ok(Self {
            point,
            theta,
            log_theta: sums.log_theta(),
            budget: *sums.budget(),
            eps,
        })
    }

    pub fn with_default_eps(point: ThetaPoint) -> Result<Self> {
        Self::new(point, DEFAULT_EPS)
    }

    pub fn point(&self) -> &ThetaPoint {
        &self.point
    }

    pub fn dim(&self) -> usize {
        self.point.dim()
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn theta(&self) -> Complex64 {
        self.theta
    }

    pub fn log_theta(&self) -> Complex64 {
        self.log_theta
    }

    /// Truncation used for the normaliser.
    pub fn budget(&self) -> &TruncationBudget {
        &self.budget
    }

    pub fn is_real(&self) -> bool {
        self.point.is_real()
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: len,
            });
        }
        Ok(())
    }

    /// `2 pi (-1/2 n^T B n + n^T u)`.
    fn exponent(&self, n: &[i64]) -> Complex64 {
        let quad = self.point.b().quad_int(n);
        let lin: Complex64 = n
            .iter()
            .zip(self.point.u())
            .map(|(&k, z)| z * k as f64)
            .sum();
        (lin - quad * 0.5) * (2.0 * PI)
    }

    pub fn pmf(&self, n: &[i64]) -> Result<Complex64> {
        self.check_len(n.len())?;
        Ok((self.exponent(n) - self.log_theta).exp())
    }

    /// `E[exp(i v^T X)] = theta(u + i v / 2 pi, B) / theta(u, B)`.
    pub fn char_fn(&self, v: &[f64]) -> Result<Complex64> {
        self.check_len(v.len())?;
        let shifted: Vec<Complex64> = self
            .point
            .u()
            .iter()
            .zip(v)
            .map(|(z, &x)| z + Complex64::new(0.0, x / (2.0 * PI)))
            .collect();
        let num = ThetaSums::compute(&self.point.with_u(shifted)?, 0, self.eps)?;
        // The numerator may vanish; avoid its logarithm.
        Ok(num.scaled_sum(&MultiIndex::zero(self.dim()))? * (num.scale() - self.log_theta).exp())
    }

    /// All moments, central moments and cumulants up to `max_order`.
    pub fn moments(&self, max_order: u32) -> Result<MomentTable> {
        MomentTable::compute(&self.point, max_order, self.eps)
    }

    /// `E[X^a] = (2 pi)^-|a| D^a theta / theta`.
    pub fn moment(&self, a: &MultiIndex) -> Result<Complex64> {
        self.check_len(a.dim())?;
        let sums = ThetaSums::compute_for(&self.point, vec![a.clone()], self.eps)?;
        sums.raw_moment(a)
    }

    /// `E[(X - mu)^a]`.
    pub fn central_moment(&self, a: &MultiIndex) -> Result<Complex64> {
        self.check_len(a.dim())?;
        self.moments(a.order())?.central_moment(a)
    }

    /// `kappa_a = (2 pi)^-|a| D^a log theta`, for `|a| >= 1`.
    pub fn cumulant(&self, a: &MultiIndex) -> Result<Complex64> {
        self.check_len(a.dim())?;
        self.moments(a.order())?.cumulant(a)
    }

    /// Mean vector and covariance matrix.
    pub fn mean_cov(&self) -> Result<(Vec<Complex64>, Vec<Vec<Complex64>>)> {
        let t = self.moments(2)?;
        Ok((t.mean(), t.covariance()?))
    }

    /// `log theta - 2 pi u^T mu + pi <B, Sigma + mu mu^T>`.
    pub fn entropy(&self) -> Result<Entropy> {
        let g = self.dim();
        let (mu, cov) = self.mean_cov()?;
        let u = self.point.u();
        let b = self.point.b();
        let lin: Complex64 = u.iter().zip(&mu).map(|(x, m)| x * m).sum();
        let mut quad = Complex64::new(0.0, 0.0);
        for i in 0..g {
            for j in 0..g {
                quad += b.get(i, j) * (cov[i][j] + mu[i] * mu[j]);
            }
        }
        Ok(Entropy {
            value: self.log_theta - lin * (2.0 * PI) + quad * PI,
            branch_ambiguous: !self.is_real(),
        })
    }

    /// The truncation support and the masses on it, in shell order.
    pub fn support(&self) -> Result<(Arc<LatticeBall>, Vec<Complex64>)> {
        let pts = crate::theta::lattice::ball(self.dim(), self.budget.radius);
        let masses = pts
            .iter()
            .map(|n| (self.exponent(n) - self.log_theta).exp())
            .collect();
        Ok((pts, masses))
    }
}
