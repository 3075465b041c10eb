//! Maximum-entropy and maximum-likelihood fitting on the real slice.
//!
//! For a target mean `mu` and covariance `Sigma` the canonical parameters
//! minimise the convex function
//!
//! ```text
//! F(u, B) = log theta(u, B) - 2 pi u^T mu + pi <B, Sigma + mu mu^T>
//! ```
//!
//! over `u` and the upper triangle of `B`. Writing `T(n)` for the
//! sufficient statistic `(2 pi n_i, -pi n_i^2, -2 pi n_i n_j)` in the same
//! coordinates, `grad F = E[T] - T(target)` and `hess F = Cov[T]`.

mod sample;

use std::f64::consts::PI;

use crate::distribution::{MomentTable, DEFAULT_EPS};
use crate::error::{Error, Result};
use crate::theta::{MultiIndex, SiegelMatrix, ThetaPoint, ThetaSums};
use nalgebra::{DMatrix, DVector, SymmetricEigen};

pub use sample::{fit_from_sample, fit_from_sample_with, sample_moments, CovarianceEstimator};

/// Smallest tolerance `fit` accepts.
pub const MIN_TOL: f64 = 1e-10;

/// Default iteration cap.
pub const DEFAULT_MAX_ITERATIONS: usize = 200;

/// Real mean vector and symmetric positive definite covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentData {
    mu: Vec<f64>,
    sigma: Vec<Vec<f64>>,
}

impl MomentData {
    pub fn new(mu: Vec<f64>, sigma: Vec<Vec<f64>>) -> Result<Self> {
        let g = mu.len();
        if g == 0 {
            return Err(Error::InvalidDimension(0));
        }
        check_square(&sigma, g)?;
        let scale = sigma.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
        for i in 0..g {
            for j in i + 1..g {
                if (sigma[i][j] - sigma[j][i]).abs() > 1e-12 * scale.max(1.0) {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
            }
        }
        if mu
            .iter()
            .chain(sigma.iter().flatten())
            .any(|x| !x.is_finite())
        {
            return Err(Error::InvalidArgument("non-finite moment".into()));
        }
        let eig = SymmetricEigen::new(to_matrix(&sigma)).eigenvalues;
        let lo = eig.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = eig.iter().copied().fold(0.0f64, f64::max);
        if !(lo > 1e-12 * hi) {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(Self { mu, sigma })
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn sigma(&self) -> &[Vec<f64>] {
        &self.sigma
    }

    /// Largest absolute entrywise difference in mean and covariance.
    pub fn max_abs_diff(&self, other: &MomentData) -> f64 {
        let m = self
            .mu
            .iter()
            .zip(&other.mu)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        self.sigma
            .iter()
            .flatten()
            .zip(other.sigma.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(m, f64::max)
    }

    /// `T(target)`: target expectation of the sufficient statistic.
    fn statistic(&self) -> DVector<f64> {
        let g = self.dim();
        let mut t = DVector::zeros(g + g * (g + 1) / 2);
        for i in 0..g {
            t[i] = 2.0 * PI * self.mu[i];
        }
        let mut k = g;
        for i in 0..g {
            for j in i..g {
                let second = self.sigma[i][j] + self.mu[i] * self.mu[j];
                t[k] = if i == j {
                    -PI * second
                } else {
                    -2.0 * PI * second
                };
                k += 1;
            }
        }
        t
    }
}

/// Real canonical parameters: `u` real, `B` real symmetric positive definite.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalPoint {
    u: Vec<f64>,
    b: Vec<Vec<f64>>,
}

impl CanonicalPoint {
    pub fn new(u: Vec<f64>, b: Vec<Vec<f64>>) -> Result<Self> {
        let g = u.len();
        if g == 0 {
            return Err(Error::InvalidDimension(0));
        }
        check_square(&b, g)?;
        // SiegelMatrix checks symmetry and definiteness.
        SiegelMatrix::from_real_rows(&b)?;
        Ok(Self { u, b })
    }

    pub fn dim(&self) -> usize {
        self.u.len()
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn b(&self) -> &[Vec<f64>] {
        &self.b
    }

    pub fn to_theta_point(&self) -> Result<ThetaPoint> {
        ThetaPoint::real(&self.u, SiegelMatrix::from_real_rows(&self.b)?)
    }

    /// Inverse of [`to_theta_point`](Self::to_theta_point); fails on complex
    /// parameters.
    pub fn from_theta_point(p: &ThetaPoint) -> Result<Self> {
        if !p.is_real() {
            return Err(Error::NotReal);
        }
        let b = p
            .b()
            .rows()
            .iter()
            .map(|r| r.iter().map(|z| z.re).collect())
            .collect();
        Ok(Self {
            u: p.u().iter().map(|z| z.re).collect(),
            b,
        })
    }

    /// Largest absolute difference in `u` and `B`.
    pub fn max_abs_diff(&self, other: &CanonicalPoint) -> f64 {
        self.u
            .iter()
            .zip(&other.u)
            .chain(self.b.iter().flatten().zip(other.b.iter().flatten()))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    fn to_vector(&self) -> DVector<f64> {
        let g = self.dim();
        let mut v = DVector::zeros(g + g * (g + 1) / 2);
        v.rows_mut(0, g).copy_from_slice(&self.u);
        let mut k = g;
        for i in 0..g {
            for j in i..g {
                v[k] = self.b[i][j];
                k += 1;
            }
        }
        v
    }

    /// `None` when the vector leaves the positive definite cone.
    fn from_vector(g: usize, v: &DVector<f64>) -> Option<Self> {
        let u = v.rows(0, g).iter().copied().collect();
        let mut b = vec![vec![0.0; g]; g];
        let mut k = g;
        for i in 0..g {
            for j in i..g {
                b[i][j] = v[k];
                b[j][i] = v[k];
                k += 1;
            }
        }
        to_matrix(&b).cholesky()?;
        Self::new(u, b).ok()
    }
}

/// How the Newton Hessian is assembled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HessianMode {
    /// Covariance of the sufficient statistic, from moments up to order 4.
    #[default]
    Analytic,
    /// Central differences of the analytic gradient.
    FiniteDifference,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub tol: f64,
    pub max_iterations: usize,
    pub hessian: HessianMode,
    /// Truncation tolerance for the theta sums.
    pub eps: f64,
}

impl FitOptions {
    pub fn new(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            hessian: HessianMode::Analytic,
            eps: DEFAULT_EPS,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub params: CanonicalPoint,
    pub iterations: usize,
    /// Infinity norm of `forward_moments(params) - target`.
    pub grad_norm: f64,
    /// Squared Newton decrement `g^T H^-1 g` at the last iterate.
    pub newton_decrement: f64,
    pub objective: f64,
    pub converged: bool,
}

/// Objective value, gradient and Hessian at one point.
struct Local {
    f: f64,
    grad: DVector<f64>,
    moments: MomentData,
    table: MomentTable,
}

fn check_square(m: &[Vec<f64>], g: usize) -> Result<()> {
    if m.len() != g {
        return Err(Error::DimensionMismatch {
            expected: g,
            got: m.len(),
        });
    }
    if let Some(r) = m.iter().find(|r| r.len() != g) {
        return Err(Error::DimensionMismatch {
            expected: g,
            got: r.len(),
        });
    }
    Ok(())
}

fn to_matrix(m: &[Vec<f64>]) -> DMatrix<f64> {
    let g = m.len();
    DMatrix::from_fn(g, g, |i, j| m[i][j])
}

fn moment_data_from(table: &MomentTable) -> Result<MomentData> {
    let mu = table.mean().iter().map(|z| z.re).collect();
    let sigma = table
        .covariance()?
        .iter()
        .map(|r| r.iter().map(|z| z.re).collect())
        .collect();
    Ok(MomentData { mu, sigma })
}

/// Mean and covariance of the discrete Gaussian with parameters `p`.
pub fn forward_moments(p: &CanonicalPoint) -> Result<MomentData> {
    forward_moments_eps(p, DEFAULT_EPS)
}

fn forward_moments_eps(p: &CanonicalPoint, eps: f64) -> Result<MomentData> {
    moment_data_from(&MomentTable::compute(&p.to_theta_point()?, 2, eps)?)
}

fn log_theta(p: &CanonicalPoint, eps: f64) -> Result<f64> {
    Ok(ThetaSums::compute(&p.to_theta_point()?, 0, eps)?
        .log_theta()
        .re)
}

/// `F(u, B)` for the given target.
pub fn objective(p: &CanonicalPoint, target: &MomentData) -> Result<f64> {
    objective_eps(p, target, DEFAULT_EPS)
}

fn objective_eps(p: &CanonicalPoint, target: &MomentData, eps: f64) -> Result<f64> {
    Ok(log_theta(p, eps)? - p.to_vector().dot(&target.statistic()))
}

fn local(p: &CanonicalPoint, target: &MomentData, eps: f64, order: u32) -> Result<Local> {
    let table = MomentTable::compute(&p.to_theta_point()?, order, eps)?;
    let moments = moment_data_from(&table)?;
    let grad = moments.statistic() - target.statistic();
    let f = table.log_theta().re - p.to_vector().dot(&target.statistic());
    Ok(Local {
        f,
        grad,
        moments,
        table,
    })
}

/// Gradient of `F` in the coordinates `(u, upper triangle of B)`.
pub fn gradient(p: &CanonicalPoint, target: &MomentData) -> Result<Vec<f64>> {
    Ok(local(p, target, DEFAULT_EPS, 2)?
        .grad
        .iter()
        .copied()
        .collect())
}

/// `Cov[T]`, assembled from central moments up to order 4.
fn covariance_of_statistic(table: &MomentTable) -> Result<DMatrix<f64>> {
    let g = table.dim();
    let c: Vec<f64> = table.mean().iter().map(|z| z.re).collect();
    // S = (x_i, x_i x_j) with x = n - mean; T = L S + const.
    let mut s_idx: Vec<MultiIndex> = (0..g).map(|i| MultiIndex::unit(g, i)).collect();
    for i in 0..g {
        for j in i..g {
            s_idx.push(MultiIndex::unit(g, i).add(&MultiIndex::unit(g, j)));
        }
    }
    let dim = s_idx.len();
    let m = |a: &MultiIndex| table.central_moment(a).map(|z| z.re);
    let mut cov_s = DMatrix::zeros(dim, dim);
    for p in 0..dim {
        for q in p..dim {
            let v = m(&s_idx[p].add(&s_idx[q]))? - m(&s_idx[p])? * m(&s_idx[q])?;
            cov_s[(p, q)] = v;
            cov_s[(q, p)] = v;
        }
    }
    let mut l = DMatrix::zeros(dim, dim);
    for i in 0..g {
        l[(i, i)] = 2.0 * PI;
    }
    let mut k = g;
    for i in 0..g {
        for j in i..g {
            // n_i n_j = x_i x_j + c_i x_j + c_j x_i + c_i c_j
            let w = if i == j { -PI } else { -2.0 * PI };
            l[(k, k)] = w;
            l[(k, j)] += w * c[i];
            l[(k, i)] += w * c[j];
            k += 1;
        }
    }
    Ok(&l * cov_s * l.transpose())
}

/// Fisher information of the family at `p` in the coordinates
/// `(u, upper triangle of B)`; equal to the Hessian of `F`.
pub fn fisher_information(p: &CanonicalPoint) -> Result<Vec<Vec<f64>>> {
    let table = MomentTable::compute(&p.to_theta_point()?, 4, DEFAULT_EPS)?;
    let h = covariance_of_statistic(&table)?;
    Ok(h.row_iter().map(|r| r.iter().copied().collect()).collect())
}

/// Asymptotic standard errors `sqrt(diag(I^-1) / n)` of the MLE from `n`
/// observations, in the same coordinates as [`fisher_information`].
pub fn standard_errors(p: &CanonicalPoint, n: usize) -> Result<Vec<f64>> {
    let info = to_matrix(&fisher_information(p)?);
    let inv = info.cholesky().ok_or(Error::NotPositiveDefinite)?.inverse();
    Ok(inv
        .diagonal()
        .iter()
        .map(|v| (v / n as f64).sqrt())
        .collect())
}

fn finite_difference_hessian(
    p: &CanonicalPoint,
    target: &MomentData,
    eps: f64,
) -> Result<DMatrix<f64>> {
    let g = p.dim();
    let x = p.to_vector();
    let dim = x.len();
    let mut h = DMatrix::zeros(dim, dim);
    for k in 0..dim {
        let step = 1e-5 * (1.0 + x[k].abs());
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[k] += step;
        xm[k] -= step;
        let pp = CanonicalPoint::from_vector(g, &xp).ok_or(Error::NotPositiveDefinite)?;
        let pm = CanonicalPoint::from_vector(g, &xm).ok_or(Error::NotPositiveDefinite)?;
        let gp = local(&pp, target, eps, 2)?.grad;
        let gm = local(&pm, target, eps, 2)?.grad;
        h.set_column(k, &((gp - gm) / (2.0 * step)));
    }
    Ok((&h + h.transpose()) * 0.5)
}

/// Canonical parameters whose mean and covariance equal `target`.
pub fn fit(target: &MomentData, tol: f64) -> Result<FitReport> {
    fit_with(target, &FitOptions::new(tol))
}

/// Starting point `B0 = Sigma^-1 / 2 pi`, `u0 = B0 mu`.
pub fn initial_point(target: &MomentData) -> Result<CanonicalPoint> {
    let g = target.dim();
    let inv = to_matrix(&target.sigma)
        .cholesky()
        .ok_or(Error::NotPositiveDefinite)?
        .inverse()
        / (2.0 * PI);
    let inv = (&inv + inv.transpose()) * 0.5;
    let u0 = &inv * DVector::from_column_slice(&target.mu);
    CanonicalPoint::new(
        u0.iter().copied().collect(),
        (0..g)
            .map(|i| (0..g).map(|j| inv[(i, j)]).collect())
            .collect(),
    )
}

pub fn fit_with(target: &MomentData, opts: &FitOptions) -> Result<FitReport> {
    if !(opts.tol >= MIN_TOL) {
        return Err(Error::InvalidArgument(format!(
            "tolerance {:e} is below the minimum {MIN_TOL:e}",
            opts.tol
        )));
    }
    let g = target.dim();
    let mut p = initial_point(target)?;
    let mut here = local(&p, target, opts.eps, 4)?;
    let mut residual = here.moments.max_abs_diff(target);
    let mut decrement = f64::INFINITY;
    let mut iterations = 0;
    for iter in 0..=opts.max_iterations {
        iterations = iter;
        let h = match opts.hessian {
            HessianMode::Analytic => covariance_of_statistic(&here.table)?,
            HessianMode::FiniteDifference => finite_difference_hessian(&p, target, opts.eps)?,
        };
        let chol = h.cholesky().ok_or(Error::NotPositiveDefinite)?;
        let step = -chol.solve(&here.grad);
        decrement = -here.grad.dot(&step);
        if residual < opts.tol && decrement < opts.tol * opts.tol {
            return Ok(FitReport {
                params: p,
                iterations: iter,
                grad_norm: residual,
                newton_decrement: decrement,
                objective: here.f,
                converged: true,
            });
        }
        if iter == opts.max_iterations {
            break;
        }
        // Backtracking on F; trial points outside the cone are rejected.
        let x = p.to_vector();
        let slope = here.grad.dot(&step);
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            if let Some(trial) = CanonicalPoint::from_vector(g, &(&x + &step * t)) {
                let f = objective_eps(&trial, target, opts.eps)?;
                // Slack for rounding once F has flattened out.
                let slack = 1e-14 * (1.0 + here.f.abs());
                if f <= here.f + 0.25 * t * slope + slack {
                    accepted = Some(trial);
                    break;
                }
            }
            t *= 0.5;
        }
        let Some(next) = accepted else {
            break;
        };
        p = next;
        here = local(&p, target, opts.eps, 4)?;
        residual = here.moments.max_abs_diff(target);
    }
    Err(Error::NoConvergence {
        iterations,
        residual: residual.max(decrement.sqrt()),
    })
}

#[cfg(test)]
mod tests;
