//! Points on the theta divisor and the Gauss map.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::theta::{MultiIndex, SiegelMatrix, ThetaPoint, ThetaSums};

use super::{ProjectivePoint, GEOMETRY_EPS};

/// Accepted modulus of theta at a returned zero.
pub const ZERO_TOL: f64 = 1e-10;

/// Search region `t in [-h, h] + i [-h, h]` on the line `base + t dir`,
/// sampled on a `grid x grid` lattice before Newton refinement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroSearch {
    pub half_width: f64,
    pub grid: usize,
    pub max_starts: usize,
}

impl Default for ZeroSearch {
    fn default() -> Self {
        Self {
            half_width: 1.0,
            grid: 24,
            max_starts: 12,
        }
    }
}

fn on_line(base: &[Complex64], dir: &[Complex64], t: Complex64) -> Vec<Complex64> {
    base.iter().zip(dir).map(|(b, d)| b + d * t).collect()
}

/// `theta` and `d theta / dt` along the line, unscaled.
fn value_and_slope(p: &ThetaPoint, dir: &[Complex64]) -> Result<(Complex64, Complex64)> {
    let g = p.dim();
    let sums = ThetaSums::compute(p, 1, GEOMETRY_EPS)?;
    let mut slope = Complex64::new(0.0, 0.0);
    for (i, d) in dir.iter().enumerate() {
        slope += sums.du(&MultiIndex::unit(g, i))? * d;
    }
    Ok((sums.theta(), slope))
}

/// A zero of `theta(., B)` on the complex line `base + t dir`, with the
/// default search region.
pub fn find_theta_zero(
    base: &[Complex64],
    dir: &[Complex64],
    b: &SiegelMatrix,
) -> Result<Vec<Complex64>> {
    find_theta_zero_in(base, dir, b, &ZeroSearch::default())
}

pub fn find_theta_zero_in(
    base: &[Complex64],
    dir: &[Complex64],
    b: &SiegelMatrix,
    search: &ZeroSearch,
) -> Result<Vec<Complex64>> {
    let g = b.dim();
    if base.len() != g || dir.len() != g {
        return Err(Error::DimensionMismatch {
            expected: g,
            got: base.len().min(dir.len()),
        });
    }
    if dir.iter().all(|z| z.norm() == 0.0) {
        return Err(Error::InvalidArgument("direction must be nonzero".into()));
    }
    let n = search.grid.max(2);
    let h = search.half_width;
    let step = 2.0 * h / (n - 1) as f64;
    let mut grid = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let t = Complex64::new(-h + i as f64 * step, -h + j as f64 * step);
            let p = ThetaPoint::new(on_line(base, dir, t), b.clone())?;
            let th = ThetaSums::compute(&p, 0, GEOMETRY_EPS)?;
            // Compare relative to the largest summand, which theta sums
            // near its zeros are dominated by.
            grid.push((th.conditioning(), t));
        }
    }
    grid.sort_by(|a, b| a.0.total_cmp(&b.0));
    for &(_, t0) in grid.iter().take(search.max_starts) {
        let mut t = t0;
        for _ in 0..60 {
            let p = ThetaPoint::new(on_line(base, dir, t), b.clone())?;
            let (v, s) = value_and_slope(&p, dir)?;
            if v.norm() < ZERO_TOL * 1e-3 {
                break;
            }
            if s.norm() == 0.0 {
                break;
            }
            let dt = v / s;
            t -= dt;
            if dt.norm() < 1e-15 * (1.0 + t.norm()) || t.norm() > 4.0 * h + 1.0 {
                break;
            }
        }
        if t.re.abs() > h + step || t.im.abs() > h + step {
            continue;
        }
        let u = on_line(base, dir, t);
        let p = ThetaPoint::new(u.clone(), b.clone())?;
        if ThetaSums::compute(&p, 0, GEOMETRY_EPS)?.theta().norm() < ZERO_TOL {
            return Ok(u);
        }
    }
    Err(Error::NoZeroFound)
}

/// `[d theta / du_1 : ... : d theta / du_g]` at a point of the divisor.
pub fn gauss_map(u: &[Complex64], b: &SiegelMatrix) -> Result<ProjectivePoint> {
    let g = b.dim();
    let p = ThetaPoint::new(u.to_vec(), b.clone())?;
    let sums = ThetaSums::compute(&p, 1, GEOMETRY_EPS)?;
    let th = sums.theta().norm();
    if th >= 1e-8 {
        return Err(Error::NotOnDivisor { modulus: th });
    }
    let grad: Vec<Complex64> = (0..g)
        .map(|i| sums.du(&MultiIndex::unit(g, i)))
        .collect::<Result<_>>()?;
    if grad.iter().all(|z| z.norm() < 1e-10) {
        return Err(Error::SingularDivisorPoint);
    }
    ProjectivePoint::new(grad)
}
