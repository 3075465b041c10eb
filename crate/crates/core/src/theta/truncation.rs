//! Certified truncation radii for theta lattice sums.
//!
//! For a summand `(2 pi n)^a e(-1/2 n^T B n + n^T u)` the modulus is at most
//! `h(|n|) = (2 pi |n|)^|a| exp(2 pi (-lambda/2 |n|^2 + rho |n|))` with
//! `lambda = lambda_min(Re B)` and `rho = |Re u|`. Points outside the ball of
//! radius `R` have sup-norm `k >= floor(R / sqrt(g)) + 1`; the sup-norm shell
//! `k` holds `(2k+1)^g - (2k-1)^g` points, each of Euclidean norm at least
//! `max(k, R)`. Once `R` is past the maximiser of `h`, the tail is bounded by
//! `sum_k N(k) h(max(k, R))`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};

use super::types::{MultiIndex, ThetaPoint};

/// Smallest absolute tolerance the engine will certify.
pub const EPS_FLOOR: f64 = 1e-14;

/// Default hard cap on the truncation radius.
pub const DEFAULT_MAX_RADIUS: f64 = 1e4;

/// Environment variable overriding [`DEFAULT_MAX_RADIUS`].
pub const MAX_RADIUS_ENV: &str = "THETA_GAUSS_MAX_RADIUS";

/// Outcome of a truncation-radius search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationBudget {
    /// Absolute tail tolerance requested.
    pub eps: f64,
    /// Euclidean cutoff: points with `|n| <= radius` are summed.
    pub radius: f64,
    /// Certified upper bound on the neglected tail.
    pub tail_bound: f64,
    /// Number of `|n|^2` shells inside the radius.
    pub shell_count: usize,
}

/// Hard radius cap, read once from `THETA_GAUSS_MAX_RADIUS` if set.
pub fn max_radius() -> f64 {
    static CAP: OnceLock<f64> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var(MAX_RADIUS_ENV)
            .ok()
            .and_then(|s| s.trim().parse::<f64>().ok())
            .filter(|&r| r.is_finite() && r >= 1.0)
            .unwrap_or(DEFAULT_MAX_RADIUS)
    })
}

/// Natural log of the sup-norm shell count `(2k+1)^g - (2k-1)^g`.
fn ln_shell_count(k: u64, g: usize) -> f64 {
    let k = k as f64;
    let outer = (2.0 * k + 1.0).powi(g as i32);
    let inner = (2.0 * k - 1.0).powi(g as i32);
    (outer - inner).ln()
}

/// Upper bound on `sum_{|n| > radius} h(|n|)`, assuming `radius` is past the
/// maximiser of `h`.
pub(crate) fn tail_bound(radius: f64, g: usize, lambda: f64, rho: f64, order: u32) -> f64 {
    let ln_h = |r: f64| {
        let poly = if order == 0 {
            0.0
        } else {
            f64::from(order) * (2.0 * PI * r).ln()
        };
        poly + 2.0 * PI * (-0.5 * lambda * r * r + rho * r)
    };
    let k0 = (radius / (g as f64).sqrt()).floor() as u64 + 1;
    let mut total = 0.0f64;
    let mut k = k0;
    loop {
        let r = (k as f64).max(radius);
        let term = (ln_shell_count(k, g) + ln_h(r)).exp();
        total += term;
        // Terms decay like exp(-pi lambda k^2) once k > radius.
        if (k as f64) > radius && (term <= total * 1e-17 || term < 1e-300) {
            break;
        }
        if k > k0 + 1_000_000 {
            return f64::INFINITY;
        }
        k += 1;
    }
    total
}

/// Point past which `h` is decreasing.
fn monotone_from(lambda: f64, rho: f64, order: u32) -> f64 {
    let a = f64::from(order) / (2.0 * PI);
    (rho + (rho * rho + 4.0 * lambda * a).sqrt()) / (2.0 * lambda)
}

fn search_radius(g: usize, lambda: f64, rho: f64, order: u32, eps: f64) -> Result<(f64, f64)> {
    if !(eps >= EPS_FLOOR) {
        return Err(Error::ToleranceTooTight {
            eps,
            floor: EPS_FLOOR,
        });
    }
    let cap = max_radius();
    let lo_start = monotone_from(lambda, rho, order).max(1.0);
    if lo_start > cap {
        return Err(Error::ToleranceUnreachable { eps, cap });
    }
    let t = tail_bound(lo_start, g, lambda, rho, order);
    if t < eps {
        return Ok((lo_start, t));
    }
    let mut lo = lo_start;
    let mut hi = lo_start;
    let mut t_hi;
    loop {
        hi *= 2.0;
        if hi > cap {
            hi = cap;
            t_hi = tail_bound(hi, g, lambda, rho, order);
            if t_hi < eps {
                break;
            }
            return Err(Error::ToleranceUnreachable { eps, cap });
        }
        t_hi = tail_bound(hi, g, lambda, rho, order);
        if t_hi < eps {
            break;
        }
        lo = hi;
    }
    for _ in 0..48 {
        if hi - lo < 1e-3 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let t_mid = tail_bound(mid, g, lambda, rho, order);
        if t_mid < eps {
            hi = mid;
            t_hi = t_mid;
        } else {
            lo = mid;
        }
    }
    Ok((hi, t_hi))
}

/// Radius `R` such that the lattice-sum tail of the `a`-th `u`-derivative of
/// theta beyond `|n| > R` is below `eps` in absolute value.
pub fn truncation_radius(p: &ThetaPoint, a: &MultiIndex, eps: f64) -> Result<TruncationBudget> {
    if a.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: a.dim(),
        });
    }
    budget_for_order(p, a.order(), eps)
}

pub(crate) fn budget_for_order(p: &ThetaPoint, order: u32, eps: f64) -> Result<TruncationBudget> {
    let lambda = p.b().lambda_min();
    if !(lambda > 0.0) {
        return Err(Error::NonPositiveDefinite { lambda_min: lambda });
    }
    let (radius, tail) = search_radius(p.dim(), lambda, p.re_u_norm(), order, eps)?;
    let shell_count = super::lattice::ball(p.dim(), radius).shell_count();
    Ok(TruncationBudget {
        eps,
        radius,
        tail_bound: tail,
        shell_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theta::SiegelMatrix;

    fn unit_point() -> ThetaPoint {
        ThetaPoint::real(&[0.0], SiegelMatrix::from_real_rows(&[vec![1.0]]).unwrap()).unwrap()
    }

    /// Explicit tail `sum_{|n| > r} e^{-pi n^2}` for the g = 1, B = 1 case.
    fn explicit_tail(r: f64) -> f64 {
        (1..60)
            .filter(|&n| n as f64 > r)
            .map(|n| 2.0 * (-PI * (n * n) as f64).exp())
            .sum()
    }

    #[test]
    fn radius_for_tight_tolerance() {
        let b = truncation_radius(&unit_point(), &MultiIndex::zero(1), 1e-12).unwrap();
        assert!(b.radius <= 6.0, "radius {}", b.radius);
        assert!(b.tail_bound < 1e-12);
        assert!(explicit_tail(b.radius) < 1e-12);
    }

    #[test]
    fn radius_one_for_loose_tolerance() {
        let b = truncation_radius(&unit_point(), &MultiIndex::zero(1), 0.5).unwrap();
        assert_eq!(b.radius, 1.0);
        // Only n = 0 summed; the true tail is 0.0864...
        assert!(explicit_tail(1.0) < 0.5);
    }

    #[test]
    fn bound_dominates_explicit_tail() {
        for &r in &[1.0, 1.5, 2.0, 2.7, 3.0, 4.2] {
            // In one dimension the shell bound is exact up to rounding.
            let bound = tail_bound(r, 1, 1.0, 0.0, 0);
            assert!(bound >= explicit_tail(r) * (1.0 - 1e-12), "r = {r}");
        }
    }

    #[test]
    fn scaling_b_by_four_halves_radius() {
        let b = SiegelMatrix::from_real_rows(&[vec![0.05, 0.01], vec![0.01, 0.04]]).unwrap();
        let p = ThetaPoint::origin(b.clone());
        let p4 = ThetaPoint::origin(b.scaled(4.0).unwrap());
        let r = budget_for_order(&p, 0, 1e-12).unwrap().radius;
        let r4 = budget_for_order(&p4, 0, 1e-12).unwrap().radius;
        let ratio = r / r4;
        assert!((1.7..2.3).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn refuses_tolerance_below_floor() {
        let err = truncation_radius(&unit_point(), &MultiIndex::zero(1), 1e-15).unwrap_err();
        assert!(matches!(err, Error::ToleranceTooTight { .. }));
    }

    #[test]
    fn unreachable_beyond_cap() {
        let b = SiegelMatrix::from_real_rows(&[vec![1e-11]]).unwrap();
        let err = budget_for_order(&ThetaPoint::origin(b), 0, 1e-12).unwrap_err();
        assert!(matches!(err, Error::ToleranceUnreachable { .. }));
    }
}
