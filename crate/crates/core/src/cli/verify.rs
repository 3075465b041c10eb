//! Built-in invariant checks run by `theta-gauss verify`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::distribution::DiscreteGaussian;
use crate::error::Result;
use crate::fitting::{fit, forward_moments, CanonicalPoint, MomentData};
use crate::geometry::{kummer_quartic_fit, sample_statistical_points, verify_cubic};
use crate::sampler::{chi_square, draw, SamplerConfig};
use crate::theta::{theta, theta_db, MultiIndex, SiegelMatrix, ThetaPoint};

const EPS: f64 = 1e-14;

/// One named property: its measured error and the bound it must stay under.
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.value.is_finite() && self.value <= self.tolerance
    }

    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "passed": self.passed(),
            "value": self.value,
            "tolerance": self.tolerance,
        })
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn genus_two() -> Result<SiegelMatrix> {
    SiegelMatrix::new(
        2,
        vec![c(1.1, 0.2), c(0.3, -0.1), c(0.3, -0.1), c(0.9, 0.4)],
    )
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

fn quasiperiodicity() -> Result<f64> {
    let b = genus_two()?;
    let u = vec![c(0.1, 0.2), c(-0.3, 0.05)];
    let m = [1i64, -1];
    let shift = b.mul_int(&m);
    let moved: Vec<Complex64> = u.iter().zip(&shift).map(|(x, s)| x + s).collect();
    let lhs = theta(&ThetaPoint::new(moved, b.clone())?, EPS)?;
    let lin: Complex64 = u.iter().zip(&m).map(|(x, &k)| x * k as f64).sum();
    let factor = ((b.quad_int(&m) * 0.5 + lin) * (2.0 * PI)).exp();
    let rhs = factor * theta(&ThetaPoint::new(u, b)?, EPS)?;
    Ok(rel(lhs, rhs))
}

fn parity() -> Result<f64> {
    let b = genus_two()?;
    let u = vec![c(0.25, -0.1), c(0.4, 0.3)];
    let neg: Vec<Complex64> = u.iter().map(|z| -z).collect();
    Ok(rel(
        theta(&ThetaPoint::new(neg, b.clone())?, EPS)?,
        theta(&ThetaPoint::new(u, b)?, EPS)?,
    ))
}

fn factorization() -> Result<f64> {
    let b1 = SiegelMatrix::scalar(c(0.8, 0.3))?;
    let b2 = SiegelMatrix::scalar(c(1.3, -0.2))?;
    let (u1, u2) = (c(0.2, 0.1), c(-0.4, 0.7));
    let joint = theta(
        &ThetaPoint::new(vec![u1, u2], SiegelMatrix::block_diagonal(&b1, &b2)?)?,
        EPS,
    )?;
    let t1 = theta(&ThetaPoint::new(vec![u1], b1)?, EPS)?;
    let t2 = theta(&ThetaPoint::new(vec![u2], b2)?, EPS)?;
    Ok(rel(joint, t1 * t2))
}

fn heat_equation() -> Result<f64> {
    let b = genus_two()?;
    let p = ThetaPoint::new(vec![c(0.1, 0.2), c(-0.3, 0.05)], b.clone())?;
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for (i, j) in [(0, 0), (0, 1), (1, 1)] {
        let mut plus = b.entries().to_vec();
        let mut minus = b.entries().to_vec();
        for (r, s) in [(i, j), (j, i)] {
            plus[r * 2 + s] = b.get(r, s) + h;
            minus[r * 2 + s] = b.get(r, s) - h;
        }
        let tp = theta(&p.with_b(SiegelMatrix::new(2, plus)?)?, EPS)?;
        let tm = theta(&p.with_b(SiegelMatrix::new(2, minus)?)?, EPS)?;
        worst = worst.max(rel((tp - tm) / (2.0 * h), theta_db(i, j, &p, EPS)?));
    }
    Ok(worst)
}

fn jacobi() -> Result<f64> {
    let b = 0.7;
    let at = |x: f64| -> Result<Complex64> {
        theta(
            &ThetaPoint::origin(SiegelMatrix::from_real_rows(&[vec![x]])?),
            EPS,
        )
    };
    Ok(rel(at(1.0 / b)?, at(b)? * b.sqrt()))
}

fn normalization() -> Result<f64> {
    let b = genus_two()?;
    let d = DiscreteGaussian::new(ThetaPoint::new(vec![c(0.2, 0.1), c(-0.1, 0.3)], b)?, 1e-13)?;
    let (_, masses) = d.support()?;
    Ok((masses.iter().sum::<Complex64>() - 1.0).norm())
}

fn cumulant_is_covariance() -> Result<f64> {
    let b = SiegelMatrix::from_real_rows(&[vec![0.4, 0.1], vec![0.1, 0.3]])?;
    let d = DiscreteGaussian::new(ThetaPoint::real(&[0.15, -0.2], b)?, 1e-13)?;
    let table = d.moments(2)?;
    let cov = table.covariance()?;
    let mut worst: f64 = 0.0;
    for (i, j, a) in [(0, 0, [2, 0]), (0, 1, [1, 1]), (1, 1, [0, 2])] {
        worst = worst.max((table.cumulant(&MultiIndex::from_slice(&a))? - cov[i][j]).norm());
    }
    Ok(worst)
}

fn entropy_matches_support() -> Result<f64> {
    let b = SiegelMatrix::from_real_rows(&[vec![0.3]])?;
    let d = DiscreteGaussian::new(ThetaPoint::real(&[0.1], b)?, 1e-13)?;
    let (_, masses) = d.support()?;
    let direct: f64 = masses
        .iter()
        .map(|p| p.re)
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.ln())
        .sum();
    Ok((d.entropy()?.value.re - direct).abs())
}

fn translation() -> Result<f64> {
    let b = SiegelMatrix::from_real_rows(&[vec![0.5, 0.2], vec![0.2, 0.6]])?;
    let d = DiscreteGaussian::new(ThetaPoint::real(&[0.1, 0.3], b)?, 1e-13)?;
    let n = [3i64, -2];
    let moved = d.translate(&[1, 1], &n)?;
    let (mu, _) = d.mean_cov()?;
    let (mu2, _) = moved.mean_cov()?;
    Ok((0..2)
        .map(|i| (mu2[i] - mu[i] - n[i] as f64).norm())
        .fold(0.0, f64::max))
}

fn standard_fit() -> Result<f64> {
    let report = fit(&MomentData::new(vec![0.0], vec![vec![1.0]])?, 1e-10)?;
    Ok((report.params.b()[0][0] - 1.0 / (2.0 * PI)).abs())
}

fn fit_round_trip() -> Result<f64> {
    let truth = CanonicalPoint::new(vec![0.2, -0.1], vec![vec![0.35, 0.05], vec![0.05, 0.25]])?;
    let report = fit(&forward_moments(&truth)?, 1e-10)?;
    Ok(report.params.max_abs_diff(&truth))
}

/// Chi-square statistic divided by its 0.999 critical value.
fn sampler_goodness() -> Result<f64> {
    let p = CanonicalPoint::new(vec![0.3], vec![vec![0.2]])?;
    let sample = draw(&p, 10_000, SamplerConfig::new(1e-12, 0)?)?;
    let chi = chi_square(&sample, &p)?;
    Ok(chi.statistic / chi.critical_value(0.999))
}

fn sampler_determinism() -> Result<f64> {
    let p = CanonicalPoint::new(vec![0.1, 0.0], vec![vec![0.3, 0.1], vec![0.1, 0.4]])?;
    let cfg = SamplerConfig::new(1e-12, 7)?;
    let a = draw(&p, 500, cfg)?;
    let b = draw(&p, 500, cfg)?;
    Ok(if a == b { 0.0 } else { 1.0 })
}

fn cubic_identity() -> Result<f64> {
    Ok(verify_cubic(c(0.2, 0.15), c(1.0, 0.3))?.max())
}

fn kummer_quartic() -> Result<f64> {
    let b = SiegelMatrix::new(2, vec![c(1.0, 0.1), c(0.3, 0.2), c(0.3, 0.2), c(1.2, -0.1)])?;
    let pts = sample_statistical_points(2, &b, 60, 0)?;
    Ok(kummer_quartic_fit(&b, &pts)?.residual)
}

type Probe = fn() -> Result<f64>;

const CHECKS: &[(&str, Probe, f64)] = &[
    ("theta.quasiperiodicity", quasiperiodicity, 1e-10),
    ("theta.parity", parity, 1e-12),
    ("theta.factorization", factorization, 1e-12),
    ("theta.heat_equation", heat_equation, 1e-6),
    ("theta.jacobi_identity", jacobi, 1e-12),
    ("distribution.normalization", normalization, 1e-12),
    (
        "distribution.second_cumulant_is_covariance",
        cumulant_is_covariance,
        1e-12,
    ),
    (
        "distribution.entropy_matches_support",
        entropy_matches_support,
        1e-10,
    ),
    ("distribution.translation_shifts_mean", translation, 1e-10),
    ("fitting.standard_gaussian", standard_fit, 1e-6),
    ("fitting.round_trip", fit_round_trip, 1e-7),
    ("sampler.chi_square_ratio", sampler_goodness, 1.0),
    ("sampler.determinism", sampler_determinism, 0.0),
    ("geometry.cubic_identity", cubic_identity, 1e-8),
    ("geometry.kummer_quartic_residual", kummer_quartic, 1e-8),
];

/// Runs every check; a check that errors is reported with an infinite value.
pub fn run_all() -> Vec<Check> {
    CHECKS
        .iter()
        .map(|&(name, probe, tolerance)| Check {
            name,
            value: probe().unwrap_or(f64::INFINITY),
            tolerance,
        })
        .collect()
}
