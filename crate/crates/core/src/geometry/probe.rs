//! Randomised search for pairs of distinct points with equal low moments.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::distribution::MomentTable;
use crate::error::{Error, Result};
use crate::theta::{SiegelMatrix, ThetaPoint};

use super::hypersurface::{random_u, NEAR_DIVISOR};
use super::GEOMETRY_EPS;

/// Moment vectors closer than this count as a collision.
pub const COLLISION_TOL: f64 = 1e-6;

/// Pairs closer than this on the torus are resampled.
pub const DISTINCT_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub g: usize,
    pub trials: usize,
    pub collisions: usize,
    /// Smallest infinity-norm gap between order-<=3 moment vectors.
    pub min_separation: f64,
    /// Candidate pairs discarded for being near the divisor or equivalent.
    pub resampled: usize,
}

/// Distance from `u' - u` to the period lattice `iZ^g + B Z^g`, in the
/// real coordinates `(s, t)` of `w = i s + B t`.
fn torus_distance(b: &SiegelMatrix, w: &[Complex64]) -> Result<f64> {
    let g = b.dim();
    let re = DMatrix::from_fn(g, g, |i, j| b.get(i, j).re);
    let im = DMatrix::from_fn(g, g, |i, j| b.get(i, j).im);
    let t = re
        .lu()
        .solve(&DVector::from_iterator(g, w.iter().map(|z| z.re)))
        .ok_or(Error::NonPositiveDefinite { lambda_min: 0.0 })?;
    let s = DVector::from_iterator(g, w.iter().map(|z| z.im)) - im * &t;
    Ok(t.iter()
        .chain(s.iter())
        .map(|x| (x - x.round()).abs())
        .fold(0.0, f64::max))
}

fn moment_vector(t: &MomentTable) -> Vec<Complex64> {
    t.indices()
        .iter()
        .filter(|a| a.order() >= 1)
        .map(|a| t.moment(a).unwrap())
        .collect()
}

/// Draws `trials` pairs of distinct points of the torus `C^g / (iZ^g + B Z^g)`
/// off the divisor and compares their moments of order at most three.
pub fn identifiability_probe(b: &SiegelMatrix, trials: usize, seed: u64) -> Result<ProbeReport> {
    let g = b.dim();
    if g > 2 {
        return Err(Error::InvalidArgument(format!(
            "probe supports g in {{1, 2}}, got {g}"
        )));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut report = ProbeReport {
        g,
        trials,
        collisions: 0,
        min_separation: f64::INFINITY,
        resampled: 0,
    };
    let mut done = 0;
    while done < trials {
        let u1 = random_u(b, &mut rng);
        let u2 = random_u(b, &mut rng);
        let w: Vec<Complex64> = u2.iter().zip(&u1).map(|(a, c)| a - c).collect();
        if torus_distance(b, &w)? < DISTINCT_TOL {
            report.resampled += 1;
            continue;
        }
        let t1 = MomentTable::compute(&ThetaPoint::new(u1, b.clone())?, 3, GEOMETRY_EPS)?;
        let t2 = MomentTable::compute(&ThetaPoint::new(u2, b.clone())?, 3, GEOMETRY_EPS)?;
        if t1.conditioning() < NEAR_DIVISOR || t2.conditioning() < NEAR_DIVISOR {
            report.resampled += 1;
            continue;
        }
        let gap = moment_vector(&t1)
            .iter()
            .zip(moment_vector(&t2))
            .map(|(a, c)| (a - c).norm())
            .fold(0.0, f64::max);
        report.min_separation = report.min_separation.min(gap);
        if gap <= COLLISION_TOL {
            report.collisions += 1;
        }
        done += 1;
    }
    Ok(report)
}
