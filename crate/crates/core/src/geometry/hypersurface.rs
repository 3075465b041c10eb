//! Fitting a hypersurface through projective points by a null vector of the
//! monomial matrix.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::theta::{MultiIndex, SiegelMatrix, ThetaPoint, ThetaSums};

use super::{statistical_map, ProjectivePoint, GEOMETRY_EPS};

/// Exponents of all degree-`k` monomials in `n` variables.
pub fn monomials(n: usize, k: u32) -> Vec<MultiIndex> {
    MultiIndex::of_order(n, k)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HypersurfaceFit {
    pub exponents: Vec<MultiIndex>,
    /// Null vector, scaled so its largest entry is real and equal to 1.
    pub coeffs: Vec<Complex64>,
    /// Singular values of the row-normalised monomial matrix, ascending.
    pub singular_values: Vec<f64>,
    /// Smallest singular value.
    pub residual: f64,
    /// Second smallest singular value; large values mean the form is unique.
    pub second: f64,
}

impl HypersurfaceFit {
    /// Evaluates the fitted form at a point normalised to unit max-modulus.
    pub fn eval(&self, p: &ProjectivePoint) -> Complex64 {
        let x = p.normalized();
        self.exponents
            .iter()
            .zip(&self.coeffs)
            .map(|(e, c)| c * e.power(&x))
            .sum()
    }
}

/// Degree-`k` form vanishing as nearly as possible on `points`.
pub fn fit_hypersurface(points: &[ProjectivePoint], k: u32) -> Result<HypersurfaceFit> {
    let Some(first) = points.first() else {
        return Err(Error::RankDeficientInput("no points".into()));
    };
    let n = first.len();
    if let Some(bad) = points.iter().find(|p| p.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: bad.len(),
        });
    }
    let exponents = monomials(n, k);
    let cols = exponents.len();
    if points.len() < cols {
        return Err(Error::RankDeficientInput(format!(
            "{} points for {cols} monomials",
            points.len()
        )));
    }
    let mut m = DMatrix::<Complex64>::zeros(points.len(), cols);
    for (r, p) in points.iter().enumerate() {
        let x = p.normalized();
        let row: Vec<Complex64> = exponents.iter().map(|e| e.power(&x)).collect();
        let norm = row.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for (c, z) in row.into_iter().enumerate() {
            m[(r, c)] = z / norm;
        }
    }
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested V^H");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    let singular_values: Vec<f64> = order.iter().map(|&k| svd.singular_values[k]).collect();
    // A x = 0 for x a column of V, i.e. a conjugated row of V^H.
    let null: Vec<Complex64> = v_t.row(order[0]).iter().map(|z| z.conj()).collect();
    let big = null
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap();
    let coeffs = null.iter().map(|z| z / big).collect();
    Ok(HypersurfaceFit {
        exponents,
        coeffs,
        residual: singular_values[0],
        second: singular_values.get(1).copied().unwrap_or(f64::INFINITY),
        singular_values,
    })
}

/// Quartic through points of the degree-2 map of a genus-two `B`.
pub fn kummer_quartic_fit(b: &SiegelMatrix, points: &[ProjectivePoint]) -> Result<HypersurfaceFit> {
    if b.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: b.dim(),
        });
    }
    if let Some(bad) = points.iter().find(|p| p.len() != 4) {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: bad.len(),
        });
    }
    fit_hypersurface(points, 4)
}

/// Random `u = i s + B t` with `s, t` uniform in `[0, 1)^g`: a uniform
/// point of the fundamental domain.
pub(crate) fn random_u(b: &SiegelMatrix, rng: &mut ChaCha20Rng) -> Vec<Complex64> {
    let g = b.dim();
    let s: Vec<f64> = (0..g).map(|_| rng.random()).collect();
    let t: Vec<Complex64> = (0..g).map(|_| Complex64::new(rng.random(), 0.0)).collect();
    b.mul_vec(&t)
        .into_iter()
        .zip(s)
        .map(|(z, x)| z + Complex64::new(0.0, x))
        .collect()
}

/// Conditioning below which a sampled point counts as near the divisor.
pub(crate) const NEAR_DIVISOR: f64 = 1e-3;

/// Images under the degree-`d` map of `count` random points of the
/// fundamental domain, avoiding a neighbourhood of the divisor.
pub fn sample_statistical_points(
    d: u32,
    b: &SiegelMatrix,
    count: usize,
    seed: u64,
) -> Result<Vec<ProjectivePoint>> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let p = ThetaPoint::new(random_u(b, &mut rng), b.clone())?;
        if ThetaSums::compute(&p, 0, GEOMETRY_EPS)?.conditioning() < NEAR_DIVISOR {
            continue;
        }
        out.push(statistical_map(d, &p)?);
    }
    Ok(out)
}
