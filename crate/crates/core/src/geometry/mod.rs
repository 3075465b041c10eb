//! Statistical maps and the algebraic identities satisfied by their images.
//!
//! The degree-`d` statistical map sends `u` to the projective point with
//! coordinates `theta^d kappa_a` for `|a| <= d`, `|a| != 1`. Expanding the
//! cumulants over set partitions shows every coordinate is a polynomial in
//! the derivatives `D^b theta`, so the map extends across the theta divisor.

mod cubic;
mod divisor;
mod hypersurface;
mod probe;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::theta::{MultiIndex, ThetaPoint, ThetaSums};

pub use cubic::{
    cubic_coefficients, verify_cubic, verify_cubic_with, CubicCoefficients, CubicResiduals,
};
pub use divisor::{find_theta_zero, find_theta_zero_in, gauss_map, ZeroSearch};
pub use hypersurface::{
    fit_hypersurface, kummer_quartic_fit, monomials, sample_statistical_points, HypersurfaceFit,
};
pub use probe::{identifiability_probe, ProbeReport, COLLISION_TOL, DISTINCT_TOL};

/// Truncation tolerance for geometric evaluations.
pub const GEOMETRY_EPS: f64 = 1e-14;

/// Tolerance of [`ProjectivePoint::approx_eq`].
pub const PROJECTIVE_TOL: f64 = 1e-8;

/// Below this every coordinate counts as zero.
pub const INDETERMINATE_TOL: f64 = 1e-12;

/// Homogeneous coordinates, not all zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectivePoint {
    coords: Vec<Complex64>,
}

impl ProjectivePoint {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        let max = coords.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if !(max > 0.0)
            || coords
                .iter()
                .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::IndeterminatePoint);
        }
        Ok(Self { coords })
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    fn pivot(&self) -> usize {
        self.coords
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .map(|(k, _)| k)
            .unwrap()
    }

    /// Coordinates divided by the one of largest modulus.
    pub fn normalized(&self) -> Vec<Complex64> {
        let z = self.coords[self.pivot()];
        self.coords.iter().map(|x| x / z).collect()
    }

    /// Infinity-norm distance after dividing both points by their
    /// coordinate at the pivot of `self`.
    pub fn distance(&self, other: &ProjectivePoint) -> f64 {
        if self.len() != other.len() {
            return f64::INFINITY;
        }
        let k = self.pivot();
        let zo = other.coords[k];
        if zo.norm() == 0.0 {
            return f64::INFINITY;
        }
        let zs = self.coords[k];
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a / zs - b / zo).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &ProjectivePoint) -> bool {
        self.distance(other) < PROJECTIVE_TOL && other.distance(self) < PROJECTIVE_TOL
    }
}

/// Index set of the degree-`d` map: `|a| <= d`, `|a| != 1`, graded order.
pub fn statistical_indices(g: usize, d: u32) -> Vec<MultiIndex> {
    MultiIndex::graded(g, d)
        .into_iter()
        .filter(|a| a.order() != 1)
        .collect()
}

/// Set partitions of `{0, .., k-1}` as block-label vectors.
fn set_partitions(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut labels = vec![0usize; k];
    fn rec(i: usize, max: usize, labels: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == labels.len() {
            out.push(labels.clone());
            return;
        }
        for l in 0..=max + 1 {
            if i == 0 && l > 0 {
                break;
            }
            labels[i] = l;
            rec(i + 1, max.max(l), labels, out);
        }
    }
    if k == 0 {
        out.push(Vec::new());
    } else {
        rec(0, 0, &mut labels, &mut out);
    }
    out
}

/// `theta^d kappa_a exp(-d scale)` from scaled sums `S_b = sum n^b w_n`:
/// `sum over partitions of (-1)^(k-1) (k-1)! S_0^(d-k) prod_blocks S_b`.
pub(crate) fn cumulant_polynomial(sums: &ThetaSums, a: &MultiIndex, d: u32) -> Result<Complex64> {
    let g = a.dim();
    let s0 = sums.scaled_sum(&MultiIndex::zero(g))?;
    if a.order() == 0 {
        return Ok(s0.powu(d));
    }
    // One label per unit of a.
    let vars: Vec<usize> = a
        .as_slice()
        .iter()
        .enumerate()
        .flat_map(|(i, &k)| std::iter::repeat_n(i, k as usize))
        .collect();
    let mut total = Complex64::new(0.0, 0.0);
    for labels in set_partitions(vars.len()) {
        let k = labels.iter().max().map_or(0, |m| m + 1);
        let mut blocks = vec![vec![0u32; g]; k];
        for (v, &l) in vars.iter().zip(&labels) {
            blocks[l][*v] += 1;
        }
        let mut term = s0.powu(d - k as u32);
        for b in blocks {
            term *= sums.scaled_sum(&MultiIndex::new(b))?;
        }
        let coef = (1..k).map(|x| x as f64).product::<f64>() * if k % 2 == 1 { 1.0 } else { -1.0 };
        total += term * coef;
    }
    Ok(total)
}

/// Coordinates before the indeterminacy check.
fn raw_map(d: u32, p: &ThetaPoint) -> Result<Vec<Complex64>> {
    let sums = ThetaSums::compute(p, d, GEOMETRY_EPS)?;
    statistical_indices(p.dim(), d)
        .iter()
        .map(|a| cumulant_polynomial(&sums, a, d))
        .collect()
}

/// Degree-`d` statistical map at `p`. Valid on the theta divisor wherever it
/// is smooth.
pub fn statistical_map(d: u32, p: &ThetaPoint) -> Result<ProjectivePoint> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!(
            "map degree must be at least 2, got {d}"
        )));
    }
    // The common factor exp(d * scale) is dropped.
    let coords = raw_map(d, p)?;
    let max = coords.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max < INDETERMINATE_TOL {
        return Err(Error::IndeterminatePoint);
    }
    ProjectivePoint::new(coords)
}

#[cfg(test)]
mod tests;
