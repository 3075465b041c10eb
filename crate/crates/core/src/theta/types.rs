use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Eigenvalues below this are treated as a degenerate real part.
pub const MIN_EIGENVALUE: f64 = 1e-12;

/// A point of the Siegel right half-space: a symmetric complex `g x g`
/// matrix whose real part is positive definite.
///
/// The smallest eigenvalue of `Re B` is computed once at construction and
/// drives every truncation bound.
#[derive(Clone, PartialEq)]
pub struct SiegelMatrix {
    g: usize,
    entries: Vec<Complex64>,
    lambda_min: f64,
}

impl SiegelMatrix {
    /// Builds from row-major entries. Symmetry is checked exactly.
    pub fn new(g: usize, entries: Vec<Complex64>) -> Result<Self> {
        if g == 0 {
            return Err(Error::InvalidDimension(0));
        }
        if entries.len() != g * g {
            return Err(Error::DimensionMismatch {
                expected: g * g,
                got: entries.len(),
            });
        }
        for i in 0..g {
            for j in (i + 1)..g {
                if entries[i * g + j] != entries[j * g + i] {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
            }
        }
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidArgument("non-finite matrix entry".into()));
        }
        let re = DMatrix::from_fn(g, g, |i, j| entries[i * g + j].re);
        let lambda_min = SymmetricEigen::new(re)
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if !(lambda_min > MIN_EIGENVALUE) {
            return Err(Error::NonPositiveDefinite { lambda_min });
        }
        Ok(Self {
            g,
            entries,
            lambda_min,
        })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let g = rows.len();
        let mut entries = Vec::with_capacity(g * g);
        for row in rows {
            if row.len() != g {
                return Err(Error::DimensionMismatch {
                    expected: g,
                    got: row.len(),
                });
            }
            entries.extend_from_slice(row);
        }
        Self::new(g, entries)
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn scalar(b: Complex64) -> Result<Self> {
        Self::new(1, vec![b])
    }

    pub fn diagonal(d: &[Complex64]) -> Result<Self> {
        let g = d.len();
        let mut entries = vec![Complex64::new(0.0, 0.0); g * g];
        for (i, &x) in d.iter().enumerate() {
            entries[i * g + i] = x;
        }
        Self::new(g, entries)
    }

    /// `diag(a, b)` as a block-diagonal matrix.
    pub fn block_diagonal(a: &SiegelMatrix, b: &SiegelMatrix) -> Result<Self> {
        let g = a.g + b.g;
        let mut entries = vec![Complex64::new(0.0, 0.0); g * g];
        for i in 0..a.g {
            for j in 0..a.g {
                entries[i * g + j] = a.get(i, j);
            }
        }
        for i in 0..b.g {
            for j in 0..b.g {
                entries[(a.g + i) * g + a.g + j] = b.get(i, j);
            }
        }
        Self::new(g, entries)
    }

    pub fn dim(&self) -> usize {
        self.g
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.g + j]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        self.entries.chunks(self.g).map(|r| r.to_vec()).collect()
    }

    /// Smallest eigenvalue of the real part.
    pub fn lambda_min(&self) -> f64 {
        self.lambda_min
    }

    pub fn is_real(&self) -> bool {
        self.entries.iter().all(|z| z.im == 0.0)
    }

    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::new(self.g, self.entries.iter().map(|z| z * s).collect())
    }

    /// `B * v` for a complex vector.
    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.g)
            .map(|i| (0..self.g).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// `B * n` for an integer vector.
    pub fn mul_int(&self, n: &[i64]) -> Vec<Complex64> {
        (0..self.g)
            .map(|i| (0..self.g).map(|j| self.get(i, j) * n[j] as f64).sum())
            .collect()
    }

    /// Quadratic form `n^T B n`.
    pub fn quad_int(&self, n: &[i64]) -> Complex64 {
        let bn = self.mul_int(n);
        n.iter().zip(bn).map(|(&a, b)| b * a as f64).sum()
    }

    /// Principal submatrix on the index range `[start, end)`.
    pub fn block(&self, start: usize, end: usize) -> Result<Self> {
        let k = end - start;
        let mut entries = Vec::with_capacity(k * k);
        for i in start..end {
            for j in start..end {
                entries.push(self.get(i, j));
            }
        }
        Self::new(k, entries)
    }
}

impl fmt::Debug for SiegelMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SiegelMatrix")
            .field("g", &self.g)
            .field("rows", &self.rows())
            .field("lambda_min", &self.lambda_min)
            .finish()
    }
}

/// Argument `(u, B)` of the theta function and of every distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaPoint {
    u: Vec<Complex64>,
    b: SiegelMatrix,
}

impl ThetaPoint {
    pub fn new(u: Vec<Complex64>, b: SiegelMatrix) -> Result<Self> {
        if u.len() != b.dim() {
            return Err(Error::DimensionMismatch {
                expected: b.dim(),
                got: u.len(),
            });
        }
        if u.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("non-finite u entry".into()));
        }
        Ok(Self { u, b })
    }

    pub fn real(u: &[f64], b: SiegelMatrix) -> Result<Self> {
        Self::new(u.iter().map(|&x| Complex64::new(x, 0.0)).collect(), b)
    }

    /// `u = 0`.
    pub fn origin(b: SiegelMatrix) -> Self {
        let g = b.dim();
        Self {
            u: vec![Complex64::new(0.0, 0.0); g],
            b,
        }
    }

    pub fn dim(&self) -> usize {
        self.b.dim()
    }

    pub fn u(&self) -> &[Complex64] {
        &self.u
    }

    pub fn b(&self) -> &SiegelMatrix {
        &self.b
    }

    pub fn is_real(&self) -> bool {
        self.b.is_real() && self.u.iter().all(|z| z.im == 0.0)
    }

    pub fn with_u(&self, u: Vec<Complex64>) -> Result<Self> {
        Self::new(u, self.b.clone())
    }

    pub fn with_b(&self, b: SiegelMatrix) -> Result<Self> {
        Self::new(self.u.clone(), b)
    }

    /// Euclidean norm of `Re u`.
    pub fn re_u_norm(&self) -> f64 {
        self.u.iter().map(|z| z.re * z.re).sum::<f64>().sqrt()
    }
}

/// Exponent vector `a` indexing derivatives, moments and cumulants.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(a: Vec<u32>) -> Self {
        Self(a)
    }

    pub fn zero(g: usize) -> Self {
        Self(vec![0; g])
    }

    /// Unit vector `e_i`.
    pub fn unit(g: usize, i: usize) -> Self {
        let mut a = vec![0; g];
        a[i] = 1;
        Self(a)
    }

    pub fn from_slice(a: &[u32]) -> Self {
        Self(a.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    /// Total order `|a|`.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `a! = a_1! ... a_g!`
    pub fn factorial(&self) -> f64 {
        self.0
            .iter()
            .map(|&k| (1..=k).map(f64::from).product::<f64>())
            .product()
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &MultiIndex) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(MultiIndex)
    }

    /// `prod_i C(a_i, b_i)`.
    pub fn binomial(&self, b: &MultiIndex) -> f64 {
        self.0
            .iter()
            .zip(&b.0)
            .map(|(&n, &k)| binomial(n, k))
            .product()
    }

    /// `v^a` for a complex vector.
    pub fn power(&self, v: &[Complex64]) -> Complex64 {
        self.0
            .iter()
            .zip(v)
            .fold(Complex64::new(1.0, 0.0), |acc, (&k, z)| acc * z.powu(k))
    }

    /// `n^a` for an integer vector.
    pub fn power_int(&self, n: &[i64]) -> f64 {
        self.0
            .iter()
            .zip(n)
            .map(|(&k, &x)| (x as f64).powi(k as i32))
            .product()
    }

    /// All `b` with `0 <= b <= self`, in lexicographic order.
    pub fn sub_indices(&self) -> Vec<MultiIndex> {
        let mut out = vec![MultiIndex::zero(self.dim())];
        for (i, &ai) in self.0.iter().enumerate() {
            let mut next = Vec::with_capacity(out.len() * (ai as usize + 1));
            for b in &out {
                for k in 0..=ai {
                    let mut c = b.clone();
                    c.0[i] = k;
                    next.push(c);
                }
            }
            out = next;
        }
        out
    }

    /// Every multi-index of dimension `g` with `|a| <= d`, in graded order:
    /// by total order, then lexicographically descending within an order
    /// (`(2,0), (1,1), (0,2)`).
    pub fn graded(g: usize, d: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        for k in 0..=d {
            out.extend(Self::of_order(g, k));
        }
        out
    }

    /// Every multi-index with `|a| = k`, lexicographically descending.
    pub fn of_order(g: usize, k: u32) -> Vec<MultiIndex> {
        fn rec(g: usize, k: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if prefix.len() == g - 1 {
                prefix.push(k);
                out.push(MultiIndex(prefix.clone()));
                prefix.pop();
                return;
            }
            for first in (0..=k).rev() {
                prefix.push(first);
                rec(g, k - first, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if g == 0 {
            return out;
        }
        rec(g, k, &mut Vec::with_capacity(g), &mut out);
        out
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

pub(crate) fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}
