//! Marginals and the group actions that map the family to itself.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::theta::{SiegelMatrix, ThetaPoint, ThetaSums};

use super::intmat::unimodular_inverse;
use super::DiscreteGaussian;

/// Tolerance on canonical coordinates for [`DiscreteGaussian::same_distribution`].
pub const SAME_DISTRIBUTION_TOL: f64 = 1e-10;

/// Split `Z^g = Z^g1 x Z^(g - g1)` into a leading and a trailing block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitSpec {
    g1: usize,
    g: usize,
}

impl SplitSpec {
    pub fn new(g1: usize, g: usize) -> Result<Self> {
        if g1 == 0 || g1 >= g {
            return Err(Error::InvalidSplit { g1, g });
        }
        Ok(Self { g1, g })
    }

    pub fn g1(&self) -> usize {
        self.g1
    }

    pub fn g2(&self) -> usize {
        self.g - self.g1
    }
}

/// Integer data `(a, beta)` of the action
/// `(u, B) -> (u + i a + i/2 diag(beta), B - i beta)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub a: Vec<i64>,
    pub beta: Vec<Vec<i64>>,
}

impl Witness {
    pub fn is_trivial(&self) -> bool {
        self.a.iter().all(|&x| x == 0) && self.beta.iter().flatten().all(|&x| x == 0)
    }
}

fn act(p: &ThetaPoint, w: &Witness) -> Result<ThetaPoint> {
    let g = p.dim();
    let u: Vec<Complex64> = (0..g)
        .map(|k| p.u()[k] + Complex64::new(0.0, w.a[k] as f64 + 0.5 * w.beta[k][k] as f64))
        .collect();
    let mut entries = p.b().entries().to_vec();
    for i in 0..g {
        for j in 0..g {
            entries[i * g + j] -= Complex64::new(0.0, w.beta[i][j] as f64);
        }
    }
    ThetaPoint::new(u, SiegelMatrix::new(g, entries)?)
}

fn square(m: &[Vec<i64>], g: usize) -> Result<()> {
    if m.len() != g || m.iter().any(|r| r.len() != g) {
        return Err(Error::DimensionMismatch {
            expected: g,
            got: m.len(),
        });
    }
    Ok(())
}

impl DiscreteGaussian {
    /// Mass of `X_1 = n1` for the leading block, from
    /// `theta(u1, B11) theta(u2 - B21 n1, B22) / theta(u, B) * p_1(n1)`.
    pub fn marginal_pmf(&self, s: SplitSpec, n1: &[i64]) -> Result<Complex64> {
        let g = self.dim();
        if s.g != g {
            return Err(Error::InvalidSplit { g1: s.g1, g });
        }
        if n1.len() != s.g1 {
            return Err(Error::DimensionMismatch {
                expected: s.g1,
                got: n1.len(),
            });
        }
        let b = self.point().b();
        let u = self.point().u();
        let b11 = b.block(0, s.g1)?;
        let b22 = b.block(s.g1, g)?;
        // The theta(u1, B11) factors cancel against p_1's normaliser.
        let quad = b11.quad_int(n1);
        let lin: Complex64 = n1.iter().zip(&u[..s.g1]).map(|(&k, z)| z * k as f64).sum();
        let head = (lin - quad * 0.5) * (2.0 * PI);
        let u2: Vec<Complex64> = (s.g1..g)
            .map(|j| {
                let shift: Complex64 = (0..s.g1).map(|i| b.get(j, i) * n1[i] as f64).sum();
                u[j] - shift
            })
            .collect();
        let tail = ThetaSums::compute(&ThetaPoint::new(u2, b22)?, 0, self.eps())?;
        let tail0 = tail.scaled_sum(&crate::theta::MultiIndex::zero(s.g2()))?;
        Ok(tail0 * (head + tail.scale() - self.log_theta()).exp())
    }

    /// Distribution at `(u + i m + B n, B)`: the law of `X + n`.
    pub fn translate(&self, m: &[i64], n: &[i64]) -> Result<Self> {
        self.check_len(m.len())?;
        self.check_len(n.len())?;
        let bn = self.point().b().mul_int(n);
        let u = self
            .point()
            .u()
            .iter()
            .zip(m)
            .zip(bn)
            .map(|((z, &mk), s)| z + Complex64::new(0.0, mk as f64) + s)
            .collect();
        Self::new(self.point().with_u(u)?, self.eps())
    }

    /// Law of `alpha X` for `alpha` in `GL(g, Z)`: the point
    /// `(alpha^-t u, alpha^-t B alpha^-1)`.
    pub fn unimodular(&self, alpha: &[Vec<i64>]) -> Result<Self> {
        let g = self.dim();
        square(alpha, g)?;
        let inv = unimodular_inverse(alpha)?;
        // inv_t[i][k] = (alpha^-1)[k][i]
        let u = (0..g)
            .map(|i| (0..g).map(|k| self.point().u()[k] * inv[k][i] as f64).sum())
            .collect();
        let b = self.point().b();
        let mut entries = vec![Complex64::new(0.0, 0.0); g * g];
        for i in 0..g {
            for j in i..g {
                let mut s = Complex64::new(0.0, 0.0);
                for k in 0..g {
                    for l in 0..g {
                        s += b.get(k, l) * (inv[k][i] * inv[l][j]) as f64;
                    }
                }
                entries[i * g + j] = s;
                entries[j * g + i] = s;
            }
        }
        Self::new(
            ThetaPoint::new(u, SiegelMatrix::new(g, entries)?)?,
            self.eps(),
        )
    }

    /// Representative with every entry of `Im B` and `Im u` in `[0, 1)`,
    /// together with the witness mapping `self` onto it.
    pub fn canonicalize(&self) -> Result<(Self, Witness)> {
        let g = self.dim();
        let b = self.point().b();
        let beta: Vec<Vec<i64>> = (0..g)
            .map(|i| (0..g).map(|j| b.get(i, j).im.floor() as i64).collect())
            .collect();
        let a = (0..g)
            .map(|k| -(self.point().u()[k].im + 0.5 * beta[k][k] as f64).floor() as i64)
            .collect();
        let w = Witness { a, beta };
        if w.is_trivial() {
            return Ok((self.clone(), w));
        }
        let p = act(self.point(), &w)?;
        Ok((Self::new(p, self.eps())?, w))
    }

    /// Applies the witness action; the distribution is unchanged.
    pub fn act(&self, w: &Witness) -> Result<Self> {
        self.check_len(w.a.len())?;
        square(&w.beta, self.dim())?;
        for i in 0..self.dim() {
            for j in 0..i {
                if w.beta[i][j] != w.beta[j][i] {
                    return Err(Error::NotSymmetric { row: j, col: i });
                }
            }
        }
        Self::new(act(self.point(), w)?, self.eps())
    }

    /// Whether both parameter points lie in one orbit of the integer action,
    /// i.e. their canonical forms agree to [`SAME_DISTRIBUTION_TOL`].
    ///
    /// The integer data are recovered by rounding, which makes the test
    /// insensitive to canonical coordinates sitting on either side of an
    /// integer boundary.
    pub fn same_distribution(&self, other: &Self) -> bool {
        let g = self.dim();
        if other.dim() != g {
            return false;
        }
        let tol = SAME_DISTRIBUTION_TOL;
        let (b1, b2) = (self.point().b(), other.point().b());
        let mut beta = vec![vec![0i64; g]; g];
        for i in 0..g {
            for j in 0..g {
                let d = b1.get(i, j) - b2.get(i, j);
                let k = d.im.round();
                if d.re.abs() > tol || (d.im - k).abs() > tol {
                    return false;
                }
                beta[i][j] = k as i64;
            }
        }
        (0..g).all(|k| {
            let d = other.point().u()[k] - self.point().u()[k];
            let im = d.im - 0.5 * beta[k][k] as f64;
            d.re.abs() <= tol && (im - im.round()).abs() <= tol
        })
    }

    /// Whether the two blocks of `s` are independent: the off-diagonal block
    /// of `B` lies in `iZ`.
    pub fn is_independent_split(&self, s: SplitSpec) -> bool {
        let b = self.point().b();
        if s.g != self.dim() {
            return false;
        }
        (0..s.g1).all(|i| {
            (s.g1..s.g).all(|j| {
                let z = b.get(i, j);
                z.re.abs() <= SAME_DISTRIBUTION_TOL
                    && (z.im - z.im.round()).abs() <= SAME_DISTRIBUTION_TOL
            })
        })
    }
}
