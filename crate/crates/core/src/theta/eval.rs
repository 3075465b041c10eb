//! Lattice-sum evaluation of theta and its `u`-derivatives.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

use super::lattice::{ball, LatticeBall};
use super::truncation::{budget_for_order, TruncationBudget};
use super::types::{MultiIndex, ThetaPoint};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Exponents `2 pi (-1/2 n^T B n + n^T u)` over a lattice ball.
pub(crate) fn exponents(p: &ThetaPoint, pts: &LatticeBall) -> Vec<Complex64> {
    let g = p.dim();
    let b = p.b();
    let u = p.u();
    let mut out = Vec::with_capacity(pts.len());
    for n in pts.iter() {
        let mut quad = ZERO;
        for i in 0..g {
            if n[i] == 0 {
                continue;
            }
            let ni = n[i] as f64;
            quad += b.get(i, i) * (ni * ni);
            for j in (i + 1)..g {
                if n[j] != 0 {
                    quad += b.get(i, j) * (2.0 * ni * n[j] as f64);
                }
            }
        }
        let lin: Complex64 = n.iter().zip(u).map(|(&k, z)| z * k as f64).sum();
        out.push((lin - quad * 0.5) * (2.0 * PI));
    }
    out
}

/// All `u`-derivatives of theta up to a fixed total order, from a single
/// pass over the lattice.
///
/// Sums are stored relative to a real scale: `D^a theta = (2 pi)^|a| *
/// exp(scale) * sums[a]`, so ratios such as moments never overflow.
#[derive(Debug, Clone)]
pub struct ThetaSums {
    indices: Vec<MultiIndex>,
    sums: Vec<Complex64>,
    abs_sum: f64,
    scale: f64,
    budget: TruncationBudget,
    max_order: u32,
    centered: bool,
}

impl ThetaSums {
    /// Evaluates every `D^a theta` with `|a| <= max_order` to absolute error
    /// `eps`.
    pub fn compute(p: &ThetaPoint, max_order: u32, eps: f64) -> Result<Self> {
        let indices = MultiIndex::graded(p.dim(), max_order);
        Self::compute_for(p, indices, eps)
    }

    /// Like [`compute`](Self::compute) but for an explicit list of indices.
    /// The list must be closed under decrementing the first nonzero entry
    /// (any graded list is); missing parents are added.
    pub fn compute_for(p: &ThetaPoint, indices: Vec<MultiIndex>, eps: f64) -> Result<Self> {
        Self::build(p, indices, eps, None)
    }

    /// Sums of `(n - c)^a w_n` instead of `n^a w_n`. The ratios returned by
    /// [`raw_moment`](Self::raw_moment) are then moments about `c`; with `c`
    /// the mean they are central moments, free of the cancellation that the
    /// binomial expansion suffers when the mean is large.
    pub fn centered(
        p: &ThetaPoint,
        max_order: u32,
        eps: f64,
        center: &[Complex64],
    ) -> Result<Self> {
        if center.len() != p.dim() {
            return Err(Error::DimensionMismatch {
                expected: p.dim(),
                got: center.len(),
            });
        }
        Self::build(p, MultiIndex::graded(p.dim(), max_order), eps, Some(center))
    }

    fn build(
        p: &ThetaPoint,
        indices: Vec<MultiIndex>,
        eps: f64,
        center: Option<&[Complex64]>,
    ) -> Result<Self> {
        let g = p.dim();
        for a in &indices {
            if a.dim() != g {
                return Err(Error::DimensionMismatch {
                    expected: g,
                    got: a.dim(),
                });
            }
        }
        let indices = close_under_parents(g, indices);
        let max_order = indices.iter().map(|a| a.order()).max().unwrap_or(0);
        let budget = budget_for_order(p, max_order, eps)?;
        let pts = ball(g, budget.radius);
        let z = exponents(p, &pts);
        let scale = z.iter().map(|w| w.re).fold(f64::NEG_INFINITY, f64::max);

        // Each index (except 0) is parent + e_j.
        let links: Vec<(usize, usize)> = indices
            .iter()
            .map(|a| {
                let Some(j) = a.as_slice().iter().position(|&x| x > 0) else {
                    return (usize::MAX, 0);
                };
                let mut parent = a.as_slice().to_vec();
                parent[j] -= 1;
                let pi = indices
                    .iter()
                    .position(|b| b.as_slice() == parent.as_slice())
                    .expect("closed under parents");
                (pi, j)
            })
            .collect();

        let mut sums = vec![ZERO; indices.len()];
        let mut abs_sum = 0.0;
        match center {
            None => {
                let mut mono = vec![0.0f64; indices.len()];
                for (n, zn) in pts.iter().zip(&z) {
                    let w = (zn - scale).exp();
                    abs_sum += w.norm();
                    for k in 0..indices.len() {
                        let (pi, j) = links[k];
                        mono[k] = if pi == usize::MAX {
                            1.0
                        } else {
                            mono[pi] * n[j] as f64
                        };
                        sums[k] += w * mono[k];
                    }
                }
            }
            Some(c) => {
                let mut mono = vec![ZERO; indices.len()];
                for (n, zn) in pts.iter().zip(&z) {
                    let w = (zn - scale).exp();
                    abs_sum += w.norm();
                    for k in 0..indices.len() {
                        let (pi, j) = links[k];
                        mono[k] = if pi == usize::MAX {
                            Complex64::new(1.0, 0.0)
                        } else {
                            mono[pi] * (n[j] as f64 - c[j])
                        };
                        sums[k] += w * mono[k];
                    }
                }
            }
        }
        Ok(Self {
            indices,
            sums,
            abs_sum,
            scale,
            budget,
            max_order,
            centered: center.is_some(),
        })
    }

    pub fn budget(&self) -> &TruncationBudget {
        &self.budget
    }

    pub fn max_order(&self) -> u32 {
        self.max_order
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    fn position(&self, a: &MultiIndex) -> Result<usize> {
        self.indices
            .iter()
            .position(|b| b == a)
            .ok_or_else(|| Error::InvalidMultiIndex(format!("{a} not in table")))
    }

    /// `sum_n n^a w_n` with `w_n` scaled by `exp(-scale)`.
    pub fn scaled_sum(&self, a: &MultiIndex) -> Result<Complex64> {
        Ok(self.sums[self.position(a)?])
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// `theta(u, B)`.
    pub fn theta(&self) -> Complex64 {
        self.sums[0] * self.scale.exp()
    }

    /// Principal logarithm of theta, computed without overflow.
    pub fn log_theta(&self) -> Complex64 {
        self.sums[0].ln() + self.scale
    }

    /// Ratio `|theta| / sum |w_n|`; small values flag cancellation.
    pub fn conditioning(&self) -> f64 {
        self.sums[0].norm() / self.abs_sum
    }

    /// Mixed partial `D^a_u theta`.
    pub fn du(&self, a: &MultiIndex) -> Result<Complex64> {
        if self.centered && a.order() > 0 {
            return Err(Error::InvalidArgument(
                "derivatives need uncentered sums".into(),
            ));
        }
        let s = self.scaled_sum(a)?;
        Ok(s * (2.0 * PI).powi(a.order() as i32) * self.scale.exp())
    }

    /// `D^a theta / theta` scaled by `(2 pi)^-|a|`, i.e. `E[X^a]` for the
    /// associated distribution.
    pub fn raw_moment(&self, a: &MultiIndex) -> Result<Complex64> {
        Ok(self.scaled_sum(a)? / self.sums[0])
    }

    /// `D^a theta / theta` (no `2 pi` scaling).
    pub fn ratio(&self, a: &MultiIndex) -> Result<Complex64> {
        Ok(self.raw_moment(a)? * (2.0 * PI).powi(a.order() as i32))
    }
}

fn close_under_parents(g: usize, indices: Vec<MultiIndex>) -> Vec<MultiIndex> {
    let mut out: Vec<MultiIndex> = Vec::new();
    let mut stack = indices;
    stack.push(MultiIndex::zero(g));
    while let Some(a) = stack.pop() {
        if out.contains(&a) {
            continue;
        }
        if let Some(j) = a.as_slice().iter().position(|&x| x > 0) {
            let mut parent = a.as_slice().to_vec();
            parent[j] -= 1;
            stack.push(MultiIndex::new(parent));
        }
        out.push(a);
    }
    out.sort_by(|a, b| {
        a.order()
            .cmp(&b.order())
            .then_with(|| b.as_slice().cmp(a.as_slice()))
    });
    out
}

/// `theta(u, B)` to absolute error `eps`.
pub fn theta(p: &ThetaPoint, eps: f64) -> Result<Complex64> {
    Ok(ThetaSums::compute(p, 0, eps)?.theta())
}

/// Mixed partial `d^|a| theta / du_1^a_1 ... du_g^a_g` to absolute error `eps`.
pub fn theta_du(a: &MultiIndex, p: &ThetaPoint, eps: f64) -> Result<Complex64> {
    if a.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: a.dim(),
        });
    }
    ThetaSums::compute_for(p, vec![a.clone()], eps)?.du(a)
}

/// `d theta / d B_ij` through the heat equation. Indices are zero-based with
/// `i <= j`; an off-diagonal derivative moves `B_ij` and `B_ji` together.
pub fn theta_db(i: usize, j: usize, p: &ThetaPoint, eps: f64) -> Result<Complex64> {
    let g = p.dim();
    if i > j || j >= g {
        return Err(Error::InvalidArgument(format!(
            "B-derivative index ({i}, {j}) must satisfy i <= j < {g}"
        )));
    }
    let a = MultiIndex::unit(g, i).add(&MultiIndex::unit(g, j));
    let d2 = theta_du(&a, p, eps)?;
    Ok(if i == j {
        -d2 / (4.0 * PI)
    } else {
        -d2 / (2.0 * PI)
    })
}
