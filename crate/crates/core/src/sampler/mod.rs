//! Exact sampling on a certified support, and Pearson goodness of fit.
//!
//! The support is the lattice ball whose complement carries less than
//! `tail_eps` of the mass. Draws are made by inverse CDF over that ball in
//! shell order, so the law of a draw is the pmf restricted to the ball and
//! renormalised; its total variation distance to the true pmf is below
//! `tail_eps`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::fitting::CanonicalPoint;
use crate::theta::lattice::{ball, LatticeBall};
use crate::theta::{truncation_radius, MultiIndex, ThetaSums, EPS_FLOOR};

/// Generator and method, recorded in every sample's metadata.
pub const ALGORITHM: &str = "chacha20-inverse-cdf";

/// Smallest expected count for a Pearson cell that is not pooled.
pub const MIN_EXPECTED: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerConfig {
    tail_eps: f64,
    seed: u64,
}

impl SamplerConfig {
    pub fn new(tail_eps: f64, seed: u64) -> Result<Self> {
        if !(tail_eps > 0.0 && tail_eps < 1e-3) {
            return Err(Error::InvalidArgument(format!(
                "tail_eps must lie in (0, 1e-3), got {tail_eps:e}"
            )));
        }
        Ok(Self { tail_eps, seed })
    }

    pub fn tail_eps(&self) -> f64 {
        self.tail_eps
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            tail_eps: 1e-12,
            seed: 0,
        }
    }
}

/// Radius outside which the pmf has total mass below `tail_eps`.
///
/// On the real slice `theta >= 1` (the `n = 0` term), so an absolute
/// tail bound of `tail_eps * theta` on the summands suffices.
pub fn support_radius(p: &CanonicalPoint, tail_eps: f64) -> Result<f64> {
    let point = p.to_theta_point()?;
    let theta = ThetaSums::compute(&point, 0, EPS_FLOOR.max(tail_eps))?
        .theta()
        .re;
    let budget = truncation_radius(&point, &MultiIndex::zero(p.dim()), tail_eps * theta)?;
    Ok(budget.radius)
}

/// Masses on the support, in shell order.
struct Support {
    pts: Arc<LatticeBall>,
    masses: Vec<f64>,
}

impl Support {
    fn new(p: &CanonicalPoint, tail_eps: f64) -> Result<Self> {
        let radius = support_radius(p, tail_eps)?;
        let pts = ball(p.dim(), radius);
        let u = p.u();
        let b = p.b();
        let logs: Vec<f64> = pts
            .iter()
            .map(|n| {
                let mut quad = 0.0;
                for i in 0..n.len() {
                    for j in 0..n.len() {
                        quad += b[i][j] * (n[i] * n[j]) as f64;
                    }
                }
                let lin: f64 = n.iter().zip(u).map(|(&k, x)| k as f64 * x).sum();
                2.0 * PI * (lin - 0.5 * quad)
            })
            .collect();
        let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
        let total: f64 = w.iter().sum();
        Ok(Self {
            pts,
            masses: w.iter().map(|x| x / total).collect(),
        })
    }
}

/// A reusable inverse-CDF table.
pub struct Sampler {
    support: Support,
    cdf: Vec<f64>,
    cfg: SamplerConfig,
}

impl Sampler {
    pub fn new(p: &CanonicalPoint, cfg: SamplerConfig) -> Result<Self> {
        let support = Support::new(p, cfg.tail_eps)?;
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = support
            .masses
            .iter()
            .map(|m| {
                acc += m;
                acc
            })
            .collect();
        // Guard against the last entry rounding below 1.
        if let Some(last) = cdf.last_mut() {
            *last = 1.0;
        }
        Ok(Self { support, cdf, cfg })
    }

    pub fn support_len(&self) -> usize {
        self.cdf.len()
    }

    pub fn radius_squared(&self) -> i64 {
        self.support.pts.r2_max()
    }

    pub fn config(&self) -> &SamplerConfig {
        &self.cfg
    }

    /// `count` draws from a generator seeded with `cfg.seed`.
    pub fn draw(&self, count: usize) -> Vec<Vec<i64>> {
        let mut rng = ChaCha20Rng::seed_from_u64(self.cfg.seed);
        (0..count)
            .map(|_| {
                let x = uniform53(&mut rng);
                let k = self
                    .cdf
                    .partition_point(|&c| c <= x)
                    .min(self.cdf.len() - 1);
                self.support.pts.point(k).to_vec()
            })
            .collect()
    }
}

/// Uniform double in `[0, 1)` from the top 53 bits of a 64-bit word.
fn uniform53(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// `count` independent draws; reproducible given `cfg`.
pub fn draw(p: &CanonicalPoint, count: usize, cfg: SamplerConfig) -> Result<Vec<Vec<i64>>> {
    if count == 0 {
        return Err(Error::InvalidArgument("count must be at least 1".into()));
    }
    Ok(Sampler::new(p, cfg)?.draw(count))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub cells: usize,
}

impl ChiSquare {
    /// Upper `level` quantile of the chi-square law with `dof` degrees.
    pub fn critical_value(&self, level: f64) -> f64 {
        chi_square_quantile(self.dof, level)
    }

    /// Whether the statistic stays below the `level` quantile.
    pub fn passes(&self, level: f64) -> bool {
        self.dof == 0 || self.statistic <= self.critical_value(level)
    }
}

pub fn chi_square_quantile(dof: usize, level: f64) -> f64 {
    ChiSquared::new(dof as f64)
        .map(|d| d.inverse_cdf(level))
        .unwrap_or(f64::NAN)
}

/// Pearson statistic of `sample` against the pmf of `p`. Cells with expected
/// count below 5 are pooled into one cell together with all mass outside
/// the support; a pooled cell still below 5 is merged into the smallest
/// remaining cell.
pub fn chi_square(sample: &[Vec<i64>], p: &CanonicalPoint) -> Result<ChiSquare> {
    if sample.is_empty() {
        return Err(Error::TooFewSamples);
    }
    let g = p.dim();
    if let Some(bad) = sample.iter().find(|x| x.len() != g) {
        return Err(Error::DimensionMismatch {
            expected: g,
            got: bad.len(),
        });
    }
    let support = Support::new(p, 1e-12)?;
    let n = sample.len() as f64;
    let mut observed: HashMap<usize, f64> = HashMap::new();
    let mut outside = 0.0;
    for x in sample {
        match support.pts.index_of(x) {
            Some(k) => *observed.entry(k).or_default() += 1.0,
            None => outside += 1.0,
        }
    }
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let mut pooled = (outside, 0.0);
    for (k, m) in support.masses.iter().enumerate() {
        let obs = observed.get(&k).copied().unwrap_or(0.0);
        let expected = n * m;
        if expected >= MIN_EXPECTED {
            cells.push((obs, expected));
        } else {
            pooled.0 += obs;
            pooled.1 += expected;
        }
    }
    if cells.is_empty() {
        return Err(Error::TooFewSamples);
    }
    if pooled.1 >= MIN_EXPECTED {
        cells.push(pooled);
    } else if pooled.0 > 0.0 || pooled.1 > 0.0 {
        let smallest = cells
            .iter_mut()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty");
        smallest.0 += pooled.0;
        smallest.1 += pooled.1;
    }
    let statistic = cells.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    Ok(ChiSquare {
        statistic,
        dof: cells.len() - 1,
        cells: cells.len(),
    })
}
