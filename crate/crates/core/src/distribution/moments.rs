//! Raw moments, central moments and cumulants of a discrete Gaussian.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::theta::{MultiIndex, ThetaPoint, ThetaSums};

/// Which family of moments a [`MomentKey`] addresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MomentKind {
    /// `E[X^a]`
    Moment,
    /// `E[(X - mu)^a]`
    Central,
    /// `kappa_a`
    Cumulant,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MomentKey {
    pub a: MultiIndex,
    pub kind: MomentKind,
}

impl MomentKey {
    pub fn new(a: MultiIndex, kind: MomentKind) -> Self {
        Self { a, kind }
    }
}

/// Every moment, central moment and cumulant with `|a| <= max_order`,
/// indexed in graded order.
#[derive(Debug, Clone)]
pub struct MomentTable {
    g: usize,
    max_order: u32,
    indices: Vec<MultiIndex>,
    raw: Vec<Complex64>,
    central: Vec<Complex64>,
    cumulants: Vec<Complex64>,
    log_theta: Complex64,
    conditioning: f64,
}

impl MomentTable {
    pub(crate) fn compute(p: &ThetaPoint, max_order: u32, eps: f64) -> Result<Self> {
        let g = p.dim();
        let sums = ThetaSums::compute(p, max_order.max(1), eps)?;
        let indices = MultiIndex::graded(g, max_order);
        let raw: Vec<Complex64> = indices
            .iter()
            .map(|a| sums.raw_moment(a))
            .collect::<Result<_>>()?;
        let mean: Vec<Complex64> = (0..g)
            .map(|i| sums.raw_moment(&MultiIndex::unit(g, i)))
            .collect::<Result<_>>()?;
        let central: Vec<Complex64> = if max_order >= 2 {
            let c = ThetaSums::centered(p, max_order, eps, &mean)?;
            indices
                .iter()
                .map(|a| {
                    if a.order() == 1 {
                        Ok(Complex64::new(0.0, 0.0))
                    } else {
                        c.raw_moment(a)
                    }
                })
                .collect::<Result<_>>()?
        } else {
            indices
                .iter()
                .map(|a| Complex64::new(if a.order() == 0 { 1.0 } else { 0.0 }, 0.0))
                .collect()
        };
        let mut cumulants = cumulants_from_moments(&indices, &central);
        for (a, k) in indices.iter().zip(cumulants.iter_mut()) {
            if a.order() == 1 {
                let i = a.as_slice().iter().position(|&x| x == 1).unwrap();
                *k = mean[i];
            }
        }
        Ok(Self {
            g,
            max_order,
            indices,
            raw,
            central,
            cumulants,
            log_theta: sums.log_theta(),
            conditioning: sums.conditioning(),
        })
    }

    pub fn dim(&self) -> usize {
        self.g
    }

    pub fn max_order(&self) -> u32 {
        self.max_order
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    /// Ratio `|theta| / sum |summand|` at evaluation time.
    pub fn conditioning(&self) -> f64 {
        self.conditioning
    }

    pub fn log_theta(&self) -> Complex64 {
        self.log_theta
    }

    fn position(&self, a: &MultiIndex) -> Result<usize> {
        if a.dim() != self.g {
            return Err(Error::DimensionMismatch {
                expected: self.g,
                got: a.dim(),
            });
        }
        if a.order() > self.max_order {
            return Err(Error::InvalidMultiIndex(format!(
                "{a} exceeds table order {}",
                self.max_order
            )));
        }
        Ok(self.indices.iter().position(|b| b == a).unwrap())
    }

    pub fn moment(&self, a: &MultiIndex) -> Result<Complex64> {
        Ok(self.raw[self.position(a)?])
    }

    pub fn central_moment(&self, a: &MultiIndex) -> Result<Complex64> {
        Ok(self.central[self.position(a)?])
    }

    pub fn cumulant(&self, a: &MultiIndex) -> Result<Complex64> {
        if a.order() == 0 {
            return Err(Error::InvalidMultiIndex("cumulants need |a| >= 1".into()));
        }
        Ok(self.cumulants[self.position(a)?])
    }

    pub fn get(&self, key: &MomentKey) -> Result<Complex64> {
        match key.kind {
            MomentKind::Moment => self.moment(&key.a),
            MomentKind::Central => self.central_moment(&key.a),
            MomentKind::Cumulant => self.cumulant(&key.a),
        }
    }

    pub fn mean(&self) -> Vec<Complex64> {
        (0..self.g).map(|i| self.raw[1 + i]).collect()
    }

    /// Covariance matrix; needs `max_order >= 2`.
    pub fn covariance(&self) -> Result<Vec<Vec<Complex64>>> {
        let g = self.g;
        let mut cov = vec![vec![Complex64::new(0.0, 0.0); g]; g];
        for i in 0..g {
            for j in i..g {
                let a = MultiIndex::unit(g, i).add(&MultiIndex::unit(g, j));
                let v = self.central_moment(&a)?;
                cov[i][j] = v;
                cov[j][i] = v;
            }
        }
        Ok(cov)
    }

    /// `(2 pi)^|a| kappa_a`, i.e. `D^a_u log theta`.
    pub fn log_derivative(&self, a: &MultiIndex) -> Result<Complex64> {
        Ok(self.cumulant(a)? * (2.0 * PI).powi(a.order() as i32))
    }
}

/// Multivariate moment-to-cumulant recursion. For `a = a' + e_j`,
///
/// `mu_a = sum_{b <= a'} C(a', b) kappa_{b + e_j} mu_{a' - b}`,
///
/// solved for `kappa_a` in graded order. `moments` must be indexed like
/// `indices` (a graded list) with `moments[0] = 1`.
pub fn cumulants_from_moments(indices: &[MultiIndex], moments: &[Complex64]) -> Vec<Complex64> {
    let pos = |a: &MultiIndex| indices.iter().position(|b| b == a);
    let mut kappa = vec![Complex64::new(0.0, 0.0); indices.len()];
    for (k, a) in indices.iter().enumerate() {
        if a.order() == 0 {
            continue;
        }
        let j = a.as_slice().iter().position(|&x| x > 0).unwrap();
        let ej = MultiIndex::unit(a.dim(), j);
        let a_prime = a.checked_sub(&ej).unwrap();
        let mut acc = moments[k];
        for b in a_prime.sub_indices() {
            if b == a_prime {
                continue;
            }
            let kb = pos(&b.add(&ej)).expect("graded list closed downward");
            let rest = pos(&a_prime.checked_sub(&b).unwrap()).unwrap();
            acc -= kappa[kb] * moments[rest] * a_prime.binomial(&b);
        }
        kappa[k] = acc;
    }
    kappa
}
