//! Fitting from an observed sample.

use crate::error::{Error, Result};

use super::{fit, FitReport, MomentData};

/// Normalisation of the sample covariance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CovarianceEstimator {
    /// Divide by `N - 1`.
    #[default]
    Unbiased,
    /// Divide by `N`; the plug-in maximum-likelihood estimate.
    MaximumLikelihood,
}

/// Sample mean and covariance of integer observations.
pub fn sample_moments(data: &[Vec<i64>], estimator: CovarianceEstimator) -> Result<MomentData> {
    let Some(first) = data.first() else {
        return Err(Error::DegenerateSample);
    };
    let g = first.len();
    if g == 0 {
        return Err(Error::InvalidDimension(0));
    }
    if let Some(bad) = data.iter().find(|x| x.len() != g) {
        return Err(Error::DimensionMismatch {
            expected: g,
            got: bad.len(),
        });
    }
    let n = data.len();
    let denom = match estimator {
        CovarianceEstimator::Unbiased if n < 2 => return Err(Error::DegenerateSample),
        CovarianceEstimator::Unbiased => (n - 1) as f64,
        CovarianceEstimator::MaximumLikelihood => n as f64,
    };
    let mut mu = vec![0.0; g];
    for x in data {
        for (m, &v) in mu.iter_mut().zip(x) {
            *m += v as f64;
        }
    }
    mu.iter_mut().for_each(|m| *m /= n as f64);
    let mut sigma = vec![vec![0.0; g]; g];
    for x in data {
        for i in 0..g {
            for j in 0..g {
                sigma[i][j] += (x[i] as f64 - mu[i]) * (x[j] as f64 - mu[j]);
            }
        }
    }
    sigma.iter_mut().flatten().for_each(|s| *s /= denom);
    MomentData::new(mu, sigma).map_err(|e| match e {
        Error::NotPositiveDefinite => Error::DegenerateSample,
        other => other,
    })
}

/// Fits the sample mean and the unbiased sample covariance.
pub fn fit_from_sample(data: &[Vec<i64>], tol: f64) -> Result<FitReport> {
    fit_from_sample_with(data, tol, CovarianceEstimator::default())
}

pub fn fit_from_sample_with(
    data: &[Vec<i64>],
    tol: f64,
    estimator: CovarianceEstimator,
) -> Result<FitReport> {
    fit(&sample_moments(data, estimator)?, tol)
}
