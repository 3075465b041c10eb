//! Draw from a discrete Gaussian, test the draws, and refit the parameters.
//!
//! Run with `cargo run --release --example sample_and_refit`.

use theta_gauss::fitting::{fit_from_sample, standard_errors, CanonicalPoint};
use theta_gauss::sampler::{chi_square, draw, SamplerConfig};

fn main() -> theta_gauss::Result<()> {
    let truth = CanonicalPoint::new(vec![0.15, -0.1], vec![vec![0.25, 0.05], vec![0.05, 0.2]])?;
    let n = 50_000;
    let sample = draw(&truth, n, SamplerConfig::new(1e-12, 42)?)?;

    let chi = chi_square(&sample, &truth)?;
    println!(
        "chi-square {:.1} on {} dof (99.9% critical value {:.1})",
        chi.statistic,
        chi.dof,
        chi.critical_value(0.999)
    );

    let report = fit_from_sample(&sample, 1e-9)?;
    let se = standard_errors(&truth, n)?;
    println!("fitted u = {:?}", report.params.u());
    println!("fitted B = {:?}", report.params.b());
    println!("standard errors (u, then upper triangle of B) = {se:?}");
    Ok(())
}
