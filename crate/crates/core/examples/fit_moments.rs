//! Fit canonical parameters to a mean and covariance, then check the fit by
//! mapping back to moments.
//!
//! Run with `cargo run --example fit_moments`.

use theta_gauss::fitting::{fit, forward_moments, MomentData};

fn main() -> theta_gauss::Result<()> {
    let target = MomentData::new(vec![0.3, -1.2], vec![vec![2.0, 0.5], vec![0.5, 1.0]])?;
    let report = fit(&target, 1e-10)?;
    println!("Newton iterations: {}", report.iterations);
    println!("u = {:?}", report.params.u());
    println!("B = {:?}", report.params.b());

    let back = forward_moments(&report.params)?;
    println!("max moment error {:.2e}", back.max_abs_diff(&target));
    Ok(())
}
