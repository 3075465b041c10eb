//! Evaluate theta and its derivatives with a certified truncation radius.
//!
//! Run with `cargo run --example theta_eval`.

use num_complex::Complex64;
use theta_gauss::theta::{theta, theta_db, theta_du, truncation_radius};
use theta_gauss::{MultiIndex, SiegelMatrix, ThetaPoint};

fn main() -> theta_gauss::Result<()> {
    let b = SiegelMatrix::from_rows(&[
        vec![Complex64::new(1.1, 0.2), Complex64::new(0.3, -0.1)],
        vec![Complex64::new(0.3, -0.1), Complex64::new(0.9, 0.4)],
    ])?;
    let p = ThetaPoint::new(
        vec![Complex64::new(0.1, 0.2), Complex64::new(-0.3, 0.05)],
        b,
    )?;

    let budget = truncation_radius(&p, &MultiIndex::zero(2), 1e-12)?;
    println!(
        "radius {:.3} ({} shells), tail bound {:.2e}",
        budget.radius, budget.shell_count, budget.tail_bound
    );

    println!("theta        = {}", theta(&p, 1e-12)?);
    println!(
        "d theta/du_1 = {}",
        theta_du(&MultiIndex::new(vec![1, 0]), &p, 1e-12)?
    );
    println!("d theta/dB_12 = {}", theta_db(0, 1, &p, 1e-12)?);
    Ok(())
}
