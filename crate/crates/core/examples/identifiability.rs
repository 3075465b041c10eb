//! Search for two parameter points with equal moments up to order three.
//!
//! Run with `cargo run --release --example identifiability`.

use num_complex::Complex64;
use theta_gauss::geometry::identifiability_probe;
use theta_gauss::SiegelMatrix;

fn main() -> theta_gauss::Result<()> {
    let probes = [
        SiegelMatrix::scalar(Complex64::new(1.1, 0.2))?,
        SiegelMatrix::from_real_rows(&[vec![1.0, 0.3], vec![0.3, 1.0]])?,
    ];
    for b in &probes {
        let r = identifiability_probe(b, 200, 1)?;
        println!(
            "g = {}: {} collisions in {} pairs, closest moment vectors {:.2e} apart ({} pairs redrawn)",
            r.g, r.collisions, r.trials, r.min_separation, r.resampled
        );
    }
    Ok(())
}
