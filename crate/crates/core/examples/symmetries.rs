//! Parameter changes that leave the law unchanged or move it by a lattice
//! automorphism.
//!
//! Run with `cargo run --example symmetries`.

use num_complex::Complex64;
use theta_gauss::{DiscreteGaussian, SiegelMatrix, ThetaPoint};

fn main() -> theta_gauss::Result<()> {
    let b = SiegelMatrix::from_rows(&[
        vec![Complex64::new(0.8, 2.3), Complex64::new(0.2, -1.4)],
        vec![Complex64::new(0.2, -1.4), Complex64::new(0.6, 0.9)],
    ])?;
    let d = DiscreteGaussian::with_default_eps(ThetaPoint::new(
        vec![Complex64::new(0.1, 3.6), Complex64::new(-0.2, -0.7)],
        b,
    )?)?;

    let (canon, witness) = d.canonicalize()?;
    println!("canonical B = {:?}", canon.point().b().rows());
    println!("witness a = {:?}, beta = {:?}", witness.a, witness.beta);
    println!("same law: {}", d.same_distribution(&canon));

    // X + (1, -2)
    let moved = d.translate(&[0, 0], &[1, -2])?;
    println!(
        "P(X = 0) = {:.6}, P(X + n = n) = {:.6}",
        d.pmf(&[0, 0])?,
        moved.pmf(&[1, -2])?
    );

    // alpha X with alpha = [[1, 1], [0, 1]]
    let image = d.unimodular(&[vec![1, 1], vec![0, 1]])?;
    println!(
        "P(X = (1, 1)) = {:.6}, P(aX = (2, 1)) = {:.6}",
        d.pmf(&[1, 1])?,
        image.pmf(&[2, 1])?
    );
    Ok(())
}
