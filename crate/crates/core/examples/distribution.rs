//! Probabilities, moments, cumulants and entropy of a discrete Gaussian.
//!
//! Run with `cargo run --example distribution`.

use theta_gauss::{DiscreteGaussian, MultiIndex, SiegelMatrix, ThetaPoint};

fn main() -> theta_gauss::Result<()> {
    let b = SiegelMatrix::from_real_rows(&[vec![0.4, 0.1], vec![0.1, 0.3]])?;
    let d = DiscreteGaussian::with_default_eps(ThetaPoint::real(&[0.15, -0.2], b)?)?;

    for n in [[0, 0], [1, 0], [0, -1], [2, 1]] {
        println!("P(X = {n:?}) = {:.6}", d.pmf(&n)?.re);
    }

    let table = d.moments(3)?;
    println!(
        "mean       = {:?}",
        table.mean().iter().map(|z| z.re).collect::<Vec<_>>()
    );
    for row in table.covariance()? {
        println!(
            "covariance   {:?}",
            row.iter().map(|z| z.re).collect::<Vec<_>>()
        );
    }
    let k = table.cumulant(&MultiIndex::new(vec![2, 1]))?;
    println!("kappa_(2,1) = {:.6e}", k.re);
    println!("entropy    = {:.6}", d.entropy()?.value.re);
    Ok(())
}
