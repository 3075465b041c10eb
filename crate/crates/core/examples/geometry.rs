//! Moment geometry: the genus-one cubic relation, the degree-2 map of a
//! genus-two surface and the quartic through its image.
//!
//! Run with `cargo run --release --example geometry`.

use num_complex::Complex64;
use theta_gauss::geometry::{
    cubic_coefficients, kummer_quartic_fit, sample_statistical_points, statistical_map,
    verify_cubic,
};
use theta_gauss::{SiegelMatrix, ThetaPoint};

fn main() -> theta_gauss::Result<()> {
    let b = Complex64::new(1.0, 0.3);
    let k = cubic_coefficients(b)?;
    println!("kappa_3^2 = 4 kappa_2^3 + a kappa_2^2 + b kappa_2 + c with");
    println!("  a = {:.6}, b = {:.6}, c = {:.6}", k.a, k.b, k.c);
    let r = verify_cubic(Complex64::new(0.2, 0.15), b)?;
    println!(
        "  residuals {:.1e} {:.1e} {:.1e}",
        r.r_cubic, r.r_quartic, r.r_det
    );

    let b2 = SiegelMatrix::from_real_rows(&[vec![1.0, 0.3], vec![0.3, 1.0]])?;
    let p = ThetaPoint::new(
        vec![Complex64::new(0.2, 0.3), Complex64::new(-0.1, 0.15)],
        b2.clone(),
    )?;
    println!(
        "degree-2 image: {:.4?}",
        statistical_map(2, &p)?.normalized()
    );

    let pts = sample_statistical_points(2, &b2, 60, 0)?;
    let quartic = kummer_quartic_fit(&b2, &pts)?;
    println!(
        "quartic through 60 points: smallest singular value {:.1e}, next {:.1e}",
        quartic.residual, quartic.second
    );
    Ok(())
}
