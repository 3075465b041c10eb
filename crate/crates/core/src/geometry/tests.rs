use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use super::*;
use crate::distribution::{DiscreteGaussian, MomentTable};
use crate::theta::{theta, SiegelMatrix};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn point(u: Vec<Complex64>, b: &SiegelMatrix) -> ThetaPoint {
    ThetaPoint::new(u, b.clone()).unwrap()
}

fn genus_two() -> SiegelMatrix {
    SiegelMatrix::from_real_rows(&[vec![1.0, 0.3], vec![0.3, 1.0]]).unwrap()
}

#[test]
fn partitions_are_counted_by_bell_numbers() {
    let counts: Vec<usize> = (0..6).map(|k| set_partitions(k).len()).collect();
    assert_eq!(counts, vec![1, 1, 2, 5, 15, 52]);
}

#[test]
fn partition_polynomial_matches_cumulant_recursion() {
    let b = SiegelMatrix::new(
        2,
        vec![c(0.9, 0.3), c(0.2, -0.4), c(0.2, -0.4), c(1.1, 0.1)],
    )
    .unwrap();
    let p = point(vec![c(0.15, 0.1), c(-0.2, 0.3)], &b);
    let sums = ThetaSums::compute(&p, 4, GEOMETRY_EPS).unwrap();
    let table = MomentTable::compute(&p, 4, GEOMETRY_EPS).unwrap();
    let s0 = sums.scaled_sum(&MultiIndex::zero(2)).unwrap();
    for a in MultiIndex::graded(2, 4).into_iter().skip(1) {
        let poly = cumulant_polynomial(&sums, &a, 4).unwrap() / s0.powu(4);
        let kappa = table.cumulant(&a).unwrap();
        assert!(
            (poly - kappa).norm() < 1e-11 * (1.0 + kappa.norm()),
            "{a}: {poly} vs {kappa}"
        );
    }
}

#[test]
fn coordinate_layout() {
    let idx = statistical_indices(2, 2);
    let raw: Vec<Vec<u32>> = idx.iter().map(|a| a.as_slice().to_vec()).collect();
    assert_eq!(raw, vec![vec![0, 0], vec![2, 0], vec![1, 1], vec![0, 2]]);
    assert_eq!(statistical_indices(3, 4).len(), 35 - 3);
    let b = SiegelMatrix::scalar(c(1.0, 0.0)).unwrap();
    assert!(statistical_map(1, &ThetaPoint::origin(b)).is_err());
}

#[test]
fn degree_two_map_is_even() {
    let b = SiegelMatrix::scalar(c(0.8, 0.3)).unwrap();
    for u in [c(0.2, 0.1), c(-0.35, 0.4), c(0.1, -0.2)] {
        let plus = statistical_map(2, &point(vec![u], &b)).unwrap();
        let minus = statistical_map(2, &point(vec![-u], &b)).unwrap();
        assert_eq!(plus.len(), 2);
        assert!(plus.approx_eq(&minus));
    }
}

#[test]
fn kummer_involution() {
    let b = genus_two();
    let u = vec![c(0.2, 0.3), c(-0.1, 0.15)];
    let minus: Vec<Complex64> = u.iter().map(|z| -z).collect();
    let a = statistical_map(2, &point(u, &b)).unwrap();
    let m = statistical_map(2, &point(minus, &b)).unwrap();
    assert!(a.approx_eq(&m));
}

#[test]
fn degree_three_image_lies_on_the_cubic() {
    let bv = c(1.0, 0.2);
    let b = SiegelMatrix::scalar(bv).unwrap();
    let k = cubic_coefficients(bv).unwrap();
    for u in [c(0.3, 0.1), c(-0.2, 0.35), c(0.05, 0.7)] {
        let x = statistical_map(3, &point(vec![u], &b))
            .unwrap()
            .normalized();
        // Z^2 X = -4 Y^3 + a Y^2 X + b Y X^2 + c X^3
        let (xx, y, z) = (x[0], x[1], x[2]);
        let lhs = z * z * xx;
        let rhs = -4.0 * y * y * y + k.a * y * y * xx + k.b * y * xx * xx + k.c * xx * xx * xx;
        assert!((lhs - rhs).norm() < 1e-9, "u = {u}: {}", (lhs - rhs).norm());
    }
}

#[test]
fn cubic_coefficient_consistency() {
    let k = cubic_coefficients(c(1.0, 0.0)).unwrap();
    for e in [k.e1, k.e2, k.e3] {
        assert!(k.eval_nu(e).norm() < 1e-9 * (1.0 + e.norm().powi(3)));
    }
    assert!((k.a - (k.e1 + k.e2 + k.e3) / (PI * PI)).norm() < 1e-15);
    // B = 1 is fixed by B -> 1/B: e1 = pi and e2 + e3 = 2 pi.
    assert!((k.e1 - PI).norm() < 1e-10);
    assert!((k.e2 + k.e3 - 2.0 * PI).norm() < 1e-10);
    assert!(k.b.norm() > 1e-3);
}

#[test]
fn cubic_examples() {
    let r = verify_cubic(c(0.3, 0.0), c(1.0, 0.0)).unwrap();
    assert!(r.max() < 1e-8, "{r:?}");
    let b = SiegelMatrix::scalar(c(1.0, 0.5)).unwrap();
    let d = DiscreteGaussian::new(point(vec![c(0.3, 0.2)], &b), GEOMETRY_EPS).unwrap();
    let (canon, _) = d.canonicalize().unwrap();
    let r = verify_cubic(canon.point().u()[0], canon.point().b().get(0, 0)).unwrap();
    assert!(r.max() < 1e-7, "{r:?}");
    for bv in [0.5, 1.0, 2.3] {
        let k = cubic_coefficients(c(bv, 0.0)).unwrap();
        let t = MomentTable::compute(
            &point(
                vec![c(0.0, 0.0)],
                &SiegelMatrix::scalar(c(bv, 0.0)).unwrap(),
            ),
            3,
            GEOMETRY_EPS,
        )
        .unwrap();
        let k2 = t.cumulant(&MultiIndex::new(vec![2])).unwrap();
        assert!(t.cumulant(&MultiIndex::new(vec![3])).unwrap().norm() < 1e-14);
        assert!((k2 - k.e1 / (4.0 * PI * PI)).norm() < 1e-14);
        assert!(k.eval(k2).norm() < 1e-10);
    }
}

#[test]
fn ramification_at_even_half_periods() {
    for bv in [0.6, 1.0, 1.7] {
        let b = SiegelMatrix::scalar(c(bv, 0.0)).unwrap();
        for u in [c(0.0, 0.0), c(0.0, 0.5), c(bv / 2.0, 0.0)] {
            let t = MomentTable::compute(&point(vec![u], &b), 3, GEOMETRY_EPS).unwrap();
            assert!(t.cumulant(&MultiIndex::new(vec![3])).unwrap().norm() < 1e-8);
        }
        // The odd half period is the divisor itself.
        assert!(
            theta(&point(vec![c(bv / 2.0, 0.5)], &b), 1e-14)
                .unwrap()
                .norm()
                < 1e-13
        );
    }
}

#[test]
fn genus_one_zero_is_the_odd_half_period() {
    let bv = c(0.9, 0.25);
    let b = SiegelMatrix::scalar(bv).unwrap();
    let u = find_theta_zero(&[c(0.1, 0.1)], &[c(1.0, 0.0)], &b).unwrap()[0];
    let w = u - (c(0.0, 0.5) + bv / 2.0);
    // w must lie in iZ + B Z.
    let t = w.re / bv.re;
    let s = w.im - bv.im * t;
    assert!(
        (t - t.round()).abs() < 1e-9 && (s - s.round()).abs() < 1e-9,
        "u = {u}"
    );
}

#[test]
fn genus_two_zero_on_a_real_line() {
    let b = genus_two();
    let u = find_theta_zero(
        &[c(0.1, 0.0), c(-0.2, 0.0)],
        &[c(0.3, 0.0), c(0.7, 0.0)],
        &b,
    )
    .unwrap();
    assert!(theta(&point(u, &b), 1e-14).unwrap().norm() < 1e-10);
}

#[test]
fn zero_search_can_fail() {
    let b = SiegelMatrix::scalar(c(1.0, 0.0)).unwrap();
    let small = ZeroSearch {
        half_width: 0.1,
        ..ZeroSearch::default()
    };
    assert_eq!(
        find_theta_zero_in(&[c(0.0, 0.0)], &[c(1.0, 0.0)], &b, &small).unwrap_err(),
        Error::NoZeroFound
    );
}

fn divisor_points(b: &SiegelMatrix, count: usize) -> Vec<Vec<Complex64>> {
    let dirs = [
        [c(0.3, 0.0), c(0.7, 0.0)],
        [c(1.0, 0.0), c(-0.4, 0.0)],
        [c(0.5, 0.2), c(0.5, -0.3)],
        [c(0.2, 0.0), c(1.0, 0.0)],
        [c(-0.6, 0.1), c(0.8, 0.0)],
    ];
    let bases = [
        [c(0.1, 0.0), c(-0.2, 0.0)],
        [c(0.0, 0.1), c(0.3, 0.0)],
        [c(0.25, 0.0), c(0.1, 0.05)],
    ];
    let mut out = Vec::new();
    for base in &bases {
        for dir in &dirs {
            if let Ok(u) = find_theta_zero(base, dir, b) {
                out.push(u);
            }
            if out.len() == count {
                return out;
            }
        }
    }
    out
}

#[test]
fn gauss_map_examples() {
    let b = genus_two();
    let pts = divisor_points(&b, 4);
    assert!(pts.len() >= 3);
    for u in &pts {
        let minus: Vec<Complex64> = u.iter().map(|z| -z).collect();
        let gu = gauss_map(u, &b).unwrap();
        assert!(gu.approx_eq(&gauss_map(&minus, &b).unwrap()));
        // u + i m + B n
        let bn = b.mul_vec(&[c(1.0, 0.0), c(-1.0, 0.0)]);
        let moved: Vec<Complex64> = u
            .iter()
            .zip(bn)
            .zip([c(0.0, 2.0), c(0.0, -1.0)])
            .map(|((z, s), m)| z + s + m)
            .collect();
        assert!(gu.approx_eq(&gauss_map(&moved, &b).unwrap()));
    }
    let b1 = SiegelMatrix::scalar(c(1.0, 0.0)).unwrap();
    let g1 = gauss_map(&[c(0.5, 0.5)], &b1).unwrap();
    assert_eq!(g1.len(), 1);
    assert!(matches!(
        gauss_map(&[c(0.1, 0.0)], &b1),
        Err(Error::NotOnDivisor { .. })
    ));
}

#[test]
fn leading_coefficient_is_constant_on_the_divisor() {
    let b = genus_two();
    let pts = divisor_points(&b, 5);
    assert!(pts.len() >= 3);
    for d in [2u32, 3] {
        for a in MultiIndex::of_order(2, d) {
            let ratios: Vec<Complex64> = pts
                .iter()
                .map(|u| {
                    let p = point(u.clone(), &b);
                    let sums = ThetaSums::compute(&p, d, GEOMETRY_EPS).unwrap();
                    let grad: Vec<Complex64> = (0..2)
                        .map(|i| sums.scaled_sum(&MultiIndex::unit(2, i)).unwrap())
                        .collect();
                    cumulant_polynomial(&sums, &a, d).unwrap() / a.power(&grad)
                })
                .collect();
            for r in &ratios[1..] {
                assert!(
                    (r - ratios[0]).norm() < 1e-6 * ratios[0].norm(),
                    "{a}: {r} vs {}",
                    ratios[0]
                );
            }
            // Only the all-singletons partition survives: (-1)^(d-1) (d-1)!.
            let expected = if d == 2 { -1.0 } else { 2.0 };
            assert!((ratios[0] - expected).norm() < 1e-6);
        }
    }
}

#[test]
fn cumulants_have_poles_of_order_a() {
    let b = genus_two();
    let u0 = divisor_points(&b, 1).remove(0);
    let v = [c(0.6, 0.1), c(-0.3, 0.4)];
    for a in [
        MultiIndex::new(vec![2, 0]),
        MultiIndex::new(vec![1, 2]),
        MultiIndex::new(vec![2, 2]),
    ] {
        let scaled: Vec<f64> = [1e-3, 1e-4, 1e-5]
            .iter()
            .map(|&t| {
                let u: Vec<Complex64> = u0.iter().zip(&v).map(|(z, d)| z + d * t).collect();
                let tab = MomentTable::compute(&point(u, &b), a.order(), GEOMETRY_EPS).unwrap();
                tab.cumulant(&a).unwrap().norm() * t.powi(a.order() as i32)
            })
            .collect();
        assert!(scaled[0] > 1e-8, "{a}");
        for s in &scaled[1..] {
            assert!((s / scaled[0] - 1.0).abs() < 0.05, "{a}: {scaled:?}");
        }
    }
}

#[test]
fn map_is_translation_invariant() {
    let b =
        SiegelMatrix::new(2, vec![c(1.0, 0.1), c(0.3, 0.0), c(0.3, 0.0), c(0.8, -0.2)]).unwrap();
    let d =
        DiscreteGaussian::new(point(vec![c(0.2, 0.1), c(-0.1, 0.3)], &b), GEOMETRY_EPS).unwrap();
    let moved = d.translate(&[1, -2], &[1, 1]).unwrap();
    for deg in [2, 3] {
        let a = statistical_map(deg, d.point()).unwrap();
        let m = statistical_map(deg, moved.point()).unwrap();
        assert!(a.approx_eq(&m), "d = {deg}: {}", a.distance(&m));
    }
}

#[test]
fn genus_one_cubic_recovered_by_fit() {
    let bv = c(1.0, 0.3);
    let b = SiegelMatrix::scalar(bv).unwrap();
    let pts = sample_statistical_points(3, &b, 30, 11).unwrap();
    let fit = fit_hypersurface(&pts, 3).unwrap();
    assert!(fit.residual < 1e-8, "{}", fit.residual);
    assert!(fit.second > 1e-4, "{}", fit.second);
    let k = cubic_coefficients(bv).unwrap();
    // Z^2 X + 4 Y^3 - a Y^2 X - b Y X^2 - c X^3 in (X, Y, Z).
    let expected = |e: &[u32]| match e {
        [1, 0, 2] => c(1.0, 0.0),
        [0, 3, 0] => c(4.0, 0.0),
        [1, 2, 0] => -k.a,
        [2, 1, 0] => -k.b,
        [3, 0, 0] => -k.c,
        _ => c(0.0, 0.0),
    };
    let pivot = fit
        .exponents
        .iter()
        .position(|e| e.as_slice() == [0, 3, 0])
        .unwrap();
    let scale = fit.coeffs[pivot] / 4.0;
    for (e, coef) in fit.exponents.iter().zip(&fit.coeffs) {
        assert!((coef / scale - expected(e.as_slice())).norm() < 1e-6, "{e}");
    }
}

#[test]
fn hypersurface_needs_enough_points() {
    let pts = sample_statistical_points(2, &genus_two(), 20, 1).unwrap();
    assert!(matches!(
        kummer_quartic_fit(&genus_two(), &pts),
        Err(Error::RankDeficientInput(_))
    ));
}

#[test]
fn kummer_quartic() {
    let b = genus_two();
    let pts = sample_statistical_points(2, &b, 60, 5).unwrap();
    let fit = kummer_quartic_fit(&b, &pts).unwrap();
    assert_eq!(fit.coeffs.len(), 35);
    assert!(fit.residual < 1e-8, "{:?}", &fit.singular_values[..3]);
    assert!(fit.second > 1e-4, "{:?}", &fit.singular_values[..3]);
    let fresh = sample_statistical_points(2, &b, 5, 99).unwrap();
    for p in &fresh {
        assert!(fit.eval(p).norm() < 1e-7);
    }
}

#[test]
fn small_probes_find_no_collisions() {
    let r1 = identifiability_probe(&SiegelMatrix::scalar(c(1.0, 0.0)).unwrap(), 25, 1).unwrap();
    assert_eq!(r1.collisions, 0);
    assert!(r1.min_separation > COLLISION_TOL);
    let r2 = identifiability_probe(&genus_two(), 25, 2).unwrap();
    assert_eq!(r2.collisions, 0);
}

#[test]
fn translated_pairs_share_central_moments() {
    let b = SiegelMatrix::scalar(c(0.9, 0.0)).unwrap();
    let d = DiscreteGaussian::new(point(vec![c(0.2, 0.1)], &b), GEOMETRY_EPS).unwrap();
    let t = d.translate(&[0], &[2]).unwrap();
    let (m1, m2) = (d.moments(3).unwrap(), t.moments(3).unwrap());
    let e1 = MultiIndex::new(vec![1]);
    assert!((m2.moment(&e1).unwrap() - m1.moment(&e1).unwrap() - 2.0).norm() < 1e-12);
    for k in 2..=3 {
        let a = MultiIndex::new(vec![k]);
        assert!((m2.central_moment(&a).unwrap() - m1.central_moment(&a).unwrap()).norm() < 1e-10);
    }
}

#[test]
fn projective_comparison() {
    let p = ProjectivePoint::new(vec![c(1.0, 0.0), c(0.0, 2.0)]).unwrap();
    let q = ProjectivePoint::new(vec![c(0.0, 3.0), c(-6.0, 0.0)]).unwrap();
    assert!(p.approx_eq(&q));
    let r = ProjectivePoint::new(vec![c(1.0, 0.0), c(0.0, 2.1)]).unwrap();
    assert!(!p.approx_eq(&r));
    assert!(ProjectivePoint::new(vec![c(0.0, 0.0)]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn cubic_identities_hold(ur in -0.5f64..0.5, ui in 0.0f64..1.0, br in 0.6f64..1.6, bi in -0.5f64..0.5) {
        let bv = c(br, bi);
        let b = SiegelMatrix::scalar(bv).unwrap();
        let u = c(ur, ui);
        let cond = ThetaSums::compute(&point(vec![u], &b), 0, GEOMETRY_EPS).unwrap().conditioning();
        prop_assume!(cond > 1e-3);
        let r = verify_cubic(u, bv).unwrap();
        // Rounding in the cancelling terms bounds what the residuals can reach.
        prop_assert!(r.max() < 1e-12 * r.scale, "{:?}", r);
        if r.scale <= 1e6 {
            prop_assert!(r.max() < 1e-8, "{:?}", r);
        }
    }
}
