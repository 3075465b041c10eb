use proptest::prelude::*;

use super::*;

// Minimiser for (mu, sigma^2) = (0, 1), from a 30-digit reference solve.
const UNIT_VARIANCE_B: f64 = 0.159_154_909_473_368_2;
const DATA: [i64; 10] = [1, 0, 1, -2, 1, 2, 3, -2, 1, -1];

fn unit_target(g: usize) -> MomentData {
    let sigma = (0..g)
        .map(|i| (0..g).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    MomentData::new(vec![0.0; g], sigma).unwrap()
}

#[test]
fn forward_examples() {
    let p = CanonicalPoint::new(vec![0.0], vec![vec![1.0]]).unwrap();
    let m = forward_moments(&p).unwrap();
    assert!(m.mu()[0].abs() < 1e-15);
    assert!((m.sigma()[0][0] - 0.079_577_471_545_947_7).abs() < 1e-14);
    let diag = CanonicalPoint::new(vec![0.0, 0.0], vec![vec![0.4, 0.0], vec![0.0, 0.9]]).unwrap();
    let m = forward_moments(&diag).unwrap();
    assert!(m.mu().iter().all(|x| x.abs() < 1e-15));
    assert!(m.sigma()[0][1].abs() < 1e-15);
}

#[test]
fn standard_fit() {
    let r = fit(&unit_target(1), 1e-9).unwrap();
    assert!(r.converged);
    assert!(r.params.u()[0].abs() < 1e-9);
    assert!((r.params.b()[0][0] - UNIT_VARIANCE_B).abs() < 1e-9);
    assert!((r.params.b()[0][0] - 0.1591549).abs() < 1e-6);
}

#[test]
fn standard_multivariate_fit() {
    for g in [2, 3] {
        let r = fit(&unit_target(g), 1e-9).unwrap();
        for i in 0..g {
            assert!(r.params.u()[i].abs() < 1e-9);
            for j in 0..g {
                let expected = if i == j { UNIT_VARIANCE_B } else { 0.0 };
                assert!(
                    (r.params.b()[i][j] - expected).abs() < 1e-8,
                    "g={g} ({i},{j})"
                );
            }
        }
    }
}

#[test]
fn ten_point_sample_fit() {
    let data: Vec<Vec<i64>> = DATA.iter().map(|&x| vec![x]).collect();
    let m = sample_moments(&data, CovarianceEstimator::Unbiased).unwrap();
    assert!((m.mu()[0] - 0.4).abs() < 1e-15);
    assert!((m.sigma()[0][0].sqrt() - 1.6465).abs() < 1e-4);
    let r = fit_from_sample(&data, 1e-9).unwrap();
    assert!((r.params.u()[0] - 0.023_481_9).abs() < 1e-6);
    assert!((r.params.b()[0][0] - 0.058_704_7).abs() < 1e-6);
    let ml = fit_from_sample_with(&data, 1e-9, CovarianceEstimator::MaximumLikelihood).unwrap();
    assert!((ml.params.u()[0] - 0.026_091_0).abs() < 1e-6);
    assert!((ml.params.b()[0][0] - 0.065_227_4).abs() < 1e-6);
}

#[test]
fn degenerate_samples_are_rejected() {
    let same = vec![vec![2i64]; 8];
    assert_eq!(
        fit_from_sample(&same, 1e-9).unwrap_err(),
        Error::DegenerateSample
    );
    let line: Vec<Vec<i64>> = (0..6).map(|k| vec![k, 2 * k]).collect();
    assert_eq!(
        fit_from_sample(&line, 1e-9).unwrap_err(),
        Error::DegenerateSample
    );
    assert_eq!(
        fit_from_sample(&[], 1e-9).unwrap_err(),
        Error::DegenerateSample
    );
}

#[test]
fn input_validation() {
    assert_eq!(
        MomentData::new(vec![0.0], vec![vec![-1.0]]).unwrap_err(),
        Error::NotPositiveDefinite
    );
    assert!(matches!(
        fit(&unit_target(1), 1e-11),
        Err(Error::InvalidArgument(_))
    ));
    let opts = FitOptions {
        max_iterations: 0,
        ..FitOptions::new(1e-10)
    };
    let far = MomentData::new(vec![0.3], vec![vec![0.05]]).unwrap();
    assert!(matches!(
        fit_with(&far, &opts),
        Err(Error::NoConvergence { .. })
    ));
}

#[test]
fn exact_reciprocal_two_pi_misses_unit_variance() {
    let at = |b: f64| {
        let p = CanonicalPoint::new(vec![0.0], vec![vec![b]]).unwrap();
        forward_moments(&p).unwrap().sigma()[0][0]
    };
    let tight = at(2.0 * PI);
    let loose = at(1.0 / (2.0 * PI));
    // 5.35e-9: positive, though below 1e-8.
    assert!(tight > 1e-9 && tight < 1e-8);
    assert!(loose < 1.0);
    // Poisson summation: Var(1 / 2 pi) = 1 - (2 pi)^2 Var(2 pi).
    assert!((loose - (1.0 - (2.0 * PI).powi(2) * tight)).abs() < 1e-12);
}

#[test]
fn finite_difference_hessian_agrees() {
    let target = MomentData::new(vec![0.2, -0.4], vec![vec![1.3, 0.4], vec![0.4, 0.8]]).unwrap();
    let analytic = fit(&target, 1e-9).unwrap();
    let fd = fit_with(
        &target,
        &FitOptions {
            hessian: HessianMode::FiniteDifference,
            ..FitOptions::new(1e-9)
        },
    )
    .unwrap();
    assert!(analytic.params.max_abs_diff(&fd.params) < 1e-8);
}

fn random_point(g: usize) -> impl Strategy<Value = CanonicalPoint> {
    (
        prop::collection::vec(-1.0f64..1.0, g),
        prop::collection::vec(-0.3f64..0.3, g * g),
        prop::collection::vec(0.15f64..1.2, g),
    )
        .prop_map(move |(u, off, diag)| {
            let mut b = vec![vec![0.0; g]; g];
            for i in 0..g {
                for j in i..g {
                    let v = if i == j {
                        diag[i]
                    } else {
                        off[i * g + j] * (diag[i] * diag[j]).sqrt()
                    };
                    b[i][j] = v;
                    b[j][i] = v;
                }
            }
            CanonicalPoint::new(u, b).unwrap()
        })
}

fn any_point() -> impl Strategy<Value = CanonicalPoint> {
    prop_oneof![random_point(1), random_point(2), random_point(3)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gradient_matches_finite_differences(p in random_point(2)) {
        let target = MomentData::new(vec![0.1, 0.3], vec![vec![0.9, 0.1], vec![0.1, 0.6]]).unwrap();
        let grad = gradient(&p, &target).unwrap();
        let x = p.to_vector();
        for k in 0..x.len() {
            let h = 1e-5;
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[k] += h;
            xm[k] -= h;
            let fp = objective(&CanonicalPoint::from_vector(2, &xp).unwrap(), &target).unwrap();
            let fm = objective(&CanonicalPoint::from_vector(2, &xm).unwrap(), &target).unwrap();
            let fd = (fp - fm) / (2.0 * h);
            prop_assert!((fd - grad[k]).abs() <= 1e-6 * grad[k].abs().max(1e-2), "k={} fd={} an={}", k, fd, grad[k]);
        }
    }

    #[test]
    fn hessian_is_positive_definite(p in any_point()) {
        let h = to_matrix(&fisher_information(&p).unwrap());
        prop_assert!((&h - h.transpose()).amax() < 1e-12 * h.amax());
        prop_assert!(h.cholesky().is_some());
    }

    #[test]
    fn round_trip(p in any_point()) {
        let m = forward_moments(&p).unwrap();
        let r = fit(&m, 1e-10).unwrap();
        prop_assert!(r.params.max_abs_diff(&p) < 1e-7, "diff {}", r.params.max_abs_diff(&p));
        let back = forward_moments(&r.params).unwrap();
        prop_assert!(back.max_abs_diff(&m) < 1e-7);
    }
}
