use std::f64::consts::PI;

use partial_theta::zeros::{
    count_zeros_in_annulus, locate_zero, locate_zero_robust, trace_zero_ray, verify_separation,
    winding_number, Annulus, SeparationRegime, SeparationVerdict, DEFAULT_CONTOUR_SAMPLES,
};
use partial_theta::{QParameter, ThetaError};

#[test]
fn strong_separation_on_left_domain_samples() {
    for (r, a) in [
        (0.1, PI / 2.0),
        (0.3, 0.75 * PI),
        (0.5, PI),
        (0.549, 1.25 * PI),
        (0.55, 1.5 * PI),
    ] {
        let q = QParameter::from_polar(r, a).unwrap();
        let rep = verify_separation(&q, 6).unwrap();
        assert_eq!(rep.regime, SeparationRegime::Full);
        assert_eq!(rep.verdict, SeparationVerdict::Strong, "q = {q}");
        assert!(rep.strong_separation);
        for e in &rep.entries {
            assert_eq!(e.count, Some(1));
            let z = e.zero.unwrap();
            assert!(z.annulus_ok && z.residual < 1e-9);
            assert!(z.derivative_modulus > 1e-3, "zero {} should be simple", e.k);
        }
    }
}

#[test]
fn small_positive_q_is_covered_by_c0() {
    let q = QParameter::real(0.1).unwrap();
    let rep = verify_separation(&q, 4).unwrap();
    assert_eq!(rep.verdict, SeparationVerdict::Strong);
    for e in &rep.entries {
        let z = e.zero.unwrap();
        // for real q in (0, 1) the zeros are real and negative here
        assert!(z.location.re() < 0.0 && z.location.im().abs() < 1e-6 * z.location.norm());
    }
}

#[test]
fn partial_regime_withholds_middle_annuli() {
    let q = QParameter::from_polar(0.6, PI / 2.0).unwrap();
    let rep = verify_separation(&q, 6).unwrap();
    assert_eq!(rep.regime, SeparationRegime::Partial);
    assert_eq!(rep.pair_count, Some(2));
    assert_eq!(rep.verdict, SeparationVerdict::Partial);
    assert!(!rep.strong_separation);
    for e in &rep.entries {
        assert_eq!(e.asserted, !(e.k == 2 || e.k == 3));
    }
}

#[test]
fn outside_the_domain_separation_can_fail() {
    // near the first double zero on the positive real axis
    let q = QParameter::real(0.3).unwrap();
    let rep = verify_separation(&q, 3).unwrap();
    assert_eq!(rep.regime, SeparationRegime::Unclaimed);
    assert_eq!(rep.verdict, SeparationVerdict::NotSeparated);
    assert_eq!(rep.entries[0].count, Some(0));
    assert_eq!(rep.entries[1].count, Some(2));
}

#[test]
fn annulus_counts_add_up() {
    let q = QParameter::from_polar(0.45, 2.0).unwrap();
    let total = count_zeros_in_annulus(&q, &Annulus::punctured_disk(4.5).unwrap()).unwrap();
    let parts: i64 = (1..=4)
        .map(|k| count_zeros_in_annulus(&q, &Annulus::for_index(k).unwrap()).unwrap())
        .sum();
    assert_eq!(total, 4);
    assert_eq!(parts, 4);
}

#[test]
fn contour_through_zero_reports_radius() {
    let q = QParameter::from_polar(0.4, 2.5).unwrap();
    let z = locate_zero(&q, 2, 1e-13).unwrap();
    match winding_number(&q, z.location.norm(), DEFAULT_CONTOUR_SAMPLES) {
        Err(ThetaError::ContourTooClose {
            radius,
            min_modulus,
        }) => {
            assert_eq!(radius, z.location.norm());
            assert!(min_modulus < 1e-3);
        }
        other => panic!("expected ContourTooClose, got {other:?}"),
    }
}

#[test]
fn invalid_arguments_are_rejected() {
    let q = QParameter::real(-0.3).unwrap();
    assert!(locate_zero(&q, 0, 1e-12).is_err());
    assert!(locate_zero(&q, 1, 0.0).is_err());
    assert!(verify_separation(&q, 0).is_err());
}

#[test]
fn traced_zeros_stay_in_their_annuli() {
    for k in 1..=4 {
        let path = trace_zero_ray(PI, k, 0.05, 0.6, 40).unwrap();
        assert_eq!(path.len(), 40);
        for w in path.windows(2) {
            assert!(w[1].annulus_ok, "k = {k}");
            // the zero moves continuously with q
            let ratio = w[1].location.norm() / w[0].location.norm();
            assert!(ratio < 1.0 && ratio > 0.3, "k = {k}: {ratio}");
        }
    }
}

#[test]
fn robust_location_agrees_with_newton_where_both_work() {
    let q = QParameter::from_polar(0.58, 2.2).unwrap();
    for k in [1, 4, 5] {
        let a = locate_zero(&q, k, 1e-12).unwrap();
        let b = locate_zero_robust(&q, k, 1e-12).unwrap();
        assert_eq!(a.location, b.location);
    }
}
