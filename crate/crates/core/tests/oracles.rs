//! Values checked against independent computations: exact rational partial
//! sums, naive summation, and a fixed-step winding count.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use partial_theta::series::{eval_theta, eval_theta_dagger, SeriesBudget};
use partial_theta::zeros::{locate_zero, winding_number, DEFAULT_CONTOUR_SAMPLES};
use partial_theta::{ComplexPoint, QParameter};

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `sum_{j=0}^{terms-1} q^{j(j+1)/2 + offset*j} z^j` in exact arithmetic.
fn exact_sum(q: &BigRational, z: &BigRational, offset: i64, terms: u32) -> f64 {
    let mut total = BigRational::from_integer(BigInt::from(0));
    for j in 0..terms as i64 {
        let e = j * (j + 1) / 2 + offset * j;
        let term = num_traits::pow::pow(q.clone(), e as usize)
            * num_traits::pow::pow(z.clone(), j as usize);
        total += term;
    }
    total.to_f64().unwrap()
}

/// Value at a tight tolerance, after checking that the default-tolerance
/// value lies within its own error bound of `exact`.
fn theta(q: f64, z: f64, exact: f64) -> f64 {
    let q = QParameter::real(q).unwrap();
    let z = ComplexPoint::real(z).unwrap();
    let loose = eval_theta(&q, z, &SeriesBudget::default()).unwrap();
    assert!((loose.value.re() - exact).abs() <= loose.error_bound());
    let tight = SeriesBudget::with_tolerance(1e-16).unwrap();
    eval_theta(&q, z, &tight).unwrap().value.re()
}

#[test]
fn theta_half_one_exact() {
    let exact = exact_sum(&ratio(1, 2), &ratio(1, 1), 0, 60);
    assert!((exact - 1.641_632_560_655_15).abs() < 1e-14);
    assert!((theta(0.5, 1.0, exact) - exact).abs() < 1e-14);
}

#[test]
fn theta_dagger_two_fifths_one_exact() {
    let exact = exact_sum(&ratio(2, 5), &ratio(1, 1), -1, 60);
    assert!((exact - 2.468_201_935_747_08).abs() < 1e-14);
    let q = QParameter::real(0.4).unwrap();
    let v = eval_theta_dagger(&q, ComplexPoint::ONE, &SeriesBudget::default()).unwrap();
    assert!((v.value.re() - exact).abs() < 1e-14);
    assert_eq!(v.value.im(), 0.0);
}

#[test]
fn theta_three_tenths_exact() {
    let exact = exact_sum(&ratio(3, 10), &ratio(17, 10), 0, 60);
    assert!((exact - 1.591_661_099_301_832).abs() < 1e-14);
    assert!((theta(0.3, 1.7, exact) - exact).abs() < 1e-14);
}

fn naive_theta(q: Complex64, z: Complex64) -> Complex64 {
    let mut s = Complex64::new(0.0, 0.0);
    for j in 0..400i32 {
        let t = q.powi(j * (j + 1) / 2) * z.powi(j);
        s += t;
        if t.norm() < 1e-300 {
            break;
        }
    }
    s
}

#[test]
fn complex_values_match_naive_summation() {
    let cases = [
        (Complex64::from_polar(0.55, 2.0), Complex64::new(-3.0, 4.0)),
        (Complex64::from_polar(0.2, -1.0), Complex64::new(10.0, -2.0)),
        (Complex64::from_polar(0.6, 3.1), Complex64::new(0.1, 0.0)),
    ];
    for (q, z) in cases {
        let v = eval_theta(
            &QParameter::from_complex(q).unwrap(),
            ComplexPoint::try_from(z).unwrap(),
            &SeriesBudget::default(),
        )
        .unwrap();
        let n = naive_theta(q, z);
        assert!(
            (v.complex() - n).norm() <= 1e-12 * v.scale.max(1.0),
            "{q} {z}"
        );
    }
}

#[test]
fn first_zero_for_small_negative_q() {
    // theta(-0.1, .) has a real zero near -1/q = 10; bisection on the real
    // axis with naive summation gives an independent location
    let q = Complex64::new(-0.1, 0.0);
    let f = |x: f64| naive_theta(q, Complex64::new(x, 0.0)).re;
    let (mut lo, mut hi) = (5.0, 12.0);
    assert!(f(lo).signum() != f(hi).signum());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid).signum() == f(lo).signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    assert!((lo - 9.167_314_660_979_93).abs() < 1e-12);
    let rec = locate_zero(&QParameter::real(-0.1).unwrap(), 1, 1e-13).unwrap();
    assert!((rec.location.re() - lo).abs() < 1e-10);
    assert!(rec.location.im().abs() < 1e-10);
    assert!(rec.annulus_ok);
}

/// Fixed-step phase unwrapping with naive summation.
fn naive_winding(q: Complex64, radius: f64, samples: usize) -> i64 {
    let mut total = 0.0;
    let mut prev = naive_theta(q, Complex64::new(radius, 0.0));
    for i in 1..=samples {
        let phi = 2.0 * std::f64::consts::PI * i as f64 / samples as f64;
        let cur = naive_theta(q, Complex64::from_polar(radius, phi));
        total += (cur / prev).arg();
        prev = cur;
    }
    (total / (2.0 * std::f64::consts::PI)).round() as i64
}

#[test]
fn winding_numbers_match_fixed_step_count() {
    let qs = [
        Complex64::from_polar(0.5, 2.5),
        Complex64::from_polar(0.3, 1.6),
        Complex64::from_polar(0.6, 3.0),
    ];
    for q in qs {
        let qp = QParameter::from_complex(q).unwrap();
        for k in 1..=4 {
            let radius = q.norm().powf(-(f64::from(k) + 0.5));
            let ours = winding_number(&qp, radius, DEFAULT_CONTOUR_SAMPLES).unwrap();
            assert_eq!(
                ours.count,
                naive_winding(q, radius, 8192),
                "q = {q}, k = {k}"
            );
            assert_eq!(ours.count, i64::from(k));
        }
    }
}
