use std::f64::consts::{FRAC_PI_2, PI};

use partial_theta::asymptotics::{table, table_row, AsymptoticRow, DEFAULT_TABLE_N};
use partial_theta::lemmas::constants::{
    self, matching_digits, verify_constants, ConstantsRegistry,
};
use partial_theta::lemmas::k1::smallest_case_margin;
use partial_theta::lemmas::k2::b_direct;
use partial_theta::lemmas::mu::mu_cross;
use partial_theta::lemmas::products::default_q_grid;
use partial_theta::lemmas::*;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn registry_constants_reach_nine_digits() {
    let report = verify_constants().unwrap();
    assert!(report.passed, "{:?}", report.failed_margins());
    assert_eq!(report.margins.len(), ConstantsRegistry::published().len());
}

#[test]
fn mu_examples() {
    let chi0 = mu(3, 0.6f64.powf(-2.5)).unwrap()
        * mu(2, 0.6f64.powf(-1.5)).unwrap()
        * mu(1, 0.6f64.powf(-0.5)).unwrap();
    assert!(matching_digits(chi0, 1.742379963) >= 9.0);
    assert_eq!(mu(1, 1.0).unwrap(), 0.0);
    assert!(mu(2, 3.0).unwrap() > mu(2, 2.0).unwrap());
    assert!(close(
        mu_cross(0.9, 0.5, 3, 1).unwrap(),
        0.560_877_803_478_696,
        1e-14
    ));
}

#[test]
fn a_and_b_examples() {
    assert!(matching_digits(a_j(0.6, 1).unwrap(), 0.1749135662) >= 9.0);
    assert!(matching_digits(a_j(0.6, 4).unwrap(), 0.9889171980) >= 9.0);
    assert!(a_j(0.3, 1).unwrap() > a_j(0.6, 1).unwrap());
    assert!(b_j(0.1, 2).unwrap() > b_j(0.59, 2).unwrap());
    assert!(close(b_j(0.6, 1).unwrap(), 0.222_475_860_459, 1e-11));
}

#[test]
fn mu_and_ab_reports_pass() {
    assert!(mu_properties_check(1000).unwrap().passed);
    assert!(mu_properties_check(10).is_err());
    assert!(verify_ab_monotone(4, 1000).unwrap().passed);
    assert!(verify_ab_monotone(3, 1000).is_err());
}

#[test]
fn lower_bound_for_q_does_not_hold_near_the_origin() {
    let report = verify_lemma_q(&default_q_grid()).unwrap();
    assert!(matching_digits(report.computed["gamma"], 0.9945691384) >= 9.0);
    assert!(matching_digits(report.computed["q0_bound"], 1.206552620) >= 9.0);
    // |Q_0| -> 1 as q -> 0 and |Q(-0.6)| = 1.1325546865...
    assert!(!report.passed);
    assert!(close(report.computed["segment_min_q0"], 1.0, 1e-6));
    assert!(close(
        report.computed["abs_q_at_negative_edge"],
        1.132_554_686_5,
        1e-9
    ));
    assert!(close(report.computed["arc_argmin_argument"], PI, 1e-12));
}

#[test]
fn k5_and_k4_reports() {
    let k5 = verify_lemma_k5().unwrap();
    assert!(k5.passed);
    assert!(matching_digits(k5.computed["eta"], 0.2411047426) >= 9.0);
    assert!(matching_digits(k5.computed["xi"], 0.7715882456) >= 9.0);
    assert!(k5.margins["product_vs_g"] > 0.116);

    let k4 = verify_lemma_k4().unwrap();
    assert!(k4.passed);
    assert!(close(k4.margins["product_vs_g"], 0.0079055467, 1e-8));
    assert!(matching_digits(k4.computed["chi5"], 0.9957913379) >= 9.0);
    assert!(matching_digits(k4.computed["product_bound"], 0.1930636291) >= 9.0);
}

#[test]
fn phi_examples() {
    assert!(matching_digits(phi_star(0.6).unwrap(), 1.632993162) >= 9.0);
    assert!(matching_digits(phi_flat(0.6).unwrap().value, 1.618354488) >= 9.0);
    assert!(matching_digits(phi_flat(0.3).unwrap().value - 1.0, 0.1725370862) >= 9.0);
}

#[test]
fn k1_case_tree_and_direct_scan() {
    let cases = verify_lemma_k1_cases().unwrap();
    assert!(cases.passed, "{:?}", cases.failed_margins());
    assert!(matching_digits(cases.computed["tau_min_modulus"], 0.3431457506) >= 9.0);
    assert!(matching_digits(cases.computed["case4d_bound"], -0.7470048804) >= 9.0);

    let grid = GridSpec::new(
        [constants::separation_radius(), 0.6],
        12,
        [FRAC_PI_2, PI],
        12,
    )
    .unwrap();
    let direct = verify_lemma_k1_direct(&grid, 256).unwrap();
    assert!(direct.passed);
    assert!(direct.computed["min_modulus"] >= smallest_case_margin().unwrap());
    assert_eq!(direct.computed["conjugation_max_diff"], 0.0);
}

#[test]
fn k1_direct_rejects_grids_outside_the_disk() {
    let grid = GridSpec::new([0.3, 0.7], 4, [FRAC_PI_2, PI], 4).unwrap();
    assert!(verify_lemma_k1_direct(&grid, 64).is_err());
}

#[test]
fn closed_form_of_b() {
    assert!(close(
        b_closed_form(0.5, 2.0 * PI / 3.0, 1.0).unwrap(),
        b_direct(0.5, 2.0 * PI / 3.0, 1.0),
        1e-12
    ));
    // b = cos(omega/2) <= 1/2 for omega >= 2pi/3
    for i in 0..200 {
        let psi = 2.0 * PI * f64::from(i) / 200.0;
        assert!(b_closed_form(0.6, 2.0 * PI / 3.0, psi).unwrap() >= 0.75 / 0.6 - 1e-12);
    }
}

#[test]
fn k2_report() {
    let grid = GridSpec::new([0.55, 0.6], 6, [FRAC_PI_2, 2.0 * PI / 3.0], 6).unwrap();
    let r = verify_lemma_k2(&grid, 512).unwrap();
    assert!(r.passed, "{:?}", r.failed_margins());
    assert!(matching_digits(r.computed["a0"], 2.330487021) >= 9.0);
    assert!(matching_digits(r.computed["a_tail_bound"], 0.0002925303367) >= 9.0);
    assert!(r.margins["grid_xi_b_vs_a_star_plus_tail"] > 0.05);
}

#[test]
fn asymptotic_table_truncations() {
    let expected: [(u32, f64, f64, f64); 10] = [
        (5, 0.27, 336.2, 1225.1),
        (6, 0.39, 164.5, 416.1),
        (7, 0.48, 115.2, 239.1),
        (8, 0.54, 92.8, 169.8),
        (9, 0.59, 80.2, 134.4),
        (10, 0.63, 72.2, 113.4),
        (15, 0.75, 55.3, 73.0),
        (20, 0.81, 49.5, 60.5),
        (25, 0.85, 46.5, 54.4),
        (30, 0.87, 44.7, 50.9),
    ];
    let rows = table(&DEFAULT_TABLE_N).unwrap();
    for (row, (n, tau, m, big_m)) in rows.iter().zip(expected) {
        assert_eq!(
            row.truncated(),
            AsymptoticRow { n, tau, m, big_m },
            "n = {n}"
        );
    }
    assert!(table_row(3).is_err());
}
