//! Exclusion of zeros on `|z| = |q|^{-3/2}`, equivalently of zeros of
//! `theta_dagger(q, z) = theta(q, z/q)` on `|z| = |q|^{-1/2}`, by the case
//! analysis on `arg z`, `arg q`, plus a direct grid scan.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;

use super::constants::{self, case_3c_bound, case_4d_bound, phi_flat_value, phi_star_value};
use super::{constant_budget, GridSpec, VerificationReport};
use crate::error::{Result, ThetaError};
use crate::series::{eval_theta_dagger, gaussian_series, RealSum, SeriesBudget};
use crate::types::{ComplexPoint, QParameter, C0};

pub const DEFAULT_DIRECT_STEPS: usize = 100;
pub const DEFAULT_Z_STEPS: usize = 1024;
const CASE_SAMPLES: usize = 32;
const MONOTONE_SAMPLES: usize = 400;
const T_SAMPLES: usize = 10_001;

/// `|q| in [c0, 0.6]`, `arg q in [pi/2, pi]`.
pub fn default_direct_grid() -> GridSpec {
    GridSpec {
        modulus_range: [C0, 0.6],
        modulus_steps: DEFAULT_DIRECT_STEPS,
        argument_range: [FRAC_PI_2, PI],
        argument_steps: DEFAULT_DIRECT_STEPS,
    }
}

fn check_unit(r: f64) -> Result<()> {
    if r > 0.0 && r < 1.0 {
        Ok(())
    } else {
        Err(ThetaError::InvalidParameter(format!(
            "need 0 < r < 1, got {r}"
        )))
    }
}

/// `Phi_flat(r) = sum_{j>=2} r^{j(j-1)/2 - j/2}` with its tail bound.
pub fn phi_flat(r: f64) -> Result<RealSum> {
    check_unit(r)?;
    gaussian_series(r, -0.5, 2, &constant_budget())
}

/// `Phi_*(r) = (1 + 1/r)^{1/2}`.
pub fn phi_star(r: f64) -> Result<f64> {
    check_unit(r)?;
    Ok(phi_star_value(r))
}

/// Which leading terms of `theta_dagger = 1 + z + q z^2 + ...` are kept.
#[derive(Debug, Clone, Copy)]
enum Kept {
    /// `1 + z` against the rest, bounded by `Phi_flat`.
    First,
    /// `z + q z^2` against `1 + r_3`, bounded by `Phi_flat`.
    Middle,
    /// `1 + z + q z^2` against `r_3`, bounded by `Phi_flat - 1`.
    All,
}

struct Case {
    name: &'static str,
    arg_z: [f64; 2],
    arg_q: [f64; 2],
    kept: Kept,
}

fn cases() -> Vec<Case> {
    let p = PI;
    let c = |name, z0: f64, z1: f64, q0: f64, q1: f64, kept| Case {
        name,
        arg_z: [z0 * p, z1 * p],
        arg_q: [q0 * p, q1 * p],
        kept,
    };
    vec![
        c("case1", -0.5, 0.5, 0.5, 1.0, Kept::First),
        c("case2", 1.0, 1.5, 0.5, 1.0, Kept::Middle),
        c("case3a", 0.5, 0.75, 0.75, 1.0, Kept::All),
        c("case3b", 5.0 / 8.0, 0.75, 0.5, 0.75, Kept::All),
        c("case3c", 0.5, 5.0 / 8.0, 5.0 / 8.0, 0.75, Kept::All),
        c("case3d", 9.0 / 16.0, 5.0 / 8.0, 0.5, 5.0 / 8.0, Kept::All),
        c("case3e", 0.5, 9.0 / 16.0, 0.5, 5.0 / 8.0, Kept::All),
        c("case4a", 0.75, 5.0 / 6.0, 0.5, 1.0, Kept::All),
        c("case4b", 5.0 / 6.0, 11.0 / 12.0, 0.5, 1.0, Kept::All),
        c("case4c", 11.0 / 12.0, 1.0, 0.5, 5.0 / 6.0, Kept::All),
        c("case4d", 11.0 / 12.0, 1.0, 5.0 / 6.0, 1.0, Kept::All),
    ]
}

fn samples(range: [f64; 2], n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| range[0] + (range[1] - range[0]) * i as f64 / (n - 1) as f64)
}

/// Minimum over a sampled sector of `|kept terms| - majorant(rest)`.
fn sampled_case_margin(case: &Case, flat: &[(f64, f64)]) -> f64 {
    let mut best = f64::INFINITY;
    for &(r, phi) in flat {
        let zmod = r.powf(-0.5);
        for aq in samples(case.arg_q, CASE_SAMPLES) {
            let q = Complex64::from_polar(r, aq);
            for az in samples(case.arg_z, CASE_SAMPLES) {
                let z = Complex64::from_polar(zmod, az);
                let one = Complex64::new(1.0, 0.0);
                let (kept, bound) = match case.kept {
                    Kept::First => ((one + z).norm(), phi),
                    Kept::Middle => ((z + q * z * z).norm(), phi),
                    Kept::All => ((one + z + q * z * z).norm(), phi - 1.0),
                };
                best = best.min(kept - bound);
            }
        }
    }
    best
}

fn flat_table() -> Result<Vec<(f64, f64)>> {
    samples([C0, 0.6], CASE_SAMPLES)
        .map(|r| Ok((r, phi_flat_value(r)?)))
        .collect()
}

/// Smallest sampled case margin over the whole case tree.
pub fn smallest_case_margin() -> Result<f64> {
    let flat = flat_table()?;
    Ok(cases()
        .iter()
        .map(|c| sampled_case_margin(c, &flat))
        .fold(f64::INFINITY, f64::min))
}

/// Recomputes the landmark inequalities of each case and checks every case
/// on a sampled sector of `(|q|, arg q, arg z)` with `|q| in [c0, 0.6]`.
pub fn verify_lemma_k1_cases() -> Result<VerificationReport> {
    let mut report = VerificationReport::new("k1_cases", None);
    let flat06 = phi_flat_value(0.6)?;
    let r3 = flat06 - 1.0;
    let star06 = phi_star_value(0.6);

    // case 1 and 2: Phi_* decreasing, Phi_flat increasing, compared at 0.6
    let grid: Vec<f64> = samples([C0, 0.6], MONOTONE_SAMPLES).collect();
    let stars: Vec<f64> = grid.iter().map(|&r| phi_star_value(r)).collect();
    let flats = grid
        .iter()
        .map(|&r| phi_flat_value(r))
        .collect::<Result<Vec<f64>>>()?;
    let star_drop = stars
        .windows(2)
        .map(|w| w[0] - w[1])
        .fold(f64::INFINITY, f64::min);
    let flat_rise = flats
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    report
        .record("phi_star_0.6", star06)
        .record("phi_flat_0.6", flat06)
        .margin("phi_star_decreasing", star_drop)
        .margin("phi_flat_increasing", flat_rise)
        .margin("case1_phi_star_above_flat", star06 - flat06);

    // case 3A
    let im_bound = 1.2f64.powf(-0.5);
    let tau = |r: f64| (2.0 * r).powf(-0.5) - FRAC_1_SQRT_2;
    let lower = |t: f64| ((1.0 - 2.0 * t).powi(2) / 2.0 + 0.5).sqrt();
    let sampled_min = grid
        .iter()
        .map(|&r| lower(tau(r)))
        .fold(f64::INFINITY, f64::min);
    report
        .record("case3a_im_bound", im_bound)
        .record("tau_min_modulus", constants::tau_min_modulus())
        .record("case3a_sampled_min", sampled_min)
        .margin("case3a_im", im_bound - r3)
        .margin("case3a_one_minus_tau_at_c0", 1.0 - tau(C0))
        .margin("case3a_quadratic", FRAC_1_SQRT_2 - r3)
        .margin(
            "case3a_sampled_vs_quadratic",
            sampled_min - FRAC_1_SQRT_2 + 1e-12,
        );

    // case 3C, both branches
    let upper = 1.0 + 0.3f64.powf(-0.5) * (5.0 * PI / 8.0).cos() + (13.0 * PI / 8.0).cos();
    let flat03 = phi_flat_value(0.3)? - 1.0;
    report
        .record("case3c_upper_branch", upper)
        .record("case3c_lower_branch", case_3c_bound())
        .record("phi_flat_0.3_minus_1", flat03)
        .margin("case3c_upper_vs_0.68", upper - 0.68)
        .margin("case3c_0.68_vs_rest", 0.68 - r3)
        .margin("case3c_lower", case_3c_bound() - flat03);

    // case 3E
    let re = 1.0 + C0.powf(-0.5) * (9.0 * PI / 16.0).cos();
    let im = 0.6f64.powf(-0.5) * (9.0 * PI / 16.0).sin() - 1.0;
    let combined = (0.5712f64.powi(2) + 0.2661f64.powi(2)).sqrt();
    report
        .record("case3e_re", re)
        .record("case3e_im", im)
        .margin("case3e_re", re - 0.5712)
        .margin("case3e_im", im - 0.2661)
        .margin("case3e_combined", combined - 0.63)
        .margin("case3e_vs_rest", 0.63 - r3);

    // case 4
    let c4a = 0.6f64.powf(-0.5) * (5.0 * PI / 6.0).sin();
    let c4b = 0.6f64.powf(-0.5) * (11.0 * PI / 12.0).sin() + (13.0 * PI / 6.0).sin();
    let shift = 0.6f64.powf(-0.5) * (11.0 * PI / 12.0).cos() + 1.0;
    let t_min = samples([2.5 * PI, 17.0 * PI / 6.0], T_SAMPLES)
        .map(|phi| (phi.sin().powi(2) + (shift + phi.cos()).powi(2)).sqrt())
        .fold(f64::INFINITY, f64::min);
    report
        .record("case4a_bound", c4a)
        .record("case4b_bound", c4b)
        .record("case4c_t_min", t_min)
        .record("case4d_bound", case_4d_bound())
        .margin("case4a", c4a - r3)
        .margin("case4b", c4b - r3)
        .margin("case4c_sqrt3_half", 3f64.sqrt() / 2.0 - r3)
        .margin("case4c_t_above_one", t_min - 1.0)
        .margin("case4d", case_4d_bound().abs() - r3);

    let flat = flat_table()?;
    for case in cases() {
        report.margin(
            &format!("{}_sampled", case.name),
            sampled_case_margin(&case, &flat),
        );
    }
    Ok(report)
}

/// Minimum of `|theta_dagger(q, z)|` on `|z| = |q|^{-1/2}` over the grid of
/// `q` and `z_steps` equally spaced `arg z`.
pub fn verify_lemma_k1_direct(grid: &GridSpec, z_steps: usize) -> Result<VerificationReport> {
    grid.validate()?;
    if grid.modulus_range[0] <= 0.0 || grid.modulus_range[1] > 0.6 * (1.0 + 1e-12) {
        return Err(ThetaError::InvalidParameter(format!(
            "direct scan needs 0 < |q| <= 0.6, got {:?}",
            grid.modulus_range
        )));
    }
    if z_steps < 4 {
        return Err(ThetaError::InvalidParameter(format!(
            "need >= 4 z steps, got {z_steps}"
        )));
    }
    let moduli = grid.moduli();
    let args = grid.arguments();
    let cells: Vec<(f64, f64)> = moduli
        .iter()
        .flat_map(|&r| args.iter().map(move |&a| (r, a)))
        .collect();
    let budget = SeriesBudget::default();
    let eval = |q: &QParameter, z: ComplexPoint| -> Result<f64> {
        Ok(eval_theta_dagger(q, z, &budget)?.value.norm())
    };
    let minima = cells
        .par_iter()
        .map(|&(r, a)| -> Result<(f64, f64, f64, f64)> {
            let q = QParameter::from_polar(r, a)?;
            let zmod = r.powf(-0.5);
            let mut best = (f64::INFINITY, r, a, 0.0);
            for i in 0..z_steps {
                let phi = 2.0 * PI * i as f64 / z_steps as f64;
                let m = eval(&q, ComplexPoint::from_polar(zmod, phi)?)?;
                if m < best.0 {
                    best = (m, r, a, phi);
                }
            }
            Ok(best)
        })
        .collect::<Result<Vec<_>>>()?;
    let best = minima
        .into_iter()
        .min_by(|x, y| x.0.total_cmp(&y.0))
        .expect("grid is nonempty");

    // conjugation spot check on a few cells
    let mut conj_diff: f64 = 0.0;
    for &(r, a) in cells.iter().step_by((cells.len() / 16).max(1)) {
        let q = QParameter::from_polar(r, a)?;
        let z = ComplexPoint::from_polar(r.powf(-0.5), 0.7 + a)?;
        conj_diff = conj_diff.max((eval(&q, z)? - eval(&q.conj(), z.conj())?).abs());
    }

    let case_margin = smallest_case_margin()?;
    let mut report = VerificationReport::new("k1_direct", Some(*grid));
    report
        .record("z_steps", z_steps as f64)
        .record("min_modulus", best.0)
        .record("argmin_modulus", best.1)
        .record("argmin_argument", best.2)
        .record("argmin_z_argument", best.3)
        .record("smallest_case_margin", case_margin)
        .record("gap_to_case_margin", best.0 - case_margin)
        .record("conjugation_max_diff", conj_diff)
        .margin("min_modulus", best.0)
        .margin("conjugation", 1e-12 - conj_diff);
    Ok(report)
}
