//! Exclusion of zeros on `|z| = |q|^{-5/2}`.
//!
//! With `xi = q z` and `zeta = q xi` one has `|xi| = |q|^{-3/2}`,
//! `|zeta| = |q|^{-1/2}`, and `theta(q, z) = A + xi B` where
//! `A = 1 + sum_{j>=4} q^{j(j-1)/2} xi^j` and `B = 1 + zeta + q zeta^2`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::constants::{a0, a_tail_bound, lemma8_bound_small, lemma8_bound_wide};
use super::products::{circle_scan_min, default_scan_grid, DEFAULT_SCAN_Z_STEPS};
use super::{GridSpec, VerificationReport};
use crate::error::{Result, ThetaError};

pub const DEFAULT_SECTOR_STEPS: usize = 41;
pub const DEFAULT_PSI_STEPS: usize = 2048;
const IDENTITY_SAMPLES: usize = 10_000;
const QUADRATIC_STEPS: usize = 48;
const IDENTITY_SEED: u64 = 0x5eed_0008;
const ANGLE_SLACK: f64 = 1e-12;

/// `|q| in [0.55, 0.6]`, `arg q in [pi/2, 2pi/3]`.
pub fn default_sector_grid() -> GridSpec {
    GridSpec {
        modulus_range: [0.55, 0.6],
        modulus_steps: DEFAULT_SECTOR_STEPS,
        argument_range: [FRAC_PI_2, 2.0 * PI / 3.0],
        argument_steps: DEFAULT_SECTOR_STEPS,
    }
}

/// `|B|^2 = rho^{-1} + 4 rho^{-1/2} cos(psi + omega/2) cos(omega/2)
/// + 4 cos^2(psi + omega/2)` for `q = rho e^{i omega}`,
/// `zeta = rho^{-1/2} e^{i psi}`.
pub fn b_closed_form(rho: f64, omega: f64, psi: f64) -> Result<f64> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(ThetaError::InvalidParameter(format!(
            "need 0 < rho < 1, got {rho}"
        )));
    }
    if !(FRAC_PI_2 - ANGLE_SLACK..=PI + ANGLE_SLACK).contains(&omega) {
        return Err(ThetaError::InvalidParameter(format!(
            "need omega in [pi/2, pi], got {omega}"
        )));
    }
    if !(-ANGLE_SLACK..=2.0 * PI + ANGLE_SLACK).contains(&psi) {
        return Err(ThetaError::InvalidParameter(format!(
            "need psi in [0, 2pi], got {psi}"
        )));
    }
    let a = (psi + omega / 2.0).cos();
    let b = (omega / 2.0).cos();
    Ok(1.0 / rho + 4.0 * rho.powf(-0.5) * a * b + 4.0 * a * a)
}

/// `|1 + zeta + q zeta^2|^2` evaluated directly.
pub fn b_direct(rho: f64, omega: f64, psi: f64) -> f64 {
    let q = Complex64::from_polar(rho, omega);
    let zeta = Complex64::from_polar(rho.powf(-0.5), psi);
    (Complex64::new(1.0, 0.0) + zeta + q * zeta * zeta).norm_sqr()
}

/// `|xi B| - |A*|` at `q = rho e^{i omega}`, `zeta = rho^{-1/2} e^{i psi}`,
/// where `A* = 1 + sum_{j=4}^{7} q^{j(j-1)/2} xi^j`.
fn sector_gap(rho: f64, omega: f64, psi: f64) -> (f64, f64) {
    let q = Complex64::from_polar(rho, omega);
    let zeta = Complex64::from_polar(rho.powf(-0.5), psi);
    let xi = zeta / q;
    let one = Complex64::new(1.0, 0.0);
    let b = one + zeta + q * zeta * zeta;
    let mut a_star = one;
    for j in 4..=7i32 {
        a_star += q.powi(j * (j - 1) / 2) * xi.powi(j);
    }
    let xb = (xi * b).norm();
    (xb - a_star.norm(), xb)
}

/// Checks the bound `|A| <= a0`, the two analytic lower bounds for `|xi B|`,
/// the closed form of `|B|^2`, its quadratic minorations, and on `grid` the
/// finite comparison `|xi B| > |A*| + bound(A**)`. A direct scan of the
/// circle over `D(0.55)` is included.
pub fn verify_lemma_k2(grid: &GridSpec, psi_steps: usize) -> Result<VerificationReport> {
    grid.validate()?;
    if grid.modulus_range[0] <= 0.0 || grid.modulus_range[1] > 0.6 * (1.0 + 1e-12) {
        return Err(ThetaError::InvalidParameter(format!(
            "sector grid needs 0 < |q| <= 0.6, got {:?}",
            grid.modulus_range
        )));
    }
    if psi_steps < 4 {
        return Err(ThetaError::InvalidParameter(format!(
            "need >= 4 psi steps, got {psi_steps}"
        )));
    }
    let a0 = a0()?;
    let wide = lemma8_bound_wide();
    let small = lemma8_bound_small();
    let tail = a_tail_bound()?;

    let mut report = VerificationReport::new("k2", Some(*grid));
    report
        .record("a0", a0)
        .record("bound_wide", wide)
        .record("bound_small", small)
        .record("a_tail_bound", tail)
        .margin("bound_wide_vs_a0", wide - a0)
        .margin("bound_small_vs_a0", small - a0);

    // finite comparison on the grid
    let cells: Vec<(f64, f64)> = grid
        .moduli()
        .iter()
        .flat_map(|&r| grid.arguments().into_iter().map(move |a| (r, a)))
        .collect();
    let (gap, min_xb) = cells
        .par_iter()
        .map(|&(r, w)| {
            (0..psi_steps)
                .map(|i| sector_gap(r, w, 2.0 * PI * i as f64 / psi_steps as f64))
                .fold((f64::INFINITY, f64::INFINITY), |acc, v| {
                    (acc.0.min(v.0), acc.1.min(v.1))
                })
        })
        .reduce(
            || (f64::INFINITY, f64::INFINITY),
            |x, y| (x.0.min(y.0), x.1.min(y.1)),
        );
    report
        .record("psi_steps", psi_steps as f64)
        .record("grid_min_xi_b", min_xb)
        .record("grid_min_xi_b_minus_a0", min_xb - a0)
        .margin("grid_xi_b_vs_a_star_plus_tail", gap - tail);

    // closed form against direct evaluation
    let mut rng = ChaCha8Rng::seed_from_u64(IDENTITY_SEED);
    let mut max_diff: f64 = 0.0;
    for _ in 0..IDENTITY_SAMPLES {
        let rho = rng.gen_range(0.05..0.95);
        let omega = rng.gen_range(FRAC_PI_2..=PI);
        let psi = rng.gen_range(0.0..=2.0 * PI);
        max_diff =
            max_diff.max((b_closed_form(rho, omega, psi)? - b_direct(rho, omega, psi)).abs());
    }
    report
        .record("closed_form_max_diff", max_diff)
        .margin("closed_form_identity", 1e-12 - max_diff);

    // minimum over a of 4a^2 + 4 rho^{-1/2} a b + rho^{-1} is (1 - b^2) rho^{-1}
    let mut quad: f64 = f64::INFINITY;
    let mut quad_wide: f64 = f64::INFINITY;
    let mut quad_small: f64 = f64::INFINITY;
    for i in 0..QUADRATIC_STEPS {
        let rho = 0.05 + 0.55 * i as f64 / (QUADRATIC_STEPS - 1) as f64;
        for j in 0..QUADRATIC_STEPS {
            let omega = FRAC_PI_2 + FRAC_PI_2 * j as f64 / (QUADRATIC_STEPS - 1) as f64;
            let b = (omega / 2.0).cos();
            for k in 0..4 * QUADRATIC_STEPS {
                let psi = 2.0 * PI * k as f64 / (4 * QUADRATIC_STEPS) as f64;
                let v = b_closed_form(rho, omega, psi)?;
                quad = quad.min(v - (1.0 - b * b) / rho);
                if omega >= 2.0 * PI / 3.0 {
                    quad_wide = quad_wide.min(v - 0.75 / rho);
                }
                if rho <= 0.55 {
                    quad_small = quad_small.min(v - 0.5 / rho);
                }
            }
        }
    }
    // these minorations are attained, so sampled slack may be zero
    report
        .margin("quadratic_minimum", quad + 1e-12)
        .margin("quadratic_wide_sector", quad_wide + 1e-12)
        .margin("quadratic_small_modulus", quad_small + 1e-12);

    let scan_grid = GridSpec {
        modulus_range: [default_scan_grid().modulus_range[0], 0.55],
        ..default_scan_grid()
    };
    let scan = circle_scan_min(2.5, &scan_grid, DEFAULT_SCAN_Z_STEPS)?;
    report
        .record("direct_scan_k2_min", scan.value)
        .record("direct_scan_k2_at_modulus", scan.modulus)
        .record("direct_scan_k2_at_argument", scan.argument)
        .margin("direct_scan_k2", scan.value);
    Ok(report)
}
