//! Lower bounds for the triple-product factors: `|Q|` on `D(0.6)` and the
//! exclusion of zeros on `|z| = |q|^{-k+1/2}` for `k = 4` and `k >= 5`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;

use super::constants::{self, ConstantsRegistry};
use super::mu::{a_j, b_j};
use super::{GridSpec, VerificationReport};
use crate::error::Result;
use crate::series::{eval_q, eval_theta, SeriesBudget};
use crate::types::{ComplexPoint, QParameter};

pub const DEFAULT_BOUNDARY_STEPS: usize = 2000;
pub const DEFAULT_SCAN_STEPS: usize = 24;
pub const DEFAULT_SCAN_Z_STEPS: usize = 512;

/// Segment `arg q = pi/2, |q| in (0, 0.6]` and arc `|q| = 0.6,
/// arg q in [pi/2, pi]`: the upper half of the boundary of `D(0.6)`.
pub fn default_q_grid() -> GridSpec {
    GridSpec {
        modulus_range: [0.6 / DEFAULT_BOUNDARY_STEPS as f64, 0.6],
        modulus_steps: DEFAULT_BOUNDARY_STEPS,
        argument_range: [FRAC_PI_2, PI],
        argument_steps: DEFAULT_BOUNDARY_STEPS,
    }
}

/// Coarse polar grid over the upper half of `D(0.6)` for direct scans.
pub fn default_scan_grid() -> GridSpec {
    GridSpec {
        modulus_range: [0.02, 0.6],
        modulus_steps: DEFAULT_SCAN_STEPS,
        argument_range: [FRAC_PI_2, PI],
        argument_steps: DEFAULT_SCAN_STEPS,
    }
}

/// `Q_0(q) = prod_{j=1}^{11} (1 - q^j)`.
pub fn q0(q: Complex64) -> Complex64 {
    let mut p = Complex64::new(1.0, 0.0);
    let mut qj = Complex64::new(1.0, 0.0);
    for _ in 0..11 {
        qj *= q;
        p *= Complex64::new(1.0, 0.0) - qj;
    }
    p
}

/// Smallest normalized modulus found by a circle scan, with its location.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanMinimum {
    pub value: f64,
    pub modulus: f64,
    pub argument: f64,
    pub z_argument: f64,
}

/// Minimum over the grid of `|theta(q, z)|` divided by the largest series
/// term, on the circles `|z| = |q|^{-exponent}` sampled at `z_steps` angles.
pub fn circle_scan_min(exponent: f64, grid: &GridSpec, z_steps: usize) -> Result<ScanMinimum> {
    grid.validate()?;
    let moduli = grid.moduli();
    let args = grid.arguments();
    let cells: Vec<(f64, f64)> = moduli
        .iter()
        .flat_map(|&r| args.iter().map(move |&a| (r, a)))
        .collect();
    let budget = SeriesBudget::default();
    let mins = cells
        .par_iter()
        .map(|&(r, a)| -> Result<ScanMinimum> {
            let q = QParameter::from_polar(r, a)?;
            let radius = r.powf(-exponent);
            let mut best = ScanMinimum {
                value: f64::INFINITY,
                modulus: r,
                argument: a,
                z_argument: 0.0,
            };
            for i in 0..z_steps {
                let phi = 2.0 * PI * i as f64 / z_steps as f64;
                let v = eval_theta(&q, ComplexPoint::from_polar(radius, phi)?, &budget)?;
                let m = v.value.norm() / v.scale;
                if m < best.value {
                    best.value = m;
                    best.z_argument = phi;
                }
            }
            Ok(best)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(mins
        .into_iter()
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .expect("grid is nonempty"))
}

fn record_scan(report: &mut VerificationReport, label: &str, scan: &ScanMinimum) {
    report
        .record(&format!("{label}_min"), scan.value)
        .record(&format!("{label}_at_modulus"), scan.modulus)
        .record(&format!("{label}_at_argument"), scan.argument)
        .margin(label, scan.value);
}

/// Smallest `|Q|` (full product) over the boundary points of `grid`.
fn q_boundary_min(grid: &GridSpec) -> Result<f64> {
    let budget = SeriesBudget::default();
    let seg_arg = grid.argument_range[0];
    let arc_mod = grid.modulus_range[1];
    let mut best = f64::INFINITY;
    for r in grid.moduli() {
        best = best.min(
            eval_q(&QParameter::from_polar(r, seg_arg)?, &budget)?
                .value
                .norm(),
        );
    }
    for a in grid.arguments() {
        best = best.min(
            eval_q(&QParameter::from_polar(arc_mod, a)?, &budget)?
                .value
                .norm(),
        );
    }
    Ok(best)
}

/// Compares `|Q_0|` on the boundary of `D(0.6)` with `1.2 / gamma`, where
/// `gamma` bounds the omitted factors `prod_{j>=12}`.
///
/// The segment is `arg q = argument_range[0]` over the grid moduli; the arc
/// is `|q| = modulus_range[1]` over the grid arguments. As `q -> 0`,
/// `|Q_0| -> 1`, so the segment margin is negative for grids reaching small
/// `|q|`; the report states this rather than trimming the grid.
pub fn verify_lemma_q(grid: &GridSpec) -> Result<VerificationReport> {
    grid.validate()?;
    let gamma = constants::gamma()?;
    let bound = 1.2 / gamma;
    let seg_arg = grid.argument_range[0];
    let arc_mod = grid.modulus_range[1];

    let mut seg = (f64::INFINITY, 0.0);
    for r in grid.moduli() {
        let m = q0(Complex64::from_polar(r, seg_arg)).norm();
        if m < seg.0 {
            seg = (m, r);
        }
    }
    let mut arc = (f64::INFINITY, 0.0);
    for a in grid.arguments() {
        let m = q0(Complex64::from_polar(arc_mod, a)).norm();
        if m < arc.0 {
            arc = (m, a);
        }
    }
    let q_min = q_boundary_min(grid)?;
    let budget = SeriesBudget::default();
    let q_at_minus = eval_q(&QParameter::real(-arc_mod)?, &budget)?.value.norm();

    let mut report = VerificationReport::new("Q", Some(*grid));
    report
        .record("gamma", gamma)
        .record("q0_bound", bound)
        .record("segment_min_q0", seg.0)
        .record("segment_argmin_modulus", seg.1)
        .record("arc_min_q0", arc.0)
        .record("arc_argmin_argument", arc.1)
        .record("boundary_min_q", q_min)
        .record("abs_q_at_negative_edge", q_at_minus)
        .margin("segment", seg.0 - bound)
        .margin("arc", arc.0 - bound);
    Ok(report)
}

/// `|Q U R| >= 1.2 eta xi` against the majorant of `|G|` on
/// `|z| = |q|^{-9/2}`, together with a direct scan of the circles for
/// `k = 5, 6, 7`.
///
/// The product bound takes `|Q| >= 1.2` as given; `with_boundary_min_q`
/// records the same bound using the smallest `|Q|` found on the boundary.
pub fn verify_lemma_k5() -> Result<VerificationReport> {
    let eta = constants::eta()?;
    let xi = constants::xi()?;
    let product = 1.2 * eta * xi;
    let g = constants::g_majorant(4.5)?;
    let q_min = q_boundary_min(&default_q_grid().with_steps(400, 400)?)?;

    let mut report = VerificationReport::new("k5", Some(default_scan_grid()));
    report
        .record("eta", eta)
        .record("xi", xi)
        .record("product_bound", product)
        .record("g_bound", g)
        .record("boundary_min_q", q_min)
        .record("with_boundary_min_q", q_min * eta * xi - g)
        .margin("product_vs_g", product - g);
    for k in 5..=7 {
        let scan = circle_scan_min(
            f64::from(k) - 0.5,
            &default_scan_grid(),
            DEFAULT_SCAN_Z_STEPS,
        )?;
        record_scan(&mut report, &format!("direct_scan_k{k}"), &scan);
    }
    Ok(report)
}

/// `1.2 chi_0 chi_1 chi_*^2` against the majorant of `|G|` on
/// `|z| = |q|^{-7/2}`, a cross-check of each `chi_j` against its published
/// value, and a direct scan of the circle.
pub fn verify_lemma_k4() -> Result<VerificationReport> {
    let registry = ConstantsRegistry::published();
    let mut report = VerificationReport::new("k4", Some(default_scan_grid()));
    let mut chis = [0.0; 6];
    for (j, slot) in chis.iter_mut().enumerate() {
        let name = format!("chi{j}");
        *slot = constants::chi(j as u32)?;
        let digits = constants::matching_digits(*slot, registry.reference(&name)?);
        report.record(&name, *slot).margin(
            &format!("{name}_digits"),
            digits - constants::REQUIRED_DIGITS,
        );
    }
    for j in 1..=4 {
        // the minimum defining chi_j is attained by A_j
        report.margin(&format!("B{j}_above_A{j}"), b_j(0.6, j)? - a_j(0.6, j)?);
    }
    let chi_star = chis[2] * chis[3] * chis[4] * chis[5];
    let product = 1.2 * chis[0] * chis[1] * chi_star * chi_star;
    let g = constants::g_majorant(3.5)?;
    let q_min = q_boundary_min(&default_q_grid().with_steps(400, 400)?)?;
    report
        .record("chi_star", chi_star)
        .record("product_bound", product)
        .record("g_bound", g)
        .record("boundary_min_q", q_min)
        .record(
            "with_boundary_min_q",
            q_min * chis[0] * chis[1] * chi_star * chi_star - g,
        )
        .margin("product_vs_g", product - g);
    let scan = circle_scan_min(3.5, &default_scan_grid(), DEFAULT_SCAN_Z_STEPS)?;
    record_scan(&mut report, "direct_scan_k4", &scan);
    Ok(report)
}
