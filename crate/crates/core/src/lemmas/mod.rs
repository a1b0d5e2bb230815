//! Recomputation of the numerical constants and inequalities behind the
//! zero-exclusion lemmas on `D(0.6)`.
//!
//! Every check returns a [`VerificationReport`] whose `margins` hold the
//! slack of each inequality; a report passes exactly when all margins are
//! strictly positive. Failed checks are reported, never hidden.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Result, ThetaError};
use crate::series::SeriesBudget;

pub mod constants;
pub mod k1;
pub mod k2;
pub mod mu;
pub mod products;

pub use constants::{matching_digits, separation_radius, ConstantEntry, ConstantsRegistry};
pub use k1::{phi_flat, phi_star, verify_lemma_k1_cases, verify_lemma_k1_direct};
pub use k2::{b_closed_form, verify_lemma_k2};
pub use mu::{a_j, b_j, mu, mu_properties_check, verify_ab_monotone};
pub use products::{verify_lemma_k4, verify_lemma_k5, verify_lemma_q};

/// Tolerance for the infinite series and products behind the constants.
pub const CONSTANT_TOLERANCE: f64 = 1e-13;

pub(crate) fn constant_budget() -> SeriesBudget {
    SeriesBudget::with_tolerance(CONSTANT_TOLERANCE).expect("valid tolerance")
}

/// A rectangular grid in polar coordinates of `q`.
///
/// `steps` counts points including both endpoints; a degenerate range
/// (`lo == hi`) denotes a single point and may use one step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub modulus_range: [f64; 2],
    pub modulus_steps: usize,
    pub argument_range: [f64; 2],
    pub argument_steps: usize,
}

fn validate_axis(name: &str, range: [f64; 2], steps: usize) -> Result<()> {
    let [lo, hi] = range;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(ThetaError::InvalidParameter(format!(
            "{name} range must be finite with lo <= hi, got [{lo}, {hi}]"
        )));
    }
    if lo == hi {
        if steps == 0 {
            return Err(ThetaError::InvalidParameter(format!(
                "{name} steps must be >= 1"
            )));
        }
    } else if steps < 2 {
        return Err(ThetaError::InvalidParameter(format!(
            "{name} steps must be >= 2 for a nondegenerate range, got {steps}"
        )));
    }
    Ok(())
}

fn linspace(range: [f64; 2], steps: usize) -> Vec<f64> {
    let [lo, hi] = range;
    if steps == 1 || lo == hi {
        return vec![lo; 1];
    }
    (0..steps)
        .map(|i| {
            if i + 1 == steps {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (steps - 1) as f64
            }
        })
        .collect()
}

impl GridSpec {
    pub fn new(
        modulus_range: [f64; 2],
        modulus_steps: usize,
        argument_range: [f64; 2],
        argument_steps: usize,
    ) -> Result<Self> {
        let g = GridSpec {
            modulus_range,
            modulus_steps,
            argument_range,
            argument_steps,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        validate_axis("modulus", self.modulus_range, self.modulus_steps)?;
        validate_axis("argument", self.argument_range, self.argument_steps)?;
        if self.modulus_range[0] < 0.0 {
            return Err(ThetaError::InvalidParameter(
                "moduli must be nonnegative".into(),
            ));
        }
        Ok(())
    }

    pub fn moduli(&self) -> Vec<f64> {
        linspace(self.modulus_range, self.modulus_steps)
    }

    pub fn arguments(&self) -> Vec<f64> {
        linspace(self.argument_range, self.argument_steps)
    }

    pub fn points(&self) -> usize {
        self.modulus_steps * self.argument_steps
    }

    /// Same ranges with the step counts replaced.
    pub fn with_steps(&self, modulus_steps: usize, argument_steps: usize) -> Result<Self> {
        GridSpec::new(
            self.modulus_range,
            modulus_steps,
            self.argument_range,
            argument_steps,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub lemma_id: String,
    pub computed: BTreeMap<String, f64>,
    /// Slack of each checked inequality; positive means satisfied.
    pub margins: BTreeMap<String, f64>,
    pub passed: bool,
    pub grid: Option<GridSpec>,
}

impl VerificationReport {
    pub fn new(lemma_id: &str, grid: Option<GridSpec>) -> Self {
        VerificationReport {
            lemma_id: lemma_id.to_string(),
            computed: BTreeMap::new(),
            margins: BTreeMap::new(),
            passed: true,
            grid,
        }
    }

    pub fn record(&mut self, name: &str, value: f64) -> &mut Self {
        self.computed.insert(name.to_string(), value);
        self
    }

    /// Adds a margin and updates `passed`; NaN counts as failure.
    pub fn margin(&mut self, name: &str, value: f64) -> &mut Self {
        self.margins.insert(name.to_string(), value);
        self.passed = self.margins.values().all(|m| *m > 0.0);
        self
    }

    pub fn min_margin(&self) -> Option<(&str, f64)> {
        self.margins
            .iter()
            .map(|(k, v)| (k.as_str(), *v))
            .min_by(|a, b| {
                let key = |x: f64| if x.is_nan() { f64::NEG_INFINITY } else { x };
                key(a.1).total_cmp(&key(b.1))
            })
    }

    pub fn failed_margins(&self) -> Vec<(&str, f64)> {
        self.margins
            .iter()
            .filter(|(_, v)| v.is_nan() || **v <= 0.0)
            .map(|(k, v)| (k.as_str(), *v))
            .collect()
    }
}

/// Default-resolution run of every lemma check, in a fixed order.
pub fn verify_all() -> Result<Vec<VerificationReport>> {
    Ok(vec![
        mu_properties_check(mu::DEFAULT_MU_SAMPLES)?,
        verify_ab_monotone(mu::DEFAULT_AB_J_MAX, mu::DEFAULT_AB_GRID_POINTS)?,
        verify_lemma_q(&products::default_q_grid())?,
        verify_lemma_k5()?,
        verify_lemma_k4()?,
        verify_lemma_k1_cases()?,
        verify_lemma_k1_direct(&k1::default_direct_grid(), k1::DEFAULT_Z_STEPS)?,
        verify_lemma_k2(&k2::default_sector_grid(), k2::DEFAULT_PSI_STEPS)?,
    ])
}
