//! Radii of the annuli `m_n < |xi_n| < M_n` holding the `n`-th zero at
//! `|q| = tau_n = 1 - 1/(alpha0 n)`, from the large-`n` asymptotics of the
//! zeros.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Result, ThetaError};

/// Default column set of the table.
pub const DEFAULT_TABLE_N: [u32; 10] = [5, 6, 7, 8, 9, 10, 15, 20, 25, 30];

/// `alpha0 = sqrt(3) / (2 pi)`.
pub fn alpha0() -> f64 {
    3f64.sqrt() / (2.0 * PI)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticRow {
    pub n: u32,
    pub tau: f64,
    /// Inner radius `tau^{-n + 1/2}`.
    pub m: f64,
    /// Outer radius `tau^{-n - 1/2}`.
    #[serde(rename = "M")]
    pub big_m: f64,
}

impl AsymptoticRow {
    /// The row with `tau` truncated to 2 decimals and `m`, `M` to 1 decimal.
    pub fn truncated(&self) -> AsymptoticRow {
        AsymptoticRow {
            n: self.n,
            tau: truncate(self.tau, 2),
            m: truncate(self.m, 1),
            big_m: truncate(self.big_m, 1),
        }
    }
}

/// Truncation (not rounding) of a positive value to `decimals` places.
pub fn truncate(x: f64, decimals: i32) -> f64 {
    let s = 10f64.powi(decimals);
    (x * s).floor() / s
}

pub fn table_row(n: u32) -> Result<AsymptoticRow> {
    let tau = 1.0 - 1.0 / (alpha0() * f64::from(n));
    if tau.is_nan() || tau <= 0.0 {
        return Err(ThetaError::Domain(format!(
            "tau_n = 1 - 1/(alpha0 n) must be positive, got {tau} for n = {n}"
        )));
    }
    let nf = f64::from(n);
    Ok(AsymptoticRow {
        n,
        tau,
        m: tau.powf(-nf + 0.5),
        big_m: tau.powf(-nf - 0.5),
    })
}

pub fn table(ns: &[u32]) -> Result<Vec<AsymptoticRow>> {
    ns.iter().map(|&n| table_row(n)).collect()
}
