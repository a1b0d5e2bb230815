//! Named numerical constants, their recomputation, and the registry of
//! published values they are compared against.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use serde::{Deserialize, Serialize};

use super::mu::{a_j, b_j, mu};
use super::{constant_budget, VerificationReport};
use crate::asymptotics::alpha0;
use crate::error::{Result, ThetaError};
use crate::series::{gaussian_series, geometric_product};
use crate::types::C0;

/// Digits of agreement required of every registry constant.
pub const REQUIRED_DIGITS: f64 = 9.0;

/// Number of leading significant digits on which `computed` agrees with
/// `reference`: `floor(log10 |reference|) + 1 - log10 |computed - reference|`.
///
/// A value of 9 means the two differ by at most one unit in the ninth
/// significant digit. Identical inputs give infinity.
pub fn matching_digits(computed: f64, reference: f64) -> f64 {
    let diff = (computed - reference).abs();
    if diff == 0.0 {
        return f64::INFINITY;
    }
    if reference == 0.0 || !diff.is_finite() {
        return f64::NEG_INFINITY;
    }
    reference.abs().log10().floor() + 1.0 - diff.log10()
}

/// The radius `c0`: the positive root of `sum_{m>=1} rho^{m^2/2} = 1/2`,
/// found by bisection.
pub fn separation_radius() -> f64 {
    fn f(rho: f64) -> f64 {
        let mut s = 0.0;
        for m in 1.. {
            let t = rho.powf(f64::from(m * m) / 2.0);
            s += t;
            if t < 1e-20 {
                break;
            }
        }
        s - 0.5
    }
    let (mut lo, mut hi) = (0.01, 0.5);
    while hi - lo > 1e-17 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `gamma = prod_{j>=12} (1 - 0.6^j)`.
pub fn gamma() -> Result<f64> {
    Ok(geometric_product(0.6f64.powi(12), 0.6, &constant_budget())?.value)
}

/// `eta = prod_{j>=1} |0.6^{j - 9/2} - 1|`, a lower bound for `|U|` when `k >= 5`.
pub fn eta() -> Result<f64> {
    Ok(geometric_product(0.6f64.powf(-3.5), 0.6, &constant_budget())?.value)
}

/// `xi = prod_{j>=0} |1 - 0.6^{9/2 + j}|`, a lower bound for `|R|` when `k >= 5`.
pub fn xi() -> Result<f64> {
    Ok(geometric_product(0.6f64.powf(4.5), 0.6, &constant_budget())?.value)
}

/// `sum_{j>=1} 0.6^{j(j-1)/2 + s j}`, the majorant of `|G|` on
/// `|z| = |q|^{-s}` for `q` in `D(0.6)`.
pub fn g_majorant(s: f64) -> Result<f64> {
    Ok(gaussian_series(0.6, s, 1, &constant_budget())?.value)
}

/// `chi_0 .. chi_5`: lower bounds for groups of factors of `U` on
/// `|z| = |q|^{-7/2}`.
pub fn chi(j: u32) -> Result<f64> {
    match j {
        0 => Ok(mu(3, 0.6f64.powf(-2.5))? * mu(2, 0.6f64.powf(-1.5))? * mu(1, 0.6f64.powf(-0.5))?),
        1..=4 => Ok(a_j(0.6, j)?.min(b_j(0.6, j)?)),
        5 => Ok(geometric_product(0.6f64.powf(12.5), 0.6, &constant_budget())?.value),
        _ => Err(ThetaError::InvalidParameter(format!(
            "chi index must be in 0..=5, got {j}"
        ))),
    }
}

/// `chi_* = chi_2 chi_3 chi_4 chi_5`.
pub fn chi_star() -> Result<f64> {
    Ok(chi(2)? * chi(3)? * chi(4)? * chi(5)?)
}

/// `1.2 chi_0 chi_1 chi_*^2`.
pub fn k4_product_bound() -> Result<f64> {
    Ok(1.2 * chi(0)? * chi(1)? * chi_star()?.powi(2))
}

/// `1.2 eta xi`.
pub fn k5_product_bound() -> Result<f64> {
    Ok(1.2 * eta()? * xi()?)
}

/// `sum_{j>=2} r^{j(j-1)/2 - j/2}`.
pub fn phi_flat_value(r: f64) -> Result<f64> {
    Ok(gaussian_series(r, -0.5, 2, &constant_budget())?.value)
}

/// `(1 + 1/r)^{1/2}`.
pub fn phi_star_value(r: f64) -> f64 {
    (1.0 + 1.0 / r).sqrt()
}

/// `a_0 = 1 + sum_{j>=4} 0.6^{j(j-1)/2 - 3j/2}`.
pub fn a0() -> Result<f64> {
    Ok(1.0 + gaussian_series(0.6, -1.5, 4, &constant_budget())?.value)
}

/// `sum_{j>=8} 0.6^{j(j-1)/2 - 3j/2}`, bounding the tail `A**`.
pub fn a_tail_bound() -> Result<f64> {
    Ok(gaussian_series(0.6, -1.5, 8, &constant_budget())?.value)
}

/// `0.6^{-3/2} (3 * 0.6^{-1} / 4)^{1/2}`.
pub fn lemma8_bound_wide() -> f64 {
    0.6f64.powf(-1.5) * (0.75 / 0.6f64).sqrt()
}

/// `0.55^{-2} / sqrt 2`.
pub fn lemma8_bound_small() -> f64 {
    0.55f64.powi(-2) / SQRT_2
}

/// `|q|` at which `tau(|q|) = (2|q|)^{-1/2} - 2^{-1/2}` equals 1/2.
pub fn tau_min_modulus() -> f64 {
    let s = 0.5 + FRAC_1_SQRT_2;
    1.0 / (2.0 * s * s)
}

/// `0.6^{-1/2} cos(11pi/12) + 1 + cos(8pi/3)`.
pub fn case_4d_bound() -> f64 {
    0.6f64.powf(-0.5) * (11.0 * PI / 12.0).cos() + 1.0 + (8.0 * PI / 3.0).cos()
}

/// `1 + c0^{-1/2} cos(5pi/8) + cos(13pi/8)`.
pub fn case_3c_bound() -> f64 {
    1.0 + C0.powf(-0.5) * (5.0 * PI / 8.0).cos() + (13.0 * PI / 8.0).cos()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantEntry {
    pub name: String,
    /// Published value, as printed.
    pub reference: f64,
    /// Significant digits printed in the reference value.
    pub digits: u32,
    pub description: String,
}

/// Published constants keyed by name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsRegistry {
    entries: BTreeMap<String, ConstantEntry>,
}

const PUBLISHED: &[(&str, f64, u32, &str)] = &[
    (
        "c0",
        0.2078750206,
        10,
        "radius of unconditional strong separation",
    ),
    ("alpha0", 0.2756644477, 10, "sqrt(3) / (2 pi)"),
    (
        "exp_inv_alpha0",
        37.62236657,
        10,
        "limit of the annulus radii m_n, M_n",
    ),
    ("gamma", 0.9945691384, 10, "prod_{j>=12} (1 - 0.6^j)"),
    ("q0_bound", 1.206552620, 10, "1.2 / gamma"),
    ("eta", 0.2411047426, 10, "lower bound of |U| for k >= 5"),
    ("xi", 0.7715882456, 10, "lower bound of |R| for k >= 5"),
    ("k5_product_bound", 0.2232403024, 10, "1.2 eta xi"),
    (
        "g_bound_k5",
        0.1066576686,
        10,
        "majorant of |G| on |z| = |q|^{-9/2}",
    ),
    (
        "chi0",
        1.742379963,
        10,
        "mu_3(0.6^{-5/2}) mu_2(0.6^{-3/2}) mu_1(0.6^{-1/2})",
    ),
    ("chi1", 0.1749135662, 10, "min(A_1(0.6), B_1(0.6))"),
    ("chi2", 0.7772399345, 10, "min(A_2(0.6), B_2(0.6))"),
    ("chi3", 0.9492771959, 10, "min(A_3(0.6), B_3(0.6))"),
    ("chi4", 0.9889171980, 10, "min(A_4(0.6), B_4(0.6))"),
    ("chi5", 0.9957913379, 10, "prod_{k>=16} |1 - 0.6^{k - 7/2}|"),
    (
        "k4_product_bound",
        0.1930636291,
        10,
        "1.2 chi0 chi1 chi_*^2",
    ),
    (
        "g_bound_k4",
        0.1851580824,
        10,
        "majorant of |G| on |z| = |q|^{-7/2}",
    ),
    ("phi_star_0.6", 1.632993162, 10, "(1 + 1/0.6)^{1/2}"),
    (
        "phi_flat_0.6",
        1.618354488,
        10,
        "sum_{j>=2} 0.6^{j(j-1)/2 - j/2}",
    ),
    (
        "phi_flat_0.3_minus_1",
        0.1725370862,
        10,
        "sum_{j>=3} 0.3^{j(j-1)/2 - j/2}",
    ),
    ("case_3a_bound", 0.9128709292, 10, "(2 * 0.6)^{-1/2}"),
    (
        "tau_min_modulus",
        0.3431457506,
        10,
        "|q| with tau(|q|) = 1/2",
    ),
    (
        "inv_sqrt2",
        0.7071067814,
        10,
        "minimum of ((1 - 2 tau)^2 / 2 + 1/2)^{1/2}",
    ),
    (
        "case_3c_bound",
        0.5433422972,
        10,
        "1 + c0^{-1/2} cos(5pi/8) + cos(13pi/8)",
    ),
    (
        "case_4d_bound",
        -0.7470048804,
        10,
        "0.6^{-1/2} cos(11pi/12) + 1 + cos(8pi/3)",
    ),
    ("a0", 2.330487021, 10, "majorant of |A| for |q| <= 0.6"),
    (
        "lemma8_bound_wide",
        2.405626123,
        10,
        "0.6^{-3/2} (3 * 0.6^{-1} / 4)^{1/2}",
    ),
    ("lemma8_bound_small", 2.337543079, 10, "0.55^{-2} / sqrt 2"),
    (
        "a_tail_bound",
        0.0002925303367,
        10,
        "sum_{j>=8} 0.6^{j(j-1)/2 - 3j/2}",
    ),
];

impl ConstantsRegistry {
    pub fn published() -> Self {
        let entries = PUBLISHED
            .iter()
            .map(|(name, reference, digits, description)| {
                (
                    name.to_string(),
                    ConstantEntry {
                        name: name.to_string(),
                        reference: *reference,
                        digits: *digits,
                        description: description.to_string(),
                    },
                )
            })
            .collect();
        ConstantsRegistry { entries }
    }

    pub fn get(&self, name: &str) -> Option<&ConstantEntry> {
        self.entries.get(name)
    }

    pub fn reference(&self, name: &str) -> Result<f64> {
        self.get(name)
            .map(|e| e.reference)
            .ok_or_else(|| ThetaError::InvalidParameter(format!("unknown constant {name}")))
    }

    pub fn entries(&self) -> impl Iterator<Item = &ConstantEntry> {
        self.entries.values()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Recomputes the named registry constant from its definition.
pub fn recompute(name: &str) -> Result<f64> {
    Ok(match name {
        "c0" => separation_radius(),
        "alpha0" => alpha0(),
        "exp_inv_alpha0" => (1.0 / alpha0()).exp(),
        "gamma" => gamma()?,
        "q0_bound" => 1.2 / gamma()?,
        "eta" => eta()?,
        "xi" => xi()?,
        "k5_product_bound" => k5_product_bound()?,
        "g_bound_k5" => g_majorant(4.5)?,
        "chi0" => chi(0)?,
        "chi1" => chi(1)?,
        "chi2" => chi(2)?,
        "chi3" => chi(3)?,
        "chi4" => chi(4)?,
        "chi5" => chi(5)?,
        "k4_product_bound" => k4_product_bound()?,
        "g_bound_k4" => g_majorant(3.5)?,
        "phi_star_0.6" => phi_star_value(0.6),
        "phi_flat_0.6" => phi_flat_value(0.6)?,
        "phi_flat_0.3_minus_1" => phi_flat_value(0.3)? - 1.0,
        "case_3a_bound" => 1.2f64.powf(-0.5),
        "tau_min_modulus" => tau_min_modulus(),
        "inv_sqrt2" => FRAC_1_SQRT_2,
        "case_3c_bound" => case_3c_bound(),
        "case_4d_bound" => case_4d_bound(),
        "a0" => a0()?,
        "lemma8_bound_wide" => lemma8_bound_wide(),
        "lemma8_bound_small" => lemma8_bound_small(),
        "a_tail_bound" => a_tail_bound()?,
        _ => {
            return Err(ThetaError::InvalidParameter(format!(
                "unknown constant {name}"
            )))
        }
    })
}

/// Recomputes every registry constant; the margin of each is its number of
/// matching significant digits minus [`REQUIRED_DIGITS`].
pub fn verify_constants() -> Result<VerificationReport> {
    let registry = ConstantsRegistry::published();
    let mut report = VerificationReport::new("constants", None);
    for entry in registry.entries() {
        let value = recompute(&entry.name)?;
        let digits = matching_digits(value, entry.reference);
        report
            .record(&entry.name, value)
            .margin(&entry.name, digits - REQUIRED_DIGITS);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matching_digits_definition() {
        assert_eq!(matching_digits(1.0, 1.0), f64::INFINITY);
        assert!((matching_digits(1.2345, 1.2346) - 5.0).abs() < 1e-9);
        assert!((matching_digits(0.012345, 0.012346) - 5.0).abs() < 1e-9);
        assert!(matching_digits(f64::NAN, 1.0) == f64::NEG_INFINITY);
    }

    #[test]
    fn separation_radius_matches_the_constant() {
        assert!((separation_radius() - C0).abs() < 1e-15);
    }

    #[test]
    fn every_entry_has_a_recomputation() {
        let reg = ConstantsRegistry::published();
        assert_eq!(reg.len(), PUBLISHED.len());
        for e in reg.entries() {
            assert!(recompute(&e.name).is_ok(), "{}", e.name);
        }
        assert!(recompute("nope").is_err());
        assert!(chi(6).is_err());
    }
}
