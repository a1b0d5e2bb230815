//! Scalar domain types: complex points and the nome `q`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ThetaError};

/// Radius below which strong separation of the zeros holds unconditionally.
///
/// It is the positive root of `sum_{m>=1} rho^(m^2/2) = 1/2`; see
/// [`crate::lemmas::constants::separation_radius`] for the recomputation.
pub const C0: f64 = 0.207_875_020_608_215_65;

/// A finite complex number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPoint", into = "RawPoint")]
pub struct ComplexPoint {
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct RawPoint {
    re: f64,
    im: f64,
}

impl TryFrom<RawPoint> for ComplexPoint {
    type Error = ThetaError;
    fn try_from(raw: RawPoint) -> Result<Self> {
        ComplexPoint::new(raw.re, raw.im)
    }
}

impl From<ComplexPoint> for RawPoint {
    fn from(p: ComplexPoint) -> Self {
        RawPoint { re: p.re, im: p.im }
    }
}

impl ComplexPoint {
    pub const ZERO: ComplexPoint = ComplexPoint { re: 0.0, im: 0.0 };
    pub const ONE: ComplexPoint = ComplexPoint { re: 1.0, im: 0.0 };

    pub fn new(re: f64, im: f64) -> Result<Self> {
        if re.is_finite() && im.is_finite() {
            Ok(ComplexPoint { re, im })
        } else {
            Err(ThetaError::InvalidParameter(format!(
                "complex components must be finite, got ({re}, {im})"
            )))
        }
    }

    pub fn real(re: f64) -> Result<Self> {
        Self::new(re, 0.0)
    }

    pub fn from_polar(modulus: f64, argument: f64) -> Result<Self> {
        let c = Complex64::from_polar(modulus, argument);
        Self::new(c.re, c.im)
    }

    pub fn re(&self) -> f64 {
        self.re
    }

    pub fn im(&self) -> f64 {
        self.im
    }

    pub fn norm(&self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn arg(&self) -> f64 {
        self.im.atan2(self.re)
    }

    pub fn conj(&self) -> Self {
        ComplexPoint {
            re: self.re,
            im: -self.im,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

impl TryFrom<Complex64> for ComplexPoint {
    type Error = ThetaError;
    fn try_from(c: Complex64) -> Result<Self> {
        ComplexPoint::new(c.re, c.im)
    }
}

impl From<ComplexPoint> for Complex64 {
    fn from(p: ComplexPoint) -> Self {
        p.to_complex()
    }
}

impl fmt::Display for ComplexPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_sign_negative() {
            write!(f, "{}-{}i", self.re, -self.im)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

/// The nome `q`, restricted to the punctured unit disk.
///
/// Modulus and argument are cached at construction; the argument lies in
/// `(-pi, pi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QParameter {
    value: ComplexPoint,
    modulus: f64,
    argument: f64,
}

impl QParameter {
    pub fn new(value: ComplexPoint) -> Result<Self> {
        let modulus = value.norm();
        if !(modulus > 0.0 && modulus < 1.0) {
            return Err(ThetaError::InvalidParameter(format!(
                "q must satisfy 0 < |q| < 1, got |q| = {modulus}"
            )));
        }
        let mut argument = value.arg();
        if argument <= -PI {
            argument += 2.0 * PI;
        }
        Ok(QParameter {
            value,
            modulus,
            argument,
        })
    }

    pub fn from_complex(c: Complex64) -> Result<Self> {
        Self::new(ComplexPoint::try_from(c)?)
    }

    pub fn real(x: f64) -> Result<Self> {
        Self::new(ComplexPoint::real(x)?)
    }

    pub fn from_polar(modulus: f64, argument: f64) -> Result<Self> {
        Self::new(ComplexPoint::from_polar(modulus, argument)?)
    }

    pub fn value(&self) -> ComplexPoint {
        self.value
    }

    pub fn to_complex(&self) -> Complex64 {
        self.value.to_complex()
    }

    pub fn modulus(&self) -> f64 {
        self.modulus
    }

    pub fn argument(&self) -> f64 {
        self.argument
    }

    pub fn conj(&self) -> Self {
        // conjugation keeps 0 < |q| < 1
        QParameter::new(self.value.conj()).expect("conjugate of a valid nome")
    }

    /// Membership in `D(a) = { 0 < |q| <= a, arg q in [pi/2, 3pi/2] }`.
    ///
    /// Points produced by `from_polar` on the boundary rays carry a real part
    /// of order 1e-17, so the half-plane test allows a relative slack of 1e-12.
    pub fn in_left_domain(&self, a: f64) -> bool {
        let slack = 1e-12 * self.modulus;
        self.modulus <= a * (1.0 + 1e-12) && self.value.re() <= slack
    }

    /// Membership in the closed punctured disk `0 < |q| <= radius`.
    pub fn in_punctured_disk(&self, radius: f64) -> bool {
        self.modulus <= radius * (1.0 + 1e-12)
    }

    /// `|q| <= c0`, where strong separation is known unconditionally.
    pub fn within_c0(&self) -> bool {
        self.in_punctured_disk(C0)
    }

    /// Angle of `q` measured in `[0, 2pi)`, convenient for the left half-plane.
    pub fn argument_positive(&self) -> f64 {
        if self.argument < 0.0 {
            self.argument + 2.0 * PI
        } else {
            self.argument
        }
    }

    /// True when `q` lies in the closed upper half-plane of the left domain,
    /// i.e. `arg q in [pi/2, pi]`.
    pub fn in_upper_left_quadrant(&self) -> bool {
        let a = self.argument;
        (FRAC_PI_2 - 1e-12..=PI).contains(&a)
    }
}

impl<'de> Deserialize<'de> for QParameter {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            value: ComplexPoint,
        }
        let raw = Raw::deserialize(d)?;
        QParameter::new(raw.value).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for QParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.value.fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_points() {
        assert!(ComplexPoint::new(f64::NAN, 0.0).is_err());
        assert!(ComplexPoint::new(0.0, f64::INFINITY).is_err());
        assert!(ComplexPoint::new(1.0, -2.0).is_ok());
    }

    #[test]
    fn nome_must_lie_in_punctured_disk() {
        assert!(QParameter::real(0.0).is_err());
        assert!(QParameter::real(1.0).is_err());
        assert!(QParameter::from_polar(1.2, 0.3).is_err());
        let q = QParameter::from_polar(0.6, 3.0 * PI / 4.0).unwrap();
        assert!((q.modulus() - 0.6).abs() < 1e-15);
        assert!((q.argument() - 3.0 * PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn argument_is_normalized_to_half_open_interval() {
        let q = QParameter::real(-0.4).unwrap();
        assert_eq!(q.argument(), PI);
        let q = QParameter::from_polar(0.4, -PI).unwrap();
        assert!((q.argument() - PI).abs() < 1e-15);
    }

    #[test]
    fn left_domain_membership_includes_boundary_rays() {
        let top = QParameter::from_polar(0.6, FRAC_PI_2).unwrap();
        let bottom = QParameter::from_polar(0.6, 3.0 * FRAC_PI_2).unwrap();
        assert!(top.in_left_domain(0.6));
        assert!(bottom.in_left_domain(0.6));
        assert!(!top.in_left_domain(0.55));
        assert!(!QParameter::real(0.3).unwrap().in_left_domain(0.6));
        assert!(QParameter::real(0.2).unwrap().within_c0());
    }
}
