//! Zero counting on circles `|z| = R` by the argument principle, zero location
//! by Newton's method, and the strong-separation check over modulus annuli
//! `|q|^{-k+1/2} < |z| < |q|^{-k-1/2}`.
//!
//! Moduli of `theta` are normalized by the largest series term. Near a zero the
//! terms of index `k-1` and `k` cancel, and for small `|q|` they are huge, so
//! only the normalized residual is meaningful in double precision.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ThetaError};
use crate::series::{eval_theta, eval_theta_dz, SeriesBudget};
use crate::types::{ComplexPoint, QParameter};

pub const DEFAULT_CONTOUR_SAMPLES: usize = 256;
pub const MAX_BISECTION_DEPTH: u32 = 12;
/// Minimum normalized `|theta|` on a counting contour.
pub const CONTOUR_SAFETY_THRESHOLD: f64 = 1e-6;
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-11;

const MAX_PHASE_STEP: f64 = FRAC_PI_2;
const INTEGRALITY_SLACK: f64 = 1e-3;
const MAX_NEWTON_ITERATIONS: usize = 100;
const MOMENT_SAMPLES: usize = 1024;
const MAX_SPLIT_DEPTH: u32 = 4;

/// The open annulus `|q|^{-a} < |z| < |q|^{-b}`; `a = 0` denotes the punctured
/// disk `0 < |z| < |q|^{-b}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Annulus {
    inner_exponent: f64,
    outer_exponent: f64,
}

impl Annulus {
    pub fn new(inner_exponent: f64, outer_exponent: f64) -> Result<Self> {
        if !(inner_exponent >= 0.0 && outer_exponent > inner_exponent && outer_exponent.is_finite())
        {
            return Err(ThetaError::InvalidParameter(format!(
                "annulus exponents must satisfy b > a >= 0, got a = {inner_exponent}, b = {outer_exponent}"
            )));
        }
        Ok(Annulus {
            inner_exponent,
            outer_exponent,
        })
    }

    pub fn punctured_disk(outer_exponent: f64) -> Result<Self> {
        Self::new(0.0, outer_exponent)
    }

    /// The annulus that should hold exactly the `k`-th zero: the punctured
    /// disk of exponent 3/2 for `k = 1`, `U_{k-1/2, k+1/2}` otherwise.
    pub fn for_index(k: u32) -> Result<Self> {
        match k {
            0 => Err(ThetaError::InvalidParameter(
                "zero index k must be >= 1".into(),
            )),
            1 => Self::punctured_disk(1.5),
            _ => {
                let k = f64::from(k);
                Self::new(k - 0.5, k + 0.5)
            }
        }
    }

    pub fn inner_exponent(&self) -> f64 {
        self.inner_exponent
    }

    pub fn outer_exponent(&self) -> f64 {
        self.outer_exponent
    }

    pub fn is_punctured(&self) -> bool {
        self.inner_exponent == 0.0
    }

    pub fn inner_radius(&self, q: &QParameter) -> f64 {
        if self.is_punctured() {
            0.0
        } else {
            q.modulus().powf(-self.inner_exponent)
        }
    }

    pub fn outer_radius(&self, q: &QParameter) -> f64 {
        q.modulus().powf(-self.outer_exponent)
    }

    pub fn contains(&self, q: &QParameter, z: ComplexPoint) -> bool {
        let m = z.norm();
        m > self.inner_radius(q) && m < self.outer_radius(q)
    }

    /// Splits at the geometric mean of the boundary radii (for the punctured
    /// disk, of 1 and the outer radius).
    pub fn split(&self) -> (Annulus, Annulus) {
        let mid = 0.5 * (self.inner_exponent + self.outer_exponent);
        (
            Annulus {
                inner_exponent: self.inner_exponent,
                outer_exponent: mid,
            },
            Annulus {
                inner_exponent: mid,
                outer_exponent: self.outer_exponent,
            },
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindingResult {
    pub count: i64,
    pub samples_used: usize,
    /// Smallest normalized `|theta|` seen on the contour.
    pub min_modulus_on_contour: f64,
    /// Accumulated phase divided by `2 pi` before rounding.
    pub turns: f64,
}

/// How the Newton iteration behind a [`ZeroRecord`] was started.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedKind {
    /// `-q^{-k}`, the small-`|q|` asymptotics of the `k`-th zero.
    Asymptotic,
    /// Previous zero along a ray in the `q` plane.
    Continuation,
    /// First moment `(1 / 2 pi i) \oint z theta'/theta dz` over the annulus.
    ContourMoment,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroRecord {
    pub k: u32,
    pub location: ComplexPoint,
    /// `|theta(q, location)|` divided by the largest series term.
    pub residual: f64,
    /// Unnormalized `|theta(q, location)|`.
    pub abs_value: f64,
    /// `|location * theta'(q, location)|` divided by the largest series term.
    pub derivative_modulus: f64,
    pub annulus_ok: bool,
    pub newton_iterations: usize,
    pub seed: SeedKind,
}

struct Contour<'a> {
    q: &'a QParameter,
    radius: f64,
    budget: SeriesBudget,
    samples: usize,
    min_modulus: f64,
}

impl Contour<'_> {
    fn eval(&mut self, phi: f64) -> Result<Complex64> {
        let z = ComplexPoint::from_polar(self.radius, phi)?;
        let r = eval_theta(self.q, z, &self.budget)?;
        self.samples += 1;
        let m = if r.scale > 0.0 {
            r.value.norm() / r.scale
        } else {
            0.0
        };
        self.min_modulus = self.min_modulus.min(m);
        Ok(r.complex())
    }

    fn too_close(&self) -> ThetaError {
        ThetaError::ContourTooClose {
            radius: self.radius,
            min_modulus: self.min_modulus,
        }
    }

    fn phase_increment(
        &mut self,
        a: f64,
        fa: Complex64,
        b: f64,
        fb: Complex64,
        depth: u32,
    ) -> Result<f64> {
        let d = (fb * fa.conj()).arg();
        if d.abs() <= MAX_PHASE_STEP {
            return Ok(d);
        }
        if depth >= MAX_BISECTION_DEPTH {
            return Err(self.too_close());
        }
        let m = 0.5 * (a + b);
        let fm = self.eval(m)?;
        Ok(self.phase_increment(a, fa, m, fm, depth + 1)?
            + self.phase_increment(m, fm, b, fb, depth + 1)?)
    }
}

/// Number of zeros of `theta(q, .)` in the disk `|z| < radius`.
///
/// The contour starts with `initial_samples` equally spaced points; any step
/// whose phase increment exceeds `pi/2` is bisected, up to
/// [`MAX_BISECTION_DEPTH`] times.
pub fn winding_number(
    q: &QParameter,
    radius: f64,
    initial_samples: usize,
) -> Result<WindingResult> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(ThetaError::InvalidParameter(format!(
            "contour radius must be positive and finite, got {radius}"
        )));
    }
    if initial_samples < 3 {
        return Err(ThetaError::InvalidParameter(format!(
            "a contour needs at least 3 samples, got {initial_samples}"
        )));
    }
    let mut contour = Contour {
        q,
        radius,
        budget: SeriesBudget::default(),
        samples: 0,
        min_modulus: f64::INFINITY,
    };
    let step = 2.0 * PI / initial_samples as f64;
    let f0 = contour.eval(0.0)?;
    let mut prev = (0.0, f0);
    let mut total = 0.0;
    for i in 1..=initial_samples {
        let phi = i as f64 * step;
        let f = if i == initial_samples {
            f0
        } else {
            contour.eval(phi)?
        };
        total += contour.phase_increment(prev.0, prev.1, phi, f, 0)?;
        prev = (phi, f);
    }
    if contour.min_modulus < CONTOUR_SAFETY_THRESHOLD {
        return Err(contour.too_close());
    }
    let turns = total / (2.0 * PI);
    let count = turns.round();
    if (turns - count).abs() > INTEGRALITY_SLACK || count < 0.0 {
        return Err(contour.too_close());
    }
    Ok(WindingResult {
        count: count as i64,
        samples_used: contour.samples,
        min_modulus_on_contour: contour.min_modulus,
        turns,
    })
}

/// Zeros of `theta(q, .)` in the annulus, counted with multiplicity.
pub fn count_zeros_in_annulus(q: &QParameter, annulus: &Annulus) -> Result<i64> {
    let outer = winding_number(q, annulus.outer_radius(q), DEFAULT_CONTOUR_SAMPLES)?;
    if annulus.is_punctured() {
        return Ok(outer.count);
    }
    let inner = winding_number(q, annulus.inner_radius(q), DEFAULT_CONTOUR_SAMPLES)?;
    Ok(outer.count - inner.count)
}

struct NewtonOutcome {
    z: Complex64,
    iterations: usize,
}

fn normalized_residual(q: &QParameter, z: Complex64) -> Result<(f64, Complex64)> {
    let r = eval_theta(q, ComplexPoint::try_from(z)?, &SeriesBudget::default())?;
    let res = if r.scale > 0.0 {
        r.value.norm() / r.scale
    } else {
        0.0
    };
    Ok((res, r.complex()))
}

fn newton(q: &QParameter, seed: Complex64, residual_tol: f64) -> Result<NewtonOutcome> {
    let budget = SeriesBudget::default();
    let mut z = seed;
    let mut residual = f64::INFINITY;
    for it in 0..=MAX_NEWTON_ITERATIONS {
        if !(z.re.is_finite() && z.im.is_finite()) {
            break;
        }
        let (res, f) = normalized_residual(q, z)?;
        residual = res;
        if res < residual_tol {
            return Ok(NewtonOutcome { z, iterations: it });
        }
        if it == MAX_NEWTON_ITERATIONS {
            break;
        }
        let df = eval_theta_dz(q, ComplexPoint::try_from(z)?, &budget)?.complex();
        if df.norm() == 0.0 {
            break;
        }
        let mut step = f / df;
        // keep a wild step from jumping several annuli at once
        let cap = 0.5 * z.norm().max(1.0);
        let len = step.norm();
        if len > cap {
            step *= cap / len;
        }
        z -= step;
    }
    Err(ThetaError::NoConvergence {
        iterations: MAX_NEWTON_ITERATIONS,
        residual,
        at_modulus: None,
    })
}

fn record(q: &QParameter, k: u32, outcome: NewtonOutcome, seed: SeedKind) -> Result<ZeroRecord> {
    let budget = SeriesBudget::default();
    let location = ComplexPoint::try_from(outcome.z)?;
    let f = eval_theta(q, location, &budget)?;
    let df = eval_theta_dz(q, location, &budget)?;
    let annulus = Annulus::for_index(k)?;
    Ok(ZeroRecord {
        k,
        location,
        residual: f.value.norm() / f.scale,
        abs_value: f.value.norm(),
        derivative_modulus: (df.complex() * outcome.z).norm() / f.scale,
        annulus_ok: annulus.contains(q, location),
        newton_iterations: outcome.iterations,
        seed,
    })
}

fn validate_tol(residual_tol: f64) -> Result<()> {
    if residual_tol > 0.0 && residual_tol.is_finite() {
        Ok(())
    } else {
        Err(ThetaError::InvalidParameter(format!(
            "residual tolerance must be positive, got {residual_tol}"
        )))
    }
}

/// Newton refinement of the `k`-th zero from the seed `-q^{-k}`.
///
/// A converged record may still fall outside its annulus; `annulus_ok` says
/// so. Use [`locate_zero_robust`] for the contour fallback.
pub fn locate_zero(q: &QParameter, k: u32, residual_tol: f64) -> Result<ZeroRecord> {
    if k == 0 {
        return Err(ThetaError::InvalidParameter(
            "zero index k must be >= 1".into(),
        ));
    }
    validate_tol(residual_tol)?;
    let seed = -q.to_complex().powi(-(k as i32));
    let outcome = newton(q, seed, residual_tol)?;
    record(q, k, outcome, SeedKind::Asymptotic)
}

/// `(1 / 2 pi i) \oint_{|z| = radius} z theta'(z) / theta(z) dz`, the sum of
/// the zeros inside the circle, by the trapezoidal rule.
fn contour_moment(q: &QParameter, radius: f64) -> Result<Complex64> {
    let budget = SeriesBudget::default();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..MOMENT_SAMPLES {
        let phi = 2.0 * PI * i as f64 / MOMENT_SAMPLES as f64;
        let z = ComplexPoint::from_polar(radius, phi)?;
        let f = eval_theta(q, z, &budget)?.complex();
        let df = eval_theta_dz(q, z, &budget)?.complex();
        let zc = z.to_complex();
        acc += zc * zc * df / f;
    }
    Ok(acc / MOMENT_SAMPLES as f64)
}

fn annulus_moment(q: &QParameter, annulus: &Annulus) -> Result<Complex64> {
    let outer = contour_moment(q, annulus.outer_radius(q))?;
    if annulus.is_punctured() {
        Ok(outer)
    } else {
        Ok(outer - contour_moment(q, annulus.inner_radius(q))?)
    }
}

fn locate_in_annulus(
    q: &QParameter,
    k: u32,
    annulus: Annulus,
    residual_tol: f64,
    depth: u32,
) -> Result<ZeroRecord> {
    let count = count_zeros_in_annulus(q, &annulus)?;
    if count != 1 {
        return Err(ThetaError::Domain(format!(
            "annulus exponents ({}, {}) hold {count} zeros, expected exactly one",
            annulus.inner_exponent, annulus.outer_exponent
        )));
    }
    let seed = annulus_moment(q, &annulus)?;
    let failure = match newton(q, seed, residual_tol) {
        Ok(out) if annulus.contains(q, ComplexPoint::try_from(out.z)?) => {
            return record(q, k, out, SeedKind::ContourMoment);
        }
        Ok(out) => ThetaError::NoConvergence {
            iterations: out.iterations,
            residual: 0.0,
            at_modulus: None,
        },
        Err(e) => e,
    };
    if depth >= MAX_SPLIT_DEPTH {
        return Err(failure);
    }
    let (lower, upper) = annulus.split();
    for half in [lower, upper] {
        if let Ok(1) = count_zeros_in_annulus(q, &half) {
            return locate_in_annulus(q, k, half, residual_tol, depth + 1);
        }
    }
    Err(failure)
}

/// Locates the unique zero in the `k`-th annulus from contour moments,
/// bisecting the annulus at the geometric-mean radius when Newton fails.
pub fn locate_zero_by_contour(q: &QParameter, k: u32, residual_tol: f64) -> Result<ZeroRecord> {
    validate_tol(residual_tol)?;
    locate_in_annulus(q, k, Annulus::for_index(k)?, residual_tol, 0)
}

/// [`locate_zero`], falling back to [`locate_zero_by_contour`] when Newton
/// fails or converges outside the `k`-th annulus.
pub fn locate_zero_robust(q: &QParameter, k: u32, residual_tol: f64) -> Result<ZeroRecord> {
    match locate_zero(q, k, residual_tol) {
        Ok(rec) if rec.annulus_ok => Ok(rec),
        Ok(rec) => locate_zero_by_contour(q, k, residual_tol).or(Ok(rec)),
        Err(e) => locate_zero_by_contour(q, k, residual_tol).map_err(|_| e),
    }
}

/// Which part of the separation statement is claimed for a given `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeparationRegime {
    /// `q` in `D(0.55)` or `|q| <= c0`: one zero in every annulus.
    Full,
    /// `q` in `D(0.6)` only: one zero for `k = 1` and `k >= 4`, two zeros in
    /// `U_{3/2, 7/2}` together.
    Partial,
    /// No claim; the check still runs.
    Unclaimed,
}

impl SeparationRegime {
    pub fn of(q: &QParameter) -> Self {
        if q.in_left_domain(0.55) || q.within_c0() {
            SeparationRegime::Full
        } else if q.in_left_domain(0.6) {
            SeparationRegime::Partial
        } else {
            SeparationRegime::Unclaimed
        }
    }

    /// Whether uniqueness in the `k`-th annulus is part of the claim.
    pub fn asserts(&self, k: u32) -> bool {
        match self {
            SeparationRegime::Partial => k == 1 || k >= 4,
            _ => true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeparationVerdict {
    /// Every annulus up to `k_max` holds one simple zero, and the regime claims it.
    Strong,
    /// Partial regime: `k = 1`, `k >= 4` separated and `U_{3/2,7/2}` holds two zeros.
    Partial,
    /// All annuli separated, but outside the claimed regime.
    Observed,
    NotSeparated,
    /// Some asserted annulus could not be evaluated.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnnulusEntry {
    pub k: u32,
    pub count: Option<i64>,
    pub count_error: Option<ThetaError>,
    pub zero: Option<ZeroRecord>,
    pub zero_error: Option<ThetaError>,
    /// Whether uniqueness in this annulus belongs to the claim for this `q`.
    pub asserted: bool,
}

impl AnnulusEntry {
    fn separated(&self) -> bool {
        self.count == Some(1) && self.zero.is_some_and(|z| z.annulus_ok)
    }

    fn evaluated(&self) -> bool {
        self.count.is_some() && self.zero.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparationReport {
    pub q: QParameter,
    pub k_max: u32,
    pub regime: SeparationRegime,
    pub entries: Vec<AnnulusEntry>,
    /// Zeros in `U_{3/2, 7/2}`, available when `k_max >= 3`.
    pub pair_count: Option<i64>,
    pub pair_count_error: Option<ThetaError>,
    pub verdict: SeparationVerdict,
    pub strong_separation: bool,
}

/// Counts and locates the zeros `xi_1 .. xi_{k_max}` and checks separation.
///
/// Contour and Newton failures are recorded per annulus with their `k`
/// rather than aborting the whole report.
pub fn verify_separation(q: &QParameter, k_max: u32) -> Result<SeparationReport> {
    if k_max == 0 {
        return Err(ThetaError::InvalidParameter("k_max must be >= 1".into()));
    }
    let regime = SeparationRegime::of(q);
    // winding[k] = zeros inside |z| = |q|^{-(k + 1/2)}, winding[0] = 0
    let mut winding: Vec<Result<i64>> = vec![Ok(0)];
    for k in 1..=k_max {
        let radius = q.modulus().powf(-(f64::from(k) + 0.5));
        winding.push(winding_number(q, radius, DEFAULT_CONTOUR_SAMPLES).map(|w| w.count));
    }

    let mut entries = Vec::with_capacity(k_max as usize);
    for k in 1..=k_max {
        let ku = k as usize;
        let (count, count_error) = match (&winding[ku], &winding[ku - 1]) {
            (Ok(outer), Ok(inner)) => (Some(outer - inner), None),
            (Err(e), _) | (_, Err(e)) => (None, Some(e.clone())),
        };
        let located = match locate_zero(q, k, DEFAULT_RESIDUAL_TOL) {
            Ok(rec) if rec.annulus_ok => Ok(rec),
            first => {
                let fallback = if count == Some(1) {
                    locate_zero_by_contour(q, k, DEFAULT_RESIDUAL_TOL)
                } else {
                    Err(ThetaError::Domain(
                        "no contour fallback without a unit count".into(),
                    ))
                };
                match (fallback, first) {
                    (Ok(rec), _) => Ok(rec),
                    (Err(_), Ok(rec)) => Ok(rec),
                    (Err(_), Err(e)) => Err(e),
                }
            }
        };
        let (zero, zero_error) = match located {
            Ok(rec) => (Some(rec), None),
            Err(e) => (None, Some(e)),
        };
        entries.push(AnnulusEntry {
            k,
            count,
            count_error,
            zero,
            zero_error,
            asserted: regime.asserts(k),
        });
    }

    let (pair_count, pair_count_error) = if k_max >= 3 {
        match (&winding[3], &winding[1]) {
            (Ok(outer), Ok(inner)) => (Some(outer - inner), None),
            (Err(e), _) | (_, Err(e)) => (None, Some(e.clone())),
        }
    } else {
        (None, None)
    };

    let asserted: Vec<&AnnulusEntry> = entries.iter().filter(|e| e.asserted).collect();
    let verdict = if asserted.iter().any(|e| !e.evaluated()) {
        SeparationVerdict::Inconclusive
    } else if !asserted.iter().all(|e| e.separated()) {
        SeparationVerdict::NotSeparated
    } else {
        match regime {
            SeparationRegime::Full => SeparationVerdict::Strong,
            SeparationRegime::Unclaimed => SeparationVerdict::Observed,
            SeparationRegime::Partial => match (k_max >= 3, pair_count) {
                (false, _) | (true, Some(2)) => SeparationVerdict::Partial,
                (true, Some(_)) => SeparationVerdict::NotSeparated,
                (true, None) => SeparationVerdict::Inconclusive,
            },
        }
    };

    Ok(SeparationReport {
        q: *q,
        k_max,
        regime,
        entries,
        pair_count,
        pair_count_error,
        verdict,
        strong_separation: verdict == SeparationVerdict::Strong,
    })
}

/// Follows the `k`-th zero as `|q|` grows from `r_start` to `r_end` along the
/// ray `arg q = arg_q`, seeding each Newton run from the previous zero scaled
/// by `(q_prev / q)^k`.
pub fn trace_zero_ray(
    arg_q: f64,
    k: u32,
    r_start: f64,
    r_end: f64,
    steps: usize,
) -> Result<Vec<ZeroRecord>> {
    if !(FRAC_PI_2 - 1e-12..=3.0 * FRAC_PI_2 + 1e-12).contains(&arg_q) {
        return Err(ThetaError::InvalidParameter(format!(
            "ray argument must lie in [pi/2, 3pi/2], got {arg_q}"
        )));
    }
    if !(r_start > 0.0 && r_start <= r_end && r_end <= 0.6 * (1.0 + 1e-12)) {
        return Err(ThetaError::InvalidParameter(format!(
            "ray radii must satisfy 0 < r_start <= r_end <= 0.6, got [{r_start}, {r_end}]"
        )));
    }
    if steps == 0 || k == 0 {
        return Err(ThetaError::InvalidParameter(
            "steps and k must be >= 1".into(),
        ));
    }
    let tol = DEFAULT_RESIDUAL_TOL;
    let mut out: Vec<ZeroRecord> = Vec::with_capacity(steps);
    let mut prev: Option<(QParameter, Complex64)> = None;
    for i in 0..steps {
        let r = if steps == 1 {
            r_start
        } else {
            r_start + (r_end - r_start) * i as f64 / (steps - 1) as f64
        };
        let q = QParameter::from_polar(r, arg_q)?;
        let attempt = match prev {
            None => locate_zero_robust(&q, k, tol),
            Some((pq, pz)) => {
                let seed = pz * (pq.to_complex() / q.to_complex()).powi(k as i32);
                newton(&q, seed, tol)
                    .and_then(|o| record(&q, k, o, SeedKind::Continuation))
                    .or_else(|_| locate_zero_by_contour(&q, k, tol))
            }
        };
        let rec = attempt.map_err(|e| match e {
            ThetaError::NoConvergence {
                iterations,
                residual,
                ..
            } => ThetaError::NoConvergence {
                iterations,
                residual,
                at_modulus: Some(r),
            },
            _ => ThetaError::NoConvergence {
                iterations: 0,
                residual: f64::NAN,
                at_modulus: Some(r),
            },
        })?;
        prev = Some((q, rec.location.to_complex()));
        out.push(rec);
    }
    Ok(out)
}
