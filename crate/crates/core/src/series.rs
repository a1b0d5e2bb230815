//! Truncated evaluation of the partial theta function, its shifted and
//! two-sided relatives, and the triple-product factors `Q`, `U`, `R`.
//!
//! Every evaluator returns an [`EvalResult`] whose `tail_bound` majorizes the
//! modulus of everything that was left out. Series are summed until the ratio
//! of consecutive term moduli (which is non-increasing for all series here)
//! drops below [`RATIO_CUTOFF`]; the tail is then bounded by a geometric
//! series. Products `prod (1 + t_j)` stop once `|t_j| < tolerance / 10` and
//! bound the remaining factors through `|prod (1 + t_i) - 1| <= exp(sum |t_i|) - 1`.
//!
//! Sums are accumulated with Kahan-Babuska compensation. Rounding in the
//! term recurrences is tracked separately in `rounding_bound`, a first-order
//! estimate that is not part of the certified tail.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ThetaError};
use crate::types::{ComplexPoint, QParameter};

pub const DEFAULT_TOLERANCE: f64 = 1e-12;
pub const DEFAULT_MAX_TERMS: usize = 10_000;

/// Tail bounds are formed only once consecutive term ratios fall below this.
pub const RATIO_CUTOFF: f64 = 0.5;

const EPS: f64 = f64::EPSILON;

/// Truncation target and hard cap on the number of terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesBudget {
    tolerance: f64,
    max_terms: usize,
}

impl SeriesBudget {
    pub fn new(tolerance: f64, max_terms: usize) -> Result<Self> {
        if !(tolerance > 0.0 && tolerance.is_finite()) {
            return Err(ThetaError::InvalidParameter(format!(
                "budget tolerance must be positive and finite, got {tolerance}"
            )));
        }
        if max_terms < 2 {
            return Err(ThetaError::InvalidParameter(format!(
                "budget max_terms must be at least 2, got {max_terms}"
            )));
        }
        Ok(SeriesBudget {
            tolerance,
            max_terms,
        })
    }

    pub fn with_tolerance(tolerance: f64) -> Result<Self> {
        Self::new(tolerance, DEFAULT_MAX_TERMS)
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }

    fn tightened(&self, tolerance: f64) -> Self {
        SeriesBudget {
            tolerance: tolerance.max(f64::MIN_POSITIVE),
            max_terms: self.max_terms,
        }
    }
}

impl Default for SeriesBudget {
    fn default() -> Self {
        SeriesBudget {
            tolerance: DEFAULT_TOLERANCE,
            max_terms: DEFAULT_MAX_TERMS,
        }
    }
}

/// A truncated value together with its certified truncation bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub value: ComplexPoint,
    /// Certified bound on the modulus of the omitted tail.
    pub tail_bound: f64,
    pub terms_used: usize,
    /// Largest term modulus for series, `|value|` for products. Used to
    /// normalize residuals when terms cancel.
    pub scale: f64,
    /// First-order estimate of accumulated floating-point error.
    pub rounding_bound: f64,
}

impl EvalResult {
    pub fn complex(&self) -> Complex64 {
        self.value.to_complex()
    }

    /// Tail bound plus rounding estimate.
    pub fn error_bound(&self) -> f64 {
        self.tail_bound + self.rounding_bound
    }
}

/// Which representation of the two-sided theta function to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThetaStarMethod {
    Series,
    Product,
}

#[derive(Debug, Default, Clone, Copy)]
struct Compensated {
    sum: f64,
    comp: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Debug, Default)]
struct TermSum {
    re: Compensated,
    im: Compensated,
    scale: f64,
    rounding: f64,
    abs_sum: f64,
    terms: usize,
}

impl TermSum {
    fn push(&mut self, term: Complex64, rel_err: f64) {
        self.re.add(term.re);
        self.im.add(term.im);
        let m = term.norm();
        self.scale = self.scale.max(m);
        self.abs_sum += m;
        self.rounding += rel_err * m;
        self.terms += 1;
    }

    fn finish(self, tail_bound: f64, what: &'static str) -> Result<EvalResult> {
        let value = Complex64::new(self.re.total(), self.im.total());
        let value = ComplexPoint::try_from(value).map_err(|_| ThetaError::NonFinite(what))?;
        if !self.scale.is_finite() {
            return Err(ThetaError::NonFinite(what));
        }
        Ok(EvalResult {
            value,
            tail_bound,
            terms_used: self.terms,
            scale: self.scale,
            rounding_bound: self.rounding
                + 2.0 * EPS * value.norm()
                + 4.0 * EPS * EPS * self.abs_sum,
        })
    }
}

/// Relative error of the j-th term produced by the multiplicative recurrences:
/// `q^j` carries about `j` roundings and the term about `j^2 / 2` of them.
fn term_rel_err(j: usize) -> f64 {
    let j = j as f64;
    3.0 * (j + 1.0) * (j + 4.0) * EPS
}

/// `last * r / (1 - r)` when the ratio bound `r` is below the cutoff.
fn geometric_tail(last: f64, ratio: f64) -> Option<f64> {
    if ratio.is_finite() && ratio < RATIO_CUTOFF {
        Some(last * ratio / (1.0 - ratio))
    } else {
        None
    }
}

/// `theta(q, z) = sum_{j>=0} q^{j(j+1)/2} z^j`.
///
/// Consecutive term ratio: `|t_{j+1} / t_j| = |q|^{j+1} |z|`.
pub fn eval_theta(q: &QParameter, z: ComplexPoint, budget: &SeriesBudget) -> Result<EvalResult> {
    let qc = q.to_complex();
    let zc = z.to_complex();
    let (rq, rz) = (q.modulus(), z.norm());
    let mut sum = TermSum::default();
    let mut term = Complex64::new(1.0, 0.0);
    let mut q_pow = Complex64::new(1.0, 0.0);
    let mut rq_pow = 1.0;
    for j in 0..budget.max_terms {
        if j > 0 {
            q_pow *= qc;
            term *= q_pow * zc;
        }
        sum.push(term, term_rel_err(j));
        rq_pow *= rq;
        if let Some(tail) = geometric_tail(term.norm(), rq_pow * rz) {
            if tail <= budget.tolerance {
                return sum.finish(tail, "theta");
            }
        }
    }
    Err(ThetaError::BudgetExceeded {
        terms: budget.max_terms,
    })
}

/// `theta_dagger(q, z) = theta(q, z / q) = sum_{j>=0} q^{j(j-1)/2} z^j`,
/// summed directly rather than through `z / q`.
///
/// Consecutive term ratio: `|t_{j+1} / t_j| = |q|^j |z|`.
pub fn eval_theta_dagger(
    q: &QParameter,
    z: ComplexPoint,
    budget: &SeriesBudget,
) -> Result<EvalResult> {
    let qc = q.to_complex();
    let zc = z.to_complex();
    let (rq, rz) = (q.modulus(), z.norm());
    let mut sum = TermSum::default();
    let mut term = Complex64::new(1.0, 0.0);
    let mut q_pow = Complex64::new(1.0, 0.0);
    let mut rq_pow = 1.0;
    for j in 0..budget.max_terms {
        if j > 0 {
            term *= q_pow * zc;
            q_pow *= qc;
        }
        sum.push(term, term_rel_err(j));
        if let Some(tail) = geometric_tail(term.norm(), rq_pow * rz) {
            if tail <= budget.tolerance {
                return sum.finish(tail, "theta_dagger");
            }
        }
        rq_pow *= rq;
    }
    Err(ThetaError::BudgetExceeded {
        terms: budget.max_terms,
    })
}

/// `G(q, z) = sum_{j>=1} q^{j(j-1)/2} z^{-j}`, the negative-index half of the
/// two-sided theta series.
///
/// Consecutive term ratio: `|t_{j+1} / t_j| = |q|^j / |z|`, so the tail regime
/// starts once `|q|^j < |z| / 2`.
pub fn eval_g(q: &QParameter, z: ComplexPoint, budget: &SeriesBudget) -> Result<EvalResult> {
    if z.is_zero() {
        return Err(ThetaError::ZeroArgument);
    }
    let qc = q.to_complex();
    let w = z.to_complex().inv();
    let (rq, rw) = (q.modulus(), 1.0 / z.norm());
    let mut sum = TermSum::default();
    let mut term = w;
    let mut q_pow = qc;
    let mut rq_pow = rq;
    for j in 1..=budget.max_terms {
        if j > 1 {
            term *= q_pow * w;
            q_pow *= qc;
        }
        sum.push(term, term_rel_err(j));
        if let Some(tail) = geometric_tail(term.norm(), rq_pow * rw) {
            if tail <= budget.tolerance {
                return sum.finish(tail, "G");
            }
        }
        rq_pow *= rq;
    }
    Err(ThetaError::BudgetExceeded {
        terms: budget.max_terms,
    })
}

/// `d theta / dz = sum_{j>=1} j q^{j(j+1)/2} z^{j-1}`.
///
/// With `s_j = q^{j(j+1)/2} z^{j-1}` and `r = |q|^{J+1} |z|`, every omitted
/// term satisfies `|d_{J+m}| <= (1 + m/J) r^m |d_J|`, giving the tail
/// `|d_J| (r/(1-r) + r/(J (1-r)^2))`.
pub fn eval_theta_dz(q: &QParameter, z: ComplexPoint, budget: &SeriesBudget) -> Result<EvalResult> {
    let qc = q.to_complex();
    let zc = z.to_complex();
    let (rq, rz) = (q.modulus(), z.norm());
    let mut sum = TermSum::default();
    let mut s = qc;
    let mut q_pow = qc;
    let mut rq_pow = rq;
    for j in 1..=budget.max_terms {
        if j > 1 {
            q_pow *= qc;
            s *= q_pow * zc;
        }
        let d = s * j as f64;
        sum.push(d, term_rel_err(j));
        rq_pow *= rq;
        let r = rq_pow * rz;
        if r.is_finite() && r < RATIO_CUTOFF {
            let jf = j as f64;
            let tail = d.norm() * (r / (1.0 - r) + r / (jf * (1.0 - r) * (1.0 - r)));
            if tail <= budget.tolerance {
                return sum.finish(tail, "theta_dz");
            }
        }
    }
    Err(ThetaError::BudgetExceeded {
        terms: budget.max_terms,
    })
}

/// Two-sided series `sum_{j in Z} q^{j(j+1)/2} z^j`, both halves accumulated
/// in one compensated sum. Each half stops at half the tolerance.
fn theta_star_series(q: &QParameter, z: ComplexPoint, budget: &SeriesBudget) -> Result<EvalResult> {
    let qc = q.to_complex();
    let zc = z.to_complex();
    let w = zc.inv();
    let (rq, rz) = (q.modulus(), z.norm());
    let half = budget.tolerance / 2.0;
    let mut sum = TermSum::default();

    // j >= 0 half
    let mut pos_term = Complex64::new(1.0, 0.0);
    let mut pos_qpow = Complex64::new(1.0, 0.0);
    let mut pos_rq = 1.0;
    let mut pos_j = 0usize;
    let mut pos_tail: Option<f64> = None;

    // j = -m, m >= 1 half
    let mut neg_term = w;
    let mut neg_qpow = qc;
    let mut neg_rq = rq;
    let mut neg_m = 1usize;
    let mut neg_tail: Option<f64> = None;

    while sum.terms < budget.max_terms {
        if pos_tail.is_none() {
            if pos_j > 0 {
                pos_qpow *= qc;
                pos_term *= pos_qpow * zc;
            }
            sum.push(pos_term, term_rel_err(pos_j));
            pos_rq *= rq;
            if let Some(t) = geometric_tail(pos_term.norm(), pos_rq * rz) {
                if t <= half {
                    pos_tail = Some(t);
                }
            }
            pos_j += 1;
        }
        if neg_tail.is_none() {
            if neg_m > 1 {
                neg_term *= neg_qpow * w;
                neg_qpow *= qc;
            }
            sum.push(neg_term, term_rel_err(neg_m));
            if let Some(t) = geometric_tail(neg_term.norm(), neg_rq / rz) {
                if t <= half {
                    neg_tail = Some(t);
                }
            }
            neg_rq *= rq;
            neg_m += 1;
        }
        if let (Some(a), Some(b)) = (pos_tail, neg_tail) {
            return sum.finish(a + b, "theta_star");
        }
    }
    Err(ThetaError::BudgetExceeded {
        terms: budget.max_terms,
    })
}

/// Evaluates `prod_{j>=start} (1 + t_j)` where `|t_{j+1}| = ratio * |t_j|`.
fn geometric_factor_product(
    budget: &SeriesBudget,
    ratio: f64,
    start: usize,
    mut factor_term: impl FnMut(usize) -> Complex64,
    what: &'static str,
) -> Result<EvalResult> {
    let mut prod = Complex64::new(1.0, 0.0);
    let mut rel_rounding = 0.0;
    for (count, j) in (start..start + budget.max_terms).enumerate() {
        let t = factor_term(j);
        let factor = Complex64::new(1.0, 0.0) + t;
        prod *= factor;
        let mt = t.norm();
        let mf = factor.norm();
        rel_rounding += 4.0 * EPS;
        if mf > 0.0 {
            rel_rounding += term_rel_err(j) * mt / mf;
        }
        if mt < budget.tolerance / 10.0 {
            let omitted = mt * ratio / (1.0 - ratio);
            let tail = prod.norm() * omitted.exp_m1();
            if tail <= budget.tolerance {
                let value =
                    ComplexPoint::try_from(prod).map_err(|_| ThetaError::NonFinite(what))?;
                let m = value.norm();
                return Ok(EvalResult {
                    value,
                    tail_bound: tail,
                    terms_used: count + 1,
                    scale: m,
                    rounding_bound: rel_rounding * m,
                });
            }
        }
    }
    Err(ThetaError::BudgetExceeded {
        terms: budget.max_terms,
    })
}

/// `Q(q) = prod_{j>=1} (1 - q^j)`.
pub fn eval_q(q: &QParameter, budget: &SeriesBudget) -> Result<EvalResult> {
    let qc = q.to_complex();
    let mut q_pow = Complex64::new(1.0, 0.0);
    geometric_factor_product(
        budget,
        q.modulus(),
        1,
        |_| {
            q_pow *= qc;
            -q_pow
        },
        "Q",
    )
}

/// `U(q, z) = prod_{j>=1} (1 + z q^j)`.
pub fn eval_u(q: &QParameter, z: ComplexPoint, budget: &SeriesBudget) -> Result<EvalResult> {
    let qc = q.to_complex();
    let mut t = z.to_complex();
    geometric_factor_product(
        budget,
        q.modulus(),
        1,
        |_| {
            t *= qc;
            t
        },
        "U",
    )
}

/// `R(q, z) = prod_{j>=1} (1 + q^{j-1} / z)`.
pub fn eval_r(q: &QParameter, z: ComplexPoint, budget: &SeriesBudget) -> Result<EvalResult> {
    if z.is_zero() {
        return Err(ThetaError::ZeroArgument);
    }
    let qc = q.to_complex();
    let w = z.to_complex().inv();
    let mut t = w / qc;
    geometric_factor_product(
        budget,
        q.modulus(),
        1,
        |_| {
            t *= qc;
            t
        },
        "R",
    )
}

/// `Theta*(q, z) = sum_{j in Z} q^{j(j+1)/2} z^j`, either summed directly or
/// as the Jacobi triple product `Q * U * R`.
pub fn eval_theta_star(
    q: &QParameter,
    z: ComplexPoint,
    budget: &SeriesBudget,
    method: ThetaStarMethod,
) -> Result<EvalResult> {
    if z.is_zero() {
        return Err(ThetaError::ZeroArgument);
    }
    match method {
        ThetaStarMethod::Series => theta_star_series(q, z, budget),
        ThetaStarMethod::Product => theta_star_product(q, z, budget),
    }
}

fn theta_star_product(
    q: &QParameter,
    z: ComplexPoint,
    budget: &SeriesBudget,
) -> Result<EvalResult> {
    let eval_all = |b: [SeriesBudget; 3]| -> Result<[EvalResult; 3]> {
        Ok([
            eval_q(q, &b[0])?,
            eval_u(q, z, &b[1])?,
            eval_r(q, z, &b[2])?,
        ])
    };
    // |Q'U'R' - QUR| <= prod (|X| + e_X) - prod |X|
    let combined = |f: &[EvalResult; 3]| {
        let upper: f64 = f.iter().map(|r| r.value.norm() + r.tail_bound).product();
        let center: f64 = f.iter().map(|r| r.value.norm()).product();
        (upper - center).max(0.0)
    };

    let mut factors = eval_all([*budget; 3])?;
    if combined(&factors) > budget.tolerance {
        let bounds: Vec<f64> = factors
            .iter()
            .map(|r| r.value.norm() + r.tail_bound)
            .collect();
        let mut tightened = [*budget; 3];
        for (i, t) in tightened.iter_mut().enumerate() {
            let others: f64 = (0..3).filter(|&k| k != i).map(|k| bounds[k]).product();
            *t = budget.tightened(budget.tolerance / (4.0 * others.max(1.0)));
        }
        factors = eval_all(tightened)?;
    }
    let tail = combined(&factors);
    if tail > budget.tolerance {
        return Err(ThetaError::BudgetExceeded {
            terms: factors.iter().map(|r| r.terms_used).sum(),
        });
    }
    let value = factors[0].complex() * factors[1].complex() * factors[2].complex();
    let value = ComplexPoint::try_from(value).map_err(|_| ThetaError::NonFinite("Q*U*R"))?;
    let m = value.norm();
    let rel: f64 = factors
        .iter()
        .map(|r| {
            if r.scale > 0.0 {
                r.rounding_bound / r.scale
            } else {
                0.0
            }
        })
        .sum::<f64>()
        + 8.0 * EPS;
    Ok(EvalResult {
        value,
        tail_bound: tail,
        terms_used: factors.iter().map(|r| r.terms_used).sum(),
        scale: m,
        rounding_bound: rel * m,
    })
}

/// A real constant computed from an infinite series or product.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealSum {
    pub value: f64,
    pub tail_bound: f64,
    pub terms_used: usize,
}

/// `sum_{j>=start} rho^{j(j-1)/2 + shift*j}` for `0 < rho < 1`.
///
/// Consecutive ratio `rho^{j + shift}` decreases in `j`; the tail is bounded
/// geometrically once it drops below the cutoff.
pub fn gaussian_series(rho: f64, shift: f64, start: u32, budget: &SeriesBudget) -> Result<RealSum> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(ThetaError::InvalidParameter(format!(
            "gaussian series needs 0 < rho < 1, got {rho}"
        )));
    }
    let mut acc = Compensated::default();
    for (count, j) in (start..).take(budget.max_terms).enumerate() {
        let jf = f64::from(j);
        let term = rho.powf(jf * (jf - 1.0) / 2.0 + shift * jf);
        acc.add(term);
        let ratio = rho.powf(jf + shift);
        if jf + shift > 0.0 {
            if let Some(tail) = geometric_tail(term, ratio) {
                if tail <= budget.tolerance {
                    return Ok(RealSum {
                        value: acc.total(),
                        tail_bound: tail,
                        terms_used: count + 1,
                    });
                }
            }
        }
    }
    Err(ThetaError::BudgetExceeded {
        terms: budget.max_terms,
    })
}

/// `prod_{i>=0} |1 - first * ratio^i|` for `first > 0`, `0 < ratio < 1`.
pub fn geometric_product(first: f64, ratio: f64, budget: &SeriesBudget) -> Result<RealSum> {
    if !(first > 0.0 && ratio > 0.0 && ratio < 1.0) {
        return Err(ThetaError::InvalidParameter(format!(
            "geometric product needs first > 0 and 0 < ratio < 1, got ({first}, {ratio})"
        )));
    }
    let mut prod = 1.0;
    let mut x = first;
    for count in 0..budget.max_terms {
        prod *= (1.0 - x).abs();
        if x < budget.tolerance / 10.0 {
            let omitted = x * ratio / (1.0 - ratio);
            let tail = prod * omitted.exp_m1();
            if tail <= budget.tolerance {
                return Ok(RealSum {
                    value: prod,
                    tail_bound: tail,
                    terms_used: count + 1,
                });
            }
        }
        x *= ratio;
    }
    Err(ThetaError::BudgetExceeded {
        terms: budget.max_terms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn q(re: f64, im: f64) -> QParameter {
        QParameter::new(ComplexPoint::new(re, im).unwrap()).unwrap()
    }

    fn z(re: f64, im: f64) -> ComplexPoint {
        ComplexPoint::new(re, im).unwrap()
    }

    #[test]
    fn budget_validation() {
        assert!(SeriesBudget::new(0.0, 100).is_err());
        assert!(SeriesBudget::new(1e-10, 1).is_err());
        assert!(SeriesBudget::new(f64::NAN, 100).is_err());
        let b = SeriesBudget::default();
        assert_eq!(b.tolerance(), 1e-12);
        assert_eq!(b.max_terms(), 10_000);
    }

    #[test]
    fn theta_at_origin_is_one() {
        let r = eval_theta(&q(0.3, -0.4), ComplexPoint::ZERO, &SeriesBudget::default()).unwrap();
        assert_eq!(r.complex(), Complex64::new(1.0, 0.0));
        assert_eq!(r.tail_bound, 0.0);
        assert_eq!(r.terms_used, 1);
    }

    #[test]
    fn dagger_at_origin_is_one() {
        let r =
            eval_theta_dagger(&q(-0.5, 0.1), ComplexPoint::ZERO, &SeriesBudget::default()).unwrap();
        assert_eq!(r.complex(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn derivative_at_origin_is_q() {
        let qq = q(0.2, 0.5);
        let r = eval_theta_dz(&qq, ComplexPoint::ZERO, &SeriesBudget::default()).unwrap();
        assert!((r.complex() - qq.to_complex()).norm() < 1e-16);
    }

    #[test]
    fn g_rejects_zero_argument() {
        let b = SeriesBudget::default();
        assert_eq!(
            eval_g(&q(0.5, 0.0), ComplexPoint::ZERO, &b),
            Err(ThetaError::ZeroArgument)
        );
        assert_eq!(
            eval_r(&q(0.5, 0.0), ComplexPoint::ZERO, &b),
            Err(ThetaError::ZeroArgument)
        );
        assert!(eval_theta_star(
            &q(0.5, 0.0),
            ComplexPoint::ZERO,
            &b,
            ThetaStarMethod::Series
        )
        .is_err());
    }

    #[test]
    fn g_is_dominated_by_first_term_for_large_z() {
        let r = eval_g(&q(0.5, 0.0), z(1e6, 0.0), &SeriesBudget::default()).unwrap();
        assert!((r.value.norm() - 1e-6).abs() < 1e-6 * 1e-5);
    }

    #[test]
    fn budget_exceeded_is_reported() {
        let b = SeriesBudget::new(1e-12, 5).unwrap();
        let err = eval_theta(&q(0.9, 0.0), z(50.0, 0.0), &b).unwrap_err();
        assert_eq!(err, ThetaError::BudgetExceeded { terms: 5 });
        assert!(eval_q(&q(0.999, 0.0), &b).is_err());
    }

    #[test]
    fn q_tends_to_one_near_origin() {
        let r = eval_q(&q(1e-9, 1e-9), &SeriesBudget::default()).unwrap();
        assert!((r.complex() - Complex64::new(1.0, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn q_satisfies_pentagonal_number_identity() {
        // Euler: prod (1 - q^j) = sum_k (-1)^k q^{k(3k-1)/2}, k in Z
        let qq = q(-0.3, 0.45);
        let qc = qq.to_complex();
        let mut s = Complex64::new(0.0, 0.0);
        for k in -30i32..=30 {
            let e = k * (3 * k - 1) / 2;
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            s += qc.powi(e) * sign;
        }
        let r = eval_q(&qq, &SeriesBudget::default()).unwrap();
        assert!((r.complex() - s).norm() < 1e-12);
    }

    #[test]
    fn tail_bound_respects_tolerance() {
        let b = SeriesBudget::with_tolerance(1e-9).unwrap();
        let qq = QParameter::from_polar(0.55, 2.0).unwrap();
        let zz = ComplexPoint::from_polar(20.0, 0.7).unwrap();
        for r in [
            eval_theta(&qq, zz, &b).unwrap(),
            eval_theta_dagger(&qq, zz, &b).unwrap(),
            eval_g(&qq, zz, &b).unwrap(),
            eval_theta_dz(&qq, zz, &b).unwrap(),
            eval_q(&qq, &b).unwrap(),
            eval_u(&qq, zz, &b).unwrap(),
            eval_r(&qq, zz, &b).unwrap(),
            eval_theta_star(&qq, zz, &b, ThetaStarMethod::Series).unwrap(),
            eval_theta_star(&qq, zz, &b, ThetaStarMethod::Product).unwrap(),
        ] {
            assert!(r.tail_bound <= 1e-9, "{r:?}");
        }
    }

    #[test]
    fn gaussian_series_matches_direct_sum() {
        let b = SeriesBudget::with_tolerance(1e-15).unwrap();
        let s = gaussian_series(0.6, 4.5, 1, &b).unwrap();
        let direct: f64 = (1..60)
            .map(|j| 0.6f64.powf(f64::from(j * (j - 1)) / 2.0 + 4.5 * f64::from(j)))
            .sum();
        assert!((s.value - direct).abs() < 1e-15);
    }

    #[test]
    fn geometric_product_handles_factors_above_one() {
        let b = SeriesBudget::with_tolerance(1e-15).unwrap();
        let p = geometric_product(0.6f64.powf(-3.5), 0.6, &b).unwrap();
        let direct: f64 = (1..200)
            .map(|j| (0.6f64.powf(f64::from(j) - 4.5) - 1.0).abs())
            .product();
        assert!((p.value - direct).abs() < 1e-14);
    }

    #[test]
    fn theta_star_is_symmetric_under_z_to_one_over_qz() {
        // Theta*(q, 1/(q z)) = Theta*(q, z) by j -> -1 - j
        let qq = QParameter::from_polar(0.4, 2.5).unwrap();
        let zc = Complex64::from_polar(1.7, PI / 5.0);
        let w = (qq.to_complex() * zc).inv();
        let b = SeriesBudget::default();
        let a = eval_theta_star(&qq, zc.try_into().unwrap(), &b, ThetaStarMethod::Series).unwrap();
        let c = eval_theta_star(&qq, w.try_into().unwrap(), &b, ThetaStarMethod::Series).unwrap();
        assert!((a.complex() - c.complex()).norm() < a.error_bound() + c.error_bound());
    }
}
