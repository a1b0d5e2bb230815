//! Command-line front end: argument definitions and command execution.

pub mod output;
pub mod parse;

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use partial_theta::asymptotics::{self, DEFAULT_TABLE_N};
use partial_theta::lemmas::{self, k1, k2, mu as mu_mod, products, GridSpec, VerificationReport};
use partial_theta::series::{self, SeriesBudget, ThetaStarMethod};
use partial_theta::zeros::{
    self, count_zeros_in_annulus, locate_zero_robust, Annulus, SeparationRegime, SeparationVerdict,
    ZeroRecord, DEFAULT_RESIDUAL_TOL,
};
use partial_theta::{ComplexPoint, QParameter, ThetaError};
use rayon::prelude::*;
use serde_json::{json, Value};

pub use output::{Format, OutputRecord};
use parse::{parse_complex, parse_steps};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "ptheta",
    version,
    about = "Evaluate the partial theta function, locate its zeros and re-check separation bounds"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    pub format: Format,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Record wall time in the output (makes output run-dependent).
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate theta, theta_dagger, theta_star, G or one of the factors Q, U, R.
    Eval(EvalArgs),
    /// Count and locate the zeros in the annuli k = 1..kmax and check separation.
    Zeros(ZerosArgs),
    /// Re-check a lemma's inequalities and report their margins.
    Verify(VerifyArgs),
    /// Check separation for one annulus index over a polar grid of D(a).
    Scan(ScanArgs),
    /// Follow one zero along a ray arg q = const.
    Trace(TraceArgs),
    /// Tabulate tau_n, m_n, M_n.
    Table(TableArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Function {
    #[value(name = "theta")]
    Theta,
    #[value(name = "theta_dagger")]
    ThetaDagger,
    #[value(name = "theta_star")]
    ThetaStar,
    #[value(name = "G")]
    G,
    #[value(name = "Q")]
    Q,
    #[value(name = "U")]
    U,
    #[value(name = "R")]
    R,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Series,
    Product,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(value_enum, ignore_case = true)]
    pub function: Function,
    /// Nome, e.g. 0.5, -0.3+0.2i or 0.6@135deg.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub q: Complex64,
    /// Argument; required for all functions except Q.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub z: Option<Complex64>,
    /// Truncation tolerance.
    #[arg(long, default_value_t = series::DEFAULT_TOLERANCE)]
    pub tol: f64,
    #[arg(long, default_value_t = series::DEFAULT_MAX_TERMS)]
    pub max_terms: usize,
    /// Evaluation method for theta_star.
    #[arg(long, value_enum, default_value_t = Method::Series)]
    pub method: Method,
}

#[derive(Debug, Args)]
pub struct ZerosArgs {
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub q: Complex64,
    #[arg(long, default_value_t = 6)]
    pub kmax: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Lemma {
    #[value(name = "Q")]
    Q,
    #[value(name = "k5")]
    K5,
    #[value(name = "k4")]
    K4,
    #[value(name = "k1")]
    K1,
    #[value(name = "k2")]
    K2,
    #[value(name = "mu")]
    Mu,
    #[value(name = "AB")]
    Ab,
    #[value(name = "constants")]
    Constants,
    #[value(name = "all")]
    All,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, ignore_case = true)]
    pub lemma: Lemma,
    /// Grid steps as MODULUSxARGUMENT for the Q, k1 and k2 grids.
    #[arg(long, value_parser = parse_steps)]
    pub steps: Option<(usize, usize)>,
    /// Angular samples per circle (arg z for k1, psi for k2).
    #[arg(long)]
    pub z_steps: Option<usize>,
    /// Random samples for the mu checks.
    #[arg(long, default_value_t = mu_mod::DEFAULT_MU_SAMPLES)]
    pub samples: usize,
    /// Grid points on (0, 0.6] for the A_j, B_j monotonicity check.
    #[arg(long, default_value_t = mu_mod::DEFAULT_AB_GRID_POINTS)]
    pub grid_points: usize,
    /// Largest j for the A_j, B_j monotonicity check.
    #[arg(long, default_value_t = mu_mod::DEFAULT_AB_J_MAX)]
    pub jmax: u32,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// Radius of the region D(a), at most 0.6.
    #[arg(long, default_value_t = 0.6)]
    pub a: f64,
    /// Annulus index.
    #[arg(long, default_value_t = 1)]
    pub k: u32,
    /// Grid steps as MODULUSxARGUMENT.
    #[arg(long, value_parser = parse_steps, default_value = "20x20")]
    pub steps: (usize, usize),
    /// Smallest modulus; defaults to a / MODULUS steps.
    #[arg(long)]
    pub r_min: Option<f64>,
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    /// Argument of q: radians, or degrees with a `deg` suffix.
    #[arg(long, allow_hyphen_values = true)]
    pub arg: String,
    #[arg(long, default_value_t = 1)]
    pub k: u32,
    #[arg(long, default_value_t = 0.05)]
    pub from: f64,
    #[arg(long, default_value_t = 0.6)]
    pub to: f64,
    #[arg(long, default_value_t = 50)]
    pub steps: usize,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// Comma-separated values of n.
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<u32>,
}

/// What a command produced: a record (possibly partial) and an exit code.
#[derive(Debug)]
pub struct Outcome {
    pub record: Option<OutputRecord>,
    pub code: i32,
    pub message: Option<String>,
}

impl Outcome {
    fn done(record: OutputRecord) -> Self {
        let code = if record.pass == Some(false) {
            EXIT_VERIFY_FAILED
        } else {
            EXIT_PASS
        };
        Outcome {
            record: Some(record),
            code,
            message: None,
        }
    }

    fn error(e: &ThetaError) -> Self {
        Outcome {
            record: None,
            code: exit_code(e),
            message: Some(e.to_string()),
        }
    }
}

pub fn exit_code(e: &ThetaError) -> i32 {
    match e {
        ThetaError::InvalidParameter(_) | ThetaError::ZeroArgument | ThetaError::Domain(_) => {
            EXIT_INPUT
        }
        ThetaError::BudgetExceeded { .. }
        | ThetaError::NonFinite(_)
        | ThetaError::ContourTooClose { .. }
        | ThetaError::NoConvergence { .. } => EXIT_NUMERICAL,
    }
}

pub fn execute(command: &Command) -> Outcome {
    let result = match command {
        Command::Eval(a) => cmd_eval(a).map(Outcome::done),
        Command::Zeros(a) => cmd_zeros(a),
        Command::Verify(a) => cmd_verify(a).map(Outcome::done),
        Command::Scan(a) => cmd_scan(a),
        Command::Trace(a) => cmd_trace(a).map(Outcome::done),
        Command::Table(a) => cmd_table(a).map(Outcome::done),
    };
    result.unwrap_or_else(|e| Outcome::error(&e))
}

fn q_param(q: Complex64) -> Result<QParameter, ThetaError> {
    QParameter::from_complex(q)
}

fn complex_json(c: Complex64) -> Value {
    json!({"re": c.re, "im": c.im})
}

pub fn cmd_eval(a: &EvalArgs) -> Result<OutputRecord, ThetaError> {
    let name = Function::to_possible_value(&a.function)
        .map(|v| v.get_name().to_string())
        .unwrap_or_default();
    let q = q_param(a.q)?;
    let budget = SeriesBudget::new(a.tol, a.max_terms)?;
    let z = match (a.function, a.z) {
        (Function::Q, _) => None,
        (_, Some(z)) => Some(ComplexPoint::try_from(z)?),
        (_, None) => {
            return Err(ThetaError::InvalidParameter(format!(
                "--z is required for {name}"
            )))
        }
    };
    let zz = || z.expect("checked above");
    let r = match a.function {
        Function::Theta => series::eval_theta(&q, zz(), &budget)?,
        Function::ThetaDagger => series::eval_theta_dagger(&q, zz(), &budget)?,
        Function::ThetaStar => {
            let m = match a.method {
                Method::Series => ThetaStarMethod::Series,
                Method::Product => ThetaStarMethod::Product,
            };
            series::eval_theta_star(&q, zz(), &budget, m)?
        }
        Function::G => series::eval_g(&q, zz(), &budget)?,
        Function::Q => series::eval_q(&q, &budget)?,
        Function::U => series::eval_u(&q, zz(), &budget)?,
        Function::R => series::eval_r(&q, zz(), &budget)?,
    };
    let mut rec = OutputRecord::new("eval");
    rec.input("function", name)
        .input("q", complex_json(a.q))
        .input("tol", a.tol);
    if let Some(z) = a.z {
        rec.input("z", complex_json(z));
    }
    if a.function == Function::ThetaStar {
        rec.input("method", format!("{:?}", a.method).to_lowercase());
    }
    rec.result("value", complex_json(r.complex()))
        .result("abs", r.value.norm())
        .result("tail_bound", r.tail_bound)
        .result("rounding_bound", r.rounding_bound)
        .result("terms_used", r.terms_used)
        .result("scale", r.scale);
    Ok(rec)
}

fn zero_json(z: &ZeroRecord) -> Value {
    json!({
        "zero_re": z.location.re(),
        "zero_im": z.location.im(),
        "abs": z.location.norm(),
        "residual": z.residual,
        "derivative": z.derivative_modulus,
        "annulus_ok": z.annulus_ok,
        "newton_iterations": z.newton_iterations,
        "seed": z.seed,
    })
}

pub fn cmd_zeros(a: &ZerosArgs) -> Result<Outcome, ThetaError> {
    let q = q_param(a.q)?;
    let rep = zeros::verify_separation(&q, a.kmax)?;
    let rows: Vec<Value> = rep
        .entries
        .iter()
        .map(|e| {
            let mut row = json!({
                "k": e.k,
                "count": e.count,
                "asserted": e.asserted,
                "zero_re": null, "zero_im": null, "abs": null, "residual": null,
                "derivative": null, "annulus_ok": null, "newton_iterations": null, "seed": null,
                "error": e.count_error.as_ref().or(e.zero_error.as_ref()).map(|x| x.to_string()),
            });
            if let (Some(z), Value::Object(map)) = (&e.zero, &mut row) {
                if let Value::Object(zm) = zero_json(z) {
                    map.extend(zm);
                }
            }
            row
        })
        .collect();
    let mut rec = OutputRecord::new("zeros");
    rec.input("q", complex_json(a.q))
        .input("kmax", a.kmax)
        .result("regime", rep.regime)
        .result("verdict", rep.verdict)
        .result("strong_separation", rep.strong_separation)
        .result("pair_count_U_3/2_7/2", rep.pair_count)
        .result("rows", rows);
    rec.pass = Some(matches!(
        rep.verdict,
        SeparationVerdict::Strong | SeparationVerdict::Partial | SeparationVerdict::Observed
    ));
    if rep.verdict == SeparationVerdict::Inconclusive {
        let first = rep
            .entries
            .iter()
            .filter(|e| e.asserted)
            .find_map(|e| e.count_error.clone().or(e.zero_error.clone()))
            .or(rep.pair_count_error.clone());
        let msg = first
            .map(|e| e.to_string())
            .unwrap_or_else(|| "inconclusive".into());
        return Ok(Outcome {
            record: Some(rec),
            code: EXIT_NUMERICAL,
            message: Some(msg),
        });
    }
    Ok(Outcome::done(rec))
}

fn lemma_reports(a: &VerifyArgs, lemma: Lemma) -> Result<Vec<VerificationReport>, ThetaError> {
    let with_steps = |g: GridSpec| match a.steps {
        Some((m, n)) => g.with_steps(m, n),
        None => Ok(g),
    };
    Ok(match lemma {
        Lemma::Q => vec![lemmas::verify_lemma_q(&with_steps(
            products::default_q_grid(),
        )?)?],
        Lemma::K5 => vec![lemmas::verify_lemma_k5()?],
        Lemma::K4 => vec![lemmas::verify_lemma_k4()?],
        Lemma::K1 => vec![
            lemmas::verify_lemma_k1_cases()?,
            lemmas::verify_lemma_k1_direct(
                &with_steps(k1::default_direct_grid())?,
                a.z_steps.unwrap_or(k1::DEFAULT_Z_STEPS),
            )?,
        ],
        Lemma::K2 => vec![lemmas::verify_lemma_k2(
            &with_steps(k2::default_sector_grid())?,
            a.z_steps.unwrap_or(k2::DEFAULT_PSI_STEPS),
        )?],
        Lemma::Mu => vec![lemmas::mu_properties_check(a.samples)?],
        Lemma::Ab => vec![lemmas::verify_ab_monotone(a.jmax, a.grid_points)?],
        Lemma::Constants => vec![lemmas::constants::verify_constants()?],
        Lemma::All => {
            let mut all = Vec::new();
            for l in [
                Lemma::Mu,
                Lemma::Ab,
                Lemma::Q,
                Lemma::K5,
                Lemma::K4,
                Lemma::K1,
                Lemma::K2,
            ] {
                all.extend(lemma_reports(a, l)?);
            }
            all
        }
    })
}

pub fn cmd_verify(a: &VerifyArgs) -> Result<OutputRecord, ThetaError> {
    let reports = lemma_reports(a, a.lemma)?;
    let failed: Vec<String> = reports
        .iter()
        .flat_map(|r| {
            r.failed_margins()
                .into_iter()
                .map(|(name, _)| format!("{}:{name}", r.lemma_id))
                .collect::<Vec<_>>()
        })
        .collect();
    let mut rec = OutputRecord::new("verify");
    let name = Lemma::to_possible_value(&a.lemma)
        .map(|v| v.get_name().to_string())
        .unwrap_or_default();
    rec.input("lemma", name);
    if let Some((m, n)) = a.steps {
        rec.input("steps", format!("{m}x{n}"));
    }
    if let Some(z) = a.z_steps {
        rec.input("z_steps", z);
    }
    rec.result("reports", &reports).result("failed", &failed);
    rec.pass = Some(reports.iter().all(|r| r.passed));
    Ok(rec)
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![hi];
    }
    (0..n)
        .map(|i| {
            if i + 1 == n {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

pub fn cmd_scan(a: &ScanArgs) -> Result<Outcome, ThetaError> {
    if !(a.a > 0.0 && a.a <= 0.6) {
        return Err(ThetaError::InvalidParameter(format!(
            "region radius must satisfy 0 < a <= 0.6, got {}",
            a.a
        )));
    }
    let (ms, ns) = a.steps;
    let r_min = a.r_min.unwrap_or(a.a / ms as f64);
    if !(r_min > 0.0 && r_min <= a.a) {
        return Err(ThetaError::InvalidParameter(format!(
            "--r-min must satisfy 0 < r_min <= a, got {r_min}"
        )));
    }
    let annulus = Annulus::for_index(a.k)?;
    let args = if ns == 1 {
        vec![PI]
    } else {
        linspace(FRAC_PI_2, 1.5 * PI, ns)
    };
    let cells: Vec<(f64, f64)> = linspace(r_min, a.a, ms)
        .into_iter()
        .flat_map(|r| args.iter().map(move |&t| (r, t)))
        .collect();
    let k = a.k;
    let results: Vec<(Value, bool, bool, bool)> = cells
        .par_iter()
        .map(|&(r, t)| {
            let q = QParameter::from_polar(r, t).expect("modulus in (0, 0.6]");
            let regime = SeparationRegime::of(&q);
            let asserted = regime != SeparationRegime::Unclaimed && regime.asserts(k);
            let count = count_zeros_in_annulus(&q, &annulus);
            let zero = locate_zero_robust(&q, k, DEFAULT_RESIDUAL_TOL);
            let numerical_error = count.is_err() || zero.is_err();
            let separated = matches!(count, Ok(1)) && zero.as_ref().is_ok_and(|z| z.annulus_ok);
            let error = count
                .as_ref()
                .err()
                .or(zero.as_ref().err())
                .map(|e| e.to_string());
            let z = zero.ok();
            let row = json!({
                "modulus": r,
                "argument": t,
                "regime": regime,
                "asserted": asserted,
                "count": count.ok(),
                "zero_re": z.map(|z| z.location.re()),
                "zero_im": z.map(|z| z.location.im()),
                "residual": z.map(|z| z.residual),
                "annulus_ok": z.map(|z| z.annulus_ok),
                "separated": separated,
                "error": error,
            });
            (row, asserted, separated, numerical_error)
        })
        .collect();
    let asserted_fail = results.iter().filter(|c| c.1 && !c.2).count();
    let numerical = results.iter().filter(|c| c.1 && c.3).count();
    let separated = results.iter().filter(|c| c.2).count();
    let mut rec = OutputRecord::new("scan");
    rec.input("a", a.a)
        .input("k", a.k)
        .input("steps", format!("{ms}x{ns}"))
        .input("r_min", r_min)
        .result("cells", results.len())
        .result("separated_cells", separated)
        .result("asserted_failures", asserted_fail)
        .result("rows", results.into_iter().map(|c| c.0).collect::<Vec<_>>());
    rec.pass = Some(asserted_fail == 0);
    if numerical > 0 {
        return Ok(Outcome {
            record: Some(rec),
            code: EXIT_NUMERICAL,
            message: Some(format!("{numerical} asserted cells hit numerical errors")),
        });
    }
    Ok(Outcome::done(rec))
}

/// Parses an angle in radians, or in degrees with a `deg` suffix.
pub fn parse_angle(s: &str) -> Result<f64, ThetaError> {
    let s = s.trim();
    let (num, scale) = match s.strip_suffix("deg") {
        Some(n) => (n, PI / 180.0),
        None => (s.strip_suffix("rad").unwrap_or(s), 1.0),
    };
    num.trim()
        .parse::<f64>()
        .map(|v| v * scale)
        .map_err(|_| ThetaError::InvalidParameter(format!("cannot parse angle '{s}'")))
}

pub fn cmd_trace(a: &TraceArgs) -> Result<OutputRecord, ThetaError> {
    let arg = parse_angle(&a.arg)?;
    let path = zeros::trace_zero_ray(arg, a.k, a.from, a.to, a.steps)?;
    let moduli = if a.steps == 1 {
        vec![a.from]
    } else {
        linspace(a.from, a.to, a.steps)
    };
    let rows: Vec<Value> = path
        .iter()
        .zip(moduli)
        .map(|(z, r)| {
            let mut v = zero_json(z);
            if let Value::Object(m) = &mut v {
                m.insert("modulus".into(), json!(r));
            }
            v
        })
        .collect();
    let mut rec = OutputRecord::new("trace");
    rec.input("arg", arg)
        .input("k", a.k)
        .input("from", a.from)
        .input("to", a.to)
        .input("steps", a.steps)
        .result("rows", rows);
    rec.pass = Some(path.iter().all(|z| z.annulus_ok));
    Ok(rec)
}

pub fn cmd_table(a: &TableArgs) -> Result<OutputRecord, ThetaError> {
    let ns = if a.n.is_empty() {
        DEFAULT_TABLE_N.to_vec()
    } else {
        a.n.clone()
    };
    let rows = asymptotics::table(&ns)?;
    let json_rows: Vec<Value> = rows
        .iter()
        .map(|r| {
            let t = r.truncated();
            json!({
                "n": r.n,
                "tau": r.tau,
                "m": r.m,
                "M": r.big_m,
                "tau_trunc": t.tau,
                "m_trunc": t.m,
                "M_trunc": t.big_m,
            })
        })
        .collect();
    let mut rec = OutputRecord::new("table");
    rec.input("n", &ns)
        .result("alpha0", asymptotics::alpha0())
        .result("limit", (1.0 / asymptotics::alpha0()).exp())
        .result("rows", json_rows);
    Ok(rec)
}

/// Applies `THETA_SEP_THREADS` to the global thread pool.
pub fn configure_threads() -> Result<(), String> {
    match std::env::var("THETA_SEP_THREADS") {
        Ok(v) => {
            let n: usize = v.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| {
                format!("THETA_SEP_THREADS must be a positive integer, got '{v}'")
            })?;
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| e.to_string())
        }
        Err(_) => Ok(()),
    }
}
