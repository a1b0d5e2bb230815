//! Acceptance criteria, run in sequence with one PASS/FAIL line each.
//! The process exits nonzero if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use partial_theta::asymptotics::{table, AsymptoticRow, DEFAULT_TABLE_N};
use partial_theta::lemmas::constants::verify_constants;
use partial_theta::lemmas::verify_all;
use partial_theta::series::{eval_g, eval_theta, eval_theta_star, SeriesBudget, ThetaStarMethod};
use partial_theta::zeros::{locate_zero, verify_separation};
use partial_theta::{asymptotics, ComplexPoint, QParameter};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    ok: bool,
    detail: String,
}

fn run(n: u32, limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let mut out = f();
    let elapsed = start.elapsed();
    if let Some(limit) = limit {
        if elapsed > limit {
            out.ok = false;
            out.detail.push_str(&format!("; over time limit {limit:?}"));
        }
    }
    println!(
        "criterion {n}: {} ({:.2?}) {}",
        if out.ok { "PASS" } else { "FAIL" },
        elapsed,
        out.detail
    );
    out.ok
}

fn constants() -> Outcome {
    let r = verify_constants().unwrap();
    let (worst, margin) = r.min_margin().unwrap();
    Outcome {
        ok: r.passed,
        detail: format!(
            "{} constants, fewest matching digits {:.2} ({worst})",
            r.margins.len(),
            margin + 9.0
        ),
    }
}

fn asymptotic_table() -> Outcome {
    let published: [(u32, f64, f64, f64); 10] = [
        (5, 0.27, 336.2, 1225.1),
        (6, 0.39, 164.5, 416.1),
        (7, 0.48, 115.2, 239.1),
        (8, 0.54, 92.8, 169.8),
        (9, 0.59, 80.2, 134.4),
        (10, 0.63, 72.2, 113.4),
        (15, 0.75, 55.3, 73.0),
        (20, 0.81, 49.5, 60.5),
        (25, 0.85, 46.5, 54.4),
        (30, 0.87, 44.7, 50.9),
    ];
    let rows = table(&DEFAULT_TABLE_N).unwrap();
    let bad: Vec<u32> = rows
        .iter()
        .zip(published)
        .filter(|(row, (n, tau, m, big_m))| {
            row.truncated()
                != AsymptoticRow {
                    n: *n,
                    tau: *tau,
                    m: *m,
                    big_m: *big_m,
                }
        })
        .map(|(row, _)| row.n)
        .collect();
    Outcome {
        ok: bad.is_empty(),
        detail: format!("{} rows, mismatched n: {bad:?}", rows.len()),
    }
}

fn lemma_suite() -> Outcome {
    let reports = verify_all().unwrap();
    let failed: Vec<String> = reports
        .iter()
        .filter(|r| !r.passed)
        .map(|r| format!("{} {:?}", r.lemma_id, r.failed_margins()))
        .collect();
    let k4 = reports.iter().find(|r| r.lemma_id == "k4").unwrap();
    let k4_margin = k4.margins["product_vs_g"];
    let k4_ok = (k4_margin - 0.0079055467).abs() <= 1e-8;
    Outcome {
        ok: failed.is_empty() && k4_ok,
        detail: format!("k4 margin {k4_margin:.10} (ok: {k4_ok}); failed reports: {failed:?}"),
    }
}

fn full_separation() -> Outcome {
    let moduli = [0.1, 0.2, 0.3, 0.4, 0.5, 0.52, 0.54, 0.549, 0.55];
    let args = [0.5, 0.75, 1.0, 1.25, 1.5].map(|t| t * PI);
    let mut bad = Vec::new();
    let mut worst_residual: f64 = 0.0;
    for r in moduli {
        for a in args {
            let q = QParameter::from_polar(r, a).unwrap();
            let rep = verify_separation(&q, 6).unwrap();
            for e in &rep.entries {
                let ok = e.count == Some(1)
                    && e.zero.is_some_and(|z| {
                        worst_residual = worst_residual.max(z.residual);
                        z.annulus_ok && z.residual < 1e-9
                    });
                if !ok {
                    bad.push((r, a, e.k));
                }
            }
        }
    }
    Outcome {
        ok: bad.is_empty(),
        detail: format!("45 points, largest residual {worst_residual:.2e}, failures {bad:?}"),
    }
}

fn partial_separation() -> Outcome {
    let mut bad = Vec::new();
    for a in [0.5, 2.0 / 3.0, 5.0 / 6.0, 1.0].map(|t| t * PI) {
        let q = QParameter::from_polar(0.6, a).unwrap();
        let rep = verify_separation(&q, 6).unwrap();
        if rep.pair_count != Some(2) {
            bad.push(format!("arg {a:.4}: pair count {:?}", rep.pair_count));
        }
        for e in rep.entries.iter().filter(|e| e.k == 1 || e.k >= 4) {
            if e.count != Some(1) {
                bad.push(format!("arg {a:.4}: k = {} count {:?}", e.k, e.count));
            }
        }
    }
    Outcome {
        ok: bad.is_empty(),
        detail: format!("4 arguments, failures {bad:?}"),
    }
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let b = SeriesBudget::default();
    let mut worst: f64 = 0.0;
    let mut bad = 0;
    for _ in 0..100 {
        let q = QParameter::from_polar(rng.gen_range(0.05..=0.6), rng.gen_range(-PI..PI)).unwrap();
        let z =
            ComplexPoint::from_polar(10f64.powf(rng.gen_range(-1.0..1.5)), rng.gen_range(-PI..PI))
                .unwrap();
        let t = eval_theta(&q, z, &b).unwrap();
        let s = eval_theta_star(&q, z, &b, ThetaStarMethod::Series).unwrap();
        let p = eval_theta_star(&q, z, &b, ThetaStarMethod::Product).unwrap();
        let g = eval_g(&q, z, &b).unwrap();
        let qz = ComplexPoint::try_from(q.to_complex() * z.to_complex()).unwrap();
        let inner = eval_theta(&q, qz, &b).unwrap();

        let checks = [
            (
                (t.complex() - (s.complex() - g.complex())).norm(),
                t.error_bound() + s.error_bound() + g.error_bound(),
            ),
            (
                (s.complex() - p.complex()).norm(),
                s.error_bound() + p.error_bound(),
            ),
            (
                (t.complex() - (Complex64::new(1.0, 0.0) + qz.to_complex() * inner.complex()))
                    .norm(),
                t.error_bound() + qz.norm() * inner.error_bound(),
            ),
        ];
        for (diff, bound) in checks {
            worst = worst.max(diff / bound);
            if diff > bound {
                bad += 1;
            }
        }
    }
    Outcome {
        ok: bad == 0,
        detail: format!("300 comparisons, largest difference / bound {worst:.3}, violations {bad}"),
    }
}

fn asymptotic_cross_check() -> Outcome {
    let row = asymptotics::table_row(9).unwrap();
    let q = QParameter::real(-row.tau).unwrap();
    match locate_zero(&q, 9, 1e-11) {
        Ok(z) => {
            let m = z.location.norm();
            Outcome {
                ok: m >= row.m && m <= row.big_m && (80.2..=134.4).contains(&m),
                detail: format!("|xi_9| = {m:.4} in [{:.4}, {:.4}]", row.m, row.big_m),
            }
        }
        Err(e) => Outcome {
            ok: false,
            detail: format!("no zero: {e}"),
        },
    }
}

fn negative_control() -> Outcome {
    let q = QParameter::from_polar(0.6, PI / 2.0).unwrap();
    let rep = verify_separation(&q, 6).unwrap();
    let middle_unasserted = rep
        .entries
        .iter()
        .filter(|e| e.k == 2 || e.k == 3)
        .all(|e| !e.asserted);
    Outcome {
        ok: rep.pair_count == Some(2) && middle_unasserted && !rep.strong_separation,
        detail: format!(
            "pair count {:?}, verdict {:?}, k = 2, 3 unasserted: {middle_unasserted}",
            rep.pair_count, rep.verdict
        ),
    }
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let results = [
        run(1, Some(secs(5)), constants),
        run(2, Some(secs(1)), asymptotic_table),
        run(3, Some(secs(60)), lemma_suite),
        run(4, Some(secs(300)), full_separation),
        run(5, Some(secs(120)), partial_separation),
        run(6, None, oracle_equivalence),
        run(7, Some(secs(30)), asymptotic_cross_check),
        run(8, None, negative_control),
    ];
    let failed: Vec<usize> = results
        .iter()
        .enumerate()
        .filter(|(_, ok)| !**ok)
        .map(|(i, _)| i + 1)
        .collect();
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
