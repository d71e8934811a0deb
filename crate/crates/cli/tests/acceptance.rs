//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails. Runs serially so that the runtime limits are
//! measured without contention.

use std::time::{Duration, Instant};

use twistor_lab::{run, Report, RunConfig, Status, Suite};

struct Outcome {
    ok: bool,
    detail: String,
}

fn config(rank: usize, multiplicity: usize, samples: usize, suites: &[Suite]) -> RunConfig {
    RunConfig { rank, multiplicity, samples, suites: suites.to_vec(), seed: 20, ..RunConfig::default() }
}

fn execute(config: &RunConfig) -> Report {
    run(config).expect("valid config")
}

/// Worst residual, pass flag and sample count of `identity` in `suite`.
fn row(report: &Report, suite: Suite, identity: &str) -> Option<(f64, bool, usize)> {
    report.suite(suite)?.row(identity).map(|r| (r.max_residual, r.passed, r.samples))
}

fn below(report: &Report, suite: Suite, identity: &str, bound: f64, worst: &mut f64) -> bool {
    match row(report, suite, identity) {
        Some((value, _, _)) => {
            *worst = worst.max(value);
            value < bound
        }
        None => false,
    }
}

fn lemma() -> Outcome {
    let mut ok = true;
    let mut counterexamples = 0.0;
    for rank in 3..=9 {
        let report = execute(&config(rank, 1, 1000, &[Suite::Lemma]));
        match row(&report, Suite::Lemma, "A^2 = -1 iff |A| = 1 and A^A = 0 (exact, counterexamples)") {
            Some((count, _, samples)) => {
                counterexamples += count;
                ok &= count == 0.0 && samples >= 1000;
            }
            None => ok = false,
        }
    }
    Outcome { ok, detail: format!("{counterexamples} counterexamples over 7 x 1000 exact samples") }
}

fn representation() -> Outcome {
    let invariants = [
        "J_ij^T = -J_ij",
        "J_ij^T J_ij = Id",
        "J_ij^2 = -Id",
        "J_ij J_ik = J_jk",
        "[J_ij, J_kl] = 0 (disjoint)",
        "{J_ij, J_ik} = 0",
    ];
    let expected_dims = [(9, 16), (10, 32), (12, 64), (16, 128)];
    let (mut ok, mut worst) = (true, 0.0f64);
    for rank in [3, 5, 6, 7, 9, 10, 12, 16] {
        let report = execute(&config(rank, 1, 20, &[Suite::Representation]));
        for identity in invariants {
            ok &= below(&report, Suite::Representation, identity, 1e-12, &mut worst);
        }
        if let Some(&(_, n)) = expected_dims.iter().find(|(r, _)| *r == rank) {
            ok &= report.config.dim == n;
        }
    }
    Outcome { ok, detail: format!("max invariant residual {worst:e}; dims 16/32/64/128 checked") }
}

fn four_term() -> Outcome {
    let (mut ok, mut worst) = (true, 0.0f64);
    for (rank, m) in [(5, 2), (6, 2), (7, 2), (9, 1)] {
        let report = execute(&config(rank, m, 200, &[Suite::Curvature]));
        ok &= report.config.dim != 8;
        ok &= below(&report, Suite::Curvature, "four-term bracket identity", 1e-9, &mut worst);
        ok &= row(&report, Suite::Curvature, "four-term bracket identity").is_some_and(|r| r.2 >= 200);
    }
    Outcome { ok, detail: format!("max residual {worst:e} over 200 samples per rank") }
}

fn integrability() -> Outcome {
    let (mut ok, mut detail) = (true, Vec::new());
    for (rank, m) in [(5, 2), (9, 1)] {
        let report = execute(&RunConfig { t_values: vec![1.0], ..config(rank, m, 200, &[Suite::Integrability]) });
        let (mut v, mut x, mut h) = (0.0f64, 0.0f64, 0.0f64);
        ok &= below(&report, Suite::Integrability, "N(U, V) vertical pair (finite difference)", 1e-4, &mut v);
        ok &= below(&report, Suite::Integrability, "N(X, U) mixed", 1e-12, &mut x);
        ok &= below(&report, Suite::Integrability, "V N(X, Y): four-term residual", 1e-9, &mut h);
        detail.push(format!("r = {rank}: vertical {v:.1e}, mixed {x:.1e}, horizontal {h:.1e}"));
    }
    Outcome { ok, detail: detail.join("; ") }
}

fn kaehler() -> Outcome {
    let labels = [
        "a: nabla_U X",
        "b: J nabla_U X = nabla_U JX",
        "c: A_X JY = J A_X Y",
        "d: A_X JU = J A_X U",
        "e: (nabla_X J)Y = 0",
    ];
    let (mut ok, mut worst) = (true, 0.0f64);
    for (rank, m) in [(5, 2), (9, 1)] {
        let report = execute(&config(rank, m, 200, &[Suite::Kaehler]));
        for label in labels {
            ok &= below(&report, Suite::Kaehler, label, 1e-9, &mut worst);
        }
        ok &= row(&report, Suite::Kaehler, "Einstein constants, exact (mismatches)").is_some_and(|r| r.0 == 0.0);
    }
    Outcome { ok, detail: format!("max residual (a)-(e) {worst:e}; Einstein constants exact") }
}

fn nearly_kaehler() -> Outcome {
    let (mut ok, mut skew, mut conn) = (true, 0.0f64, 0.0f64);
    let mut fraction = 1.0f64;
    for (rank, m) in [(5, 2), (9, 1)] {
        let report = execute(&config(rank, m, 200, &[Suite::NearlyKaehler]));
        ok &= below(&report, Suite::NearlyKaehler, "(nabla_E J~)E = 0", 1e-8, &mut skew);
        ok &= below(&report, Suite::NearlyKaehler, "connection torsion-free", 1e-9, &mut conn);
        ok &= below(&report, Suite::NearlyKaehler, "connection metric", 1e-9, &mut conn);
        match row(&report, Suite::NearlyKaehler, "N_J~ witness: 1 - fraction above threshold") {
            Some((miss, _, _)) => {
                fraction = fraction.min(1.0 - miss);
                ok &= 1.0 - miss >= 0.95;
            }
            None => ok = false,
        }
    }
    Outcome {
        ok,
        detail: format!("skew {skew:e}, connection {conn:e}, witness fraction {:.1}%", 100.0 * fraction),
    }
}

fn flat() -> Outcome {
    let report = execute(&config(5, 1, 1, &[Suite::FlatGlobal]));
    let (mut ok, mut worst) = (true, 0.0f64);
    ok &= below(&report, Suite::FlatGlobal, "flat: N(d_y, d_w) mixed", 1e-4, &mut worst);
    ok &= below(&report, Suite::FlatGlobal, "flat: N(d_w, d_w') fibre", 1e-4, &mut worst);
    let ratio = row(&report, Suite::FlatGlobal, "flat: |N(h)| / |N(h/2)| within 20% of 2");
    ok &= ratio.is_some_and(|r| r.0 <= 0.2);
    let deviation = ratio.map_or(f64::NAN, |r| r.0);
    Outcome { ok, detail: format!("max residual {worst:e}, |ratio/2 - 1| = {deviation:.2e}") }
}

fn guards() -> Outcome {
    let theorem = [Suite::Integrability, Suite::Kaehler, Suite::NearlyKaehler];
    let (mut ok, mut checked) = (true, 0);
    for (rank, m) in [(5, 1), (6, 1), (7, 1), (8, 1), (3, 1), (4, 1), (4, 2)] {
        let report = execute(&config(rank, m, 5, &theorem));
        ok &= report.exit_code() == 0;
        for suite in &report.suites {
            checked += 1;
            ok &= suite.status == Status::Skipped
                && suite.rows.is_empty()
                && suite.reason.as_deref().is_some_and(|r| r.starts_with("hypothesis not met"));
        }
    }
    let control = execute(&config(5, 2, 5, &theorem));
    ok &= control.suites.iter().all(|s| s.status == Status::Passed);
    Outcome { ok, detail: format!("{checked} theorem-suite runs skipped; r = 5, n = 16 control passes") }
}

type Criterion = (&'static str, fn() -> Outcome, u64);

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 square-root characterization (exact)", lemma, 10),
        ("2 representation axioms and dimensions", representation, 30),
        ("3 four-term curvature identity", four_term, 20),
        ("4 integrability (three Nijenhuis components)", integrability, 60),
        ("5 Kaehler identities and Einstein constants", kaehler, 30),
        ("6 nearly-Kaehler and non-integrability witness", nearly_kaehler, 60),
        ("7 flat global check with Richardson ratio", flat, 120),
        ("8 hypothesis guards", guards, 60),
    ];
    let mut failures = 0;
    for (name, check, limit) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let in_time = elapsed < Duration::from_secs(limit);
        let ok = outcome.ok && in_time;
        failures += usize::from(!ok);
        println!(
            "{} criterion {name}: {} [{:.2}s / {limit}s{}]",
            if ok { "PASS" } else { "FAIL" },
            outcome.detail,
            elapsed.as_secs_f64(),
            if in_time { "" } else { ", over limit" }
        );
    }
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
}
