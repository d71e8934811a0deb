use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::config::{Format, RunConfig, Suite, EXACT_TOLERANCE, FINITE_DIFFERENCE_TOLERANCE, MATRIX_TOLERANCE};

pub const SCHEMA: &str = "twistor-lab-report/1";

/// One residual measurement.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub suite: Suite,
    pub identity: String,
    pub rank: usize,
    pub dim: usize,
    pub kappa: f64,
    pub t: Option<f64>,
    pub samples: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Passed,
    Failed,
    Skipped,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Passed => "passed",
            Status::Failed => "failed",
            Status::Skipped => "skipped",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub status: Status,
    /// Why the suite was skipped or aborted.
    pub reason: Option<String>,
    pub notes: Vec<String>,
    pub rows: Vec<Row>,
    #[serde(skip)]
    pub seconds: f64,
}

impl SuiteReport {
    pub fn max_residual(&self) -> Option<f64> {
        self.rows.iter().map(|r| r.max_residual).reduce(f64::max)
    }

    pub fn samples(&self) -> usize {
        self.rows.iter().map(|r| r.samples).max().unwrap_or(0)
    }

    pub fn row(&self, identity: &str) -> Option<&Row> {
        self.rows.iter().find(|r| r.identity == identity)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub rank: usize,
    pub multiplicity: usize,
    pub dim: usize,
    pub kappa: f64,
    pub t_values: Vec<f64>,
    pub seed: u64,
    pub samples: usize,
    pub suites: Vec<Suite>,
    pub tolerance_overrides: BTreeMap<Suite, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DefaultTolerances {
    pub exact: f64,
    pub matrix: f64,
    pub finite_difference: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub version: &'static str,
    pub config: ConfigEcho,
    pub default_tolerances: DefaultTolerances,
    pub suites: Vec<SuiteReport>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<Suite, f64>>,
}

impl Report {
    pub fn new(config: &RunConfig, suites: Vec<SuiteReport>) -> Self {
        let passed = suites.iter().all(|s| s.status != Status::Failed);
        let timings = config.timings.then(|| suites.iter().map(|s| (s.suite, s.seconds)).collect());
        Report {
            schema: SCHEMA,
            version: env!("CARGO_PKG_VERSION"),
            config: ConfigEcho {
                rank: config.rank,
                multiplicity: config.multiplicity,
                dim: config.dimension(),
                kappa: config.kappa,
                t_values: config.t_values.clone(),
                seed: config.seed,
                samples: config.samples,
                suites: suites.iter().map(|s| s.suite).collect(),
                tolerance_overrides: config.tolerances.clone(),
            },
            default_tolerances: DefaultTolerances {
                exact: EXACT_TOLERANCE,
                matrix: MATRIX_TOLERANCE,
                finite_difference: FINITE_DIFFERENCE_TOLERANCE,
            },
            suites,
            passed,
            timings,
        }
    }

    pub fn suite(&self, suite: Suite) -> Option<&SuiteReport> {
        self.suites.iter().find(|s| s.suite == suite)
    }

    /// 0 when no selected suite failed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }
}

fn fmt_t(t: Option<f64>) -> String {
    t.map(|t| t.to_string()).unwrap_or_default()
}

fn to_text(report: &Report) -> String {
    let c = &report.config;
    let mut out = String::new();
    let _ = writeln!(out, "twistor-lab {} ({})", report.version, report.schema);
    let _ = writeln!(
        out,
        "r = {}  m = {}  n = {}  κ = {}  seed = {}  samples = {}  t = {:?}",
        c.rank, c.multiplicity, c.dim, c.kappa, c.seed, c.samples, c.t_values
    );
    let d = &report.default_tolerances;
    let _ = writeln!(
        out,
        "default tolerances: exact {:e}, matrix {:e}, finite-difference {:e}",
        d.exact, d.matrix, d.finite_difference
    );
    for (suite, tol) in &c.tolerance_overrides {
        let _ = writeln!(out, "tolerance override: {suite} = {tol:e}");
    }
    for s in &report.suites {
        let _ = writeln!(out);
        let timing = report.timings.as_ref().and_then(|t| t.get(&s.suite)).map(|t| format!(" [{t:.2}s]"));
        let _ = write!(out, "[{}] {}{}", s.status.as_str().to_uppercase(), s.suite, timing.unwrap_or_default());
        match &s.reason {
            Some(reason) => {
                let _ = writeln!(out, ": {reason}");
            }
            None => {
                let _ = writeln!(out);
            }
        }
        for row in &s.rows {
            let t = row.t.map(|t| format!(" (t = {t})")).unwrap_or_default();
            let _ = writeln!(
                out,
                "  {:<4} {:<60} {:>10.3e} <= {:<9.1e} n = {}",
                if row.passed { "ok" } else { "FAIL" },
                format!("{}{t}", row.identity),
                row.max_residual,
                row.tolerance,
                row.samples
            );
        }
        for note in &s.notes {
            let _ = writeln!(out, "  note: {note}");
        }
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "overall: {}", if report.passed { "PASS" } else { "FAIL" });
    out
}

/// Header of the CSV form.
pub const CSV_HEADER: [&str; 10] =
    ["suite", "identity", "r", "n", "kappa", "t", "samples", "max_residual", "tolerance", "status"];

fn to_csv(report: &Report) -> csv::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    let c = &report.config;
    for s in &report.suites {
        for row in &s.rows {
            w.write_record([
                row.suite.name().to_string(),
                row.identity.clone(),
                row.rank.to_string(),
                row.dim.to_string(),
                row.kappa.to_string(),
                fmt_t(row.t),
                row.samples.to_string(),
                format!("{:e}", row.max_residual),
                format!("{:e}", row.tolerance),
                if row.passed { "pass" } else { "fail" }.to_string(),
            ])?;
        }
        w.write_record([
            s.suite.name().to_string(),
            "summary".to_string(),
            c.rank.to_string(),
            c.dim.to_string(),
            c.kappa.to_string(),
            String::new(),
            s.samples().to_string(),
            s.max_residual().map(|r| format!("{r:e}")).unwrap_or_default(),
            String::new(),
            s.status.as_str().to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Serializes `report`. Field order is fixed by the struct definitions.
pub fn emit_report(report: &Report, format: Format) -> String {
    match format {
        Format::Text => to_text(report),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Csv => to_csv(report).expect("in-memory csv"),
    }
}
