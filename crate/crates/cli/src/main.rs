use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use twistor_lab::config::{parse_tolerance, Format, RunConfig, Suite};
use twistor_lab::{emit_report, run};

/// Environment variable holding the worker thread count.
const THREADS_ENV: &str = "TWISTOR_LAB_THREADS";

#[derive(Parser, Debug)]
#[command(name = "twistor-lab", version, about = "Verification suites for twistor spaces of even Clifford structures")]
struct Cli {
    /// Rank r of the Clifford structure (3..=16).
    #[arg(long, default_value_t = 9)]
    rank: usize,
    /// Multiplicity m; the model dimension is n = N0(r) m.
    #[arg(long, default_value_t = 1)]
    multiplicity: usize,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    kappa: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random samples per suite.
    #[arg(long, default_value_t = 200)]
    samples: usize,
    /// Comma-separated suites, or "all".
    #[arg(long, default_value = "all", value_delimiter = ',')]
    suites: Vec<String>,
    /// Per-suite tolerance override, `<suite>=<value>`; repeatable.
    #[arg(long = "tolerance", value_name = "SUITE=VALUE")]
    tolerances: Vec<String>,
    /// Vertical metric scales for the structure and connection checks.
    #[arg(long, default_value = "1,0.5", value_delimiter = ',')]
    t_values: Vec<f64>,
    /// text, json or csv.
    #[arg(long, default_value = "text")]
    format: String,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Include wall-clock timings in the report.
    #[arg(long)]
    timings: bool,
}

fn config_from(cli: Cli) -> Result<RunConfig, String> {
    let suites = if cli.suites.iter().any(|s| s == "all") {
        Suite::ALL.to_vec()
    } else {
        cli.suites
            .iter()
            .map(|s| s.trim())
            .filter(|s| !s.is_empty() && *s != "none")
            .map(str::parse::<Suite>)
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?
    };
    let tolerances = cli
        .tolerances
        .iter()
        .map(|t| parse_tolerance(t))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let format: Format = cli.format.parse().map_err(|e: twistor_lab::ConfigError| e.to_string())?;
    Ok(RunConfig {
        rank: cli.rank,
        multiplicity: cli.multiplicity,
        kappa: cli.kappa,
        t_values: cli.t_values,
        seed: cli.seed,
        samples: cli.samples,
        tolerances,
        suites,
        format,
        output: cli.out,
        timings: cli.timings,
    })
}

fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let threads: usize = value.trim().parse().map_err(|_| format!("{THREADS_ENV} must be a positive integer"))?;
    if threads == 0 {
        return Err(format!("{THREADS_ENV} must be a positive integer"));
    }
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let config = match config_from(cli).and_then(|c| configure_threads().map(|()| c)) {
        Ok(config) => config,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let report = match run(&config) {
        Ok(report) => report,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let text = emit_report(&report, config.format);
    match &config.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(3);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(report.exit_code() as u8)
}
