use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qrc_cli::commands;
use qrc_cli::output::{resolve_out, to_sorted_json, write_atomic};
use qrc_cli::spec::ChannelSpec;
use qrc_cli::verify::{run_suite, summary_line, SuiteConfig};
use qrc_cli::CliError;

/// Input-driven quantum channels as state-affine systems.
///
/// Outputs default to $QRC_OUT_DIR (or the working directory) when --out is omitted.
#[derive(Debug, Parser)]
#[command(name = "qrc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct Common {
    /// Channel-spec file ([channel], [input], [run] sections).
    #[arg(long)]
    spec: PathBuf,
    /// Output file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Lattice points per input axis (analyze) or grid points per axis (scan).
    #[arg(long)]
    lattice: Option<usize>,
    /// Trajectory length (drive).
    #[arg(long)]
    steps: Option<usize>,
    /// Seed for inputs and random lattice points.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// JSON report: superoperator, spectrum, p/q, certificate, fixed points, theorems.
    Analyze(Common),
    /// CSV of singular values over an (h_t, gamma) grid.
    Scan(Common),
    /// CSV of Pauli expectations under seeded uniform inputs.
    Drive(Common),
    /// Run the acceptance suite.
    Verify {
        /// Optional channel spec (unused by the suite; accepted for interface symmetry).
        #[arg(long)]
        spec: Option<PathBuf>,
        /// JSON summary output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run only checks whose id contains NAME, or tagged NAME, or `c<criterion>`.
        #[arg(long, value_name = "NAME")]
        filter: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Replace every tolerance-type bound.
        #[arg(long)]
        tolerance: Option<f64>,
    },
}

fn load(common: &Common) -> Result<ChannelSpec, CliError> {
    let mut spec = ChannelSpec::from_path(&common.spec)?;
    if let Some(n) = common.lattice {
        if n == 0 {
            return Err(CliError::InvalidInput("--lattice must be positive".into()));
        }
        spec.run.lattice = n;
    }
    if let Some(t) = common.steps {
        spec.run.steps = t;
    }
    if let Some(s) = common.seed {
        spec.run.seed = s;
    }
    Ok(spec)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Analyze(c) => {
            let spec = load(&c)?;
            let report = commands::analyze(&spec)?;
            let path = resolve_out(c.out.as_deref(), "analyze.json");
            write_atomic(&path, to_sorted_json(&report)?.as_bytes())?;
            println!("wrote {}", path.display());
        }
        Command::Scan(c) => {
            let spec = load(&c)?;
            let rows = commands::scan(&spec)?;
            let path = resolve_out(c.out.as_deref(), "scan.csv");
            write_atomic(&path, commands::scan_csv(&rows).as_bytes())?;
            println!("wrote {} ({} rows)", path.display(), rows.len());
        }
        Command::Drive(c) => {
            let spec = load(&c)?;
            let rows = commands::drive(&spec)?;
            let path = resolve_out(c.out.as_deref(), "drive.csv");
            write_atomic(&path, commands::drive_csv(&rows, spec.input.dim).as_bytes())?;
            println!("wrote {} ({} steps)", path.display(), rows.len());
        }
        Command::Verify { spec, out, filter, seed, tolerance } => {
            if let Some(p) = &spec {
                ChannelSpec::from_path(p)?;
            }
            if let Some(t) = tolerance {
                if !(t.is_finite() && t > 0.0) {
                    return Err(CliError::InvalidInput(format!("--tolerance must be positive, got {t}")));
                }
            }
            let config = SuiteConfig { tolerance_override: tolerance, seed };
            let results = run_suite(&config, filter.as_deref());
            if results.is_empty() {
                return Err(CliError::InvalidInput(format!("no checks match filter {:?}", filter.unwrap_or_default())));
            }
            for r in &results {
                println!("{}", summary_line(r));
            }
            let failed = results.iter().filter(|r| !r.passed).count();
            println!("{} passed, {failed} failed", results.len() - failed);
            if let Some(path) = out.as_deref().map(|p| resolve_out(Some(p), "verify.json")) {
                let summary = serde_json::json!({ "passed": failed == 0, "checks": results, "seed": seed });
                write_atomic(&path, to_sorted_json(&summary)?.as_bytes())?;
            }
            if failed > 0 {
                return Err(CliError::CheckFailure { failed, total: results.len() });
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qrc: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
