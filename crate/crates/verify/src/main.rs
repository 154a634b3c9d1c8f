use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use maxlip_verify::compute::{compute, write_output, ComputeOp};
use maxlip_verify::report::emit;
use maxlip_verify::{run_scenario, Format, Scenario, ScenarioConfig, VerifyError};

/// Verification harness for discrete maximal operators and variable-exponent
/// Lipschitz functionals.
///
/// Exit codes: 0 all checks pass, 1 some check fails, 2 invalid config,
/// 3 I/O error. MAXLIP_THREADS caps the worker pool.
#[derive(Parser)]
#[command(name = "maxlip", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its report.
    Verify {
        /// lemmas, identities, theorem1, theorem2, theorem3, normequiv, counterexamples or all
        scenario: Scenario,
        /// JSON config; defaults apply when omitted
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Output file; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate one operator or norm on the base grid.
    Compute {
        #[arg(value_enum)]
        op: ComputeOp,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn load(path: Option<&Path>) -> Result<ScenarioConfig, VerifyError> {
    match path {
        Some(p) => ScenarioConfig::load(p),
        None => Ok(ScenarioConfig::default()),
    }
}

fn configure_threads() -> Result<(), VerifyError> {
    let Ok(raw) = std::env::var("MAXLIP_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| VerifyError::Config(format!("MAXLIP_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| VerifyError::Config(e.to_string()))
}

fn create(path: &Path) -> Result<BufWriter<File>, VerifyError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| VerifyError::Io(format!("cannot write {}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<bool, VerifyError> {
    configure_threads()?;
    match cli.command {
        Command::Verify {
            scenario,
            config,
            format,
            out,
        } => {
            let cfg = load(config.as_deref())?;
            if let Some(out) = &out {
                // Fail on an unwritable destination before doing the work.
                drop(create(out)?);
            }
            let report = run_scenario(&cfg, scenario)?;
            match &out {
                Some(path) => {
                    let mut w = create(path)?;
                    emit(&report, format, &mut w)?;
                    w.flush()?;
                }
                None => emit(&report, format, io::stdout().lock())?,
            }
            let s = report.summary;
            eprintln!(
                "{}: {} checks, {} pass, {} fail, {} monitored",
                report.scenario, s.total, s.pass, s.fail, s.monitored
            );
            Ok(report.passed())
        }
        Command::Compute { op, config, out } => {
            let cfg = load(config.as_deref())?;
            let result = compute(&cfg, op)?;
            let mut w = create(&out)?;
            write_output(&result, &mut w)?;
            w.flush()?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
