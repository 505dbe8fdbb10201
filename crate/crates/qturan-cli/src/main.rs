//! Grid scanner and reporter for the q-exponential Turan inequalities.
//!
//! One binary covers the whole certified surface: rectangular (q, n, z)
//! verdict scans for both remainder kinds, sharpness probes of the z -> 0
//! limit, and the classical exponential-remainder check. Records go to CSV
//! (stdout or --out); the outcome summary goes to stderr; the exit code tells
//! scripts what happened:
//!
//!   0  every point certified          64  usage error
//!   1  some point violated            74  I/O error
//!   2  none violated, some indeterminate

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use qturan::{
    emit_csv, emit_sharpness, exit_code, scan, scan_alzer, scan_serial, write_csv, AlzerSpec,
    GridSpec, RemainderKind, ScanRecord, ScanSummary,
};

const EX_USAGE: u8 = 64;
const EX_IOERR: u8 = 74;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum KindArg {
    #[value(name = "I", alias = "i")]
    I,
    #[value(name = "E", alias = "e")]
    E,
}

impl From<KindArg> for RemainderKind {
    fn from(k: KindArg) -> RemainderKind {
        match k {
            KindArg::I => RemainderKind::TailI,
            KindArg::E => RemainderKind::TailJ,
        }
    }
}

/// Certify the two-sided Turan bounds for the q-exponential remainders over
/// a (q, n, z) grid and report one CSV record per point.
#[derive(Debug, Parser)]
#[command(name = "qturan", version, disable_help_subcommand = true)]
struct Args {
    /// Remainder kind: I (e-remainders, 0 < z < 1) or E (E-remainders, z > 0)
    #[arg(long, value_enum, default_value = "I")]
    kind: KindArg,

    /// Smallest q on the grid (also the probe q in --sharpness mode)
    #[arg(long)]
    q_min: Option<f64>,
    /// Largest q on the grid
    #[arg(long)]
    q_max: Option<f64>,
    /// Number of q grid points
    #[arg(long)]
    q_steps: Option<u32>,

    /// Smallest n (also the probe n in --sharpness mode)
    #[arg(long)]
    n_min: Option<u32>,
    /// Largest n
    #[arg(long)]
    n_max: Option<u32>,

    /// Smallest z (x in --alzer mode)
    #[arg(long)]
    z_min: Option<f64>,
    /// Largest z (x in --alzer mode)
    #[arg(long)]
    z_max: Option<f64>,
    /// Number of z grid points
    #[arg(long)]
    z_steps: Option<u32>,

    /// Geometric z spacing (default for kind E)
    #[arg(long)]
    log_z: bool,

    /// Evaluation tolerance forwarded to the verdicts
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,

    /// Write CSV here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,

    /// Probe the z -> 0 sharpness limit at one (q, n) instead of scanning:
    /// z runs down a geometric sequence from --z-max to --z-min
    #[arg(long)]
    sharpness: bool,

    /// Classical mode: verify the exponential-remainder inequality over an
    /// x grid (taken from the --z flags) instead of a q-grid
    #[arg(long)]
    alzer: bool,

    /// Evaluate grid points on one thread (same records, same bytes)
    #[arg(long)]
    serial: bool,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            // clap prints help/version through the error path with status 0
            if e.use_stderr() {
                let _ = e.print();
                return ExitCode::from(EX_USAGE);
            }
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match run(&args) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("qturan: {msg}");
            ExitCode::from(EX_USAGE)
        }
        Err(CliError::Io(msg)) => {
            eprintln!("qturan: {msg}");
            ExitCode::from(EX_IOERR)
        }
    }
}

enum CliError {
    Usage(String),
    Io(String),
}

impl From<qturan::Error> for CliError {
    fn from(e: qturan::Error) -> CliError {
        match e {
            qturan::Error::Io(m) => CliError::Io(m),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> CliError {
        CliError::Io(e.to_string())
    }
}

fn run(args: &Args) -> Result<ExitCode, CliError> {
    if args.sharpness && args.alzer {
        return Err(CliError::Usage("--sharpness and --alzer are mutually exclusive".into()));
    }
    if args.sharpness {
        return run_sharpness(args);
    }
    if args.alzer {
        return run_alzer(args);
    }
    run_scan(args)
}

fn grid_spec(args: &Args) -> GridSpec {
    let kind: RemainderKind = args.kind.into();
    let mut spec = GridSpec::default_for(kind);
    spec.tol = args.tol;
    if let Some(v) = args.q_min {
        spec.q_min = v;
    }
    if let Some(v) = args.q_max {
        spec.q_max = v;
    }
    if let Some(v) = args.q_steps {
        spec.q_steps = v;
    }
    if let Some(v) = args.n_min {
        spec.n_min = v;
    }
    if let Some(v) = args.n_max {
        spec.n_max = v;
    }
    if let Some(v) = args.z_min {
        spec.z_min = v;
    }
    if let Some(v) = args.z_max {
        spec.z_max = v;
    }
    if let Some(v) = args.z_steps {
        spec.z_steps = v;
    }
    if args.log_z {
        spec.log_z = true;
    }
    spec
}

fn emit_records(args: &Args, records: &[ScanRecord], summary: &ScanSummary) -> Result<ExitCode, CliError> {
    match &args.out {
        Some(path) => emit_csv(records, path)?,
        None => {
            let stdout = std::io::stdout();
            write_csv(records, stdout.lock())?;
        }
    }
    eprintln!("{summary}");
    let code = exit_code(summary);
    Ok(ExitCode::from(code as u8))
}

fn run_scan(args: &Args) -> Result<ExitCode, CliError> {
    let spec = grid_spec(args);
    let (records, summary) = if args.serial { scan_serial(&spec) } else { scan(&spec) }?;
    emit_records(args, &records, &summary)
}

fn run_alzer(args: &Args) -> Result<ExitCode, CliError> {
    let mut spec = AlzerSpec::default_grid();
    if let Some(v) = args.z_min {
        spec.x_min = v;
    }
    if let Some(v) = args.z_max {
        spec.x_max = v;
    }
    if let Some(v) = args.z_steps {
        spec.x_steps = v;
    }
    if let Some(v) = args.n_min {
        spec.n_min = v;
    }
    if let Some(v) = args.n_max {
        spec.n_max = v;
    }
    let (records, summary) = scan_alzer(&spec)?;
    emit_records(args, &records, &summary)
}

fn run_sharpness(args: &Args) -> Result<ExitCode, CliError> {
    let kind: RemainderKind = args.kind.into();
    let q = args.q_min.unwrap_or(0.5);
    let n = args.n_min.unwrap_or(1);
    let z_max = args.z_max.unwrap_or(1e-2);
    let z_min = args.z_min.unwrap_or(1e-6);
    let steps = args.z_steps.unwrap_or(3);
    if !(z_min > 0.0 && z_min < z_max) {
        return Err(CliError::Usage(format!("bad sharpness z range {z_min}..{z_max}")));
    }
    if steps < 1 {
        return Err(CliError::Usage("z_steps must be >= 1".into()));
    }
    // descending geometric sequence from z_max to z_min
    let zs: Vec<f64> = if steps == 1 {
        vec![z_max]
    } else {
        (0..steps)
            .map(|i| z_max * (z_min / z_max).powf(i as f64 / (steps - 1) as f64))
            .collect()
    };
    match &args.out {
        Some(path) => emit_sharpness(kind, q, n, &zs, path)?,
        None => {
            let pts = qturan::sharpness_probe(kind, q, n, &zs)?;
            let stdout = std::io::stdout();
            let mut w = stdout.lock();
            writeln!(w, "z,ratio,best_constant,deviation")?;
            for p in &pts {
                writeln!(
                    w,
                    "{:.16e},{:.16e},{:.16e},{:.16e}",
                    p.z, p.ratio, p.best_constant, p.deviation
                )?;
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
