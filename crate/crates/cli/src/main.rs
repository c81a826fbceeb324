use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use qshutter_cli::commands::Command;
use qshutter_cli::config::{Provenance, RunConfig};
use qshutter_cli::output::{emit_csv, provenance};

const EXIT_VALIDATION: u8 = 2;
const EXIT_CONVERGENCE: u8 = 3;
const EXIT_IO: u8 = 4;

/// Transient tunneling of a suddenly released plane wave through a
/// rectangular barrier.
///
/// Settings come from the --config file (an INI-style file, or a CSV written
/// by an earlier run), then from --set, then from the named flags. A CSV
/// given to --config also supplies the subcommand when none is named.
#[derive(Debug, Parser)]
#[command(name = "qshutter", version, about, long_about = None)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,

    /// Configuration file, or a CSV from a previous run.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Output CSV path (`-` for standard output).
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<String>,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Relative truncation tolerance of the resonance sum.
    #[arg(long, global = true, allow_hyphen_values = true)]
    tol: Option<String>,

    /// Barrier height (eV).
    #[arg(long = "V", global = true, value_name = "EV", allow_hyphen_values = true)]
    v: Option<String>,

    /// Incidence energy (eV).
    #[arg(long = "E", global = true, value_name = "EV", allow_hyphen_values = true)]
    e: Option<String>,

    /// Barrier width (nm).
    #[arg(long = "L", global = true, value_name = "NM", allow_hyphen_values = true)]
    l: Option<String>,

    /// Effective mass in units of the electron mass.
    #[arg(long, global = true, allow_hyphen_values = true)]
    mass: Option<String>,

    /// Any configuration key, as section.key=value. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl ToString) -> Self {
        Self {
            code,
            message: message.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("qshutter: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::new(EXIT_VALIDATION, "--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::new(EXIT_VALIDATION, e))?;
    }

    let mut file_text = None;
    let mut overrides = Vec::new();
    let mut recorded_command = None;
    if let Some(path) = &cli.config {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::new(EXIT_IO, format!("cannot read {}: {e}", path.display())))?;
        let first = text.lines().next().unwrap_or("");
        if Provenance::is_provenance(first) {
            let p = Provenance::parse(first);
            recorded_command = p.command;
            overrides = p.entries;
        } else {
            file_text = Some(text);
        }
    }
    for item in &cli.set {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Failure::new(EXIT_VALIDATION, format!("--set expects section.key=value, got `{item}`")))?;
        overrides.push((k.trim().to_string(), v.to_string()));
    }
    let flags = [
        ("system.V_eV", &cli.v),
        ("system.E_eV", &cli.e),
        ("system.L_nm", &cli.l),
        ("system.mass_ratio", &cli.mass),
        ("numerics.tol", &cli.tol),
        ("output.path", &cli.out),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            overrides.push((key.to_string(), v.clone()));
        }
    }

    let command = match (cli.command, recorded_command) {
        (Some(c), _) => c,
        (None, Some(name)) => Command::from_name(&name)
            .ok_or_else(|| Failure::new(EXIT_VALIDATION, format!("unknown command `{name}` in provenance")))?,
        (None, None) => return Err(Failure::new(EXIT_VALIDATION, "no subcommand given (see --help)")),
    };
    let cfg = RunConfig::build(file_text.as_deref(), &overrides).map_err(|e| Failure::new(EXIT_VALIDATION, e))?;

    let table = command.run(&cfg).map_err(|e| {
        let code = if e.is_convergence() { EXIT_CONVERGENCE } else { EXIT_VALIDATION };
        Failure::new(code, e)
    })?;
    for note in &table.notes {
        eprintln!("{note}");
    }
    emit_csv(&table, &cfg.output, &provenance(command.name(), &cfg)).map_err(|e| match e {
        qshutter_cli::output::OutputError::Io { .. } => Failure::new(EXIT_IO, e),
        other => Failure::new(EXIT_VALIDATION, other),
    })
}
