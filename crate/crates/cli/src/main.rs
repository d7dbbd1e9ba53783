use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use localfield_cli::config::MediumKind;
use localfield_cli::{
    cmd_check, cmd_eval, cmd_figures, cmd_rmin, cmd_sweep, CliError, CommandOutput, FigurePreset, OutputFormat,
    RawOptions, RunConfig, EXIT_USAGE,
};

/// Local-field corrected spontaneous decay in absorbing dielectrics.
#[derive(Debug, Parser)]
#[command(name = "localfield", version)]
struct Cli {
    #[command(flatten)]
    opts: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalOpts {
    /// Damping of the Lorentz medium; a comma-separated list for `rmin`
    #[arg(long, global = true, value_delimiter = ',')]
    gamma: Option<Vec<f64>>,
    /// Oscillator strength f [default: 0.46]
    #[arg(long, global = true)]
    coupling: Option<f64>,
    /// Resonance frequency [default: 1]
    #[arg(long = "omega-t", global = true)]
    omega_t: Option<f64>,
    /// Dimensionless cavity parameter r = lambda_T / R
    #[arg(long, global = true)]
    r: Option<f64>,
    /// Cavity radius in units of c / omega_T
    #[arg(long, global = true)]
    rbar: Option<f64>,
    /// Transition frequency (eval)
    #[arg(long, global = true)]
    omega: Option<f64>,
    #[arg(long = "omega-min", global = true)]
    omega_min: Option<f64>,
    #[arg(long = "omega-max", global = true)]
    omega_max: Option<f64>,
    #[arg(long = "omega-steps", global = true)]
    omega_steps: Option<usize>,
    /// Lattice structure constant s [default: 0]
    #[arg(long = "structure-constant", global = true)]
    structure_constant: Option<f64>,
    /// lorentz | table
    #[arg(long, global = true)]
    medium: Option<MediumKind>,
    /// Three columns: omega, eps_re, eps_im
    #[arg(long = "table-file", global = true)]
    table_file: Option<PathBuf>,
    /// csv | json [default: csv]
    #[arg(long, global = true)]
    format: Option<OutputFormat>,
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Exit with status 2 when the consistency condition is violated
    #[arg(long, global = true)]
    strict: bool,
    /// Relative tolerance of the r_min bisection [default: 1e-6]
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Use the lowest table sample as the static permittivity
    #[arg(long = "static-from-lowest", global = true)]
    static_from_lowest: bool,
    /// key=value file with the same keys as the long flags
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Rates at a single transition frequency
    Eval,
    /// Rates over a frequency grid
    Sweep,
    /// Critical inverse cavity size for each damping value
    Rmin,
    /// Commutator consistency and Kramers-Kronig residual
    Check,
    /// Write figure data files
    Figures {
        /// fig1 | fig2 | fig3 | fig4 | all
        #[arg(long, default_value = "all")]
        preset: String,
        #[arg(long, default_value = ".")]
        outdir: PathBuf,
    },
}

impl GlobalOpts {
    fn raw(&self) -> RawOptions {
        RawOptions {
            medium: self.medium,
            table_file: self.table_file.clone(),
            gamma: self.gamma.clone(),
            coupling: self.coupling,
            omega_t: self.omega_t,
            r: self.r,
            rbar: self.rbar,
            omega: self.omega,
            omega_min: self.omega_min,
            omega_max: self.omega_max,
            omega_steps: self.omega_steps,
            structure_constant: self.structure_constant,
            format: self.format,
            output: self.output.clone(),
            strict: self.strict.then_some(true),
            tol: self.tol,
            threads: self.threads,
            static_from_lowest: self.static_from_lowest.then_some(true),
        }
    }
}

fn emit(out: &CommandOutput, target: Option<&PathBuf>) -> Result<(), CliError> {
    for w in &out.warnings {
        eprintln!("warning: {w}");
    }
    match target {
        Some(path) => std::fs::write(path, &out.text)
            .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(out.text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::usage(format!("cannot write output: {e}")))
        }
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let file = match &cli.opts.config {
        Some(path) => RawOptions::from_config_file(path)?,
        None => RawOptions::default(),
    };
    let cfg = RunConfig::resolve(cli.opts.raw().layered_over(file))?;
    let out = match &cli.command {
        Command::Eval => cmd_eval(&cfg)?,
        Command::Sweep => cmd_sweep(&cfg)?,
        Command::Rmin => cmd_rmin(&cfg)?,
        Command::Check => cmd_check(&cfg)?,
        Command::Figures { preset, outdir } => {
            let presets = FigurePreset::parse(preset)?;
            for path in cmd_figures(&presets, outdir, cfg.threads)? {
                eprintln!("wrote {}", path.display());
            }
            return Ok(0);
        }
    };
    emit(&out, cfg.output.as_ref())?;
    Ok(out.exit_code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
