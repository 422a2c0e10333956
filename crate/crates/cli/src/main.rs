use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qbm_teleport_core::check::run_checks;
use qbm_teleport_core::sweep::{coefficient_table, phase_opt_table};
use qbm_teleport_core::{parse_config, run_sweep, Error, SweepConfig, Table};

/// Teleportation fidelity, resource entanglement and non-Markovianity
/// through a quantum Brownian motion channel.
#[derive(Debug, Parser)]
#[command(name = "qbm-teleport", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Channel coefficients gamma, delta, pi, Gamma and the W entries versus tau.
    Coeffs(Options),
    /// Optimal and fixed-phase fidelity, log-negativity and N_p versus tau.
    Sweep(Options),
    /// Analytic versus numerically optimised squeezing phase.
    PhaseOpt(Options),
    /// Cross-form and oracle consistency checks.
    Check(Options),
}

#[derive(Debug, Args)]
struct Options {
    /// Flat key=value configuration file.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Write CSV here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Cutoff-to-system frequency ratio.
    #[arg(long)]
    x: Option<f64>,
    /// Spectral density exponent.
    #[arg(long)]
    s: Option<f64>,
    /// Bath temperature in units of the cutoff.
    #[arg(long)]
    theta: Option<f64>,
    /// System-bath coupling.
    #[arg(long)]
    alpha: Option<f64>,
    /// Squeezing amplitude of the resource.
    #[arg(long)]
    r: Option<f64>,
    /// Fixed squeezing phase.
    #[arg(long, allow_negative_numbers = true)]
    phi: Option<f64>,
    /// Squared beam-splitter transmissivity.
    #[arg(long)]
    transmissivity_sq: Option<f64>,
    /// Classical-channel gain (default 1/T).
    #[arg(long)]
    gain: Option<f64>,
    /// End of the tau sweep.
    #[arg(long)]
    tau_max: Option<f64>,
    /// Number of sweep rows.
    #[arg(long)]
    n_points: Option<usize>,
    /// Number of coefficient-grid nodes.
    #[arg(long)]
    grid_n: Option<usize>,
    /// Intermediate-map increment.
    #[arg(long)]
    eps: Option<f64>,
    /// Frequency truncation of the bath kernels.
    #[arg(long)]
    omega_max: Option<f64>,
    /// Absolute tolerance of the kernel quadrature.
    #[arg(long)]
    quad_tol: Option<f64>,
    /// Comma-separated column subset.
    #[arg(long)]
    outputs: Option<String>,
}

impl Options {
    fn overrides(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        let mut push = |key: &str, value: Option<String>| {
            if let Some(v) = value {
                out.push((key.to_string(), v));
            }
        };
        let num = |v: Option<f64>| v.map(|v| v.to_string());
        push("x", num(self.x));
        push("s", num(self.s));
        push("theta", num(self.theta));
        push("alpha", num(self.alpha));
        push("r", num(self.r));
        push("phi", num(self.phi));
        push("transmissivity_sq", num(self.transmissivity_sq));
        push("gain", num(self.gain));
        push("tau_max", num(self.tau_max));
        push("n_points", self.n_points.map(|v| v.to_string()));
        push("grid_n", self.grid_n.map(|v| v.to_string()));
        push("eps", num(self.eps));
        push("omega_max", num(self.omega_max));
        push("quad_tol", num(self.quad_tol));
        push("outputs", self.outputs.clone());
        push("out", self.out.as_ref().map(|p| p.display().to_string()));
        out
    }

    fn resolve(&self) -> Result<SweepConfig, Error> {
        let text = match &self.config {
            Some(path) => std::fs::read_to_string(path)?,
            None => String::new(),
        };
        parse_config(&text, &self.overrides())
    }
}

fn sink(cfg: &SweepConfig) -> Result<Box<dyn Write>, Error> {
    Ok(match &cfg.out_path {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit(cfg: &SweepConfig, table: &Table) -> Result<(), Error> {
    let mut w = sink(cfg)?;
    table.write_csv(&mut w)?;
    w.flush()?;
    Ok(())
}

fn run(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::Coeffs(opts) => {
            let cfg = opts.resolve()?;
            emit(&cfg, &coefficient_table(&cfg)?)?;
        }
        Command::Sweep(opts) => {
            let cfg = opts.resolve()?;
            emit(&cfg, &run_sweep(&cfg)?)?;
        }
        Command::PhaseOpt(opts) => {
            let cfg = opts.resolve()?;
            emit(&cfg, &phase_opt_table(&cfg)?)?;
        }
        Command::Check(opts) => {
            let cfg = opts.resolve()?;
            let outcomes = run_checks(&cfg)?;
            let mut w = sink(&cfg)?;
            for o in &outcomes {
                writeln!(w, "{o}")?;
            }
            w.flush()?;
            if outcomes.iter().any(|o| !o.passed) {
                return Ok(ExitCode::from(2));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(1);
        }
        Err(e) => e.exit(),
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
