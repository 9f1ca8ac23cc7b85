use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

mod commands;
mod config;
mod plot;

use config::{Format, JobConfig};

/// Failures with a stable exit code.
#[derive(Debug, Error)]
pub enum Failure {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("not reversible: {0}")]
    NotReversible(String),
    #[error("degenerate equilibrium: det of the Jacobian at the origin is 0")]
    Degenerate,
    #[error("verification failed: {}", .0.join("; "))]
    Verification(Vec<String>),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Parse(_) | Failure::Config(_) => 2,
            Failure::NotReversible(_) => 3,
            Failure::Degenerate => 4,
            Failure::Verification(_) => 5,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "revham", version, about = "Hamiltonian normal forms of planar reversible vector fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check reversibility and classify the equilibrium at the origin.
    Check(JobArgs),
    /// Compute g, G, F, H and the conjugacy h̄.
    Normalform(JobArgs),
    /// Certify the conjugacy symbolically and numerically.
    Verify(JobArgs),
    /// Write level sets of H and paired trajectories as CSV.
    Plotdata(JobArgs),
    /// Majorant bounds and radius estimates.
    Diagnose(JobArgs),
}

#[derive(Args, Debug, Clone)]
pub struct JobArgs {
    /// TOML or JSON job file.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// First component of the field.
    #[arg(long, short = 'P', allow_hyphen_values = true)]
    p: Option<String>,
    /// Second component of the field.
    #[arg(long, short = 'Q', allow_hyphen_values = true)]
    q: Option<String>,
    /// Variable names, e.g. `x,y`.
    #[arg(long, value_delimiter = ',')]
    vars: Option<Vec<String>>,
    /// Truncation order.
    #[arg(long, short = 'N')]
    order: Option<usize>,
    /// Distance of the initial points from the origin.
    #[arg(long)]
    amplitude: Option<f64>,
    /// RK4 step.
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    horizon: Option<f64>,
    /// Output file (JSON) or directory (plot data).
    #[arg(long, short)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Reject terms above the truncation order instead of dropping them.
    #[arg(long)]
    strict_degree: bool,
    /// Add 1/1000 to one coefficient of h̄ before verifying: `x:i:j` or `y:i:j`.
    #[arg(long, hide = true)]
    perturb_hbar: Option<String>,
}

impl JobArgs {
    fn resolve(&self) -> anyhow::Result<JobConfig> {
        let mut cfg = match &self.config {
            Some(path) => JobConfig::load(path)?,
            None => JobConfig::default(),
        };
        if let Some(p) = &self.p {
            cfg.p = Some(p.clone());
            cfg.p_terms = None;
        }
        if let Some(q) = &self.q {
            cfg.q = Some(q.clone());
            cfg.q_terms = None;
        }
        if let Some(v) = &self.vars {
            let [a, b] = v.as_slice() else {
                anyhow::bail!(Failure::Config(format!("--vars expects two names, got {}", v.len())));
            };
            cfg.variables = (a.clone(), b.clone());
        }
        if let Some(n) = self.order {
            cfg.order = n;
        }
        if let Some(a) = self.amplitude {
            cfg.verify.amplitude = a;
        }
        if let Some(dt) = self.dt {
            cfg.verify.dt = dt;
        }
        if let Some(h) = self.horizon {
            cfg.verify.horizon = h;
        }
        if let Some(o) = &self.out {
            cfg.output.path = Some(o.clone());
        }
        if let Some(f) = self.format {
            cfg.output.format = Some(f);
        }
        cfg.strict_degree |= self.strict_degree;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Check(a) => commands::check(&a.resolve()?),
        Command::Normalform(a) => commands::normalform(&a.resolve()?),
        Command::Verify(a) => commands::verify(&a.resolve()?, a.perturb_hbar.as_deref()),
        Command::Plotdata(a) => commands::plotdata(&a.resolve()?),
        Command::Diagnose(a) => commands::diagnose(&a.resolve()?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<Failure>() {
                Some(f) => ExitCode::from(f.code()),
                None => ExitCode::FAILURE,
            }
        }
    }
}
