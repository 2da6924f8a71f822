//! Command-line front end: configuration, dispatch and output.

pub mod commands;
pub mod config;
pub mod output;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::{Format, Geometry, Mode, RunConfig};
pub use output::{Header, ResultTable};

use crate::error::{Error, Result};
use crate::numerics::{BigFloat, PrecisionContext};

#[derive(Debug, Parser)]
#[command(name = "xebstat", version, about = "Fidelity and linear XEB of noisy random circuits via the two-copy statistical model")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Gate invariants, (alpha, beta) and region membership.
    GateInfo(Opts),
    /// Channel summary: r, u, mu, gamma1, gamma2, delta2, epsilon.
    NoiseInfo(Opts),
    /// Observables against depth.
    Evolve(Opts),
    /// Leading transfer eigenvalues with sector labels and couplings.
    Spectrum(Opts),
    /// Critical noise strength along a grid of alpha.
    Critical(Opts),
    /// Small-N brute-force comparison of every engine.
    OracleCheck(Opts),
    /// Decay-rate summary over a grid of eps*N.
    Sweep(Opts),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::GateInfo(_) => "gate-info",
            Command::NoiseInfo(_) => "noise-info",
            Command::Evolve(_) => "evolve",
            Command::Spectrum(_) => "spectrum",
            Command::Critical(_) => "critical",
            Command::OracleCheck(_) => "oracle-check",
            Command::Sweep(_) => "sweep",
        }
    }

    pub fn opts(&self) -> &Opts {
        match self {
            Command::GateInfo(o)
            | Command::NoiseInfo(o)
            | Command::Evolve(o)
            | Command::Spectrum(o)
            | Command::Critical(o)
            | Command::OracleCheck(o)
            | Command::Sweep(o) => o,
        }
    }
}

/// Flags shared by every subcommand; each overrides the config file key
/// of the same name (dashes become underscores).
#[derive(Debug, Default, Args)]
pub struct Opts {
    /// `key = value` configuration file.
    #[arg(long, short = 'c')]
    pub config: Option<PathBuf>,
    /// a2a or 1d.
    #[arg(long)]
    pub geometry: Option<String>,
    #[arg(long, short = 'n')]
    pub sites: Option<String>,
    #[arg(long)]
    pub qudit_dim: Option<String>,
    /// haar, cnot, swap, iswap, cz, fsim:θ:φ, pe:φ, canonical:c1:c2:c3, params:α:β, file:PATH
    #[arg(long)]
    pub gate: Option<String>,
    /// ident, depol:p, dephase:p, ampdamp:η, kraus:PATH
    #[arg(long)]
    pub noise: Option<String>,
    /// Total error per layer; sets γ through ε = εN/N.
    #[arg(long)]
    pub eps_n: Option<String>,
    #[arg(long, short = 'd')]
    pub depth: Option<String>,
    /// Add purity and collision-probability columns (unital noise only).
    #[arg(long)]
    pub two_copy: bool,
    /// Number of eigenvalues to report.
    #[arg(long, short = 'k')]
    pub eigs: Option<String>,
    /// Comma-separated εN values.
    #[arg(long)]
    pub eps_grid: Option<String>,
    /// Comma-separated α values; `a/b` ratios are accepted.
    #[arg(long)]
    pub alphas: Option<String>,
    /// upper, lower or zero (1D critical values).
    #[arg(long)]
    pub line: Option<String>,
    /// analytic or numeric (all-to-all critical values).
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long)]
    pub precision_bits: Option<String>,
    /// Discarded weight per SVD relative to the squared norm.
    #[arg(long)]
    pub trunc: Option<String>,
    #[arg(long)]
    pub bond_cap: Option<String>,
    #[arg(long)]
    pub krylov_dim: Option<String>,
    #[arg(long)]
    pub restarts: Option<String>,
    #[arg(long, short = 'o')]
    pub out: Option<String>,
    /// csv or json.
    #[arg(long)]
    pub format: Option<String>,
    /// Seed of the random-gate sampler in oracle-check.
    #[arg(long)]
    pub seed: Option<String>,
    /// fast (53-bit floats) or accurate.
    #[arg(long)]
    pub mode: Option<String>,
}

impl Opts {
    /// The config file, if any, with the flags applied on top.
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        let flags = [
            ("geometry", &self.geometry),
            ("sites", &self.sites),
            ("qudit_dim", &self.qudit_dim),
            ("gate", &self.gate),
            ("noise", &self.noise),
            ("eps_n", &self.eps_n),
            ("depth", &self.depth),
            ("eigs", &self.eigs),
            ("eps_grid", &self.eps_grid),
            ("alphas", &self.alphas),
            ("line", &self.line),
            ("method", &self.method),
            ("precision_bits", &self.precision_bits),
            ("trunc", &self.trunc),
            ("bond_cap", &self.bond_cap),
            ("krylov_dim", &self.krylov_dim),
            ("restarts", &self.restarts),
            ("out", &self.out),
            ("format", &self.format),
            ("seed", &self.seed),
            ("mode", &self.mode),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                cfg.set(k, v)?;
            }
        }
        if self.two_copy {
            cfg.set("two_copy", "true")?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Result of a subcommand ready for writing, plus whether it represents a
/// failed check.
pub struct Outcome {
    pub table: ResultTable,
    pub header: Header,
    pub failure: Option<Error>,
}

macro_rules! at_precision {
    ($ctx:expr, $f:ident, $cfg:expr) => {
        if $ctx.bits() == PrecisionContext::DOUBLE_BITS {
            commands::$f::<f64>(&$ctx, $cfg)
        } else {
            commands::$f::<BigFloat>(&$ctx, $cfg)
        }
    };
}

/// Runs one subcommand on a resolved configuration.
pub fn execute(command: &str, cfg: &RunConfig) -> Result<Outcome> {
    let ctx = cfg.context()?;
    let header = Header { config_hash: cfg.hash(command), precision_bits: ctx.bits() };
    let mut failure = None;
    let table = match command {
        "gate-info" => at_precision!(ctx, gate_info, cfg)?,
        "noise-info" => at_precision!(ctx, noise_info, cfg)?,
        "evolve" => at_precision!(ctx, cmd_evolve, cfg)?,
        "spectrum" => at_precision!(ctx, cmd_spectrum, cfg)?,
        "critical" => at_precision!(ctx, cmd_critical, cfg)?,
        "sweep" => at_precision!(ctx, cmd_sweep, cfg)?,
        "oracle-check" => {
            let checks = at_precision!(ctx, oracle_checks, cfg)?;
            let failed: Vec<&str> = checks.iter().filter(|c| !c.passed()).map(|c| c.name.as_str()).collect();
            if !failed.is_empty() {
                failure = Some(Error::Numeric(format!("oracle checks failed: {}", failed.join(", "))));
            }
            commands::oracle_table(&checks)
        }
        other => return Err(Error::Parse(format!("unknown subcommand '{other}'"))),
    };
    Ok(Outcome { table, header, failure })
}

/// Default output format: JSON for the single-record info commands.
fn format_for(command: &str, cfg: &RunConfig) -> Format {
    match (cfg.format, command) {
        (Some(f), _) => f,
        (None, "gate-info" | "noise-info") => Format::Json,
        _ => Format::Csv,
    }
}

/// Parses, runs and writes; the returned error carries the exit code.
pub fn run(cli: &Cli) -> Result<()> {
    let name = cli.command.name();
    let cfg = cli.command.opts().resolve()?;
    let outcome = execute(name, &cfg)?;
    let format = format_for(name, &cfg);
    match &cfg.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            outcome.table.write(&mut w, &outcome.header, format)?;
            w.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut w = stdout.lock();
            outcome.table.write(&mut w, &outcome.header, format)?;
            w.flush()?;
        }
    }
    match outcome.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}
