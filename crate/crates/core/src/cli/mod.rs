//! Command-line front end.
//!
//! ```text
//! frac-hardy [--N 3 --s 0.5 --theta 0.31831 | --gamma 0.25] [--config run.toml]
//!            [--format csv|json] [--out path] constants|kernel|verify|solve
//! ```
//!
//! Flags override the config file. Exit codes: 0 success, 1 failed
//! verification or numerical failure, 2 usage or configuration error.

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};

pub use commands::{cmd_constants, cmd_kernel, cmd_solve, cmd_verify, Selection};
pub use config::{Format, KernelChoice, RunConfig};
pub use output::Document;

#[derive(Debug, Parser)]
#[command(name = "frac-hardy", version, about = "Fractional Hardy operator toolkit")]
pub struct Cli {
    /// Dimension N.
    #[arg(long = "N", global = true)]
    pub dim: Option<usize>,
    /// Fractional order s ∈ (0, 1).
    #[arg(long, global = true)]
    pub s: Option<f64>,
    /// Hardy coupling θ ∈ [0, Λ_{N,s}).
    #[arg(long, global = true, conflicts_with = "gamma")]
    pub theta: Option<f64>,
    /// Exponent γ ∈ [0, (N−2s)/2), an alternative to θ.
    #[arg(long, global = true)]
    pub gamma: Option<f64>,
    /// TOML configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Λ_{N,s}, c_{N,s}, a(N,s) and the γ↔θ table.
    Constants,
    /// Kernel values on point pairs.
    Kernel,
    /// Structural checks; exits 1 if any fails.
    Verify(VerifyArgs),
    /// The Green potential of a density on a point grid.
    Solve(SolveArgs),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Fundamental-solution residual.
    #[arg(long)]
    pub residual: bool,
    /// Hardy ratio and near-optimizer sweep.
    #[arg(long)]
    pub hardy: bool,
    /// δ-identity at θ = 0.
    #[arg(long)]
    pub delta: bool,
    /// Near-origin slope of the surrogate potential.
    #[arg(long)]
    pub slope: bool,
    /// Refinement stability of ∫ψ²|x|^{−2s}.
    #[arg(long)]
    pub integrability: bool,
    /// Multiplies θ inside P for the residual check.
    #[arg(long)]
    pub theta_scale: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long, value_enum)]
    pub kernel: Option<KernelChoice>,
    /// Resolvent parameter for `resolvent-surrogate`.
    #[arg(long)]
    pub alpha: Option<f64>,
}

impl Cli {
    /// The config file (or defaults) with the flags applied on top.
    pub fn resolve_config(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(n) = self.dim {
            cfg.params.dim = n;
        }
        if let Some(s) = self.s {
            cfg.params.s = s;
        }
        if let Some(t) = self.theta {
            cfg.params.theta = Some(t);
            cfg.params.gamma = None;
        }
        if let Some(g) = self.gamma {
            cfg.params.gamma = Some(g);
            cfg.params.theta = None;
        }
        if let Some(f) = self.format {
            cfg.output.format = Some(f);
        }
        if let Some(o) = &self.out {
            cfg.output.path = Some(o.display().to_string());
        }
        match &self.command {
            Command::Verify(v) => {
                if let Some(t) = v.theta_scale {
                    cfg.verify.theta_scale = t;
                }
            }
            Command::Solve(a) => {
                if let Some(k) = a.kernel {
                    cfg.solve.kernel = k;
                }
                if let Some(al) = a.alpha {
                    cfg.solve.alpha = al;
                }
            }
            _ => {}
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn execute(&self, cfg: &RunConfig) -> Result<Document> {
        match &self.command {
            Command::Constants => cmd_constants(cfg),
            Command::Kernel => cmd_kernel(cfg),
            Command::Verify(v) => {
                let any = v.residual || v.hardy || v.delta || v.slope || v.integrability;
                let sel = if any {
                    Selection {
                        residual: v.residual,
                        hardy: v.hardy,
                        delta: v.delta,
                        slope: v.slope,
                        integrability: v.integrability,
                    }
                } else {
                    Selection::ALL
                };
                cmd_verify(cfg, sel)
            }
            Command::Solve(_) => cmd_solve(cfg),
        }
    }
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Domain(_)
        | Error::Dimension { .. }
        | Error::Origin
        | Error::Pole(_)
        | Error::Mode(_)
        | Error::InsufficientGrid(_)
        | Error::Unsupported(_) => 2,
        _ => 1,
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let outcome = cli.resolve_config().and_then(|cfg| {
        let doc = cli.execute(&cfg)?;
        let format = cfg.output.format.unwrap_or(Format::Csv);
        doc.write(format, cfg.output.path.as_deref().map(std::path::Path::new))?;
        Ok(doc)
    });
    match outcome {
        Ok(doc) if doc.passed == Some(false) => 1,
        Ok(_) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}
