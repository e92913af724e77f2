//! Command-line front end: loads a TOML config with `--set` overrides,
//! runs the requested study, and writes one CSV/JSON report per table.
//!
//! Exit codes: 0 all checks pass, 2 some check failed, 1 usage or
//! runtime error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod config;
mod report;
mod runner;

use config::RunConfig;
use report::{emit_reports, Format};
use runner::{CollideArgs, Ctx};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("no report tables were produced")]
    NoReports,
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Core(#[from] gapflow::Error),
}

#[derive(Parser)]
#[command(name = "gapflow", version, about = "Thin-gap flux and norm checks")]
struct Cli {
    /// TOML config file; defaults apply when omitted
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Override a config value, e.g. --set sweep.cases=10
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Report directory (overrides output.directory)
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Report format (overrides output.formats)
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Worker threads; reports are identical for any value
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check closed-form boundary fluxes against quadrature
    VerifyIdentities,
    /// Check weak exponent tables and pivot-scale slopes
    VerifyWeak,
    /// Check strong bound forms and their gap scaling
    VerifyStrong,
    /// Compare fluid-restricted and full cylinder gradient integrals
    LemmaCyl,
    /// Fit pivot-scale power laws for the weak bounds
    Scaling {
        /// Restrict to one cap exponent
        #[arg(long)]
        alpha: Option<f64>,
        /// Restrict to one component: u3, utau, omtau, om3
        #[arg(long)]
        component: Option<String>,
    },
    /// Sweep the squeeze/spin field and fit its gradient-norm scaling
    Example4,
    /// Classify a power-law contact trajectory
    Collide {
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        theta: f64,
        /// Contact time
        #[arg(long = "T", default_value_t = 1.0)]
        big_t: f64,
        #[arg(long, default_value_t = 1.0)]
        omega3: f64,
        /// Trajectory sample count
        #[arg(long, default_value_t = 64)]
        grid: usize,
    },
    /// Run every study
    All,
}

fn run_cli(cli: Cli) -> Result<bool, CliError> {
    let cfg = RunConfig::load(cli.config.as_deref(), &cli.set)?;
    let jobs = cli.jobs.unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|n| n.get().min(8))
            .unwrap_or(1)
    });
    let ctx = Ctx { cfg, jobs };

    let tables = match &cli.cmd {
        Cmd::VerifyIdentities => runner::verify_identities(&ctx)?,
        Cmd::VerifyWeak => runner::verify_weak(&ctx)?,
        Cmd::VerifyStrong => runner::verify_strong(&ctx)?,
        Cmd::LemmaCyl => runner::lemma_cyl(&ctx)?,
        Cmd::Scaling { alpha, component } => {
            runner::scaling(&ctx, *alpha, component.as_deref())?
        }
        Cmd::Example4 => runner::example4(&ctx)?,
        Cmd::Collide {
            alpha,
            theta,
            big_t,
            omega3,
            grid,
        } => runner::collide(
            &ctx,
            &CollideArgs {
                alpha: *alpha,
                theta: *theta,
                big_t: *big_t,
                omega3: *omega3,
                grid: *grid,
            },
        )?,
        Cmd::All => runner::all(&ctx)?,
    };

    let dir = cli
        .out
        .unwrap_or_else(|| PathBuf::from(&ctx.cfg.output.directory));
    let formats: Vec<Format> = match cli.format {
        Some(f) => vec![f],
        None => ctx
            .cfg
            .output
            .formats
            .iter()
            .map(|s| match s.as_str() {
                "csv" => Ok(Format::Csv),
                "json" => Ok(Format::Json),
                other => Err(CliError::Config(format!(
                    "output.formats entry '{other}' (expected csv or json)"
                ))),
            })
            .collect::<Result<_, _>>()?,
    };
    let paths = emit_reports(&tables, &dir, &formats)?;

    let mut all_pass = true;
    for table in &tables {
        let ok = table.all_pass();
        all_pass &= ok;
        println!(
            "{}: {} ({} rows)",
            table.name,
            if ok { "PASS" } else { "FAIL" },
            table.rows.len()
        );
    }
    for path in &paths {
        println!("wrote {}", path.display());
    }
    Ok(all_pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run_cli(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
