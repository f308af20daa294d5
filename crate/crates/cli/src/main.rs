//! `maxaut`: build two-generator p-groups, verify maximal automorphicity and
//! the invariant tables, sweep parameter ranges and export dessins.
//!
//! Exit codes: 0 pass, 1 verification failure, 2 invalid input, 3 budget.

mod group_file;
mod sweep;
mod verify;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use maxaut_core::autos::{budget_from_env, AutError, CountOptions, BUDGET_ENV};
use maxaut_core::dessin::{combinatorial_map, export_map, DessinError};
use maxaut_core::oracle::{OracleError, DEFAULT_ORACLE_BUDGET};
use maxaut_core::params::{build_presentation, validate_params, Family};
use maxaut_core::pcgroup::check_consistency;

use group_file::GroupFile;
use sweep::{Format, SweepSpec};
use verify::{BudgetExceeded, VerifyOptions, Which};

#[derive(Parser)]
#[command(
    name = "maxaut",
    version,
    about = "Maximally automorphic p-groups and their dessins"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a group from family parameters and write its group file.
    Build(BuildArgs),
    /// Run verification checks on a group file.
    Verify(VerifyArgs),
    /// Tabulate every strict-valid parameter tuple up to a size.
    Sweep(SweepArgs),
    /// Report the dessin type and genus; optionally export the map.
    Dessin(DessinArgs),
}

#[derive(Args)]
struct BuildArgs {
    #[arg(long)]
    family: Family,
    #[arg(long)]
    p: u64,
    #[arg(long)]
    a: u32,
    #[arg(long)]
    b: Option<u32>,
    #[arg(long)]
    c: Option<u32>,
    /// Skip the classification side-conditions (for negative controls).
    #[arg(long)]
    permissive: bool,
    /// Output file; stdout if omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct Budgets {
    /// Largest group order to enumerate [env: MAXAUT_BUDGET, default 3125].
    #[arg(long)]
    budget: Option<usize>,
    /// Largest group order tabulated for the brute-force oracle.
    #[arg(long, default_value_t = DEFAULT_ORACLE_BUDGET)]
    oracle_budget: usize,
    /// Worker threads for pair enumeration (results do not depend on it).
    #[arg(long)]
    jobs: Option<usize>,
}

impl Budgets {
    fn count(&self) -> CountOptions {
        CountOptions {
            budget: self.budget.unwrap_or_else(budget_from_env),
        }
    }
}

#[derive(Args)]
struct VerifyArgs {
    group: PathBuf,
    #[arg(value_enum, default_value = "all")]
    which: Which,
    #[command(flatten)]
    budgets: Budgets,
    /// Include wall-clock seconds in the report payload.
    #[arg(long)]
    timings: bool,
}

#[derive(Args)]
struct SweepArgs {
    /// Primes to sweep.
    #[arg(long, value_delimiter = ',', required = true)]
    p: Vec<u64>,
    /// Largest exponent n with |G| = p^n.
    #[arg(long)]
    max_n: u32,
    /// Families to include [default: the class-three families].
    #[arg(long, value_delimiter = ',')]
    families: Vec<Family>,
    #[arg(long, value_enum, default_value = "jsonl")]
    format: Format,
    #[command(flatten)]
    budgets: Budgets,
}

#[derive(Args)]
struct DessinArgs {
    group: PathBuf,
    /// Write the rotation permutations as JSON to this file.
    #[arg(long)]
    emit_map: Option<PathBuf>,
    /// Write the underlying bipartite graph as DOT to this file.
    #[arg(long)]
    dot: Option<PathBuf>,
    #[arg(long)]
    budget: Option<usize>,
}

/// Whether every check passed.
type Outcome = bool;

fn write_output(path: Option<&PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn cmd_build(args: BuildArgs) -> Result<Outcome> {
    let params = validate_params(
        args.family,
        args.p,
        args.a,
        args.b,
        args.c,
        !args.permissive,
    )?;
    let mut presentation = build_presentation(&params);
    let report = check_consistency(&mut presentation);
    let file = GroupFile {
        params,
        presentation,
        consistent: report.consistent,
    };
    write_output(args.output.as_ref(), &file.to_json())?;
    if let Some(witness) = report.witness {
        eprintln!("inconsistent: {}", serde_json::to_string(&witness)?);
    }
    Ok(report.consistent)
}

fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .context("building worker pool")?
            .install(f),
        None => f(),
    }
}

fn cmd_verify(args: VerifyArgs) -> Result<Outcome> {
    let group = group_file::load(&args.group)?;
    let opts = VerifyOptions {
        count: args.budgets.count(),
        oracle_budget: args.budgets.oracle_budget,
        timings: args.timings,
    };
    let report = with_jobs(args.budgets.jobs, || {
        verify::verify(&group, args.which, &opts)
    })?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(report.passed)
}

fn cmd_sweep(args: SweepArgs) -> Result<Outcome> {
    let families = if args.families.is_empty() {
        Family::CLASS_THREE.to_vec()
    } else {
        args.families
    };
    let spec = SweepSpec {
        primes: args.p,
        max_n: args.max_n,
        families,
        count: args.budgets.count(),
        format: args.format,
    };
    with_jobs(args.budgets.jobs, || sweep::sweep(&spec, &mut io::stdout()))?;
    Ok(true)
}

fn cmd_dessin(args: DessinArgs) -> Result<Outcome> {
    let group = group_file::load(&args.group)?;
    if !group.consistent {
        eprintln!("presentation is inconsistent");
        return Ok(false);
    }
    let budget = args.budget.unwrap_or_else(budget_from_env);
    let (map, report) = combinatorial_map(&group.pres, budget)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    if let Some(path) = &args.emit_map {
        write_output(Some(path), &(export_map(&map, "json")? + "\n"))?;
    }
    if let Some(path) = &args.dot {
        write_output(Some(path), &export_map(&map, "dot")?)?;
    }
    Ok(true)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    let budget = err.downcast_ref::<BudgetExceeded>().is_some()
        || matches!(
            err.downcast_ref(),
            Some(AutError::ResourceBudgetExceeded { .. })
        )
        || matches!(
            err.downcast_ref(),
            Some(DessinError::ResourceBudgetExceeded { .. })
        )
        || matches!(
            err.downcast_ref(),
            Some(OracleError::ResourceBudgetExceeded { .. })
        );
    if budget {
        3
    } else {
        2
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Build(args) => cmd_build(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Dessin(args) => cmd_dessin(args),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            let code = exit_code(&err);
            if code == 3 {
                eprintln!("error: {err:#} (raise with --budget or {BUDGET_ENV})");
            } else {
                eprintln!("error: {err:#}");
            }
            ExitCode::from(code)
        }
    }
}
