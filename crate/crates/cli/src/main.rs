mod config;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use islocc_core::noise::BellTarget;
use islocc_core::scan::{bell_region, find_threshold, run_sweep};
use islocc_core::verify::{run_all, VerifyOptions};

use config::{Format, Settings};

/// Werner states of spatially indistinguishable qubits under sLOCC.
#[derive(Parser, Debug)]
#[command(name = "islocc", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Concurrence, EoF, detection probability and Bell value over a grid.
    Sweep(GridArgs),
    /// Bell values and violation flags over a grid.
    BellRegion(GridArgs),
    /// Smallest indistinguishability giving a Bell violation at every noise level.
    Threshold(ThresholdArgs),
    /// Check the pipeline against closed forms and cross-implementations.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// Flat `key = value` file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// boson | fermion
    #[arg(long)]
    statistics: Option<String>,
    /// Phase of ψ₂ on R, in radians (`pi`, `pi/2`, `k*pi` accepted).
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<String>,
    /// 1_plus | 1_minus
    #[arg(long)]
    target: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long)]
    output: Option<String>,
    /// csv | json | svg
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args, Debug)]
struct GridArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// l_eq_rprime | l_eq_lprime | free
    #[arg(long)]
    constraint: Option<String>,
    /// Noise grid `start:stop:steps`.
    #[arg(long)]
    p_grid: Option<String>,
    /// Indistinguishability grid (l_eq_rprime only).
    #[arg(long)]
    indist_grid: Option<String>,
    /// Grid over l, the weight of ψ₁ on L.
    #[arg(long)]
    l_grid: Option<String>,
    /// Fixed l' for the `free` constraint.
    #[arg(long)]
    lprime: Option<String>,
}

#[derive(Args, Debug)]
struct ThresholdArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Bisection tolerance on the indistinguishability.
    #[arg(long)]
    tolerance: Option<String>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value_t = VerifyOptions::default().seed)]
    seed: u64,
    /// Random tuples per suite.
    #[arg(long, default_value_t = VerifyOptions::default().samples)]
    samples: usize,
    /// Offset added to every closed-form value (fault injection).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    inject_fault: f64,
}

fn settings(common: &CommonArgs) -> Result<Settings> {
    let mut s = match &common.config {
        Some(path) => Settings::load(path)?,
        None => Settings::default(),
    };
    s.set("statistics", common.statistics.clone());
    s.set("theta", common.theta.clone());
    s.set("target", common.target.clone());
    s.set("output", common.output.clone());
    s.set("format", common.format.clone());
    Ok(s)
}

fn grid_settings(args: &GridArgs) -> Result<Settings> {
    let mut s = settings(&args.common)?;
    s.set("constraint", args.constraint.clone());
    s.set("p_grid", args.p_grid.clone());
    s.set("indist_grid", args.indist_grid.clone());
    s.set("l_grid", args.l_grid.clone());
    s.set("lprime", args.lprime.clone());
    Ok(s)
}

fn emit(settings: &Settings, body: &str) -> Result<()> {
    match settings.output() {
        Some(path) => std::fs::write(&path, body).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn sweep(args: &GridArgs) -> Result<()> {
    let s = grid_settings(args)?;
    let plan = s.sweep_plan()?;
    let records = run_sweep(&plan)?;
    let body = match s.format()? {
        Format::Csv => output::sweep_csv(&records)?,
        Format::Json => output::json(&records.iter().map(output::rounded).collect::<Vec<_>>())?,
        Format::Svg => output::sweep_svg(&records),
    };
    emit(&s, &body)
}

fn bell(args: &GridArgs) -> Result<()> {
    let s = grid_settings(args)?;
    let plan = s.sweep_plan()?;
    let rows = bell_region(&plan)?;
    let body = match s.format()? {
        Format::Csv => output::bell_csv(&rows)?,
        Format::Json => output::json(&rows.iter().map(output::rounded_bell).collect::<Vec<_>>())?,
        Format::Svg => output::bell_svg(&rows),
    };
    emit(&s, &body)
}

fn threshold(args: &ThresholdArgs) -> Result<()> {
    let mut s = settings(&args.common)?;
    s.set("tolerance", args.tolerance.clone());
    let cfg = s.threshold()?;
    let format = s.format()?;
    if format == Format::Svg {
        bail!("threshold output is csv or json");
    }
    let result = find_threshold(&cfg)?;
    // the 1_minus family is expected to have a threshold, so its absence is a configuration problem
    if result.is_none() && cfg.target == BellTarget::OneMinus {
        bail!("no indistinguishability gives a violation at every noise level for this configuration");
    }
    let body = match format {
        Format::Json => output::json(&result)?,
        _ => output::threshold_csv(result.as_ref())?,
    };
    emit(&s, &body)
}

fn verify(args: &VerifyArgs) -> Result<bool> {
    let opts = VerifyOptions { seed: args.seed, samples: args.samples, oracle_offset: args.inject_fault };
    let reports = run_all(&opts)?;
    let mut ok = true;
    for r in &reports {
        let status = if r.passed() { "PASS" } else { "FAIL" };
        ok &= r.passed();
        println!(
            "{status} {:<20} checks={:<5} failures={:<5} max_error={:.3e} tol={:.0e}",
            r.name, r.checks, r.failures, r.max_error, r.tolerance
        );
    }
    println!("{}", if ok { "all suites passed" } else { "verification FAILED" });
    Ok(ok)
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("ISLOCC_THREADS") else { return Ok(()) };
    let n: usize = raw.trim().parse().with_context(|| format!("ISLOCC_THREADS=`{raw}` is not a count"))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    let outcome = match &cli.command {
        Command::Sweep(a) => sweep(a),
        Command::BellRegion(a) => bell(a),
        Command::Threshold(a) => threshold(a),
        Command::Verify(a) => {
            return match verify(a) {
                Ok(true) => ExitCode::SUCCESS,
                Ok(false) => ExitCode::from(1),
                Err(e) => {
                    eprintln!("error: {e:#}");
                    ExitCode::from(1)
                }
            }
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
