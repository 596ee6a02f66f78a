//! `dualavg` — dual-averaging optimization benchmarks on random
//! time-varying networks.
//!
//! Subcommands: `run` (execute an experiment config or preset), `certify`
//! (estimate a network's contraction factor and the largest usable step),
//! `ratefit` (fit an empirical decay exponent to a trace), and `presets`
//! (list or emit built-in configs).
//!
//! Exit codes: 0 on success, 2 for configuration errors, 3 for numerical
//! failures (aborted runs, infeasible certification, unusable traces).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use dualavg_cli::config::{ExperimentConfig, OUT_DIR_ENV};
use dualavg_cli::error::{CliError, Result};
use dualavg_cli::{presets, ratefit, runner};
use dualavg_core::network::{
    beta_estimate, certify_stepsize_dda, write_matrix_csv, NetworkConfig, DEFAULT_BETA_SAMPLES,
};

#[derive(Parser)]
#[command(
    name = "dualavg",
    version,
    about = "Dual-averaging optimization benchmarks on random time-varying networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a JSON config file or a built-in preset.
    Run(RunArgs),
    /// Estimate a network's contraction factor and certify a step size.
    Certify(CertifyArgs),
    /// Fit a log-log decay slope to a running-minimum trace column.
    Ratefit(RatefitArgs),
    /// List built-in presets, or emit one as a JSON config.
    Presets(PresetsArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Path to a JSON experiment config.
    #[arg(long, value_name = "FILE", conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    /// Name of a built-in preset (see `dualavg presets`).
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
    /// Output directory (overrides the config and the environment).
    #[arg(long, value_name = "DIR")]
    output_dir: Option<PathBuf>,
    /// Permit presets that need minutes of CPU time.
    #[arg(long)]
    allow_large: bool,
}

#[derive(Args)]
struct CertifyArgs {
    /// Gradient smoothness constant of the objective.
    #[arg(long)]
    lipschitz: f64,
    /// Inline network model JSON, e.g.
    /// '{"type":"bernoulli","n":10,"p":0.1,"seed":7}'.
    #[arg(
        long,
        value_name = "JSON",
        conflicts_with = "network_file",
        required_unless_present = "network_file"
    )]
    network: Option<String>,
    /// Path to a network model JSON file.
    #[arg(long, value_name = "FILE")]
    network_file: Option<PathBuf>,
    /// Monte Carlo samples for the contraction estimate.
    #[arg(long, default_value_t = DEFAULT_BETA_SAMPLES)]
    samples: usize,
    /// Also write one sampled mixing matrix to this CSV file.
    #[arg(long, value_name = "FILE")]
    dump_matrix: Option<PathBuf>,
    /// Print the result as JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct RatefitArgs {
    /// Trace or aggregate CSV produced by `dualavg run`.
    #[arg(long, value_name = "FILE")]
    trace: PathBuf,
    /// Column to fit (default: the first running-minimum column present).
    #[arg(long, value_name = "NAME")]
    column: Option<String>,
    /// Print the result as JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct PresetsArgs {
    /// Emit the named preset as a JSON config instead of listing.
    #[arg(long, value_name = "NAME")]
    emit: Option<String>,
}

fn main() -> ExitCode {
    // Die quietly when the reader of a pipe goes away (`dualavg ... | head`)
    // instead of panicking mid-print; artifacts are written before any
    // summary printing, so nothing is lost.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Certify(args) => cmd_certify(args),
        Command::Ratefit(args) => cmd_ratefit(args),
        Command::Presets(args) => cmd_presets(args),
    }
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let config = match (&args.config, &args.preset) {
        (Some(path), None) => ExperimentConfig::from_path(path)?,
        (None, Some(name)) => {
            let info = presets::info(name)?;
            if info.large && !args.allow_large {
                return Err(CliError::Config(format!(
                    "preset {name} runs at full scale ({}); pass --allow-large to confirm",
                    info.summary
                )));
            }
            presets::build(name)?
        }
        _ => unreachable!("clap enforces exactly one source"),
    };
    config.validate()?;
    let dir = config.resolve_output_dir(args.output_dir.as_deref());

    let artifacts = runner::execute(&config)?;
    let files = runner::write_artifacts(&config, &artifacts, &dir)?;

    println!(
        "{}: {} ({} seed(s) x {} round(s), {:.2}s)",
        config.name,
        config.algorithm.kind.name(),
        config.seeds.len(),
        config.algorithm.rounds,
        artifacts.wall_seconds
    );
    if let (Some(a), Some(source)) = (artifacts.setup.a, artifacts.setup.a_source) {
        println!("  step a = {a:.6e} ({source})");
    }
    if let Some(eta) = artifacts.setup.eta {
        println!("  step eta = {eta:.6e}");
    }
    if let Some(est) = &artifacts.setup.beta {
        print!("  beta = {:.6}", est.beta);
        if let Some(rho) = artifacts.setup.rho {
            print!(", coupling radius = {rho:.6}");
        }
        println!();
        if let Some(flag) = &est.flagged {
            println!("  warning: {flag}");
        }
    }
    let metric = artifacts.runs[0].report.headline_column();
    for run in &artifacts.runs {
        let last = run
            .report
            .column(metric)
            .and_then(|c| c.last().copied())
            .unwrap_or(f64::NAN);
        let extra = match run.report.aborted() {
            Some(why) => format!("  [aborted: {why}]"),
            None => String::new(),
        };
        println!(
            "  offset {:>3}: final {metric} = {last:.9e}, violations = {}{extra}",
            run.offset,
            run.report.violations().len()
        );
    }
    if let Some(mean) = artifacts.aggregate.mean(metric).and_then(|m| m.last().copied()) {
        let std = artifacts
            .aggregate
            .std(metric)
            .and_then(|s| s.last().copied())
            .unwrap_or(0.0);
        println!("  final {metric} across seeds: mean = {mean:.9e}, std = {std:.3e}");
    }
    println!("  wrote {} file(s) to {}", files.len(), dir.display());

    let aborted = artifacts.aborted_offsets();
    if !aborted.is_empty() {
        return Err(CliError::Numerical(format!(
            "{} run(s) aborted on non-finite values (offsets {:?}); traces kept in {}",
            aborted.len(),
            aborted,
            dir.display()
        )));
    }
    Ok(())
}

fn cmd_certify(args: CertifyArgs) -> Result<()> {
    if !(args.lipschitz.is_finite() && args.lipschitz > 0.0) {
        return Err(CliError::Config(format!(
            "--lipschitz must be positive and finite, got {}",
            args.lipschitz
        )));
    }
    let text = match (&args.network, &args.network_file) {
        (Some(inline), None) => inline.clone(),
        (None, Some(path)) => std::fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("cannot read network file {}: {e}", path.display()))
        })?,
        _ => unreachable!("clap enforces exactly one source"),
    };
    let net: NetworkConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("network parse: {e}")))?;
    let model = net
        .build()
        .map_err(|e| CliError::Config(format!("network: {e}")))?;

    let est = beta_estimate(&model, args.samples, net.seed())?;
    let cert = certify_stepsize_dda(args.lipschitz, est.beta)?;

    if let Some(path) = &args.dump_matrix {
        let mut rng = ChaCha8Rng::seed_from_u64(net.seed());
        let sample = model.sample(&mut rng)?;
        let file = std::fs::File::create(path)?;
        write_matrix_csv(&sample.entries, std::io::BufWriter::new(file))?;
        eprintln!("wrote sampled mixing matrix to {}", path.display());
    }

    if args.json {
        let doc = serde_json::json!({
            "beta": est.beta,
            "beta_half_estimates": [est.half_one, est.half_two],
            "beta_spread": est.spread,
            "beta_samples": est.samples,
            "beta_flagged": est.flagged,
            "certificate": cert,
        });
        println!("{}", serde_json::to_string_pretty(&doc).expect("serializes"));
    } else {
        println!("beta                 = {:.12e}", est.beta);
        println!(
            "beta half estimates  = {:.6e} / {:.6e} (spread {:.3e}, {} samples)",
            est.half_one, est.half_two, est.spread, est.samples
        );
        if let Some(flag) = &est.flagged {
            println!("warning              = {flag}");
        }
        print!("{cert}");
    }

    if !cert.feasible {
        return Err(CliError::Numerical(format!(
            "no usable step size: contraction factor {:.6} is too close to one",
            est.beta
        )));
    }
    Ok(())
}

fn cmd_ratefit(args: RatefitArgs) -> Result<()> {
    let fit = ratefit::fit_from_csv(&args.trace, args.column.as_deref())?;
    if args.json {
        let doc = serde_json::json!({
            "column": fit.column,
            "slope": fit.slope,
            "intercept": fit.intercept,
            "r_squared": fit.r_squared,
            "points": fit.points,
            "window": { "t_first": fit.t_first, "t_last": fit.t_last },
        });
        println!("{}", serde_json::to_string_pretty(&doc).expect("serializes"));
    } else {
        println!("column    = {}", fit.column);
        println!(
            "window    = t in [{}, {}] ({} points, second half of the rounds)",
            fit.t_first, fit.t_last, fit.points
        );
        println!("slope     = {:.6}", fit.slope);
        println!("intercept = {:.6}", fit.intercept);
        println!("r_squared = {:.6}", fit.r_squared);
    }
    Ok(())
}

fn cmd_presets(args: PresetsArgs) -> Result<()> {
    match args.emit {
        Some(name) => {
            let config = presets::build(&name)?;
            println!("{}", config.to_json_pretty());
        }
        None => {
            println!("built-in presets (run with `dualavg run --preset <NAME>`):");
            for p in presets::list() {
                let gate = if p.large { "  [needs --allow-large]" } else { "" };
                println!("  {:<14} {}{gate}", p.name, p.summary);
            }
            println!();
            println!(
                "output directory: --output-dir, then ${OUT_DIR_ENV}/<name>, then the \
                 config's output_dir, then runs/<name>"
            );
        }
    }
    Ok(())
}
