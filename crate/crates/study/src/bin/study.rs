use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use lagdeconv::Estimator;
use lagdeconv_study::{emit_outputs, run_study, StudyConfig};

#[derive(Parser)]
#[command(name = "study", about = "Monte Carlo deconvolution study on random aquifers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the ensemble and write figure data.
    Run(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Flat `key = value` file, applied over the preset.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    realizations: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_parser = parse_estimator)]
    estimator: Option<Estimator>,
    #[arg(long)]
    laguerre_terms: Option<usize>,
    #[arg(long = "scale-T", alias = "scale-t")]
    scale_t: Option<f64>,
    #[arg(long)]
    kle_terms: Option<usize>,
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    ny: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    /// Also write SVG plots.
    #[arg(long)]
    plots: bool,
    /// Start from the 500-realization fine-grid preset.
    #[arg(long)]
    paper: bool,
    #[arg(long)]
    out: PathBuf,
}

fn parse_estimator(s: &str) -> Result<Estimator, String> {
    s.parse().map_err(|e: lagdeconv::Error| e.to_string())
}

fn build_config(args: &RunArgs) -> anyhow::Result<StudyConfig> {
    let mut cfg = if args.paper { StudyConfig::full() } else { StudyConfig::desk() };
    if let Some(path) = &args.config {
        cfg.apply_file(path)?;
    }
    macro_rules! set {
        ($($flag:ident => $($field:ident).+),* $(,)?) => {
            $(if let Some(v) = args.$flag { cfg.$($field).+ = v; })*
        };
    }
    set!(
        realizations => realizations,
        seed => base_seed,
        estimator => estimator,
        laguerre_terms => laguerre_terms,
        scale_t => scale_t,
        kle_terms => covariance.n_terms,
        nx => domain.nx,
        ny => domain.ny,
        dt => domain.dt,
        t_end => domain.t_end,
    );
    cfg.plots |= args.plots;
    cfg.output_dir = args.out.clone();
    cfg.validate()?;
    Ok(cfg)
}

fn run(args: &RunArgs) -> anyhow::Result<bool> {
    let cfg = build_config(args)?;
    let out = run_study(&cfg).context("study failed")?;
    emit_outputs(&out, &cfg)?;
    let s = &out.summary;
    for w in &s.warnings {
        eprintln!("warning: {w}");
    }
    for e in &s.exclusions {
        eprintln!("excluded seed {}: {}", e.seed, e.reason);
    }
    println!("realizations: {} ok, {} excluded", s.total, s.excluded);
    if let Some(q) = &s.rel_error_quantiles {
        println!("relative error: median {:.4}, 5%-95% [{:.4}, {:.4}]", q.p50, q.p05, q.p95);
    }
    let b = &s.bifurcation;
    println!(
        "early class: {} (median sign changes {:?}); late class: {} (median {:?})",
        b.early.count, b.early.median_sign_changes, b.late.count, b.late.median_sign_changes
    );
    println!("bound violations: {}", s.bound_violations);
    println!("outputs written to {}", cfg.output_dir.display());
    Ok(s.bound_violations == 0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => match run(&args) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => {
                eprintln!("error: bound violations detected");
                ExitCode::from(2)
            }
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(1)
            }
        },
    }
}
