//! Command-line driver. Exit codes: 0 success, 1 usage or configuration
//! error, 2 I/O or malformed input file, 3 numerical failure.

pub mod commands;
pub mod config;
pub mod io;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use self::config::{parse_pairs, CountOrExact, LearnSection, PlanSection, RunConfig};
use crate::error::{Error, Result};

pub use commands::{cmd_crossval, cmd_gen, cmd_knn, cmd_scatter, cmd_sweep, cmd_train};

#[derive(Debug, Parser)]
#[command(name = "nonmarkov", version, about = "Simulate classical-memory qubit processes and learn their non-Markovianity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a labelled Stokes dataset (CSV plus .meta.json).
    Gen(GenArgs),
    /// Fit a polynomial model on a train split and report metrics.
    Train(LearnArgs),
    /// k-fold cross-validation for one or more degrees.
    Crossval(LearnArgs),
    /// Test metrics as a function of training-set size.
    Sweep(LearnArgs),
    /// Actual-vs-predicted pairs for a saved model, with a best-fit line.
    Scatter(ScatterArgs),
    /// k-nearest-neighbour baseline on a train split.
    Knn(LearnArgs),
}

#[derive(Debug, Args)]
struct GenArgs {
    /// TOML run configuration; flags override it.
    #[arg(long)]
    plan: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
    /// Comma-separated q:R pairs, e.g. "0.8:1,0.9:1.5".
    #[arg(long)]
    pairs: Option<String>,
    #[arg(long)]
    pmfs: Option<usize>,
    /// Pair draws per pmf, or "exact".
    #[arg(long, alias = "samples", value_parser = CountOrExact::parse_flag)]
    samples_per_pmf: Option<CountOrExact>,
    #[arg(long)]
    noise_eps: Option<f64>,
    /// Counts per Stokes measurement, or "exact".
    #[arg(long, value_parser = CountOrExact::parse_flag)]
    shots: Option<CountOrExact>,
    /// Observables at station B: XYZ or IXY.
    #[arg(long)]
    measurements: Option<String>,
    #[arg(long)]
    log_base: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<f64>,
}

#[derive(Debug, Args)]
struct LearnFlags {
    /// TOML run configuration; flags override it.
    #[arg(long)]
    plan: Option<PathBuf>,
    /// Split / fold shuffle seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Polynomial degree(s), comma separated.
    #[arg(long, value_delimiter = ',')]
    degree: Option<Vec<usize>>,
    #[arg(long)]
    kfold: Option<usize>,
    #[arg(long)]
    train_fraction: Option<f64>,
    #[arg(long)]
    ridge: Option<f64>,
    /// Split each (q, R) group separately.
    #[arg(long)]
    stratified: bool,
    #[arg(long)]
    test_size: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    train_sizes: Option<Vec<usize>>,
    /// KNN neighbour count.
    #[arg(long)]
    neighbors: Option<usize>,
}

#[derive(Debug, Args)]
struct LearnArgs {
    /// Dataset CSV.
    data: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    flags: LearnFlags,
}

#[derive(Debug, Args)]
struct ScatterArgs {
    /// Model file written by `train`.
    model: PathBuf,
    /// Dataset CSV.
    data: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Use every row instead of the test split.
    #[arg(long)]
    all_rows: bool,
    #[command(flatten)]
    flags: LearnFlags,
}

/// Process exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) | Error::Parse(_) => 2,
        Error::Numerical(_) | Error::NoConvergence { .. } | Error::InfiniteDivergence(_) => 3,
        Error::Dimension(_)
        | Error::NotHermitian(_)
        | Error::NotUnitary(_)
        | Error::InvalidState(_)
        | Error::InvalidArgument(_) => 1,
    }
}

fn resolve_plan(a: &GenArgs) -> Result<crate::simulate::GenerationPlan> {
    let mut section = RunConfig::load(a.plan.as_deref())?.plan;
    section.overlay(PlanSection {
        pairs: a.pairs.as_deref().map(parse_pairs).transpose()?.map(|v| v.into_iter().map(|(q, r)| [q, r]).collect()),
        pmfs_per_pair: a.pmfs,
        samples_per_pmf: a.samples_per_pmf.clone(),
        seed: a.seed,
        noise_eps: a.noise_eps,
        shots: a.shots.clone(),
        measurements: a.measurements.clone(),
        log_base: a.log_base,
        alpha: a.alpha,
        beta: a.beta,
        gamma: a.gamma,
    });
    section.resolve()
}

fn resolve_learn(f: &LearnFlags, default_degrees: &[usize]) -> Result<config::LearnSettings> {
    let mut section = RunConfig::load(f.plan.as_deref())?.learn;
    section.overlay(LearnSection {
        degree: f.degree.clone(),
        kfold: f.kfold,
        train_fraction: f.train_fraction,
        seed: f.seed,
        ridge: f.ridge,
        stratified: f.stratified.then_some(true),
        test_size: f.test_size,
        train_sizes: f.train_sizes.clone(),
        neighbors: f.neighbors,
    });
    section.resolve(default_degrees)
}

fn dispatch(cmd: Command) -> Result<Vec<PathBuf>> {
    use io::sibling;
    match cmd {
        Command::Gen(a) => {
            let plan = resolve_plan(&a)?;
            cmd_gen(&plan, &a.out)
        }
        Command::Train(a) => {
            let s = resolve_learn(&a.flags, &[2])?;
            let r = cmd_train(&s, &a.data, &a.out)?;
            println!("train r2={:.6} mae={:.6}; test r2={:.6} mae={:.6}", r.train.r_squared, r.train.mae, r.test.r_squared, r.test.mae);
            Ok(vec![a.out.clone(), sibling(&a.out, ".metrics.txt"), sibling(&a.out, ".metrics.json")])
        }
        Command::Crossval(a) => {
            let s = resolve_learn(&a.flags, &[1, 2, 3])?;
            let r = cmd_crossval(&s, &a.data, &a.out)?;
            for c in &r.summary {
                println!("degree {}: r2 {:.4} ± {:.4}, mae {:.4} ± {:.4}", c.degree, c.mean_r_squared, c.std_r_squared, c.mean_mae, c.std_mae);
            }
            Ok(vec![a.out.clone(), sibling(&a.out, ".json")])
        }
        Command::Sweep(a) => {
            let s = resolve_learn(&a.flags, &[2])?;
            cmd_sweep(&s, &a.data, &a.out)?;
            Ok(vec![a.out.clone(), sibling(&a.out, ".json")])
        }
        Command::Scatter(a) => {
            let s = resolve_learn(&a.flags, &[2])?;
            let r = cmd_scatter(&s, &a.model, &a.data, &a.out, a.all_rows)?;
            if r.fit.degenerate {
                eprintln!("nonmarkov: warning: degenerate scatter, slope reported as 0");
            }
            Ok(vec![a.out.clone(), sibling(&a.out, ".fit.txt"), sibling(&a.out, ".fit.json")])
        }
        Command::Knn(a) => {
            let s = resolve_learn(&a.flags, &[2])?;
            let r = cmd_knn(&s, &a.data, &a.out)?;
            println!("knn k={}: test r2={:.6} mae={:.6}", r.neighbors, r.test.r_squared, r.test.mae);
            Ok(vec![a.out.clone(), sibling(&a.out, ".json")])
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(files) => {
            for f in files {
                println!("wrote {}", f.display());
            }
            0
        }
        Err(e) => {
            eprintln!("nonmarkov: error: {e}");
            exit_code(&e)
        }
    }
}
