//! Command-line front end: `simulate`, `fit`, `experiment` and `bounds`.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on runtime errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path as FsPath, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bounds::{
    ar_budget_m_star, ar_lipschitz_sums, gaussian_abs_mgf, mcmc_budget_m, oracle_constant_e,
    exact_predictor_bound, mcmc_predictor_bound, BoundConstants,
};
use crate::error::{Error, Result};
use crate::gibbs_mcmc::{effective_dim, learning_rate, run_chain, ChainConfig};
use crate::harness::config::ExperimentConfig;
use crate::harness::experiment::{quantile_curves, run_experiment};
use crate::harness::output::write_outputs;
use crate::risk::{empirical_risk, exact_risk, excess_risk, RiskOracle};
use crate::stable_domain::{sample_true_theta, PriorKind, PriorSpec};
use crate::timeseries::{simulate_stationary, ArParams, Path};

#[derive(Debug, Parser)]
#[command(name = "gibbs-ar", version, about = "Gibbs aggregation forecasting for AR series")]
struct Cli {
    /// Random seed
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Experiment config file (TOML)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (simulate) or directory (experiment)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate a stationary AR path and write it as CSV
    Simulate(SimulateArgs),
    /// Run one chain on a path and print the averaged estimator
    Fit(FitArgs),
    /// Run the replicated quantile-risk experiment
    Experiment(ExperimentArgs),
    /// Print learning rate, dimension, oracle constant and MCMC budgets
    Bounds(BoundsArgs),
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// AR coefficients; drawn from s_d(delta) when omitted
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    theta: Option<Vec<f64>>,
    #[arg(long, default_value_t = 8)]
    d: usize,
    #[arg(long, default_value_t = 0.75)]
    delta: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Path length
    #[arg(long = "T", default_value_t = 4096)]
    t: usize,
}

#[derive(Debug, Args)]
struct FitArgs {
    /// Path CSV written by `simulate`
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "inverse_square")]
    prior: PriorKind,
    #[arg(long, default_value_t = 1000)]
    nstar: usize,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    /// Learning rate; defaults to sqrt(T) / (4 ln T)
    #[arg(long)]
    eta: Option<f64>,
    /// True coefficients, to report the exact risk
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    true_theta: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    /// Override the number of replicates
    #[arg(long)]
    replicates: Option<usize>,
}

#[derive(Debug, Args)]
struct BoundsArgs {
    #[arg(long = "T")]
    t: f64,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    /// Variance of the process
    #[arg(long, default_value_t = 1.0)]
    gamma0: f64,
    /// Loss Lipschitz constant
    #[arg(long = "K", default_value_t = 1.0)]
    k: f64,
    /// Innovation scale used for the AR Lipschitz sums
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long, default_value_t = 1.0)]
    k_bar: f64,
    #[arg(long, default_value_t = 0.75)]
    delta1: f64,
    /// Overrides A* = sigma K_bar / (1 - delta1)
    #[arg(long)]
    a_star: Option<f64>,
    /// Overrides Ã* = sigma K_bar delta1 / (1 - delta1)^2
    #[arg(long)]
    a_tilde: Option<f64>,
    /// Overrides phi(A*) = E exp(A* |xi|) for Gaussian xi
    #[arg(long)]
    phi: Option<f64>,
    /// Overrides D = E|X_1| = sqrt(2 gamma0 / pi)
    #[arg(long = "D")]
    d_lip: Option<f64>,
    #[arg(long = "C1", default_value_t = 0.0)]
    c1: f64,
    #[arg(long = "C2", default_value_t = 1.0)]
    c2: f64,
    #[arg(long = "C3", default_value_t = 1.0)]
    c3: f64,
    /// A_{eta,T} for the iteration budget M
    #[arg(long = "A", default_value_t = 1.0)]
    a_eta: f64,
}

/// Parses `args` (program name first) and runs the command.
pub fn cli_main<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return code;
        }
    };
    match run(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    let seed = cli.seed;
    match cli.command {
        Command::Simulate(args) => simulate(args, seed.unwrap_or(0), cli.out.as_deref(), out),
        Command::Fit(args) => fit(args, seed.unwrap_or(0), out),
        Command::Experiment(args) => experiment(args, seed, cli.config.as_deref(), cli.out, out),
        Command::Bounds(args) => bounds(args, out),
    }
}

fn io_out(e: std::io::Error) -> Error {
    Error::io("<stdout>", e)
}

fn simulate(args: SimulateArgs, seed: u64, dest: Option<&FsPath>, out: &mut dyn Write) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let theta = match args.theta {
        Some(theta) => theta,
        None => sample_true_theta(args.d, args.delta, &mut rng)?,
    };
    let params = ArParams::stable(theta, args.sigma)?;
    let path = simulate_stationary(&params, args.t, &mut rng)?;
    match dest {
        Some(file) => {
            write_path_csv(&path, file)?;
            let theta: Vec<String> = params.theta().iter().map(|v| format!("{v:.17e}")).collect();
            writeln!(out, "wrote {} points to {}", path.len(), file.display()).map_err(io_out)?;
            writeln!(out, "theta = {}", theta.join(",")).map_err(io_out)?;
        }
        None => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["t", "x"]).map_err(|e| Error::Config(e.to_string()))?;
            for (i, v) in path.values().iter().enumerate() {
                w.write_record([(i + 1).to_string(), format!("{v:.16e}")])
                    .map_err(|e| Error::Config(e.to_string()))?;
            }
            w.flush().map_err(io_out)?;
        }
    }
    Ok(())
}

/// Writes a path as `t,x` CSV.
pub fn write_path_csv(path: &Path, file: &FsPath) -> Result<()> {
    let csv_err = |source| Error::Csv {
        path: file.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_path(file).map_err(csv_err)?;
    w.write_record(["t", "x"]).map_err(csv_err)?;
    for (i, v) in path.values().iter().enumerate() {
        w.write_record([(i + 1).to_string(), format!("{v:.16e}")])
            .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(file, e))
}

/// Reads a `t,x` path CSV.
pub fn read_path_csv(file: &FsPath) -> Result<Path> {
    let csv_err = |source| Error::Csv {
        path: file.to_path_buf(),
        source,
    };
    let mut r = csv::Reader::from_path(file).map_err(csv_err)?;
    let mut values = Vec::new();
    for record in r.records() {
        let record = record.map_err(csv_err)?;
        let raw = record
            .get(1)
            .ok_or_else(|| Error::invalid(format!("{}: missing x column", file.display())))?;
        values.push(
            raw.trim()
                .parse()
                .map_err(|_| Error::invalid(format!("{}: bad value `{raw}`", file.display())))?,
        );
    }
    Path::new(values)
}

fn fit(args: FitArgs, seed: u64, out: &mut dyn Write) -> Result<()> {
    let path = read_path_csv(&args.input)?;
    let t = path.len();
    let prior = PriorSpec::new(args.prior, t, args.gamma)?;
    let eta = match args.eta {
        Some(eta) => eta,
        None => learning_rate(t as f64)?,
    };
    let d_t = prior.d_t;
    let summary = run_chain(&path, &ChainConfig { eta, n_star: args.nstar, prior, seed })?;
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(", ");
    writeln!(out, "T = {t}").map_err(io_out)?;
    writeln!(out, "d_T = {d_t}").map_err(io_out)?;
    writeln!(out, "eta = {eta:.6}").map_err(io_out)?;
    writeln!(out, "n_star = {}", summary.n_star).map_err(io_out)?;
    writeln!(out, "acceptance_rate = {:.6}", summary.acceptance_rate()).map_err(io_out)?;
    writeln!(out, "theta_bar = [{}]", fmt(&summary.theta_bar)).map_err(io_out)?;
    writeln!(out, "empirical_risk = {:.6}", empirical_risk(&summary.theta_bar, &path)?).map_err(io_out)?;
    if let Some(theta) = args.true_theta {
        let oracle = RiskOracle::new(ArParams::stable(theta, args.sigma)?, d_t)?;
        let risk = exact_risk(&summary.theta_bar, &oracle)?;
        writeln!(out, "exact_risk = {risk:.6}").map_err(io_out)?;
        writeln!(out, "excess_risk = {:.6}", excess_risk(risk, args.sigma)).map_err(io_out)?;
    }
    Ok(())
}

fn experiment(
    args: ExperimentArgs,
    seed: Option<u64>,
    config_path: Option<&FsPath>,
    out_dir: Option<PathBuf>,
    out: &mut dyn Write,
) -> Result<()> {
    let mut config = match config_path {
        Some(p) => ExperimentConfig::from_file(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = seed {
        config.master_seed = seed;
    }
    if let Some(dir) = out_dir {
        config.output_dir = dir;
    }
    if let Some(r) = args.replicates {
        config.replicates = r;
    }
    config.validate()?;
    let rows = run_experiment(&config)?;
    let files = write_outputs(&config, &rows, &config.output_dir)?;
    writeln!(out, "{} rows", rows.len()).map_err(io_out)?;
    writeln!(out, "{}-quantile of excess risk:", config.quantile_q).map_err(io_out)?;
    for curve in quantile_curves(&rows, config.quantile_q)? {
        let pts: Vec<String> = curve.points.iter().map(|(t, q)| format!("{t}:{q:.4}")).collect();
        writeln!(out, "  {:<15} n*={:<6} {}", curve.prior.name(), curve.n_star, pts.join(" ")).map_err(io_out)?;
    }
    writeln!(out, "results: {}", files.results.display()).map_err(io_out)?;
    writeln!(out, "quantiles: {}", files.quantiles.display()).map_err(io_out)?;
    writeln!(out, "figure: {}", files.figure.display()).map_err(io_out)?;
    Ok(())
}

fn bounds(args: BoundsArgs, out: &mut dyn Write) -> Result<()> {
    let eta = learning_rate(args.t)?;
    let d_t = effective_dim(args.t.floor() as usize, args.gamma)?;
    let (a_star_ar, a_tilde_ar) = ar_lipschitz_sums(args.sigma, args.k_bar, args.delta1)?;
    let a_star = args.a_star.unwrap_or(a_star_ar);
    let constants = BoundConstants {
        k: args.k,
        a_star,
        a_tilde: args.a_tilde.unwrap_or(a_tilde_ar),
        phi_a: args.phi.unwrap_or_else(|| gaussian_abs_mgf(a_star)),
        d_lip: args
            .d_lip
            .unwrap_or_else(|| (2.0 * args.gamma0 / std::f64::consts::PI).sqrt()),
        c1: args.c1,
        c2: args.c2,
        c3: args.c3,
        gamma0: args.gamma0,
        epsilon: args.epsilon,
    };
    constants.validate()?;
    let e = oracle_constant_e(&constants);
    writeln!(out, "eta_T = {eta:.10}").map_err(io_out)?;
    writeln!(out, "d_T = {d_t}").map_err(io_out)?;
    writeln!(out, "E = {e:.10}").map_err(io_out)?;
    writeln!(out, "exact_remainder = {:.10}", exact_predictor_bound(args.t, args.epsilon, e, 0.0)?).map_err(io_out)?;
    writeln!(out, "mcmc_remainder = {:.10}", mcmc_predictor_bound(args.t, args.epsilon, e, 0.0)?).map_err(io_out)?;
    writeln!(out, "M = {:.10e}", mcmc_budget_m(args.t, args.epsilon, args.a_eta)?).map_err(io_out)?;
    writeln!(out, "M_star = {:.10e}", ar_budget_m_star(args.t, args.epsilon, args.gamma0)?).map_err(io_out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_cli(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("gibbs-ar").chain(args.iter().copied());
        let code = cli_main(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn no_arguments_is_usage_error() {
        let (code, _, err) = run_cli(&[]);
        assert_eq!(code, 1);
        assert!(err.contains("Usage"));
    }

    #[test]
    fn unknown_flag_is_usage_error() {
        let (code, _, _) = run_cli(&["bounds", "--T", "64", "--bogus"]);
        assert_eq!(code, 1);
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_cli(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("experiment"));
    }

    #[test]
    fn bounds_prints_learning_rate() {
        let (code, out, _) = run_cli(&["bounds", "--T", "4096", "--epsilon", "0.1", "--gamma0", "1.3333333333"]);
        assert_eq!(code, 0);
        assert!(out.contains("eta_T = 1.9235933879"), "{out}");
        assert!(out.contains("d_T = 8"));
    }

    #[test]
    fn runtime_error_exits_two() {
        let (code, _, err) = run_cli(&["bounds", "--T", "2"]);
        assert_eq!(code, 2);
        assert!(err.contains("at least 4"));
        let (code, _, _) = run_cli(&["fit", "--input", "/nonexistent/path.csv"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn simulate_then_fit() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("path.csv");
        let f = file.to_str().unwrap();
        let (code, out, _) = run_cli(&["simulate", "--theta", "0.5,-0.2", "--T", "256", "--seed", "3", "--out", f]);
        assert_eq!(code, 0, "{out}");
        assert_eq!(read_path_csv(&file).unwrap().len(), 256);
        let (code, out, err) = run_cli(&[
            "fit", "--input", f, "--nstar", "200", "--seed", "4", "--true-theta", "0.5,-0.2",
        ]);
        assert_eq!(code, 0, "{err}");
        assert!(out.contains("d_T = 5"));
        assert!(out.contains("exact_risk"));
    }
}
