//! `coupled` — heavy-tailed coupled exponential distributions on the
//! command line: sampling, density/CDF/quantile evaluation, scale
//! estimation, entropies, convergence experiments and (κ, σ) fitting.
//!
//! Exit codes: 0 success, 1 domain error (including bad usage), 2 numeric
//! error, 3 I/O error. `COUPLED_SEED` overrides the default seed of
//! commands that take one.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use coupled_stats::dist::{self, CoupledParams};
use coupled_stats::entropy;
use coupled_stats::error::{Error, Result};
use coupled_stats::estimators::{
    generalized_mean_scale, geometric_mean_scale, EstimatorMethod, SampleSet,
};
use coupled_stats::fitting::{fit_kappa_sigma, PvalueMethod, SearchConfig};
use coupled_stats::harness::{
    self, AxisMode, ConvergenceConfig, Preset,
};
use coupled_stats::special::Coupling;

const SEED_ENV: &str = "COUPLED_SEED";

#[derive(Parser)]
#[command(
    name = "coupled",
    about = "Heavy-tailed coupled exponential distributions: sampling, estimation, fitting",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Distribution parameters shared by several subcommands.
#[derive(Args)]
struct ParamArgs {
    /// Location parameter
    #[arg(long, default_value_t = 0.0)]
    mu: f64,
    /// Scale parameter (> 0)
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Coupling parameter (> -1; heavy tails for kappa > 0)
    #[arg(long)]
    kappa: f64,
    /// Power parameter (0 < alpha <= 3)
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
}

impl ParamArgs {
    fn build(&self) -> Result<CoupledParams> {
        CoupledParams::new(self.mu, self.sigma, self.kappa, self.alpha)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Draw observations and write them as single-column CSV
    Sample {
        #[command(flatten)]
        params: ParamArgs,
        /// Number of observations
        #[arg(long)]
        n: usize,
        /// RNG seed (defaults to $COUPLED_SEED, then 0)
        #[arg(long)]
        seed: Option<u64>,
        /// Output CSV path (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the density at a point
    Pdf {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        x: f64,
    },
    /// Evaluate the cumulative distribution function at a point
    Cdf {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        x: f64,
    },
    /// Evaluate the quantile function at a probability
    Quantile {
        #[command(flatten)]
        params: ParamArgs,
        /// Probability in (0, 1)
        #[arg(long)]
        p: f64,
    },
    /// Estimate the scale of samples read from CSV (known location)
    Estimate {
        /// Estimator: gmean (geometric) or genmean (generalized)
        #[arg(long)]
        method: String,
        /// Assumed coupling
        #[arg(long)]
        kappa: f64,
        /// Known location of the data
        #[arg(long, default_value_t = 0.0)]
        mu: f64,
        /// Input CSV (single column, optional `x` header)
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Entropy report of one distribution
    Entropy {
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Run a convergence experiment and write CSV + SVG into a directory
    Convergence {
        /// Named profile: desk (n up to 1e5, 20 runs) or paper (1e6, 50)
        #[arg(long, conflicts_with = "config")]
        preset: Option<String>,
        /// Key-value config file overriding the desk profile
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory
        #[arg(long = "out-dir")]
        out_dir: PathBuf,
        /// Master seed override (also $COUPLED_SEED)
        #[arg(long)]
        seed: Option<u64>,
        /// Plot axes: auto, linlog or loglog
        #[arg(long, default_value = "auto")]
        axis: String,
    },
    /// Fit (kappa, sigma) to samples read from CSV
    Fit {
        /// Known location of the data
        #[arg(long, default_value_t = 0.0)]
        mu: f64,
        /// Input CSV (single column, optional `x` header)
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 0.02)]
        kappa_min: f64,
        #[arg(long, default_value_t = 20.0)]
        kappa_max: f64,
        /// Number of grid points of the coupling scan
        #[arg(long, default_value_t = 50)]
        grid: usize,
        /// Bootstrap replicates (>= 99)
        #[arg(long, default_value_t = 999)]
        replicates: usize,
        /// Use the asymptotic null distribution instead of the bootstrap
        #[arg(long)]
        asymptotic: bool,
        /// Bootstrap seed (defaults to $COUPLED_SEED, then 0)
        #[arg(long)]
        seed: Option<u64>,
        /// Use only the first N observations
        #[arg(long)]
        max_samples: Option<usize>,
        /// Write the search trace as CSV (kappa,sigma,p_value)
        #[arg(long)]
        trace_out: Option<PathBuf>,
        /// Also fit each comma-separated prefix size and tabulate the
        /// results as CSV (requires --out)
        #[arg(long, value_delimiter = ',')]
        subsamples: Vec<usize>,
        /// Output path of the sub-sample fit table
        #[arg(long, requires = "subsamples")]
        out: Option<PathBuf>,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are successful outputs, not usage errors
            if e.kind() == clap::error::ErrorKind::DisplayHelp
                || e.kind() == clap::error::ErrorKind::DisplayVersion
            {
                print!("{e}");
                std::process::exit(0);
            }
            eprint!("{e}");
            std::process::exit(1);
        }
    };
    match run(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

fn env_seed() -> Option<u64> {
    std::env::var(SEED_ENV).ok().and_then(|s| s.parse().ok())
}

fn read_samples(path: &Path, mu: f64) -> Result<SampleSet> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        match t.parse::<f64>() {
            Ok(v) => values.push(v),
            Err(_) if i == 0 => {} // header row
            Err(_) => {
                return Err(Error::Domain(format!(
                    "{}: line {} is not a number: {t}",
                    path.display(),
                    i + 1
                )))
            }
        }
    }
    SampleSet::new(values, mu)
}

fn samples_csv(values: &[f64]) -> String {
    let mut out = String::from("x\n");
    for v in values {
        out.push_str(&format!("{v}\n"));
    }
    out
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Sample {
            params,
            n,
            seed,
            out,
        } => {
            let p = params.build()?;
            let seed = seed.or_else(env_seed).unwrap_or(0);
            let set = dist::sample(&p, n, seed)?;
            let csv = samples_csv(set.values());
            match out {
                Some(path) => harness::write_text(&path, &csv)?,
                None => print!("{csv}"),
            }
        }
        Command::Pdf { params, x } => {
            println!("{}", dist::pdf(&params.build()?, x)?);
        }
        Command::Cdf { params, x } => {
            println!("{}", dist::cdf(&params.build()?, x)?);
        }
        Command::Quantile { params, p } => {
            println!("{}", dist::quantile(&params.build()?, p)?);
        }
        Command::Estimate {
            method,
            kappa,
            mu,
            input,
        } => {
            let samples = read_samples(&input, mu)?;
            let coupling = Coupling::new(kappa)?;
            let est = match method.parse::<EstimatorMethod>()? {
                EstimatorMethod::GeometricMean => geometric_mean_scale(&samples, coupling)?,
                EstimatorMethod::GeneralizedMean => generalized_mean_scale(&samples, coupling)?,
            };
            println!("{}", est.value);
        }
        Command::Entropy { params } => {
            let p = params.build()?;
            if p.kappa() > 0.0 {
                let r = entropy::tsallis_entropies(&p)?;
                println!("coupled={}", r.coupled);
                println!("tsallis={}", r.tsallis);
                println!("normalized_tsallis={}", r.normalized_tsallis);
                println!("average_density={}", r.average_density);
            } else {
                // at kappa = 0 every member of the chain degenerates to the
                // Shannon entropy
                println!("coupled={}", entropy::coupled_entropy(&p)?);
                println!("average_density={}", entropy::average_density(&p)?);
            }
        }
        Command::Convergence {
            preset,
            config,
            out_dir,
            seed,
            axis,
        } => {
            let mut cfg = match (&preset, &config) {
                (Some(name), None) => match name.as_str() {
                    "desk" => ConvergenceConfig::preset(Preset::Desk),
                    "paper" => ConvergenceConfig::preset(Preset::Paper),
                    other => {
                        return Err(Error::Domain(format!(
                            "unknown preset '{other}' (expected desk or paper)"
                        )))
                    }
                },
                (None, Some(path)) => {
                    let text = fs::read_to_string(path).map_err(|source| Error::Io {
                        path: path.clone(),
                        source,
                    })?;
                    ConvergenceConfig::from_key_values(&text)?
                }
                (None, None) => ConvergenceConfig::preset(Preset::Desk),
                (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
            };
            if let Some(s) = seed.or_else(env_seed) {
                cfg.master_seed = s;
            }
            let mode: AxisMode = axis.parse()?;
            fs::create_dir_all(&out_dir).map_err(|source| Error::Io {
                path: out_dir.clone(),
                source,
            })?;

            let records = harness::run_convergence(&cfg)?;
            let summary = harness::summarize(&records, cfg.sigma_source);
            harness::emit_convergence_csv(&records, &out_dir.join("convergence.csv"))?;
            harness::emit_summary_csv(&summary, &out_dir.join("summary.csv"))?;
            for &kappa in &cfg.kappas {
                let rows: Vec<_> = summary.iter().filter(|r| r.kappa == kappa).copied().collect();
                let path = out_dir.join(format!("convergence_k{kappa}.svg"));
                harness::emit_svg(&rows, mode, &path)?;
            }
            let failed = records.iter().filter(|r| r.estimate.is_none()).count();
            println!(
                "wrote {} records ({failed} failed) and {} summary rows to {}",
                records.len(),
                summary.len(),
                out_dir.display()
            );
        }
        Command::Fit {
            mu,
            input,
            kappa_min,
            kappa_max,
            grid,
            replicates,
            asymptotic,
            seed,
            max_samples,
            trace_out,
            subsamples,
            out,
        } => {
            let samples = read_samples(&input, mu)?;
            let cfg = SearchConfig {
                kappa_min,
                kappa_max,
                grid_points: grid,
                replicates,
                method: if asymptotic {
                    PvalueMethod::Asymptotic
                } else {
                    PvalueMethod::Bootstrap
                },
                master_seed: seed.or_else(env_seed).unwrap_or(0),
                max_samples,
                ..SearchConfig::default()
            };
            if !subsamples.is_empty() {
                let mut rows = Vec::new();
                for &m in &subsamples {
                    if m > samples.len() {
                        return Err(Error::Domain(format!(
                            "subsample size {m} exceeds the {} observations in {}",
                            samples.len(),
                            input.display()
                        )));
                    }
                    let mut sub_cfg = cfg.clone();
                    sub_cfg.master_seed =
                        coupled_stats::seed::derive_seed(cfg.master_seed, &[m as u64]);
                    rows.push(match fit_kappa_sigma(&samples.prefix(m)?, &sub_cfg) {
                        Ok(f) => harness::FitRow {
                            n: m,
                            kappa_hat: Some(f.kappa_hat),
                            sigma_hat: Some(f.sigma_hat),
                            p_value: Some(f.best.p_value),
                            converged: f.converged,
                        },
                        Err(_) => harness::FitRow {
                            n: m,
                            kappa_hat: None,
                            sigma_hat: None,
                            p_value: None,
                            converged: false,
                        },
                    });
                }
                let path = out.ok_or_else(|| {
                    Error::Domain("--subsamples requires --out for the fit table".into())
                })?;
                harness::emit_fit_csv(&rows, &path)?;
                println!("wrote {} fit rows to {}", rows.len(), path.display());
                return Ok(());
            }
            let fit = fit_kappa_sigma(&samples, &cfg)?;
            if let Some(path) = trace_out {
                let mut csv = String::from("kappa,sigma,p_value\n");
                for e in &fit.trace {
                    csv.push_str(&format!("{},{},{}\n", e.kappa, e.sigma, e.p_value));
                }
                harness::write_text(&path, &csv)?;
            }
            println!("kappa_hat={}", fit.kappa_hat);
            println!("sigma_hat={}", fit.sigma_hat);
            println!("statistic={}", fit.best.statistic);
            println!("p_value={}", fit.best.p_value);
            println!("converged={}", fit.converged);
        }
    }
    Ok(())
}
