//! Monte Carlo experiment harness: the (κ, n, run) convergence sweep, its
//! summary statistics, the sub-sample fitting experiment, and the CSV/SVG
//! emitters behind the command-line front end.
//!
//! The sweep is embarrassingly parallel; every task derives its own seed
//! from (master seed, κ index, size index, run index) and the records are
//! merged in canonical order, so output is byte-identical across runs and
//! parallelism levels.

use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::dist::{self, CoupledParams};
use crate::error::{Error, Result};
use crate::estimators::{
    estimator_metrics, generalized_mean_scale, geometric_mean_scale, EstimatorMethod,
};
use crate::fitting::{fit_kappa_sigma, SearchConfig};
use crate::seed::derive_seed;
use crate::special::Coupling;

/// Shipped experiment profiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Sample sizes up to 1e5, 20 runs: finishes in seconds.
    Desk,
    /// Sample sizes up to 1e6, 50 runs: the full-scale experiment.
    Paper,
}

/// Configuration of a convergence sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceConfig {
    pub kappas: Vec<f64>,
    pub sigma_source: f64,
    pub mu_source: f64,
    pub sample_sizes: Vec<usize>,
    pub runs: usize,
    pub estimator: EstimatorMethod,
    pub master_seed: u64,
}

impl ConvergenceConfig {
    pub fn preset(which: Preset) -> Self {
        let (sizes, runs): (Vec<usize>, usize) = match which {
            Preset::Desk => (vec![10, 100, 1_000, 10_000, 100_000], 20),
            Preset::Paper => (vec![10, 100, 1_000, 10_000, 100_000, 1_000_000], 50),
        };
        ConvergenceConfig {
            kappas: vec![0.1, 0.5, 1.0, 2.0, 10.0],
            sigma_source: 10.0,
            mu_source: 0.0,
            sample_sizes: sizes,
            runs,
            estimator: EstimatorMethod::GeometricMean,
            master_seed: 42,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.kappas.is_empty() || self.kappas.iter().any(|k| k.is_nan() || *k <= 0.0) {
            return Err(Error::domain("convergence kappas must all be > 0"));
        }
        if self.runs < 1 {
            return Err(Error::domain("runs must be >= 1"));
        }
        if self.sample_sizes.is_empty() || self.sample_sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::domain("sample sizes must be strictly increasing"));
        }
        if !self.sigma_source.is_finite() || self.sigma_source <= 0.0 {
            return Err(Error::domain("sigma_source must be > 0"));
        }
        if !self.mu_source.is_finite() {
            return Err(Error::domain("mu_source must be finite"));
        }
        Ok(())
    }

    /// Parse the flat `key = value` configuration format. Unset keys keep
    /// the desk-preset defaults; `#` starts a comment.
    pub fn from_key_values(text: &str) -> Result<Self> {
        let mut cfg = ConvergenceConfig::preset(Preset::Desk);
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::domain(format!("config line {}: expected key = value", lineno + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| {
                Error::domain(format!("config line {}: bad {what}: {value}", lineno + 1))
            };
            match key {
                "kappas" => {
                    cfg.kappas = value
                        .split(',')
                        .map(|t| t.trim().parse::<f64>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|_| bad("kappa list"))?;
                }
                "sigma_source" => cfg.sigma_source = value.parse().map_err(|_| bad("number"))?,
                "mu_source" => cfg.mu_source = value.parse().map_err(|_| bad("number"))?,
                "sample_sizes" => {
                    cfg.sample_sizes = value
                        .split(',')
                        .map(|t| t.trim().parse::<usize>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|_| bad("size list"))?;
                }
                "runs" => cfg.runs = value.parse().map_err(|_| bad("count"))?,
                "estimator" => cfg.estimator = value.parse()?,
                "master_seed" => cfg.master_seed = value.parse().map_err(|_| bad("seed"))?,
                other => {
                    return Err(Error::domain(format!(
                        "config line {}: unknown key '{other}'",
                        lineno + 1
                    )))
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// One (κ, n, run) cell of a sweep. `estimate` is `None` when the run
/// failed (degenerate draw or non-finite estimate); such rows carry the
/// failure flag in the CSV instead of a value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRecord {
    pub kappa: f64,
    pub n: usize,
    pub run_index: usize,
    pub estimator: EstimatorMethod,
    pub estimate: Option<f64>,
}

/// Run the full sweep. Seeds depend only on (master seed, κ index, size
/// index, run index), so adding runs or sizes never disturbs existing
/// records. Per-record failures are captured, never fatal.
pub fn run_convergence(config: &ConvergenceConfig) -> Result<Vec<ConvergenceRecord>> {
    config.validate()?;
    let mut tasks = Vec::new();
    for (ki, &kappa) in config.kappas.iter().enumerate() {
        for (ni, &n) in config.sample_sizes.iter().enumerate() {
            for run in 0..config.runs {
                tasks.push((ki, kappa, ni, n, run));
            }
        }
    }
    let records: Vec<ConvergenceRecord> = tasks
        .par_iter()
        .map(|&(ki, kappa, ni, n, run)| {
            let seed = derive_seed(
                config.master_seed,
                &[ki as u64, ni as u64, run as u64],
            );
            let estimate = run_one(config, kappa, n, seed).ok().filter(|v| v.is_finite());
            ConvergenceRecord {
                kappa,
                n,
                run_index: run,
                estimator: config.estimator,
                estimate,
            }
        })
        .collect();
    Ok(records)
}

fn run_one(config: &ConvergenceConfig, kappa: f64, n: usize, seed: u64) -> Result<f64> {
    let params = CoupledParams::new(config.mu_source, config.sigma_source, kappa, 2.0)?;
    let samples = dist::sample(&params, n, seed)?;
    let coupling = Coupling::new(kappa)?;
    let est = match config.estimator {
        EstimatorMethod::GeometricMean => geometric_mean_scale(&samples, coupling)?,
        EstimatorMethod::GeneralizedMean => generalized_mean_scale(&samples, coupling)?,
    };
    Ok(est.value)
}

/// Aggregate statistics of one (κ, n) group. Groups with a single valid
/// record are flagged by omitting the spread columns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryRow {
    pub kappa: f64,
    pub n: usize,
    pub mean: f64,
    pub std: Option<f64>,
    pub bias: f64,
    pub variance: Option<f64>,
    pub mse: Option<f64>,
}

/// Group records by (κ, n) in first-appearance order and compute mean,
/// population standard deviation, bias against `true_sigma`, variance and
/// MSE. Failed records are excluded; groups with no valid record are
/// dropped.
pub fn summarize(records: &[ConvergenceRecord], true_sigma: f64) -> Vec<SummaryRow> {
    let mut order: Vec<(f64, usize)> = Vec::new();
    for r in records {
        if !order.iter().any(|&(k, n)| k == r.kappa && n == r.n) {
            order.push((r.kappa, r.n));
        }
    }
    let mut rows = Vec::new();
    for (kappa, n) in order {
        let values: Vec<f64> = records
            .iter()
            .filter(|r| r.kappa == kappa && r.n == n)
            .filter_map(|r| r.estimate)
            .collect();
        if values.is_empty() {
            continue;
        }
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        if values.len() < 2 {
            rows.push(SummaryRow {
                kappa,
                n,
                mean,
                std: None,
                bias: mean - true_sigma,
                variance: None,
                mse: None,
            });
            continue;
        }
        let m = estimator_metrics(&values, true_sigma).expect("len >= 2");
        rows.push(SummaryRow {
            kappa,
            n,
            mean,
            std: Some(m.variance.sqrt()),
            bias: m.bias,
            variance: Some(m.variance),
            mse: Some(m.mse),
        });
    }
    rows
}

/// One row of the sub-sample fitting experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitRow {
    pub n: usize,
    pub kappa_hat: Option<f64>,
    pub sigma_hat: Option<f64>,
    pub p_value: Option<f64>,
    pub converged: bool,
}

/// Draw one master sample of `n_total` from the source and fit the (κ, σ)
/// pair on each prefix sub-sample. Fit failures are recorded per row.
pub fn run_fit_experiment(
    source: &CoupledParams,
    n_total: usize,
    subsample_sizes: &[usize],
    seed: u64,
    search: &SearchConfig,
) -> Result<Vec<FitRow>> {
    if subsample_sizes.iter().any(|&m| m == 0 || m > n_total) {
        return Err(Error::domain(
            "subsample sizes must lie in 1..=n_total",
        ));
    }
    let master = dist::sample(source, n_total, derive_seed(seed, &[0]))?;
    let mut rows = Vec::new();
    for &m in subsample_sizes {
        let sub = master.prefix(m)?;
        let mut cfg = search.clone();
        cfg.master_seed = derive_seed(seed, &[1, m as u64]);
        match fit_kappa_sigma(&sub, &cfg) {
            Ok(fit) => rows.push(FitRow {
                n: m,
                kappa_hat: Some(fit.kappa_hat),
                sigma_hat: Some(fit.sigma_hat),
                p_value: Some(fit.best.p_value),
                converged: fit.converged,
            }),
            Err(_) => rows.push(FitRow {
                n: m,
                kappa_hat: None,
                sigma_hat: None,
                p_value: None,
                converged: false,
            }),
        }
    }
    Ok(rows)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// CSV of raw convergence records: `kappa,n,run,estimator,estimate,failed`.
pub fn convergence_csv(records: &[ConvergenceRecord]) -> String {
    let mut out = String::from("kappa,n,run,estimator,estimate,failed\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.kappa,
            r.n,
            r.run_index,
            r.estimator,
            opt(r.estimate),
            r.estimate.is_none()
        ));
    }
    out
}

/// CSV of summary rows: `kappa,n,mean,std,bias,variance,mse`.
pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from("kappa,n,mean,std,bias,variance,mse\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.kappa,
            r.n,
            r.mean,
            opt(r.std),
            r.bias,
            opt(r.variance),
            opt(r.mse)
        ));
    }
    out
}

/// CSV of fit-experiment rows: `n,kappa_hat,sigma_hat,p_value,converged`.
pub fn fit_csv(rows: &[FitRow]) -> String {
    let mut out = String::from("n,kappa_hat,sigma_hat,p_value,converged\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.n,
            opt(r.kappa_hat),
            opt(r.sigma_hat),
            opt(r.p_value),
            r.converged
        ));
    }
    out
}

/// Write text to a file, surfacing I/O failures with the path attached.
pub fn write_text(path: &Path, content: &str) -> Result<()> {
    fs::write(path, content).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Axis convention of the convergence plots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisMode {
    /// Log-log when any plotted κ exceeds 1, linear-log otherwise.
    Auto,
    /// Linear estimate axis over log sample-size axis.
    LinearLog,
    /// Log estimate axis over log sample-size axis.
    LogLog,
}

impl std::str::FromStr for AxisMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(AxisMode::Auto),
            "linlog" => Ok(AxisMode::LinearLog),
            "loglog" => Ok(AxisMode::LogLog),
            other => Err(Error::domain(format!(
                "unknown axis mode '{other}' (expected auto, linlog or loglog)"
            ))),
        }
    }
}

const SVG_PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

/// Render summary rows as a static scatter-plus-errorbar SVG (one series
/// per κ, sample size on a log axis). Byte-identical for identical input.
pub fn render_svg(rows: &[SummaryRow], mode: AxisMode) -> String {
    let (w, h) = (720.0, 480.0);
    let (ml, mr, mt, mb) = (78.0, 150.0, 24.0, 58.0);
    let (pw, ph) = (w - ml - mr, h - mt - mb);

    let mut kappas: Vec<f64> = Vec::new();
    for r in rows {
        if !kappas.contains(&r.kappa) {
            kappas.push(r.kappa);
        }
    }
    let log_y = match mode {
        AxisMode::LinearLog => false,
        AxisMode::LogLog => true,
        AxisMode::Auto => kappas.iter().any(|&k| k > 1.0),
    };

    // data ranges: x over n, y over mean ± std (positive values only on a
    // log axis)
    let mut xmin = f64::INFINITY;
    let mut xmax = f64::NEG_INFINITY;
    let mut ymin = f64::INFINITY;
    let mut ymax = f64::NEG_INFINITY;
    for r in rows {
        let x = (r.n as f64).ln();
        xmin = xmin.min(x);
        xmax = xmax.max(x);
        let s = r.std.unwrap_or(0.0);
        let (lo, hi) = (r.mean - s, r.mean + s);
        let lo = if log_y { lo.max(r.mean / 10.0) } else { lo };
        ymin = ymin.min(lo);
        ymax = ymax.max(hi);
    }
    if rows.is_empty() {
        xmin = 1.0f64.ln();
        xmax = 10.0f64.ln();
        ymin = 0.0;
        ymax = 1.0;
    }
    if xmax - xmin < 1e-12 {
        xmin -= 1.0;
        xmax += 1.0;
    }
    let (ymin, ymax) = if log_y {
        let (a, b) = (ymin.max(1e-300).ln(), ymax.max(1e-299).ln());
        if b - a < 1e-12 {
            (a - 1.0, b + 1.0)
        } else {
            (a - 0.05 * (b - a), b + 0.05 * (b - a))
        }
    } else {
        let pad = 0.05 * (ymax - ymin).max(1e-12);
        (ymin - pad, ymax + pad)
    };

    let px = |x: f64| ml + (x - xmin) / (xmax - xmin) * pw;
    let py = |y: f64| {
        let v = if log_y { y.max(1e-300).ln() } else { y };
        mt + ph - (v - ymin) / (ymax - ymin) * ph
    };

    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" \
         viewBox=\"0 0 {w} {h}\">\n"
    ));
    s.push_str(&format!(
        "<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n"
    ));
    s.push_str(&format!(
        "<rect x=\"{ml}\" y=\"{mt}\" width=\"{pw}\" height=\"{ph}\" fill=\"none\" \
         stroke=\"#333333\" stroke-width=\"1\"/>\n"
    ));

    // x ticks at powers of ten
    let dec_lo = (xmin / std::f64::consts::LN_10).ceil() as i32;
    let dec_hi = (xmax / std::f64::consts::LN_10).floor() as i32;
    for d in dec_lo..=dec_hi {
        let x = px(f64::from(d) * std::f64::consts::LN_10);
        s.push_str(&format!(
            "<line x1=\"{x:.2}\" y1=\"{:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"#333333\"/>\n",
            mt + ph,
            mt + ph + 5.0
        ));
        s.push_str(&format!(
            "<text x=\"{x:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"middle\" \
             font-family=\"sans-serif\">1e{d}</text>\n",
            mt + ph + 20.0
        ));
    }
    // y ticks: 5 evenly spaced in the plotted coordinate
    for i in 0..=4 {
        let v = ymin + (ymax - ymin) * f64::from(i) / 4.0;
        let y = mt + ph - (v - ymin) / (ymax - ymin) * ph;
        let label = if log_y { v.exp() } else { v };
        s.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{ml:.2}\" y2=\"{y:.2}\" stroke=\"#333333\"/>\n",
            ml - 5.0
        ));
        s.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"end\" \
             font-family=\"sans-serif\">{label:.4}</text>\n",
            ml - 9.0,
            y + 4.0
        ));
    }
    s.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\" \
         font-family=\"sans-serif\">samples per run (n)</text>\n",
        ml + pw / 2.0,
        h - 16.0
    ));
    s.push_str(&format!(
        "<text x=\"18\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\" \
         font-family=\"sans-serif\" transform=\"rotate(-90 18 {:.2})\">scale estimate</text>\n",
        mt + ph / 2.0,
        mt + ph / 2.0
    ));

    for (si, &kappa) in kappas.iter().enumerate() {
        let color = SVG_PALETTE[si % SVG_PALETTE.len()];
        for r in rows.iter().filter(|r| r.kappa == kappa) {
            let x = px((r.n as f64).ln());
            if let Some(sd) = r.std {
                let lo = if log_y {
                    (r.mean - sd).max(r.mean / 10.0)
                } else {
                    r.mean - sd
                };
                let (y1, y2) = (py(r.mean + sd), py(lo));
                s.push_str(&format!(
                    "<line x1=\"{x:.2}\" y1=\"{y1:.2}\" x2=\"{x:.2}\" y2=\"{y2:.2}\" \
                     stroke=\"{color}\" stroke-width=\"1.2\"/>\n"
                ));
                for y in [y1, y2] {
                    s.push_str(&format!(
                        "<line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" \
                         stroke=\"{color}\" stroke-width=\"1.2\"/>\n",
                        x - 4.0,
                        x + 4.0
                    ));
                }
            }
            s.push_str(&format!(
                "<circle cx=\"{x:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{color}\"/>\n",
                py(r.mean)
            ));
        }
        let ly = mt + 14.0 + 18.0 * si as f64;
        s.push_str(&format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{color}\"/>\n",
            ml + pw + 16.0,
            ly - 4.0
        ));
        s.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{ly:.2}\" font-size=\"12\" \
             font-family=\"sans-serif\">kappa = {kappa}</text>\n",
            ml + pw + 26.0
        ));
    }
    s.push_str("</svg>\n");
    s
}

/// Write records as CSV to a path.
pub fn emit_convergence_csv(records: &[ConvergenceRecord], path: &Path) -> Result<()> {
    write_text(path, &convergence_csv(records))
}

/// Write summary rows as CSV to a path.
pub fn emit_summary_csv(rows: &[SummaryRow], path: &Path) -> Result<()> {
    write_text(path, &summary_csv(rows))
}

/// Write fit rows as CSV to a path.
pub fn emit_fit_csv(rows: &[FitRow], path: &Path) -> Result<()> {
    write_text(path, &fit_csv(rows))
}

/// Write an SVG rendering of summary rows to a path.
pub fn emit_svg(rows: &[SummaryRow], mode: AxisMode, path: &Path) -> Result<()> {
    write_text(path, &render_svg(rows, mode))
}
