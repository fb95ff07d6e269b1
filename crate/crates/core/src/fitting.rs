//! Cramér–von Mises goodness of fit and the one-dimensional (σ, κ) search.
//!
//! The geometric-mean statistic G of the data ties the scale to each
//! candidate coupling through σ(κ) = prefactor(κ)·G, so selecting a
//! best-fit member reduces to a one-dimensional search over κ: a log-spaced
//! grid scan followed by golden-section refinement, scored by the CVM
//! p-value.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;

use crate::dist::{cdf, CoupledParams};
use crate::error::{Error, Result};
use crate::estimators::{geometric_mean, geometric_prefactor, SampleSet};
use crate::quad;
use crate::seed::derive_seed;
use crate::special::Coupling;

/// How a CVM p-value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PvalueMethod {
    /// Parametric bootstrap: replicate statistics drawn under the candidate
    /// model, p = (1 + #{W²_rep ≥ W²_obs})/(replicates + 1).
    Bootstrap,
    /// Limiting null distribution of W² (a Bessel-K series).
    Asymptotic,
}

/// Result of a CVM test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CvmResult {
    pub statistic: f64,
    pub p_value: f64,
    pub n: usize,
    pub method: PvalueMethod,
}

/// One evaluated candidate of the fit search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry {
    pub kappa: f64,
    pub sigma: f64,
    /// NaN when the candidate could not be scored; such candidates are
    /// recorded but never selected.
    pub p_value: f64,
}

/// Outcome of `fit_kappa_sigma`.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub kappa_hat: f64,
    pub sigma_hat: f64,
    pub best: CvmResult,
    /// Every candidate in evaluation order: grid first, then refinement.
    pub trace: Vec<TraceEntry>,
    /// False when even the best candidate's p-value fell below the floor.
    pub converged: bool,
}

/// Search configuration. The κ range and resolution are implementation
/// choices, so everything is exposed.
#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub kappa_min: f64,
    pub kappa_max: f64,
    pub grid_points: usize,
    pub replicates: usize,
    pub method: PvalueMethod,
    /// Below this best p-value the fit reports `converged = false`.
    pub p_floor: f64,
    pub master_seed: u64,
    /// Optional cap on the number of leading observations used.
    pub max_samples: Option<usize>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            kappa_min: 0.02,
            kappa_max: 20.0,
            grid_points: 50,
            replicates: 999,
            method: PvalueMethod::Bootstrap,
            p_floor: 1e-4,
            master_seed: 0,
            max_samples: None,
        }
    }
}

/// W² = 1/(12n) + Σ((2i-1)/(2n) - F(x_(i)))² with x_(i) the sorted sample
/// and F the model CDF.
pub fn cvm_statistic(samples: &SampleSet, params: &CoupledParams) -> Result<f64> {
    let mut sorted = samples.values().to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite by SampleSet invariant"));
    cvm_statistic_sorted(&sorted, params)
}

fn cvm_statistic_sorted(sorted: &[f64], params: &CoupledParams) -> Result<f64> {
    let n = sorted.len() as f64;
    let mut w2 = 1.0 / (12.0 * n);
    for (i, x) in sorted.iter().enumerate() {
        let target = (2.0 * (i as f64 + 1.0) - 1.0) / (2.0 * n);
        let d = target - cdf(params, *x)?;
        w2 += d * d;
    }
    Ok(w2)
}

/// W² of one bootstrap replicate drawn under the model.
///
/// A replicate X₁..Xₙ from the model has F(X_(i)) equal in law to uniform
/// order statistics, so the statistic is generated directly in the
/// probability domain: the order statistics come from normalized
/// exponential spacings (Γᵢ/Γₙ₊₁), an exact draw that needs no sorting and
/// no CDF inversions.
fn replicate_statistic(n: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spacings = Vec::with_capacity(n + 1);
    let mut total = 0.0;
    for _ in 0..=n {
        let e: f64 = rng.sample(Exp1);
        total += e;
        spacings.push(total);
    }
    let nf = n as f64;
    let mut w2 = 1.0 / (12.0 * nf);
    for i in 1..=n {
        let u = spacings[i - 1] / total;
        let d = (2.0 * i as f64 - 1.0) / (2.0 * nf) - u;
        w2 += d * d;
    }
    w2
}

/// CVM test of the samples against the model, with either a parametric
/// bootstrap p-value (replicate seeds derived from `master_seed` and the
/// replicate index) or the asymptotic limiting distribution. Bootstrap
/// requires at least 99 replicates.
pub fn cvm_pvalue(
    samples: &SampleSet,
    params: &CoupledParams,
    method: PvalueMethod,
    replicates: usize,
    master_seed: u64,
) -> Result<CvmResult> {
    let observed = cvm_statistic(samples, params)?;
    let p_value = match method {
        PvalueMethod::Bootstrap => {
            if replicates < 99 {
                return Err(Error::domain(format!(
                    "bootstrap needs at least 99 replicates, got {replicates}"
                )));
            }
            bootstrap_pvalue(observed, samples.len(), replicates, master_seed, 0)
        }
        PvalueMethod::Asymptotic => 1.0 - asymptotic_cvm_cdf(observed)?,
    };
    Ok(CvmResult {
        statistic: observed,
        p_value,
        n: samples.len(),
        method,
    })
}

fn bootstrap_pvalue(
    observed: f64,
    n: usize,
    replicates: usize,
    master_seed: u64,
    candidate: u64,
) -> f64 {
    let exceed = (0..replicates)
        .into_par_iter()
        .filter(|&r| {
            replicate_statistic(n, derive_seed(master_seed, &[candidate, r as u64])) >= observed
        })
        .count();
    (1.0 + exceed as f64) / (replicates as f64 + 1.0)
}

/// CDF of the limiting null distribution of W²:
/// `(1/(π√x))·Σⱼ cⱼ·√(4j+1)·exp(-(4j+1)²/(16x))·K_{1/4}((4j+1)²/(16x))`
/// with cⱼ = Γ(j+½)/(Γ(½)·j!).
pub fn asymptotic_cvm_cdf(x: f64) -> Result<f64> {
    if x <= 0.0 {
        return Ok(0.0);
    }
    if x > 50.0 {
        return Ok(1.0);
    }
    let mut sum = 0.0;
    let mut coeff = 1.0; // c_0
    for j in 0..64 {
        let jf = j as f64;
        if j > 0 {
            coeff *= (jf - 0.5) / jf;
        }
        let a = (4.0 * jf + 1.0).powi(2) / (16.0 * x);
        // e^(-a)·K(a) = e^(-2a)·(e^a·K(a)), keeping both factors in range
        let term = if a > 650.0 {
            0.0
        } else {
            coeff * (4.0 * jf + 1.0).sqrt() * (-2.0 * a).exp() * bessel_k_quarter_scaled(a)?
        };
        sum += term;
        if term < 1e-16 * sum.max(1e-300) && j > 2 {
            break;
        }
    }
    Ok((sum / (std::f64::consts::PI * x.sqrt())).clamp(0.0, 1.0))
}

/// Modified Bessel function K_{1/4}(z) scaled by e^z, via the integral
/// representation
/// `∫₀^∞ e^(-z(√(1+u²)-1))·cosh(asinh(u)/4)/√(1+u²) du`.
fn bessel_k_quarter_scaled(z: f64) -> Result<f64> {
    let r = quad::integrate(
        |u| {
            let c = if u > 1e150 { u } else { (1.0 + u * u).sqrt() };
            if z * (c - 1.0) > 745.0 {
                return 0.0;
            }
            let w = u + c;
            // cosh(t/4) with e^t = w
            let ch = 0.5 * (w.powf(0.25) + w.powf(-0.25));
            (-z * (c - 1.0)).exp() * ch / c
        },
        0.0,
        f64::INFINITY,
        1e-12,
    )?;
    Ok(r.value)
}

/// One-dimensional (κ, σ) fit constrained by the geometric-mean statistic.
///
/// Computes G once, scans a log-spaced κ grid with σ(κ) = prefactor(κ)·G,
/// scores every candidate by CVM p-value, then refines around the best grid
/// point with a golden-section search in ln κ. Replicate seeds derive from
/// (master seed, candidate index, replicate index), so parallel and serial
/// runs give identical results. Equal p-values resolve to the smallest κ.
pub fn fit_kappa_sigma(samples: &SampleSet, config: &SearchConfig) -> Result<FitResult> {
    if !config.kappa_min.is_finite()
        || config.kappa_min <= 0.0
        || !config.kappa_max.is_finite()
        || config.kappa_max <= config.kappa_min
    {
        return Err(Error::domain(
            "search range must satisfy 0 < kappa_min < kappa_max",
        ));
    }
    if config.grid_points < 2 {
        return Err(Error::domain("search grid needs at least 2 points"));
    }
    let working;
    let samples = match config.max_samples {
        Some(cap) if cap < samples.len() => {
            working = samples.prefix(cap)?;
            &working
        }
        _ => samples,
    };
    let g = geometric_mean(samples)?;
    let mut sorted = samples.values().to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite by SampleSet invariant"));

    let eval = |kappa: f64, candidate: u64| -> TraceEntry {
        match score_candidate(&sorted, samples, g, kappa, candidate, config) {
            Ok(entry) => entry,
            Err(_) => TraceEntry {
                kappa,
                sigma: geometric_prefactor(Coupling::new(kappa).expect("grid kappa > 0"))
                    .map(|p| p * g)
                    .unwrap_or(f64::NAN),
                p_value: f64::NAN,
            },
        }
    };

    let ln_min = config.kappa_min.ln();
    let ln_max = config.kappa_max.ln();
    let m = config.grid_points;
    let grid: Vec<f64> = (0..m)
        .map(|i| (ln_min + (ln_max - ln_min) * i as f64 / (m - 1) as f64).exp())
        .collect();

    let mut trace: Vec<TraceEntry> = grid
        .par_iter()
        .enumerate()
        .map(|(i, &k)| eval(k, i as u64))
        .collect();

    let best_grid = select_best(&trace).ok_or_else(|| {
        Error::numeric("no grid candidate could be scored (all CDF evaluations failed)")
    })?;

    // Golden-section refinement in ln κ between the neighbors of the best
    // grid point.
    let (mut lo, mut hi) = bracket(&grid, best_grid);
    let phi: f64 = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut next_index = m as u64;
    let mut c = hi - phi * (hi - lo);
    let mut d = lo + phi * (hi - lo);
    let mut fc = eval(c.exp(), next_index);
    trace.push(fc);
    next_index += 1;
    let mut fd = eval(d.exp(), next_index);
    trace.push(fd);
    next_index += 1;
    while hi - lo > 1e-3 && next_index < (m as u64) + 64 {
        if better(&fc, &fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - phi * (hi - lo);
            fc = eval(c.exp(), next_index);
            trace.push(fc);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + phi * (hi - lo);
            fd = eval(d.exp(), next_index);
            trace.push(fd);
        }
        next_index += 1;
    }

    // The refinement stage can never end up below the best grid candidate:
    // the winner is taken over the full trace.
    let overall = select_best(&trace).expect("trace contains a scored candidate");
    let best_entry = trace[overall];
    let statistic = cvm_statistic_sorted(
        &sorted,
        &CoupledParams::new(samples.mu(), best_entry.sigma, best_entry.kappa, 2.0)?,
    )?;
    Ok(FitResult {
        kappa_hat: best_entry.kappa,
        sigma_hat: best_entry.sigma,
        best: CvmResult {
            statistic,
            p_value: best_entry.p_value,
            n: samples.len(),
            method: config.method,
        },
        trace,
        converged: best_entry.p_value >= config.p_floor,
    })
}

fn score_candidate(
    sorted: &[f64],
    samples: &SampleSet,
    g: f64,
    kappa: f64,
    candidate: u64,
    config: &SearchConfig,
) -> Result<TraceEntry> {
    let coupling = Coupling::new(kappa)?;
    let sigma = geometric_prefactor(coupling)? * g;
    let params = CoupledParams::new(samples.mu(), sigma, kappa, 2.0)?;
    let observed = cvm_statistic_sorted(sorted, &params)?;
    let p_value = match config.method {
        PvalueMethod::Bootstrap => bootstrap_pvalue(
            observed,
            sorted.len(),
            config.replicates,
            config.master_seed,
            candidate,
        ),
        PvalueMethod::Asymptotic => 1.0 - asymptotic_cvm_cdf(observed)?,
    };
    Ok(TraceEntry {
        kappa,
        sigma,
        p_value,
    })
}

/// Strictly-better ordering: higher p-value wins, ties go to smaller κ
/// (the lightest tail consistent with the data). NaN never wins.
fn better(a: &TraceEntry, b: &TraceEntry) -> bool {
    if a.p_value.is_nan() {
        return false;
    }
    if b.p_value.is_nan() {
        return true;
    }
    a.p_value > b.p_value || (a.p_value == b.p_value && a.kappa < b.kappa)
}

fn select_best(trace: &[TraceEntry]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, e) in trace.iter().enumerate() {
        if e.p_value.is_nan() {
            continue;
        }
        match best {
            None => best = Some(i),
            Some(j) => {
                if better(e, &trace[j]) {
                    best = Some(i);
                }
            }
        }
    }
    best
}

fn bracket(grid: &[f64], best: usize) -> (f64, f64) {
    let lo = if best == 0 { best } else { best - 1 };
    let hi = (best + 1).min(grid.len() - 1);
    (grid[lo].ln(), grid[hi].ln())
}

/// Minimum possible value of the statistic for a sample of size n.
pub fn cvm_minimum(n: usize) -> f64 {
    1.0 / (12.0 * n as f64)
}
