//! Scale estimators for the heavy-tailed (κ > 0) members.
//!
//! Two empirical estimators with known location μ:
//!
//! * the generalized-mean estimator
//!   `σ̂ = √κ·((1/N)Σ|xᵢ-μ|^((1-κ)/κ))^(κ/(1-κ))`, reducing to the plain
//!   geometric mean at κ = 1 (the Cauchy case);
//! * the geometric-mean estimator
//!   `σ̂* = 2√κ·exp(½·H_{1/(2κ)-1})·exp((1/N)Σ ln|xᵢ-μ|)`, which stays
//!   usable across the whole κ > 0 range.
//!
//! Both are homogeneous of degree one in the deviations |xᵢ-μ|. All powers
//! and products are taken in log space.

use crate::dist::{self, CoupledParams};
use crate::error::{Error, Result};
use crate::quad;
use crate::special::{harmonic_number, Coupling};

/// Ordered real observations plus the assumed-known location μ.
///
/// Construction rejects empty input and non-finite values. An observation
/// exactly equal to μ is rejected by the scale estimators (the log of a
/// zero deviation is a probability-zero event under the continuous model,
/// so it signals a data problem rather than something to clamp or skip).
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    values: Vec<f64>,
    mu: f64,
}

impl SampleSet {
    pub fn new(values: Vec<f64>, mu: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("sample set must be nonempty"));
        }
        if !mu.is_finite() {
            return Err(Error::domain("location mu must be finite"));
        }
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::domain(format!(
                    "sample at index {i} is not finite ({v})"
                )));
            }
        }
        Ok(SampleSet { values, mu })
    }

    /// Index of the first observation equal to μ, if any.
    fn degenerate_index(&self) -> Option<usize> {
        self.values.iter().position(|v| *v == self.mu)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// A view on the first `n` observations (at least 1 kept).
    pub fn prefix(&self, n: usize) -> Result<SampleSet> {
        let n = n.min(self.values.len());
        SampleSet::new(self.values[..n.max(1)].to_vec(), self.mu)
    }
}

/// Which estimator produced a `ScaleEstimate`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorMethod {
    GeometricMean,
    GeneralizedMean,
}

impl std::fmt::Display for EstimatorMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EstimatorMethod::GeometricMean => write!(f, "gmean"),
            EstimatorMethod::GeneralizedMean => write!(f, "genmean"),
        }
    }
}

impl std::str::FromStr for EstimatorMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gmean" => Ok(EstimatorMethod::GeometricMean),
            "genmean" => Ok(EstimatorMethod::GeneralizedMean),
            other => Err(Error::domain(format!(
                "unknown estimator '{other}' (expected gmean or genmean)"
            ))),
        }
    }
}

/// Output of a scale estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleEstimate {
    pub value: f64,
    pub method: EstimatorMethod,
    pub n: usize,
    pub kappa_assumed: f64,
}

/// Bias/variance/MSE of a collection of estimates against the true value.
/// `mse = variance + bias²` holds as an identity by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorMetrics {
    pub bias: f64,
    pub variance: f64,
    pub mse: f64,
}

/// Below this coupling the generalized-mean exponent (1-κ)/κ exceeds what
/// the sample powers can carry in double precision.
pub const GENERALIZED_MEAN_MIN_KAPPA: f64 = 0.02;

fn reject_degenerate(samples: &SampleSet) -> Result<()> {
    if let Some(i) = samples.degenerate_index() {
        return Err(Error::domain(format!(
            "degenerate sample: value at index {i} equals the location mu = {} exactly",
            samples.mu()
        )));
    }
    Ok(())
}

/// Geometric mean of the absolute deviations |xᵢ - μ|, computed in log
/// space so no intermediate product can overflow.
pub fn geometric_mean(samples: &SampleSet) -> Result<f64> {
    reject_degenerate(samples)?;
    let mu = samples.mu();
    let mean_log = samples
        .values()
        .iter()
        .map(|v| (v - mu).abs().ln())
        .sum::<f64>()
        / samples.len() as f64;
    let g = mean_log.exp();
    if !g.is_finite() || g <= 0.0 {
        return Err(Error::numeric(format!(
            "geometric mean left the floating-point range (mean log deviation {mean_log})"
        )));
    }
    Ok(g)
}

/// Generalized-mean scale estimator. κ = 1 is the geometric-mean branch;
/// the two branches agree in the κ → 1 limit. Requires κ ≥ 0.02.
pub fn generalized_mean_scale(samples: &SampleSet, kappa: Coupling) -> Result<ScaleEstimate> {
    let k = kappa.get();
    if k < GENERALIZED_MEAN_MIN_KAPPA {
        return Err(Error::domain(format!(
            "generalized-mean estimator requires kappa >= {GENERALIZED_MEAN_MIN_KAPPA} \
             (the exponent (1-kappa)/kappa = {:.3e} at kappa = {k} is beyond floating-point \
             range for typical data)",
            (1.0 - k) / k.max(1e-300),
        )));
    }
    let value = if (k - 1.0).abs() < 1e-9 {
        geometric_mean(samples)?
    } else {
        reject_degenerate(samples)?;
        let p = (1.0 - k) / k;
        let mu = samples.mu();
        // ((1/N)Σ y^p)^(1/p) via log-sum-exp with the extreme term factored out
        let logs: Vec<f64> = samples
            .values()
            .iter()
            .map(|v| p * (v - mu).abs().ln())
            .collect();
        let m = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = logs.iter().map(|l| (l - m).exp()).sum();
        let log_mean = m + sum.ln() - (samples.len() as f64).ln();
        let v = k.sqrt() * (log_mean / p).exp();
        if !v.is_finite() || v <= 0.0 {
            return Err(Error::numeric(format!(
                "generalized mean left the floating-point range (log power mean {log_mean})"
            )));
        }
        v
    };
    Ok(ScaleEstimate {
        value,
        method: EstimatorMethod::GeneralizedMean,
        n: samples.len(),
        kappa_assumed: k,
    })
}

/// Harmonic-number prefactor `2√κ·exp(½·H_{1/(2κ)-1})` of the
/// geometric-mean estimator. Exactly 1 at κ = 1.
pub fn geometric_prefactor(kappa: Coupling) -> Result<f64> {
    let k = kappa.get();
    if k <= 0.0 {
        return Err(Error::domain(format!(
            "geometric-mean estimator requires kappa > 0, got {k}"
        )));
    }
    let h = harmonic_number(1.0 / (2.0 * k) - 1.0)?;
    Ok(2.0 * k.sqrt() * (0.5 * h).exp())
}

/// Geometric-mean scale estimator σ̂* = prefactor(κ)·gmean(samples).
pub fn geometric_mean_scale(samples: &SampleSet, kappa: Coupling) -> Result<ScaleEstimate> {
    let pref = geometric_prefactor(kappa)?;
    let value = pref * geometric_mean(samples)?;
    if !value.is_finite() || value <= 0.0 {
        return Err(Error::numeric("geometric-mean estimate is not finite"));
    }
    Ok(ScaleEstimate {
        value,
        method: EstimatorMethod::GeometricMean,
        n: samples.len(),
        kappa_assumed: kappa.get(),
    })
}

/// Population-level expected log deviation E[ln|X-μ|] of an α = 2, κ > 0
/// member, in closed form: `ln(σ/(2√κ)) - ½·H_{1/(2κ)-1}`.
pub fn expected_log_deviation(sigma: f64, kappa: Coupling) -> Result<f64> {
    let k = kappa.get();
    if k <= 0.0 || !sigma.is_finite() || sigma <= 0.0 {
        return Err(Error::domain(
            "expected log deviation requires sigma > 0 and kappa > 0",
        ));
    }
    Ok((sigma / (2.0 * k.sqrt())).ln() - 0.5 * harmonic_number(1.0 / (2.0 * k) - 1.0)?)
}

/// Which population identity `scale_identity_check` evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScaleIdentity {
    /// σ = √κ·(E|X-μ|^((1-κ)/κ))^(κ/(1-κ)), with the logarithmic-average
    /// branch exp(E ln|X-μ|) at κ = 1.
    FractionalMoment,
    /// σ = 2√κ·exp(½·H_{1/(2κ)-1} + E ln|X-μ|).
    LogarithmicAverage,
}

/// Evaluate the chosen population identity by adaptive quadrature and
/// return the implied σ; self-consistency means it reproduces
/// `params.sigma()`. Requires κ > 0 and α = 2.
pub fn scale_identity_check(params: &CoupledParams, which: ScaleIdentity) -> Result<f64> {
    let k = params.kappa();
    if k <= 0.0 {
        return Err(Error::domain("scale identities require kappa > 0"));
    }
    if params.alpha() != 2.0 {
        return Err(Error::domain("scale identities are stated for alpha = 2"));
    }
    let mu = params.mu();
    match which {
        ScaleIdentity::FractionalMoment => {
            if (k - 1.0).abs() < 1e-9 {
                return Ok(log_average_quadrature(params)?.exp());
            }
            let p = (1.0 - k) / k;
            let m = quad::integrate(
                |u| (p * u.ln() + dist::log_pdf(params, mu + u).unwrap_or(f64::NAN)).exp(),
                0.0,
                f64::INFINITY,
                1e-9,
            )?;
            let moment = 2.0 * m.value;
            if !moment.is_finite() || moment <= 0.0 {
                return Err(Error::numeric(format!(
                    "fractional moment quadrature returned {moment} at kappa = {k}"
                )));
            }
            Ok(k.sqrt() * (moment.ln() * k / (1.0 - k)).exp())
        }
        ScaleIdentity::LogarithmicAverage => {
            let l = log_average_quadrature(params)?;
            let h = harmonic_number(1.0 / (2.0 * k) - 1.0)?;
            Ok(2.0 * k.sqrt() * (0.5 * h + l).exp())
        }
    }
}

/// E[ln|X-μ|] by quadrature (κ > 0).
pub fn log_average_quadrature(params: &CoupledParams) -> Result<f64> {
    let mu = params.mu();
    let r = quad::integrate(
        |u| u.ln() * dist::log_pdf(params, mu + u).map(f64::exp).unwrap_or(f64::NAN),
        0.0,
        f64::INFINITY,
        1e-9,
    )?;
    Ok(2.0 * r.value)
}

/// Bias, population variance, and MSE of repeated estimates against the
/// true scale. At least two estimates are required.
pub fn estimator_metrics(estimates: &[f64], true_sigma: f64) -> Result<EstimatorMetrics> {
    if estimates.len() < 2 {
        return Err(Error::domain(format!(
            "estimator metrics need at least 2 estimates, got {}",
            estimates.len()
        )));
    }
    let n = estimates.len() as f64;
    let mean = estimates.iter().sum::<f64>() / n;
    let bias = mean - true_sigma;
    let variance = estimates.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / n;
    Ok(EstimatorMetrics {
        bias,
        variance,
        mse: variance + bias * bias,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(values: &[f64], mu: f64) -> SampleSet {
        SampleSet::new(values.to_vec(), mu).unwrap()
    }
    fn c(k: f64) -> Coupling {
        Coupling::new(k).unwrap()
    }

    #[test]
    fn degenerate_sample_names_the_index() {
        let s = SampleSet::new(vec![1.0, 2.0, 5.0, 3.0], 5.0).unwrap();
        let msg = geometric_mean(&s).unwrap_err().to_string();
        assert!(msg.contains("index 2"), "{msg}");
        let msg = generalized_mean_scale(&s, c(0.5)).unwrap_err().to_string();
        assert!(msg.contains("index 2"), "{msg}");
        assert!(geometric_mean_scale(&s, c(0.5)).is_err());
        assert!(SampleSet::new(vec![], 0.0).is_err());
        assert!(SampleSet::new(vec![1.0, f64::INFINITY], 0.0).is_err());
    }

    #[test]
    fn geometric_mean_examples() {
        assert!((geometric_mean(&set(&[2.0, 8.0], 0.0)).unwrap() - 4.0).abs() < 1e-14);
        let e = std::f64::consts::E;
        assert!((geometric_mean(&set(&[e, 1.0 / e], 0.0)).unwrap() - 1.0).abs() < 1e-14);
        assert!((geometric_mean(&set(&[-3.0], 0.0)).unwrap() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn generalized_mean_examples() {
        let est = generalized_mean_scale(&set(&[2.0, 8.0], 0.0), c(1.0)).unwrap();
        assert!((est.value - 4.0).abs() < 1e-14);
        assert_eq!(est.method, EstimatorMethod::GeneralizedMean);
        assert_eq!(est.n, 2);

        // κ = 0.5: both exponents are 1, so σ̂ = √0.5·√2 = 1
        let r2 = std::f64::consts::SQRT_2;
        let est = generalized_mean_scale(&set(&[r2, r2], 0.0), c(0.5)).unwrap();
        assert!((est.value - 1.0).abs() < 1e-14, "{}", est.value);
    }

    #[test]
    fn generalized_mean_refuses_tiny_kappa() {
        let s = set(&[1.0, 2.0], 0.0);
        let err = generalized_mean_scale(&s, c(0.01)).unwrap_err();
        assert!(err.to_string().contains("kappa"), "{err}");
        assert!(generalized_mean_scale(&s, c(0.02)).is_ok());
    }

    #[test]
    fn generalized_mean_branch_continuity() {
        let s = set(&[0.3, 1.7, 2.9, 0.44, 8.1, 0.02], 0.0);
        let g = geometric_mean(&s).unwrap();
        for k in [1.0 - 1e-6, 1.0 + 1e-6] {
            let est = generalized_mean_scale(&s, c(k)).unwrap();
            assert!((est.value - g).abs() < 1e-4, "k={k}: {} vs {g}", est.value);
        }
    }

    #[test]
    fn geometric_prefactor_is_one_at_cauchy() {
        let p = geometric_prefactor(c(1.0)).unwrap();
        assert!((p - 1.0).abs() < 1e-12, "{p}");
    }

    #[test]
    fn geometric_mean_scale_examples() {
        let est = geometric_mean_scale(&set(&[1.0, 1.0, 1.0], 0.0), c(1.0)).unwrap();
        assert!((est.value - 1.0).abs() < 1e-12);

        // κ = 0.5: H_0 = 0, prefactor 2√0.5 = √2
        let est = geometric_mean_scale(&set(&[1.0, 1.0], 0.0), c(0.5)).unwrap();
        assert!((est.value - std::f64::consts::SQRT_2).abs() < 1e-12, "{}", est.value);
        assert_eq!(est.method, EstimatorMethod::GeometricMean);

        assert!(geometric_mean_scale(&set(&[1.0], 0.0), c(0.0)).is_err());
    }

    #[test]
    fn estimators_are_scale_equivariant() {
        let base = [0.5, -1.25, 3.0, 0.125, -7.5];
        let s1 = set(&base, 0.0);
        let scaled: Vec<f64> = base.iter().map(|v| v * 37.5).collect();
        let s2 = set(&scaled, 0.0);
        for k in [0.1, 0.5, 1.0, 2.0] {
            let a = geometric_mean_scale(&s1, c(k)).unwrap().value;
            let b = geometric_mean_scale(&s2, c(k)).unwrap().value;
            assert!((b / a - 37.5).abs() < 1e-10, "gmean k={k}");
            let a = generalized_mean_scale(&s1, c(k)).unwrap().value;
            let b = generalized_mean_scale(&s2, c(k)).unwrap().value;
            assert!((b / a - 37.5).abs() < 1e-10, "genmean k={k}");
        }
    }

    #[test]
    fn metrics_examples() {
        let m = estimator_metrics(&[1.0, 1.0, 1.0], 1.0).unwrap();
        assert_eq!((m.bias, m.variance, m.mse), (0.0, 0.0, 0.0));

        let m = estimator_metrics(&[0.0, 2.0], 1.0).unwrap();
        assert!((m.bias).abs() < 1e-15);
        assert!((m.variance - 1.0).abs() < 1e-15);
        assert!((m.mse - 1.0).abs() < 1e-15);

        let m = estimator_metrics(&[2.0, 2.0], 1.0).unwrap();
        assert!((m.bias - 1.0).abs() < 1e-15);
        assert_eq!(m.variance, 0.0);
        assert!((m.mse - 1.0).abs() < 1e-15);

        assert!(estimator_metrics(&[1.0], 1.0).is_err());
    }

    #[test]
    fn metrics_identity_holds() {
        let m = estimator_metrics(&[0.9, 1.3, 1.1, 0.7, 1.6], 1.0).unwrap();
        assert!((m.mse - (m.variance + m.bias * m.bias)).abs() < 1e-12);
    }

    #[test]
    fn prefix_takes_leading_observations() {
        let s = set(&[1.0, 2.0, 3.0, 4.0], 0.0);
        let p = s.prefix(2).unwrap();
        assert_eq!(p.values(), &[1.0, 2.0]);
        assert_eq!(p.mu(), 0.0);
    }
}
