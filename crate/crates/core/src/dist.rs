//! The coupled exponential family of distributions.
//!
//! Density, with location μ, scale σ > 0, coupling κ > -1 and power
//! 0 < α ≤ 3:
//!
//! ```text
//! f(x) = (1/Z) (1 + κ·|x-μ|^α/σ^α)_+^(-(1+κ)/(ακ))        κ ≠ 0
//! f(x) = (1/Z) exp(-|x-μ|^α/σ^α)                           κ = 0
//! ```
//!
//! κ > 0 gives heavy (power-law) tails: for α = 2 the standardized variable
//! (x-μ)/σ follows a Student's t law with 1/κ degrees of freedom, and κ = 1
//! is the Cauchy distribution. κ < 0 gives compact support. The κ = 0 row
//! is the conventional generalized Gaussian `exp(-|x-μ|^α/σ^α)`; note that
//! the κ → 0 limit of the κ ≠ 0 branches is `exp(-|x-μ|^α/(ασ^α))`, so for
//! α ≠ 1 the κ = 0 member uses a rescaled convention rather than the
//! pointwise limit.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};

use crate::error::{Error, Result};
use crate::estimators::SampleSet;
use crate::quad;
use crate::special::{log_beta, log_gamma, regularized_incomplete_beta, Coupling};

/// Parameter point (μ, σ, κ, α) of the family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoupledParams {
    mu: f64,
    sigma: f64,
    kappa: Coupling,
    alpha: f64,
}

impl CoupledParams {
    /// Validates σ > 0, 0 < α ≤ 3 and κ > -1. σ = 0 is degenerate and
    /// rejected.
    pub fn new(mu: f64, sigma: f64, kappa: f64, alpha: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::domain("location mu must be finite"));
        }
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::domain(format!("scale sigma must be > 0, got {sigma}")));
        }
        if !alpha.is_finite() || alpha <= 0.0 || alpha > 3.0 {
            return Err(Error::domain(format!(
                "power alpha must satisfy 0 < alpha <= 3, got {alpha}"
            )));
        }
        Ok(CoupledParams {
            mu,
            sigma,
            kappa: Coupling::new(kappa)?,
            alpha,
        })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }
    pub fn sigma(&self) -> f64 {
        self.sigma
    }
    pub fn kappa(&self) -> f64 {
        self.kappa.get()
    }
    pub fn coupling(&self) -> Coupling {
        self.kappa
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Escort index q = 1 + ακ/(1+κ), recomputed from the parameters.
    pub fn escort_index(&self) -> EscortIndex {
        let k = self.kappa();
        EscortIndex {
            q: 1.0 + self.alpha * k / (1.0 + k),
        }
    }

    /// Half-width of the support around μ: infinite for κ ≥ 0, else
    /// σ·(-1/κ)^(1/α).
    pub fn support_halfwidth(&self) -> f64 {
        let k = self.kappa();
        if k >= 0.0 {
            f64::INFINITY
        } else {
            self.sigma * (-1.0 / k).powf(1.0 / self.alpha)
        }
    }
}

/// Reweighting index of the escort density f^q/∫f^q.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EscortIndex {
    q: f64,
}

impl EscortIndex {
    pub fn q(&self) -> f64 {
        self.q
    }
}

/// Gamma law of the fluctuating inverse scale w = θ^(-α) behind a κ > 0
/// member: shape 1/(ακ), scale ακ·σ^(-α).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaMixture {
    shape: f64,
    scale: f64,
}

impl GammaMixture {
    pub fn shape(&self) -> f64 {
        self.shape
    }
    pub fn scale(&self) -> f64 {
        self.scale
    }
    /// Mean of w, equal to σ^(-α).
    pub fn mean(&self) -> f64 {
        self.shape * self.scale
    }
    /// Variance of w, equal to ακ·σ^(-2α).
    pub fn variance(&self) -> f64 {
        self.shape * self.scale * self.scale
    }
    /// Relative variance Var/Mean² = 1/shape = ακ.
    pub fn relative_variance(&self) -> f64 {
        1.0 / self.shape
    }
}

/// Gamma-mixture representation of a κ > 0 member. κ ≤ 0 members have no
/// such representation.
pub fn mixture_of(params: &CoupledParams) -> Result<GammaMixture> {
    let k = params.kappa();
    if k <= 0.0 {
        return Err(Error::domain(format!(
            "gamma mixture representation requires kappa > 0, got {k}"
        )));
    }
    let a = params.alpha();
    Ok(GammaMixture {
        shape: 1.0 / (a * k),
        scale: a * k * params.sigma().powf(-a),
    })
}

/// Natural log of the normalization constant Z(σ, κ, α).
pub fn log_normalization(params: &CoupledParams) -> Result<f64> {
    let (s, k, a) = (params.sigma(), params.kappa(), params.alpha());
    if k == 0.0 {
        return Ok((2.0 * s).ln() + log_gamma(1.0 + 1.0 / a)?);
    }
    let m = k.abs();
    let b = if k > 0.0 {
        log_beta(1.0 / (a * k), 1.0 / a)?
    } else {
        log_beta(1.0 + (1.0 - m) / (a * m), 1.0 / a)?
    };
    Ok((2.0 * s / a).ln() - m.ln() / a + b)
}

/// Normalization constant Z(σ, κ, α), always positive.
pub fn normalization(params: &CoupledParams) -> Result<f64> {
    Ok(log_normalization(params)?.exp())
}

/// Natural log of the density. Safe against overflow for arbitrarily large
/// |x - μ|/σ (the κ > 0 branch switches to its asymptotic form once
/// κ·|x-μ|^α/σ^α exceeds the floating-point range).
pub fn log_pdf(params: &CoupledParams, x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::domain("log_pdf: x is NaN"));
    }
    let log_z = log_normalization(params)?;
    let k = params.kappa();
    let a = params.alpha();
    // t = ln(|x-μ|^α/σ^α); -inf at x = μ
    let t = a * ((x - params.mu).abs().ln() - params.sigma.ln());
    if k == 0.0 {
        return Ok(-log_z - t.exp());
    }
    // ln(1 + κ·e^t) for κ > 0, computed stably across the whole range of t
    let log1p_ky = if k > 0.0 {
        let s = t + k.ln();
        if s > 36.0 {
            s + (-s).exp().ln_1p()
        } else {
            s.exp().ln_1p()
        }
    } else {
        let y = t.exp();
        let base = 1.0 + k * y;
        if base <= 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        (k * y).ln_1p()
    };
    Ok(-log_z - (1.0 + k) / (a * k) * log1p_ky)
}

/// Density of the family; zero outside the compact support when κ < 0.
pub fn pdf(params: &CoupledParams, x: f64) -> Result<f64> {
    Ok(log_pdf(params, x)?.exp())
}

/// Cumulative distribution function.
///
/// Closed forms: α = 2 with κ > 0 (regularized incomplete beta), α = 2 with
/// κ = 0 (error function), and α = 1 for every κ. Everything else falls
/// back to adaptive quadrature of the density at absolute tolerance 1e-10.
pub fn cdf(params: &CoupledParams, x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::domain("cdf: x is NaN"));
    }
    let (mu, s, k, a) = (params.mu(), params.sigma(), params.kappa(), params.alpha());
    let u = (x - mu) / s;
    if a == 2.0 && k > 0.0 {
        // (x-μ)/σ is Student's t with ν = 1/κ degrees of freedom
        let z = 1.0 / (1.0 + k * u * u);
        let tail = 0.5 * regularized_incomplete_beta(z, 1.0 / (2.0 * k), 0.5)?;
        return Ok(if u >= 0.0 { 1.0 - tail } else { tail });
    }
    if a == 2.0 && k == 0.0 {
        return Ok(0.5 * (1.0 + crate::special::erf(u)?));
    }
    if a == 1.0 {
        // antiderivative of (1+κ|u|)^(-(1+κ)/κ) is closed form for every κ
        let au = u.abs();
        let tail = if k == 0.0 {
            0.5 * (-au).exp()
        } else {
            let base = 1.0 + k * au;
            if base <= 0.0 {
                0.0
            } else {
                0.5 * ((-1.0 / k) * (k * au).ln_1p()).exp()
            }
        };
        return Ok(if u >= 0.0 { 1.0 - tail } else { tail });
    }
    // quadrature branch; the half-width is an absolute offset from μ
    let half = params.support_halfwidth();
    if x - mu <= -half {
        return Ok(0.0);
    }
    if x - mu >= half {
        return Ok(1.0);
    }
    let upper = (x - mu).abs().min(half);
    let r = quad::integrate(|v| pdf(params, mu + v).unwrap_or(f64::NAN), 0.0, upper, 1e-10)?;
    let c = if u >= 0.0 { 0.5 + r.value } else { 0.5 - r.value };
    Ok(c.clamp(0.0, 1.0))
}

/// Survival function 1 - F(x), computed without cancellation via the
/// symmetry of the density about μ: S(x) = F(2μ - x).
pub fn survival(params: &CoupledParams, x: f64) -> Result<f64> {
    cdf(params, 2.0 * params.mu() - x)
}

/// Quantile function: the x with cdf(x) = p, for 0 < p < 1.
pub fn quantile(params: &CoupledParams, p: f64) -> Result<f64> {
    if p.is_nan() || p <= 0.0 || p >= 1.0 {
        return Err(Error::domain(format!(
            "quantile requires 0 < p < 1, got {p}"
        )));
    }
    let mu = params.mu();
    if p == 0.5 {
        return Ok(mu);
    }
    if p < 0.5 {
        return Ok(2.0 * mu - quantile(params, 1.0 - p)?);
    }
    // bracket [μ, hi] with cdf(hi) >= p
    let half = params.support_halfwidth();
    let mut hi;
    if half.is_finite() {
        hi = mu + half;
    } else {
        let mut step = params.sigma();
        hi = mu + step;
        let mut iter = 0;
        while cdf(params, hi)? < p {
            step *= 4.0;
            hi = mu + step;
            iter += 1;
            if !hi.is_finite() || iter > 600 {
                return Err(Error::numeric(format!(
                    "quantile bracketing failed for p = {p}"
                )));
            }
        }
    }
    let mut lo = mu;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let c = cdf(params, mid)?;
        if (c - p).abs() < 1e-14 {
            return Ok(mid);
        }
        if c < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Draws from a κ > 0 sampler together with the underlying inverse-scale
/// variates w = θ^(-α) of the gamma mixture (empty for κ = 0).
#[derive(Debug, Clone)]
pub struct SampleDraws {
    pub set: SampleSet,
    pub inverse_scales: Vec<f64>,
}

/// Draw n observations. For κ > 0 the draw realizes the gamma-mixture
/// construction: w ~ Gamma(1/(ακ), ακσ^(-α)), θ = w^(-1/α), then the
/// conditional generalized Gaussian exp(-|x-μ|^α/(αθ^α)) — a centered
/// Gaussian of standard deviation θ for α = 2, a Laplace of scale θ for
/// α = 1. For κ = 0 the generalized Gaussian is drawn directly.
/// Deterministic for a fixed seed.
pub fn sample(params: &CoupledParams, n: usize, seed: u64) -> Result<SampleSet> {
    Ok(sample_with_diagnostics(params, n, seed)?.set)
}

/// As [`sample`], but also returns the gamma-mixture inverse-scale draws.
pub fn sample_with_diagnostics(
    params: &CoupledParams,
    n: usize,
    seed: u64,
) -> Result<SampleDraws> {
    if n == 0 {
        return Err(Error::domain("sample size must be at least 1"));
    }
    let (mu, s, k, a) = (params.mu(), params.sigma(), params.kappa(), params.alpha());
    if k < 0.0 {
        return Err(Error::domain(
            "sampling requires kappa >= 0 (compact-support members are not sampled)",
        ));
    }
    if a != 1.0 && a != 2.0 {
        return Err(Error::Unsupported(format!(
            "sampling supports alpha in {{1, 2}}, got {a}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(n);
    let mut ws = Vec::new();

    if k == 0.0 {
        for _ in 0..n {
            values.push(mu + draw_conditional(&mut rng, a, gen_gauss_scale(s, a)));
        }
    } else {
        let mix = mixture_of(params)?;
        let gamma = Gamma::new(mix.shape(), mix.scale())
            .map_err(|e| Error::numeric(format!("gamma mixture setup failed: {e}")))?;
        ws.reserve(n);
        for _ in 0..n {
            let w = draw_positive_gamma(&mut rng, &gamma)?;
            let theta = w.powf(-1.0 / a);
            ws.push(w);
            values.push(mu + draw_conditional(&mut rng, a, theta));
        }
    }
    Ok(SampleDraws {
        set: SampleSet::new(values, mu)?,
        inverse_scales: ws,
    })
}

/// Scale of the conditional draw that realizes the κ = 0 member
/// exp(-|x-μ|^α/σ^α): standard deviation σ/√2 for α = 2, Laplace scale σ
/// for α = 1.
fn gen_gauss_scale(sigma: f64, alpha: f64) -> f64 {
    if alpha == 2.0 {
        sigma / std::f64::consts::SQRT_2
    } else {
        sigma
    }
}

fn draw_conditional(rng: &mut ChaCha8Rng, alpha: f64, scale: f64) -> f64 {
    if alpha == 2.0 {
        let z: f64 = rng.sample(StandardNormal);
        scale * z
    } else {
        let e: f64 = rng.sample(Exp1);
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        sign * scale * e
    }
}

/// Marsaglia–Tsang rejection via `rand_distr`, with the u^(1/shape) boost
/// for shape < 1. Draws that underflow to zero (possible only for extreme
/// shapes, probability below ~1e-16 on the shapes used here) are rejected
/// and redrawn so θ = w^(-1/α) stays finite.
fn draw_positive_gamma(rng: &mut ChaCha8Rng, gamma: &Gamma<f64>) -> Result<f64> {
    for _ in 0..1000 {
        let w = gamma.sample(rng);
        if w.is_finite() && w > f64::MIN_POSITIVE {
            return Ok(w);
        }
    }
    Err(Error::numeric(
        "gamma mixture produced 1000 consecutive underflowed variates",
    ))
}

/// ∫ f^q dx for the escort index q of the parameters (κ > 0).
pub(crate) fn escort_integral(params: &CoupledParams) -> Result<f64> {
    let q = params.escort_index().q();
    let mu = params.mu();
    let r = quad::integrate(
        |u| (q * log_pdf(params, mu + u).unwrap_or(f64::NAN)).exp(),
        0.0,
        f64::INFINITY,
        1e-11,
    )?;
    Ok(2.0 * r.value)
}

/// Escort density f^q/∫f^q with q = 1 + ακ/(1+κ); requires κ > 0.
pub fn escort_pdf(params: &CoupledParams, x: f64) -> Result<f64> {
    if params.kappa() <= 0.0 {
        return Err(Error::domain("escort density requires kappa > 0"));
    }
    let q = params.escort_index().q();
    let norm = escort_integral(params)?;
    Ok((q * log_pdf(params, x)?).exp() / norm)
}

/// Scale recovered from the escort-moment constraint
/// σ = (∫|x-μ|^α f^q / ∫ f^q)^(1/α), evaluated by adaptive quadrature.
/// Self-consistency: returns params.sigma() up to quadrature error.
pub fn escort_scale(params: &CoupledParams) -> Result<f64> {
    if params.kappa() <= 0.0 {
        return Err(Error::domain("escort scale requires kappa > 0"));
    }
    let q = params.escort_index().q();
    let a = params.alpha();
    let mu = params.mu();
    let num = quad::integrate(
        |u| (q * log_pdf(params, mu + u).unwrap_or(f64::NAN) + a * u.ln()).exp(),
        0.0,
        f64::INFINITY,
        1e-11,
    )?;
    let den = escort_integral(params)?;
    Ok((2.0 * num.value / den).powf(1.0 / a))
}
