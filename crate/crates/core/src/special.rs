//! Scalar special functions: the deformed exponential/logarithm pair, real
//! harmonic numbers, log-gamma, digamma, and the (regularized incomplete)
//! beta and gamma functions.
//!
//! Everything here is a pure function of its arguments and safe to call
//! concurrently.

use crate::error::{Error, Result};

/// Euler–Mascheroni constant γ.
pub const EULER_MASCHERONI: f64 = 0.577_215_664_901_532_9;

/// Below this magnitude the deformation parameter is treated as zero and the
/// exponential/logarithmic limit branch is used, with a second-order
/// correction term. The naive `(x^κ - 1)/κ` form loses all significant
/// digits well before this point.
pub const KAPPA_LIMIT_THRESHOLD: f64 = 1e-10;

/// Nonlinear coupling parameter κ. Valid range is κ > -1; the heavy-tail
/// regime studied by the estimators is κ > 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coupling(f64);

impl Coupling {
    pub fn new(kappa: f64) -> Result<Self> {
        if !kappa.is_finite() {
            return Err(Error::domain("coupling must be finite"));
        }
        if kappa <= -1.0 {
            return Err(Error::domain(format!(
                "coupling must be > -1, got {kappa}"
            )));
        }
        Ok(Coupling(kappa))
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// True when the parameter falls inside the limit window around zero.
    pub fn is_effectively_zero(self) -> bool {
        self.0.abs() < KAPPA_LIMIT_THRESHOLD
    }
}

/// Power parameter of the deformed exponential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeformationPower(f64);

impl DeformationPower {
    pub fn new(a: f64) -> Result<Self> {
        if !a.is_finite() {
            return Err(Error::domain("deformation power must be finite"));
        }
        Ok(DeformationPower(a))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Deformed exponential `(1 + κx)_+^(a/κ)`, reducing to `e^(ax)` as κ → 0.
///
/// When the clamped base is zero and `a/κ < 0` the result is `+∞`: this is
/// the pole of the power function, not an error, so density code can treat
/// the support boundary uniformly (and clamp to zero downstream).
pub fn coupled_exp(x: f64, kappa: Coupling, a: DeformationPower) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::domain("coupled_exp: x is NaN"));
    }
    let k = kappa.get();
    let a = a.get();
    if kappa.is_effectively_zero() {
        // exp(a·ln(1+κx)/κ) with ln(1+κx)/κ expanded to second order.
        return Ok((a * (x - k * x * x / 2.0)).exp());
    }
    let base = 1.0 + k * x;
    if base <= 0.0 {
        return Ok(if a == 0.0 {
            1.0
        } else if a / k < 0.0 {
            f64::INFINITY
        } else {
            0.0
        });
    }
    Ok(((a / k) * (k * x).ln_1p()).exp())
}

/// Deformed logarithm `(x^κ - 1)/κ` for x > 0, reducing to `ln x` as κ → 0.
/// Inverse of [`coupled_exp`] with unit power.
pub fn coupled_log(x: f64, kappa: Coupling) -> Result<f64> {
    if x.is_nan() || x <= 0.0 {
        return Err(Error::domain(format!("coupled_log: x must be > 0, got {x}")));
    }
    let k = kappa.get();
    let l = x.ln();
    if kappa.is_effectively_zero() {
        // (e^(κ ln x) - 1)/κ = ln x + κ ln²x/2 + O(κ²)
        return Ok(l + k * l * l / 2.0);
    }
    Ok((k * l).exp_m1() / k)
}

/// Harmonic number of real argument, `H_a = ∫₀¹ (1-x^a)/(1-x) dx` for
/// a > -1, computed as `ψ(a+1) + γ`. Integer arguments up to 256 take the
/// exact partial-sum path so `H_n = Σ 1/k` holds bit for bit.
pub fn harmonic_number(a: f64) -> Result<f64> {
    if !a.is_finite() || a <= -1.0 {
        return Err(Error::domain(format!(
            "harmonic number requires a > -1, got {a}"
        )));
    }
    if a == 0.0 {
        return Ok(0.0);
    }
    if a > 0.0 && a <= 256.0 && a.fract() == 0.0 {
        let n = a as u32;
        let mut h = 0.0;
        for k in 1..=n {
            h += 1.0 / f64::from(k);
        }
        return Ok(h);
    }
    Ok(digamma(a + 1.0)? + EULER_MASCHERONI)
}

// Asymptotic (Stirling-type) series coefficients: B_2n / (2n(2n-1)) for
// ln Γ, and B_2n / 2n for ψ.
const LGAMMA_SERIES: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
];
const DIGAMMA_SERIES: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32_760.0,
    1.0 / 12.0,
];

const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_7;

/// Natural log of the gamma function for a > 0. Asymptotic series for
/// a ≥ 10, shifted upward by the recurrence Γ(a+1) = aΓ(a) below that.
pub fn log_gamma(a: f64) -> Result<f64> {
    if a.is_nan() || a <= 0.0 {
        return Err(Error::domain(format!("log_gamma requires a > 0, got {a}")));
    }
    let mut shift = 0.0;
    let mut x = a;
    while x < 10.0 {
        shift += x.ln();
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut p = inv;
    for c in LGAMMA_SERIES {
        series += c * p;
        p *= inv2;
    }
    Ok((x - 0.5) * x.ln() - x + HALF_LN_TWO_PI + series - shift)
}

/// Digamma function ψ(a) for a > 0: asymptotic expansion for a ≥ 10 with
/// downward recurrence ψ(a) = ψ(a+1) - 1/a for small arguments.
pub fn digamma(a: f64) -> Result<f64> {
    if a.is_nan() || a <= 0.0 {
        return Err(Error::domain(format!("digamma requires a > 0, got {a}")));
    }
    let mut shift = 0.0;
    let mut x = a;
    while x < 10.0 {
        shift += 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    let mut series = 0.0;
    let mut p = inv2;
    for c in DIGAMMA_SERIES {
        series += c * p;
        p *= inv2;
    }
    Ok(x.ln() - 0.5 / x - series - shift)
}

/// `ln B(a, b)` for a, b > 0.
pub fn log_beta(a: f64, b: f64) -> Result<f64> {
    Ok(log_gamma(a)? + log_gamma(b)? - log_gamma(a + b)?)
}

/// Regularized incomplete beta function `I_x(a, b)` for x ∈ [0, 1] and
/// a, b > 0. Continued fraction (modified Lentz), switching to the
/// symmetric complement so the fraction always converges quickly.
pub fn regularized_incomplete_beta(x: f64, a: f64, b: f64) -> Result<f64> {
    if a.is_nan() || a <= 0.0 || b.is_nan() || b <= 0.0 {
        return Err(Error::domain(format!(
            "incomplete beta requires a, b > 0, got a={a}, b={b}"
        )));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(format!(
            "incomplete beta requires x in [0, 1], got {x}"
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    let front = (a * x.ln() + b * (-x).ln_1p() - log_beta(a, b)?).exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        Ok(front * beta_cf(x, a, b)? / a)
    } else {
        Ok(1.0 - front * beta_cf(1.0 - x, b, a)? / b)
    }
}

fn beta_cf(x: f64, a: f64, b: f64) -> Result<f64> {
    const MAX_ITER: usize = 300;
    const TINY: f64 = 1e-300;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-15 {
            return Ok(h);
        }
    }
    Err(Error::numeric(
        "incomplete beta continued fraction did not converge",
    ))
}

/// Regularized lower incomplete gamma function `P(a, x)`.
pub fn regularized_gamma_p(a: f64, x: f64) -> Result<f64> {
    if a.is_nan() || a <= 0.0 || x.is_nan() || x < 0.0 {
        return Err(Error::domain(format!(
            "incomplete gamma requires a > 0, x >= 0, got a={a}, x={x}"
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x < a + 1.0 {
        gamma_p_series(a, x)
    } else {
        Ok(1.0 - gamma_q_cf(a, x)?)
    }
}

fn gamma_p_series(a: f64, x: f64) -> Result<f64> {
    let mut ap = a;
    let mut sum = 1.0 / a;
    let mut del = sum;
    for _ in 0..500 {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * 1e-16 {
            let log_front = a * x.ln() - x - log_gamma(a)?;
            return Ok(sum * log_front.exp());
        }
    }
    Err(Error::numeric("incomplete gamma series did not converge"))
}

fn gamma_q_cf(a: f64, x: f64) -> Result<f64> {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=500 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            let log_front = a * x.ln() - x - log_gamma(a)?;
            return Ok(h * log_front.exp());
        }
    }
    Err(Error::numeric(
        "incomplete gamma continued fraction did not converge",
    ))
}

/// Error function, via the regularized incomplete gamma function.
pub fn erf(x: f64) -> Result<f64> {
    if x == 0.0 {
        return Ok(0.0);
    }
    let p = regularized_gamma_p(0.5, x * x)?;
    Ok(if x > 0.0 { p } else { -p })
}
