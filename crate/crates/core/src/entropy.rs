//! Coupled entropy, Tsallis entropy, normalized Tsallis entropy, and the
//! average density.
//!
//! With I = ∫ f^q dx and escort index q = 1 + ακ/(1+κ):
//!
//! ```text
//! average density   f_avg = I^((1+κ)/(ακ))
//! Tsallis           S^T   = (1 - I)/(q - 1)
//! normalized        S^NT  = S^T / I
//! coupled           S^C   = S^NT / (1+κ) = (1 - I)/(ακ·I)
//! ```
//!
//! S^C grows with the coupling while S^T decays with it, and both reduce to
//! the Shannon differential entropy as κ → 0. For α = 2 members the average
//! density equals the density at μ + σ, which the tests use as an
//! independent cross-check of the quadrature path. The κ = 0 branches
//! return `exp(-S)` and the Shannon entropy `S = ln Z + 1/α` of the κ = 0
//! member directly; the exponent -1/κ is singular there.

use crate::dist::{escort_integral, log_normalization, CoupledParams};
use crate::error::{Error, Result};

/// All entropy functionals of one parameter point, plus the average
/// density. `coupled == normalized_tsallis/(1+κ)` by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyReport {
    pub coupled: f64,
    pub tsallis: f64,
    pub normalized_tsallis: f64,
    pub average_density: f64,
}

fn require_nonnegative_coupling(params: &CoupledParams) -> Result<()> {
    if params.kappa() < 0.0 {
        return Err(Error::domain(
            "entropy functionals are defined here for kappa >= 0",
        ));
    }
    Ok(())
}

/// Shannon differential entropy of the κ = 0 member exp(-|x-μ|^α/σ^α)/Z,
/// in closed form: ln Z + 1/α.
fn shannon_entropy_k0(params: &CoupledParams) -> Result<f64> {
    Ok(log_normalization(params)? + 1.0 / params.alpha())
}

/// Generalized mean of the density over itself. For κ = 0 this is the
/// exponential of the negative Shannon entropy.
pub fn average_density(params: &CoupledParams) -> Result<f64> {
    require_nonnegative_coupling(params)?;
    let k = params.kappa();
    if k == 0.0 {
        return Ok((-shannon_entropy_k0(params)?).exp());
    }
    let i = escort_integral(params)?;
    Ok(i.powf((1.0 + k) / (params.alpha() * k)))
}

/// Coupled entropy S^C = (1 - ∫f^q)/(ακ·∫f^q); Shannon differential
/// entropy of the κ = 0 member when κ = 0.
pub fn coupled_entropy(params: &CoupledParams) -> Result<f64> {
    require_nonnegative_coupling(params)?;
    let k = params.kappa();
    if k == 0.0 {
        return shannon_entropy_k0(params);
    }
    let i = escort_integral(params)?;
    Ok((1.0 - i) / (params.alpha() * k * i))
}

/// The full entropy report; requires κ > 0 (the chain of relations
/// degenerates at κ = 0).
pub fn tsallis_entropies(params: &CoupledParams) -> Result<EntropyReport> {
    let k = params.kappa();
    if k <= 0.0 {
        return Err(Error::domain("tsallis entropies require kappa > 0"));
    }
    let a = params.alpha();
    let i = escort_integral(params)?;
    if !i.is_finite() || i <= 0.0 {
        return Err(Error::numeric(format!("escort integral returned {i}")));
    }
    let q_minus_one = a * k / (1.0 + k);
    let tsallis = (1.0 - i) / q_minus_one;
    let normalized_tsallis = tsallis / i;
    let coupled = normalized_tsallis / (1.0 + k);
    Ok(EntropyReport {
        coupled,
        tsallis,
        normalized_tsallis,
        average_density: i.powf((1.0 + k) / (a * k)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::pdf;
    use std::f64::consts::PI;

    fn params(mu: f64, sigma: f64, kappa: f64) -> CoupledParams {
        CoupledParams::new(mu, sigma, kappa, 2.0).unwrap()
    }

    #[test]
    fn average_density_cauchy() {
        // ∫f² = 1/(2π) for the Cauchy, and f_avg = I^(2κ/... ) = 1/(2π)
        let avg = average_density(&params(0.0, 1.0, 1.0)).unwrap();
        assert!((avg - 1.0 / (2.0 * PI)).abs() < 1e-9, "{avg}");
    }

    #[test]
    fn average_density_equals_density_at_mu_plus_sigma() {
        for (s, k) in [(2.0, 0.5), (1.0, 0.25), (10.0, 2.0)] {
            let p = params(0.0, s, k);
            let avg = average_density(&p).unwrap();
            let f = pdf(&p, s).unwrap();
            assert!((avg - f).abs() < 1e-6 * f.max(1e-3), "s={s} k={k}: {avg} vs {f}");
        }
    }

    #[test]
    fn average_density_translation_invariant() {
        let a = average_density(&params(5.0, 1.0, 1.0)).unwrap();
        let b = average_density(&params(0.0, 1.0, 1.0)).unwrap();
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn average_density_k0_branch() {
        // exp(-Shannon) = pdf(μ)·e^(-1/α)
        let p = params(0.0, 1.0, 0.0);
        let avg = average_density(&p).unwrap();
        let expected = pdf(&p, 0.0).unwrap() * (-0.5f64).exp();
        assert!((avg - expected).abs() < 1e-14, "{avg} vs {expected}");
    }

    #[test]
    fn coupled_entropy_cauchy_closed_value() {
        // (1 - 1/(2π))/(2/(2π)) = π - 1/2
        let s = coupled_entropy(&params(0.0, 1.0, 1.0)).unwrap();
        assert!((s - (PI - 0.5)).abs() < 1e-8, "{s}");
    }

    #[test]
    fn coupled_entropy_grows_with_coupling() {
        let s1 = coupled_entropy(&params(0.0, 1.0, 0.5)).unwrap();
        let s2 = coupled_entropy(&params(0.0, 1.0, 1.0)).unwrap();
        assert!(s1 < s2, "{s1} vs {s2}");
    }

    #[test]
    fn coupled_entropy_grows_with_scale() {
        let s1 = coupled_entropy(&params(0.0, 1.0, 1.0)).unwrap();
        let s2 = coupled_entropy(&params(0.0, 2.0, 1.0)).unwrap();
        assert!(s2 > s1, "{s1} vs {s2}");
    }

    #[test]
    fn dual_path_against_closed_form() {
        // quadrature path vs the α = 2 identity I = f(μ+σ)^(ακ/(1+κ))
        for (s, k) in [(1.0, 1.0), (1.0, 0.5), (10.0, 2.0)] {
            let p = params(0.0, s, k);
            let via_quad = coupled_entropy(&p).unwrap();
            let i_closed = pdf(&p, s).unwrap().powf(2.0 * k / (1.0 + k));
            let closed = (1.0 - i_closed) / (2.0 * k * i_closed);
            assert!(
                (via_quad - closed).abs() < 1e-8 * closed.max(1.0),
                "s={s} k={k}: {via_quad} vs {closed}"
            );
        }
    }

    #[test]
    fn report_chain_relations() {
        for (s, k) in [(1.0, 0.1), (1.0, 1.0), (0.5, 2.0), (10.0, 0.5)] {
            let p = params(0.0, s, k);
            let r = tsallis_entropies(&p).unwrap();
            assert!(
                (r.coupled - r.normalized_tsallis / (1.0 + k)).abs() < 1e-10 * r.coupled.abs(),
                "chain 1 at s={s} k={k}"
            );
            let i = escort_integral(&p).unwrap();
            assert!(
                (r.normalized_tsallis * i - r.tsallis).abs() < 1e-10 * r.tsallis.abs(),
                "chain 2 at s={s} k={k}"
            );
            assert!(r.average_density > 0.0);
        }
    }

    #[test]
    fn tsallis_decays_with_coupling() {
        let t1 = tsallis_entropies(&params(0.0, 1.0, 0.5)).unwrap().tsallis;
        let t2 = tsallis_entropies(&params(0.0, 1.0, 1.0)).unwrap().tsallis;
        let t3 = tsallis_entropies(&params(0.0, 1.0, 2.0)).unwrap().tsallis;
        assert!(t1 > t2 && t2 > t3, "{t1} {t2} {t3}");
    }

    #[test]
    fn k0_entropy_is_shannon_of_k0_member() {
        // ln(σ√π) + 1/2 for α = 2
        let s = coupled_entropy(&params(0.0, 1.0, 0.0)).unwrap();
        assert!((s - (PI.sqrt().ln() + 0.5)).abs() < 1e-14, "{s}");
        assert!(tsallis_entropies(&params(0.0, 1.0, 0.0)).is_err());
        assert!(coupled_entropy(&CoupledParams::new(0.0, 1.0, -0.25, 2.0).unwrap()).is_err());
    }
}
