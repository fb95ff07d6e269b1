//! Seeded Monte Carlo checks of the sampler, the estimators' convergence
//! behavior, and the calibration of the bootstrap goodness-of-fit test.

use coupled_stats::dist::{self, CoupledParams};
use coupled_stats::estimators::{geometric_mean_scale, EstimatorMethod};
use coupled_stats::fitting::{cvm_pvalue, cvm_statistic, PvalueMethod, SearchConfig};
use coupled_stats::harness::{
    run_convergence, run_fit_experiment, summarize, ConvergenceConfig,
};
use coupled_stats::seed::derive_seed;
use coupled_stats::special::Coupling;

fn params(sigma: f64, kappa: f64) -> CoupledParams {
    CoupledParams::new(0.0, sigma, kappa, 2.0).unwrap()
}

#[test]
fn cvm_statistic_stays_below_critical_value_under_null() {
    // 1e4 draws from the true model: the statistic sits below the 95%
    // critical value 0.46136 in at least 90 of 100 seeded trials
    let p = params(1.0, 1.0);
    let mut below = 0;
    for trial in 0..100u64 {
        let s = dist::sample(&p, 10_000, derive_seed(11, &[trial])).unwrap();
        if cvm_statistic(&s, &p).unwrap() < 0.46136 {
            below += 1;
        }
    }
    assert!(below >= 90, "only {below}/100 below the 95% critical value");
}

#[test]
fn bootstrap_pvalues_uniform_under_null() {
    // null calibration at n = 500 over 200 trials: Kolmogorov distance of
    // the p-values from U(0,1) below 0.1, and the 5% rejection rate within
    // 0.05 ± 0.04
    let p = params(1.0, 1.0);
    let mut pvals = Vec::new();
    for trial in 0..200u64 {
        let s = dist::sample(&p, 500, derive_seed(23, &[trial])).unwrap();
        let r = cvm_pvalue(&s, &p, PvalueMethod::Bootstrap, 199, derive_seed(29, &[trial]))
            .unwrap();
        pvals.push(r.p_value);
    }
    pvals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = pvals.len() as f64;
    let mut ks: f64 = 0.0;
    for (i, v) in pvals.iter().enumerate() {
        ks = ks
            .max((v - i as f64 / n).abs())
            .max(((i as f64 + 1.0) / n - v).abs());
    }
    assert!(ks < 0.1, "p-value KS distance {ks:.3}");
    let frac = pvals.iter().filter(|v| **v < 0.05).count() as f64 / n;
    assert!((frac - 0.05).abs() <= 0.04, "rejection rate {frac}");
}

#[test]
fn estimator_spread_decays_with_sample_size() {
    // per-n standard deviation over runs decreases from 1e3 to 1e5
    for &kappa in &[0.5, 1.0, 2.0] {
        let cfg = ConvergenceConfig {
            kappas: vec![kappa],
            sigma_source: 1.0,
            mu_source: 0.0,
            sample_sizes: vec![1_000, 10_000, 100_000],
            runs: 20,
            estimator: EstimatorMethod::GeometricMean,
            master_seed: 17,
        };
        let rows = summarize(&run_convergence(&cfg).unwrap(), 1.0);
        assert_eq!(rows.len(), 3);
        let stds: Vec<f64> = rows.iter().map(|r| r.std.unwrap()).collect();
        assert!(
            stds[0] > stds[1] && stds[1] > stds[2],
            "kappa={kappa}: stds {stds:?} not decreasing"
        );
    }
}

#[test]
fn geometric_estimator_unbiased_at_unit_scale() {
    // mean over 20 runs of n = 1e5 within 2% of sigma for the kappa grid
    for (i, &kappa) in [0.1, 0.5, 1.0, 2.0].iter().enumerate() {
        let p = params(1.0, kappa);
        let k = Coupling::new(kappa).unwrap();
        let mut ests = Vec::new();
        for run in 0..20u64 {
            let s = dist::sample(&p, 100_000, derive_seed(31, &[i as u64, run])).unwrap();
            ests.push(geometric_mean_scale(&s, k).unwrap().value);
        }
        let mean = ests.iter().sum::<f64>() / ests.len() as f64;
        assert!((mean - 1.0).abs() < 0.02, "kappa={kappa}: mean {mean:.4}");
    }
}

#[test]
fn heavy_coupling_estimate_within_ten_percent() {
    // kappa = 10, sigma = 10 at n = 1e5: the run-mean stays within 10%
    let p = params(10.0, 10.0);
    let k = Coupling::new(10.0).unwrap();
    let mut ests = Vec::new();
    for run in 0..10u64 {
        let s = dist::sample(&p, 100_000, derive_seed(37, &[run])).unwrap();
        ests.push(geometric_mean_scale(&s, k).unwrap().value);
    }
    let mean = ests.iter().sum::<f64>() / ests.len() as f64;
    assert!((mean - 10.0).abs() < 1.0, "run-mean {mean:.3}");
}

#[test]
fn cauchy_geometric_mean_converges_at_one_million() {
    // a single draw of n = 1e6 estimates the Cauchy scale to within 0.01
    let p = params(1.0, 1.0);
    let s = dist::sample(&p, 1_000_000, 53).unwrap();
    let est = geometric_mean_scale(&s, Coupling::new(1.0).unwrap()).unwrap();
    assert!((est.value - 1.0).abs() < 0.01, "{}", est.value);
}

#[test]
fn fit_recovers_moderate_coupling_at_ten_thousand() {
    let src = params(1.0, 0.5);
    let s = dist::sample(&src, 10_000, derive_seed(61, &[0])).unwrap();
    let cfg = SearchConfig {
        replicates: 199,
        master_seed: derive_seed(61, &[1]),
        ..SearchConfig::default()
    };
    let fit = coupled_stats::fitting::fit_kappa_sigma(&s, &cfg).unwrap();
    assert!(
        (0.4..=0.6).contains(&fit.kappa_hat),
        "kappa_hat {} outside [0.4, 0.6]",
        fit.kappa_hat
    );
}

#[test]
fn fit_experiment_survives_extreme_coupling() {
    // kappa = 10 at one thousand samples: the row must be present with an
    // honest flag, whatever it says
    let src = params(1.0, 10.0);
    let search = SearchConfig {
        replicates: 199,
        grid_points: 30,
        ..SearchConfig::default()
    };
    let rows = run_fit_experiment(&src, 1_000, &[1_000], 67, &search).unwrap();
    assert_eq!(rows.len(), 1);
    assert!(run_fit_experiment(&src, 1_000, &[0], 67, &search).is_err());
}

#[test]
fn fit_experiment_prefix_subsamples() {
    let src = params(1.0, 1.0);
    let search = SearchConfig {
        replicates: 199,
        grid_points: 30,
        ..SearchConfig::default()
    };
    let rows = run_fit_experiment(&src, 10_000, &[1_000, 10_000], 43, &search).unwrap();
    assert_eq!(rows.len(), 2);
    for r in &rows {
        let k = r.kappa_hat.expect("fit succeeded");
        assert!((k - 1.0).abs() < 0.1, "n={}: kappa_hat {k}", r.n);
        assert!(r.converged);
    }

    // single subsample equal to the whole draw: exactly one row
    let rows = run_fit_experiment(&src, 500, &[500], 47, &search).unwrap();
    assert_eq!(rows.len(), 1);
    assert!(run_fit_experiment(&src, 100, &[500], 47, &search).is_err());
}
