//! Shared fixtures for the criterion benchmarks.

use coupled_stats::dist::{self, CoupledParams};
use coupled_stats::estimators::SampleSet;

/// Standard Cauchy member used across benchmarks.
pub fn cauchy() -> CoupledParams {
    CoupledParams::new(0.0, 1.0, 1.0, 2.0).unwrap()
}

/// A fixed seeded draw shared by the estimator and fitting benchmarks.
pub fn cauchy_draw(n: usize) -> SampleSet {
    dist::sample(&cauchy(), n, 1234).unwrap()
}
