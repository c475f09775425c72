//! Shared fixtures for the benchmarks.

use mixtel_core::sampling::hs_random_density;
use mixtel_core::DensityMatrix;

/// A fixed full-rank random state on N×N.
pub fn fixture_state(n: usize) -> DensityMatrix {
    hs_random_density(n * n, n * n, 2024 + n as u64).expect("fixture state")
}
