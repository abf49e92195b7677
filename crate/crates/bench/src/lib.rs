//! Workloads shared by the benchmarks.

use std::sync::Arc;

use elfact_core::Potential;

/// Potentials with `r` critical primes, all of order `n`.
pub fn uniform_potential(r: usize, n: u64) -> Arc<Potential> {
    let spec: Vec<String> = (0..r).map(|i| format!("p{i}^{n}")).collect();
    Arc::new(Potential::parse(&spec.join("*")).expect("valid potential"))
}
