//! Shared fixtures for the benchmark targets.

/// Inclusive uniform grid over one full turn.
pub fn turn_grid(points: usize) -> Vec<f64> {
    mzsim_core::scan::grid(0.0, std::f64::consts::TAU, points).unwrap()
}

/// Program text for a parameterized three-block chain, the costliest
/// network the front end composes per grid point.
pub const CHAIN_PROGRAM: &str = "input 1 0 0 0\nchain n=3 psi=pi phi=PHI\n";
