//! Cross-checks of composed networks against the closed-form oracle.
//!
//! Every check reports the maximum absolute deviation found over a dense
//! parameter grid; a check passes when that deviation is below
//! [`crate::TOL`]. Matrix identities that hold only up to a global phase
//! are aligned first, everything else is compared exactly.

use std::f64::consts::{PI, TAU};

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::networks::{
    cbw_chain, coupled_mzi_matrix, first_stage_matrix, mzi_block, CbwChainSpec, CoupledMziSpec,
};
use crate::observables::{coincidence_chain, coincidence_coupled_mzi, coincidence_first_stage};
use crate::oracle;
use crate::xfer::{FieldPair, Matrix2};
use crate::TOL;

/// One verification row: a labeled identity and the worst deviation
/// observed for it.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    /// Identity label as printed in reports.
    pub label: &'static str,
    /// What was compared.
    pub description: &'static str,
    /// Maximum absolute deviation over the grid.
    pub max_dev: f64,
    /// Pass threshold.
    pub tol: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.max_dev < self.tol
    }

    fn new(label: &'static str, description: &'static str, max_dev: f64) -> Self {
        Self {
            label,
            description,
            max_dev,
            tol: TOL,
        }
    }
}

fn turn_grid(points: usize) -> impl Iterator<Item = f64> {
    (0..points).map(move |k| TAU * k as f64 / points as f64)
}

fn mat_dev(a: &Matrix2, b: &Matrix2) -> f64 {
    a.entries()
        .iter()
        .zip(b.entries())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Deviation from `a = c b` after aligning the global phase `c` on the
/// largest entry of `b`.
fn mat_dev_up_to_phase(a: &Matrix2, b: &Matrix2) -> f64 {
    let (mut k, mut best) = (0usize, 0.0f64);
    for (i, e) in b.entries().iter().enumerate() {
        if e.norm() > best {
            best = e.norm();
            k = i;
        }
    }
    if best == 0.0 {
        return a.frobenius_norm();
    }
    let ratio = a.entries()[k] / b.entries()[k];
    if ratio.norm() == 0.0 {
        return mat_dev(a, b);
    }
    let c = ratio / ratio.norm();
    mat_dev(a, &b.scale(c))
}

const DENSE: usize = 1000;
const PLANE: usize = 100;

fn check_first_stage_rate() -> Check {
    let mut dev = 0.0f64;
    for zeta in turn_grid(DENSE) {
        let got = coincidence_first_stage(zeta).r;
        dev = dev.max((got - oracle::first_stage_rate(zeta)).abs());
    }
    Check::new("Eq1", "first-stage coincidence rate", dev)
}

fn check_coupled_matrix() -> Check {
    let mut dev = 0.0f64;
    for zeta in turn_grid(PLANE) {
        for phi in turn_grid(PLANE) {
            let got = coupled_mzi_matrix(&CoupledMziSpec::new(zeta, phi));
            let want = oracle::coupled_mzi_closed_form(zeta, phi);
            dev = dev.max(mat_dev(&got, &want));
        }
    }
    Check::new("Eq2", "coupled two-stage matrix, entrywise", dev)
}

fn check_coupled_intensities() -> (Check, Check) {
    let mut dev_a = 0.0f64;
    let mut dev_b = 0.0f64;
    for zeta in turn_grid(PLANE) {
        for phi in turn_grid(PLANE) {
            let s = coincidence_coupled_mzi(zeta, phi);
            let (wa, wb) = oracle::coupled_mzi_intensities(zeta, phi);
            dev_a = dev_a.max((s.i_a - wa).abs());
            dev_b = dev_b.max((s.i_b - wb).abs());
        }
    }
    (
        Check::new("Eq3", "coupled upper output intensity", dev_a),
        Check::new("Eq4", "coupled lower output intensity", dev_b),
    )
}

fn check_coupled_rate() -> Check {
    let mut dev = 0.0f64;
    for zeta in turn_grid(PLANE) {
        for phi in turn_grid(PLANE) {
            let got = coincidence_coupled_mzi(zeta, phi).r;
            dev = dev.max((got - oracle::coupled_mzi_rate(zeta, phi)).abs());
        }
    }
    Check::new("Eq5", "coupled coincidence rate", dev)
}

fn check_mzi_matrix() -> Check {
    let mut dev = 0.0f64;
    for phi in turn_grid(DENSE) {
        dev = dev.max(mat_dev(&mzi_block(phi), &oracle::mzi_closed_form(phi)));
    }
    Check::new("Eq6", "Mach-Zehnder block matrix, entrywise", dev)
}

fn check_two_block_output() -> Check {
    let mut dev = 0.0f64;
    for phi in turn_grid(DENSE) {
        let spec = CbwChainSpec::new(2, phi, PI).expect("n = 2");
        let got = cbw_chain(&spec).apply(&FieldPair::real(1.0, 0.0));
        let want = oracle::two_block_output(phi);
        dev = dev
            .max((got.upper - want.upper).norm())
            .max((got.lower - want.lower).norm());
    }
    Check::new("Eq8", "two-block chain output column", dev)
}

fn check_two_block_intensities() -> (Check, Check) {
    let mut dev_a = 0.0f64;
    let mut dev_b = 0.0f64;
    for phi in turn_grid(DENSE) {
        let s = coincidence_chain(2, phi, PI).expect("n = 2");
        let want_a = 0.5 * (1.0 + (2.0 * phi).cos());
        let want_b = 0.5 * (1.0 - (2.0 * phi).cos());
        dev_a = dev_a.max((s.i_a - want_a).abs());
        dev_b = dev_b.max((s.i_b - want_b).abs());
    }
    (
        Check::new("Eq9", "two-block upper intensity", dev_a),
        Check::new("Eq10", "two-block lower intensity", dev_b),
    )
}

fn check_chain_matrix(max_n: u32) -> Check {
    let mut dev = 0.0f64;
    for n in 1..=max_n {
        for phi in turn_grid(DENSE) {
            let spec = CbwChainSpec::new(n, phi, PI).expect("n >= 1");
            let got = cbw_chain(&spec);
            let want = oracle::cbw_chain_closed_form(n, phi).expect("n >= 1");
            dev = dev.max(mat_dev_up_to_phase(&got, &want));
        }
    }
    Check::new("Eq11", "n-block chain matrix, up to global phase", dev)
}

fn check_chain_intensities(max_n: u32) -> (Check, Check) {
    let mut dev_a = 0.0f64;
    let mut dev_b = 0.0f64;
    for n in 1..=max_n {
        for phi in turn_grid(DENSE) {
            let s = coincidence_chain(n, phi, PI).expect("n >= 1");
            let (wa, wb) = oracle::cbw_intensities(n, phi).expect("n >= 1");
            dev_a = dev_a.max((s.i_a - wa).abs());
            dev_b = dev_b.max((s.i_b - wb).abs());
        }
    }
    (
        Check::new("Eq12", "n-block upper intensity", dev_a),
        Check::new("Eq13", "n-block lower intensity", dev_b),
    )
}

fn check_chain_rate(max_n: u32) -> Check {
    let mut dev = 0.0f64;
    for n in 1..=max_n {
        for phi in turn_grid(DENSE) {
            let got = coincidence_chain(n, phi, PI).expect("n >= 1").r;
            dev = dev.max((got - oracle::cbw_rate(n, phi).expect("n >= 1")).abs());
        }
    }
    Check::new("Eq14", "n-block coincidence rate", dev)
}

fn check_psi_zero_identity(max_n: u32) -> Check {
    let mut dev = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(0x51ab);
    let mut n = 2;
    while n <= max_n {
        for _ in 0..100 {
            let phi = TAU * (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
            let spec = CbwChainSpec::new(n, phi, 0.0).expect("n >= 1");
            let m = cbw_chain(&spec);
            dev = dev.max(mat_dev_up_to_phase(&m, &Matrix2::identity()));
            let out = m.apply(&FieldPair::real(1.0, 0.0));
            let (ia, ib) = out.intensities();
            dev = dev.max((ia - 1.0).abs()).max(ib.abs());
        }
        n += 2;
    }
    Check::new("PsiZero", "even unphased chain is the identity", dev)
}

fn check_unitarity(max_n: u32) -> Check {
    let mut dev = 0.0f64;
    for zeta in turn_grid(PLANE) {
        dev = dev.max(first_stage_matrix(zeta).unitarity_residual());
        for phi in turn_grid(PLANE) {
            dev = dev.max(
                coupled_mzi_matrix(&CoupledMziSpec::new(zeta, phi)).unitarity_residual(),
            );
        }
    }
    for n in 1..=max_n {
        for phi in turn_grid(PLANE) {
            let spec = CbwChainSpec::new(n, phi, PI).expect("n >= 1");
            dev = dev.max(cbw_chain(&spec).unitarity_residual());
        }
    }
    Check::new("Unitarity", "all composed matrices are unitary", dev)
}

/// Run every cross-check, with chain identities evaluated for
/// `n = 1..=max_n`. Two-block rows appear once `max_n` reaches 2.
pub fn run_all(max_n: u32) -> Result<Vec<Check>> {
    let max_n = max_n.max(1);
    let mut checks = vec![check_first_stage_rate(), check_coupled_matrix()];
    let (eq3, eq4) = check_coupled_intensities();
    checks.push(eq3);
    checks.push(eq4);
    checks.push(check_coupled_rate());
    checks.push(check_mzi_matrix());
    if max_n >= 2 {
        checks.push(check_two_block_output());
        let (eq9, eq10) = check_two_block_intensities();
        checks.push(eq9);
        checks.push(eq10);
    }
    checks.push(check_chain_matrix(max_n));
    let (eq12, eq13) = check_chain_intensities(max_n);
    checks.push(eq12);
    checks.push(eq13);
    checks.push(check_chain_rate(max_n));
    checks.push(check_psi_zero_identity(max_n));
    checks.push(check_unitarity(max_n));
    Ok(checks)
}
