//! Composed interferometer networks.
//!
//! Every builder returns the full transfer matrix of the arrangement,
//! composed element by element so the closed forms in [`crate::oracle`]
//! stay an independent cross-check.

use crate::error::{Error, Result};
use crate::xfer::{bs_matrix, phase_matrix, Arm, Matrix2};

fn phase(theta: f64, arm: Arm) -> Matrix2 {
    phase_matrix(theta, arm).expect("network phases are finite")
}

/// Balanced Mach-Zehnder block: splitter, phase `phi` on the lower arm,
/// splitter.
pub fn mzi_block(phi: f64) -> Matrix2 {
    bs_matrix() * phase(phi, Arm::Lower) * bs_matrix()
}

/// Mach-Zehnder block followed by a phase `psi` on one output arm. These
/// are the building blocks of [`cbw_chain`].
pub fn psi_block(phi: f64, psi: f64, side: Arm) -> Matrix2 {
    phase(psi, side) * mzi_block(phi)
}

/// Chain of `n` Mach-Zehnder blocks whose coupling phase `psi` alternates
/// between the upper arm (first block) and the lower arm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CbwChainSpec {
    n: u32,
    phi: f64,
    psi: f64,
}

impl CbwChainSpec {
    pub fn new(n: u32, phi: f64, psi: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyChain);
        }
        Ok(Self { n, phi, psi })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn psi(&self) -> f64 {
        self.psi
    }
}

/// Transfer matrix of the alternating chain. Block k carries its psi
/// phase on the upper arm for odd k, the lower arm for even k; the first
/// block acts first.
pub fn cbw_chain(spec: &CbwChainSpec) -> Matrix2 {
    let mut total = Matrix2::identity();
    for k in 1..=spec.n {
        let side = if k % 2 == 1 { Arm::Upper } else { Arm::Lower };
        total = psi_block(spec.phi, spec.psi, side) * total;
    }
    total
}

/// Two-stage coupled interferometer: phase `zeta` on the lower input arm,
/// splitter, phase `phi` on the upper internal arm, splitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoupledMziSpec {
    pub zeta: f64,
    pub phi: f64,
}

impl CoupledMziSpec {
    pub fn new(zeta: f64, phi: f64) -> Self {
        Self { zeta, phi }
    }
}

/// Transfer matrix of the coupled two-stage arrangement.
pub fn coupled_mzi_matrix(spec: &CoupledMziSpec) -> Matrix2 {
    bs_matrix() * phase(spec.phi, Arm::Upper) * bs_matrix() * phase(spec.zeta, Arm::Lower)
}

/// First stage alone: phase `zeta` on the lower arm, then one splitter.
pub fn first_stage_matrix(zeta: f64) -> Matrix2 {
    bs_matrix() * phase(zeta, Arm::Lower)
}
