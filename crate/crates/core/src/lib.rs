//! Deterministic simulator for two-mode coherence optics.
//!
//! Interferometer networks are built from 2x2 complex transfer matrices
//! (beam splitters, arm phases, Mach-Zehnder blocks, phase-coupled MZI
//! chains). The crate computes output intensities and normalized
//! coincidence rates, cross-checks matrix composition against hardcoded
//! closed forms, averages coincidence rates over random-phase ensembles,
//! and compiles a small text format (`.mzn`) describing networks.
//!
//! Conventions used throughout: mode 1 is the upper arm, mode 2 the lower
//! arm; matrix row = output mode, column = input mode; a chain of elements
//! written in propagation order composes as a matrix product with the
//! first element rightmost.

pub mod dsl;
pub mod ensemble;
mod error;
pub mod networks;
pub mod observables;
pub mod oracle;
pub mod scan;
pub mod verify;
pub mod xfer;

pub use dsl::{BindError, Element, Expr, Network, ParseError, Program};
pub use ensemble::{EnsembleResult, PhaseDistribution};
pub use error::{Error, Result};
pub use networks::{CbwChainSpec, CoupledMziSpec};
pub use observables::{CoincidenceSample, SampleField};
pub use scan::{EnsembleScan, ScanResult};
pub use xfer::{Arm, FieldPair, Matrix2, PhaseSpec};

/// Tolerance for matrix identities, intensity equivalences, and
/// unitarity residuals. Composition of a handful of 2x2 products loses
/// at most a few ulps, so everything exact-in-theory must survive 1e-12
/// with orders of magnitude to spare.
pub const TOL: f64 = 1e-12;
