//! Intensities, coincidence rates, and fringe diagnostics.
//!
//! Coincidence rates are normalized products of the two output
//! intensities. Each scheme carries its own normalization constant,
//! chosen so the rate peaks at 1: the square of half the total input
//! intensity, which is 1 for balanced unit input `(1, 1)` and 1/4 for
//! single-arm unit input `(1, 0)`.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::networks::{cbw_chain, coupled_mzi_matrix, first_stage_matrix, CbwChainSpec, CoupledMziSpec};
use crate::xfer::{FieldPair, Matrix2};

/// One point of a coincidence scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoincidenceSample {
    /// Value of the scanned phase this sample was taken at.
    pub param: f64,
    /// Intensity on the upper output.
    pub i_a: f64,
    /// Intensity on the lower output.
    pub i_b: f64,
    /// Normalized coincidence rate `i_a * i_b / norm`.
    pub r: f64,
    /// Normalization constant the rate was divided by.
    pub norm: f64,
}

impl CoincidenceSample {
    /// Second-order correlation at zero delay; for these classical
    /// intensity products it coincides with the rate itself.
    pub fn g2(&self) -> f64 {
        self.r
    }
}

/// Output intensities of a network on a given input.
pub fn intensities(m: &Matrix2, input: &FieldPair) -> (f64, f64) {
    m.apply(input).intensities()
}

/// Rate normalization for a given input: `(total/2)^2`, the product of
/// two equal shares of the input intensity.
pub fn rate_norm(input: &FieldPair) -> f64 {
    let half = input.total_intensity() / 2.0;
    half * half
}

pub(crate) fn sample_from(param: f64, input: &FieldPair, m: &Matrix2) -> CoincidenceSample {
    let (i_a, i_b) = intensities(m, input);
    let norm = rate_norm(input);
    let r = if norm == 0.0 { 0.0 } else { i_a * i_b / norm };
    CoincidenceSample {
        param,
        i_a,
        i_b,
        r,
        norm,
    }
}

/// Coincidence rate after the first stage alone, balanced unit input.
pub fn coincidence_first_stage(zeta: f64) -> CoincidenceSample {
    sample_from(
        zeta,
        &FieldPair::real(1.0, 1.0),
        &first_stage_matrix(zeta),
    )
}

/// Coincidence rate of the coupled two-stage scheme, balanced unit input.
pub fn coincidence_coupled_mzi(zeta: f64, phi: f64) -> CoincidenceSample {
    sample_from(
        phi,
        &FieldPair::real(1.0, 1.0),
        &coupled_mzi_matrix(&CoupledMziSpec::new(zeta, phi)),
    )
}

/// Coincidence rate of the n-block chain, single-arm unit input.
pub fn coincidence_chain(n: u32, phi: f64, psi: f64) -> Result<CoincidenceSample> {
    let spec = CbwChainSpec::new(n, phi, psi)?;
    Ok(sample_from(
        phi,
        &FieldPair::real(1.0, 0.0),
        &cbw_chain(&spec),
    ))
}

/// Which column of a sample set an estimator runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleField {
    IA,
    IB,
    Rate,
}

impl SampleField {
    fn of(&self, s: &CoincidenceSample) -> f64 {
        match self {
            SampleField::IA => s.i_a,
            SampleField::IB => s.i_b,
            SampleField::Rate => s.r,
        }
    }
}

/// Fringe visibility `(max - min)/(max + min)` of one column; 0 when the
/// column is identically zero.
pub fn visibility(samples: &[CoincidenceSample], field: SampleField) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: samples.len(),
        });
    }
    let mut max = f64::NEG_INFINITY;
    let mut min = f64::INFINITY;
    for s in samples {
        let v = field.of(s);
        max = max.max(v);
        min = min.min(v);
    }
    if max + min == 0.0 {
        return Ok(0.0);
    }
    Ok((max - min) / (max + min))
}

/// Dominant fringe period of one column, estimated from the discrete
/// Fourier transform over a uniform grid.
///
/// The grid must hold at least 16 points with uniform spacing `h` and
/// cover a full turn (`len * h >= 2 pi`, the span of the periodic
/// continuation). Returns `span / k*` where `k*` is the positive
/// frequency bin with the largest magnitude.
pub fn fringe_period(samples: &[CoincidenceSample], field: SampleField) -> Result<f64> {
    let n = samples.len();
    if n < 16 {
        return Err(Error::TooFewSamples { needed: 16, got: n });
    }
    let h = (samples[n - 1].param - samples[0].param) / (n - 1) as f64;
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::NonUniformGrid);
    }
    for w in samples.windows(2) {
        let step = w[1].param - w[0].param;
        if (step - h).abs() > 1e-9 * h.max(1.0) {
            return Err(Error::NonUniformGrid);
        }
    }
    let span = n as f64 * h;
    if span < TAU * (1.0 - 1e-9) {
        return Err(Error::GridTooShort(span));
    }

    let values: Vec<f64> = samples.iter().map(|s| field.of(s)).collect();
    let mut k_best = 1usize;
    let mut mag_best = -1.0f64;
    for k in 1..=n / 2 {
        let (mut re, mut im) = (0.0f64, 0.0f64);
        let w = TAU * k as f64 / n as f64;
        for (j, v) in values.iter().enumerate() {
            let a = w * j as f64;
            re += v * a.cos();
            im -= v * a.sin();
        }
        let mag = re * re + im * im;
        if mag > mag_best {
            mag_best = mag;
            k_best = k;
        }
    }
    Ok(span / k_best as f64)
}

/// Phases in `[0, pi]` where the n-block chain coincidence rate vanishes:
/// `m pi / n` for `m = 0..=n`.
pub fn anticorrelation_zeros(n: u32) -> Vec<f64> {
    assert!(n >= 1, "chain needs at least one block");
    (0..=n)
        .map(|m| m as f64 * std::f64::consts::PI / n as f64)
        .collect()
}
