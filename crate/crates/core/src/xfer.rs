//! 2x2 complex transfer matrices and two-mode field amplitudes.
//!
//! Row index is the output mode, column index the input mode; mode 1 is
//! the upper arm, mode 2 the lower arm. All phases are radians.

use std::f64::consts::TAU;
use std::ops::Mul;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Which arm of the interferometer an element acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arm {
    Upper,
    Lower,
}

/// Complex field amplitudes on the two arms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldPair {
    pub upper: Complex64,
    pub lower: Complex64,
}

impl FieldPair {
    pub const fn new(upper: Complex64, lower: Complex64) -> Self {
        Self { upper, lower }
    }

    /// Field with real amplitudes on the two arms.
    pub fn real(upper: f64, lower: f64) -> Self {
        Self::new(Complex64::new(upper, 0.0), Complex64::new(lower, 0.0))
    }

    /// Per-arm intensities `(|upper|^2, |lower|^2)`.
    pub fn intensities(&self) -> (f64, f64) {
        (self.upper.norm_sqr(), self.lower.norm_sqr())
    }

    pub fn total_intensity(&self) -> f64 {
        self.upper.norm_sqr() + self.lower.norm_sqr()
    }
}

/// 2x2 complex transfer matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix2 {
    pub m11: Complex64,
    pub m12: Complex64,
    pub m21: Complex64,
    pub m22: Complex64,
}

impl Matrix2 {
    pub const fn new(m11: Complex64, m12: Complex64, m21: Complex64, m22: Complex64) -> Self {
        Self { m11, m12, m21, m22 }
    }

    pub fn identity() -> Self {
        Self::new(
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        )
    }

    pub fn apply(&self, f: &FieldPair) -> FieldPair {
        FieldPair::new(
            self.m11 * f.upper + self.m12 * f.lower,
            self.m21 * f.upper + self.m22 * f.lower,
        )
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self::new(
            self.m11.conj(),
            self.m21.conj(),
            self.m12.conj(),
            self.m22.conj(),
        )
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::new(c * self.m11, c * self.m12, c * self.m21, c * self.m22)
    }

    pub fn entries(&self) -> [Complex64; 4] {
        [self.m11, self.m12, self.m21, self.m22]
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries()
            .iter()
            .map(|e| e.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `|M^dagger M - I|_F`; zero iff the matrix is unitary.
    pub fn unitarity_residual(&self) -> f64 {
        let p = self.dagger() * *self;
        let one = Complex64::new(1.0, 0.0);
        Self::new(p.m11 - one, p.m12, p.m21, p.m22 - one).frobenius_norm()
    }

    fn sub(&self, rhs: &Self) -> Self {
        Self::new(
            self.m11 - rhs.m11,
            self.m12 - rhs.m12,
            self.m21 - rhs.m21,
            self.m22 - rhs.m22,
        )
    }
}

impl Mul for Matrix2 {
    type Output = Matrix2;

    fn mul(self, rhs: Matrix2) -> Matrix2 {
        Matrix2::new(
            self.m11 * rhs.m11 + self.m12 * rhs.m21,
            self.m11 * rhs.m12 + self.m12 * rhs.m22,
            self.m21 * rhs.m11 + self.m22 * rhs.m21,
            self.m21 * rhs.m12 + self.m22 * rhs.m22,
        )
    }
}

/// Symmetric lossless beam splitter, `(1/sqrt(2)) [[1, i], [i, 1]]`.
pub fn bs_matrix() -> Matrix2 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Matrix2::new(
        Complex64::new(s, 0.0),
        Complex64::new(0.0, s),
        Complex64::new(0.0, s),
        Complex64::new(s, 0.0),
    )
}

/// Phase element on one arm: `diag(e^{i theta}, 1)` for the upper arm,
/// `diag(1, e^{i theta})` for the lower.
pub fn phase_matrix(theta: f64, arm: Arm) -> Result<Matrix2> {
    if !theta.is_finite() {
        return Err(Error::NonFinitePhase(theta));
    }
    let p = Complex64::from_polar(1.0, theta);
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    Ok(match arm {
        Arm::Upper => Matrix2::new(p, zero, zero, one),
        Arm::Lower => Matrix2::new(one, zero, zero, p),
    })
}

/// Reduce an angle to its representative in `[0, 2pi)`.
pub fn wrap_phase(theta: f64) -> f64 {
    let w = theta.rem_euclid(TAU);
    if w == TAU {
        0.0
    } else {
        w
    }
}

/// Wavelength and path difference defining an arm phase `2 pi dL / lambda`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSpec {
    wavelength: f64,
    path_difference: f64,
}

impl PhaseSpec {
    pub fn new(wavelength: f64, path_difference: f64) -> Result<Self> {
        if !(wavelength.is_finite() && wavelength > 0.0) {
            return Err(Error::InvalidWavelength(wavelength));
        }
        if !path_difference.is_finite() {
            return Err(Error::NonFiniteLength(path_difference));
        }
        Ok(Self {
            wavelength,
            path_difference,
        })
    }

    /// Unwrapped phase in radians.
    pub fn radians(&self) -> f64 {
        TAU * self.path_difference / self.wavelength
    }

    /// Phase reduced to `[0, 2pi)`.
    pub fn wrapped(&self) -> f64 {
        wrap_phase(self.radians())
    }
}

/// True iff `a == c * b` within `tol` (Frobenius norm) for some unimodular
/// scalar `c`. The scalar is read off the largest-magnitude entry of `b`,
/// so a genuine proportionality is found whenever one exists.
pub fn approx_eq_up_to_global_phase(a: &Matrix2, b: &Matrix2, tol: f64) -> bool {
    let (mut k, mut best) = (0usize, 0.0f64);
    for (i, e) in b.entries().iter().enumerate() {
        if e.norm() > best {
            best = e.norm();
            k = i;
        }
    }
    let c = if best == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        let ratio = a.entries()[k] / b.entries()[k];
        if ratio.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            ratio / ratio.norm()
        }
    };
    a.sub(&b.scale(c)).frobenius_norm() <= tol
}
