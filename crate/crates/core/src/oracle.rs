//! Hand-written closed forms for every quantity the composed networks
//! produce. Nothing here goes through matrix composition; the whole
//! point is an independent route for cross-checking [`crate::networks`]
//! and [`crate::observables`].

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::xfer::{FieldPair, Matrix2};

/// First-stage coincidence rate, `(1 + cos 2 zeta)/2`.
pub fn first_stage_rate(zeta: f64) -> f64 {
    0.5 * (1.0 + (2.0 * zeta).cos())
}

/// Coupled two-stage transfer matrix written out entrywise.
pub fn coupled_mzi_closed_form(zeta: f64, phi: f64) -> Matrix2 {
    let f = Complex64::from_polar(1.0, phi);
    let z = Complex64::from_polar(1.0, zeta);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    Matrix2::new(
        (f - one) / 2.0,
        i * z * (one + f) / 2.0,
        i * (one + f) / 2.0,
        z * (one - f) / 2.0,
    )
}

/// Coupled two-stage output intensities `(1 +- cos zeta sin phi)` on
/// balanced unit input.
pub fn coupled_mzi_intensities(zeta: f64, phi: f64) -> (f64, f64) {
    let m = zeta.cos() * phi.sin();
    (1.0 + m, 1.0 - m)
}

/// Coupled two-stage coincidence rate, `1 - (cos zeta sin phi)^2`.
pub fn coupled_mzi_rate(zeta: f64, phi: f64) -> f64 {
    let m = zeta.cos() * phi.sin();
    1.0 - m * m
}

/// Single Mach-Zehnder block written out entrywise.
pub fn mzi_closed_form(phi: f64) -> Matrix2 {
    let f = Complex64::from_polar(1.0, phi);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    Matrix2::new(
        (one - f) / 2.0,
        i * (one + f) / 2.0,
        i * (one + f) / 2.0,
        -(one - f) / 2.0,
    )
}

/// Output column of the two-block pi-coupled chain on input `(1, 0)`:
/// `(-(1 + e^{i 2 phi})/2, i (1 - e^{i 2 phi})/2)`.
pub fn two_block_output(phi: f64) -> FieldPair {
    let e2 = Complex64::from_polar(1.0, 2.0 * phi);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    FieldPair::new(-(one + e2) / 2.0, i * (one - e2) / 2.0)
}

/// n-block pi-coupled chain matrix written out entrywise:
/// `(-1)^{n-1}/2` times `[[1 + s e, i (1 - s e)], [-i (1 - s e), 1 + s e]]`
/// with `e = e^{i n phi}` and `s = (-1)^n`. Matches the composed chain up
/// to a global sign that depends on n.
pub fn cbw_chain_closed_form(n: u32, phi: f64) -> Result<Matrix2> {
    if n == 0 {
        return Err(Error::EmptyChain);
    }
    let s = if n % 2 == 0 { 1.0 } else { -1.0 };
    let pref = Complex64::new(if n % 2 == 1 { 0.5 } else { -0.5 }, 0.0);
    let se = Complex64::from_polar(s, n as f64 * phi);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    Ok(Matrix2::new(
        pref * (one + se),
        pref * i * (one - se),
        pref * -i * (one - se),
        pref * (one + se),
    ))
}

/// n-block pi-coupled chain intensities `(1 +- (-1)^n cos n phi)/2` on
/// input `(1, 0)`.
pub fn cbw_intensities(n: u32, phi: f64) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::EmptyChain);
    }
    let s = if n % 2 == 0 { 1.0 } else { -1.0 };
    let m = s * (n as f64 * phi).cos();
    Ok((0.5 * (1.0 + m), 0.5 * (1.0 - m)))
}

/// n-block pi-coupled chain coincidence rate,
/// `(1 - cos 2 n phi)/2 = sin^2(n phi)`.
pub fn cbw_rate(n: u32, phi: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::EmptyChain);
    }
    Ok(0.5 * (1.0 - (2.0 * n as f64 * phi).cos()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::TOL;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, PI, TAU};

    #[test]
    fn first_stage_rate_values() {
        assert!((first_stage_rate(0.0) - 1.0).abs() < TOL);
        assert!(first_stage_rate(FRAC_PI_2).abs() < TOL);
        assert!(first_stage_rate(-FRAC_PI_2).abs() < TOL);
        assert!((first_stage_rate(FRAC_PI_4) - 0.5).abs() < TOL);
    }

    #[test]
    fn first_stage_rate_equals_cos_squared() {
        for k in 0..500 {
            let zeta = TAU * k as f64 / 500.0;
            let c = zeta.cos();
            assert!((first_stage_rate(zeta) - c * c).abs() < TOL);
        }
    }

    #[test]
    fn coupled_intensity_extremes() {
        // Fully anticorrelated at zeta = 0, phi = pi/2.
        let (ia, ib) = coupled_mzi_intensities(0.0, FRAC_PI_2);
        assert!((ia - 2.0).abs() < TOL);
        assert!(ib.abs() < TOL);
        assert!(coupled_mzi_rate(0.0, FRAC_PI_2).abs() < TOL);
        // zeta = pi/2 freezes the fringe at the balanced point.
        let (ia, ib) = coupled_mzi_intensities(FRAC_PI_2, 1.234);
        assert!((ia - 1.0).abs() < TOL);
        assert!((ib - 1.0).abs() < TOL);
        assert!((coupled_mzi_rate(FRAC_PI_2, 0.77) - 1.0).abs() < TOL);
    }

    #[test]
    fn coupled_energy_is_conserved() {
        for k in 0..200 {
            let zeta = TAU * k as f64 / 200.0;
            let (ia, ib) = coupled_mzi_intensities(zeta, 1.3 * zeta + 0.2);
            assert!((ia + ib - 2.0).abs() < TOL);
        }
    }

    #[test]
    fn chain_intensity_values() {
        let (ia, ib) = cbw_intensities(3, FRAC_PI_3).unwrap();
        assert!((ia - 1.0).abs() < TOL);
        assert!(ib.abs() < TOL);
        let (ia, ib) = cbw_intensities(2, FRAC_PI_2).unwrap();
        assert!(ia.abs() < TOL);
        assert!((ib - 1.0).abs() < TOL);
        assert!(cbw_intensities(0, 1.0).is_err());
    }

    #[test]
    fn chain_energy_is_conserved() {
        for n in 1..=8 {
            for k in 0..100 {
                let phi = TAU * k as f64 / 100.0;
                let (ia, ib) = cbw_intensities(n, phi).unwrap();
                assert!((ia + ib - 1.0).abs() < TOL);
            }
        }
    }

    #[test]
    fn chain_rate_values() {
        assert!((cbw_rate(2, FRAC_PI_4).unwrap() - 1.0).abs() < TOL);
        assert!(cbw_rate(3, FRAC_PI_3).unwrap().abs() < TOL);
        assert!((cbw_rate(1, FRAC_PI_4).unwrap() - 0.5).abs() < TOL);
        assert!(cbw_rate(0, 0.3).is_err());
    }

    #[test]
    fn chain_rate_equals_sin_squared() {
        for n in 1..=8u32 {
            for k in 0..300 {
                let phi = TAU * k as f64 / 300.0;
                let s = (n as f64 * phi).sin();
                assert!((cbw_rate(n, phi).unwrap() - s * s).abs() < TOL);
            }
        }
    }

    #[test]
    fn chain_rate_zeros_sit_at_fractions_of_pi() {
        for n in 1..=8u32 {
            for m in 0..=n {
                let phi = m as f64 * PI / n as f64;
                assert!(cbw_rate(n, phi).unwrap().abs() < TOL, "n={n} m={m}");
            }
        }
    }

    #[test]
    fn chain_rate_has_period_pi_over_n() {
        for n in 1..=6u32 {
            let period = PI / n as f64;
            for k in 0..50 {
                let phi = 0.97 * TAU * k as f64 / 50.0;
                let a = cbw_rate(n, phi).unwrap();
                let b = cbw_rate(n, phi + period).unwrap();
                assert!((a - b).abs() < TOL);
            }
        }
    }

    #[test]
    fn two_block_output_spot_values() {
        let out = two_block_output(0.0);
        assert!((out.upper - Complex64::new(-1.0, 0.0)).norm() < TOL);
        assert!(out.lower.norm() < TOL);
        let out = two_block_output(FRAC_PI_2);
        assert!(out.upper.norm() < TOL);
        assert!((out.lower - Complex64::new(0.0, 1.0)).norm() < TOL);
    }

    #[test]
    fn closed_form_matrices_are_unitary() {
        for k in 0..100 {
            let phi = TAU * k as f64 / 100.0;
            assert!(mzi_closed_form(phi).unitarity_residual() < TOL);
            assert!(coupled_mzi_closed_form(1.7 * phi, phi).unitarity_residual() < TOL);
            for n in 1..=8 {
                let m = cbw_chain_closed_form(n, phi).unwrap();
                assert!(m.unitarity_residual() < TOL);
            }
        }
        assert!(cbw_chain_closed_form(0, 1.0).is_err());
    }
}
