//! Parameter sweeps over bound networks and their serialized forms.
//!
//! Emitted CSV is deterministic byte for byte: fixed headers, LF line
//! endings, comma separators, and every float printed with 15
//! significant digits.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::dsl::{BindError, Program};
use crate::ensemble::{ensemble_scan, EnsembleResult, PhaseDistribution};
use crate::error::{Error, Result};
use crate::observables::CoincidenceSample;

/// Inclusive uniform grid: `steps` points from `lo` to `hi` with spacing
/// `(hi - lo)/(steps - 1)`.
pub fn grid(lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 2 {
        return Err(Error::GridTooFew);
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::BadScanBounds { lo, hi });
    }
    let h = (hi - lo) / (steps - 1) as f64;
    Ok((0..steps).map(|k| lo + h * k as f64).collect())
}

/// A float as `d.dddddddddddddde[exp]`: 15 significant digits, the fixed
/// width every emitted dataset uses.
pub fn fmt15(v: f64) -> String {
    format!("{v:.14e}")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
struct ScanRow {
    param: f64,
    i_a: f64,
    i_b: f64,
    r: f64,
}

/// Sweep of one parameter: per-point intensities and coincidence rate.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    /// Name of the swept parameter.
    pub name: String,
    pub samples: Vec<CoincidenceSample>,
}

impl ScanResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("param,i_a,i_b,r\n");
        for s in &self.samples {
            out.push_str(&fmt15(s.param));
            for v in [s.i_a, s.i_b, s.r] {
                out.push(',');
                out.push_str(&fmt15(v));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<ScanRow> = self
            .samples
            .iter()
            .map(|s| ScanRow {
                param: s.param,
                i_a: s.i_a,
                i_b: s.i_b,
                r: s.r,
            })
            .collect();
        let mut json = serde_json::to_string_pretty(&rows).expect("plain floats serialize");
        json.push('\n');
        json
    }
}

/// Ensemble sweep: per-point mean rate and its standard error.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleScan {
    pub name: String,
    pub rows: Vec<(f64, EnsembleResult)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
struct EnsembleRow {
    param: f64,
    mean_r: f64,
    std_error: f64,
    samples: u64,
}

impl EnsembleScan {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("param,mean_r,std_error,samples\n");
        for (param, res) in &self.rows {
            out.push_str(&fmt15(*param));
            out.push(',');
            out.push_str(&fmt15(res.mean_r));
            out.push(',');
            out.push_str(&fmt15(res.std_error));
            out.push(',');
            out.push_str(&res.samples.to_string());
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<EnsembleRow> = self
            .rows
            .iter()
            .map(|(param, res)| EnsembleRow {
                param: *param,
                mean_r: res.mean_r,
                std_error: res.std_error,
                samples: res.samples,
            })
            .collect();
        let mut json = serde_json::to_string_pretty(&rows).expect("plain floats serialize");
        json.push('\n');
        json
    }
}

/// What went wrong while sweeping a program.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SweepError {
    #[error(transparent)]
    Bind(#[from] BindError),
    #[error(transparent)]
    Core(#[from] Error),
}

fn bindings_with(
    fixed: &BTreeMap<String, f64>,
    name: &str,
    value: f64,
) -> BTreeMap<String, f64> {
    let mut all = fixed.clone();
    all.insert(name.to_string(), value);
    all
}

/// Evaluate `program` at every grid point of the parameter `name`,
/// holding `fixed` bindings constant.
pub fn scan_program(
    program: &Program,
    fixed: &BTreeMap<String, f64>,
    name: &str,
    grid: &[f64],
) -> std::result::Result<ScanResult, SweepError> {
    if !program.params().iter().any(|p| p == name) {
        return Err(BindError::UnknownBinding(name.to_string()).into());
    }
    let samples = grid
        .iter()
        .map(|&value| {
            let net = program.bind(&bindings_with(fixed, name, value))?;
            Ok(net.sample(value))
        })
        .collect::<std::result::Result<Vec<_>, SweepError>>()?;
    Ok(ScanResult {
        name: name.to_string(),
        samples,
    })
}

/// Average the program's coincidence rate at every grid point of the
/// parameter `name`, adding a random draw from `dist` to the grid value
/// on each sample.
pub fn ensemble_program(
    program: &Program,
    fixed: &BTreeMap<String, f64>,
    name: &str,
    grid: &[f64],
    dist: &PhaseDistribution,
    samples: u64,
    seed: u64,
) -> std::result::Result<EnsembleScan, SweepError> {
    if !program.params().iter().any(|p| p == name) {
        return Err(BindError::UnknownBinding(name.to_string()).into());
    }
    // Fail on bad bindings before touching the grid.
    program.bind(&bindings_with(fixed, name, 0.0))?;
    let rate = |value: f64| {
        let net = program
            .bind(&bindings_with(fixed, name, value))
            .expect("bindings validated before the sweep");
        net.sample(value).r
    };
    let rows = ensemble_scan(rate, dist, grid, samples, seed)?;
    Ok(EnsembleScan {
        name: name.to_string(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse;
    use crate::observables::coincidence_first_stage;
    use crate::oracle;
    use crate::TOL;
    use std::f64::consts::TAU;

    fn chain_program() -> Program {
        parse("input 1 0 0 0\nchain n=2 psi=pi phi=PHI\n").unwrap()
    }

    #[test]
    fn grid_is_inclusive_and_uniform() {
        let g = grid(0.0, TAU, 5).unwrap();
        assert_eq!(g.len(), 5);
        assert_eq!(g[0], 0.0);
        assert!((g[4] - TAU).abs() < TOL);
        assert!((g[1] - TAU / 4.0).abs() < TOL);
        assert!(grid(0.0, 1.0, 1).is_err());
        assert!(grid(1.0, 0.0, 10).is_err());
        assert!(grid(1.0, 1.0, 10).is_err());
    }

    #[test]
    fn scan_matches_closed_form() {
        let result = scan_program(
            &chain_program(),
            &BTreeMap::new(),
            "PHI",
            &grid(0.0, TAU, 100).unwrap(),
        )
        .unwrap();
        for s in &result.samples {
            let (wa, wb) = oracle::cbw_intensities(2, s.param).unwrap();
            assert!((s.i_a - wa).abs() < TOL);
            assert!((s.i_b - wb).abs() < TOL);
            assert!((s.r - oracle::cbw_rate(2, s.param).unwrap()).abs() < TOL);
        }
    }

    #[test]
    fn scan_rejects_unknown_parameter() {
        let err = scan_program(
            &chain_program(),
            &BTreeMap::new(),
            "NOPE",
            &grid(0.0, 1.0, 4).unwrap(),
        )
        .unwrap_err();
        assert!(matches!(
            err,
            SweepError::Bind(BindError::UnknownBinding(_))
        ));
    }

    #[test]
    fn csv_shape_and_determinism() {
        let result = scan_program(
            &chain_program(),
            &BTreeMap::new(),
            "PHI",
            &grid(0.0, TAU, 16).unwrap(),
        )
        .unwrap();
        let csv = result.to_csv();
        assert!(csv.starts_with("param,i_a,i_b,r\n"));
        assert_eq!(csv.lines().count(), 17);
        assert!(!csv.contains('\r'));
        // 15 significant digits: mantissa dot plus 14 places.
        let first = csv.lines().nth(1).unwrap();
        assert_eq!(first.split(',').count(), 4);
        assert!(first.split(',').all(|f| f.contains('e')));

        let again = scan_program(
            &chain_program(),
            &BTreeMap::new(),
            "PHI",
            &grid(0.0, TAU, 16).unwrap(),
        )
        .unwrap();
        assert_eq!(csv, again.to_csv());
    }

    #[test]
    fn json_rows_parse_back() {
        let result = scan_program(
            &chain_program(),
            &BTreeMap::new(),
            "PHI",
            &grid(0.0, 1.0, 8).unwrap(),
        )
        .unwrap();
        let parsed: serde_json::Value = serde_json::from_str(&result.to_json()).unwrap();
        let rows = parsed.as_array().unwrap();
        assert_eq!(rows.len(), 8);
        for (row, s) in rows.iter().zip(&result.samples) {
            assert_eq!(row["param"].as_f64().unwrap(), s.param);
            assert_eq!(row["r"].as_f64().unwrap(), s.r);
        }
    }

    #[test]
    fn ensemble_sweep_with_delta_matches_deterministic_path() {
        let program = parse("input 1 0 1 0\nphase lower ZETA\nbs\n").unwrap();
        let g = grid(0.0, TAU, 9).unwrap();
        let dist = PhaseDistribution::delta(0.0).unwrap();
        let result =
            ensemble_program(&program, &BTreeMap::new(), "ZETA", &g, &dist, 10, 0).unwrap();
        for (zeta, res) in &result.rows {
            assert_eq!(res.mean_r, coincidence_first_stage(*zeta).r);
        }
        let csv = result.to_csv();
        assert!(csv.starts_with("param,mean_r,std_error,samples\n"));
        assert!(csv.lines().nth(1).unwrap().ends_with(",10"));
    }

    #[test]
    fn fixed_bindings_are_held_constant() {
        let program = parse("input 1 0 1 0\nfig1 zeta=ZETA phi=PHI\n").unwrap();
        let mut fixed = BTreeMap::new();
        fixed.insert("ZETA".to_string(), 0.0);
        let result = scan_program(
            &program,
            &fixed,
            "PHI",
            &grid(0.0, TAU, 50).unwrap(),
        )
        .unwrap();
        for s in &result.samples {
            let want = oracle::coupled_mzi_rate(0.0, s.param);
            assert!((s.r - want).abs() < TOL);
        }
    }

    #[test]
    fn ensemble_sweep_rejects_missing_fixed_binding() {
        let program = parse("input 1 0 1 0\nfig1 zeta=ZETA phi=PHI\n").unwrap();
        let g = grid(0.0, 1.0, 4).unwrap();
        let dist = PhaseDistribution::delta(0.0).unwrap();
        let err = ensemble_program(&program, &BTreeMap::new(), "PHI", &g, &dist, 5, 0)
            .unwrap_err();
        assert!(matches!(err, SweepError::Bind(BindError::Unbound(_))));
    }
}
