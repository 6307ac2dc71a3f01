use hyperconc::devices::DetectorModel;
use hyperconc::protocol::{run_exact, PpcVariant, ProtocolConfig, Variant};
use hyperconc::StateParams;
use rayon::prelude::*;
use serde::Serialize;

use crate::{fmt_g12, CliError, CliResult, Format};

/// Square grid over `(|α|², |δ|²)`.
#[derive(Debug, Clone, Serialize)]
pub struct SweepSpec {
    pub parties: u8,
    pub variant: Variant,
    pub ppc_variant: PpcVariant,
    pub detector_model: DetectorModel,
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub alpha2: f64,
    pub delta2: f64,
    pub p_exact: f64,
    pub p_formula: f64,
}

/// Grid values `min, min + step, … <= max`, rounded to 12 decimals so that
/// accumulated float error never shows up in the output.
pub fn grid_values(min: f64, max: f64, step: f64) -> CliResult<Vec<f64>> {
    if step.is_nan() || step <= 0.0 || step.is_infinite() {
        return Err(CliError::Usage(format!("sweep step must be positive, got {step}")));
    }
    if !(min > 0.0 && max < 1.0) {
        return Err(CliError::Usage(format!("sweep grid must lie strictly inside (0, 1), got [{min}, {max}]")));
    }
    if min > max {
        return Err(CliError::Usage(format!("empty sweep grid: min {min} > max {max}")));
    }
    let count = ((max - min) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| ((min + i as f64 * step) * 1e12).round() / 1e12).collect())
}

/// Evaluates every grid point, in parallel; rows come back alpha-major.
pub fn sweep(spec: &SweepSpec) -> CliResult<Vec<SweepRow>> {
    let values = grid_values(spec.min, spec.max, spec.step)?;
    let points: Vec<(f64, f64)> = values.iter().flat_map(|&a| values.iter().map(move |&d| (a, d))).collect();
    log::info!("sweep: N={} over {} points", spec.parties, points.len());
    points
        .into_par_iter()
        .map(|(alpha2, delta2)| {
            let mut config = ProtocolConfig::new(spec.parties, StateParams::from_squared(alpha2, delta2)?);
            config.variant = spec.variant;
            config.ppc_variant = spec.ppc_variant;
            config.detector_model = spec.detector_model;
            let report = run_exact(&config)?;
            Ok(SweepRow {
                alpha2,
                delta2,
                p_exact: report.success_probability,
                p_formula: report.summary.formula_probability,
            })
        })
        .collect()
}

pub fn render_sweep(rows: &[SweepRow], format: Format) -> CliResult<String> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["alpha2", "delta2", "p_exact", "p_formula"])?;
            for r in rows {
                w.write_record([fmt_g12(r.alpha2), fmt_g12(r.delta2), fmt_g12(r.p_exact), fmt_g12(r.p_formula)])?;
            }
            Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("csv output is utf-8"))
        }
        Format::Json => Ok(serde_json::to_string_pretty(rows).expect("rows serialize") + "\n"),
        Format::Text => {
            let mut out = format!("{:>8} {:>8} {:>16} {:>16}\n", "alpha2", "delta2", "p_exact", "p_formula");
            for r in rows {
                out += &format!(
                    "{:>8} {:>8} {:>16} {:>16}\n",
                    fmt_g12(r.alpha2),
                    fmt_g12(r.delta2),
                    fmt_g12(r.p_exact),
                    fmt_g12(r.p_formula)
                );
            }
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(parties: u8, min: f64, max: f64, step: f64) -> SweepSpec {
        SweepSpec {
            parties,
            variant: Variant::TwoCopies,
            ppc_variant: PpcVariant::Plain,
            detector_model: DetectorModel::Pnr,
            min,
            max,
            step,
        }
    }

    #[test]
    fn default_grid_has_nineteen_clean_values() {
        let v = grid_values(0.05, 0.95, 0.05).unwrap();
        assert_eq!(v.len(), 19);
        assert_eq!(v[5], 0.3);
        assert_eq!(*v.last().unwrap(), 0.95);
    }

    #[test]
    fn bad_grids_are_usage_errors() {
        for (min, max, step) in [(0.0, 0.9, 0.1), (0.1, 1.0, 0.1), (0.1, 0.9, 0.0), (0.6, 0.4, 0.1), (0.1, 0.9, f64::NAN)] {
            assert_eq!(grid_values(min, max, step).unwrap_err().exit_code(), 2);
        }
    }

    #[test]
    fn rows_are_ordered_and_match_formula() {
        let rows = sweep(&spec(2, 0.1, 0.9, 0.2)).unwrap();
        assert_eq!(rows.len(), 25);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.alpha2, grid_values(0.1, 0.9, 0.2).unwrap()[i / 5]);
            assert!((r.p_exact - r.p_formula).abs() < 1e-9);
        }
    }

    #[test]
    fn csv_header_and_formatting() {
        let rows = sweep(&spec(2, 0.5, 0.5, 0.1)).unwrap();
        assert_eq!(render_sweep(&rows, Format::Csv).unwrap(), "alpha2,delta2,p_exact,p_formula\n0.5,0.5,0.25,0.25\n");
    }
}
