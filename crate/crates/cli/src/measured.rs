//! Measured per-intensity statistics from CSV.
//!
//! Columns: `basis` (`T` or `F`), `intensity_label` (`mu`, `nu`, `omega`),
//! `mean_photon_number`, `gain`, `error_rate`, and optionally `state_index`.
//! With `state_index`, rows sharing a basis and intensity are combined: the
//! gain is averaged over states and the error rate is the gain-weighted mean.
//! Lines starting with `#` are ignored.

use std::collections::BTreeMap;
use std::path::Path;

use qkd_phase_bound::keyrate::{BasisStatistics, Intensity, MeasuredStatistics};
use serde::Deserialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Deserialize)]
struct Row {
    basis: String,
    intensity_label: String,
    mean_photon_number: f64,
    gain: f64,
    error_rate: f64,
    #[serde(default)]
    state_index: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasuredInput {
    pub stats: MeasuredStatistics,
    /// Mean photon numbers for mu, nu, omega.
    pub intensities: [f64; 3],
}

fn input_err(msg: String) -> CliError {
    CliError::Input(msg)
}

pub fn ingest_measured(path: &Path) -> CliResult<MeasuredInput> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_measured(&text)
}

pub fn parse_measured(text: &str) -> CliResult<MeasuredInput> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    // (basis, intensity) -> (photon number, [(gain, error, state)])
    let mut groups: BTreeMap<(usize, usize), (f64, Vec<(f64, f64, Option<usize>)>)> = BTreeMap::new();
    for (i, rec) in reader.deserialize::<Row>().enumerate() {
        let row_no = i + 1;
        let row = rec.map_err(|e| {
            let column = match e.kind() {
                csv::ErrorKind::Deserialize { err, .. } => err
                    .field()
                    .map(|f| format!(", column {}", f + 1))
                    .unwrap_or_default(),
                _ => String::new(),
            };
            input_err(format!("row {row_no}{column}: {e}"))
        })?;
        let basis = match row.basis.as_str() {
            "T" | "t" => 0,
            "F" | "f" => 1,
            other => return Err(input_err(format!("row {row_no}, column basis: unknown basis '{other}'"))),
        };
        let k = match row.intensity_label.as_str() {
            "mu" => Intensity::Mu,
            "nu" => Intensity::Nu,
            "omega" => Intensity::Omega,
            other => {
                return Err(input_err(format!(
                    "row {row_no}, column intensity_label: unknown intensity '{other}'"
                )))
            }
        };
        for (col, v) in [("gain", row.gain), ("error_rate", row.error_rate)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(input_err(format!("row {row_no}, column {col}: value {v} outside [0, 1]")));
            }
        }
        if !(row.mean_photon_number >= 0.0 && row.mean_photon_number.is_finite()) {
            return Err(input_err(format!(
                "row {row_no}, column mean_photon_number: invalid value {}",
                row.mean_photon_number
            )));
        }
        let entry = groups
            .entry((basis, k.index()))
            .or_insert((row.mean_photon_number, Vec::new()));
        if (entry.0 - row.mean_photon_number).abs() > 1e-12 {
            return Err(input_err(format!(
                "row {row_no}: mean photon number {} disagrees with {} given earlier for {}",
                row.mean_photon_number,
                entry.0,
                k.label()
            )));
        }
        let duplicate = match row.state_index {
            None => !entry.1.is_empty(),
            Some(_) => entry.1.iter().any(|&(_, _, s)| s.is_none() || s == row.state_index),
        };
        if duplicate {
            return Err(input_err(format!(
                "row {row_no}: duplicate statistics for {}-basis {}",
                ["T", "F"][basis],
                k.label()
            )));
        }
        entry.1.push((row.gain, row.error_rate, row.state_index));
    }

    let mut bases = [BasisStatistics { gain: [0.0; 3], error_rate: [0.0; 3] }; 2];
    let mut intensities = [f64::NAN; 3];
    for (b, name) in [(0usize, "T"), (1, "F")] {
        if !groups.keys().any(|&(bb, _)| bb == b) {
            return Err(input_err(format!("missing {name}-basis statistics")));
        }
        for k in Intensity::ALL {
            let (photons, rows) = groups
                .get(&(b, k.index()))
                .ok_or_else(|| input_err(format!("missing {name}-basis statistics for {}", k.label())))?;
            if !intensities[k.index()].is_nan() && (intensities[k.index()] - photons).abs() > 1e-12 {
                return Err(input_err(format!(
                    "mean photon number for {} differs between bases ({} vs {})",
                    k.label(),
                    intensities[k.index()],
                    photons
                )));
            }
            intensities[k.index()] = *photons;
            let total: f64 = rows.iter().map(|r| r.0).sum();
            bases[b].gain[k.index()] = total / rows.len() as f64;
            bases[b].error_rate[k.index()] = if total > 0.0 {
                rows.iter().map(|r| r.0 * r.1).sum::<f64>() / total
            } else {
                0.0
            };
        }
    }
    let stats = MeasuredStatistics::new(bases[0], bases[1])?;
    Ok(MeasuredInput { stats, intensities })
}
