//! Phase-error bounds from the SDP, tabulated curves and conservative lookup.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::operators::{build_constraints, ConstraintOptions, ProtocolConfig, Subset};
use crate::sdp::{solve_max, SdpProblem, SolverSettings};

/// Largest raw decrease between consecutive curve points absorbed by the
/// monotone post-pass before the curve is rejected.
pub const MONOTONE_TOL: f64 = 1e-5;

/// Grid values within this distance of `q` count as equal in lookups.
const GRID_EPS: f64 = 1e-12;

/// One certified bound with its solver diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundPoint {
    pub q: f64,
    /// Dual value clamped to `[0, (d-1)/d]`.
    pub bound: f64,
    /// Dual value as returned by the solver.
    pub raw: f64,
    pub primal: f64,
    pub gap: f64,
    pub iterations: usize,
    pub clamped: bool,
}

/// Certified upper bound for one protocol configuration.
pub fn solve_bound(config: &ProtocolConfig, settings: &SolverSettings) -> Result<BoundPoint> {
    let set = build_constraints(config)?;
    let problem = SdpProblem::from_constraint_set(&set)?;
    let sol = solve_max(&problem, settings)?;
    let raw = sol.optimal_value()?;
    let max = config.max_error();
    let bound = raw.clamp(0.0, max);
    Ok(BoundPoint {
        q: config.qber_t,
        bound,
        raw,
        primal: sol.primal_value,
        gap: sol.gap,
        iterations: sol.iterations,
        clamped: bound != raw,
    })
}

/// `e_F^U` for dimension `d`, monitoring subset `subset` and symmetric error
/// rate `q`, with default solver settings.
pub fn phase_error_bound(d: usize, subset: &Subset, q: f64) -> Result<f64> {
    let config = ProtocolConfig::new(d, subset.clone(), q)?;
    Ok(solve_bound(&config, &SolverSettings::default())?.bound)
}

/// `0, 0.001, ..., 0.200`.
pub fn default_grid() -> Vec<f64> {
    (0..=200).map(|i| i as f64 / 1000.0).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCurve {
    pub d: usize,
    pub subset: Subset,
    pub options: ConstraintOptions,
    pub settings: SolverSettings,
    pub grid: Vec<f64>,
    /// Monotone bounds used for lookups.
    pub bounds: Vec<f64>,
    /// Solver dual values before clamping and the monotone pass.
    pub raw: Vec<f64>,
    pub gaps: Vec<f64>,
    pub clamped: Vec<bool>,
    pub created_unix: u64,
}

#[derive(Serialize, Deserialize)]
struct CacheFile {
    checksum: String,
    curve: BoundCurve,
}

fn checksum(curve: &BoundCurve) -> Result<String> {
    let payload = serde_json::to_vec(curve)?;
    Ok(hex::encode(Sha256::digest(&payload)))
}

impl BoundCurve {
    /// Bound at the smallest grid point `>= q`.
    pub fn lookup(&self, q: f64) -> Result<f64> {
        let max = *self.grid.last().unwrap_or(&f64::NAN);
        if !(q >= 0.0) {
            return Err(Error::OutOfDomain { what: "error rate", value: q, lo: 0.0, hi: max });
        }
        let idx = self.grid.partition_point(|&g| g < q - GRID_EPS);
        match self.bounds.get(idx) {
            Some(&b) => Ok(b),
            None => Err(Error::OutOfRange { q, max }),
        }
    }

    pub fn max_q(&self) -> f64 {
        self.grid.last().copied().unwrap_or(0.0)
    }

    pub fn to_json(&self) -> Result<String> {
        let file = CacheFile { checksum: checksum(self)?, curve: self.clone() };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: CacheFile = serde_json::from_str(text)?;
        let computed = checksum(&file.curve)?;
        if computed != file.checksum {
            return Err(Error::Checksum { stored: file.checksum, computed });
        }
        Ok(file.curve)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Bound at the smallest grid point `>= q`; never extrapolates.
pub fn lookup_bound(curve: &BoundCurve, q: f64) -> Result<f64> {
    curve.lookup(q)
}

/// Curve with symmetric errors, default options and default solver settings.
pub fn bound_curve(d: usize, subset: &Subset, grid: &[f64]) -> Result<BoundCurve> {
    bound_curve_with(d, subset, grid, ConstraintOptions::default(), &SolverSettings::default())
}

/// One solve per grid point (in parallel), then a running maximum so that
/// lookups stay conservative.
pub fn bound_curve_with(
    d: usize,
    subset: &Subset,
    grid: &[f64],
    options: ConstraintOptions,
    settings: &SolverSettings,
) -> Result<BoundCurve> {
    settings.validate()?;
    if grid.is_empty() {
        return Err(Error::InvalidConfig("empty grid".into()));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidConfig("grid must be strictly ascending".into()));
    }
    let configs = grid
        .iter()
        .map(|&q| Ok(ProtocolConfig::new(d, subset.clone(), q)?.with_options(options)))
        .collect::<Result<Vec<_>>>()?;

    let points = configs
        .par_iter()
        .map(|cfg| {
            solve_bound(cfg, settings).map_err(|e| Error::CurvePoint { q: cfg.qber_t, source: Box::new(e) })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut bounds = Vec::with_capacity(points.len());
    let mut running = f64::NEG_INFINITY;
    for p in &points {
        let drop = running - p.bound;
        if drop > MONOTONE_TOL {
            return Err(Error::NonMonotone { q: p.q, drop });
        }
        running = running.max(p.bound);
        bounds.push(running);
    }

    Ok(BoundCurve {
        d,
        subset: subset.clone(),
        options,
        settings: *settings,
        grid: grid.to_vec(),
        bounds,
        raw: points.iter().map(|p| p.raw).collect(),
        gaps: points.iter().map(|p| p.gap).collect(),
        clamped: points.iter().map(|p| p.clamped).collect(),
        created_unix: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|t| t.as_secs())
            .unwrap_or(0),
    })
}
