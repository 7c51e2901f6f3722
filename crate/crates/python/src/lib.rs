//! Python bindings: bounds, bound curves, tolerances, decoy key rates and
//! channel simulation. Structured results come back as plain dicts.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBool, PyDict, PyList, PyString};
use qkd_phase_bound::bound::{bound_curve_with, default_grid, solve_bound};
use qkd_phase_bound::channel::{
    default_loss_grid, optimize_intensities, simulate_point, DetectorModel, SimulationParams,
};
use qkd_phase_bound::keyrate::{
    error_tolerance_with, key_fraction_decoy, BasisStatistics, DecoySettings, KeyRateOptions, LeakageMode,
    LookupMode, MeasuredStatistics,
};
use qkd_phase_bound::operators::ConstraintOptions;
use qkd_phase_bound::{BoundCurve, Error, ProtocolConfig, SolverSettings, Subset};
use serde_json::Value;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::InvalidDimension(_)
        | Error::IndexOutOfRange { .. }
        | Error::InvalidConfig(_)
        | Error::OutOfDomain { .. }
        | Error::OutOfRange { .. }
        | Error::InvalidSettings(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => PyBool::new(py, *b).to_owned().into_any(),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_pyobject(py)?.into_any(),
            None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => PyString::new(py, s).into_any(),
        Value::Array(a) => {
            let list = PyList::empty(py);
            for x in a {
                list.append(to_py(py, x)?)?;
            }
            list.into_any()
        }
        Value::Object(m) => {
            let dict = PyDict::new(py);
            for (k, x) in m {
                dict.set_item(k, to_py(py, x)?)?;
            }
            dict.into_any()
        }
    })
}

fn to_dict<'py>(py: Python<'py>, v: &impl serde::Serialize) -> PyResult<Bound<'py, PyAny>> {
    let value = serde_json::to_value(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    to_py(py, &value)
}

/// `None` means every monitoring state.
fn subset_of(d: usize, subset: Option<Vec<usize>>) -> PyResult<Subset> {
    match subset {
        None => Ok(Subset::full(d)),
        Some(ix) => Subset::new(ix, d).map_err(py_err),
    }
}

fn settings_of(gap_tol: f64, feas_tol: f64, max_iter: usize) -> PyResult<SolverSettings> {
    let s = SolverSettings { gap_tolerance: gap_tol, feas_tolerance: feas_tol, max_iter };
    s.validate().map_err(py_err)?;
    Ok(s)
}

fn lookup_of(s: &str) -> PyResult<LookupMode> {
    match s {
        "conservative" => Ok(LookupMode::Conservative),
        "strict" => Ok(LookupMode::Strict),
        _ => Err(PyValueError::new_err(format!("unknown lookup mode '{s}'"))),
    }
}

fn leakage_of(s: &str) -> PyResult<LeakageMode> {
    match s {
        "aggregate" => Ok(LeakageMode::Aggregate),
        "signal" => Ok(LeakageMode::Signal),
        _ => Err(PyValueError::new_err(format!("unknown leakage mode '{s}'"))),
    }
}

/// Certified upper bound on the phase error rate.
///
/// Returns a dict with `bound`, `raw`, `primal`, `gap`, `iterations` and
/// `clamped`.
#[pyfunction]
#[pyo3(signature = (d, qber, subset=None, qber_f=None, time_joint=false, alice_marginal=false, gap_tol=1e-8, feas_tol=1e-8, max_iter=200))]
#[allow(clippy::too_many_arguments)]
fn phase_error_bound<'py>(
    py: Python<'py>,
    d: usize,
    qber: f64,
    subset: Option<Vec<usize>>,
    qber_f: Option<f64>,
    time_joint: bool,
    alice_marginal: bool,
    gap_tol: f64,
    feas_tol: f64,
    max_iter: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let subset = subset_of(d, subset)?;
    let settings = settings_of(gap_tol, feas_tol, max_iter)?;
    let cfg = ProtocolConfig::asymmetric(d, subset, qber, qber_f.unwrap_or(qber))
        .map_err(py_err)?
        .with_options(ConstraintOptions { time_joint, alice_marginal });
    let point = py.detach(|| solve_bound(&cfg, &settings)).map_err(py_err)?;
    to_dict(py, &point)
}

/// Error rate at which the single-photon key fraction vanishes (3 decimals).
#[pyfunction]
#[pyo3(signature = (d, subset=None))]
fn error_tolerance(py: Python<'_>, d: usize, subset: Option<Vec<usize>>) -> PyResult<f64> {
    let subset = subset_of(d, subset)?;
    py.detach(|| error_tolerance_with(d, &subset, ConstraintOptions::default(), &SolverSettings::default()))
        .map_err(py_err)
}

/// Tabulated monotone bound curve with conservative lookup.
#[pyclass(name = "BoundCurve", module = "qkd_phase_bound", frozen)]
struct PyBoundCurve {
    inner: BoundCurve,
}

#[pymethods]
impl PyBoundCurve {
    /// Solve one bound per grid point (default `0, 0.001, ..., 0.2`).
    #[staticmethod]
    #[pyo3(signature = (d, subset=None, grid=None, gap_tol=1e-8, feas_tol=1e-8, max_iter=200))]
    fn compute(
        py: Python<'_>,
        d: usize,
        subset: Option<Vec<usize>>,
        grid: Option<Vec<f64>>,
        gap_tol: f64,
        feas_tol: f64,
        max_iter: usize,
    ) -> PyResult<Self> {
        let subset = subset_of(d, subset)?;
        let settings = settings_of(gap_tol, feas_tol, max_iter)?;
        let grid = grid.unwrap_or_else(default_grid);
        let inner = py
            .detach(|| bound_curve_with(d, &subset, &grid, ConstraintOptions::default(), &settings))
            .map_err(py_err)?;
        Ok(Self { inner })
    }

    /// Load a checksummed curve file.
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(Self { inner: BoundCurve::load(path).map_err(py_err)? })
    }

    fn save(&self, path: &str) -> PyResult<()> {
        self.inner.save(path).map_err(py_err)
    }

    /// Bound at the smallest grid point at or above `q`.
    fn lookup(&self, q: f64) -> PyResult<f64> {
        self.inner.lookup(q).map_err(py_err)
    }

    #[getter]
    fn d(&self) -> usize {
        self.inner.d
    }

    #[getter]
    fn subset(&self) -> Vec<usize> {
        self.inner.subset.iter().collect()
    }

    #[getter]
    fn grid(&self) -> Vec<f64> {
        self.inner.grid.clone()
    }

    #[getter]
    fn bounds(&self) -> Vec<f64> {
        self.inner.bounds.clone()
    }

    #[getter]
    fn gaps(&self) -> Vec<f64> {
        self.inner.gaps.clone()
    }

    fn __len__(&self) -> usize {
        self.inner.grid.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "BoundCurve(d={}, subset={}, points={}, max_q={})",
            self.inner.d,
            self.inner.subset,
            self.inner.grid.len(),
            self.inner.max_q()
        )
    }
}

/// Decoy-state key rate from measured gains and error rates.
///
/// `t_gain`, `t_error`, `f_gain` and `f_error` are ordered (mu, nu, omega).
#[pyfunction]
#[pyo3(signature = (d, intensities, t_gain, t_error, f_gain, f_error, subset=None, curve=None, symbol_rate=None, probabilities=(0.8, 0.1, 0.1), lookup="conservative", leakage="aggregate", ec_efficiency=1.0))]
#[allow(clippy::too_many_arguments)]
fn key_rate<'py>(
    py: Python<'py>,
    d: usize,
    intensities: (f64, f64, f64),
    t_gain: [f64; 3],
    t_error: [f64; 3],
    f_gain: [f64; 3],
    f_error: [f64; 3],
    subset: Option<Vec<usize>>,
    curve: Option<PyRef<'py, PyBoundCurve>>,
    symbol_rate: Option<f64>,
    probabilities: (f64, f64, f64),
    lookup: &str,
    leakage: &str,
    ec_efficiency: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let subset = subset_of(d, subset)?;
    let (mu, nu, omega) = intensities;
    let (pm, pn, po) = probabilities;
    let settings = DecoySettings::new(mu, nu, omega, pm, pn, po).map_err(py_err)?;
    let stats = MeasuredStatistics::new(
        BasisStatistics { gain: t_gain, error_rate: t_error },
        BasisStatistics { gain: f_gain, error_rate: f_error },
    )
    .map_err(py_err)?;
    let options = KeyRateOptions { lookup: lookup_of(lookup)?, leakage: leakage_of(leakage)?, ec_efficiency };
    let b = key_fraction_decoy(
        d,
        &subset,
        &settings,
        &stats,
        curve.as_ref().map(|c| &c.inner),
        symbol_rate.unwrap_or(2.5e9 / d as f64),
        &options,
    )
    .map_err(py_err)?;
    to_dict(py, &b)
}

/// Key rate versus loss with default device parameters.
///
/// Intensities are optimised per loss unless `intensities` is given.
/// Returns a list of dicts with `loss_db`, `settings`, `breakdown` (None
/// where no decoy chain exists) and `positive`.
#[pyfunction]
#[pyo3(signature = (d, subset=None, losses=None, detector="ideal", curve=None, intensities=None, lookup="conservative"))]
#[allow(clippy::too_many_arguments)]
fn simulate<'py>(
    py: Python<'py>,
    d: usize,
    subset: Option<Vec<usize>>,
    losses: Option<Vec<f64>>,
    detector: &str,
    curve: Option<PyRef<'py, PyBoundCurve>>,
    intensities: Option<(f64, f64, f64)>,
    lookup: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let mut sim = SimulationParams::defaults(d, subset_of(d, subset)?);
    sim.key_options.lookup = lookup_of(lookup)?;
    let model = match detector {
        "ideal" => DetectorModel::Ideal,
        "saturating" => DetectorModel::saturating_default(),
        _ => return Err(PyValueError::new_err(format!("unknown detector '{detector}'"))),
    };
    let curve = curve.as_ref().map(|c| c.inner.clone());
    let losses = losses.unwrap_or_else(default_loss_grid);
    let points = py
        .detach(|| {
            losses
                .iter()
                .map(|&loss| match intensities {
                    None => optimize_intensities(&sim, loss, &model, curve.as_ref()),
                    Some((mu, nu, omega)) => {
                        let s = sim.decoy_settings(mu, nu, omega)?;
                        let breakdown = simulate_point(&sim, loss, &model, &s, curve.as_ref()).ok();
                        Ok(qkd_phase_bound::channel::RatePoint {
                            loss_db: loss,
                            settings: s,
                            breakdown,
                            positive: breakdown.is_some_and(|b| b.k > 0.0),
                        })
                    }
                })
                .collect::<Result<Vec<_>, Error>>()
        })
        .map_err(py_err)?;
    to_dict(py, &points)
}

#[pymodule]
#[pyo3(name = "qkd_phase_bound")]
fn qkd_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(phase_error_bound, m)?)?;
    m.add_function(wrap_pyfunction!(error_tolerance, m)?)?;
    m.add_function(wrap_pyfunction!(key_rate, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_class::<PyBoundCurve>()?;
    Ok(())
}
