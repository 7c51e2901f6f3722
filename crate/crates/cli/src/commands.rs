//! Resolution of flags, config file and defaults into validated run
//! configurations, and the subcommand implementations.

use std::path::{Path, PathBuf};

use qkd_phase_bound::bound::{bound_curve_with, solve_bound, BoundCurve};
use qkd_phase_bound::channel::{
    optimize_intensities, simulate_point, DetectorModel, RatePoint, SimulationParams,
};
use qkd_phase_bound::keyrate::{
    error_tolerance_with, key_fraction_decoy, DecoySettings, KeyRateBreakdown, KeyRateOptions, LeakageMode,
    LookupMode,
};
use qkd_phase_bound::operators::ConstraintOptions;
use qkd_phase_bound::{ProtocolConfig, SolverSettings, Subset};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::args::{BoundArgs, Common, CurveArgs, DecoyArgs, GridArgs, KeyArgs, SimulateArgs, SolverArgs, ToleranceArgs};
use crate::config::ConfigFile;
use crate::error::{usage, CliError, CliResult};
use crate::measured::ingest_measured;
use crate::output::{Cell, Format, Table};
use crate::subset::{parse_subset, parse_usize_list, split_subset_list};

/// Environment variable naming the curve cache directory.
pub const CACHE_ENV: &str = "QKD_BOUND_CACHE_DIR";
pub const DEFAULT_CACHE_DIR: &str = ".qkd-bound-cache";

/// Everything a subcommand produces before rendering.
pub struct Outcome<C: Serialize> {
    pub table: Table,
    pub config: C,
    pub format: Format,
    pub output: Option<PathBuf>,
}

fn invalid(e: qkd_phase_bound::Error) -> CliError {
    usage(e.to_string())
}

fn load_config(common: &Common) -> CliResult<ConfigFile> {
    match &common.config {
        Some(p) => ConfigFile::load(p),
        None => Ok(ConfigFile::default()),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OutputConfig {
    pub format: Format,
    pub output: Option<PathBuf>,
    pub config_file: Option<PathBuf>,
}

fn resolve_output(common: &Common, cfg: &ConfigFile, default: Format) -> CliResult<OutputConfig> {
    Ok(OutputConfig {
        format: cfg.pick_or(common.format, "format", default)?,
        output: cfg.pick(common.output.clone(), "output")?,
        config_file: common.config.clone(),
    })
}

fn resolve_dim(flag: Option<usize>, cfg: &ConfigFile) -> CliResult<usize> {
    let d = cfg.require(flag, "d")?;
    if d < 2 {
        return Err(usage(format!("dimension must be at least 2 (got {d})")));
    }
    Ok(d)
}

fn resolve_subset(flag: Option<String>, cfg: &ConfigFile, d: usize) -> CliResult<Subset> {
    let spec = cfg.pick_or(flag, "subset", "full".to_string())?;
    parse_subset(&spec, d)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SolverConfig {
    pub settings: SolverSettings,
    pub options: ConstraintOptions,
}

fn resolve_solver(a: &SolverArgs, cfg: &ConfigFile) -> CliResult<SolverConfig> {
    let def = SolverSettings::default();
    let settings = SolverSettings {
        gap_tolerance: cfg.pick_or(a.gap_tol, "gap_tol", def.gap_tolerance)?,
        feas_tolerance: cfg.pick_or(a.feas_tol, "feas_tol", def.feas_tolerance)?,
        max_iter: cfg.pick_or(a.max_iter, "max_iter", def.max_iter)?,
    };
    settings.validate().map_err(invalid)?;
    let options = ConstraintOptions {
        time_joint: cfg.pick_or(a.time_joint, "time_joint", false)?,
        alice_marginal: cfg.pick_or(a.alice_marginal, "alice_marginal", false)?,
    };
    Ok(SolverConfig { settings, options })
}

#[derive(Debug, Clone, Serialize)]
pub struct GridConfig {
    pub q_min: f64,
    pub q_max: f64,
    pub q_step: f64,
    pub points: usize,
    /// `None` when caching is disabled.
    pub cache_dir: Option<PathBuf>,
}

impl GridConfig {
    pub fn grid(&self) -> Vec<f64> {
        (0..self.points)
            .map(|i| ((self.q_min + i as f64 * self.q_step) * 1e12).round() / 1e12)
            .collect()
    }
}

fn linear_points(lo: f64, hi: f64, step: f64, what: &str) -> CliResult<usize> {
    if !(lo.is_finite() && hi.is_finite() && step > 0.0 && step.is_finite()) {
        return Err(usage(format!("{what} range needs finite bounds and a positive step")));
    }
    if hi < lo {
        return Err(usage(format!("{what} range is empty ({lo} > {hi})")));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    if n > 1_000_000 {
        return Err(usage(format!("{what} range has too many points ({n})")));
    }
    Ok(n)
}

fn resolve_grid(a: &GridArgs, cfg: &ConfigFile, d: usize) -> CliResult<GridConfig> {
    let q_min = cfg.pick_or(a.q_min, "q_min", 0.0)?;
    let q_max = cfg.pick_or(a.q_max, "q_max", 0.2)?;
    let q_step = cfg.pick_or(a.q_step, "q_step", 0.001)?;
    let max_err = (d - 1) as f64 / d as f64;
    if q_min < 0.0 || q_max > max_err + 1e-12 {
        return Err(usage(format!("error-rate grid [{q_min}, {q_max}] must lie within [0, {max_err}] for d = {d}")));
    }
    let points = linear_points(q_min, q_max, q_step, "error-rate")?;
    let no_cache = cfg.pick_or(a.no_cache, "no_cache", false)?;
    let cache_dir = if no_cache {
        None
    } else {
        Some(match cfg.pick(a.cache_dir.clone(), "cache_dir")? {
            Some(p) => p,
            None => std::env::var_os(CACHE_ENV)
                .filter(|v| !v.is_empty())
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE_DIR)),
        })
    };
    Ok(GridConfig { q_min, q_max, q_step, points, cache_dir })
}

#[derive(Serialize)]
struct CurveKey<'a> {
    d: usize,
    subset: &'a Subset,
    grid: &'a [f64],
    options: ConstraintOptions,
    settings: SolverSettings,
}

/// Cache file for a curve with these inputs.
pub fn cache_path(dir: &Path, d: usize, subset: &Subset, grid: &[f64], solver: &SolverConfig) -> PathBuf {
    let key = CurveKey { d, subset, grid, options: solver.options, settings: solver.settings };
    let digest = Sha256::digest(serde_json::to_vec(&key).expect("serializable key"));
    dir.join(format!("curve-d{d}-{}.json", &hex::encode(digest)[..16]))
}

/// Load the curve from the cache when a valid entry exists, otherwise
/// compute it and store it. Corrupt entries are recomputed.
pub fn obtain_curve(d: usize, subset: &Subset, grid: &GridConfig, solver: &SolverConfig) -> CliResult<BoundCurve> {
    let points = grid.grid();
    let path = grid.cache_dir.as_ref().map(|dir| cache_path(dir, d, subset, &points, solver));
    if let Some(p) = &path {
        if let Ok(curve) = BoundCurve::load(p) {
            if curve.d == d && &curve.subset == subset && curve.grid == points {
                return Ok(curve);
            }
        }
    }
    let curve = bound_curve_with(d, subset, &points, solver.options, &solver.settings)?;
    if let Some(p) = &path {
        let dir = p.parent().expect("cache file has a parent");
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.display().to_string(), source })?;
        curve.save(p)?;
    }
    Ok(curve)
}

// ---------------------------------------------------------------- bound

#[derive(Debug, Clone, Serialize)]
pub struct BoundRunConfig {
    pub command: &'static str,
    pub d: usize,
    pub subset: Subset,
    pub qber: f64,
    pub qber_f: f64,
    pub solver: SolverConfig,
    pub io: OutputConfig,
}

pub fn resolve_bound(a: &BoundArgs) -> CliResult<BoundRunConfig> {
    let cfg = load_config(&a.common)?;
    let d = resolve_dim(a.d, &cfg)?;
    let subset = resolve_subset(a.subset.clone(), &cfg, d)?;
    let qber: f64 = cfg.require(a.qber, "qber")?;
    let qber_f = cfg.pick_or(a.qber_f, "qber_f", qber)?;
    ProtocolConfig::asymmetric(d, subset.clone(), qber, qber_f).map_err(invalid)?;
    Ok(BoundRunConfig {
        command: "bound",
        d,
        subset,
        qber,
        qber_f,
        solver: resolve_solver(&a.solver, &cfg)?,
        io: resolve_output(&a.common, &cfg, Format::Json)?,
    })
}

pub fn run_bound(c: BoundRunConfig) -> CliResult<Outcome<BoundRunConfig>> {
    let protocol = ProtocolConfig::asymmetric(c.d, c.subset.clone(), c.qber, c.qber_f)?.with_options(c.solver.options);
    let p = solve_bound(&protocol, &c.solver.settings)?;
    let mut table = Table::new(vec![
        "d", "subset", "qber", "qber_f", "e_f_upper", "dual_value", "primal_value", "duality_gap", "iterations",
        "clamped",
    ]);
    table.push(vec![
        Cell::Int(c.d as u64),
        Cell::Text(c.subset.to_string()),
        Cell::Num(c.qber),
        Cell::Num(c.qber_f),
        Cell::Num(p.bound),
        Cell::Num(p.raw),
        Cell::Num(p.primal),
        Cell::Num(p.gap),
        Cell::Int(p.iterations as u64),
        Cell::Bool(p.clamped),
    ]);
    Ok(Outcome { table, format: c.io.format, output: c.io.output.clone(), config: c })
}

// ---------------------------------------------------------------- curve

#[derive(Debug, Clone, Serialize)]
pub struct CurveRunConfig {
    pub command: &'static str,
    pub d: usize,
    pub subset: Subset,
    pub grid: GridConfig,
    pub solver: SolverConfig,
    pub io: OutputConfig,
}

pub fn resolve_curve(a: &CurveArgs) -> CliResult<CurveRunConfig> {
    let cfg = load_config(&a.common)?;
    let d = resolve_dim(a.d, &cfg)?;
    Ok(CurveRunConfig {
        command: "curve",
        d,
        subset: resolve_subset(a.subset.clone(), &cfg, d)?,
        grid: resolve_grid(&a.grid, &cfg, d)?,
        solver: resolve_solver(&a.solver, &cfg)?,
        io: resolve_output(&a.common, &cfg, Format::Csv)?,
    })
}

pub fn run_curve(c: CurveRunConfig) -> CliResult<Outcome<CurveRunConfig>> {
    let curve = obtain_curve(c.d, &c.subset, &c.grid, &c.solver)?;
    let mut table = Table::new(vec!["qber", "e_f_upper", "duality_gap"]);
    for i in 0..curve.grid.len() {
        table.push(vec![Cell::Num(curve.grid[i]), Cell::Num(curve.bounds[i]), Cell::Num(curve.gaps[i])]);
    }
    Ok(Outcome { table, format: c.io.format, output: c.io.output.clone(), config: c })
}

// ------------------------------------------------------------ tolerance

#[derive(Debug, Clone, Serialize)]
pub struct ToleranceJob {
    pub d: usize,
    pub spec: String,
    pub subset: Subset,
}

#[derive(Debug, Clone, Serialize)]
pub struct ToleranceRunConfig {
    pub command: &'static str,
    pub jobs: Vec<ToleranceJob>,
    pub solver: SolverConfig,
    pub io: OutputConfig,
}

pub fn resolve_tolerance(a: &ToleranceArgs) -> CliResult<ToleranceRunConfig> {
    let cfg = load_config(&a.common)?;
    let dims = parse_usize_list(&cfg.require(a.d.clone(), "d")?, "dimension")?;
    if dims.is_empty() {
        return Err(usage("--d needs at least one dimension"));
    }
    let specs = split_subset_list(&cfg.pick_or(a.subsets.clone(), "subsets", "full".to_string())?);
    if specs.is_empty() {
        return Err(usage("--subsets needs at least one subset"));
    }
    let mut jobs = Vec::new();
    for &d in &dims {
        if d < 2 {
            return Err(usage(format!("dimension must be at least 2 (got {d})")));
        }
        for spec in &specs {
            jobs.push(ToleranceJob { d, spec: spec.clone(), subset: parse_subset(spec, d)? });
        }
    }
    Ok(ToleranceRunConfig {
        command: "tolerance",
        jobs,
        solver: resolve_solver(&a.solver, &cfg)?,
        io: resolve_output(&a.common, &cfg, Format::Csv)?,
    })
}

pub fn run_tolerance(c: ToleranceRunConfig) -> CliResult<Outcome<ToleranceRunConfig>> {
    let mut table = Table::new(vec!["d", "subset", "indices", "tolerance"]);
    for job in &c.jobs {
        let tol = error_tolerance_with(job.d, &job.subset, c.solver.options, &c.solver.settings)?;
        table.push(vec![
            Cell::Int(job.d as u64),
            Cell::Text(job.spec.clone()),
            Cell::Text(job.subset.to_string()),
            Cell::Num(tol),
        ]);
    }
    Ok(Outcome { table, format: c.io.format, output: c.io.output.clone(), config: c })
}

// ---------------------------------------------------------------- decoy

fn parse_lookup(s: &str) -> CliResult<LookupMode> {
    match s.to_ascii_lowercase().as_str() {
        "conservative" => Ok(LookupMode::Conservative),
        "strict" => Ok(LookupMode::Strict),
        _ => Err(usage(format!("unknown lookup mode '{s}' (expected conservative or strict)"))),
    }
}

fn parse_leakage(s: &str) -> CliResult<LeakageMode> {
    match s.to_ascii_lowercase().as_str() {
        "aggregate" => Ok(LeakageMode::Aggregate),
        "signal" => Ok(LeakageMode::Signal),
        _ => Err(usage(format!("unknown leakage mode '{s}' (expected aggregate or signal)"))),
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct KeyConfig {
    pub symbol_rate: f64,
    pub decoy_probabilities: [f64; 3],
    pub options: KeyRateOptions,
}

fn resolve_key(a: &KeyArgs, cfg: &ConfigFile, d: usize) -> CliResult<KeyConfig> {
    let symbol_rate = cfg.pick_or(a.symbol_rate, "symbol_rate", 2.5e9 / d as f64)?;
    if !(symbol_rate > 0.0 && symbol_rate.is_finite()) {
        return Err(usage(format!("symbol rate must be positive (got {symbol_rate})")));
    }
    let probs = [
        cfg.pick_or(a.p_mu, "p_mu", 0.8)?,
        cfg.pick_or(a.p_nu, "p_nu", 0.1)?,
        cfg.pick_or(a.p_omega, "p_omega", 0.1)?,
    ];
    // Validate the probabilities against a nominal intensity triple.
    DecoySettings::new(0.5, 0.2, 0.1, probs[0], probs[1], probs[2]).map_err(invalid)?;
    let options = KeyRateOptions {
        lookup: match cfg.pick(a.lookup.clone(), "lookup")? {
            Some(s) => parse_lookup(&s)?,
            None => LookupMode::default(),
        },
        leakage: match cfg.pick(a.leakage.clone(), "leakage")? {
            Some(s) => parse_leakage(&s)?,
            None => LeakageMode::default(),
        },
        ec_efficiency: cfg.pick_or(a.ec_efficiency, "ec_efficiency", 1.0)?,
    };
    if !(options.ec_efficiency >= 1.0 && options.ec_efficiency.is_finite()) {
        return Err(usage(format!("--ec-efficiency must be at least 1 (got {})", options.ec_efficiency)));
    }
    Ok(KeyConfig { symbol_rate, decoy_probabilities: probs, options })
}

#[derive(Debug, Clone, Serialize)]
pub struct DecoyRunConfig {
    pub command: &'static str,
    pub d: usize,
    pub subset: Subset,
    pub input: PathBuf,
    pub key: KeyConfig,
    /// Bound curve used for the lookup; absent for complete subsets.
    pub curve: Option<GridConfig>,
    pub solver: SolverConfig,
    pub io: OutputConfig,
}

pub fn resolve_decoy(a: &DecoyArgs) -> CliResult<DecoyRunConfig> {
    let cfg = load_config(&a.common)?;
    let d = resolve_dim(a.d, &cfg)?;
    let subset = resolve_subset(a.subset.clone(), &cfg, d)?;
    let curve = if subset.is_complete(d) { None } else { Some(resolve_grid(&a.grid, &cfg, d)?) };
    Ok(DecoyRunConfig {
        command: "decoy",
        d,
        input: cfg.require(a.input.clone(), "input")?,
        key: resolve_key(&a.key, &cfg, d)?,
        curve,
        subset,
        solver: resolve_solver(&a.solver, &cfg)?,
        io: resolve_output(&a.common, &cfg, Format::Json)?,
    })
}

const BREAKDOWN_COLUMNS: [&str; 16] = [
    "y_t0", "y_f0", "y_t1", "y_f1", "r_t1", "e_t1", "e_f1", "lookup_q", "e_f_upper", "r_t", "e_t", "delta_leak",
    "k", "k_raw", "rate_bits_per_s", "clamps",
];

fn clamp_summary(b: &KeyRateBreakdown) -> String {
    let c = &b.clamps;
    let flags = [
        ("y_t0_floored", c.y_t0_floored),
        ("y_f0_floored", c.y_f0_floored),
        ("y_t1_floored", c.y_t1_floored),
        ("y_t1_capped", c.y_t1_capped),
        ("y_f1_floored", c.y_f1_floored),
        ("y_f1_capped", c.y_f1_capped),
        ("e_t1_floored", c.e_t1_floored),
        ("e_t1_capped", c.e_t1_capped),
        ("e_f1_floored", c.e_f1_floored),
        ("e_f1_capped", c.e_f1_capped),
        ("k_floored", c.k_floored),
    ];
    let fired: Vec<&str> = flags.iter().filter(|f| f.1).map(|f| f.0).collect();
    if fired.is_empty() { "none".into() } else { fired.join(";") }
}

fn breakdown_row(b: &KeyRateBreakdown) -> Vec<Cell> {
    let nums = [
        b.y_t0, b.y_f0, b.y_t1, b.y_f1, b.r_t1, b.e_t1, b.e_f1, b.lookup_q, b.e_f_upper, b.r_t, b.e_t, b.delta_leak,
        b.k, b.k_raw, b.rate_bits_per_s,
    ];
    let mut row: Vec<Cell> = nums.into_iter().map(Cell::Num).collect();
    row.push(Cell::Text(clamp_summary(b)));
    row
}

pub fn run_decoy(c: DecoyRunConfig) -> CliResult<Outcome<DecoyRunConfig>> {
    let measured = ingest_measured(&c.input)?;
    let [mu, nu, omega] = measured.intensities;
    let [pm, pn, po] = c.key.decoy_probabilities;
    let settings = DecoySettings::new(mu, nu, omega, pm, pn, po).map_err(|e| CliError::Input(e.to_string()))?;
    let curve = match &c.curve {
        Some(g) => Some(obtain_curve(c.d, &c.subset, g, &c.solver)?),
        None => None,
    };
    let b = key_fraction_decoy(
        c.d,
        &c.subset,
        &settings,
        &measured.stats,
        curve.as_ref(),
        c.key.symbol_rate,
        &c.key.options,
    )?;
    let mut columns = vec!["mu", "nu", "omega"];
    columns.extend(BREAKDOWN_COLUMNS);
    let mut table = Table::new(columns);
    let mut row = vec![Cell::Num(mu), Cell::Num(nu), Cell::Num(omega)];
    row.extend(breakdown_row(&b));
    table.push(row);
    Ok(Outcome { table, format: c.io.format, output: c.io.output.clone(), config: c })
}

// ------------------------------------------------------------- simulate

#[derive(Debug, Clone, Serialize)]
pub struct LossConfig {
    pub loss_min: f64,
    pub loss_max: f64,
    pub loss_step: f64,
    pub points: usize,
}

impl LossConfig {
    pub fn losses(&self) -> Vec<f64> {
        (0..self.points)
            .map(|i| ((self.loss_min + i as f64 * self.loss_step) * 1e9).round() / 1e9)
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulateRunConfig {
    pub command: &'static str,
    pub simulation: SimulationParams,
    pub detector: DetectorModel,
    pub losses: LossConfig,
    /// Fixed `(mu, nu, omega)`; optimised per loss when absent.
    pub fixed_intensities: Option<[f64; 3]>,
    pub curve: Option<GridConfig>,
    pub solver: SolverConfig,
    pub io: OutputConfig,
}

pub fn resolve_simulate(a: &SimulateArgs) -> CliResult<SimulateRunConfig> {
    let cfg = load_config(&a.common)?;
    let d = resolve_dim(a.d, &cfg)?;
    let subset = resolve_subset(a.subset.clone(), &cfg, d)?;
    let key = resolve_key(&a.key, &cfg, d)?;

    let mut sim = SimulationParams::defaults(d, subset.clone());
    sim.symbol_rate = key.symbol_rate;
    sim.decoy_probabilities = key.decoy_probabilities;
    sim.key_options = key.options;
    sim.p_t = cfg.pick_or(a.p_t, "p_t", sim.p_t)?;
    sim.p_f = 1.0 - sim.p_t;
    sim.eta_det = cfg.pick_or(a.eta_det, "eta_det", sim.eta_det)?;
    sim.dark_count = cfg.pick_or(a.dark_count, "dark_count", sim.dark_count)?;
    let both = cfg.pick_or(a.intrinsic_error, "intrinsic_error", sim.intrinsic_error_t)?;
    sim.intrinsic_error_t = cfg.pick_or(a.intrinsic_error_t, "intrinsic_error_t", both)?;
    sim.intrinsic_error_f = cfg.pick_or(a.intrinsic_error_f, "intrinsic_error_f", both)?;
    sim.intensity_bounds = (
        cfg.pick_or(a.intensity_min, "intensity_min", sim.intensity_bounds.0)?,
        cfg.pick_or(a.intensity_max, "intensity_max", sim.intensity_bounds.1)?,
    );
    sim.validate().map_err(invalid)?;

    let sat_max = cfg.pick(a.sat_max_rate, "sat_max_rate")?;
    let sat_scale = cfg.pick(a.sat_scale_rate, "sat_scale_rate")?;
    let detector = match cfg.pick_or(a.detector.clone(), "detector", "ideal".to_string())?.to_ascii_lowercase().as_str() {
        "ideal" => {
            if sat_max.is_some() || sat_scale.is_some() {
                return Err(usage("saturation parameters require --detector saturating"));
            }
            DetectorModel::Ideal
        }
        "saturating" => {
            let DetectorModel::Saturating { max_rate, scale_rate } = DetectorModel::saturating_default() else {
                unreachable!()
            };
            DetectorModel::Saturating {
                max_rate: sat_max.unwrap_or(max_rate),
                scale_rate: sat_scale.unwrap_or(scale_rate),
            }
        }
        other => return Err(usage(format!("unknown detector '{other}' (expected ideal or saturating)"))),
    };
    detector.validate().map_err(invalid)?;

    let loss_min = cfg.pick_or(a.loss_min, "loss_min", 0.0)?;
    let loss_max = cfg.pick_or(a.loss_max, "loss_max", 40.0)?;
    let loss_step = cfg.pick_or(a.loss_step, "loss_step", 0.5)?;
    if loss_min < 0.0 {
        return Err(usage(format!("loss must be non-negative (got {loss_min})")));
    }
    let points = linear_points(loss_min, loss_max, loss_step, "loss")?;

    let fixed = [cfg.pick(a.mu, "mu")?, cfg.pick(a.nu, "nu")?, cfg.pick(a.omega, "omega")?];
    let fixed_intensities = match fixed {
        [Some(mu), Some(nu), Some(omega)] => {
            sim.decoy_settings(mu, nu, omega).map_err(invalid)?;
            Some([mu, nu, omega])
        }
        [None, None, None] => None,
        _ => return Err(usage("--mu, --nu and --omega must be given together")),
    };

    let curve = if subset.is_complete(d) { None } else { Some(resolve_grid(&a.grid, &cfg, d)?) };
    Ok(SimulateRunConfig {
        command: "simulate",
        simulation: sim,
        detector,
        losses: LossConfig { loss_min, loss_max, loss_step, points },
        fixed_intensities,
        curve,
        solver: resolve_solver(&a.solver, &cfg)?,
        io: resolve_output(&a.common, &cfg, Format::Csv)?,
    })
}

pub fn run_simulate(c: SimulateRunConfig) -> CliResult<Outcome<SimulateRunConfig>> {
    let sim = &c.simulation;
    let curve = match &c.curve {
        Some(g) => Some(obtain_curve(sim.d, &sim.subset, g, &c.solver)?),
        None => None,
    };
    let mut table = Table::new(vec![
        "loss_db", "mu", "nu", "omega", "y1", "r_t1", "e_f1", "e_f_upper", "k", "rate_bits_per_s",
    ]);
    for loss in c.losses.losses() {
        let point = match c.fixed_intensities {
            Some([mu, nu, omega]) => {
                let s = sim.decoy_settings(mu, nu, omega)?;
                let breakdown = simulate_point(sim, loss, &c.detector, &s, curve.as_ref()).ok();
                RatePoint { loss_db: loss, settings: s, breakdown, positive: breakdown.is_some_and(|b| b.k > 0.0) }
            }
            None => optimize_intensities(sim, loss, &c.detector, curve.as_ref())?,
        };
        let [mu, nu, omega] = point.settings.intensities();
        let mut row = vec![Cell::Num(loss), Cell::Num(mu), Cell::Num(nu), Cell::Num(omega)];
        match point.breakdown {
            Some(b) => row.extend(
                [b.y_t1, b.r_t1, b.e_f1, b.e_f_upper, b.k, b.rate_bits_per_s].into_iter().map(Cell::Num),
            ),
            None => row.extend(std::iter::repeat_n(Cell::Num(f64::NAN), 6)),
        }
        table.push(row);
    }
    Ok(Outcome { table, format: c.io.format, output: c.io.output.clone(), config: c })
}
