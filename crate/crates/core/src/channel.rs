//! Lossy-channel statistics, detector saturation and per-loss intensity
//! optimisation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bound::BoundCurve;
use crate::error::{Error, Result};
use crate::keyrate::{
    key_fraction_decoy, BasisStatistics, DecoySettings, KeyRateBreakdown, KeyRateOptions, MeasuredStatistics,
};
use crate::operators::Subset;

/// `10^(-loss/10)`.
pub fn transmittance(loss_db: f64) -> f64 {
    10f64.powf(-loss_db / 10.0)
}

/// `0, 0.5, ..., 40` dB.
pub fn default_loss_grid() -> Vec<f64> {
    (0..=80).map(|i| i as f64 * 0.5).collect()
}

fn unit_interval(what: &'static str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::OutOfDomain { what, value: v, lo: 0.0, hi: 1.0 });
    }
    Ok(())
}

/// One basis of the channel as seen by the receiver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub eta_ch: f64,
    pub eta_det: f64,
    /// Dark-count probability per symbol.
    pub dark_count: f64,
    /// Intrinsic (misalignment) error rate.
    pub intrinsic_error: f64,
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        unit_interval("eta_ch", self.eta_ch)?;
        unit_interval("eta_det", self.eta_det)?;
        unit_interval("dark count probability", self.dark_count)?;
        unit_interval("intrinsic error", self.intrinsic_error)
    }

    fn click_probability(&self, k: f64) -> f64 {
        1.0 - (-self.eta_det * self.eta_ch * k).exp()
    }
}

/// `1 - exp(-eta_det eta_ch k) + P_d / d`, capped at 1.
pub fn gain(p: &ChannelParams, k: f64, d: usize) -> f64 {
    (p.click_probability(k) + p.dark_count / d as f64).min(1.0)
}

/// `e_d (1 - exp(-eta_det eta_ch k)) + (d-1) P_d / d`; the error rate is this
/// divided by [`gain`].
pub fn error_prob(p: &ChannelParams, k: f64, d: usize) -> f64 {
    p.intrinsic_error * p.click_probability(k) + (d as f64 - 1.0) * p.dark_count / d as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DetectorModel {
    Ideal,
    /// Effective count rate `max_rate * tanh(r / scale_rate)`, both in Hz.
    Saturating { max_rate: f64, scale_rate: f64 },
}

impl DetectorModel {
    /// 6.5 MHz maximum, 8.63 MHz scale.
    pub fn saturating_default() -> Self {
        DetectorModel::Saturating { max_rate: 6.5e6, scale_rate: 8.63e6 }
    }

    pub fn validate(&self) -> Result<()> {
        if let DetectorModel::Saturating { max_rate, scale_rate } = *self {
            if !(max_rate > 0.0 && scale_rate > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "saturation rates must be positive (a = {max_rate}, b = {scale_rate})"
                )));
            }
        }
        Ok(())
    }

    /// Effective/expected count-rate ratio at expected rate `r_x`.
    pub fn efficiency_factor(&self, r_x: f64) -> f64 {
        if r_x > 0.0 {
            apply_saturation(self, r_x) / r_x
        } else {
            1.0
        }
    }
}

/// Effective count rate of a detector with expected rate `r_x` (Hz).
pub fn apply_saturation(model: &DetectorModel, r_x: f64) -> f64 {
    match *model {
        DetectorModel::Ideal => r_x,
        DetectorModel::Saturating { max_rate, scale_rate } => max_rate * (r_x / scale_rate).tanh(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationParams {
    pub d: usize,
    pub subset: Subset,
    /// Symbols per second.
    pub symbol_rate: f64,
    pub p_t: f64,
    pub p_f: f64,
    /// Transmission probabilities of the signal and two decoy intensities.
    pub decoy_probabilities: [f64; 3],
    /// Allowed range of every mean photon number.
    pub intensity_bounds: (f64, f64),
    pub eta_det: f64,
    pub dark_count: f64,
    pub intrinsic_error_t: f64,
    pub intrinsic_error_f: f64,
    pub key_options: KeyRateOptions,
}

impl SimulationParams {
    /// Dark counts 1e-7, intrinsic error 0.005 d, 2500/d MHz, decoy
    /// probabilities 0.8/0.1/0.1, basis probabilities 0.9/0.1, intensities
    /// in [0.05, 0.97], detector efficiency 0.75.
    pub fn defaults(d: usize, subset: Subset) -> Self {
        let e_d = 0.005 * d as f64;
        Self {
            d,
            subset,
            symbol_rate: 2.5e9 / d as f64,
            p_t: 0.9,
            p_f: 0.1,
            decoy_probabilities: [0.8, 0.1, 0.1],
            intensity_bounds: (0.05, 0.97),
            eta_det: 0.75,
            dark_count: 1e-7,
            intrinsic_error_t: e_d,
            intrinsic_error_f: e_d,
            key_options: KeyRateOptions::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::InvalidDimension(self.d));
        }
        if let Some(i) = self.subset.iter().find(|&i| i >= self.d) {
            return Err(Error::IndexOutOfRange { index: i, dim: self.d });
        }
        if !(self.symbol_rate > 0.0 && self.symbol_rate.is_finite()) {
            return Err(Error::InvalidConfig(format!("symbol rate must be positive (got {})", self.symbol_rate)));
        }
        unit_interval("P_T", self.p_t)?;
        unit_interval("P_F", self.p_f)?;
        if (self.p_t + self.p_f - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig(format!(
                "basis probabilities must sum to 1 (got {} + {})",
                self.p_t, self.p_f
            )));
        }
        let (lo, hi) = self.intensity_bounds;
        if !(lo > 0.0 && lo < hi && hi <= 1.0) {
            return Err(Error::InvalidConfig(format!("intensity bounds ({lo}, {hi}) must satisfy 0 < lo < hi <= 1")));
        }
        let [a, b, c] = self.decoy_probabilities;
        DecoySettings::new(0.5, 0.2, 0.1, a, b, c)?;
        unit_interval("eta_det", self.eta_det)?;
        unit_interval("dark count probability", self.dark_count)?;
        unit_interval("intrinsic T error", self.intrinsic_error_t)?;
        unit_interval("intrinsic F error", self.intrinsic_error_f)
    }

    pub fn decoy_settings(&self, mu: f64, nu: f64, omega: f64) -> Result<DecoySettings> {
        let [a, b, c] = self.decoy_probabilities;
        DecoySettings::new(mu, nu, omega, a, b, c)
    }
}

fn basis_statistics(p: &ChannelParams, settings: &DecoySettings, d: usize) -> BasisStatistics {
    let mut out = BasisStatistics { gain: [0.0; 3], error_rate: [0.0; 3] };
    for (i, k) in settings.intensities().into_iter().enumerate() {
        let r = gain(p, k, d);
        out.gain[i] = r;
        out.error_rate[i] = if r > 0.0 { (error_prob(p, k, d) / r).min(1.0) } else { 0.0 };
    }
    out
}

/// Per-basis channel parameters at `loss_db`, with saturation folded into
/// the detection efficiency.
///
/// The T basis is one effective detector receiving a fraction `P_T` of the
/// clicks; each of the `d` F-basis detectors receives `P_F / d`.
pub fn basis_channels(
    sim: &SimulationParams,
    loss_db: f64,
    model: &DetectorModel,
    settings: &DecoySettings,
) -> (ChannelParams, ChannelParams) {
    let eta_ch = transmittance(loss_db);
    let base = ChannelParams {
        eta_ch,
        eta_det: sim.eta_det,
        dark_count: sim.dark_count,
        intrinsic_error: sim.intrinsic_error_t,
    };
    let clicks: f64 = settings
        .intensities()
        .iter()
        .zip(settings.probabilities())
        .map(|(&k, p)| p * base.click_probability(k))
        .sum();
    let rate_t = sim.symbol_rate * sim.p_t * clicks;
    let rate_f = sim.symbol_rate * sim.p_f / sim.d as f64 * clicks;
    let t = ChannelParams { eta_det: sim.eta_det * model.efficiency_factor(rate_t), ..base };
    let f = ChannelParams {
        eta_det: sim.eta_det * model.efficiency_factor(rate_f),
        intrinsic_error: sim.intrinsic_error_f,
        ..base
    };
    (t, f)
}

/// Expected measured statistics for both bases.
pub fn simulate_statistics(
    sim: &SimulationParams,
    loss_db: f64,
    model: &DetectorModel,
    settings: &DecoySettings,
) -> Result<MeasuredStatistics> {
    let (t, f) = basis_channels(sim, loss_db, model, settings);
    MeasuredStatistics::new(basis_statistics(&t, settings, sim.d), basis_statistics(&f, settings, sim.d))
}

/// Decoy-chain key rate at fixed intensities.
pub fn simulate_point(
    sim: &SimulationParams,
    loss_db: f64,
    model: &DetectorModel,
    settings: &DecoySettings,
    curve: Option<&BoundCurve>,
) -> Result<KeyRateBreakdown> {
    if !(loss_db >= 0.0) {
        return Err(Error::OutOfDomain { what: "loss (dB)", value: loss_db, lo: 0.0, hi: f64::INFINITY });
    }
    let stats = simulate_statistics(sim, loss_db, model, settings)?;
    key_fraction_decoy(sim.d, &sim.subset, settings, &stats, curve, sim.symbol_rate, &sim.key_options)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub loss_db: f64,
    pub settings: DecoySettings,
    /// `None` when no admissible intensities produced a valid decoy chain.
    pub breakdown: Option<KeyRateBreakdown>,
    /// False when the best admissible point has zero key.
    pub positive: bool,
}

impl RatePoint {
    pub fn rate_bits_per_s(&self) -> f64 {
        self.breakdown.map_or(0.0, |b| b.rate_bits_per_s)
    }
}

const COARSE_STEP: f64 = 0.02;
const FINE_STEP: f64 = 1e-4;

/// Maximise the key fraction over `(mu, nu)` with `omega` at the lower
/// intensity bound: coarse grid, then compass search with step halving.
///
/// Points where the decoy chain fails are skipped. The objective is the
/// unfloored key fraction so the search still moves toward positive key
/// when every candidate is below zero.
pub fn optimize_intensities(
    sim: &SimulationParams,
    loss_db: f64,
    model: &DetectorModel,
    curve: Option<&BoundCurve>,
) -> Result<RatePoint> {
    sim.validate()?;
    model.validate()?;
    let (lo, hi) = sim.intensity_bounds;
    let omega = lo;
    let eval = |mu: f64, nu: f64| -> Option<(DecoySettings, KeyRateBreakdown)> {
        if !(mu <= hi && nu > omega && nu + omega < mu) {
            return None;
        }
        let s = sim.decoy_settings(mu, nu, omega).ok()?;
        simulate_point(sim, loss_db, model, &s, curve).ok().map(|b| (s, b))
    };

    let mut best: Option<(f64, f64, KeyRateBreakdown, DecoySettings)> = None;
    let consider = |mu: f64, nu: f64, best: &mut Option<(f64, f64, KeyRateBreakdown, DecoySettings)>| {
        if let Some((s, b)) = eval(mu, nu) {
            if best.as_ref().is_none_or(|(_, _, bb, _)| b.k_raw > bb.k_raw) {
                *best = Some((mu, nu, b, s));
            }
        }
    };

    let steps = ((hi - lo) / COARSE_STEP).floor() as usize;
    for i in 0..=steps {
        let mu = lo + i as f64 * COARSE_STEP;
        for j in 1..=steps {
            let nu = omega + j as f64 * COARSE_STEP;
            if nu + omega >= mu {
                break;
            }
            consider(mu, nu, &mut best);
        }
    }

    let Some((mut mu, mut nu, _, _)) = best else {
        let s = sim.decoy_settings(hi, omega + 0.5 * (hi - 2.0 * omega), omega)?;
        return Ok(RatePoint { loss_db, settings: s, breakdown: None, positive: false });
    };

    let mut step = COARSE_STEP / 2.0;
    while step >= FINE_STEP {
        let mut moved = false;
        for (dm, dn) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0), (1.0, 1.0), (-1.0, -1.0)] {
            let before = best.as_ref().map(|b| b.2.k_raw);
            consider(mu + dm * step, nu + dn * step, &mut best);
            let after = best.as_ref().map(|b| b.2.k_raw);
            if after != before {
                let b = best.as_ref().unwrap();
                mu = b.0;
                nu = b.1;
                moved = true;
            }
        }
        if !moved {
            step /= 2.0;
        }
    }

    let (_, _, breakdown, settings) = best.unwrap();
    Ok(RatePoint { loss_db, settings, positive: breakdown.k > 0.0, breakdown: Some(breakdown) })
}

/// Optimised key rate at every loss in `losses`, evaluated in parallel.
pub fn simulate_rate_curve(
    sim: &SimulationParams,
    model: &DetectorModel,
    losses: &[f64],
    curve: Option<&BoundCurve>,
) -> Result<Vec<RatePoint>> {
    losses
        .par_iter()
        .map(|&loss| optimize_intensities(sim, loss, model, curve))
        .collect()
}
