mod common;

use proptest::prelude::*;
use qkd_phase_bound::bound::bound_curve;
use qkd_phase_bound::channel::{simulate_point, DetectorModel, SimulationParams};
use qkd_phase_bound::keyrate::{
    key_fraction_decoy, single_photon_error, single_photon_error_f, single_photon_gain, single_photon_yield,
    zero_photon_yield, BasisStatistics, DecoySettings, KeyRateOptions, LeakageMode, LookupMode, MeasuredStatistics,
};
use qkd_phase_bound::{Error, Subset};

fn reference_intensities() -> DecoySettings {
    DecoySettings::with_default_probabilities(0.66, 0.16, 0.002).unwrap()
}

/// Noise-free statistics of a channel with total transmittance `eta`.
fn model_stats(s: &DecoySettings, eta: f64, dark: f64, d: usize, e_d: f64) -> BasisStatistics {
    let ks = s.intensities();
    let gain = ks.map(|k| common::oracle_gain(eta, dark, d, k));
    let mut error_rate = [0.0; 3];
    for i in 0..3 {
        error_rate[i] = common::oracle_error_gain(eta, dark, d, ks[i], e_d) / gain[i];
    }
    BasisStatistics { gain, error_rate }
}

#[test]
fn poisson_decomposition_matches_closed_form() {
    for i in 0..=20 {
        let k = 0.002 + (0.97 - 0.002) * i as f64 / 20.0;
        for j in 0..=10 {
            let eta = 0.01 + (0.75 - 0.01) * j as f64 / 10.0;
            let closed = 1.0 - (-eta * k).exp();
            assert!((common::oracle_gain(eta, 0.0, 4, k) - closed).abs() <= 1e-10);
        }
    }
}

#[test]
fn single_photon_yield_example() {
    let s = reference_intensities();
    let y1 = single_photon_yield(&s, &model_stats(&s, 0.1, 0.0, 4, 0.0)).unwrap();
    assert!((y1 - 0.0937).abs() <= 5e-4, "{y1}");
    assert!(y1 <= 0.1);
    let lossless = single_photon_yield(&s, &model_stats(&s, 1.0, 0.0, 4, 0.0)).unwrap();
    assert!((0.9..=1.0).contains(&lossless), "{lossless}");
}

#[test]
fn vacuum_yield_examples() {
    let s = reference_intensities();
    assert_eq!(zero_photon_yield(&s, &model_stats(&s, 0.1, 0.0, 4, 0.0)), 0.0);
    let dark = 1e-5;
    let y0 = zero_photon_yield(&s, &model_stats(&s, 0.0, dark, 4, 0.0));
    assert!((y0 / (dark / 4.0) - 1.0).abs() <= 1e-3, "{y0}");
}

#[test]
fn single_photon_error_overestimates_intrinsic_error() {
    let s = reference_intensities();
    let e_d = 0.02;
    let b = model_stats(&s, 0.1, 0.0, 4, e_d);
    let y1 = single_photon_yield(&s, &b).unwrap();
    let e1 = single_photon_error(&s, &b, y1, "F").unwrap();
    assert!(e1 >= e_d);
    assert!((e1 / e_d - 1.245).abs() <= 0.01, "{}", e1 / e_d);
}

#[test]
fn noiseless_full_subset_key_is_single_photon_gain() {
    let s = reference_intensities();
    let b = model_stats(&s, 1.0, 0.0, 4, 0.0);
    let stats = MeasuredStatistics::new(b, b).unwrap();
    let k = key_fraction_decoy(4, &Subset::full(4), &s, &stats, None, 1e9, &KeyRateOptions::default()).unwrap();
    assert_eq!(k.e_f1, 0.0);
    assert_eq!(k.e_f_upper, 0.0);
    assert!((k.k - 2.0 * k.r_t1).abs() <= 1e-15);
    assert_eq!(k.rate_bits_per_s, 1e9 * k.k);
}

#[test]
fn complete_subsets_use_single_photon_error_directly() {
    let s = reference_intensities();
    let t = model_stats(&s, 0.1, 1e-7, 4, 0.03);
    let f = model_stats(&s, 0.1, 1e-7, 4, 0.02);
    let stats = MeasuredStatistics::new(t, f).unwrap();
    for subset in [Subset::full(4), Subset::first(3).unwrap()] {
        let k = key_fraction_decoy(4, &subset, &s, &stats, None, 1.0, &KeyRateOptions::default()).unwrap();
        assert_eq!(k.e_f_upper, k.e_f1);
        let y_f1 = single_photon_yield(&s, &stats.f).unwrap();
        assert_eq!(k.e_f1, single_photon_error_f(&s, &stats, y_f1).unwrap());
    }
}

#[test]
fn partial_subset_needs_matching_curve() {
    let s = reference_intensities();
    let b = model_stats(&s, 0.1, 1e-7, 4, 0.02);
    let stats = MeasuredStatistics::new(b, b).unwrap();
    let opts = KeyRateOptions::default();
    let one = Subset::first(1).unwrap();
    assert!(matches!(
        key_fraction_decoy(4, &one, &s, &stats, None, 1.0, &opts),
        Err(Error::InvalidConfig(_))
    ));
    let grid: Vec<f64> = (0..=10).map(|i| i as f64 / 100.0).collect();
    let other = bound_curve(4, &Subset::first(2).unwrap(), &grid).unwrap();
    assert!(key_fraction_decoy(4, &one, &s, &stats, Some(&other), 1.0, &opts).is_err());
    let short = bound_curve(4, &one, &grid[..3]).unwrap();
    assert!(matches!(
        key_fraction_decoy(4, &one, &s, &stats, Some(&short), 1.0, &opts),
        Err(Error::OutOfRange { .. })
    ));
}

#[test]
fn zero_yield_is_reported() {
    let s = reference_intensities();
    let dead = BasisStatistics { gain: [0.0; 3], error_rate: [0.0; 3] };
    let live = model_stats(&s, 0.1, 0.0, 4, 0.02);
    let stats = MeasuredStatistics::new(live, dead).unwrap();
    let err = key_fraction_decoy(4, &Subset::full(4), &s, &stats, None, 1.0, &KeyRateOptions::default());
    assert!(matches!(err, Err(Error::ZeroYield("F"))));
}

#[test]
fn measured_statistics_range_checked() {
    let bad = BasisStatistics { gain: [1.2, 0.1, 0.1], error_rate: [0.0; 3] };
    let good = BasisStatistics { gain: [0.1; 3], error_rate: [0.0; 3] };
    assert!(MeasuredStatistics::new(bad, good).is_err());
    assert!(MeasuredStatistics::new(good, bad).is_err());
}

#[test]
fn clamps_are_recorded() {
    let s = reference_intensities();
    let opts = KeyRateOptions::default();
    let full = Subset::full(4);

    // lossy, dark-count free: Y0 floored; clean F basis floors e_F1
    let t = model_stats(&s, 0.1, 0.0, 4, 0.02);
    let f = model_stats(&s, 0.1, 0.0, 4, 0.0);
    let k = key_fraction_decoy(4, &full, &s, &MeasuredStatistics::new(t, f).unwrap(), None, 1.0, &opts).unwrap();
    assert!(k.clamps.y_t0_floored && k.clamps.y_f0_floored);
    assert!(!k.clamps.k_floored && k.k > 0.0);

    let inverted = BasisStatistics { gain: [0.05, 0.01, 0.001], error_rate: [0.0, 0.0, 0.9] };
    let k = key_fraction_decoy(4, &full, &s, &MeasuredStatistics::new(t, inverted).unwrap(), None, 1.0, &opts).unwrap();
    assert!(k.clamps.e_f1_floored && k.e_f1 == 0.0);

    // decoy gain far above the signal: yields capped at 1
    let odd = BasisStatistics { gain: [0.0, 1.0, 0.0], error_rate: [0.0; 3] };
    let k = key_fraction_decoy(4, &full, &s, &MeasuredStatistics::new(odd, odd).unwrap(), None, 1.0, &opts).unwrap();
    assert!(k.clamps.y_t1_capped && k.clamps.y_f1_capped && k.y_t1 == 1.0);

    // signal far above the decoy: yields floored at 0
    let low = BasisStatistics { gain: [0.9, 0.0, 0.0], error_rate: [0.0; 3] };
    let k = key_fraction_decoy(4, &full, &s, &MeasuredStatistics::new(t, low).unwrap(), None, 1.0, &opts);
    assert!(matches!(k, Err(Error::ZeroYield("F"))));
    let lowish = BasisStatistics { gain: [0.9, 0.0, 0.0], error_rate: [0.1, 0.0, 0.0] };
    let k = key_fraction_decoy(4, &full, &s, &MeasuredStatistics::new(lowish, f).unwrap(), None, 1.0, &opts);
    assert!(matches!(k, Err(Error::ZeroYield("T"))));
    let strict = KeyRateOptions { lookup: LookupMode::Strict, ..opts };
    let k = key_fraction_decoy(4, &full, &s, &MeasuredStatistics::new(lowish, f).unwrap(), None, 1.0, &strict).unwrap();
    assert!(k.clamps.y_t1_floored && k.r_t1 == 0.0 && k.clamps.k_floored && k.k == 0.0);

    // noisy decoys: single-photon errors capped at 1/2
    let noisy = BasisStatistics { gain: [0.05, 0.012, 1e-4], error_rate: [0.6, 0.7, 0.0] };
    let k = key_fraction_decoy(4, &full, &s, &MeasuredStatistics::new(noisy, noisy).unwrap(), None, 1.0, &opts).unwrap();
    assert!(k.clamps.e_f1_capped && k.clamps.e_t1_capped && k.e_f1 == 0.5);
    assert!(k.clamps.k_floored && k.k == 0.0);

    let k = key_fraction_decoy(4, &full, &s, &MeasuredStatistics::new(t, inverted).unwrap(), None, 1.0, &opts).unwrap();
    assert!(!k.clamps.e_t1_floored);
    let k = key_fraction_decoy(4, &full, &s, &MeasuredStatistics::new(inverted, t).unwrap(), None, 1.0, &opts).unwrap();
    assert!(k.clamps.e_t1_floored);
}

#[test]
fn leakage_modes() {
    let s = reference_intensities();
    let mut t = model_stats(&s, 0.1, 1e-7, 4, 0.02);
    t.error_rate[0] = 0.05;
    let stats = MeasuredStatistics::new(t, t).unwrap();
    let agg = key_fraction_decoy(4, &Subset::full(4), &s, &stats, None, 1.0, &KeyRateOptions::default()).unwrap();
    let sig = KeyRateOptions { leakage: LeakageMode::Signal, ..KeyRateOptions::default() };
    let sig = key_fraction_decoy(4, &Subset::full(4), &s, &stats, None, 1.0, &sig).unwrap();
    assert_eq!(sig.e_t, 0.05);
    assert!(agg.e_t < 0.05 && agg.e_t > 0.02);
    let inefficient = KeyRateOptions { ec_efficiency: 1.2, ..KeyRateOptions::default() };
    let ineff = key_fraction_decoy(4, &Subset::full(4), &s, &stats, None, 1.0, &inefficient).unwrap();
    assert!((ineff.delta_leak - 1.2 * agg.delta_leak).abs() < 1e-15);
    let below_one = KeyRateOptions { ec_efficiency: 0.9, ..KeyRateOptions::default() };
    assert!(key_fraction_decoy(4, &Subset::full(4), &s, &stats, None, 1.0, &below_one).is_err());
}

/// Independent recomputation of the whole chain for d = 4, one monitoring
/// state, ideal detectors at 4 dB.
#[test]
fn one_state_chain_matches_direct_recomputation() {
    let d = 4usize;
    let subset = Subset::first(1).unwrap();
    let grid: Vec<f64> = (0..=200).map(|i| i as f64 / 1000.0).collect();
    let curve = bound_curve(d, &subset, &grid).unwrap();
    let sim = SimulationParams::defaults(d, subset);
    let (mu, nu, om) = (0.5, 0.15, 0.05);
    let settings = sim.decoy_settings(mu, nu, om).unwrap();
    let got = simulate_point(&sim, 4.0, &DetectorModel::Ideal, &settings, Some(&curve)).unwrap();

    let eta = 0.75 * 10f64.powf(-0.4);
    let (pd, ed, df) = (1e-7, 0.02, d as f64);
    let ks = [mu, nu, om];
    let p = [0.8, 0.1, 0.1];
    let r: Vec<f64> = ks.iter().map(|k| 1.0 - (-eta * k).exp() + pd / df).collect();
    let e: Vec<f64> = ks.iter().map(|k| ed * (1.0 - (-eta * k).exp()) + (df - 1.0) * pd / df).collect();
    let y0 = ((nu * r[2] * om.exp() - om * r[1] * nu.exp()) / (nu - om)).max(0.0);
    let den = mu * nu - mu * om - nu * nu + om * om;
    let y1 = (mu / den * (r[1] * nu.exp() - r[2] * om.exp() - (nu * nu - om * om) / (mu * mu) * (r[0] * mu.exp() - y0)))
        .clamp(0.0, 1.0);
    let r1 = (p[0] * mu * (-mu).exp() + p[1] * nu * (-nu).exp() + p[2] * om * (-om).exp()) * y1;
    let e1 = ((e[1] * nu.exp() - e[2] * om.exp()) / ((nu - om) * y1)).clamp(0.0, 0.5);
    let idx = grid.iter().position(|&g| g >= e1 - 1e-12).unwrap();
    let eu = curve.bounds[idx];
    let h = |x: f64| -> f64 {
        let x = x.min((df - 1.0) / df);
        if x == 0.0 {
            0.0
        } else {
            -x * (x / (df - 1.0)).log2() - (1.0 - x) * (1.0 - x).log2()
        }
    };
    let rt: f64 = (0..3).map(|i| p[i] * r[i]).sum();
    let et: f64 = (0..3).map(|i| p[i] * e[i]).sum::<f64>() / rt;
    let k = (r1 * (2.0 - h(eu)) - rt * h(et)).max(0.0);

    assert!((got.y_t1 - y1).abs() <= 1e-12);
    assert!((got.r_t1 - r1).abs() <= 1e-12);
    assert!((got.e_f1 - e1).abs() <= 1e-12);
    assert_eq!(got.e_f_upper, eu);
    assert!((got.k - k).abs() <= 1e-9, "{} vs {}", got.k, k);
    assert!(got.k > 0.0);
    assert_eq!(single_photon_gain(&settings, y1), got.r_t1);
}

proptest! {
    #[test]
    fn estimators_are_safe(
        eta in 0.01f64..0.5,
        dark in prop::sample::select(vec![0.0, 1e-7, 1e-5]),
        e_d in 0.0f64..0.1,
        mu in 0.4f64..0.97,
        nu_frac in 0.05f64..0.9,
        om_frac in 0.0f64..0.9,
    ) {
        let nu = nu_frac * mu * 0.5;
        let om = om_frac * nu * 0.5;
        prop_assume!(nu + om < mu && om < nu);
        let s = DecoySettings::with_default_probabilities(mu, nu, om).unwrap();
        for d in [2usize, 4] {
            let b = model_stats(&s, eta, dark, d, e_d);
            let y1 = single_photon_yield(&s, &b).unwrap();
            prop_assert!(y1 <= common::true_single_photon_yield(eta, dark, d) + 1e-9);
            let e1 = single_photon_error(&s, &b, y1, "F").unwrap();
            prop_assert!(e1 >= common::true_single_photon_error(eta, dark, d, e_d) - 1e-9);
        }
    }
}
