//! Shipped device configurations and deterministic synthetic data sets
//! built from them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::analysis::{bath_point_from_area, fit_lorentzian, BathPoint, DampingPoint, FitOptions, ThermalCalPoint};
use crate::config::Config;
use crate::cooling::{log_space, optical_damping};
use crate::error::Result;
use crate::grid;
use crate::params::{CavityParams, DetectionChain, Drive, Environment, MechanicalMode, System};
use crate::spectra::{check_stability, displacement_spectrum, intensity_spectrum, CavityNoiseSpectrum};
use crate::units::{hz_to_rad, FULL_TURN};

/// Device 1: the (2,2) mode at 1.575 MHz used for the calibration and
/// bath-temperature data.
pub const DEVICE_ONE_TOML: &str = include_str!("../fixtures/device1.toml");
/// Device 2: the (4,4) mode at 3.2 MHz used for the white-noise-limited sweep.
pub const DEVICE_TWO_TOML: &str = include_str!("../fixtures/device2.toml");

pub fn device_one_config() -> Config {
    Config::from_toml_str(DEVICE_ONE_TOML).expect("shipped device-1 config is valid")
}

pub fn device_two_config() -> Config {
    Config::from_toml_str(DEVICE_TWO_TOML).expect("shipped device-2 config is valid")
}

pub fn device_one() -> Result<System> {
    device_one_config().to_system()
}

pub fn device_two() -> Result<System> {
    device_two_config().to_system()
}

/// Synthetic thermal-calibration series: model transmission spectra (floors
/// and quantum terms included, cavity noise off) for `system` with coupling
/// `coupling_g` (rad/s per m) at each photon number, all at the configured
/// bath temperature. Each spectrum spans ±30 linewidths of the damped peak.
pub fn thermal_calibration_series(
    system: &System,
    coupling_g: f64,
    photon_numbers: &[f64],
) -> Result<Vec<ThermalCalPoint>> {
    let mut base = system.clone();
    base.cavity_noise = None;
    base.drive = Drive::new(base.drive.photon_number, coupling_g, &base.mode)?;
    photon_numbers
        .iter()
        .map(|&n| {
            let sys = base.with_photon_number(n);
            let gamma = sys.mode.gamma_m + optical_damping(&sys.cavity, &sys.mode, &sys.drive);
            let wm = sys.mode.omega_m;
            let grid = grid::linear(wm - 30.0 * gamma, wm + 30.0 * gamma, 4001)?;
            let spectrum = intensity_spectrum(&grid, &sys)?.total;
            Ok(ThermalCalPoint { t_bath: sys.environment.t_bath, window: (wm - 25.0 * gamma, wm + 25.0 * gamma), spectrum })
        })
        .collect()
}

/// Device-1 thermal-calibration data: six powers from 3e5 to 6e6 photons,
/// synthesized at G/2π = 1.8e16 Hz/m.
pub fn device_one_thermal_series() -> Result<Vec<ThermalCalPoint>> {
    let sys = device_one()?;
    thermal_calibration_series(&sys, hz_to_rad(DEVICE_ONE_THERMAL_G_HZ), &log_space(3e5, 6e6, 6))
}

/// Coupling used to synthesize [`device_one_thermal_series`], Hz/m.
pub const DEVICE_ONE_THERMAL_G_HZ: f64 = 1.8e16;

/// Damping series anchored on one measured point: Γ grows linearly in
/// photon number from Γ_m to `anchor_gamma` (rad/s) at `anchor_photons`.
/// Photocurrents follow from the detection chain and κ_R.
pub fn damping_series(
    system: &System,
    anchor_gamma: f64,
    anchor_photons: f64,
    photon_numbers: &[f64],
) -> Vec<DampingPoint> {
    let gm = system.mode.gamma_m;
    photon_numbers
        .iter()
        .map(|&n| DampingPoint {
            photocurrent: system.detection.photocurrent(n, system.cavity.kappa_r),
            gamma: gm + (anchor_gamma - gm) * n / anchor_photons,
        })
        .collect()
}

/// Device-1 damping data: linewidth 5.5 kHz at 6e6 intracavity photons,
/// sampled at six powers down to 3e5.
pub fn device_one_damping_series() -> Result<Vec<DampingPoint>> {
    let sys = device_one()?;
    Ok(damping_series(&sys, hz_to_rad(5.5e3), 6e6, &log_space(3e5, 6e6, 6)))
}

/// Bath-temperature points from thermal-only displacement spectra at each
/// cryostat temperature and photon number, pushed through the Lorentzian
/// fit and the T_eff·Γ/Γ_m readout. `offset_k` is added to the true bath
/// temperature to emulate poor thermalisation. A positive `scatter` applies
/// seeded Gaussian relative noise of that size to each estimate and reports
/// it as the point's uncertainty.
pub fn thermalized_bath_points(
    system: &System,
    temperatures: &[f64],
    photon_numbers: &[f64],
    offset_k: f64,
    scatter: f64,
    seed: u64,
) -> Result<Vec<BathPoint>> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for &t in temperatures {
        for &n in photon_numbers {
            let mut sys = system.with_photon_number(n);
            sys.cavity_noise = None;
            sys.environment = Environment::new(t + offset_k, sys.environment.occupation_form, &sys.mode)?;
            let gamma = sys.mode.gamma_m + optical_damping(&sys.cavity, &sys.mode, &sys.drive);
            let wm = sys.mode.omega_m;
            let grid = grid::linear(wm - 30.0 * gamma, wm + 30.0 * gamma, 4001)?;
            let spectrum = displacement_spectrum(&grid, &sys)?.thermal;
            let fit = fit_lorentzian(&spectrum, (wm - 25.0 * gamma, wm + 25.0 * gamma), &FitOptions::default())?;
            let mut point = bath_point_from_area(t, fit.area, fit.area_err, fit.fwhm, &sys.mode, 0.0);
            if scatter > 0.0 {
                let kick: f64 = StandardNormal.sample(&mut rng);
                point.sigma = scatter * point.t_bath_estimate;
                point.t_bath_estimate *= 1.0 + scatter * kick;
            }
            out.push(point);
        }
    }
    Ok(out)
}

/// Random but physically sensible system for property tests, drawn from a
/// ChaCha20 stream seeded with `seed`. Returns `None` when the draw is
/// dynamically unstable. Red detuning, cooperativities from 1e-2 to 1e4,
/// and enhanced couplings kept below a third of min(κ, ω_m).
pub fn random_system(seed: u64) -> Option<System> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut u = |lo: f64, hi: f64| lo + (hi - lo) * rng.random::<f64>();
    let omega_m = hz_to_rad(u(0.5e6, 5e6));
    let q = 10f64.powf(u(4.0, 7.5));
    let mass = 10f64.powf(u(-13.0, -9.0));
    let mode = MechanicalMode::new(omega_m, q, mass).ok()?;
    let kappa = omega_m * 10f64.powf(u(-1.0, 1.0));
    let (a, b, c) = (u(0.05, 1.0), u(0.05, 1.0), u(0.0, 1.0));
    let s = a + b + c;
    let detuning = -omega_m * 10f64.powf(u(-1.5, 0.7));
    let cavity = CavityParams::new(kappa * a / s, kappa * b / s, kappa * c / s, detuning).ok()?;
    let environment = Environment::with_occupation(10f64.powf(u(-1.0, 6.0)), &mode).ok()?;
    let g0 = omega_m * 10f64.powf(u(-9.0, -5.0));
    let coop = 10f64.powf(u(-2.0, 4.0));
    let cap = (kappa.min(omega_m) / 3.0 / g0).powi(2);
    let n = (coop * kappa * mode.gamma_m / (4.0 * g0 * g0)).min(cap);
    let drive = Drive::new(n, g0 / mode.z_zp, &mode).ok()?;
    let mut detection = DetectionChain::new(u(0.2, 1.0), u(0.2, 1.0), cavity.omega_c).ok()?;
    let shot = 1.0 / (detection.efficiency() * cavity.kappa_r * n);
    if u(0.0, 1.0) < 0.3 {
        let current = detection.photocurrent(n, cavity.kappa_r);
        detection = detection.with_dark_current_psd(shot * current * current * u(0.0, 2.0)).ok()?;
    }
    let pick = u(0.0, 3.0);
    let cavity_noise = if pick < 1.0 {
        None
    } else if pick < 2.0 {
        Some(CavityNoiseSpectrum::White { level: shot * 10f64.powf(u(-2.0, 2.0)) })
    } else {
        let fwhm = omega_m * 10f64.powf(u(-5.0, -2.0));
        Some(CavityNoiseSpectrum::Lorentzian {
            center: omega_m * u(0.8, 1.2),
            fwhm,
            area: shot * fwhm / FULL_TURN * 10f64.powf(u(0.0, 4.0)),
        })
    };
    let system = System { mode, cavity, drive, environment, detection, cavity_noise };
    check_stability(&system).ok()?;
    Some(system)
}
