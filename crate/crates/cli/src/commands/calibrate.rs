use std::fs;
use std::path::Path;

use optomech::analysis::{
    calibrate_g_damping, calibrate_g_geometric, calibrate_g_thermal, pairwise_spread, CalibrationMethod,
    CalibrationReport, DampingPoint, ThermalCalPoint,
};
use optomech::cavity3::mode_overlap;
use optomech::fixtures;
use optomech::io::{read_spectrum, read_table};
use optomech::units::hz_to_rad;
use optomech::{Quantity, Sidedness, System};
use serde::{Deserialize, Serialize};

use crate::args::{CalibrateArgs, MethodArg};
use crate::failure::Failure;
use crate::run::{load_config, LoadedConfig, Run};

/// One spectrum of a thermal-calibration series index.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThermalSeriesEntry {
    pub t_bath_k: f64,
    pub window_hz: [f64; 2],
    /// Spectrum CSV, relative to the index file.
    pub file: String,
}

#[derive(Serialize)]
struct Spread {
    a: CalibrationMethod,
    b: CalibrationMethod,
    spread: f64,
}

#[derive(Serialize)]
struct CalibrationOutput {
    reports: Vec<CalibrationReport>,
    pairwise_spread: Vec<Spread>,
    max_pairwise_spread: Option<f64>,
}

fn is_builtin_device_one(cfg: &LoadedConfig) -> bool {
    cfg.source == "builtin:device-1"
}

pub fn read_thermal_series(index: &Path) -> Result<Vec<ThermalCalPoint>, Failure> {
    let text = fs::read_to_string(index).map_err(|e| Failure::config(format!("{}: {e}", index.display())))?;
    let entries: Vec<ThermalSeriesEntry> = serde_json::from_str(&text)?;
    let dir = index.parent().map(Path::to_path_buf).unwrap_or_default();
    entries
        .iter()
        .map(|e| {
            let spectrum = read_spectrum(&dir.join(&e.file), Some((Quantity::RelativeIntensity, Sidedness::OneSided)))?;
            Ok(ThermalCalPoint {
                t_bath: e.t_bath_k,
                window: (hz_to_rad(e.window_hz[0]), hz_to_rad(e.window_hz[1])),
                spectrum,
            })
        })
        .collect()
}

pub fn read_damping(path: &Path) -> Result<Vec<DampingPoint>, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::config(format!("{}: {e}", path.display())))?;
    read_table(&text)?
        .into_iter()
        .map(|row| match row.as_slice() {
            [current, gamma_hz, ..] => Ok(DampingPoint { photocurrent: *current, gamma: hz_to_rad(*gamma_hz) }),
            _ => Err(Failure::config(format!("{}: rows need photocurrent_a,gamma_hz", path.display()))),
        })
        .collect()
}

fn thermal(a: &CalibrateArgs, cfg: &LoadedConfig, sys: &System) -> Result<CalibrationReport, Failure> {
    let points = match &a.thermal_series {
        Some(p) => read_thermal_series(p)?,
        None if is_builtin_device_one(cfg) => fixtures::device_one_thermal_series()?,
        None => return Err(Failure::config("thermal calibration needs --thermal-series for this configuration")),
    };
    Ok(calibrate_g_thermal(&points, &sys.cavity, &sys.mode)?)
}

fn damping(a: &CalibrateArgs, cfg: &LoadedConfig, sys: &System) -> Result<CalibrationReport, Failure> {
    let points = match &a.damping_data {
        Some(p) => read_damping(p)?,
        None if is_builtin_device_one(cfg) => fixtures::device_one_damping_series()?,
        None => return Err(Failure::config("damping calibration needs --damping-data for this configuration")),
    };
    Ok(calibrate_g_damping(&points, &sys.cavity, &sys.mode, &sys.detection)?)
}

fn geometric(a: &CalibrateArgs, cfg: &LoadedConfig, sys: &System) -> Result<CalibrationReport, Failure> {
    let cavity = cfg.config.three_element_cavity()?;
    let points = cfg.config.three_element.as_ref().map(|t| t.scan_points).unwrap_or(401);
    let scan = cavity.scan(points)?;
    let eta = match a.eta {
        Some(eta) => eta,
        None => mode_overlap(&cfg.config.overlap_spec()?)?,
    };
    Ok(calibrate_g_geometric(scan.at_kappa_min.dwc_dz, eta, &sys.mode)?)
}

pub fn run(out: &Path, argv: Vec<String>, a: CalibrateArgs) -> Result<(), Failure> {
    let cfg = load_config(&a.config)?;
    let sys = cfg.config.to_system()?;
    let methods: &[MethodArg] = match a.method {
        MethodArg::All => &[MethodArg::Thermal, MethodArg::Geometric, MethodArg::Damping],
        MethodArg::Thermal => &[MethodArg::Thermal],
        MethodArg::Geometric => &[MethodArg::Geometric],
        MethodArg::Damping => &[MethodArg::Damping],
    };
    let mut reports = Vec::new();
    for m in methods {
        reports.push(match m {
            MethodArg::Thermal => thermal(&a, &cfg, &sys)?,
            MethodArg::Geometric => geometric(&a, &cfg, &sys)?,
            MethodArg::Damping => damping(&a, &cfg, &sys)?,
            MethodArg::All => unreachable!("expanded above"),
        });
    }
    let spreads: Vec<Spread> =
        pairwise_spread(&reports).into_iter().map(|(a, b, spread)| Spread { a, b, spread }).collect();
    let max = spreads.iter().map(|s| s.spread).reduce(f64::max);
    let mut run = Run::new(out, "calibrate", argv);
    run.json("calibration.json", &CalibrationOutput { reports, pairwise_spread: spreads, max_pairwise_spread: max })?;
    run.finish(Some(&cfg))
}
