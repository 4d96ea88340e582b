use std::path::Path;

use optomech::analysis::deconvolve_cavity_noise;
use optomech::io::{decomposition_to_csv, read_spectrum};
use optomech::units::rad_to_hz;
use optomech::{CavityNoiseSpectrum, Quantity, Sidedness};
use serde::Serialize;

use super::parse_window;
use crate::args::DeconvolveArgs;
use crate::failure::Failure;
use crate::run::{load_config, Run};

#[derive(Serialize)]
struct DeconvolutionReport {
    data: String,
    noise: CavityNoiseSpectrum,
    thermal_center_hz: f64,
    thermal_fwhm_hz: f64,
    nbar_thermal_fit: f64,
    nbar_cavity_noise: f64,
    nbar_total: f64,
    /// Grid points where the supplied S_i exceeds the measured spectrum.
    inconsistent_points: usize,
}

pub fn run(out: &Path, argv: Vec<String>, a: DeconvolveArgs) -> Result<(), Failure> {
    let cfg = load_config(&a.config)?;
    let sys = cfg.config.to_system()?;
    let measured = read_spectrum(&a.data, Some((Quantity::RelativeIntensity, Sidedness::OneSided)))?;
    let noise = match &a.noise {
        Some(p) => CavityNoiseSpectrum::Tabulated {
            spectrum: read_spectrum(p, Some((Quantity::RelativeIntensity, Sidedness::OneSided)))?,
        },
        None => sys
            .cavity_noise
            .clone()
            .ok_or_else(|| Failure::config("no cavity noise configured; pass --noise"))?,
    };
    let window = parse_window(&a.window)?;
    let d = deconvolve_cavity_noise(&measured, &sys, &noise, window)?;

    let mut run = Run::new(out, "deconvolve", argv);
    run.text(
        "deconvolved.csv",
        decomposition_to_csv(
            &[("naive", &d.naive), ("corrected", &d.corrected), ("noise_driven", &d.noise_driven)],
            &[],
        )?,
    );
    run.json(
        "deconvolution.json",
        &DeconvolutionReport {
            data: a.data.display().to_string(),
            noise,
            thermal_center_hz: rad_to_hz(d.thermal_fit.center),
            thermal_fwhm_hz: rad_to_hz(d.thermal_fit.fwhm),
            nbar_thermal_fit: d.nbar_thermal_fit,
            nbar_cavity_noise: d.nbar_cavity_noise,
            nbar_total: d.nbar_total,
            inconsistent_points: d.inconsistent_points,
        },
    )?;
    run.finish(Some(&cfg))
}
