use serde::{Deserialize, Serialize};

use crate::analysis::fit::{fit_lorentzian, FitOptions, LorentzianFit};
use crate::error::{Error, Result};
use crate::params::System;
use crate::response::transduction;
use crate::spectra::{
    cavity_noise_displacement, integrated_displacement, naive_inversion, CavityNoiseSpectrum, NaiveInversionOptions,
    Spectrum,
};

/// Result of separating the membrane's thermal motion from cavity-frequency
/// noise in a measured transmission spectrum.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Deconvolution {
    /// Measured S_I divided by G²|Π|², floors removed, noise ignored.
    pub naive: Spectrum,
    /// Thermal part plus the noise-driven motion S_z,δf.
    pub corrected: Spectrum,
    /// Motion driven by the cavity noise, S_z,δf.
    pub noise_driven: Spectrum,
    /// Lorentzian fit to the thermal part of the naive spectrum.
    pub thermal_fit: LorentzianFit,
    /// Occupation from the thermal fit alone (area/2Z²).
    pub nbar_thermal_fit: f64,
    /// Occupation from integrating S_z,δf over all frequencies.
    pub nbar_cavity_noise: f64,
    pub nbar_total: f64,
    /// Grid points where S_i exceeds the measured S_I.
    pub inconsistent_points: usize,
}

/// Splits `measured` (one-sided S_I/Ī²) into thermal and cavity-noise parts.
/// `window` brackets the membrane resonance for the thermal fit; the
/// cavity-noise features are masked out of that fit.
pub fn deconvolve_cavity_noise(
    measured: &Spectrum,
    system: &System,
    s_i: &CavityNoiseSpectrum,
    window: (f64, f64),
) -> Result<Deconvolution> {
    s_i.validate()?;
    let naive = naive_inversion(measured, system, NaiveInversionOptions::default())?;
    let g2 = system.drive.coupling_g.powi(2);
    let mut inconsistent_points = 0;
    let mut thermal_values = Vec::with_capacity(measured.len());
    let mut noise_disp = Vec::with_capacity(measured.len());
    for ((&w, &s), &z) in measured.omega.iter().zip(&measured.values).zip(&naive.values) {
        let si = s_i.relative_intensity(w, &system.cavity);
        if si > s {
            inconsistent_points += 1;
        }
        let si_disp = si / (g2 * transduction(w, &system.cavity).norm_sqr());
        noise_disp.push(si_disp);
        thermal_values.push(z - si_disp);
    }
    let thermal = Spectrum::new(measured.omega.clone(), thermal_values, naive.quantity, naive.sidedness)?;
    let noise_driven = cavity_noise_displacement(&measured.omega, system, s_i)?;
    let corrected = thermal.zip_with(&noise_driven, |a, b| a + b)?.with_label("corrected");

    // For a localized noise line, mask every run of points where its
    // displacement-equivalent level exceeds the thermal part: there the
    // noise-driven motion and the interference terms swamp the membrane peak.
    let localized = matches!(s_i, CavityNoiseSpectrum::Lorentzian { .. } | CavityNoiseSpectrum::Modes { .. });
    let mut exclude = Vec::new();
    if localized {
        let mut run: Option<f64> = None;
        for (i, &w) in measured.omega.iter().enumerate() {
            let masked = noise_disp[i] > thermal.values[i].abs();
            match (masked, run) {
                (true, None) => run = Some(w),
                (false, Some(start)) => {
                    exclude.push((start, measured.omega[i - 1]));
                    run = None;
                }
                _ => {}
            }
        }
        if let (Some(start), Some(&end)) = (run, measured.omega.last()) {
            exclude.push((start, end));
        }
    }
    let opts = FitOptions { exclude, ..FitOptions::default() };
    let thermal_fit = fit_lorentzian(&thermal, window, &opts)?;
    if thermal_fit.area < 0.0 {
        return Err(Error::Convergence("thermal peak area came out negative".into()));
    }
    let z2 = system.mode.z_zp.powi(2);
    let nbar_thermal_fit = thermal_fit.area / (2.0 * z2);
    let mut sys = system.clone();
    sys.cavity_noise = Some(s_i.clone());
    let nbar_cavity_noise =
        if s_i.is_zero() { 0.0 } else { integrated_displacement(&sys)?.cavity_noise / (2.0 * z2) };
    Ok(Deconvolution {
        naive,
        corrected,
        noise_driven,
        thermal_fit,
        nbar_thermal_fit,
        nbar_cavity_noise,
        nbar_total: nbar_thermal_fit + nbar_cavity_noise,
        inconsistent_points,
    })
}
