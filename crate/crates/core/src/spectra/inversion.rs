//! Conversions between measured relative-intensity spectra and displacement.

use crate::error::{Error, Result};
use crate::params::System;
use crate::response::transduction;
use crate::spectra::model::SpectralModel;
use crate::spectra::{CavityNoiseSpectrum, Quantity, Sidedness, Spectrum};

#[derive(Debug, Clone, Copy)]
pub struct NaiveInversionOptions {
    /// Subtract the shot and dark floors before dividing by G²|Π|².
    pub subtract_floor: bool,
}

impl Default for NaiveInversionOptions {
    fn default() -> Self {
        Self { subtract_floor: true }
    }
}

/// G²|Π(ω)|², failing where the transduction vanishes (e.g. on resonance).
fn transduction_gain(omega: f64, system: &System) -> Result<f64> {
    let pi = transduction(omega, &system.cavity);
    if pi.norm() * system.cavity.kappa < 1e-12 {
        return Err(Error::Singular(format!(
            "transduction |Π| vanishes at ω = {omega:.6e} rad/s (detuning {:.6e} rad/s)",
            system.cavity.detuning
        )));
    }
    Ok(system.drive.coupling_g.powi(2) * pi.norm_sqr())
}

/// Shot plus dark floor, one-sided, in relative-intensity units.
fn floor_relative(system: &System) -> Result<f64> {
    let n = system.drive.photon_number;
    let det = &system.detection;
    if !(n > 0.0 && system.cavity.kappa_r > 0.0) {
        return Err(Error::domain("noise floor needs N > 0 and κ_R > 0"));
    }
    let current = det.photocurrent(n, system.cavity.kappa_r);
    Ok(2.0 / (det.efficiency() * system.cavity.kappa_r * n) + det.dark_current_psd / (current * current))
}

/// Displacement-equivalent imprecision floor (m²/Hz, one-sided).
pub fn noise_floor(grid: &[f64], system: &System) -> Result<Spectrum> {
    let floor = floor_relative(system)?;
    let values = grid.iter().map(|&w| transduction_gain(w, system).map(|g| floor / g)).collect::<Result<Vec<_>>>()?;
    Ok(Spectrum::new(grid.to_vec(), values, Quantity::Displacement, Sidedness::OneSided)?.with_label("noise_floor"))
}

/// Displacement spectrum inferred from a measured one-sided S_I/Ī² by
/// dividing out G²|Π|², ignoring any cavity-frequency noise.
pub fn naive_inversion(measured: &Spectrum, system: &System, opts: NaiveInversionOptions) -> Result<Spectrum> {
    if measured.quantity != Quantity::RelativeIntensity || measured.sidedness != Sidedness::OneSided {
        return Err(Error::domain("naive inversion expects a one-sided relative-intensity spectrum"));
    }
    let floor = if opts.subtract_floor { floor_relative(system)? } else { 0.0 };
    let values = measured
        .omega
        .iter()
        .zip(&measured.values)
        .map(|(&w, &s)| transduction_gain(w, system).map(|g| (s - floor) / g))
        .collect::<Result<Vec<_>>>()?;
    Ok(Spectrum::new(measured.omega.clone(), values, Quantity::Displacement, Sidedness::OneSided)?
        .with_label("naive_inversion"))
}

/// Displacement driven by cavity-frequency noise whose imprint on the
/// transmitted intensity is `s_i` (one-sided S_i/Ī²):
/// S_z,δf = Z² · 4ω_m² g0² N² / |𝒩|² · S_i/Ī².
pub fn cavity_noise_displacement(grid: &[f64], system: &System, s_i: &CavityNoiseSpectrum) -> Result<Spectrum> {
    s_i.validate()?;
    let mut sys = system.clone();
    sys.cavity_noise = Some(s_i.clone());
    let model = SpectralModel::new(&sys)?;
    let values = grid.iter().map(|&w| model.displacement_one_sided(w).cavity_noise).collect();
    Ok(Spectrum::new(grid.to_vec(), values, Quantity::Displacement, Sidedness::OneSided)?
        .with_label("cavity_noise_displacement"))
}
