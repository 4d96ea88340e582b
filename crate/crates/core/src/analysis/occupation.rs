use serde::{Deserialize, Serialize};

use crate::analysis::fit::{fit_lorentzian, FitOptions, LorentzianFit};
use crate::error::{Error, Result};
use crate::params::MechanicalMode;
use crate::spectra::{Quantity, Spectrum};
use crate::units::K_B;

/// Phonon occupation and effective temperature read off a displacement
/// variance ⟨z²⟩ (m²).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OccupationReadout {
    pub variance: f64,
    /// ⟨z²⟩/(2 Z²): the convention used for the reported cooling numbers.
    pub nbar_thermal: f64,
    /// ⟨z²⟩/(2 Z²) − ½, clipped at zero.
    pub nbar_total: f64,
    /// m ω_m² ⟨z²⟩ / k_B.
    pub t_eff: f64,
    /// Set when the variance lies below the zero-point value Z² and the
    /// total-convention occupation had to be clipped.
    pub below_zero_point: bool,
}

pub fn occupation_from_area(variance: f64, mode: &MechanicalMode) -> Result<OccupationReadout> {
    if !(variance >= 0.0) || !variance.is_finite() {
        return Err(Error::domain(format!("displacement variance must be non-negative, got {variance}")));
    }
    let z2 = mode.z_zp * mode.z_zp;
    let nbar_thermal = variance / (2.0 * z2);
    let raw_total = nbar_thermal - 0.5;
    Ok(OccupationReadout {
        variance,
        nbar_thermal,
        nbar_total: raw_total.max(0.0),
        t_eff: mode.mass_eff * mode.omega_m * mode.omega_m * variance / K_B,
        below_zero_point: raw_total < 0.0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum AreaMethod {
    Trapezoid,
    Fit(LorentzianFit),
}

/// Area of the peak in `window`, with the offset removed.
///
/// The trapezoid is used when the peak is resolved on the grid; if the
/// expected linewidth `gamma_hint` is below 1e-3 of the window span (or the
/// grid puts fewer than the fit minimum across it) a Lorentzian fit is used
/// instead, since direct integration would be dominated by grid error.
pub fn peak_area(spectrum: &Spectrum, window: (f64, f64), gamma_hint: f64) -> Result<(f64, AreaMethod)> {
    if spectrum.quantity != Quantity::Displacement && spectrum.quantity != Quantity::RelativeIntensity {
        return Err(Error::domain("peak area needs a displacement or relative-intensity spectrum"));
    }
    let opts = FitOptions::default();
    let span = window.1 - window.0;
    let across = spectrum
        .omega
        .iter()
        .filter(|&&w| w >= window.0 && w <= window.1)
        .collect::<Vec<_>>();
    let resolved = gamma_hint / span >= 1e-3 && {
        let dw = span / across.len().max(1) as f64;
        gamma_hint / dw >= opts.min_points_per_fwhm as f64
    };
    let fit = fit_lorentzian(spectrum, window, &opts)?;
    if resolved {
        let area = spectrum.integrate_band(window.0, window.1) - fit.offset * span / crate::units::FULL_TURN;
        Ok((area, AreaMethod::Trapezoid))
    } else {
        Ok((fit.area, AreaMethod::Fit(fit)))
    }
}
