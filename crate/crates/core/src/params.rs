//! Physical parameter records. Every rate is stored in rad/s and every
//! derived field is computed once by a constructor, so a value that exists
//! has already passed its domain checks.

use serde::{Deserialize, Serialize};

use crate::error::{require_non_negative, require_positive, Error, Result};
use crate::spectra::CavityNoiseSpectrum;
use crate::units::{
    free_spectral_range, optical_angular_frequency, thermal_occupation_bose,
    thermal_occupation_high_t, HBAR, K_B, Q_E,
};

/// Tolerance used when checking redundant configuration fields against each other.
pub const CONSISTENCY_RTOL: f64 = 1e-12;

/// A single mechanical eigenmode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MechanicalMode {
    pub omega_m: f64,
    pub gamma_m: f64,
    pub q_factor: f64,
    pub mass_eff: f64,
    pub z_zp: f64,
    pub mode_indices: (u32, u32),
}

impl MechanicalMode {
    pub fn new(omega_m: f64, q_factor: f64, mass_eff: f64) -> Result<Self> {
        require_positive("mechanical frequency", omega_m)?;
        require_positive("mechanical quality factor", q_factor)?;
        require_positive("effective mass", mass_eff)?;
        Ok(Self {
            omega_m,
            gamma_m: omega_m / q_factor,
            q_factor,
            mass_eff,
            z_zp: (HBAR / (2.0 * mass_eff * omega_m)).sqrt(),
            mode_indices: (1, 1),
        })
    }

    pub fn with_indices(mut self, j: u32, k: u32) -> Self {
        self.mode_indices = (j, k);
        self
    }

    /// Same mode with a different quality factor (and hence damping).
    pub fn with_q_factor(self, q_factor: f64) -> Result<Self> {
        Self::new(self.omega_m, q_factor, self.mass_eff).map(|m| m.with_indices(self.mode_indices.0, self.mode_indices.1))
    }
}

/// Optical cavity mode. `detuning` follows Δ = ω_L − ω_c, so red detuning is negative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityParams {
    pub kappa: f64,
    pub kappa_l: f64,
    pub kappa_r: f64,
    pub kappa_int: f64,
    pub detuning: f64,
    pub omega_c: f64,
    pub length: Option<f64>,
    pub finesse: Option<f64>,
}

impl CavityParams {
    /// Builds a cavity from its partial decay rates; κ is their sum.
    pub fn new(kappa_l: f64, kappa_r: f64, kappa_int: f64, detuning: f64) -> Result<Self> {
        require_non_negative("input coupling rate", kappa_l)?;
        require_non_negative("output coupling rate", kappa_r)?;
        require_non_negative("internal loss rate", kappa_int)?;
        if !detuning.is_finite() {
            return Err(Error::domain("detuning must be finite"));
        }
        let kappa = kappa_l + kappa_r + kappa_int;
        require_positive("total linewidth", kappa)?;
        Ok(Self {
            kappa,
            kappa_l,
            kappa_r,
            kappa_int,
            detuning,
            omega_c: optical_angular_frequency(1064e-9),
            length: None,
            finesse: None,
        })
    }

    /// Lossless symmetric cavity, convenient when only κ and Δ matter.
    pub fn symmetric(kappa: f64, detuning: f64) -> Result<Self> {
        Self::new(kappa / 2.0, kappa / 2.0, 0.0, detuning)
    }

    pub fn with_optical_frequency(mut self, omega_c: f64) -> Result<Self> {
        require_positive("optical frequency", omega_c)?;
        self.omega_c = omega_c;
        Ok(self)
    }

    /// Attaches geometry; if a finesse is supplied it must agree with FSR/κ.
    pub fn with_geometry(mut self, length: f64, finesse: Option<f64>) -> Result<Self> {
        require_positive("cavity length", length)?;
        if let Some(f) = finesse {
            require_positive("finesse", f)?;
            let implied = free_spectral_range(length) / self.kappa;
            if ((implied - f) / f).abs() > 1e-3 {
                return Err(Error::Config(format!(
                    "finesse {f} disagrees with FSR/kappa = {implied:.6e} (identity F = FSR/kappa)"
                )));
            }
        }
        self.length = Some(length);
        self.finesse = finesse;
        Ok(self)
    }

    pub fn with_detuning(mut self, detuning: f64) -> Self {
        self.detuning = detuning;
        self
    }

    pub fn free_spectral_range(&self) -> Option<f64> {
        self.length.map(free_spectral_range)
    }
}

/// Membrane geometry, used for the effective mass and the scan model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MembraneGeometry {
    pub side: f64,
    pub thickness: f64,
    pub refractive_index: f64,
    pub density: f64,
    pub position_in_cavity: f64,
    pub standing_wave_phase: f64,
}

impl MembraneGeometry {
    pub fn validate(&self) -> Result<()> {
        require_positive("membrane side", self.side)?;
        require_positive("membrane thickness", self.thickness)?;
        require_positive("membrane density", self.density)?;
        require_non_negative("membrane position", self.position_in_cavity)?;
        if !(self.refractive_index >= 1.0) {
            return Err(Error::domain("membrane refractive index must be >= 1"));
        }
        Ok(())
    }

    pub fn physical_mass(&self) -> f64 {
        self.density * self.thickness * self.side * self.side
    }

    /// Effective mass of any (j,k) drum mode of a square membrane: one quarter
    /// of the physical mass when the motion is referred to the antinode.
    pub fn effective_mass(&self) -> f64 {
        self.physical_mass() / 4.0
    }
}

/// How the bath occupation is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum OccupationForm {
    /// n = k_B T / (ħ ω_m)
    #[default]
    HighTemperature,
    /// n = 1 / (exp(ħ ω_m / k_B T) − 1)
    Bose,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub t_bath: f64,
    pub nbar_th: f64,
    pub occupation_form: OccupationForm,
}

impl Environment {
    pub fn new(t_bath: f64, form: OccupationForm, mode: &MechanicalMode) -> Result<Self> {
        require_non_negative("bath temperature", t_bath)?;
        let nbar_th = match form {
            OccupationForm::HighTemperature => thermal_occupation_high_t(t_bath, mode.omega_m),
            OccupationForm::Bose => thermal_occupation_bose(t_bath, mode.omega_m),
        };
        Ok(Self { t_bath, nbar_th, occupation_form: form })
    }

    /// An environment at a prescribed occupation, bypassing the temperature.
    pub fn with_occupation(nbar_th: f64, mode: &MechanicalMode) -> Result<Self> {
        require_non_negative("thermal occupation", nbar_th)?;
        Ok(Self {
            t_bath: nbar_th * HBAR * mode.omega_m / K_B,
            nbar_th,
            occupation_form: OccupationForm::HighTemperature,
        })
    }
}

/// Intracavity drive: photon number and the optomechanical couplings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Drive {
    pub photon_number: f64,
    /// Single-photon coupling g0 = G Z_zp, rad/s.
    pub g0: f64,
    /// Frequency pull per displacement G, rad/s per m.
    pub coupling_g: f64,
    pub laser_wavelength: f64,
}

impl Drive {
    pub fn new(photon_number: f64, coupling_g: f64, mode: &MechanicalMode) -> Result<Self> {
        require_non_negative("intracavity photon number", photon_number)?;
        require_positive("optomechanical coupling G", coupling_g.abs())?;
        Ok(Self {
            photon_number,
            g0: coupling_g * mode.z_zp,
            coupling_g,
            laser_wavelength: 1064e-9,
        })
    }

    pub fn with_photon_number(mut self, photon_number: f64) -> Self {
        self.photon_number = photon_number;
        self
    }

    /// Enhanced coupling g0 √N.
    pub fn enhanced_coupling(&self) -> f64 {
        self.g0 * self.photon_number.sqrt()
    }
}

/// Photodetection chain between the output mirror and the recorded photocurrent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionChain {
    pub efficiency_detector: f64,
    pub efficiency_path: f64,
    /// Detector responsivity, A/W.
    pub responsivity: f64,
    /// One-sided dark-current power spectral density, A²/Hz.
    pub dark_current_psd: f64,
    /// Measured mean photocurrent, if one was recorded.
    pub mean_photocurrent: Option<f64>,
}

impl DetectionChain {
    pub fn new(efficiency_detector: f64, efficiency_path: f64, omega_laser: f64) -> Result<Self> {
        for (name, e) in [("detector efficiency", efficiency_detector), ("path efficiency", efficiency_path)] {
            if !(e > 0.0 && e <= 1.0) {
                return Err(Error::domain(format!("{name} must lie in (0, 1], got {e}")));
            }
        }
        Ok(Self {
            efficiency_detector,
            efficiency_path,
            responsivity: efficiency_detector * Q_E / (HBAR * omega_laser),
            dark_current_psd: 0.0,
            mean_photocurrent: None,
        })
    }

    /// Ideal unit-efficiency detector without dark noise.
    pub fn ideal() -> Self {
        Self {
            efficiency_detector: 1.0,
            efficiency_path: 1.0,
            responsivity: Q_E / (HBAR * optical_angular_frequency(1064e-9)),
            dark_current_psd: 0.0,
            mean_photocurrent: None,
        }
    }

    pub fn with_dark_current_psd(mut self, psd: f64) -> Result<Self> {
        require_non_negative("dark current PSD", psd)?;
        self.dark_current_psd = psd;
        Ok(self)
    }

    /// Total detection efficiency ε.
    pub fn efficiency(&self) -> f64 {
        self.efficiency_detector * self.efficiency_path
    }

    /// Mean photocurrent Ī = ε q_e κ_R N.
    pub fn photocurrent(&self, photon_number: f64, kappa_r: f64) -> f64 {
        self.efficiency() * Q_E * kappa_r * photon_number
    }

    /// Intracavity photon number inferred from a mean photocurrent.
    pub fn photon_number(&self, photocurrent: f64, kappa_r: f64) -> Result<f64> {
        require_positive("output coupling rate", kappa_r)?;
        require_non_negative("photocurrent", photocurrent)?;
        Ok(photocurrent / (self.efficiency() * Q_E * kappa_r))
    }
}

/// Intracavity photon number from power leaving the output mirror,
/// N = P_out / (ħ ω_c κ_R).
pub fn photon_number_from_output_power(p_out: f64, omega_c: f64, kappa_r: f64) -> Result<f64> {
    require_positive("output coupling rate", kappa_r)?;
    require_non_negative("output power", p_out)?;
    Ok(p_out / (HBAR * omega_c * kappa_r))
}

/// Noise conventions of the linearized model, kept as data so reports can
/// echo them.
///
/// Operator noises are symmetrised: the optical vacuum input has
/// ⟨ξ(ω) ξ†(ω')⟩ = 2π δ(ω+ω'), ⟨ξ† ξ⟩ = 0; the mechanical bath gives
/// ⟨η η†⟩ ∝ n+1 and ⟨η† η⟩ ∝ n, both scaled by Γ_m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantumNoiseModel {
    pub vacuum_normally_ordered: f64,
    pub vacuum_antinormally_ordered: f64,
    pub thermal_absorption_excess: f64,
}

impl Default for QuantumNoiseModel {
    fn default() -> Self {
        Self {
            vacuum_normally_ordered: 0.0,
            vacuum_antinormally_ordered: 1.0,
            thermal_absorption_excess: 1.0,
        }
    }
}

/// Every parameter needed to evaluate a spectrum at one operating point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct System {
    pub mode: MechanicalMode,
    pub cavity: CavityParams,
    pub drive: Drive,
    pub environment: Environment,
    pub detection: DetectionChain,
    pub cavity_noise: Option<CavityNoiseSpectrum>,
}

impl System {
    pub fn with_photon_number(&self, n: f64) -> Self {
        let mut s = self.clone();
        s.drive = s.drive.with_photon_number(n);
        s
    }

    pub fn with_detuning(&self, detuning: f64) -> Self {
        let mut s = self.clone();
        s.cavity = s.cavity.with_detuning(detuning);
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::hz_to_rad;

    #[test]
    fn zero_point_amplitude_device_one() {
        let mode = MechanicalMode::new(hz_to_rad(1.575e6), 13.6e6, 6.75e-12).unwrap();
        assert!((mode.z_zp / 8.885e-16 - 1.0).abs() < 1e-3, "{}", mode.z_zp);
        assert!((mode.gamma_m / hz_to_rad(0.1158) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn membrane_effective_mass() {
        let m = MembraneGeometry {
            side: 500e-6,
            thickness: 40e-9,
            refractive_index: 2.0,
            density: 2700.0,
            position_in_cavity: 0.9e-3,
            standing_wave_phase: 0.0,
        };
        assert!((m.effective_mass() / 6.75e-12 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_domains() {
        assert!(MechanicalMode::new(-1.0, 10.0, 1.0).is_err());
        assert!(MechanicalMode::new(1.0, 10.0, 0.0).is_err());
        assert!(CavityParams::new(-1.0, 1.0, 0.0, 0.0).is_err());
        assert!(CavityParams::new(0.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn finesse_consistency() {
        let kappa = hz_to_rad(935.6e3);
        let c = CavityParams::symmetric(kappa, 0.0).unwrap();
        let fsr = free_spectral_range(5.1e-3);
        assert!(c.with_geometry(5.1e-3, Some(fsr / kappa)).is_ok());
        assert!(c.with_geometry(5.1e-3, Some(1.01 * fsr / kappa)).is_err());
    }

    #[test]
    fn photon_number_routes_agree() {
        let det = DetectionChain::new(0.87, 0.88, optical_angular_frequency(1064e-9)).unwrap();
        let kappa_r = hz_to_rad(0.27e6);
        let n = 6.0e6;
        let current = det.photocurrent(n, kappa_r);
        assert!((det.photon_number(current, kappa_r).unwrap() / n - 1.0).abs() < 1e-12);
        // optical power reaching the detector is ε P_out
        let omega_c = optical_angular_frequency(1064e-9);
        let p_out = current / (det.efficiency() * Q_E) * HBAR * omega_c;
        let n2 = photon_number_from_output_power(p_out, omega_c, kappa_r).unwrap();
        assert!((n2 / n - 1.0).abs() < 1e-12);
    }
}
