//! TOML configuration: schema, validation and conversion into [`System`].
//!
//! Files carry laboratory units (Hz, m, K). Redundant fields are optional;
//! when present they must agree with the primaries, and a mismatch is
//! reported naming the identity that failed.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cavity3::{DrivenPort, ModeOverlapSpec, ThreeElementCavity};
use crate::error::{Error, Result};
use crate::params::{
    CavityParams, DetectionChain, Drive, Environment, MechanicalMode, MembraneGeometry, OccupationForm,
    System, CONSISTENCY_RTOL,
};
use crate::spectra::{CavityNoiseSpectrum, NoiseMode};
use crate::units::{hz_to_rad, optical_angular_frequency};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub mechanical: MechanicalSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub membrane: Option<MembraneSection>,
    pub cavity: CavitySection,
    pub drive: DriveSection,
    pub environment: EnvironmentSection,
    #[serde(default)]
    pub detection: DetectionSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cavity_noise: Option<NoiseSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub three_element: Option<ThreeElementSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overlap: Option<OverlapSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MechanicalSection {
    pub frequency_hz: f64,
    pub q_factor: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode_indices: Option<[u32; 2]>,
    /// Overrides the mass derived from `[membrane]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub effective_mass_kg: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MembraneSection {
    pub side_m: f64,
    pub thickness_m: f64,
    pub refractive_index: f64,
    pub density_kg_m3: f64,
    #[serde(default)]
    pub position_m: f64,
    #[serde(default)]
    pub standing_wave_phase_rad: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavitySection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linewidth_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa_in_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa_out_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa_internal_hz: Option<f64>,
    pub detuning_hz: f64,
    #[serde(default = "default_wavelength")]
    pub wavelength_m: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub finesse: Option<f64>,
}

fn default_wavelength() -> f64 {
    1064e-9
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSection {
    pub photon_number: f64,
    /// G/2π in Hz per metre.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling_hz_per_m: Option<f64>,
    /// g0/2π in Hz.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g0_hz: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentSection {
    pub bath_temperature_k: f64,
    #[serde(default)]
    pub occupation: OccupationForm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectionSection {
    #[serde(default = "one")]
    pub detector_efficiency: f64,
    #[serde(default = "one")]
    pub path_efficiency: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_efficiency: Option<f64>,
    #[serde(default)]
    pub dark_current_psd_a2_per_hz: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_photocurrent_a: Option<f64>,
}

fn one() -> f64 {
    1.0
}

impl Default for DetectionSection {
    fn default() -> Self {
        Self {
            detector_efficiency: 1.0,
            path_efficiency: 1.0,
            total_efficiency: None,
            dark_current_psd_a2_per_hz: 0.0,
            mean_photocurrent_a: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum NoiseSection {
    /// S_i/Ī², 1/Hz.
    White { level_per_hz: f64 },
    Lorentzian { center_hz: f64, fwhm_hz: f64, area: f64 },
    Modes { modes: Vec<NoiseModeSection> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseModeSection {
    pub center_hz: f64,
    pub fwhm_hz: f64,
    /// Variance of δf/2π, Hz².
    pub frequency_variance_hz2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThreeElementSection {
    pub flat_mirror_transmission: f64,
    pub curved_mirror_transmission: f64,
    /// Round-trip loss not attributable to the mirrors, lumped and z-independent.
    #[serde(default)]
    pub internal_round_trip_loss: f64,
    #[serde(default = "default_port")]
    pub driven_port: DrivenPort,
    #[serde(default = "default_scan_points")]
    pub scan_points: usize,
    /// Internal-loss share of the operating linewidth used for port rates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub internal_loss_fraction: Option<f64>,
}

fn default_port() -> DrivenPort {
    DrivenPort::Curved
}

fn default_scan_points() -> usize {
    401
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverlapSection {
    pub center_m: [f64; 2],
    pub waist_m: [f64; 2],
}

fn check_close(name: &str, a: f64, b: f64, rtol: f64) -> Result<()> {
    if (a - b).abs() > rtol * a.abs().max(b.abs()) {
        return Err(Error::Config(format!("{name}: {a:.12e} vs {b:.12e}")));
    }
    Ok(())
}

impl Config {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())?;
        Self::from_toml_str(&text)
    }

    /// Applies `section.key=value` overrides; values are parsed as TOML
    /// literals, falling back to strings.
    pub fn from_toml_with_overrides(text: &str, overrides: &[(String, String)]) -> Result<Self> {
        let mut table: toml::Table = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        for (key, raw) in overrides {
            let value: toml::Value = match toml::from_str::<toml::Table>(&format!("v = {raw}")) {
                Ok(mut t) => t.remove("v").expect("key present"),
                Err(_) => toml::Value::String(raw.clone()),
            };
            let mut parts = key.split('.').peekable();
            let mut cur = &mut table;
            while let Some(part) = parts.next() {
                if parts.peek().is_none() {
                    cur.insert(part.to_string(), value.clone());
                    break;
                }
                let entry = cur
                    .entry(part.to_string())
                    .or_insert_with(|| toml::Value::Table(toml::Table::new()));
                cur = entry
                    .as_table_mut()
                    .ok_or_else(|| Error::Config(format!("override '{key}': '{part}' is not a section")))?;
            }
        }
        let text = toml::to_string(&table).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_toml_str(&text)
    }

    /// Canonical serialisation; parsing it back and re-serialising is byte-identical.
    pub fn to_canonical_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        self.to_system().map(|_| ())?;
        if let Some(te) = &self.three_element {
            self.three_element_cavity()?;
            if let Some(f) = te.internal_loss_fraction {
                if !(0.0..1.0).contains(&f) {
                    return Err(Error::domain("internal_loss_fraction must lie in [0, 1)"));
                }
            }
        }
        if self.overlap.is_some() {
            self.overlap_spec()?;
        }
        Ok(())
    }

    pub fn membrane_geometry(&self) -> Option<MembraneGeometry> {
        self.membrane.as_ref().map(|m| MembraneGeometry {
            side: m.side_m,
            thickness: m.thickness_m,
            refractive_index: m.refractive_index,
            density: m.density_kg_m3,
            position_in_cavity: m.position_m,
            standing_wave_phase: m.standing_wave_phase_rad,
        })
    }

    pub fn mechanical_mode(&self) -> Result<MechanicalMode> {
        let m = &self.mechanical;
        let geometry = self.membrane_geometry();
        if let Some(g) = &geometry {
            g.validate()?;
        }
        let mass = match (m.effective_mass_kg, &geometry) {
            (Some(mass), _) => mass,
            (None, Some(g)) => g.effective_mass(),
            (None, None) => {
                return Err(Error::Config(
                    "mechanical.effective_mass_kg is required when no [membrane] section is given".into(),
                ))
            }
        };
        let [j, k] = m.mode_indices.unwrap_or([1, 1]);
        if j == 0 || k == 0 {
            return Err(Error::domain("mode indices must be positive"));
        }
        Ok(MechanicalMode::new(hz_to_rad(m.frequency_hz), m.q_factor, mass)?.with_indices(j, k))
    }

    pub fn cavity_params(&self) -> Result<CavityParams> {
        let c = &self.cavity;
        let partials = [c.kappa_in_hz, c.kappa_out_hz, c.kappa_internal_hz];
        let detuning = hz_to_rad(c.detuning_hz);
        let cav = match (c.linewidth_hz, partials) {
            (Some(k), [None, None, None]) => CavityParams::symmetric(hz_to_rad(k), detuning)?,
            (total, [Some(l), Some(r), int]) => {
                let int = int.unwrap_or(0.0);
                let cav = CavityParams::new(hz_to_rad(l), hz_to_rad(r), hz_to_rad(int), detuning)?;
                if let Some(k) = total {
                    check_close(
                        "identity kappa = kappa_in + kappa_out + kappa_internal violated",
                        k,
                        l + r + int,
                        CONSISTENCY_RTOL,
                    )?;
                }
                cav
            }
            _ => {
                return Err(Error::Config(
                    "cavity needs linewidth_hz alone or kappa_in_hz and kappa_out_hz (plus optional kappa_internal_hz)"
                        .into(),
                ))
            }
        };
        let cav = cav.with_optical_frequency(optical_angular_frequency(c.wavelength_m))?;
        match c.length_m {
            Some(l) => cav.with_geometry(l, c.finesse),
            None if c.finesse.is_some() => Err(Error::Config("finesse given without cavity length".into())),
            None => Ok(cav),
        }
    }

    pub fn detection_chain(&self, omega_laser: f64) -> Result<DetectionChain> {
        let d = &self.detection;
        let mut chain = DetectionChain::new(d.detector_efficiency, d.path_efficiency, omega_laser)?
            .with_dark_current_psd(d.dark_current_psd_a2_per_hz)?;
        if let Some(total) = d.total_efficiency {
            check_close(
                "identity total_efficiency = detector_efficiency * path_efficiency violated",
                total,
                chain.efficiency(),
                CONSISTENCY_RTOL,
            )?;
        }
        chain.mean_photocurrent = d.mean_photocurrent_a;
        Ok(chain)
    }

    pub fn cavity_noise(&self) -> Result<Option<CavityNoiseSpectrum>> {
        let noise = match &self.cavity_noise {
            None => return Ok(None),
            Some(NoiseSection::White { level_per_hz }) => CavityNoiseSpectrum::White { level: *level_per_hz },
            Some(NoiseSection::Lorentzian { center_hz, fwhm_hz, area }) => CavityNoiseSpectrum::Lorentzian {
                center: hz_to_rad(*center_hz),
                fwhm: hz_to_rad(*fwhm_hz),
                area: *area,
            },
            Some(NoiseSection::Modes { modes }) => CavityNoiseSpectrum::Modes {
                modes: modes
                    .iter()
                    .map(|m| NoiseMode {
                        omega: hz_to_rad(m.center_hz),
                        gamma: hz_to_rad(m.fwhm_hz),
                        frequency_variance: hz_to_rad(hz_to_rad(m.frequency_variance_hz2)),
                    })
                    .collect(),
            },
        };
        noise.validate()?;
        Ok(Some(noise))
    }

    /// Full parameter bundle.
    pub fn to_system(&self) -> Result<System> {
        let mode = self.mechanical_mode()?;
        let cavity = self.cavity_params()?;
        let d = &self.drive;
        let coupling_g = match (d.coupling_hz_per_m, d.g0_hz) {
            (Some(g), None) => hz_to_rad(g),
            (None, Some(g0)) => hz_to_rad(g0) / mode.z_zp,
            (Some(g), Some(g0)) => {
                check_close(
                    "identity g0 = G * z_zp violated",
                    g0,
                    g * mode.z_zp,
                    1e-3,
                )?;
                hz_to_rad(g)
            }
            (None, None) => return Err(Error::Config("drive needs coupling_hz_per_m or g0_hz".into())),
        };
        let mut drive = Drive::new(d.photon_number, coupling_g, &mode)?;
        drive.laser_wavelength = self.cavity.wavelength_m;
        let environment = Environment::new(self.environment.bath_temperature_k, self.environment.occupation, &mode)?;
        let detection = self.detection_chain(cavity.omega_c)?;
        let cavity_noise = self.cavity_noise()?;
        Ok(System { mode, cavity, drive, environment, detection, cavity_noise })
    }

    /// Three-element cavity model, if the config describes one.
    pub fn three_element_cavity(&self) -> Result<ThreeElementCavity> {
        let te = self
            .three_element
            .as_ref()
            .ok_or_else(|| Error::Config("missing [three_element] section".into()))?;
        let membrane = self
            .membrane_geometry()
            .ok_or_else(|| Error::Config("three-element model needs a [membrane] section".into()))?;
        let length = self
            .cavity
            .length_m
            .ok_or_else(|| Error::Config("three-element model needs cavity.length_m".into()))?;
        ThreeElementCavity::new(
            length,
            membrane.position_in_cavity,
            membrane.thickness,
            membrane.refractive_index,
            self.cavity.wavelength_m,
            te.flat_mirror_transmission,
            te.curved_mirror_transmission,
            te.internal_round_trip_loss,
            te.driven_port,
        )
    }

    pub fn overlap_spec(&self) -> Result<ModeOverlapSpec> {
        let o = self.overlap.as_ref().ok_or_else(|| Error::Config("missing [overlap] section".into()))?;
        let membrane = self
            .membrane_geometry()
            .ok_or_else(|| Error::Config("overlap needs a [membrane] section".into()))?;
        let [m, n] = self.mechanical.mode_indices.unwrap_or([1, 1]);
        ModeOverlapSpec::new(o.center_m, o.waist_m, membrane.side, (m, n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn canonical_round_trip_is_byte_identical() {
        for text in [fixtures::DEVICE_ONE_TOML, fixtures::DEVICE_TWO_TOML] {
            let cfg = Config::from_toml_str(text).unwrap();
            let a = cfg.to_canonical_toml().unwrap();
            let b = Config::from_toml_str(&a).unwrap().to_canonical_toml().unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn inconsistent_partials_rejected_naming_identity() {
        let text = fixtures::DEVICE_ONE_TOML.replace("linewidth_hz = 1.2e6", "linewidth_hz = 1.3e6");
        assert_ne!(text, fixtures::DEVICE_ONE_TOML);
        let err = Config::from_toml_str(&text).unwrap_err().to_string();
        assert!(err.contains("kappa = kappa_in + kappa_out + kappa_internal"), "{err}");
    }

    #[test]
    fn overrides_apply() {
        let cfg = Config::from_toml_with_overrides(
            fixtures::DEVICE_ONE_TOML,
            &[("drive.photon_number".into(), "1e5".into()), ("environment.occupation".into(), "bose".into())],
        )
        .unwrap();
        assert_eq!(cfg.drive.photon_number, 1e5);
        assert_eq!(cfg.environment.occupation, OccupationForm::Bose);
    }

    #[test]
    fn unknown_fields_rejected() {
        let text = format!("{}\n[extra]\nx = 1\n", fixtures::DEVICE_ONE_TOML);
        assert!(Config::from_toml_str(&text).is_err());
    }
}
