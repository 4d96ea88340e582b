use serde::{Deserialize, Serialize};

use crate::error::{require_non_negative, require_positive, Error, Result};
use crate::params::CavityParams;
use crate::response::transduction;
use crate::spectra::Spectrum;

/// A narrow resonance of the cavity frequency, modelled as a damped
/// oscillator driven by white noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseMode {
    /// Centre angular frequency, rad/s.
    pub omega: f64,
    /// Energy damping rate (FWHM), rad/s.
    pub gamma: f64,
    /// Variance of the cavity-frequency fluctuation it produces, (rad/s)².
    pub frequency_variance: f64,
}

impl NoiseMode {
    /// Two-sided frequency-noise PSD ⟨δf δf⟩(ω), normalised so that its
    /// integral over all ω with dω/2π equals the variance.
    pub fn frequency_psd_two_sided(&self, omega: f64) -> f64 {
        let lor = |x: f64| self.gamma / (self.gamma * self.gamma / 4.0 + x * x);
        0.5 * self.frequency_variance * (lor(omega - self.omega) + lor(omega + self.omega))
    }
}

/// Cavity-frequency noise δf entering the model.
///
/// The first three forms are expressed as the intensity noise they imprint
/// on the transmitted light, S_i/Ī² (one-sided, 1/Hz). `Modes` is specified
/// directly in frequency units and is the only form the stochastic oracle
/// can integrate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CavityNoiseSpectrum {
    /// Frequency-independent S_i/Ī², 1/Hz.
    White { level: f64 },
    /// Lorentzian S_i/Ī²: area·fwhm / ((ω−centre)² + fwhm²/4); `area` is ∫ S_i/Ī² dω/2π.
    Lorentzian { center: f64, fwhm: f64, area: f64 },
    /// Sum of oscillator-like frequency-noise resonances.
    Modes { modes: Vec<NoiseMode> },
    /// Measured S_i/Ī² interpolated on its own grid, zero outside it.
    Tabulated { spectrum: Spectrum },
}

impl CavityNoiseSpectrum {
    pub fn validate(&self) -> Result<()> {
        match self {
            CavityNoiseSpectrum::White { level } => require_non_negative("white noise level", *level),
            CavityNoiseSpectrum::Lorentzian { center, fwhm, area } => {
                require_non_negative("noise centre", *center)?;
                require_positive("noise linewidth", *fwhm)?;
                require_non_negative("noise area", *area)
            }
            CavityNoiseSpectrum::Modes { modes } => {
                for m in modes {
                    require_non_negative("noise mode frequency", m.omega)?;
                    require_positive("noise mode linewidth", m.gamma)?;
                    require_non_negative("noise mode variance", m.frequency_variance)?;
                }
                Ok(())
            }
            CavityNoiseSpectrum::Tabulated { spectrum } => {
                for v in &spectrum.values {
                    require_non_negative("tabulated noise", *v)?;
                }
                Ok(())
            }
        }
    }

    /// |Π(ω)|² ⟨δf δf⟩(ω), two-sided. For the intensity-referred forms this
    /// is S_i/Ī²(|ω|)/2, which never requires dividing by |Π|².
    pub fn pi2_ff_two_sided(&self, omega: f64, cavity: &CavityParams) -> f64 {
        let w = omega.abs();
        match self {
            CavityNoiseSpectrum::White { level } => 0.5 * level,
            CavityNoiseSpectrum::Lorentzian { center, fwhm, area } => {
                0.5 * area * fwhm / ((w - center).powi(2) + fwhm * fwhm / 4.0)
            }
            CavityNoiseSpectrum::Modes { modes } => {
                let pi2 = transduction(omega, cavity).norm_sqr();
                pi2 * modes.iter().map(|m| m.frequency_psd_two_sided(omega)).sum::<f64>()
            }
            CavityNoiseSpectrum::Tabulated { spectrum } => 0.5 * spectrum.interpolate(w).unwrap_or(0.0),
        }
    }

    /// One-sided S_i/Ī² at ω ≥ 0.
    pub fn relative_intensity(&self, omega: f64, cavity: &CavityParams) -> f64 {
        2.0 * self.pi2_ff_two_sided(omega, cavity)
    }

    /// Two-sided ⟨δf δf⟩(ω). Infinite where Π vanishes for intensity-referred forms.
    pub fn frequency_psd_two_sided(&self, omega: f64, cavity: &CavityParams) -> f64 {
        match self {
            CavityNoiseSpectrum::Modes { modes } => modes.iter().map(|m| m.frequency_psd_two_sided(omega)).sum(),
            _ => self.pi2_ff_two_sided(omega, cavity) / transduction(omega, cavity).norm_sqr(),
        }
    }

    /// Frequencies (and widths) around which spectral integrands vary fastest.
    pub fn features(&self) -> Vec<(f64, f64)> {
        match self {
            CavityNoiseSpectrum::White { .. } => vec![],
            CavityNoiseSpectrum::Lorentzian { center, fwhm, .. } => vec![(*center, *fwhm)],
            CavityNoiseSpectrum::Modes { modes } => modes.iter().map(|m| (m.omega, m.gamma)).collect(),
            CavityNoiseSpectrum::Tabulated { spectrum } => {
                let n = spectrum.len();
                if n < 2 {
                    return vec![];
                }
                let width = (spectrum.omega[n - 1] - spectrum.omega[0]) / n as f64;
                spectrum.omega.iter().step_by((n / 64).max(1)).map(|&w| (w, width)).collect()
            }
        }
    }

    /// Frequency-noise modes reproducing this spectrum, for the stochastic
    /// oracle. A Lorentzian S_i/Ī² becomes one mode at the same centre and
    /// width whose variance is its area divided by |Π|² at the centre, which
    /// is accurate while the line is narrow compared with the variation of
    /// Π. White and tabulated spectra have no finite-mode equivalent.
    pub fn to_modes(&self, cavity: &CavityParams) -> Result<CavityNoiseSpectrum> {
        match self {
            CavityNoiseSpectrum::Modes { .. } => Ok(self.clone()),
            CavityNoiseSpectrum::Lorentzian { center, fwhm, area } => {
                let pi2 = transduction(*center, cavity).norm_sqr();
                if pi2 == 0.0 {
                    return Err(Error::domain("transduction vanishes at the noise line"));
                }
                Ok(CavityNoiseSpectrum::Modes {
                    modes: vec![NoiseMode { omega: *center, gamma: *fwhm, frequency_variance: area / pi2 }],
                })
            }
            _ => Err(Error::domain("only Lorentzian or mode-form cavity noise has a mode representation")),
        }
    }

    /// True when the spectrum is identically zero.
    pub fn is_zero(&self) -> bool {
        match self {
            CavityNoiseSpectrum::White { level } => *level == 0.0,
            CavityNoiseSpectrum::Lorentzian { area, .. } => *area == 0.0,
            CavityNoiseSpectrum::Modes { modes } => modes.iter().all(|m| m.frequency_variance == 0.0),
            CavityNoiseSpectrum::Tabulated { spectrum } => spectrum.values.iter().all(|&v| v == 0.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate_real_line, QuadOptions};

    #[test]
    fn mode_psd_integrates_to_variance() {
        let m = NoiseMode { omega: 1e7, gamma: 1e3, frequency_variance: 4.0e6 };
        let mut b = vec![-1e7, 0.0, 1e7];
        for j in -2..25 {
            let d = 1e3 * 2f64.powi(j);
            b.extend([1e7 + d, 1e7 - d, -1e7 + d, -1e7 - d]);
        }
        let r = integrate_real_line(|w| m.frequency_psd_two_sided(w), &b, 1e7, QuadOptions::default()).unwrap();
        let var = crate::units::spectral_measure(r.value);
        assert!((var / 4.0e6 - 1.0).abs() < 1e-8, "{var}");
    }
}
