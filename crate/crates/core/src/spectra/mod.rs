//! Spectral containers and the forward models for displacement and
//! photocurrent spectra.
//!
//! Two-sided spectra are indexed so that the anti-Stokes (cooling) sideband
//! lies at ω = −ω_m and the Stokes (heating) sideband at ω = +ω_m. Every
//! public output is one-sided, S(ω) = S₂(ω) + S₂(−ω) for ω ≥ 0, normalised
//! so that ∫₀^∞ S(ω) dω/2π equals the variance.

mod inversion;
mod model;
mod noise;

pub use inversion::{cavity_noise_displacement, naive_inversion, noise_floor, NaiveInversionOptions};
pub use model::{
    check_stability, displacement_spectrum, integrated_displacement, intensity_spectrum, DisplacementSpectrum,
    DisplacementTerms, IntensitySpectrum, IntensityTerms, SpectralModel,
};
pub use noise::{CavityNoiseSpectrum, NoiseMode};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{rad_to_hz, spectral_measure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sidedness {
    OneSided,
    TwoSided,
}

impl Sidedness {
    pub fn as_str(&self) -> &'static str {
        match self {
            Sidedness::OneSided => "one-sided",
            Sidedness::TwoSided => "two-sided",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "one-sided" => Ok(Sidedness::OneSided),
            "two-sided" => Ok(Sidedness::TwoSided),
            other => Err(Error::Parse(format!("unknown sidedness '{other}'"))),
        }
    }
}

/// Physical quantity a spectrum describes; fixes its units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    /// Membrane displacement, m²/Hz.
    Displacement,
    /// Photocurrent normalised by the squared mean current, 1/Hz.
    RelativeIntensity,
    /// Cavity frequency noise, (rad/s)²/Hz.
    FrequencyNoise,
    /// Photocurrent, A²/Hz.
    Photocurrent,
}

impl Quantity {
    pub fn units(&self) -> &'static str {
        match self {
            Quantity::Displacement => "m^2/Hz",
            Quantity::RelativeIntensity => "1/Hz",
            Quantity::FrequencyNoise => "(rad/s)^2/Hz",
            Quantity::Photocurrent => "A^2/Hz",
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Quantity::Displacement => "displacement",
            Quantity::RelativeIntensity => "relative-intensity",
            Quantity::FrequencyNoise => "frequency-noise",
            Quantity::Photocurrent => "photocurrent",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "displacement" => Ok(Quantity::Displacement),
            "relative-intensity" | "intensity" => Ok(Quantity::RelativeIntensity),
            "frequency-noise" => Ok(Quantity::FrequencyNoise),
            "photocurrent" => Ok(Quantity::Photocurrent),
            other => Err(Error::Parse(format!("unknown quantity '{other}'"))),
        }
    }
}

/// A sampled power spectral density on a strictly increasing angular-frequency grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub omega: Vec<f64>,
    pub values: Vec<f64>,
    pub quantity: Quantity,
    pub sidedness: Sidedness,
    #[serde(default)]
    pub label: String,
}

impl Spectrum {
    pub fn new(omega: Vec<f64>, values: Vec<f64>, quantity: Quantity, sidedness: Sidedness) -> Result<Self> {
        if omega.len() != values.len() {
            return Err(Error::domain(format!(
                "grid has {} points but {} values were supplied",
                omega.len(),
                values.len()
            )));
        }
        if omega.is_empty() {
            return Err(Error::domain("empty spectrum"));
        }
        if omega.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::domain("frequency grid must be strictly increasing"));
        }
        if omega.iter().chain(values.iter()).any(|x| !x.is_finite()) {
            return Err(Error::domain("spectrum contains non-finite entries"));
        }
        Ok(Self { omega, values, quantity, sidedness, label: String::new() })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    pub fn freq_hz(&self) -> Vec<f64> {
        self.omega.iter().map(|&w| rad_to_hz(w)).collect()
    }

    /// Trapezoidal ∫ S dω/2π over the whole grid.
    pub fn integrate(&self) -> f64 {
        self.integrate_band(f64::NEG_INFINITY, f64::INFINITY)
    }

    /// Trapezoidal ∫ S dω/2π restricted to grid points inside [lo, hi].
    pub fn integrate_band(&self, lo: f64, hi: f64) -> f64 {
        let mut acc = 0.0;
        for i in 1..self.omega.len() {
            let (a, b) = (self.omega[i - 1], self.omega[i]);
            if a >= lo && b <= hi {
                acc += 0.5 * (self.values[i - 1] + self.values[i]) * spectral_measure(b - a);
            }
        }
        acc
    }

    /// Linear interpolation; `None` outside the grid.
    pub fn interpolate(&self, omega: f64) -> Option<f64> {
        let n = self.omega.len();
        if omega < self.omega[0] || omega > self.omega[n - 1] {
            return None;
        }
        let idx = self.omega.partition_point(|&w| w < omega);
        if idx == 0 {
            return Some(self.values[0]);
        }
        let (w0, w1) = (self.omega[idx - 1], self.omega[idx]);
        let t = (omega - w0) / (w1 - w0);
        Some(self.values[idx - 1] * (1.0 - t) + self.values[idx] * t)
    }

    /// Point-wise combination with another spectrum on the same grid.
    pub fn zip_with(&self, other: &Spectrum, f: impl Fn(f64, f64) -> f64) -> Result<Spectrum> {
        if self.omega != other.omega {
            return Err(Error::domain("spectra live on different grids"));
        }
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(Spectrum {
            omega: self.omega.clone(),
            values,
            quantity: self.quantity,
            sidedness: self.sidedness,
            label: self.label.clone(),
        })
    }

    /// Copy restricted to grid points inside [lo, hi].
    pub fn window(&self, lo: f64, hi: f64) -> Result<Spectrum> {
        let (omega, values): (Vec<f64>, Vec<f64>) = self
            .omega
            .iter()
            .zip(&self.values)
            .filter(|(&w, _)| w >= lo && w <= hi)
            .map(|(&w, &v)| (w, v))
            .unzip();
        Spectrum::new(omega, values, self.quantity, self.sidedness).map(|s| s.with_label(self.label.clone()))
    }
}

/// The single audited two-sided → one-sided fold: S(ω) = S₂(ω) + S₂(−ω).
#[inline]
pub fn fold_two_sided<T: std::ops::Add<Output = T>>(omega: f64, two_sided: impl Fn(f64) -> T) -> T {
    two_sided(omega) + two_sided(-omega)
}
