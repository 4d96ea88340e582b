use std::ops::Add;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cooling::optical_damping;
use crate::error::{Error, Result};
use crate::params::System;
use crate::quad::{integrate_real_line, QuadOptions};
use crate::response::{chi_mech, ResponseKernel};
use crate::spectra::{fold_two_sided, Quantity, Sidedness, Spectrum};
use crate::units::spectral_measure;

/// Contributions to the displacement PSD (m²/Hz) or to ⟨z²⟩ (m²).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct DisplacementTerms {
    pub thermal: f64,
    pub backaction: f64,
    pub cavity_noise: f64,
}

impl DisplacementTerms {
    pub fn total(&self) -> f64 {
        self.thermal + self.backaction + self.cavity_noise
    }

    fn scale(self, k: f64) -> Self {
        Self { thermal: self.thermal * k, backaction: self.backaction * k, cavity_noise: self.cavity_noise * k }
    }
}

impl Add for DisplacementTerms {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            thermal: self.thermal + o.thermal,
            backaction: self.backaction + o.backaction,
            cavity_noise: self.cavity_noise + o.cavity_noise,
        }
    }
}

/// Contributions to the relative photocurrent PSD S_I/Ī² (1/Hz).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct IntensityTerms {
    /// Shot-noise floor 1/(ε κ_R N) per side.
    pub shot: f64,
    /// Dark-current floor.
    pub dark: f64,
    /// Membrane motion transduced by Π.
    pub mechanical: f64,
    /// Cavity-frequency noise transduced directly.
    pub cavity_noise: f64,
    /// Correlation between optical vacuum and the motion it drives.
    pub cross_qm: f64,
    /// Correlation between cavity-frequency noise and the motion it drives.
    pub cross_im: f64,
}

impl IntensityTerms {
    pub fn total(&self) -> f64 {
        self.shot + self.dark + self.mechanical + self.cavity_noise + self.cross_qm + self.cross_im
    }
}

impl Add for IntensityTerms {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            shot: self.shot + o.shot,
            dark: self.dark + o.dark,
            mechanical: self.mechanical + o.mechanical,
            cavity_noise: self.cavity_noise + o.cavity_noise,
            cross_qm: self.cross_qm + o.cross_qm,
            cross_im: self.cross_im + o.cross_im,
        }
    }
}

/// Forward spectral model at a single operating point.
#[derive(Debug, Clone, Copy)]
pub struct SpectralModel<'a> {
    pub system: &'a System,
    /// When false, optical vacuum drives neither the membrane nor the
    /// vacuum–motion correlation; the shot floor remains.
    pub include_backaction: bool,
}

impl<'a> SpectralModel<'a> {
    /// Validates stability of the operating point.
    pub fn new(system: &'a System) -> Result<Self> {
        check_stability(system)?;
        Ok(Self { system, include_backaction: true })
    }

    pub fn without_backaction(mut self) -> Self {
        self.include_backaction = false;
        self
    }

    fn kernel(&self) -> ResponseKernel<'a> {
        ResponseKernel::new(&self.system.cavity, &self.system.mode, &self.system.drive)
    }

    fn pi2_ff(&self, omega: f64) -> f64 {
        self.system
            .cavity_noise
            .as_ref()
            .map_or(0.0, |n| n.pi2_ff_two_sided(omega, &self.system.cavity))
    }

    /// Two-sided displacement PSD terms at ω (m²/Hz).
    pub fn displacement_two_sided(&self, omega: f64) -> DisplacementTerms {
        let s = self.system;
        let (mode, cav, drive) = (&s.mode, &s.cavity, &s.drive);
        let k = self.kernel().at(omega);
        let inv_n2 = 1.0 / k.n_eff.norm_sqr();
        let n = s.environment.nbar_th;
        let thermal = mode.gamma_m
            * ((n + 1.0) / chi_mech(omega, mode).norm_sqr() + n / chi_mech(-omega, mode).norm_sqr())
            * inv_n2;
        let w2g2 = 4.0 * mode.omega_m * mode.omega_m * drive.g0 * drive.g0;
        let backaction = if self.include_backaction {
            w2g2 * cav.kappa * drive.photon_number * k.chi_c_neg.norm_sqr() * inv_n2
        } else {
            0.0
        };
        let cavity_noise = w2g2 * drive.photon_number * drive.photon_number * self.pi2_ff(omega) * inv_n2;
        DisplacementTerms { thermal, backaction, cavity_noise }.scale(mode.z_zp * mode.z_zp)
    }

    /// One-sided displacement PSD terms at ω ≥ 0 (m²/Hz).
    pub fn displacement_one_sided(&self, omega: f64) -> DisplacementTerms {
        fold_two_sided(omega, |w| self.displacement_two_sided(w))
    }

    /// Two-sided relative-intensity PSD terms at ω (1/Hz). Requires N > 0.
    pub fn intensity_two_sided(&self, omega: f64) -> IntensityTerms {
        let s = self.system;
        let (mode, cav, drive, det) = (&s.mode, &s.cavity, &s.drive, &s.detection);
        let n_ph = drive.photon_number;
        let k = self.kernel().at(omega);
        let pi2 = k.pi.norm_sqr();
        let zz = self.displacement_two_sided(omega).total();
        let pi2ff = self.pi2_ff(omega);
        let eps = det.efficiency();
        let shot = 1.0 / (eps * cav.kappa_r * n_ph);
        let mean_current = det.photocurrent(n_ph, cav.kappa_r);
        let dark = 0.5 * det.dark_current_psd / (mean_current * mean_current);
        let g2 = drive.coupling_g * drive.coupling_g;
        let four_wg2 = 4.0 * mode.omega_m * drive.g0 * drive.g0;
        let pi_over_n: Complex64 = k.pi / k.n_eff;
        let cross_qm = if self.include_backaction { -four_wg2 * (pi_over_n * k.chi_c_neg).im } else { 0.0 };
        let cross_im = -four_wg2 * n_ph * pi_over_n.im * pi2ff;
        IntensityTerms {
            shot,
            dark,
            mechanical: g2 * pi2 * zz,
            cavity_noise: pi2ff,
            cross_qm,
            cross_im,
        }
    }

    /// One-sided relative-intensity PSD terms at ω ≥ 0 (1/Hz).
    pub fn intensity_one_sided(&self, omega: f64) -> IntensityTerms {
        fold_two_sided(omega, |w| self.intensity_two_sided(w))
    }

    /// Frequencies around which the integrands vary, as (centre, width) pairs.
    fn features(&self) -> Vec<(f64, f64)> {
        let s = self.system;
        let gamma = (s.mode.gamma_m + optical_damping(&s.cavity, &s.mode, &s.drive)).max(s.mode.gamma_m);
        let mut f = vec![
            (s.mode.omega_m, gamma),
            (-s.mode.omega_m, gamma),
            (s.cavity.detuning, s.cavity.kappa),
            (-s.cavity.detuning, s.cavity.kappa),
        ];
        if let Some(noise) = &s.cavity_noise {
            for (c, w) in noise.features() {
                f.push((c, w));
                f.push((-c, w));
            }
        }
        f
    }

    fn breakpoints(&self) -> Vec<f64> {
        let s = self.system;
        let reach = 4.0 * (s.mode.omega_m + s.cavity.kappa + s.cavity.detuning.abs());
        let mut pts = vec![0.0];
        for (c, w) in self.features() {
            pts.push(c);
            let mut d = w / 8.0;
            while d < reach {
                pts.push(c + d);
                pts.push(c - d);
                d *= 2.0;
            }
        }
        pts.retain(|x| x.abs() <= reach);
        pts.push(reach);
        pts.push(-reach);
        pts.sort_by(|a, b| a.total_cmp(b));
        pts.dedup();
        pts
    }
}

/// Rejects operating points without a stationary state: net mechanical
/// damping must be positive and the optical spring must not overturn the
/// restoring force.
pub fn check_stability(system: &System) -> Result<()> {
    let (cav, mode, drive) = (&system.cavity, &system.mode, &system.drive);
    let gamma = mode.gamma_m + optical_damping(cav, mode, drive);
    if !(gamma > 0.0) {
        return Err(Error::Instability(format!(
            "net mechanical damping {gamma:.4e} rad/s is not positive (parametric instability)"
        )));
    }
    let n0 = crate::response::effective_inverse_response(0.0, cav, mode, drive);
    if !(n0.re > 0.0) {
        return Err(Error::Instability("optical spring exceeds the mechanical restoring force".into()));
    }
    Ok(())
}

/// One-sided displacement spectrum with its three labelled contributions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisplacementSpectrum {
    pub total: Spectrum,
    pub thermal: Spectrum,
    pub backaction: Spectrum,
    pub cavity_noise: Spectrum,
}

/// One-sided relative-intensity spectrum with its six labelled contributions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntensitySpectrum {
    pub total: Spectrum,
    pub shot_floor: Spectrum,
    pub dark_floor: Spectrum,
    pub mechanical: Spectrum,
    pub cavity_noise: Spectrum,
    pub cross_qm: Spectrum,
    pub cross_im: Spectrum,
}

impl IntensitySpectrum {
    pub fn components(&self) -> [(&'static str, &Spectrum); 6] {
        [
            ("shot_floor", &self.shot_floor),
            ("dark_floor", &self.dark_floor),
            ("mechanical", &self.mechanical),
            ("cavity_noise", &self.cavity_noise),
            ("cross_qm", &self.cross_qm),
            ("cross_im", &self.cross_im),
        ]
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() || grid.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::domain("spectral grid must be non-empty, finite and non-negative"));
    }
    Ok(())
}

fn make(grid: &[f64], values: Vec<f64>, q: Quantity, label: &str) -> Result<Spectrum> {
    Ok(Spectrum::new(grid.to_vec(), values, q, Sidedness::OneSided)?.with_label(label))
}

/// Evaluates the one-sided displacement spectrum on `grid` (rad/s, ≥ 0).
pub fn displacement_spectrum(grid: &[f64], system: &System) -> Result<DisplacementSpectrum> {
    check_grid(grid)?;
    let model = SpectralModel::new(system)?;
    let terms: Vec<DisplacementTerms> = grid.iter().map(|&w| model.displacement_one_sided(w)).collect();
    let q = Quantity::Displacement;
    Ok(DisplacementSpectrum {
        total: make(grid, terms.iter().map(|t| t.total()).collect(), q, "total")?,
        thermal: make(grid, terms.iter().map(|t| t.thermal).collect(), q, "thermal")?,
        backaction: make(grid, terms.iter().map(|t| t.backaction).collect(), q, "backaction")?,
        cavity_noise: make(grid, terms.iter().map(|t| t.cavity_noise).collect(), q, "cavity_noise")?,
    })
}

/// Evaluates the one-sided relative-intensity spectrum S_I/Ī² on `grid`.
pub fn intensity_spectrum(grid: &[f64], system: &System) -> Result<IntensitySpectrum> {
    check_grid(grid)?;
    if !(system.drive.photon_number > 0.0) || !(system.cavity.kappa_r > 0.0) {
        return Err(Error::domain("intensity spectrum needs N > 0 and an output coupling κ_R > 0"));
    }
    let model = SpectralModel::new(system)?;
    let terms: Vec<IntensityTerms> = grid.iter().map(|&w| model.intensity_one_sided(w)).collect();
    let q = Quantity::RelativeIntensity;
    let col = |f: fn(&IntensityTerms) -> f64| terms.iter().map(f).collect::<Vec<_>>();
    Ok(IntensitySpectrum {
        total: make(grid, col(|t| t.total()), q, "total")?,
        shot_floor: make(grid, col(|t| t.shot), q, "shot_floor")?,
        dark_floor: make(grid, col(|t| t.dark), q, "dark_floor")?,
        mechanical: make(grid, col(|t| t.mechanical), q, "mechanical")?,
        cavity_noise: make(grid, col(|t| t.cavity_noise), q, "cavity_noise")?,
        cross_qm: make(grid, col(|t| t.cross_qm), q, "cross_qm")?,
        cross_im: make(grid, col(|t| t.cross_im), q, "cross_im")?,
    })
}

/// ⟨z²⟩ split into its three sources (m²), by adaptive quadrature of the
/// two-sided spectrum over the whole real line.
pub fn integrated_displacement(system: &System) -> Result<DisplacementTerms> {
    let model = SpectralModel::new(system)?;
    let pts = model.breakpoints();
    let scale = system.mode.omega_m + system.cavity.kappa;
    let opts = QuadOptions { abs_tol: 0.0, rel_tol: 1e-9, max_intervals: 50_000 };
    let z2 = system.mode.z_zp * system.mode.z_zp;
    let mut out = DisplacementTerms::default();
    type Pick = fn(&DisplacementTerms) -> f64;
    let pieces: [(Pick, &mut f64); 3] = [
        (|t| t.thermal, &mut out.thermal),
        (|t| t.backaction, &mut out.backaction),
        (|t| t.cavity_noise, &mut out.cavity_noise),
    ];
    for (pick, slot) in pieces {
        let r = integrate_real_line(|w| pick(&model.displacement_two_sided(w)) / z2, &pts, scale, opts)?;
        *slot = spectral_measure(r.value) * z2;
    }
    Ok(out)
}
