use serde::{Deserialize, Serialize};

use crate::analysis::fit::{fit_lorentzian, FitOptions};
use crate::cooling::optical_damping_per_photon;
use crate::error::{Error, Result};
use crate::params::{CavityParams, DetectionChain, Drive, MechanicalMode};
use crate::response::transduction;
use crate::spectra::{Quantity, Sidedness, Spectrum};
use crate::units::{rad_to_hz, K_B};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CalibrationMethod {
    Thermal,
    Geometric,
    Damping,
}

impl CalibrationMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            CalibrationMethod::Thermal => "thermal",
            CalibrationMethod::Geometric => "geometric",
            CalibrationMethod::Damping => "damping",
        }
    }
}

/// Outcome of one coupling calibration. Statistical uncertainty and the
/// declared systematic uncertainties are kept separate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub method: CalibrationMethod,
    /// G/2π in Hz/m.
    pub g_over_2pi: f64,
    /// Statistical standard error of G/2π, Hz/m.
    pub g_over_2pi_sigma: f64,
    /// g0/2π = G Z_zp/2π in Hz.
    pub g0_over_2pi: f64,
    /// Relative systematic uncertainties on G, by source.
    pub systematics: Vec<(String, f64)>,
    /// Per-point G/2π estimates (empty for single-number methods).
    pub per_point: Vec<f64>,
    pub inputs: serde_json::Value,
    pub flags: Vec<String>,
}

impl CalibrationReport {
    /// G in rad/s per metre.
    pub fn coupling_g(&self) -> f64 {
        crate::units::hz_to_rad(self.g_over_2pi)
    }
}

/// Pairwise |Gᵢ − Gⱼ| / (Gᵢ + Gⱼ) over all report pairs.
pub fn pairwise_spread(reports: &[CalibrationReport]) -> Vec<(CalibrationMethod, CalibrationMethod, f64)> {
    let mut out = Vec::new();
    for (i, a) in reports.iter().enumerate() {
        for b in &reports[i + 1..] {
            out.push((a.method, b.method, (a.g_over_2pi - b.g_over_2pi).abs() / (a.g_over_2pi + b.g_over_2pi)));
        }
    }
    out
}

/// One thermal-calibration record: a one-sided S_I/Ī² spectrum taken with
/// the bath at `t_bath`, and the frequency window holding the membrane peak.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermalCalPoint {
    pub t_bath: f64,
    pub window: (f64, f64),
    pub spectrum: Spectrum,
}

/// Thermal calibration: the peak area of S_I/(Ī²|Π|²) equals G²⟨z²⟩ and
/// ⟨z²⟩ = k_B T/(m ω_m²)·Γ_m/Γ with Γ the fitted linewidth, so G² follows
/// from a one-parameter least-squares fit across the series.
pub fn calibrate_g_thermal(
    points: &[ThermalCalPoint],
    cavity: &CavityParams,
    mode: &MechanicalMode,
) -> Result<CalibrationReport> {
    if points.is_empty() {
        return Err(Error::domain("thermal calibration needs at least one spectrum"));
    }
    let mut flags = Vec::new();
    let mut areas = Vec::with_capacity(points.len());
    let mut expected = Vec::with_capacity(points.len());
    let mut area_errs = Vec::with_capacity(points.len());
    let mut linewidths = Vec::with_capacity(points.len());
    for (j, p) in points.iter().enumerate() {
        if p.spectrum.quantity != Quantity::RelativeIntensity || p.spectrum.sidedness != Sidedness::OneSided {
            return Err(Error::domain("thermal calibration expects one-sided relative-intensity spectra"));
        }
        let divided = Spectrum::new(
            p.spectrum.omega.clone(),
            p.spectrum
                .omega
                .iter()
                .zip(&p.spectrum.values)
                .map(|(&w, &s)| s / transduction(w, cavity).norm_sqr())
                .collect(),
            Quantity::RelativeIntensity,
            Sidedness::OneSided,
        )?;
        let fit = fit_lorentzian(&divided, p.window, &FitOptions::default())?;
        for w in &fit.warnings {
            flags.push(format!("point {j}: {w}"));
        }
        let variance = K_B * p.t_bath / (mode.mass_eff * mode.omega_m * mode.omega_m) * mode.gamma_m / fit.fwhm;
        areas.push(fit.area);
        area_errs.push(fit.area_err);
        expected.push(variance);
        linewidths.push(rad_to_hz(fit.fwhm));
    }
    let sxx: f64 = expected.iter().map(|v| v * v).sum();
    let g2 = expected.iter().zip(&areas).map(|(v, a)| v * a).sum::<f64>() / sxx;
    if !(g2 > 0.0) {
        return Err(Error::Convergence("thermal calibration produced a non-positive G²".into()));
    }
    let g = g2.sqrt();
    let n = areas.len();
    let sigma_g2 = if n > 1 {
        let ssr: f64 = expected.iter().zip(&areas).map(|(v, a)| (a - g2 * v).powi(2)).sum();
        (ssr / (n as f64 - 1.0) / sxx).sqrt()
    } else {
        flags.push("single-point series: uncertainty from the fit covariance only".into());
        area_errs[0] / expected[0]
    };
    let per_point = expected.iter().zip(&areas).map(|(v, a)| rad_to_hz((a / v).max(0.0).sqrt())).collect();
    Ok(CalibrationReport {
        method: CalibrationMethod::Thermal,
        g_over_2pi: rad_to_hz(g),
        g_over_2pi_sigma: rad_to_hz(sigma_g2 / (2.0 * g)),
        g0_over_2pi: rad_to_hz(g * mode.z_zp),
        systematics: vec![("effective mass (10%)".into(), 0.05)],
        per_point,
        inputs: serde_json::json!({
            "t_bath_k": points.iter().map(|p| p.t_bath).collect::<Vec<_>>(),
            "fitted_linewidth_hz": linewidths,
            "effective_mass_kg": mode.mass_eff,
            "mechanical_frequency_hz": rad_to_hz(mode.omega_m),
        }),
        flags,
    })
}

/// Geometric calibration G = η·|dω_c/dz| at the operating point.
pub fn calibrate_g_geometric(dwc_dz: f64, eta: f64, mode: &MechanicalMode) -> Result<CalibrationReport> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::domain(format!("overlap must lie in [0, 1], got {eta}")));
    }
    if !dwc_dz.is_finite() {
        return Err(Error::domain("dω_c/dz is not finite"));
    }
    let g = eta * dwc_dz.abs();
    let mut flags = Vec::new();
    if g == 0.0 {
        flags.push("zero coupling: membrane at a standing-wave null or no overlap".into());
    }
    Ok(CalibrationReport {
        method: CalibrationMethod::Geometric,
        g_over_2pi: rad_to_hz(g),
        g_over_2pi_sigma: 0.0,
        g0_over_2pi: rad_to_hz(g * mode.z_zp),
        systematics: vec![("spot position and waist".into(), 0.05)],
        per_point: Vec::new(),
        inputs: serde_json::json!({
            "dwc_dz_hz_per_m": rad_to_hz(dwc_dz),
            "overlap": eta,
        }),
        flags,
    })
}

/// One point of a damping series: mean photocurrent Ī (A) and total
/// mechanical linewidth Γ (rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DampingPoint {
    pub photocurrent: f64,
    pub gamma: f64,
}

/// Damping calibration: with N = Ī/(ε q κ_R), Γ − Γ_m = G²·γ₁·N where γ₁ is
/// the optical damping per photon at unit G. G² comes from a least-squares
/// slope through the origin; curvature in Γ(N) is flagged as saturation.
pub fn calibrate_g_damping(
    points: &[DampingPoint],
    cavity: &CavityParams,
    mode: &MechanicalMode,
    detection: &DetectionChain,
) -> Result<CalibrationReport> {
    if points.len() < 2 {
        return Err(Error::domain("damping calibration needs at least two points"));
    }
    let unit = Drive::new(1.0, 1.0, mode)?;
    let per_photon = optical_damping_per_photon(cavity, mode, &unit);
    if !(per_photon > 0.0) {
        return Err(Error::domain("the cavity detuning gives no optical damping (needs Δ < 0)"));
    }
    let n: Vec<f64> =
        points.iter().map(|p| detection.photon_number(p.photocurrent, cavity.kappa_r)).collect::<Result<_>>()?;
    let y: Vec<f64> = points.iter().map(|p| p.gamma - mode.gamma_m).collect();
    let snn: f64 = n.iter().map(|v| v * v).sum();
    let slope = n.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>() / snn;
    let ssr: f64 = n.iter().zip(&y).map(|(a, b)| (b - slope * a).powi(2)).sum();
    let slope_sigma = (ssr / (n.len() as f64 - 1.0) / snn).sqrt();
    let g2 = slope / per_photon;
    if !(g2 > 0.0) {
        return Err(Error::Convergence("damping slope is not positive".into()));
    }
    let g = g2.sqrt();

    let mut flags = Vec::new();
    if n.len() >= 3 {
        // quadratic through the origin: y = a N + b N²
        let (s2, s3, s4) = n.iter().fold((0.0, 0.0, 0.0), |acc, &v| (acc.0 + v * v, acc.1 + v.powi(3), acc.2 + v.powi(4)));
        let (t1, t2) = n.iter().zip(&y).fold((0.0, 0.0), |acc, (&v, &w)| (acc.0 + v * w, acc.1 + v * v * w));
        let det = s2 * s4 - s3 * s3;
        if det.abs() > 0.0 {
            let a = (t1 * s4 - t2 * s3) / det;
            let b = (s2 * t2 - s3 * t1) / det;
            let n_max = n.iter().copied().fold(0.0, f64::max);
            if (b * n_max).abs() > 0.05 * a.abs() {
                flags.push(format!(
                    "Γ(Ī) is not linear: quadratic term reaches {:.1}% of the linear term",
                    100.0 * (b * n_max / a).abs()
                ));
            }
        }
    }
    Ok(CalibrationReport {
        method: CalibrationMethod::Damping,
        g_over_2pi: rad_to_hz(g),
        g_over_2pi_sigma: rad_to_hz(g * slope_sigma / (2.0 * slope)),
        g0_over_2pi: rad_to_hz(g * mode.z_zp),
        systematics: vec![("effective mass (10%)".into(), 0.05), ("port split κ_R/κ".into(), 0.05)],
        per_point: n.iter().zip(&y).map(|(a, b)| rad_to_hz((b / (a * per_photon)).max(0.0).sqrt())).collect(),
        inputs: serde_json::json!({
            "photocurrent_a": points.iter().map(|p| p.photocurrent).collect::<Vec<_>>(),
            "linewidth_hz": points.iter().map(|p| rad_to_hz(p.gamma)).collect::<Vec<_>>(),
            "photon_number": n,
            "kappa_out_hz": rad_to_hz(cavity.kappa_r),
            "efficiency": detection.efficiency(),
        }),
        flags,
    })
}
