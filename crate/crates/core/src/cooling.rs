//! Sideband-cooling figures of merit: optical damping, occupation and its
//! decomposition, the quantum limit, and sweeps over drive strength.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};
use crate::params::{CavityParams, Drive, MechanicalMode, System};
use crate::response::chi_cavity;
use crate::spectra::integrated_displacement;
use crate::units::{HBAR, K_B};

/// Anti-Stokes (A₋) and Stokes (A₊) scattering rates, rad/s.
pub fn scattering_rates(cavity: &CavityParams, mode: &MechanicalMode, drive: &Drive) -> (f64, f64) {
    let k = drive.g0 * drive.g0 * cavity.kappa * drive.photon_number;
    (
        k * chi_cavity(mode.omega_m, cavity).norm_sqr(),
        k * chi_cavity(-mode.omega_m, cavity).norm_sqr(),
    )
}

/// Γ_opt = A₋ − A₊; positive (cooling) for red detuning.
pub fn optical_damping(cavity: &CavityParams, mode: &MechanicalMode, drive: &Drive) -> f64 {
    let (a_minus, a_plus) = scattering_rates(cavity, mode, drive);
    a_minus - a_plus
}

/// Optical damping produced by a single intracavity photon.
pub fn optical_damping_per_photon(cavity: &CavityParams, mode: &MechanicalMode, drive: &Drive) -> f64 {
    optical_damping(cavity, mode, &drive.with_photon_number(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoolingPoint {
    pub photon_number: f64,
    /// Γ_opt, rad/s.
    pub gamma_opt: f64,
    /// Γ = Γ_m + Γ_opt, rad/s.
    pub gamma_total: f64,
    /// Thermal quanta remaining after damping, n_th Γ_m / Γ.
    pub nbar_thermal: f64,
    /// Quanta added by radiation-pressure shot noise, A₊ / Γ.
    pub nbar_backaction: f64,
    /// Quanta driven by cavity-frequency noise.
    pub nbar_cavity_noise: f64,
    pub nbar_total: f64,
    /// Mode temperature with k_B T = ħ ω_m n̄.
    pub t_eff: f64,
}

fn require_red(cavity: &CavityParams) -> Result<()> {
    if cavity.detuning > 0.0 {
        return Err(Error::domain(format!(
            "cooling requires red detuning (Δ < 0), got Δ = {:.4e} rad/s",
            cavity.detuning
        )));
    }
    Ok(())
}

/// Steady-state occupation at one operating point.
pub fn effective_occupation(system: &System) -> Result<CoolingPoint> {
    require_red(&system.cavity)?;
    let (cav, mode, drive) = (&system.cavity, &system.mode, &system.drive);
    let (a_minus, a_plus) = scattering_rates(cav, mode, drive);
    let gamma_opt = a_minus - a_plus;
    let gamma = mode.gamma_m + gamma_opt;
    if !(gamma > 0.0) {
        return Err(Error::Instability(format!("net damping {gamma:.4e} rad/s is not positive")));
    }
    let nbar_thermal = system.environment.nbar_th * mode.gamma_m / gamma;
    let nbar_backaction = a_plus / gamma;
    let nbar_cavity_noise = match &system.cavity_noise {
        Some(noise) if !noise.is_zero() && drive.photon_number > 0.0 => {
            integrated_displacement(system)?.cavity_noise / (2.0 * mode.z_zp * mode.z_zp)
        }
        _ => 0.0,
    };
    let nbar_total = nbar_thermal + nbar_backaction + nbar_cavity_noise;
    Ok(CoolingPoint {
        photon_number: drive.photon_number,
        gamma_opt,
        gamma_total: gamma,
        nbar_thermal,
        nbar_backaction,
        nbar_cavity_noise,
        nbar_total,
        t_eff: HBAR * mode.omega_m * nbar_total / K_B,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantumLimit {
    pub nbar_min: f64,
    /// Detuning at which the minimum is reached, rad/s.
    pub detuning: f64,
}

/// Backaction-limited occupation A₊/(A₋ − A₊) minimised over red detuning,
/// for N → ∞ and a negligible thermal bath.
pub fn quantum_limit(kappa: f64, omega_m: f64) -> Result<QuantumLimit> {
    require_positive("cavity linewidth", kappa)?;
    require_positive("mechanical frequency", omega_m)?;
    let occupation = |delta: f64| {
        let lo = (kappa / 2.0).powi(2);
        let cool = 1.0 / (lo + (delta + omega_m).powi(2));
        let heat = 1.0 / (lo + (delta - omega_m).powi(2));
        heat / (cool - heat)
    };
    // golden-section search; the occupation is unimodal on Δ < 0
    let invphi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (-(omega_m + 10.0 * kappa), -1e-9 * omega_m);
    let mut c = b - invphi * (b - a);
    let mut d = a + invphi * (b - a);
    let (mut fc, mut fd) = (occupation(c), occupation(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-13 * omega_m {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = occupation(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = occupation(d);
        }
    }
    let delta = 0.5 * (a + b);
    Ok(QuantumLimit { nbar_min: occupation(delta), detuning: delta })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub points: Vec<CoolingPoint>,
    /// Index of the smallest total occupation.
    pub argmin: usize,
    /// True when the minimum lies strictly inside the swept range.
    pub interior_minimum: bool,
}

impl Sweep {
    pub fn minimum(&self) -> &CoolingPoint {
        &self.points[self.argmin]
    }
}

/// Occupation over a list of intracavity photon numbers. Points are computed
/// in parallel and returned in input order.
pub fn power_sweep(system: &System, photon_numbers: &[f64]) -> Result<Sweep> {
    if photon_numbers.is_empty() {
        return Err(Error::domain("empty photon-number list"));
    }
    let points: Vec<CoolingPoint> = photon_numbers
        .par_iter()
        .map(|&n| effective_occupation(&system.with_photon_number(n)))
        .collect::<Result<Vec<_>>>()?;
    let argmin = points
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.nbar_total.total_cmp(&b.1.nbar_total))
        .map(|(i, _)| i)
        .expect("non-empty");
    Ok(Sweep { interior_minimum: argmin > 0 && argmin + 1 < points.len(), argmin, points })
}

/// Photon numbers that produce the requested total damping rates Γ (rad/s).
pub fn photon_numbers_for_damping(system: &System, gammas: &[f64]) -> Result<Vec<f64>> {
    let per_photon = optical_damping_per_photon(&system.cavity, &system.mode, &system.drive);
    require_positive("optical damping per photon", per_photon)?;
    gammas
        .iter()
        .map(|&g| {
            let n = (g - system.mode.gamma_m) / per_photon;
            if n < 0.0 {
                Err(Error::domain(format!("damping {g:.4e} rad/s is below the intrinsic linewidth")))
            } else {
                Ok(n)
            }
        })
        .collect()
}

/// `count` logarithmically spaced values from `lo` to `hi` inclusive.
pub fn log_space(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![lo],
        _ => (0..count)
            .map(|i| match i {
                0 => lo,
                i if i == count - 1 => hi,
                _ => (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (count - 1) as f64).exp(),
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::units::hz_to_rad;

    #[test]
    fn quantum_limit_matches_stationary_point() {
        // d/dΔ of the sideband ratio vanishes at Δ² = ω_m² + κ²/4
        for (kappa, wm) in [(1.0, 1.7), (3.0, 1.0), (0.1, 1.0), (hz_to_rad(0.948e6), hz_to_rad(1.6e6))] {
            let q = quantum_limit(kappa, wm).unwrap();
            let d_star = -(wm * wm + kappa * kappa / 4.0).sqrt();
            assert!((q.detuning / d_star - 1.0).abs() < 1e-6);
            let r = (kappa * kappa / 4.0 + (d_star - wm).powi(2)) / (kappa * kappa / 4.0 + (d_star + wm).powi(2));
            assert!((q.nbar_min * (r - 1.0) - 1.0).abs() < 1e-9);
        }
    }

    fn area_vs_rates(n: f64) -> f64 {
        let sys = fixtures::device_one().unwrap().with_photon_number(n);
        let p = effective_occupation(&sys).unwrap();
        let z = integrated_displacement(&sys).unwrap();
        // ⟨z²⟩/Z² = 2 n̄ + 1 for the thermal and backaction parts together
        let from_area = (z.thermal + z.backaction) / sys.mode.z_zp.powi(2);
        from_area / (2.0 * (p.nbar_thermal + p.nbar_backaction) + 1.0) - 1.0
    }

    #[test]
    fn occupation_matches_quadrature() {
        // the rate-equation occupation is the weak-coupling limit of the
        // exact spectral area; the two separate at order Γ/κ
        let weak = area_vs_rates(3e4);
        assert!(weak.abs() < 1e-4, "{weak}");
        let strong = area_vs_rates(3.3e6);
        assert!(strong.abs() < 1e-2, "{strong}");
    }

    #[test]
    fn blue_detuning_rejected() {
        let sys = fixtures::device_one().unwrap();
        let blue = sys.with_detuning(sys.cavity.detuning.abs());
        assert!(effective_occupation(&blue).is_err());
    }
}
