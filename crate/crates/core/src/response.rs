//! Susceptibilities of the linearized cavity–membrane system.
//!
//! Conventions: the cavity field fluctuation obeys
//! ḋ = (−κ/2 + iΔ) d − i ā (G z + δf) + √κ ξ, with Δ < 0 for red detuning,
//! and the mechanical amplitude c obeys ċ = (−iω_m − Γ_m/2) c − i g0 ā (d + d†) + √Γ_m η.
//! Fourier transforms use x(ω) = ∫ x(t) e^{iωt} dt.

use num_complex::Complex64;

use crate::params::{CavityParams, Drive, MechanicalMode};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// χ_c(ω) = 1 / (κ/2 − i(Δ + ω)).
#[inline]
pub fn chi_cavity(omega: f64, cavity: &CavityParams) -> Complex64 {
    1.0 / Complex64::new(cavity.kappa / 2.0, -(cavity.detuning + omega))
}

/// χ_m(ω) = 1 / (Γ_m/2 − i(ω − ω_m)).
#[inline]
pub fn chi_mech(omega: f64, mode: &MechanicalMode) -> Complex64 {
    1.0 / Complex64::new(mode.gamma_m / 2.0, -(omega - mode.omega_m))
}

/// Transduction kernel Π(ω) = χ_c(ω) − χ_c*(−ω). Satisfies Π(−ω) = −Π*(ω).
#[inline]
pub fn transduction(omega: f64, cavity: &CavityParams) -> Complex64 {
    chi_cavity(omega, cavity) - chi_cavity(-omega, cavity).conj()
}

/// Bare inverse position response D(ω) = 1/(χ_m(ω) χ_m*(−ω))
/// = ω_m² − ω² − iΓ_m ω + Γ_m²/4.
#[inline]
pub fn bare_inverse_response(omega: f64, mode: &MechanicalMode) -> Complex64 {
    let g = mode.gamma_m;
    Complex64::new(mode.omega_m * mode.omega_m - omega * omega + g * g / 4.0, -g * omega)
}

/// Effective inverse response 𝒩(ω) = D(ω) − 2i ω_m g0² N Π(ω).
///
/// It satisfies 𝒩(−ω) = 𝒩*(ω); its zeros in the lower half plane are the
/// dressed mechanical poles.
#[inline]
pub fn effective_inverse_response(
    omega: f64,
    cavity: &CavityParams,
    mode: &MechanicalMode,
    drive: &Drive,
) -> Complex64 {
    let k = 2.0 * mode.omega_m * drive.g0 * drive.g0 * drive.photon_number;
    bare_inverse_response(omega, mode) - I * k * transduction(omega, cavity)
}

/// Bundles the parameter references needed to evaluate every kernel at one ω.
#[derive(Debug, Clone, Copy)]
pub struct ResponseKernel<'a> {
    pub cavity: &'a CavityParams,
    pub mode: &'a MechanicalMode,
    pub drive: &'a Drive,
}

/// All kernels evaluated at a single frequency.
#[derive(Debug, Clone, Copy)]
pub struct KernelValues {
    pub chi_c: Complex64,
    pub chi_c_neg: Complex64,
    pub pi: Complex64,
    pub n_eff: Complex64,
}

impl<'a> ResponseKernel<'a> {
    pub fn new(cavity: &'a CavityParams, mode: &'a MechanicalMode, drive: &'a Drive) -> Self {
        Self { cavity, mode, drive }
    }

    pub fn at(&self, omega: f64) -> KernelValues {
        let chi_c = chi_cavity(omega, self.cavity);
        let chi_c_neg = chi_cavity(-omega, self.cavity);
        let pi = chi_c - chi_c_neg.conj();
        let k = 2.0 * self.mode.omega_m * self.drive.g0 * self.drive.g0 * self.drive.photon_number;
        let n_eff = bare_inverse_response(omega, self.mode) - I * k * pi;
        KernelValues { chi_c, chi_c_neg, pi, n_eff }
    }

    /// Position response to an external force including dynamical
    /// backaction, 1/(m_eff 𝒩(ω)) in m/N.
    pub fn effective_position_susceptibility(&self, omega: f64) -> Complex64 {
        let n = self.at(omega).n_eff;
        1.0 / (self.mode.mass_eff * n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::hz_to_rad;

    fn setup() -> (CavityParams, MechanicalMode, Drive) {
        let cav = CavityParams::symmetric(hz_to_rad(1.2e6), hz_to_rad(-1.6e6)).unwrap();
        let mode = MechanicalMode::new(hz_to_rad(1.575e6), 1e4, 6.75e-12).unwrap();
        let drive = Drive::new(6e6, hz_to_rad(1.9e16), &mode).unwrap();
        (cav, mode, drive)
    }

    #[test]
    fn bare_response_is_product_of_susceptibilities() {
        let (_, mode, _) = setup();
        for w in [-3e7, -1e7, 0.0, 9.9e6, 2e7] {
            let direct = 1.0 / (chi_mech(w, &mode) * chi_mech(-w, &mode).conj());
            let closed = bare_inverse_response(w, &mode);
            assert!((direct - closed).norm() <= 1e-12 * closed.norm().max(1.0));
        }
    }

    #[test]
    fn n_eff_reality_condition() {
        let (cav, mode, drive) = setup();
        for w in [1e3, 5e6, 9.9e6, 3e7] {
            let a = effective_inverse_response(w, &cav, &mode, &drive);
            let b = effective_inverse_response(-w, &cav, &mode, &drive);
            assert!((a.conj() - b).norm() <= 1e-12 * a.norm());
        }
    }

    #[test]
    fn position_susceptibility_reduces_to_bare_oscillator() {
        let (cav, mode, drive) = setup();
        let drive0 = drive.with_photon_number(0.0);
        let k = ResponseKernel::new(&cav, &mode, &drive0);
        let w: f64 = 3e6;
        let bare = 1.0
            / (mode.mass_eff
                * Complex64::new(mode.omega_m.powi(2) - w * w + mode.gamma_m.powi(2) / 4.0, -mode.gamma_m * w));
        assert!((k.effective_position_susceptibility(w) - bare).norm() < 1e-12 * bare.norm());
    }
}
