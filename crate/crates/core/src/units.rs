//! Physical constants and the unit conversions between laboratory (Hz) and
//! internal (rad/s) frequencies.
//!
//! This is the only module allowed to multiply or divide by 2π; a test greps
//! the rest of the crate to keep it that way.

use std::f64::consts::PI;

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;
/// Speed of light in vacuum, m/s.
pub const C_LIGHT: f64 = 2.997_924_58e8;
/// Elementary charge, C.
pub const Q_E: f64 = 1.602_176_634e-19;

/// Cyclic frequency (Hz) to angular frequency (rad/s).
#[inline]
pub fn hz_to_rad(f_hz: f64) -> f64 {
    2.0 * PI * f_hz
}

/// Angular frequency (rad/s) to cyclic frequency (Hz).
#[inline]
pub fn rad_to_hz(omega: f64) -> f64 {
    omega / (2.0 * PI)
}

/// A power spectral density quoted per Hz, expressed per (rad/s).
#[inline]
pub fn per_hz_to_per_rad(psd_per_hz: f64) -> f64 {
    psd_per_hz / (2.0 * PI)
}

/// The measure dω/2π used for every spectral integral in the crate.
#[inline]
pub fn spectral_measure(d_omega: f64) -> f64 {
    d_omega / (2.0 * PI)
}

/// Vacuum wavenumber k = 2π/λ.
#[inline]
pub fn wavenumber(wavelength: f64) -> f64 {
    2.0 * PI / wavelength
}

/// Optical angular frequency ω = c k for a vacuum wavelength.
#[inline]
pub fn optical_angular_frequency(wavelength: f64) -> f64 {
    C_LIGHT * wavenumber(wavelength)
}

/// Wavelength for a vacuum wavenumber.
#[inline]
pub fn wavelength_from_wavenumber(k: f64) -> f64 {
    2.0 * PI / k
}

/// Free spectral range in rad/s of a two-mirror cavity of length `l`.
#[inline]
pub fn free_spectral_range(length: f64) -> f64 {
    PI * C_LIGHT / length
}

/// Full turn of phase, for phase-unwrapping code that must not spell 2π itself.
pub const FULL_TURN: f64 = 2.0 * PI;

/// Wraps a phase into (-π, π].
#[inline]
pub fn wrap_phase(phi: f64) -> f64 {
    let mut p = phi % FULL_TURN;
    if p > PI {
        p -= FULL_TURN;
    } else if p <= -PI {
        p += FULL_TURN;
    }
    p
}

/// Mean thermal occupation in the high-temperature limit, k_B T / (ħ ω).
pub fn thermal_occupation_high_t(temperature: f64, omega: f64) -> f64 {
    K_B * temperature / (HBAR * omega)
}

/// Bose-Einstein occupation 1/(exp(ħω/k_B T) - 1).
pub fn thermal_occupation_bose(temperature: f64, omega: f64) -> f64 {
    if temperature <= 0.0 {
        return 0.0;
    }
    1.0 / (HBAR * omega / (K_B * temperature)).exp_m1()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hz_round_trip() {
        for f in [0.0, 1.0, 1.575e6, 2.8e14] {
            assert!((rad_to_hz(hz_to_rad(f)) - f).abs() <= 1e-15 * f.max(1.0));
        }
    }

    #[test]
    fn bose_tends_to_high_t() {
        let w = hz_to_rad(1.575e6);
        let hi = thermal_occupation_high_t(4.9, w);
        let bose = thermal_occupation_bose(4.9, w);
        // n_bose ≈ kT/ħω - 1/2
        assert!((hi - bose - 0.5).abs() < 1e-3);
    }

    #[test]
    fn wrap_phase_range() {
        for p in [-10.0, -PI, -1.0, 0.0, 3.0, PI, 7.0] {
            let w = wrap_phase(p);
            assert!(w > -PI - 1e-15 && w <= PI + 1e-15);
            assert!(((p - w) / FULL_TURN - ((p - w) / FULL_TURN).round()).abs() < 1e-12);
        }
    }
}
