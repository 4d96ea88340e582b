use num_complex::Complex64;

use crate::error::{require_non_negative, require_positive, Error, Result};
use crate::units::wavenumber;

/// Field reflection and transmission of a lossless dielectric slab in
/// vacuum, referenced to its two faces. The slab is symmetric, so `r` is the
/// same from either side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlabResponse {
    pub r: Complex64,
    pub t: Complex64,
    /// dr/dk at fixed thickness, m.
    pub dr_dk: Complex64,
    /// dt/dk at fixed thickness, m.
    pub dt_dk: Complex64,
}

/// Slab response at vacuum wavenumber `k`.
pub fn slab_response(k: f64, thickness: f64, index: f64) -> SlabResponse {
    let a = (1.0 - index) / (1.0 + index);
    let a2 = a * a;
    let delta = index * k * thickness;
    let e1 = Complex64::from_polar(1.0, delta);
    let e2 = e1 * e1;
    let den = 1.0 - a2 * e2;
    let i = Complex64::i();
    let r = a * (1.0 - e2) / den;
    let t = (1.0 - a2) * e1 / den;
    let d_delta_dk = index * thickness;
    let dr = 2.0 * i * a * e2 * (a2 - 1.0) / (den * den);
    let dt = i * (1.0 - a2) * e1 * (1.0 + a2 * e2) / (den * den);
    SlabResponse { r, t, dr_dk: dr * d_delta_dk, dt_dk: dt * d_delta_dk }
}

/// Membrane reflection and transmission at a vacuum wavelength.
pub fn membrane_reflectivity(thickness: f64, index: f64, wavelength: f64) -> Result<SlabResponse> {
    require_non_negative("membrane thickness", thickness)?;
    require_positive("wavelength", wavelength)?;
    if !(index >= 1.0) {
        return Err(Error::domain("refractive index must be >= 1"));
    }
    Ok(slab_response(wavenumber(wavelength), thickness, index))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Characteristic-matrix (Abelès) evaluation of a single layer, written
    /// independently of the Airy-sum expression above.
    fn abeles(k: f64, thickness: f64, n: f64) -> (Complex64, Complex64) {
        let d = n * k * thickness;
        let i = Complex64::i();
        let m11 = Complex64::new(d.cos(), 0.0);
        let m12 = -i * d.sin() / n;
        let m21 = -i * n * d.sin();
        let m22 = m11;
        let b = m11 + m12;
        let c = m21 + m22;
        ((b - c) / (b + c), 2.0 / (b + c))
    }

    #[test]
    fn matches_characteristic_matrix() {
        let k = wavenumber(1064e-9);
        for t in [10e-9, 40e-9, 100e-9, 133e-9, 400e-9] {
            let s = slab_response(k, t, 2.0);
            let (r, tt) = abeles(k, t, 2.0);
            assert!((s.r.norm_sqr() - r.norm_sqr()).abs() < 1e-13);
            assert!((s.t.norm_sqr() - tt.norm_sqr()).abs() < 1e-13);
            assert!((s.r - r).norm() < 1e-12, "{:?} vs {:?}", s.r, r);
            assert!((s.t - tt).norm() < 1e-12, "{:?} vs {:?}", s.t, tt);
        }
    }

    #[test]
    fn device_membrane_reflectivity() {
        let s = membrane_reflectivity(40e-9, 2.0, 1064e-9).unwrap();
        assert!((s.r.norm_sqr() - 0.104).abs() < 1e-3, "{}", s.r.norm_sqr());
        assert!((s.r.norm_sqr() + s.t.norm_sqr() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn quarter_wave_maximum() {
        let lambda = 1064e-9;
        let n = 2.0;
        let s = membrane_reflectivity(lambda / (4.0 * n), n, lambda).unwrap();
        assert!((s.r.norm() - 0.6).abs() < 1e-12);
        let s0 = membrane_reflectivity(0.0, n, lambda).unwrap();
        assert!(s0.r.norm() < 1e-15);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let k = wavenumber(1064e-9);
        let h = 1.0;
        let s = slab_response(k, 40e-9, 2.0);
        let p = slab_response(k + h, 40e-9, 2.0);
        let m = slab_response(k - h, 40e-9, 2.0);
        assert!(((p.r - m.r) / (2.0 * h) - s.dr_dk).norm() < 1e-6 * s.dr_dk.norm());
        assert!(((p.t - m.t) / (2.0 * h) - s.dt_dk).norm() < 1e-6 * s.dt_dk.norm());
    }
}
