use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};
use crate::quad::{integrate, QuadOptions};

/// Gaussian spot on a square membrane and the drum mode it probes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeOverlapSpec {
    /// Spot centre (x0, y0) measured from a membrane corner, m.
    pub center: [f64; 2],
    /// 1/e² intensity radii (w_x, w_y), m.
    pub waist: [f64; 2],
    /// Membrane side, m.
    pub side: f64,
    pub mode_indices: (u32, u32),
}

impl ModeOverlapSpec {
    pub fn new(center: [f64; 2], waist: [f64; 2], side: f64, mode_indices: (u32, u32)) -> Result<Self> {
        require_positive("spot waist x", waist[0])?;
        require_positive("spot waist y", waist[1])?;
        require_positive("membrane side", side)?;
        if mode_indices.0 == 0 || mode_indices.1 == 0 {
            return Err(Error::domain("mode indices must be positive"));
        }
        if !(center[0].is_finite() && center[1].is_finite()) {
            return Err(Error::domain("spot centre must be finite"));
        }
        Ok(Self { center, waist, side, mode_indices })
    }
}

/// ∫₀^d g(x) sin(mπx/d) dx for a normalised 1-D Gaussian g with 1/e² radius w.
fn axis_overlap(x0: f64, w: f64, d: f64, m: u32) -> Result<f64> {
    let norm = (2.0 / PI).sqrt() / w;
    let kx = m as f64 * PI / d;
    let f = |x: f64| norm * (-2.0 * (x - x0).powi(2) / (w * w)).exp() * (kx * x).sin();
    let mut pts: Vec<f64> = (0..=m).map(|j| j as f64 * d / m as f64).collect();
    for s in [-6.0, -4.0, -3.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0, 4.0, 6.0] {
        let p = x0 + s * w;
        if p > 0.0 && p < d {
            pts.push(p);
        }
    }
    let opts = QuadOptions { abs_tol: 1e-14, rel_tol: 1e-12, max_intervals: 10_000 };
    Ok(integrate(f, &pts, opts)?.value)
}

/// η_mn = |∬ I(x,y) sin(mπx/d) sin(nπy/d) dx dy| over the membrane, with I a
/// normalised elliptical Gaussian. The integrand factorises, so η is the
/// product of two one-dimensional overlaps.
pub fn mode_overlap(spec: &ModeOverlapSpec) -> Result<f64> {
    let ix = axis_overlap(spec.center[0], spec.waist[0], spec.side, spec.mode_indices.0)?;
    let iy = axis_overlap(spec.center[1], spec.waist[1], spec.side, spec.mode_indices.1)?;
    Ok((ix * iy).abs())
}

/// G = η dω_c/dz, rad/s per m.
pub fn coupling_g(dwc_dz: f64, eta: f64) -> f64 {
    eta * dwc_dz.abs()
}

/// Coupling scale of a moving end mirror, ω_c / L.
pub fn end_mirror_coupling(omega_c: f64, length: f64) -> f64 {
    omega_c / length
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force midpoint rule over the full square.
    fn brute(spec: &ModeOverlapSpec, n: usize) -> f64 {
        let d = spec.side;
        let h = d / n as f64;
        let (wx, wy) = (spec.waist[0], spec.waist[1]);
        let (m, nn) = (spec.mode_indices.0 as f64, spec.mode_indices.1 as f64);
        let norm = 2.0 / (PI * wx * wy);
        let mut acc = 0.0;
        for i in 0..n {
            let x = (i as f64 + 0.5) * h;
            let gx = (-2.0 * (x - spec.center[0]).powi(2) / (wx * wx)).exp() * (m * PI * x / d).sin();
            for j in 0..n {
                let y = (j as f64 + 0.5) * h;
                let gy = (-2.0 * (y - spec.center[1]).powi(2) / (wy * wy)).exp() * (nn * PI * y / d).sin();
                acc += gx * gy;
            }
        }
        (acc * norm * h * h).abs()
    }

    #[test]
    fn device_overlap_against_grid() {
        let spec = ModeOverlapSpec::new([108e-6, 99e-6], [92e-6, 88e-6], 500e-6, (2, 2)).unwrap();
        let eta = mode_overlap(&spec).unwrap();
        assert!((eta - brute(&spec, 1500)).abs() < 1e-5, "{eta}");
        assert!((eta - 0.67).abs() < 0.01, "{eta}");
    }

    #[test]
    fn limits() {
        let d = 500e-6;
        let tiny = ModeOverlapSpec::new([d / 4.0, d / 4.0], [1e-7, 1e-7], d, (2, 2)).unwrap();
        let v = mode_overlap(&tiny).unwrap();
        assert!((v - 1.0).abs() < 1e-6, "{v}");
        let node = ModeOverlapSpec::new([d / 2.0, d / 4.0], [50e-6, 50e-6], d, (2, 2)).unwrap();
        assert!(mode_overlap(&node).unwrap() < 1e-12);
        let a = ModeOverlapSpec::new([120e-6, 99e-6], [92e-6, 88e-6], d, (2, 2)).unwrap();
        let b = ModeOverlapSpec::new([d - 120e-6, 99e-6], [92e-6, 88e-6], d, (2, 2)).unwrap();
        assert!((mode_overlap(&a).unwrap() - mode_overlap(&b).unwrap()).abs() < 1e-12);
    }
}
