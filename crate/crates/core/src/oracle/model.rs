//! Real-valued drift and diffusion matrices of the linearized classical
//! Langevin equations.
//!
//! State: [c_r, c_i, d_r, d_i, b1_r, b1_i, …] where c is the membrane
//! amplitude (z = 2 Z_zp c_r), d the intracavity field fluctuation in the
//! frame of the laser (ā = √N real), and b_j the cavity-structure modes whose
//! sum δf = Σ 2 b_j,r shifts the cavity frequency. Noise strengths are the
//! symmetrised quantum values (n + ½ per bath, ½ for optical vacuum), so the
//! folded one-sided spectra reproduce the analytic ones exactly.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::params::System;
use crate::spectra::CavityNoiseSpectrum;

/// Which stochastic drives are switched on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct NoiseSources {
    pub thermal: bool,
    pub backaction: bool,
    pub cavity_noise: bool,
}

impl Default for NoiseSources {
    fn default() -> Self {
        Self { thermal: true, backaction: true, cavity_noise: true }
    }
}

impl NoiseSources {
    pub fn only_thermal() -> Self {
        Self { thermal: true, backaction: false, cavity_noise: false }
    }

    pub fn only_backaction() -> Self {
        Self { thermal: false, backaction: true, cavity_noise: false }
    }

    pub fn only_cavity_noise() -> Self {
        Self { thermal: false, backaction: false, cavity_noise: true }
    }
}

pub struct LinearSde {
    pub drift: DMatrix<f64>,
    /// B in dx = A x dt + B dW with ⟨dW dWᵀ⟩ = I dt.
    pub diffusion: DMatrix<f64>,
    /// z = ⟨displacement, x⟩.
    pub displacement: DVector<f64>,
    /// Relative intracavity intensity fluctuation δ|a|²/N = ⟨intensity, x⟩;
    /// all zero without a field, where the ratio is undefined.
    pub intensity: DVector<f64>,
}

pub fn build(system: &System, sources: NoiseSources) -> Result<LinearSde> {
    let modes = match &system.cavity_noise {
        None => Vec::new(),
        Some(CavityNoiseSpectrum::Modes { modes }) => modes.clone(),
        Some(n) if n.is_zero() => Vec::new(),
        Some(_) => {
            return Err(Error::domain(
                "the oracle needs cavity noise expressed as explicit modes (kind = \"modes\")",
            ))
        }
    };
    let n = 4 + 2 * modes.len();
    let mode = &system.mode;
    let cav = &system.cavity;
    let abar = system.drive.photon_number.sqrt();
    let g = system.drive.g0 * abar;
    let mut a = DMatrix::zeros(n, n);
    let (gm, wm) = (mode.gamma_m, mode.omega_m);
    a[(0, 0)] = -gm / 2.0;
    a[(0, 1)] = wm;
    a[(1, 0)] = -wm;
    a[(1, 1)] = -gm / 2.0;
    a[(1, 2)] = -2.0 * g;
    a[(2, 2)] = -cav.kappa / 2.0;
    a[(2, 3)] = -cav.detuning;
    a[(3, 2)] = cav.detuning;
    a[(3, 3)] = -cav.kappa / 2.0;
    a[(3, 0)] = -2.0 * g;
    let mut b = DMatrix::zeros(n, n);
    if sources.thermal {
        let s = (system.environment.nbar_th + 0.5) * gm / 2.0;
        b[(0, 0)] = s.sqrt();
        b[(1, 1)] = s.sqrt();
    }
    if sources.backaction {
        let s = (cav.kappa / 4.0).sqrt();
        b[(2, 2)] = s;
        b[(3, 3)] = s;
    }
    for (j, m) in modes.iter().enumerate() {
        let r = 4 + 2 * j;
        a[(r, r)] = -m.gamma / 2.0;
        a[(r, r + 1)] = m.omega;
        a[(r + 1, r)] = -m.omega;
        a[(r + 1, r + 1)] = -m.gamma / 2.0;
        // δf = 2 b_r enters ḋ as −i ā δf
        a[(3, r)] = -2.0 * abar;
        if sources.cavity_noise {
            let s = (m.gamma * m.frequency_variance / 4.0).sqrt();
            b[(r, r)] = s;
            b[(r + 1, r + 1)] = s;
        }
    }
    let mut displacement = DVector::zeros(n);
    displacement[0] = 2.0 * mode.z_zp;
    let mut intensity = DVector::zeros(n);
    if abar > 0.0 {
        intensity[2] = 2.0 / abar;
    }
    Ok(LinearSde { drift: a, diffusion: b, displacement, intensity })
}
