use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::MechanicalMode;
use crate::units::K_B;

/// One bath-temperature estimate: T_eff·Γ/Γ_m at a cryostat reading.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathPoint {
    pub t_cryostat: f64,
    pub t_bath_estimate: f64,
    /// One-sigma uncertainty of the estimate; zero means unknown.
    pub sigma: f64,
    /// Cavity-noise area relative to the thermal area for this record.
    pub noise_ratio: f64,
}

/// Builds a point from a fitted peak variance (m²) and total linewidth Γ.
pub fn bath_point_from_area(
    t_cryostat: f64,
    variance: f64,
    variance_sigma: f64,
    gamma: f64,
    mode: &MechanicalMode,
    noise_ratio: f64,
) -> BathPoint {
    let scale = mode.mass_eff * mode.omega_m * mode.omega_m / K_B * gamma / mode.gamma_m;
    BathPoint { t_cryostat, t_bath_estimate: variance * scale, sigma: variance_sigma * scale, noise_ratio }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathOptions {
    /// Records whose noise_ratio exceeds this are left out of the fit.
    pub noise_ratio_threshold: f64,
}

impl Default for BathOptions {
    fn default() -> Self {
        Self { noise_ratio_threshold: 0.05 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BathFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_sigma: f64,
    pub intercept_sigma: f64,
    /// |intercept| ≤ 2σ.
    pub intercept_consistent_with_zero: bool,
    pub included: Vec<bool>,
    pub per_point_t_bath: Vec<f64>,
}

/// Weighted straight-line fit of T_bath estimate against cryostat
/// temperature. With all sigmas zero the fit is unweighted and the scatter
/// sets the parameter uncertainties.
pub fn bath_extrapolation(points: &[BathPoint], opts: BathOptions) -> Result<BathFit> {
    let included: Vec<bool> = points.iter().map(|p| p.noise_ratio <= opts.noise_ratio_threshold).collect();
    let used: Vec<&BathPoint> = points.iter().zip(&included).filter(|(_, &k)| k).map(|(p, _)| p).collect();
    let weighted = used.iter().all(|p| p.sigma > 0.0);
    let w = |p: &BathPoint| if weighted { 1.0 / (p.sigma * p.sigma) } else { 1.0 };
    let (s, sx, sy, sxx, sxy) = used.iter().fold((0.0, 0.0, 0.0, 0.0, 0.0), |a, p| {
        let wi = w(p);
        (
            a.0 + wi,
            a.1 + wi * p.t_cryostat,
            a.2 + wi * p.t_bath_estimate,
            a.3 + wi * p.t_cryostat * p.t_cryostat,
            a.4 + wi * p.t_cryostat * p.t_bath_estimate,
        )
    });
    let det = s * sxx - sx * sx;
    let distinct = used.iter().any(|p| (p.t_cryostat - used[0].t_cryostat).abs() > 0.0);
    if used.len() < 2 || !distinct || det.abs() <= 1e-12 * s * sxx {
        return Err(Error::Singular(format!(
            "bath extrapolation needs at least two distinct temperatures ({} usable points)",
            used.len()
        )));
    }
    let slope = (s * sxy - sx * sy) / det;
    let intercept = (sxx * sy - sx * sxy) / det;
    let mut var_slope = s / det;
    let mut var_intercept = sxx / det;
    if !weighted {
        let dof = used.len() as f64 - 2.0;
        let ssr: f64 = used.iter().map(|p| (p.t_bath_estimate - intercept - slope * p.t_cryostat).powi(2)).sum();
        let scale = if dof > 0.0 { ssr / dof } else { f64::INFINITY };
        var_slope *= scale;
        var_intercept *= scale;
    }
    let intercept_sigma = var_intercept.sqrt();
    Ok(BathFit {
        slope,
        intercept,
        slope_sigma: var_slope.sqrt(),
        intercept_sigma,
        intercept_consistent_with_zero: intercept.abs() <= 2.0 * intercept_sigma,
        per_point_t_bath: points.iter().map(|p| p.t_bath_estimate).collect(),
        included,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(offset: f64) -> Vec<BathPoint> {
        [4.9, 10.0, 15.0, 4.9, 10.0, 15.0]
            .iter()
            .enumerate()
            .map(|(i, &t)| BathPoint {
                t_cryostat: t,
                t_bath_estimate: t + offset + if i % 2 == 0 { 0.05 } else { -0.05 },
                sigma: 0.1,
                noise_ratio: 0.0,
            })
            .collect()
    }

    #[test]
    fn recovers_offset() {
        let f = bath_extrapolation(&pts(2.0), BathOptions::default()).unwrap();
        assert!((f.intercept - 2.0).abs() < 0.1, "{}", f.intercept);
        assert!((f.slope - 1.0).abs() < 0.02);
        assert!(!f.intercept_consistent_with_zero);
        let g = bath_extrapolation(&pts(0.0), BathOptions::default()).unwrap();
        assert!(g.intercept_consistent_with_zero);
    }

    #[test]
    fn single_temperature_is_singular() {
        let p: Vec<_> = pts(0.0).into_iter().map(|mut p| {
            p.t_cryostat = 4.9;
            p
        }).collect();
        assert!(matches!(bath_extrapolation(&p, BathOptions::default()), Err(Error::Singular(_))));
    }

    #[test]
    fn noisy_records_excluded() {
        let mut p = pts(0.0);
        p[0].noise_ratio = 0.3;
        p[0].t_bath_estimate = 100.0;
        let f = bath_extrapolation(&p, BathOptions::default()).unwrap();
        assert!(!f.included[0]);
        assert!((f.slope - 1.0).abs() < 0.02);
    }
}
