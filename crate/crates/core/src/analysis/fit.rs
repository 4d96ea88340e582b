use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectra::Spectrum;

/// Lorentzian-plus-offset model L(ω) = A Γ / ((ω−ω0)² + Γ²/4) + B.
/// The peak integrates to ∫ (L − B) dω/2π = A and its height is 4A/Γ.
pub fn lorentzian(omega: f64, center: f64, fwhm: f64, area: f64, offset: f64) -> f64 {
    let u = omega - center;
    area * fwhm / (u * u + fwhm * fwhm / 4.0) + offset
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitWeighting {
    /// Ordinary least squares; appropriate for model spectra.
    Uniform,
    /// Residuals divided by the model value, refined over a few passes;
    /// appropriate for averaged periodograms with constant relative scatter.
    Relative,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub max_iterations: usize,
    pub step_tolerance: f64,
    pub min_points_per_fwhm: usize,
    pub weighting: FitWeighting,
    /// Frequency intervals (rad/s) left out of the fit, e.g. other peaks.
    pub exclude: Vec<(f64, f64)>,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            step_tolerance: 1e-10,
            min_points_per_fwhm: 20,
            weighting: FitWeighting::Uniform,
            exclude: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LorentzianFit {
    /// rad/s
    pub center: f64,
    /// rad/s
    pub fwhm: f64,
    /// ∫ (peak) dω/2π, in PSD units × Hz.
    pub area: f64,
    pub offset: f64,
    pub center_err: f64,
    pub fwhm_err: f64,
    pub area_err: f64,
    pub offset_err: f64,
    /// Weighted residual sum of squares over degrees of freedom.
    pub reduced_chi2: f64,
    /// RMS of residuals relative to the peak height.
    pub rms_relative_residual: f64,
    pub points_used: usize,
    pub iterations: usize,
    pub converged: bool,
    pub warnings: Vec<String>,
}

impl LorentzianFit {
    pub fn eval(&self, omega: f64) -> f64 {
        lorentzian(omega, self.center, self.fwhm, self.area, self.offset)
    }

    pub fn peak_height(&self) -> f64 {
        self.eval(self.center) - self.offset
    }
}

struct Scales {
    w0: f64,
    sw: f64,
    sa: f64,
    sb: f64,
}

impl Scales {
    fn to_phys(&self, x: &Vector4<f64>) -> [f64; 4] {
        [self.w0 + x[0] * self.sw, x[1] * self.sw, x[2] * self.sa, x[3] * self.sb]
    }
}

/// Model value and gradient with respect to the scaled parameters.
fn model_and_grad(w: f64, p: &[f64; 4], s: &Scales) -> (f64, Vector4<f64>) {
    let [c, g, a, b] = *p;
    let u = w - c;
    let d = u * u + g * g / 4.0;
    let val = a * g / d + b;
    let dc = a * g * 2.0 * u / (d * d);
    let dg = a * (u * u - g * g / 4.0) / (d * d);
    let da = g / d;
    (val, Vector4::new(dc * s.sw, dg * s.sw, da * s.sa, s.sb))
}

fn initial_guess(w: &[f64], y: &[f64]) -> Result<[f64; 4]> {
    let n = w.len();
    let edge = (n / 20).max(1);
    let mut edges: Vec<f64> = y[..edge].iter().chain(&y[n - edge..]).copied().collect();
    edges.sort_by(|a, b| a.total_cmp(b));
    let offset = edges[edges.len() / 2];
    let (imax, &ymax) = y.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).expect("non-empty");
    let height = ymax - offset;
    if !(height > 0.0) {
        return Err(Error::Convergence("no peak above the offset in the fit window".into()));
    }
    let half = offset + height / 2.0;
    let mut lo = imax;
    while lo > 0 && y[lo] > half {
        lo -= 1;
    }
    let mut hi = imax;
    while hi + 1 < n && y[hi] > half {
        hi += 1;
    }
    let fwhm = (w[hi] - w[lo]).max(w[1.min(n - 1)] - w[0]);
    let area = height * fwhm / 4.0;
    Ok([w[imax], fwhm, area, offset])
}

/// Fits a single Lorentzian plus constant offset to `spectrum` restricted to
/// `window` = (lo, hi) in rad/s, by Levenberg–Marquardt with an analytic
/// Jacobian. Deterministic for identical inputs.
pub fn fit_lorentzian(spectrum: &Spectrum, window: (f64, f64), opts: &FitOptions) -> Result<LorentzianFit> {
    let (w, y): (Vec<f64>, Vec<f64>) = spectrum
        .omega
        .iter()
        .zip(&spectrum.values)
        .filter(|(&x, _)| x >= window.0 && x <= window.1)
        .filter(|(&x, _)| !opts.exclude.iter().any(|&(a, b)| x >= a && x <= b))
        .map(|(&x, &v)| (x, v))
        .unzip();
    if w.len() < 8 {
        return Err(Error::domain(format!("fit window holds only {} points", w.len())));
    }
    let p0 = initial_guess(&w, &y)?;
    let scales = Scales {
        w0: p0[0],
        sw: p0[1],
        sa: p0[2].abs().max(f64::MIN_POSITIVE),
        sb: (4.0 * p0[2] / p0[1]).abs().max(p0[3].abs()).max(f64::MIN_POSITIVE),
    };
    let x0 = Vector4::new(0.0, 1.0, 1.0, p0[3] / scales.sb);
    let passes = match opts.weighting {
        FitWeighting::Uniform => 1,
        FitWeighting::Relative => 4,
    };
    let mut x = x0;
    let mut weights = vec![1.0; w.len()];
    let mut outcome = None;
    for pass in 0..passes {
        if pass > 0 {
            let p = scales.to_phys(&x);
            for (wi, &om) in weights.iter_mut().zip(&w) {
                let m = model_and_grad(om, &p, &scales).0;
                *wi = 1.0 / (m * m).max(f64::MIN_POSITIVE);
            }
        } else if opts.weighting == FitWeighting::Relative {
            for (wi, &v) in weights.iter_mut().zip(&y) {
                *wi = 1.0 / (v * v).max(f64::MIN_POSITIVE);
            }
        }
        let r = levenberg_marquardt(&w, &y, &weights, x, &scales, opts)?;
        x = r.0;
        outcome = Some(r);
    }
    let (x, iterations, converged, ssr, jtj) = outcome.expect("at least one pass");
    if !converged {
        return Err(Error::Convergence(format!(
            "Lorentzian fit did not converge in {} iterations",
            opts.max_iterations
        )));
    }
    let p = scales.to_phys(&x);
    let dof = (w.len() as f64 - 4.0).max(1.0);
    let reduced_chi2 = ssr / dof;
    let cov = jtj.try_inverse().map(|m| m * reduced_chi2);
    let err = |i: usize, s: f64| cov.map_or(f64::NAN, |c| c[(i, i)].max(0.0).sqrt() * s);
    let height = lorentzian(p[0], p[0], p[1], p[2], 0.0);
    let residuals: Vec<f64> = w.iter().zip(&y).map(|(&om, &v)| v - lorentzian(om, p[0], p[1], p[2], p[3])).collect();
    let rms = (residuals.iter().map(|r| r * r).sum::<f64>() / residuals.len() as f64).sqrt();
    let mut warnings = Vec::new();
    let per_fwhm = w.iter().filter(|&&om| (om - p[0]).abs() <= p[1] / 2.0).count();
    if per_fwhm < opts.min_points_per_fwhm {
        warnings.push(format!(
            "only {per_fwhm} points across the FWHM (minimum {})",
            opts.min_points_per_fwhm
        ));
    }
    if p[1] <= 0.0 || p[2] < 0.0 {
        warnings.push("fitted width or area is non-physical".into());
    }
    if let Some(msg) = structure_warning(&w, &residuals, &p, opts.weighting == FitWeighting::Uniform) {
        warnings.push(msg);
    }
    Ok(LorentzianFit {
        center: p[0],
        fwhm: p[1].abs(),
        area: p[2],
        offset: p[3],
        center_err: err(0, scales.sw),
        fwhm_err: err(1, scales.sw),
        area_err: err(2, scales.sa),
        offset_err: err(3, scales.sb),
        reduced_chi2,
        rms_relative_residual: rms / height.abs().max(f64::MIN_POSITIVE),
        points_used: w.len(),
        iterations,
        converged,
        warnings,
    })
}

type LmOutcome = (Vector4<f64>, usize, bool, f64, Matrix4<f64>);

fn levenberg_marquardt(
    w: &[f64],
    y: &[f64],
    weights: &[f64],
    x_start: Vector4<f64>,
    scales: &Scales,
    opts: &FitOptions,
) -> Result<LmOutcome> {
    let build = |x: &Vector4<f64>| {
        let p = scales.to_phys(x);
        let mut jtj = Matrix4::zeros();
        let mut jtr = Vector4::zeros();
        let mut ssr = 0.0;
        for ((&om, &v), &wt) in w.iter().zip(y).zip(weights) {
            let (m, g) = model_and_grad(om, &p, scales);
            let r = v - m;
            ssr += wt * r * r;
            jtj += wt * g * g.transpose();
            jtr += wt * r * g;
        }
        (ssr, jtj, jtr)
    };
    let mut x = x_start;
    let (mut ssr, mut jtj, mut jtr) = build(&x);
    let mut lambda = 1e-3;
    for it in 1..=opts.max_iterations {
        let mut a = jtj;
        for i in 0..4 {
            a[(i, i)] += lambda * jtj[(i, i)].max(1e-300);
        }
        let Some(step) = a.lu().solve(&jtr) else {
            lambda *= 10.0;
            continue;
        };
        let trial = x + step;
        let valid = trial[1] > 0.0 && trial.iter().all(|v| v.is_finite());
        let (t_ssr, t_jtj, t_jtr) = if valid { build(&trial) } else { (f64::INFINITY, jtj, jtr) };
        if t_ssr <= ssr {
            let small = (0..4).all(|i| step[i].abs() <= opts.step_tolerance * (trial[i].abs() + opts.step_tolerance));
            x = trial;
            ssr = t_ssr;
            jtj = t_jtj;
            jtr = t_jtr;
            lambda = (lambda / 10.0).max(1e-12);
            if small {
                return Ok((x, it, true, ssr, jtj));
            }
        } else {
            lambda *= 10.0;
            if lambda > 1e16 {
                // no downhill step exists at machine precision: at a minimum
                return Ok((x, it, true, ssr, jtj));
            }
        }
    }
    Ok((x, opts.max_iterations, false, ssr, jtj))
}

/// Flags residual structure that a single Lorentzian cannot explain: a
/// secondary maximum away from the fitted peak, or too few sign runs. The
/// runs test assumes independent residuals, which windowed periodogram bins
/// are not, so it is skipped for relative weighting.
fn structure_warning(w: &[f64], residuals: &[f64], p: &[f64; 4], runs_test: bool) -> Option<String> {
    let n = residuals.len();
    let pos = residuals.iter().filter(|r| **r > 0.0).count() as f64;
    let neg = n as f64 - pos;
    if pos > 0.0 && neg > 0.0 {
        let runs = 1 + residuals.windows(2).filter(|r| (r[0] > 0.0) != (r[1] > 0.0)).count();
        let nf = n as f64;
        let mean = 2.0 * pos * neg / nf + 1.0;
        let var = (mean - 1.0) * (mean - 2.0) / (nf - 1.0);
        let height = lorentzian(p[0], p[0], p[1], p[2], 0.0);
        let max_far = w
            .iter()
            .zip(residuals)
            .filter(|(&om, _)| (om - p[0]).abs() > 3.0 * p[1])
            .map(|(_, r)| *r)
            .fold(f64::NEG_INFINITY, f64::max);
        if max_far > 0.2 * height {
            return Some("secondary peak in the residuals: window may contain more than one resonance".into());
        }
        if runs_test && var > 0.0 && (runs as f64 - mean) / var.sqrt() < -4.0 {
            let rms = (residuals.iter().map(|r| r * r).sum::<f64>() / nf).sqrt();
            if rms > 1e-3 * height {
                return Some(format!("structured residuals ({runs} sign runs, {mean:.0} expected)"));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::{Quantity, Sidedness};

    fn synth(center: f64, fwhm: f64, area: f64, offset: f64) -> Spectrum {
        let w: Vec<f64> = (0..2001).map(|i| center - 10.0 * fwhm + 20.0 * fwhm * i as f64 / 2000.0).collect();
        let v = w.iter().map(|&x| lorentzian(x, center, fwhm, area, offset)).collect();
        Spectrum::new(w, v, Quantity::Displacement, Sidedness::OneSided).unwrap()
    }

    #[test]
    fn area_convention() {
        let s = synth(1e7, 3e4, 2.5e-30, 0.0);
        // trapezoid over ±10 FWHM misses the tails: 2/π·atan(20) of the area
        let captured = s.integrate() / 2.5e-30;
        let expected = 2.0 / std::f64::consts::PI * 20f64.atan();
        assert!((captured - expected).abs() < 1e-4, "{captured} vs {expected}");
    }

    #[test]
    fn self_fit_is_exact() {
        let s = synth(9.9e6, 3.45e4, 1.7e-30, 4e-38);
        let f = fit_lorentzian(&s, (0.0, f64::INFINITY), &FitOptions::default()).unwrap();
        assert!((f.center / 9.9e6 - 1.0).abs() < 1e-9);
        assert!((f.fwhm / 3.45e4 - 1.0).abs() < 1e-6);
        assert!((f.area / 1.7e-30 - 1.0).abs() < 1e-6);
        assert!((f.offset / 4e-38 - 1.0).abs() < 1e-6);
        assert!(f.warnings.is_empty(), "{:?}", f.warnings);
    }

    #[test]
    fn deterministic() {
        let s = synth(1e6, 1e3, 1.0, 0.1);
        let a = fit_lorentzian(&s, (0.0, f64::INFINITY), &FitOptions::default()).unwrap();
        let b = fit_lorentzian(&s, (0.0, f64::INFINITY), &FitOptions::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn flags_second_peak() {
        let mut s = synth(1e6, 1e3, 1.0, 0.0);
        for (w, v) in s.omega.iter().zip(s.values.iter_mut()) {
            *v += lorentzian(*w, 1e6 + 6e3, 3e2, 0.5, 0.0);
        }
        let f = fit_lorentzian(&s, (0.0, f64::INFINITY), &FitOptions::default()).unwrap();
        assert!(!f.warnings.is_empty());
    }
}
