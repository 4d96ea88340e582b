//! Globally adaptive Gauss–Kronrod (7/15) quadrature with user breakpoints and
//! infinite tails.

#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { abs_tol: 0.0, rel_tol: 1e-10, max_intervals: 20_000 }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for (j, &x) in XGK.iter().enumerate().take(7) {
        let f1 = f(c - h * x);
        let f2 = f(c + h * x);
        k += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            g += WG[j / 2] * (f1 + f2);
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Integrates `f` over the consecutive intervals defined by `breakpoints`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, breakpoints: &[f64], opts: QuadOptions) -> Result<QuadResult> {
    if breakpoints.len() < 2 {
        return Err(Error::domain("quadrature needs at least two breakpoints"));
    }
    let mut pts: Vec<f64> = breakpoints.to_vec();
    if pts.iter().any(|x| !x.is_finite()) {
        return Err(Error::domain("breakpoints must be finite"));
    }
    pts.sort_by(|a, b| a.total_cmp(b));
    pts.dedup();
    let mut intervals: Vec<(f64, f64, f64, f64)> = pts
        .windows(2)
        .map(|w| {
            let (v, e) = gk15(&f, w[0], w[1]);
            (w[0], w[1], v, e)
        })
        .collect();
    loop {
        let value: f64 = intervals.iter().map(|i| i.2).sum();
        let error: f64 = intervals.iter().map(|i| i.3).sum();
        let tol = opts.abs_tol.max(opts.rel_tol * value.abs());
        if error <= tol {
            return Ok(QuadResult { value, error, intervals: intervals.len() });
        }
        if intervals.len() >= opts.max_intervals {
            if !value.is_finite() || error > 1e3 * tol.max(f64::MIN_POSITIVE) {
                return Err(Error::Convergence(format!(
                    "quadrature error {error:.3e} above tolerance {tol:.3e} after {} intervals",
                    intervals.len()
                )));
            }
            return Ok(QuadResult { value, error, intervals: intervals.len() });
        }
        let (idx, _) = intervals
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .3.total_cmp(&b.1 .3))
            .expect("non-empty");
        let (a, b, _, _) = intervals.swap_remove(idx);
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            // interval cannot be split further in floating point
            return Ok(QuadResult { value, error, intervals: intervals.len() + 1 });
        }
        let (v1, e1) = gk15(&f, a, m);
        let (v2, e2) = gk15(&f, m, b);
        intervals.push((a, m, v1, e1));
        intervals.push((m, b, v2, e2));
    }
}

/// Integrates over the whole real line. Finite breakpoints partition the
/// centre; the two tails are mapped onto (0, 1] with ω = b ± s(1−t)/t where
/// `tail_scale` s sets where the mapped grid concentrates.
pub fn integrate_real_line<F: Fn(f64) -> f64>(
    f: F,
    breakpoints: &[f64],
    tail_scale: f64,
    opts: QuadOptions,
) -> Result<QuadResult> {
    let mut pts = breakpoints.to_vec();
    pts.sort_by(|a, b| a.total_cmp(b));
    let lo = *pts.first().ok_or_else(|| Error::domain("need breakpoints"))?;
    let hi = *pts.last().expect("non-empty");
    let s = tail_scale;
    // The tails are laid out on an extended axis, one span wide on each side,
    // so a single adaptive pass handles everything.
    let span = if hi > lo { hi - lo } else { 1.0 };
    let left_start = lo - span;
    let right_end = hi + span;
    let g = |x: f64| -> f64 {
        if x < lo {
            let t = (x - left_start) / span; // (0, 1)
            if t <= 0.0 {
                return 0.0;
            }
            let w = lo - s * (1.0 - t) / t;
            f(w) * s / (t * t) / span
        } else if x > hi {
            let t = (right_end - x) / span;
            if t <= 0.0 {
                return 0.0;
            }
            let w = hi + s * (1.0 - t) / t;
            f(w) * s / (t * t) / span
        } else {
            f(x)
        }
    };
    let mut all = vec![left_start];
    all.extend_from_slice(&pts);
    all.push(right_end);
    // extra breakpoints in the mapped tails where t is small (far field)
    for frac in [0.5, 0.9, 0.99] {
        all.push(lo - span * frac);
        all.push(hi + span * frac);
    }
    integrate(g, &all, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_exact() {
        let r = integrate(|x| x * x * x - 2.0 * x, &[0.0, 2.0], QuadOptions::default()).unwrap();
        assert!((r.value - 0.0).abs() < 1e-13);
        let r = integrate(|x| x.powi(6), &[-1.0, 1.0], QuadOptions::default()).unwrap();
        assert!((r.value - 2.0 / 7.0).abs() < 1e-14);
    }

    #[test]
    fn lorentzian_real_line() {
        let g = 1e-3;
        let f = |x: f64| (g / 2.0) / ((x - 5.0).powi(2) + g * g / 4.0);
        let mut b = vec![0.0, 5.0];
        for j in 0..30 {
            let d = g * 2f64.powi(j - 2);
            b.push(5.0 + d);
            b.push(5.0 - d);
        }
        let r = integrate_real_line(f, &b, 10.0, QuadOptions::default()).unwrap();
        assert!((r.value - PI).abs() < 1e-8 * PI, "{}", r.value);
    }

    #[test]
    fn gaussian_real_line() {
        let r = integrate_real_line(|x| (-x * x).exp(), &[-1.0, 0.0, 1.0], 1.0, QuadOptions::default()).unwrap();
        assert!((r.value - PI.sqrt()).abs() < 1e-10);
    }
}
