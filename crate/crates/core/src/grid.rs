//! Frequency grids (rad/s) for evaluating spectra.

use crate::error::{Error, Result};

pub fn linear(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if points < 2 || !(hi > lo) {
        return Err(Error::domain(format!("linear grid needs hi > lo and ≥ 2 points ({lo}, {hi}, {points})")));
    }
    let step = (hi - lo) / (points - 1) as f64;
    Ok((0..points).map(|i| lo + step * i as f64).collect())
}

pub fn logarithmic(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0) {
        return Err(Error::domain("logarithmic grid needs a positive lower bound"));
    }
    Ok(linear(lo.ln(), hi.ln(), points)?.into_iter().map(f64::exp).collect())
}

/// Grid that resolves a resonance at `center` of width `width`: `core`
/// evenly spaced points over center ± `span_widths`·width, logarithmic wings
/// out to [`lo`, `hi`], and dense patches around each `(center, width)` in
/// `extra`. Sorted and deduplicated.
pub fn around_resonance(
    center: f64,
    width: f64,
    span_widths: f64,
    core: usize,
    lo: f64,
    hi: f64,
    extra: &[(f64, f64)],
) -> Result<Vec<f64>> {
    if !(width > 0.0) || !(center > 0.0) {
        return Err(Error::domain("resonance grid needs positive center and width"));
    }
    let a = (center - span_widths * width).max(lo);
    let b = (center + span_widths * width).min(hi);
    let mut g = linear(a, b, core)?;
    if lo < a {
        let wing = logarithmic(lo.max(a * 1e-6), a, core / 8 + 2)?;
        g.extend(wing);
    }
    if hi > b {
        g.extend(logarithmic(b, hi, core / 8 + 2)?);
    }
    for &(c, w) in extra {
        if w > 0.0 && c - 20.0 * w > lo && c + 20.0 * w < hi {
            g.extend(linear(c - 20.0 * w, c + 20.0 * w, 801)?);
        }
    }
    g.retain(|w| *w >= lo && *w <= hi);
    g.sort_by(|x, y| x.total_cmp(y));
    g.dedup_by(|x, y| (*x - *y).abs() <= 1e-12 * x.abs().max(1.0));
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        let l = linear(0.0, 1.0, 11).unwrap();
        assert_eq!(l.len(), 11);
        assert!((l[10] - 1.0).abs() < 1e-15);
        let g = logarithmic(1.0, 1e4, 5).unwrap();
        assert!((g[2] - 100.0).abs() < 1e-9);
        let r = around_resonance(1e7, 1e3, 50.0, 1024, 1e5, 1e8, &[(9.9e6, 10.0)]).unwrap();
        assert!(r.windows(2).all(|w| w[1] > w[0]));
        assert!(r.iter().filter(|&&w| (w - 1e7).abs() < 500.0).count() >= 5);
        assert!(linear(1.0, 0.0, 5).is_err());
    }
}
