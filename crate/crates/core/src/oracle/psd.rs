//! Averaged Hann-windowed periodograms.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::units::FULL_TURN;

pub struct Periodogram {
    fft: Arc<dyn Fft<f64>>,
    window: Vec<f64>,
    /// Σ w², for the PSD normalisation.
    window_power: f64,
    dt: f64,
}

impl Periodogram {
    pub fn new(len: usize, dt: f64) -> Self {
        let fft = FftPlanner::new().plan_fft_forward(len);
        let window: Vec<f64> =
            (0..len).map(|i| 0.5 - 0.5 * (FULL_TURN * i as f64 / len as f64).cos()).collect();
        let window_power = window.iter().map(|w| w * w).sum();
        Self { fft, window, window_power, dt }
    }

    pub fn len(&self) -> usize {
        self.window.len()
    }

    pub fn is_empty(&self) -> bool {
        self.window.is_empty()
    }

    /// Angular frequencies of the one-sided bins 1..len/2 (DC is dropped).
    pub fn omega(&self) -> Vec<f64> {
        let n = self.len();
        (1..=n / 2).map(|k| FULL_TURN * k as f64 / (n as f64 * self.dt)).collect()
    }

    /// Adds the one-sided PSD of `segment` (per Hz) to `acc`, bin by bin.
    pub fn accumulate(&self, segment: &[f64], acc: &mut [f64]) {
        let n = self.len();
        let mean = segment.iter().sum::<f64>() / n as f64;
        let mut buf: Vec<Complex<f64>> =
            segment.iter().zip(&self.window).map(|(x, w)| Complex::new((x - mean) * w, 0.0)).collect();
        self.fft.process(&mut buf);
        let scale = self.dt / self.window_power;
        for (k, a) in acc.iter_mut().enumerate() {
            let bin = k + 1;
            let two = if 2 * bin == n { 1.0 } else { 2.0 };
            *a += two * scale * buf[bin].norm_sqr();
        }
    }
}
