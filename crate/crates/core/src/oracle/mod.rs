//! Independent time-domain check of the analytic spectra.
//!
//! The linearized Langevin equations are integrated as an exactly
//! discretised linear SDE (no time-step error for the linear dynamics),
//! started from the stationary distribution, and the displacement and
//! intracavity-intensity records are turned into averaged one-sided
//! periodograms. Ensemble members run in parallel; member `k` draws from
//! ChaCha20 stream `k` of the configured seed, so results do not depend on
//! thread scheduling.

mod discretize;
mod dump;
mod model;
mod psd;

pub use discretize::{psd_sqrt, stationary_covariance, van_loan};
pub use dump::{Trajectory, DUMP_MAGIC};
pub use model::{build, LinearSde, NoiseSources};
pub use psd::Periodogram;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cooling::optical_damping;
use crate::error::{Error, Result};
use crate::params::System;
use crate::spectra::{check_stability, Quantity, Sidedness, Spectrum};
use crate::units::FULL_TURN;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    /// Sampling interval, s.
    pub dt: f64,
    /// Samples per periodogram segment.
    pub segment_len: usize,
    pub segments_per_member: usize,
    pub members: usize,
    pub seed: u64,
    pub sources: NoiseSources,
}

impl OracleConfig {
    /// Sampling at ≥ 8 points per period of the fastest rate in the problem
    /// and segments long enough to put ≥ 40 bins across the damped
    /// mechanical linewidth.
    pub fn for_system(system: &System, members: usize, seed: u64) -> Self {
        let mut fastest = system
            .mode
            .omega_m
            .max(system.cavity.detuning.abs() + system.cavity.kappa)
            .max(system.cavity.kappa);
        if let Some(noise) = &system.cavity_noise {
            for (w, g) in noise.features() {
                fastest = fastest.max(w + g);
            }
        }
        let dt = FULL_TURN / (8.0 * fastest);
        let gamma = system.mode.gamma_m + optical_damping(&system.cavity, &system.mode, &system.drive).max(0.0);
        let duration = 40.0 * FULL_TURN / gamma;
        let segment_len = ((duration / dt).ceil() as usize).next_power_of_two().clamp(256, 1 << 22);
        Self { dt, segment_len, segments_per_member: 2, members, seed, sources: NoiseSources::default() }
    }

    pub fn with_sources(mut self, sources: NoiseSources) -> Self {
        self.sources = sources;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || self.segment_len < 16 || self.segments_per_member == 0 || self.members == 0 {
            return Err(Error::domain("oracle needs dt > 0, segments of ≥ 16 samples and ≥ 1 member"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleResult {
    /// One-sided displacement PSD, m²/Hz.
    pub displacement: Spectrum,
    /// One-sided PSD of the relative intracavity intensity, 1/Hz.
    pub intensity: Spectrum,
    /// Time-averaged ⟨z²⟩ over all samples, m².
    pub displacement_variance: f64,
    pub segments: usize,
    pub config: OracleConfig,
}

struct Stepper {
    phi: Vec<f64>,
    chol: Vec<f64>,
    n: usize,
}

impl Stepper {
    fn step(&self, x: &mut [f64], tmp: &mut [f64], noise: &[f64]) {
        let n = self.n;
        for ((out, row), lrow) in tmp.iter_mut().zip(self.phi.chunks_exact(n)).zip(self.chol.chunks_exact(n)) {
            let mut acc = 0.0;
            for j in 0..n {
                acc += row[j] * x[j] + lrow[j] * noise[j];
            }
            *out = acc;
        }
        x.copy_from_slice(tmp);
    }
}

fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
    m.transpose().as_slice().to_vec()
}

fn member_rng(seed: u64, member: usize) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(member as u64);
    rng
}

fn normals(rng: &mut ChaCha20Rng, out: &mut [f64]) {
    for v in out.iter_mut() {
        *v = StandardNormal.sample(rng);
    }
}

fn prepare(system: &System, cfg: &OracleConfig) -> Result<(LinearSde, Stepper, DMatrix<f64>)> {
    cfg.validate()?;
    check_stability(system)?;
    let sde = build(system, cfg.sources)?;
    let (phi, chol) = van_loan(&sde.drift, &sde.diffusion, cfg.dt)?;
    let p0 = psd_sqrt(&stationary_covariance(&sde.drift, &sde.diffusion)?)?;
    let n = phi.nrows();
    Ok((sde, Stepper { phi: row_major(&phi), chol: row_major(&chol), n }, p0))
}

fn initial_state(p0: &DMatrix<f64>, rng: &mut ChaCha20Rng) -> Vec<f64> {
    let n = p0.nrows();
    let mut w = vec![0.0; n];
    normals(rng, &mut w);
    (p0 * DVector::from_vec(w)).as_slice().to_vec()
}

/// Runs the ensemble and returns averaged periodograms.
pub fn simulate(system: &System, cfg: &OracleConfig) -> Result<OracleResult> {
    let (sde, stepper, p0) = prepare(system, cfg)?;
    let periodogram = Periodogram::new(cfg.segment_len, cfg.dt);
    let bins = cfg.segment_len / 2;
    let zc = sde.displacement.as_slice().to_vec();
    let ic = sde.intensity.as_slice().to_vec();
    let dot = |c: &[f64], x: &[f64]| c.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();

    let per_member: Vec<(Vec<f64>, Vec<f64>, f64)> = (0..cfg.members)
        .into_par_iter()
        .map(|member| {
            let mut rng = member_rng(cfg.seed, member);
            let n = stepper.n;
            let mut x = initial_state(&p0, &mut rng);
            let mut tmp = vec![0.0; n];
            let mut w = vec![0.0; n];
            let mut zs = vec![0.0; cfg.segment_len];
            let mut is = vec![0.0; cfg.segment_len];
            let mut acc_z = vec![0.0; bins];
            let mut acc_i = vec![0.0; bins];
            let mut sq = 0.0;
            for _ in 0..cfg.segments_per_member {
                for k in 0..cfg.segment_len {
                    zs[k] = dot(&zc, &x);
                    is[k] = dot(&ic, &x);
                    sq += zs[k] * zs[k];
                    normals(&mut rng, &mut w);
                    stepper.step(&mut x, &mut tmp, &w);
                }
                periodogram.accumulate(&zs, &mut acc_z);
                periodogram.accumulate(&is, &mut acc_i);
            }
            (acc_z, acc_i, sq)
        })
        .collect();

    let segments = cfg.members * cfg.segments_per_member;
    let mut sum_z = vec![0.0; bins];
    let mut sum_i = vec![0.0; bins];
    let mut sum_sq = 0.0;
    for (z, i, sq) in &per_member {
        for k in 0..bins {
            sum_z[k] += z[k];
            sum_i[k] += i[k];
        }
        sum_sq += sq;
    }
    let norm = 1.0 / segments as f64;
    let omega = periodogram.omega();
    let displacement = Spectrum::new(
        omega.clone(),
        sum_z.iter().map(|v| v * norm).collect(),
        Quantity::Displacement,
        Sidedness::OneSided,
    )?
    .with_label("oracle_displacement");
    let intensity = Spectrum::new(
        omega,
        sum_i.iter().map(|v| v * norm).collect(),
        Quantity::RelativeIntensity,
        Sidedness::OneSided,
    )?
    .with_label("oracle_intracavity_intensity");
    Ok(OracleResult {
        displacement,
        intensity,
        displacement_variance: sum_sq / (segments * cfg.segment_len) as f64,
        segments,
        config: cfg.clone(),
    })
}

/// A single member's raw record, for dumping or custom analysis.
pub fn trajectory(system: &System, cfg: &OracleConfig, member: usize, samples: usize) -> Result<Trajectory> {
    let (sde, stepper, p0) = prepare(system, cfg)?;
    let mut rng = member_rng(cfg.seed, member);
    let n = stepper.n;
    let mut x = initial_state(&p0, &mut rng);
    let mut tmp = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut displacement = Vec::with_capacity(samples);
    let mut intensity = Vec::with_capacity(samples);
    for _ in 0..samples {
        displacement.push(sde.displacement.iter().zip(&x).map(|(a, b)| a * b).sum());
        intensity.push(sde.intensity.iter().zip(&x).map(|(a, b)| a * b).sum());
        normals(&mut rng, &mut w);
        stepper.step(&mut x, &mut tmp, &w);
    }
    Ok(Trajectory { dt: cfg.dt, seed: cfg.seed, member: member as u64, displacement, intensity })
}

/// Agreement between a simulated periodogram and an analytic spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    /// Mean of ln(simulated/analytic) over the band, analytic sampled at bin centres.
    pub mean_log_ratio: f64,
    /// RMS of ln(simulated/analytic) over the band.
    pub rms_log_ratio: f64,
    /// Band power of the periodogram over the integral of the analytic
    /// spectrum across the same bins. Lines narrower than a bin are
    /// smeared by the window but keep their power, so this ratio stays
    /// meaningful where the pointwise ones do not.
    pub area_ratio: f64,
    pub bins: usize,
}

/// Sub-intervals per bin when integrating the analytic spectrum.
const BIN_SUBDIVISIONS: usize = 16;

pub fn compare(simulated: &Spectrum, analytic: impl Fn(f64) -> f64, band: (f64, f64)) -> Result<Comparison> {
    let mut logs = Vec::new();
    let (mut a_sim, mut a_mod) = (0.0, 0.0);
    let n = simulated.len();
    for k in 0..n {
        let (w, s) = (simulated.omega[k], simulated.values[k]);
        if w < band.0 || w > band.1 {
            continue;
        }
        let lo = if k > 0 { 0.5 * (simulated.omega[k - 1] + w) } else { w };
        let hi = if k + 1 < n { 0.5 * (simulated.omega[k + 1] + w) } else { w };
        let m = analytic(w);
        if m > 0.0 && s > 0.0 {
            logs.push((s / m).ln());
        }
        a_sim += s * (hi - lo);
        a_mod += simpson(&analytic, lo, hi, BIN_SUBDIVISIONS);
    }
    if logs.is_empty() {
        return Err(Error::domain("no periodogram bins inside the comparison band"));
    }
    let count = logs.len() as f64;
    let mean = logs.iter().sum::<f64>() / count;
    let rms = (logs.iter().map(|l| l * l).sum::<f64>() / count).sqrt();
    Ok(Comparison { mean_log_ratio: mean, rms_log_ratio: rms, area_ratio: a_sim / a_mod, bins: logs.len() })
}

fn simpson(f: &impl Fn(f64) -> f64, lo: f64, hi: f64, intervals: usize) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    let h = (hi - lo) / intervals as f64;
    let inner: f64 = (1..intervals).map(|i| f(lo + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 }).sum();
    (f(lo) + f(hi) + inner) * h / 3.0
}
