use std::path::Path;

use optomech::analysis::{fit_lorentzian, FitOptions, FitWeighting};
use optomech::io::decomposition_to_csv;
use optomech::oracle::{compare, simulate, trajectory, Comparison, NoiseSources, OracleConfig};
use optomech::spectra::{SpectralModel, Spectrum};
use optomech::units::{hz_to_rad, rad_to_hz};
use optomech::System;
use serde::Serialize;

use super::damped_width;
use crate::args::{SourceArg, ValidateArgs};
use crate::failure::{Failure, NUMERIC};
use crate::run::{load_config, Run};

/// Relative agreement required of band areas and fitted widths.
const TOLERANCE: f64 = 0.05;

#[derive(Serialize)]
struct SourceReport {
    source: &'static str,
    members: usize,
    segments: usize,
    segment_len: usize,
    dt_s: f64,
    band_hz: [f64; 2],
    comparison: Comparison,
    /// Fitted simulated/analytic Lorentzian area and FWHM; absent for the
    /// cavity-noise term, whose spectrum is not a single peak.
    fit_area_ratio: Option<f64>,
    fit_fwhm_ratio: Option<f64>,
    pass: bool,
    file: String,
}

#[derive(Serialize)]
struct Skipped {
    source: &'static str,
    reason: String,
}

#[derive(Serialize)]
struct ValidationReport {
    seed: u64,
    tolerance: f64,
    sources: Vec<SourceReport>,
    skipped: Vec<Skipped>,
    all_pass: bool,
}

fn name(s: SourceArg) -> &'static str {
    match s {
        SourceArg::Thermal => "thermal",
        SourceArg::Backaction => "backaction",
        SourceArg::CavityNoise => "cavity-noise",
    }
}

/// Comparison band: ±10 linewidths, widened to take in any noise line.
fn band(sys: &System) -> (f64, f64) {
    let wm = sys.mode.omega_m;
    let mut half = 10.0 * damped_width(sys);
    for (w, g) in sys.cavity_noise.iter().flat_map(|n| n.features()) {
        half = half.max((w - wm).abs() * 2.0 + 10.0 * g);
    }
    half = half.max(hz_to_rad(1e3)).min(0.9 * wm);
    (wm - half, wm + half)
}

pub fn run(out: &Path, argv: Vec<String>, a: ValidateArgs) -> Result<(), Failure> {
    let cfg = load_config(&a.config)?;
    let mut sys = cfg.config.to_system()?;
    let mut skipped = Vec::new();
    let modes = match &sys.cavity_noise {
        Some(n) => match n.to_modes(&sys.cavity) {
            Ok(m) => Some(m),
            Err(e) => {
                if a.sources.contains(&SourceArg::CavityNoise) {
                    skipped.push(Skipped { source: "cavity-noise", reason: e.to_string() });
                }
                None
            }
        },
        None => None,
    };
    sys.cavity_noise = modes;

    let mut run = Run::new(out, "validate", argv);
    run.seed = Some(a.seed);
    let model = SpectralModel::new(&sys)?;
    let b = band(&sys);
    let gamma = damped_width(&sys);
    let wm = sys.mode.omega_m;
    let mut reports = Vec::new();
    for &source in &a.sources {
        let sources = match source {
            SourceArg::Thermal => NoiseSources::only_thermal(),
            SourceArg::Backaction => NoiseSources::only_backaction(),
            SourceArg::CavityNoise if sys.cavity_noise.is_none() => {
                if !skipped.iter().any(|s| s.source == "cavity-noise") {
                    skipped.push(Skipped { source: "cavity-noise", reason: "no cavity noise configured".into() });
                }
                continue;
            }
            SourceArg::CavityNoise => NoiseSources::only_cavity_noise(),
        };
        let mut oc = OracleConfig::for_system(&sys, a.ensemble, a.seed).with_sources(sources);
        oc.segments_per_member = a.segments;
        let sim = simulate(&sys, &oc)?;
        let pick = |w: f64| {
            let d = model.displacement_one_sided(w);
            match source {
                SourceArg::Thermal => d.thermal,
                SourceArg::Backaction => d.backaction,
                SourceArg::CavityNoise => d.cavity_noise,
            }
        };
        let comparison = compare(&sim.displacement, pick, b)?;
        let simulated = sim.displacement.window(b.0, b.1)?.with_label("simulated");
        let analytic = Spectrum::new(
            simulated.omega.clone(),
            simulated.omega.iter().map(|&w| pick(w)).collect(),
            simulated.quantity,
            simulated.sidedness,
        )?;
        let (fit_area_ratio, fit_fwhm_ratio) = if source == SourceArg::CavityNoise {
            (None, None)
        } else {
            let window = (wm - 8.0 * gamma, wm + 8.0 * gamma);
            let opts = FitOptions { weighting: FitWeighting::Relative, ..Default::default() };
            let fs = fit_lorentzian(&simulated, window, &opts)?;
            let fa = fit_lorentzian(&analytic, window, &FitOptions::default())?;
            (Some(fs.area / fa.area), Some(fs.fwhm / fa.fwhm))
        };
        let within = |r: Option<f64>| r.is_none_or(|r| (r - 1.0).abs() <= TOLERANCE);
        let pass = (comparison.area_ratio - 1.0).abs() <= TOLERANCE && within(fit_area_ratio) && within(fit_fwhm_ratio);
        let file = format!("oracle_{}.csv", name(source));
        let notes = vec![format!("source: {}", name(source)), format!("seed: {}", a.seed)];
        run.text(&file, decomposition_to_csv(&[("simulated", &simulated), ("analytic", &analytic)], &notes)?);
        reports.push(SourceReport {
            source: name(source),
            members: oc.members,
            segments: sim.segments,
            segment_len: oc.segment_len,
            dt_s: oc.dt,
            band_hz: [rad_to_hz(b.0), rad_to_hz(b.1)],
            comparison,
            fit_area_ratio,
            fit_fwhm_ratio,
            pass,
            file,
        });
    }
    if let Some(samples) = a.dump_samples {
        let oc = OracleConfig::for_system(&sys, a.ensemble, a.seed);
        run.bytes("trajectory_member0.bin", trajectory(&sys, &oc, 0, samples)?.to_bytes());
    }
    let all_pass = reports.iter().all(|r| r.pass);
    run.json("validation.json", &ValidationReport { seed: a.seed, tolerance: TOLERANCE, sources: reports, skipped, all_pass })?;
    run.finish(Some(&cfg))?;
    if all_pass {
        Ok(())
    } else {
        Err(Failure { code: NUMERIC, message: "oracle and analytic spectra disagree beyond tolerance".into() })
    }
}
