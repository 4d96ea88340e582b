use std::path::Path;

use optomech::cooling::effective_occupation;
use optomech::io::{decomposition_to_csv, spectrum_to_csv};
use optomech::spectra::{
    displacement_spectrum, intensity_spectrum, naive_inversion, noise_floor, NaiveInversionOptions, Spectrum,
};
use optomech::units::rad_to_hz;
use serde::Serialize;

use super::{gnuplot_script, parse_grid, Plot};
use crate::args::{QuantityArg, SpectrumArgs};
use crate::failure::Failure;
use crate::run::{load_config, Run};

#[derive(Serialize)]
struct PowerSummary {
    file: String,
    photon_number: f64,
    /// Occupation budget; absent unless the drive is red detuned.
    cooling: Option<CoolingSummary>,
    /// One-sided floors of S_I/Ī² at the mechanical frequency, 1/Hz.
    shot_floor_per_hz: f64,
    dark_floor_per_hz: f64,
    classical_noise_per_hz: f64,
}

#[derive(Serialize)]
struct CoolingSummary {
    gamma_total_hz: f64,
    damping_factor: f64,
    nbar_thermal: f64,
    nbar_backaction: f64,
    nbar_cavity_noise: f64,
    nbar_total: f64,
    t_eff_k: f64,
}

#[derive(Serialize)]
struct Summary {
    quantity: &'static str,
    grid_points: usize,
    mechanical_frequency_hz: f64,
    powers: Vec<PowerSummary>,
}

pub fn run(out: &Path, argv: Vec<String>, a: SpectrumArgs) -> Result<(), Failure> {
    let cfg = load_config(&a.config)?;
    let base = cfg.config.to_system()?;
    let powers = if a.photon_numbers.is_empty() { vec![base.drive.photon_number] } else { a.photon_numbers.clone() };
    let mut run = Run::new(out, "spectrum", argv);
    let mut summaries = Vec::new();
    let mut grid_points = 0;
    for (i, &n) in powers.iter().enumerate() {
        let sys = base.with_photon_number(n);
        let grid = parse_grid(&a.grid, &sys)?;
        grid_points = grid.len();
        let file = if powers.len() == 1 { "spectrum.csv".to_string() } else { format!("spectrum_{i:02}.csv") };
        let notes = vec![format!("photon_number: {n:e}"), format!("config: {}", cfg.source)];
        let intensity = intensity_spectrum(&grid, &sys)?;
        let csv = match a.quantity {
            QuantityArg::Intensity if a.decompose => {
                let mut cols: Vec<(&str, &Spectrum)> = vec![("total", &intensity.total)];
                cols.extend(intensity.components());
                decomposition_to_csv(&cols, &notes)?
            }
            QuantityArg::Intensity => spectrum_to_csv(&intensity.total, &notes),
            QuantityArg::Displacement => {
                let z = displacement_spectrum(&grid, &sys)?;
                let floor = noise_floor(&grid, &sys)?;
                let inferred = naive_inversion(&intensity.total, &sys, NaiveInversionOptions::default())?;
                if a.decompose {
                    let cols: Vec<(&str, &Spectrum)> = vec![
                        ("total", &z.total),
                        ("thermal", &z.thermal),
                        ("backaction", &z.backaction),
                        ("cavity_noise", &z.cavity_noise),
                        ("imprecision_floor", &floor),
                        ("naive_inversion", &inferred),
                    ];
                    decomposition_to_csv(&cols, &notes)?
                } else {
                    spectrum_to_csv(&z.total, &notes)
                }
            }
        };
        run.text(&file, csv);
        let cooling = if sys.cavity.detuning < 0.0 {
            let p = effective_occupation(&sys)?;
            Some(CoolingSummary {
                gamma_total_hz: rad_to_hz(p.gamma_total),
                damping_factor: p.gamma_total / sys.mode.gamma_m,
                nbar_thermal: p.nbar_thermal,
                nbar_backaction: p.nbar_backaction,
                nbar_cavity_noise: p.nbar_cavity_noise,
                nbar_total: p.nbar_total,
                t_eff_k: p.t_eff,
            })
        } else {
            None
        };
        let wm = sys.mode.omega_m;
        let at = |s: &Spectrum| s.interpolate(wm).unwrap_or(0.0);
        let classical = sys.cavity_noise.as_ref().map(|c| c.relative_intensity(wm, &sys.cavity)).unwrap_or(0.0);
        summaries.push(PowerSummary {
            file,
            photon_number: n,
            cooling,
            shot_floor_per_hz: at(&intensity.shot_floor),
            dark_floor_per_hz: at(&intensity.dark_floor),
            classical_noise_per_hz: classical,
        });
    }
    let quantity = match a.quantity {
        QuantityArg::Intensity => "relative-intensity",
        QuantityArg::Displacement => "displacement",
    };
    let first = summaries[0].file.clone();
    run.text(
        "spectrum.gp",
        gnuplot_script(&Plot {
            csv: &first,
            title: "modelled spectrum",
            x: (2, "frequency (Hz)"),
            ylabel: quantity,
            logscale: "y",
            series: &[(3, if a.decompose { "total" } else { "value" })],
        }),
    );
    run.json(
        "summary.json",
        &Summary { quantity, grid_points, mechanical_frequency_hz: rad_to_hz(base.mode.omega_m), powers: summaries },
    )?;
    run.finish(Some(&cfg))
}
