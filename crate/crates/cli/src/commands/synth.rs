use std::fmt::Write as _;
use std::path::Path;

use optomech::cooling::effective_occupation;
use optomech::fixtures::{damping_series, thermal_calibration_series};
use optomech::io::spectrum_to_csv;
use optomech::spectra::intensity_spectrum;
use optomech::units::rad_to_hz;
use serde::Serialize;

use super::calibrate::ThermalSeriesEntry;
use super::{damped_width, parse_grid, parse_values};
use crate::args::SynthArgs;
use crate::failure::Failure;
use crate::run::{load_config, Run};

#[derive(Serialize)]
struct Truth {
    coupling_g_hz_per_m: f64,
    photon_number: f64,
    gamma_total_hz: f64,
    nbar_thermal_plus_backaction: f64,
    nbar_total: f64,
    calibration_photon_numbers: Vec<f64>,
}

pub fn run(out: &Path, argv: Vec<String>, a: SynthArgs) -> Result<(), Failure> {
    let cfg = load_config(&a.config)?;
    let sys = cfg.config.to_system()?;
    let powers = parse_values(&a.photon_numbers)?;
    let mut run = Run::new(out, "synth", argv);

    let grid = parse_grid("auto", &sys)?;
    let measured = intensity_spectrum(&grid, &sys)?.total.with_label("synthetic_intensity");
    let note = format!("noise-free model at N = {:e}", sys.drive.photon_number);
    run.text("intensity.csv", spectrum_to_csv(&measured, &[note]));

    let mut index = Vec::new();
    for (i, p) in thermal_calibration_series(&sys, sys.drive.coupling_g, &powers)?.iter().enumerate() {
        let file = format!("thermal_{i:02}.csv");
        run.text(&file, spectrum_to_csv(&p.spectrum, &[]));
        index.push(ThermalSeriesEntry {
            t_bath_k: p.t_bath,
            window_hz: [rad_to_hz(p.window.0), rad_to_hz(p.window.1)],
            file,
        });
    }
    run.json("thermal_series.json", &index)?;

    let anchor = damped_width(&sys);
    let mut csv = String::from("photocurrent_a,gamma_hz\n");
    for d in damping_series(&sys, anchor, sys.drive.photon_number, &powers) {
        let _ = writeln!(csv, "{:.16e},{:.16e}", d.photocurrent, rad_to_hz(d.gamma));
    }
    run.text("damping.csv", csv);

    let p = effective_occupation(&sys)?;
    run.json(
        "truth.json",
        &Truth {
            coupling_g_hz_per_m: rad_to_hz(sys.drive.coupling_g),
            photon_number: sys.drive.photon_number,
            gamma_total_hz: rad_to_hz(p.gamma_total),
            nbar_thermal_plus_backaction: p.nbar_thermal + p.nbar_backaction,
            nbar_total: p.nbar_total,
            calibration_photon_numbers: powers,
        },
    )?;
    run.finish(Some(&cfg))
}
