use std::fmt::Write as _;
use std::path::Path;

use optomech::cooling::{log_space, photon_numbers_for_damping, power_sweep, CoolingPoint};
use optomech::units::{hz_to_rad, rad_to_hz};
use optomech::MechanicalMode;
use serde::Serialize;

use super::{gnuplot_script, parse_values, Plot};
use crate::args::SweepArgs;
use crate::failure::Failure;
use crate::run::{load_config, Run};

#[derive(Serialize)]
struct QPoint {
    q_factor: f64,
    min_nbar_total: f64,
    at_photon_number: f64,
    interior_minimum: bool,
}

#[derive(Serialize)]
struct SweepSummary {
    points: usize,
    argmin: usize,
    interior_minimum: bool,
    minimum: CoolingPoint,
    minimum_gamma_total_hz: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    q_sensitivity: Vec<QPoint>,
}

pub fn run(out: &Path, argv: Vec<String>, a: SweepArgs) -> Result<(), Failure> {
    let cfg = load_config(&a.config)?;
    let sys = cfg.config.to_system()?;
    let photon_numbers = if !a.gamma_list.is_empty() {
        let gammas: Vec<f64> = a.gamma_list.iter().map(|&g| hz_to_rad(g)).collect();
        photon_numbers_for_damping(&sys, &gammas)?
    } else if let Some(spec) = &a.photon_numbers {
        parse_values(spec)?
    } else {
        let n = sys.drive.photon_number;
        log_space(n / 20.0, n * 10.0, 41)
    };
    let sweep = power_sweep(&sys, &photon_numbers)?;

    let mut csv = String::from(
        "photon_number,gamma_opt_hz,gamma_total_hz,nbar_thermal,nbar_backaction,nbar_cavity_noise,nbar_total,t_eff_k\n",
    );
    for p in &sweep.points {
        let _ = writeln!(
            csv,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            p.photon_number,
            rad_to_hz(p.gamma_opt),
            rad_to_hz(p.gamma_total),
            p.nbar_thermal,
            p.nbar_backaction,
            p.nbar_cavity_noise,
            p.nbar_total,
            p.t_eff
        );
    }

    let mut q_sensitivity = Vec::new();
    if let Some(spec) = &a.q_range {
        for q in parse_values(spec)? {
            let mut s = sys.clone();
            s.mode = MechanicalMode::new(sys.mode.omega_m, q, sys.mode.mass_eff)?;
            let sw = power_sweep(&s, &photon_numbers)?;
            q_sensitivity.push(QPoint {
                q_factor: q,
                min_nbar_total: sw.minimum().nbar_total,
                at_photon_number: sw.minimum().photon_number,
                interior_minimum: sw.interior_minimum,
            });
        }
    }

    let mut run = Run::new(out, "sweep", argv);
    run.text("sweep.csv", csv);
    run.text(
        "sweep.gp",
        gnuplot_script(&Plot {
            csv: "sweep.csv",
            title: "occupation versus photon number",
            x: (1, "intracavity photon number"),
            ylabel: "phonon occupation",
            logscale: "xy",
            series: &[(4, "thermal"), (5, "backaction"), (6, "cavity noise"), (7, "total")],
        }),
    );
    run.json(
        "sweep.json",
        &SweepSummary {
            points: sweep.points.len(),
            argmin: sweep.argmin,
            interior_minimum: sweep.interior_minimum,
            minimum: *sweep.minimum(),
            minimum_gamma_total_hz: rad_to_hz(sweep.minimum().gamma_total),
            q_sensitivity,
        },
    )?;
    run.finish(Some(&cfg))
}
