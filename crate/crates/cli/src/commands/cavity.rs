use std::fmt::Write as _;
use std::path::Path;

use optomech::cavity3::{mode_overlap, CavityScanPoint, PortRates};
use optomech::units::rad_to_hz;
use serde::Serialize;

use super::{gnuplot_script, Plot};
use crate::args::CavityScanArgs;
use crate::failure::Failure;
use crate::run::{load_config, Run};

#[derive(Serialize)]
struct PointHz {
    z_m: f64,
    omega_c_shift_hz: f64,
    kappa_hz: f64,
    kappa_flat_hz: f64,
    kappa_curved_hz: f64,
    dwc_dz_hz_per_m: f64,
    resonant_r: f64,
    resonant_t: f64,
    loss_fraction: f64,
}

impl From<&CavityScanPoint> for PointHz {
    fn from(p: &CavityScanPoint) -> Self {
        Self {
            z_m: p.z,
            omega_c_shift_hz: rad_to_hz(p.omega_c_shift),
            kappa_hz: rad_to_hz(p.kappa),
            kappa_flat_hz: rad_to_hz(p.kappa_flat),
            kappa_curved_hz: rad_to_hz(p.kappa_curved),
            dwc_dz_hz_per_m: rad_to_hz(p.dwc_dz),
            resonant_r: p.resonant_r,
            resonant_t: p.resonant_t,
            loss_fraction: p.loss_fraction,
        }
    }
}

#[derive(Serialize)]
struct PortsHz {
    kappa_l_hz: f64,
    kappa_r_hz: f64,
    kappa_int_hz: f64,
    ratio_l_over_r: f64,
    kappa_r_over_kappa: f64,
}

impl PortsHz {
    fn new(p: &PortRates) -> Self {
        let total = p.kappa_l + p.kappa_r + p.kappa_int;
        Self {
            kappa_l_hz: rad_to_hz(p.kappa_l),
            kappa_r_hz: rad_to_hz(p.kappa_r),
            kappa_int_hz: rad_to_hz(p.kappa_int),
            ratio_l_over_r: p.ratio,
            kappa_r_over_kappa: p.kappa_r / total,
        }
    }
}

#[derive(Serialize)]
struct ScanReport {
    free_spectral_range_hz: f64,
    empty_cavity_kappa_hz: f64,
    end_mirror_coupling_hz_per_m: f64,
    membrane_power_reflectivity: f64,
    max_abs_dwc_dz_hz_per_m: f64,
    at_kappa_min: PointHz,
    at_kappa_max: PointHz,
    ports_at_kappa_min: Option<PortsHz>,
    overlap_eta: Option<f64>,
}

pub fn run(out: &Path, argv: Vec<String>, a: CavityScanArgs) -> Result<(), Failure> {
    let cfg = load_config(&a.config)?;
    let cavity = cfg.config.three_element_cavity()?;
    let section = cfg.config.three_element.as_ref().expect("three_element_cavity checked the section");
    let scan = cavity.scan(a.points.unwrap_or(section.scan_points))?;

    let mut csv = String::from(
        "z_m,omega_c_shift_hz,kappa_hz,kappa_flat_hz,kappa_curved_hz,dwc_dz_hz_per_m,resonant_r,resonant_t,loss_fraction\n",
    );
    for p in &scan.points {
        let h = PointHz::from(p);
        let _ = writeln!(
            csv,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            h.z_m,
            h.omega_c_shift_hz,
            h.kappa_hz,
            h.kappa_flat_hz,
            h.kappa_curved_hz,
            h.dwc_dz_hz_per_m,
            h.resonant_r,
            h.resonant_t,
            h.loss_fraction
        );
    }
    let ports = match section.internal_loss_fraction {
        Some(f) => Some(PortsHz::new(&cavity.port_rates_at(&scan.at_kappa_min, f)?)),
        None => None,
    };
    let overlap_eta = match cfg.config.overlap {
        Some(_) => Some(mode_overlap(&cfg.config.overlap_spec()?)?),
        None => None,
    };
    let report = ScanReport {
        free_spectral_range_hz: rad_to_hz(scan.free_spectral_range),
        empty_cavity_kappa_hz: rad_to_hz(scan.empty_kappa),
        end_mirror_coupling_hz_per_m: rad_to_hz(scan.end_mirror_coupling),
        membrane_power_reflectivity: scan.membrane_reflectivity,
        max_abs_dwc_dz_hz_per_m: rad_to_hz(scan.max_abs_dwc_dz),
        at_kappa_min: PointHz::from(&scan.at_kappa_min),
        at_kappa_max: PointHz::from(&scan.at_kappa_max),
        ports_at_kappa_min: ports,
        overlap_eta,
    };

    let mut run = Run::new(out, "cavity-scan", argv);
    run.text("cavity_scan.csv", csv);
    run.text(
        "cavity_scan.gp",
        gnuplot_script(&Plot {
            csv: "cavity_scan.csv",
            title: "linewidth over one membrane period",
            x: (1, "membrane displacement (m)"),
            ylabel: "rate (Hz)",
            logscale: "y",
            series: &[(3, "kappa"), (4, "kappa flat"), (5, "kappa curved")],
        }),
    );
    run.json("cavity_summary.json", &report)?;
    run.finish(Some(&cfg))
}
