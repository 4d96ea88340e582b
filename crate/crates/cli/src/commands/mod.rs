pub mod calibrate;
pub mod cavity;
pub mod deconvolve;
pub mod fit;
pub mod spectrum;
pub mod sweep;
pub mod synth;
pub mod validate;

use optomech::cooling::{log_space, optical_damping};
use optomech::units::hz_to_rad;
use optomech::{grid, System};

use crate::failure::Failure;

fn number(s: &str) -> Result<f64, Failure> {
    s.trim().parse::<f64>().map_err(|_| Failure::config(format!("'{s}' is not a number")))
}

/// `LO:HI:COUNT` as log-spaced values, or a comma-separated list.
pub fn parse_values(spec: &str) -> Result<Vec<f64>, Failure> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [lo, hi, count] => {
            let count: usize = count.trim().parse().map_err(|_| Failure::config(format!("bad count in '{spec}'")))?;
            let (lo, hi) = (number(lo)?, number(hi)?);
            if !(lo > 0.0 && hi >= lo && count >= 1) {
                return Err(Failure::config(format!("range '{spec}' needs 0 < LO <= HI and COUNT >= 1")));
            }
            Ok(log_space(lo, hi, count))
        }
        [list] => list.split(',').map(number).collect(),
        _ => Err(Failure::config(format!("'{spec}' is neither LO:HI:COUNT nor a comma list"))),
    }
}

/// `LO_HZ:HI_HZ` to an angular-frequency window.
pub fn parse_window(spec: &str) -> Result<(f64, f64), Failure> {
    let (lo, hi) = spec.split_once(':').ok_or_else(|| Failure::config(format!("window '{spec}' is not LO:HI")))?;
    let (lo, hi) = (number(lo)?, number(hi)?);
    if !(hi > lo) {
        return Err(Failure::config(format!("window '{spec}' needs HI > LO")));
    }
    Ok((hz_to_rad(lo), hz_to_rad(hi)))
}

/// Total mechanical damping Γ_m + Γ_opt, rad/s.
pub fn damped_width(system: &System) -> f64 {
    system.mode.gamma_m + optical_damping(&system.cavity, &system.mode, &system.drive).max(0.0)
}

/// `auto` resolves the damped peak over ±30 linewidths (at least ±100 kHz)
/// with extra points on cavity-noise lines; otherwise `LO_HZ:HI_HZ:POINTS`.
pub fn parse_grid(spec: &str, system: &System) -> Result<Vec<f64>, Failure> {
    if spec == "auto" {
        let wm = system.mode.omega_m;
        let gamma = damped_width(system);
        let half = (30.0 * gamma).max(hz_to_rad(100e3)).min(0.9 * wm);
        let extra = system.cavity_noise.as_ref().map(|n| n.features()).unwrap_or_default();
        return Ok(grid::around_resonance(wm, gamma, 30.0, 4001, wm - half, wm + half, &extra)?);
    }
    let parts: Vec<&str> = spec.split(':').collect();
    let [lo, hi, points] = parts.as_slice() else {
        return Err(Failure::config(format!("grid '{spec}' is neither 'auto' nor LO_HZ:HI_HZ:POINTS")));
    };
    let points: usize = points.trim().parse().map_err(|_| Failure::config(format!("bad point count in '{spec}'")))?;
    Ok(grid::linear(hz_to_rad(number(lo)?), hz_to_rad(number(hi)?), points)?)
}

/// Plot description for [`gnuplot_script`].
pub struct Plot<'a> {
    pub csv: &'a str,
    pub title: &'a str,
    pub x: (usize, &'a str),
    pub ylabel: &'a str,
    /// gnuplot axes to draw logarithmically, e.g. `y` or `xy`.
    pub logscale: &'a str,
    pub series: &'a [(usize, &'a str)],
}

/// gnuplot script drawing 1-based CSV columns as lines.
pub fn gnuplot_script(p: &Plot) -> String {
    let mut s = format!(
        "set datafile separator ','\nset title '{}'\nset xlabel '{}'\nset ylabel '{}'\nset logscale {}\nplot ",
        p.title, p.x.1, p.ylabel, p.logscale
    );
    let plots: Vec<String> = p
        .series
        .iter()
        .map(|(c, name)| format!("'{}' using {}:{c} with lines title '{name}'", p.csv, p.x.0))
        .collect();
    s.push_str(&plots.join(", \\\n     "));
    s.push('\n');
    s
}
