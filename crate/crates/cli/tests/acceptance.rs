//! Acceptance report: one PASS/FAIL line per criterion. Exits non-zero if
//! any criterion fails.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::redundant_closure_call)]

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;

use optomech::analysis::*;
use optomech::cavity3::mode_overlap;
use optomech::cooling::{effective_occupation, log_space, optical_damping, power_sweep, quantum_limit};
use optomech::fixtures::{self, device_one, device_two, random_system};
use optomech::oracle::{compare, simulate, NoiseSources, OracleConfig};
use optomech::response::{effective_inverse_response, transduction};
use optomech::spectra::*;
use optomech::units::{hz_to_rad, rad_to_hz};
use optomech::{grid, Spectrum, System};

type Outcome = Result<(bool, String), String>;

struct Report {
    failures: usize,
}

impl Report {
    fn check(&mut self, id: &str, what: &str, outcome: Outcome) {
        let (ok, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
        if !ok {
            self.failures += 1;
        }
        println!("[{}] {id} {what}: {detail}", if ok { "PASS" } else { "FAIL" });
    }
}

fn rel(value: f64, target: f64) -> f64 {
    (value / target - 1.0).abs()
}

fn e<T: std::fmt::Display>(x: T) -> String {
    x.to_string()
}

fn damped(s: &System) -> f64 {
    s.mode.gamma_m + optical_damping(&s.cavity, &s.mode, &s.drive)
}

fn criterion_1(r: &mut Report) {
    let sys = device_one().unwrap();
    r.check("1a", "device-1 thermal occupation 1.4 ± 0.1", (|| {
        let p = effective_occupation(&sys).map_err(e)?;
        Ok(((p.nbar_thermal - 1.4).abs() <= 0.1, format!("n_th = {:.4} at Γ/2π = {:.0} Hz", p.nbar_thermal, rad_to_hz(p.gamma_total))))
    })());
    r.check("1b", "damping factor Γ/Γ_m = 47000 ± 3%", (|| {
        let p = effective_occupation(&sys).map_err(e)?;
        let f = p.gamma_total / sys.mode.gamma_m;
        Ok((rel(f, 47_000.0) <= 0.03, format!("{f:.0}")))
    })());
    r.check("1c", "Lorentzian fit of the modelled thermal peak gives 1.4 ± 0.1", (|| {
        let mut s = sys.clone();
        s.cavity_noise = None;
        let (wm, g) = (s.mode.omega_m, damped(&s));
        let grid = grid::linear(wm - 30.0 * g, wm + 30.0 * g, 4001).map_err(e)?;
        let spec = displacement_spectrum(&grid, &s).map_err(e)?;
        let fit = fit_lorentzian(&spec.thermal, (wm - 25.0 * g, wm + 25.0 * g), &FitOptions::default()).map_err(e)?;
        let n = occupation_from_area(fit.area, &s.mode).map_err(e)?.nbar_thermal;
        Ok(((n - 1.4).abs() <= 0.1, format!("{n:.4}")))
    })());
}

fn criterion_2(r: &mut Report) {
    r.check("2", "quantum limit 0.02 ± 25% for κ = FSR/finesse", (|| {
        let q = quantum_limit(hz_to_rad(29.4e9 / 31_000.0), hz_to_rad(1.6e6)).map_err(e)?;
        Ok((rel(q.nbar_min, 0.02) <= 0.25, format!("{:.4}", q.nbar_min)))
    })());
}

fn criterion_3(r: &mut Report) {
    let cfg = fixtures::device_one_config();
    r.check("3a", "overlap η_22 = 0.67 ± 0.01", (|| {
        let eta = mode_overlap(&cfg.overlap_spec().map_err(e)?).map_err(e)?;
        Ok(((eta - 0.67).abs() <= 0.01, format!("{eta:.4}")))
    })());
    let cavity = match cfg.three_element_cavity() {
        Ok(c) => c,
        Err(err) => return r.check("3b", "cavity model", Err(e(err))),
    };
    let scan = match cavity.scan(401) {
        Ok(s) => s,
        Err(err) => return r.check("3b", "cavity scan", Err(e(err))),
    };
    let p = &scan.at_kappa_min;
    let fsr = rad_to_hz(scan.free_spectral_range);
    r.check("3b", "FSR 29.4 GHz ± 0.2%", Ok((rel(fsr, 29.4e9) <= 2e-3, format!("{:.5} GHz", fsr / 1e9))));
    let kmin = rad_to_hz(p.kappa);
    r.check("3c", "κ_min/2π 0.79 MHz ± 10%", Ok((rel(kmin, 0.79e6) <= 0.10, format!("{:.4} MHz", kmin / 1e6))));
    let dwdz = rad_to_hz(p.dwc_dz.abs());
    r.check("3d", "dω_c/dz at κ_min 2π × 2.9e16 Hz/m ± 10%", Ok((rel(dwdz, 2.9e16) <= 0.10, format!("{dwdz:.4e}"))));
    let end = rad_to_hz(scan.end_mirror_coupling);
    r.check("3e", "end-mirror scale 5.5e16 Hz/m ± 1%", Ok((rel(end, 5.5e16) <= 0.01, format!("{end:.4e}"))));
    let loss = cfg.three_element.as_ref().and_then(|t| t.internal_loss_fraction).unwrap_or(0.0);
    match cavity.port_rates_at(p, loss) {
        Ok(ports) => {
            r.check("3f", "κ_L/κ_R 1.9 ± 10%", Ok((rel(ports.ratio, 1.9) <= 0.10, format!("{:.4}", ports.ratio))));
            let share = ports.kappa_r / p.kappa;
            r.check("3g", "κ_R = 0.23 κ ± 10%", Ok((rel(share, 0.23) <= 0.10, format!("{share:.4} κ"))));
        }
        Err(err) => r.check("3f", "port rates", Err(e(err))),
    }
}

fn criterion_4(r: &mut Report) {
    let outcome = (|| -> Result<Vec<CalibrationReport>, String> {
        let cfg = fixtures::device_one_config();
        let sys = device_one().map_err(e)?;
        let thermal = calibrate_g_thermal(&fixtures::device_one_thermal_series().map_err(e)?, &sys.cavity, &sys.mode)
            .map_err(e)?;
        let scan = cfg.three_element_cavity().and_then(|c| c.scan(401)).map_err(e)?;
        let eta = mode_overlap(&cfg.overlap_spec().map_err(e)?).map_err(e)?;
        let geometric = calibrate_g_geometric(scan.at_kappa_min.dwc_dz, eta, &sys.mode).map_err(e)?;
        let damping =
            calibrate_g_damping(&fixtures::device_one_damping_series().map_err(e)?, &sys.cavity, &sys.mode, &sys.detection)
                .map_err(e)?;
        Ok(vec![thermal, geometric, damping])
    })();
    let reports = match outcome {
        Ok(v) => v,
        Err(err) => return r.check("4", "three-method calibration", Err(err)),
    };
    for (rep, (id, quoted)) in reports.iter().zip([("4a", 1.8e16), ("4b", 2.0e16), ("4c", 1.9e16)]) {
        let g = rep.g_over_2pi;
        r.check(id, &format!("{} G/2π = {quoted:.1e} Hz/m ± 5%", rep.method.as_str()), Ok((rel(g, quoted) <= 0.05, format!("{g:.4e}"))));
    }
    let max = pairwise_spread(&reports).into_iter().map(|t| t.2).fold(0.0, f64::max);
    r.check("4d", "pairwise spread ≤ 6%", Ok((max <= 0.06, format!("{:.2}%", 100.0 * max))));
}

fn criterion_5(r: &mut Report, out: &Path) {
    r.check("5a", "device-2 white-noise sweep: interior minimum in [4.5, 8] at Q = 5e6", (|| {
        let sys = device_two().map_err(e)?;
        let n = sys.drive.photon_number;
        let sw = power_sweep(&sys, &log_space(n / 20.0, 10.0 * n, 41)).map_err(e)?;
        let m = sw.minimum();
        Ok((
            sw.interior_minimum && (4.5..=8.0).contains(&m.nbar_total) && sys.mode.q_factor == 5e6,
            format!("n̄ = {:.3} at N = {:.3e}", m.nbar_total, m.photon_number),
        ))
    })());
    r.check("5b", "Q sensitivity report over 1e6 … 1e7 emitted", (|| {
        let dir = out.join("q");
        let status = cli(&["sweep", "--device", "device-2", "--q-range", "1e6:1e7:5", "--out"], &dir, &[])?;
        let v: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.join("sweep.json")).map_err(e)?).map_err(e)?;
        let q = v["q_sensitivity"].as_array().cloned().unwrap_or_default();
        let mins: Vec<String> = q.iter().map(|p| format!("{:.2}", p["min_nbar_total"].as_f64().unwrap_or(f64::NAN))).collect();
        let span = q.first().zip(q.last()).map(|(a, b)| (a["q_factor"].as_f64(), b["q_factor"].as_f64()));
        Ok((status == 0 && q.len() == 5 && span == Some((Some(1e6), Some(1e7))), format!("minima {}", mins.join(", "))))
    })());
    r.check("5c", "device-1 Lorentzian-noise sweep: interior minimum near 5 (± 40%)", (|| {
        let sys = device_one().map_err(e)?;
        let sw = power_sweep(&sys, &log_space(3e5, 6e7, 41)).map_err(e)?;
        let m = sw.minimum();
        Ok((sw.interior_minimum && rel(m.nbar_total, 5.0) <= 0.4, format!("n̄ = {:.3} at N = {:.3e}", m.nbar_total, m.photon_number)))
    })());
    r.check("5d", "device-1 naive (noise-ignoring) occupation approaches 1.4", (|| {
        let sys = device_one().map_err(e)?;
        let wm = sys.mode.omega_m;
        let g = damped(&sys);
        let grid = grid::linear(wm - hz_to_rad(60e3), wm + hz_to_rad(60e3), 24001).map_err(e)?;
        let measured = intensity_spectrum(&grid, &sys).map_err(e)?.total;
        let noise = sys.cavity_noise.clone().ok_or("no noise configured")?;
        let d = deconvolve_cavity_noise(&measured, &sys, &noise, (wm - 8.0 * g, wm + 8.0 * g)).map_err(e)?;
        Ok(((d.nbar_thermal_fit - 1.4).abs() <= 0.1, format!("{:.3} (with cavity noise n̄_total = {:.2})", d.nbar_thermal_fit, d.nbar_total)))
    })());
}

fn probe_frequencies(s: &System) -> Vec<f64> {
    let (wm, d, k) = (s.mode.omega_m, s.cavity.detuning.abs(), s.cavity.kappa);
    let g = damped(s);
    vec![1e-3 * wm, 0.5 * wm, wm - 2.0 * g, wm, wm + 0.3 * g, 1.3 * wm, d, d + k, 3.0 * (wm + d + k)]
}

fn random_draws(count: usize) -> Vec<System> {
    (0u64..).filter_map(random_system).take(count).collect()
}

/// FWHM of 1/|𝒩|² near ω_m: locate the peak through the zero of Re 𝒩, refine
/// by ternary search, then bisect each half-maximum crossing.
fn response_fwhm(s: &System) -> f64 {
    let n = |w: f64| effective_inverse_response(w, &s.cavity, &s.mode, &s.drive);
    let f = |w: f64| 1.0 / n(w).norm_sqr();
    let (wm, g) = (s.mode.omega_m, damped(s));
    let (mut a, mut b) = (0.5 * wm, 1.5 * wm);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if n(m).re > 0.0 {
            a = m
        } else {
            b = m
        }
    }
    let (mut lo, mut hi) = (0.5 * (a + b) - 2.0 * g, 0.5 * (a + b) + 2.0 * g);
    for _ in 0..200 {
        let (x, y) = (lo + (hi - lo) / 3.0, hi - (hi - lo) / 3.0);
        if f(x) < f(y) {
            lo = x
        } else {
            hi = y
        }
    }
    let peak = 0.5 * (lo + hi);
    let half = f(peak) / 2.0;
    let edge = |dir: f64| {
        let (mut a, mut b) = (0.0, 20.0 * g);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if f(peak + dir * m) > half {
                a = m
            } else {
                b = m
            }
        }
        0.5 * (a + b)
    };
    edge(1.0) + edge(-1.0)
}

fn criterion_6(r: &mut Report) {
    r.check("6a", "undriven ∫S_z dω/2π = (2n̄_th+1)Z_zp² within 0.1%", (|| {
        let mut systems = vec![device_one().map_err(e)?, device_two().map_err(e)?];
        systems.extend(random_draws(30));
        let mut worst: f64 = 0.0;
        for s in &systems {
            let s = s.with_photon_number(0.0);
            let z = integrated_displacement(&s).map_err(e)?;
            worst = worst.max(rel(z.total(), (2.0 * s.environment.nbar_th + 1.0) * s.mode.z_zp.powi(2)));
        }
        Ok((worst <= 1e-3, format!("{} systems, worst {:.2e}", systems.len(), worst)))
    })());

    r.check("6b", "inversion round trip recovers injected n̄ within 2%", (|| {
        let mut base = device_one().map_err(e)?;
        base.cavity_noise = None;
        let mut worst: f64 = 0.0;
        for n in [3e5, 1e6, 3e6, 6e6] {
            let s = base.with_photon_number(n);
            let p = effective_occupation(&s).map_err(e)?;
            let (wm, g) = (s.mode.omega_m, damped(&s));
            let grid = grid::linear(wm - 30.0 * g, wm + 30.0 * g, 6001).map_err(e)?;
            let measured = intensity_spectrum(&grid, &s).map_err(e)?.total;
            let naive = naive_inversion(&measured, &s, NaiveInversionOptions::default()).map_err(e)?;
            let fit = fit_lorentzian(&naive, (wm - 25.0 * g, wm + 25.0 * g), &FitOptions::default()).map_err(e)?;
            let got = occupation_from_area(fit.area, &s.mode).map_err(e)?.nbar_thermal;
            worst = worst.max(rel(got, p.nbar_total));
        }
        Ok((worst <= 0.02, format!("4 powers 3e5 … 6e6, worst {:.2}%", 100.0 * worst)))
    })());

    let draws = random_draws(1000);
    r.check("6c", "S_I additive and pointwise positive on 1000 random draws", (|| {
        let mut bad = 0;
        for s in &draws {
            let model = SpectralModel::new(s).map_err(e)?;
            for w in probe_frequencies(s) {
                let t = model.intensity_one_sided(w);
                let sum = t.shot + t.dark + t.mechanical + t.cavity_noise + t.cross_qm + t.cross_im;
                if !(t.total() >= 0.0) || (t.total() - sum).abs() > 1e-12 * sum.abs() {
                    bad += 1;
                }
            }
        }
        Ok((bad == 0 && draws.len() == 1000, format!("{} draws, {bad} violations", draws.len())))
    })());
    r.check("6d", "Π(−ω) = −Π*(ω) and 𝒩(−ω)𝒩(ω) real positive on random draws", (|| {
        let mut bad = 0;
        for s in &draws {
            for x in [-4.0, -1.0, -0.3, 0.2, 1.0, 2.5] {
                let w = x * s.mode.omega_m;
                let (pp, pm) = (transduction(w, &s.cavity), transduction(-w, &s.cavity));
                let prod = effective_inverse_response(w, &s.cavity, &s.mode, &s.drive)
                    * effective_inverse_response(-w, &s.cavity, &s.mode, &s.drive);
                if (pm + pp.conj()).norm() > 1e-12 * pp.norm() || !(prod.re > 0.0) || prod.im.abs() > 1e-9 * prod.re {
                    bad += 1;
                }
            }
        }
        Ok((bad == 0, format!("{} draws × 6 frequencies, {bad} violations", draws.len())))
    })());

    oracle_equivalence(r);

    r.check("6f", "Γ_opt closed form vs FWHM of 1/|𝒩|² within 1% (weak coupling)", (|| {
        let (mut checked, mut worst) = (0, 0.0f64);
        for s in random_draws(400) {
            let g = damped(&s);
            if g > 1e-3 * s.cavity.kappa.min(s.mode.omega_m) || s.drive.enhanced_coupling() > 0.05 * s.cavity.kappa {
                continue;
            }
            worst = worst.max(rel(response_fwhm(&s), g));
            checked += 1;
        }
        Ok((checked >= 20 && worst <= 0.01, format!("{checked} draws, worst {:.3}%", 100.0 * worst)))
    })());

    r.check("6g", "bath extrapolation: slope 1 ± 2%, intercept 0 ± 0.1 K", (|| {
        let mut s = device_one().map_err(e)?;
        s.cavity_noise = None;
        let pts = fixtures::thermalized_bath_points(&s, &[4.9, 10.0, 15.0], &[3e5, 1e6, 3e6], 0.0, 0.0, 0).map_err(e)?;
        let fit = bath_extrapolation(&pts, BathOptions::default()).map_err(e)?;
        Ok((
            (fit.slope - 1.0).abs() <= 0.02 && fit.intercept.abs() <= 0.1,
            format!("slope {:.4}, intercept {:.1} µK", fit.slope, 1e6 * fit.intercept),
        ))
    })());
}

fn oracle_equivalence(r: &mut Report) {
    let mut sys = device_one().unwrap();
    let modes = sys.cavity_noise.as_ref().unwrap().to_modes(&sys.cavity).unwrap();
    sys.cavity_noise = Some(modes);
    let model = SpectralModel::new(&sys).unwrap();
    let (wm, g) = (sys.mode.omega_m, damped(&sys));
    let band = (wm - hz_to_rad(60e3), wm + hz_to_rad(60e3));
    let window = (wm - 8.0 * g, wm + 8.0 * g);
    type Pick = fn(&DisplacementTerms) -> f64;
    let terms: [(&str, &str, NoiseSources, Pick); 3] = [
        ("6e-1", "thermal", NoiseSources::only_thermal(), |d| d.thermal),
        ("6e-2", "backaction", NoiseSources::only_backaction(), |d| d.backaction),
        ("6e-3", "cavity-noise", NoiseSources::only_cavity_noise(), |d| d.cavity_noise),
    ];
    for (id, name, sources, pick) in terms {
        let outcome = (|| {
            let cfg = OracleConfig::for_system(&sys, 100, 2024).with_sources(sources);
            let sim = simulate(&sys, &cfg).map_err(e)?;
            let f = |w: f64| pick(&model.displacement_one_sided(w));
            let c = compare(&sim.displacement, f, band).map_err(e)?;
            let mut detail = format!("{} segments, band area ratio {:.4}", sim.segments, c.area_ratio);
            let mut ok = rel(c.area_ratio, 1.0) <= 0.05;
            if name != "cavity-noise" {
                let simulated = sim.displacement.window(band.0, band.1).map_err(e)?;
                let analytic = Spectrum::new(
                    simulated.omega.clone(),
                    simulated.omega.iter().map(|&w| f(w)).collect(),
                    simulated.quantity,
                    simulated.sidedness,
                )
                .map_err(e)?;
                let opts = FitOptions { weighting: FitWeighting::Relative, ..Default::default() };
                let fs = fit_lorentzian(&simulated, window, &opts).map_err(e)?;
                let fa = fit_lorentzian(&analytic, window, &FitOptions::default()).map_err(e)?;
                let (ra, rw) = (fs.area / fa.area, fs.fwhm / fa.fwhm);
                ok &= rel(ra, 1.0) <= 0.05 && rel(rw, 1.0) <= 0.05;
                detail.push_str(&format!(", fitted area ratio {ra:.4}, linewidth ratio {rw:.4}"));
            }
            Ok((ok, detail))
        })();
        r.check(id, &format!("oracle vs analytic, {name} term (100 members, seed 2024)"), outcome);
    }
}

/// Runs the CLI with `args` followed by `out`; returns the exit code.
fn cli(args: &[&str], out: &Path, env: &[(&str, &str)]) -> Result<i32, String> {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_optomech"));
    cmd.args(args).arg(out);
    for (k, v) in env {
        cmd.env(k, v);
    }
    let o = cmd.output().map_err(e)?;
    o.status.code().ok_or_else(|| "terminated by signal".to_string())
}

fn snapshot(dir: &Path) -> Result<BTreeMap<String, Vec<u8>>, String> {
    let mut files = BTreeMap::new();
    for entry in std::fs::read_dir(dir).map_err(e)? {
        let p = entry.map_err(e)?.path();
        files.insert(p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).map_err(e)?);
    }
    Ok(files)
}

fn criterion_7(r: &mut Report, out: &Path) {
    let synth = out.join("repro-synth");
    let data = synth.join("intensity.csv").display().to_string();
    let series = synth.join("thermal_series.json").display().to_string();
    let damping = synth.join("damping.csv").display().to_string();
    let runs: Vec<(&str, Vec<&str>)> = vec![
        ("synth", vec!["synth", "--device", "device-1"]),
        ("spectrum", vec!["spectrum", "--device", "device-1", "--decompose", "--photon-numbers", "3e5,1e6,6e6"]),
        ("sweep", vec!["sweep", "--device", "device-2", "--q-range", "1e6:1e7:3"]),
        (
            "calibrate",
            vec!["calibrate", "--device", "device-1", "--thermal-series", &series, "--damping-data", &damping],
        ),
        ("cavity-scan", vec!["cavity-scan", "--device", "device-1"]),
        ("validate", vec!["validate", "--device", "device-1", "--ensemble", "8", "--seed", "5"]),
        ("fit", vec!["fit", "--data", &data, "--window", "1.55e6:1.60e6", "--device", "device-1"]),
        ("deconvolve", vec!["deconvolve", "--device", "device-1", "--data", &data, "--window", "1.531e6:1.619e6"]),
    ];
    let mut ok = true;
    let mut notes = Vec::new();
    for (name, args) in &runs {
        let dir = if *name == "synth" { synth.clone() } else { out.join(format!("repro-{name}")) };
        let outcome = (|| -> Result<bool, String> {
            let env = [("SOURCE_DATE_EPOCH", "1700000000")];
            let mut full: Vec<&str> = args.clone();
            full.push("--out");
            let c1 = cli(&full, &dir, &env)?;
            let first = snapshot(&dir)?;
            let c2 = cli(&full, &dir, &env)?;
            let second = snapshot(&dir)?;
            Ok(c1 == c2 && c1 != 2 && first.contains_key("manifest.json") && first.len() > 1 && first == second)
        })();
        match outcome {
            Ok(true) => notes.push(format!("{name} ✓")),
            Ok(false) => {
                ok = false;
                notes.push(format!("{name} ✗"));
            }
            Err(err) => {
                ok = false;
                notes.push(format!("{name} error {err}"));
            }
        }
    }
    r.check("7", "identical manifests give byte-identical outputs on rerun", Ok((ok, notes.join(", "))));
}

fn main() {
    let tmp = tempfile::tempdir().expect("temporary directory");
    let mut r = Report { failures: 0 };
    criterion_1(&mut r);
    criterion_2(&mut r);
    criterion_3(&mut r);
    criterion_4(&mut r);
    criterion_5(&mut r, tmp.path());
    criterion_6(&mut r);
    criterion_7(&mut r, tmp.path());
    if r.failures > 0 {
        println!("{} acceptance check(s) failed", r.failures);
        std::process::exit(1);
    }
    println!("all acceptance checks passed");
}
