use nalgebra::DMatrix;
use optomech::analysis::{fit_lorentzian, FitOptions, FitWeighting};
use optomech::cooling::optical_damping;
use optomech::fixtures::device_one;
use optomech::oracle::*;
use optomech::params::{CavityParams, DetectionChain, Drive, Environment, OccupationForm};
use optomech::spectra::{Quantity, Sidedness, SpectralModel, Spectrum};
use optomech::units::{hz_to_rad, K_B};
use optomech::{MechanicalMode, System};

fn undriven(t_bath: f64) -> System {
    let mode = MechanicalMode::new(hz_to_rad(2e5), 20.0, 1e-12).unwrap();
    let k = hz_to_rad(1e6);
    System {
        cavity: CavityParams::new(k / 2.0, k / 2.0, 0.0, -mode.omega_m).unwrap(),
        drive: Drive::new(0.0, hz_to_rad(1e16), &mode).unwrap(),
        environment: Environment::new(t_bath, OccupationForm::HighTemperature, &mode).unwrap(),
        detection: DetectionChain::ideal(),
        cavity_noise: None,
        mode,
    }
}

fn device_one_modes() -> System {
    let mut sys = device_one().unwrap();
    let noise = sys.cavity_noise.as_ref().unwrap().to_modes(&sys.cavity).unwrap();
    sys.cavity_noise = Some(noise);
    sys
}

/// Σ_j Φ^j Q Φ^jᵀ by repeated squaring: the covariance the discrete chain
/// settles to, independent of any continuous-time formula.
fn chain_covariance(phi: &DMatrix<f64>, l: &DMatrix<f64>) -> DMatrix<f64> {
    let mut a = phi.clone();
    let mut s = l * l.transpose();
    for _ in 0..80 {
        s = &s + &a * &s * a.transpose();
        a = &a * &a;
        if a.amax() < 1e-15 {
            break;
        }
    }
    s
}

#[test]
fn equipartition_without_drive() {
    let sys = undriven(300.0);
    let cfg = OracleConfig::for_system(&sys, 100, 3);
    let r = simulate(&sys, &cfg).unwrap();
    let classical = K_B * 300.0 / (sys.mode.mass_eff * sys.mode.omega_m.powi(2));
    assert!((r.displacement_variance / classical - 1.0).abs() < 0.03, "{}", r.displacement_variance / classical);
}

#[test]
fn halving_the_step_leaves_the_variance_unchanged() {
    let sys = device_one_modes();
    let sde = build(&sys, NoiseSources::default()).unwrap();
    let c = &sde.displacement;
    let dt = OracleConfig::for_system(&sys, 1, 0).dt;
    let var = |dt: f64| {
        let (phi, l) = van_loan(&sde.drift, &sde.diffusion, dt).unwrap();
        (c.transpose() * chain_covariance(&phi, &l) * c)[(0, 0)]
    };
    let (coarse, fine) = (var(dt), var(dt / 2.0));
    assert!((coarse / fine - 1.0).abs() < 5e-3, "{coarse} {fine}");
    let p = stationary_covariance(&sde.drift, &sde.diffusion).unwrap();
    let exact = (c.transpose() * p * c)[(0, 0)];
    assert!((fine / exact - 1.0).abs() < 1e-6);
}

#[test]
fn compare_reports_identity_and_scaling() {
    let w: Vec<f64> = (1..200).map(|k| k as f64 * 1e3).collect();
    let f = |x: f64| 1.0 / (1.0 + (x / 5e4).powi(2));
    let s = Spectrum::new(w.clone(), w.iter().map(|&x| f(x)).collect(), Quantity::Displacement, Sidedness::OneSided).unwrap();
    let same = compare(&s, f, (0.0, 2e5)).unwrap();
    assert_eq!(same.mean_log_ratio, 0.0);
    assert_eq!(same.rms_log_ratio, 0.0);
    assert!((same.area_ratio - 1.0).abs() < 1e-6);
    let doubled = compare(&s, |x| 0.5 * f(x), (0.0, 2e5)).unwrap();
    assert!((doubled.area_ratio - 2.0).abs() < 2e-6);
    assert!((doubled.mean_log_ratio - 2f64.ln()).abs() < 1e-12);
}

#[test]
fn driven_linewidth_and_noise_line_match_the_model() {
    let sys = device_one_modes();
    let wm = sys.mode.omega_m;
    let gamma = sys.mode.gamma_m + optical_damping(&sys.cavity, &sys.mode, &sys.drive);
    let model = SpectralModel::new(&sys).unwrap();
    let window = (wm - 8.0 * gamma, wm + 8.0 * gamma);
    let opts = FitOptions { weighting: FitWeighting::Relative, ..Default::default() };

    let cfg = OracleConfig::for_system(&sys, 40, 5).with_sources(NoiseSources::only_thermal());
    let r = simulate(&sys, &cfg).unwrap();
    let fit = fit_lorentzian(&r.displacement, window, &opts).unwrap();
    assert!((fit.fwhm / gamma - 1.0).abs() < 0.05, "{}", fit.fwhm / gamma);

    let cfg = OracleConfig::for_system(&sys, 40, 6).with_sources(NoiseSources::only_cavity_noise());
    let r = simulate(&sys, &cfg).unwrap();
    let band = (wm - hz_to_rad(60e3), wm + hz_to_rad(60e3));
    let c = compare(&r.displacement, |w| model.displacement_one_sided(w).cavity_noise, band).unwrap();
    assert!((c.area_ratio - 1.0).abs() < 0.10, "{c:?}");
}
