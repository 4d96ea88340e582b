//! Property tests of the analytic model against independently written
//! expressions.

use num_complex::Complex64;
use optomech::cooling::{optical_damping, scattering_rates};
use optomech::fixtures::random_system;
use optomech::response::{effective_inverse_response, transduction};
use optomech::spectra::{integrated_displacement, intensity_spectrum, SpectralModel};
use optomech::System;
use proptest::prelude::*;

fn i() -> Complex64 {
    Complex64::i()
}

/// Independent transcription of the susceptibilities.
struct Kernel<'a>(&'a System);

impl Kernel<'_> {
    fn chi_c(&self, w: f64) -> Complex64 {
        let c = &self.0.cavity;
        1.0 / (Complex64::new(c.kappa / 2.0, 0.0) - i() * (c.detuning + w))
    }
    fn chi_m(&self, w: f64) -> Complex64 {
        let m = &self.0.mode;
        1.0 / (Complex64::new(m.gamma_m / 2.0, 0.0) - i() * (w - m.omega_m))
    }
    fn pi(&self, w: f64) -> Complex64 {
        self.chi_c(w) - self.chi_c(-w).conj()
    }
    fn d(&self, w: f64) -> Complex64 {
        let m = &self.0.mode;
        Complex64::new(m.omega_m.powi(2) - w * w + m.gamma_m.powi(2) / 4.0, -m.gamma_m * w)
    }
    fn n(&self, w: f64) -> Complex64 {
        let (m, dr) = (&self.0.mode, &self.0.drive);
        self.d(w) - 2.0 * i() * m.omega_m * dr.g0 * dr.g0 * dr.photon_number * self.pi(w)
    }

    /// Two-sided relative-intensity PSD built from the coefficient of every
    /// noise input: optical vacuum in each port, the mechanical bath (both
    /// orderings), detector inefficiency, cavity noise and dark current.
    fn intensity(&self, w: f64) -> f64 {
        let s = self.0;
        let (m, c, dr, det) = (&s.mode, &s.cavity, &s.drive, &s.detection);
        let abar = dr.photon_number.sqrt();
        let dn = self.d(w) / self.n(w);
        let mut total = 0.0;
        for (kp, is_out) in [(c.kappa_l, false), (c.kappa_r, true), (c.kappa_int, false)] {
            let mut beta = dn * kp.sqrt() * self.chi_c(w) / abar;
            if is_out {
                beta -= 1.0 / (abar * c.kappa_r.sqrt());
            }
            total += beta.norm_sqr();
        }
        let mech = dn * (-i()) * self.pi(w) * dr.g0 * m.gamma_m.sqrt();
        let nth = s.environment.nbar_th;
        total += (nth + 1.0) * (mech * self.chi_m(w)).norm_sqr() + nth * (mech * self.chi_m(-w).conj()).norm_sqr();
        let eps = det.efficiency();
        total += (1.0 - eps) / (eps * c.kappa_r * dr.photon_number);
        if let Some(noise) = &s.cavity_noise {
            total += dn.norm_sqr() * noise.pi2_ff_two_sided(w, c);
        }
        let mean = det.photocurrent(dr.photon_number, c.kappa_r);
        total + 0.5 * det.dark_current_psd / (mean * mean)
    }
}

fn systems() -> impl Strategy<Value = System> {
    any::<u64>().prop_filter_map("unstable draw", random_system)
}

fn probe_frequencies(s: &System) -> Vec<f64> {
    let (wm, d, k) = (s.mode.omega_m, s.cavity.detuning.abs(), s.cavity.kappa);
    let gamma = s.mode.gamma_m + optical_damping(&s.cavity, &s.mode, &s.drive);
    vec![0.0, 1e-3 * wm, 0.5 * wm, wm - 2.0 * gamma, wm, wm + 0.3 * gamma, 1.3 * wm, d, d + k, 3.0 * (wm + d + k)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn intensity_positive_and_additive(s in systems()) {
        let model = SpectralModel::new(&s).unwrap();
        for w in probe_frequencies(&s) {
            for side in [w, -w] {
                let t = model.intensity_two_sided(side);
                let sum = t.shot + t.dark + t.mechanical + t.cavity_noise + t.cross_qm + t.cross_im;
                prop_assert!((t.total() - sum).abs() <= 1e-12 * sum.abs());
                prop_assert!(t.total() >= 0.0, "negative S_I {} at {}", t.total(), side);
            }
            let one = model.intensity_one_sided(w).total();
            prop_assert!(one >= 0.0);
            let d = model.displacement_one_sided(w);
            prop_assert!(d.thermal >= 0.0 && d.backaction >= 0.0 && d.cavity_noise >= 0.0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn intensity_matches_input_coefficients(s in systems()) {
        let model = SpectralModel::new(&s).unwrap();
        let k = Kernel(&s);
        for w in probe_frequencies(&s) {
            for side in [w, -w] {
                let ours = model.intensity_two_sided(side).total();
                let oracle = k.intensity(-side);
                prop_assert!((ours - oracle).abs() <= 1e-7 * oracle.abs().max(ours.abs()),
                    "ω={side}: model {ours} vs coefficient sum {oracle}");
            }
        }
    }

    #[test]
    fn kernel_symmetries(s in systems(), x in -5.0f64..5.0) {
        let w = x * s.mode.omega_m;
        let pi_p = transduction(w, &s.cavity);
        let pi_m = transduction(-w, &s.cavity);
        prop_assert!((pi_m + pi_p.conj()).norm() <= 1e-12 * pi_p.norm().max(1e-300) + 1e-300);
        let np = effective_inverse_response(w, &s.cavity, &s.mode, &s.drive);
        let nm = effective_inverse_response(-w, &s.cavity, &s.mode, &s.drive);
        let prod = np * nm;
        prop_assert!(prod.re > 0.0);
        prop_assert!(prod.im.abs() <= 1e-9 * prod.re);
        let k = Kernel(&s);
        prop_assert!((np - k.n(w)).norm() <= 1e-10 * np.norm());
        prop_assert!((pi_p - k.pi(w)).norm() <= 1e-12 * pi_p.norm().max(1e-300) + 1e-300);
    }

    #[test]
    fn cooling_rates_are_sideband_asymmetry(s in systems()) {
        let (a_minus, a_plus) = scattering_rates(&s.cavity, &s.mode, &s.drive);
        let k = Kernel(&s);
        let base = s.drive.g0.powi(2) * s.cavity.kappa * s.drive.photon_number;
        prop_assert!((a_minus - base * k.chi_c(s.mode.omega_m).norm_sqr()).abs() <= 1e-12 * a_minus);
        prop_assert!((a_plus - base * k.chi_c(-s.mode.omega_m).norm_sqr()).abs() <= 1e-12 * a_minus);
        prop_assert!(optical_damping(&s.cavity, &s.mode, &s.drive) > 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn undriven_area_is_thermal_plus_zero_point(s in systems()) {
        let sys = s.with_photon_number(0.0);
        let z = integrated_displacement(&sys).unwrap();
        let expected = (2.0 * sys.environment.nbar_th + 1.0) * sys.mode.z_zp.powi(2);
        prop_assert!((z.total() / expected - 1.0).abs() < 1e-3, "{} vs {}", z.total(), expected);
    }

    #[test]
    fn spectrum_components_sum_to_total(s in systems()) {
        let wm = s.mode.omega_m;
        let grid: Vec<f64> = (1..200).map(|j| wm * j as f64 / 100.0).collect();
        let spec = intensity_spectrum(&grid, &s).unwrap();
        for (idx, &t) in spec.total.values.iter().enumerate() {
            let sum: f64 = spec.components().iter().map(|(_, c)| c.values[idx]).sum();
            prop_assert!((t - sum).abs() <= 1e-12 * t.abs());
        }
    }
}

/// Full width at half maximum of 1/|𝒩|² around ω_m, by bisection.
fn response_fwhm(s: &System) -> f64 {
    let f = |w: f64| 1.0 / effective_inverse_response(w, &s.cavity, &s.mode, &s.drive).norm_sqr();
    let wm = s.mode.omega_m;
    let gamma = s.mode.gamma_m + optical_damping(&s.cavity, &s.mode, &s.drive);
    // the peak sits where Re 𝒩 crosses zero; the optical spring can move it
    // by many linewidths, so bracket it by bisection first
    let re_n = |w: f64| effective_inverse_response(w, &s.cavity, &s.mode, &s.drive).re;
    let (mut a, mut b) = (0.5 * wm, 1.5 * wm);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if re_n(m) > 0.0 { a = m } else { b = m }
    }
    let best = 0.5 * (a + b);
    let step = 2.0 * gamma;
    let (mut lo, mut hi) = (best - step, best + step);
    for _ in 0..200 {
        let (a, b) = (lo + (hi - lo) / 3.0, hi - (hi - lo) / 3.0);
        if f(a) < f(b) { lo = a } else { hi = b }
    }
    let peak = 0.5 * (lo + hi);
    let half = f(peak) / 2.0;
    let edge = |dir: f64| {
        let (mut a, mut b) = (0.0, 20.0 * gamma);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if f(peak + dir * m) > half { a = m } else { b = m }
        }
        0.5 * (a + b)
    };
    edge(1.0) + edge(-1.0)
}

#[test]
fn damping_closed_form_matches_response_width() {
    let mut checked = 0;
    for seed in 0..200u64 {
        let Some(s) = random_system(seed) else { continue };
        let gamma = s.mode.gamma_m + optical_damping(&s.cavity, &s.mode, &s.drive);
        // weak coupling: damped linewidth well inside the cavity response
        if gamma > 1e-3 * s.cavity.kappa.min(s.mode.omega_m) || s.drive.enhanced_coupling() > 0.05 * s.cavity.kappa {
            continue;
        }
        let width = response_fwhm(&s);
        assert!((width / gamma - 1.0).abs() < 0.01, "seed {seed}: FWHM {width} vs Γ {gamma}");
        checked += 1;
    }
    assert!(checked >= 20, "only {checked} weak-coupling draws");
}
