use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cavity3::ports::{port_rates, PortRates};
use crate::cavity3::slab::slab_response;
use crate::error::{require_non_negative, require_positive, Error, Result};
use crate::units::{free_spectral_range, wavenumber, wrap_phase, C_LIGHT};

/// Which mirror the laser enters through.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DrivenPort {
    Curved,
    Flat,
}

/// Flat mirror at x = 0, membrane front face at `membrane_position`, curved
/// mirror at `length`. Mirrors are lossless with power transmissions
/// `t_flat`, `t_curved`; other round-trip loss is lumped into
/// `internal_round_trip_loss` and treated as independent of membrane position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThreeElementCavity {
    pub length: f64,
    pub membrane_position: f64,
    pub thickness: f64,
    pub index: f64,
    pub wavelength: f64,
    pub t_flat: f64,
    pub t_curved: f64,
    pub internal_round_trip_loss: f64,
    pub driven_port: DrivenPort,
}

/// Resonance of the tracked longitudinal mode at one membrane offset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resonance {
    /// Vacuum wavenumber of the resonance, 1/m.
    pub k: f64,
    pub omega: f64,
    /// Round-trip group delay, s.
    pub round_trip_time: f64,
    /// Decay through the flat-mirror side (membrane-filtered), rad/s.
    pub kappa_flat: f64,
    pub kappa_curved: f64,
    pub kappa_int: f64,
    pub kappa: f64,
    /// Resonance pull per membrane displacement, rad/s per m.
    pub dwc_dz: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityScanPoint {
    /// Membrane displacement from its nominal position, m.
    pub z: f64,
    /// Shift of the resonance from the empty-cavity mode, rad/s.
    pub omega_c_shift: f64,
    pub kappa: f64,
    pub kappa_flat: f64,
    pub kappa_curved: f64,
    pub dwc_dz: f64,
    /// Resonant power reflection at the driven port.
    pub resonant_r: f64,
    /// Resonant power transmission to the other port.
    pub resonant_t: f64,
    /// Fraction of the drive lost inside the cavity.
    pub loss_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub points: Vec<CavityScanPoint>,
    /// Linewidth minimum (the operating point), refined between grid points.
    pub at_kappa_min: CavityScanPoint,
    /// Linewidth maximum, the other coupling extremum.
    pub at_kappa_max: CavityScanPoint,
    pub max_abs_dwc_dz: f64,
    pub empty_kappa: f64,
    pub free_spectral_range: f64,
    pub end_mirror_coupling: f64,
    pub membrane_reflectivity: f64,
}

struct Eval {
    rho: Complex64,
    dln_dk: Complex64,
    dln_dz: Complex64,
    r_eff: Complex64,
}

impl ThreeElementCavity {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        length: f64,
        membrane_position: f64,
        thickness: f64,
        index: f64,
        wavelength: f64,
        t_flat: f64,
        t_curved: f64,
        internal_round_trip_loss: f64,
        driven_port: DrivenPort,
    ) -> Result<Self> {
        require_positive("cavity length", length)?;
        require_positive("membrane position", membrane_position)?;
        require_non_negative("membrane thickness", thickness)?;
        require_positive("wavelength", wavelength)?;
        require_non_negative("internal loss", internal_round_trip_loss)?;
        if !(index >= 1.0) {
            return Err(Error::domain("refractive index must be >= 1"));
        }
        for (name, t) in [("flat mirror transmission", t_flat), ("curved mirror transmission", t_curved)] {
            if !(t > 0.0 && t < 1.0) {
                return Err(Error::domain(format!("{name} must lie in (0, 1), got {t}")));
            }
        }
        if !(internal_round_trip_loss < 1.0) {
            return Err(Error::domain("internal round-trip loss must be < 1"));
        }
        if membrane_position + thickness >= length {
            return Err(Error::domain("membrane must sit inside the cavity"));
        }
        Ok(Self {
            length,
            membrane_position,
            thickness,
            index,
            wavelength,
            t_flat,
            t_curved,
            internal_round_trip_loss,
            driven_port,
        })
    }

    /// Same cavity with the membrane made infinitely thin (transparent).
    pub fn without_membrane(&self) -> Self {
        Self { thickness: 0.0, ..*self }
    }

    pub fn free_spectral_range(&self) -> f64 {
        free_spectral_range(self.length)
    }

    /// Linewidth contributed by the lumped internal loss, rad/s.
    pub fn kappa_int(&self) -> f64 {
        -(1.0 - self.internal_round_trip_loss).ln() * C_LIGHT / (2.0 * self.length)
    }

    /// Empty two-mirror linewidth including the lumped loss, rad/s.
    pub fn empty_kappa(&self) -> f64 {
        let rt = (1.0 - self.t_flat) * (1.0 - self.t_curved);
        -rt.ln() * C_LIGHT / (2.0 * self.length) + self.kappa_int()
    }

    fn eval(&self, k: f64, z: f64) -> Eval {
        let i = Complex64::i();
        let l1 = self.membrane_position + z;
        let l2 = self.length - l1 - self.thickness;
        let r_f = -(1.0 - self.t_flat).sqrt();
        let r_c = -(1.0 - self.t_curved).sqrt();
        let m = slab_response(k, self.thickness, self.index);
        let s = r_f * Complex64::from_polar(1.0, 2.0 * k * l1);
        let den = 1.0 - m.r * s;
        let r_eff = m.r + m.t * m.t * s / den;
        let d_reff = |dr: Complex64, dt: Complex64, ds: Complex64| {
            dr + (2.0 * m.t * dt * s + m.t * m.t * ds) / den + m.t * m.t * s * (dr * s + m.r * ds) / (den * den)
        };
        let dreff_dk = d_reff(m.dr_dk, m.dt_dk, 2.0 * i * l1 * s);
        let dreff_dz = d_reff(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), 2.0 * i * k * s);
        let rho = r_c * Complex64::from_polar(1.0, 2.0 * k * l2) * r_eff;
        Eval {
            rho,
            dln_dk: 2.0 * i * l2 + dreff_dk / r_eff,
            dln_dz: -2.0 * i * k + dreff_dz / r_eff,
            r_eff,
        }
    }

    /// Wavenumber of the nearest empty-cavity mode to the laser wavelength.
    pub fn reference_wavenumber(&self) -> f64 {
        let q = (2.0 * self.length / self.wavelength).round();
        q * std::f64::consts::PI / self.length
    }

    /// Solves the round-trip phase condition near `k_guess` by Newton iteration.
    pub fn resonance(&self, z: f64, k_guess: f64) -> Result<Resonance> {
        let max_step = 0.25 * std::f64::consts::PI / self.length;
        let mut k = k_guess;
        let mut phase = f64::NAN;
        for _ in 0..100 {
            let e = self.eval(k, z);
            phase = wrap_phase(e.rho.arg());
            let slope = e.dln_dk.im;
            if !(slope > 0.0) {
                break;
            }
            let step = (phase / slope).clamp(-max_step, max_step);
            k -= step;
            if step.abs() <= 1e-15 * k {
                return Ok(self.resonance_at(k, z));
            }
        }
        Err(Error::Convergence(format!(
            "resonance search at z = {z:.6e} m did not converge: started at k = {k_guess:.9e}, \
             ended at k = {k:.9e} 1/m with residual phase {phase:.3e} rad; bracket searched ±{max_step:.3e} 1/m per step"
        )))
    }

    fn resonance_at(&self, k: f64, z: f64) -> Resonance {
        let e = self.eval(k, z);
        let tau = e.dln_dk.im / C_LIGHT;
        let kappa_curved = -(1.0 - self.t_curved).ln() / tau;
        let kappa_flat = -e.r_eff.norm_sqr().ln() / tau;
        let kappa_int = self.kappa_int();
        let dk_dz = -e.dln_dz.im / e.dln_dk.im;
        Resonance {
            k,
            omega: C_LIGHT * k,
            round_trip_time: tau,
            kappa_flat,
            kappa_curved,
            kappa_int,
            kappa: kappa_flat + kappa_curved + kappa_int,
            dwc_dz: C_LIGHT * dk_dz,
        }
    }

    /// Scan-point record for a solved resonance.
    pub fn scan_point(&self, z: f64, res: &Resonance) -> CavityScanPoint {
        let (kl, kr) = match self.driven_port {
            DrivenPort::Curved => (res.kappa_curved, res.kappa_flat),
            DrivenPort::Flat => (res.kappa_flat, res.kappa_curved),
        };
        let kap = res.kappa;
        CavityScanPoint {
            z,
            omega_c_shift: res.omega - C_LIGHT * self.reference_wavenumber(),
            kappa: kap,
            kappa_flat: res.kappa_flat,
            kappa_curved: res.kappa_curved,
            dwc_dz: res.dwc_dz,
            resonant_r: ((kl - kr - res.kappa_int) / kap).powi(2),
            resonant_t: 4.0 * kl * kr / (kap * kap),
            loss_fraction: 4.0 * kl * res.kappa_int / (kap * kap),
        }
    }

    /// Port rates at a scan point. The ratio κ_L/κ_R comes from the
    /// resonant reflection and transmission of the lossless mirror pair;
    /// `internal_loss_fraction` of the point's linewidth is then assigned to
    /// internal loss.
    pub fn port_rates_at(&self, point: &CavityScanPoint, internal_loss_fraction: f64) -> Result<PortRates> {
        let (kl, kr) = match self.driven_port {
            DrivenPort::Curved => (point.kappa_curved, point.kappa_flat),
            DrivenPort::Flat => (point.kappa_flat, point.kappa_curved),
        };
        let lossless = kl + kr;
        let r = ((kl - kr) / lossless).powi(2);
        let t = 4.0 * kl * kr / (lossless * lossless);
        port_rates(r, t, point.kappa, internal_loss_fraction * point.kappa)
    }

    /// Scans the membrane over one period λ/2 with `points` samples, tracking
    /// a single longitudinal mode, and locates the linewidth extrema.
    pub fn scan(&self, points: usize) -> Result<ScanSummary> {
        if points < 8 {
            return Err(Error::domain("a cavity scan needs at least 8 points"));
        }
        let period = self.wavelength / 2.0;
        let mut k = self.reference_wavenumber();
        let mut res = Vec::with_capacity(points);
        for j in 0..points {
            let z = period * j as f64 / points as f64;
            let r = self.resonance(z, k)?;
            k = r.k;
            res.push((z, r));
        }
        let scan: Vec<CavityScanPoint> = res.iter().map(|(z, r)| self.scan_point(*z, r)).collect();
        let at_kappa_min = self.refine_extremum(&res, true)?;
        let at_kappa_max = self.refine_extremum(&res, false)?;
        let max_abs_dwc_dz = scan.iter().map(|p| p.dwc_dz.abs()).fold(0.0, f64::max);
        let m = slab_response(wavenumber(self.wavelength), self.thickness, self.index);
        Ok(ScanSummary {
            points: scan,
            at_kappa_min,
            at_kappa_max,
            max_abs_dwc_dz,
            empty_kappa: self.empty_kappa(),
            free_spectral_range: self.free_spectral_range(),
            end_mirror_coupling: C_LIGHT * wavenumber(self.wavelength) / self.length,
            membrane_reflectivity: m.r.norm_sqr(),
        })
    }

    /// Golden-section refinement of a κ extremum bracketed by grid neighbours.
    fn refine_extremum(&self, res: &[(f64, Resonance)], minimum: bool) -> Result<CavityScanPoint> {
        let sign = if minimum { 1.0 } else { -1.0 };
        let (idx, _) = res
            .iter()
            .enumerate()
            .min_by(|a, b| (sign * a.1 .1.kappa).total_cmp(&(sign * b.1 .1.kappa)))
            .expect("non-empty scan");
        let dz = res[1].0 - res[0].0;
        let k0 = res[idx].1.k;
        let z0 = res[idx].0;
        let f = |z: f64| -> Result<(f64, Resonance)> {
            let r = self.resonance(z, k0)?;
            Ok((sign * r.kappa, r))
        };
        let invphi = (5f64.sqrt() - 1.0) / 2.0;
        let (mut a, mut b) = (z0 - dz, z0 + dz);
        let mut c = b - invphi * (b - a);
        let mut d = a + invphi * (b - a);
        let (mut fc, mut fd) = (f(c)?.0, f(d)?.0);
        for _ in 0..80 {
            if (b - a).abs() < 1e-15 {
                break;
            }
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - invphi * (b - a);
                fc = f(c)?.0;
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + invphi * (b - a);
                fd = f(d)?.0;
            }
        }
        let z = 0.5 * (a + b);
        let (_, r) = f(z)?;
        Ok(self.scan_point(z, &r))
    }
}
