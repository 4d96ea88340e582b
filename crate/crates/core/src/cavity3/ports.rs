use serde::{Deserialize, Serialize};

use crate::error::{require_non_negative, require_positive, Error, Result};

/// Decomposition of a measured linewidth into port and loss channels, rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PortRates {
    pub kappa_l: f64,
    pub kappa_r: f64,
    pub kappa_int: f64,
    /// κ_L/κ_R = (1+√R)²/T.
    pub ratio: f64,
}

/// Splits `kappa_total` using the resonant reflection `r` and transmission
/// `t` seen from the input port, with κ_L/κ_R = (1+√R)²/T. The ratio is
/// exact for a coupled-mode cavity driven through its more strongly coupled
/// mirror.
pub fn port_rates(r: f64, t: f64, kappa_total: f64, kappa_int: f64) -> Result<PortRates> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::domain(format!("resonant reflection must lie in [0, 1), got {r}")));
    }
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::domain(format!("resonant transmission must lie in (0, 1], got {t}")));
    }
    require_positive("total linewidth", kappa_total)?;
    require_non_negative("internal loss rate", kappa_int)?;
    if kappa_int >= kappa_total {
        return Err(Error::domain("internal loss exceeds the total linewidth"));
    }
    let ratio = (1.0 + r.sqrt()).powi(2) / t;
    let kappa_r = (kappa_total - kappa_int) / (1.0 + ratio);
    Ok(PortRates { kappa_l: kappa_total - kappa_int - kappa_r, kappa_r, kappa_int, ratio })
}
