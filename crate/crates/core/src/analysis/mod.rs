//! Measurement-side pipelines: Lorentzian fits, occupation readout, the
//! three coupling calibrations, bath-temperature extrapolation and the
//! cavity-noise deconvolution.

mod bath;
mod calibrate;
mod deconvolve;
mod fit;
mod occupation;

pub use bath::{bath_extrapolation, bath_point_from_area, BathFit, BathOptions, BathPoint};
pub use calibrate::{
    calibrate_g_damping, calibrate_g_geometric, calibrate_g_thermal, pairwise_spread, CalibrationMethod,
    CalibrationReport, DampingPoint, ThermalCalPoint,
};
pub use deconvolve::{deconvolve_cavity_noise, Deconvolution};
pub use fit::{fit_lorentzian, lorentzian, FitOptions, FitWeighting, LorentzianFit};
pub use occupation::{occupation_from_area, peak_area, AreaMethod, OccupationReadout};
