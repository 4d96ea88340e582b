use std::path::Path;

use optomech::analysis::{fit_lorentzian, occupation_from_area, FitOptions, FitWeighting, LorentzianFit, OccupationReadout};
use optomech::io::{decomposition_to_csv, read_spectrum, spectrum_to_csv};
use optomech::spectra::{naive_inversion, NaiveInversionOptions};
use optomech::units::rad_to_hz;
use optomech::{Quantity, Sidedness, Spectrum};
use serde::Serialize;

use super::parse_window;
use crate::args::{FitArgs, QuantityArg, WeightingArg};
use crate::failure::Failure;
use crate::run::{load_optional_config, Run};

#[derive(Serialize)]
struct FitReport {
    data: String,
    fitted_quantity: &'static str,
    /// True when an intensity spectrum was converted to displacement first.
    inverted_from_intensity: bool,
    center_hz: f64,
    fwhm_hz: f64,
    fit: LorentzianFit,
    occupation: Option<OccupationReadout>,
}

pub fn run(out: &Path, argv: Vec<String>, a: FitArgs) -> Result<(), Failure> {
    let cfg = load_optional_config(&a.config)?;
    let fallback = a.quantity.map(|q| match q {
        QuantityArg::Intensity => (Quantity::RelativeIntensity, Sidedness::OneSided),
        QuantityArg::Displacement => (Quantity::Displacement, Sidedness::OneSided),
    });
    let data = read_spectrum(&a.data, fallback)?;
    let window = parse_window(&a.window)?;
    let system = cfg.as_ref().map(|c| c.config.to_system()).transpose()?;

    let (spectrum, inverted) = match (&system, data.quantity) {
        (Some(sys), Quantity::RelativeIntensity) => {
            (naive_inversion(&data, sys, NaiveInversionOptions::default())?.with_label("displacement"), true)
        }
        _ => (data.clone(), false),
    };
    let weighting = match a.weighting {
        WeightingArg::Uniform => FitWeighting::Uniform,
        WeightingArg::Relative => FitWeighting::Relative,
    };
    let fit = fit_lorentzian(&spectrum, window, &FitOptions { weighting, ..Default::default() })?;
    let occupation = match (&system, spectrum.quantity) {
        (Some(sys), Quantity::Displacement) => Some(occupation_from_area(fit.area, &sys.mode)?),
        _ => None,
    };

    let mut run = Run::new(out, "fit", argv);
    let windowed = spectrum.window(window.0, window.1)?.with_label("data");
    let model = Spectrum::new(
        windowed.omega.clone(),
        windowed.omega.iter().map(|&w| fit.eval(w)).collect(),
        windowed.quantity,
        windowed.sidedness,
    )?;
    let residual = windowed.zip_with(&model, |d, m| d - m)?;
    run.text(
        "fit_curve.csv",
        decomposition_to_csv(&[("data", &windowed), ("model", &model), ("residual", &residual)], &[])?,
    );
    if inverted {
        run.text("displacement.csv", spectrum_to_csv(&spectrum, &["naive inversion of the input".into()]));
    }
    run.json(
        "fit.json",
        &FitReport {
            data: a.data.display().to_string(),
            fitted_quantity: spectrum.quantity.as_str(),
            inverted_from_intensity: inverted,
            center_hz: rad_to_hz(fit.center),
            fwhm_hz: rad_to_hz(fit.fwhm),
            fit,
            occupation,
        },
    )?;
    run.finish(cfg.as_ref())
}
