//! Spectrum CSV and JSON files.
//!
//! Spectrum CSVs carry `# key: value` header lines (quantity, sidedness,
//! units, free-form notes) followed by `omega_rad_s,freq_hz,value` rows.
//! Values are written with 17 significant digits so files round-trip.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::spectra::{Quantity, Sidedness, Spectrum};
use crate::units::{hz_to_rad, rad_to_hz};

pub fn spectrum_to_csv(s: &Spectrum, notes: &[String]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# quantity: {}", s.quantity.as_str());
    let _ = writeln!(out, "# sidedness: {}", s.sidedness.as_str());
    let _ = writeln!(out, "# units: {}", s.quantity.units());
    if !s.label.is_empty() {
        let _ = writeln!(out, "# label: {}", s.label);
    }
    for n in notes {
        let _ = writeln!(out, "# note: {n}");
    }
    out.push_str("omega_rad_s,freq_hz,value\n");
    for (&w, &v) in s.omega.iter().zip(&s.values) {
        let _ = writeln!(out, "{w:.16e},{:.16e},{v:.16e}", rad_to_hz(w));
    }
    out
}

/// Several spectra on a shared grid as one CSV with a column per component.
pub fn decomposition_to_csv(columns: &[(&str, &Spectrum)], notes: &[String]) -> Result<String> {
    let Some((_, first)) = columns.first() else {
        return Err(Error::domain("no columns to write"));
    };
    for (name, s) in columns {
        if s.omega != first.omega {
            return Err(Error::domain(format!("column '{name}' is on a different grid")));
        }
    }
    let mut out = String::new();
    let _ = writeln!(out, "# quantity: {}", first.quantity.as_str());
    let _ = writeln!(out, "# sidedness: {}", first.sidedness.as_str());
    let _ = writeln!(out, "# units: {}", first.quantity.units());
    for n in notes {
        let _ = writeln!(out, "# note: {n}");
    }
    out.push_str("omega_rad_s,freq_hz");
    for (name, _) in columns {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for (i, &w) in first.omega.iter().enumerate() {
        let _ = write!(out, "{w:.16e},{:.16e}", rad_to_hz(w));
        for (_, s) in columns {
            let _ = write!(out, ",{:.16e}", s.values[i]);
        }
        out.push('\n');
    }
    Ok(out)
}

/// Parses a spectrum CSV. Besides the native three-column layout, raw
/// two-column `freq_hz,value` files are accepted; their quantity and
/// sidedness come from the header when present, else from `fallback`.
pub fn spectrum_from_csv(text: &str, fallback: Option<(Quantity, Sidedness)>) -> Result<Spectrum> {
    let mut quantity = fallback.map(|f| f.0);
    let mut sidedness = fallback.map(|f| f.1);
    let mut label = String::new();
    let mut omega = Vec::new();
    let mut values = Vec::new();
    let mut columns: Option<usize> = None;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if let Some((k, v)) = rest.split_once(':') {
                match k.trim() {
                    "quantity" => quantity = Some(Quantity::parse(v.trim())?),
                    "sidedness" => sidedness = Some(Sidedness::parse(v.trim())?),
                    "label" => label = v.trim().to_string(),
                    _ => {}
                }
            }
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields[0].parse::<f64>().is_err() {
            // header row
            continue;
        }
        let nums = fields
            .iter()
            .map(|f| f.parse::<f64>().map_err(|_| Error::Parse(format!("line {}: bad number '{f}'", lineno + 1))))
            .collect::<Result<Vec<_>>>()?;
        match *columns.get_or_insert(nums.len()) {
            3 if nums.len() == 3 => {
                omega.push(nums[0]);
                values.push(nums[2]);
            }
            2 if nums.len() == 2 => {
                omega.push(hz_to_rad(nums[0]));
                values.push(nums[1]);
            }
            n => {
                return Err(Error::Parse(format!(
                    "line {}: expected 2 or 3 columns consistently, found {} (first row had {n})",
                    lineno + 1,
                    nums.len()
                )))
            }
        }
    }
    let (Some(q), Some(sd)) = (quantity, sidedness) else {
        return Err(Error::Parse("spectrum file does not declare its quantity and sidedness".into()));
    };
    Ok(Spectrum::new(omega, values, q, sd)?.with_label(label))
}

/// Parses a CSV written by [`decomposition_to_csv`] into one named
/// spectrum per value column.
pub fn decomposition_from_csv(text: &str) -> Result<Vec<Spectrum>> {
    let mut quantity = None;
    let mut sidedness = None;
    let mut names: Vec<String> = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().map(str::trim).enumerate() {
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if let Some((k, v)) = rest.split_once(':') {
                match k.trim() {
                    "quantity" => quantity = Some(Quantity::parse(v.trim())?),
                    "sidedness" => sidedness = Some(Sidedness::parse(v.trim())?),
                    _ => {}
                }
            }
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if names.is_empty() {
            if fields.len() < 3 || fields[0] != "omega_rad_s" {
                return Err(Error::Parse("decomposition CSV must start with omega_rad_s,freq_hz,...".into()));
            }
            names = fields[2..].iter().map(|s| s.to_string()).collect();
            continue;
        }
        if fields.len() != names.len() + 2 {
            return Err(Error::Parse(format!("line {}: expected {} columns", lineno + 1, names.len() + 2)));
        }
        rows.push(
            fields
                .iter()
                .map(|f| f.parse::<f64>().map_err(|_| Error::Parse(format!("line {}: bad number '{f}'", lineno + 1))))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    let (Some(q), Some(sd)) = (quantity, sidedness) else {
        return Err(Error::Parse("decomposition file does not declare its quantity and sidedness".into()));
    };
    let omega: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    names
        .iter()
        .enumerate()
        .map(|(j, name)| {
            Ok(Spectrum::new(omega.clone(), rows.iter().map(|r| r[j + 2]).collect(), q, sd)?.with_label(name.clone()))
        })
        .collect()
}

pub fn read_spectrum(path: &Path, fallback: Option<(Quantity, Sidedness)>) -> Result<Spectrum> {
    spectrum_from_csv(&fs::read_to_string(path)?, fallback)
}

pub fn write_spectrum(path: &Path, s: &Spectrum, notes: &[String]) -> Result<()> {
    fs::write(path, spectrum_to_csv(s, notes))?;
    Ok(())
}

/// Pretty JSON with a trailing newline; key order follows the struct.
pub fn to_json<T: serde::Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Plain numeric CSV (rows of comma-separated floats), `#` comments allowed.
pub fn read_table(text: &str) -> Result<Vec<Vec<f64>>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .filter(|l| l.split(',').next().is_some_and(|f| f.trim().parse::<f64>().is_ok()))
        .map(|l| {
            l.split(',')
                .map(|f| f.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad number '{f}'"))))
                .collect()
        })
        .collect()
}
