//! Helpers for measured spectra: relative quantum yield against a reference
//! dye and removal of a λ⁻⁴ scattering background.

use crate::error::{Error, Result};

pub const RAYLEIGH_FIT_RANGE_NM: (f64, f64) = (307.0, 800.0);
const MIN_FIT_SAMPLES: usize = 8;
/// Wavelength scale that keeps the normal equations well conditioned.
const LAMBDA_REF_NM: f64 = 300.0;

/// Absorbed fraction 1 − 10^{−A} for optical density `a`.
pub fn absorption_factor(optical_density: f64) -> f64 {
    1.0 - 10f64.powf(-optical_density)
}

/// Sample quantum yield from a reference of known yield `qy_r`.
pub fn reference_qy(f_s: f64, f_r: f64, a_s: f64, a_r: f64, n_s: f64, n_r: f64, qy_r: f64) -> Result<f64> {
    for (name, v) in [("F_s", f_s), ("F_r", f_r), ("a_s", a_s), ("a_r", a_r), ("n_s", n_s), ("n_r", n_r), ("qy_r", qy_r)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::domain(format!("{name} must be positive, got {v}")));
        }
    }
    Ok((f_s * a_r * n_s * n_s) / (f_r * a_s * n_r * n_r) * qy_r)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RayleighFit {
    /// Amplitude of the λ⁻⁴ term (units of the input times nm⁴).
    pub b: f64,
    /// Constant offset, ≥ 0.
    pub c: f64,
    /// Input minus fitted background, clamped at 0.
    pub corrected: Vec<f64>,
    pub samples_used: usize,
}

impl RayleighFit {
    pub fn background(&self, lambda_nm: f64) -> f64 {
        self.b / lambda_nm.powi(4) + self.c
    }
}

/// Fits `b·λ⁻⁴ (+ c)` on `range` and subtracts it everywhere.
pub fn rayleigh_correct(
    wavelength_nm: &[f64],
    values: &[f64],
    range: (f64, f64),
    with_offset: bool,
) -> Result<RayleighFit> {
    if wavelength_nm.len() != values.len() {
        return Err(Error::domain("wavelength and value arrays differ in length"));
    }
    let pts: Vec<(f64, f64)> = wavelength_nm
        .iter()
        .zip(values)
        .filter(|(l, _)| **l >= range.0 && **l <= range.1)
        .map(|(l, v)| ((LAMBDA_REF_NM / l).powi(4), *v))
        .collect();
    if pts.len() < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientData(format!(
            "{} samples in {}-{} nm, need at least {MIN_FIT_SAMPLES}",
            pts.len(),
            range.0,
            range.1
        )));
    }
    let pure = |pts: &[(f64, f64)]| {
        let sxx: f64 = pts.iter().map(|(x, _)| x * x).sum();
        let sxy: f64 = pts.iter().map(|(x, y)| x * y).sum();
        (sxy / sxx, 0.0)
    };
    let (bs, c) = if with_offset {
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|(x, _)| x).sum();
        let sy: f64 = pts.iter().map(|(_, y)| y).sum();
        let sxx: f64 = pts.iter().map(|(x, _)| x * x).sum();
        let sxy: f64 = pts.iter().map(|(x, y)| x * y).sum();
        let det = n * sxx - sx * sx;
        let b = (n * sxy - sx * sy) / det;
        let c = (sxx * sy - sx * sxy) / det;
        if c >= 0.0 {
            (b, c)
        } else {
            pure(&pts)
        }
    } else {
        pure(&pts)
    };
    let b = bs * LAMBDA_REF_NM.powi(4);
    let corrected = wavelength_nm
        .iter()
        .zip(values)
        .map(|(l, v)| (v - (b / l.powi(4) + c)).max(0.0))
        .collect();
    Ok(RayleighFit { b, c, corrected, samples_used: pts.len() })
}
