//! Closed-form saturation curves for max Γ/γ versus length.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitParams {
    /// Excitation wavelength λ, nm.
    pub lambda_nm: f64,
    /// Spiral pitch ℓ0, nm.
    pub ell0_nm: f64,
    /// Tryptophans per dimer.
    pub n_d: f64,
    /// Dimers per spiral.
    pub n_s: f64,
    /// Reference microtubule count of the axoneme fit.
    pub n_0: f64,
    /// Dimension of the bundle scaling law.
    pub d: f64,
}

impl FitParams {
    pub const DEFAULT: FitParams =
        FitParams { lambda_nm: 280.0, ell0_nm: 8.0, n_d: 8.0, n_s: 13.0, n_0: 7.0, d: 3.0 };

    /// Lengths below 2·n_S·ℓ0 are outside the range the curves describe.
    pub fn min_valid_length_nm(&self) -> f64 {
        2.0 * self.n_s * self.ell0_nm
    }
}

impl Default for FitParams {
    fn default() -> Self {
        Self::DEFAULT
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FitKind {
    /// Single microtubule from the 1JFF dimer.
    Axo1JFF,
    /// Single microtubule from the 6U42 dimer.
    Axo6U42,
    /// Centriole from the 1JFF dimer.
    Cent1JFF,
    /// Bundle of `n_mt` microtubules.
    AxonBundle,
}

impl FromStr for FitKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "axo1jff" => Ok(FitKind::Axo1JFF),
            "axo6u42" => Ok(FitKind::Axo6U42),
            "cent1jff" | "centriole" => Ok(FitKind::Cent1JFF),
            "axonbundle" | "bundle" => Ok(FitKind::AxonBundle),
            other => Err(Error::domain(format!("unknown fit curve '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitValue {
    pub value: f64,
    /// `false` when ℓ is shorter than the range the curve was fitted on.
    pub valid: bool,
}

/// Predicted max Γ/γ at length `ell_nm` (∞ allowed).
pub fn fit_curve(kind: FitKind, ell_nm: f64, n_mt: Option<usize>) -> Result<FitValue> {
    fit_curve_with(&FitParams::DEFAULT, kind, ell_nm, n_mt)
}

pub fn fit_curve_with(p: &FitParams, kind: FitKind, ell_nm: f64, n_mt: Option<usize>) -> Result<FitValue> {
    if !(ell_nm > 0.0) {
        return Err(Error::domain(format!("length must be > 0 nm, got {ell_nm}")));
    }
    let scale = p.lambda_nm / p.ell0_nm;
    let t = (ell_nm / (2.0 * p.n_s * p.ell0_nm)).tanh();
    let value = match kind {
        FitKind::Axo1JFF => scale * p.n_d * ((p.n_s - 2.0) * t - 1.0),
        FitKind::Axo6U42 => {
            let t3 = (3.0 * ell_nm / (2.0 * p.n_s * p.ell0_nm) - 2.0).tanh();
            scale * (p.n_s - 3.0) * (t3 + 1.0)
        }
        FitKind::Cent1JFF => scale * p.n_d * (2.0 * p.n_d * t - 1.0),
        FitKind::AxonBundle => {
            let n = n_mt.ok_or_else(|| Error::domain("bundle fit requires n_mt"))?;
            if n == 0 {
                return Err(Error::domain("n_mt must be >= 1"));
            }
            p.n_d * (n as f64 / p.n_0).powf(1.0 / p.d) * (scale * p.n_d * t - p.n_s)
        }
    };
    Ok(FitValue { value, valid: ell_nm >= p.min_valid_length_nm() })
}
