//! Quantities derived from a resonance spectrum: thermal quantum yield,
//! lineshapes, disorder ensembles, scaling fits and the approximate
//! centriole state.

mod analysis;
mod centriole;
mod disorder;
mod fit;

pub use analysis::{absorption_factor, rayleigh_correct, reference_qy, RayleighFit, RAYLEIGH_FIT_RANGE_NM};
pub use centriole::{approx_centriole_state, segment_coefficients, ApproxCentrioleState, DEFAULT_SEGMENT_SPIRALS};
pub use disorder::{disorder_csv, disorder_sweep, DisorderStats, DEFAULT_REALIZATIONS};
pub use fit::{fit_curve, FitKind, FitParams, FitValue};

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::geometry::DipoleLattice;
use crate::hamiltonian::{assemble, DisorderConfig};
use crate::spectrum::{diagonalize, enhancement_metrics, ResonanceSpectrum};

pub const DEFAULT_TEMPERATURE_K: f64 = 298.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalReport {
    pub temperature_k: f64,
    pub kbt: f64,
    /// ⟨Γ⟩_th, cm⁻¹
    pub gamma_th: f64,
    pub gamma_nr: f64,
    pub qy: f64,
    /// Partition function over energies measured from the spectrum minimum.
    pub partition: f64,
}

/// Boltzmann weights e^{−(E_j − E_min)/kBT}.
fn boltzmann_weights(s: &ResonanceSpectrum, temperature_k: f64) -> Result<Vec<f64>> {
    if !(temperature_k > 0.0) {
        return Err(Error::domain(format!("temperature must be > 0 K, got {temperature_k}")));
    }
    if s.is_empty() {
        return Err(Error::domain("empty spectrum"));
    }
    let kbt = s.constants.kbt(temperature_k);
    let e_min = s.energies.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(s.energies.iter().map(|e| (-(e - e_min) / kbt).exp()).collect())
}

/// Thermally averaged width and quantum yield; the non-radiative width is
/// the single-emitter value `gamma_nr`.
pub fn thermal_qy(s: &ResonanceSpectrum, temperature_k: f64, gamma_nr: f64) -> Result<ThermalReport> {
    if !(gamma_nr >= 0.0) {
        return Err(Error::domain(format!("gamma_nr must be >= 0, got {gamma_nr}")));
    }
    let w = boltzmann_weights(s, temperature_k)?;
    let z: f64 = w.iter().sum();
    let gamma_th = w.iter().zip(&s.widths).map(|(w, g)| w * g).sum::<f64>() / z;
    Ok(ThermalReport {
        temperature_k,
        kbt: s.constants.kbt(temperature_k),
        gamma_th,
        gamma_nr,
        qy: gamma_th / (gamma_th + gamma_nr),
        partition: z,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Lineshape {
    Lorentzian,
    Gaussian,
}

impl Lineshape {
    /// Unnormalized profile D(E − E_j).
    pub fn eval(self, detuning: f64, sigma: f64) -> f64 {
        match self {
            Lineshape::Lorentzian => sigma / (detuning * detuning + sigma * sigma),
            Lineshape::Gaussian => (-(detuning * detuning) / (2.0 * sigma * sigma)).exp(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Lineshape::Lorentzian => "lorentzian",
            Lineshape::Gaussian => "gaussian",
        }
    }
}

impl FromStr for Lineshape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lorentzian" => Ok(Lineshape::Lorentzian),
            "gaussian" => Ok(Lineshape::Gaussian),
            other => Err(Error::domain(format!("unknown lineshape '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumCurve {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub lineshape: Lineshape,
    pub sigma: f64,
    /// Factor that brings the curve peak to 1.
    pub normalization: f64,
}

impl SpectrumCurve {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,value\n");
        for (x, v) in self.grid.iter().zip(&self.values) {
            let _ = writeln!(out, "{x},{v}");
        }
        out
    }
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

fn check_grid(grid: &[f64], sigma: f64) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::domain("empty energy grid"));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::domain("energy grid must be strictly increasing"));
    }
    if !(sigma > 0.0) {
        return Err(Error::domain(format!("sigma must be > 0, got {sigma}")));
    }
    Ok(())
}

fn weighted_curve(
    s: &ResonanceSpectrum,
    weights: &[f64],
    sigma: f64,
    lineshape: Lineshape,
    grid: &[f64],
) -> SpectrumCurve {
    let raw: Vec<f64> = grid
        .iter()
        .map(|&e| {
            s.energies
                .iter()
                .zip(weights)
                .map(|(ej, w)| w * lineshape.eval(e - ej, sigma))
                .sum()
        })
        .collect();
    let peak = raw.iter().copied().fold(0.0, f64::max);
    let peak = if peak > 0.0 { peak } else { 1.0 };
    SpectrumCurve {
        grid: grid.to_vec(),
        values: raw.iter().map(|v| (v / peak).max(0.0)).collect(),
        lineshape,
        sigma,
        normalization: 1.0 / peak,
    }
}

/// Absorption A Σ_j Γ_j D_j(E), peak-normalized.
pub fn absorption_curve(
    s: &ResonanceSpectrum,
    sigma: f64,
    lineshape: Lineshape,
    grid: &[f64],
) -> Result<SpectrumCurve> {
    check_grid(grid, sigma)?;
    Ok(weighted_curve(s, &s.widths, sigma, lineshape, grid))
}

/// Fluorescence A′ Σ_j p_j Γ_j D_j(E) with Boltzmann populations p_j, peak-normalized.
pub fn fluorescence_curve(
    s: &ResonanceSpectrum,
    sigma: f64,
    lineshape: Lineshape,
    temperature_k: f64,
    grid: &[f64],
) -> Result<SpectrumCurve> {
    check_grid(grid, sigma)?;
    let w = boltzmann_weights(s, temperature_k)?;
    let weights: Vec<f64> = w.iter().zip(&s.widths).map(|(p, g)| p * g).collect();
    Ok(weighted_curve(s, &weights, sigma, lineshape, grid))
}

/// One row of a quantum-yield-versus-size sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub n_trp: usize,
    pub qy: f64,
    pub max_ratio: f64,
}

/// Assembles and diagonalizes `lattice`, returning its thermal QY and brightest width.
pub fn sweep_point(
    lattice: &DipoleLattice,
    c: &PhysicalConstants,
    disorder: Option<&DisorderConfig>,
    temperature_k: f64,
    gamma_nr: f64,
) -> Result<SweepPoint> {
    let h = assemble(lattice, c, disorder)?;
    let s = diagonalize(&h, false)?;
    let report = thermal_qy(&s, temperature_k, gamma_nr)?;
    Ok(SweepPoint {
        n_trp: lattice.len(),
        qy: report.qy,
        max_ratio: enhancement_metrics(&s)?.max_ratio,
    })
}

pub fn sweep_csv(points: &[SweepPoint]) -> String {
    let mut out = String::from("N_trp,qy,max_ratio\n");
    for p in points {
        let _ = writeln!(out, "{},{},{}", p.n_trp, p.qy, p.max_ratio);
    }
    out
}
