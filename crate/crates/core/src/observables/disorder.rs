//! Ensembles of static on-site disorder.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::geometry::DipoleLattice;
use crate::hamiltonian::{assemble, DisorderConfig};
use crate::spectrum::{diagonalize, enhancement_metrics};

use super::thermal_qy;

pub const DEFAULT_REALIZATIONS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisorderStats {
    pub w: f64,
    pub n_realizations: usize,
    /// Mean of the per-realization quantum yields.
    pub mean_qy: f64,
    pub std_qy: f64,
    pub mean_max_ratio: f64,
    pub std_max_ratio: f64,
    /// Ensemble mean of ⟨Γ⟩_th, cm⁻¹.
    pub mean_gamma_th: f64,
    /// Quantum yield of the ensemble-averaged ⟨Γ⟩_th.
    pub qy_of_mean_gamma: f64,
}

#[derive(Debug, Clone, Copy)]
struct Sample {
    qy: f64,
    gamma_th: f64,
    max_ratio: f64,
}

/// Population mean and standard deviation, summed in index order.
fn mean_std(xs: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let first = xs.clone().next().unwrap_or(f64::NAN);
    if xs.clone().all(|x| x == first) {
        return (first, 0.0);
    }
    let n = xs.clone().count() as f64;
    let mean = xs.clone().sum::<f64>() / n;
    let var = xs.map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// For every width in `widths`, diagonalizes `n_realizations` disordered
/// copies of `lattice`. Realization `r` uses RNG stream `r` of `seed`.
pub fn disorder_sweep(
    lattice: &DipoleLattice,
    c: &PhysicalConstants,
    widths: &[f64],
    n_realizations: usize,
    seed: u64,
    temperature_k: f64,
    gamma_nr: f64,
) -> Result<Vec<DisorderStats>> {
    if n_realizations == 0 {
        return Err(Error::domain("n_realizations must be >= 1"));
    }
    let configs = widths
        .iter()
        .flat_map(|&w| (0..n_realizations as u64).map(move |r| (w, r)))
        .map(|(w, r)| DisorderConfig::new(w, seed, r))
        .collect::<Result<Vec<_>>>()?;

    let samples = configs
        .par_iter()
        .map(|cfg| {
            let run = || -> Result<Sample> {
                let h = assemble(lattice, c, Some(cfg))?;
                let s = diagonalize(&h, false)?;
                let th = thermal_qy(&s, temperature_k, gamma_nr)?;
                Ok(Sample { qy: th.qy, gamma_th: th.gamma_th, max_ratio: enhancement_metrics(&s)?.max_ratio })
            };
            run().map_err(|e| Error::Realization { w: cfg.width, realization: cfg.realization, source: Box::new(e) })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(widths
        .iter()
        .zip(samples.chunks(n_realizations))
        .map(|(&w, chunk)| {
            let (mean_qy, std_qy) = mean_std(chunk.iter().map(|s| s.qy));
            let (mean_max_ratio, std_max_ratio) = mean_std(chunk.iter().map(|s| s.max_ratio));
            let (mean_gamma_th, _) = mean_std(chunk.iter().map(|s| s.gamma_th));
            DisorderStats {
                w,
                n_realizations,
                mean_qy,
                std_qy,
                mean_max_ratio,
                std_max_ratio,
                mean_gamma_th,
                qy_of_mean_gamma: mean_gamma_th / (mean_gamma_th + gamma_nr),
            }
        })
        .collect())
}

/// CSV with header `W,mean_qy,std_qy,mean_max_ratio,std_max_ratio`.
pub fn disorder_csv(stats: &[DisorderStats]) -> String {
    let mut out = String::from("W,mean_qy,std_qy,mean_max_ratio,std_max_ratio\n");
    for s in stats {
        let _ = writeln!(out, "{},{},{},{},{}", s.w, s.mean_qy, s.std_qy, s.mean_max_ratio, s.std_max_ratio);
    }
    out
}
