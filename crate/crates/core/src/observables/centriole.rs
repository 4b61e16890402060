//! Trial superradiant state of a centriole built from one segment's
//! brightest eigenvector, evaluated without forming the full matrix.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::geometry::{DipoleLattice, GeometryKind, CENTRIOLE_TRIPLETS, DIMERS_PER_SPIRAL};
use crate::hamiltonian::{assemble, coupling};
use crate::spectrum::{c_dot, diagonalize, enhancement_metrics};

/// One 104 nm segment.
pub const DEFAULT_SEGMENT_SPIRALS: usize = 13;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ApproxCentrioleState {
    /// φᵀHφ = Ẽ − iΓ̃/2, cm⁻¹.
    pub expectation_re: f64,
    pub expectation_im: f64,
    /// Γ̃/γ.
    pub gamma_ratio: f64,
    pub n_dipoles: usize,
    pub n_segments: usize,
    pub segment_spirals: usize,
    /// Brightest width of one isolated segment, Γ/γ.
    pub segment_max_ratio: f64,
    /// |φᵀφ − 1| after scaling.
    pub c_norm_error: f64,
    pub elapsed: Duration,
}

impl ApproxCentrioleState {
    pub fn expectation(&self) -> Complex64 {
        Complex64::new(self.expectation_re, self.expectation_im)
    }
}

/// Coefficients c_{m,n} = sin(πn/(N+1))·sin(2π⌈m/3⌉/9) for microtubule m
/// (1-based, triplet-major) and segment n (1-based); indexed `[m-1][n-1]`.
pub fn segment_coefficients(n_segments: usize) -> Vec<Vec<f64>> {
    let n_mt = 3 * CENTRIOLE_TRIPLETS;
    (1..=n_mt)
        .map(|m| {
            let triplet = m.div_ceil(3) as f64;
            let cross = (2.0 * std::f64::consts::PI * triplet / CENTRIOLE_TRIPLETS as f64).sin();
            (1..=n_segments)
                .map(|n| (std::f64::consts::PI * n as f64 / (n_segments + 1) as f64).sin() * cross)
                .collect()
        })
        .collect()
}

/// Builds the trial state on a centriole lattice and returns φᵀHφ.
/// The lattice length must be a whole number of `segment_spirals` segments.
pub fn approx_centriole_state(
    lattice: &DipoleLattice,
    c: &PhysicalConstants,
    segment_spirals: usize,
) -> Result<ApproxCentrioleState> {
    let start = Instant::now();
    if lattice.spec.kind != GeometryKind::Centriole {
        return Err(Error::domain("approximate state requires a centriole lattice"));
    }
    let spirals = lattice.spec.n_spirals;
    if segment_spirals == 0 || spirals % segment_spirals != 0 {
        return Err(Error::domain(format!(
            "centriole of {spirals} spirals is not a multiple of {segment_spirals}-spiral segments"
        )));
    }
    let n_segments = spirals / segment_spirals;
    let per_mt = lattice.dipoles_per_mt;
    let per_spiral = per_mt / spirals;
    if per_spiral % DIMERS_PER_SPIRAL != 0 || per_mt * 3 * CENTRIOLE_TRIPLETS != lattice.len() {
        return Err(Error::domain("lattice layout does not match a centriole"));
    }
    let seg_len = per_spiral * segment_spirals;

    // Segments are congruent, so the first one stands in for all of them.
    let segment = lattice.prefix(seg_len);
    let seg_spec = diagonalize(&assemble(&segment, c, None)?, true)?;
    let bright = enhancement_metrics(&seg_spec)?;
    let phi_seg = seg_spec
        .right_vectors
        .as_ref()
        .expect("vectors requested")
        .column(bright.index_of_max)
        .to_vec();
    drop(seg_spec);

    let coeffs = segment_coefficients(n_segments);
    let mut phi = Vec::with_capacity(lattice.len());
    for row in &coeffs {
        for &cmn in row {
            phi.extend(phi_seg.iter().map(|v| v * cmn));
        }
    }
    let norm2 = c_dot(&phi, &phi);
    let mut scale = norm2.sqrt();
    if scale.re == 0.0 && scale.im < 0.0 {
        scale = -scale;
    }
    let inv = scale.inv();
    phi.iter_mut().for_each(|v| *v *= inv);
    let c_norm_error = (c_dot(&phi, &phi) - 1.0).norm();

    let value = expectation(lattice, c, &phi)?;
    Ok(ApproxCentrioleState {
        expectation_re: value.re,
        expectation_im: value.im,
        gamma_ratio: -2.0 * value.im / c.gamma,
        n_dipoles: lattice.len(),
        n_segments,
        segment_spirals,
        segment_max_ratio: bright.max_ratio,
        c_norm_error,
        elapsed: start.elapsed(),
    })
}

/// φᵀHφ by direct summation over pair kernels, row sums combined in order.
fn expectation(lattice: &DipoleLattice, c: &PhysicalConstants, phi: &[Complex64]) -> Result<Complex64> {
    let d = &lattice.dipoles;
    // E0·φᵀφ = E0 is added once at the end, keeping its rounding out of Im.
    let diag = Complex64::new(0.0, -0.5 * c.gamma);
    let rows = (0..d.len())
        .into_par_iter()
        .map(|m| {
            let mut acc = Complex64::new(0.0, 0.0);
            for n in m + 1..d.len() {
                let k = coupling(&d[m], &d[n], c)
                    .map_err(|_| Error::Singularity { m, n, distance: (d[n].position - d[m].position).norm() })?;
                acc += phi[n] * Complex64::new(k.omega, -0.5 * k.upsilon);
            }
            Ok(phi[m] * (phi[m] * diag + 2.0 * acc))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(rows.into_iter().sum::<Complex64>() + c.e0)
}
