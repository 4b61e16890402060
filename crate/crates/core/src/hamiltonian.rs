//! Radiative couplings and the dense single-excitation Hamiltonian
//!
//! `H = Σ_n (ε_n − iγ/2)|n⟩⟨n| + Σ_{m≠n} (Ω_mn − iΥ_mn/2)|m⟩⟨n|`, in cm⁻¹.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::geometry::DipoleLattice;
use crate::unitcell::Dipole;

pub const DEFAULT_MAX_DIM: usize = 20_000;
pub const MAX_DIM_ENV: &str = "SIM_MAX_N";
pub const HEFF1_MAGIC: &[u8; 5] = b"HEFF1";

/// Capacity cap for dense assembly; `SIM_MAX_N` overrides the default.
pub fn capacity_limit() -> usize {
    std::env::var(MAX_DIM_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_DIM)
}

/// Ω_mn and Υ_mn together; both share the same geometry factors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coupling {
    pub omega: f64,
    pub upsilon: f64,
}

pub fn coupling(dm: &Dipole, dn: &Dipole, c: &PhysicalConstants) -> Result<Coupling> {
    let sep = dn.position - dm.position;
    let r = sep.norm();
    if !(r > 0.0) {
        return Err(Error::Singularity { m: 0, n: 0, distance: r });
    }
    let rhat = sep / r;
    let um = &dm.orientation;
    let un = &dn.orientation;
    let uu = um.dot(un);
    let proj = um.dot(&rhat) * un.dot(&rhat);
    let a = uu - proj;
    let b = uu - 3.0 * proj;
    let x = c.k0 * r;
    let (s, co) = x.sin_cos();
    let x2 = x * x;
    let x3 = x2 * x;
    let gamma = c.gamma;
    Ok(Coupling {
        omega: 0.75 * gamma * (-a * co / x + b * (s / x2 + co / x3)),
        upsilon: 1.5 * gamma * (a * s / x + b * (co / x2 - s / x3)),
    })
}

/// Coherent (energy-shift) coupling Ω_mn, cm⁻¹.
pub fn coupling_omega(dm: &Dipole, dn: &Dipole, c: &PhysicalConstants) -> Result<f64> {
    coupling(dm, dn, c).map(|k| k.omega)
}

/// Dissipative coupling Υ_mn, cm⁻¹.
pub fn coupling_upsilon(dm: &Dipole, dn: &Dipole, c: &PhysicalConstants) -> Result<f64> {
    coupling(dm, dn, c).map(|k| k.upsilon)
}

/// Static on-site disorder: ε_n uniform on [E0 − W/2, E0 + W/2].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisorderConfig {
    pub width: f64,
    pub seed: u64,
    pub realization: u64,
}

impl DisorderConfig {
    pub fn new(width: f64, seed: u64, realization: u64) -> Result<Self> {
        if !(width >= 0.0 && width.is_finite()) {
            return Err(Error::domain(format!("disorder width must be >= 0, got {width}")));
        }
        Ok(Self { width, seed, realization })
    }

    /// Uniform deviate in [0, 1) for site `n`, independent of evaluation order.
    pub fn unit_deviate(&self, n: usize) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.realization);
        rng.set_word_pos(2 * n as u128);
        (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn site_energy(&self, e0: f64, n: usize) -> f64 {
        e0 + self.width * (self.unit_deviate(n) - 0.5)
    }
}

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    pub n: usize,
    pub data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.data
            .par_chunks(self.n)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Largest |H_mn − H_nm|.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in i + 1..self.n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).norm());
            }
        }
        worst
    }
}

#[derive(Debug, Clone)]
pub struct EffectiveHamiltonian {
    pub matrix: DenseMatrix,
    pub constants: PhysicalConstants,
    pub site_energies: Vec<f64>,
    pub disorder: Option<DisorderConfig>,
}

impl EffectiveHamiltonian {
    pub fn dim(&self) -> usize {
        self.matrix.n
    }

    /// Γ̂ = (H − H†)/(−i) = −2·Im H for a complex symmetric H.
    pub fn decay_matrix(&self) -> Vec<f64> {
        self.matrix.data.iter().map(|z| -2.0 * z.im).collect()
    }

    /// Copy with the real part of the diagonal removed (coupling-only view).
    pub fn zero_diagonal_view(&self) -> DenseMatrix {
        let mut m = self.matrix.clone();
        for i in 0..m.n {
            let v = m.get(i, i);
            m.set(i, i, Complex64::new(0.0, v.im));
        }
        m
    }
}

pub fn site_energies(n: usize, c: &PhysicalConstants, disorder: Option<&DisorderConfig>) -> Vec<f64> {
    match disorder {
        None => vec![c.e0; n],
        Some(d) => (0..n).map(|i| d.site_energy(c.e0, i)).collect(),
    }
}

/// Dense Hamiltonian of `lattice`, bounded by [`capacity_limit`].
pub fn assemble(
    lattice: &DipoleLattice,
    c: &PhysicalConstants,
    disorder: Option<&DisorderConfig>,
) -> Result<EffectiveHamiltonian> {
    assemble_with_limit(lattice, c, disorder, capacity_limit())
}

pub fn assemble_with_limit(
    lattice: &DipoleLattice,
    c: &PhysicalConstants,
    disorder: Option<&DisorderConfig>,
    max_dim: usize,
) -> Result<EffectiveHamiltonian> {
    let dipoles = &lattice.dipoles;
    let n = dipoles.len();
    if n == 0 {
        return Err(Error::domain("lattice is empty"));
    }
    if n > max_dim {
        return Err(Error::Capacity { requested: n, limit: max_dim });
    }
    let energies = site_energies(n, c, disorder);
    let mut matrix = DenseMatrix::zeros(n);

    matrix
        .data
        .par_chunks_mut(n)
        .enumerate()
        .try_for_each(|(m, row)| -> Result<()> {
            let dm = &dipoles[m];
            row[m] = Complex64::new(energies[m], -0.5 * c.gamma);
            for (k, dn) in dipoles.iter().enumerate().skip(m + 1) {
                let cp = coupling(dm, dn, c).map_err(|_| Error::Singularity {
                    m,
                    n: k,
                    distance: (dn.position - dm.position).norm(),
                })?;
                row[k] = Complex64::new(cp.omega, -0.5 * cp.upsilon);
            }
            Ok(())
        })
        .map_err(|e| first_coincident_pair(lattice).unwrap_or(e))?;

    for m in 0..n {
        for k in 0..m {
            let v = matrix.get(k, m);
            matrix.set(m, k, v);
        }
    }
    Ok(EffectiveHamiltonian {
        matrix,
        constants: *c,
        site_energies: energies,
        disorder: disorder.copied(),
    })
}

/// Lowest-index coincident pair, so the reported error does not depend on
/// thread scheduling.
fn first_coincident_pair(lattice: &DipoleLattice) -> Option<Error> {
    let d = &lattice.dipoles;
    for m in 0..d.len() {
        for n in m + 1..d.len() {
            let dist = (d[n].position - d[m].position).norm();
            if !(dist > 0.0) {
                return Some(Error::Singularity { m, n, distance: dist });
            }
        }
    }
    None
}

/// Binary dump: `HEFF1`, u64 N, then N² (re, im) f64 pairs row-major, all
/// little-endian.
pub fn write_heff1(matrix: &DenseMatrix, mut out: impl Write) -> Result<()> {
    out.write_all(HEFF1_MAGIC)?;
    out.write_all(&(matrix.n as u64).to_le_bytes())?;
    let mut buf = Vec::with_capacity(16 * matrix.n);
    for row in matrix.data.chunks(matrix.n.max(1)) {
        buf.clear();
        for z in row {
            buf.extend_from_slice(&z.re.to_le_bytes());
            buf.extend_from_slice(&z.im.to_le_bytes());
        }
        out.write_all(&buf)?;
    }
    Ok(())
}

pub fn write_heff1_file(matrix: &DenseMatrix, path: impl AsRef<Path>) -> Result<()> {
    let mut bytes = Vec::with_capacity(13 + 16 * matrix.data.len());
    write_heff1(matrix, &mut bytes)?;
    crate::io::write_atomic(path.as_ref(), &bytes)
}

pub fn read_heff1(mut input: impl Read) -> Result<DenseMatrix> {
    let mut magic = [0u8; 5];
    input.read_exact(&mut magic)?;
    if &magic != HEFF1_MAGIC {
        return Err(Error::Format { line: 0, message: "missing HEFF1 magic".into() });
    }
    let mut word = [0u8; 8];
    input.read_exact(&mut word)?;
    let n = u64::from_le_bytes(word) as usize;
    let mut m = DenseMatrix::zeros(n);
    for z in m.data.iter_mut() {
        input.read_exact(&mut word)?;
        let re = f64::from_le_bytes(word);
        input.read_exact(&mut word)?;
        *z = Complex64::new(re, f64::from_le_bytes(word));
    }
    Ok(m)
}
