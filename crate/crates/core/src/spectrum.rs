//! Complex resonances of the effective Hamiltonian.
//!
//! Eigenvalues are `E_j − iΓ_j/2`. Because `H` is complex symmetric the left
//! eigenvectors are the transposes of the right ones, and right vectors are
//! normalized under the bilinear pairing `vᵀv = 1`.

use std::fmt::Write as _;
use std::path::Path;

use lax::layout::MatrixLayout;
use lax::Lapack;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::hamiltonian::{DenseMatrix, EffectiveHamiltonian};

/// Relative tolerance of the energy and width trace sum rules.
pub const SUM_RULE_TOLERANCE: f64 = 1e-8;
/// Eigenvectors whose c-norm falls below this are treated as defective.
pub const MIN_C_NORM: f64 = 1e-12;
/// Allowed imaginary residue of a survival probability.
pub const SURVIVAL_IMAG_TOLERANCE: f64 = 1e-8;

/// Right eigenvectors, column-major: column `j` belongs to eigenvalue `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenVectors {
    pub n: usize,
    pub data: Vec<Complex64>,
}

impl EigenVectors {
    pub fn column(&self, j: usize) -> &[Complex64] {
        &self.data[j * self.n..(j + 1) * self.n]
    }
}

/// Relative deviations of the trace sum rules for one diagonalization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SumRules {
    /// |ΣE_j − Σε_n| / |Σε_n|
    pub energy: f64,
    /// |ΣΓ_j − Nγ| / (Nγ)
    pub width: f64,
}

#[derive(Debug, Clone)]
pub struct ResonanceSpectrum {
    pub energies: Vec<f64>,
    pub widths: Vec<f64>,
    pub right_vectors: Option<EigenVectors>,
    pub constants: PhysicalConstants,
    pub sum_rules: SumRules,
}

impl ResonanceSpectrum {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn eigenvalue(&self, j: usize) -> Complex64 {
        Complex64::new(self.energies[j], -0.5 * self.widths[j])
    }

    /// Γ_j/γ for every eigenstate.
    pub fn width_ratios(&self) -> Vec<f64> {
        self.widths.iter().map(|g| g / self.constants.gamma).collect()
    }

    /// Indices with Γ_j ≤ 0. Only rounding can produce these.
    pub fn nonpositive_widths(&self) -> Vec<usize> {
        (0..self.len()).filter(|&j| self.widths[j] <= 0.0).collect()
    }

    fn vectors(&self) -> Result<&EigenVectors> {
        self.right_vectors
            .as_ref()
            .ok_or_else(|| Error::domain("spectrum was computed without eigenvectors"))
    }

    /// max_j ‖H v_j − λ_j v_j‖ / ‖H‖_F.
    pub fn max_residual(&self, h: &DenseMatrix) -> Result<f64> {
        let vecs = self.vectors()?;
        let norm = h.frobenius_norm();
        let mut worst = 0.0f64;
        for j in 0..self.len() {
            let v = vecs.column(j);
            let hv = h.mul_vec(v);
            let lam = self.eigenvalue(j);
            let r = hv
                .iter()
                .zip(v)
                .map(|(a, b)| (a - lam * b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            worst = worst.max(r / norm);
        }
        Ok(worst)
    }

    /// max_j |v_jᵀ v_j − 1|.
    pub fn max_c_norm_error(&self) -> Result<f64> {
        let vecs = self.vectors()?;
        Ok((0..self.len())
            .map(|j| (c_dot(vecs.column(j), vecs.column(j)) - 1.0).norm())
            .fold(0.0, f64::max))
    }

    /// Largest |v_jᵀ v_k| over pairs whose eigenvalues differ by more than `min_gap`.
    pub fn max_cross_overlap(&self, min_gap: f64) -> Result<f64> {
        let vecs = self.vectors()?;
        let mut worst = 0.0f64;
        for j in 0..self.len() {
            for k in j + 1..self.len() {
                if (self.eigenvalue(j) - self.eigenvalue(k)).norm() > min_gap {
                    worst = worst.max(c_dot(vecs.column(j), vecs.column(k)).norm());
                }
            }
        }
        Ok(worst)
    }

    /// Complex survival amplitude Σ_j (v_jᵀψ0)(ψ0ᵀv_j) e^{−2πcΓ_j t}.
    pub fn survival_amplitude(&self, initial: &InitialState, times_s: &[f64]) -> Result<Vec<Complex64>> {
        let vecs = self.vectors()?;
        let psi = initial.amplitudes(self.len())?;
        let weights: Vec<Complex64> = (0..self.len())
            .map(|j| {
                let c = c_dot(vecs.column(j), &psi);
                c * c
            })
            .collect();
        Ok(times_s
            .iter()
            .map(|&t| {
                weights
                    .iter()
                    .zip(&self.widths)
                    .map(|(w, &g)| w * (-PhysicalConstants::width_to_rate(g) * t).exp())
                    .sum()
            })
            .collect())
    }

    /// Survival probability of `initial`. Fails if the biorthogonal sum keeps
    /// an imaginary part above [`SURVIVAL_IMAG_TOLERANCE`].
    pub fn survival_probability(&self, initial: &InitialState, times_s: &[f64]) -> Result<Vec<f64>> {
        self.survival_amplitude(initial, times_s)?
            .into_iter()
            .zip(times_s)
            .map(|(p, t)| {
                if p.im.abs() > SURVIVAL_IMAG_TOLERANCE {
                    Err(Error::Numerical(format!(
                        "survival probability at t = {t:e} s has imaginary part {:e}",
                        p.im
                    )))
                } else {
                    Ok(p.re)
                }
            })
            .collect()
    }
}

/// Initial state for survival dynamics.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    Site(usize),
    Amplitudes(Vec<Complex64>),
}

impl InitialState {
    fn amplitudes(&self, n: usize) -> Result<Vec<Complex64>> {
        match self {
            InitialState::Site(i) if *i < n => {
                let mut v = vec![Complex64::new(0.0, 0.0); n];
                v[*i] = Complex64::new(1.0, 0.0);
                Ok(v)
            }
            InitialState::Site(i) => Err(Error::domain(format!("site {i} out of range for N = {n}"))),
            InitialState::Amplitudes(v) => {
                if v.len() != n {
                    return Err(Error::domain(format!("initial state has length {}, expected {n}", v.len())));
                }
                let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
                if (norm - 1.0).abs() > 1e-8 {
                    return Err(Error::domain(format!("initial state is not normalized (norm² = {norm})")));
                }
                Ok(v.clone())
            }
        }
    }
}

/// Bilinear pairing Σ a_i b_i (no conjugation).
pub fn c_dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Principal square root with the tie on the imaginary axis broken towards +i.
fn c_sqrt(z: Complex64) -> Complex64 {
    let s = z.sqrt();
    if s.re == 0.0 && s.im < 0.0 {
        -s
    } else {
        s
    }
}

/// Dense non-Hermitian eigendecomposition of `h`.
///
/// The mean site energy is removed from the diagonal before the solve and
/// added back afterwards, so the small couplings are not swamped by E0.
pub fn diagonalize(h: &EffectiveHamiltonian, keep_vectors: bool) -> Result<ResonanceSpectrum> {
    let n = h.dim();
    if n == 0 {
        return Err(Error::domain("empty Hamiltonian"));
    }
    if h.matrix.data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Numerical("Hamiltonian has non-finite entries".into()));
    }
    let shift = h.site_energies.iter().sum::<f64>() / n as f64;
    // H is symmetric, so the row-major buffer is also its column-major form.
    let mut a = h.matrix.data.clone();
    for i in 0..n {
        a[i * n + i].re -= shift;
    }
    let layout = MatrixLayout::F { col: n as i32, lda: n as i32 };
    let (eigs, vecs) = Complex64::eig(keep_vectors, layout, &mut a).map_err(|e| match e {
        lax::error::Error::LapackComputationalFailure { return_code } => {
            Error::NonConvergence { index: return_code.max(0) as usize }
        }
        other => Error::Numerical(format!("eigensolver failure: {other}")),
    })?;
    drop(a);

    let mut order: Vec<usize> = (0..n).collect();
    let energy = |j: usize| eigs[j].re + shift;
    let width = |j: usize| -2.0 * eigs[j].im;
    order.sort_by(|&x, &y| {
        energy(x)
            .total_cmp(&energy(y))
            .then_with(|| width(y).total_cmp(&width(x)))
    });
    let energies: Vec<f64> = order.iter().map(|&j| energy(j)).collect();
    let widths: Vec<f64> = order.iter().map(|&j| width(j)).collect();

    let c = h.constants;
    let site_sum: f64 = h.site_energies.iter().sum();
    let shifted_trace: f64 = h.site_energies.iter().map(|e| e - shift).sum();
    let eig_shifted_sum: f64 = eigs.iter().map(|z| z.re).sum();
    let n_gamma = n as f64 * c.gamma;
    let sum_rules = SumRules {
        energy: (eig_shifted_sum - shifted_trace).abs() / site_sum.abs(),
        width: (widths.iter().sum::<f64>() - n_gamma).abs() / n_gamma,
    };
    if !(sum_rules.energy <= SUM_RULE_TOLERANCE && sum_rules.width <= SUM_RULE_TOLERANCE) {
        return Err(Error::Numerical(format!(
            "trace sum rules violated: energy {:e}, width {:e}",
            sum_rules.energy, sum_rules.width
        )));
    }
    let bad = widths.iter().filter(|g| **g <= 0.0).count();
    if bad > 0 {
        log::warn!("{bad} eigenstates have non-positive width (rounding in the subradiant tail)");
    }

    let right_vectors = if keep_vectors {
        Some(normalize_vectors(n, &vecs, &order, &energies, &widths, h.matrix.frobenius_norm())?)
    } else {
        None
    };

    Ok(ResonanceSpectrum { energies, widths, right_vectors, constants: c, sum_rules })
}

fn normalize_vectors(
    n: usize,
    raw: &[Complex64],
    order: &[usize],
    energies: &[f64],
    widths: &[f64],
    h_norm: f64,
) -> Result<EigenVectors> {
    let mut data = Vec::with_capacity(n * n);
    for (j, &src) in order.iter().enumerate() {
        let col = &raw[src * n..(src + 1) * n];
        let scale2 = c_dot(col, col);
        let two_norm2: f64 = col.iter().map(|z| z.norm_sqr()).sum();
        let c_norm = scale2.norm() / two_norm2;
        if c_norm < MIN_C_NORM {
            let lam = Complex64::new(energies[j], -0.5 * widths[j]);
            let gap = 1e-6 * h_norm.max(1.0);
            let cluster = (0..n)
                .filter(|&k| (Complex64::new(energies[k], -0.5 * widths[k]) - lam).norm() <= gap)
                .collect();
            return Err(Error::QuasiDegenerate { cluster, c_norm });
        }
        let inv = c_sqrt(scale2).inv();
        data.extend(col.iter().map(|z| z * inv));
    }
    Ok(EigenVectors { n, data })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnhancementMetrics {
    pub n: usize,
    /// max_j Γ_j/γ
    pub max_ratio: f64,
    /// max_j Γ_j/(Nγ)
    pub max_per_n: f64,
    /// min_j Γ_j/γ
    pub min_ratio: f64,
    pub tau_super_s: f64,
    pub tau_sub_s: f64,
    /// Energy of the brightest state relative to E0, cm⁻¹.
    pub e_offset_of_max: f64,
    pub index_of_max: usize,
}

pub fn enhancement_metrics(s: &ResonanceSpectrum) -> Result<EnhancementMetrics> {
    if s.is_empty() {
        return Err(Error::domain("empty spectrum"));
    }
    let (jmax, gmax) = s
        .widths
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (j, g)| if g > acc.1 { (j, g) } else { acc });
    let gmin = s.widths.iter().copied().fold(f64::INFINITY, f64::min);
    let gamma = s.constants.gamma;
    Ok(EnhancementMetrics {
        n: s.len(),
        max_ratio: gmax / gamma,
        max_per_n: gmax / (s.len() as f64 * gamma),
        min_ratio: gmin / gamma,
        tau_super_s: PhysicalConstants::lifetime_s(gmax),
        tau_sub_s: PhysicalConstants::lifetime_s(gmin),
        e_offset_of_max: s.energies[jmax] - s.constants.e0,
        index_of_max: jmax,
    })
}

/// CSV with header `j,E_minus_E0_cm1,Gamma_over_gamma`; `j` counts from 1.
pub fn spectrum_csv(s: &ResonanceSpectrum) -> String {
    let mut out = String::from("j,E_minus_E0_cm1,Gamma_over_gamma\n");
    for j in 0..s.len() {
        let _ = writeln!(
            out,
            "{},{},{}",
            j + 1,
            s.energies[j] - s.constants.e0,
            s.widths[j] / s.constants.gamma
        );
    }
    out
}

pub fn write_spectrum_csv(s: &ResonanceSpectrum, path: impl AsRef<Path>) -> Result<()> {
    crate::io::write_atomic(path.as_ref(), spectrum_csv(s).as_bytes())
}
