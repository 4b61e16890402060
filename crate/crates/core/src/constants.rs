//! Physical constants of the tryptophan radiative model.
//!
//! Energies and rates are in cm⁻¹, lengths in Å. The printed values are
//! used verbatim (k0 = 2.24e-3 Å⁻¹ rather than 2π/λ), so γ agrees with
//! (4/3)·μ²·k0³ only to about 0.2%.

use serde::{Deserialize, Serialize};

/// Speed of light in cm/s; converts widths in cm⁻¹ to rates via 2πc.
pub const SPEED_OF_LIGHT_CM_PER_S: f64 = 2.997_924_58e10;

/// μ² for a 6 Debye transition dipole, in Å³·cm⁻¹.
pub const DEFAULT_MU_SQUARED: f64 = 181_224.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// Excitation wavelength, nm.
    pub lambda0_nm: f64,
    /// Site excitation energy E0, cm⁻¹.
    pub e0: f64,
    /// Angular wavenumber k0, Å⁻¹.
    pub k0: f64,
    /// Transition dipole strength μ², Å³·cm⁻¹.
    pub mu_squared: f64,
    /// Single-emitter radiative width γ, cm⁻¹.
    pub gamma: f64,
    /// Single-emitter non-radiative width γ_nr, cm⁻¹.
    pub gamma_nr: f64,
    /// Boltzmann constant, cm⁻¹/K.
    pub k_b: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            lambda0_nm: 280.0,
            e0: 35_714.0,
            k0: 2.24e-3,
            mu_squared: DEFAULT_MU_SQUARED,
            gamma: 2.73e-3,
            gamma_nr: 0.0183,
            k_b: 0.695,
        }
    }
}

impl PhysicalConstants {
    /// γ recomputed from μ² and the stored k0.
    pub fn gamma_from_dipole(&self) -> f64 {
        4.0 / 3.0 * self.mu_squared * self.k0.powi(3)
    }

    /// 2π/λ0 in Å⁻¹.
    pub fn k0_from_wavelength(&self) -> f64 {
        2.0 * std::f64::consts::PI / (self.lambda0_nm * 10.0)
    }

    /// Quantum yield of an isolated emitter, γ/(γ+γ_nr).
    pub fn single_emitter_qy(&self) -> f64 {
        self.gamma / (self.gamma + self.gamma_nr)
    }

    /// Converts a width in cm⁻¹ to a rate in s⁻¹.
    pub fn width_to_rate(width_cm1: f64) -> f64 {
        2.0 * std::f64::consts::PI * SPEED_OF_LIGHT_CM_PER_S * width_cm1
    }

    /// Lifetime τ = (2πcΓ)⁻¹ in seconds.
    pub fn lifetime_s(width_cm1: f64) -> f64 {
        1.0 / Self::width_to_rate(width_cm1)
    }

    pub fn kbt(&self, temperature_k: f64) -> f64 {
        self.k_b * temperature_k
    }
}
