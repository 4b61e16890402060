//! Collective radiative decay of tryptophan transition-dipole networks.
//!
//! The pipeline is: extract dipoles from a protein structure
//! ([`unitcell`]), replicate them into a microtubule architecture
//! ([`geometry`]), assemble the non-Hermitian single-excitation Hamiltonian
//! ([`hamiltonian`]), diagonalize it ([`spectrum`]) and reduce the
//! resonances to experimental observables ([`observables`]).

pub mod constants;
pub mod error;
pub mod geometry;
pub mod hamiltonian;
pub mod hash;
pub mod io;
pub mod observables;
pub mod spectrum;
pub mod unitcell;

pub use constants::PhysicalConstants;
pub use error::{Error, Result};
pub use geometry::{DipoleLattice, GeometryKind, GeometrySpec};
pub use hamiltonian::{assemble, DisorderConfig, EffectiveHamiltonian};
pub use observables::{Lineshape, SpectrumCurve, ThermalReport};
pub use spectrum::{diagonalize, enhancement_metrics, EnhancementMetrics, ResonanceSpectrum};
pub use unitcell::{Dipole, UnitCell};
