use std::path::PathBuf;

use clap::{Args, Subcommand};
use serde::{Deserialize, Serialize};
use trpnet::observables::{FitKind, DEFAULT_REALIZATIONS, DEFAULT_SEGMENT_SPIRALS, DEFAULT_TEMPERATURE_K};
use trpnet::unitcell::DEFAULT_LA_ANGLE_DEG;
use trpnet::{GeometryKind, Lineshape};

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Extract a dipole unit cell from a PDB file.
    Extract(ExtractArgs),
    /// Export the dipole lattice of an architecture.
    Lattice(LatticeArgs),
    /// Diagonalize one architecture and report superradiance metrics.
    Spectrum(SpectrumArgs),
    /// Thermal quantum yield versus network size.
    Sweep(SweepArgs),
    /// Quantum yield statistics under static disorder.
    Disorder(DisorderArgs),
    /// Absorption and fluorescence lineshapes.
    Lineshape(LineshapeArgs),
    /// Evaluate the closed-form saturation curves.
    Fit(FitArgs),
    /// Trial superradiant state of a centriole without full diagonalization.
    ApproxCentriole(ApproxArgs),
    /// Re-run a command from its manifest.
    Replay(ReplayArgs),
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct GeometryArgs {
    /// Architecture: mt, centriole, axoneme or bundle.
    #[arg(long, default_value = "mt")]
    pub kind: GeometryKind,
    /// Microtubules in a bundle (centred hexagonal number: 7, 19, 37, ...).
    #[arg(long)]
    pub n_mt: Option<usize>,
    /// Unit-cell file; the bundled tubulin dimer when omitted.
    #[arg(long)]
    pub unit_cell: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct PhysicsArgs {
    #[arg(long, default_value_t = DEFAULT_TEMPERATURE_K)]
    pub temp_k: f64,
    /// Non-radiative width, cm^-1.
    #[arg(long, default_value_t = 0.0183)]
    pub gamma_nr: f64,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct ExtractArgs {
    #[arg(long)]
    pub pdb: PathBuf,
    /// Rotation of the dipole from the CG->NE1 axis within the ring plane.
    #[arg(long, default_value_t = DEFAULT_LA_ANGLE_DEG, allow_negative_numbers = true)]
    pub angle_deg: f64,
    /// Ring atom that positions the dipole.
    #[arg(long, default_value = "CD2")]
    pub anchor: String,
    /// Restrict to these chain identifiers.
    #[arg(long, value_delimiter = ',')]
    pub chains: Vec<String>,
    #[arg(long, default_value = "tubulin dimer")]
    pub label: String,
    /// Output unit-cell path.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct LatticeArgs {
    #[command(flatten)]
    pub geometry: GeometryArgs,
    #[arg(long, default_value_t = 1)]
    pub spirals: usize,
    /// Output prefix.
    #[arg(long, default_value = "run")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub geometry: GeometryArgs,
    #[arg(long, default_value_t = 1)]
    pub spirals: usize,
    #[command(flatten)]
    pub physics: PhysicsArgs,
    /// Static disorder width W, cm^-1.
    #[arg(long)]
    pub disorder_w: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub realization: u64,
    /// Also write the Hamiltonian with Re(diagonal) set to zero.
    #[arg(long)]
    pub zero_diagonal_dump: bool,
    /// Also write the full Hamiltonian.
    #[arg(long)]
    pub dump_heff: bool,
    #[arg(long, default_value = "run")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct SweepArgs {
    #[command(flatten)]
    pub geometry: GeometryArgs,
    /// Spiral counts, e.g. `1..10,20,40`.
    #[arg(long, default_value = "")]
    pub spirals: String,
    /// Extra points made of the first N dipoles of one spiral, e.g. `1,8,104`.
    #[arg(long, value_delimiter = ',')]
    pub n_trp: Vec<usize>,
    #[command(flatten)]
    pub physics: PhysicsArgs,
    #[arg(long, default_value = "run")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct DisorderArgs {
    #[command(flatten)]
    pub geometry: GeometryArgs,
    #[arg(long, default_value_t = 1)]
    pub spirals: usize,
    /// Disorder widths W, cm^-1.
    #[arg(long, num_args = 1.., value_delimiter = ',', required = true)]
    pub disorder_w: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_REALIZATIONS)]
    pub realizations: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub physics: PhysicsArgs,
    #[arg(long, default_value = "run")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct LineshapeArgs {
    #[command(flatten)]
    pub geometry: GeometryArgs,
    #[arg(long, default_value_t = 1)]
    pub spirals: usize,
    /// Broadening, cm^-1. No default: it has to be chosen for the data at hand.
    #[arg(long)]
    pub sigma: f64,
    #[arg(long, default_value = "lorentzian")]
    pub lineshape: Lineshape,
    #[command(flatten)]
    pub physics: PhysicsArgs,
    /// Grid start relative to E0, cm^-1.
    #[arg(long, default_value_t = -300.0, allow_negative_numbers = true)]
    pub grid_from: f64,
    /// Grid end relative to E0, cm^-1.
    #[arg(long, default_value_t = 300.0, allow_negative_numbers = true)]
    pub grid_to: f64,
    #[arg(long, default_value_t = 601)]
    pub grid_points: usize,
    #[arg(long, default_value = "run")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct FitArgs {
    /// axo1jff, axo6u42, cent1jff or axonbundle.
    #[arg(long)]
    pub curve: FitKind,
    /// Lengths in nm; `inf` evaluates the saturation value.
    #[arg(long, num_args = 1.., value_delimiter = ',', required = true)]
    pub length_nm: Vec<f64>,
    #[arg(long)]
    pub n_mt: Option<usize>,
    #[arg(long, default_value = "run")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct ApproxArgs {
    #[arg(long)]
    pub unit_cell: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_SEGMENT_SPIRALS)]
    pub spirals: usize,
    #[arg(long, default_value_t = DEFAULT_SEGMENT_SPIRALS)]
    pub segment_spirals: usize,
    /// Also diagonalize the full centriole for comparison.
    #[arg(long)]
    pub compare: bool,
    #[arg(long, default_value = "run")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct ReplayArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Write outputs under a new prefix instead of the recorded one.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `1..10,20,40` into spiral counts.
pub fn parse_spiral_list(text: &str) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let a: usize = a.trim().parse().map_err(|_| format!("bad range '{part}'"))?;
            let b: usize = b.trim().parse().map_err(|_| format!("bad range '{part}'"))?;
            if b < a {
                return Err(format!("empty range '{part}'"));
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|_| format!("bad spiral count '{part}'"))?);
        }
    }
    Ok(out)
}
