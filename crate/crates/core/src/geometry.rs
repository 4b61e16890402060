//! Microtubule architectures built by rigidly replicating a unit cell.
//!
//! All "yz-plane" rotations are right-handed rotations about +x. The
//! microtubule axis is x. Lengths are stored in Å; placement constants
//! below are in nm as published and converted once.

use std::fmt;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use nalgebra::{Rotation3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::unitcell::{parse_dipole_row, write_dipole_rows, Dipole, UnitCell, Vec3};

const NM: f64 = 10.0;

/// Initial alignment of the outer surface with +y.
pub const ALIGN_ROTATION_DEG: f64 = -55.38;
/// Per-dimer tilt about the pivot atom.
pub const PIVOT_ROTATION_DEG: f64 = 11.7;
pub const PIVOT_SHIFT_Z_NM: f64 = 0.3;
pub const RADIAL_SHIFT_Y_NM: f64 = 11.2;
/// Helical step between successive dimers of a spiral.
pub const DIMER_STEP_DEG: f64 = -27.69;
pub const DIMER_RISE_NM: f64 = 0.9;
/// Spiral pitch ℓ0.
pub const SPIRAL_PITCH_NM: f64 = 8.0;
pub const DIMERS_PER_SPIRAL: usize = 13;

pub const CENTRIOLE_TRIPLET_NM: [(f64, f64); 3] = [(87.0, -22.5167), (100.0, 0.0), (113.0, 22.5167)];
pub const CENTRIOLE_STEP_DEG: f64 = 40.0;
pub const CENTRIOLE_TRIPLETS: usize = 9;

pub const AXONEME_RADIUS_NM: f64 = 98.0;
pub const AXONEME_PAIR_SPACING_NM: f64 = 26.0;
pub const AXONEME_OUTER_PAIRS: usize = 9;

pub const BUNDLE_SPACING_NM: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeometryKind {
    #[serde(rename = "mt")]
    Microtubule,
    Centriole,
    #[serde(rename = "axoneme")]
    AxonemeIdealized,
    Bundle,
    /// Hand-assembled dipole sets (tests, small oracles).
    Custom,
}

impl GeometryKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GeometryKind::Microtubule => "mt",
            GeometryKind::Centriole => "centriole",
            GeometryKind::AxonemeIdealized => "axoneme",
            GeometryKind::Bundle => "bundle",
            GeometryKind::Custom => "custom",
        }
    }
}

impl fmt::Display for GeometryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GeometryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mt" | "microtubule" => Ok(GeometryKind::Microtubule),
            "centriole" => Ok(GeometryKind::Centriole),
            "axoneme" => Ok(GeometryKind::AxonemeIdealized),
            "bundle" => Ok(GeometryKind::Bundle),
            "custom" => Ok(GeometryKind::Custom),
            other => Err(Error::domain(format!("unknown geometry kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeometrySpec {
    pub kind: GeometryKind,
    pub n_spirals: usize,
    pub n_mt: Option<usize>,
}

impl GeometrySpec {
    pub fn microtubule(n_spirals: usize) -> Self {
        Self { kind: GeometryKind::Microtubule, n_spirals, n_mt: None }
    }

    pub fn centriole(n_spirals: usize) -> Self {
        Self { kind: GeometryKind::Centriole, n_spirals, n_mt: None }
    }

    pub fn axoneme(n_spirals: usize) -> Self {
        Self { kind: GeometryKind::AxonemeIdealized, n_spirals, n_mt: None }
    }

    pub fn bundle(n_mt: usize, n_spirals: usize) -> Self {
        Self { kind: GeometryKind::Bundle, n_spirals, n_mt: Some(n_mt) }
    }

    /// Number of microtubules in the architecture.
    pub fn microtubules(&self) -> usize {
        match self.kind {
            GeometryKind::Microtubule => 1,
            GeometryKind::Centriole => 3 * CENTRIOLE_TRIPLETS,
            GeometryKind::AxonemeIdealized => 2 * (AXONEME_OUTER_PAIRS + 1),
            GeometryKind::Bundle => self.n_mt.unwrap_or(0),
            GeometryKind::Custom => 0,
        }
    }

    /// Closed-form dipole count for a cell of `cell_len` dipoles.
    pub fn expected_count(&self, cell_len: usize) -> usize {
        self.microtubules() * DIMERS_PER_SPIRAL * cell_len * self.n_spirals
    }

    pub fn length_nm(&self) -> f64 {
        self.n_spirals as f64 * SPIRAL_PITCH_NM
    }

    pub fn header(&self) -> String {
        let mut h = format!("# lattice v1 kind={} n_spirals={}", self.kind, self.n_spirals);
        if let Some(n) = self.n_mt {
            let _ = write!(h, " n_mt={n}");
        }
        h
    }
}

/// Ordered dipole network. Multi-microtubule lattices are microtubule-major;
/// within a microtubule the order is spiral, then dimer, then unit-cell row.
#[derive(Debug, Clone, PartialEq)]
pub struct DipoleLattice {
    pub dipoles: Vec<Dipole>,
    pub spec: GeometrySpec,
    pub length_nm: f64,
    /// Dipoles in one microtubule (0 for custom lattices).
    pub dipoles_per_mt: usize,
}

impl DipoleLattice {
    pub fn custom(dipoles: Vec<Dipole>) -> Self {
        Self {
            dipoles,
            spec: GeometrySpec { kind: GeometryKind::Custom, n_spirals: 0, n_mt: None },
            length_nm: 0.0,
            dipoles_per_mt: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.dipoles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dipoles.is_empty()
    }

    /// First `n` dipoles as a custom lattice (e.g. a single dimer of a microtubule).
    pub fn prefix(&self, n: usize) -> Self {
        Self::custom(self.dipoles[..n.min(self.len())].to_vec())
    }

    /// Applies a rigid motion `p -> R p + t`, `u -> R u`.
    pub fn transformed(&self, rotation: &Rotation3<f64>, translation: &Vec3) -> Self {
        let mut out = self.clone();
        for d in out.dipoles.iter_mut() {
            d.position = rotation * d.position + translation;
            d.orientation = rotation * d.orientation;
        }
        out
    }
}

fn rot_x(deg: f64) -> Rotation3<f64> {
    Rotation3::from_axis_angle(&Vector3::x_axis(), deg.to_radians())
}

fn check_spirals(n_spirals: usize) -> Result<()> {
    if n_spirals == 0 {
        return Err(Error::domain("n_spirals must be at least 1"));
    }
    Ok(())
}

/// The dimer after alignment, pivot tilt and the radial/z shifts, i.e. the
/// copy that sits at dimer slot 0 of spiral 0.
fn placed_dimer(cell: &UnitCell) -> Result<Vec<Dipole>> {
    if cell.is_empty() {
        return Err(Error::domain("unit cell has no dipoles"));
    }
    let pivot_idx = cell
        .pivot
        .ok_or_else(|| Error::domain("unit cell has no pivot dipole (beta-Trp346)"))?;
    let align = rot_x(ALIGN_ROTATION_DEG);
    let tilt = rot_x(PIVOT_ROTATION_DEG);
    let pivot = align * cell.dipoles[pivot_idx].position;
    let shift = Vec3::new(0.0, RADIAL_SHIFT_Y_NM * NM, PIVOT_SHIFT_Z_NM * NM);
    Ok(cell
        .dipoles
        .iter()
        .map(|d| {
            let p = align * d.position;
            let u = align * d.orientation;
            Dipole {
                position: pivot + tilt * (p - pivot) + shift,
                orientation: tilt * u,
                mu_squared: d.mu_squared,
            }
        })
        .collect())
}

/// One microtubule on the x axis, spiral-major.
fn microtubule_dipoles(cell: &UnitCell, n_spirals: usize) -> Result<Vec<Dipole>> {
    let dimer = placed_dimer(cell)?;
    let steps: Vec<Rotation3<f64>> = (0..DIMERS_PER_SPIRAL)
        .map(|d| rot_x(d as f64 * DIMER_STEP_DEG))
        .collect();
    let mut out = Vec::with_capacity(n_spirals * DIMERS_PER_SPIRAL * dimer.len());
    for s in 0..n_spirals {
        for (d, rot) in steps.iter().enumerate() {
            let shift = Vec3::new((s as f64 * SPIRAL_PITCH_NM + d as f64 * DIMER_RISE_NM) * NM, 0.0, 0.0);
            out.extend(dimer.iter().map(|dp| Dipole {
                position: rot * dp.position + shift,
                orientation: rot * dp.orientation,
                mu_squared: dp.mu_squared,
            }));
        }
    }
    Ok(out)
}

/// Places copies of a microtubule at the given (y, z) axis centres (nm),
/// each copy optionally followed by a rotation about x.
fn replicate(mt: &[Dipole], placements: &[((f64, f64), f64)]) -> Vec<Dipole> {
    let mut out = Vec::with_capacity(mt.len() * placements.len());
    for &((y, z), deg) in placements {
        let rot = rot_x(deg);
        let shift = Vec3::new(0.0, y * NM, z * NM);
        out.extend(mt.iter().map(|d| Dipole {
            position: rot * (d.position + shift),
            orientation: rot * d.orientation,
            mu_squared: d.mu_squared,
        }));
    }
    out
}

fn finish(dipoles: Vec<Dipole>, spec: GeometrySpec, per_mt: usize) -> DipoleLattice {
    DipoleLattice { dipoles, length_nm: spec.length_nm(), spec, dipoles_per_mt: per_mt }
}

pub fn build_microtubule(cell: &UnitCell, n_spirals: usize) -> Result<DipoleLattice> {
    check_spirals(n_spirals)?;
    let mt = microtubule_dipoles(cell, n_spirals)?;
    let per_mt = mt.len();
    Ok(finish(mt, GeometrySpec::microtubule(n_spirals), per_mt))
}

/// Axis centres (y, z) in nm of the 27 centriole microtubules, triplet-major.
pub fn centriole_axes() -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(27);
    for k in 0..CENTRIOLE_TRIPLETS {
        let rot = rot_x(k as f64 * CENTRIOLE_STEP_DEG);
        for &(y, z) in &CENTRIOLE_TRIPLET_NM {
            let p = rot * Vec3::new(0.0, y, z);
            out.push((p.y, p.z));
        }
    }
    out
}

pub fn build_centriole(cell: &UnitCell, n_spirals: usize) -> Result<DipoleLattice> {
    check_spirals(n_spirals)?;
    let mt = microtubule_dipoles(cell, n_spirals)?;
    let placements: Vec<_> = (0..CENTRIOLE_TRIPLETS)
        .flat_map(|k| {
            CENTRIOLE_TRIPLET_NM
                .iter()
                .map(move |&c| (c, k as f64 * CENTRIOLE_STEP_DEG))
        })
        .collect();
    Ok(finish(replicate(&mt, &placements), GeometrySpec::centriole(n_spirals), mt.len()))
}

/// Axis centres (y, z) in nm of the 20 axoneme microtubules: the central
/// pair along y, then nine tangential pairs at 98 nm.
pub fn axoneme_axes() -> Vec<(f64, f64)> {
    let half = AXONEME_PAIR_SPACING_NM / 2.0;
    let mut out = vec![(-half, 0.0), (half, 0.0)];
    for k in 0..AXONEME_OUTER_PAIRS {
        let rot = rot_x(k as f64 * CENTRIOLE_STEP_DEG);
        for dz in [-half, half] {
            let p = rot * Vec3::new(0.0, AXONEME_RADIUS_NM, dz);
            out.push((p.y, p.z));
        }
    }
    out
}

pub fn build_axoneme(cell: &UnitCell, n_spirals: usize) -> Result<DipoleLattice> {
    check_spirals(n_spirals)?;
    let mt = microtubule_dipoles(cell, n_spirals)?;
    let placements: Vec<_> = axoneme_axes().into_iter().map(|c| (c, 0.0)).collect();
    Ok(finish(replicate(&mt, &placements), GeometrySpec::axoneme(n_spirals), mt.len()))
}

/// Number of hexagonal rings around the centre for a centred-hexagonal count.
pub fn hexagonal_rings(n_mt: usize) -> Option<usize> {
    (1..)
        .map(|r: usize| (r, 1 + 3 * r * (r + 1)))
        .take_while(|&(_, count)| count <= n_mt)
        .find(|&(_, count)| count == n_mt)
        .map(|(r, _)| r)
}

/// Triangular-lattice axis centres (y, z) in nm, centre first, then ring by ring.
pub fn bundle_axes(rings: usize) -> Vec<(f64, f64)> {
    const DIRS: [(i64, i64); 6] = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)];
    let to_xy = |i: i64, j: i64| {
        let (i, j) = (i as f64, j as f64);
        (
            BUNDLE_SPACING_NM * (i + 0.5 * j),
            BUNDLE_SPACING_NM * (3f64.sqrt() / 2.0 * j),
        )
    };
    let mut out = vec![(0.0, 0.0)];
    for r in 1..=rings as i64 {
        let (mut i, mut j) = (0, -r);
        for (di, dj) in DIRS {
            for _ in 0..r {
                out.push(to_xy(i, j));
                i += di;
                j += dj;
            }
        }
    }
    out
}

pub fn build_bundle(cell: &UnitCell, n_mt: usize, n_spirals: usize) -> Result<DipoleLattice> {
    check_spirals(n_spirals)?;
    let rings = hexagonal_rings(n_mt)
        .ok_or_else(|| Error::domain(format!("{n_mt} is not a centred-hexagonal microtubule count")))?;
    let mt = microtubule_dipoles(cell, n_spirals)?;
    let placements: Vec<_> = bundle_axes(rings).into_iter().map(|c| (c, 0.0)).collect();
    Ok(finish(replicate(&mt, &placements), GeometrySpec::bundle(n_mt, n_spirals), mt.len()))
}

pub fn build(cell: &UnitCell, spec: &GeometrySpec) -> Result<DipoleLattice> {
    match spec.kind {
        GeometryKind::Microtubule => build_microtubule(cell, spec.n_spirals),
        GeometryKind::Centriole => build_centriole(cell, spec.n_spirals),
        GeometryKind::AxonemeIdealized => build_axoneme(cell, spec.n_spirals),
        GeometryKind::Bundle => {
            let n_mt = spec.n_mt.ok_or_else(|| Error::domain("bundle requires n_mt"))?;
            build_bundle(cell, n_mt, spec.n_spirals)
        }
        GeometryKind::Custom => Err(Error::domain("custom lattices are not built from a spec")),
    }
}

pub fn write_lattice_string(lattice: &DipoleLattice) -> String {
    let mut out = lattice.spec.header();
    out.push('\n');
    write_dipole_rows(&mut out, &lattice.dipoles);
    out
}

pub fn write_lattice(lattice: &DipoleLattice, path: impl AsRef<Path>) -> Result<()> {
    crate::io::write_atomic(path.as_ref(), write_lattice_string(lattice).as_bytes())
}

/// Reads a lattice export. μ² is not part of the format and is taken from
/// `mu_squared`.
pub fn read_lattice_str(text: &str, mu_squared: f64) -> Result<DipoleLattice> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or(Error::Format { line: 1, message: "empty lattice file".into() })?;
    let rest = header.strip_prefix("# lattice v1").ok_or_else(|| Error::Format {
        line: 1,
        message: "header must start with '# lattice v1'".into(),
    })?;
    let mut kind = None;
    let mut n_spirals = None;
    let mut n_mt = None;
    for token in rest.split_whitespace() {
        let bad = || Error::Format { line: 1, message: format!("bad header token '{token}'") };
        let (k, v) = token.split_once('=').ok_or_else(bad)?;
        match k {
            "kind" => kind = Some(v.parse::<GeometryKind>().map_err(|_| bad())?),
            "n_spirals" => n_spirals = Some(v.parse::<usize>().map_err(|_| bad())?),
            "n_mt" => n_mt = Some(v.parse::<usize>().map_err(|_| bad())?),
            _ => return Err(bad()),
        }
    }
    let spec = GeometrySpec {
        kind: kind.ok_or(Error::Format { line: 1, message: "missing kind".into() })?,
        n_spirals: n_spirals.ok_or(Error::Format { line: 1, message: "missing n_spirals".into() })?,
        n_mt,
    };
    let dipoles = lines
        .map(|(i, l)| parse_dipole_row(l, i + 1, mu_squared))
        .collect::<Result<Vec<_>>>()?;
    let mts = spec.microtubules();
    let per_mt = if mts > 0 { dipoles.len() / mts } else { 0 };
    Ok(DipoleLattice { dipoles, length_nm: spec.length_nm(), spec, dipoles_per_mt: per_mt })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cell() -> UnitCell {
        UnitCell::bundled_tubulin_dimer()
    }

    #[test]
    fn microtubule_counts_and_length() {
        let mt = build_microtubule(&cell(), 3).unwrap();
        assert_eq!(mt.len(), 312);
        assert_eq!(mt.length_nm, 24.0);
        let mt = build_microtubule(&cell(), 100).unwrap();
        assert_eq!(mt.len(), 10_400);
        assert_eq!(mt.length_nm, 800.0);
    }

    #[test]
    fn zero_spirals_rejected() {
        for spec in [
            GeometrySpec::microtubule(0),
            GeometrySpec::centriole(0),
            GeometrySpec::axoneme(0),
            GeometrySpec::bundle(7, 0),
        ] {
            assert!(matches!(build(&cell(), &spec), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn dimer_copies_share_radius() {
        let mt = build_microtubule(&cell(), 1).unwrap();
        let per = cell().len();
        for i in 0..per {
            let r0 = mt.dipoles[i].position.yz().norm();
            for d in 1..DIMERS_PER_SPIRAL {
                let r = mt.dipoles[d * per + i].position.yz().norm();
                assert_relative_eq!(r, r0, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn spirals_are_translated_copies() {
        let mt = build_microtubule(&cell(), 2).unwrap();
        let per_spiral = 104;
        for i in 0..per_spiral {
            let a = mt.dipoles[i];
            let b = mt.dipoles[i + per_spiral];
            assert_relative_eq!(b.position.x - a.position.x, 80.0, max_relative = 1e-12);
            assert_eq!(a.orientation, b.orientation);
        }
    }

    #[test]
    fn centriole_counts_and_symmetry() {
        assert_eq!(build_centriole(&cell(), 1).unwrap().len(), 2808);
        assert_eq!(GeometrySpec::centriole(40).expected_count(8), 112_320);
        let axes = centriole_axes();
        for k in 0..9 {
            let (y, z) = axes[3 * k + 1];
            assert_relative_eq!((y * y + z * z).sqrt(), 100.0, max_relative = 1e-12);
            let angle = z.atan2(y).to_degrees().rem_euclid(360.0);
            assert!((angle - 40.0 * k as f64).abs() < 1e-9, "{angle}");
        }
    }

    #[test]
    fn axoneme_counts_and_pair_spacing() {
        assert_eq!(build_axoneme(&cell(), 1).unwrap().len(), 2080);
        assert_eq!(GeometrySpec::axoneme(40).expected_count(8), 83_200);
        let axes = axoneme_axes();
        for pair in axes.chunks(2) {
            let d = ((pair[0].0 - pair[1].0).powi(2) + (pair[0].1 - pair[1].1).powi(2)).sqrt();
            assert_relative_eq!(d, 26.0, max_relative = 1e-12);
        }
        for pair in axes[2..].chunks(2) {
            let c = ((pair[0].0 + pair[1].0) / 2.0, (pair[0].1 + pair[1].1) / 2.0);
            assert_relative_eq!((c.0 * c.0 + c.1 * c.1).sqrt(), 98.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn bundle_counts_and_spacing() {
        assert_eq!(build_bundle(&cell(), 91, 1).unwrap().len(), 9464);
        assert_eq!(build_bundle(&cell(), 19, 10).unwrap().len(), 19_760);
        assert!(matches!(build_bundle(&cell(), 8, 1), Err(Error::Domain(_))));
        let axes = bundle_axes(1);
        assert_eq!(axes.len(), 7);
        for &(y, z) in &axes[1..] {
            assert_relative_eq!((y * y + z * z).sqrt(), 50.0, max_relative = 1e-12);
        }
        for n in [7, 19, 37, 61, 91, 127, 169, 217] {
            let r = hexagonal_rings(n).unwrap();
            let axes = bundle_axes(r);
            assert_eq!(axes.len(), n);
            // nearest neighbour spacing is 50 nm and no two axes coincide
            for (i, a) in axes.iter().enumerate() {
                for b in &axes[i + 1..] {
                    let d = ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt();
                    assert!(d > 49.999, "{d}");
                }
            }
        }
    }

    #[test]
    fn orientations_stay_unit() {
        let lat = build_centriole(&cell(), 1).unwrap();
        for d in &lat.dipoles {
            assert!((d.orientation.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn lattice_export_reads_back() {
        let lat = build_bundle(&cell(), 7, 1).unwrap();
        let text = write_lattice_string(&lat);
        assert!(text.starts_with("# lattice v1 kind=bundle n_spirals=1 n_mt=7\n"));
        let back = read_lattice_str(&text, lat.dipoles[0].mu_squared).unwrap();
        assert_eq!(back, lat);
    }
}
