//! Tryptophan extraction from fixed-column structure files and the
//! unit-cell dipole table every geometry builder starts from.
//!
//! A dipole sits on an anchor atom of the indole ring (CD2 by default) and
//! points along the ¹L_a direction, which is taken as the in-plane direction
//! at a fixed angle from the CG→NE1 axis. The angle is measured
//! counterclockwise about the ring normal, where the normal is the best-fit
//! plane normal signed by the right-hand rule over (CG, CD1, NE1).

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{Matrix3, Vector3};

use crate::constants::DEFAULT_MU_SQUARED;
use crate::error::{Error, Result};
use crate::hash::git_style_sha256;

pub type Vec3 = Vector3<f64>;

/// Indole ring atoms in canonical order.
pub const RING_ATOMS: [&str; 9] = ["CG", "CD1", "CD2", "NE1", "CE2", "CE3", "CZ2", "CZ3", "CH2"];

/// Largest RMS distance of ring atoms from their best-fit plane, Å.
pub const MAX_RING_RMS: f64 = 0.1;

/// Default in-plane ¹L_a angle from the CG→NE1 axis, degrees.
pub const DEFAULT_LA_ANGLE_DEG: f64 = -41.0;

/// Tolerance on |orientation| when reading dipole tables.
pub const ORIENTATION_NORM_TOLERANCE: f64 = 1e-9;

const UNITCELL_MAGIC: &str = "# unitcell v1";

#[derive(Debug, Clone, PartialEq)]
pub struct TrpResidue {
    pub residue_id: i32,
    pub chain_id: String,
    /// Positions in Å, indexed like [`RING_ATOMS`].
    pub ring_atoms: [Vec3; 9],
}

impl TrpResidue {
    pub fn atom(&self, name: &str) -> Option<Vec3> {
        RING_ATOMS
            .iter()
            .position(|a| *a == name)
            .map(|i| self.ring_atoms[i])
    }

    /// Best-fit plane through the ring atoms: (centroid, unit normal, RMS
    /// out-of-plane deviation). The normal sign follows the right-hand rule
    /// over (CG, CD1, NE1).
    pub fn ring_plane(&self) -> Result<(Vec3, Vec3, f64)> {
        best_fit_plane(&self.ring_atoms).and_then(|(centroid, normal, rms)| {
            let cg = self.ring_atoms[0];
            let cd1 = self.ring_atoms[1];
            let ne1 = self.ring_atoms[3];
            let rh = (cd1 - cg).cross(&(ne1 - cg));
            if rh.norm() == 0.0 {
                return Err(Error::Geometry(format!(
                    "CG, CD1 and NE1 are collinear in residue {}{}",
                    self.chain_id, self.residue_id
                )));
            }
            let normal = if normal.dot(&rh) < 0.0 { -normal } else { normal };
            Ok((centroid, normal, rms))
        })
    }

    pub fn label(&self) -> String {
        format!("{}{}", self.chain_id, self.residue_id)
    }
}

fn best_fit_plane(points: &[Vec3]) -> Result<(Vec3, Vec3, f64)> {
    let n = points.len() as f64;
    let centroid = points.iter().fold(Vec3::zeros(), |acc, p| acc + p) / n;
    let mut cov = Matrix3::zeros();
    for p in points {
        let d = p - centroid;
        cov += d * d.transpose();
    }
    let eig = cov.symmetric_eigen();
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let (smallest, middle, largest) = (
        eig.eigenvalues[order[0]],
        eig.eigenvalues[order[1]],
        eig.eigenvalues[order[2]],
    );
    if largest <= 0.0 || middle <= 1e-10 * largest {
        return Err(Error::Geometry("ring atoms do not span a plane".into()));
    }
    let normal: Vec3 = eig.eigenvectors.column(order[0]).into_owned().normalize();
    let rms = (smallest.max(0.0) / n).sqrt();
    Ok((centroid, normal, rms))
}

/// Transition dipole of a single emitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dipole {
    /// Å.
    pub position: Vec3,
    /// Unit vector.
    pub orientation: Vec3,
    /// Å³·cm⁻¹.
    pub mu_squared: f64,
}

impl Dipole {
    pub fn new(position: Vec3, orientation: Vec3) -> Self {
        Self {
            position,
            orientation,
            mu_squared: DEFAULT_MU_SQUARED,
        }
    }

    /// Builds a dipole after normalizing `direction`.
    pub fn along(position: Vec3, direction: Vec3) -> Result<Self> {
        let norm = direction.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Geometry("dipole direction has zero length".into()));
        }
        Ok(Self::new(position, direction / norm))
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrpScan {
    pub residues: Vec<TrpResidue>,
    /// One message per skipped residue.
    pub warnings: Vec<String>,
}

struct Columns<'a> {
    line: &'a str,
    lineno: usize,
}

impl<'a> Columns<'a> {
    /// 1-based inclusive column range, as the format documents them.
    fn field(&self, start: usize, end: usize) -> Result<&'a str> {
        self.line.get(start - 1..end).ok_or_else(|| Error::Parse {
            line: self.lineno,
            message: format!("record too short for columns {start}-{end}"),
        })
    }

    fn coord(&self, start: usize, end: usize) -> Result<f64> {
        let raw = self.field(start, end)?.trim();
        raw.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| Error::Parse {
                line: self.lineno,
                message: format!("non-numeric coordinate '{raw}' in columns {start}-{end}"),
            })
    }
}

/// Collects every TRP residue with a complete, planar indole ring from the
/// ATOM records of `text`, in file order. Only the first model is read and
/// the first occurrence of each atom name wins.
pub fn parse_pdb_trp(text: &str, chain_filter: Option<&[&str]>) -> Result<TrpScan> {
    struct Partial {
        chain: String,
        resseq: i32,
        icode: char,
        atoms: [Option<Vec3>; 9],
    }

    let mut partials: Vec<Partial> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.starts_with("ENDMDL") {
            break;
        }
        if !line.starts_with("ATOM  ") {
            continue;
        }
        let cols = Columns { line, lineno };
        let name = cols.field(13, 16)?.trim();
        let resname = cols.field(18, 20)?.trim();
        let chain = cols.field(22, 22)?.trim().to_string();
        let resseq_raw = cols.field(23, 26)?.trim();
        let resseq: i32 = resseq_raw.parse().map_err(|_| Error::Parse {
            line: lineno,
            message: format!("bad residue number '{resseq_raw}'"),
        })?;
        let icode = cols.field(27, 27)?.chars().next().unwrap_or(' ');
        let pos = Vec3::new(cols.coord(31, 38)?, cols.coord(39, 46)?, cols.coord(47, 54)?);

        if resname != "TRP" {
            continue;
        }
        if let Some(filter) = chain_filter {
            if !filter.contains(&chain.as_str()) {
                continue;
            }
        }
        let Some(slot) = RING_ATOMS.iter().position(|a| *a == name) else {
            continue;
        };
        let idx = match partials
            .iter()
            .rposition(|p| p.chain == chain && p.resseq == resseq && p.icode == icode)
        {
            Some(i) => i,
            None => {
                partials.push(Partial { chain, resseq, icode, atoms: [None; 9] });
                partials.len() - 1
            }
        };
        partials[idx].atoms[slot].get_or_insert(pos);
    }

    let mut scan = TrpScan::default();
    for p in partials {
        let label = format!("{}{}", p.chain, p.resseq);
        let missing: Vec<&str> = RING_ATOMS
            .iter()
            .zip(p.atoms.iter())
            .filter(|(_, a)| a.is_none())
            .map(|(n, _)| *n)
            .collect();
        if !missing.is_empty() {
            scan.warnings.push(format!(
                "skipped TRP {label}: missing ring atoms {}",
                missing.join(",")
            ));
            continue;
        }
        let residue = TrpResidue {
            residue_id: p.resseq,
            chain_id: p.chain,
            ring_atoms: p.atoms.map(|a| a.expect("checked above")),
        };
        match residue.ring_plane() {
            Ok((_, _, rms)) if rms <= MAX_RING_RMS => scan.residues.push(residue),
            Ok((_, _, rms)) => scan
                .warnings
                .push(format!("skipped TRP {label}: ring RMS deviation {rms:.3} A from plane")),
            Err(e) => scan.warnings.push(format!("skipped TRP {label}: {e}")),
        }
    }
    if scan.residues.is_empty() {
        return Err(Error::EmptyResult);
    }
    Ok(scan)
}

/// How a dipole is placed on a residue.
#[derive(Debug, Clone, PartialEq)]
pub struct DipoleExtraction {
    pub angle_deg: f64,
    pub anchor: String,
    pub mu_squared: f64,
}

impl Default for DipoleExtraction {
    fn default() -> Self {
        Self {
            angle_deg: DEFAULT_LA_ANGLE_DEG,
            anchor: "CD2".into(),
            mu_squared: DEFAULT_MU_SQUARED,
        }
    }
}

pub fn derive_dipole(residue: &TrpResidue, params: &DipoleExtraction) -> Result<Dipole> {
    let anchor = residue.atom(&params.anchor).ok_or_else(|| Error::MissingAtom {
        atom: params.anchor.clone(),
        chain: residue.chain_id.clone(),
        residue: residue.residue_id,
    })?;
    let (_, normal, _) = residue.ring_plane()?;
    let cg = residue.ring_atoms[0];
    let ne1 = residue.ring_atoms[3];
    let raw_axis = ne1 - cg;
    let axis = raw_axis - normal * normal.dot(&raw_axis);
    let len = axis.norm();
    if len < 1e-12 {
        return Err(Error::Geometry(format!(
            "CG->NE1 axis of {} is normal to the ring plane",
            residue.label()
        )));
    }
    let axis = axis / len;
    let theta = params.angle_deg.to_radians();
    let orientation = axis * theta.cos() + normal.cross(&axis) * theta.sin();
    Ok(Dipole {
        position: anchor,
        orientation: orientation.normalize(),
        mu_squared: params.mu_squared,
    })
}

/// Provenance of a unit cell. All fields optional so hand-written tables
/// remain valid.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CellSource {
    pub content_sha256: Option<String>,
    pub angle_deg: Option<f64>,
    pub anchor: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitCell {
    pub dipoles: Vec<Dipole>,
    pub label: String,
    pub source: CellSource,
    /// Index of the dipole whose anchor is the pivot of the per-dimer
    /// rotation in the microtubule protocol (β-Trp346 for tubulin).
    pub pivot: Option<usize>,
}

/// β-tubulin Trp346 in 1JFF chain naming.
pub const TUBULIN_PIVOT_RESIDUE: (&str, i32) = ("B", 346);

const BUNDLED_TUBULIN: &str = include_str!("../fixtures/tubulin_dimer.unitcell");
const BUNDLED_TUBULIN_PDB: &str = include_str!("../fixtures/tubulin_dimer_synthetic.pdb");

impl UnitCell {
    /// The shipped 8-dipole tubulin-dimer cell (synthetic stand-in geometry,
    /// see the crate README).
    pub fn bundled_tubulin_dimer() -> Self {
        read_unit_cell_str(BUNDLED_TUBULIN).expect("bundled unit cell is valid")
    }

    /// Structure file the bundled cell was extracted from.
    pub fn bundled_tubulin_pdb() -> &'static str {
        BUNDLED_TUBULIN_PDB
    }

    /// Extracts one dipole per complete TRP residue. The pivot is set when
    /// a residue matches [`TUBULIN_PIVOT_RESIDUE`].
    pub fn from_structure(
        text: &str,
        chain_filter: Option<&[&str]>,
        params: &DipoleExtraction,
        label: impl Into<String>,
    ) -> Result<(Self, Vec<String>)> {
        let scan = parse_pdb_trp(text, chain_filter)?;
        let dipoles = scan
            .residues
            .iter()
            .map(|r| derive_dipole(r, params))
            .collect::<Result<Vec<_>>>()?;
        let pivot = scan.residues.iter().position(|r| {
            r.chain_id == TUBULIN_PIVOT_RESIDUE.0 && r.residue_id == TUBULIN_PIVOT_RESIDUE.1
        });
        let cell = UnitCell {
            dipoles,
            label: label.into(),
            source: CellSource {
                content_sha256: Some(git_style_sha256(text.as_bytes())),
                angle_deg: Some(params.angle_deg),
                anchor: Some(params.anchor.clone()),
            },
            pivot,
        };
        Ok((cell, scan.warnings))
    }

    pub fn len(&self) -> usize {
        self.dipoles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dipoles.is_empty()
    }

    pub fn content_hash(&self) -> String {
        git_style_sha256(write_unit_cell_string(self).as_bytes())
    }
}

/// Serializes a cell. Fails when dipoles carry different μ² values, which
/// the single-header format cannot represent.
pub fn try_write_unit_cell_string(cell: &UnitCell) -> Result<String> {
    let mu2 = cell.dipoles.first().map_or(DEFAULT_MU_SQUARED, |d| d.mu_squared);
    if cell.dipoles.iter().any(|d| d.mu_squared != mu2) {
        return Err(Error::Domain("unit cell dipoles have differing mu^2".into()));
    }
    let mut out = format!("{UNITCELL_MAGIC} mu2={mu2}\n");
    if !cell.label.is_empty() {
        let _ = writeln!(out, "# label {}", cell.label);
    }
    let src = &cell.source;
    if src != &CellSource::default() {
        out.push_str("# source");
        if let Some(h) = &src.content_sha256 {
            let _ = write!(out, " sha256={h}");
        }
        if let Some(a) = src.angle_deg {
            let _ = write!(out, " angle_deg={a}");
        }
        if let Some(a) = &src.anchor {
            let _ = write!(out, " anchor={a}");
        }
        out.push('\n');
    }
    if let Some(p) = cell.pivot {
        let _ = writeln!(out, "# pivot {p}");
    }
    write_dipole_rows(&mut out, &cell.dipoles);
    Ok(out)
}

pub fn write_unit_cell_string(cell: &UnitCell) -> String {
    try_write_unit_cell_string(cell).expect("uniform mu^2")
}

pub(crate) fn write_dipole_rows(out: &mut String, dipoles: &[Dipole]) {
    for d in dipoles {
        let p = d.position;
        let u = d.orientation;
        let _ = writeln!(out, "{} {} {} {} {} {}", p.x, p.y, p.z, u.x, u.y, u.z);
    }
}

pub fn write_unit_cell(cell: &UnitCell, path: impl AsRef<Path>) -> Result<()> {
    let text = try_write_unit_cell_string(cell)?;
    crate::io::write_atomic(path.as_ref(), text.as_bytes())
}

pub fn read_unit_cell(path: impl AsRef<Path>) -> Result<UnitCell> {
    let text = std::fs::read_to_string(path)?;
    read_unit_cell_str(&text)
}

pub(crate) fn parse_dipole_row(line: &str, lineno: usize, mu_squared: f64) -> Result<Dipole> {
    let values: Vec<f64> = line
        .split_whitespace()
        .map(|t| {
            t.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| Error::Format {
                line: lineno,
                message: format!("not a finite number: '{t}'"),
            })
        })
        .collect::<Result<_>>()?;
    if values.len() != 6 {
        return Err(Error::Format {
            line: lineno,
            message: format!("expected 6 columns, found {}", values.len()),
        });
    }
    let orientation = Vec3::new(values[3], values[4], values[5]);
    let norm = orientation.norm();
    if (norm - 1.0).abs() > ORIENTATION_NORM_TOLERANCE {
        return Err(Error::Format {
            line: lineno,
            message: format!("orientation norm {norm} is not 1"),
        });
    }
    Ok(Dipole {
        position: Vec3::new(values[0], values[1], values[2]),
        orientation,
        mu_squared,
    })
}

pub fn read_unit_cell_str(text: &str) -> Result<UnitCell> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or(Error::Format {
        line: 1,
        message: "empty unit-cell file".into(),
    })?;
    let rest = header.strip_prefix(UNITCELL_MAGIC).ok_or_else(|| Error::Format {
        line: 1,
        message: format!("header must start with '{UNITCELL_MAGIC}'"),
    })?;
    let mu2_raw = rest.trim().strip_prefix("mu2=").ok_or_else(|| Error::Format {
        line: 1,
        message: "header lacks mu2=<value>".into(),
    })?;
    let mu_squared: f64 = mu2_raw
        .trim()
        .parse()
        .ok()
        .filter(|v: &f64| v.is_finite() && *v > 0.0)
        .ok_or_else(|| Error::Format {
            line: 1,
            message: format!("invalid mu2 '{mu2_raw}'"),
        })?;

    let mut cell = UnitCell {
        dipoles: Vec::new(),
        label: String::new(),
        source: CellSource::default(),
        pivot: None,
    };
    for (idx, line) in lines {
        let lineno = idx + 1;
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(label) = comment.strip_prefix("label ") {
                cell.label = label.to_string();
            } else if let Some(src) = comment.strip_prefix("source") {
                cell.source = parse_source(src, lineno)?;
            } else if let Some(p) = comment.strip_prefix("pivot ") {
                cell.pivot = Some(p.trim().parse().map_err(|_| Error::Format {
                    line: lineno,
                    message: format!("bad pivot index '{p}'"),
                })?);
            }
            continue;
        }
        cell.dipoles.push(parse_dipole_row(line, lineno, mu_squared)?);
    }
    if let Some(p) = cell.pivot {
        if p >= cell.dipoles.len() {
            return Err(Error::Format {
                line: 1,
                message: format!("pivot index {p} out of range"),
            });
        }
    }
    Ok(cell)
}

fn parse_source(text: &str, lineno: usize) -> Result<CellSource> {
    let mut src = CellSource::default();
    for token in text.split_whitespace() {
        let (key, value) = token.split_once('=').ok_or_else(|| Error::Format {
            line: lineno,
            message: format!("malformed source token '{token}'"),
        })?;
        match key {
            "sha256" => src.content_sha256 = Some(value.to_string()),
            "angle_deg" => {
                src.angle_deg = Some(value.parse().map_err(|_| Error::Format {
                    line: lineno,
                    message: format!("bad angle '{value}'"),
                })?)
            }
            "anchor" => src.anchor = Some(value.to_string()),
            _ => {}
        }
    }
    Ok(src)
}
