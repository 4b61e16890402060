//! Python bindings: unit cells, lattices, spectra and the observables built on them.

use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use trpnet::geometry::{self, GeometrySpec};
use trpnet::observables::{self, FitKind};
use trpnet::unitcell::{self, DipoleExtraction, Vec3};
use trpnet::{Dipole, DisorderConfig, Error, PhysicalConstants};

type Triple = (f64, f64, f64);

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io(_) => PyIOError::new_err(e.to_string()),
        Error::NonConvergence { .. } | Error::QuasiDegenerate { .. } | Error::Numerical(_) => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn vec3(t: Triple) -> Vec3 {
    Vec3::new(t.0, t.1, t.2)
}

fn triple(v: &Vec3) -> Triple {
    (v.x, v.y, v.z)
}

fn constants(gamma_nr: Option<f64>) -> PhysicalConstants {
    let mut c = PhysicalConstants::default();
    if let Some(g) = gamma_nr {
        c.gamma_nr = g;
    }
    c
}

/// Dipoles of one structural repeat (8 tryptophans for a tubulin dimer).
#[pyclass(name = "UnitCell", module = "pytrpnet", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyUnitCell(unitcell::UnitCell);

#[pymethods]
impl PyUnitCell {
    /// The shipped tubulin-dimer cell.
    #[staticmethod]
    fn bundled() -> Self {
        Self(unitcell::UnitCell::bundled_tubulin_dimer())
    }

    #[staticmethod]
    fn read(path: &str) -> PyResult<Self> {
        unitcell::read_unit_cell(path).map(Self).map_err(py_err)
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        unitcell::read_unit_cell_str(text).map(Self).map_err(py_err)
    }

    /// Extracts one dipole per complete TRP residue of a PDB text.
    #[staticmethod]
    #[pyo3(signature = (text, chains=None, angle_deg=unitcell::DEFAULT_LA_ANGLE_DEG, anchor="CD2", label="tubulin dimer"))]
    fn from_pdb(text: &str, chains: Option<Vec<String>>, angle_deg: f64, anchor: &str, label: &str) -> PyResult<Self> {
        let params = DipoleExtraction { angle_deg, anchor: anchor.to_string(), ..Default::default() };
        let chain_refs: Option<Vec<&str>> = chains.as_ref().map(|c| c.iter().map(String::as_str).collect());
        let (cell, _warnings) =
            unitcell::UnitCell::from_structure(text, chain_refs.as_deref(), &params, label).map_err(py_err)?;
        Ok(Self(cell))
    }

    fn to_text(&self) -> PyResult<String> {
        unitcell::try_write_unit_cell_string(&self.0).map_err(py_err)
    }

    fn positions(&self) -> Vec<Triple> {
        self.0.dipoles.iter().map(|d| triple(&d.position)).collect()
    }

    fn orientations(&self) -> Vec<Triple> {
        self.0.dipoles.iter().map(|d| triple(&d.orientation)).collect()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!("UnitCell('{}', {} dipoles)", self.0.label, self.0.len())
    }
}

/// An ordered dipole network.
#[pyclass(name = "Lattice", module = "pytrpnet", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyLattice(geometry::DipoleLattice);

#[pymethods]
impl PyLattice {
    /// `kind` is one of mt, centriole, axoneme, bundle.
    #[new]
    #[pyo3(signature = (kind="mt", spirals=1, n_mt=None, cell=None))]
    fn new(kind: &str, spirals: usize, n_mt: Option<usize>, cell: Option<PyRef<'_, PyUnitCell>>) -> PyResult<Self> {
        let kind = kind.parse().map_err(py_err)?;
        let spec = GeometrySpec { kind, n_spirals: spirals, n_mt };
        let cell = cell.map_or_else(unitcell::UnitCell::bundled_tubulin_dimer, |c| c.0.clone());
        geometry::build(&cell, &spec).map(Self).map_err(py_err)
    }

    /// Hand-assembled lattice from positions (Å) and orientations.
    #[staticmethod]
    fn custom(positions: Vec<Triple>, orientations: Vec<Triple>) -> PyResult<Self> {
        if positions.len() != orientations.len() {
            return Err(PyValueError::new_err("positions and orientations differ in length"));
        }
        let dipoles = positions
            .into_iter()
            .zip(orientations)
            .map(|(p, u)| Dipole::along(vec3(p), vec3(u)))
            .collect::<trpnet::Result<Vec<_>>>()
            .map_err(py_err)?;
        Ok(Self(geometry::DipoleLattice::custom(dipoles)))
    }

    fn prefix(&self, n: usize) -> Self {
        Self(self.0.prefix(n))
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.0.spec.kind.as_str()
    }

    #[getter]
    fn length_nm(&self) -> f64 {
        self.0.length_nm
    }

    fn positions(&self) -> Vec<Triple> {
        self.0.dipoles.iter().map(|d| triple(&d.position)).collect()
    }

    fn orientations(&self) -> Vec<Triple> {
        self.0.dipoles.iter().map(|d| triple(&d.orientation)).collect()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!("Lattice(kind='{}', n={})", self.0.spec.kind, self.0.len())
    }
}

/// Complex resonances E_j − iΓ_j/2 of one network.
#[pyclass(name = "Spectrum", module = "pytrpnet", frozen, skip_from_py_object)]
struct PySpectrum(trpnet::ResonanceSpectrum);

#[pymethods]
impl PySpectrum {
    /// cm⁻¹, ascending.
    #[getter]
    fn energies(&self) -> Vec<f64> {
        self.0.energies.clone()
    }

    /// cm⁻¹.
    #[getter]
    fn widths(&self) -> Vec<f64> {
        self.0.widths.clone()
    }

    fn width_ratios(&self) -> Vec<f64> {
        self.0.width_ratios()
    }

    fn metrics<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let m = trpnet::enhancement_metrics(&self.0).map_err(py_err)?;
        let d = PyDict::new(py);
        d.set_item("n", m.n)?;
        d.set_item("max_ratio", m.max_ratio)?;
        d.set_item("max_per_n", m.max_per_n)?;
        d.set_item("min_ratio", m.min_ratio)?;
        d.set_item("tau_super_s", m.tau_super_s)?;
        d.set_item("tau_sub_s", m.tau_sub_s)?;
        d.set_item("e_offset_of_max", m.e_offset_of_max)?;
        d.set_item("sum_rule_energy", self.0.sum_rules.energy)?;
        d.set_item("sum_rule_width", self.0.sum_rules.width)?;
        Ok(d)
    }

    /// Thermal fluorescence quantum yield.
    #[pyo3(signature = (temperature_k=observables::DEFAULT_TEMPERATURE_K, gamma_nr=None))]
    fn thermal_qy(&self, temperature_k: f64, gamma_nr: Option<f64>) -> PyResult<f64> {
        let gnr = gamma_nr.unwrap_or(self.0.constants.gamma_nr);
        observables::thermal_qy(&self.0, temperature_k, gnr).map(|r| r.qy).map_err(py_err)
    }

    /// Peak-normalized absorption on `grid` (cm⁻¹).
    #[pyo3(signature = (grid, sigma, lineshape="lorentzian"))]
    fn absorption(&self, grid: Vec<f64>, sigma: f64, lineshape: &str) -> PyResult<Vec<f64>> {
        let shape = lineshape.parse().map_err(py_err)?;
        observables::absorption_curve(&self.0, sigma, shape, &grid).map(|c| c.values).map_err(py_err)
    }

    /// Peak-normalized thermal fluorescence on `grid` (cm⁻¹).
    #[pyo3(signature = (grid, sigma, lineshape="lorentzian", temperature_k=observables::DEFAULT_TEMPERATURE_K))]
    fn fluorescence(&self, grid: Vec<f64>, sigma: f64, lineshape: &str, temperature_k: f64) -> PyResult<Vec<f64>> {
        let shape = lineshape.parse().map_err(py_err)?;
        observables::fluorescence_curve(&self.0, sigma, shape, temperature_k, &grid)
            .map(|c| c.values)
            .map_err(py_err)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }
}

/// Assembles and diagonalizes the effective Hamiltonian of `lattice`.
#[pyfunction]
#[pyo3(signature = (lattice, disorder_w=None, seed=0, realization=0, gamma_nr=None))]
fn diagonalize(
    py: Python<'_>,
    lattice: PyRef<'_, PyLattice>,
    disorder_w: Option<f64>,
    seed: u64,
    realization: u64,
    gamma_nr: Option<f64>,
) -> PyResult<PySpectrum> {
    let c = constants(gamma_nr);
    let disorder = disorder_w.map(|w| DisorderConfig::new(w, seed, realization)).transpose().map_err(py_err)?;
    let lat = lattice.0.clone();
    py.detach(move || {
        let h = trpnet::assemble(&lat, &c, disorder.as_ref())?;
        trpnet::diagonalize(&h, false)
    })
    .map(PySpectrum)
    .map_err(py_err)
}

/// (Ω, Υ) in cm⁻¹ between two dipoles.
#[pyfunction]
fn coupling(p1: Triple, u1: Triple, p2: Triple, u2: Triple) -> PyResult<(f64, f64)> {
    let a = Dipole::along(vec3(p1), vec3(u1)).map_err(py_err)?;
    let b = Dipole::along(vec3(p2), vec3(u2)).map_err(py_err)?;
    let k = trpnet::hamiltonian::coupling(&a, &b, &PhysicalConstants::default()).map_err(py_err)?;
    Ok((k.omega, k.upsilon))
}

/// Quantum yield and enhancement statistics over disorder realizations.
#[pyfunction]
#[pyo3(signature = (lattice, widths, realizations=observables::DEFAULT_REALIZATIONS, seed=0,
                    temperature_k=observables::DEFAULT_TEMPERATURE_K, gamma_nr=None))]
fn disorder_sweep<'py>(
    py: Python<'py>,
    lattice: PyRef<'_, PyLattice>,
    widths: Vec<f64>,
    realizations: usize,
    seed: u64,
    temperature_k: f64,
    gamma_nr: Option<f64>,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let c = constants(gamma_nr);
    let lat = lattice.0.clone();
    let stats = py
        .detach(move || observables::disorder_sweep(&lat, &c, &widths, realizations, seed, temperature_k, c.gamma_nr))
        .map_err(py_err)?;
    stats
        .iter()
        .map(|s| {
            let d = PyDict::new(py);
            d.set_item("w", s.w)?;
            d.set_item("n_realizations", s.n_realizations)?;
            d.set_item("mean_qy", s.mean_qy)?;
            d.set_item("std_qy", s.std_qy)?;
            d.set_item("mean_max_ratio", s.mean_max_ratio)?;
            d.set_item("std_max_ratio", s.std_max_ratio)?;
            d.set_item("qy_of_mean_gamma", s.qy_of_mean_gamma)?;
            Ok(d)
        })
        .collect()
}

/// Trial superradiant width Γ̃/γ of a centriole lattice.
#[pyfunction]
#[pyo3(signature = (lattice, segment_spirals=observables::DEFAULT_SEGMENT_SPIRALS))]
fn approx_centriole(py: Python<'_>, lattice: PyRef<'_, PyLattice>, segment_spirals: usize) -> PyResult<f64> {
    let lat = lattice.0.clone();
    py.detach(move || observables::approx_centriole_state(&lat, &PhysicalConstants::default(), segment_spirals))
        .map(|s| s.gamma_ratio)
        .map_err(py_err)
}

/// Closed-form max Γ/γ at `length_nm`; returns (value, inside_fitted_range).
#[pyfunction]
#[pyo3(signature = (curve, length_nm, n_mt=None))]
fn fit_curve(curve: &str, length_nm: f64, n_mt: Option<usize>) -> PyResult<(f64, bool)> {
    let kind: FitKind = curve.parse().map_err(py_err)?;
    observables::fit_curve(kind, length_nm, n_mt).map(|v| (v.value, v.valid)).map_err(py_err)
}

#[pyfunction]
fn reference_qy(f_s: f64, f_r: f64, a_s: f64, a_r: f64, n_s: f64, n_r: f64, qy_r: f64) -> PyResult<f64> {
    observables::reference_qy(f_s, f_r, a_s, a_r, n_s, n_r, qy_r).map_err(py_err)
}

#[pymodule]
fn pytrpnet(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyUnitCell>()?;
    m.add_class::<PyLattice>()?;
    m.add_class::<PySpectrum>()?;
    m.add_function(wrap_pyfunction!(diagonalize, m)?)?;
    m.add_function(wrap_pyfunction!(coupling, m)?)?;
    m.add_function(wrap_pyfunction!(disorder_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(approx_centriole, m)?)?;
    m.add_function(wrap_pyfunction!(fit_curve, m)?)?;
    m.add_function(wrap_pyfunction!(reference_qy, m)?)?;
    let c = PhysicalConstants::default();
    m.add("E0", c.e0)?;
    m.add("GAMMA", c.gamma)?;
    m.add("K0", c.k0)?;
    m.add("GAMMA_NR", c.gamma_nr)?;
    Ok(())
}
