use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use log::{info, warn};
use serde_json::json;
use trpnet::geometry::{self, GeometryKind, GeometrySpec};
use trpnet::hamiltonian::{capacity_limit, write_heff1_file};
use trpnet::hash::git_style_sha256;
use trpnet::observables::{self, linear_grid};
use trpnet::spectrum::write_spectrum_csv;
use trpnet::unitcell::{self, DipoleExtraction};
use trpnet::{assemble, diagonalize, enhancement_metrics, DisorderConfig, Error, PhysicalConstants, UnitCell};

use crate::args::*;
use crate::manifest::{DisorderRecord, RunManifest};

/// `<prefix>.<suffix>`, keeping any directory part of the prefix.
fn output_path(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix.as_os_str().to_owned();
    name.push(".");
    name.push(suffix);
    PathBuf::from(name)
}

fn write_output(manifest: &mut RunManifest, path: PathBuf, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    trpnet::io::write_atomic(&path, bytes)?;
    info!("wrote {}", path.display());
    manifest.outputs.push(path.display().to_string());
    Ok(())
}

fn finish(mut manifest: RunManifest, prefix: &Path) -> Result<()> {
    let path = output_path(prefix, "manifest.json");
    manifest.outputs.push(path.display().to_string());
    manifest.write(&path)?;
    info!("wrote {}", path.display());
    Ok(())
}

fn constants(physics: Option<&PhysicsArgs>) -> PhysicalConstants {
    let mut c = PhysicalConstants::default();
    if let Some(p) = physics {
        c.gamma_nr = p.gamma_nr;
    }
    c
}

/// Loads the unit cell and records its hash in the manifest.
fn load_cell(path: Option<&Path>, manifest: &mut RunManifest) -> Result<UnitCell> {
    let cell = match path {
        Some(p) => {
            let bytes = std::fs::read(p).map_err(Error::from).with_context(|| format!("reading {}", p.display()))?;
            manifest.input_hashes.insert("unit_cell".into(), git_style_sha256(&bytes));
            let text = String::from_utf8_lossy(&bytes);
            unitcell::read_unit_cell_str(&text).with_context(|| format!("parsing {}", p.display()))?
        }
        None => {
            let cell = UnitCell::bundled_tubulin_dimer();
            manifest.input_hashes.insert("unit_cell".into(), cell.content_hash());
            cell
        }
    };
    manifest.constants.mu_squared = cell.dipoles.first().map_or(manifest.constants.mu_squared, |d| d.mu_squared);
    Ok(cell)
}

fn geometry_spec(geo: &GeometryArgs, spirals: usize) -> GeometrySpec {
    GeometrySpec { kind: geo.kind, n_spirals: spirals, n_mt: geo.n_mt }
}

/// Builds the lattice, refusing early when it would exceed the capacity cap.
fn build_lattice(
    cell: &UnitCell,
    spec: &GeometrySpec,
    manifest: &mut RunManifest,
) -> Result<geometry::DipoleLattice> {
    let n = spec.expected_count(cell.len());
    let limit = capacity_limit();
    if n > limit {
        return Err(Error::Capacity { requested: n, limit }.into());
    }
    let t = Instant::now();
    let lattice = geometry::build(cell, spec)?;
    manifest.timings_s.insert("build".into(), t.elapsed().as_secs_f64());
    manifest.geometry = Some(*spec);
    manifest.n_dipoles = Some(lattice.len());
    info!("built {} lattice: {} dipoles, {} nm", spec.kind, lattice.len(), lattice.length_nm);
    Ok(lattice)
}

pub fn execute(cmd: Command) -> Result<()> {
    match cmd.clone() {
        Command::Extract(a) => extract(cmd, a),
        Command::Lattice(a) => lattice(cmd, a),
        Command::Spectrum(a) => spectrum(cmd, a),
        Command::Sweep(a) => sweep(cmd, a),
        Command::Disorder(a) => disorder(cmd, a),
        Command::Lineshape(a) => lineshape(cmd, a),
        Command::Fit(a) => fit(cmd, a),
        Command::ApproxCentriole(a) => approx(cmd, a),
        Command::Replay(a) => replay(a),
    }
}

fn extract(cmd: Command, a: ExtractArgs) -> Result<()> {
    let mut manifest = RunManifest::new(cmd, PhysicalConstants::default());
    let bytes = std::fs::read(&a.pdb).map_err(Error::from).with_context(|| format!("reading {}", a.pdb.display()))?;
    manifest.input_hashes.insert("structure".into(), git_style_sha256(&bytes));
    let text = String::from_utf8_lossy(&bytes);
    let params = DipoleExtraction { angle_deg: a.angle_deg, anchor: a.anchor.clone(), ..Default::default() };
    let chains: Vec<&str> = a.chains.iter().map(String::as_str).collect();
    let filter = (!chains.is_empty()).then_some(chains.as_slice());
    let (cell, warnings) = UnitCell::from_structure(&text, filter, &params, a.label.clone())?;
    for w in &warnings {
        warn!("{w}");
    }
    println!("extracted {} tryptophan dipoles ({} warnings)", cell.len(), warnings.len());
    let body = unitcell::try_write_unit_cell_string(&cell)?;
    write_output(&mut manifest, a.out.clone(), body.as_bytes())?;
    finish(manifest, &a.out)
}

fn lattice(cmd: Command, a: LatticeArgs) -> Result<()> {
    let mut manifest = RunManifest::new(cmd, PhysicalConstants::default());
    let cell = load_cell(a.geometry.unit_cell.as_deref(), &mut manifest)?;
    let lat = build_lattice(&cell, &geometry_spec(&a.geometry, a.spirals), &mut manifest)?;
    let body = geometry::write_lattice_string(&lat);
    write_output(&mut manifest, output_path(&a.out, "lattice.txt"), body.as_bytes())?;
    finish(manifest, &a.out)
}

fn spectrum(cmd: Command, a: SpectrumArgs) -> Result<()> {
    let mut manifest = RunManifest::new(cmd, constants(Some(&a.physics)));
    let cell = load_cell(a.geometry.unit_cell.as_deref(), &mut manifest)?;
    let c = manifest.constants;
    let lat = build_lattice(&cell, &geometry_spec(&a.geometry, a.spirals), &mut manifest)?;
    let disorder = a.disorder_w.map(|w| DisorderConfig::new(w, a.seed, a.realization)).transpose()?;
    if let Some(d) = &disorder {
        manifest.disorder = Some(DisorderRecord { widths: vec![d.width], seed: d.seed, realizations: vec![d.realization] });
    }

    let t = Instant::now();
    let h = assemble(&lat, &c, disorder.as_ref())?;
    manifest.timings_s.insert("assemble".into(), t.elapsed().as_secs_f64());
    info!("assembled {n}x{n} Hamiltonian", n = h.dim());
    if a.dump_heff {
        let path = output_path(&a.out, "heff1");
        write_heff1_file(&h.matrix, &path)?;
        manifest.outputs.push(path.display().to_string());
    }
    if a.zero_diagonal_dump {
        let path = output_path(&a.out, "zero-diagonal.heff1");
        write_heff1_file(&h.zero_diagonal_view(), &path)?;
        manifest.outputs.push(path.display().to_string());
    }

    let t = Instant::now();
    let s = diagonalize(&h, false)?;
    drop(h);
    manifest.timings_s.insert("diagonalize".into(), t.elapsed().as_secs_f64());
    let metrics = enhancement_metrics(&s)?;
    let thermal = observables::thermal_qy(&s, a.physics.temp_k, c.gamma_nr)?;
    info!(
        "max Gamma/gamma = {:.4}, max/N = {:.4}, tau_super = {:.4e} s, QY = {:.5}",
        metrics.max_ratio, metrics.max_per_n, metrics.tau_super_s, thermal.qy
    );

    write_spectrum_csv(&s, output_path(&a.out, "spectrum.csv"))?;
    manifest.outputs.push(output_path(&a.out, "spectrum.csv").display().to_string());
    let report = json!({
        "kind": lat.spec.kind,
        "n_spirals": lat.spec.n_spirals,
        "n_dipoles": lat.len(),
        "length_nm": lat.length_nm,
        "max_ratio": metrics.max_ratio,
        "max_per_N": metrics.max_per_n,
        "min_ratio": metrics.min_ratio,
        "tau_super_s": metrics.tau_super_s,
        "tau_sub_s": metrics.tau_sub_s,
        "E_offset_of_max_cm1": metrics.e_offset_of_max,
        "thermal": thermal,
        "sum_rules": s.sum_rules,
        "nonpositive_widths": s.nonpositive_widths().len(),
    });
    write_output(&mut manifest, output_path(&a.out, "metrics.json"), serde_json::to_string_pretty(&report)?.as_bytes())?;
    finish(manifest, &a.out)
}

fn sweep(cmd: Command, a: SweepArgs) -> Result<()> {
    let mut manifest = RunManifest::new(cmd, constants(Some(&a.physics)));
    let cell = load_cell(a.geometry.unit_cell.as_deref(), &mut manifest)?;
    let c = manifest.constants;
    let spirals = crate::args::parse_spiral_list(&a.spirals).map_err(Error::Domain)?;
    if spirals.is_empty() && a.n_trp.is_empty() {
        return Err(Error::Domain("nothing to sweep: give --spirals and/or --n-trp".into()).into());
    }
    let mut points = Vec::new();
    if !a.n_trp.is_empty() {
        let first = build_lattice(&cell, &geometry_spec(&a.geometry, 1), &mut manifest)?;
        for &n in &a.n_trp {
            if n == 0 || n > first.len() {
                return Err(Error::Domain(format!("--n-trp {n} outside 1..={}", first.len())).into());
            }
            let p = observables::sweep_point(&first.prefix(n), &c, None, a.physics.temp_k, c.gamma_nr)?;
            info!("N = {n}: QY = {:.6}", p.qy);
            points.push(p);
        }
    }
    let t = Instant::now();
    for &s in &spirals {
        let lat = build_lattice(&cell, &geometry_spec(&a.geometry, s), &mut manifest)?;
        let p = observables::sweep_point(&lat, &c, None, a.physics.temp_k, c.gamma_nr)?;
        info!("{s} spirals (N = {}): QY = {:.6}, max Gamma/gamma = {:.3}", p.n_trp, p.qy, p.max_ratio);
        points.push(p);
    }
    manifest.timings_s.insert("sweep".into(), t.elapsed().as_secs_f64());
    manifest.geometry = None;
    manifest.n_dipoles = None;
    write_output(&mut manifest, output_path(&a.out, "sweep.csv"), observables::sweep_csv(&points).as_bytes())?;
    finish(manifest, &a.out)
}

fn disorder(cmd: Command, a: DisorderArgs) -> Result<()> {
    let mut manifest = RunManifest::new(cmd, constants(Some(&a.physics)));
    let cell = load_cell(a.geometry.unit_cell.as_deref(), &mut manifest)?;
    let c = manifest.constants;
    let lat = build_lattice(&cell, &geometry_spec(&a.geometry, a.spirals), &mut manifest)?;
    manifest.disorder = Some(DisorderRecord {
        widths: a.disorder_w.clone(),
        seed: a.seed,
        realizations: (0..a.realizations as u64).collect(),
    });
    let t = Instant::now();
    let stats = observables::disorder_sweep(&lat, &c, &a.disorder_w, a.realizations, a.seed, a.physics.temp_k, c.gamma_nr)?;
    manifest.timings_s.insert("disorder".into(), t.elapsed().as_secs_f64());
    for s in &stats {
        info!("W = {}: QY = {:.6} +/- {:.2e}, max Gamma/gamma = {:.3}", s.w, s.mean_qy, s.std_qy, s.mean_max_ratio);
    }
    write_output(&mut manifest, output_path(&a.out, "disorder.csv"), observables::disorder_csv(&stats).as_bytes())?;
    write_output(
        &mut manifest,
        output_path(&a.out, "disorder.json"),
        serde_json::to_string_pretty(&stats)?.as_bytes(),
    )?;
    finish(manifest, &a.out)
}

fn lineshape(cmd: Command, a: LineshapeArgs) -> Result<()> {
    let mut manifest = RunManifest::new(cmd, constants(Some(&a.physics)));
    let cell = load_cell(a.geometry.unit_cell.as_deref(), &mut manifest)?;
    let c = manifest.constants;
    let lat = build_lattice(&cell, &geometry_spec(&a.geometry, a.spirals), &mut manifest)?;
    let s = diagonalize(&assemble(&lat, &c, None)?, false)?;
    let grid = linear_grid(c.e0 + a.grid_from, c.e0 + a.grid_to, a.grid_points);
    let abs = observables::absorption_curve(&s, a.sigma, a.lineshape, &grid)?;
    let flu = observables::fluorescence_curve(&s, a.sigma, a.lineshape, a.physics.temp_k, &grid)?;
    write_output(&mut manifest, output_path(&a.out, "absorption.csv"), abs.to_csv().as_bytes())?;
    write_output(&mut manifest, output_path(&a.out, "fluorescence.csv"), flu.to_csv().as_bytes())?;
    finish(manifest, &a.out)
}

fn fit(cmd: Command, a: FitArgs) -> Result<()> {
    let mut manifest = RunManifest::new(cmd, PhysicalConstants::default());
    let mut csv = String::from("x,value\n");
    for &ell in &a.length_nm {
        let v = observables::fit_curve(a.curve, ell, a.n_mt)?;
        if !v.valid {
            warn!("length {ell} nm is below the fitted range; value {} is indicative only", v.value);
        }
        csv.push_str(&format!("{ell},{}\n", v.value));
    }
    print!("{csv}");
    write_output(&mut manifest, output_path(&a.out, "fit.csv"), csv.as_bytes())?;
    finish(manifest, &a.out)
}

fn approx(cmd: Command, a: ApproxArgs) -> Result<()> {
    let mut manifest = RunManifest::new(cmd, PhysicalConstants::default());
    let cell = load_cell(a.unit_cell.as_deref(), &mut manifest)?;
    let c = manifest.constants;
    let spec = GeometrySpec::centriole(a.spirals);
    let t = Instant::now();
    let lat = geometry::build(&cell, &spec)?;
    manifest.geometry = Some(spec);
    manifest.n_dipoles = Some(lat.len());
    let state = observables::approx_centriole_state(&lat, &c, a.segment_spirals)?;
    manifest.timings_s.insert("approx".into(), t.elapsed().as_secs_f64());
    info!("approximate state: Gamma/gamma = {:.3}", state.gamma_ratio);
    let mut report = json!({ "approx": state });
    if a.compare {
        build_lattice(&cell, &spec, &mut manifest)?;
        let t = Instant::now();
        let s = diagonalize(&assemble(&lat, &c, None)?, false)?;
        manifest.timings_s.insert("diagonalize".into(), t.elapsed().as_secs_f64());
        let m = enhancement_metrics(&s)?;
        info!("full diagonalization: max Gamma/gamma = {:.3}", m.max_ratio);
        report["exact"] = json!(m);
        report["ratio_approx_over_exact"] = json!(state.gamma_ratio / m.max_ratio);
    }
    write_output(&mut manifest, output_path(&a.out, "approx.json"), serde_json::to_string_pretty(&report)?.as_bytes())?;
    finish(manifest, &a.out)
}

fn replay(a: ReplayArgs) -> Result<()> {
    let manifest = RunManifest::read(&a.manifest)?;
    let mut cmd = manifest.config;
    if let Some(out) = a.out {
        match &mut cmd {
            Command::Extract(x) => x.out = out,
            Command::Lattice(x) => x.out = out,
            Command::Spectrum(x) => x.out = out,
            Command::Sweep(x) => x.out = out,
            Command::Disorder(x) => x.out = out,
            Command::Lineshape(x) => x.out = out,
            Command::Fit(x) => x.out = out,
            Command::ApproxCentriole(x) => x.out = out,
            Command::Replay(_) => {}
        }
    }
    if matches!(cmd, Command::Replay(_)) {
        return Err(Error::Domain("a manifest cannot replay another replay".into()).into());
    }
    if let Command::Spectrum(s) = &cmd {
        if s.geometry.kind == GeometryKind::Custom {
            return Err(Error::Domain("custom lattices cannot be replayed".into()).into());
        }
    }
    info!("replaying {}", a.manifest.display());
    execute(cmd)
}
