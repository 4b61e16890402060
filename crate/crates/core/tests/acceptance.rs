//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line and then
//! asserts it. Large runs are shared between criteria through `OnceLock`.
//!
//! Run with `cargo test -p trpnet --test acceptance -- --nocapture --test-threads 1`.

use std::io::Write;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use trpnet::geometry::{self, DipoleLattice};
use trpnet::hamiltonian::coupling;
use trpnet::observables::{self, FitKind};
use trpnet::spectrum::SumRules;
use trpnet::unitcell::Vec3;
use trpnet::*;

const T_K: f64 = 298.0;

const MT40_MAX_PER_N: f64 = 0.119;
const MT40_TAU_SUPER_S: f64 = 3.93e-12;
const MT40_REL_TOL: f64 = 0.05;
const MT40_MIN_RATIO: f64 = 7.8e-8;
const MT40_TAU_SUB_S: f64 = 0.025;
const SUBRADIANT_FACTOR: f64 = 3.0;
const SUM_RULE_TOL: f64 = 1e-8;
const DICKE_TOL: f64 = 1e-4;
const PAIR_TOL: f64 = 1e-10;
const UPSILON_LIMIT_TOL: f64 = 1e-5;
const OMEGA_STATIC_TOL: f64 = 1e-4;
const QY_SINGLE: f64 = 0.130;
const QY_SINGLE_TOL: f64 = 0.001;
const DIMER_INCREASE_MAX: f64 = 0.10;
const PLATEAU_TOL: f64 = 1e-3;
const DISORDER_QY_TOL: f64 = 0.10;
const DISORDER_REALIZATIONS: usize = 10;
const DISORDER_SEED: u64 = 2024;
const AXON_PROJECTION: f64 = 7000.0;
const AXON_TOL: f64 = 0.10;
const APPROX_FACTOR: f64 = 2.0;
const APPROX_SPEEDUP: f64 = 5.0;
const RAYLEIGH_PEAK_TOL: f64 = 0.01;

/// Writes through the raw stdout handle so the line shows even when the
/// harness captures output of passing tests.
fn report(id: u32, name: &str, pass: bool, detail: String) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stdout().lock(), "{verdict} criterion {id:>2} {name}: {detail}");
    assert!(pass, "criterion {id} ({name}) failed: {detail}");
}

fn c() -> PhysicalConstants {
    PhysicalConstants::default()
}

fn cell() -> &'static UnitCell {
    static CELL: OnceLock<UnitCell> = OnceLock::new();
    CELL.get_or_init(UnitCell::bundled_tubulin_dimer)
}

struct Run {
    metrics: EnhancementMetrics,
    qy: f64,
    sum_rules: SumRules,
    elapsed: Duration,
}

fn run(lat: &DipoleLattice) -> Run {
    let t = Instant::now();
    let s = diagonalize(&assemble(lat, &c(), None).unwrap(), false).unwrap();
    let elapsed = t.elapsed();
    Run {
        metrics: enhancement_metrics(&s).unwrap(),
        qy: observables::thermal_qy(&s, T_K, c().gamma_nr).unwrap().qy,
        sum_rules: s.sum_rules,
        elapsed,
    }
}

fn microtubule(spirals: usize) -> DipoleLattice {
    geometry::build_microtubule(cell(), spirals).unwrap()
}

fn mt40() -> &'static Run {
    static RUN: OnceLock<Run> = OnceLock::new();
    RUN.get_or_init(|| run(&microtubule(40)))
}

/// QY and brightest width for 1..=10, 30, 35 and 40 spirals.
fn mt_sweep() -> &'static Vec<(usize, Run)> {
    static SWEEP: OnceLock<Vec<(usize, Run)>> = OnceLock::new();
    SWEEP.get_or_init(|| {
        let mut out: Vec<(usize, Run)> = (1..=10).chain([30, 35]).map(|n| (n, run(&microtubule(n)))).collect();
        let m = mt40();
        out.push((40, Run { metrics: m.metrics, qy: m.qy, sum_rules: m.sum_rules, elapsed: m.elapsed }));
        out
    })
}

struct CentrioleRun {
    approx: observables::ApproxCentrioleState,
    exact: Run,
}

fn centriole() -> &'static CentrioleRun {
    static RUN: OnceLock<CentrioleRun> = OnceLock::new();
    RUN.get_or_init(|| {
        let lat = geometry::build_centriole(cell(), 2).unwrap();
        let approx = observables::approx_centriole_state(&lat, &c(), 1).unwrap();
        CentrioleRun { approx, exact: run(&lat) }
    })
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn within_factor(a: f64, b: f64, f: f64) -> bool {
    a > 0.0 && a / b <= f && b / a <= f
}

#[test]
fn criterion_01_microtubule_40_spirals() {
    let m = &mt40().metrics;
    let e1 = rel(m.max_per_n, MT40_MAX_PER_N);
    let e2 = rel(m.tau_super_s, MT40_TAU_SUPER_S);
    report(
        1,
        "40-spiral microtubule superradiance",
        m.n == 4160 && e1 <= MT40_REL_TOL && e2 <= MT40_REL_TOL,
        format!(
            "N = {}, max Gamma/(N gamma) = {:.4} (target {MT40_MAX_PER_N}, rel {e1:.3}), tau_super = {:.3} ps (target {:.2} ps, rel {e2:.3}), solve {:.0} s",
            m.n,
            m.max_per_n,
            m.tau_super_s * 1e12,
            MT40_TAU_SUPER_S * 1e12,
            mt40().elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_02_subradiant_tail() {
    let m = &mt40().metrics;
    let ok = within_factor(m.min_ratio, MT40_MIN_RATIO, SUBRADIANT_FACTOR)
        && within_factor(m.tau_sub_s, MT40_TAU_SUB_S, SUBRADIANT_FACTOR);
    report(
        2,
        "subradiant tail",
        ok,
        format!(
            "min Gamma/gamma = {:.3e} (target {MT40_MIN_RATIO:e}, x{:.2}), tau_sub = {:.3e} s (target {MT40_TAU_SUB_S}, x{:.2})",
            m.min_ratio,
            MT40_MIN_RATIO / m.min_ratio,
            m.tau_sub_s,
            m.tau_sub_s / MT40_TAU_SUB_S
        ),
    );
}

#[test]
fn criterion_03_sum_rules() {
    let mut rules: Vec<(String, SumRules)> = vec![
        ("mt40".into(), mt40().sum_rules),
        ("centriole".into(), centriole().exact.sum_rules),
    ];
    for (n, r) in mt_sweep() {
        rules.push((format!("mt{n}"), r.sum_rules));
    }
    let d = DisorderConfig::new(1000.0, 1, 0).unwrap();
    let s = diagonalize(&assemble(&microtubule(3), &c(), Some(&d)).unwrap(), false).unwrap();
    rules.push(("mt3 W=1000".into(), s.sum_rules));
    for spec in [GeometrySpec::axoneme(1), GeometrySpec::bundle(7, 1)] {
        let lat = geometry::build(cell(), &spec).unwrap();
        rules.push((spec.kind.to_string(), run(&lat).sum_rules));
    }
    let worst_e = rules.iter().map(|(_, r)| r.energy).fold(0.0, f64::max);
    let worst_g = rules.iter().map(|(_, r)| r.width).fold(0.0, f64::max);
    report(
        3,
        "sum rules",
        worst_e <= SUM_RULE_TOL && worst_g <= SUM_RULE_TOL,
        format!("{} diagonalizations, worst energy {worst_e:.2e}, worst width {worst_g:.2e}", rules.len()),
    );
}

#[test]
fn criterion_04_dicke_limit() {
    // 8 parallel dipoles on a cube whose body diagonal is λ/10⁴
    let edge = c().lambda0_nm * 10.0 / 1e4 / 3f64.sqrt();
    let dipoles = (0..8)
        .map(|i| {
            let p = Vec3::new((i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64) * edge;
            Dipole::new(p, Vec3::z())
        })
        .collect();
    let r = run(&DipoleLattice::custom(dipoles));
    report(
        4,
        "Dicke limit",
        (r.metrics.max_ratio - 8.0).abs() <= DICKE_TOL,
        format!("max Gamma/gamma = {:.8}", r.metrics.max_ratio),
    );
}

/// Ω − iΥ/2 = −(3γ/4)·e^{ix}[A/x + B(i/x² − 1/x³)].
fn complex_kernel(dm: &Dipole, dn: &Dipole, c: &PhysicalConstants) -> Complex64 {
    let sep = dn.position - dm.position;
    let r = sep.norm();
    let rh = sep / r;
    let x = c.k0 * r;
    let uu = dm.orientation.dot(&dn.orientation);
    let p = dm.orientation.dot(&rh) * dn.orientation.dot(&rh);
    let i = Complex64::i();
    -0.75 * c.gamma * (i * x).exp() * ((uu - p) / x + (uu - 3.0 * p) * (i / (x * x) - 1.0 / (x * x * x)))
}

#[test]
fn criterion_05_two_dipole_oracle() {
    let c = c();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut u = || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
    let mut dir = |u: &mut dyn FnMut() -> f64| {
        let z = 2.0 * u() - 1.0;
        let phi = std::f64::consts::TAU * u();
        let s = (1.0 - z * z).sqrt();
        Vec3::new(s * phi.cos(), s * phi.sin(), z)
    };
    let (mut worst_e, mut worst_g) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let r = 2.0 + 2000.0 * u();
        let d0 = Dipole::new(Vec3::zeros(), dir(&mut u));
        let d1 = Dipole::new(dir(&mut u) * r, dir(&mut u));
        let k = complex_kernel(&d0, &d1, &c);
        let mut want = [(c.e0 + k.re, c.gamma - 2.0 * k.im), (c.e0 - k.re, c.gamma + 2.0 * k.im)];
        want.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.total_cmp(&a.1)));
        let s = diagonalize(&assemble(&DipoleLattice::custom(vec![d0, d1]), &c, None).unwrap(), false).unwrap();
        for (j, (e, g)) in want.iter().enumerate() {
            worst_e = worst_e.max(rel(s.energies[j], *e));
            worst_g = worst_g.max((s.widths[j] - g).abs() / c.gamma);
        }
    }
    report(
        5,
        "two-dipole closed form",
        worst_e <= PAIR_TOL && worst_g <= PAIR_TOL,
        format!("100 geometries, worst rel E {worst_e:.2e}, worst |dGamma|/gamma {worst_g:.2e}"),
    );
}

#[test]
fn criterion_06_kernel_limits() {
    let c = c();
    let r = 1e-3 / c.k0;
    let a = Dipole::new(Vec3::zeros(), Vec3::z());
    let b = Dipole::new(Vec3::new(r, 0.0, 0.0), Vec3::z());
    let k = coupling(&a, &b, &c).unwrap();
    let e_ups = rel(k.upsilon, c.gamma);
    // static dipole-dipole: (3γ/4)(û·û − 3(û·r̂)(û·r̂))/x³
    let mut worst_static = 0.0f64;
    for (ua, ub) in [(Vec3::z(), Vec3::z()), (Vec3::x(), Vec3::x()), (Vec3::x(), Vec3::new(1.0, 1.0, 0.0).normalize())] {
        let (da, db) = (Dipole::new(Vec3::zeros(), ua), Dipole::new(Vec3::new(r, 0.0, 0.0), ub));
        let bfac = ua.dot(&ub) - 3.0 * ua.x * ub.x;
        let stat = 0.75 * c.gamma * bfac / 1e-9;
        worst_static = worst_static.max(rel(coupling(&da, &db, &c).unwrap().omega, stat));
    }
    report(
        6,
        "kernel limits at k0 r = 1e-3",
        e_ups <= UPSILON_LIMIT_TOL && worst_static <= OMEGA_STATIC_TOL,
        format!("Upsilon/gamma rel {e_ups:.2e}, Omega vs static rel {worst_static:.2e}"),
    );
}

#[test]
fn criterion_07_quantum_yield() {
    let c = c();
    let first = microtubule(1);
    let qy = |n: usize| observables::sweep_point(&first.prefix(n), &c, None, T_K, c.gamma_nr).unwrap().qy;
    let (q1, q8) = (qy(1), qy(8));
    let sweep = mt_sweep();
    let q_of = |n: usize| sweep.iter().find(|(k, _)| *k == n).unwrap().1.qy;
    let q104 = q_of(1);

    let anchor = (q1 - QY_SINGLE).abs() <= QY_SINGLE_TOL;
    let dimer = (q8 - q1) / q1;
    let dimer_ok = dimer > 0.0 && dimer < DIMER_INCREASE_MAX;
    let plateau = rel(q104, q8);
    let plateau_ok = plateau <= PLATEAU_TOL;
    let monotone = (2..10).all(|n| q_of(n + 1) > q_of(n));
    let (d1, d2) = (q_of(35) - q_of(30), q_of(40) - q_of(35));
    let saturating = d2 > 0.0 && d2 < d1;

    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "     QY N=1 {q1:.6}, N=8 {q8:.6}, N=104 {q104:.6}");
    for (n, r) in sweep {
        let fit = observables::fit_curve(FitKind::Axo1JFF, *n as f64 * geometry::SPIRAL_PITCH_NM, None).unwrap();
        let _ = writeln!(
            out,
            "     {n:>2} spirals: QY {:.6}, max Gamma/gamma {:8.3}, closed-form fit {:8.3}{}",
            r.qy,
            r.metrics.max_ratio,
            fit.value,
            if fit.valid { "" } else { " (outside fitted range)" }
        );
    }
    report(
        7,
        "quantum yield anchor and regimes",
        anchor && dimer_ok && plateau_ok && monotone && saturating,
        format!(
            "QY(1) = {q1:.5} [{}]; dimer +{:.2}% [{}]; first-spiral plateau {:.3}% [{}]; monotone 2..10 [{}]; increments 30-35 {d1:.2e}, 35-40 {d2:.2e} [{}]",
            ok(anchor),
            dimer * 100.0,
            ok(dimer_ok),
            plateau * 100.0,
            ok(plateau_ok),
            ok(monotone),
            ok(saturating)
        ),
    );
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "fail"
    }
}

#[test]
fn criterion_08_disorder_robustness() {
    let c = c();
    let sweep = |spirals: usize, widths: &[f64]| {
        observables::disorder_sweep(&microtubule(spirals), &c, widths, DISORDER_REALIZATIONS, DISORDER_SEED, T_K, c.gamma_nr)
            .unwrap()
    };
    let s3 = sweep(3, &[0.0, 200.0, 1000.0]);
    let q1 = observables::sweep_point(&microtubule(1).prefix(1), &c, None, T_K, c.gamma_nr).unwrap().qy;
    let (q0, q200, q1000) = (s3[0].mean_qy, s3[1].mean_qy, s3[2].mean_qy);
    let w200 = rel(q200, q0) <= DISORDER_QY_TOL;
    let w1000 = q1000 < q0 && q1000 > q1;
    let retained = |spirals: usize| {
        let s = sweep(spirals, &[0.0, 200.0]);
        s[1].mean_max_ratio / s[0].mean_max_ratio
    };
    let (r2, r6) = (retained(2), retained(6));
    report(
        8,
        "disorder robustness",
        w200 && w1000 && r6 > r2,
        format!(
            "3 spirals: QY W=0 {q0:.6}, W=200 {q200:.6} (rel {:.2e}) [{}], W=1000 {q1000:.6} vs N=1 {q1:.6} [{}]; retained enhancement at W=200: 2 spirals {r2:.3}, 6 spirals {r6:.3} [{}]",
            rel(q200, q0),
            ok(w200),
            ok(w1000),
            ok(r6 > r2)
        ),
    );
}

#[test]
fn criterion_09_fit_formulas() {
    let inf = f64::INFINITY;
    let cent = observables::fit_curve(FitKind::Cent1JFF, inf, None).unwrap().value;
    let axon = observables::fit_curve(FitKind::AxonBundle, inf, Some(217)).unwrap().value;
    report(
        9,
        "closed-form saturation values",
        cent == 4200.0 && rel(axon, AXON_PROJECTION) <= AXON_TOL,
        format!("centriole(inf) = {cent}, 217-MT bundle(inf) = {axon:.1} (rel to {AXON_PROJECTION}: {:.3})", rel(axon, AXON_PROJECTION)),
    );
}

#[test]
fn criterion_10_approximate_centriole() {
    let r = centriole();
    let exact = r.exact.metrics.max_ratio;
    let ratio = r.approx.gamma_ratio / exact;
    let speedup = r.exact.elapsed.as_secs_f64() / r.approx.elapsed.as_secs_f64();
    report(
        10,
        "approximate centriole state",
        r.approx.n_dipoles == 5616 && ratio <= APPROX_FACTOR && ratio >= 1.0 / APPROX_FACTOR && speedup >= APPROX_SPEEDUP,
        format!(
            "N = {}, trial Gamma/gamma = {:.2}, exact max = {exact:.2} (ratio {ratio:.3}); {:.2} s vs {:.1} s ({speedup:.0}x)",
            r.approx.n_dipoles,
            r.approx.gamma_ratio,
            r.approx.elapsed.as_secs_f64(),
            r.exact.elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_11_geometry_counts() {
    let cases = [
        (GeometrySpec::microtubule(1), 104),
        (GeometrySpec::centriole(1), 2808),
        (GeometrySpec::bundle(91, 1), 9464),
        (GeometrySpec::axoneme(1), 2080),
    ];
    let mut detail = Vec::new();
    let mut pass = true;
    for (spec, want) in cases {
        let built = geometry::build(cell(), &spec).unwrap().len();
        pass &= built == want && spec.expected_count(cell().len()) == want;
        detail.push(format!("{} {built}/{want}", spec.kind));
    }
    report(11, "geometry counts", pass, detail.join(", "));
}

#[test]
fn criterion_12_analysis_helpers() {
    // Gaussian band at 280 nm on a λ⁻⁴ + offset background
    let wl: Vec<f64> = (250..=800).map(f64::from).collect();
    let peak = |l: f64| 0.8 * (-0.5 * ((l - 280.0) / 8.0).powi(2)).exp();
    let bg = |l: f64| 3.0e9 / l.powi(4) + 0.02;
    let y: Vec<f64> = wl.iter().map(|&l| peak(l) + bg(l)).collect();
    let fit = observables::rayleigh_correct(&wl, &y, observables::RAYLEIGH_FIT_RANGE_NM, true).unwrap();
    let i280 = wl.iter().position(|&l| l == 280.0).unwrap();
    let e_peak = rel(fit.corrected[i280], peak(280.0));

    let identity = observables::reference_qy(2.0, 2.0, 0.3, 0.3, 1.33, 1.33, 0.14).unwrap() == 0.14;
    let base = observables::reference_qy(1.0, 4.0, 0.5, 0.5, 1.0, 1.0, 0.25).unwrap();
    let doubled = observables::reference_qy(2.0, 4.0, 0.5, 0.5, 1.0, 1.0, 0.25).unwrap();
    let linear = base == 0.0625 && doubled == 2.0 * base;
    report(
        12,
        "analysis helpers",
        e_peak <= RAYLEIGH_PEAK_TOL && identity && linear,
        format!("Rayleigh peak recovery rel {e_peak:.2e}; reference QY identity [{}], linearity [{}]", ok(identity), ok(linear)),
    );
}
