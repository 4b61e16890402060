use nalgebra::{Rotation3, Vector3};
use num_complex::Complex64;
use proptest::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use trpnet::geometry::{build_microtubule, DipoleLattice};
use trpnet::hamiltonian::coupling;
use trpnet::spectrum::c_dot;
use trpnet::unitcell::Vec3;
use trpnet::*;

fn c() -> PhysicalConstants {
    PhysicalConstants::default()
}

/// Ω − iΥ/2 as −(3γ/4)·e^{ix}[A/x + B(i/x² − 1/x³)], written independently
/// of the library kernels.
fn complex_kernel(dm: &Dipole, dn: &Dipole, c: &PhysicalConstants) -> Complex64 {
    let sep = dn.position - dm.position;
    let r = sep.norm();
    let rh = sep / r;
    let x = c.k0 * r;
    let uu = dm.orientation.dot(&dn.orientation);
    let p = dm.orientation.dot(&rh) * dn.orientation.dot(&rh);
    let a = uu - p;
    let b = uu - 3.0 * p;
    let i = Complex64::i();
    let g = (i * x).exp() * (a / x + b * (i / (x * x) - 1.0 / (x * x * x)));
    -0.75 * c.gamma * g
}

fn unit(v: [f64; 3]) -> Vec3 {
    Vector3::from(v).normalize()
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn random_direction(rng: &mut ChaCha8Rng) -> Vec3 {
    let z = 2.0 * uniform(rng) - 1.0;
    let phi = std::f64::consts::TAU * uniform(rng);
    let s = (1.0 - z * z).sqrt();
    Vec3::new(s * phi.cos(), s * phi.sin(), z)
}

#[test]
fn two_dipole_oracle_random_geometries() {
    let c = c();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let r = 3.0 + 997.0 * uniform(&mut rng);
        let p0 = Vec3::new(uniform(&mut rng), uniform(&mut rng), uniform(&mut rng)) * 50.0;
        let d0 = Dipole::new(p0, random_direction(&mut rng));
        let d1 = Dipole::new(p0 + random_direction(&mut rng) * r, random_direction(&mut rng));
        let k = complex_kernel(&d0, &d1, &c);
        let (omega, upsilon) = (k.re, -2.0 * k.im);

        let s = diagonalize(&assemble(&DipoleLattice::custom(vec![d0, d1]), &c, None).unwrap(), false).unwrap();
        let mut want = [(c.e0 + omega, c.gamma + upsilon), (c.e0 - omega, c.gamma - upsilon)];
        want.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.total_cmp(&a.1)));
        for (j, (e, g)) in want.iter().enumerate() {
            assert!((s.energies[j] - e).abs() / e <= 1e-10, "E {} vs {e}", s.energies[j]);
            assert!((s.widths[j] - g).abs() / c.gamma <= 1e-10, "Gamma {} vs {g}", s.widths[j]);
        }
    }
}

proptest! {
    #[test]
    fn kernels_match_complex_form_and_are_symmetric(
        p in prop::array::uniform3(-200.0f64..200.0),
        u in prop::array::uniform3(-1.0f64..1.0),
        v in prop::array::uniform3(-1.0f64..1.0),
    ) {
        let pv = Vector3::from(p);
        prop_assume!(pv.norm() > 1.0);
        prop_assume!(Vector3::from(u).norm() > 0.1 && Vector3::from(v).norm() > 0.1);
        let a = Dipole::new(Vec3::zeros(), unit(u));
        let b = Dipole::new(pv, unit(v));
        let ab = coupling(&a, &b, &c()).unwrap();
        let ba = coupling(&b, &a, &c()).unwrap();
        prop_assert_eq!(ab.omega, ba.omega);
        prop_assert_eq!(ab.upsilon, ba.upsilon);
        let k = complex_kernel(&a, &b, &c());
        let scale = ab.omega.abs().max(c().gamma);
        prop_assert!((ab.omega - k.re).abs() <= 1e-9 * scale);
        prop_assert!((ab.upsilon + 2.0 * k.im).abs() <= 1e-9 * scale);
    }

    #[test]
    fn far_field_bound(
        dir in prop::array::uniform3(-1.0f64..1.0),
        u in prop::array::uniform3(-1.0f64..1.0),
        v in prop::array::uniform3(-1.0f64..1.0),
        x in 10.0f64..1e4,
    ) {
        prop_assume!(Vector3::from(dir).norm() > 0.1);
        prop_assume!(Vector3::from(u).norm() > 0.1 && Vector3::from(v).norm() > 0.1);
        let c = c();
        let a = Dipole::new(Vec3::zeros(), unit(u));
        let b = Dipole::new(unit(dir) * (x / c.k0), unit(v));
        let k = coupling(&a, &b, &c).unwrap();
        let bound = 3.0 * c.gamma / x;
        prop_assert!(k.omega.abs() <= bound);
        prop_assert!(k.upsilon.abs() <= bound);
    }
}

#[test]
fn eigenvalues_invariant_under_rigid_motion() {
    let c = c();
    let lat = build_microtubule(&UnitCell::bundled_tubulin_dimer(), 1).unwrap();
    let rot = Rotation3::from_euler_angles(0.3, -1.1, 2.0);
    let moved = lat.transformed(&rot, &Vec3::new(120.0, -40.0, 7.5));
    let a = diagonalize(&assemble(&lat, &c, None).unwrap(), false).unwrap();
    let b = diagonalize(&assemble(&moved, &c, None).unwrap(), false).unwrap();
    for j in 0..a.len() {
        assert!((a.energies[j] - b.energies[j]).abs() <= 1e-9, "E_{j}");
        assert!((a.widths[j] - b.widths[j]).abs() <= 1e-9, "Gamma_{j}");
    }
}

#[test]
fn eigenvectors_are_biorthonormal() {
    let c = c();
    let lat = build_microtubule(&UnitCell::bundled_tubulin_dimer(), 1).unwrap();
    let h = assemble(&lat, &c, None).unwrap();
    let s = diagonalize(&h, true).unwrap();
    assert!(s.max_c_norm_error().unwrap() < 1e-10);
    assert!(s.max_cross_overlap(1e-6).unwrap() < 1e-8);
    assert!(s.max_residual(&h.matrix).unwrap() < 1e-9);
    let v = s.right_vectors.as_ref().unwrap();
    let norm = c_dot(v.column(0), v.column(0));
    assert!((norm - Complex64::new(1.0, 0.0)).norm() < 1e-10);
}

#[test]
fn zero_width_disorder_reproduces_clean_spectrum() {
    let c = c();
    let lat = build_microtubule(&UnitCell::bundled_tubulin_dimer(), 1).unwrap();
    let clean = diagonalize(&assemble(&lat, &c, None).unwrap(), false).unwrap();
    let d = DisorderConfig::new(0.0, 99, 3).unwrap();
    let dirty = diagonalize(&assemble(&lat, &c, Some(&d)).unwrap(), false).unwrap();
    assert_eq!(clean.energies, dirty.energies);
    assert_eq!(clean.widths, dirty.widths);
}

#[test]
fn brightest_width_grows_with_length() {
    let c = c();
    let cell = UnitCell::bundled_tubulin_dimer();
    let mut last = 0.0;
    for n in 1..=10 {
        let lat = build_microtubule(&cell, n).unwrap();
        let m = enhancement_metrics(&diagonalize(&assemble(&lat, &c, None).unwrap(), false).unwrap()).unwrap();
        assert!(m.max_ratio > last, "{n} spirals: {} <= {last}", m.max_ratio);
        last = m.max_ratio;
    }
}

#[test]
fn survival_starts_at_one_and_decays() {
    let c = c();
    let lat = build_microtubule(&UnitCell::bundled_tubulin_dimer(), 1).unwrap();
    let s = diagonalize(&assemble(&lat, &c, None).unwrap(), true).unwrap();
    let p = s
        .survival_probability(&spectrum::InitialState::Site(0), &[0.0])
        .unwrap();
    assert!((p[0] - 1.0).abs() < 1e-9);
}
