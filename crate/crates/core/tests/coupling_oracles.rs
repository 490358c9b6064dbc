use std::f64::consts::PI;

use lgtorsion::coupling::{
    axial_overlap, coupling_linear, coupling_quadratic, dielectric_overlap, frequency_shift, mode_norm_total,
    zero_point_angle, AxialModel,
};
use lgtorsion::decoherence::scattering_ratio;
use lgtorsion::lgmode::transverse_norm;
use lgtorsion::quadrature::QuadratureOptions;
use lgtorsion::specfun::{factorial, gamma_lower_incomplete};
use lgtorsion::{Cavity, CouplingOptions, LgMode, RotorPose, Windmill};
use lgtorsion_testkit::{monte_carlo_overlap, monte_carlo_zeta, reference_setup, simpson};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Σ over wedge edges of ∫cos²(l(φ−φ')) dφ in closed form.
fn angular_closed_form(mode: &LgMode, wm: &Windmill, pose: f64) -> f64 {
    let l = mode.abs_l() as f64;
    let a = wm.half_angle();
    let prim = |phi: f64| phi / 2.0 + (2.0 * l * (phi - mode.phase_offset())).sin() / (4.0 * l);
    (0..2 * wm.spokes())
        .map(|j| {
            let axis = pose + j as f64 * PI / wm.spokes() as f64;
            prim(axis + a) - prim(axis - a)
        })
        .sum()
}

#[test]
fn shift_matches_incomplete_gamma_form_for_p0() {
    let opts = CouplingOptions::default();
    for l in 1..=8 {
        let (mode, wm, cavity) = reference_setup(l, 0);
        let w0 = mode.waist();
        let x = 2.0 * (wm.radius() / w0).powi(2);
        let radial = w0 * w0 / 4.0 * 2.0 / factorial(l as u32).unwrap() * gamma_lower_incomplete(l as f64 + 1.0, x).unwrap();
        let k = 2.0 * PI / mode.wavelength();
        let h = wm.thickness();
        let z = h / 2.0 + (k * h).sin() / (2.0 * k);
        let n = PI * w0 * w0 / 2.0 * cavity.length() / 2.0;
        let expected = -(wm.epsilon() - 1.0) * z * radial * angular_closed_form(&mode, &wm, 0.0) / (2.0 * n);
        let got = frequency_shift(&mode, &wm, &cavity, RotorPose::EQUILIBRIUM, &opts).unwrap();
        assert!(rel(got, expected) < 1e-9, "l={l}: {got} vs {expected}");
    }
}

#[test]
fn overlap_matches_monte_carlo_on_random_scenarios() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let opts = CouplingOptions::default();
    for case in 0..10 {
        let l = rng.random_range(1..=6);
        let p = rng.random_range(0..=15u32);
        let radius = rng.random_range(4e-6..12e-6);
        let arc = rng.random_range(100e-9..400e-9);
        let thickness = rng.random_range(100e-9..400e-9);
        let phase = rng.random_range(-0.5..0.5);
        let pose = RotorPose::new(rng.random_range(-0.05..0.05));
        let mode = LgMode::new(l, p, 1064e-9, 20e-6, phase).unwrap();
        let wm = Windmill::new(l as u32, radius, arc, thickness, 1e-16, 2.1).unwrap();

        let quad = dielectric_overlap(&mode, &wm, pose, &opts).unwrap().value;
        let mc = monte_carlo_overlap(&mode, &wm, pose, 200_000, 1000 + case);
        let diff = (quad - mc.value).abs();
        assert!(
            diff / quad < 5e-3 && diff < 4.0 * mc.std_error,
            "case {case} (l={l} p={p} R={radius:e}): quad {quad:e} mc {:e} ± {:e}",
            mc.value,
            mc.std_error
        );
    }
}

#[test]
fn scattering_ratio_matches_monte_carlo() {
    let opts = QuadratureOptions::default();
    for (l, p) in [(3, 0), (3, 11), (1, 4), (5, 20)] {
        let (mode, wm, _) = reference_setup(l, p);
        let zeta = scattering_ratio(&mode, &wm, &opts).unwrap();
        let mc = monte_carlo_zeta(&mode, &wm, 300_000, 7 + p as u64);
        assert!(rel(mc.value, zeta) < 1e-2, "l={l} p={p}: {zeta} vs {} ± {}", mc.value, mc.std_error);
        assert!((0.0..=1.0).contains(&zeta));
    }
}

#[test]
fn cavity_norm_matches_integral_over_length() {
    let (mode, _, cavity) = reference_setup(3, 5);
    let opts = QuadratureOptions::default();
    let area = PI * mode.waist() * mode.waist() / 2.0;
    for z in [0.0, 1e-5, 0.123e-3, cavity.length() / 2.0] {
        let t = transverse_norm(&mode, z, &opts).unwrap().value;
        assert!(rel(t, area * mode.axial_factor(z)) < 1e-6);
    }
    let d = cavity.length();
    let along = simpson(|z| area * mode.axial_factor(z), -d / 2.0, d / 2.0, 400_000);
    assert!(rel(mode_norm_total(&mode, &cavity), along) < 0.05);
}

#[test]
fn thin_slab_and_exact_axial_models_agree_for_thin_rotors() {
    let (mode, _, _) = reference_setup(3, 0);
    let k = mode.wavenumber();
    let exact = axial_overlap(&mode, 200e-9, AxialModel::Exact);
    let direct = simpson(|z| (k * z).cos().powi(2), -100e-9, 100e-9, 2000);
    assert!(rel(exact, direct) < 1e-12);
    let thin = axial_overlap(&mode, 200e-9, AxialModel::ThinSlab);
    assert!((exact / thin - 0.8915).abs() < 1e-3);
    assert!(rel(axial_overlap(&mode, 1e-9, AxialModel::Exact), axial_overlap(&mode, 1e-9, AxialModel::ThinSlab)) < 1e-4);
}

#[test]
fn quadratic_coupling_matches_edge_derivative() {
    let opts = CouplingOptions::default();
    // φ' = π/(4l) is an inflection point of the shift, so probe off it
    for (l, p, phase) in [(3, 0, 0.0), (2, 3, 0.05), (4, 7, -0.1)] {
        let (mode, wm, cavity) = reference_setup(l, p);
        let mode = mode.with_phase_offset(phase).unwrap();
        let q = coupling_quadratic(&mode, &wm, &cavity, &opts).unwrap();
        // d²/dδ² of the angular sum: Σ (d/dφ cos²) at leading minus trailing edges
        let lf = l as f64;
        let a = wm.half_angle();
        let dcos2 = |phi: f64| -lf * (2.0 * lf * (phi - mode.phase_offset())).sin();
        let second: f64 = (0..2 * wm.spokes())
            .map(|j| {
                let axis = j as f64 * PI / wm.spokes() as f64;
                dcos2(axis + a) - dcos2(axis - a)
            })
            .sum();
        let shift0 = frequency_shift(&mode, &wm, &cavity, RotorPose::EQUILIBRIUM, &opts).unwrap();
        let expected = cavity.omega_c0() * shift0 * second / angular_closed_form(&mode, &wm, 0.0);
        assert!(rel(q.second_derivative, expected) < 1e-3, "l={l} p={p}: {} vs {expected}", q.second_derivative);
        let zpf = zero_point_angle(&wm, &cavity);
        assert!(rel(q.g2, 0.5 * zpf * zpf * expected) < 1e-3);
    }
    let (mode, wm, cavity) = reference_setup(3, 0);
    let at_inflection = coupling_quadratic(&mode, &wm, &cavity, &opts).unwrap();
    let natural = cavity.omega_c0() * frequency_shift(&mode, &wm, &cavity, RotorPose::EQUILIBRIUM, &opts).unwrap().abs();
    assert!(at_inflection.second_derivative.abs() < 1e-6 * natural);
}

#[test]
fn coupling_routes_agree_across_grid() {
    let opts = CouplingOptions::default();
    for l in 1..=5 {
        for p in [0, 5, 11, 20, 30] {
            let (mode, wm, cavity) = reference_setup(l, p);
            let c = coupling_linear(&mode, &wm, &cavity, &opts).unwrap();
            let fd = c.g_cross_check.unwrap();
            assert!((c.g - fd).abs() <= 1e-4 * c.g.abs() + 1e-9, "l={l} p={p}: {} vs {fd}", c.g);
        }
    }
}

#[test]
fn coupling_scaling_laws() {
    let opts = CouplingOptions::default();
    let (mode, wm, cavity) = reference_setup(3, 4);
    let g = |m: &LgMode, w: &Windmill, c: &Cavity| coupling_linear(m, w, c, &opts).unwrap().g;
    let base = g(&mode, &wm, &cavity);

    let doubled = g(&mode, &wm.with_epsilon(3.2).unwrap(), &cavity);
    assert!(rel(doubled, 2.0 * base) < 1e-12);
    assert_eq!(g(&mode, &wm.with_epsilon(1.0).unwrap(), &cavity), 0.0);

    let stiff = g(&mode, &wm, &cavity.with_omega_phi(4.0 * cavity.omega_phi()).unwrap());
    assert!(rel(stiff, 0.5 * base) < 1e-12);
    let heavy = g(&mode, &wm.with_mass_per_spoke(4e-16).unwrap(), &cavity);
    assert!(rel(heavy, 0.5 * base) < 1e-12);

    let mirrored = g(&mode.with_phase_offset(-mode.phase_offset()).unwrap(), &wm, &cavity);
    assert!(rel(mirrored, -base) < 1e-10);
    assert!(base < 0.0);
}
