use std::f64::consts::PI;

use lgtorsion::lgmode::{transverse_norm, CylindricalPoint, LgMode};
use lgtorsion::quadrature::QuadratureOptions;
use lgtorsion::specfun::assoc_laguerre;
use proptest::prelude::*;

const W0: f64 = 20e-6;

fn mode(l: i32, p: u32, phase: f64) -> LgMode {
    LgMode::new(l, p, 1064e-9, W0, phase).unwrap()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()) + 1e-300
}

proptest! {
    #[test]
    fn angular_period(l in 1i32..12, p in 0u32..10, r in 0.0f64..60e-6, phi in 0.0f64..6.3, z in -1e-4f64..1e-4) {
        let m = mode(l, p, 0.2);
        let a = m.intensity(&CylindricalPoint::new(r, phi, z).unwrap());
        let b = m.intensity(&CylindricalPoint::new(r, phi + PI / l as f64, z).unwrap());
        prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(b.abs()) + 1e-300);
    }

    #[test]
    fn reflection_about_phase_offset(l in 1i32..12, p in 0u32..10, r in 0.0f64..60e-6, t in 0.0f64..3.2, phase in -1.0f64..1.0) {
        let m = mode(l, p, phase);
        let a = m.intensity(&CylindricalPoint::new(r, phase + t, 0.0).unwrap());
        let b = m.intensity(&CylindricalPoint::new(r, phase - t, 0.0).unwrap());
        prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(b.abs()) + 1e-300);
    }

    #[test]
    fn sign_of_l_is_irrelevant(l in 1i32..12, p in 0u32..10, r in 0.0f64..60e-6, phi in 0.0f64..6.3) {
        let pt = CylindricalPoint::new(r, phi, 3e-6).unwrap();
        prop_assert!(close(mode(l, p, 0.0).intensity(&pt), mode(-l, p, 0.0).intensity(&pt)));
    }

    #[test]
    fn intensity_is_non_negative(l in -15i32..15, p in 0u32..40, r in 0.0f64..200e-6, phi in -7.0f64..7.0, z in -1e-3f64..1e-3) {
        prop_assert!(mode(l, p, 0.1).intensity(&CylindricalPoint::new(r, phi, z).unwrap()) >= 0.0);
    }
}

#[test]
fn radial_zeros_along_bright_ray_equal_p() {
    for (l, p) in [(0, 3), (1, 0), (2, 4), (3, 5), (3, 11), (6, 9)] {
        let m = mode(l, p, 0.0);
        // sign changes of the Laguerre factor along φ = φ'; |ψ|² touches zero there
        let n = 20_000;
        let rmax = 2.0 * m.outer_radius();
        let mut zeros = 0;
        let mut prev = assoc_laguerre(p, l.unsigned_abs(), 0.0).unwrap();
        for i in 1..=n {
            let r = rmax * i as f64 / n as f64;
            let v = assoc_laguerre(p, l.unsigned_abs(), 2.0 * r * r / (W0 * W0)).unwrap();
            if v.signum() != prev.signum() {
                zeros += 1;
                // the intensity on the bright ray is ~0 at the crossing
                let at = m.intensity(&CylindricalPoint::new(r, 0.0, 0.0).unwrap());
                let peak = m.radial_profile(lgtorsion::lgmode::radial_max(&m), 0.0);
                assert!(at < 1e-3 * peak);
            }
            prev = v;
        }
        assert_eq!(zeros, p, "l={l} p={p}");
    }
}

#[test]
fn transverse_norm_independent_of_indices_sample() {
    let opts = QuadratureOptions::default();
    let target = PI * W0 * W0 / 2.0;
    for l in [0, 2, 7, 10] {
        for p in [0, 1, 13, 30] {
            let v = transverse_norm(&mode(l, p, 0.0), 0.0, &opts).unwrap();
            assert!((v.value - target).abs() / target < 1e-6, "l={l} p={p}");
        }
    }
    // away from the waist the standing-wave factor is the only change
    let m = mode(3, 4, 0.0);
    let z = 0.37e-3;
    let v = transverse_norm(&m, z, &opts).unwrap().value;
    assert!((v - target * m.axial_factor(z)).abs() / target < 1e-6);
}
