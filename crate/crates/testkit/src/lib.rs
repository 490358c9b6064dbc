//! Brute-force oracles for checking the quadrature pipeline.
//!
//! Nothing here shares code with the production integration routes beyond
//! the point evaluators `LgMode::intensity` and `Windmill::contains`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lgtorsion::{CylindricalPoint, LgMode, RotorPose, Windmill};

/// Composite Simpson rule with `n` (rounded up to even) intervals.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = (n + n % 2).max(2);
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Monte-Carlo estimate with its one-sigma standard error.
#[derive(Debug, Clone, Copy)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

/// ∫_V |ψ|² dV over the rotor volume by uniform sampling of a polar box of
/// half-angle 2a around every wedge axis (full thickness, r ≤ R), keeping
/// points that `contains` accepts. The intensity includes cos²kz and w(z).
pub fn monte_carlo_overlap(mode: &LgMode, wm: &Windmill, pose: RotorPose, samples_per_wedge: usize, seed: u64) -> Estimate {
    let h = wm.thickness();
    sample_wedges(mode, wm, pose, samples_per_wedge, seed, |rng| h * (rng.random::<f64>() - 0.5), h)
}

/// ∫_{footprint} |ψ(z=0)|² da by the same polar-box sampling, divided by
/// πw₀²/2.
pub fn monte_carlo_zeta(mode: &LgMode, wm: &Windmill, samples_per_wedge: usize, seed: u64) -> Estimate {
    let est = sample_wedges(mode, wm, RotorPose::EQUILIBRIUM, samples_per_wedge, seed, |_| 0.0, 1.0);
    let norm = std::f64::consts::PI * mode.waist() * mode.waist() / 2.0;
    Estimate { value: est.value / norm, std_error: est.std_error / norm }
}

fn sample_wedges(
    mode: &LgMode,
    wm: &Windmill,
    pose: RotorPose,
    n: usize,
    seed: u64,
    draw_z: impl Fn(&mut ChaCha8Rng) -> f64,
    z_extent: f64,
) -> Estimate {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half_box = 2.0 * wm.half_angle();
    let box_measure = wm.radius().powi(2) * half_box * z_extent;
    let spacing = std::f64::consts::PI / wm.spokes() as f64;
    let mut value = 0.0;
    let mut variance = 0.0;
    for j in 0..2 * wm.spokes() {
        let axis = pose.angle + j as f64 * spacing;
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for _ in 0..n {
            let r = wm.radius() * rng.random::<f64>().sqrt();
            let phi = axis + half_box * (2.0 * rng.random::<f64>() - 1.0);
            let z = draw_z(&mut rng);
            let pt = CylindricalPoint::new(r, phi, z).expect("sampled point is valid");
            let f = if wm.contains(pose, &pt) { mode.intensity(&pt) } else { 0.0 };
            sum += f;
            sum_sq += f * f;
        }
        let mean = sum / n as f64;
        let var = (sum_sq / n as f64 - mean * mean).max(0.0) / n as f64;
        value += mean * box_measure;
        variance += var * box_measure * box_measure;
    }
    Estimate { value, std_error: variance.sqrt() }
}

/// Reference parameter set: λ = 1064 nm, w₀ = 20 μm, R = 10 μm,
/// s = h = 200 nm, m = 1e-16 kg per spoke, ε = 2.1, D = 0.5 mm, ω_φ = 5e4 rad/s.
pub mod reference {
    pub const WAVELENGTH: f64 = 1064e-9;
    pub const WAIST: f64 = 20e-6;
    pub const RADIUS: f64 = 10e-6;
    pub const ARC_LENGTH: f64 = 200e-9;
    pub const THICKNESS: f64 = 200e-9;
    pub const MASS_PER_SPOKE: f64 = 1e-16;
    pub const EPSILON: f64 = 2.1;
    pub const CAVITY_LENGTH: f64 = 0.5e-3;
    pub const OMEGA_PHI: f64 = 5e4;
}

/// Mode, rotor and cavity for the reference set with spokes = |l| and
/// φ' = π/(4|l|).
pub fn reference_setup(l: i32, p: u32) -> (LgMode, Windmill, lgtorsion::Cavity) {
    use reference::*;
    let mode = LgMode::new(l, p, WAVELENGTH, WAIST, 0.0).expect("valid mode").with_linear_phase();
    let wm = Windmill::new(l.unsigned_abs().max(1), RADIUS, ARC_LENGTH, THICKNESS, MASS_PER_SPOKE, EPSILON)
        .expect("valid rotor");
    let cavity = lgtorsion::Cavity::for_wavelength(CAVITY_LENGTH, WAVELENGTH, OMEGA_PHI).expect("valid cavity");
    (mode, wm, cavity)
}
