//! Photon-scattering decoherence: the fraction ζ of the transverse mode
//! intensity intercepted by the rotor footprint, and the reference rate
//! rescaled by it.

use std::f64::consts::PI;

use crate::coupling::footprint_overlap;
use crate::error::{Error, Result};
use crate::lgmode::LgMode;
use crate::quadrature::QuadratureOptions;
use crate::windmill::{RotorPose, Windmill};

/// Default Γ/g ratio below which a configuration counts as feasible.
pub const DEFAULT_FEASIBILITY_THRESHOLD: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct DecoherenceInput {
    /// Reference scattering-decoherence rate of a comparable sphere, in the
    /// same units as the coupling it is compared with.
    pub gamma_cav: f64,
    /// Free-form provenance, e.g. the trapping beam power.
    pub note: String,
}

impl DecoherenceInput {
    pub fn new(gamma_cav: f64, note: impl Into<String>) -> Result<Self> {
        if !(gamma_cav >= 0.0) || !gamma_cav.is_finite() {
            return Err(Error::invalid("gamma_cav", format!("{gamma_cav} must be finite and >= 0")));
        }
        Ok(Self { gamma_cav, note: note.into() })
    }
}

/// ζ = ∫_{footprint}|ψ|² da / ∫|ψ|² da at z = 0, rotor at equilibrium.
pub fn scattering_ratio(mode: &LgMode, wm: &Windmill, opts: &QuadratureOptions) -> Result<f64> {
    let numerator = footprint_overlap(mode, wm, RotorPose::EQUILIBRIUM, opts)?;
    let denominator = PI * mode.waist() * mode.waist() / 2.0;
    Ok((numerator.value / denominator).clamp(0.0, 1.0))
}

/// Γ_{l,p} = ζ Γ_cav.
pub fn decoherence_rate(input: &DecoherenceInput, zeta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&zeta) {
        return Err(Error::invalid("zeta", format!("{zeta} outside [0, 1]")));
    }
    Ok(zeta * input.gamma_cav)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Margin {
    /// Γ/g.
    pub ratio: f64,
    pub feasible: bool,
}

/// Γ/|g|, flagged feasible below `threshold`.
pub fn feasibility_margin(g: f64, gamma: f64, threshold: f64) -> Result<Margin> {
    if !(g.abs() > 0.0) || !g.is_finite() {
        return Err(Error::invalid("g", "coupling must be non-zero to form a margin"));
    }
    let ratio = gamma / g.abs();
    Ok(Margin { ratio, feasible: ratio < threshold })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mode(l: i32, p: u32) -> LgMode {
        LgMode::new(l, p, 1064e-9, 20e-6, 0.0).unwrap()
    }

    fn rotor() -> Windmill {
        Windmill::new(3, 10e-6, 200e-9, 200e-9, 1e-16, 2.1).unwrap()
    }

    #[test]
    fn zeta_limits() {
        let opts = QuadratureOptions::default();
        let m = mode(3, 11);
        let z = scattering_ratio(&m, &rotor(), &opts).unwrap();
        assert!(z > 0.0 && z < 1.0);
        let thin = rotor().with_arc_length(1e-16).unwrap();
        assert!(scattering_ratio(&m, &thin, &opts).unwrap() < 1e-9);
        // nearly full plane: huge radius, wedges almost touching
        let r = 2e-3;
        let full = Windmill::new(3, r, 0.999_999 * PI * r / 3.0, 2e-7, 1e-16, 2.1).unwrap();
        let zf = scattering_ratio(&m, &full, &opts).unwrap();
        assert!((zf - 1.0).abs() < 1e-5, "{zf}");
    }

    #[test]
    fn zeta_monotone_in_footprint() {
        let opts = QuadratureOptions::default();
        let m = mode(3, 5);
        let mut prev = 0.0;
        for s in [50e-9, 100e-9, 200e-9, 400e-9] {
            let z = scattering_ratio(&m, &rotor().with_arc_length(s).unwrap(), &opts).unwrap();
            assert!(z >= prev);
            prev = z;
        }
        let mut prev = 0.0;
        for r in [4e-6, 6e-6, 8e-6, 10e-6, 12e-6] {
            // keep the angular width fixed so footprints nest
            let wm = rotor().with_radius(r).unwrap().with_arc_length(0.02 * r).unwrap();
            let z = scattering_ratio(&m, &wm, &opts).unwrap();
            assert!(z >= prev);
            prev = z;
        }
    }

    #[test]
    fn rate_and_margin() {
        let input = DecoherenceInput::new(3.0, "0.1 mW incident").unwrap();
        assert_eq!(decoherence_rate(&input, 0.0).unwrap(), 0.0);
        let doubled = DecoherenceInput::new(6.0, "").unwrap();
        assert_eq!(decoherence_rate(&doubled, 0.25).unwrap(), 2.0 * decoherence_rate(&input, 0.25).unwrap());
        assert!(decoherence_rate(&input, 1.5).is_err());
        assert!(DecoherenceInput::new(-1.0, "").is_err());

        let m = feasibility_margin(200.0, 1.0, DEFAULT_FEASIBILITY_THRESHOLD).unwrap();
        assert!((m.ratio - 0.005).abs() < 1e-15 && m.feasible);
        assert_eq!(feasibility_margin(200.0, 0.0, 0.05).unwrap().ratio, 0.0);
        let bad = feasibility_margin(1.0, 1.0, 0.05).unwrap();
        assert!(bad.ratio == 1.0 && !bad.feasible);
        assert!(feasibility_margin(0.0, 1.0, 0.05).is_err());
    }
}
