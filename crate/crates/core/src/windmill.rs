//! Windmill rotor: `spokes` spokes, each a pair of opposed wedges. A wedge is
//! a circular sector of radius R whose outer arc has length s, extruded to
//! thickness h along the cavity axis.

use std::f64::consts::PI;
use std::fmt;

use crate::coupling::Cavity;
use crate::error::{Error, Result};
use crate::lgmode::{reduce_angle, CylindricalPoint, LgMode};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Windmill {
    spokes: u32,
    radius: f64,
    arc_length: f64,
    thickness: f64,
    mass_per_spoke: f64,
    epsilon: f64,
}

impl Windmill {
    pub fn new(
        spokes: u32,
        radius: f64,
        arc_length: f64,
        thickness: f64,
        mass_per_spoke: f64,
        epsilon: f64,
    ) -> Result<Self> {
        if spokes == 0 {
            return Err(Error::invalid("spokes", "need at least one spoke"));
        }
        positive("radius", radius)?;
        positive("arc_length", arc_length)?;
        positive("thickness", thickness)?;
        positive("mass", mass_per_spoke)?;
        if !(epsilon >= 1.0) || !epsilon.is_finite() {
            return Err(Error::invalid("epsilon", format!("{epsilon} must be >= 1")));
        }
        // 2·spokes wedges of angular width s/R must fit in a full turn
        if 2.0 * spokes as f64 * (arc_length / radius) >= 2.0 * PI {
            return Err(Error::invalid(
                "arc_length",
                format!("{arc_length} m wedges overlap for {spokes} spokes of radius {radius} m"),
            ));
        }
        Ok(Self { spokes, radius, arc_length, thickness, mass_per_spoke, epsilon })
    }

    pub fn spokes(&self) -> u32 {
        self.spokes
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn arc_length(&self) -> f64 {
        self.arc_length
    }

    pub fn thickness(&self) -> f64 {
        self.thickness
    }

    pub fn mass_per_spoke(&self) -> f64 {
        self.mass_per_spoke
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Wedge half-angle s/(2R).
    pub fn half_angle(&self) -> f64 {
        self.arc_length / (2.0 * self.radius)
    }

    /// Angular spacing π/spokes between neighbouring wedge axes.
    pub fn axis_spacing(&self) -> f64 {
        PI / self.spokes as f64
    }

    pub fn with_spokes(self, spokes: u32) -> Result<Self> {
        Self::new(spokes, self.radius, self.arc_length, self.thickness, self.mass_per_spoke, self.epsilon)
    }

    pub fn with_radius(self, radius: f64) -> Result<Self> {
        Self::new(self.spokes, radius, self.arc_length, self.thickness, self.mass_per_spoke, self.epsilon)
    }

    pub fn with_arc_length(self, arc_length: f64) -> Result<Self> {
        Self::new(self.spokes, self.radius, arc_length, self.thickness, self.mass_per_spoke, self.epsilon)
    }

    pub fn with_epsilon(self, epsilon: f64) -> Result<Self> {
        Self::new(self.spokes, self.radius, self.arc_length, self.thickness, self.mass_per_spoke, epsilon)
    }

    pub fn with_mass_per_spoke(self, mass: f64) -> Result<Self> {
        Self::new(self.spokes, self.radius, self.arc_length, self.thickness, mass, self.epsilon)
    }

    /// Axis angles δ + jπ/spokes, j = 0 … 2·spokes − 1.
    pub fn wedge_axes(&self, pose: RotorPose) -> impl Iterator<Item = f64> + '_ {
        let spacing = self.axis_spacing();
        (0..2 * self.spokes).map(move |j| pose.angle + j as f64 * spacing)
    }

    pub fn contains(&self, pose: RotorPose, pt: &CylindricalPoint) -> bool {
        if pt.r > self.radius || pt.z.abs() > 0.5 * self.thickness {
            return false;
        }
        let spacing = self.axis_spacing();
        let d = reduce_angle(pt.phi - pose.angle).rem_euclid(spacing);
        d.min(spacing - d) <= self.half_angle()
    }

    /// I = spokes · m · R².
    pub fn moment_of_inertia(&self) -> f64 {
        self.spokes as f64 * self.mass_per_spoke * self.radius * self.radius
    }

    /// Footprint area of the 2·spokes sectors: spokes · R · s.
    pub fn cross_section_area(&self) -> f64 {
        self.spokes as f64 * self.radius * self.arc_length
    }

    pub fn volume(&self) -> f64 {
        self.cross_section_area() * self.thickness
    }

    /// Closed polyline of the footprint at the given pose, starting and ending
    /// at the hub. Each wedge contributes its two radial edges and
    /// `arc_samples` points along its outer arc.
    pub fn outline(&self, pose: RotorPose, arc_samples: usize) -> Vec<(f64, f64)> {
        let a = self.half_angle();
        let n = arc_samples.max(2);
        let mut pts = vec![(0.0, 0.0)];
        for axis in self.wedge_axes(pose) {
            for i in 0..n {
                let t = axis - a + 2.0 * a * i as f64 / (n - 1) as f64;
                pts.push((self.radius * t.cos(), self.radius * t.sin()));
            }
            pts.push((0.0, 0.0));
        }
        pts
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("{v} must be positive and finite")))
    }
}

/// Angular displacement of the rotor from its equilibrium orientation.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RotorPose {
    pub angle: f64,
}

impl RotorPose {
    pub const EQUILIBRIUM: RotorPose = RotorPose { angle: 0.0 };

    pub fn new(angle: f64) -> Self {
        Self { angle }
    }
}

/// A violated small-dielectric condition. These are advisory: the
/// perturbative frequency shift is still computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PerturbativeWarning {
    ArcLengthNotSubwavelength { arc_length: f64, wavelength: f64 },
    ThicknessNotBelowCavityLength { thickness: f64, cavity_length: f64 },
    RadiusExceedsWaist { radius: f64, waist: f64 },
    RayleighRangeBelowCavityLength { rayleigh_range: f64, cavity_length: f64 },
}

impl fmt::Display for PerturbativeWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::ArcLengthNotSubwavelength { arc_length, wavelength } => {
                write!(f, "s ≥ λ ({arc_length:e} m ≥ {wavelength:e} m)")
            }
            Self::ThicknessNotBelowCavityLength { thickness, cavity_length } => {
                write!(f, "h ≥ D ({thickness:e} m ≥ {cavity_length:e} m)")
            }
            Self::RadiusExceedsWaist { radius, waist } => {
                write!(f, "R > 0.6·w0 ({radius:e} m > 0.6 × {waist:e} m)")
            }
            Self::RayleighRangeBelowCavityLength { rayleigh_range, cavity_length } => {
                write!(f, "z_R ≤ D ({rayleigh_range:e} m ≤ {cavity_length:e} m)")
            }
        }
    }
}

/// Checks s < λ, h < D and R ≲ w₀/2 (flagged above 0.6 w₀).
pub fn validate_perturbative(wm: &Windmill, mode: &LgMode, cavity: &Cavity) -> Vec<PerturbativeWarning> {
    let mut warnings = Vec::new();
    if wm.arc_length() >= mode.wavelength() {
        warnings.push(PerturbativeWarning::ArcLengthNotSubwavelength {
            arc_length: wm.arc_length(),
            wavelength: mode.wavelength(),
        });
    }
    if wm.thickness() >= cavity.length() {
        warnings.push(PerturbativeWarning::ThicknessNotBelowCavityLength {
            thickness: wm.thickness(),
            cavity_length: cavity.length(),
        });
    }
    if wm.radius() > 0.6 * mode.waist() {
        warnings.push(PerturbativeWarning::RadiusExceedsWaist { radius: wm.radius(), waist: mode.waist() });
    }
    warnings
}
