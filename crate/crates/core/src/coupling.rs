//! Cavity frequency shift from the dielectric rotor and the resulting
//! torsional optomechanical couplings.
//!
//! The relative resonance shift is the first-order perturbative result
//!
//! Δ(δ) = ω_c(δ)/ω_c0 − 1 = −(ε−1) ∫_V |ψ|² dV / (2 ∫_{cavity} |ψ|² dV),
//!
//! and the linear coupling is g = √(ħ/(I ω_φ)) · dω_c/dδ at δ = 0. Because
//! the wedges are sectors of constant angular width, the overlap factorizes
//! into an axial integral, a radial integral over [0, R] and a sum of angular
//! integrals over the wedges.

use std::f64::consts::PI;
use std::ops::RangeInclusive;

use rayon::prelude::*;

use crate::decoherence::{self, DecoherenceInput};
use crate::error::{Error, Result};
use crate::lgmode::{evanescent_cutoff, linear_phase_offset, LgMode};
use crate::quadrature::{self, GaussLegendre, Integral, QuadratureOptions};
use crate::specfun;
use crate::windmill::{PerturbativeWarning, RotorPose, Windmill};

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;

/// Overlap integrals may not be accepted with a worse achieved estimate.
const OVERLAP_TOLERANCE_CAP: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cavity {
    length: f64,
    omega_c0: f64,
    omega_phi: f64,
    phi0: f64,
}

impl Cavity {
    pub fn new(length: f64, omega_c0: f64, omega_phi: f64, phi0: f64) -> Result<Self> {
        for (name, v) in [("cavity_length", length), ("omega_c0", omega_c0), ("omega_phi", omega_phi)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, format!("{v} must be positive")));
            }
        }
        if !phi0.is_finite() {
            return Err(Error::invalid("phi0", "must be finite"));
        }
        Ok(Self { length, omega_c0, omega_phi, phi0 })
    }

    /// Cavity whose equilibrium resonance is the optical angular frequency
    /// 2πc/λ.
    pub fn for_wavelength(length: f64, wavelength: f64, omega_phi: f64) -> Result<Self> {
        Self::new(length, 2.0 * PI * SPEED_OF_LIGHT / wavelength, omega_phi, 0.0)
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn omega_c0(&self) -> f64 {
        self.omega_c0
    }

    pub fn omega_phi(&self) -> f64 {
        self.omega_phi
    }

    pub fn phi0(&self) -> f64 {
        self.phi0
    }

    pub fn with_omega_phi(self, omega_phi: f64) -> Result<Self> {
        Self::new(self.length, self.omega_c0, omega_phi, self.phi0)
    }

    pub fn with_length(self, length: f64) -> Result<Self> {
        Self::new(length, self.omega_c0, self.omega_phi, self.phi0)
    }

    /// The intensity formula assumes a beam that barely diverges across the
    /// cavity.
    pub fn rayleigh_check(&self, mode: &LgMode) -> Option<PerturbativeWarning> {
        let zr = mode.rayleigh_range();
        (zr <= self.length).then_some(PerturbativeWarning::RayleighRangeBelowCavityLength {
            rayleigh_range: zr,
            cavity_length: self.length,
        })
    }
}

/// How the cos²(kz) standing wave is integrated across the rotor thickness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AxialModel {
    /// h/2 + sin(kh)/(2k).
    #[default]
    Exact,
    /// h, i.e. cos²(kz) ≈ 1 across the slab.
    ThinSlab,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingOptions {
    pub quadrature: QuadratureOptions,
    /// Central-difference step for the first derivative, rad.
    pub fd_step: f64,
    /// Five-point stencil step for the second derivative, rad.
    pub fd_step_second: f64,
    /// Allowed relative disagreement between the two derivative routes.
    pub route_tolerance: f64,
    pub axial: AxialModel,
}

impl Default for CouplingOptions {
    fn default() -> Self {
        Self {
            quadrature: QuadratureOptions::default(),
            fd_step: 1e-5,
            fd_step_second: 1e-4,
            route_tolerance: 1e-4,
            axial: AxialModel::Exact,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    SemiAnalytic,
    FiniteDifference,
    ClosedFormP0,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::SemiAnalytic => "semi-analytic",
            Method::FiniteDifference => "finite-difference",
            Method::ClosedFormP0 => "closed-form-p0",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingResult {
    /// Linear coupling in rad/s. Signed: it carries the sign of dω_c/dδ.
    pub g: f64,
    /// g / B.
    pub g_ratio: f64,
    pub method: Method,
    /// Estimated relative error of the overlap quadrature.
    pub quadrature_error: f64,
    /// Cross-check value from the finite-difference route, rad/s.
    pub g_cross_check: Option<f64>,
    /// The scale constant B, rad/s.
    pub b: f64,
}

impl CouplingResult {
    /// g/2π, for quoting the coupling as a frequency.
    pub fn g_hz(&self) -> f64 {
        self.g / (2.0 * PI)
    }
}

/// √(ħ/(I ω_φ)): the zero-point angular spread of the torsional mode.
pub fn zero_point_angle(wm: &Windmill, cavity: &Cavity) -> f64 {
    (HBAR / (wm.moment_of_inertia() * cavity.omega_phi())).sqrt()
}

/// ∫ cos²(kz) dz over |z| ≤ h/2.
pub fn axial_overlap(mode: &LgMode, thickness: f64, model: AxialModel) -> f64 {
    match model {
        AxialModel::Exact => {
            let k = mode.wavenumber();
            0.5 * thickness + (k * thickness).sin() / (2.0 * k)
        }
        AxialModel::ThinSlab => thickness,
    }
}

/// ∫₀^R r (w₀/w)² radial_weight(2r²/w²) dr at the waist, in m².
pub fn radial_overlap(mode: &LgMode, radius: f64, opts: &QuadratureOptions) -> Result<Integral> {
    let w0 = mode.waist();
    // beyond the evanescent cutoff the weight is below e^-40 of its peak
    let x = (2.0 * radius * radius / (w0 * w0)).min(evanescent_cutoff(mode));
    let scale = w0 * w0 / 4.0;
    let opts = QuadratureOptions {
        initial_panels: opts.initial_panels.max(4 + mode.p() as usize).max((x / 4.0).ceil() as usize),
        ..*opts
    };
    let r = quadrature::integrate(|u| mode.radial_weight(u), 0.0, x, &opts)?;
    let out = Integral { value: r.value * scale, error: r.error * scale, panels: r.panels };
    if out.relative_error() > OVERLAP_TOLERANCE_CAP.max(opts.rel_tol) {
        return Err(Error::NonConvergence { what: "radial overlap", estimate: out.relative_error() });
    }
    Ok(out)
}

fn angular_rule() -> &'static GaussLegendre {
    static RULE: std::sync::OnceLock<GaussLegendre> = std::sync::OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(20))
}

/// Σ over wedges of ∫ cos²(l(φ−φ')) dφ across each wedge, by composite
/// Gauss–Legendre with panels no wider than a quarter period.
pub fn wedge_angular_sum(mode: &LgMode, wm: &Windmill, pose: RotorPose) -> f64 {
    let a = wm.half_angle();
    let quarter = PI / (4.0 * mode.abs_l().max(1) as f64);
    let panels = ((2.0 * a) / quarter).ceil().max(1.0) as usize;
    let width = 2.0 * a / panels as f64;
    let rule = angular_rule();
    wm.wedge_axes(pose)
        .map(|axis| {
            (0..panels)
                .map(|i| {
                    let lo = axis - a + i as f64 * width;
                    rule.integrate(|phi| mode.angular_factor(phi), lo, lo + width)
                })
                .sum::<f64>()
        })
        .sum()
}

/// d/dδ of [`wedge_angular_sum`] by the Leibniz rule: each wedge contributes
/// the integrand at its leading edge minus the integrand at its trailing edge.
pub fn wedge_angular_derivative(mode: &LgMode, wm: &Windmill, pose: RotorPose) -> f64 {
    let a = wm.half_angle();
    wm.wedge_axes(pose).map(|axis| mode.angular_factor(axis + a) - mode.angular_factor(axis - a)).sum()
}

/// Transverse intensity integrated over the rotor footprint at the waist, m².
pub fn footprint_overlap(mode: &LgMode, wm: &Windmill, pose: RotorPose, opts: &QuadratureOptions) -> Result<Integral> {
    let radial = radial_overlap(mode, wm.radius(), opts)?;
    let angular = wedge_angular_sum(mode, wm, pose);
    Ok(Integral { value: radial.value * angular, error: radial.error * angular.abs(), panels: radial.panels })
}

/// ∫_V |ψ|² dV over the rotor volume, m³. The (ε−1) factor is applied by
/// [`frequency_shift`].
pub fn dielectric_overlap(
    mode: &LgMode,
    wm: &Windmill,
    pose: RotorPose,
    opts: &CouplingOptions,
) -> Result<Integral> {
    let axial = axial_overlap(mode, wm.thickness(), opts.axial);
    let fp = footprint_overlap(mode, wm, pose, &opts.quadrature)?;
    Ok(Integral { value: axial * fp.value, error: axial * fp.error, panels: fp.panels })
}

/// ∫ |ψ|² over the cavity: (πw₀²/2)(D/2), the standing wave averaging to ½
/// over the length. Excludes the factor 2 of the shift denominator.
pub fn mode_norm_total(mode: &LgMode, cavity: &Cavity) -> f64 {
    PI * mode.waist() * mode.waist() / 2.0 * cavity.length() / 2.0
}

/// Relative resonance shift Δ at rotor angle φ₀ + δ.
pub fn frequency_shift(
    mode: &LgMode,
    wm: &Windmill,
    cavity: &Cavity,
    pose: RotorPose,
    opts: &CouplingOptions,
) -> Result<f64> {
    if wm.epsilon() == 1.0 {
        return Ok(0.0);
    }
    let pose = RotorPose::new(cavity.phi0() + pose.angle);
    let overlap = dielectric_overlap(mode, wm, pose, opts)?;
    Ok(-(wm.epsilon() - 1.0) * overlap.value / (2.0 * mode_norm_total(mode, cavity)))
}

/// B = (ε−1) (s·h / (πRD)) ω_c0 √(ħ/(I ω_φ)), with I the rotor's moment of
/// inertia.
pub fn b_constant(wm: &Windmill, cavity: &Cavity) -> f64 {
    (wm.epsilon() - 1.0) * (wm.arc_length() * wm.thickness() / (PI * wm.radius() * cavity.length()))
        * cavity.omega_c0()
        * zero_point_angle(wm, cavity)
}

fn ratio_to_b(g: f64, b: f64) -> f64 {
    if b == 0.0 { 0.0 } else { g / b }
}

/// Semi-analytic dΔ/dδ at δ = 0 together with the overlap quadrature's
/// relative error estimate.
fn shift_slope_semi_analytic(
    mode: &LgMode,
    wm: &Windmill,
    cavity: &Cavity,
    opts: &CouplingOptions,
) -> Result<(f64, f64)> {
    let radial = radial_overlap(mode, wm.radius(), &opts.quadrature)?;
    if wm.epsilon() == 1.0 {
        return Ok((0.0, radial.relative_error()));
    }
    let pose = RotorPose::new(cavity.phi0());
    let angular = wedge_angular_derivative(mode, wm, pose);
    let axial = axial_overlap(mode, wm.thickness(), opts.axial);
    let slope = -(wm.epsilon() - 1.0) * axial * radial.value * angular / (2.0 * mode_norm_total(mode, cavity));
    Ok((slope, radial.relative_error()))
}

fn shift_slope_finite_difference(
    mode: &LgMode,
    wm: &Windmill,
    cavity: &Cavity,
    opts: &CouplingOptions,
) -> Result<f64> {
    let h = opts.fd_step;
    let plus = frequency_shift(mode, wm, cavity, RotorPose::new(h), opts)?;
    let minus = frequency_shift(mode, wm, cavity, RotorPose::new(-h), opts)?;
    Ok((plus - minus) / (2.0 * h))
}

/// Linear coupling g = √(ħ/(I ω_φ)) dω_c/dδ at δ = 0.
///
/// Reports the semi-analytic route and checks it against a central
/// difference of [`frequency_shift`]; a disagreement beyond
/// `opts.route_tolerance` is an error.
pub fn coupling_linear(mode: &LgMode, wm: &Windmill, cavity: &Cavity, opts: &CouplingOptions) -> Result<CouplingResult> {
    let (slope, quad_err) = shift_slope_semi_analytic(mode, wm, cavity, opts)?;
    let slope_fd = shift_slope_finite_difference(mode, wm, cavity, opts)?;

    // absolute floor: central-difference rounding on an O(Δ) quantity
    let shift0 = frequency_shift(mode, wm, cavity, RotorPose::EQUILIBRIUM, opts)?;
    let floor = 1e-9 * shift0.abs();
    let diff = (slope - slope_fd).abs();
    if diff > opts.route_tolerance * slope.abs().max(slope_fd.abs()) + floor {
        let scale = cavity.omega_c0() * zero_point_angle(wm, cavity);
        return Err(Error::RouteDisagreement { analytic: slope * scale, finite_difference: slope_fd * scale });
    }

    let scale = cavity.omega_c0() * zero_point_angle(wm, cavity);
    let g = slope * scale;
    let b = b_constant(wm, cavity);
    Ok(CouplingResult {
        g,
        g_ratio: ratio_to_b(g, b),
        method: Method::SemiAnalytic,
        quadrature_error: quad_err,
        g_cross_check: Some(slope_fd * scale),
        b,
    })
}

/// Finite-difference route alone, for callers that want to inspect it.
pub fn coupling_linear_finite_difference(
    mode: &LgMode,
    wm: &Windmill,
    cavity: &Cavity,
    opts: &CouplingOptions,
) -> Result<CouplingResult> {
    let slope = shift_slope_finite_difference(mode, wm, cavity, opts)?;
    let g = slope * cavity.omega_c0() * zero_point_angle(wm, cavity);
    let b = b_constant(wm, cavity);
    Ok(CouplingResult {
        g,
        g_ratio: ratio_to_b(g, b),
        method: Method::FiniteDifference,
        quadrature_error: radial_overlap(mode, wm.radius(), &opts.quadrature)?.relative_error(),
        g_cross_check: None,
        b,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticCoupling {
    /// ½ (ħ/(I ω_φ)) d²ω_c/dδ², rad/s.
    pub g2: f64,
    /// d²ω_c/dδ² at δ = 0, rad/s per rad².
    pub second_derivative: f64,
    /// Stencil truncation + rounding estimate, relative to `second_derivative`.
    pub estimated_rel_error: f64,
}

/// Quadratic coupling from a five-point stencil on [`frequency_shift`].
pub fn coupling_quadratic(
    mode: &LgMode,
    wm: &Windmill,
    cavity: &Cavity,
    opts: &CouplingOptions,
) -> Result<QuadraticCoupling> {
    let h = opts.fd_step_second;
    let f = |d: f64| frequency_shift(mode, wm, cavity, RotorPose::new(d), opts);
    let (m2, m1, c, p1, p2) = (f(-2.0 * h)?, f(-h)?, f(0.0)?, f(h)?, f(2.0 * h)?);
    let five = (-p2 + 16.0 * p1 - 30.0 * c + 16.0 * m1 - m2) / (12.0 * h * h);
    let three = (p1 - 2.0 * c + m1) / (h * h);
    let rounding = f64::EPSILON * 64.0 * c.abs() / (12.0 * h * h);
    let estimate = (five - three).abs() + rounding;

    let natural_scale = c.abs() * (2.0 * mode.abs_l().max(1) as f64).powi(2);
    let significant = five.abs() > 1e-6 * natural_scale;
    let rel = if five == 0.0 {
        0.0
    } else {
        estimate / five.abs()
    };
    if significant && rel > 1e-2 {
        return Err(Error::StencilNoise(rel));
    }

    let second_derivative = cavity.omega_c0() * five;
    let zpf = zero_point_angle(wm, cavity);
    Ok(QuadraticCoupling {
        g2: 0.5 * zpf * zpf * second_derivative,
        second_derivative,
        estimated_rel_error: rel,
    })
}

/// g_{l,0}/B in closed form:
/// [Γ(|l|+1) − Γ(|l|+1, 2(R/w₀)²)] / [|l|⁻¹ (|l|−1)! (1+δ_{l,0})].
///
/// The numerator is evaluated as the lower incomplete gamma γ(|l|+1, x), which
/// is the same quantity without the cancellation at small x.
pub fn closed_form_ratio_p0(l: i32, radius_over_waist: f64) -> Result<f64> {
    if l == 0 {
        return Err(Error::invalid("l", "closed form needs |l| >= 1"));
    }
    let al = l.unsigned_abs();
    let x = 2.0 * radius_over_waist * radius_over_waist;
    let numerator = specfun::gamma_lower_incomplete(al as f64 + 1.0, x)?;
    let denominator = specfun::factorial(al - 1)? / al as f64;
    Ok(numerator / denominator)
}

/// Closed-form coupling for a p = 0 mode.
pub fn coupling_analytic_p0(mode: &LgMode, wm: &Windmill, cavity: &Cavity) -> Result<CouplingResult> {
    if mode.p() != 0 {
        return Err(Error::invalid("p", "closed form applies to p = 0 only"));
    }
    let ratio = closed_form_ratio_p0(mode.l(), wm.radius() / mode.waist())?;
    let b = b_constant(wm, cavity);
    Ok(CouplingResult {
        g: b * ratio,
        g_ratio: ratio,
        method: Method::ClosedFormP0,
        quadrature_error: 0.0,
        g_cross_check: None,
        b,
    })
}

/// Number of spokes the rotor gets in a sweep cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpokeRule {
    /// spokes = |l|, the rotor matched to the lobe pattern.
    #[default]
    MatchOptical,
    Fixed(u32),
}

impl SpokeRule {
    pub fn spokes_for(&self, l: i32) -> u32 {
        match *self {
            SpokeRule::MatchOptical => l.unsigned_abs().max(1),
            SpokeRule::Fixed(n) => n,
        }
    }
}

/// Relative phase φ' used in a sweep cell.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum PhaseRule {
    /// φ' = π/(4|l|).
    #[default]
    Linear,
    Fixed(f64),
}

impl PhaseRule {
    pub fn phase_for(&self, l: i32) -> f64 {
        match *self {
            PhaseRule::Linear => linear_phase_offset(l),
            PhaseRule::Fixed(v) => v,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub l_values: RangeInclusive<i32>,
    pub p_values: RangeInclusive<u32>,
    pub spokes: SpokeRule,
    pub phase: PhaseRule,
}

/// The mode and rotor for one (l, p) cell.
pub fn cell_inputs(
    mode: &LgMode,
    wm: &Windmill,
    l: i32,
    p: u32,
    spokes: SpokeRule,
    phase: PhaseRule,
) -> Result<(LgMode, Windmill)> {
    let cell_mode = mode.with_indices(l, p).with_phase_offset(phase.phase_for(l))?;
    let cell_wm = wm.with_spokes(spokes.spokes_for(l))?;
    Ok((cell_mode, cell_wm))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepCell {
    pub coupling: CouplingResult,
    pub zeta: f64,
    /// Γ_{l,p}, present when a reference rate was supplied.
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub l: i32,
    pub p: u32,
    pub outcome: std::result::Result<SweepCell, Error>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub spec: SweepSpec,
    /// l-major, p-minor.
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// Best row for one l by |g|, ties to the smaller p.
    pub fn best_for(&self, l: i32) -> Option<(u32, CouplingResult)> {
        let mut best: Option<(u32, CouplingResult)> = None;
        for row in self.rows.iter().filter(|r| r.l == l) {
            if let Ok(cell) = &row.outcome {
                if best.is_none_or(|(_, b)| cell.coupling.g.abs() > b.g.abs()) {
                    best = Some((row.p, cell.coupling));
                }
            }
        }
        best
    }
}

fn compute_cell(
    mode: &LgMode,
    wm: &Windmill,
    cavity: &Cavity,
    l: i32,
    p: u32,
    spec: &SweepSpec,
    decoherence_input: Option<&DecoherenceInput>,
    opts: &CouplingOptions,
) -> Result<SweepCell> {
    let (cell_mode, cell_wm) = cell_inputs(mode, wm, l, p, spec.spokes, spec.phase)?;
    let coupling = coupling_linear(&cell_mode, &cell_wm, cavity, opts)?;
    let zeta = decoherence::scattering_ratio(&cell_mode, &cell_wm, &opts.quadrature)?;
    let gamma = decoherence_input.map(|d| decoherence::decoherence_rate(d, zeta)).transpose()?;
    Ok(SweepCell { coupling, zeta, gamma })
}

/// Couplings and scattering ratios over an (l, p) grid. Cells are evaluated
/// in parallel on the current rayon pool; the output order is fixed.
pub fn sweep(
    mode: &LgMode,
    wm: &Windmill,
    cavity: &Cavity,
    spec: &SweepSpec,
    decoherence_input: Option<&DecoherenceInput>,
    opts: &CouplingOptions,
) -> Result<SweepResult> {
    if spec.l_values.is_empty() || spec.p_values.is_empty() {
        return Err(Error::invalid("sweep", "l and p ranges must be non-empty"));
    }
    if *spec.l_values.start() < 1 {
        return Err(Error::invalid("sweep", "l must be >= 1"));
    }
    let cells: Vec<(i32, u32)> = spec
        .l_values
        .clone()
        .flat_map(|l| spec.p_values.clone().map(move |p| (l, p)))
        .collect();
    let rows = cells
        .par_iter()
        .map(|&(l, p)| SweepRow {
            l,
            p,
            outcome: compute_cell(mode, wm, cavity, l, p, spec, decoherence_input, opts),
        })
        .collect();
    Ok(SweepResult { spec: spec.clone(), rows })
}

/// Exhaustive search over p ∈ [0, p_max] for the largest |g| at fixed l.
/// Ties go to the smaller p.
pub fn find_optimal_p(
    mode: &LgMode,
    wm: &Windmill,
    cavity: &Cavity,
    l: i32,
    p_max: u32,
    spokes: SpokeRule,
    phase: PhaseRule,
    opts: &CouplingOptions,
) -> Result<(u32, CouplingResult)> {
    let results: Vec<Result<CouplingResult>> = (0..=p_max)
        .into_par_iter()
        .map(|p| {
            let (m, w) = cell_inputs(mode, wm, l, p, spokes, phase)?;
            coupling_linear(&m, &w, cavity, opts)
        })
        .collect();
    let mut best: Option<(u32, CouplingResult)> = None;
    for (p, r) in results.into_iter().enumerate() {
        let r = r?;
        if best.is_none_or(|(_, b)| r.g.abs() > b.g.abs()) {
            best = Some((p as u32, r));
        }
    }
    Ok(best.expect("p range is never empty"))
}
