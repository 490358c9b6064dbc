//! Flat `key = value` scenario files.
//!
//! One assignment per line, `#` starts a comment. Dimensioned values carry an
//! explicit unit suffix (`waist = 20 um`, `omega_phi = 5e4 rad/s`); unknown
//! or repeated keys are rejected.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::ops::RangeInclusive;
use std::path::PathBuf;

use lgtorsion::coupling::{AxialModel, PhaseRule, SpokeRule};
use lgtorsion::quadrature::QuadratureOptions;
use lgtorsion::{Cavity, CouplingOptions, LgMode, Windmill};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Length,
    Mass,
    AngularFrequency,
    Rate,
    Angle,
}

/// Accepted keys with their defaults; keys without a default are required
/// unless optional (the Γ sources).
struct KeySpec {
    name: &'static str,
    default: Option<&'static str>,
}

const fn key(name: &'static str, default: Option<&'static str>) -> KeySpec {
    KeySpec { name, default }
}

const KEYS: &[KeySpec] = &[
    key("wavelength", None),
    key("waist", None),
    key("l", None),
    key("p", Some("0")),
    key("phase_offset", Some("linear")),
    key("spokes", Some("match")),
    key("radius", None),
    key("arc_length", None),
    key("thickness", None),
    key("mass_per_spoke", None),
    key("epsilon", None),
    key("cavity_length", None),
    key("omega_phi", None),
    key("omega_c0", Some("auto")),
    key("phi0", Some("0 rad")),
    key("gamma_cav", None),
    key("gamma_target", None),
    key("gamma_target_mode", Some("3, 11")),
    key("gamma_note", Some("")),
    key("sweep_l", Some("1..5")),
    key("sweep_p", Some("0..30")),
    key("fig2_l", Some("1..10")),
    key("p_max", Some("30")),
    key("rel_tol", Some("1e-10")),
    key("fd_step", Some("1e-5 rad")),
    key("fd_step_second", Some("1e-4 rad")),
    key("route_tolerance", Some("1e-4")),
    key("axial_model", Some("exact")),
    key("feasibility_threshold", Some("0.05")),
    key("output_dir", Some("out")),
];

/// Where the reference decoherence rate comes from. Rates are in Hz, the
/// unit couplings are reported in.
#[derive(Debug, Clone, PartialEq)]
pub enum GammaSource {
    Rate(f64),
    /// Γ_cav chosen so that Γ at mode (l, p) equals `target`.
    Calibrated { target: f64, l: i32, p: u32 },
}

#[derive(Debug, Clone)]
pub struct Scenario {
    /// Mode with the scenario's (l, p) and resolved φ'.
    pub mode: LgMode,
    /// Rotor with the spoke count resolved for the scenario's l.
    pub windmill: Windmill,
    pub cavity: Cavity,
    pub spokes: SpokeRule,
    pub phase: PhaseRule,
    pub gamma: Option<GammaSource>,
    pub gamma_note: String,
    pub sweep_l: RangeInclusive<i32>,
    pub sweep_p: RangeInclusive<u32>,
    pub fig2_l: RangeInclusive<i32>,
    pub p_max: u32,
    pub options: CouplingOptions,
    pub feasibility_threshold: f64,
    pub output_dir: PathBuf,
    values: BTreeMap<&'static str, String>,
}

impl Scenario {
    /// Parses scenario text, then applies `overrides` (`key=value`) on top.
    pub fn parse(text: &str, overrides: &[String]) -> Result<Self, CliError> {
        let mut values: BTreeMap<&'static str, String> = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = split_assignment(line).ok_or_else(|| CliError::config(format!("line {}", n + 1), "expected `key = value`"))?;
            let spec = lookup(k)?;
            if values.insert(spec.name, v.to_string()).is_some() {
                return Err(CliError::config(spec.name, "given more than once"));
            }
        }
        for o in overrides {
            let (k, v) = split_assignment(o).ok_or_else(|| CliError::config(o.clone(), "override must be `key=value`"))?;
            values.insert(lookup(k)?.name, v.to_string());
        }
        for spec in KEYS {
            if let Some(d) = spec.default {
                values.entry(spec.name).or_insert_with(|| d.to_string());
            }
        }
        Self::from_values(values)
    }

    pub fn from_file(path: &std::path::Path, overrides: &[String]) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config("--scenario", format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, overrides)
    }

    /// SHA-256 over the resolved key/value listing.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Resolved assignments, one per line, keys sorted.
    pub fn canonical(&self) -> String {
        self.values.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    fn from_values(values: BTreeMap<&'static str, String>) -> Result<Self, CliError> {
        let get = |name: &'static str| -> Result<&str, CliError> {
            values.get(name).map(String::as_str).ok_or_else(|| CliError::config(name, "required key missing"))
        };
        let length = |name| parse_quantity(name, get(name)?, Kind::Length);

        let l = parse_int::<i32>("l", get("l")?)?;
        let p = parse_int::<u32>("p", get("p")?)?;
        let phase = match get("phase_offset")? {
            "linear" => PhaseRule::Linear,
            v => PhaseRule::Fixed(parse_quantity("phase_offset", v, Kind::Angle)?),
        };
        let spokes = match get("spokes")? {
            "match" => SpokeRule::MatchOptical,
            v => SpokeRule::Fixed(parse_int("spokes", v)?),
        };
        let wavelength = length("wavelength")?;
        let mode = LgMode::new(l, p, wavelength, length("waist")?, phase.phase_for(l))
            .map_err(|e| CliError::config("l/p/wavelength/waist/phase_offset", e))?;
        let windmill = Windmill::new(
            spokes.spokes_for(l),
            length("radius")?,
            length("arc_length")?,
            length("thickness")?,
            parse_quantity("mass_per_spoke", get("mass_per_spoke")?, Kind::Mass)?,
            parse_number("epsilon", get("epsilon")?)?,
        )
        .map_err(|e| CliError::config("spokes/radius/arc_length/thickness/mass_per_spoke/epsilon", e))?;

        let cavity_length = length("cavity_length")?;
        let omega_phi = parse_quantity("omega_phi", get("omega_phi")?, Kind::AngularFrequency)?;
        let phi0 = parse_quantity("phi0", get("phi0")?, Kind::Angle)?;
        let cavity = match get("omega_c0")? {
            "auto" => Cavity::for_wavelength(cavity_length, wavelength, omega_phi)
                .and_then(|c| Cavity::new(c.length(), c.omega_c0(), c.omega_phi(), phi0)),
            v => Cavity::new(cavity_length, parse_quantity("omega_c0", v, Kind::AngularFrequency)?, omega_phi, phi0),
        }
        .map_err(|e| CliError::config("cavity_length/omega_phi/omega_c0/phi0", e))?;

        let gamma = match (values.get("gamma_cav"), values.get("gamma_target")) {
            (Some(_), Some(_)) => return Err(CliError::config("gamma_target", "conflicts with gamma_cav")),
            (Some(v), None) => Some(GammaSource::Rate(non_negative("gamma_cav", parse_quantity("gamma_cav", v, Kind::Rate)?)?)),
            (None, Some(v)) => {
                let target = non_negative("gamma_target", parse_quantity("gamma_target", v, Kind::Rate)?)?;
                let (tl, tp) = parse_mode_pair("gamma_target_mode", get("gamma_target_mode")?)?;
                Some(GammaSource::Calibrated { target, l: tl, p: tp })
            }
            (None, None) => None,
        };

        let sweep_l = parse_range::<i32>("sweep_l", get("sweep_l")?)?;
        let fig2_l = parse_range::<i32>("fig2_l", get("fig2_l")?)?;
        for (name, r) in [("sweep_l", &sweep_l), ("fig2_l", &fig2_l)] {
            if *r.start() < 1 {
                return Err(CliError::config(name, "l must be >= 1"));
            }
        }

        let rel_tol = parse_number("rel_tol", get("rel_tol")?)?;
        if !(rel_tol > 0.0 && rel_tol < 1.0) {
            return Err(CliError::config("rel_tol", "must lie in (0, 1)"));
        }
        let fd_step = positive("fd_step", parse_quantity("fd_step", get("fd_step")?, Kind::Angle)?)?;
        let fd_step_second =
            positive("fd_step_second", parse_quantity("fd_step_second", get("fd_step_second")?, Kind::Angle)?)?;
        let route_tolerance = positive("route_tolerance", parse_number("route_tolerance", get("route_tolerance")?)?)?;
        let axial = match get("axial_model")? {
            "exact" => AxialModel::Exact,
            "thin_slab" => AxialModel::ThinSlab,
            v => return Err(CliError::config("axial_model", format!("`{v}` is not one of exact, thin_slab"))),
        };
        let options = CouplingOptions {
            quadrature: QuadratureOptions::with_rel_tol(rel_tol),
            fd_step,
            fd_step_second,
            route_tolerance,
            axial,
        };

        Ok(Self {
            mode,
            windmill,
            cavity,
            spokes,
            phase,
            gamma,
            gamma_note: get("gamma_note")?.to_string(),
            sweep_l,
            sweep_p: parse_range::<u32>("sweep_p", get("sweep_p")?)?,
            fig2_l,
            p_max: parse_int("p_max", get("p_max")?)?,
            options,
            feasibility_threshold: positive(
                "feasibility_threshold",
                parse_number("feasibility_threshold", get("feasibility_threshold")?)?,
            )?,
            output_dir: PathBuf::from(get("output_dir")?),
            values,
        })
    }

    /// Replaces the quadrature relative tolerance.
    pub fn with_tolerance(mut self, rel_tol: f64) -> Result<Self, CliError> {
        if !(rel_tol > 0.0 && rel_tol < 1.0) {
            return Err(CliError::config("--tolerance", "must lie in (0, 1)"));
        }
        self.options.quadrature.rel_tol = rel_tol;
        self.values.insert("rel_tol", format!("{rel_tol:e}"));
        Ok(self)
    }
}

fn lookup(k: &str) -> Result<&'static KeySpec, CliError> {
    KEYS.iter().find(|s| s.name == k).ok_or_else(|| CliError::config(k.to_string(), "unknown key"))
}

fn split_assignment(line: &str) -> Option<(&str, &str)> {
    let (k, v) = line.split_once('=')?;
    let (k, v) = (k.trim(), v.trim());
    (!k.is_empty() && !v.is_empty()).then_some((k, v))
}

fn parse_number(name: &str, v: &str) -> Result<f64, CliError> {
    let x: f64 = v.parse().map_err(|_| CliError::config(name, format!("`{v}` is not a number")))?;
    if !x.is_finite() {
        return Err(CliError::config(name, "must be finite"));
    }
    Ok(x)
}

fn parse_int<T: std::str::FromStr>(name: &str, v: &str) -> Result<T, CliError> {
    v.parse().map_err(|_| CliError::config(name, format!("`{v}` is not a valid integer")))
}

fn positive(name: &str, x: f64) -> Result<f64, CliError> {
    if x > 0.0 { Ok(x) } else { Err(CliError::config(name, "must be positive")) }
}

fn non_negative(name: &str, x: f64) -> Result<f64, CliError> {
    if x >= 0.0 { Ok(x) } else { Err(CliError::config(name, "must be >= 0")) }
}

/// Value with a unit suffix, converted to SI (angular frequencies to rad/s,
/// rates to Hz).
fn parse_quantity(name: &str, v: &str, kind: Kind) -> Result<f64, CliError> {
    let (num, unit) = match v.find(|c: char| c.is_whitespace()) {
        Some(i) => (&v[..i], v[i..].trim()),
        None => (v, ""),
    };
    // (multiplier, divisor): dividing by an exact power of ten keeps
    // "20 um" identical to the literal 20e-6
    let (mul, div) = match (kind, unit) {
        (Kind::Length, "m") => (1.0, 1.0),
        (Kind::Length, "cm") => (1.0, 1e2),
        (Kind::Length, "mm") => (1.0, 1e3),
        (Kind::Length, "um" | "µm" | "μm") => (1.0, 1e6),
        (Kind::Length, "nm") => (1.0, 1e9),
        (Kind::Mass, "kg") => (1.0, 1.0),
        (Kind::Mass, "g") => (1.0, 1e3),
        (Kind::AngularFrequency, "rad/s") => (1.0, 1.0),
        (Kind::AngularFrequency, "Hz") => (2.0 * PI, 1.0),
        (Kind::AngularFrequency, "kHz") => (2.0 * PI * 1e3, 1.0),
        (Kind::AngularFrequency, "MHz") => (2.0 * PI * 1e6, 1.0),
        (Kind::Rate, "Hz") => (1.0, 1.0),
        (Kind::Rate, "kHz") => (1e3, 1.0),
        (Kind::Angle, "rad") => (1.0, 1.0),
        (Kind::Angle, "deg") => (PI / 180.0, 1.0),
        (_, "") => return Err(CliError::config(name, format!("`{v}` needs a unit ({})", units_for(kind)))),
        (_, u) => return Err(CliError::config(name, format!("unit `{u}` not accepted here ({})", units_for(kind)))),
    };
    Ok(parse_number(name, num)? * mul / div)
}

fn units_for(kind: Kind) -> &'static str {
    match kind {
        Kind::Length => "m, cm, mm, um, nm",
        Kind::Mass => "kg, g",
        Kind::AngularFrequency => "rad/s, Hz, kHz, MHz",
        Kind::Rate => "Hz, kHz",
        Kind::Angle => "rad, deg",
    }
}

/// `a..b` (inclusive) or a single value.
fn parse_range<T: std::str::FromStr + PartialOrd + Copy>(name: &str, v: &str) -> Result<RangeInclusive<T>, CliError> {
    let (a, b) = match v.split_once("..") {
        Some((a, b)) => (a.trim(), b.trim().trim_start_matches('=')),
        None => (v, v),
    };
    let (a, b) = (parse_int::<T>(name, a)?, parse_int::<T>(name, b)?);
    if a > b {
        return Err(CliError::config(name, "range start exceeds end"));
    }
    Ok(a..=b)
}

fn parse_mode_pair(name: &str, v: &str) -> Result<(i32, u32), CliError> {
    let (l, p) = v.split_once(',').ok_or_else(|| CliError::config(name, "expected `l, p`"))?;
    Ok((parse_int(name, l.trim())?, parse_int(name, p.trim())?))
}
