use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::PathBuf;

use lgtorsion::coupling::{
    cell_inputs, closed_form_ratio_p0, coupling_analytic_p0, coupling_linear, coupling_linear_finite_difference,
    coupling_quadratic, find_optimal_p, sweep, SweepSpec,
};
use lgtorsion::decoherence::{decoherence_rate, feasibility_margin, scattering_ratio};
use lgtorsion::lgmode::{intensity_map, CartesianGrid};
use lgtorsion::model::{assemble, polaron_shift, recommended_phonon_cutoff};
use lgtorsion::windmill::validate_perturbative;
use lgtorsion::{CouplingResult, DecoherenceInput, RotorPose};
use rayon::prelude::*;

use crate::error::CliError;
use crate::output::{error_field, sci, write_table, Table};
use crate::scenario::{GammaSource, Scenario};

/// What a command printed and which files it produced.
#[derive(Debug, Clone, Default)]
pub struct Output {
    pub stdout: String,
    pub warnings: Vec<String>,
    pub files: Vec<PathBuf>,
}

pub struct Context {
    pub scenario: Scenario,
    pub out_dir: PathBuf,
}

impl Context {
    pub fn new(scenario: Scenario, out_dir: Option<PathBuf>) -> Self {
        let out_dir = out_dir.unwrap_or_else(|| scenario.output_dir.clone());
        Self { scenario, out_dir }
    }

    fn write(&self, name: &str, table: &Table, command: &str) -> Result<PathBuf, CliError> {
        write_table(&self.out_dir, name, table, command, &self.scenario.hash())
    }

    fn warnings(&self) -> Vec<String> {
        let s = &self.scenario;
        let mut w: Vec<String> =
            validate_perturbative(&s.windmill, &s.mode, &s.cavity).iter().map(ToString::to_string).collect();
        w.extend(s.cavity.rayleigh_check(&s.mode).map(|x| x.to_string()));
        w
    }
}

fn hz(rad_per_s: f64) -> f64 {
    rad_per_s / (2.0 * PI)
}

pub fn coupling(ctx: &Context) -> Result<Output, CliError> {
    let s = &ctx.scenario;
    let c = coupling_linear(&s.mode, &s.windmill, &s.cavity, &s.options)?;
    let mut t = Table::new(&[
        "l",
        "p",
        "spokes",
        "phase_offset",
        "method",
        "g_rad_s",
        "g_hz",
        "g_ratio",
        "g_fd_hz",
        "quadrature_error",
        "errors",
    ]);
    let row = vec![
        s.mode.l().to_string(),
        s.mode.p().to_string(),
        s.windmill.spokes().to_string(),
        sci(s.mode.phase_offset()),
        c.method.as_str().to_string(),
        sci(c.g),
        sci(c.g_hz()),
        sci(c.g_ratio),
        c.g_cross_check.map(|g| sci(hz(g))).unwrap_or_default(),
        sci(c.quadrature_error),
        String::new(),
    ];
    let mut stdout = t.header.join(",") + "\n" + &row.join(",") + "\n";
    t.push(row);
    let path = ctx.write("coupling.csv", &t, "coupling")?;
    writeln!(stdout, "g/2π = {:.4} Hz ({} rad/s), g/B = {:.6}", c.g_hz(), sci(c.g), c.g_ratio).unwrap();
    Ok(Output { stdout, warnings: ctx.warnings(), files: vec![path] })
}

pub fn fig2(ctx: &Context) -> Result<Output, CliError> {
    let s = &ctx.scenario;
    let ratio = s.windmill.radius() / s.mode.waist();
    let rows: Vec<Vec<String>> = s
        .fig2_l
        .clone()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&l| {
            let closed = closed_form_ratio_p0(l, ratio);
            let numeric = cell_inputs(&s.mode, &s.windmill, l, 0, s.spokes, s.phase)
                .and_then(|(m, w)| coupling_linear(&m, &w, &s.cavity, &s.options));
            let mut errors = Vec::new();
            let closed_field = closed.as_ref().map(|v| sci(*v)).unwrap_or_else(|e| {
                errors.push(error_field(e));
                String::new()
            });
            let numeric_field = numeric.as_ref().map(|c| sci(c.g_ratio.abs())).unwrap_or_else(|e| {
                errors.push(error_field(e));
                String::new()
            });
            let quotient = match (&closed, &numeric) {
                (Ok(a), Ok(c)) if *a != 0.0 => sci(c.g_ratio.abs() / a),
                _ => String::new(),
            };
            vec![l.to_string(), closed_field, numeric_field, quotient, errors.join("; ")]
        })
        .collect();
    let mut t = Table::new(&["l", "closed_form_g_ratio", "numeric_g_ratio", "numeric_over_closed_form", "errors"]);
    rows.into_iter().for_each(|r| t.push(r));
    let path = ctx.write("fig2.csv", &t, "fig2")?;
    Ok(Output { stdout: format!("wrote {}\n", path.display()), warnings: Vec::new(), files: vec![path] })
}

fn sweep_spec(s: &Scenario) -> SweepSpec {
    SweepSpec { l_values: s.sweep_l.clone(), p_values: s.sweep_p.clone(), spokes: s.spokes, phase: s.phase }
}

pub fn fig4(ctx: &Context) -> Result<Output, CliError> {
    let s = &ctx.scenario;
    let result = sweep(&s.mode, &s.windmill, &s.cavity, &sweep_spec(s), None, &s.options)?;
    let mut t = Table::new(&["l", "p", "spokes", "phase_offset", "g_ratio", "g_hz", "errors"]);
    for row in &result.rows {
        let prefix = vec![
            row.l.to_string(),
            row.p.to_string(),
            s.spokes.spokes_for(row.l).to_string(),
            sci(s.phase.phase_for(row.l)),
        ];
        let tail = match &row.outcome {
            Ok(cell) => vec![sci(cell.coupling.g_ratio.abs()), sci(cell.coupling.g_hz().abs()), String::new()],
            Err(e) => vec![String::new(), String::new(), error_field(e)],
        };
        t.push([prefix, tail].concat());
    }
    let path = ctx.write("fig4.csv", &t, "fig4")?;
    let mut stdout = format!("wrote {}\n", path.display());
    for l in s.sweep_l.clone() {
        if let Some((p, c)) = result.best_for(l) {
            writeln!(stdout, "l={l}: max |g|/2π = {:.4} Hz at p={p}", c.g_hz().abs()).unwrap();
        }
    }
    Ok(Output { stdout, warnings: Vec::new(), files: vec![path] })
}

/// Γ_cav in Hz from the scenario's Γ source.
pub fn resolve_gamma(s: &Scenario) -> Result<Option<DecoherenceInput>, CliError> {
    let gamma_cav = match s.gamma {
        None => return Ok(None),
        Some(GammaSource::Rate(g)) => g,
        Some(GammaSource::Calibrated { target, l, p }) => {
            let (m, w) = cell_inputs(&s.mode, &s.windmill, l, p, s.spokes, s.phase)?;
            let zeta = scattering_ratio(&m, &w, &s.options.quadrature)?;
            if zeta == 0.0 {
                return Err(CliError::config("gamma_target_mode", "reference mode does not illuminate the rotor"));
            }
            target / zeta
        }
    };
    Ok(Some(DecoherenceInput::new(gamma_cav, s.gamma_note.clone())?))
}

pub fn fig5(ctx: &Context) -> Result<Output, CliError> {
    let s = &ctx.scenario;
    let input = resolve_gamma(s)?
        .ok_or_else(|| CliError::config("gamma_cav", "fig5 needs gamma_cav or gamma_target"))?;
    let cells: Vec<(i32, u32)> =
        s.sweep_l.clone().flat_map(|l| s.sweep_p.clone().map(move |p| (l, p))).collect();
    let rows: Vec<Vec<String>> = cells
        .par_iter()
        .map(|&(l, p)| {
            let r = cell_inputs(&s.mode, &s.windmill, l, p, s.spokes, s.phase).and_then(|(m, w)| {
                let zeta = scattering_ratio(&m, &w, &s.options.quadrature)?;
                Ok((zeta, decoherence_rate(&input, zeta)?))
            });
            match r {
                Ok((zeta, gamma)) => vec![l.to_string(), p.to_string(), sci(zeta), sci(gamma), String::new()],
                Err(e) => vec![l.to_string(), p.to_string(), String::new(), String::new(), error_field(&e)],
            }
        })
        .collect();
    let mut t = Table::new(&["l", "p", "zeta", "gamma_hz", "errors"]);
    rows.into_iter().for_each(|r| t.push(r));
    let path = ctx.write("fig5.csv", &t, "fig5")?;
    Ok(Output {
        stdout: format!("wrote {} (gamma_cav = {} Hz)\n", path.display(), sci(input.gamma_cav)),
        warnings: Vec::new(),
        files: vec![path],
    })
}

/// Field maps for (l, p) = (3, 0) and (3, 5) at φ' = 0 on a shared grid,
/// plus the footprint of a three-spoke rotor.
pub fn fig3(ctx: &Context) -> Result<Output, CliError> {
    let s = &ctx.scenario;
    let modes = [s.mode.with_indices(3, 0).with_phase_offset(0.0)?, s.mode.with_indices(3, 5).with_phase_offset(0.0)?];
    let grid = CartesianGrid::default_for(&modes[1]);
    let mut stdout = String::new();
    let mut files = Vec::new();
    for m in &modes {
        let map = intensity_map(m, &grid)?;
        let mut t = Table::new(&["x_m", "y_m", "intensity"]);
        for iy in 0..grid.ny {
            for ix in 0..grid.nx {
                t.push(vec![sci(grid.x(ix)), sci(grid.y(iy)), sci(map.get(ix, iy))]);
            }
        }
        let name = format!("fig3_l3_p{}.csv", m.p());
        files.push(ctx.write(&name, &t, "fig3")?);
        writeln!(stdout, "{name}: {} lobes", map.local_maxima(1e-6).len()).unwrap();
    }
    let rotor = s.windmill.with_spokes(3)?;
    let mut t = Table::new(&["x_m", "y_m"]);
    for (x, y) in rotor.outline(RotorPose::EQUILIBRIUM, 64) {
        t.push(vec![sci(x), sci(y)]);
    }
    files.push(ctx.write("fig3_outline.csv", &t, "fig3")?);
    Ok(Output { stdout, warnings: Vec::new(), files })
}

pub fn optimize(ctx: &Context, l: Option<i32>, p_max: Option<u32>) -> Result<Output, CliError> {
    let s = &ctx.scenario;
    let l = l.unwrap_or(s.mode.l());
    let p_max = p_max.unwrap_or(s.p_max);
    let (p, c) = find_optimal_p(&s.mode, &s.windmill, &s.cavity, l, p_max, s.spokes, s.phase, &s.options)?;
    let stdout = format!(
        "l={l} p_max={p_max} R={} m\np* = {p}\ng*/2π = {:.4} Hz (g/B = {:.6})\n",
        sci(s.windmill.radius()),
        c.g_hz().abs(),
        c.g_ratio.abs()
    );
    Ok(Output { stdout, warnings: Vec::new(), files: Vec::new() })
}

pub enum Verdict {
    Feasible,
    NotFeasible,
    NotAvailable,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Feasible => "feasible",
            Verdict::NotFeasible => "not feasible",
            Verdict::NotAvailable => "n/a",
        }
    }
}

fn describe(c: &lgtorsion::Result<CouplingResult>) -> String {
    match c {
        Ok(c) => format!("g/2π = {:.6} Hz, g = {} rad/s, g/B = {:.6}", c.g_hz(), sci(c.g), c.g_ratio),
        Err(e) => format!("failed: {e}"),
    }
}

pub fn report(ctx: &Context) -> Result<Output, CliError> {
    let s = &ctx.scenario;
    let (m, w, cav) = (&s.mode, &s.windmill, &s.cavity);
    let mut o = String::new();
    writeln!(o, "scenario sha256 {}", s.hash()).unwrap();
    writeln!(o, "\n[parameters]").unwrap();
    writeln!(o, "  mode          l = {}, p = {}, φ' = {} rad", m.l(), m.p(), sci(m.phase_offset())).unwrap();
    writeln!(o, "  beam          λ = {} m, w0 = {} m, z_R = {} m", sci(m.wavelength()), sci(m.waist()), sci(m.rayleigh_range())).unwrap();
    writeln!(
        o,
        "  rotor         spokes = {}, R = {} m, s = {} m, h = {} m, m = {} kg/spoke, ε = {}",
        w.spokes(),
        sci(w.radius()),
        sci(w.arc_length()),
        sci(w.thickness()),
        sci(w.mass_per_spoke()),
        w.epsilon()
    )
    .unwrap();
    writeln!(o, "  inertia       I = {} kg m²", sci(w.moment_of_inertia())).unwrap();
    writeln!(
        o,
        "  cavity        D = {} m, ω_c0 = {} rad/s, ω_φ = {} rad/s, φ0 = {} rad",
        sci(cav.length()),
        sci(cav.omega_c0()),
        sci(cav.omega_phi()),
        sci(cav.phi0())
    )
    .unwrap();

    let warnings = ctx.warnings();
    writeln!(o, "\n[warnings]").unwrap();
    if warnings.is_empty() {
        writeln!(o, "  none").unwrap();
    }
    for x in &warnings {
        writeln!(o, "  {x}").unwrap();
    }

    writeln!(o, "\n[coupling]").unwrap();
    let linear = coupling_linear(m, w, cav, &s.options);
    writeln!(o, "  semi-analytic       {}", describe(&linear)).unwrap();
    writeln!(o, "  finite-difference   {}", describe(&coupling_linear_finite_difference(m, w, cav, &s.options))).unwrap();
    if m.p() == 0 {
        writeln!(o, "  closed form         {}", describe(&coupling_analytic_p0(m, w, cav))).unwrap();
    } else {
        writeln!(o, "  closed form         n/a (p > 0)").unwrap();
    }
    for (label, mode) in [("scenario φ'", Ok(*m)), ("φ' = 0", m.with_phase_offset(0.0))] {
        let q = mode.and_then(|mode| coupling_quadratic(&mode, w, cav, &s.options));
        match q {
            Ok(q) => writeln!(o, "  quadratic ({label})   g2/2π = {} Hz (stencil rel. error {})", sci(hz(q.g2)), sci(q.estimated_rel_error)),
            Err(e) => writeln!(o, "  quadratic ({label})   failed: {e}"),
        }
        .unwrap();
    }

    writeln!(o, "\n[decoherence]").unwrap();
    let zeta = scattering_ratio(m, w, &s.options.quadrature);
    let gamma_input = resolve_gamma(s)?;
    match &zeta {
        Ok(z) => writeln!(o, "  ζ = {}", sci(*z)).unwrap(),
        Err(e) => writeln!(o, "  ζ failed: {e}").unwrap(),
    }
    let gamma = match (&gamma_input, &zeta) {
        (Some(input), Ok(z)) => {
            let g = decoherence_rate(input, *z)?;
            writeln!(o, "  Γ_cav = {} Hz ({}), Γ = {} Hz", sci(input.gamma_cav), input.note, sci(g)).unwrap();
            Some(g)
        }
        _ => {
            writeln!(o, "  Γ = n/a (no gamma_cav or gamma_target)").unwrap();
            None
        }
    };

    writeln!(o, "\n[margin]").unwrap();
    let verdict = match (gamma, &linear) {
        (None, _) => {
            writeln!(o, "  Γ/g = n/a").unwrap();
            Verdict::NotAvailable
        }
        (Some(_), Err(_)) => Verdict::NotFeasible,
        (Some(gamma), Ok(c)) => match feasibility_margin(c.g_hz(), gamma, s.feasibility_threshold) {
            Ok(margin) => {
                writeln!(o, "  Γ/g = {} (threshold {})", sci(margin.ratio), s.feasibility_threshold).unwrap();
                if margin.feasible { Verdict::Feasible } else { Verdict::NotFeasible }
            }
            Err(e) => {
                writeln!(o, "  Γ/g undefined: {e}").unwrap();
                Verdict::NotFeasible
            }
        },
    };
    writeln!(o, "  verdict: {}", verdict.as_str()).unwrap();

    writeln!(o, "\n[polaron check]").unwrap();
    match &linear {
        Ok(c) => {
            let sys = assemble(c, cav)?;
            for n in 1..=3 {
                let cutoff = recommended_phonon_cutoff(&sys, n);
                let shift = polaron_shift(&sys, n, cutoff);
                let exact = -sys.g * sys.g * (n * n) as f64 / sys.omega_phi;
                let dev = if exact != 0.0 { (shift - exact).abs() / exact.abs() } else { shift.abs() };
                writeln!(o, "  n = {n}: eigen {} rad/s, -g²n²/ω_φ {} rad/s, deviation {}", sci(shift), sci(exact), sci(dev))
                    .unwrap();
            }
        }
        Err(e) => writeln!(o, "  skipped: {e}").unwrap(),
    }
    Ok(Output { stdout: o, warnings, files: Vec::new() })
}

