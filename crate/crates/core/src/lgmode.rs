//! Standing-wave superposition of the counter-rotating LG_{l,p} and LG_{−l,p}
//! cavity modes:
//!
//! |ψ|² = A_{l,p} (w₀/w)² (r√2/w)^{2|l|} e^{−2r²/w²} [L_p^{|l|}(2r²/w²)]² cos²(kz) cos²(l(φ−φ'))
//!
//! with A_{l,p} = 2 p! / [(1+δ_{l,0}) (|l|+p)!]. The profile is dimensionless
//! and every physical quantity built from it is a ratio of integrals, so its
//! overall scale never matters.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::quadrature::{self, Integral, QuadratureOptions};
use crate::specfun;

/// Above this |L| the intensity is assembled in log space.
const LOG_SPACE_THRESHOLD: f64 = 1e100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LgMode {
    l: i32,
    p: u32,
    wavelength: f64,
    waist: f64,
    phase_offset: f64,
    ln_norm: f64,
}

impl LgMode {
    pub fn new(l: i32, p: u32, wavelength: f64, waist: f64, phase_offset: f64) -> Result<Self> {
        if !(wavelength > 0.0 && wavelength.is_finite()) {
            return Err(Error::invalid("wavelength", format!("{wavelength} must be positive")));
        }
        if !(waist > 0.0 && waist.is_finite()) {
            return Err(Error::invalid("waist", format!("{waist} must be positive")));
        }
        if !phase_offset.is_finite() {
            return Err(Error::invalid("phase_offset", "must be finite"));
        }
        let ln_norm = ln_normalization(l, p);
        Ok(Self { l, p, wavelength, waist, phase_offset, ln_norm })
    }

    /// Same beam, but with φ' = π/(4|l|), the phase that makes the coupling
    /// linear in the rotor angle.
    pub fn with_linear_phase(self) -> Self {
        Self { phase_offset: linear_phase_offset(self.l), ..self }
    }

    pub fn with_phase_offset(self, phase_offset: f64) -> Result<Self> {
        Self::new(self.l, self.p, self.wavelength, self.waist, phase_offset)
    }

    pub fn with_indices(self, l: i32, p: u32) -> Self {
        Self { l, p, ln_norm: ln_normalization(l, p), ..self }
    }

    pub fn with_waist(self, waist: f64) -> Result<Self> {
        Self::new(self.l, self.p, self.wavelength, waist, self.phase_offset)
    }

    pub fn l(&self) -> i32 {
        self.l
    }

    pub fn abs_l(&self) -> u32 {
        self.l.unsigned_abs()
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn waist(&self) -> f64 {
        self.waist
    }

    pub fn phase_offset(&self) -> f64 {
        self.phase_offset
    }

    pub fn wavenumber(&self) -> f64 {
        TAU / self.wavelength
    }

    pub fn rayleigh_range(&self) -> f64 {
        PI * self.waist * self.waist / self.wavelength
    }

    /// A_{l,p}.
    pub fn normalization(&self) -> f64 {
        self.ln_norm.exp()
    }

    /// ln A_{l,p}; A itself underflows for very large indices.
    pub fn ln_normalization(&self) -> f64 {
        self.ln_norm
    }

    /// w(z) = w₀ √(1 + (z/z_R)²).
    pub fn beam_width(&self, z: f64) -> f64 {
        let zr = self.rayleigh_range();
        self.waist * (1.0 + (z / zr).powi(2)).sqrt()
    }

    /// A u^{|l|} e^{−u} [L_p^{|l|}(u)]² at u = 2r²/w².
    pub fn radial_weight(&self, u: f64) -> f64 {
        debug_assert!(u >= 0.0);
        let alpha = self.abs_l();
        let (ln_abs_lag, lag) = scaled_laguerre(self.p, alpha, u);
        if let Some(lag) = lag.filter(|v| v.abs() <= LOG_SPACE_THRESHOLD) {
            let direct = self.normalization() * u.powi(alpha as i32) * (-u).exp() * lag * lag;
            if direct.is_finite() && (direct != 0.0 || lag == 0.0 || u == 0.0) {
                return direct;
            }
        }
        if ln_abs_lag == f64::NEG_INFINITY || (u == 0.0 && alpha > 0) {
            return 0.0;
        }
        let ln_pow = if alpha == 0 { 0.0 } else { alpha as f64 * u.ln() };
        (self.ln_norm + ln_pow - u + 2.0 * ln_abs_lag).exp()
    }

    /// cos²(l(φ − φ')).
    pub fn angular_factor(&self, phi: f64) -> f64 {
        (self.l as f64 * (phi - self.phase_offset)).cos().powi(2)
    }

    /// cos²(kz).
    pub fn axial_factor(&self, z: f64) -> f64 {
        (self.wavenumber() * z).cos().powi(2)
    }

    /// (w₀/w)² · radial_weight(2r²/w²): the transverse profile without the
    /// angular and standing-wave factors.
    pub fn radial_profile(&self, r: f64, z: f64) -> f64 {
        let w = self.beam_width(z);
        let u = 2.0 * r * r / (w * w);
        (self.waist / w).powi(2) * self.radial_weight(u)
    }

    pub fn intensity(&self, pt: &CylindricalPoint) -> f64 {
        self.radial_profile(pt.r, pt.z) * self.axial_factor(pt.z) * self.angular_factor(pt.phi)
    }

    /// Integral of cos²(l(φ−φ')) over a full turn.
    pub fn angular_period_integral(&self) -> f64 {
        if self.l == 0 { TAU } else { PI }
    }

    /// Radius beyond which the Laguerre weight is in its evanescent tail.
    pub fn outer_radius(&self) -> f64 {
        self.waist * ((2 * self.p + self.abs_l() + 1) as f64).sqrt()
    }
}

/// φ' = π/(4|l|); zero for l = 0.
pub fn linear_phase_offset(l: i32) -> f64 {
    if l == 0 { 0.0 } else { PI / (4.0 * l.unsigned_abs() as f64) }
}

fn ln_normalization(l: i32, p: u32) -> f64 {
    let alpha = l.unsigned_abs();
    let delta = if l == 0 { 2.0 } else { 1.0 };
    // (|l|+p)!/p! as a product of |l| integers, exact while it fits
    let ratio: f64 = (p + 1..=p + alpha).map(|k| k as f64).product();
    if ratio.is_finite() {
        (2.0 / (delta * ratio)).ln()
    } else {
        2f64.ln() - delta.ln() + specfun::ln_factorial(p) - specfun::ln_factorial(p + alpha)
    }
}

/// Upward Laguerre recurrence with rescaling; returns ln|L| and, when it fits
/// without rescaling, the plain value.
fn scaled_laguerre(p: u32, alpha: u32, x: f64) -> (f64, Option<f64>) {
    const RESCALE: f64 = 1e150;
    let a = alpha as f64;
    let mut prev = 1.0;
    if p == 0 {
        return (0.0, Some(1.0));
    }
    let mut cur = 1.0 + a - x;
    let mut ln_scale = 0.0;
    for k in 1..p {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 + a - x) * cur - (k + a) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            prev /= RESCALE;
            cur /= RESCALE;
            ln_scale += RESCALE.ln();
        }
    }
    let ln_abs = if cur == 0.0 { f64::NEG_INFINITY } else { cur.abs().ln() + ln_scale };
    let plain = (ln_scale == 0.0).then_some(cur);
    (ln_abs, plain)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylindricalPoint {
    pub r: f64,
    /// Reduced to [0, 2π).
    pub phi: f64,
    pub z: f64,
}

impl CylindricalPoint {
    pub fn new(r: f64, phi: f64, z: f64) -> Result<Self> {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::invalid("r", format!("{r} must be finite and >= 0")));
        }
        if !phi.is_finite() || !z.is_finite() {
            return Err(Error::invalid("phi/z", "must be finite"));
        }
        Ok(Self { r, phi: reduce_angle(phi), z })
    }

    pub fn from_cartesian(x: f64, y: f64, z: f64) -> Self {
        Self { r: x.hypot(y), phi: reduce_angle(y.atan2(x)), z }
    }
}

/// Angle reduced to [0, 2π).
pub fn reduce_angle(phi: f64) -> f64 {
    let r = phi.rem_euclid(TAU);
    if r >= TAU { 0.0 } else { r }
}

/// Location of the innermost radial intensity maximum at z = 0.
///
/// Uses the closed form w₀√(|l|/2) for p = 0 and [`radial_max_scan`]
/// otherwise.
pub fn radial_max(mode: &LgMode) -> f64 {
    if mode.p() == 0 {
        mode.waist() * (mode.abs_l() as f64 / 2.0).sqrt()
    } else {
        radial_max_scan(mode)
    }
}

/// Innermost local maximum of the z = 0 radial profile: 2048-sample scan of
/// [0, w₀√(2(|l|+2p+1))] followed by golden-section refinement.
pub fn radial_max_scan(mode: &LgMode) -> f64 {
    const SAMPLES: usize = 2048;
    let upper = mode.waist() * (2.0 * (mode.abs_l() + 2 * mode.p() + 1) as f64).sqrt();
    let step = upper / (SAMPLES - 1) as f64;
    let f = |r: f64| mode.radial_profile(r, 0.0);
    let values: Vec<f64> = (0..SAMPLES).map(|i| f(i as f64 * step)).collect();
    if values[0] > values[1] {
        return 0.0;
    }
    let peak = (1..SAMPLES - 1)
        .find(|&i| values[i] >= values[i - 1] && values[i] > values[i + 1])
        .unwrap_or(SAMPLES - 1);
    let lo = (peak as f64 - 1.0).max(0.0) * step;
    let hi = ((peak + 1) as f64 * step).min(upper);
    golden_section_max(f, lo, hi, 1e-12 * mode.waist())
}

fn golden_section_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// ∫₀^∞∫₀^{2π} |ψ|² r dr dφ at fixed z. Analytically (πw₀²/2)·cos²(kz) for
/// every (l, p); computed here by radial quadrature in u = 2r²/w².
pub fn transverse_norm(mode: &LgMode, z: f64, opts: &QuadratureOptions) -> Result<Integral> {
    let w = mode.beam_width(z);
    let scale = (mode.waist() / w).powi(2) * w * w / 4.0
        * mode.angular_period_integral()
        * mode.axial_factor(z);
    let u_max = evanescent_cutoff(mode);
    let opts = QuadratureOptions {
        initial_panels: opts.initial_panels.max(8 + 2 * mode.p() as usize).max((u_max / 4.0).ceil() as usize),
        ..*opts
    };
    let radial = quadrature::integrate(|u| mode.radial_weight(u), 0.0, u_max, &opts)?;
    Ok(Integral { value: radial.value * scale, error: radial.error * scale.abs(), panels: radial.panels })
}

/// Value of u = 2r²/w² past which the radial weight is negligible: the
/// classical turning point 4p + 2|l| + 2 plus a generous evanescent margin.
pub fn evanescent_cutoff(mode: &LgMode) -> f64 {
    let turning = (4 * mode.p() + 2 * mode.abs_l() + 2) as f64;
    turning + 20.0 * turning.sqrt() + 60.0
}

/// Square sampling window centred on the beam axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartesianGrid {
    pub nx: usize,
    pub ny: usize,
    pub half_width: f64,
    pub z: f64,
}

impl CartesianGrid {
    /// 512 × 512 over [−1.2 r_outer, 1.2 r_outer]² at z = 0.
    pub fn default_for(mode: &LgMode) -> Self {
        Self { nx: 512, ny: 512, half_width: 1.2 * mode.outer_radius(), z: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 2 || self.ny < 2 {
            return Err(Error::invalid("grid", "need at least 2 samples per axis"));
        }
        if !(self.half_width > 0.0) || !self.half_width.is_finite() {
            return Err(Error::invalid("grid", "half width must be positive"));
        }
        Ok(())
    }

    pub fn x(&self, ix: usize) -> f64 {
        -self.half_width + 2.0 * self.half_width * ix as f64 / (self.nx - 1) as f64
    }

    pub fn y(&self, iy: usize) -> f64 {
        -self.half_width + 2.0 * self.half_width * iy as f64 / (self.ny - 1) as f64
    }
}

/// Row-major (y-major) intensity samples.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldMap {
    pub grid: CartesianGrid,
    pub values: Vec<f64>,
}

impl FieldMap {
    pub fn get(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.grid.nx + ix]
    }

    /// Grid indices (ix, iy) of strict local maxima over the 8-neighbourhood,
    /// ignoring samples below `rel_floor · max`. Exact ties are credited to
    /// the later sample in raster order.
    pub fn local_maxima(&self, rel_floor: f64) -> Vec<(usize, usize)> {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let max = self.values.iter().cloned().fold(0.0, f64::max);
        let floor = rel_floor * max;
        let mut peaks = Vec::new();
        for iy in 1..ny - 1 {
            for ix in 1..nx - 1 {
                let v = self.get(ix, iy);
                if v <= floor {
                    continue;
                }
                let is_peak = (-1i64..=1).all(|dy| {
                    (-1i64..=1).all(|dx| {
                        if dx == 0 && dy == 0 {
                            return true;
                        }
                        let n = self.get((ix as i64 + dx) as usize, (iy as i64 + dy) as usize);
                        let earlier = dy < 0 || (dy == 0 && dx < 0);
                        if earlier { v >= n } else { v > n }
                    })
                });
                if is_peak {
                    peaks.push((ix, iy));
                }
            }
        }
        peaks
    }
}

pub fn intensity_map(mode: &LgMode, grid: &CartesianGrid) -> Result<FieldMap> {
    grid.validate()?;
    let mut values = Vec::with_capacity(grid.nx * grid.ny);
    for iy in 0..grid.ny {
        let y = grid.y(iy);
        for ix in 0..grid.nx {
            let pt = CylindricalPoint::from_cartesian(grid.x(ix), y, grid.z);
            values.push(mode.intensity(&pt));
        }
    }
    Ok(FieldMap { grid: *grid, values })
}
