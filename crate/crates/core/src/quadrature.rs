//! Adaptive Gauss–Legendre quadrature on finite intervals.
//!
//! Each panel is integrated with a 10- and a 20-point rule; the difference is
//! the panel's error estimate. Panels are bisected until the summed estimate
//! drops below `max(abs_tol, rel_tol · |integral|)`.

use std::sync::OnceLock;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Hard cap on the number of panels.
    pub max_panels: usize,
    /// Panels the interval is split into before adaptation starts.
    pub initial_panels: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-10, abs_tol: 0.0, max_panels: 20_000, initial_panels: 4 }
    }
}

impl QuadratureOptions {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self { rel_tol, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    /// Absolute error estimate.
    pub error: f64,
    pub panels: usize,
}

impl Integral {
    pub fn relative_error(&self) -> f64 {
        if self.value == 0.0 {
            if self.error == 0.0 { 0.0 } else { f64::INFINITY }
        } else {
            self.error / self.value.abs()
        }
    }
}

/// Nodes and weights of an n-point Gauss–Legendre rule on [−1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Newton iteration on Pₙ starting from the Tricomi approximation.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Fixed-rule integral of `f` over [a, b].
    pub fn integrate(&self, f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn rule_pair() -> &'static (GaussLegendre, GaussLegendre) {
    static RULES: OnceLock<(GaussLegendre, GaussLegendre)> = OnceLock::new();
    RULES.get_or_init(|| (GaussLegendre::new(10), GaussLegendre::new(20)))
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn eval_panel(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> Panel {
    let (low, high) = rule_pair();
    let coarse = low.integrate(f, a, b);
    let fine = high.integrate(f, a, b);
    Panel { a, b, value: fine, error: (fine - coarse).abs() }
}

/// Integrate `f` over [a, b] adaptively.
///
/// Returns [`Error::NonConvergence`] with the achieved relative estimate when
/// the panel budget runs out.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, opts: &QuadratureOptions) -> Result<Integral> {
    if a == b {
        return Ok(Integral { value: 0.0, error: 0.0, panels: 0 });
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain("integrate", "interval bounds must be finite"));
    }
    let n0 = opts.initial_panels.max(1);
    let width = (b - a) / n0 as f64;
    let mut panels: Vec<Panel> = (0..n0)
        .map(|i| {
            let lo = a + i as f64 * width;
            let hi = if i + 1 == n0 { b } else { lo + width };
            eval_panel(&f, lo, hi)
        })
        .collect();

    loop {
        let value: f64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        if !value.is_finite() {
            return Err(Error::NonConvergence { what: "adaptive quadrature", estimate: f64::INFINITY });
        }
        let target = opts.abs_tol.max(opts.rel_tol * value.abs());
        if error <= target || error == 0.0 {
            return Ok(Integral { value, error, panels: panels.len() });
        }
        if panels.len() >= opts.max_panels {
            let estimate = if value == 0.0 { f64::INFINITY } else { error / value.abs() };
            return Err(Error::NonConvergence { what: "adaptive quadrature", estimate });
        }
        // split the worst panel
        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("at least one panel");
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            // interval exhausted at double precision
            let estimate = if value == 0.0 { f64::INFINITY } else { error / value.abs() };
            return Err(Error::NonConvergence { what: "adaptive quadrature", estimate });
        }
        panels.push(eval_panel(&f, p.a, mid));
        panels.push(eval_panel(&f, mid, p.b));
    }
}
