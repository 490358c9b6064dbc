//! Special functions for the Laguerre-Gaussian intensity profile and the
//! closed-form p = 0 coupling: associated Laguerre polynomials, the complete
//! and incomplete Gamma functions, and factorials.
//!
//! Everything here is real-valued and restricted to the non-negative
//! arguments the beam profile produces.

use crate::error::{Error, Result};

/// Largest n for which n! is representable in an f64.
pub const MAX_FACTORIAL: u32 = 170;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

const INC_GAMMA_EPS: f64 = 1e-14;
const INC_GAMMA_MAX_ITER: usize = 10_000;
const TINY: f64 = 1e-300;

/// n! as an f64, built by direct multiplication so that integer arguments of
/// [`gamma_complete`] return exactly the same value.
pub fn factorial(n: u32) -> Result<f64> {
    if n > MAX_FACTORIAL {
        return Err(Error::Overflow("factorial"));
    }
    Ok((2..=n).fold(1.0, |acc, k| acc * k as f64))
}

/// ln(n!), valid for every n.
pub fn ln_factorial(n: u32) -> f64 {
    if n <= MAX_FACTORIAL {
        // exact product, then log
        (2..=n).fold(1.0, |acc, k| acc * k as f64).ln()
    } else {
        lanczos_ln_gamma(n as f64 + 1.0)
    }
}

/// Natural log of Γ(a) for a > 0.
pub fn ln_gamma(a: f64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::domain("ln_gamma", format!("a = {a} must be positive and finite")));
    }
    if a.fract() == 0.0 && a <= (MAX_FACTORIAL + 1) as f64 {
        return Ok(ln_factorial(a as u32 - 1));
    }
    Ok(lanczos_ln_gamma(a))
}

/// Γ(a) for a > 0. Integer arguments up to 171 reproduce [`factorial`]
/// exactly; anything that would overflow an f64 is reported as an error.
pub fn gamma_complete(a: f64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::domain("gamma_complete", format!("a = {a} must be positive and finite")));
    }
    if a.fract() == 0.0 && a <= (MAX_FACTORIAL + 1) as f64 {
        return factorial(a as u32 - 1);
    }
    if a > 171.624 {
        return Err(Error::Overflow("gamma_complete"));
    }
    let value = if a < 0.5 {
        // reflection keeps the Lanczos sum in its accurate range
        std::f64::consts::PI / ((std::f64::consts::PI * a).sin() * lanczos_gamma(1.0 - a))
    } else {
        lanczos_gamma(a)
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Overflow("gamma_complete"))
    }
}

fn lanczos_sum(z: f64) -> f64 {
    // z is the shifted argument a - 1
    LANCZOS_COEFFS[1..]
        .iter()
        .enumerate()
        .fold(LANCZOS_COEFFS[0], |acc, (i, c)| acc + c / (z + i as f64 + 1.0))
}

fn lanczos_gamma(a: f64) -> f64 {
    let z = a - 1.0;
    let t = z + LANCZOS_G + 0.5;
    (2.0 * std::f64::consts::PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * lanczos_sum(z)
}

fn lanczos_ln_gamma(a: f64) -> f64 {
    if a < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * a).sin()).ln() - lanczos_ln_gamma(1.0 - a);
    }
    let z = a - 1.0;
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln()
}

/// Regularized pair (P, Q) with P + Q = 1.
///
/// Series for x < a + 1, Lentz continued fraction otherwise; whichever of
/// P or Q the branch computes directly is the accurate one.
fn inc_gamma_regularized(a: f64, x: f64) -> Result<(f64, f64)> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::domain("incomplete gamma", format!("a = {a} must be positive")));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::domain("incomplete gamma", format!("x = {x} must be finite and >= 0")));
    }
    if x == 0.0 {
        return Ok((0.0, 1.0));
    }
    let log_prefactor = -x + a * x.ln() - ln_gamma(a)?;
    if x < a + 1.0 {
        let p = lower_series(a, x)? * log_prefactor.exp();
        Ok((p, 1.0 - p))
    } else {
        let q = upper_continued_fraction(a, x)? * log_prefactor.exp();
        Ok((1.0 - q, q))
    }
}

/// Σ xⁿ / (a(a+1)…(a+n)).
fn lower_series(a: f64, x: f64) -> Result<f64> {
    let mut ap = a;
    let mut term = 1.0 / a;
    let mut sum = term;
    for _ in 0..INC_GAMMA_MAX_ITER {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * INC_GAMMA_EPS {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence { what: "incomplete gamma series", estimate: (term / sum).abs() })
}

/// Modified Lentz evaluation of the continued fraction for Q(a, x)·Γ(a)·eˣ·x⁻ᵃ.
fn upper_continued_fraction(a: f64, x: f64) -> Result<f64> {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=INC_GAMMA_MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < INC_GAMMA_EPS {
            return Ok(h);
        }
    }
    Err(Error::NonConvergence { what: "incomplete gamma continued fraction", estimate: f64::NAN })
}

/// Regularized upper incomplete gamma Q(a, x) = Γ(a, x) / Γ(a).
pub fn gamma_q(a: f64, x: f64) -> Result<f64> {
    inc_gamma_regularized(a, x).map(|(_, q)| q)
}

/// Regularized lower incomplete gamma P(a, x) = γ(a, x) / Γ(a).
pub fn gamma_p(a: f64, x: f64) -> Result<f64> {
    inc_gamma_regularized(a, x).map(|(p, _)| p)
}

/// Upper incomplete gamma Γ(a, x) = ∫ₓ^∞ t^(a−1) e^(−t) dt.
pub fn gamma_upper_incomplete(a: f64, x: f64) -> Result<f64> {
    let q = gamma_q(a, x)?;
    scale_by_gamma(q, a, "gamma_upper_incomplete")
}

/// Lower incomplete gamma γ(a, x) = ∫₀ˣ t^(a−1) e^(−t) dt.
///
/// Equal to Γ(a) − Γ(a, x) but computed without the cancellation that
/// difference suffers when x ≪ a.
pub fn gamma_lower_incomplete(a: f64, x: f64) -> Result<f64> {
    let p = gamma_p(a, x)?;
    scale_by_gamma(p, a, "gamma_lower_incomplete")
}

fn scale_by_gamma(regularized: f64, a: f64, func: &'static str) -> Result<f64> {
    if regularized == 0.0 {
        return Ok(0.0);
    }
    if let Ok(full) = gamma_complete(a) {
        let value = regularized * full;
        if value != 0.0 {
            return Ok(value);
        }
    }
    let value = (regularized.ln() + ln_gamma(a)?).exp();
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Overflow(func))
    }
}

/// Associated Laguerre polynomial L_p^α(x) by upward recurrence in p:
///
/// (k+1) L_{k+1} = (2k+1+α−x) L_k − (k+α) L_{k−1}.
pub fn assoc_laguerre(p: u32, alpha: u32, x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::domain("assoc_laguerre", format!("x = {x} must be finite and >= 0")));
    }
    let alpha = alpha as f64;
    let mut prev = 1.0;
    if p == 0 {
        return Ok(prev);
    }
    let mut cur = 1.0 + alpha - x;
    for k in 1..p {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
        if !cur.is_finite() {
            return Err(Error::Overflow("assoc_laguerre"));
        }
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    /// Composite Simpson, used as an independent brute-force oracle.
    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let n = n + n % 2;
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(a + i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn laguerre_low_orders() {
        assert_eq!(assoc_laguerre(0, 3, 7.2).unwrap(), 1.0);
        assert_eq!(assoc_laguerre(1, 2, 1.0).unwrap(), 2.0);
        // L_2^α(x) = (x² − 2(α+2)x + (α+1)(α+2)) / 2
        let (a, x) = (3.0, 1.7);
        let expected = (x * x - 2.0 * (a + 2.0) * x + (a + 1.0) * (a + 2.0)) / 2.0;
        assert!(rel(assoc_laguerre(2, 3, x).unwrap(), expected) < 1e-14);
    }

    #[test]
    fn laguerre_at_origin_is_binomial() {
        // L_p^α(0) = C(p+α, p)
        let c = factorial(14).unwrap() / (factorial(11).unwrap() * factorial(3).unwrap());
        assert!(rel(assoc_laguerre(11, 3, 0.0).unwrap(), c) < 1e-13);
    }

    #[test]
    fn laguerre_orthogonality_by_quadrature() {
        let f = |x: f64| {
            x.powi(3)
                * (-x).exp()
                * assoc_laguerre(5, 3, x).unwrap()
                * assoc_laguerre(4, 3, x).unwrap()
        };
        let v = simpson(f, 0.0, 80.0, 200_000);
        assert!(v.abs() < 1e-9, "overlap {v}");
    }

    #[test]
    fn laguerre_rejects_negative_argument() {
        assert!(matches!(assoc_laguerre(3, 1, -0.5), Err(Error::Domain { .. })));
    }

    #[test]
    fn laguerre_overflow_is_reported() {
        assert!(matches!(assoc_laguerre(2000, 200, 1e6), Err(Error::Overflow(_))));
    }

    #[test]
    fn gamma_integers_and_half() {
        assert_eq!(gamma_complete(5.0).unwrap(), 24.0);
        assert_eq!(factorial(0).unwrap(), 1.0);
        assert_eq!(gamma_complete(171.0).unwrap(), factorial(170).unwrap());
        let sqrt_pi = std::f64::consts::PI.sqrt();
        assert!(rel(gamma_complete(0.5).unwrap(), sqrt_pi) < 1e-12);
        // Γ(1/2) = ∫ t^(−1/2) e^(−t) dt = 2∫ e^(−u²) du
        let quad = 2.0 * simpson(|u| (-u * u).exp(), 0.0, 10.0, 20_000);
        assert!(rel(quad, sqrt_pi) < 1e-12);
    }

    #[test]
    fn gamma_overflow_is_signalled() {
        assert!(matches!(gamma_complete(172.5), Err(Error::Overflow(_))));
        assert!(matches!(factorial(171), Err(Error::Overflow(_))));
        assert!(ln_gamma(500.0).unwrap().is_finite());
        assert!(matches!(gamma_upper_incomplete(300.0, 1.0), Err(Error::Overflow(_))));
    }

    #[test]
    fn gamma_domain_errors() {
        assert!(gamma_complete(0.0).is_err());
        assert!(gamma_upper_incomplete(0.0, 1.0).is_err());
        assert!(gamma_upper_incomplete(-1.0, 1.0).is_err());
        assert!(gamma_upper_incomplete(1.0, -1.0).is_err());
    }

    #[test]
    fn upper_incomplete_examples() {
        assert_eq!(gamma_upper_incomplete(4.0, 0.0).unwrap(), 6.0);
        assert!(rel(gamma_upper_incomplete(1.0, 0.5).unwrap(), (-0.5f64).exp()) < 1e-14);
        // brute-force defining integral on [0.5, 80]
        let oracle = simpson(|t| t.powi(3) * (-t).exp(), 0.5, 80.0, 400_000);
        assert!(rel(gamma_upper_incomplete(4.0, 0.5).unwrap(), oracle) < 1e-10);
    }

    #[test]
    fn both_branches_match_closed_form() {
        // Γ(n, x) = (n−1)! e^(−x) Σ_{k<n} x^k / k!
        for &(n, x) in &[(3u32, 0.2), (3, 3.9), (3, 4.1), (6, 20.0), (10, 0.5)] {
            let mut sum = 0.0;
            let mut term = 1.0;
            for k in 0..n {
                if k > 0 {
                    term *= x / k as f64;
                }
                sum += term;
            }
            let exact = factorial(n - 1).unwrap() * (-x).exp() * sum;
            let got = gamma_upper_incomplete(n as f64, x).unwrap();
            assert!(rel(got, exact) < 1e-13, "n={n} x={x}: {got} vs {exact}");
        }
    }

    #[test]
    fn lower_plus_upper_is_complete() {
        for &(a, x) in &[(0.7, 0.3), (4.0, 0.5), (11.0, 0.5), (25.0, 30.0)] {
            let sum = gamma_lower_incomplete(a, x).unwrap() + gamma_upper_incomplete(a, x).unwrap();
            assert!(rel(sum, gamma_complete(a).unwrap()) < 1e-13);
        }
    }
}
