//! The single-mode torsional optomechanical Hamiltonian
//!
//! H/ħ = ω_c a†a + ω_φ b†b + g a†a (b + b†)
//!
//! and its matrix in a truncated product number basis |n_a, n_b⟩, used to
//! check spectra against the exact polaron result E = ω_c n − g²n²/ω_φ.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::coupling::{Cavity, CouplingResult};
use crate::error::{Error, Result};

/// Largest product-basis dimension [`build_matrix`] accepts.
pub const MAX_DIMENSION: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmSystem {
    pub omega_c: f64,
    pub omega_phi: f64,
    pub g: f64,
}

impl OmSystem {
    pub fn new(omega_c: f64, omega_phi: f64, g: f64) -> Result<Self> {
        if !(omega_c > 0.0) || !omega_c.is_finite() {
            return Err(Error::invalid("omega_c", "must be positive"));
        }
        if !(omega_phi > 0.0) || !omega_phi.is_finite() {
            return Err(Error::invalid("omega_phi", "must be positive"));
        }
        if !g.is_finite() {
            return Err(Error::invalid("g", "must be finite"));
        }
        Ok(Self { omega_c, omega_phi, g })
    }

    /// Exact lowest energy of the n-photon block: ω_c n − g² n² / ω_φ.
    pub fn polaron_ground_energy(&self, n: u32) -> f64 {
        let n = n as f64;
        self.omega_c * n - self.g * self.g * n * n / self.omega_phi
    }
}

/// Packages the coupling pipeline output with the cavity frequencies.
pub fn assemble(coupling: &CouplingResult, cavity: &Cavity) -> Result<OmSystem> {
    OmSystem::new(cavity.omega_c0(), cavity.omega_phi(), coupling.g)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedHamiltonian {
    pub n_a_max: usize,
    pub n_b_max: usize,
    /// H/ħ in rad/s; basis index n_a·(n_b_max+1) + n_b.
    pub matrix: DMatrix<f64>,
}

impl TruncatedHamiltonian {
    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn index(&self, n_a: usize, n_b: usize) -> usize {
        n_a * (self.n_b_max + 1) + n_b
    }

    /// All eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        sorted_eigenvalues(self.matrix.clone())
    }
}

pub fn build_matrix(sys: &OmSystem, n_a_max: usize, n_b_max: usize) -> Result<TruncatedHamiltonian> {
    if n_a_max < 1 || n_b_max < 1 {
        return Err(Error::invalid("cutoff", "photon and phonon cutoffs must be >= 1"));
    }
    let dim = (n_a_max + 1).saturating_mul(n_b_max + 1);
    if dim > MAX_DIMENSION {
        return Err(Error::DimensionCap { dim, cap: MAX_DIMENSION });
    }
    let nb = n_b_max + 1;
    let mut matrix = DMatrix::zeros(dim, dim);
    for n_a in 0..=n_a_max {
        for n_b in 0..=n_b_max {
            let i = n_a * nb + n_b;
            matrix[(i, i)] = sys.omega_c * n_a as f64 + sys.omega_phi * n_b as f64;
            if n_b < n_b_max {
                let off = sys.g * n_a as f64 * ((n_b + 1) as f64).sqrt();
                matrix[(i, i + 1)] = off;
                matrix[(i + 1, i)] = off;
            }
        }
    }
    Ok(TruncatedHamiltonian { n_a_max, n_b_max, matrix })
}

/// Spectrum of the n_a-photon block with ω_c·n_a removed:
/// ω_φ b†b + g n_a (b + b†) truncated at n_b_max phonons. Ascending.
///
/// Subtracting the photon energy keeps the small polaron shift free of
/// cancellation against ω_c, which can be ten orders of magnitude larger.
pub fn block_spectrum(sys: &OmSystem, n_a: u32, n_b_max: usize) -> Vec<f64> {
    let nb = n_b_max + 1;
    let mut m = DMatrix::zeros(nb, nb);
    for n_b in 0..nb {
        m[(n_b, n_b)] = sys.omega_phi * n_b as f64;
        if n_b + 1 < nb {
            let off = sys.g * n_a as f64 * ((n_b + 1) as f64).sqrt();
            m[(n_b, n_b + 1)] = off;
            m[(n_b + 1, n_b)] = off;
        }
    }
    sorted_eigenvalues(m)
}

/// Lowest eigenvalue of the n-photon block minus ω_c n; exactly −g²n²/ω_φ in
/// the untruncated model.
pub fn polaron_shift(sys: &OmSystem, n: u32, n_b_max: usize) -> f64 {
    block_spectrum(sys, n, n_b_max)[0]
}

/// Phonon cutoff large enough for the polaron check at photon number n.
pub fn recommended_phonon_cutoff(sys: &OmSystem, n: u32) -> usize {
    let displacement = sys.g * n as f64 / sys.omega_phi;
    (40.0 * displacement * displacement).ceil().max(40.0) as usize
}

fn sorted_eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::Method;

    fn sys(g: f64) -> OmSystem {
        OmSystem::new(10.0, 1.0, g).unwrap()
    }

    #[test]
    fn assemble_passes_values_through() {
        let cavity = Cavity::new(0.5e-3, 1.77e15, 5e4, 0.0).unwrap();
        let c = CouplingResult {
            g: 0.0,
            g_ratio: 0.0,
            method: Method::SemiAnalytic,
            quadrature_error: 0.0,
            g_cross_check: None,
            b: 1.0,
        };
        let s = assemble(&c, &cavity).unwrap();
        assert_eq!((s.omega_c, s.omega_phi, s.g), (1.77e15, 5e4, 0.0));
    }

    #[test]
    fn uncoupled_spectrum_is_diagonal() {
        let h = build_matrix(&sys(0.0), 3, 5).unwrap();
        let mut expected: Vec<f64> =
            (0..=3).flat_map(|a| (0..=5).map(move |b| 10.0 * a as f64 + b as f64)).collect();
        expected.sort_by(f64::total_cmp);
        let got = h.eigenvalues();
        for (x, y) in got.iter().zip(&expected) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn matrix_is_symmetric_and_photon_number_conserving() {
        let h = build_matrix(&sys(0.37), 3, 12).unwrap();
        assert_eq!(h.matrix, h.matrix.transpose());
        let n_a = DMatrix::from_fn(h.dimension(), h.dimension(), |i, j| {
            if i == j { (i / (h.n_b_max + 1)) as f64 } else { 0.0 }
        });
        let commutator = &h.matrix * &n_a - &n_a * &h.matrix;
        assert_eq!(commutator.amax(), 0.0);
    }

    #[test]
    fn ladder_commutator_defect_only_at_cutoff() {
        let n = 9;
        let b = DMatrix::from_fn(n + 1, n + 1, |i, j| if j == i + 1 { (j as f64).sqrt() } else { 0.0 });
        let comm = &b * b.transpose() - b.transpose() * &b;
        for k in 0..n {
            assert!((comm[(k, k)] - 1.0).abs() < 1e-12);
        }
        assert!((comm[(n, n)] + n as f64).abs() < 1e-12);
    }

    #[test]
    fn polaron_shift_reproduced() {
        for g in [0.02, 0.05, 0.1] {
            let s = sys(g);
            for n in 1..=3 {
                let cutoff = recommended_phonon_cutoff(&s, n);
                let shift = polaron_shift(&s, n, cutoff);
                let exact = -g * g * (n * n) as f64 / s.omega_phi;
                assert!((shift - exact).abs() / exact.abs() < 1e-6, "g={g} n={n}");
            }
        }
        // full-matrix route agrees with the block route
        let s = sys(0.1);
        let h = build_matrix(&s, 3, 40).unwrap();
        let sub: Vec<usize> = (0..=40).map(|b| h.index(2, b)).collect();
        let block = h.matrix.select_rows(&sub).select_columns(&sub);
        let low = sorted_eigenvalues(block)[0];
        assert!((low - s.polaron_ground_energy(2)).abs() < 1e-9);
    }

    #[test]
    fn spectrum_even_in_g() {
        let plus = build_matrix(&sys(0.3), 2, 15).unwrap().eigenvalues();
        let minus = build_matrix(&sys(-0.3), 2, 15).unwrap().eigenvalues();
        for (a, b) in plus.iter().zip(&minus) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn cutoffs_and_dimension_cap() {
        assert!(build_matrix(&sys(0.1), 0, 5).is_err());
        assert!(matches!(build_matrix(&sys(0.1), 100, 100), Err(Error::DimensionCap { .. })));
        assert!(OmSystem::new(-1.0, 1.0, 0.0).is_err());
    }
}
