//! Quantisation of phase-space densities into truncated Fock-basis
//! matrices, plus the inverse (Weyl symbol) map and trace functionals.

mod displacement;
mod general;
mod radial;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::densities::PhaseScales;
use crate::error::{Error, Result};

pub use displacement::{
    displacement_matrix_element, CahillGlauber, DisplacementKernel, FockLabel, KernelTable,
    MAX_FOCK_INDEX,
};
pub use general::{quantize_general, quantize_general_with, GeneralOptions};
pub use radial::{quantize_gaussian, quantize_radial, quantize_uniform_ellipse};

pub(crate) use radial::radial_diagonal;

/// Number-state basis of an oscillator with length ratio `aspect = β/γ`.
///
/// Phase-space points map to `α = (q/√aspect + i p √aspect) / √(2ħ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockBasis {
    aspect: f64,
    hbar: f64,
}

impl FockBasis {
    pub fn new(aspect: f64, hbar: f64) -> Result<Self> {
        if !(aspect > 0.0 && aspect.is_finite() && hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "basis needs positive aspect and hbar, got {aspect} and {hbar}"
            )));
        }
        Ok(Self { aspect, hbar })
    }

    pub fn from_scales(scales: &PhaseScales) -> Self {
        Self { aspect: scales.aspect(), hbar: scales.hbar() }
    }

    pub fn aspect(&self) -> f64 {
        self.aspect
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn alpha(&self, q: f64, p: f64) -> Complex64 {
        let root = self.aspect.sqrt();
        Complex64::new(q / root, p * root) / (2.0 * self.hbar).sqrt()
    }

    /// `q = position_scale · (a + a†)`.
    pub fn position_scale(&self) -> f64 {
        (0.5 * self.aspect * self.hbar).sqrt()
    }

    /// `p = i · momentum_scale · (a† − a)`.
    pub fn momentum_scale(&self) -> f64 {
        (0.5 * self.hbar / self.aspect).sqrt()
    }

    pub fn same_as(&self, other: &FockBasis) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs());
        close(self.aspect, other.aspect) && close(self.hbar, other.hbar)
    }

    fn check(&self, other: &FockBasis) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::BasisMismatch(format!(
                "aspect {} / hbar {} vs aspect {} / hbar {}",
                self.aspect, self.hbar, other.aspect, other.hbar
            )))
        }
    }
}

/// Real symmetric `dim × dim` operator matrix, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GroenewoldMatrix {
    dim: usize,
    entries: Vec<f64>,
    basis: FockBasis,
    s: Option<f64>,
    tail_bound: f64,
    trace_tolerance: f64,
    diagonal: bool,
}

impl GroenewoldMatrix {
    pub(crate) fn from_diagonal(diag: &[f64], basis: FockBasis, s: Option<f64>, tail_bound: f64) -> Self {
        let dim = diag.len();
        let mut entries = vec![0.0; dim * dim];
        for (i, &d) in diag.iter().enumerate() {
            entries[i * dim + i] = d;
        }
        Self {
            dim,
            entries,
            basis,
            s,
            tail_bound,
            trace_tolerance: tail_bound + TRACE_FLOOR,
            diagonal: true,
        }
    }

    pub(crate) fn from_dense(entries: Vec<f64>, dim: usize, basis: FockBasis, tail_bound: f64) -> Self {
        debug_assert_eq!(entries.len(), dim * dim);
        Self {
            dim,
            entries,
            basis,
            s: None,
            tail_bound,
            trace_tolerance: tail_bound + TRACE_FLOOR,
            diagonal: false,
        }
    }

    pub(crate) fn with_trace_tolerance(mut self, tol: f64) -> Self {
        self.trace_tolerance = tol;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Largest Fock index represented.
    pub fn n_max(&self) -> usize {
        self.dim - 1
    }

    pub fn get(&self, n: usize, m: usize) -> f64 {
        self.entries[n * self.dim + m]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn basis(&self) -> FockBasis {
        self.basis
    }

    pub fn hbar(&self) -> f64 {
        self.basis.hbar
    }

    /// The dimensionless area `βγ/ħ`, when the source density defines one.
    pub fn s(&self) -> Option<f64> {
        self.s
    }

    /// Known to be diagonal in the Fock basis (radially symmetric source).
    pub fn is_diagonal(&self) -> bool {
        self.diagonal
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn trace_tolerance(&self) -> f64 {
        self.trace_tolerance
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn trace_residual(&self) -> f64 {
        (self.trace() - 1.0).abs()
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..i {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn to_export(&self) -> MatrixExport {
        MatrixExport {
            dim: self.dim,
            s: self.s,
            hbar: self.hbar(),
            entries: self.entries.clone(),
            trace: self.trace(),
            tail_bound: self.tail_bound,
            eigenvalues: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_export()).expect("matrix export is always serialisable")
    }
}

/// Serialised form of a [`GroenewoldMatrix`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixExport {
    pub dim: usize,
    pub s: Option<f64>,
    pub hbar: f64,
    pub entries: Vec<f64>,
    pub trace: f64,
    pub tail_bound: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eigenvalues: Option<Vec<f64>>,
}

pub(crate) const TRACE_FLOOR: f64 = 1e-8;

/// `Tr(ρ̂₁ ρ̂₂)`; the matrices must share dimension and basis.
pub fn trace_product(a: &GroenewoldMatrix, b: &GroenewoldMatrix) -> Result<f64> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch(a.dim, b.dim));
    }
    a.basis.check(&b.basis)?;
    Ok(a.entries.iter().zip(&b.entries).map(|(x, y)| x * y).sum())
}

/// Real symmetric operator in a truncated Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    dim: usize,
    entries: Vec<f64>,
    basis: Option<FockBasis>,
}

impl Observable {
    /// Basis-agnostic operator from row-major entries.
    pub fn from_entries(dim: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch(entries.len(), dim * dim));
        }
        let mut worst: f64 = 0.0;
        for i in 0..dim {
            for j in 0..i {
                worst = worst.max((entries[i * dim + j] - entries[j * dim + i]).abs());
            }
        }
        if worst > 1e-12 {
            return Err(Error::NotSymmetric(worst));
        }
        Ok(Self { dim, entries, basis: None })
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal_from(dim, |_| 1.0, None)
    }

    /// `a†a`.
    pub fn number(dim: usize) -> Self {
        Self::diagonal_from(dim, |n| n as f64, None)
    }

    /// `q̂²`, built from its exact matrix elements rather than by squaring
    /// a truncated `q̂`.
    pub fn position_squared(basis: FockBasis, dim: usize) -> Self {
        let c = basis.position_scale().powi(2);
        Self::quadratic(basis, dim, c, c)
    }

    /// `p̂²`, built from its exact matrix elements.
    pub fn momentum_squared(basis: FockBasis, dim: usize) -> Self {
        let c = basis.momentum_scale().powi(2);
        Self::quadratic(basis, dim, c, -c)
    }

    fn diagonal_from(dim: usize, f: impl Fn(usize) -> f64, basis: Option<FockBasis>) -> Self {
        let mut entries = vec![0.0; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = f(i);
        }
        Self { dim, entries, basis }
    }

    fn quadratic(basis: FockBasis, dim: usize, diag: f64, off: f64) -> Self {
        let mut obs = Self::diagonal_from(dim, |n| diag * (2 * n + 1) as f64, Some(basis));
        for n in 0..dim.saturating_sub(2) {
            let v = off * (((n + 1) * (n + 2)) as f64).sqrt();
            obs.entries[n * dim + n + 2] = v;
            obs.entries[(n + 2) * dim + n] = v;
        }
        obs
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, n: usize, m: usize) -> f64 {
        self.entries[n * self.dim + m]
    }
}

/// `Tr(ρ̂ Â)`.
pub fn expectation(matrix: &GroenewoldMatrix, observable: &Observable) -> Result<f64> {
    if matrix.dim != observable.dim {
        return Err(Error::DimensionMismatch(matrix.dim, observable.dim));
    }
    if let Some(b) = &observable.basis {
        matrix.basis.check(b)?;
    }
    Ok(matrix.entries.iter().zip(&observable.entries).map(|(x, y)| x * y).sum())
}

/// Phase-space function whose quantisation is `matrix`:
/// `ρ(q,p) = (2πħ)⁻¹ Σ_{nm} ρ_{mn} ⟨n|Δ(α)|m⟩`.
pub fn weyl_symbol(matrix: &GroenewoldMatrix, q: f64, p: f64) -> Result<f64> {
    let dim = matrix.dim;
    let mut table = KernelTable::new(dim)?;
    let mut kernel = vec![Complex64::new(0.0, 0.0); dim * dim];
    CahillGlauber.fill(matrix.basis.alpha(q, p), &mut table, &mut kernel);
    let mut acc = 0.0;
    for n in 0..dim {
        for m in 0..dim {
            acc += matrix.get(m, n) * kernel[n * dim + m].re;
        }
    }
    Ok(acc / (2.0 * PI * matrix.hbar()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densities::GaussianDensity;
    use approx::assert_relative_eq;

    #[test]
    fn alpha_scaling() {
        let b = FockBasis::new(4.0, 0.5).unwrap();
        let a = b.alpha(2.0, 3.0);
        assert_relative_eq!(a.re, 1.0);
        assert_relative_eq!(a.im, 6.0);
        // |α|² = (s/2) r² with s = βγ/ħ, r² = q²/β² + p²/γ²
        let sc = PhaseScales::new(1.5, 0.7, 0.3).unwrap();
        let b = FockBasis::from_scales(&sc);
        let (q, p): (f64, f64) = (0.4, -0.9);
        let r2 = (q / 1.5f64).powi(2) + (p / 0.7f64).powi(2);
        assert_relative_eq!(b.alpha(q, p).norm_sqr(), 0.5 * sc.s() * r2, max_relative = 1e-14);
    }

    #[test]
    fn quadratic_observables_match_ladder_products() {
        // (a + a†)² computed with a wide basis then truncated
        let basis = FockBasis::new(2.0, 0.5).unwrap();
        let dim = 6;
        let wide = dim + 3;
        let mut x = vec![0.0; wide * wide];
        for n in 0..wide - 1 {
            let v = ((n + 1) as f64).sqrt();
            x[n * wide + n + 1] = v;
            x[(n + 1) * wide + n] = v;
        }
        let q2 = Observable::position_squared(basis, dim);
        let p2 = Observable::momentum_squared(basis, dim);
        for i in 0..dim {
            for j in 0..dim {
                let xx: f64 = (0..wide).map(|k| x[i * wide + k] * x[k * wide + j]).sum();
                assert_relative_eq!(q2.get(i, j), 0.5 * xx, epsilon = 1e-14);
                // (a† − a)² has the same off-diagonal and negated diagonal
                let sign = if i == j { 1.0 } else { -1.0 };
                assert_relative_eq!(p2.get(i, j), sign * 0.125 * xx, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn basis_mismatch_is_reported() {
        let a = quantize_gaussian(&GaussianDensity::with_s(2.0).unwrap(), 4).unwrap();
        let g = GaussianDensity::new(2.0, 1.0, 1.0).unwrap();
        let b = quantize_gaussian(&g, 4).unwrap();
        assert!(matches!(trace_product(&a, &b), Err(Error::BasisMismatch(_))));
        let c = quantize_gaussian(&GaussianDensity::with_s(2.0).unwrap(), 5).unwrap();
        assert!(matches!(trace_product(&a, &c), Err(Error::DimensionMismatch(5, 6))));
        let q2 = Observable::position_squared(b.basis(), 5);
        assert!(matches!(expectation(&a, &q2), Err(Error::BasisMismatch(_))));
    }

    #[test]
    fn observables_reject_asymmetry() {
        assert!(matches!(Observable::from_entries(2, vec![1.0, 2.0, 3.0, 4.0]), Err(Error::NotSymmetric(_))));
        assert!(matches!(Observable::from_entries(2, vec![1.0]), Err(Error::DimensionMismatch(1, 4))));
    }

    #[test]
    fn export_round_trips() {
        let m = quantize_gaussian(&GaussianDensity::with_s(3.0).unwrap(), 3).unwrap();
        let json = m.to_json();
        let back: MatrixExport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m.to_export());
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        for key in ["dim", "s", "hbar", "entries", "trace", "tail_bound"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert!(v.get("eigenvalues").is_none());
    }

    #[test]
    fn weyl_symbol_of_ground_state() {
        // |0⟩⟨0| has symbol exp(−2|α|²)/(πħ)
        let basis = FockBasis::new(1.0, 1.0).unwrap();
        let m = GroenewoldMatrix::from_diagonal(&[1.0, 0.0, 0.0], basis, Some(1.0), 0.0);
        for &(q, p) in &[(0.0f64, 0.0f64), (0.3, -0.8), (1.5, 1.0)] {
            let want = (-(q * q + p * p)).exp() / PI;
            assert_relative_eq!(weyl_symbol(&m, q, p).unwrap(), want, max_relative = 1e-13);
        }
    }
}
