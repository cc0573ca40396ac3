//! Eigenvalue spectra of quantised densities: the closed form for the
//! Gaussian family, quadrature for the uniform ellipse, a symmetric
//! eigensolver for general matrices, and the spectral-bound sweeps.

mod jacobi;

use serde::Serialize;
use std::fmt;
use std::str::FromStr;

use crate::densities::{RadialDensity, UniformEllipseDensity};
use crate::error::{Error, Result};
use crate::quantizer::radial_diagonal;
use crate::quantizer::GroenewoldMatrix;
use crate::special_functions::LAGUERRE_DEGREE_CEILING;

/// Slack allowed beyond the exact eigenvalue range `[-2, 2]`.
pub const RANGE_SLACK: f64 = 1e-8;
/// Gaussian truncation must leave `r^(n_max+1)` below this.
pub const GAUSSIAN_TAIL_RATIO: f64 = 1e-12;

const CLOSURE_PASSES: usize = 16;
const CLOSURE_START: usize = 128;
const CLOSURE_TOL: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Gaussian,
    Uniform,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::Gaussian => "gaussian",
            Family::Uniform => "uniform",
        }
    }

    /// `ΔqΔp/ħ` of the family member with area parameter `s`.
    pub fn uncertainty_over_hbar(&self, s: f64) -> f64 {
        match self {
            Family::Gaussian => s / 2.0,
            Family::Uniform => s / 4.0,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(Family::Gaussian),
            "uniform" => Ok(Family::Uniform),
            other => Err(Error::InvalidParameter(format!("unknown family `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Quadrature,
    Eigensolve,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::Quadrature => "quadrature",
            Method::Eigensolve => "eigensolve",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Sorted spectrum of a quantised density.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumResult {
    /// Descending.
    pub eigenvalues: Vec<f64>,
    /// Fock index dominating each eigenvector, aligned with `eigenvalues`.
    pub fock_index: Vec<usize>,
    pub s: Option<f64>,
    pub min_bound: f64,
    pub max_bound: f64,
    /// `|Σλ − 1|` over the computed eigenvalues.
    pub trace_residual: f64,
    pub method: Method,
}

impl SpectrumResult {
    fn from_pairs(mut pairs: Vec<(f64, usize)>, s: Option<f64>, method: Method) -> Result<Self> {
        if let Some(&(bad, _)) = pairs.iter().find(|(v, _)| !(v.abs() <= 2.0 + RANGE_SLACK)) {
            return Err(Error::SpectrumOutOfRange(bad));
        }
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0).then(b.1.cmp(&a.1)));
        let (eigenvalues, fock_index): (Vec<f64>, Vec<usize>) = pairs.into_iter().unzip();
        let trace: f64 = eigenvalues.iter().sum();
        Ok(Self {
            min_bound: *eigenvalues.last().unwrap_or(&0.0),
            max_bound: *eigenvalues.first().unwrap_or(&0.0),
            trace_residual: (trace - 1.0).abs(),
            eigenvalues,
            fock_index,
            s,
            method,
        })
    }

    fn from_fock_values(values: Vec<f64>, s: f64, method: Method) -> Result<Self> {
        let pairs = values.into_iter().enumerate().map(|(n, v)| (v, n)).collect();
        Self::from_pairs(pairs, Some(s), method)
    }
}

fn check_s(s: f64) -> Result<()> {
    if s > 0.0 && s.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("s must be positive and finite, got {s}")))
    }
}

/// `λ_n = (2/(s+1)) ((s−1)/(s+1))^n`.
pub fn gaussian_eigenvalue(n: usize, s: f64) -> Result<f64> {
    check_s(s)?;
    Ok(2.0 / (s + 1.0) * ((s - 1.0) / (s + 1.0)).powi(n as i32))
}

/// Gaussian eigenvalues in Fock order, `n = 0..=n_max`.
pub fn gaussian_eigenvalues(s: f64, n_max: usize) -> Result<Vec<f64>> {
    check_s(s)?;
    let r = (s - 1.0) / (s + 1.0);
    let mut out = Vec::with_capacity(n_max + 1);
    let mut v = 2.0 / (s + 1.0);
    for _ in 0..=n_max {
        out.push(v);
        v *= r;
    }
    Ok(out)
}

pub fn gaussian_spectrum(s: f64, n_max: usize) -> Result<SpectrumResult> {
    SpectrumResult::from_fock_values(gaussian_eigenvalues(s, n_max)?, s, Method::ClosedForm)
}

/// Uniform-ellipse eigenvalues in Fock order,
/// `λ_n = (2(−1)^n/s) ∫_0^s e^(−t) L_n(2t) dt`.
pub fn uniform_eigenvalues(s: f64, n_max: usize) -> Result<Vec<f64>> {
    check_s(s)?;
    let density = RadialDensity::from_uniform_ellipse(&UniformEllipseDensity::with_s(s)?);
    radial_diagonal(&density, n_max)
}

pub fn uniform_eigenvalue(n: usize, s: f64) -> Result<f64> {
    Ok(uniform_eigenvalues(s, n)?[n])
}

pub fn uniform_spectrum(s: f64, n_max: usize) -> Result<SpectrumResult> {
    SpectrumResult::from_fock_values(uniform_eigenvalues(s, n_max)?, s, Method::Quadrature)
}

/// Full spectrum of a symmetric matrix. Ties are ordered by descending
/// Fock index.
pub fn eigendecompose(matrix: &GroenewoldMatrix) -> Result<SpectrumResult> {
    let dim = matrix.dim();
    let scale = matrix.entries().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let asym = matrix.max_asymmetry();
    if asym > 1e-12 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::NotSymmetric(asym));
    }
    if matrix.is_diagonal() {
        return SpectrumResult::from_pairs(
            matrix.diagonal().into_iter().enumerate().map(|(n, v)| (v, n)).collect(),
            matrix.s(),
            Method::Quadrature,
        );
    }
    let pairs = jacobi::symmetric_eigen(matrix.entries().to_vec(), dim)?;
    SpectrumResult::from_pairs(pairs, matrix.s(), Method::Eigensolve)
}

/// Infimum and supremum of the family's spectrum at `s`.
///
/// Gaussian: exact over `n <= n_max` plus the accumulation point 0; the
/// truncation must satisfy `r^(n_max+1) < 1e-12`. Uniform: the extremes
/// are taken before the last quarter of the window, and every value in
/// that quarter must be smaller in magnitude than both of them (with the
/// minimum negative), so that the slowly decaying tail cannot move them.
pub fn spectral_bounds(family: Family, s: f64, n_max: usize) -> Result<(f64, f64)> {
    check_s(s)?;
    match family {
        Family::Gaussian => {
            let r = ((s - 1.0) / (s + 1.0)).abs();
            let tail = r.powi(n_max as i32 + 1);
            if tail >= GAUSSIAN_TAIL_RATIO {
                return Err(Error::InsufficientTruncation(format!(
                    "gaussian tail ratio {tail:e} at s = {s}, n_max = {n_max}"
                )));
            }
            let values = gaussian_eigenvalues(s, n_max)?;
            let (lo, hi) = extremes(&values);
            Ok((lo.min(0.0), hi.max(0.0)))
        }
        Family::Uniform => {
            if n_max < 8 {
                return Err(Error::InsufficientTruncation(format!("uniform bounds need n_max >= 8, got {n_max}")));
            }
            let values = uniform_eigenvalues(s, n_max)?;
            let split = n_max + 1 - (n_max + 1) / 4;
            let (lo, hi) = extremes(&values[..split]);
            let tail = values[split..].iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if !(lo < -tail && hi > tail) {
                return Err(Error::InsufficientTruncation(format!(
                    "uniform tail magnitude {tail:e} still competes with bounds ({lo}, {hi}) at s = {s}, n_max = {n_max}"
                )));
            }
            Ok((lo, hi))
        }
    }
}

fn extremes(values: &[f64]) -> (f64, f64) {
    values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub uncertainty_over_hbar: f64,
    pub min_bound: f64,
    pub max_bound: f64,
    pub family: Family,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

pub fn sweep_row(family: Family, s: f64, n_max: usize) -> Result<SweepRow> {
    let (min_bound, max_bound) = spectral_bounds(family, s, n_max)?;
    Ok(SweepRow { uncertainty_over_hbar: family.uncertainty_over_hbar(s), min_bound, max_bound, family })
}

/// Spectral bounds over strictly increasing `s_values`.
pub fn sweep(family: Family, s_values: &[f64], n_max: usize) -> Result<SweepResult> {
    check_increasing(s_values)?;
    let rows = s_values.iter().map(|&s| sweep_row(family, s, n_max)).collect::<Result<_>>()?;
    Ok(SweepResult { rows })
}

pub fn check_increasing(s_values: &[f64]) -> Result<()> {
    if let Some(w) = s_values.windows(2).find(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter(format!("s values must increase strictly: {} then {}", w[0], w[1])));
    }
    s_values.iter().try_for_each(|&s| check_s(s))
}

/// Mixture weights of a Gaussian density that is a genuine quantum state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixedState {
    pub weights: Vec<f64>,
    pub partial_sum: f64,
    /// Exact weight of the states beyond `n_max`.
    pub tail: f64,
}

pub fn mixed_state_weights(s: f64, n_max: usize) -> Result<MixedState> {
    if !(s > 1.0 && s.is_finite()) {
        return Err(Error::InvalidParameter(format!("mixed-state weights need s > 1, got {s}")));
    }
    let weights = gaussian_eigenvalues(s, n_max)?;
    let r = (s - 1.0) / (s + 1.0);
    let tail = weights[n_max] * r / (1.0 - r);
    Ok(MixedState { partial_sum: weights.iter().sum(), weights, tail })
}

/// Trace of the uniform family with the slowly converging tail closed off.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceClosure {
    pub n_max: usize,
    /// Plain `Σ_{n≤n_max} λ_n`.
    pub partial_sum: f64,
    /// Limit estimate from repeated averaging of the trailing partial sums.
    pub closed_sum: f64,
}

/// The partial sums of the uniform spectrum oscillate about their limit
/// with an amplitude falling only like `n^(-3/4)`; sixteen passes of
/// pairwise averaging over the trailing partial sums remove the
/// oscillation. `n_max` doubles until two successive estimates agree.
pub fn uniform_trace_closure(s: f64) -> Result<TraceClosure> {
    let mut n_max = CLOSURE_START;
    let mut prev: Option<f64> = None;
    loop {
        let values = uniform_eigenvalues(s, n_max)?;
        let partials: Vec<f64> = values
            .iter()
            .scan(0.0, |acc, v| {
                *acc += v;
                Some(*acc)
            })
            .collect();
        let closed = averaged_limit(&partials[partials.len() - CLOSURE_PASSES - 1..]);
        if let Some(p) = prev {
            if (closed - p).abs() <= CLOSURE_TOL {
                return Ok(TraceClosure { n_max, partial_sum: partials[n_max], closed_sum: closed });
            }
        }
        prev = Some(closed);
        if 2 * n_max > LAGUERRE_DEGREE_CEILING {
            return Err(Error::InsufficientTruncation(format!("uniform trace closure at s = {s} did not settle")));
        }
        n_max *= 2;
    }
}

fn averaged_limit(tail: &[f64]) -> f64 {
    let mut row = tail.to_vec();
    while row.len() > 1 {
        row = row.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    }
    row[0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densities::GaussianDensity;
    use crate::quantizer::{quantize_gaussian, FockBasis};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn gaussian_values() {
        assert_eq!(gaussian_eigenvalue(0, 1.0).unwrap(), 1.0);
        assert_eq!(gaussian_eigenvalue(3, 1.0).unwrap(), 0.0);
        assert_relative_eq!(gaussian_eigenvalue(1, 1.0 / 3.0).unwrap(), -0.75, max_relative = 1e-15);
        assert_relative_eq!(gaussian_eigenvalue(0, 3.0).unwrap(), 0.5);
        assert!(gaussian_eigenvalue(0, 0.0).is_err());
        let seq = gaussian_eigenvalues(0.4, 25).unwrap();
        for (n, v) in seq.iter().enumerate() {
            assert_relative_eq!(*v, gaussian_eigenvalue(n, 0.4).unwrap(), max_relative = 1e-13);
        }
    }

    #[test]
    fn uniform_values() {
        let e2 = (-2.0f64).exp();
        assert_relative_eq!(uniform_eigenvalue(0, 2.0).unwrap(), 1.0 - e2, max_relative = 1e-13);
        assert_relative_eq!(uniform_eigenvalue(1, 2.0).unwrap(), 1.0 - 5.0 * e2, max_relative = 1e-12);
        for n in 0..4 {
            let v = uniform_eigenvalue(n, 1e-6).unwrap();
            let sign = if n % 2 == 0 { 2.0 } else { -2.0 };
            assert!((v - sign).abs() < 1e-4);
        }
    }

    #[test]
    fn spectrum_sorting_and_ties() {
        let r = gaussian_spectrum(1.0, 3).unwrap();
        assert_eq!(r.eigenvalues, vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(r.fock_index, vec![0, 3, 2, 1]);
        assert_eq!((r.min_bound, r.max_bound), (0.0, 1.0));
        let r = gaussian_spectrum(1.0 / 3.0, 3).unwrap();
        assert_relative_eq!(r.min_bound, -0.75, max_relative = 1e-14);
        assert_relative_eq!(r.max_bound, 1.5, max_relative = 1e-14);
        assert_eq!(r.method, Method::ClosedForm);
    }

    #[test]
    fn eigendecompose_general_and_diagonal() {
        let m = quantize_gaussian(&GaussianDensity::with_s(0.5).unwrap(), 20).unwrap();
        let r = eigendecompose(&m).unwrap();
        for (v, n) in r.eigenvalues.iter().zip(&r.fock_index) {
            assert!((v - gaussian_eigenvalue(*n, 0.5).unwrap()).abs() < 1e-10);
        }
        // the same matrix stored densely, rotated by nothing, through Jacobi
        let dense = GroenewoldMatrix::from_dense(m.entries().to_vec(), m.dim(), m.basis(), 0.0);
        let j = eigendecompose(&dense).unwrap();
        assert_eq!(j.method, Method::Eigensolve);
        for (a, b) in j.eigenvalues.iter().zip(&r.eigenvalues) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn eigendecompose_rejects_asymmetry() {
        let basis = FockBasis::new(1.0, 1.0).unwrap();
        let m = GroenewoldMatrix::from_dense(vec![0.5, 0.1, 0.2, 0.5], 2, basis, 0.0);
        assert!(matches!(eigendecompose(&m), Err(Error::NotSymmetric(_))));
        let m = GroenewoldMatrix::from_dense(vec![0.0, 1.0, 1.0, 0.0], 2, basis, 0.0);
        let r = eigendecompose(&m).unwrap();
        assert!((r.eigenvalues[0] - 1.0).abs() < 1e-15 && (r.eigenvalues[1] + 1.0).abs() < 1e-15);
        let m = GroenewoldMatrix::from_dense(vec![3.0, 0.0, 0.0, 0.0], 2, basis, 0.0);
        assert!(matches!(eigendecompose(&m), Err(Error::SpectrumOutOfRange(_))));
    }

    #[test]
    fn bounds() {
        assert_eq!(spectral_bounds(Family::Gaussian, 1.0, 10).unwrap(), (0.0, 1.0));
        let (lo, hi) = spectral_bounds(Family::Gaussian, 1.0 / 3.0, 60).unwrap();
        assert_relative_eq!(lo, -0.75, max_relative = 1e-14);
        assert_relative_eq!(hi, 1.5, max_relative = 1e-14);
        let (lo, hi) = spectral_bounds(Family::Gaussian, 3.0, 60).unwrap();
        assert_eq!(lo, 0.0);
        assert_relative_eq!(hi, 0.5);
        assert!(matches!(spectral_bounds(Family::Gaussian, 3.0, 10), Err(Error::InsufficientTruncation(_))));

        let (lo, hi) = spectral_bounds(Family::Uniform, 4.0, 200).unwrap();
        assert!(lo < 0.0);
        assert_relative_eq!(hi, 0.5 * (1.0 - (-4.0f64).exp()), max_relative = 1e-12);
        assert!(matches!(spectral_bounds(Family::Uniform, 40.0, 20), Err(Error::InsufficientTruncation(_))));
    }

    #[test]
    fn sweep_rows() {
        let s: Vec<f64> = (1..=8).map(|i| 0.25 * i as f64).collect();
        let out = sweep(Family::Gaussian, &s, 200).unwrap();
        for row in &out.rows {
            if row.uncertainty_over_hbar < 0.5 {
                assert!(row.min_bound < 0.0 && row.max_bound > 1.0);
            } else {
                assert_eq!(row.min_bound, 0.0);
                assert!(row.max_bound <= 1.0);
            }
        }
        assert!(sweep(Family::Gaussian, &[1.0, 1.0], 10).is_err());
        assert!(sweep(Family::Uniform, &[-1.0], 10).is_err());
    }

    #[test]
    fn mixed_state() {
        let m = mixed_state_weights(3.0, 30).unwrap();
        for (n, w) in m.weights.iter().enumerate() {
            assert_relative_eq!(*w, 0.5f64.powi(n as i32 + 1), max_relative = 1e-14);
        }
        assert_relative_eq!(m.partial_sum + m.tail, 1.0, epsilon = 1e-15);
        let m = mixed_state_weights(1.0 + 1e-9, 5).unwrap();
        assert!((m.weights[0] - 1.0).abs() < 1e-8 && m.weights[1..].iter().all(|w| *w < 1e-8));
        assert!(mixed_state_weights(0.5, 5).is_err());
        assert!(mixed_state_weights(1.0, 5).is_err());
    }

    #[test]
    fn uniform_trace_settles() {
        for &s in &[0.1, 1.0, 7.0, 40.0] {
            let c = uniform_trace_closure(s).unwrap();
            assert!((c.closed_sum - 1.0).abs() < 1e-8, "s={s}: {c:?}");
        }
    }

    proptest! {
        #[test]
        fn gaussian_spectrum_in_range_and_purity(s in 0.02f64..50.0) {
            let r = ((s - 1.0) / (s + 1.0)).abs();
            let n = ((GAUSSIAN_TAIL_RATIO.ln() / r.ln()).ceil() as usize).max(1);
            let values = gaussian_eigenvalues(s, n).unwrap();
            prop_assert!(values.iter().all(|v| v.abs() <= 2.0));
            let purity: f64 = values.iter().map(|v| v * v).sum();
            prop_assert!((purity - 1.0 / s).abs() < 1e-10);
        }
    }
}
