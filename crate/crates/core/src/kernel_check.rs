//! Coordinate-space check of the Gaussian spectrum: the quantised Gaussian
//! acts on wavefunctions as an integral operator with an explicit kernel,
//! and the scaled oscillator eigenfunctions must be its eigenvectors with
//! the closed-form eigenvalues.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::special_functions::oscillator_sequence;
use crate::spectra::gaussian_eigenvalue;

/// Grid half-width in units of `max(ℓ, β)`.
pub const HALF_WIDTH_FACTOR: f64 = 8.0;
pub const DEFAULT_POINTS: usize = 2048;
const NORM_GATE: f64 = 1e-8;
const MAX_DOUBLINGS: usize = 3;

/// Equispaced grid symmetric about zero, integrated with the trapezoid rule.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelGrid {
    points: Vec<f64>,
    half_width: f64,
    count: usize,
}

impl KernelGrid {
    pub fn new(half_width: f64, count: usize) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) || count < 3 {
            return Err(Error::GridValidation(format!("half-width {half_width} with {count} points")));
        }
        let h = 2.0 * half_width / (count - 1) as f64;
        let points = (0..count)
            .map(|i| {
                // mirror so the grid is exactly symmetric
                let j = count - 1 - i;
                if i <= j {
                    -half_width + i as f64 * h
                } else {
                    half_width - j as f64 * h
                }
            })
            .collect();
        Ok(Self { points, half_width, count })
    }

    /// Default grid for a Gaussian with the given scales.
    pub fn for_scales(beta: f64, gamma: f64, hbar: f64) -> Result<Self> {
        check_scales(beta, gamma, hbar)?;
        let ell = (beta * hbar / gamma).sqrt();
        Self::new(HALF_WIDTH_FACTOR * ell.max(beta), DEFAULT_POINTS)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.count - 1) as f64
    }

    fn weight(&self, i: usize) -> f64 {
        if i == 0 || i + 1 == self.count {
            0.5 * self.spacing()
        } else {
            self.spacing()
        }
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        values.iter().enumerate().map(|(i, v)| self.weight(i) * v).sum()
    }

    /// Same spacing, twice the extent.
    pub fn doubled(&self) -> Result<Self> {
        Self::new(2.0 * self.half_width, 2 * self.count - 1)
    }
}

fn check_scales(beta: f64, gamma: f64, hbar: f64) -> Result<()> {
    if [beta, gamma, hbar].iter().all(|v| *v > 0.0 && v.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("scales must be positive: β={beta}, γ={gamma}, ħ={hbar}")))
    }
}

/// `⟨x|ρ̂|y⟩ = (β√π)⁻¹ exp(−(x+y)²/(4β²)) exp(−γ²(x−y)²/(4ħ²))`.
pub fn coordinate_kernel(x: f64, y: f64, beta: f64, gamma: f64, hbar: f64) -> f64 {
    let sum = x + y;
    let diff = x - y;
    (-(sum * sum) / (4.0 * beta * beta) - gamma * gamma * diff * diff / (4.0 * hbar * hbar)).exp()
        / (beta * PI.sqrt())
}

/// The kernel tabulated on a grid, ready to act on sampled functions.
#[derive(Debug, Clone)]
pub struct KernelOperator {
    grid: KernelGrid,
    // row i holds w_j K(x_i, y_j)
    weighted: Vec<f64>,
    lengthscale: f64,
}

impl KernelOperator {
    pub fn new(beta: f64, gamma: f64, hbar: f64, grid: KernelGrid) -> Result<Self> {
        check_scales(beta, gamma, hbar)?;
        let n = grid.count;
        let mut weighted = vec![0.0; n * n];
        for (i, &x) in grid.points.iter().enumerate() {
            for (j, &y) in grid.points.iter().enumerate() {
                weighted[i * n + j] = grid.weight(j) * coordinate_kernel(x, y, beta, gamma, hbar);
            }
        }
        Ok(Self { grid, weighted, lengthscale: (beta * hbar / gamma).sqrt() })
    }

    pub fn grid(&self) -> &KernelGrid {
        &self.grid
    }

    /// `ℓ = √(βħ/γ)`, the length scale of the matching oscillator.
    pub fn lengthscale(&self) -> f64 {
        self.lengthscale
    }

    /// `φ_n` sampled on the grid, after checking that the grid resolves it.
    pub fn eigenfunction(&self, n: usize) -> Result<Vec<f64>> {
        let mut seq = Vec::with_capacity(n + 1);
        let mut phi = Vec::with_capacity(self.grid.count);
        for &x in &self.grid.points {
            oscillator_sequence(n, x, self.lengthscale, &mut seq)?;
            phi.push(seq[n]);
        }
        let norm = self.grid.integrate(&phi.iter().map(|v| v * v).collect::<Vec<_>>());
        if (norm - 1.0).abs() > NORM_GATE {
            return Err(Error::GridValidation(format!(
                "φ_{n} has norm {norm} on a grid of half-width {} with {} points",
                self.grid.half_width, self.grid.count
            )));
        }
        Ok(phi)
    }

    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        let n = self.grid.count;
        self.weighted.chunks_exact(n).map(|row| row.iter().zip(f).map(|(k, v)| k * v).sum()).collect()
    }

    /// `max |Kφ_n − λφ_n| / max |φ_n|` for a supplied eigenvalue.
    pub fn identity_residual_with(&self, n: usize, eigenvalue: f64) -> Result<f64> {
        let phi = self.eigenfunction(n)?;
        let image = self.apply(&phi);
        let peak = phi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let worst = image.iter().zip(&phi).fold(0.0f64, |m, (k, p)| m.max((k - eigenvalue * p).abs()));
        Ok(worst / peak)
    }

    /// `∫ K(x, x) dx` on the grid.
    pub fn trace(&self) -> f64 {
        let n = self.grid.count;
        (0..n).map(|i| self.weighted[i * n + i]).sum()
    }
}

/// `∫ K(x, y) φ_n(y) dy` at every grid point.
pub fn apply_kernel(n: usize, beta: f64, gamma: f64, hbar: f64, grid: &KernelGrid) -> Result<Vec<f64>> {
    let op = KernelOperator::new(beta, gamma, hbar, grid.clone())?;
    let phi = op.eigenfunction(n)?;
    Ok(op.apply(&phi))
}

/// Residual of the eigenfunction identity for the Gaussian with
/// `β = γ = √s`, `ħ = 1`. A grid that fails the normalisation gate is
/// widened (keeping its spacing) a few times before giving up.
pub fn hermite_identity_residual(n: usize, s: f64, grid: &KernelGrid) -> Result<f64> {
    let lambda = gaussian_eigenvalue(n, s)?;
    let beta = s.sqrt();
    let mut grid = grid.clone();
    for _ in 0..=MAX_DOUBLINGS {
        let op = KernelOperator::new(beta, beta, 1.0, grid.clone())?;
        match op.identity_residual_with(n, lambda) {
            Err(Error::GridValidation(_)) => grid = grid.doubled()?,
            other => return other,
        }
    }
    Err(Error::GridValidation(format!("no grid up to half-width {} resolves φ_{n}", grid.half_width)))
}
