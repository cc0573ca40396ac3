//! Radially symmetric densities are diagonal in the Fock basis, with
//!
//! ```text
//! λ_n = 2πħ (−1)^n ∫_0^∞ g(t/s) e^(−t) L_n(2t) dt,   s = βγ/ħ.
//! ```

use std::f64::consts::PI;

use super::{FockBasis, GroenewoldMatrix};
use crate::densities::{GaussianDensity, RadialDensity, UniformEllipseDensity};
use crate::error::{Error, Result};
use crate::special_functions::{
    finite_rule, laguerre_sequence_scaled, semi_infinite_rule, QuadratureRule, LAGUERRE_DEGREE_CEILING,
};

const REFINE_TOL: f64 = 1e-9;
const MAX_FINITE_POINTS: usize = 8192;
const MAX_LAGUERRE_POINTS: usize = 4096;

/// Diagonal matrix of a radial density, integrated by Gauss–Legendre on
/// a compact support or by a rescaled Gauss–Laguerre rule otherwise.
pub fn quantize_radial(density: &RadialDensity, n_max: usize) -> Result<GroenewoldMatrix> {
    let diag = radial_diagonal(density, n_max)?;
    let tail = match n_max {
        0 => diag[0].abs(),
        _ => diag[n_max - 1].abs() + diag[n_max].abs(),
    };
    Ok(GroenewoldMatrix::from_diagonal(
        &diag,
        FockBasis::from_scales(&density.scales),
        Some(density.scales.s()),
        tail,
    ))
}

/// Gaussian density through the radial quadrature, with the geometric
/// bound on the neglected diagonal as tail estimate.
pub fn quantize_gaussian(density: &GaussianDensity, n_max: usize) -> Result<GroenewoldMatrix> {
    let m = quantize_radial(&RadialDensity::from_gaussian(density), n_max)?;
    let s = density.s();
    let r = ((s - 1.0) / (s + 1.0)).abs();
    let tail = if r == 0.0 { 0.0 } else { 2.0 / (s + 1.0) * r.powi(n_max as i32 + 1) / (1.0 - r) };
    Ok(GroenewoldMatrix::from_diagonal(&m.diagonal(), m.basis(), Some(s), tail))
}

pub fn quantize_uniform_ellipse(density: &UniformEllipseDensity, n_max: usize) -> Result<GroenewoldMatrix> {
    quantize_radial(&RadialDensity::from_uniform_ellipse(density), n_max)
}

pub(crate) fn radial_diagonal(density: &RadialDensity, n_max: usize) -> Result<Vec<f64>> {
    if n_max > LAGUERRE_DEGREE_CEILING {
        return Err(Error::DegreeTooLarge { degree: n_max, ceiling: LAGUERRE_DEGREE_CEILING });
    }
    let s = density.scales.s();
    let prefactor = 2.0 * PI * density.scales.hbar();
    let (mut points, cap) = match density.support_radius() {
        Some(r) => (n_max / 2 + (s * r * r).ceil() as usize + 32, MAX_FINITE_POINTS),
        None => (n_max + 32, MAX_LAGUERRE_POINTS),
    };
    let mut prev = integrate_moments(density, n_max, points)?;
    loop {
        let next_points = (2 * points).min(cap);
        if next_points == points {
            return Err(Error::QuadratureNotConverged(format!(
                "radial integrals for n <= {n_max} at s = {s} with {points} nodes"
            )));
        }
        points = next_points;
        let cur = integrate_moments(density, n_max, points)?;
        let scale = cur.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        let diff = cur.iter().zip(&prev).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        prev = cur;
        if diff <= REFINE_TOL * scale {
            break;
        }
    }
    Ok(prev
        .iter()
        .enumerate()
        .map(|(n, v)| if n % 2 == 0 { prefactor * v } else { -prefactor * v })
        .collect())
}

// ∫ g(t/s) e^(−t) L_n(2t) dt for n = 0..=n_max with the given rule size.
fn integrate_moments(density: &RadialDensity, n_max: usize, points: usize) -> Result<Vec<f64>> {
    let s = density.scales.s();
    // (t, ln|w·g·e^(−t)|, sign)
    let samples: Vec<(f64, f64, f64)> = match density.support_radius() {
        Some(r) => {
            let rule = finite_rule(points, 0.0, s * r * r)?;
            collect(&rule, |t, w| (t, w * density.profile(t / s), -t))
        }
        None => {
            // t = x/c with c = 1 + κ/s makes e^(−t − κt/s) match the
            // Laguerre weight e^(−x) exactly for exponential profiles.
            let c = 1.0 + density.decay_rate() / s;
            let rule = semi_infinite_rule(points)?;
            collect(&rule, |x, w| {
                let t = x / c;
                (t, w * density.profile(t / s) / c, x - t)
            })
        }
    };
    let mut acc = vec![0.0; n_max + 1];
    let mut seq = Vec::with_capacity(n_max + 1);
    for &(t, ln_factor, sign) in &samples {
        laguerre_sequence_scaled(n_max, 0.0, 2.0 * t, &mut seq);
        for (a, &(mant, scale)) in acc.iter_mut().zip(&seq) {
            *a += sign * mant * (scale + ln_factor).exp();
        }
    }
    Ok(acc)
}

fn collect(rule: &QuadratureRule, f: impl Fn(f64, f64) -> (f64, f64, f64)) -> Vec<(f64, f64, f64)> {
    rule.iter()
        .filter_map(|(x, w)| {
            let (t, factor, ln_extra) = f(x, w);
            if factor == 0.0 || !factor.is_finite() {
                None
            } else {
                Some((t, factor.abs().ln() + ln_extra, factor.signum()))
            }
        })
        .collect()
}
