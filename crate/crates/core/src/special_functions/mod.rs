//! Laguerre and Hermite polynomials, oscillator eigenfunctions and
//! Gaussian quadrature rules.
//!
//! Polynomials are evaluated by upward three-term recurrence. For the
//! associated Laguerre family the recurrence is carried in a rescaled
//! form (mantissa plus natural-log scale) so that high degrees and large
//! arguments neither overflow nor lose their exponent; accuracy has been
//! checked against extended-precision references up to degree 2000, and
//! degrees above [`LAGUERRE_DEGREE_CEILING`] are refused.
//!
//! Unnormalised Hermite polynomials grow like `(2x)^n` and are only
//! offered up to [`HERMITE_DEGREE_CEILING`]; use
//! [`oscillator_eigenfunction`] for normalised values at high degree.

mod quadrature;

pub use quadrature::{
    finite_rule, semi_infinite_rule, tridiagonal_eigenvalues, QuadratureRule, RuleDomain,
};

use crate::error::{Error, Result};

/// Highest Laguerre degree accepted by [`laguerre`] and the internal
/// sequence generators.
pub const LAGUERRE_DEGREE_CEILING: usize = 4096;

/// Highest degree accepted by [`hermite`].
pub const HERMITE_DEGREE_CEILING: usize = 200;

/// Highest index accepted by [`oscillator_eigenfunction`].
pub const OSCILLATOR_DEGREE_CEILING: usize = 1024;

const RESCALE_THRESHOLD: f64 = 1e200;
const RESCALE_FACTOR: f64 = 1e-200;
// ln(1e200)
const RESCALE_LN: f64 = 460.517_018_598_809_1;

/// Associated Laguerre polynomial `L_n^{(k)}(x)`.
///
/// `k` may be negative as long as `k >= -n`.
pub fn laguerre(n: usize, k: i64, x: f64) -> Result<f64> {
    check_laguerre_args(n, k)?;
    let mut seq = Vec::with_capacity(n + 1);
    laguerre_sequence_scaled(n, k as f64, x, &mut seq);
    let (mant, scale) = seq[n];
    Ok(if scale == 0.0 {
        mant
    } else {
        mant * scale.exp()
    })
}

fn check_laguerre_args(n: usize, k: i64) -> Result<()> {
    if n > LAGUERRE_DEGREE_CEILING {
        return Err(Error::DegreeTooLarge {
            degree: n,
            ceiling: LAGUERRE_DEGREE_CEILING,
        });
    }
    if k < -(n as i64) {
        return Err(Error::InvalidParameter(format!(
            "Laguerre order {k} must be at least -{n}"
        )));
    }
    Ok(())
}

/// Fills `out` with `L_m^{(k)}(x)` for `m = 0..=n_max`, each entry stored
/// as `(mantissa, ln_scale)` so that the value is `mantissa * exp(ln_scale)`.
///
/// The recurrence is run on the differences `D_m = L_m − L_{m−1}`,
/// `(m+1) D_{m+1} = (m+k) D_m − x L_m`, which avoids the cancellation of
/// the textbook form at small `x`.
pub fn laguerre_sequence_scaled(n_max: usize, k: f64, x: f64, out: &mut Vec<(f64, f64)>) {
    out.clear();
    let mut scale = 0.0;
    let mut value = 1.0;
    out.push((value, scale));
    let mut diff = k - x;
    for m in 0..n_max {
        if m > 0 {
            let mf = m as f64;
            diff = ((mf + k) * diff - x * value) / (mf + 1.0);
        }
        value += diff;
        if value.abs() > RESCALE_THRESHOLD {
            value *= RESCALE_FACTOR;
            diff *= RESCALE_FACTOR;
            scale += RESCALE_LN;
        }
        out.push((value, scale));
    }
}

/// `(L_n(x), L_n(x) − L_{n−1}(x))` with a common scale factor removed.
pub(crate) fn laguerre_with_difference(n: usize, x: f64) -> (f64, f64, f64) {
    let mut scale = 0.0;
    let mut value = 1.0;
    let mut diff = -x;
    if n == 0 {
        return (1.0, 0.0, 0.0);
    }
    for m in 0..n {
        if m > 0 {
            let mf = m as f64;
            diff = (mf * diff - x * value) / (mf + 1.0);
        }
        value += diff;
        if value.abs() > RESCALE_THRESHOLD {
            value *= RESCALE_FACTOR;
            diff *= RESCALE_FACTOR;
            scale += RESCALE_LN;
        }
    }
    (value, diff, scale)
}

/// Plain (unscaled) Laguerre values `L_m(x)`, `m = 0..=n_max`, written to `out`.
///
/// Callers guarantee the values stay in range, which holds whenever
/// `x` is at most a few hundred and `n_max` is moderate.
pub fn laguerre_sequence(n_max: usize, x: f64, out: &mut Vec<f64>) {
    out.clear();
    let mut value = 1.0;
    out.push(value);
    let mut diff = -x;
    for m in 0..n_max {
        if m > 0 {
            let mf = m as f64;
            diff = (mf * diff - x * value) / (mf + 1.0);
        }
        value += diff;
        out.push(value);
    }
}

/// Physicists' Hermite polynomial `H_n(x)`.
pub fn hermite(n: usize, x: f64) -> Result<f64> {
    if n > HERMITE_DEGREE_CEILING {
        return Err(Error::DegreeTooLarge {
            degree: n,
            ceiling: HERMITE_DEGREE_CEILING,
        });
    }
    if n == 0 {
        return Ok(1.0);
    }
    let mut prev = 1.0;
    let mut cur = 2.0 * x;
    for m in 1..n {
        let next = 2.0 * x * cur - 2.0 * m as f64 * prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// L²-normalised harmonic-oscillator eigenfunction
/// `φ_n(x) = (√π 2^n n! ℓ)^{-1/2} H_n(x/ℓ) exp(-x²/(2ℓ²))`.
pub fn oscillator_eigenfunction(n: usize, x: f64, lengthscale: f64) -> Result<f64> {
    let mut buf = Vec::with_capacity(n + 1);
    oscillator_sequence(n, x, lengthscale, &mut buf)?;
    Ok(buf[n])
}

/// `φ_0(x) ..= φ_{n_max}(x)` by the normalised recurrence
/// `φ_{m+1} = √(2/(m+1)) ξ φ_m − √(m/(m+1)) φ_{m−1}`, `ξ = x/ℓ`.
pub fn oscillator_sequence(
    n_max: usize,
    x: f64,
    lengthscale: f64,
    out: &mut Vec<f64>,
) -> Result<()> {
    if !(lengthscale > 0.0 && lengthscale.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "oscillator length scale must be positive, got {lengthscale}"
        )));
    }
    if n_max > OSCILLATOR_DEGREE_CEILING {
        return Err(Error::DegreeTooLarge {
            degree: n_max,
            ceiling: OSCILLATOR_DEGREE_CEILING,
        });
    }
    out.clear();
    let xi = x / lengthscale;
    let phi0 = std::f64::consts::PI.powf(-0.25) / lengthscale.sqrt() * (-0.5 * xi * xi).exp();
    out.push(phi0);
    if n_max == 0 {
        return Ok(());
    }
    let mut prev = phi0;
    let mut cur = std::f64::consts::SQRT_2 * xi * phi0;
    out.push(cur);
    for m in 1..n_max {
        let mf = m as f64;
        let next = (2.0 / (mf + 1.0)).sqrt() * xi * cur - (mf / (mf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        out.push(cur);
    }
    Ok(())
}

/// `ln(m!)` for `m = 0..=n_max`.
pub fn ln_factorials(n_max: usize) -> Vec<f64> {
    let mut table = Vec::with_capacity(n_max + 1);
    let mut acc = 0.0;
    table.push(0.0);
    for m in 1..=n_max {
        acc += (m as f64).ln();
        table.push(acc);
    }
    table
}
