//! Fock-basis matrix elements of the Weyl–Wigner kernel, a displaced
//! parity operator scaled by two.
//!
//! For `n >= m`:
//!
//! ```text
//! ⟨n|Δ(α)|m⟩ = 2 (−1)^m sqrt(m!/n!) (2α)^(n−m) L_m^(n−m)(4|α|²) exp(−2|α|²)
//! ```
//!
//! and `⟨m|Δ|n⟩` is the complex conjugate. Everything except the phase of
//! `(2α)^(n−m)` is accumulated as a logarithm so that large indices do not
//! overflow the factorial ratio or the power.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special_functions::{laguerre_sequence_scaled, ln_factorials};

/// Largest Fock index for which matrix elements are evaluated.
pub const MAX_FOCK_INDEX: usize = 1024;

/// Index of a Fock state `|n⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FockLabel(pub usize);

impl From<usize> for FockLabel {
    fn from(n: usize) -> Self {
        FockLabel(n)
    }
}

/// Source of kernel matrix elements used by the general quantiser and by
/// the forward (Weyl symbol) transform.
pub trait DisplacementKernel: Sync {
    /// Writes `⟨n|Δ(α)|m⟩` for `n, m < table.dim()` into `out` (row-major).
    fn fill(&self, alpha: Complex64, table: &mut KernelTable, out: &mut [Complex64]);
}

/// Reusable scratch space for [`DisplacementKernel::fill`].
#[derive(Debug, Clone)]
pub struct KernelTable {
    dim: usize,
    ln_fact: Vec<f64>,
    laguerre: Vec<(f64, f64)>,
}

impl KernelTable {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 || dim > MAX_FOCK_INDEX + 1 {
            return Err(Error::DegreeTooLarge { degree: dim.saturating_sub(1), ceiling: MAX_FOCK_INDEX });
        }
        Ok(Self { dim, ln_fact: ln_factorials(dim), laguerre: Vec::with_capacity(dim) })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// The closed-form matrix elements in terms of associated Laguerre polynomials.
#[derive(Debug, Clone, Copy, Default)]
pub struct CahillGlauber;

impl DisplacementKernel for CahillGlauber {
    fn fill(&self, alpha: Complex64, table: &mut KernelTable, out: &mut [Complex64]) {
        fill_elements(alpha, table, out);
    }
}

fn fill_elements(alpha: Complex64, table: &mut KernelTable, out: &mut [Complex64]) {
    let dim = table.dim;
    debug_assert_eq!(out.len(), dim * dim);
    let radius_sq = alpha.norm_sqr();
    let x = 4.0 * radius_sq;
    if radius_sq == 0.0 {
        out.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        for m in 0..dim {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            out[m * dim + m] = Complex64::new(2.0 * sign, 0.0);
        }
        return;
    }
    let ln_two_abs = (2.0 * radius_sq.sqrt()).ln();
    let phase_step = Complex64::from_polar(1.0, alpha.arg());
    let mut phase = Complex64::new(1.0, 0.0);
    for k in 0..dim {
        let len = dim - k;
        laguerre_sequence_scaled(len - 1, k as f64, x, &mut table.laguerre);
        let base = std::f64::consts::LN_2 + k as f64 * ln_two_abs - 2.0 * radius_sq;
        for m in 0..len {
            let n = m + k;
            let (mant, scale) = table.laguerre[m];
            let value = if mant == 0.0 {
                0.0
            } else {
                let ln_mag = base + 0.5 * (table.ln_fact[m] - table.ln_fact[n]) + scale + mant.abs().ln();
                let sign = if (m % 2 == 0) == (mant > 0.0) { 1.0 } else { -1.0 };
                sign * ln_mag.exp()
            };
            let element = phase * value;
            out[n * dim + m] = element;
            out[m * dim + n] = element.conj();
        }
        phase *= phase_step;
    }
}

/// `⟨n|Δ(α)|m⟩` for a single pair of Fock labels.
pub fn displacement_matrix_element(n: FockLabel, m: FockLabel, alpha: Complex64) -> Result<Complex64> {
    let (hi, lo) = (n.0.max(m.0), n.0.min(m.0));
    if hi > MAX_FOCK_INDEX {
        return Err(Error::DegreeTooLarge { degree: hi, ceiling: MAX_FOCK_INDEX });
    }
    let k = hi - lo;
    let radius_sq = alpha.norm_sqr();
    let sign = if lo % 2 == 0 { 1.0 } else { -1.0 };
    let upper = if radius_sq == 0.0 {
        if k == 0 {
            Complex64::new(2.0 * sign, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    } else {
        let mut seq = Vec::with_capacity(lo + 1);
        laguerre_sequence_scaled(lo, k as f64, 4.0 * radius_sq, &mut seq);
        let (mant, scale) = seq[lo];
        if mant == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            let ln_fact = ln_factorials(hi);
            let ln_mag = std::f64::consts::LN_2
                + 0.5 * (ln_fact[lo] - ln_fact[hi])
                + k as f64 * (2.0 * radius_sq.sqrt()).ln()
                - 2.0 * radius_sq
                + scale
                + mant.abs().ln();
            let s = if mant > 0.0 { sign } else { -sign };
            Complex64::from_polar(s * ln_mag.exp(), k as f64 * alpha.arg())
        }
    };
    Ok(if n.0 >= m.0 { upper } else { upper.conj() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    type Matrix = Vec<Vec<Complex64>>;

    fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
        let n = a.len();
        let mut c = vec![vec![Complex64::new(0.0, 0.0); n]; n];
        for i in 0..n {
            for k in 0..n {
                let aik = a[i][k];
                if aik == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    c[i][j] += aik * b[k][j];
                }
            }
        }
        c
    }

    // exp(β a† − β̄ a) in a truncated basis by scaling and squaring of a
    // Taylor series; only the low-index block is trusted.
    fn displacement_by_exponential(beta: Complex64, dim: usize) -> Matrix {
        let mut gen = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
        for n in 0..dim - 1 {
            let s = ((n + 1) as f64).sqrt();
            gen[n + 1][n] = beta * s; // a† |n⟩ = sqrt(n+1) |n+1⟩
            gen[n][n + 1] = -beta.conj() * s; // a |n+1⟩ = sqrt(n+1) |n⟩
        }
        let squarings = 8;
        let scale = 0.5f64.powi(squarings);
        for row in gen.iter_mut() {
            for v in row.iter_mut() {
                *v *= scale;
            }
        }
        let mut result = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
        for (i, row) in result.iter_mut().enumerate() {
            row[i] = Complex64::new(1.0, 0.0);
        }
        let mut term = result.clone();
        for k in 1..30 {
            term = matmul(&term, &gen);
            for row in term.iter_mut() {
                for v in row.iter_mut() {
                    *v /= k as f64;
                }
            }
            for i in 0..dim {
                for j in 0..dim {
                    result[i][j] += term[i][j];
                }
            }
        }
        for _ in 0..squarings {
            result = matmul(&result, &result);
        }
        result
    }

    #[test]
    fn origin_values() {
        let zero = Complex64::new(0.0, 0.0);
        assert_eq!(displacement_matrix_element(0.into(), 0.into(), zero).unwrap(), Complex64::new(2.0, 0.0));
        assert_eq!(displacement_matrix_element(1.into(), 1.into(), zero).unwrap(), Complex64::new(-2.0, 0.0));
        assert_eq!(displacement_matrix_element(3.into(), 1.into(), zero).unwrap(), zero);
    }

    #[test]
    fn ground_state_coherent_overlap() {
        // ⟨0|Δ(α)|0⟩ = 2⟨0|D(2α)|0⟩ = 2 exp(−2|α|²); |α|² = 1/2 gives 2/e.
        let alpha = Complex64::from_polar(0.5f64.sqrt(), 0.7);
        let v = displacement_matrix_element(0.into(), 0.into(), alpha).unwrap();
        assert_relative_eq!(v.re, 2.0 * (-1.0f64).exp(), max_relative = 1e-14);
        assert!(v.im.abs() < 1e-15);
        assert_relative_eq!(v.re, 0.735_758_882_342_884_6, max_relative = 1e-12);
    }

    #[test]
    fn matches_displaced_parity_from_matrix_exponential() {
        // Δ(α) = 2 D(2α) P with P = diag((−1)^m)
        let alpha = Complex64::new(0.43, -0.61);
        let big = 90;
        let d = displacement_by_exponential(alpha * 2.0, big);
        let dim = 12;
        let mut table = KernelTable::new(dim).unwrap();
        let mut filled = vec![Complex64::new(0.0, 0.0); dim * dim];
        CahillGlauber.fill(alpha, &mut table, &mut filled);
        for n in 0..dim {
            for m in 0..dim {
                let parity = if m % 2 == 0 { 1.0 } else { -1.0 };
                let want = d[n][m] * (2.0 * parity);
                let got = displacement_matrix_element(n.into(), m.into(), alpha).unwrap();
                assert!((got - want).norm() < 1e-11, "n={n} m={m}: {got} vs {want}");
                assert!((filled[n * dim + m] - got).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn hermitian_and_bounded() {
        let alpha = Complex64::new(-1.3, 0.2);
        let dim = 20;
        let mut table = KernelTable::new(dim).unwrap();
        let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
        CahillGlauber.fill(alpha, &mut table, &mut out);
        for n in 0..dim {
            for m in 0..dim {
                assert_eq!(out[n * dim + m], out[m * dim + n].conj());
            }
        }
        // rows of a unitary times 2: Σ_m |⟨n|Δ|m⟩|² ≤ 4
        for n in 0..dim {
            let row: f64 = (0..dim).map(|m| out[n * dim + m].norm_sqr()).sum();
            assert!(row <= 4.0 + 1e-12);
        }
    }

    #[test]
    fn large_indices_stay_finite() {
        let alpha = Complex64::new(12.0, 5.0);
        let v = displacement_matrix_element(1000.into(), 3.into(), alpha).unwrap();
        assert!(v.re.is_finite() && v.im.is_finite());
        assert!(v.norm() <= 2.0);
        assert!(displacement_matrix_element(MAX_FOCK_INDEX.into(), 0.into(), alpha).is_ok());
        assert!(matches!(
            displacement_matrix_element((MAX_FOCK_INDEX + 1).into(), 0.into(), alpha),
            Err(Error::DegreeTooLarge { .. })
        ));
    }
}
