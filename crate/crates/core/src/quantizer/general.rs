use num_complex::Complex64;

use super::{CahillGlauber, DisplacementKernel, FockBasis, GroenewoldMatrix, KernelTable, TRACE_FLOOR};
use crate::densities::{GeneralDensity, Support};
use crate::error::{Error, Result};
use crate::special_functions::{finite_rule, QuadratureRule};

/// Tuning for [`quantize_general_with`].
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralOptions {
    /// Basis aspect ratio `β/γ`; defaults to the support's width ratio.
    pub aspect: Option<f64>,
    /// Relative agreement required between a rule and its refinement.
    pub refine_tol: f64,
    /// Per-axis node cap for refinement.
    pub max_points: usize,
    /// Largest tolerated imaginary residue in any entry.
    pub symmetry_tol: f64,
    /// Allowed `|Tr − 1|`; defaults to the tail estimate plus a small floor.
    pub trace_tolerance: Option<f64>,
}

impl Default for GeneralOptions {
    fn default() -> Self {
        Self { aspect: None, refine_tol: 1e-9, max_points: 1024, symmetry_tol: 1e-8, trace_tolerance: None }
    }
}

/// Quantises an arbitrary density on its support with the given starting
/// tensor rules (finite-interval rules, remapped onto the support).
pub fn quantize_general(
    density: &GeneralDensity,
    n_max: usize,
    rules: (&QuadratureRule, &QuadratureRule),
) -> Result<GroenewoldMatrix> {
    quantize_general_with(density, n_max, rules, &GeneralOptions::default(), &CahillGlauber)
}

pub fn quantize_general_with(
    density: &GeneralDensity,
    n_max: usize,
    rules: (&QuadratureRule, &QuadratureRule),
    options: &GeneralOptions,
    kernel: &dyn DisplacementKernel,
) -> Result<GroenewoldMatrix> {
    let support = density.support();
    support.validate()?;
    let aspect = options.aspect.unwrap_or_else(|| natural_aspect(&support));
    let basis = FockBasis::new(aspect, density.hbar())?;
    let dim = n_max + 1;
    let mut table = KernelTable::new(dim)?;

    let mut sizes = (rules.0.len(), rules.1.len());
    let mut prev = accumulate(density, &basis, rules, kernel, &mut table)?;
    let converged = loop {
        let next = ((2 * sizes.0).min(options.max_points), (2 * sizes.1).min(options.max_points));
        if next == sizes {
            return Err(Error::QuadratureNotConverged(format!(
                "general quantisation at n_max = {n_max} with {}×{} nodes",
                sizes.0, sizes.1
            )));
        }
        sizes = next;
        let (rq, rp) = (finite_rule(sizes.0, -1.0, 1.0)?, finite_rule(sizes.1, -1.0, 1.0)?);
        let cur = accumulate(density, &basis, (&rq, &rp), kernel, &mut table)?;
        let scale = cur.iter().fold(0.0f64, |m, v| m.max(v.norm())).max(f64::MIN_POSITIVE);
        let diff = cur.iter().zip(&prev).fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
        prev = cur;
        if diff <= options.refine_tol * scale {
            break prev;
        }
    };

    let residue = converged.iter().fold(0.0f64, |m, v| m.max(v.im.abs()));
    if residue > options.symmetry_tol {
        return Err(Error::SymmetryViolation(residue));
    }
    // Hermiticity is exact per node; average the transposes to drop rounding.
    let mut entries = vec![0.0; dim * dim];
    for n in 0..dim {
        for m in 0..=n {
            let v = 0.5 * (converged[n * dim + m].re + converged[m * dim + n].re);
            entries[n * dim + m] = v;
            entries[m * dim + n] = v;
        }
    }
    let tail = match n_max {
        0 => entries[0].abs(),
        _ => entries[(n_max - 1) * (dim + 1)].abs() + entries[n_max * (dim + 1)].abs(),
    };
    let tolerance = options.trace_tolerance.unwrap_or(tail + TRACE_FLOOR);
    let matrix = GroenewoldMatrix::from_dense(entries, dim, basis, tail).with_trace_tolerance(tolerance);
    let residual = matrix.trace_residual();
    if residual > tolerance {
        return Err(Error::Truncation { residual, tolerance });
    }
    Ok(matrix)
}

fn natural_aspect(support: &Support) -> f64 {
    match *support {
        Support::Box { q_min, q_max, p_min, p_max } => (q_max - q_min) / (p_max - p_min),
        Support::Ellipse { q_semi, p_semi } => q_semi / p_semi,
    }
}

// ∫ ρ(q,p) ⟨n|Δ(α)|m⟩ dq dp on every entry.
fn accumulate(
    density: &GeneralDensity,
    basis: &FockBasis,
    rules: (&QuadratureRule, &QuadratureRule),
    kernel: &dyn DisplacementKernel,
    table: &mut KernelTable,
) -> Result<Vec<Complex64>> {
    let dim = table.dim();
    let nodes = density.support().tensor_nodes(rules)?;
    let mut acc = vec![Complex64::new(0.0, 0.0); dim * dim];
    let mut scratch = vec![Complex64::new(0.0, 0.0); dim * dim];
    for (q, p, w) in nodes {
        let weight = w * density.sample(q, p);
        if weight == 0.0 {
            continue;
        }
        kernel.fill(basis.alpha(q, p), table, &mut scratch);
        for (a, k) in acc.iter_mut().zip(&scratch) {
            *a += k * weight;
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densities::{GaussianDensity, UniformEllipseDensity};
    use crate::quantizer::{quantize_gaussian, quantize_uniform_ellipse};

    fn rules(n: usize) -> QuadratureRule {
        finite_rule(n, -1.0, 1.0).unwrap()
    }

    #[test]
    fn gaussian_general_matches_radial() {
        let g = GaussianDensity::new(1.3, 0.9, 0.8).unwrap();
        let r = rules(48);
        let general = quantize_general(&GeneralDensity::from_gaussian(&g), 10, (&r, &r)).unwrap();
        let radial = quantize_gaussian(&g, 10).unwrap();
        assert!(general.basis().same_as(&radial.basis()));
        for n in 0..=10 {
            for m in 0..=10 {
                assert!((general.get(n, m) - radial.get(n, m)).abs() < 1e-9, "({n},{m})");
            }
        }
    }

    #[test]
    fn ellipse_general_matches_radial() {
        let e = UniformEllipseDensity::with_s(3.0).unwrap();
        let r = rules(32);
        let general = quantize_general(&GeneralDensity::from_uniform_ellipse(&e), 8, (&r, &r)).unwrap();
        let radial = quantize_uniform_ellipse(&e, 8).unwrap();
        for n in 0..=8 {
            for m in 0..=8 {
                assert!((general.get(n, m) - radial.get(n, m)).abs() < 1e-9, "({n},{m})");
            }
        }
    }

    #[test]
    fn off_centre_density_violates_symmetry() {
        let support = Support::Box { q_min: -1.0, q_max: 1.0, p_min: 0.0, p_max: 2.0 };
        let d = GeneralDensity::new(|_, _| 0.25, support, 1.0).unwrap();
        let r = rules(16);
        assert!(matches!(quantize_general(&d, 4, (&r, &r)), Err(Error::SymmetryViolation(_))));
    }

    #[test]
    fn truncation_is_reported() {
        // a wide box has most of its weight far above n = 2
        let d = GeneralDensity::uniform_box(6.0, 6.0, 1.0).unwrap();
        let r = rules(32);
        assert!(matches!(quantize_general(&d, 2, (&r, &r)), Err(Error::Truncation { .. })));
    }
}
