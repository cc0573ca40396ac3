//! Cyclic Jacobi eigensolver for dense real symmetric matrices.

use crate::error::{Error, Result};

pub(crate) const MAX_SWEEPS: usize = 100;
const OFF_TOL: f64 = 1e-12;

/// Eigenvalues of the row-major symmetric matrix `a`, each paired with
/// the index of the largest component of its eigenvector.
pub(crate) fn symmetric_eigen(mut a: Vec<f64>, dim: usize) -> Result<Vec<(f64, usize)>> {
    debug_assert_eq!(a.len(), dim * dim);
    let mut v = vec![0.0; dim * dim];
    for i in 0..dim {
        v[i * dim + i] = 1.0;
    }
    let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let target = OFF_TOL * norm;
    let mut converged = dim < 2 || norm == 0.0;
    let mut sweeps = 0;
    while !converged {
        if sweeps == MAX_SWEEPS {
            return Err(Error::EigenNotConverged(MAX_SWEEPS));
        }
        sweeps += 1;
        for p in 0..dim - 1 {
            for q in p + 1..dim {
                let apq = a[p * dim + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * dim + p];
                let aqq = a[q * dim + q];
                let theta = 0.5 * (aqq - app) / apq;
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate(&mut a, dim, p, q, c, s);
                a[p * dim + p] = app - t * apq;
                a[q * dim + q] = aqq + t * apq;
                a[p * dim + q] = 0.0;
                a[q * dim + p] = 0.0;
                for k in 0..dim {
                    let vkp = v[k * dim + p];
                    let vkq = v[k * dim + q];
                    v[k * dim + p] = c * vkp - s * vkq;
                    v[k * dim + q] = s * vkp + c * vkq;
                }
            }
        }
        let off: f64 = (0..dim)
            .flat_map(|i| (0..dim).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * dim + j] * a[i * dim + j])
            .sum::<f64>()
            .sqrt();
        converged = off <= target;
    }
    Ok((0..dim)
        .map(|k| {
            let dominant = (0..dim)
                .max_by(|&i, &j| v[i * dim + k].abs().total_cmp(&v[j * dim + k].abs()))
                .unwrap_or(k);
            (a[k * dim + k], dominant)
        })
        .collect())
}

// Applies the off-diagonal part of the rotation in the (p, q) plane;
// the caller fixes up the 2×2 block.
fn rotate(a: &mut [f64], dim: usize, p: usize, q: usize, c: f64, s: f64) {
    for k in 0..dim {
        if k == p || k == q {
            continue;
        }
        let akp = a[k * dim + p];
        let akq = a[k * dim + q];
        let new_p = c * akp - s * akq;
        let new_q = s * akp + c * akq;
        a[k * dim + p] = new_p;
        a[p * dim + k] = new_p;
        a[k * dim + q] = new_q;
        a[q * dim + k] = new_q;
    }
}
