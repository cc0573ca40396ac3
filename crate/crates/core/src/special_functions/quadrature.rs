use super::{laguerre_sequence_scaled, laguerre_with_difference};
use crate::error::{Error, Result};

/// Integration domain of a [`QuadratureRule`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RuleDomain {
    /// Plain integral over `[a, b]`.
    Finite { a: f64, b: f64 },
    /// `∫_0^∞ e^{-t} f(t) dt`; the exponential weight is folded into the weights.
    SemiInfinite,
}

/// Nodes and positive weights of a Gaussian quadrature rule.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    domain: RuleDomain,
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn domain(&self) -> RuleDomain {
        self.domain
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// Applies the rule to `f`. For a semi-infinite rule this is
    /// `∫_0^∞ e^{-t} f(t) dt`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.iter().map(|(x, w)| w * f(x)).sum()
    }

    /// The same rule affinely moved onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> Result<QuadratureRule> {
        let RuleDomain::Finite { a: a0, b: b0 } = self.domain else {
            return Err(Error::InvalidParameter(
                "only finite-interval rules can be remapped".into(),
            ));
        };
        check_interval(a, b)?;
        let ratio = (b - a) / (b0 - a0);
        Ok(QuadratureRule {
            nodes: self.nodes.iter().map(|x| a + (x - a0) * ratio).collect(),
            weights: self.weights.iter().map(|w| w * ratio).collect(),
            domain: RuleDomain::Finite { a, b },
        })
    }
}

fn check_interval(a: f64, b: f64) -> Result<()> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::InvalidParameter(format!(
            "quadrature interval [{a}, {b}] is degenerate"
        )));
    }
    Ok(())
}

/// Gauss–Legendre rule with `npoints` nodes on `[a, b]`.
pub fn finite_rule(npoints: usize, a: f64, b: f64) -> Result<QuadratureRule> {
    if npoints == 0 {
        return Err(Error::InvalidParameter("a quadrature rule needs at least one node".into()));
    }
    check_interval(a, b)?;
    let (nodes, weights) = legendre_reference(npoints)?;
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    Ok(QuadratureRule {
        nodes: nodes.iter().map(|x| mid + half * x).collect(),
        weights: weights.iter().map(|w| half * w).collect(),
        domain: RuleDomain::Finite { a, b },
    })
}

/// Gauss–Laguerre rule for `∫_0^∞ e^{-t} f(t) dt` with `npoints` nodes.
///
/// Nodes whose weight underflows to zero are dropped, so very large
/// rules may hold slightly fewer than `npoints` entries.
pub fn semi_infinite_rule(npoints: usize) -> Result<QuadratureRule> {
    if npoints == 0 {
        return Err(Error::InvalidParameter("a quadrature rule needs at least one node".into()));
    }
    let n = npoints;
    let diag: Vec<f64> = (0..n).map(|k| 2.0 * k as f64 + 1.0).collect();
    let off: Vec<f64> = (1..n).map(|k| k as f64).collect();
    let mut nodes = tridiagonal_eigenvalues(diag, off)?;

    let mut seq = Vec::with_capacity(n + 2);
    for x in nodes.iter_mut() {
        for _ in 0..4 {
            // x L_n'(x) = n (L_n − L_{n−1})
            let (ln, diff, _) = laguerre_with_difference(n, *x);
            let denom = n as f64 * diff;
            if denom == 0.0 {
                break;
            }
            let step = *x * ln / denom;
            *x -= step;
            if step.abs() <= 4.0 * f64::EPSILON * x.abs() {
                break;
            }
        }
    }

    let mut rule_nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for &x in &nodes {
        laguerre_sequence_scaled(n + 1, 0.0, x, &mut seq);
        let (mant, scale) = seq[n + 1];
        let ln_l = mant.abs().ln() + scale;
        let ln_w = x.ln() - 2.0 * ((n + 1) as f64).ln() - 2.0 * ln_l;
        let w = ln_w.exp();
        if w > 0.0 {
            rule_nodes.push(x);
            weights.push(w);
        }
    }
    Ok(QuadratureRule {
        nodes: rule_nodes,
        weights,
        domain: RuleDomain::SemiInfinite,
    })
}

fn legendre_reference(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 1 {
        return Ok((vec![0.0], vec![2.0]));
    }
    let diag = vec![0.0; n];
    let off: Vec<f64> = (1..n)
        .map(|k| {
            let k = k as f64;
            k / (4.0 * k * k - 1.0).sqrt()
        })
        .collect();
    let mut nodes = tridiagonal_eigenvalues(diag, off)?;

    let legendre = |x: f64| -> (f64, f64) {
        let mut prev = 1.0;
        let mut cur = x;
        for m in 1..n {
            let mf = m as f64;
            let next = ((2.0 * mf + 1.0) * x * cur - mf * prev) / (mf + 1.0);
            prev = cur;
            cur = next;
        }
        let deriv = n as f64 * (x * cur - prev) / (x * x - 1.0);
        (cur, deriv)
    };

    for x in nodes.iter_mut() {
        for _ in 0..4 {
            let (p, dp) = legendre(*x);
            let step = p / dp;
            *x -= step;
            if step.abs() <= 2.0 * f64::EPSILON {
                break;
            }
        }
    }
    // exact reflection symmetry
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let m = 0.5 * (nodes[j] - nodes[i]);
        nodes[i] = -m;
        nodes[j] = m;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    let weights = nodes
        .iter()
        .map(|&x| {
            let (_, dp) = legendre(x);
            2.0 / ((1.0 - x * x) * dp * dp)
        })
        .collect();
    Ok((nodes, weights))
}

/// Eigenvalues (ascending) of the symmetric tridiagonal matrix with the
/// given diagonal and off-diagonal, by implicit QL iteration.
pub fn tridiagonal_eigenvalues(mut d: Vec<f64>, off: Vec<f64>) -> Result<Vec<f64>> {
    let n = d.len();
    if n == 0 {
        return Ok(d);
    }
    if off.len() + 1 != n {
        return Err(Error::DimensionMismatch(off.len() + 1, n));
    }
    let mut e = off;
    e.push(0.0);

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::EigenNotConverged(iter));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(|a, b| a.total_cmp(b));
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special_functions::laguerre;
    use approx::assert_relative_eq;

    fn assert_rule_invariants(rule: &QuadratureRule) {
        assert_eq!(rule.nodes().len(), rule.weights().len());
        assert!(rule.weights().iter().all(|&w| w > 0.0));
        assert!(rule.nodes().windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn two_point_rule_integrates_cubics() {
        let rule = finite_rule(2, -1.0, 1.0).unwrap();
        assert_relative_eq!(rule.integrate(|x| x * x), 2.0 / 3.0, max_relative = 1e-15);
        assert!(rule.integrate(|x| x * x * x).abs() < 1e-15);
    }

    #[test]
    fn one_point_rule() {
        let rule = finite_rule(1, 0.0, 2.0).unwrap();
        assert_eq!(rule.integrate(|_| 1.0), 2.0);
    }

    #[test]
    fn exponential_on_interval() {
        let rule = finite_rule(20, 0.0, 5.0).unwrap();
        let want = 1.0 - (-5.0f64).exp();
        assert!((rule.integrate(|t| (-t).exp()) - want).abs() <= 1e-12);
    }

    #[test]
    fn degenerate_intervals_rejected() {
        assert!(finite_rule(4, 1.0, 1.0).is_err());
        assert!(finite_rule(4, 2.0, 1.0).is_err());
        assert!(finite_rule(0, 0.0, 1.0).is_err());
        assert!(finite_rule(3, 0.0, f64::INFINITY).is_err());
    }

    #[test]
    fn legendre_exactness_degree_2n_minus_1() {
        for n in [1usize, 2, 3, 5, 8, 13, 32, 64, 200] {
            let rule = finite_rule(n, -1.0, 1.0).unwrap();
            assert_rule_invariants(&rule);
            for deg in 0..=(2 * n - 1).min(60) {
                let got = rule.integrate(|x| x.powi(deg as i32));
                let want = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!(
                    (got - want).abs() <= 1e-12 * want.abs().max(1.0),
                    "n={n} deg={deg}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn legendre_nodes_are_symmetric() {
        for n in [2usize, 7, 50, 501, 1200] {
            let rule = finite_rule(n, -1.0, 1.0).unwrap();
            let x = rule.nodes();
            for i in 0..n {
                assert!((x[i] + x[n - 1 - i]).abs() <= 1e-13);
            }
            assert_relative_eq!(rule.weights().iter().sum::<f64>(), 2.0, max_relative = 1e-13);
        }
    }

    #[test]
    fn laguerre_rule_moments() {
        let rule = semi_infinite_rule(16).unwrap();
        assert_rule_invariants(&rule);
        assert_relative_eq!(rule.integrate(|_| 1.0), 1.0, max_relative = 1e-13);
        assert_relative_eq!(rule.integrate(|t| t), 1.0, max_relative = 1e-13);
        // Γ(k+1) = k!
        let mut fact = 1.0;
        for k in 1..=31 {
            fact *= k as f64;
            assert_relative_eq!(rule.integrate(|t| t.powi(k)), fact, max_relative = 1e-11);
        }
    }

    #[test]
    fn laguerre_rule_alternating_integral() {
        // ∫ e^{-at} L_n(bt) dt = (a-b)^n / a^{n+1}; a = 1, b = 2 gives (-1)^n.
        let rule = semi_infinite_rule(8).unwrap();
        let got = rule.integrate(|t| laguerre(5, 0, 2.0 * t).unwrap());
        assert!((got + 1.0).abs() <= 1e-12);
    }

    #[test]
    fn large_laguerre_rule_stays_accurate() {
        let rule = semi_infinite_rule(300).unwrap();
        assert_rule_invariants(&rule);
        assert_relative_eq!(rule.integrate(|_| 1.0), 1.0, max_relative = 1e-12);
        let got = rule.integrate(|t| laguerre(120, 0, 2.0 * t).unwrap());
        assert!((got - 1.0).abs() <= 1e-9, "{got}");
    }

    #[test]
    fn remapping_preserves_exactness() {
        let rule = finite_rule(6, -1.0, 1.0).unwrap().mapped(2.0, 5.0).unwrap();
        assert_relative_eq!(rule.integrate(|x| x * x), (125.0 - 8.0) / 3.0, max_relative = 1e-14);
        assert!(semi_infinite_rule(4).unwrap().mapped(0.0, 1.0).is_err());
    }

    #[test]
    fn tridiagonal_known_spectrum() {
        // path-graph Laplacian-like matrix: 2 on diagonal, -1 off diagonal
        let n = 10;
        let eig = tridiagonal_eigenvalues(vec![2.0; n], vec![-1.0; n - 1]).unwrap();
        for (j, lam) in eig.iter().enumerate() {
            let theta = (j + 1) as f64 * std::f64::consts::PI / (n + 1) as f64;
            assert_relative_eq!(*lam, 2.0 - 2.0 * theta.cos(), epsilon = 1e-13);
        }
    }
}
