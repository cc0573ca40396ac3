//! Property suites behind `groenewold verify`.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::Write as _;

use groenewold::densities::{Density, GaussianDensity, GeneralDensity, UniformEllipseDensity};
use groenewold::kernel_check::{coordinate_kernel, hermite_identity_residual, KernelGrid, KernelOperator};
use groenewold::quantizer::{
    expectation, quantize_gaussian, quantize_general_with, quantize_uniform_ellipse, trace_product, weyl_symbol,
    CahillGlauber, DisplacementKernel, GeneralOptions, GroenewoldMatrix, KernelTable, Observable,
};
use groenewold::special_functions::{finite_rule, laguerre, oscillator_sequence, semi_infinite_rule};
use groenewold::spectra::{
    eigendecompose, gaussian_eigenvalue, gaussian_eigenvalues, spectral_bounds, uniform_eigenvalues,
    uniform_trace_closure, Family,
};
use groenewold::Result;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use crate::config::{Mutation, RunConfig};
use crate::{CliError, CliResult};

pub const GROUPS: [&str; 5] = ["special", "densities", "quantizer", "spectra", "kernel"];

/// Result of one check.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub pass: bool,
    pub detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

/// Kernel with every element negated, i.e. `(−1)^m` replaced by `(−1)^(m+1)`.
struct SignFlipped;

impl DisplacementKernel for SignFlipped {
    fn fill(&self, alpha: Complex64, table: &mut KernelTable, out: &mut [Complex64]) {
        CahillGlauber.fill(alpha, table, out);
        out.iter_mut().for_each(|v| *v = -*v);
    }
}

struct Ctx {
    kernel: Box<dyn DisplacementKernel>,
}

type CheckFn = fn(&Ctx) -> Result<Outcome>;

const CHECKS: &[(&str, &str, CheckFn)] = &[
    ("special", "laguerre_explicit_sum", laguerre_explicit_sum),
    ("special", "quadrature_moments", quadrature_moments),
    ("special", "oscillator_orthonormality", oscillator_orthonormality),
    ("densities", "normalisation", normalisation),
    ("densities", "uncertainty_products", uncertainty_products),
    ("densities", "overlap_symmetry", overlap_symmetry),
    ("quantizer", "radial_general_agreement", radial_general_agreement),
    ("quantizer", "pair_trace_positivity", pair_trace_positivity),
    ("quantizer", "unit_trace", unit_trace),
    ("quantizer", "expectation_equivalence", expectation_equivalence),
    ("quantizer", "weyl_round_trip", weyl_round_trip),
    ("spectra", "closed_form_vs_quadrature", closed_form_vs_quadrature),
    ("spectra", "gaussian_trace_and_purity", gaussian_trace_and_purity),
    ("spectra", "sign_alternation", sign_alternation),
    ("spectra", "delta_limit", delta_limit),
    ("spectra", "eigensolver_oracle", eigensolver_oracle),
    ("spectra", "uniform_trace_closure", uniform_trace),
    ("spectra", "uniform_lower_bound", uniform_lower_bound),
    ("kernel", "kernel_trace", kernel_trace),
    ("kernel", "kernel_consistency", kernel_consistency),
    ("kernel", "eigen_identity", eigen_identity),
    ("kernel", "perturbation_sensitivity", perturbation_sensitivity),
];

/// Runs the selected groups and returns `(group, check, outcome)` rows.
pub fn run_checks(only: &[String], mutation: Option<Mutation>) -> CliResult<Vec<(&'static str, &'static str, Outcome)>> {
    if let Some(bad) = only.iter().find(|g| !GROUPS.contains(&g.as_str())) {
        return Err(CliError::Config(format!("unknown verify group `{bad}`; expected one of {}", GROUPS.join(", "))));
    }
    let ctx = Ctx {
        kernel: match mutation {
            Some(Mutation::DisplacementSign) => Box::new(SignFlipped),
            None => Box::new(CahillGlauber),
        },
    };
    let selected: Vec<_> =
        CHECKS.iter().filter(|(g, _, _)| only.is_empty() || only.iter().any(|o| o == g)).collect();
    Ok(selected
        .par_iter()
        .map(|&&(group, name, check)| {
            let result = check(&ctx).unwrap_or_else(|e| Outcome { pass: false, detail: format!("error: {e}") });
            (group, name, result)
        })
        .collect())
}

pub fn run(config: &RunConfig) -> CliResult<()> {
    let rows = run_checks(&config.only, config.mutation)?;
    let mut table = String::new();
    for (group, name, o) in &rows {
        let mark = if o.pass { "PASS" } else { "FAIL" };
        writeln!(table, "{group:<10} {name:<28} {mark}  {}", o.detail).unwrap();
    }
    let failed = rows.iter().filter(|r| !r.2.pass).count();
    writeln!(table, "{} passed, {failed} failed", rows.len() - failed).unwrap();
    match &config.out {
        Some(path) => std::fs::write(path, &table)
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?,
        None => std::io::stdout().write_all(table.as_bytes())?,
    }
    if failed > 0 {
        Err(CliError::VerifyFailed(failed))
    } else {
        Ok(())
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

// ---- special functions ----

fn laguerre_explicit_sum(_: &Ctx) -> Result<Outcome> {
    // L_n^k(x) = Σ_j (−1)^j C(n+k, n−j) x^j / j!
    let mut worst: f64 = 0.0;
    for n in 0..=12usize {
        for k in [0usize, 2] {
            for x in [0.5f64, 2.0, 7.0] {
                let mut sum = 0.0;
                let mut term_fact = 1.0;
                for j in 0..=n {
                    if j > 0 {
                        term_fact *= j as f64;
                    }
                    let binom = binomial(n + k, n - j);
                    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                    sum += sign * binom * x.powi(j as i32) / term_fact;
                }
                let v = laguerre(n, k as i64, x)?;
                worst = worst.max((v - sum).abs() / sum.abs().max(1.0));
            }
        }
    }
    outcome(worst <= 1e-10, format!("max relative deviation {worst:.2e}"))
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn quadrature_moments(_: &Ctx) -> Result<Outcome> {
    let gl = finite_rule(20, -1.0, 1.0)?;
    let mut worst: f64 = 0.0;
    for k in 0..=39 {
        let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k + 1) as f64 };
        worst = worst.max((gl.integrate(|x| x.powi(k)) - exact).abs());
    }
    let lag = semi_infinite_rule(30)?;
    let mut fact = 1.0;
    for k in 0..=20 {
        if k > 0 {
            fact *= k as f64;
        }
        worst = worst.max((lag.integrate(|x| x.powi(k)) - fact).abs() / fact);
    }
    outcome(worst <= 1e-12, format!("max deviation {worst:.2e}"))
}

fn oscillator_orthonormality(_: &Ctx) -> Result<Outcome> {
    let rule = finite_rule(300, -15.0, 15.0)?;
    let n_max = 10;
    let mut gram = vec![0.0; (n_max + 1) * (n_max + 1)];
    let mut seq = Vec::new();
    for (x, w) in rule.iter() {
        oscillator_sequence(n_max, x, 1.3, &mut seq)?;
        for i in 0..=n_max {
            for j in 0..=n_max {
                gram[i * (n_max + 1) + j] += w * seq[i] * seq[j];
            }
        }
    }
    let mut worst: f64 = 0.0;
    for i in 0..=n_max {
        for j in 0..=n_max {
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram[i * (n_max + 1) + j] - want).abs());
        }
    }
    outcome(worst <= 1e-10, format!("max Gram deviation {worst:.2e}"))
}

// ---- densities ----

fn shipped_densities() -> Result<Vec<Density>> {
    Ok(vec![
        GaussianDensity::new(1.2, 0.7, 0.9)?.into(),
        UniformEllipseDensity::new(0.8, 1.5, 1.0)?.into(),
        GeneralDensity::uniform_box(1.0, 1.0, 1.0)?.into(),
        GeneralDensity::from_gaussian(&GaussianDensity::with_s(2.0)?).into(),
    ])
}

fn normalisation(_: &Ctx) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for d in shipped_densities()? {
        worst = worst.max(d.normalization_residual()?);
    }
    outcome(worst <= 1e-8, format!("max |∫ρ − 1| = {worst:.2e}"))
}

fn uncertainty_products(_: &Ctx) -> Result<Outcome> {
    let g = GaussianDensity::new(1.2, 0.7, 0.9)?;
    let numeric = Density::from(GeneralDensity::from_gaussian(&g)).uncertainty_product()?;
    let square = Density::from(GeneralDensity::uniform_box(1.0, 1.0, 1.0)?).uncertainty_product()?;
    let d1 = (numeric - 1.2 * 0.7 / 2.0).abs();
    let d2 = (square - 1.0 / 3.0).abs();
    outcome(d1.max(d2) <= 1e-8, format!("gaussian {d1:.2e}, square {d2:.2e}"))
}

fn overlap_symmetry(_: &Ctx) -> Result<Outcome> {
    let ds = shipped_densities()?;
    let mut worst: f64 = 0.0;
    for (i, a) in ds.iter().enumerate() {
        for b in &ds[i..] {
            let ab = a.overlap_integral(b)?;
            let ba = b.overlap_integral(a)?;
            worst = worst.max((ab - ba).abs() / ab.abs().max(1e-300));
        }
    }
    outcome(worst <= 1e-10, format!("max relative asymmetry {worst:.2e}"))
}

// ---- quantizer ----

fn general(ctx: &Ctx, density: &GeneralDensity, n_max: usize) -> Result<GroenewoldMatrix> {
    let rule = finite_rule(64, -1.0, 1.0)?;
    quantize_general_with(density, n_max, (&rule, &rule), &GeneralOptions::default(), ctx.kernel.as_ref())
}

fn radial_general_agreement(ctx: &Ctx) -> Result<Outcome> {
    let results: Vec<Result<f64>> = [0.5, 1.0, 2.0, 5.0]
        .par_iter()
        .map(|&s| {
            let g = GaussianDensity::with_s(s)?;
            let e = UniformEllipseDensity::with_s(s)?;
            let dg = max_abs_diff(
                general(ctx, &GeneralDensity::from_gaussian(&g), 16)?.entries(),
                quantize_gaussian(&g, 16)?.entries(),
            );
            let de = max_abs_diff(
                general(ctx, &GeneralDensity::from_uniform_ellipse(&e), 16)?.entries(),
                quantize_uniform_ellipse(&e, 16)?.entries(),
            );
            Ok(dg.max(de))
        })
        .collect();
    let mut worst: f64 = 0.0;
    for r in results {
        worst = worst.max(r?);
    }
    outcome(worst <= 1e-8, format!("max entry difference {worst:.2e}"))
}

fn pair_trace_positivity(_: &Ctx) -> Result<Outcome> {
    let n_max = 80;
    let mut ms = Vec::new();
    for s in [0.3, 1.0, 3.0] {
        ms.push(quantize_gaussian(&GaussianDensity::with_s(s)?, n_max)?);
    }
    for s in [0.5, 2.0] {
        ms.push(quantize_uniform_ellipse(&UniformEllipseDensity::with_s(s)?, n_max)?);
    }
    let mut lowest = f64::INFINITY;
    for a in &ms {
        for b in &ms {
            lowest = lowest.min(trace_product(a, b)?);
        }
    }
    outcome(lowest >= -1e-10, format!("smallest Tr(ρ̂ρ̂′) = {lowest:.3e}"))
}

fn unit_trace(ctx: &Ctx) -> Result<Outcome> {
    let mut ms = Vec::new();
    for s in [0.5, 1.0, 4.0] {
        ms.push(quantize_gaussian(&GaussianDensity::with_s(s)?, 120)?);
    }
    ms.push(general(ctx, &GeneralDensity::uniform_box(1.0, 1.0, 1.0)?, 16)?);
    let ok = ms.iter().all(|m| m.trace_residual() <= m.trace_tolerance());
    let worst = ms.iter().map(|m| m.trace_residual()).fold(0.0f64, f64::max);
    outcome(ok, format!("max |Tr − 1| = {worst:.2e} (each within its declared tolerance: {ok})"))
}

fn expectation_equivalence(_: &Ctx) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for (beta, gamma, hbar) in [(1.0, 1.0, 1.0), (1.5, 0.6, 0.5), (0.4, 2.0, 1.3)] {
        let g = GaussianDensity::new(beta, gamma, hbar)?;
        let m = quantize_gaussian(&g, 200)?;
        let basis = m.basis();
        let dim = m.dim();
        let pairs = [
            (Observable::identity(dim), 1.0),
            (Observable::position_squared(basis, dim), beta * beta / 2.0),
            (Observable::momentum_squared(basis, dim), gamma * gamma / 2.0),
        ];
        for (obs, classical) in pairs {
            worst = worst.max((expectation(&m, &obs)? - classical).abs());
        }
    }
    outcome(worst <= 1e-6, format!("max |Tr(ρ̂Â) − ∫ρA| = {worst:.2e}"))
}

fn weyl_round_trip(_: &Ctx) -> Result<Outcome> {
    let g = GaussianDensity::with_s(1.0)?;
    let m = quantize_gaussian(&g, 12)?;
    let beta = g.scales.beta();
    let d0 = (weyl_symbol(&m, 0.0, 0.0)? - 1.0 / PI).abs();
    let d3 = (weyl_symbol(&m, 3.0 * beta, 0.0)? - (-9.0f64).exp() / PI).abs();
    outcome(d0 <= 1e-6 && d3 <= 1e-6, format!("origin {d0:.2e}, (3β, 0) {d3:.2e}"))
}

// ---- spectra ----

fn closed_form_vs_quadrature(_: &Ctx) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for s in [0.2, 0.5, 1.0, 2.0, 5.0] {
        let m = quantize_gaussian(&GaussianDensity::with_s(s)?, 30)?;
        worst = worst.max(max_abs_diff(&m.diagonal(), &gaussian_eigenvalues(s, 30)?));
    }
    outcome(worst <= 1e-10, format!("max |Δλ| = {worst:.2e}"))
}

fn gaussian_trace_and_purity(_: &Ctx) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for s in [0.1, 0.5, 1.0, 2.0, 10.0] {
        let r = (s - 1.0) / (s + 1.0);
        let n_max = 2000;
        let values = gaussian_eigenvalues(s, n_max)?;
        let tail = values[n_max] * r / (1.0 - r);
        let trace: f64 = values.iter().sum::<f64>() + tail;
        let purity: f64 = values.iter().map(|v| v * v).sum();
        worst = worst.max((trace - 1.0).abs()).max((purity - 1.0 / s).abs());
    }
    outcome(worst <= 1e-10, format!("max deviation {worst:.2e}"))
}

fn sign_alternation(_: &Ctx) -> Result<Outcome> {
    let mut ok = true;
    for s in [0.05, 0.3, 0.7, 0.99] {
        for (n, v) in gaussian_eigenvalues(s, 40)?.iter().enumerate() {
            ok &= (*v < 0.0) == (n % 2 == 1);
        }
    }
    outcome(ok, "odd n negative exactly when s < 1".into())
}

fn delta_limit(_: &Ctx) -> Result<Outcome> {
    // deviation grows like 2(2n+1)s, so only n = 0 fits 5e-4 at s = 1e-4
    let d = (gaussian_eigenvalue(0, 1e-4)? - 2.0).abs();
    outcome(d <= 5e-4, format!("|λ_0 − 2| = {d:.2e} at s = 1e-4"))
}

fn eigensolver_oracle(ctx: &Ctx) -> Result<Outcome> {
    let g = GaussianDensity::with_s(2.0)?;
    let dense = general(ctx, &GeneralDensity::from_gaussian(&g), 16)?;
    let spectrum = eigendecompose(&dense)?;
    let mut want = gaussian_eigenvalues(2.0, 16)?;
    want.sort_by(|a, b| b.total_cmp(a));
    let d = max_abs_diff(&spectrum.eigenvalues, &want);
    outcome(d <= 1e-10, format!("max |Δλ| = {d:.2e}"))
}

fn uniform_trace(_: &Ctx) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for s in [0.5, 4.0, 20.0] {
        worst = worst.max((uniform_trace_closure(s)?.closed_sum - 1.0).abs());
    }
    outcome(worst <= 1e-8, format!("max |Σλ − 1| after closure = {worst:.2e}"))
}

fn uniform_lower_bound(_: &Ctx) -> Result<Outcome> {
    let mut highest = f64::NEG_INFINITY;
    for i in 0..10 {
        let s = 0.1 + i as f64 * (40.0 - 0.1) / 9.0;
        highest = highest.max(spectral_bounds(Family::Uniform, s, 400)?.0);
    }
    let lambda0 = uniform_eigenvalues(2.0, 0)?[0];
    let d = (lambda0 - (1.0 - (-2.0f64).exp())).abs();
    outcome(highest < 0.0 && d <= 1e-10, format!("largest min bound {highest:.3e}; λ_0(2) off by {d:.1e}"))
}

// ---- kernel ----

fn kernel_trace(_: &Ctx) -> Result<Outcome> {
    let (b, g, h) = (1.3, 0.6, 0.9);
    let op = KernelOperator::new(b, g, h, KernelGrid::for_scales(b, g, h)?)?;
    let d = (op.trace() - 1.0).abs();
    outcome(d <= 1e-10, format!("|∫K(x,x)dx − 1| = {d:.2e}"))
}

fn kernel_consistency(_: &Ctx) -> Result<Outcome> {
    // K(x, y) = ∫ ρ((x+y)/2, p) e^{ip(x−y)/ħ} dp for the Gaussian
    let (beta, gamma, hbar) = (1.2, 0.8, 0.9);
    let rule = finite_rule(200, -10.0 * gamma, 10.0 * gamma)?;
    let mut rng = rand::rngs::StdRng::seed_from_u64(20_240_917);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let x: f64 = rng.gen_range(-3.0..3.0);
        let y: f64 = rng.gen_range(-3.0..3.0);
        let q = 0.5 * (x + y);
        let numeric = rule.integrate(|p| {
            (-(q * q) / (beta * beta) - p * p / (gamma * gamma)).exp() / (PI * beta * gamma)
                * (p * (x - y) / hbar).cos()
        });
        worst = worst.max((numeric - coordinate_kernel(x, y, beta, gamma, hbar)).abs());
    }
    outcome(worst <= 1e-9, format!("max deviation at 100 points {worst:.2e}"))
}

fn eigen_identity(_: &Ctx) -> Result<Outcome> {
    let results: Vec<Result<f64>> = [0.5, 1.0, 2.0, 5.0]
        .par_iter()
        .map(|&s: &f64| {
            let b = s.sqrt();
            let grid = KernelGrid::for_scales(b, b, 1.0)?;
            let mut worst: f64 = 0.0;
            for n in 0..=10 {
                worst = worst.max(hermite_identity_residual(n, s, &grid)?);
            }
            Ok(worst)
        })
        .collect();
    let mut worst: f64 = 0.0;
    for r in results {
        worst = worst.max(r?);
    }
    outcome(worst <= 1e-8, format!("max residual {worst:.2e}"))
}

fn perturbation_sensitivity(_: &Ctx) -> Result<Outcome> {
    let b = 2f64.sqrt();
    let op = KernelOperator::new(b, b, 1.0, KernelGrid::for_scales(b, b, 1.0)?)?;
    let r = op.identity_residual_with(2, gaussian_eigenvalue(2, 2.0)? + 0.01)?;
    outcome(r >= 5e-3, format!("residual with λ + 0.01 = {r:.2e}"))
}
