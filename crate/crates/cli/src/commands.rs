use std::fmt::Write as _;
use std::io::Write as _;

use groenewold::spectra::{
    check_increasing, eigendecompose, gaussian_eigenvalues, sweep_row, uniform_eigenvalues, Family, Method,
    SweepRow,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::density_spec::{check_normalization, quantize as quantize_density, DensitySpec};
use crate::format::num;
use crate::{CliError, CliResult};

pub const DEFAULT_SPECTRUM_N_MAX: usize = 20;
pub const DEFAULT_QUANTIZE_N_MAX: usize = 16;
pub const DEFAULT_SWEEP_N_MAX: usize = 1000;
pub const DEFAULT_STEPS: usize = 50;

fn emit(config: &RunConfig, text: &str) -> CliResult<()> {
    match &config.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display()))),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output types serialise");
    s.push('\n');
    s
}

#[derive(Debug, Serialize)]
struct SpectrumOutput {
    family: Option<Family>,
    s: Option<f64>,
    method: Method,
    /// In Fock order for the families, descending for density specs.
    eigenvalues: Vec<f64>,
    min_bound: f64,
    max_bound: f64,
    trace_residual: f64,
}

/// Eigenvalues of a family member (in Fock order) or of a quantised
/// density spec (descending).
pub fn spectrum(config: &RunConfig) -> CliResult<()> {
    let (values, method, family, s) = match (&config.density_spec, config.family) {
        (Some(path), _) => {
            let density = DensitySpec::load(path)?.density()?;
            check_normalization(&density)?;
            let matrix = quantize_density(&density, config.n_max.unwrap_or(DEFAULT_QUANTIZE_N_MAX))?;
            let result = eigendecompose(&matrix)?;
            (result.eigenvalues, result.method, None, result.s)
        }
        (None, Some(family)) => {
            let s = config.s.ok_or_else(|| CliError::Config("spectrum needs --s or --beta/--gamma".into()))?;
            let n_max = config.n_max.unwrap_or(DEFAULT_SPECTRUM_N_MAX);
            match family {
                Family::Gaussian => (gaussian_eigenvalues(s, n_max)?, Method::ClosedForm, Some(family), Some(s)),
                Family::Uniform => (uniform_eigenvalues(s, n_max)?, Method::Quadrature, Some(family), Some(s)),
            }
        }
        (None, None) => return Err(CliError::Config("spectrum needs --family or --density-spec".into())),
    };
    let text = match config.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut out = String::from("n,eigenvalue,method\n");
            for (n, v) in values.iter().enumerate() {
                writeln!(out, "{n},{},{method}", num(*v)).unwrap();
            }
            out
        }
        Format::Json => {
            let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            to_json(&SpectrumOutput {
                family,
                s,
                method,
                trace_residual: (values.iter().sum::<f64>() - 1.0).abs(),
                eigenvalues: values,
                min_bound: lo,
                max_bound: hi,
            })
        }
    };
    emit(config, &text)
}

/// Evenly spaced `s` values from `s_min` to `s_max` inclusive; the
/// endpoints are reproduced exactly.
pub fn s_grid(s_min: f64, s_max: f64, steps: usize) -> Vec<f64> {
    let last = (steps - 1) as f64;
    (0..steps).map(|i| (s_min * (last - i as f64) + s_max * i as f64) / last).collect()
}

pub fn sweep_rows(config: &RunConfig) -> CliResult<Vec<SweepRow>> {
    let family = config.family.ok_or_else(|| CliError::Config("sweep needs --family".into()))?;
    let (s_min, s_max) = match (config.s_min, config.s_max) {
        (Some(a), Some(b)) if a > 0.0 && b > a && b.is_finite() => (a, b),
        (Some(a), Some(b)) => return Err(CliError::Config(format!("need 0 < s_min < s_max, got {a} and {b}"))),
        _ => return Err(CliError::Config("sweep needs --s-min and --s-max".into())),
    };
    let s_values = s_grid(s_min, s_max, config.steps.unwrap_or(DEFAULT_STEPS));
    check_increasing(&s_values)?;
    let n_max = config.n_max.unwrap_or(DEFAULT_SWEEP_N_MAX);
    let compute = || s_values.par_iter().map(|&s| sweep_row(family, s, n_max)).collect::<Result<Vec<_>, _>>();
    let rows = if config.jobs > 1 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.jobs)
            .build()
            .map_err(|e| CliError::Config(format!("cannot start {} workers: {e}", config.jobs)))?
            .install(compute)?
    } else {
        s_values.iter().map(|&s| sweep_row(family, s, n_max)).collect::<Result<Vec<_>, _>>()?
    };
    Ok(rows)
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("uncertainty_over_hbar,min_bound,max_bound,family\n");
    for r in rows {
        writeln!(out, "{},{},{},{}", num(r.uncertainty_over_hbar), num(r.min_bound), num(r.max_bound), r.family)
            .unwrap();
    }
    out
}

pub fn sweep(config: &RunConfig) -> CliResult<()> {
    let rows = sweep_rows(config)?;
    let text = match config.format.unwrap_or(Format::Csv) {
        Format::Csv => sweep_csv(&rows),
        Format::Json => to_json(&rows),
    };
    emit(config, &text)
}

pub fn quantize(config: &RunConfig) -> CliResult<()> {
    let path = config.density_spec.as_ref().ok_or_else(|| CliError::Config("quantize needs --density-spec".into()))?;
    if config.format == Some(Format::Csv) {
        return Err(CliError::Config("quantize writes JSON only".into()));
    }
    let density = DensitySpec::load(path)?.density()?;
    check_normalization(&density)?;
    let matrix = quantize_density(&density, config.n_max.unwrap_or(DEFAULT_QUANTIZE_N_MAX))?;
    let spectrum = eigendecompose(&matrix)?;
    let mut export = matrix.to_export();
    export.eigenvalues = Some(spectrum.eigenvalues);
    emit(config, &to_json(&export))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_hits_endpoints_and_interior_values() {
        let g = s_grid(0.1, 2.0, 20);
        assert_eq!(g[0], 0.1);
        assert_eq!(g[19], 2.0);
        assert_eq!(g[9], 1.0);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }
}
