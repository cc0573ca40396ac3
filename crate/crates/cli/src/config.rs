//! Flag parsing and the optional JSON config file. Flags always win over
//! values from the file.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use groenewold::spectra::Family;
use serde::Deserialize;

use crate::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "groenewold", version, about = "Spectra of Groenewold operators of classical phase-space densities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Eigenvalues λ_n for n = 0..=n_max as CSV (`n,eigenvalue,method`).
    Spectrum,
    /// Spectral bounds over a range of s as CSV
    /// (`uncertainty_over_hbar,min_bound,max_bound,family`).
    Sweep,
    /// Quantise a density spec; writes the matrix and its eigenvalues as JSON.
    Quantize,
    /// Run the property suites and print a pass/fail table.
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Deliberate defects for checking that `verify` notices them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mutation {
    /// Flip the parity sign of every displacement matrix element.
    DisplacementSign,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyArg {
    Gaussian,
    Uniform,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Gaussian => Family::Gaussian,
            FamilyArg::Uniform => Family::Uniform,
        }
    }
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Flags {
    /// JSON file with defaults for any of the other flags.
    #[arg(long, global = true, value_name = "PATH")]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub family: Option<FamilyArg>,

    /// Dimensionless area βγ/ħ.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub s: Option<f64>,

    #[arg(long, global = true, allow_negative_numbers = true)]
    pub beta: Option<f64>,

    #[arg(long, global = true, allow_negative_numbers = true)]
    pub gamma: Option<f64>,

    #[arg(long, global = true, allow_negative_numbers = true)]
    pub hbar: Option<f64>,

    #[arg(long = "n-max", global = true)]
    pub n_max: Option<usize>,

    #[arg(long = "s-min", global = true, allow_negative_numbers = true)]
    pub s_min: Option<f64>,

    #[arg(long = "s-max", global = true, allow_negative_numbers = true)]
    pub s_max: Option<f64>,

    #[arg(long, global = true)]
    pub steps: Option<usize>,

    #[arg(long = "density-spec", global = true, value_name = "PATH")]
    pub density_spec: Option<PathBuf>,

    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    /// Comma-separated verification groups.
    #[arg(long, global = true, value_delimiter = ',')]
    pub only: Option<Vec<String>>,

    #[arg(long, global = true, value_enum, hide = true)]
    pub mutate: Option<Mutation>,
}

/// Validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub family: Option<Family>,
    pub s: Option<f64>,
    pub density_spec: Option<PathBuf>,
    pub n_max: Option<usize>,
    pub s_min: Option<f64>,
    pub s_max: Option<f64>,
    pub steps: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub jobs: usize,
    pub only: Vec<String>,
    pub mutation: Option<Mutation>,
}

macro_rules! merge {
    ($flags:ident, $file:ident; $($field:ident),*) => {
        $( if $flags.$field.is_none() { $flags.$field = $file.$field.take(); } )*
    };
}

impl Flags {
    pub fn resolve(mut self) -> CliResult<RunConfig> {
        if let Some(path) = self.config.take() {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            let mut file: Flags = serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("bad config file {}: {e}", path.display())))?;
            merge!(self, file; family, s, beta, gamma, hbar, n_max, s_min, s_max, steps,
                   density_spec, out, format, jobs, only, mutate);
        }

        if self.family.is_some() && self.density_spec.is_some() {
            return Err(CliError::Config("give either --family or --density-spec, not both".into()));
        }
        let s = match (self.s, self.beta, self.gamma) {
            (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
                return Err(CliError::Config("give either --s or --beta/--gamma, not both".into()))
            }
            (Some(s), None, None) => Some(s),
            (None, Some(b), Some(g)) => Some(b * g / self.hbar.unwrap_or(1.0)),
            (None, None, None) => {
                if self.hbar.is_some() {
                    return Err(CliError::Config("--hbar needs --beta and --gamma".into()));
                }
                None
            }
            _ => return Err(CliError::Config("--beta and --gamma must be given together".into())),
        };
        if let Some(s) = s {
            if !(s > 0.0 && s.is_finite()) {
                return Err(CliError::Config(format!("s must be positive, got {s}")));
            }
        }
        if matches!(self.steps, Some(n) if n < 2) {
            return Err(CliError::Config("--steps must be at least 2".into()));
        }
        if self.jobs == Some(0) {
            return Err(CliError::Config("--jobs must be at least 1".into()));
        }
        Ok(RunConfig {
            family: self.family.map(Family::from),
            s,
            density_spec: self.density_spec,
            n_max: self.n_max,
            s_min: self.s_min,
            s_max: self.s_max,
            steps: self.steps,
            out: self.out,
            format: self.format,
            jobs: self.jobs.unwrap_or(1),
            only: self.only.unwrap_or_default(),
            mutation: self.mutate,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> CliResult<RunConfig> {
        let cli = Cli::try_parse_from(std::iter::once("groenewold").chain(args.iter().copied())).unwrap();
        cli.flags.resolve()
    }

    #[test]
    fn s_from_scales() {
        let c = parse(&["spectrum", "--family", "gaussian", "--beta", "2", "--gamma", "3", "--hbar", "0.5"]).unwrap();
        assert_eq!(c.s, Some(12.0));
        assert_eq!(c.family, Some(Family::Gaussian));
        assert_eq!(c.format, None);
    }

    #[test]
    fn conflicting_sources_are_rejected() {
        assert!(parse(&["spectrum", "--family", "gaussian", "--density-spec", "x.json"]).is_err());
        assert!(parse(&["spectrum", "--s", "1", "--beta", "1", "--gamma", "1"]).is_err());
        assert!(parse(&["spectrum", "--beta", "1"]).is_err());
        assert!(parse(&["sweep", "--steps", "1"]).is_err());
        assert!(parse(&["spectrum", "--s", "-2"]).is_err());
    }

    #[test]
    fn flags_win_over_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"family": "uniform", "s": 2.0, "n_max": 7, "only": ["kernel"]}"#).unwrap();
        let p = path.to_str().unwrap();
        let c = parse(&["spectrum", "--config", p, "--n-max", "3"]).unwrap();
        assert_eq!(c.family, Some(Family::Uniform));
        assert_eq!(c.s, Some(2.0));
        assert_eq!(c.n_max, Some(3));
        assert_eq!(c.only, vec!["kernel".to_string()]);

        std::fs::write(&path, r#"{"colour": 1}"#).unwrap();
        assert!(matches!(parse(&["spectrum", "--config", p]), Err(CliError::Config(_))));
    }

    #[test]
    fn only_splits_on_commas() {
        let c = parse(&["verify", "--only", "kernel,spectra"]).unwrap();
        assert_eq!(c.only, vec!["kernel", "spectra"]);
    }
}
