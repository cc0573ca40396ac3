//! JSON density specs accepted by `quantize` and `spectrum`.
//!
//! ```json
//! {"type": "gaussian", "beta": 1.0, "gamma": 1.0, "hbar": 1.0}
//! {"type": "uniform_ellipse", "beta": 1.0, "gamma": 2.0}
//! {"type": "uniform_box", "q_half_width": 1.0, "p_half_width": 1.0, "hbar": 1.0}
//! ```
//!
//! `hbar` defaults to 1. An optional `scale` multiplies the density, which
//! is only useful for exercising the normalisation gate.

use std::f64::consts::PI;
use std::path::Path;

use groenewold::densities::{
    Density, GaussianDensity, GeneralDensity, PhaseScales, RadialDensity, UniformEllipseDensity,
};
use groenewold::quantizer::{
    quantize_gaussian, quantize_general, quantize_radial, quantize_uniform_ellipse, GroenewoldMatrix,
};
use groenewold::special_functions::finite_rule;
use serde::Deserialize;

use crate::{CliError, CliResult};

/// Largest accepted `|∫ρ − 1|`.
pub const NORMALIZATION_TOL: f64 = 1e-6;
/// Starting Gauss–Legendre size per axis for general densities.
pub const GENERAL_RULE_POINTS: usize = 64;

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum DensitySpec {
    Gaussian {
        beta: f64,
        gamma: f64,
        #[serde(default = "one")]
        hbar: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    UniformEllipse {
        beta: f64,
        gamma: f64,
        #[serde(default = "one")]
        hbar: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    UniformBox {
        q_half_width: f64,
        p_half_width: f64,
        #[serde(default = "one")]
        hbar: f64,
        #[serde(default = "one")]
        scale: f64,
    },
}

impl DensitySpec {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("malformed density spec: {e}")))
    }

    pub fn density(&self) -> CliResult<Density> {
        Ok(match *self {
            DensitySpec::Gaussian { beta, gamma, hbar, scale } => {
                let g = GaussianDensity::new(beta, gamma, hbar)?;
                if scale == 1.0 {
                    g.into()
                } else {
                    let norm = scale / (PI * beta * gamma);
                    RadialDensity::new(move |u| norm * (-u).exp(), g.scales).with_decay_rate(1.0)?.into()
                }
            }
            DensitySpec::UniformEllipse { beta, gamma, hbar, scale } => {
                let e = UniformEllipseDensity::new(beta, gamma, hbar)?;
                if scale == 1.0 {
                    e.into()
                } else {
                    let norm = scale / (PI * beta * gamma);
                    RadialDensity::new(move |_| norm, PhaseScales::new(beta, gamma, hbar)?)
                        .with_support_radius(1.0)?
                        .into()
                }
            }
            DensitySpec::UniformBox { q_half_width, p_half_width, hbar, scale } => {
                GeneralDensity::uniform_box(q_half_width, p_half_width, hbar)?.scaled(scale).into()
            }
        })
    }
}

/// Rejects densities whose total mass is not one.
pub fn check_normalization(density: &Density) -> CliResult<()> {
    let residual = density.normalization_residual()?;
    if residual > NORMALIZATION_TOL {
        return Err(groenewold::Error::Normalization { residual, tolerance: NORMALIZATION_TOL }.into());
    }
    Ok(())
}

pub fn quantize(density: &Density, n_max: usize) -> CliResult<GroenewoldMatrix> {
    Ok(match density {
        Density::Gaussian(g) => quantize_gaussian(g, n_max)?,
        Density::UniformEllipse(e) => quantize_uniform_ellipse(e, n_max)?,
        Density::Radial(r) => quantize_radial(r, n_max)?,
        Density::General(g) => {
            let rule = finite_rule(GENERAL_RULE_POINTS, -1.0, 1.0)?;
            quantize_general(g, n_max, (&rule, &rule))?
        }
    })
}
