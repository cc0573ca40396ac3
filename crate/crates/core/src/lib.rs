//! Groenewold quasi-density operators.
//!
//! Classical Liouville densities on the phase plane are mapped through the
//! inverse Weyl–Wigner transform to unit-trace Hermitian operators, here
//! represented as truncated matrices in the Fock basis of an oscillator
//! scaled by the density's length and momentum scales. The crate provides
//! the densities, the quantiser (a diagonal fast path for radially
//! symmetric densities and a general quadrature path), closed-form and
//! quadrature eigenvalue evaluators, and an independent coordinate-space
//! check of the Gaussian spectrum.

pub mod densities;
pub mod error;
pub mod kernel_check;
pub mod quantizer;
pub mod special_functions;
pub mod spectra;

pub use error::{Error, Result};
