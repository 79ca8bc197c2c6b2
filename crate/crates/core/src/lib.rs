//! Numerical laboratory for the disordered chain of attractive hard-core
//! particles on `Λ = [-L, L]`.
//!
//! The crate enumerates configuration spaces, assembles the Hamiltonian
//! `H = -A + 2g U + λ V`, diagonalizes it, and evaluates Green functions and
//! eigenfunction correlators. On top of that it checks the deterministic
//! inequalities that control localization of the particle droplet
//! (cluster thresholds, Combes-Thomas decay, resolvent expansions), the
//! distance and summability lemmas for configuration space, and the unitary
//! dictionary to the XXZ droplet Hamiltonian. Monte-Carlo estimators average
//! over the random potential with reproducible per-realization streams.
//!
//! Operators, spectra and bound checks are generic over the scalar type.
//! Exact arithmetic (`i64`, [`Rational`]) is available for the purely
//! algebraic identities; `f64` is the workhorse for everything spectral.

// `!(x > 0)` style comparisons are how NaN inputs get rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod configspace;
pub mod error;
pub mod export;
pub mod mc;
pub mod operators;
pub mod scalar;
pub mod spectral;
pub mod xxz;

pub use configspace::{ConfigSpace, Configuration, Lattice, SiteWindow};
pub use error::{Error, Result};
pub use operators::{DisorderLaw, DisorderRealization, ModelParams, SymmetricOperator};
pub use scalar::{Real, Scalar};
pub use spectral::{EnergyWindow, SpectralData};

/// Exact rational scalar used for the algebraic identity checks.
pub type Rational = num_rational::Ratio<i64>;

/// Double-precision operator, the default for spectral work.
pub type Operator = SymmetricOperator<f64>;
/// Operator over exact rationals.
pub type ExactOperator = SymmetricOperator<Rational>;
/// Double-precision spectral decomposition.
pub type Spectrum = SpectralData<f64>;
/// Double-precision model parameters.
pub type Params = ModelParams<f64>;
/// Double-precision energy window.
pub type Window = EnergyWindow<f64>;
