use thiserror::Error;

/// Errors raised by the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("particle number {n} out of range 1..={sites} for a lattice of {sites} sites")]
    ParticleCount { n: usize, sites: usize },

    #[error("configurations carry {left} and {right} particles")]
    ParticleMismatch { left: usize, right: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "Combes-Thomas condition 4g - E > 12 e^mu_T violated: 4g - E = {lhs}, 12 e^mu_T = {rhs}"
    )]
    CombesThomasCondition { lhs: f64, rhs: f64 },

    #[error("energy window [{lo}, {hi}] is not inside [0, E(g, mu_T)) with E(g, mu_T) = 4g - 12 e^mu_T = {threshold}")]
    WindowThreshold { lo: f64, hi: f64, threshold: f64 },

    #[error("dimension {dim} exceeds the dense eigensolver cap {cap}")]
    Capacity { dim: usize, cap: usize },

    #[error("singular resolvent: {0}")]
    Singular(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("unknown disorder distribution `{0}`")]
    UnknownDistribution(String),

    #[error("site windows: {0}")]
    Windows(String),

    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    #[error("empty index set")]
    EmptyIndexSet,

    #[error("cluster sector k = {k} out of range 1..={n}")]
    Sector { k: usize, n: usize },

    #[error("certified inequality violated: {0}")]
    Violation(String),

    #[error("iterative eigensolver did not converge: {0}")]
    NoConvergence(String),

    #[error("export failed: {0}")]
    Export(String),
}

pub type Result<T> = std::result::Result<T, Error>;
