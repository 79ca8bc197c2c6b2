//! Disorder averaging.
//!
//! Realization `i` of a plan draws its field from stream `i` of the ChaCha8
//! generator seeded with the plan's root seed, so any realization can be
//! regenerated on its own. Realizations run in parallel and are merged in
//! index order, which makes every estimate independent of scheduling.

mod estimators;
mod fit;

pub use estimators::{
    certified_floor, correlator_average, estimate_correlator_decay, fractional_moment_probe,
    screened_diagonal_average, screened_diagonal_weight, sum_s1_s2, window_correlator_average,
    DecayFit, DecayReport, DecayRow, Separation, SumsReport,
};
pub use fit::{ols, student_t_quantile, LinearFit};

use rayon::prelude::*;

use crate::configspace::{ConfigSpace, Lattice};
use crate::error::{Error, Result};
use crate::operators::{DisorderLaw, DisorderRealization, ModelParams};
use crate::spectral::EnergyWindow;

/// A Monte-Carlo experiment: model, volume, window, exponents and seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct McPlan {
    pub realizations: usize,
    pub seed_root: u64,
    pub law: DisorderLaw,
    /// `L` of `Λ = [-L, L]`.
    pub half_width: usize,
    pub n: usize,
    pub g: f64,
    pub lambda: f64,
    pub window: EnergyWindow<f64>,
    /// Fractional exponent in `(0, 1)`.
    pub s: f64,
    pub mu: f64,
    pub mu_t: f64,
}

impl McPlan {
    pub fn validate(&self) -> Result<()> {
        if self.realizations == 0 {
            return Err(Error::InvalidParameter(
                "at least one realization is required".into(),
            ));
        }
        if !(self.s > 0.0 && self.s < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "s = {} must lie in (0, 1)",
                self.s
            )));
        }
        if !(self.mu > 0.0 && self.mu < self.mu_t) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < mu < mu_T, got mu = {}, mu_T = {}",
                self.mu, self.mu_t
            )));
        }
        ModelParams::new(self.g, self.lambda)?;
        Ok(())
    }

    pub fn lattice(&self) -> Result<Lattice> {
        Lattice::symmetric(self.half_width)
    }

    pub fn space(&self) -> Result<ConfigSpace> {
        ConfigSpace::new(self.half_width, self.n)
    }

    pub fn params(&self) -> Result<ModelParams<f64>> {
        ModelParams::new(self.g, self.lambda)
    }

    /// The field of realization `index`.
    pub fn realization(&self, index: usize) -> Result<DisorderRealization> {
        Ok(self
            .law
            .sample(self.lattice()?, self.seed_root, index as u64))
    }

    /// Runs `f` on every realization in parallel and returns the results in
    /// index order. The first error (by index) aborts the run.
    pub fn run<R, F>(&self, f: F) -> Result<Vec<R>>
    where
        R: Send,
        F: Fn(usize, DisorderRealization) -> Result<R> + Sync,
    {
        self.validate()?;
        let lattice = self.lattice()?;
        (0..self.realizations)
            .into_par_iter()
            .map(|i| f(i, self.law.sample(lattice, self.seed_root, i as u64)))
            .collect()
    }
}

/// Sample mean with its standard error and extremes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    /// Sample standard deviation over `√count`; `NaN` for a single sample.
    pub stderr: f64,
    pub count: usize,
    pub min: f64,
    pub max: f64,
}

impl McEstimate {
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidParameter("no samples".into()));
        }
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let stderr = if samples.len() > 1 {
            let var = samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
            (var / n).sqrt()
        } else {
            f64::NAN
        };
        Ok(Self {
            mean,
            stderr,
            count: samples.len(),
            min: samples.iter().copied().fold(f64::INFINITY, f64::min),
            max: samples.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        })
    }
}

/// Draws the field on `[-L, L]` for a registered law by name.
pub fn sample_disorder(
    half_width: usize,
    distribution: &str,
    omega_max: f64,
    seed: u64,
    stream: u64,
) -> Result<DisorderRealization> {
    let law = DisorderLaw::by_name(distribution, omega_max)?;
    Ok(law.sample(Lattice::symmetric(half_width)?, seed, stream))
}
