use super::{DisorderRealization, SymmetricOperator};
use crate::configspace::{ConfigSpace, SectorMode};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Interaction strength `g > 1` and disorder strength `λ ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams<T> {
    g: T,
    lambda: T,
}

impl<T: Scalar> ModelParams<T> {
    pub fn new(g: T, lambda: T) -> Result<Self> {
        if !(g > T::one()) {
            return Err(Error::InvalidParameter(format!("g = {g} must exceed 1")));
        }
        if lambda < T::zero() {
            return Err(Error::InvalidParameter(format!(
                "lambda = {lambda} must be nonnegative"
            )));
        }
        Ok(Self { g, lambda })
    }

    pub fn g(&self) -> T {
        self.g
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn with_lambda(&self, lambda: T) -> Result<Self> {
        Self::new(self.g, lambda)
    }
}

/// `A(x, y) = 1` iff `d(x, y) = 1`.
pub fn build_adjacency<T: Scalar>(space: &ConfigSpace) -> SymmetricOperator<T> {
    let mut entries = Vec::new();
    for i in 0..space.len() {
        for j in space.neighbors(i) {
            if i < j {
                entries.push((i, j, T::one()));
            }
        }
    }
    SymmetricOperator::from_parts(vec![T::zero(); space.len()], entries)
        .expect("indices inside the space")
}

/// `U δ_x = k(x) δ_x`.
pub fn build_cluster_potential<T: Scalar>(space: &ConfigSpace) -> SymmetricOperator<T> {
    SymmetricOperator::diagonal(
        (0..space.len())
            .map(|i| T::from_count(space.sector(i)))
            .collect(),
    )
}

/// `V δ_x = Σ_j ω(x_j) δ_x`.
pub fn build_random_potential<T: Scalar>(
    space: &ConfigSpace,
    w: &DisorderRealization,
) -> Result<SymmetricOperator<T>> {
    w.check_covers(space)?;
    Ok(SymmetricOperator::diagonal(
        space
            .configs()
            .iter()
            .map(|x| {
                x.sites()
                    .iter()
                    .fold(T::zero(), |acc, &s| acc + T::lit(w.at(s)))
            })
            .collect(),
    ))
}

/// `H = -A + 2g U + λ V`.
pub fn build_hamiltonian<T: Scalar>(
    space: &ConfigSpace,
    params: &ModelParams<T>,
    w: &DisorderRealization,
) -> Result<SymmetricOperator<T>> {
    let v = build_random_potential::<T>(space, w)?;
    let two_g = params.g + params.g;
    let diag: Vec<T> = (0..space.len())
        .map(|i| two_g * T::from_count(space.sector(i)) + params.lambda * v.diag()[i])
        .collect();
    let minus_one = T::zero() - T::one();
    let mut entries = Vec::new();
    for i in 0..space.len() {
        for j in space.neighbors(i) {
            if i < j {
                entries.push((i, j, minus_one));
            }
        }
    }
    SymmetricOperator::from_parts(diag, entries)
}

/// Ordinals of the exactly-`k` (`P^(k)`) or at-least-`k` (`Q^(k)`) sector.
pub fn sector_indices(space: &ConfigSpace, k: usize, mode: SectorMode) -> Result<Vec<usize>> {
    space.sector_indices(k, mode)
}
