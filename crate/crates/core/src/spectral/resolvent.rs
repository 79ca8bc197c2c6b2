use nalgebra::DMatrix;

use crate::configspace::{ConfigSpace, Configuration, SectorMode};
use crate::error::{Error, Result};
use crate::operators::{build_hamiltonian, DisorderRealization, ModelParams, SymmetricOperator};
use crate::scalar::Real;

/// The inverse of `(H - E)` restricted to an index set, kept dense for
/// repeated entry queries.
#[derive(Debug, Clone)]
pub struct RestrictedResolvent<T: Real> {
    inverse: DMatrix<T>,
    parent: Vec<usize>,
    local: Vec<usize>,
    energy: T,
}

impl<T: Real> RestrictedResolvent<T> {
    /// `(P (H - E) P)^{-1}` on `ran P` for `P` the coordinate projection onto
    /// `idx`, requiring `E` strictly below the spectrum of the restriction.
    ///
    /// Positivity is certified by a successful Cholesky factorization.
    pub fn below_spectrum(op: &SymmetricOperator<T>, idx: &[usize], energy: T) -> Result<Self> {
        let (block, parent, local) = Self::block(op, idx, energy)?;
        let chol = nalgebra::Cholesky::new(block).ok_or_else(|| {
            Error::Singular(format!(
                "energy {energy} is not below the spectrum of the restricted operator"
            ))
        })?;
        Ok(Self {
            inverse: chol.inverse(),
            parent,
            local,
            energy,
        })
    }

    /// `(P (H - E) P)^{-1}` for any `E` off the spectrum of the restriction.
    pub fn new(op: &SymmetricOperator<T>, idx: &[usize], energy: T) -> Result<Self> {
        let (block, parent, local) = Self::block(op, idx, energy)?;
        let inverse = block.try_inverse().ok_or_else(|| {
            Error::Singular(format!("restricted H - E is singular at E = {energy}"))
        })?;
        Ok(Self {
            inverse,
            parent,
            local,
            energy,
        })
    }

    fn block(
        op: &SymmetricOperator<T>,
        idx: &[usize],
        energy: T,
    ) -> Result<(DMatrix<T>, Vec<usize>, Vec<usize>)> {
        let r = op.restrict(idx)?;
        let mut m = r.op.to_dense();
        for i in 0..m.nrows() {
            m[(i, i)] -= energy;
        }
        let mut local = vec![usize::MAX; op.dim()];
        for (k, &p) in r.parent.iter().enumerate() {
            local[p] = k;
        }
        Ok((m, r.parent, local))
    }

    pub fn energy(&self) -> T {
        self.energy
    }

    /// Parent ordinals of the retained coordinates.
    pub fn parent(&self) -> &[usize] {
        &self.parent
    }

    /// Local index of a parent ordinal.
    pub fn local(&self, parent: usize) -> Option<usize> {
        self.local.get(parent).copied().filter(|&l| l != usize::MAX)
    }

    /// Entry at parent ordinals `(x, y)`.
    pub fn get(&self, x: usize, y: usize) -> Result<T> {
        let a = self
            .local(x)
            .ok_or_else(|| Error::InvalidParameter(format!("ordinal {x} not in the index set")))?;
        let b = self
            .local(y)
            .ok_or_else(|| Error::InvalidParameter(format!("ordinal {y} not in the index set")))?;
        Ok(self.inverse[(a, b)])
    }

    /// The dense inverse in local coordinates.
    pub fn matrix(&self) -> &DMatrix<T> {
        &self.inverse
    }
}

/// `G^(k)(x, y; E) = ⟨δ_x, (Q^(k) (H - E) Q^(k))^{-1} δ_y⟩` for `E` below the
/// spectrum of the at-least-`k`-cluster restriction.
pub fn green_restricted<T: Real>(
    space: &ConfigSpace,
    params: &ModelParams<T>,
    w: &DisorderRealization,
    k: usize,
    x: &Configuration,
    y: &Configuration,
    energy: T,
) -> Result<T> {
    let xi = space.require(x)?;
    let yi = space.require(y)?;
    for (c, i) in [(x, xi), (y, yi)] {
        if space.sector(i) < k {
            return Err(Error::InvalidParameter(format!(
                "{c} has fewer than {k} clusters"
            )));
        }
    }
    let h = build_hamiltonian(space, params, w)?;
    let idx = space.sector_indices(k, SectorMode::AtLeast)?;
    RestrictedResolvent::below_spectrum(&h, &idx, energy)?.get(xi, yi)
}
