use super::{build_adjacency, build_cluster_potential, SymmetricOperator};
use crate::configspace::ConfigSpace;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// The site projections and transposition attached to a pair of sites.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterAlgebra<T> {
    /// `π_α`: configurations containing `α`.
    pub pi_alpha: SymmetricOperator<T>,
    /// `π_{α,β}`: configurations containing exactly one of `α`, `β`.
    pub pi_pair: SymmetricOperator<T>,
    /// `τ_{α,β}`: exchange of the occupancies of `α` and `β`.
    pub tau: SymmetricOperator<T>,
}

/// `π_α` alone.
pub fn site_projection<T: Scalar>(space: &ConfigSpace, alpha: i64) -> SymmetricOperator<T> {
    SymmetricOperator::diagonal(
        (0..space.len())
            .map(|i| {
                if space.occupied(i, alpha) {
                    T::one()
                } else {
                    T::zero()
                }
            })
            .collect(),
    )
}

/// `π_α`, `π_{α,β}` and `τ_{α,β}` on `space`.
pub fn build_cluster_algebra<T: Scalar>(
    space: &ConfigSpace,
    alpha: i64,
    beta: i64,
) -> Result<ClusterAlgebra<T>> {
    let lat = space.lattice();
    if alpha == beta {
        return Err(Error::InvalidParameter(format!(
            "sites must differ, got alpha = beta = {alpha}"
        )));
    }
    if !lat.contains(alpha) || !lat.contains(beta) {
        return Err(Error::InvalidParameter(format!(
            "sites {alpha}, {beta} must lie in [{}, {}]",
            lat.lo(),
            lat.hi()
        )));
    }
    let mut pair = Vec::with_capacity(space.len());
    let mut tau_diag = Vec::with_capacity(space.len());
    let mut tau_off = Vec::new();
    for i in 0..space.len() {
        let a = space.occupied(i, alpha);
        let b = space.occupied(i, beta);
        if a != b {
            pair.push(T::one());
            tau_diag.push(T::zero());
            let (from, to) = if a { (alpha, beta) } else { (beta, alpha) };
            let j = space.moved(i, from, to).expect("target site is empty");
            if i < j {
                tau_off.push((i, j, T::one()));
            }
        } else {
            pair.push(T::zero());
            tau_diag.push(T::one());
        }
    }
    Ok(ClusterAlgebra {
        pi_alpha: site_projection(space, alpha),
        pi_pair: SymmetricOperator::diagonal(pair),
        tau: SymmetricOperator::from_parts(tau_diag, tau_off)?,
    })
}

/// Frobenius norms of the residuals of the two identities
/// `2U = Σ_α π_{α,α+1} + π_lo + π_hi` and
/// `-A = Σ_α (1 - π_{α,α+1} - τ_{α,α+1})`, with `α` running over all
/// bonds of the lattice. Computed in exact integer arithmetic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropA1Residuals {
    pub cluster: f64,
    pub adjacency: f64,
}

impl PropA1Residuals {
    pub fn is_exact(&self) -> bool {
        self.cluster == 0.0 && self.adjacency == 0.0
    }
}

pub fn verify_prop_a1(space: &ConfigSpace) -> Result<PropA1Residuals> {
    let lat = space.lattice();
    let dim = space.len();
    let two_u = build_cluster_potential::<i64>(space).scale(2);
    let minus_a = build_adjacency::<i64>(space).scale(-1);

    let mut rhs_u = site_projection::<i64>(space, lat.lo());
    rhs_u = SymmetricOperator::combine(&[(1, &rhs_u), (1, &site_projection(space, lat.hi()))])?;
    let mut rhs_a = SymmetricOperator::<i64>::zeros(dim);
    let id = SymmetricOperator::<i64>::identity(dim);
    for alpha in lat.lo()..lat.hi() {
        let alg = build_cluster_algebra::<i64>(space, alpha, alpha + 1)?;
        rhs_u = SymmetricOperator::combine(&[(1, &rhs_u), (1, &alg.pi_pair)])?;
        rhs_a = SymmetricOperator::combine(&[
            (1, &rhs_a),
            (1, &id),
            (-1, &alg.pi_pair),
            (-1, &alg.tau),
        ])?;
    }
    let cu = two_u.frobenius_sq_diff(&rhs_u)?;
    let ca = minus_a.frobenius_sq_diff(&rhs_a)?;
    Ok(PropA1Residuals {
        cluster: (cu as f64).sqrt(),
        adjacency: (ca as f64).sqrt(),
    })
}
