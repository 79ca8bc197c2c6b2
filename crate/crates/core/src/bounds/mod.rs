//! Deterministic inequalities of the localization argument, evaluated on
//! concrete realizations: cluster thresholds, the Combes-Thomas estimate
//! and its block-norm lemma, the resolvent expansion, the perturbative
//! correlator step, and the semigroup and dynamical bounds.

mod combined;
mod expansion;

pub use combined::{
    combined_envelope_check, envelope_exponents, CombinedFit, EnvelopePoint, EnvelopeWeights,
    VIOLATION_RTOL,
};
pub use expansion::{
    dynamical_bound_check, perturbative_correlator_check, resolvent_expansion_check,
    semigroup_check, DynamicalReport, ExpansionReport, PerturbativeReport, SemigroupReport,
};

use nalgebra::DMatrix;

use crate::configspace::{ConfigSpace, Configuration, SectorMode};
use crate::error::{Error, Result};
use crate::operators::{build_hamiltonian, DisorderRealization, ModelParams, SymmetricOperator};
use crate::scalar::Real;
use crate::spectral::{eigenvalues, RestrictedResolvent};

/// Energy and decay rate of a Combes-Thomas estimate, valid only when
/// `4g - E > 12 e^{μ_T}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CtParams<T> {
    g: T,
    mu_t: T,
    energy: T,
}

impl<T: Real> CtParams<T> {
    pub fn new(g: T, mu_t: T, energy: T) -> Result<Self> {
        if !(mu_t > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "mu_T = {mu_t} must be positive"
            )));
        }
        let lhs = T::lit(4.0) * g - energy;
        let rhs = T::lit(12.0) * mu_t.exp();
        if !(lhs > rhs) {
            return Err(Error::CombesThomasCondition {
                lhs: lhs.to_f64_lossy(),
                rhs: rhs.to_f64_lossy(),
            });
        }
        Ok(Self { g, mu_t, energy })
    }

    pub fn g(&self) -> T {
        self.g
    }

    pub fn mu_t(&self) -> T {
        self.mu_t
    }

    pub fn energy(&self) -> T {
        self.energy
    }

    /// `δ_k(E) = 2k(g - e^{μ_T}) - E`.
    pub fn delta(&self, k: usize) -> T {
        let kk = T::from_count(2 * k);
        kk * (self.g - self.mu_t.exp()) - self.energy
    }

    /// `r = 8 e^{μ_T} / δ_2(E) < 1`.
    pub fn ratio(&self) -> T {
        T::lit(8.0) * self.mu_t.exp() / self.delta(2)
    }
}

/// `E(g, μ_T) = 4g - 12 e^{μ_T}`, the supremum of admissible energies.
pub fn admissible_energy<T: Real>(g: T, mu_t: T) -> T {
    T::lit(4.0) * g - T::lit(12.0) * mu_t.exp()
}

/// `C_T = (2/δ_2(E)) (1 - 8 e^{μ_T}/δ_2(E))^{-1}`.
pub fn ct_constant<T: Real>(p: &CtParams<T>) -> T {
    let two = T::one() + T::one();
    two / p.delta(2) / (T::one() - p.ratio())
}

/// Worst Combes-Thomas ratio over pairs of the at-least-two-cluster sector.
#[derive(Debug, Clone, PartialEq)]
pub struct CtReport<T> {
    pub c_t: T,
    /// `max |G^(2)(x, y; E)| e^{μ_T d(x, y)}`.
    pub worst_ratio: T,
    /// Ordinals of the maximizing pair.
    pub worst_pair: Option<(usize, usize)>,
    pub pairs: usize,
}

impl<T: Real> CtReport<T> {
    pub fn holds(&self) -> bool {
        self.worst_ratio <= self.c_t
    }

    /// `Err(Violation)` with the offending pair if the bound fails.
    pub fn ensure(&self) -> Result<()> {
        if self.holds() {
            return Ok(());
        }
        Err(Error::Violation(format!(
            "|G^(2)| e^(mu_T d) = {} exceeds C_T = {} at pair {:?}",
            self.worst_ratio, self.c_t, self.worst_pair
        )))
    }
}

fn check_n(space: &ConfigSpace) -> Result<()> {
    if space.n() < 2 {
        return Err(Error::InvalidParameter(
            "Combes-Thomas checks need n >= 2".into(),
        ));
    }
    Ok(())
}

/// Evaluates `|G^(2)(x, y; E)| e^{μ_T d(x, y)}` over all non-clustered
/// pairs and compares the maximum with `C_T`.
pub fn ct_verify<T: Real>(
    space: &ConfigSpace,
    params: &ModelParams<T>,
    w: &DisorderRealization,
    p: &CtParams<T>,
) -> Result<CtReport<T>> {
    check_n(space)?;
    if params.g() != p.g() {
        return Err(Error::InvalidParameter(
            "model and Combes-Thomas parameters disagree on g".into(),
        ));
    }
    let c_t = ct_constant(p);
    let idx = space.sector_indices(2, SectorMode::AtLeast)?;
    let mut report = CtReport {
        c_t,
        worst_ratio: T::zero(),
        worst_pair: None,
        pairs: 0,
    };
    if idx.is_empty() {
        return Ok(report);
    }
    let h = build_hamiltonian(space, params, w)?;
    let r = RestrictedResolvent::below_spectrum(&h, &idx, p.energy()).map_err(|e| {
        Error::Violation(format!(
            "two-cluster restriction not invertible below its threshold: {e}"
        ))
    })?;
    let m = r.matrix();
    for (a, &x) in idx.iter().enumerate() {
        for (b, &y) in idx.iter().enumerate() {
            let ratio = m[(a, b)].abs() * (p.mu_t() * T::lit(space.d(x, y) as f64)).exp();
            if report.worst_pair.is_none() || ratio > report.worst_ratio {
                report.worst_ratio = ratio;
                report.worst_pair = Some((x, y));
            }
        }
    }
    report.pairs = idx.len() * idx.len();
    Ok(report)
}

/// One block `P^(k) M_y R^(l) M_y^{-1} P^(j)` with its norm and bound.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockNorm<T> {
    pub k: usize,
    pub j: usize,
    pub l: usize,
    pub norm: T,
    pub bound: T,
}

impl<T: Real> BlockNorm<T> {
    pub fn holds(&self, tol: T) -> bool {
        self.norm <= self.bound + tol
    }
}

/// Block norms of the conjugated sector resolvents for a fixed `y`.
///
/// Rows with `l ∈ {j, k}` carry the bound `2/δ_l(E)`; the corner block
/// `k = j = l = k_max` additionally carries `1/δ_{k_max}(E)`; rows with
/// `l = 2` and `j, k > 2` carry `C_T`. Norms are largest singular values of
/// the explicit dense blocks.
pub fn ct_block_norms<T: Real>(
    space: &ConfigSpace,
    params: &ModelParams<T>,
    w: &DisorderRealization,
    p: &CtParams<T>,
    y: &Configuration,
) -> Result<Vec<BlockNorm<T>>> {
    check_n(space)?;
    let yi = space.require(y)?;
    let kmax = space.max_clusters();
    let h = build_hamiltonian(space, params, w)?;
    let weight: Vec<T> = (0..space.len())
        .map(|x| (p.mu_t() * T::lit(space.d(x, yi) as f64)).exp())
        .collect();
    let c_t = ct_constant(p);
    let two = T::one() + T::one();
    let mut out = Vec::new();
    for l in 2..=kmax {
        let idx = space.sector_indices(l, SectorMode::AtLeast)?;
        let r = RestrictedResolvent::below_spectrum(&h, &idx, p.energy())
            .map_err(|e| Error::Violation(format!("sector {l} restriction not invertible: {e}")))?;
        let conj = DMatrix::from_fn(idx.len(), idx.len(), |a, b| {
            r.matrix()[(a, b)] * weight[idx[a]] / weight[idx[b]]
        });
        for k in l..=kmax {
            for j in l..=kmax {
                let rows: Vec<usize> = (0..idx.len())
                    .filter(|&a| space.sector(idx[a]) == k)
                    .collect();
                let cols: Vec<usize> = (0..idx.len())
                    .filter(|&b| space.sector(idx[b]) == j)
                    .collect();
                if rows.is_empty() || cols.is_empty() {
                    continue;
                }
                let block = conj.select_rows(&rows).select_columns(&cols);
                let norm = block.singular_values().max();
                if l == k || l == j {
                    out.push(BlockNorm {
                        k,
                        j,
                        l,
                        norm,
                        bound: two / p.delta(l),
                    });
                    if k == kmax && j == kmax && l == kmax {
                        out.push(BlockNorm {
                            k,
                            j,
                            l,
                            norm,
                            bound: T::one() / p.delta(kmax),
                        });
                    }
                } else if l == 2 {
                    out.push(BlockNorm {
                        k,
                        j,
                        l,
                        norm,
                        bound: c_t,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Lowest eigenvalue of `H^(k)` on the at-least-`k` sector against the
/// threshold `2k(g - 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdRow<T> {
    pub k: usize,
    pub min_eigenvalue: T,
    pub threshold: T,
}

/// Sector thresholds for every `k` present in `space`.
pub fn threshold_check<T: Real>(
    space: &ConfigSpace,
    params: &ModelParams<T>,
    w: &DisorderRealization,
) -> Result<Vec<ThresholdRow<T>>> {
    let h = build_hamiltonian(space, params, w)?;
    threshold_rows(space, params.g(), &h)
}

fn threshold_rows<T: Real>(
    space: &ConfigSpace,
    g: T,
    h: &SymmetricOperator<T>,
) -> Result<Vec<ThresholdRow<T>>> {
    let mut rows = Vec::new();
    for k in 1..=space.max_clusters() {
        let idx = space.sector_indices(k, SectorMode::AtLeast)?;
        if idx.is_empty() {
            continue;
        }
        let values = eigenvalues(&h.restrict(&idx)?.op)?;
        rows.push(ThresholdRow {
            k,
            min_eigenvalue: values[0],
            threshold: T::from_count(2 * k) * (g - T::one()),
        });
    }
    Ok(rows)
}
