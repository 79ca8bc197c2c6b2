use nalgebra::DMatrix;

use super::{ct_constant, CtParams};
use crate::configspace::ConfigSpace;
use crate::error::{Error, Result};
use crate::operators::SymmetricOperator;
use crate::scalar::Real;
use crate::spectral::{EnergyWindow, RestrictedResolvent, SpectralData};

/// Two sides of an inequality `lhs ≤ rhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionReport<T> {
    pub lhs: T,
    pub rhs: T,
}

impl<T: Real> ExpansionReport<T> {
    /// `lhs ≤ rhs (1 + rtol) + atol`.
    pub fn holds(&self, rtol: T, atol: T) -> bool {
        self.lhs <= self.rhs * (T::one() + rtol) + atol
    }
}

/// `|G(x, y)| ≤ Σ_{u ∈ Q, v ∈ P} |G(x, u)| |H(u, v)| |⟨δ_v, (P(H - E)P)^{-1} δ_y⟩|`
/// for the coordinate projection `Q` onto `q_idx` and its complement `P`.
pub fn resolvent_expansion_check<T: Real>(
    op: &SymmetricOperator<T>,
    q_idx: &[usize],
    x: usize,
    y: usize,
    energy: T,
) -> Result<ExpansionReport<T>> {
    let dim = op.dim();
    let mut in_q = vec![false; dim];
    for &u in q_idx {
        if u >= dim {
            return Err(Error::SizeMismatch(format!(
                "index {u} outside dimension {dim}"
            )));
        }
        in_q[u] = true;
    }
    let p_idx: Vec<usize> = (0..dim).filter(|&v| !in_q[v]).collect();
    if q_idx.is_empty() || p_idx.is_empty() {
        return Err(Error::InvalidParameter(
            "both projections must be nontrivial".into(),
        ));
    }
    if x >= dim || !in_q[x] {
        return Err(Error::InvalidParameter(format!(
            "x = {x} not in the range of Q"
        )));
    }
    if y >= dim || in_q[y] {
        return Err(Error::InvalidParameter(format!(
            "y = {y} not in the range of P"
        )));
    }
    let mut shifted = op.to_dense();
    for i in 0..dim {
        shifted[(i, i)] -= energy;
    }
    let g: DMatrix<T> = shifted
        .try_inverse()
        .ok_or_else(|| Error::Singular(format!("H - E singular at E = {energy}")))?;
    let rp = RestrictedResolvent::new(op, &p_idx, energy)?;
    let mut rhs = T::zero();
    for &(i, j, h) in op.upper() {
        for (u, v) in [(i, j), (j, i)] {
            if in_q[u] && !in_q[v] {
                rhs += g[(x, u)].abs() * h.abs() * rp.get(v, y)?.abs();
            }
        }
    }
    Ok(ExpansionReport {
        lhs: g[(x, y)].abs(),
        rhs,
    })
}

/// Both sides of the perturbative correlator bound, with the largest
/// summand on the right.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbativeReport<T> {
    pub lhs: T,
    pub rhs: T,
    /// Ordinal of the clustered `w` with the largest summand.
    pub dominant: Option<usize>,
    pub dominant_term: T,
    pub terms: Vec<(usize, T)>,
}

/// `Q(x, y, I) ≤ 2 C_T(I) e^{μ_T} Σ_{w ∈ C} e^{-μ_T d(x, w)} Q(w, y, I)` for a
/// non-clustered `x`, with `C_T(I)` evaluated at `sup I`.
pub fn perturbative_correlator_check<T: Real>(
    sd: &SpectralData<T>,
    space: &ConfigSpace,
    g: T,
    mu_t: T,
    window: &EnergyWindow<T>,
    x: usize,
    y: usize,
) -> Result<PerturbativeReport<T>> {
    if sd.dim() != space.len() {
        return Err(Error::SizeMismatch(
            "spectral data and configuration space differ".into(),
        ));
    }
    if x >= space.len() || y >= space.len() {
        return Err(Error::SizeMismatch(format!(
            "indices ({x}, {y}) outside dimension {}",
            space.len()
        )));
    }
    if space.is_clustered(x) {
        return Err(Error::InvalidParameter(format!(
            "{} is clustered",
            space.config(x)
        )));
    }
    if window.lo() < T::zero() {
        return Err(Error::InvalidParameter(
            "window must lie in [0, E(g, mu_T))".into(),
        ));
    }
    let c_t = ct_constant(&CtParams::new(g, mu_t, window.hi())?);
    let pre = (T::one() + T::one()) * c_t * mu_t.exp();
    let mut terms = Vec::with_capacity(space.clustered().len());
    let mut dominant = None;
    let mut dominant_term = T::zero();
    let mut rhs = T::zero();
    for &w in space.clustered() {
        let t = pre
            * (-mu_t * T::lit(space.d(x, w) as f64)).exp()
            * sd.eigenfunction_correlator(w, y, window);
        if dominant.is_none() || t > dominant_term {
            dominant = Some(w);
            dominant_term = t;
        }
        rhs += t;
        terms.push((w, t));
    }
    Ok(PerturbativeReport {
        lhs: sd.eigenfunction_correlator(x, y, window),
        rhs,
        dominant,
        dominant_term,
        terms,
    })
}

/// `Q(x, x, I) ≤ e^{t sup I} ⟨δ_x, e^{-tH} δ_x⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemigroupReport<T> {
    pub correlator: T,
    pub bound: T,
}

pub fn semigroup_check<T: Real>(
    sd: &SpectralData<T>,
    x: usize,
    window: &EnergyWindow<T>,
    t: T,
) -> Result<SemigroupReport<T>> {
    let heat = sd.heat_kernel_diag(x, t)?;
    Ok(SemigroupReport {
        correlator: sd.eigenfunction_correlator(x, x, window),
        bound: (t * window.hi()).exp() * heat,
    })
}

/// `max_t |⟨δ_x, e^{-itH} P_I δ_y⟩|` over a time grid against `Q(x, y, I)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicalReport<T> {
    pub sup_amplitude: T,
    pub argmax_time: T,
    pub correlator: T,
}

pub fn dynamical_bound_check<T: Real>(
    sd: &SpectralData<T>,
    x: usize,
    y: usize,
    window: &EnergyWindow<T>,
    times: &[T],
) -> Result<DynamicalReport<T>> {
    if times.is_empty() {
        return Err(Error::InvalidParameter("empty time grid".into()));
    }
    if x >= sd.dim() || y >= sd.dim() {
        return Err(Error::SizeMismatch(format!(
            "indices ({x}, {y}) outside dimension {}",
            sd.dim()
        )));
    }
    let mut best = (T::zero(), times[0]);
    for &t in times {
        let a = sd.evolved_window_amplitude(x, y, window, t);
        if a > best.0 {
            best = (a, t);
        }
    }
    Ok(DynamicalReport {
        sup_amplitude: best.0,
        argmax_time: best.1,
        correlator: sd.eigenfunction_correlator(x, y, window),
    })
}
