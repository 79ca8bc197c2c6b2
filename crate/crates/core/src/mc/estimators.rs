use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{ols, student_t_quantile, McEstimate, McPlan};
use crate::bounds::admissible_energy;
use crate::configspace::{ClusterGeometry, ConfigSpace, Configuration, SiteWindow};
use crate::error::{Error, Result};
use crate::operators::{build_hamiltonian, DisorderRealization, SymmetricOperator};
use crate::spectral::{diagonalize, lowest_eigenpairs, EnergyWindow, LowestOptions, SpectralData};

/// Offset separating the inner conditioning streams from the realization
/// streams.
const INNER_SEED_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

/// Tolerance of the per-realization threshold certificate.
const THRESHOLD_TOL: f64 = 1e-9;

/// Aborts when the spectrum dips below the one-cluster threshold
/// `2(g - 1)`, which cannot happen for `λ ω ≥ 0`.
fn certify_threshold(sd: &SpectralData<f64>, g: f64, index: usize) -> Result<()> {
    let floor = 2.0 * (g - 1.0);
    if sd.min() < floor - THRESHOLD_TOL {
        return Err(Error::Violation(format!(
            "realization {index}: lowest eigenvalue {} below 2(g - 1) = {floor}",
            sd.min()
        )));
    }
    Ok(())
}

fn spectrum(
    plan: &McPlan,
    space: &ConfigSpace,
    w: &DisorderRealization,
    index: usize,
) -> Result<SpectralData<f64>> {
    let h = build_hamiltonian(space, &plan.params()?, w)?;
    let sd = diagonalize(&h)?;
    certify_threshold(&sd, plan.g, index)?;
    Ok(sd)
}

/// `E[Q(x, y, I)]`.
pub fn correlator_average(
    plan: &McPlan,
    x: &Configuration,
    y: &Configuration,
) -> Result<McEstimate> {
    let space = plan.space()?;
    let (xi, yi) = (space.require(x)?, space.require(y)?);
    let samples = plan.run(|i, w| {
        Ok(spectrum(plan, &space, &w, i)?.eigenfunction_correlator(xi, yi, &plan.window))
    })?;
    McEstimate::from_samples(&samples)
}

/// Below this dimension the screened estimator diagonalizes densely.
const DENSE_SCREEN_DIM: usize = 400;

/// `⟨δ_x, P_I δ_x⟩` without a full diagonalization.
///
/// `floor` must be a certified lower bound on the spectrum. The weight is
/// exactly zero when `floor > sup I` or when `H - sup I` admits a Cholesky
/// factorization; otherwise the lowest eigenpairs are computed until the
/// largest one leaves the window.
pub fn screened_diagonal_weight(
    h: &SymmetricOperator<f64>,
    floor: f64,
    window: &EnergyWindow<f64>,
    x: usize,
) -> Result<f64> {
    let dim = h.dim();
    if x >= dim {
        return Err(Error::SizeMismatch(format!("index {x} in dimension {dim}")));
    }
    if floor > window.hi() {
        return Ok(0.0);
    }
    let mut shifted = h.to_dense();
    for i in 0..dim {
        shifted[(i, i)] -= window.hi();
    }
    if nalgebra::Cholesky::new(shifted).is_some() {
        return Ok(0.0);
    }
    if dim <= DENSE_SCREEN_DIM {
        return Ok(diagonalize(h)?.window_projector_entry(x, x, window));
    }
    let mut k = 8usize.min(dim);
    loop {
        let (s, v) = lowest_eigenpairs(h, k, LowestOptions::default())?;
        if k == dim || s.values[k - 1] > window.hi() {
            return Ok(s
                .values
                .iter()
                .enumerate()
                .filter(|(_, &e)| window.contains(e))
                .map(|(j, _)| v[(x, j)].powi(2))
                .sum());
        }
        k = (2 * k).min(dim);
    }
}

/// `2(g - 1) + λ` times the sum of the `n` smallest field values: a lower
/// bound on the spectrum for `λ ω ≥ 0`.
pub fn certified_floor(g: f64, lambda: f64, w: &DisorderRealization, n: usize) -> f64 {
    let mut omega = w.values().to_vec();
    omega.sort_by(f64::total_cmp);
    2.0 * (g - 1.0) + lambda * omega.iter().take(n).sum::<f64>()
}

/// `E[Q(x, x, I)]` through [`screened_diagonal_weight`].
pub fn screened_diagonal_average(plan: &McPlan, x: &Configuration) -> Result<McEstimate> {
    let space = plan.space()?;
    let xi = space.require(x)?;
    let samples = plan.run(|_, w| {
        let h = build_hamiltonian(&space, &plan.params()?, &w)?;
        screened_diagonal_weight(
            &h,
            certified_floor(plan.g, plan.lambda, &w, plan.n),
            &plan.window,
            xi,
        )
    })?;
    McEstimate::from_samples(&samples)
}

/// How pairs are grouped for a decay fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Separation {
    /// Clustered pairs by `|x_1 - y_1|`.
    ClusteredFirstSite,
    /// All pairs by `d̄(x, y)`.
    Dbar,
}

/// Pair-averaged correlator at one separation.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayRow {
    pub separation: i64,
    pub pairs: usize,
    pub estimate: McEstimate,
}

/// Log-linear fit `E[Q] ≈ C e^{-μ r}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayFit {
    pub mu_fit: f64,
    /// 95% confidence interval of `μ_fit`.
    pub mu_ci: (f64, f64),
    pub c: f64,
    /// Constant at the upper end of the 95% interval of the intercept.
    pub c_upper: f64,
    /// Rows whose mean exceeds `c_upper e^{-μ_fit r}` by more than two
    /// standard errors.
    pub violations: Vec<i64>,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    pub separation: Separation,
    pub rows: Vec<DecayRow>,
    /// `E[Q(x, x, I)]` averaged over the diagonal pairs of the grouping.
    pub diagonal: McEstimate,
    /// Absent when fewer than two rows have a positive mean.
    pub fit: Option<DecayFit>,
}

fn check_window(plan: &McPlan) -> Result<()> {
    let threshold = admissible_energy(plan.g, plan.mu_t);
    if !(plan.window.lo() >= 0.0 && plan.window.hi() < threshold) {
        return Err(Error::WindowThreshold {
            lo: plan.window.lo(),
            hi: plan.window.hi(),
            threshold,
        });
    }
    Ok(())
}

/// Estimates `E[Q(x, y, I)]` per separation and fits the decay rate.
///
/// Requires `I ⊂ [0, E(g, μ_T))`.
pub fn estimate_correlator_decay(plan: &McPlan, separation: Separation) -> Result<DecayReport> {
    check_window(plan)?;
    let space = plan.space()?;
    let geo = ClusterGeometry::new(&space);
    let mut groups: BTreeMap<i64, Vec<(usize, usize)>> = BTreeMap::new();
    match separation {
        Separation::ClusteredFirstSite => {
            for &x in space.clustered() {
                for &y in space.clustered() {
                    let r = (space.config(x).first() - space.config(y).first()).abs();
                    groups.entry(r).or_default().push((x, y));
                }
            }
        }
        Separation::Dbar => {
            for x in 0..space.len() {
                for y in 0..space.len() {
                    groups.entry(geo.dbar(x, y)).or_default().push((x, y));
                }
            }
        }
    }
    let diagonal_pairs: Vec<usize> = match separation {
        Separation::ClusteredFirstSite => space.clustered().to_vec(),
        Separation::Dbar => (0..space.len()).collect(),
    };
    let per_realization = plan.run(|i, w| {
        let sd = spectrum(plan, &space, &w, i)?;
        let rows: Vec<f64> = groups
            .values()
            .map(|pairs| {
                pairs
                    .iter()
                    .map(|&(x, y)| sd.eigenfunction_correlator(x, y, &plan.window))
                    .sum::<f64>()
                    / pairs.len() as f64
            })
            .collect();
        let diag = diagonal_pairs
            .iter()
            .map(|&x| sd.eigenfunction_correlator(x, x, &plan.window))
            .sum::<f64>()
            / diagonal_pairs.len() as f64;
        Ok((rows, diag))
    })?;
    let mut rows = Vec::with_capacity(groups.len());
    for (k, (&r, pairs)) in groups.iter().enumerate() {
        let samples: Vec<f64> = per_realization.iter().map(|(v, _)| v[k]).collect();
        rows.push(DecayRow {
            separation: r,
            pairs: pairs.len(),
            estimate: McEstimate::from_samples(&samples)?,
        });
    }
    let diagonal =
        McEstimate::from_samples(&per_realization.iter().map(|(_, d)| *d).collect::<Vec<_>>())?;
    let fit = fit_decay(&rows)?;
    Ok(DecayReport {
        separation,
        rows,
        diagonal,
        fit,
    })
}

fn fit_decay(rows: &[DecayRow]) -> Result<Option<DecayFit>> {
    let used: Vec<&DecayRow> = rows.iter().filter(|r| r.estimate.mean > 0.0).collect();
    if used.len() < 2 {
        return Ok(None);
    }
    let x: Vec<f64> = used.iter().map(|r| r.separation as f64).collect();
    let y: Vec<f64> = used.iter().map(|r| r.estimate.mean.ln()).collect();
    let f = ols(&x, &y)?;
    let (lo, hi) = f.slope_ci(0.95)?;
    let t = if f.df > 0 {
        student_t_quantile(0.975, f.df as f64)?
    } else {
        f64::INFINITY
    };
    let a_up = f.intercept + t * f.intercept_stderr;
    let violations = rows
        .iter()
        .filter(|r| {
            r.estimate.mean - 2.0 * r.estimate.stderr.max(0.0)
                > (a_up + f.slope * r.separation as f64).exp()
                    * (1.0 + crate::bounds::VIOLATION_RTOL)
        })
        .map(|r| r.separation)
        .collect();
    Ok(Some(DecayFit {
        mu_fit: -f.slope,
        mu_ci: (-hi, -lo),
        c: f.intercept.exp(),
        c_upper: a_up.exp(),
        violations,
        points: used.len(),
    }))
}

/// `⟨δ_x, (H - E)^{-1} δ_y⟩` by a dense LU solve.
fn green_entry(h: &SymmetricOperator<f64>, x: usize, y: usize, energy: f64) -> Result<f64> {
    let mut m = h.to_dense();
    for i in 0..m.nrows() {
        m[(i, i)] -= energy;
    }
    let mut rhs = DVector::zeros(m.nrows());
    rhs[y] = 1.0;
    let sol = m
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Singular(format!("H - E singular at E = {energy}")))?;
    Ok(sol[x])
}

/// `E[|G(x, y; E)|^s]`, optionally conditioned: with `Some((u, v))` each
/// outer realization is averaged over `inner` fresh draws of `ω_u, ω_v`
/// with all other sites held fixed.
pub fn fractional_moment_probe(
    plan: &McPlan,
    x: &Configuration,
    y: &Configuration,
    energy: f64,
    conditioning: Option<(i64, i64)>,
    inner: usize,
) -> Result<McEstimate> {
    let space = plan.space()?;
    let (xi, yi) = (space.require(x)?, space.require(y)?);
    if let Some((u, v)) = conditioning {
        if !x.contains(u) || !y.contains(v) {
            return Err(Error::InvalidParameter(format!(
                "conditioning sites ({u}, {v}) must lie in {x} and {y}"
            )));
        }
        if inner == 0 {
            return Err(Error::InvalidParameter(
                "inner sample count must be positive".into(),
            ));
        }
    }
    let params = plan.params()?;
    let samples = plan.run(|i, w| {
        let value = |w: &DisorderRealization| -> Result<f64> {
            let h = build_hamiltonian(&space, &params, w)?;
            Ok(green_entry(&h, xi, yi, energy)?.abs().powf(plan.s))
        };
        match conditioning {
            None => value(&w),
            Some((u, v)) => {
                let mut rng = ChaCha8Rng::seed_from_u64(plan.seed_root ^ INNER_SEED_SALT);
                rng.set_stream(i as u64);
                let mut acc = 0.0;
                for _ in 0..inner {
                    let mut wi = w.with_value(u, plan.law.draw(&mut rng));
                    if v != u {
                        wi = wi.with_value(v, plan.law.draw(&mut rng));
                    }
                    acc += value(&wi)?;
                }
                Ok(acc / inner as f64)
            }
        }
    })?;
    McEstimate::from_samples(&samples)
}

/// Supremum over subintervals and clustered `x` of the averaged sums
/// `S^(1)` and `S^(2)`, with the maximizers.
#[derive(Debug, Clone, PartialEq)]
pub struct SumsReport {
    pub s1: McEstimate,
    pub s2: McEstimate,
    /// `(subinterval lo, hi, x)` attaining the supremum.
    pub s1_at: (i64, i64, Configuration),
    pub s2_at: (i64, i64, Configuration),
    /// `E[|G(x, x; E)|^s]` at the `S^(1)` maximizer.
    pub s1_diagonal: McEstimate,
    /// Clustered-`y` part of `S^(2)` at its maximizer.
    pub s2_clustered_part: McEstimate,
}

/// Monte-Carlo estimate of `S^(1)_μ(E)` and `S^(2)_μ(E)`, with the
/// supremum over subintervals `Λ' ⊆ Λ` holding at least `n` sites.
pub fn sum_s1_s2(plan: &McPlan, energy: f64) -> Result<SumsReport> {
    let lattice = plan.lattice()?;
    let mut keys: Vec<(ConfigSpace, ClusterGeometry)> = Vec::new();
    for sub in lattice.subintervals(plan.n) {
        let space = ConfigSpace::on_lattice(sub, plan.n)?;
        let geo = ClusterGeometry::new(&space);
        keys.push((space, geo));
    }
    let params = plan.params()?;
    let (s, mu) = (plan.s, plan.mu);
    // Per realization: for each (subinterval, clustered x) the tuple
    // (S1 term, S2 term, diagonal term, clustered part of S2).
    let per = plan.run(|_, w| {
        let mut out = Vec::new();
        for (space, geo) in &keys {
            let wl = w.restrict(space.lattice())?;
            let h = build_hamiltonian(space, &params, &wl)?;
            let mut m = h.to_dense();
            for i in 0..m.nrows() {
                m[(i, i)] -= energy;
            }
            let g: DMatrix<f64> = m
                .try_inverse()
                .ok_or_else(|| Error::Singular(format!("H - E singular at E = {energy}")))?;
            for &x in space.clustered() {
                let x1 = space.config(x).first();
                let mut t1 = 0.0;
                let mut t2 = 0.0;
                let mut t2c = 0.0;
                for y in 0..space.len() {
                    let gs = g[(x, y)].abs().powf(s);
                    let term2 = (s * mu * geo.dbar(x, y) as f64).exp() * gs;
                    t2 += term2;
                    if space.is_clustered(y) {
                        t1 += (s * mu * (x1 - space.config(y).first()).abs() as f64).exp() * gs;
                        t2c += term2;
                    }
                }
                out.push([t1, t2, g[(x, x)].abs().powf(s), t2c]);
            }
        }
        Ok(out)
    })?;
    let mut labels = Vec::new();
    for (space, _) in &keys {
        for &x in space.clustered() {
            let l = space.lattice();
            labels.push((l.lo(), l.hi(), space.config(x).clone()));
        }
    }
    let column = |k: usize, c: usize| -> Result<McEstimate> {
        McEstimate::from_samples(&per.iter().map(|r| r[k][c]).collect::<Vec<_>>())
    };
    let mut best1 = (0, f64::NEG_INFINITY);
    let mut best2 = (0, f64::NEG_INFINITY);
    for k in 0..labels.len() {
        let (a, b) = (column(k, 0)?.mean, column(k, 1)?.mean);
        if a > best1.1 {
            best1 = (k, a);
        }
        if b > best2.1 {
            best2 = (k, b);
        }
    }
    Ok(SumsReport {
        s1: column(best1.0, 0)?,
        s2: column(best2.0, 1)?,
        s1_at: labels[best1.0].clone(),
        s2_at: labels[best2.0].clone(),
        s1_diagonal: column(best1.0, 2)?,
        s2_clustered_part: column(best2.0, 3)?,
    })
}

/// `E[q(U, V, I)]` for disjoint site windows.
pub fn window_correlator_average(
    plan: &McPlan,
    u: &SiteWindow,
    v: &SiteWindow,
) -> Result<McEstimate> {
    if u.overlaps(v) {
        return Err(Error::Windows(format!("{u} and {v} overlap")));
    }
    let space = plan.space()?;
    let samples = plan.run(|i, w| {
        Ok(spectrum(plan, &space, &w, i)?.window_correlator(&space, u, v, &plan.window))
    })?;
    McEstimate::from_samples(&samples)
}
