//! The three-case decay envelope `F_μ` and its summability over pairs of
//! site windows.

use super::{c_infinity, ClusterGeometry, ConfigSpace, Configuration, SiteWindow};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Which branch of `F_μ` applies to a pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvelopeCase {
    BothClustered,
    /// Exactly one of the two configurations is clustered.
    OneClustered,
    NeitherClustered,
}

impl EnvelopeCase {
    pub fn classify(x_clustered: bool, y_clustered: bool) -> Self {
        match (x_clustered, y_clustered) {
            (true, true) => Self::BothClustered,
            (false, false) => Self::NeitherClustered,
            _ => Self::OneClustered,
        }
    }
}

/// Decay rate `μ > 0` of the envelope `F_μ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayEnvelope<T> {
    mu: T,
}

impl<T: Real> DecayEnvelope<T> {
    pub fn new(mu: T) -> Result<Self> {
        if !(mu > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "decay rate mu = {mu} must be positive"
            )));
        }
        Ok(Self { mu })
    }

    pub fn mu(&self) -> T {
        self.mu
    }

    fn weight(&self, dist: i64) -> T {
        (-self.mu * T::lit(dist as f64)).exp()
    }

    /// `F_μ` between ordinals of `space`, using precomputed geometry.
    pub fn eval(&self, space: &ConfigSpace, geo: &ClusterGeometry, x: usize, y: usize) -> T {
        let firsts = geo.firsts();
        match (space.is_clustered(x), space.is_clustered(y)) {
            (true, true) => self.weight((space.config(x).first() - space.config(y).first()).abs()),
            (false, true) => self.one_sided(geo, x, space.config(y).first()),
            (true, false) => self.one_sided(geo, y, space.config(x).first()),
            (false, false) => {
                let a = geo.to_cluster(x);
                let b = geo.to_cluster(y);
                let mut acc = T::zero();
                for (i, w1) in firsts.iter().enumerate() {
                    for (j, v1) in firsts.iter().enumerate() {
                        acc += self.weight(a[i] + b[j] + (w1 - v1).abs());
                    }
                }
                acc
            }
        }
    }

    fn one_sided(&self, geo: &ClusterGeometry, free: usize, clustered_first: i64) -> T {
        geo.to_cluster(free)
            .iter()
            .zip(geo.firsts())
            .map(|(d, w1)| self.weight(d + (w1 - clustered_first).abs()))
            .fold(T::zero(), |a, b| a + b)
    }
}

/// `F_μ(x, y)` for two configurations of `space`.
pub fn envelope_f<T: Real>(
    x: &Configuration,
    y: &Configuration,
    env: &DecayEnvelope<T>,
    space: &ConfigSpace,
) -> Result<T> {
    let xi = space.require(x)?;
    let yi = space.require(y)?;
    let geo = ClusterGeometry::new(space);
    Ok(env.eval(space, &geo, xi, yi))
}

/// Result of summing `F_μ` over pairs meeting two windows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowSum<T> {
    /// `Σ_{x ∩ U ≠ ∅} Σ_{y ∩ V ≠ ∅} F_μ(x, y)`.
    pub sum: T,
    /// The bound assembled term by term from the summability argument;
    /// affine in `n`.
    pub bound: T,
    /// `C_μ = sup_{n ≥ 2} bound(n) / (n + 1)`, so that `bound ≤ C_μ (n + 1)`.
    pub c_mu: T,
}

/// The term-by-term bound on the window sum for `n` particles.
pub fn window_sum_bound<T: Real>(mu: T, n: usize) -> T {
    let one = T::one();
    let two = one + one;
    let four = two + two;
    let coth = |t: T| one / t.tanh();
    let q = (-mu).exp();
    let nn = T::from_count(n);
    let c_half = c_infinity(mu / two);
    let both = q / ((one - q) * (one - q)) + (nn - one) * coth(mu / two);
    let lead = (nn - two) + coth(mu / four);
    let mixed = lead * coth(mu / four) * c_half;
    let neither = lead * coth(mu / four) * c_half * c_half;
    both + two * mixed + neither
}

/// Sums `F_μ` over configurations meeting `u` and `v` and returns it with
/// the explicit bound. The windows must be disjoint and `n ≥ 2`.
pub fn sum_f_over_windows<T: Real>(
    u: &SiteWindow,
    v: &SiteWindow,
    env: &DecayEnvelope<T>,
    space: &ConfigSpace,
) -> Result<WindowSum<T>> {
    if u.overlaps(v) {
        return Err(Error::Windows(format!("{u} and {v} overlap")));
    }
    if space.n() < 2 {
        return Err(Error::InvalidParameter("window sums need n >= 2".into()));
    }
    let geo = ClusterGeometry::new(space);
    let mu = env.mu();
    let m = geo.clustered().len();
    let firsts = geo.firsts();
    let kernel: Vec<Vec<T>> = firsts
        .iter()
        .map(|w1| {
            firsts
                .iter()
                .map(|v1| env.weight((w1 - v1).abs()))
                .collect()
        })
        .collect();

    let mut sum = T::zero();
    // Non-clustered sides enter through their weight vectors onto the
    // clustered set, which lets the double sums factor.
    let mut a_free = vec![T::zero(); m];
    let mut b_free = vec![T::zero(); m];
    let mut x_clustered = Vec::new();
    let mut y_clustered = Vec::new();
    for i in 0..space.len() {
        let meets_u = space.meets(i, u);
        let meets_v = space.meets(i, v);
        if !meets_u && !meets_v {
            continue;
        }
        if space.is_clustered(i) {
            let slot = geo
                .clustered()
                .iter()
                .position(|&c| c == i)
                .expect("clustered ordinal");
            if meets_u {
                x_clustered.push(slot);
            }
            if meets_v {
                y_clustered.push(slot);
            }
        } else {
            let row = geo.to_cluster(i);
            if meets_u {
                for (acc, &d) in a_free.iter_mut().zip(row) {
                    *acc += env.weight(d);
                }
            }
            if meets_v {
                for (acc, &d) in b_free.iter_mut().zip(row) {
                    *acc += env.weight(d);
                }
            }
        }
    }
    for &xs in &x_clustered {
        for &ys in &y_clustered {
            sum += kernel[xs][ys];
        }
    }
    for w in 0..m {
        let kw: T = (0..m)
            .map(|v| kernel[w][v] * b_free[v])
            .fold(T::zero(), |p, q| p + q);
        sum += a_free[w] * kw;
    }
    for &ys in &y_clustered {
        for w in 0..m {
            sum += a_free[w] * kernel[w][ys];
        }
    }
    for &xs in &x_clustered {
        for v in 0..m {
            sum += kernel[xs][v] * b_free[v];
        }
    }

    let n = space.n();
    let bound = window_sum_bound(mu, n);
    let slope = window_sum_bound(mu, 3) - window_sum_bound(mu, 2);
    let c_mu = slope.max(window_sum_bound(mu, 2) / T::lit(3.0));
    Ok(WindowSum { sum, bound, c_mu })
}
