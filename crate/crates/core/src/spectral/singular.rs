//! The fractional-power integral `(1 - s)/2 ∫_I |G(x, y; E)|^s dE` and its
//! approach to `Q(x, y, I)` as `s → 1`.
//!
//! `|G|^s` has an integrable singularity `|E - E_0|^{-s}` at every eigenvalue
//! `E_0`. The window is split at the eigenvalues inside it, each piece is
//! halved, and the half adjacent to an eigenvalue `p` is mapped by
//! `E = p ± h τ^q` with `q = 1/(1 - s)`. Then
//!
//! `(1 - s)/2 ∫_0^h |G|^s dt = h^{1-s}/2 ∫_0^1 |G(p ± h τ^q) · h τ^q|^s dτ`,
//!
//! and `G · t` stays bounded: the pole at `p` contributes the constant
//! `∓⟨δ_x, P_p δ_y⟩`. The remaining integrals are smooth up to cusps at zeros
//! of `G`, handled by adaptive bisection of Gauss-Legendre panels.

use super::{EnergyWindow, GaussLegendre, SpectralData};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Quadrature controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularOptions {
    /// Gauss-Legendre nodes per panel.
    pub nodes: usize,
    /// Relative tolerance of the adaptive refinement.
    pub rtol: f64,
    /// Absolute tolerance of the adaptive refinement.
    pub atol: f64,
    /// Maximal bisection depth.
    pub max_depth: usize,
}

impl Default for SingularOptions {
    fn default() -> Self {
        Self {
            nodes: 64,
            rtol: 1e-9,
            atol: 1e-13,
            max_depth: 40,
        }
    }
}

/// Probe values for each `s`, with the correlator they approach.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularLimitProbe<T> {
    pub s: Vec<T>,
    pub values: Vec<T>,
    /// `Q(x, y, I)`.
    pub correlator: T,
}

/// Evaluates `(1 - s)/2 ∫_I |G(x, y; E)|^s dE` for each `s` of an increasing
/// grid in `(0, 1)`.
pub fn singular_limit_probe<T: Real>(
    sd: &SpectralData<T>,
    x: usize,
    y: usize,
    window: &EnergyWindow<T>,
    s_grid: &[T],
    opts: SingularOptions,
) -> Result<SingularLimitProbe<T>> {
    if x >= sd.dim() || y >= sd.dim() {
        return Err(Error::SizeMismatch(format!(
            "indices ({x}, {y}) outside dimension {}",
            sd.dim()
        )));
    }
    if s_grid.is_empty() {
        return Err(Error::InvalidParameter("empty s grid".into()));
    }
    for (k, &s) in s_grid.iter().enumerate() {
        if !(s > T::zero() && s < T::one()) {
            return Err(Error::InvalidParameter(format!(
                "s = {s} must lie in (0, 1)"
            )));
        }
        if k > 0 && !(s > s_grid[k - 1]) {
            return Err(Error::InvalidParameter(
                "s grid must be strictly increasing".into(),
            ));
        }
    }
    let coeffs: Vec<(T, T)> = sd
        .groups()
        .iter()
        .map(|g| (sd.group_energy(g), sd.projector_entry(g, x, y)))
        .collect();
    let rule = GaussLegendre::<T>::new(opts.nodes);
    let values = s_grid
        .iter()
        .map(|&s| integrate_window(&coeffs, window, s, &rule, &opts))
        .collect::<Result<Vec<T>>>()?;
    Ok(SingularLimitProbe {
        s: s_grid.to_vec(),
        values,
        correlator: sd.eigenfunction_correlator(x, y, window),
    })
}

fn integrate_window<T: Real>(
    coeffs: &[(T, T)],
    window: &EnergyWindow<T>,
    s: T,
    rule: &GaussLegendre<T>,
    opts: &SingularOptions,
) -> Result<T> {
    let one = T::one();
    let two = one + one;
    let q = one / (one - s);
    // Breakpoints: window ends and the poles strictly inside, each tagged
    // with the index of its pole.
    let mut points: Vec<(T, Option<usize>)> = vec![(window.lo(), None)];
    for (k, &(e, _)) in coeffs.iter().enumerate() {
        if e > window.lo() && e < window.hi() {
            points.push((e, Some(k)));
        }
    }
    points.push((window.hi(), None));
    for &(e, _) in coeffs {
        if e == window.lo() || e == window.hi() {
            return Err(Error::Quadrature(format!(
                "eigenvalue {e} sits on the window boundary"
            )));
        }
    }

    let g_times_t = |pole: usize, p: T, sigma: T, t: T| -> T {
        let mut acc = -sigma * coeffs[pole].1;
        for (k, &(e, c)) in coeffs.iter().enumerate() {
            if k != pole {
                acc += t * c / (e - (p + sigma * t));
            }
        }
        acc
    };
    let mut total = T::zero();
    for pair in points.windows(2) {
        let (a, pa) = pair[0];
        let (b, pb) = pair[1];
        let h = (b - a) / two;
        if h <= T::zero() {
            continue;
        }
        for (end, pole, sigma) in [(a, pa, one), (b, pb, -one)] {
            let part = match pole {
                Some(k) => {
                    let f = |tau: T| {
                        let t = h * tau.powf(q);
                        g_times_t(k, end, sigma, t).abs().powf(s)
                    };
                    h.powf(one - s) / two * adaptive(&f, T::zero(), one, rule, opts, 0)?
                }
                None => {
                    // Regular end: integrate from the end towards the midpoint.
                    let f = |u: T| {
                        let e = end + sigma * h * u;
                        let gv = coeffs
                            .iter()
                            .fold(T::zero(), |acc, &(ek, c)| acc + c / (ek - e));
                        gv.abs().powf(s)
                    };
                    (one - s) / two * h * adaptive(&f, T::zero(), one, rule, opts, 0)?
                }
            };
            total += part;
        }
    }
    Ok(total)
}

fn adaptive<T: Real>(
    f: &impl Fn(T) -> T,
    a: T,
    b: T,
    rule: &GaussLegendre<T>,
    opts: &SingularOptions,
    depth: usize,
) -> Result<T> {
    let two = T::one() + T::one();
    let m = (a + b) / two;
    let whole = (b - a) * rule.integrate(|u| f(a + (b - a) * u));
    let left = (m - a) * rule.integrate(|u| f(a + (m - a) * u));
    let right = (b - m) * rule.integrate(|u| f(m + (b - m) * u));
    let split = left + right;
    if !split.is_finite() {
        return Err(Error::Quadrature(format!(
            "non-finite integrand on [{a}, {b}]"
        )));
    }
    let tol = T::lit(opts.rtol) * split.abs() + T::lit(opts.atol) * (b - a);
    if (split - whole).abs() <= tol {
        return Ok(split);
    }
    if depth >= opts.max_depth {
        return Err(Error::Quadrature(format!(
            "no convergence on [{a}, {b}] after {depth} bisections (estimates {whole} vs {split})"
        )));
    }
    Ok(adaptive(f, a, m, rule, opts, depth + 1)? + adaptive(f, m, b, rule, opts, depth + 1)?)
}
