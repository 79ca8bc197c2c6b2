//! Summability of `e^{-μ d}` over configuration space: the Euler-product
//! constant `C_∞(μ)` and a brute-force evaluation of the sum it bounds.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Default number of factors kept in the Euler product.
pub const C_INFINITY_DEFAULT_TRUNCATION: usize = 200;

/// `(1 - e^{-μ})^{-1} ∏_{k=1}^{K} (1 - e^{-kμ})^{-2}`.
pub fn c_infinity_truncated<T: Real>(mu: T, truncation: usize) -> Result<T> {
    if !(mu > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "mu = {mu} must be positive"
        )));
    }
    if truncation < 1 {
        return Err(Error::InvalidParameter(
            "truncation K must be at least 1".into(),
        ));
    }
    let one = T::one();
    let q = (-mu).exp();
    let mut acc = one / (one - q);
    let mut qk = one;
    for _ in 0..truncation {
        qk *= q;
        let f = one - qk;
        acc /= f * f;
    }
    Ok(acc)
}

/// Relative error bound of the `K`-factor truncation.
///
/// The omitted factors satisfy `-2 Σ_{k>K} ln(1 - q^k) ≤ 2 q^{K+1} / ((1 - q)(1 - q^{K+1}))`
/// with `q = e^{-μ}`, so the full product exceeds the truncated one by at
/// most the factor `exp` of that, and the returned value is that factor
/// minus one.
pub fn c_infinity_tail_bound<T: Real>(mu: T, truncation: usize) -> T {
    let one = T::one();
    let two = one + one;
    let q = (-mu).exp();
    let qk1 = q.powi(truncation as i32 + 1);
    (two * qk1 / ((one - q) * (one - qk1))).exp_m1()
}

/// `C_∞(μ)` with at least [`C_INFINITY_DEFAULT_TRUNCATION`] factors, and
/// more when needed to push the relative tail below round-off.
///
/// Panics if `μ ≤ 0`; use [`c_infinity_truncated`] for a checked call.
pub fn c_infinity<T: Real>(mu: T) -> T {
    let mut k = C_INFINITY_DEFAULT_TRUNCATION;
    while c_infinity_tail_bound(mu, k) > T::eps() * T::lit(0.25) && k < 1 << 24 {
        k *= 2;
    }
    c_infinity_truncated(mu, k).expect("mu must be positive")
}

/// Brute-force value of `Σ_v e^{-μ d(x, v)}` over `v ∈ X_ℤ^n` with
/// `d(x, v) ≤ radius`, for the droplet `x = {1, ..., n}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct B2Sum<T> {
    pub sum: T,
    pub radius: usize,
    /// Upper bound on the discarded part `Σ_{d(x,v) > radius}`.
    pub tail_bound: T,
    /// Number of configurations enumerated.
    pub count: u64,
}

/// Bound on `Σ_{d > R} #{v : d(x,v) = d} e^{-μ d}` using
/// `#{y ∈ ℤ^n : Σ|y_i| = d} ≤ 2^n binom(d + n - 1, n - 1)`.
pub fn b2_tail_bound<T: Real>(n: usize, mu: T, radius: usize) -> T {
    let mut total = T::zero();
    let two_n = T::lit(2f64.powi(n as i32));
    let mut d = radius + 1;
    // log binom(d + n - 1, n - 1)
    let log_binom = |d: usize| -> f64 { (1..n).map(|i| ((d + i) as f64 / i as f64).ln()).sum() };
    let mut prev = T::max_value().unwrap_or_else(|| T::lit(f64::MAX));
    loop {
        let term = two_n * (T::lit(log_binom(d)) - mu * T::lit(d as f64)).exp();
        total += term;
        if term < total * T::eps() * T::lit(1e-3) && term < prev {
            break;
        }
        if d > radius + 1_000_000 {
            break;
        }
        prev = term;
        d += 1;
    }
    total
}

/// Smallest radius whose discarded tail is below `tol`.
pub fn b2_radius<T: Real>(n: usize, mu: T, tol: T) -> usize {
    let mut r = 1;
    while b2_tail_bound(n, mu, r) >= tol {
        r += 1;
    }
    r
}

/// Enumerates every `v ∈ X_ℤ^n` within ℓ¹-radius `radius` of the droplet
/// `{1, ..., n}` and sums `e^{-μ d}`.
///
/// With `v_k = k + y_k`, strictly increasing `v` are exactly the
/// non-decreasing integer sequences `y`, and `d = Σ |y_k|`.
pub fn brute_sum_b2<T: Real>(n: usize, mu: T, radius: usize) -> Result<B2Sum<T>> {
    if n < 1 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    if !(mu > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "mu = {mu} must be positive"
        )));
    }
    let mut counts = vec![0u64; radius + 1];
    enumerate(n, -(radius as i64), radius as i64, 0, &mut counts);
    let mut sum = T::zero();
    for (d, &c) in counts.iter().enumerate().rev() {
        sum += T::lit(c as f64) * (-mu * T::lit(d as f64)).exp();
    }
    Ok(B2Sum {
        sum,
        radius,
        tail_bound: b2_tail_bound(n, mu, radius),
        count: counts.iter().sum(),
    })
}

fn enumerate(remaining: usize, min: i64, budget: i64, used: i64, counts: &mut [u64]) {
    if remaining == 0 {
        counts[used as usize] += 1;
        return;
    }
    let left = budget - used;
    // A value y forces every later entry to be >= y, so positive y costs
    // at least remaining * y.
    let lo = min.max(-left);
    for y in lo..=left {
        let cost = if y >= 0 { y * remaining as i64 } else { -y };
        if cost > left {
            if y >= 0 {
                break;
            }
            continue;
        }
        enumerate(remaining - 1, y, budget, used + y.abs(), counts);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Euler's function through the pentagonal number theorem, independent
    /// of the product form.
    fn euler_phi_pentagonal(q: f64) -> f64 {
        let mut acc = 1.0;
        for k in 1..200i64 {
            let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
            let e1 = (k * (3 * k - 1) / 2) as f64;
            let e2 = (k * (3 * k + 1) / 2) as f64;
            acc += sign * (q.powf(e1) + q.powf(e2));
        }
        acc
    }

    #[test]
    fn c_infinity_matches_pentagonal_oracle() {
        for mu in [0.5f64, 1.0, 2.0, 3.0] {
            let q = (-mu).exp();
            let phi = euler_phi_pentagonal(q);
            let oracle = 1.0 / ((1.0 - q) * phi * phi);
            approx::assert_relative_eq!(c_infinity(mu), oracle, max_relative = 1e-13);
        }
        // Reference value frozen from the pentagonal oracle.
        let v = c_infinity_truncated(1.0f64, 50).unwrap();
        approx::assert_relative_eq!(v, 6.217_282_283_409_93, max_relative = 1e-12);
    }

    #[test]
    fn c_infinity_limits_and_monotonicity() {
        assert!((c_infinity(40.0f64) - 1.0).abs() < 1e-15);
        assert!(
            c_infinity_truncated(0.5f64, 100).unwrap() > c_infinity_truncated(1.0f64, 100).unwrap()
        );
        assert!(c_infinity_truncated(0.0f64, 10).is_err());
        assert!(c_infinity_tail_bound(1.0f64, 200) < 1e-80);
    }

    #[test]
    fn b2_single_particle_is_geometric() {
        let s = brute_sum_b2(1, 1.0f64, 60).unwrap();
        let exact = (1.0 + (-1.0f64).exp()) / (1.0 - (-1.0f64).exp());
        assert!((s.sum - exact).abs() < 1e-20 + s.tail_bound);
        assert!((s.sum - exact).abs() < 1e-12);
    }

    #[test]
    fn b2_enumeration_counts_small_radius() {
        // n = 2, radius 1: v in {{1,2}, {0,2}, {1,3}}.
        let s = brute_sum_b2(2, 1.0f64, 1).unwrap();
        assert_eq!(s.count, 3);
    }

    #[test]
    fn b2_bounded_by_c_infinity() {
        let r = b2_radius(2, 1.0f64, 1e-10);
        let s = brute_sum_b2(2, 1.0f64, r.max(40)).unwrap();
        assert!(s.sum + s.tail_bound <= c_infinity(1.0));
        let s = brute_sum_b2(4, 0.5f64, 80).unwrap();
        assert!(s.tail_bound < 1e-10);
        assert!(s.sum + s.tail_bound <= c_infinity(0.5));
    }
}
