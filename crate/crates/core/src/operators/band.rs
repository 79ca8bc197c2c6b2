use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::EnergyWindow;

/// The droplet band `Δ(n) = 2√(g²-1) [tanh(ρ n / 2), coth(ρ n / 2)]` with
/// `ρ = arccosh g`.
///
/// Equivalently `2√(g²-1) [(cosh ρn - 1)/sinh ρn, (cosh ρn + 1)/sinh ρn]`;
/// for `n = 1` the endpoints are `2(g - 1)` and `2(g + 1)`, and both tend to
/// `2√(g²-1)` as `n → ∞`.
pub fn droplet_band<T: Real>(g: T, n: usize) -> Result<EnergyWindow<T>> {
    let one = T::one();
    if !(g > one) {
        return Err(Error::InvalidParameter(format!("g = {g} must exceed 1")));
    }
    if n < 1 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let two = one + one;
    let root = (g * g - one).sqrt();
    let rho = (g + root).ln();
    let half = rho * T::from_count(n) / two;
    let t = half.tanh();
    EnergyWindow::new(two * root * t, two * root / t)
}
