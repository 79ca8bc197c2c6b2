//! Exact diagonalization and the quantities built on it: Green functions,
//! restricted resolvents, eigenfunction correlators, reduced density matrix
//! elements and heat-kernel diagonals.

mod lowest;
mod quadrature;
mod resolvent;
mod singular;

use std::fmt;
use std::ops::Range;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

pub use lowest::{lowest_eigenpairs, lowest_eigenvalues, LowestOptions, LowestSpectrum};
pub use quadrature::GaussLegendre;
pub use resolvent::{green_restricted, RestrictedResolvent};
pub use singular::{singular_limit_probe, SingularLimitProbe, SingularOptions};

use crate::configspace::{ConfigSpace, SiteWindow};
use crate::error::{Error, Result};
use crate::operators::SymmetricOperator;
use crate::scalar::Real;

/// Default dimension cap of the dense eigensolver.
pub const DEFAULT_DENSE_CAP: usize = 15_000;

/// Relative tolerance for merging eigenvalues into one spectral projector:
/// eigenvalues closer than `DEGENERACY_RTOL (1 + ‖H‖_max)` are grouped.
pub const DEGENERACY_RTOL: f64 = 1e-8;

/// Distance to the spectrum below which a real-energy resolvent is treated
/// as singular.
pub const SINGULARITY_FLOOR: f64 = 1e-12;

/// A closed energy interval `I = [lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyWindow<T> {
    lo: T,
    hi: T,
}

impl<T: Real> EnergyWindow<T> {
    pub fn new(lo: T, hi: T) -> Result<Self> {
        if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "energy window [{lo}, {hi}] is not a finite interval"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> T {
        self.lo
    }

    pub fn hi(&self) -> T {
        self.hi
    }

    pub fn width(&self) -> T {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> T {
        (self.lo + self.hi) / (T::one() + T::one())
    }

    pub fn contains(&self, e: T) -> bool {
        self.lo <= e && e <= self.hi
    }

    /// Whether `self ⊆ other`.
    pub fn inside(&self, other: &Self) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }
}

impl<T: fmt::Display> fmt::Display for EnergyWindow<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Eigenvalues (ascending) and orthonormal eigenvectors of a symmetric
/// operator, with eigenvalues grouped into spectral projectors.
#[derive(Debug, Clone)]
pub struct SpectralData<T: Real> {
    values: Vec<T>,
    vectors: DMatrix<T>,
    groups: Vec<Range<usize>>,
    norm: T,
}

/// Dense eigendecomposition with the default cap.
pub fn diagonalize<T: Real>(op: &SymmetricOperator<T>) -> Result<SpectralData<T>> {
    diagonalize_with_cap(op, DEFAULT_DENSE_CAP)
}

/// Eigenvalues only, ascending; several times cheaper than [`diagonalize`].
pub fn eigenvalues<T: Real>(op: &SymmetricOperator<T>) -> Result<Vec<T>> {
    if op.dim() > DEFAULT_DENSE_CAP {
        return Err(Error::Capacity {
            dim: op.dim(),
            cap: DEFAULT_DENSE_CAP,
        });
    }
    if op.dim() == 0 {
        return Err(Error::EmptyIndexSet);
    }
    let mut v: Vec<T> = op
        .to_dense()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    Ok(v)
}

pub fn diagonalize_with_cap<T: Real>(
    op: &SymmetricOperator<T>,
    cap: usize,
) -> Result<SpectralData<T>> {
    if op.dim() > cap {
        return Err(Error::Capacity { dim: op.dim(), cap });
    }
    if op.dim() == 0 {
        return Err(Error::EmptyIndexSet);
    }
    let dense = op.to_dense();
    let norm = dense.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    SpectralData::from_dense(dense, norm)
}

impl<T: Real> SpectralData<T> {
    fn from_dense(dense: DMatrix<T>, norm: T) -> Result<Self> {
        let eig = nalgebra::SymmetricEigen::new(dense);
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| {
            eig.eigenvalues[a]
                .partial_cmp(&eig.eigenvalues[b])
                .expect("finite eigenvalues")
        });
        let values: Vec<T> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = eig.eigenvectors.select_columns(&order);
        let tol = T::lit(DEGENERACY_RTOL) * (T::one() + norm);
        let mut groups = Vec::new();
        let mut start = 0;
        for k in 1..=values.len() {
            if k == values.len() || values[k] - values[k - 1] > tol {
                groups.push(start..k);
                start = k;
            }
        }
        Ok(Self {
            values,
            vectors,
            groups,
            norm,
        })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn vectors(&self) -> &DMatrix<T> {
        &self.vectors
    }

    /// `Φ_E(x)` for the `k`-th eigenvector.
    pub fn amplitude(&self, k: usize, x: usize) -> T {
        self.vectors[(x, k)]
    }

    pub fn vector(&self, k: usize) -> DVector<T> {
        self.vectors.column(k).into_owned()
    }

    /// Index ranges of eigenvalues forming one spectral projector.
    pub fn groups(&self) -> &[Range<usize>] {
        &self.groups
    }

    /// Representative energy of a group (its mean).
    pub fn group_energy(&self, g: &Range<usize>) -> T {
        let s = self.values[g.clone()].iter().fold(T::zero(), |a, &b| a + b);
        s / T::from_count(g.len())
    }

    /// Max-entry norm of the decomposed operator.
    pub fn norm(&self) -> T {
        self.norm
    }

    pub fn min(&self) -> T {
        self.values[0]
    }

    pub fn max(&self) -> T {
        self.values[self.values.len() - 1]
    }

    /// Groups whose energy lies in `window`.
    pub fn groups_in<'a>(
        &'a self,
        window: &'a EnergyWindow<T>,
    ) -> impl Iterator<Item = &'a Range<usize>> + 'a {
        self.groups
            .iter()
            .filter(move |g| window.contains(self.group_energy(g)))
    }

    /// `⟨δ_x, P_E δ_y⟩` for the projector of group `g`.
    pub fn projector_entry(&self, g: &Range<usize>, x: usize, y: usize) -> T {
        g.clone().fold(T::zero(), |acc, k| {
            acc + self.vectors[(x, k)] * self.vectors[(y, k)]
        })
    }

    /// `max |H - Q Λ Qᵀ|` against the operator this was built from.
    pub fn reconstruction_residual(&self, op: &SymmetricOperator<T>) -> T {
        let lam = DMatrix::from_diagonal(&DVector::from_vec(self.values.clone()));
        let rec = &self.vectors * lam * self.vectors.transpose();
        (op.to_dense() - rec)
            .iter()
            .fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// `max |QᵀQ - 1|`.
    pub fn orthonormality_residual(&self) -> T {
        let g = self.vectors.transpose() * &self.vectors;
        let id = DMatrix::<T>::identity(self.dim(), self.dim());
        (g - id).iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// `G(x, y; z) = Σ_E Φ_E(x) Φ_E(y) / (E - z)`.
    ///
    /// For real `z` closer than [`SINGULARITY_FLOOR`] to the spectrum this is
    /// an error; shift into the complex plane or resample instead.
    pub fn green(&self, x: usize, y: usize, z: Complex<T>) -> Result<Complex<T>> {
        self.check_index(x)?;
        self.check_index(y)?;
        if z.im == T::zero() {
            let gap = self.distance_to_spectrum(z.re);
            if gap < T::lit(SINGULARITY_FLOOR) {
                return Err(Error::Singular(format!(
                    "real energy {} within {gap} of an eigenvalue",
                    z.re
                )));
            }
        }
        let mut acc = Complex::new(T::zero(), T::zero());
        for k in 0..self.dim() {
            let w = self.vectors[(x, k)] * self.vectors[(y, k)];
            acc += Complex::new(w, T::zero()) / (Complex::new(self.values[k], T::zero()) - z);
        }
        Ok(acc)
    }

    /// Real-energy Green function.
    pub fn green_real(&self, x: usize, y: usize, e: T) -> Result<T> {
        Ok(self.green(x, y, Complex::new(e, T::zero()))?.re)
    }

    pub fn distance_to_spectrum(&self, e: T) -> T {
        let p = self.values.partition_point(|&v| v < e);
        let mut best = T::max_value().unwrap_or_else(|| T::lit(f64::MAX));
        if p < self.dim() {
            best = best.min(self.values[p] - e);
        }
        if p > 0 {
            best = best.min(e - self.values[p - 1]);
        }
        best
    }

    fn check_index(&self, x: usize) -> Result<()> {
        if x >= self.dim() {
            return Err(Error::SizeMismatch(format!(
                "index {x} outside dimension {}",
                self.dim()
            )));
        }
        Ok(())
    }

    /// `Q(x, y, I) = Σ_{E ∈ I} |⟨δ_x, P_E δ_y⟩|`.
    pub fn eigenfunction_correlator(&self, x: usize, y: usize, window: &EnergyWindow<T>) -> T {
        self.groups_in(window).fold(T::zero(), |acc, g| {
            acc + self.projector_entry(g, x, y).abs()
        })
    }

    /// `⟨δ_x, P_I δ_y⟩`, the signed entry of the window projector.
    pub fn window_projector_entry(&self, x: usize, y: usize, window: &EnergyWindow<T>) -> T {
        self.groups_in(window)
            .fold(T::zero(), |acc, g| acc + self.projector_entry(g, x, y))
    }

    /// `Q(x, y, I, s) = Σ_{E ∈ I} |⟨δ_x, P_E δ_x⟩|^{1-s} |⟨δ_x, P_E δ_y⟩|^s`,
    /// with `0^0 = 1`.
    pub fn interpolated_correlator(
        &self,
        x: usize,
        y: usize,
        window: &EnergyWindow<T>,
        s: T,
    ) -> Result<T> {
        if !(s >= T::zero() && s <= T::one()) {
            return Err(Error::InvalidParameter(format!(
                "s = {s} must lie in [0, 1]"
            )));
        }
        let one = T::one();
        Ok(self.groups_in(window).fold(T::zero(), |acc, g| {
            let dxx = self.projector_entry(g, x, x).abs();
            let dxy = self.projector_entry(g, x, y).abs();
            acc + pow0(dxx, one - s) * pow0(dxy, s)
        }))
    }

    /// `q(U, V, I) = Σ_{E ∈ I} Σ_{x ∩ U ≠ ∅, y ∩ V ≠ ∅} |⟨δ_x, P_E δ_y⟩|`.
    pub fn window_correlator(
        &self,
        space: &ConfigSpace,
        u: &SiteWindow,
        v: &SiteWindow,
        window: &EnergyWindow<T>,
    ) -> T {
        let xs: Vec<usize> = (0..space.len()).filter(|&i| space.meets(i, u)).collect();
        let ys: Vec<usize> = (0..space.len()).filter(|&i| space.meets(i, v)).collect();
        let mut acc = T::zero();
        for g in self.groups_in(window) {
            for &x in &xs {
                for &y in &ys {
                    acc += self.projector_entry(g, x, y).abs();
                }
            }
        }
        acc
    }

    /// `⟨δ_x, e^{-tH} δ_x⟩`.
    pub fn heat_kernel_diag(&self, x: usize, t: T) -> Result<T> {
        if t < T::zero() {
            return Err(Error::InvalidParameter(format!(
                "t = {t} must be nonnegative"
            )));
        }
        self.check_index(x)?;
        Ok((0..self.dim()).fold(T::zero(), |acc, k| {
            let a = self.vectors[(x, k)];
            acc + (-t * self.values[k]).exp() * a * a
        }))
    }

    /// `|⟨δ_x, e^{-itH} P_I δ_y⟩|`.
    pub fn evolved_window_amplitude(
        &self,
        x: usize,
        y: usize,
        window: &EnergyWindow<T>,
        t: T,
    ) -> T {
        let mut acc = Complex::new(T::zero(), T::zero());
        for g in self.groups_in(window) {
            let e = self.group_energy(g);
            let phase = Complex::new((t * e).cos(), -(t * e).sin());
            acc += phase * Complex::new(self.projector_entry(g, x, y), T::zero());
        }
        (acc.re * acc.re + acc.im * acc.im).sqrt()
    }
}

fn pow0<T: Real>(base: T, exp: T) -> T {
    if exp == T::zero() {
        T::one()
    } else if base == T::zero() {
        T::zero()
    } else {
        base.powf(exp)
    }
}

/// `G(x, y; z)` by a direct dense complex linear solve, as an independent
/// check of the spectral formula.
pub fn green_direct<T: Real>(
    op: &SymmetricOperator<T>,
    x: usize,
    y: usize,
    z: Complex<T>,
) -> Result<Complex<T>> {
    let d = op.dim();
    let h = op.to_dense();
    let m = DMatrix::from_fn(d, d, |i, j| {
        let v = Complex::new(h[(i, j)], T::zero());
        if i == j {
            v - z
        } else {
            v
        }
    });
    let mut rhs = DVector::from_element(d, Complex::new(T::zero(), T::zero()));
    rhs[y] = Complex::new(T::one(), T::zero());
    let sol = m
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Singular(format!("H - z singular at z = {z}")))?;
    Ok(sol[x])
}

/// Hard-core one-particle density matrix element `⟨Φ, a_u^* a_v Φ⟩`.
///
/// Convention: `a_u^* a_v δ_x = δ_y` with `y = (x \ {v}) ∪ {u}` whenever
/// `v ∈ x` and `u ∉ x \ {v}`, and zero otherwise. No fermionic sign is
/// attached, so the element equals the spin correlation `⟨S_u^- S_v^+⟩`
/// under the spin dictionary. A Jordan-Wigner sign would only enter for
/// particles strictly between `u` and `v`.
pub fn reduced_density_element<T: Real>(
    space: &ConfigSpace,
    phi: &[T],
    u: i64,
    v: i64,
) -> Result<T> {
    if phi.len() != space.len() {
        return Err(Error::SizeMismatch(format!(
            "vector of length {} for dimension {}",
            phi.len(),
            space.len()
        )));
    }
    let lat = space.lattice();
    if !lat.contains(u) || !lat.contains(v) {
        return Err(Error::InvalidParameter(format!(
            "sites {u}, {v} outside the lattice"
        )));
    }
    let mut acc = T::zero();
    for i in 0..space.len() {
        if !space.occupied(i, v) {
            continue;
        }
        if u == v {
            acc += phi[i] * phi[i];
        } else if let Some(j) = space.moved(i, v, u) {
            acc += phi[j] * phi[i];
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::configspace::Configuration;
    use crate::operators::{build_hamiltonian, DisorderLaw, DisorderRealization, ModelParams};

    fn instance(
        l: usize,
        n: usize,
        g: f64,
        lambda: f64,
        seed: u64,
    ) -> (ConfigSpace, SymmetricOperator<f64>) {
        let space = ConfigSpace::new(l, n).unwrap();
        let w = DisorderLaw::uniform(1.0)
            .unwrap()
            .sample(space.lattice(), seed, 0);
        let h = build_hamiltonian(&space, &ModelParams::new(g, lambda).unwrap(), &w).unwrap();
        (space, h)
    }

    #[test]
    fn trivial_decompositions() {
        let sd = diagonalize(&SymmetricOperator::diagonal(vec![3.0f64])).unwrap();
        assert_eq!(sd.values(), &[3.0]);
        assert_eq!(sd.amplitude(0, 0).abs(), 1.0);
        let sd = diagonalize(&SymmetricOperator::diagonal(vec![2.0f64, -1.0, 5.0])).unwrap();
        assert_eq!(sd.values(), &[-1.0, 2.0, 5.0]);
        assert!(matches!(
            diagonalize_with_cap(&SymmetricOperator::<f64>::identity(4), 3),
            Err(Error::Capacity { dim: 4, cap: 3 })
        ));
    }

    #[test]
    fn residual_invariants_and_threshold() {
        let (_, h) = instance(3, 3, 2.0, 0.0, 1);
        let sd = diagonalize(&h).unwrap();
        assert!(sd.reconstruction_residual(&h) <= 1e-9 * (1.0 + sd.norm()));
        assert!(sd.orthonormality_residual() <= 1e-10);
        assert!(sd.min() >= 2.0 - 1e-9);
        // Degenerate eigenvalues of the clean chain end up in shared groups.
        assert!(sd.groups().len() <= sd.dim());
    }

    #[test]
    fn degenerate_groups_merge() {
        let sd = diagonalize(&SymmetricOperator::diagonal(vec![1.0f64, 1.0, 2.0])).unwrap();
        assert_eq!(sd.groups(), &[0..2, 2..3]);
        let w = EnergyWindow::new(0.5, 1.5).unwrap();
        assert_eq!(sd.eigenfunction_correlator(0, 0, &w), 1.0);
        assert_eq!(sd.eigenfunction_correlator(0, 1, &w), 0.0);
    }

    #[test]
    fn green_matches_direct_solve() {
        let (_, h) = instance(2, 2, 2.0, 3.0, 5);
        let sd = diagonalize(&h).unwrap();
        for (x, y, z) in [
            (0, 1, Complex::new(0.3, 0.0)),
            (2, 7, Complex::new(4.1, 0.2)),
            (3, 3, Complex::new(-1.0, 1.0)),
        ] {
            let a = sd.green(x, y, z).unwrap();
            let b = green_direct(&h, x, y, z).unwrap();
            assert!((a - b).norm() <= 1e-9 * b.norm().max(1e-300));
            let c = sd.green(x, y, z.conj()).unwrap();
            assert!((c - a.conj()).norm() <= 1e-12);
        }
        let far = sd.green(0, 1, Complex::new(1e9, 0.0)).unwrap();
        assert!(far.norm() < 1e-8);
        let e0 = sd.values()[0];
        assert!(matches!(sd.green_real(0, 0, e0), Err(Error::Singular(_))));
    }

    #[test]
    fn scalar_resolvent() {
        let space = ConfigSpace::new(1, 3).unwrap();
        let w = DisorderRealization::from_values(space.lattice(), vec![0.25, 0.5, 0.125]).unwrap();
        let h = build_hamiltonian(&space, &ModelParams::new(2.0f64, 2.0).unwrap(), &w).unwrap();
        let sd = diagonalize(&h).unwrap();
        let g = sd.green_real(0, 0, 1.0).unwrap();
        assert!((g - 1.0 / (4.0 + 2.0 * 0.875 - 1.0)).abs() < 1e-15);
        assert!((sd.heat_kernel_diag(0, 0.5).unwrap() - (-0.5f64 * 5.75).exp()).abs() < 1e-15);
    }

    #[test]
    fn correlator_relations() {
        let (space, h) = instance(3, 2, 2.0, 4.0, 9);
        let sd = diagonalize(&h).unwrap();
        let all = EnergyWindow::new(sd.min() - 1.0, sd.max() + 1.0).unwrap();
        let win = EnergyWindow::new(2.0, 7.0).unwrap();
        for x in 0..space.len() {
            assert!((sd.eigenfunction_correlator(x, x, &all) - 1.0).abs() < 1e-10);
            assert!(
                (sd.eigenfunction_correlator(x, x, &win) - sd.window_projector_entry(x, x, &win))
                    .abs()
                    < 1e-12
            );
            for y in 0..space.len() {
                let q = sd.eigenfunction_correlator(x, y, &win);
                let bound = (sd.eigenfunction_correlator(x, x, &win)
                    * sd.eigenfunction_correlator(y, y, &win))
                .sqrt();
                assert!(q <= bound + 1e-10);
                let qs = sd.interpolated_correlator(x, y, &win, 0.5).unwrap();
                let qs_t = sd.interpolated_correlator(y, x, &win, 0.5).unwrap();
                assert!(q <= (qs * qs_t).sqrt() + 1e-10);
                assert!(qs <= 1.0 + 1e-12);
                let q0 = sd.interpolated_correlator(x, y, &win, 0.0).unwrap();
                assert!((q0 - sd.eigenfunction_correlator(x, x, &win)).abs() < 1e-12);
                let q1 = sd.interpolated_correlator(x, y, &win, 1.0).unwrap();
                assert!((q1 - q).abs() < 1e-12);
            }
        }
        assert!(sd.interpolated_correlator(0, 0, &win, 1.5).is_err());
    }

    #[test]
    fn window_correlator_bounds() {
        let (space, h) = instance(2, 2, 2.0, 1.0, 3);
        let sd = diagonalize(&h).unwrap();
        let lat = space.lattice();
        let whole = SiteWindow::new(lat.lo(), lat.hi()).unwrap();
        let all = EnergyWindow::new(sd.min() - 1.0, sd.max() + 1.0).unwrap();
        assert!(sd.window_correlator(&space, &whole, &whole, &all) >= space.len() as f64 - 1e-10);
        let below = EnergyWindow::new(-10.0, sd.min() - 0.1).unwrap();
        assert_eq!(sd.window_correlator(&space, &whole, &whole, &below), 0.0);
    }

    #[test]
    fn density_elements() {
        let (space, h) = instance(3, 3, 2.0, 2.0, 4);
        let sd = diagonalize(&h).unwrap();
        for k in [0, 7, 20] {
            let phi = sd.vector(k);
            let total: f64 = space
                .lattice()
                .sites()
                .map(|u| reduced_density_element(&space, phi.as_slice(), u, u).unwrap())
                .sum();
            assert!((total - 3.0).abs() < 1e-10);
            let a = reduced_density_element(&space, phi.as_slice(), -1, 2).unwrap();
            let b = reduced_density_element(&space, phi.as_slice(), 2, -1).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
        let x = space
            .index_of(&Configuration::new(vec![-3, -2, -1]).unwrap())
            .unwrap();
        let mut delta = vec![0.0; space.len()];
        delta[x] = 1.0;
        assert_eq!(
            reduced_density_element(&space, &delta, -2, -2).unwrap(),
            1.0
        );
    }

    #[test]
    fn heat_kernel_bounds_window_diagonal() {
        let (space, h) = instance(3, 3, 2.0, 3.0, 2);
        let sd = diagonalize(&h).unwrap();
        let win = EnergyWindow::new(0.0, 6.0).unwrap();
        for x in 0..space.len() {
            assert!((sd.heat_kernel_diag(x, 0.0).unwrap() - 1.0).abs() < 1e-12);
            for t in [0.5, 1.0, 2.0] {
                let q = sd.eigenfunction_correlator(x, x, &win);
                assert!(q <= (t * win.hi()).exp() * sd.heat_kernel_diag(x, t).unwrap() + 1e-9);
            }
        }
    }
}
