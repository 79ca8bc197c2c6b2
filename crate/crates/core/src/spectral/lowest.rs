//! Lowest eigenvalues of large sparse operators by Chebyshev-filtered
//! subspace iteration.
//!
//! A block of `k + guard` vectors is repeatedly filtered by the Chebyshev
//! polynomial that is small on `[a, b]` (with `b` a Gershgorin bound on the
//! spectrum and `a` the largest current Ritz value), re-orthonormalized and
//! Rayleigh-Ritz projected, until the residuals of the lowest `k` Ritz pairs
//! fall below the tolerance.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::operators::SymmetricOperator;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowestOptions {
    /// Extra vectors carried beyond the requested count.
    pub guard: usize,
    /// Chebyshev filter degree per iteration.
    pub degree: usize,
    /// Residual tolerance `‖H v - θ v‖ ≤ tol · max(1, |θ|)`.
    pub tol: f64,
    pub max_iterations: usize,
    /// Seed of the random starting block.
    pub seed: u64,
}

impl Default for LowestOptions {
    fn default() -> Self {
        Self {
            guard: 12,
            degree: 24,
            tol: 1e-9,
            max_iterations: 300,
            seed: 0x5eed,
        }
    }
}

/// Converged lowest Ritz values with their residual norms.
#[derive(Debug, Clone, PartialEq)]
pub struct LowestSpectrum<T> {
    pub values: Vec<T>,
    pub residuals: Vec<T>,
    pub iterations: usize,
}

/// The `k` lowest eigenvalues of `op`, ascending.
pub fn lowest_eigenvalues<T: Real>(
    op: &SymmetricOperator<T>,
    k: usize,
    opts: LowestOptions,
) -> Result<LowestSpectrum<T>> {
    lowest_eigenpairs(op, k, opts).map(|(s, _)| s)
}

/// The `k` lowest eigenpairs; column `j` of the matrix belongs to `values[j]`.
pub fn lowest_eigenpairs<T: Real>(
    op: &SymmetricOperator<T>,
    k: usize,
    opts: LowestOptions,
) -> Result<(LowestSpectrum<T>, DMatrix<T>)> {
    let dim = op.dim();
    if k == 0 || k > dim {
        return Err(Error::InvalidParameter(format!(
            "cannot request {k} eigenvalues of a {dim}-dimensional operator"
        )));
    }
    let m = (k + opts.guard).min(dim);
    if m == dim {
        // The block spans everything; Rayleigh-Ritz is exact.
        let sd = super::diagonalize_with_cap(op, usize::MAX)?;
        let spectrum = LowestSpectrum {
            values: sd.values()[..k].to_vec(),
            residuals: vec![T::zero(); k],
            iterations: 0,
        };
        return Ok((spectrum, sd.vectors().columns(0, k).into_owned()));
    }
    let upper = gershgorin_upper(op);

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut x = DMatrix::<T>::from_fn(dim, m, |_, _| {
        let z: f64 = StandardNormal.sample(&mut rng);
        T::lit(z)
    });
    orthonormalize(&mut x)?;
    let (mut theta, mut hx) = rayleigh_ritz(op, &mut x)?;

    for it in 1..=opts.max_iterations {
        let residuals = residual_norms(&x, &hx, &theta, k);
        let converged = residuals
            .iter()
            .zip(&theta)
            .all(|(&r, &t)| r <= T::lit(opts.tol) * t.abs().max(T::one()));
        if converged {
            let spectrum = LowestSpectrum {
                values: theta[..k].to_vec(),
                residuals,
                iterations: it - 1,
            };
            return Ok((spectrum, x.columns(0, k).into_owned()));
        }
        let a = theta[m - 1];
        if !(upper > a) {
            return Err(Error::NoConvergence("filter interval collapsed".into()));
        }
        x = chebyshev_filter(op, &x, &hx, opts.degree, a, upper);
        orthonormalize(&mut x)?;
        let rr = rayleigh_ritz(op, &mut x)?;
        theta = rr.0;
        hx = rr.1;
    }
    Err(Error::NoConvergence(format!(
        "{k} lowest eigenvalues not converged after {} iterations",
        opts.max_iterations
    )))
}

fn gershgorin_upper<T: Real>(op: &SymmetricOperator<T>) -> T {
    (0..op.dim())
        .map(|i| op.diag()[i] + op.row(i).fold(T::zero(), |acc, (_, v)| acc + v.abs()))
        .fold(
            T::min_value().unwrap_or_else(|| T::lit(f64::MIN)),
            |a, b| a.max(b),
        )
}

fn apply<T: Real>(op: &SymmetricOperator<T>, x: &DMatrix<T>) -> DMatrix<T> {
    let mut y = DMatrix::<T>::zeros(x.nrows(), x.ncols());
    op.matmul_into(x.as_slice(), y.as_mut_slice(), x.ncols());
    y
}

/// `p(H) X` with `p` the degree-`d` Chebyshev polynomial mapped to `[a, b]`;
/// `hx = H X` is reused for the first step.
fn chebyshev_filter<T: Real>(
    op: &SymmetricOperator<T>,
    x: &DMatrix<T>,
    hx: &DMatrix<T>,
    degree: usize,
    a: T,
    b: T,
) -> DMatrix<T> {
    let two = T::one() + T::one();
    let e = (b - a) / two;
    let c = (b + a) / two;
    let mut prev = x.clone();
    let mut cur = (hx - x * c) / e;
    for _ in 1..degree {
        let hy = apply(op, &cur);
        let next = (hy - &cur * c) * (two / e) - &prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Two rounds of Cholesky QR, falling back to Householder QR when the Gram
/// matrix is numerically singular.
fn orthonormalize<T: Real>(x: &mut DMatrix<T>) -> Result<()> {
    for _ in 0..2 {
        let gram = x.transpose() * &*x;
        match nalgebra::Cholesky::new(gram) {
            Some(ch) => {
                let l = ch.l();
                // X ← X L^{-T}
                let lt = l.transpose();
                let inv = lt
                    .try_inverse()
                    .ok_or_else(|| Error::NoConvergence("singular Cholesky factor".into()))?;
                *x = &*x * inv;
            }
            None => {
                let q = x.clone().qr().q();
                *x = q;
            }
        }
    }
    Ok(())
}

/// Rotates `x` onto Ritz vectors; returns ascending Ritz values and `H X`.
fn rayleigh_ritz<T: Real>(
    op: &SymmetricOperator<T>,
    x: &mut DMatrix<T>,
) -> Result<(Vec<T>, DMatrix<T>)> {
    let hx = apply(op, x);
    let mut small = x.transpose() * &hx;
    small = (&small + small.transpose()) / (T::one() + T::one());
    let eig = nalgebra::SymmetricEigen::new(small);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&p, &q| {
        eig.eigenvalues[p]
            .partial_cmp(&eig.eigenvalues[q])
            .expect("finite Ritz values")
    });
    let v = eig.eigenvectors.select_columns(&order);
    let theta = order.iter().map(|&p| eig.eigenvalues[p]).collect();
    *x = &*x * &v;
    Ok((theta, hx * v))
}

fn residual_norms<T: Real>(x: &DMatrix<T>, hx: &DMatrix<T>, theta: &[T], k: usize) -> Vec<T> {
    (0..k)
        .map(|j| (hx.column(j) - x.column(j) * theta[j]).norm())
        .collect()
}
