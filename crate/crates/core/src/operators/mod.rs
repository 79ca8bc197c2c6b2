//! Operators on `ℓ²(X_Λ^n)`: the symmetric operator type, the model
//! Hamiltonian and its parts, the projection/transposition algebra behind
//! the cluster thresholds, and the droplet band.

mod algebra;
mod band;
mod disorder;
mod model;

use std::fmt::Write as _;

use nalgebra::DMatrix;

pub use algebra::{build_cluster_algebra, verify_prop_a1, ClusterAlgebra, PropA1Residuals};
pub use band::droplet_band;
pub use disorder::{DisorderLaw, DisorderRealization};
pub use model::{
    build_adjacency, build_cluster_potential, build_hamiltonian, build_random_potential,
    sector_indices, ModelParams,
};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A real symmetric matrix stored as its diagonal plus the strictly upper
/// triangle.
///
/// Symmetry is structural: only `i < j` entries are kept, and the lower
/// triangle is produced by mirroring, so no tolerance is involved.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricOperator<T> {
    dim: usize,
    diag: Vec<T>,
    /// Canonical strictly upper entries `(i, j, v)` with `i < j`, sorted,
    /// without duplicates or zeros.
    upper: Vec<(usize, usize, T)>,
    /// Full off-diagonal part in CSR form (both triangles).
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<T>,
}

impl<T: Scalar> SymmetricOperator<T> {
    /// Assembles from a diagonal and arbitrary off-diagonal triplets.
    ///
    /// Entries with `i > j` are folded onto `(j, i)`; repeated entries are
    /// summed; entries with `i == j` are added to the diagonal.
    pub fn from_parts(
        diag: Vec<T>,
        entries: impl IntoIterator<Item = (usize, usize, T)>,
    ) -> Result<Self> {
        let dim = diag.len();
        let mut diag = diag;
        let mut upper: Vec<(usize, usize, T)> = Vec::new();
        for (i, j, v) in entries {
            if i >= dim || j >= dim {
                return Err(Error::SizeMismatch(format!(
                    "entry ({i}, {j}) outside dimension {dim}"
                )));
            }
            match i.cmp(&j) {
                std::cmp::Ordering::Equal => diag[i] += v,
                std::cmp::Ordering::Less => upper.push((i, j, v)),
                std::cmp::Ordering::Greater => upper.push((j, i, v)),
            }
        }
        upper.sort_unstable_by_key(|&(i, j, _)| (i, j));
        let mut merged: Vec<(usize, usize, T)> = Vec::with_capacity(upper.len());
        for (i, j, v) in upper {
            match merged.last_mut() {
                Some(last) if last.0 == i && last.1 == j => last.2 += v,
                _ => merged.push((i, j, v)),
            }
        }
        merged.retain(|e| !e.2.is_zero());
        Ok(Self::from_canonical(diag, merged))
    }

    fn from_canonical(diag: Vec<T>, upper: Vec<(usize, usize, T)>) -> Self {
        let dim = diag.len();
        let mut counts = vec![0usize; dim + 1];
        for &(i, j, _) in &upper {
            counts[i + 1] += 1;
            counts[j + 1] += 1;
        }
        for r in 0..dim {
            counts[r + 1] += counts[r];
        }
        let row_ptr = counts.clone();
        let mut fill = counts;
        let nnz = row_ptr[dim];
        let mut cols = vec![0usize; nnz];
        let mut vals = vec![T::zero(); nnz];
        // Lower-triangle entries of row r come from upper entries (c, r)
        // with c < r; visiting `upper` in order therefore keeps every row
        // sorted by column once both passes are done.
        for &(i, j, v) in &upper {
            let slot = fill[j];
            cols[slot] = i;
            vals[slot] = v;
            fill[j] += 1;
        }
        for &(i, j, v) in &upper {
            let slot = fill[i];
            cols[slot] = j;
            vals[slot] = v;
            fill[i] += 1;
        }
        Self {
            dim,
            diag,
            upper,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_canonical(vec![T::zero(); dim], Vec::new())
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_canonical(vec![T::one(); dim], Vec::new())
    }

    pub fn diagonal(diag: Vec<T>) -> Self {
        Self::from_canonical(diag, Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn diag(&self) -> &[T] {
        &self.diag
    }

    /// Canonical strictly upper entries.
    pub fn upper(&self) -> &[(usize, usize, T)] {
        &self.upper
    }

    pub fn is_diagonal(&self) -> bool {
        self.upper.is_empty()
    }

    /// Number of stored nonzero entries of the full matrix.
    pub fn nnz(&self) -> usize {
        self.diag.iter().filter(|v| !v.is_zero()).count() + 2 * self.upper.len()
    }

    /// Off-diagonal entries of row `i` as `(column, value)`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()]
            .iter()
            .copied()
            .zip(self.vals[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        if i == j {
            return self.diag[i];
        }
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[r.clone()].binary_search(&j) {
            Ok(p) => self.vals[r.start + p],
            Err(_) => T::zero(),
        }
    }

    pub fn matvec(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.dim {
            return Err(Error::SizeMismatch(format!(
                "vector of length {} for dimension {}",
                v.len(),
                self.dim
            )));
        }
        Ok((0..self.dim)
            .map(|i| {
                let mut acc = self.diag[i] * v[i];
                for (j, a) in self.row(i) {
                    acc += a * v[j];
                }
                acc
            })
            .collect())
    }

    /// Writes `y = self · x` for `n_vec` column-major vectors of length `dim`.
    pub fn matmul_into(&self, x: &[T], y: &mut [T], n_vec: usize) {
        let d = self.dim;
        for c in 0..n_vec {
            let xs = &x[c * d..(c + 1) * d];
            let ys = &mut y[c * d..(c + 1) * d];
            for i in 0..d {
                let mut acc = self.diag[i] * xs[i];
                for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                    acc += self.vals[p] * xs[self.cols[p]];
                }
                ys[i] = acc;
            }
        }
    }

    pub fn to_dense(&self) -> DMatrix<T> {
        let mut m = DMatrix::from_element(self.dim, self.dim, T::zero());
        for i in 0..self.dim {
            m[(i, i)] = self.diag[i];
        }
        for &(i, j, v) in &self.upper {
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
        m
    }

    /// `Σ_k c_k · op_k` over operators of equal dimension.
    pub fn combine(terms: &[(T, &Self)]) -> Result<Self> {
        let dim = terms.first().map(|t| t.1.dim).ok_or(Error::EmptyIndexSet)?;
        let mut diag = vec![T::zero(); dim];
        let mut entries = Vec::new();
        for &(c, op) in terms {
            if op.dim != dim {
                return Err(Error::SizeMismatch(format!(
                    "dimensions {} and {dim}",
                    op.dim
                )));
            }
            for (d, &v) in diag.iter_mut().zip(&op.diag) {
                *d += c * v;
            }
            entries.extend(op.upper.iter().map(|&(i, j, v)| (i, j, c * v)));
        }
        Self::from_parts(diag, entries)
    }

    pub fn scale(&self, c: T) -> Self {
        self.map(|v| c * v)
    }

    /// Applies `f` entrywise to the stored entries; zeros stay zero.
    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> SymmetricOperator<U> {
        let diag = self.diag.iter().map(|&v| f(v)).collect();
        let upper = self
            .upper
            .iter()
            .map(|&(i, j, v)| (i, j, f(v)))
            .filter(|e| !e.2.is_zero())
            .collect();
        SymmetricOperator::from_canonical(diag, upper)
    }

    /// Principal submatrix on `idx` (ascending or not), with the index map
    /// back to the parent.
    pub fn restrict(&self, idx: &[usize]) -> Result<Restricted<T>> {
        if idx.is_empty() {
            return Err(Error::EmptyIndexSet);
        }
        let mut local = vec![usize::MAX; self.dim];
        for (k, &p) in idx.iter().enumerate() {
            if p >= self.dim {
                return Err(Error::SizeMismatch(format!(
                    "index {p} outside dimension {}",
                    self.dim
                )));
            }
            if local[p] != usize::MAX {
                return Err(Error::InvalidParameter(format!("index {p} repeated")));
            }
            local[p] = k;
        }
        let diag = idx.iter().map(|&p| self.diag[p]).collect();
        let entries: Vec<(usize, usize, T)> = self
            .upper
            .iter()
            .filter(|&&(i, j, _)| local[i] != usize::MAX && local[j] != usize::MAX)
            .map(|&(i, j, v)| (local[i], local[j], v))
            .collect();
        Ok(Restricted {
            op: Self::from_parts(diag, entries)?,
            parent: idx.to_vec(),
        })
    }

    /// `max |a_ij - b_ij|` over the full matrices.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        let diff = Self::combine(&[(T::one(), self), (T::zero() - T::one(), other)])?;
        let mut best = T::zero();
        for v in diff.diag.iter().chain(diff.upper.iter().map(|e| &e.2)) {
            let m = v.magnitude();
            if m > best {
                best = m;
            }
        }
        Ok(best)
    }

    /// `‖a - b‖_F²`, exact for exact scalar types.
    pub fn frobenius_sq_diff(&self, other: &Self) -> Result<T> {
        let diff = Self::combine(&[(T::one(), self), (T::zero() - T::one(), other)])?;
        let two = T::one() + T::one();
        let mut acc = T::zero();
        for &v in &diff.diag {
            acc += v * v;
        }
        for e in &diff.upper {
            acc += two * e.2 * e.2;
        }
        Ok(acc)
    }

    /// Sparse triplet text: a `dim nnz` header, then one `i j value` line
    /// per stored entry of the full matrix in row-major order, floats with
    /// 17 significant digits.
    pub fn to_triplets(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{} {}", self.dim, self.nnz()).expect("write to string");
        for i in 0..self.dim {
            let d = self.diag[i];
            let mut lower: Vec<(usize, T)> = self.row(i).collect();
            if !d.is_zero() {
                lower.push((i, d));
            }
            lower.sort_by_key(|e| e.0);
            for (j, v) in lower {
                writeln!(out, "{i} {j} {}", format_value(v)).expect("write to string");
            }
        }
        out
    }
}

/// Formats a scalar for text output: `{:.16e}` for floats (17 significant
/// digits), the exact representation otherwise.
pub fn format_value<T: Scalar>(v: T) -> String {
    if T::EXACT {
        format!("{v}")
    } else {
        format!("{:.16e}", v.to_f64_lossy())
    }
}

/// A principal submatrix together with the ordinals it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Restricted<T> {
    pub op: SymmetricOperator<T>,
    /// `parent[local] = ordinal in the parent space`.
    pub parent: Vec<usize>,
}

impl<T> Restricted<T> {
    /// Local index of a parent ordinal, if retained.
    pub fn local(&self, parent: usize) -> Option<usize> {
        self.parent.iter().position(|&p| p == parent)
    }
}
