//! The XXZ chain with `++` boundary fields and a random field coupled to the
//! down-spin density, in sectors of fixed down-spin number, and its
//! identification with the hard-core particle model.
//!
//! Spin sites are `1..=N`. A down spin at site `k` is a particle at lattice
//! site `lo + k - 1`, so the basis vector `e_x` with down spins at the
//! positions of `x` corresponds to `δ_x`.

use std::collections::HashMap;

use crate::configspace::{ConfigSpace, Configuration};
use crate::error::{Error, Result};
use crate::operators::{build_hamiltonian, DisorderRealization, ModelParams, SymmetricOperator};
use crate::scalar::{Real, Scalar};

/// Largest chain for which the full `2^N` operator is assembled.
pub const FULL_CHAIN_MAX_SITES: usize = 14;

/// Down-spin position sets of a chain of `N` sites with `n` down spins,
/// in lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinSectorBasis {
    sites: usize,
    n: usize,
    states: Vec<Vec<usize>>,
    index: HashMap<u64, usize>,
}

impl SpinSectorBasis {
    pub fn new(sites: usize, n: usize) -> Result<Self> {
        if sites == 0 || sites > 63 {
            return Err(Error::InvalidParameter(format!(
                "chain length {sites} outside 1..=63"
            )));
        }
        if n > sites {
            return Err(Error::ParticleCount { n, sites });
        }
        let mut states = Vec::new();
        let mut pick: Vec<usize> = (1..=n).collect();
        loop {
            states.push(pick.clone());
            let mut i = n;
            while i > 0 && pick[i - 1] == sites - n + i {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            pick[i - 1] += 1;
            for j in i..n {
                pick[j] = pick[j - 1] + 1;
            }
        }
        let index = states
            .iter()
            .enumerate()
            .map(|(k, s)| (mask_of(s), k))
            .collect();
        Ok(Self {
            sites,
            n,
            states,
            index,
        })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Down-spin positions of state `i`.
    pub fn state(&self, i: usize) -> &[usize] {
        &self.states[i]
    }

    pub fn states(&self) -> &[Vec<usize>] {
        &self.states
    }

    /// Ordinal of the state whose down spins are given by `mask` (bit
    /// `k - 1` for site `k`).
    pub fn index_of_mask(&self, mask: u64) -> Option<usize> {
        self.index.get(&mask).copied()
    }

    pub fn mask(&self, i: usize) -> u64 {
        mask_of(&self.states[i])
    }
}

fn mask_of(downs: &[usize]) -> u64 {
    downs.iter().fold(0u64, |m, &k| m | 1 << (k - 1))
}

/// Parameters of the droplet Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct XxzParams<T> {
    delta: T,
    gamma: T,
    lambda: T,
    omega: DisorderRealization,
}

impl<T: Scalar> XxzParams<T> {
    /// `Δ > 1`, `γ ≥ 0`, `λ ≥ 0`; `ω` is read site by site from the left end
    /// of its lattice.
    pub fn new(delta: T, gamma: T, lambda: T, omega: DisorderRealization) -> Result<Self> {
        if !(delta > T::one()) {
            return Err(Error::InvalidParameter(format!(
                "anisotropy {delta} must exceed 1"
            )));
        }
        if gamma < T::zero() || lambda < T::zero() {
            return Err(Error::InvalidParameter(
                "gamma and lambda must be nonnegative".into(),
            ));
        }
        Ok(Self {
            delta,
            gamma,
            lambda,
            omega,
        })
    }

    pub fn delta(&self) -> T {
        self.delta
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn omega(&self) -> &DisorderRealization {
        &self.omega
    }

    fn omega_at(&self, k: usize) -> T {
        T::lit(self.omega.values()[k - 1])
    }
}

/// `h = -(1/Δ)(S^x⊗S^x + S^y⊗S^y) + (1/4 - S^z⊗S^z)` on `(↑↑, ↑↓, ↓↑, ↓↓)`.
pub fn build_local_bond<T: Scalar>(delta: T) -> Result<[[T; 4]; 4]> {
    if delta.is_zero() {
        return Err(Error::InvalidParameter("anisotropy must be nonzero".into()));
    }
    Ok(local_bond_inverse(T::one() / delta))
}

/// The bond in terms of `Δ^{-1}`, so that `Δ^{-1} = 0` gives the Ising
/// point.
pub fn local_bond_inverse<T: Scalar>(inv_delta: T) -> [[T; 4]; 4] {
    let z = T::zero();
    let two = T::one() + T::one();
    let half = T::one() / two;
    let hop = z - inv_delta / two;
    [
        [z, z, z, z],
        [z, half, hop, z],
        [z, hop, half, z],
        [z, z, z, z],
    ]
}

fn check_field<T: Scalar>(sites: usize, p: &XxzParams<T>) -> Result<()> {
    if p.omega.values().len() != sites {
        return Err(Error::SizeMismatch(format!(
            "{} field values for a chain of {sites} sites",
            p.omega.values().len()
        )));
    }
    Ok(())
}

/// Sector block of `H^xxz + (γ/2)(1 - S^z_1 - S^z_N) + (λ/2Δ) Σ_k ω(k)(1/2 - S^z_k)`.
pub fn build_droplet_hamiltonian<T: Scalar>(
    basis: &SpinSectorBasis,
    p: &XxzParams<T>,
) -> Result<SymmetricOperator<T>> {
    let nsites = basis.sites();
    check_field(nsites, p)?;
    let bond = build_local_bond(p.delta)?;
    let two = T::one() + T::one();
    let field = p.lambda / (two * p.delta);
    let mut diag = Vec::with_capacity(basis.len());
    let mut entries = Vec::new();
    for i in 0..basis.len() {
        let m = basis.mask(i);
        let down = |k: usize| m >> (k - 1) & 1 == 1;
        let mut d = T::zero();
        for k in 1..nsites {
            let a = usize::from(down(k)) * 2 + usize::from(down(k + 1));
            d += bond[a][a];
            if down(k) != down(k + 1) {
                let flipped = m ^ (1 << (k - 1)) ^ (1 << k);
                let j = basis
                    .index_of_mask(flipped)
                    .expect("hop stays in the sector");
                if i < j {
                    let b = usize::from(!down(k)) * 2 + usize::from(!down(k + 1));
                    entries.push((i, j, bond[a][b]));
                }
            }
        }
        // 1 - S^z_1 - S^z_N = N_1 + N_N, with N_k = 1/2 - S^z_k.
        let ends = usize::from(down(1)) + usize::from(down(nsites));
        d += p.gamma / two * T::from_count(ends);
        for &k in basis.state(i) {
            d += field * p.omega_at(k);
        }
        diag.push(d);
    }
    SymmetricOperator::from_parts(diag, entries)
}

/// The same operator on the full `2^N` space, assembled from the two-site
/// bond matrix by tensor placement, indexed by down-spin masks.
pub fn build_full_chain<T: Scalar>(
    nsites: usize,
    p: &XxzParams<T>,
) -> Result<SymmetricOperator<T>> {
    if nsites == 0 || nsites > FULL_CHAIN_MAX_SITES {
        return Err(Error::Capacity {
            dim: 1usize << nsites.min(62),
            cap: 1 << FULL_CHAIN_MAX_SITES,
        });
    }
    check_field(nsites, p)?;
    let bond = build_local_bond(p.delta)?;
    let two = T::one() + T::one();
    let half = T::one() / two;
    let dim = 1usize << nsites;
    // S^z eigenvalue of a site: +1/2 up, -1/2 down.
    let sz = |m: usize, k: usize| {
        if m >> (k - 1) & 1 == 1 {
            T::zero() - half
        } else {
            half
        }
    };
    let mut diag = vec![T::zero(); dim];
    let mut entries = Vec::new();
    for (m, dm) in diag.iter_mut().enumerate() {
        for k in 1..nsites {
            let a = (m >> (k - 1) & 1) * 2 + (m >> k & 1);
            for (b, &v) in bond[a].iter().enumerate() {
                if v.is_zero() {
                    continue;
                }
                let target = m & !(0b11 << (k - 1)) | (b >> 1) << (k - 1) | (b & 1) << k;
                if target == m {
                    *dm += v;
                } else if m < target {
                    entries.push((m, target, v));
                }
            }
        }
        *dm += p.gamma / two * (T::one() - sz(m, 1) - sz(m, nsites));
        let field = p.lambda / (two * p.delta);
        for k in 1..=nsites {
            *dm += field * p.omega_at(k) * (half - sz(m, k));
        }
    }
    SymmetricOperator::from_parts(diag, entries)
}

/// Principal block of a full-chain operator on a sector, in basis order.
pub fn project_to_sector<T: Scalar>(
    full: &SymmetricOperator<T>,
    basis: &SpinSectorBasis,
) -> Result<SymmetricOperator<T>> {
    let idx: Vec<usize> = (0..basis.len()).map(|i| basis.mask(i) as usize).collect();
    Ok(full.restrict(&idx)?.op)
}

/// The bijection `x ↦ e_x` between a configuration space and a spin sector.
#[derive(Debug, Clone, PartialEq)]
pub struct Dictionary {
    basis: SpinSectorBasis,
    /// `forward[x] = ordinal of e_x`.
    forward: Vec<usize>,
    lo: i64,
}

impl Dictionary {
    pub fn basis(&self) -> &SpinSectorBasis {
        &self.basis
    }

    /// Spin ordinal of configuration ordinal `x`.
    pub fn spin_index(&self, x: usize) -> usize {
        self.forward[x]
    }

    /// Whether the identification is the identity permutation.
    pub fn is_identity(&self) -> bool {
        self.forward.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Down-spin positions of a configuration.
    pub fn spin_state(&self, x: &Configuration) -> Vec<usize> {
        x.sites()
            .iter()
            .map(|&s| (s - self.lo + 1) as usize)
            .collect()
    }

    /// Inverse: the configuration of a spin state.
    pub fn configuration(&self, i: usize) -> Result<Configuration> {
        Configuration::new(
            self.basis
                .state(i)
                .iter()
                .map(|&k| self.lo + k as i64 - 1)
                .collect(),
        )
    }
}

/// Builds the dictionary for `space`, matching the spin sector of `N = |Λ|`
/// sites with `n` down spins.
pub fn dictionary(space: &ConfigSpace) -> Result<Dictionary> {
    let lat = space.lattice();
    let basis = SpinSectorBasis::new(lat.len(), space.n())?;
    let mut d = Dictionary {
        forward: Vec::with_capacity(space.len()),
        basis,
        lo: lat.lo(),
    };
    for x in space.configs() {
        let mask = mask_of(&d.spin_state(x));
        let j = d
            .basis
            .index_of_mask(mask)
            .ok_or_else(|| Error::SizeMismatch(format!("{x} has no spin counterpart")))?;
        d.forward.push(j);
    }
    if d.forward.len() != d.basis.len() {
        return Err(Error::SizeMismatch(
            "configuration space and spin sector differ in size".into(),
        ));
    }
    Ok(d)
}

/// `max |H(x, y) - 2g H^{++}(Δ = g, γ = 1)(e_x, e_y)|` over all pairs.
pub fn equivalence_residual<T: Scalar>(
    space: &ConfigSpace,
    g: T,
    lambda: T,
    w: &DisorderRealization,
) -> Result<T> {
    let params = ModelParams::new(g, lambda)?;
    let h = build_hamiltonian(space, &params, w)?;
    let dict = dictionary(space)?;
    let field = w.restrict(space.lattice())?;
    let spin =
        build_droplet_hamiltonian(dict.basis(), &XxzParams::new(g, T::one(), lambda, field)?)?;
    let two_g = g + g;
    let mut worst = T::zero();
    for x in 0..space.len() {
        let a = dict.spin_index(x);
        for y in 0..space.len() {
            let r = (h.get(x, y) - two_g * spin.get(a, dict.spin_index(y))).magnitude();
            if r > worst {
                worst = r;
            }
        }
    }
    Ok(worst)
}

/// Residual for the empty sector `n = 0`, where the hard-core side is the
/// one-dimensional zero operator.
pub fn empty_sector_residual<T: Scalar>(
    nsites: usize,
    g: T,
    lambda: T,
    w: &DisorderRealization,
) -> Result<T> {
    let basis = SpinSectorBasis::new(nsites, 0)?;
    let spin = build_droplet_hamiltonian(&basis, &XxzParams::new(g, T::one(), lambda, w.clone())?)?;
    Ok(((g + g) * spin.get(0, 0)).magnitude())
}

/// `⟨ψ, S_u^- S_v^+ ψ⟩` for a real sector vector `ψ`, with `S^± = S^x ± i S^y`.
/// Sites are spin sites `1..=N`.
pub fn spin_ladder_element<T: Real>(
    basis: &SpinSectorBasis,
    psi: &[T],
    u: usize,
    v: usize,
) -> Result<T> {
    if psi.len() != basis.len() {
        return Err(Error::SizeMismatch(format!(
            "vector of length {} for dimension {}",
            psi.len(),
            basis.len()
        )));
    }
    let n = basis.sites();
    if !(1..=n).contains(&u) || !(1..=n).contains(&v) {
        return Err(Error::InvalidParameter(format!(
            "spin sites {u}, {v} outside 1..={n}"
        )));
    }
    let (bu, bv) = (1u64 << (u - 1), 1u64 << (v - 1));
    let mut acc = T::zero();
    for i in 0..basis.len() {
        let m = basis.mask(i);
        // S_v^+ needs a down spin at v; S_u^- then needs an up spin at u.
        if m & bv == 0 {
            continue;
        }
        let raised = m & !bv;
        if raised & bu != 0 {
            continue;
        }
        let j = basis
            .index_of_mask(raised | bu)
            .expect("particle number preserved");
        acc += psi[j] * psi[i];
    }
    Ok(acc)
}

/// Carries a hard-core vector to the spin sector along the dictionary.
pub fn transport<T: Scalar>(dict: &Dictionary, phi: &[T]) -> Result<Vec<T>> {
    if phi.len() != dict.forward.len() {
        return Err(Error::SizeMismatch(format!(
            "vector of length {} for dimension {}",
            phi.len(),
            dict.forward.len()
        )));
    }
    let mut out = vec![T::zero(); phi.len()];
    for (x, &v) in phi.iter().enumerate() {
        out[dict.forward[x]] = v;
    }
    Ok(out)
}
