//! Hard-core configuration spaces on a finite interval of the chain.
//!
//! A configuration of `n` hard-core particles is a strictly increasing list
//! of occupied sites. The space of all of them is enumerated in
//! lexicographic order of the site lists; that order fixes the basis
//! ordinals used by every operator and every output file.

mod distance;
mod envelope;
mod summability;

use std::fmt;

pub use distance::{dbar, dist_d, l1_distance, ClusterGeometry};
pub use envelope::{envelope_f, sum_f_over_windows, DecayEnvelope, EnvelopeCase, WindowSum};
pub use summability::{
    b2_radius, b2_tail_bound, brute_sum_b2, c_infinity, c_infinity_tail_bound,
    c_infinity_truncated, B2Sum, C_INFINITY_DEFAULT_TRUNCATION,
};

use crate::error::{Error, Result};

/// Largest lattice for which basis ranks fit the binomial table.
pub const MAX_SITES: usize = 4096;

/// A finite interval `[lo, hi]` of lattice sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Lattice {
    lo: i64,
    hi: i64,
}

impl Lattice {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if hi < lo {
            return Err(Error::InvalidParameter(format!(
                "empty lattice [{lo}, {hi}]"
            )));
        }
        let len = (hi - lo + 1) as usize;
        if len > MAX_SITES {
            return Err(Error::InvalidParameter(format!(
                "lattice of {len} sites exceeds the {MAX_SITES}-site limit"
            )));
        }
        Ok(Self { lo, hi })
    }

    /// `Λ = [-L, L]`.
    pub fn symmetric(half_width: usize) -> Result<Self> {
        let l = half_width as i64;
        Self::new(-l, l)
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, site: i64) -> bool {
        site >= self.lo && site <= self.hi
    }

    pub fn contains_lattice(&self, other: &Lattice) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn sites(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }

    /// All subintervals with at least `min_len` sites, ordered by left end
    /// then right end.
    pub fn subintervals(&self, min_len: usize) -> Vec<Lattice> {
        let mut out = Vec::new();
        for a in self.lo..=self.hi {
            for b in a..=self.hi {
                if (b - a + 1) as usize >= min_len {
                    out.push(Lattice { lo: a, hi: b });
                }
            }
        }
        out
    }
}

/// A connected set of sites, used for the `U`, `V` windows of two-point
/// quantities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SiteWindow {
    pub lo: i64,
    pub hi: i64,
}

impl SiteWindow {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if hi < lo {
            return Err(Error::Windows(format!("empty window [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, site: i64) -> bool {
        site >= self.lo && site <= self.hi
    }

    /// `min |u - v|` over the two windows; zero when they intersect.
    pub fn distance(&self, other: &SiteWindow) -> i64 {
        if self.hi < other.lo {
            other.lo - self.hi
        } else if other.hi < self.lo {
            self.lo - other.hi
        } else {
            0
        }
    }

    pub fn overlaps(&self, other: &SiteWindow) -> bool {
        !(self.hi < other.lo || other.hi < self.lo)
    }
}

impl fmt::Display for SiteWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// A hard-core configuration: strictly increasing occupied sites.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    sites: Vec<i64>,
}

impl Configuration {
    pub fn new(sites: Vec<i64>) -> Result<Self> {
        if sites.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfiguration(format!(
                "sites {sites:?} are not strictly increasing"
            )));
        }
        Ok(Self { sites })
    }

    /// The droplet `{first, first + 1, ..., first + n - 1}`.
    pub fn droplet(first: i64, n: usize) -> Self {
        Self {
            sites: (0..n as i64).map(|k| first + k).collect(),
        }
    }

    pub fn sites(&self) -> &[i64] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn first(&self) -> i64 {
        self.sites[0]
    }

    pub fn last(&self) -> i64 {
        self.sites[self.sites.len() - 1]
    }

    pub fn contains(&self, site: i64) -> bool {
        self.sites.binary_search(&site).is_ok()
    }

    /// Number of maximal blocks of consecutive occupied sites.
    pub fn cluster_count(&self) -> usize {
        cluster_count(&self.sites)
    }

    pub fn is_clustered(&self) -> bool {
        self.cluster_count() == 1
    }

    pub fn meets(&self, window: &SiteWindow) -> bool {
        self.sites.iter().any(|&s| window.contains(s))
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, s) in self.sites.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "}}")
    }
}

/// Number of maximal blocks of consecutive sites in a sorted list.
pub fn cluster_count(sites: &[i64]) -> usize {
    if sites.is_empty() {
        return 0;
    }
    1 + sites.windows(2).filter(|w| w[1] - w[0] > 1).count()
}

/// Which cluster sectors an index set covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SectorMode {
    /// `P^(k)`: exactly `k` clusters.
    Exactly,
    /// `Q^(k)`: at least `k` clusters.
    AtLeast,
}

/// The enumerated configuration space `X_Λ^n` with its cluster-sector
/// partition.
#[derive(Debug, Clone)]
pub struct ConfigSpace {
    lattice: Lattice,
    n: usize,
    configs: Vec<Configuration>,
    /// `binom[m][r] = binomial(m, r)` for `m ≤ |Λ|`, `r ≤ n`, saturating.
    binom: Vec<Vec<u64>>,
    sector: Vec<usize>,
    clustered: Vec<usize>,
}

impl ConfigSpace {
    /// `n` particles on `Λ = [-L, L]`.
    pub fn new(half_width: usize, n: usize) -> Result<Self> {
        Self::on_lattice(Lattice::symmetric(half_width)?, n)
    }

    /// `n` particles on an arbitrary interval, e.g. a subvolume of `Λ`.
    pub fn on_lattice(lattice: Lattice, n: usize) -> Result<Self> {
        let sites = lattice.len();
        if n < 1 || n > sites {
            return Err(Error::ParticleCount { n, sites });
        }
        let binom: Vec<Vec<u64>> = (0..=sites)
            .map(|m| {
                (0..=n)
                    .map(|r| u64::try_from(binomial(m, r)).unwrap_or(u64::MAX))
                    .collect()
            })
            .collect();
        let total = binom[sites][n];
        if total > usize::MAX as u64 / 64 {
            return Err(Error::Capacity {
                dim: total as usize,
                cap: usize::MAX / 64,
            });
        }
        let mut configs = Vec::with_capacity(total as usize);
        let mut sector = Vec::new();
        let mut clustered = Vec::new();
        // Lexicographic combinations of offsets 0..sites.
        let mut pick: Vec<usize> = (0..n).collect();
        loop {
            let list: Vec<i64> = pick.iter().map(|&p| lattice.lo + p as i64).collect();
            let k = cluster_count(&list);
            if k == 1 {
                clustered.push(configs.len());
            }
            sector.push(k);
            configs.push(Configuration { sites: list });

            let mut i = n;
            while i > 0 && pick[i - 1] == sites - n + i - 1 {
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
        Ok(Self {
            lattice,
            n,
            configs,
            binom,
            sector,
            clustered,
        })
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn configs(&self) -> &[Configuration] {
        &self.configs
    }

    pub fn config(&self, i: usize) -> &Configuration {
        &self.configs[i]
    }

    pub fn index_of(&self, x: &Configuration) -> Option<usize> {
        if x.len() != self.n || !x.sites.iter().all(|&s| self.lattice.contains(s)) {
            return None;
        }
        Some(self.rank(&x.sites))
    }

    /// Lexicographic rank of a valid sorted site list.
    ///
    /// Lists that agree with `x` before position `i` and have a smaller
    /// entry there are counted with the hockey-stick identity, giving
    /// `Σ_i binom(N - 1 - a_{i-1}, n - i + 1) - binom(N - a_i, n - i + 1)`
    /// in offsets `a` with `a_0 = -1`.
    fn rank(&self, sites: &[i64]) -> usize {
        let big_n = self.lattice.len() as i64;
        let n = self.n;
        let mut prev = -1i64;
        let mut r = 0u64;
        for (i, &s) in sites.iter().enumerate() {
            let a = s - self.lattice.lo;
            let k = n - i;
            r += self.binom[(big_n - 1 - prev) as usize][k] - self.binom[(big_n - a) as usize][k];
            prev = a;
        }
        r as usize
    }

    /// Like [`index_of`](Self::index_of) but reports why a configuration is
    /// not part of the space.
    pub fn require(&self, x: &Configuration) -> Result<usize> {
        if x.len() != self.n {
            return Err(Error::ParticleMismatch {
                left: x.len(),
                right: self.n,
            });
        }
        self.index_of(x).ok_or_else(|| {
            Error::InvalidConfiguration(format!(
                "{x} does not lie in [{}, {}]",
                self.lattice.lo, self.lattice.hi
            ))
        })
    }

    /// Cluster count of the configuration with ordinal `i`.
    pub fn sector(&self, i: usize) -> usize {
        self.sector[i]
    }

    pub fn is_clustered(&self, i: usize) -> bool {
        self.sector[i] == 1
    }

    /// Ordinals of the fully clustered configurations, ordered by first site.
    pub fn clustered(&self) -> &[usize] {
        &self.clustered
    }

    /// Sizes of the exactly-`k` sectors for `k = 1..=n`.
    pub fn sector_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.n];
        for &k in &self.sector {
            sizes[k - 1] += 1;
        }
        sizes
    }

    /// Ordinals with exactly or at least `k` clusters, ascending.
    pub fn sector_indices(&self, k: usize, mode: SectorMode) -> Result<Vec<usize>> {
        if k < 1 || k > self.n {
            return Err(Error::Sector { k, n: self.n });
        }
        Ok((0..self.len())
            .filter(|&i| match mode {
                SectorMode::Exactly => self.sector[i] == k,
                SectorMode::AtLeast => self.sector[i] >= k,
            })
            .collect())
    }

    /// Largest cluster count realized in this space.
    pub fn max_clusters(&self) -> usize {
        self.sector.iter().copied().max().unwrap_or(0)
    }

    /// Ordinals of configurations at ℓ¹-distance one, i.e. reachable by a
    /// single hop to an empty neighboring site.
    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        let sites = &self.configs[i].sites;
        let n = sites.len();
        let mut out = Vec::with_capacity(2 * n);
        let mut buf = sites.clone();
        for j in 0..n {
            let s = sites[j];
            let left_free = if j == 0 {
                s > self.lattice.lo
            } else {
                sites[j - 1] < s - 1
            };
            let right_free = if j + 1 == n {
                s < self.lattice.hi
            } else {
                sites[j + 1] > s + 1
            };
            if left_free {
                buf[j] = s - 1;
                out.push(self.rank(&buf));
            }
            if right_free {
                buf[j] = s + 1;
                out.push(self.rank(&buf));
            }
            buf[j] = s;
        }
        out
    }

    /// ℓ¹ distance between two ordinals.
    pub fn d(&self, i: usize, j: usize) -> i64 {
        self.configs[i]
            .sites
            .iter()
            .zip(&self.configs[j].sites)
            .map(|(a, b)| (a - b).abs())
            .sum()
    }

    /// Whether configuration `i` has a particle in `window`.
    pub fn meets(&self, i: usize, window: &SiteWindow) -> bool {
        self.configs[i].meets(window)
    }

    /// Whether site `site` is occupied in configuration `i`.
    pub fn occupied(&self, i: usize, site: i64) -> bool {
        self.configs[i].contains(site)
    }

    /// The ordinal obtained by moving the particle at `from` to the empty
    /// site `to`, if both moves are legal.
    pub fn moved(&self, i: usize, from: i64, to: i64) -> Option<usize> {
        if !self.occupied(i, from)
            || !self.lattice.contains(to)
            || (from != to && self.occupied(i, to))
        {
            return None;
        }
        let mut sites: Vec<i64> = self.configs[i]
            .sites
            .iter()
            .map(|&s| if s == from { to } else { s })
            .collect();
        sites.sort_unstable();
        Some(self.rank(&sites))
    }
}

/// `binomial(n, k)` in `u128`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}
