//! The ℓ¹ configuration distance `d`, the through-the-droplet function
//! `d̄` and their minimum `D`.

use super::{ConfigSpace, Configuration};
use crate::error::{Error, Result};

/// `Σ_j |x_j - y_j|` under the increasing labeling.
pub fn l1_distance(x: &Configuration, y: &Configuration) -> Result<i64> {
    if x.len() != y.len() {
        return Err(Error::ParticleMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    Ok(x.sites()
        .iter()
        .zip(y.sites())
        .map(|(a, b)| (a - b).abs())
        .sum())
}

/// `d̄(x, y) = min over clustered w, v of d(x, w) + |w_1 - v_1| + d(v, y)`,
/// with the clustered configurations taken from `space`.
///
/// Not a metric: it is not definite and violates the triangle inequality.
pub fn dbar(x: &Configuration, y: &Configuration, space: &ConfigSpace) -> Result<i64> {
    check_same(x, y, space)?;
    let through: Vec<(i64, i64)> = space
        .clustered()
        .iter()
        .map(|&w| {
            let c = space.config(w);
            (
                c.first(),
                l1_distance(x, c).expect("checked particle number"),
            )
        })
        .collect();
    let back: Vec<(i64, i64)> = space
        .clustered()
        .iter()
        .map(|&v| {
            let c = space.config(v);
            (
                c.first(),
                l1_distance(c, y).expect("checked particle number"),
            )
        })
        .collect();
    let mut best = i64::MAX;
    for &(w1, a) in &through {
        for &(v1, b) in &back {
            best = best.min(a + (w1 - v1).abs() + b);
        }
    }
    Ok(best)
}

/// `D(x, y) = min{d(x, y), d̄(x, y)}`, a metric on the configuration space.
pub fn dist_d(x: &Configuration, y: &Configuration, space: &ConfigSpace) -> Result<i64> {
    Ok(l1_distance(x, y)?.min(dbar(x, y, space)?))
}

fn check_same(x: &Configuration, y: &Configuration, space: &ConfigSpace) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::ParticleMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() != space.n() {
        return Err(Error::ParticleMismatch {
            left: x.len(),
            right: space.n(),
        });
    }
    Ok(())
}

/// Precomputed distances from every configuration to the clustered set,
/// for evaluating `d̄` and the decay envelope over many pairs.
#[derive(Debug, Clone)]
pub struct ClusterGeometry {
    /// First site of each clustered configuration, ascending.
    firsts: Vec<i64>,
    /// Ordinals of the clustered configurations, aligned with `firsts`.
    ordinals: Vec<usize>,
    /// `to_cluster[x][w] = d(x, w)`.
    to_cluster: Vec<Vec<i64>>,
    /// `via_line[x][v] = min_w d(x, w) + |w_1 - v_1|`.
    via_line: Vec<Vec<i64>>,
}

impl ClusterGeometry {
    pub fn new(space: &ConfigSpace) -> Self {
        let ordinals = space.clustered().to_vec();
        let firsts: Vec<i64> = ordinals.iter().map(|&w| space.config(w).first()).collect();
        let to_cluster: Vec<Vec<i64>> = (0..space.len())
            .map(|x| ordinals.iter().map(|&w| space.d(x, w)).collect())
            .collect();
        let via_line = to_cluster
            .iter()
            .map(|row| {
                firsts
                    .iter()
                    .map(|&v1| {
                        row.iter()
                            .zip(&firsts)
                            .map(|(a, w1)| a + (w1 - v1).abs())
                            .min()
                            .unwrap_or(i64::MAX)
                    })
                    .collect()
            })
            .collect();
        Self {
            firsts,
            ordinals,
            to_cluster,
            via_line,
        }
    }

    /// Ordinals of clustered configurations.
    pub fn clustered(&self) -> &[usize] {
        &self.ordinals
    }

    pub fn firsts(&self) -> &[i64] {
        &self.firsts
    }

    /// `d(x, w)` for each clustered `w`, aligned with [`clustered`](Self::clustered).
    pub fn to_cluster(&self, x: usize) -> &[i64] {
        &self.to_cluster[x]
    }

    /// `d̄` between ordinals.
    pub fn dbar(&self, x: usize, y: usize) -> i64 {
        self.via_line[x]
            .iter()
            .zip(&self.to_cluster[y])
            .map(|(a, b)| a + b)
            .min()
            .unwrap_or(i64::MAX)
    }

    /// `D` between ordinals.
    pub fn dist_d(&self, space: &ConfigSpace, x: usize, y: usize) -> i64 {
        space.d(x, y).min(self.dbar(x, y))
    }
}
