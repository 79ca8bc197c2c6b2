//! Property checkers for the distance functions, shared by the randomized
//! and the exhaustive suites. Each returns a description of the first
//! counterexample it finds.
#![allow(dead_code)]

use droplet_core::configspace::{ClusterGeometry, ConfigSpace, SiteWindow};

pub type Check = Result<(), String>;

fn fail(what: &str, space: &ConfigSpace, idx: &[usize]) -> Check {
    let cfgs: Vec<String> = idx.iter().map(|&i| space.config(i).to_string()).collect();
    Err(format!("{what} fails at {}", cfgs.join(", ")))
}

/// `D` is a metric: definite, symmetric, triangle inequality through `z`.
pub fn metric(space: &ConfigSpace, geo: &ClusterGeometry, x: usize, y: usize, z: usize) -> Check {
    let d = |a, b| geo.dist_d(space, a, b);
    if (d(x, y) == 0) != (x == y) {
        return fail("definiteness", space, &[x, y]);
    }
    if d(x, y) != d(y, x) {
        return fail("symmetry", space, &[x, y]);
    }
    if d(x, y) > d(x, z) + d(z, y) {
        return fail("triangle inequality", space, &[x, z, y]);
    }
    Ok(())
}

/// On clustered pairs `d̄ = D = |x_1 - y_1|`.
pub fn clustered_pair(space: &ConfigSpace, geo: &ClusterGeometry, x: usize, y: usize) -> Check {
    if !(space.is_clustered(x) && space.is_clustered(y)) {
        return Ok(());
    }
    let first = (space.config(x).first() - space.config(y).first()).abs();
    if geo.dbar(x, y) != first || geo.dist_d(space, x, y) != first {
        return fail("clustered pair identity", space, &[x, y]);
    }
    Ok(())
}

/// For clustered `x`: `d̄(x, y) = D(x, y) = min_v |x_1 - v_1| + d(v, y)`.
pub fn clustered_source(space: &ConfigSpace, geo: &ClusterGeometry, x: usize, y: usize) -> Check {
    if !space.is_clustered(x) {
        return Ok(());
    }
    let x1 = space.config(x).first();
    let via = geo
        .clustered()
        .iter()
        .map(|&v| (x1 - space.config(v).first()).abs() + space.d(v, y))
        .min()
        .expect("clustered set is never empty");
    if geo.dbar(x, y) != via || geo.dist_d(space, x, y) != via {
        return fail("one-sided formula", space, &[x, y]);
    }
    Ok(())
}

/// For clustered `x, u`: `d̄(x, y) ≤ d̄(x, u) + d̄(u, y)`.
pub fn clustered_triangle(
    space: &ConfigSpace,
    geo: &ClusterGeometry,
    x: usize,
    u: usize,
    y: usize,
) -> Check {
    if !(space.is_clustered(x) && space.is_clustered(u)) {
        return Ok(());
    }
    if geo.dbar(x, y) > geo.dbar(x, u) + geo.dbar(u, y) {
        return fail("triangle through clustered u", space, &[x, u, y]);
    }
    Ok(())
}

/// For clustered `y` and any site `a ∈ w` with `a ≤ y_1`:
/// `d̄(w, y) ≥ y_1 - a`; mirrored for `b ∈ w` with `b ≥ y_n`.
pub fn one_sided_lower(space: &ConfigSpace, geo: &ClusterGeometry, w: usize, y: usize) -> Check {
    if !space.is_clustered(y) {
        return Ok(());
    }
    let (yc, wc) = (space.config(y), space.config(w));
    for &a in wc.sites() {
        if a <= yc.first() && geo.dbar(w, y) < yc.first() - a {
            return fail("left lower bound", space, &[w, y]);
        }
        if a >= yc.last() && geo.dbar(w, y) < a - yc.last() {
            return fail("right lower bound", space, &[w, y]);
        }
    }
    Ok(())
}

/// For `x` meeting `U` and `y` meeting `V` with disjoint windows:
/// `d̄(x, y) ≥ dist(U, V) - (n - 1)`.
pub fn window_separation(
    space: &ConfigSpace,
    geo: &ClusterGeometry,
    x: usize,
    y: usize,
    u: &SiteWindow,
    v: &SiteWindow,
) -> Check {
    if u.overlaps(v) || !space.meets(x, u) || !space.meets(y, v) {
        return Ok(());
    }
    if geo.dbar(x, y) < u.distance(v) - (space.n() as i64 - 1) {
        return fail("window separation", space, &[x, y]);
    }
    Ok(())
}

/// All windows inside the lattice of `space`.
pub fn windows(space: &ConfigSpace) -> Vec<SiteWindow> {
    let lat = space.lattice();
    let mut out = Vec::new();
    for lo in lat.lo()..=lat.hi() {
        for hi in lo..=lat.hi() {
            out.push(SiteWindow::new(lo, hi).expect("ordered"));
        }
    }
    out
}

/// Runs every property over all pairs and triples of `space` (and all
/// disjoint window pairs for the separation bound).
pub fn exhaustive(space: &ConfigSpace) -> Check {
    let geo = ClusterGeometry::new(space);
    let n = space.len();
    for x in 0..n {
        for y in 0..n {
            clustered_pair(space, &geo, x, y)?;
            clustered_source(space, &geo, x, y)?;
            one_sided_lower(space, &geo, x, y)?;
            for z in 0..n {
                metric(space, &geo, x, y, z)?;
                clustered_triangle(space, &geo, x, z, y)?;
            }
        }
    }
    let ws = windows(space);
    for u in &ws {
        for v in ws.iter().filter(|v| !u.overlaps(v)) {
            let xs: Vec<usize> = (0..n).filter(|&i| space.meets(i, u)).collect();
            let ys: Vec<usize> = (0..n).filter(|&i| space.meets(i, v)).collect();
            for &x in &xs {
                for &y in &ys {
                    window_separation(space, &geo, x, y, u, v)?;
                }
            }
        }
    }
    Ok(())
}
