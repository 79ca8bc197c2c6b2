//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines always reach stdout. The
//! process fails when a criterion fails, except for criteria listed as
//! unattainable whose failure mode is re-derived and confirmed here.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use droplet_core::bounds::{
    ct_block_norms, ct_constant, ct_verify, semigroup_check, threshold_check, CtParams,
};
use droplet_core::configspace::{
    b2_radius, brute_sum_b2, c_infinity, sum_f_over_windows, ConfigSpace, DecayEnvelope, Lattice,
};
use droplet_core::export::{correlator_table, decay_table, spectrum_table, sweep_table, Table};
use droplet_core::mc::{
    estimate_correlator_decay, fractional_moment_probe, ols, screened_diagonal_average,
    window_correlator_average, DecayReport, McEstimate, McPlan, Separation,
};
use droplet_core::operators::{build_hamiltonian, droplet_band, verify_prop_a1};
use droplet_core::spectral::{diagonalize, lowest_eigenpairs, LowestOptions};
use droplet_core::xxz::{empty_sector_residual, equivalence_residual};
use droplet_core::{
    Configuration, DisorderLaw, DisorderRealization, EnergyWindow, ModelParams, SiteWindow,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

mod common;

const XXZ_TOL: f64 = 1e-10;
const THRESHOLD_TOL: f64 = 1e-9;
const CT_REFERENCE: f64 = 0.730_473_800_8;
const CT_REFERENCE_TOL: f64 = 5e-11;
const BLOCK_TOL: f64 = 1e-10;
const CORRELATOR_TOL: f64 = 1e-10;
const SEMIGROUP_TOL: f64 = 1e-9;
const SLOPE_TOL: f64 = 0.15;
const BAND_TOL: f64 = 1e-6;
const FINITE_SIZE_TOL: f64 = 1e-2;
const EXTREME_TOL: f64 = 1e-3;
const SUM_RTOL: f64 = 1e-12;

/// Criteria that cannot be met as stated; see the diagnosis in each check.
const UNATTAINABLE: [u8; 2] = [9, 11];

struct Outcome {
    pass: bool,
    detail: String,
    /// For unattainable criteria: whether the documented failure mode was
    /// reproduced.
    diagnosis: Option<bool>,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
            diagnosis: None,
        }
    }
}

fn uniform() -> DisorderLaw {
    DisorderLaw::uniform(1.0).expect("valid law")
}

fn within(elapsed: Duration, budget_s: u64) -> bool {
    elapsed < Duration::from_secs(budget_s)
}

fn timed(budget_s: u64, f: impl FnOnce() -> Outcome) -> Outcome {
    let t = Instant::now();
    let mut o = f();
    let el = t.elapsed();
    o.pass &= within(el, budget_s);
    o.detail = format!("{} [{:.1} s of {budget_s} s]", o.detail, el.as_secs_f64());
    o
}

fn criterion_1() -> Outcome {
    timed(60, || {
        let mut worst = 0.0f64;
        let mut cases = 0;
        for nsites in 1..=8usize {
            let lattice = Lattice::new(1, nsites as i64).unwrap();
            for g in [1.5, 2.0, 4.0] {
                for r in 0..20u64 {
                    let w = uniform().sample(lattice, 1000 + nsites as u64, r);
                    let lambda = 1.0 + r as f64 / 4.0;
                    worst = worst.max(empty_sector_residual(nsites, g, lambda, &w).unwrap());
                    cases += 1;
                    for n in 1..=nsites {
                        let space = ConfigSpace::on_lattice(lattice, n).unwrap();
                        worst = worst.max(equivalence_residual(&space, g, lambda, &w).unwrap());
                        cases += 1;
                    }
                }
            }
        }
        Outcome::new(
            worst <= XXZ_TOL,
            format!("max residual {worst:.3e} over {cases} sectors (tol {XXZ_TOL:e})"),
        )
    })
}

fn criterion_2() -> Outcome {
    timed(30, || {
        let mut bad = Vec::new();
        let mut cases = 0;
        for l in 0..=5usize {
            for n in 1..=2 * l + 1 {
                let r = verify_prop_a1(&ConfigSpace::new(l, n).unwrap()).unwrap();
                cases += 1;
                if !r.is_exact() {
                    bad.push((l, n, r.cluster, r.adjacency));
                }
            }
        }
        Outcome::new(
            bad.is_empty(),
            format!("{cases} spaces, nonzero residuals: {bad:?}"),
        )
    })
}

fn criterion_3() -> Outcome {
    timed(120, || {
        let mut worst = f64::INFINITY;
        let mut rows = 0;
        for l in 0..=5usize {
            for n in 1..=2 * l + 1 {
                let space = ConfigSpace::new(l, n).unwrap();
                for g in [1.5, 2.0, 4.0] {
                    for r in 0..20u64 {
                        let lambda = [0.0, 0.5, 2.0, 10.0][r as usize % 4];
                        let w =
                            uniform().sample(space.lattice(), 3000 + 16 * l as u64 + n as u64, r);
                        for row in
                            threshold_check(&space, &ModelParams::new(g, lambda).unwrap(), &w)
                                .unwrap()
                        {
                            worst = worst.min(row.min_eigenvalue - row.threshold);
                            rows += 1;
                        }
                    }
                }
            }
        }
        Outcome::new(
            worst >= -THRESHOLD_TOL,
            format!("min over {rows} sectors of (min spec H^(k) - 2k(g-1)) = {worst:.3e}"),
        )
    })
}

fn ct_grid() -> Vec<(usize, usize)> {
    (1..=5usize)
        .flat_map(|l| [2usize, 3, 4].into_iter().map(move |n| (l, n)))
        .filter(|&(l, n)| n <= 2 * l + 1)
        .collect()
}

fn criterion_4() -> Outcome {
    timed(300, || {
        let p = CtParams::new(4.0, 0.1, 0.0).unwrap();
        let c_t = ct_constant(&p);
        let pinned = (c_t - CT_REFERENCE).abs() <= CT_REFERENCE_TOL;
        let mut worst = 0.0f64;
        let mut violations = 0;
        let mut runs = 0;
        for (l, n) in ct_grid() {
            let space = ConfigSpace::new(l, n).unwrap();
            for lambda in [0.0, 1.0, 5.0] {
                let params = ModelParams::new(4.0, lambda).unwrap();
                for r in 0..50u64 {
                    let w = uniform().sample(space.lattice(), 4000 + 8 * l as u64 + n as u64, r);
                    let rep = ct_verify(&space, &params, &w, &p).unwrap();
                    worst = worst.max(rep.worst_ratio);
                    violations += usize::from(!rep.holds());
                    runs += 1;
                }
            }
        }
        Outcome::new(
            pinned && violations == 0,
            format!("C_T = {c_t:.10} (reference {CT_REFERENCE}), worst |G|e^(mu_T d) = {worst:.6}, {violations} violations in {runs} runs"),
        )
    })
}

fn criterion_5() -> Outcome {
    timed(300, || {
        let p = CtParams::new(4.0, 0.1, 0.0).unwrap();
        let mut blocks = 0;
        let mut bad = 0;
        let mut margin = f64::INFINITY;
        for (l, n) in ct_grid() {
            let space = ConfigSpace::new(l, n).unwrap();
            let ys = [0, space.len() / 2, space.len() - 1];
            for lambda in [0.0, 1.0, 5.0] {
                let params = ModelParams::new(4.0, lambda).unwrap();
                for r in 0..5u64 {
                    let w = uniform().sample(space.lattice(), 5000 + 8 * l as u64 + n as u64, r);
                    for &y in &ys {
                        for b in ct_block_norms(&space, &params, &w, &p, space.config(y)).unwrap() {
                            blocks += 1;
                            bad += usize::from(!b.holds(BLOCK_TOL));
                            margin = margin.min(b.bound - b.norm);
                        }
                    }
                }
            }
        }
        Outcome::new(
            bad == 0,
            format!("{blocks} blocks, {bad} above bound, min slack {margin:.3e}"),
        )
    })
}

fn criterion_6() -> Outcome {
    timed(120, || {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let spaces = [
            ConfigSpace::new(3, 3).unwrap(),
            ConfigSpace::new(4, 2).unwrap(),
            ConfigSpace::new(2, 3).unwrap(),
        ];
        let mut cs_worst = f64::NEG_INFINITY;
        let mut diag_worst = 0.0f64;
        let mut above_one = 0;
        let mut probes = 0;
        for r in 0..20u64 {
            let space = &spaces[r as usize % spaces.len()];
            let w = uniform().sample(space.lattice(), 6000, r);
            let lambda: f64 = rng.random_range(0.0..10.0);
            let h = build_hamiltonian(space, &ModelParams::new(2.0, lambda).unwrap(), &w).unwrap();
            let sd = diagonalize(&h).unwrap();
            for _ in 0..50 {
                let lo = rng.random_range(0.0..15.0);
                let window = EnergyWindow::new(lo, lo + rng.random_range(0.0..10.0)).unwrap();
                let x = rng.random_range(0..space.len());
                let y = rng.random_range(0..space.len());
                let q = |a, b| -> f64 { sd.eigenfunction_correlator(a, b, &window) };
                cs_worst = cs_worst.max(q(x, y) - (q(x, x) * q(y, y)).sqrt());
                let direct: f64 = (0..sd.dim())
                    .filter(|&k| window.contains(sd.values()[k]))
                    .map(|k| sd.amplitude(k, x).powi(2))
                    .sum();
                diag_worst = diag_worst.max((q(x, x) - direct).abs());
                above_one += usize::from(q(x, x) > 1.0 + CORRELATOR_TOL);
                probes += 1;
            }
        }
        Outcome::new(
            cs_worst <= CORRELATOR_TOL && diag_worst <= CORRELATOR_TOL && above_one == 0,
            format!("{probes} probes: max CS excess {cs_worst:.2e}, max |Q(x,x) - <x,P_I x>| {diag_worst:.2e}, Q(x,x) > 1: {above_one}"),
        )
    })
}

fn sweep_plan(n: usize) -> McPlan {
    McPlan {
        realizations: 200,
        seed_root: 7_000,
        law: uniform(),
        half_width: 6,
        n,
        g: 2.0,
        lambda: 20.0,
        window: EnergyWindow::new(0.0, 20.0).unwrap(),
        s: 0.5,
        mu: 0.05,
        mu_t: 0.1,
    }
}

/// `E[Q(x, x, I)]` for the centred droplet, `n = 2..5`.
fn n_sweep() -> (Vec<(usize, McEstimate)>, String) {
    let mut out = Vec::new();
    let mut t = Table::new(&["n", "mean", "stderr", "count"]);
    for n in 2..=5 {
        let x = Configuration::droplet(-(n as i64 / 2), n);
        let e = screened_diagonal_average(&sweep_plan(n), &x).unwrap();
        t.push(vec![
            n.to_string(),
            format!("{:.16e}", e.mean),
            format!("{:.16e}", e.stderr),
            e.count.to_string(),
        ])
        .unwrap();
        out.push((n, e));
    }
    (out, t.to_csv().unwrap())
}

fn criterion_7(csv: &mut Vec<(String, String)>) -> Outcome {
    timed(600, || {
        // Semigroup bound, per realization, on dense spectra.
        let mut excess = f64::NEG_INFINITY;
        let mut checks = 0;
        for n in 2..=5usize {
            let plan = sweep_plan(n);
            let space = plan.space().unwrap();
            let x = space
                .require(&Configuration::droplet(-(n as i64 / 2), n))
                .unwrap();
            let count = if n <= 3 { plan.realizations } else { 4 };
            for r in 0..count {
                let w = plan.realization(r).unwrap();
                let sd =
                    diagonalize(&build_hamiltonian(&space, &plan.params().unwrap(), &w).unwrap())
                        .unwrap();
                for t in [0.5, 1.0, 2.0] {
                    let rep = semigroup_check(&sd, x, &plan.window, t).unwrap();
                    excess = excess.max(rep.correlator - rep.bound);
                    checks += 1;
                }
            }
        }
        let (sweep, body) = n_sweep();
        csv.push(("n_sweep".into(), body));
        let decreasing = sweep.windows(2).all(|p| p[1].1.mean < p[0].1.mean);
        let positive = sweep.iter().all(|(_, e)| e.mean > 0.0);
        let c = if positive {
            let xs: Vec<f64> = sweep.iter().map(|(n, _)| *n as f64).collect();
            let ys: Vec<f64> = sweep.iter().map(|(_, e)| e.mean.ln()).collect();
            -ols(&xs, &ys).unwrap().slope
        } else {
            f64::NAN
        };
        let means: Vec<String> = sweep
            .iter()
            .map(|(n, e)| format!("n={n}: {:.3e}", e.mean))
            .collect();
        Outcome::new(
            excess <= SEMIGROUP_TOL && decreasing && c > 0.0,
            format!(
                "{checks} semigroup checks, max excess {excess:.2e}; E[Q] {}; fitted c = {c:.3}",
                means.join(", ")
            ),
        )
    })
}

/// `E|G(x, x; 0)|^{1/2}` for the centred droplet over a log grid in `λ`.
fn lambda_sweep() -> (Vec<(f64, McEstimate)>, String) {
    let x = Configuration::droplet(-1, 3);
    let points: Vec<(f64, McEstimate)> = (0..5)
        .map(|k| {
            let lambda = 10f64.powf(1.0 + k as f64 / 4.0);
            let plan = McPlan {
                realizations: 500,
                seed_root: 8_000,
                law: uniform(),
                half_width: 3,
                n: 3,
                g: 2.0,
                lambda,
                window: EnergyWindow::new(0.0, 1.0).unwrap(),
                s: 0.5,
                mu: 0.05,
                mu_t: 0.1,
            };
            (
                lambda,
                fractional_moment_probe(&plan, &x, &x, 0.0, None, 0).unwrap(),
            )
        })
        .collect();
    let body = sweep_table(&points).unwrap().to_csv().unwrap();
    (points, body)
}

fn criterion_8(csv: &mut Vec<(String, String)>) -> Outcome {
    timed(600, || {
        let (points, body) = lambda_sweep();
        csv.push(("lambda_sweep".into(), body));
        let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.1.mean.ln()).collect();
        let fit = ols(&xs, &ys).unwrap();
        let (lo, hi) = fit.slope_ci(0.95).unwrap();
        Outcome::new(
            (fit.slope + 0.5).abs() <= SLOPE_TOL,
            format!(
                "slope {:.4} (95% CI [{lo:.4}, {hi:.4}]) against -s = -0.5 +- {SLOPE_TOL}",
                fit.slope
            ),
        )
    })
}

fn decay_plan(g: f64, hi: f64, lambda: f64, realizations: usize) -> McPlan {
    McPlan {
        realizations,
        seed_root: 9_000,
        law: uniform(),
        half_width: 6,
        n: 3,
        g,
        lambda,
        window: EnergyWindow::new(0.0, hi).unwrap(),
        s: 0.5,
        mu: 0.05,
        mu_t: 0.1,
    }
}

fn window_sweep(plan: &McPlan) -> Vec<McEstimate> {
    let u = SiteWindow::new(-6, -5).unwrap();
    [(-3, -2), (-1, 0), (1, 2)]
        .iter()
        .map(|&(a, b)| {
            window_correlator_average(plan, &u, &SiteWindow::new(a, b).unwrap()).unwrap()
        })
        .collect()
}

fn supplementary_decay() -> (DecayReport, String) {
    let rep = estimate_correlator_decay(
        &decay_plan(8.0, 18.5, 1.0, 100),
        Separation::ClusteredFirstSite,
    )
    .unwrap();
    let body = decay_table(&rep).unwrap().to_csv().unwrap();
    (rep, body)
}

fn criterion_9(csv: &mut Vec<(String, String)>) -> Outcome {
    let mut o = timed(600, || {
        let plan = decay_plan(4.0, 1.0, 1e3, 100);
        let rep = estimate_correlator_decay(&plan, Separation::ClusteredFirstSite).unwrap();
        csv.push((
            "decay_g4".into(),
            decay_table(&rep).unwrap().to_csv().unwrap(),
        ));
        let theorem = match &rep.fit {
            Some(f) => f.mu_ci.0 > 0.0 && f.violations.is_empty(),
            None => false,
        };
        let mut wplan = plan.clone();
        wplan.realizations = 50;
        let q = window_sweep(&wplan);
        let corollary = q.windows(2).all(|p| p[1].mean < p[0].mean);
        let mut o = Outcome::new(
            theorem && corollary,
            format!(
                "fit: {}; E[q(U,V)] at dist 2, 4, 6: {:.3e}, {:.3e}, {:.3e}",
                rep.fit.as_ref().map_or(
                    "none (fewer than two positive means)".to_string(),
                    |f| format!(
                        "mu_fit {:.3} CI ({:.3}, {:.3}), {} violations",
                        f.mu_fit,
                        f.mu_ci.0,
                        f.mu_ci.1,
                        f.violations.len()
                    )
                ),
                q[0].mean,
                q[1].mean,
                q[2].mean
            ),
        );
        // Documented failure mode: the spectrum starts at 2(g-1) = 6 > sup I,
        // so every correlator over I vanishes identically.
        let floor = 2.0 * (plan.g - 1.0);
        o.diagnosis = Some(
            floor > plan.window.hi()
                && rep.rows.iter().all(|r| r.estimate.max == 0.0)
                && q.iter().all(|e| e.max == 0.0),
        );
        o
    });
    // The same estimator where the admissible window meets the spectrum.
    let (rep, body) = supplementary_decay();
    csv.push(("decay_g8".into(), body));
    let mut q_plan = decay_plan(8.0, 18.5, 1.0, 50);
    q_plan.seed_root += 1;
    let q = window_sweep(&q_plan);
    if let Some(f) = &rep.fit {
        o.detail.push_str(&format!(
            "\n    info: g=8, I=[0,18.5], lambda=1: mu_fit {:.3} CI ({:.3}, {:.3}), {} violations; E[q(U,V)] {:.3e} > {:.3e} > {:.3e}: {}",
            f.mu_fit,
            f.mu_ci.0,
            f.mu_ci.1,
            f.violations.len(),
            q[0].mean,
            q[1].mean,
            q[2].mean,
            q.windows(2).all(|p| p[1].mean < p[0].mean)
        ));
    }
    o
}

fn criterion_10() -> Outcome {
    timed(120, || {
        let mut notes = Vec::new();
        let mut ok = true;
        let mut spaces = 0;
        for l in 0..=3usize {
            for n in 1..=(2 * l + 1).min(4) {
                spaces += 1;
                if let Err(e) = common::exhaustive(&ConfigSpace::new(l, n).unwrap()) {
                    ok = false;
                    notes.push(format!("B.1 (L={l}, n={n}): {e}"));
                }
            }
        }
        for n in [2usize, 3] {
            spaces += 1;
            if let Err(e) = common::exhaustive(&ConfigSpace::new(4, n).unwrap()) {
                ok = false;
                notes.push(format!("B.1 (L=4, n={n}): {e}"));
            }
        }
        let mut worst_b2 = 0.0f64;
        for n in 1..=4usize {
            for mu in [0.5, 1.0, 2.0] {
                let radius = b2_radius(n, mu, 1e-12);
                let s = brute_sum_b2(n, mu, radius).unwrap();
                let ratio = (s.sum + s.tail_bound) / c_infinity(mu);
                worst_b2 = worst_b2.max(ratio);
                if ratio > 1.0 + SUM_RTOL {
                    ok = false;
                    notes.push(format!(
                        "B.2 n={n} mu={mu}: sum {} > C_inf {}",
                        s.sum,
                        c_infinity(mu)
                    ));
                }
            }
        }
        let mut worst_b3 = 0.0f64;
        for n in [2usize, 3, 4] {
            let space = ConfigSpace::new(4, n).unwrap();
            for mu in [0.5, 1.0, 2.0] {
                let env = DecayEnvelope::new(mu).unwrap();
                for (u, v) in [
                    ((-4, -1), (0, 4)),
                    ((-1, -1), (0, 0)),
                    ((-4, -3), (2, 4)),
                    ((0, 1), (2, 2)),
                ] {
                    let (u, v) = (
                        SiteWindow::new(u.0, u.1).unwrap(),
                        SiteWindow::new(v.0, v.1).unwrap(),
                    );
                    let s = sum_f_over_windows(&u, &v, &env, &space).unwrap();
                    let cap = s.c_mu * (n as f64 + 1.0);
                    worst_b3 = worst_b3.max(s.sum / cap);
                    if s.sum > s.bound * (1.0 + SUM_RTOL) || s.bound > cap * (1.0 + SUM_RTOL) {
                        ok = false;
                        notes.push(format!(
                            "B.3 n={n} mu={mu} {u}/{v}: sum {} bound {} cap {cap}",
                            s.sum, s.bound
                        ));
                    }
                }
            }
        }
        Outcome::new(
            ok,
            format!(
                "B.1 exhaustive on {spaces} spaces; max B.2 sum / C_inf = {worst_b2:.4}; max B.3 sum / (C_mu (n+1)) = {worst_b3:.4}{}",
                if notes.is_empty() { String::new() } else { format!("; {}", notes.join("; ")) }
            ),
        )
    })
}

fn criterion_11() -> Outcome {
    timed(300, || {
        let g: f64 = 2.0;
        let free: ModelParams<f64> = ModelParams::new(g, 0.0).unwrap();
        let space = ConfigSpace::new(200, 1).unwrap();
        let h =
            build_hamiltonian(&space, &free, &DisorderRealization::zero(space.lattice())).unwrap();
        let sd = diagonalize(&h).unwrap();
        let extremes =
            (sd.min() - 2.0).abs() <= EXTREME_TOL && (sd.max() - 6.0).abs() <= EXTREME_TOL;
        let mut detail = format!("n=1: [{:.6}, {:.6}]", sd.min(), sd.max());
        let mut in_outer = true;
        let mut in_delta = true;
        let mut diagnosis = true;
        for n in [2usize, 3] {
            let space = ConfigSpace::new(40, n).unwrap();
            let h = build_hamiltonian(&space, &free, &DisorderRealization::zero(space.lattice()))
                .unwrap();
            let k = space.lattice().len() - n + 1;
            let (spec, vecs) = lowest_eigenpairs(&h, k, LowestOptions::default()).unwrap();
            let band = droplet_band(g, n).unwrap();
            let (lo, hi) = (spec.values[0], spec.values[k - 1]);
            in_outer &= lo >= 2.0 * (g - 1.0) - BAND_TOL && hi <= 2.0 * (g + 1.0) + BAND_TOL;
            let outliers: Vec<usize> = (0..k)
                .filter(|&j| {
                    spec.values[j] < band.lo() - FINITE_SIZE_TOL
                        || spec.values[j] > band.hi() + FINITE_SIZE_TOL
                })
                .collect();
            in_delta &= outliers.is_empty();
            // Weight of each outlier on configurations within three sites of
            // an end of the chain.
            let lat = space.lattice();
            let edge: Vec<f64> = outliers
                .iter()
                .map(|&j| {
                    (0..space.len())
                        .filter(|&i| {
                            space.config(i).first() <= lat.lo() + 3
                                || space.config(i).last() >= lat.hi() - 3
                        })
                        .map(|i| vecs[(i, j)].powi(2))
                        .sum()
                })
                .collect();
            diagnosis &= edge.iter().all(|&w| w > 0.9);
            detail.push_str(&format!(
                "; n={n}: {k} lowest in [{lo:.6}, {hi:.6}], Delta = [{:.6}, {:.6}], {} outside Delta+-{FINITE_SIZE_TOL} (values {:?}, edge weights {:?})",
                band.lo(),
                band.hi(),
                outliers.len(),
                outliers.iter().map(|&j| format!("{:.6}", spec.values[j])).collect::<Vec<_>>(),
                edge.iter().map(|w| format!("{w:.3}")).collect::<Vec<_>>()
            ));
        }
        let mut o = Outcome::new(extremes && in_outer && in_delta, detail);
        // Documented failure mode: the only states outside Delta(n) are
        // droplets bound to an end of the chain.
        o.diagnosis = Some(extremes && in_outer && diagnosis);
        o
    })
}

fn fixed_tables() -> String {
    let space = ConfigSpace::new(3, 2).unwrap();
    let w = uniform().sample(space.lattice(), 12_000, 0);
    let sd =
        diagonalize(&build_hamiltonian(&space, &ModelParams::new(2.0, 3.0).unwrap(), &w).unwrap())
            .unwrap();
    let window = EnergyWindow::new(0.0, 10.0).unwrap();
    let pairs: Vec<(usize, usize)> = (0..space.len())
        .map(|i| (i, (3 * i + 1) % space.len()))
        .collect();
    spectrum_table(&sd).unwrap().to_csv().unwrap()
        + &correlator_table(&sd, &pairs, &window, 12_000)
            .unwrap()
            .to_csv()
            .unwrap()
}

fn criterion_12(first: &[(String, String)]) -> Outcome {
    timed(300, || {
        let mut second: Vec<(String, String)> = vec![
            ("n_sweep".into(), n_sweep().1),
            ("lambda_sweep".into(), lambda_sweep().1),
        ];
        second.push(("decay_g8".into(), supplementary_decay().1));
        let mut mismatched = Vec::new();
        for (name, body) in &second {
            match first.iter().find(|(n, _)| n == name) {
                Some((_, b)) if b == body => {}
                _ => mismatched.push(name.clone()),
            }
        }
        if fixed_tables() != fixed_tables() {
            mismatched.push("spectrum/correlator".into());
        }
        let bytes: usize = second.iter().map(|(_, b)| b.len()).sum();
        Outcome::new(
            mismatched.is_empty(),
            format!(
                "{} tables ({bytes} bytes) re-generated; mismatches: {mismatched:?}",
                second.len() + 1
            ),
        )
    })
}

fn main() -> ExitCode {
    let mut csv = Vec::new();
    let mut unexpected = false;
    let mut report = |id: u8, o: Outcome| {
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        let note = match (o.pass, o.diagnosis) {
            (false, Some(true)) if UNATTAINABLE.contains(&id) => {
                " (unattainable as stated; failure mode confirmed)"
            }
            (false, Some(false)) => " (failure mode differs from the documented one)",
            _ => "",
        };
        println!("criterion {id:>2}: {verdict}{note}: {}", o.detail);
        if !o.pass && !(UNATTAINABLE.contains(&id) && o.diagnosis == Some(true)) {
            unexpected = true;
        }
    };
    report(1, criterion_1());
    report(2, criterion_2());
    report(3, criterion_3());
    report(4, criterion_4());
    report(5, criterion_5());
    report(6, criterion_6());
    report(7, criterion_7(&mut csv));
    report(8, criterion_8(&mut csv));
    report(9, criterion_9(&mut csv));
    report(10, criterion_10());
    report(11, criterion_11());
    report(12, criterion_12(&csv));
    if unexpected {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
