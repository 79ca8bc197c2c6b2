use anyhow::{bail, Result};
use clap::Subcommand;
use droplet_core::bounds::{
    ct_block_norms, ct_verify, dynamical_bound_check, perturbative_correlator_check,
    resolvent_expansion_check, semigroup_check, threshold_check, CtParams,
};
use droplet_core::configspace::SectorMode;
use droplet_core::export::{band_table, decay_table, fmt_f64, sweep_table, Table};
use droplet_core::mc::{estimate_correlator_decay, fractional_moment_probe, McPlan, Separation};
use droplet_core::operators::build_hamiltonian;
use droplet_core::spectral::diagonalize;
use droplet_core::xxz::equivalence_residual;
use droplet_core::{
    ConfigSpace, Configuration, DisorderLaw, DisorderRealization, EnergyWindow, ModelParams,
};

use crate::config::Plan;

const CHECK_RTOL: f64 = 1e-9;
const XXZ_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Count configurations and cluster sectors.
    Enumerate,
    /// Eigenvalues per realization and droplet band edges.
    Spectrum,
    /// Eigenfunction correlators Q(x, y, I) from clustered x.
    Correlator,
    /// Monte-Carlo decay curve and lambda sweep.
    McRun,
    /// Combes-Thomas bound on the two-cluster resolvent.
    CtVerify,
    /// Residual of the XXZ dictionary.
    XxzCheck,
    /// Thresholds, block norms and correlator inequalities.
    BoundsReport,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Enumerate => "enumerate",
            Command::Spectrum => "spectrum",
            Command::Correlator => "correlator",
            Command::McRun => "mc-run",
            Command::CtVerify => "ct-verify",
            Command::XxzCheck => "xxz-check",
            Command::BoundsReport => "bounds-report",
        }
    }
}

/// Files to write, lines to print, and the number of failed certified
/// inequalities.
#[derive(Debug, Default)]
pub struct Report {
    pub files: Vec<(String, String)>,
    pub lines: Vec<String>,
    pub violations: usize,
}

impl Report {
    fn file(&mut self, name: &str, t: &Table) -> Result<()> {
        self.files.push((name.to_string(), t.to_csv()?));
        Ok(())
    }
}

struct Setup {
    space: ConfigSpace,
    law: DisorderLaw,
    window: EnergyWindow<f64>,
}

impl Setup {
    fn new(p: &Plan) -> Result<Self> {
        Ok(Self {
            space: ConfigSpace::new(p.half_width, p.n)?,
            law: DisorderLaw::by_name(&p.distribution, p.omega_max)?,
            window: EnergyWindow::new(p.window[0], p.window[1])?,
        })
    }

    fn field(&self, p: &Plan, r: usize) -> DisorderRealization {
        self.law.sample(self.space.lattice(), p.seed, r as u64)
    }
}

fn holds(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + CHECK_RTOL * (1.0 + rhs.abs())
}

pub fn run(cmd: Command, p: &Plan) -> Result<Report> {
    match cmd {
        Command::Enumerate => enumerate(p),
        Command::Spectrum => spectrum(p),
        Command::Correlator => correlator(p),
        Command::McRun => mc_run(p),
        Command::CtVerify => ct(p),
        Command::XxzCheck => xxz(p),
        Command::BoundsReport => bounds_report(p),
    }
}

fn enumerate(p: &Plan) -> Result<Report> {
    let space = ConfigSpace::new(p.half_width, p.n)?;
    let mut r = Report::default();
    r.lines.push(format!("configurations: {}", space.len()));
    let mut t = Table::new(&["k", "size"]);
    for (k, size) in (1..)
        .zip(space.sector_sizes())
        .filter(|&(_, size)| size > 0)
    {
        r.lines.push(format!("sector k={k}: {size}"));
        t.push(vec![k.to_string(), size.to_string()])?;
    }
    r.file("sectors.csv", &t)?;
    Ok(r)
}

fn spectrum(p: &Plan) -> Result<Report> {
    let s = Setup::new(p)?;
    let params = ModelParams::new(p.g, p.lambda)?;
    let mut r = Report::default();
    let mut t = Table::new(&["seed", "realization", "index", "energy"]);
    for i in 0..p.realizations {
        let sd = diagonalize(&build_hamiltonian(&s.space, &params, &s.field(p, i))?)?;
        let floor = 2.0 * (p.g - 1.0);
        if !holds(floor, sd.min()) {
            r.violations += 1;
            r.lines.push(format!(
                "realization {i}: lowest eigenvalue {} below 2(g-1) = {floor}",
                sd.min()
            ));
        }
        if i == 0 {
            r.lines.push(format!(
                "realization 0: spectrum in [{}, {}]",
                sd.min(),
                sd.max()
            ));
        }
        for (k, e) in sd.values().iter().enumerate() {
            t.push(vec![
                p.seed.to_string(),
                i.to_string(),
                k.to_string(),
                fmt_f64(*e),
            ])?;
        }
    }
    r.file("spectrum.csv", &t)?;
    let ns: Vec<usize> = (1..=p.n).collect();
    r.file("band_edges.csv", &band_table(&[p.g], &ns)?)?;
    Ok(r)
}

fn correlator(p: &Plan) -> Result<Report> {
    let s = Setup::new(p)?;
    let params = ModelParams::new(p.g, p.lambda)?;
    let mut r = Report::default();
    let mut t = Table::new(&[
        "seed",
        "realization",
        "x_index",
        "y_index",
        "window_lo",
        "window_hi",
        "value",
    ]);
    let mut excess = f64::NEG_INFINITY;
    for i in 0..p.realizations {
        let sd = diagonalize(&build_hamiltonian(&s.space, &params, &s.field(p, i))?)?;
        for &x in s.space.clustered() {
            let qxx = sd.eigenfunction_correlator(x, x, &s.window);
            for y in 0..s.space.len() {
                let q = sd.eigenfunction_correlator(x, y, &s.window);
                let cs = (qxx * sd.eigenfunction_correlator(y, y, &s.window)).sqrt();
                excess = excess.max(q - cs);
                if !holds(q, cs) {
                    r.violations += 1;
                }
                t.push(vec![
                    p.seed.to_string(),
                    i.to_string(),
                    x.to_string(),
                    y.to_string(),
                    fmt_f64(s.window.lo()),
                    fmt_f64(s.window.hi()),
                    fmt_f64(q),
                ])?;
            }
        }
    }
    r.lines.push(format!(
        "{} rows; max Q(x,y) - sqrt(Q(x,x) Q(y,y)) = {excess:.3e}",
        t.rows().len()
    ));
    r.file("correlator.csv", &t)?;
    Ok(r)
}

fn mc_plan(p: &Plan) -> Result<McPlan> {
    let plan = McPlan {
        realizations: p.realizations,
        seed_root: p.seed,
        law: DisorderLaw::by_name(&p.distribution, p.omega_max)?,
        half_width: p.half_width,
        n: p.n,
        g: p.g,
        lambda: p.lambda,
        window: EnergyWindow::new(p.window[0], p.window[1])?,
        s: p.s,
        mu: p.mu,
        mu_t: p.mu_t,
    };
    plan.validate()?;
    Ok(plan)
}

fn mc_run(p: &Plan) -> Result<Report> {
    let plan = mc_plan(p)?;
    let mut r = Report::default();
    let decay = estimate_correlator_decay(&plan, Separation::ClusteredFirstSite)?;
    r.file("decay.csv", &decay_table(&decay)?)?;
    let mut summary = Table::new(&["key", "value"]);
    summary.push(vec!["diagonal_mean".into(), fmt_f64(decay.diagonal.mean)])?;
    match &decay.fit {
        Some(f) => {
            r.lines.push(format!(
                "mu_fit = {:.6} (95% CI {:.6} .. {:.6}), C = {:.6e}, envelope violations: {}",
                f.mu_fit,
                f.mu_ci.0,
                f.mu_ci.1,
                f.c,
                f.violations.len()
            ));
            for (k, v) in [
                ("mu_fit", f.mu_fit),
                ("mu_ci_lo", f.mu_ci.0),
                ("mu_ci_hi", f.mu_ci.1),
                ("c", f.c),
                ("c_upper", f.c_upper),
            ] {
                summary.push(vec![k.into(), fmt_f64(v)])?;
            }
            summary.push(vec![
                "envelope_violations".into(),
                f.violations.len().to_string(),
            ])?;
        }
        None => r
            .lines
            .push("no decay fit: fewer than two separations with a positive mean".into()),
    }
    r.file("mc_summary.csv", &summary)?;

    let x = Configuration::droplet(-(p.n as i64 / 2), p.n);
    let base = if p.lambda > 0.0 { p.lambda } else { 1.0 };
    let mut points = Vec::new();
    for k in -2..=2 {
        let mut q = plan.clone();
        q.lambda = base * 2f64.powi(k);
        points.push((
            q.lambda,
            fractional_moment_probe(&q, &x, &x, p.energy, None, 0)?,
        ));
    }
    r.lines.push(format!(
        "lambda sweep of E|G(x,x;{})|^{}: {} points",
        p.energy,
        p.s,
        points.len()
    ));
    r.file("lambda_sweep.csv", &sweep_table(&points)?)?;
    Ok(r)
}

fn ct_params(p: &Plan) -> Result<CtParams<f64>> {
    Ok(CtParams::new(p.g, p.mu_t, p.energy)?)
}

fn ct(p: &Plan) -> Result<Report> {
    let cp = ct_params(p)?;
    if p.n < 2 {
        bail!("ct-verify needs n >= 2");
    }
    let s = Setup::new(p)?;
    let params = ModelParams::new(p.g, p.lambda)?;
    let mut r = Report::default();
    let mut t = Table::new(&[
        "seed",
        "realization",
        "L",
        "n",
        "g",
        "lambda",
        "mu_T",
        "energy",
        "c_t",
        "worst_ratio",
        "worst_x",
        "worst_y",
        "holds",
    ]);
    let mut worst = 0.0f64;
    for i in 0..p.realizations {
        let rep = ct_verify(&s.space, &params, &s.field(p, i), &cp)?;
        worst = worst.max(rep.worst_ratio);
        r.violations += usize::from(!rep.holds());
        let (wx, wy) = rep
            .worst_pair
            .map_or((String::new(), String::new()), |(a, b)| {
                (a.to_string(), b.to_string())
            });
        t.push(vec![
            p.seed.to_string(),
            i.to_string(),
            p.half_width.to_string(),
            p.n.to_string(),
            fmt_f64(p.g),
            fmt_f64(p.lambda),
            fmt_f64(p.mu_t),
            fmt_f64(p.energy),
            fmt_f64(rep.c_t),
            fmt_f64(rep.worst_ratio),
            wx,
            wy,
            rep.holds().to_string(),
        ])?;
    }
    r.lines.push(format!(
        "C_T = {:.10}; worst |G^(2)| e^(mu_T d) = {worst:.10}; violations: {}",
        droplet_core::bounds::ct_constant(&cp),
        r.violations
    ));
    r.file("ct_verify.csv", &t)?;
    Ok(r)
}

fn xxz(p: &Plan) -> Result<Report> {
    let s = Setup::new(p)?;
    let mut r = Report::default();
    let mut t = Table::new(&[
        "seed",
        "realization",
        "sites",
        "n",
        "g",
        "lambda",
        "residual",
        "holds",
    ]);
    let mut worst = 0.0f64;
    for i in 0..p.realizations {
        let res = equivalence_residual(&s.space, p.g, p.lambda, &s.field(p, i))?;
        worst = worst.max(res);
        let ok = res <= XXZ_TOL;
        r.violations += usize::from(!ok);
        t.push(vec![
            p.seed.to_string(),
            i.to_string(),
            s.space.lattice().len().to_string(),
            p.n.to_string(),
            fmt_f64(p.g),
            fmt_f64(p.lambda),
            fmt_f64(res),
            ok.to_string(),
        ])?;
    }
    r.lines.push(format!(
        "max residual of H - 2g H++ over {} realizations: {worst:.3e}",
        p.realizations
    ));
    r.file("xxz_check.csv", &t)?;
    Ok(r)
}

struct Rows {
    table: Table,
    seed: u64,
    failed: usize,
}

impl Rows {
    fn new(seed: u64) -> Self {
        Self {
            table: Table::new(&[
                "seed",
                "realization",
                "check",
                "k",
                "j",
                "l",
                "lhs",
                "rhs",
                "holds",
            ]),
            seed,
            failed: 0,
        }
    }

    fn push(
        &mut self,
        i: usize,
        check: &str,
        kjl: [Option<usize>; 3],
        lhs: f64,
        rhs: f64,
    ) -> Result<()> {
        let ok = holds(lhs, rhs);
        self.failed += usize::from(!ok);
        let cell = |v: Option<usize>| v.map_or(String::new(), |v| v.to_string());
        self.table.push(vec![
            self.seed.to_string(),
            i.to_string(),
            check.to_string(),
            cell(kjl[0]),
            cell(kjl[1]),
            cell(kjl[2]),
            fmt_f64(lhs),
            fmt_f64(rhs),
            ok.to_string(),
        ])?;
        Ok(())
    }
}

fn bounds_report(p: &Plan) -> Result<Report> {
    let s = Setup::new(p)?;
    let params = ModelParams::new(p.g, p.lambda)?;
    let space = &s.space;
    let ct = CtParams::new(p.g, p.mu_t, p.energy).ok();
    let window_ct = CtParams::new(p.g, p.mu_t, s.window.hi()).is_ok() && s.window.lo() >= 0.0;
    let mut r = Report::default();
    if ct.is_none() {
        r.lines
            .push("Combes-Thomas condition fails at the energy: block norms skipped".into());
    }
    if !window_ct {
        r.lines
            .push("window not inside [0, E(g, mu_T)): perturbative check skipped".into());
    }
    let free = (0..space.len()).find(|&i| !space.is_clustered(i));
    let clustered = space.sector_indices(1, SectorMode::Exactly)?;
    let mut rows = Rows::new(p.seed);
    for i in 0..p.realizations {
        let w = s.field(p, i);
        for row in threshold_check(space, &params, &w)? {
            rows.push(
                i,
                "threshold",
                [Some(row.k), None, None],
                row.threshold,
                row.min_eigenvalue,
            )?;
        }
        if let (Some(cp), true) = (&ct, p.n >= 2) {
            for b in ct_block_norms(space, &params, &w, cp, space.config(0))? {
                rows.push(
                    i,
                    "block_norm",
                    [Some(b.k), Some(b.j), Some(b.l)],
                    b.norm,
                    b.bound,
                )?;
            }
        }
        let h = build_hamiltonian(space, &params, &w)?;
        let sd = diagonalize(&h)?;
        let last = space.len() - 1;
        for t in [0.5, 1.0, 2.0] {
            let rep = semigroup_check(&sd, 0, &s.window, t)?;
            rows.push(i, "semigroup", [None; 3], rep.correlator, rep.bound)?;
        }
        let times: Vec<f64> = (0..=100).map(|k| k as f64 / 10.0).collect();
        let dyn_rep = dynamical_bound_check(&sd, 0, last, &s.window, &times)?;
        rows.push(
            i,
            "dynamical",
            [None; 3],
            dyn_rep.sup_amplitude,
            dyn_rep.correlator,
        )?;
        if let (Some(x), true) = (free, window_ct) {
            let rep = perturbative_correlator_check(&sd, space, p.g, p.mu_t, &s.window, x, last)?;
            rows.push(i, "perturbative", [None; 3], rep.lhs, rep.rhs)?;
        }
        if let Some(y) = free {
            if p.energy < 2.0 * (p.g - 1.0) {
                let rep = resolvent_expansion_check(&h, &clustered, clustered[0], y, p.energy)?;
                rows.push(i, "resolvent_expansion", [None; 3], rep.lhs, rep.rhs)?;
            }
        }
    }
    r.violations = rows.failed;
    r.lines.push(format!(
        "{} checks, {} failed",
        rows.table.rows().len(),
        rows.failed
    ));
    r.file("bounds_report.csv", &rows.table)?;
    Ok(r)
}
