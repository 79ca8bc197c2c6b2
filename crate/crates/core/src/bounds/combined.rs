use crate::configspace::{ClusterGeometry, ConfigSpace};
use crate::error::{Error, Result};
use crate::mc::{ols, student_t_quantile};

/// Exponent weights `s_1 + s_2 + s_3 = 1` of the combined envelope
/// `C e^{-s_1 c n} e^{-s_2 μ d̄(x, y)} F_{s_3 μ}(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeWeights {
    s1: f64,
    s2: f64,
    s3: f64,
}

impl EnvelopeWeights {
    pub fn new(s1: f64, s2: f64, s3: f64) -> Result<Self> {
        if [s1, s2, s3].iter().any(|&s| !(s >= 0.0)) || ((s1 + s2 + s3) - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "weights ({s1}, {s2}, {s3}) must be nonnegative and sum to 1"
            )));
        }
        Ok(Self { s1, s2, s3 })
    }

    pub fn get(&self) -> (f64, f64, f64) {
        (self.s1, self.s2, self.s3)
    }
}

/// One averaged correlator with the geometry the envelope needs.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopePoint {
    pub n: usize,
    pub dbar: f64,
    /// `F_μ(x, y) = Σ_k e^{-μ f_k}`.
    pub f_exponents: Vec<f64>,
    pub mean: f64,
    pub stderr: f64,
}

/// The exponents `f_k` with `F_μ(x, y) = Σ_k e^{-μ f_k}`.
pub fn envelope_exponents(
    space: &ConfigSpace,
    geo: &ClusterGeometry,
    x: usize,
    y: usize,
) -> Vec<f64> {
    let firsts = geo.firsts();
    let first = |i: usize| space.config(i).first();
    let one_sided = |free: usize, c1: i64| -> Vec<f64> {
        geo.to_cluster(free)
            .iter()
            .zip(firsts)
            .map(|(d, w1)| (d + (w1 - c1).abs()) as f64)
            .collect()
    };
    match (space.is_clustered(x), space.is_clustered(y)) {
        (true, true) => vec![(first(x) - first(y)).abs() as f64],
        (false, true) => one_sided(x, first(y)),
        (true, false) => one_sided(y, first(x)),
        (false, false) => {
            let (a, b) = (geo.to_cluster(x), geo.to_cluster(y));
            let mut out = Vec::with_capacity(firsts.len() * firsts.len());
            for (i, w1) in firsts.iter().enumerate() {
                for (j, v1) in firsts.iter().enumerate() {
                    out.push((a[i] + b[j] + (w1 - v1).abs()) as f64);
                }
            }
            out
        }
    }
}

/// Fitted constants of the combined envelope and the points it fails.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinedFit {
    pub weights: EnvelopeWeights,
    /// Least-squares constant.
    pub c: f64,
    /// Constant at the upper end of the 95% interval of the intercept, used
    /// for the violation count.
    pub c_upper: f64,
    /// `n`-decay rate; zero when `s_1 = 0` or `n` does not vary.
    pub c_rate: f64,
    /// Spatial decay rate; zero when `s_2 = s_3 = 0`.
    pub mu: f64,
    pub residual_sd: f64,
    /// Points whose mean exceeds the envelope by more than two standard
    /// errors.
    pub violations: Vec<usize>,
}

/// Relative slack on the envelope before a point counts as a violation.
pub const VIOLATION_RTOL: f64 = 1e-9;

const MU_GRID: (f64, f64, usize) = (1e-3, 20.0, 400);

/// Fits `log E[Q] ≈ log C - s_1 c n - s_2 μ d̄ + log F_{s_3 μ}` to the points
/// (least squares in `log C, c` for each `μ` on a log grid) and counts the
/// points that significantly exceed the envelope with the upper constant.
pub fn combined_envelope_check(
    points: &[EnvelopePoint],
    weights: EnvelopeWeights,
) -> Result<CombinedFit> {
    let pts: Vec<&EnvelopePoint> = points.iter().filter(|p| p.mean > 0.0).collect();
    if pts.len() < 2 {
        return Err(Error::InvalidParameter(
            "need at least two points with positive mean".into(),
        ));
    }
    let (s1, s2, s3) = weights.get();
    let log_f = |p: &EnvelopePoint, mu: f64| -> f64 {
        if s3 == 0.0 {
            return 0.0;
        }
        p.f_exponents
            .iter()
            .map(|&f| (-s3 * mu * f).exp())
            .sum::<f64>()
            .ln()
    };
    let n_varies = pts.iter().any(|p| p.n != pts[0].n);
    let use_n = s1 > 0.0 && n_varies;

    let fit_at = |mu: f64| -> Result<(f64, f64, f64, f64, f64)> {
        // z = log y + s2 μ d̄ - log F = log C - s1 c n
        let z: Vec<f64> = pts
            .iter()
            .map(|p| p.mean.ln() + s2 * mu * p.dbar - log_f(p, mu))
            .collect();
        if use_n {
            let xs: Vec<f64> = pts.iter().map(|p| -s1 * p.n as f64).collect();
            let f = ols(&xs, &z)?;
            let sse = f.residual_sd.powi(2) * f.df.max(1) as f64;
            Ok((f.intercept, f.slope, sse, f.intercept_stderr, f.df as f64))
        } else {
            let m = z.iter().sum::<f64>() / z.len() as f64;
            let sse: f64 = z.iter().map(|v| (v - m).powi(2)).sum();
            let df = z.len() - 1;
            let se = (sse / df as f64).sqrt() / (z.len() as f64).sqrt();
            Ok((m, 0.0, sse, se, df as f64))
        }
    };

    let mut best_mu = 0.0;
    let mut best = fit_at(0.0)?;
    if s2 > 0.0 || s3 > 0.0 {
        let (lo, hi, steps) = MU_GRID;
        best = (f64::NAN, 0.0, f64::INFINITY, 0.0, 0.0);
        let grid = |k: usize| lo * (hi / lo).powf(k as f64 / (steps - 1) as f64);
        let mut best_k = 0;
        for k in 0..steps {
            let f = fit_at(grid(k))?;
            if f.2 < best.2 {
                best = f;
                best_k = k;
            }
        }
        // Golden-section refinement between the neighbouring grid points.
        let (mut a, mut b) = (
            grid(best_k.saturating_sub(1)),
            grid((best_k + 1).min(steps - 1)),
        );
        let r = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..80 {
            let (m1, m2) = (b - r * (b - a), a + r * (b - a));
            if fit_at(m1)?.2 < fit_at(m2)?.2 {
                b = m2;
            } else {
                a = m1;
            }
        }
        best_mu = (a + b) / 2.0;
        let refined = fit_at(best_mu)?;
        if refined.2 <= best.2 {
            best = refined;
        } else {
            best_mu = grid(best_k);
        }
    }
    let (a, c_rate, sse, a_se, df) = best;
    let t = if df >= 1.0 {
        student_t_quantile(0.975, df)?
    } else {
        0.0
    };
    let a_up = a + t * a_se;
    let envelope = |p: &EnvelopePoint, log_c: f64| -> f64 {
        (log_c - s1 * c_rate * p.n as f64 - s2 * best_mu * p.dbar + log_f(p, best_mu)).exp()
    };
    let violations = points
        .iter()
        .enumerate()
        .filter(|(_, p)| p.mean - 2.0 * p.stderr > envelope(p, a_up) * (1.0 + VIOLATION_RTOL))
        .map(|(i, _)| i)
        .collect();
    Ok(CombinedFit {
        weights,
        c: a.exp(),
        c_upper: a_up.exp(),
        c_rate,
        mu: best_mu,
        residual_sd: if df >= 1.0 { (sse / df).sqrt() } else { 0.0 },
        violations,
    })
}
