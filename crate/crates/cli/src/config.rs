//! Plan resolution: command-line flags over the config file over defaults.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::{Deserialize, Serialize};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "DROPLET_OUT_DIR";

const DEFAULT_OUT_DIR: &str = "droplet-out";

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// Flat TOML file with plan keys.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Half width of the lattice [-L, L].
    #[arg(long = "L", global = true, value_name = "L")]
    pub half_width: Option<usize>,
    /// Particle number.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Cluster penalty g > 1.
    #[arg(long, global = true)]
    pub g: Option<f64>,
    /// Disorder strength.
    #[arg(long, global = true)]
    pub lambda: Option<f64>,
    /// Upper end of the single-site law's support.
    #[arg(long = "omega-max", global = true)]
    pub omega_max: Option<f64>,
    /// Single-site law: uniform or tent.
    #[arg(long, global = true)]
    pub distribution: Option<String>,
    /// Decay rate of the envelope, 0 < mu < mu_T.
    #[arg(long, global = true)]
    pub mu: Option<f64>,
    /// Combes-Thomas rate.
    #[arg(long = "mu-T", global = true)]
    pub mu_t: Option<f64>,
    /// Energy for resolvent checks.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub energy: Option<f64>,
    /// Energy window as `lo,hi`.
    #[arg(long, global = true, value_parser = parse_window, allow_hyphen_values = true)]
    pub window: Option<[f64; 2]>,
    /// Fractional exponent in (0, 1).
    #[arg(long, global = true)]
    pub s: Option<f64>,
    /// Number of disorder realizations.
    #[arg(long, global = true)]
    pub realizations: Option<usize>,
    /// Root seed of the realization streams.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory; falls back to the config, then DROPLET_OUT_DIR.
    #[arg(long = "out-dir", global = true, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
}

fn parse_window(s: &str) -> std::result::Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(format!("expected `lo,hi`, got `{s}`"));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|e| format!("window lower end: {e}"))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|e| format!("window upper end: {e}"))?;
    Ok([lo, hi])
}

/// Keys accepted in the config file. Unknown keys are rejected.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(rename = "L")]
    pub half_width: Option<usize>,
    pub n: Option<usize>,
    pub g: Option<f64>,
    pub lambda: Option<f64>,
    pub omega_max: Option<f64>,
    pub distribution: Option<String>,
    pub mu: Option<f64>,
    #[serde(rename = "mu_T")]
    pub mu_t: Option<f64>,
    pub energy: Option<f64>,
    pub window: Option<[f64; 2]>,
    pub s: Option<f64>,
    pub realizations: Option<usize>,
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

/// Fully resolved parameters, echoed into the manifest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Plan {
    #[serde(rename = "L")]
    pub half_width: usize,
    pub n: usize,
    pub g: f64,
    pub lambda: f64,
    pub omega_max: f64,
    pub distribution: String,
    pub mu: f64,
    #[serde(rename = "mu_T")]
    pub mu_t: f64,
    pub energy: f64,
    pub window: [f64; 2],
    pub s: f64,
    pub realizations: usize,
    pub seed: u64,
    #[serde(skip)]
    pub out_dir: PathBuf,
}

impl Plan {
    pub fn resolve(o: &Overrides) -> Result<Self> {
        let file = match &o.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let out_dir = o
            .out_dir
            .clone()
            .or(file.out_dir)
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
        let plan = Self {
            half_width: o.half_width.or(file.half_width).unwrap_or(3),
            n: o.n.or(file.n).unwrap_or(2),
            g: o.g.or(file.g).unwrap_or(2.0),
            lambda: o.lambda.or(file.lambda).unwrap_or(1.0),
            omega_max: o.omega_max.or(file.omega_max).unwrap_or(1.0),
            distribution: o
                .distribution
                .clone()
                .or(file.distribution)
                .unwrap_or_else(|| "uniform".into()),
            mu: o.mu.or(file.mu).unwrap_or(0.05),
            mu_t: o.mu_t.or(file.mu_t).unwrap_or(0.1),
            energy: o.energy.or(file.energy).unwrap_or(0.0),
            window: o.window.or(file.window).unwrap_or([0.0, 1.0]),
            s: o.s.or(file.s).unwrap_or(0.5),
            realizations: o.realizations.or(file.realizations).unwrap_or(10),
            seed: o.seed.or(file.seed).unwrap_or(0),
            out_dir,
        };
        if plan.realizations == 0 {
            bail!("realizations must be positive");
        }
        Ok(plan)
    }
}
