use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Triangular, Uniform};

use crate::configspace::{ConfigSpace, Lattice};
use crate::error::{Error, Result};

/// Single-site law of the random field, supported in `[0, ω_max]` with a
/// bounded density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DisorderLaw {
    /// Uniform density `1/ω_max` on `[0, ω_max]`.
    Uniform { omega_max: f64 },
    /// Symmetric triangular density on `[0, ω_max]` peaked at `ω_max/2`.
    Tent { omega_max: f64 },
}

impl DisorderLaw {
    pub fn uniform(omega_max: f64) -> Result<Self> {
        Self::check(omega_max)?;
        Ok(Self::Uniform { omega_max })
    }

    pub fn tent(omega_max: f64) -> Result<Self> {
        Self::check(omega_max)?;
        Ok(Self::Tent { omega_max })
    }

    /// Looks a law up by its registered name.
    pub fn by_name(name: &str, omega_max: f64) -> Result<Self> {
        match name {
            "uniform" => Self::uniform(omega_max),
            "tent" => Self::tent(omega_max),
            other => Err(Error::UnknownDistribution(other.to_string())),
        }
    }

    fn check(omega_max: f64) -> Result<()> {
        if !(omega_max > 0.0 && omega_max.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "omega_max = {omega_max} must be positive and finite"
            )));
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Uniform { .. } => "uniform",
            Self::Tent { .. } => "tent",
        }
    }

    pub fn omega_max(&self) -> f64 {
        match *self {
            Self::Uniform { omega_max } | Self::Tent { omega_max } => omega_max,
        }
    }

    /// Supremum of the density.
    pub fn density_sup(&self) -> f64 {
        match *self {
            Self::Uniform { omega_max } => 1.0 / omega_max,
            Self::Tent { omega_max } => 2.0 / omega_max,
        }
    }

    /// Density at `w`.
    pub fn density(&self, w: f64) -> f64 {
        let m = self.omega_max();
        if !(0.0..=m).contains(&w) {
            return 0.0;
        }
        match self {
            Self::Uniform { .. } => 1.0 / m,
            Self::Tent { .. } => {
                let h = m / 2.0;
                (h - (w - h).abs()) / (h * h)
            }
        }
    }

    /// One draw from the law.
    pub fn draw<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let m = self.omega_max();
        match self {
            Self::Uniform { .. } => Uniform::new_inclusive(0.0, m)
                .expect("valid support")
                .sample(rng),
            Self::Tent { .. } => Triangular::new(0.0, m, m / 2.0)
                .expect("valid support")
                .sample(rng),
        }
    }

    /// Draws the field on `lattice` from stream `stream` of the generator
    /// seeded by `seed`, one value per site from left to right.
    pub fn sample(&self, lattice: Lattice, seed: u64, stream: u64) -> DisorderRealization {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let m = self.omega_max();
        let omega: Vec<f64> = match self {
            Self::Uniform { .. } => {
                let d = Uniform::new_inclusive(0.0, m).expect("valid support");
                (0..lattice.len()).map(|_| d.sample(&mut rng)).collect()
            }
            Self::Tent { .. } => {
                let d = Triangular::new(0.0, m, m / 2.0).expect("valid support");
                (0..lattice.len()).map(|_| d.sample(&mut rng)).collect()
            }
        };
        DisorderRealization {
            lattice,
            omega,
            origin: Some(Origin {
                law: *self,
                seed,
                stream,
            }),
        }
    }
}

impl fmt::Display for DisorderLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl FromStr for DisorderLaw {
    type Err = Error;

    /// Parses a registered name with `ω_max = 1`.
    fn from_str(s: &str) -> Result<Self> {
        Self::by_name(s, 1.0)
    }
}

/// Where a sampled realization came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Origin {
    pub law: DisorderLaw,
    pub seed: u64,
    pub stream: u64,
}

/// The site field `ω: Λ → [0, ω_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DisorderRealization {
    lattice: Lattice,
    omega: Vec<f64>,
    origin: Option<Origin>,
}

impl DisorderRealization {
    /// A hand-specified field, listed from `lattice.lo()` upwards.
    pub fn from_values(lattice: Lattice, omega: Vec<f64>) -> Result<Self> {
        if omega.len() != lattice.len() {
            return Err(Error::SizeMismatch(format!(
                "{} field values for {} sites",
                omega.len(),
                lattice.len()
            )));
        }
        if omega.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidParameter(
                "field values must be finite".into(),
            ));
        }
        Ok(Self {
            lattice,
            omega,
            origin: None,
        })
    }

    /// `ω ≡ 0` on `lattice`.
    pub fn zero(lattice: Lattice) -> Self {
        Self {
            lattice,
            omega: vec![0.0; lattice.len()],
            origin: None,
        }
    }

    /// `ω ≡ c` on `lattice`.
    pub fn constant(lattice: Lattice, c: f64) -> Self {
        Self {
            lattice,
            omega: vec![c; lattice.len()],
            origin: None,
        }
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn values(&self) -> &[f64] {
        &self.omega
    }

    pub fn origin(&self) -> Option<&Origin> {
        self.origin.as_ref()
    }

    pub fn seed(&self) -> Option<u64> {
        self.origin.map(|o| o.seed)
    }

    /// `ω(α)`; panics outside the lattice.
    pub fn at(&self, site: i64) -> f64 {
        assert!(
            self.lattice.contains(site),
            "site {site} outside the field's lattice"
        );
        self.omega[(site - self.lattice.lo()) as usize]
    }

    /// Fails unless the field covers every site of `space`.
    pub fn check_covers(&self, space: &ConfigSpace) -> Result<()> {
        if !self.lattice.contains_lattice(&space.lattice()) {
            let l = space.lattice();
            return Err(Error::SizeMismatch(format!(
                "field on [{}, {}] does not cover [{}, {}]",
                self.lattice.lo(),
                self.lattice.hi(),
                l.lo(),
                l.hi()
            )));
        }
        Ok(())
    }

    /// The same field restricted to a subinterval.
    pub fn restrict(&self, sub: Lattice) -> Result<Self> {
        if !self.lattice.contains_lattice(&sub) {
            return Err(Error::SizeMismatch(
                "subinterval not inside the field's lattice".into(),
            ));
        }
        let a = (sub.lo() - self.lattice.lo()) as usize;
        Ok(Self {
            lattice: sub,
            omega: self.omega[a..a + sub.len()].to_vec(),
            origin: self.origin,
        })
    }

    /// Replaces `ω` at one site, e.g. for conditional averages.
    pub fn with_value(&self, site: i64, value: f64) -> Self {
        let mut out = self.clone();
        out.omega[(site - self.lattice.lo()) as usize] = value;
        out
    }
}
