//! Empirical V2V path loss for urban and highway environments, with and
//! without a dust term.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioKind {
    Urban,
    Highway,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 2] = [ScenarioKind::Urban, ScenarioKind::Highway];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Urban => "urban",
            ScenarioKind::Highway => "highway",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "urban" => Ok(ScenarioKind::Urban),
            "highway" => Ok(ScenarioKind::Highway),
            other => Err(invalid(format!(
                "unknown scenario `{other}`, expected `urban` or `highway`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub kind: ScenarioKind,
    /// Shadowing term in dB.
    pub shadowing_db: f64,
}

impl Scenario {
    pub fn urban() -> Self {
        Self::new(ScenarioKind::Urban)
    }

    pub fn highway() -> Self {
        Self::new(ScenarioKind::Highway)
    }

    pub fn new(kind: ScenarioKind) -> Self {
        Self {
            kind,
            shadowing_db: 0.0,
        }
    }

    /// Fixed shadowing term; must be a non-negative excess loss.
    pub fn with_shadowing(self, shadowing_db: f64) -> Result<Self> {
        if !(shadowing_db.is_finite() && shadowing_db >= 0.0) {
            return Err(invalid(format!(
                "shadowing must be a finite, non-negative dB value, got {shadowing_db}"
            )));
        }
        Ok(Self {
            shadowing_db,
            ..self
        })
    }

    /// Applies one draw of random shadowing on top of the fixed term. Draws
    /// are zero-mean in dB and may be negative.
    pub fn with_shadowing_draw(self, draw_db: f64) -> Self {
        Self {
            shadowing_db: self.shadowing_db + draw_db,
            ..self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    pub distance_m: f64,
    pub frequency_ghz: f64,
}

impl LinkGeometry {
    pub fn new(distance_m: f64, frequency_ghz: f64) -> Result<Self> {
        let g = Self {
            distance_m,
            frequency_ghz,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.distance_m.is_finite() && self.distance_m > 0.0) {
            return Err(invalid(format!("distance must be > 0 m, got {}", self.distance_m)));
        }
        if !(self.frequency_ghz.is_finite() && self.frequency_ghz > 0.0) {
            return Err(invalid(format!(
                "frequency must be > 0 GHz, got {}",
                self.frequency_ghz
            )));
        }
        Ok(())
    }
}

/// How a specific attenuation in dB/km enters the path loss.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum DustTermMode {
    /// Multiply by the path length in km.
    #[default]
    PerKm,
    /// Add the dB/km figure as if it were dB.
    AsPrinted,
}

impl DustTermMode {
    pub fn name(self) -> &'static str {
        match self {
            DustTermMode::PerKm => "per-km",
            DustTermMode::AsPrinted => "as-printed",
        }
    }

    /// Excess loss in dB contributed by `attenuation_db_per_km` over `distance_m`.
    pub fn excess_db(self, attenuation_db_per_km: f64, distance_m: f64) -> f64 {
        match self {
            DustTermMode::PerKm => attenuation_db_per_km * (distance_m / 1000.0),
            DustTermMode::AsPrinted => attenuation_db_per_km,
        }
    }
}

impl FromStr for DustTermMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "per-km" => Ok(DustTermMode::PerKm),
            "as-printed" => Ok(DustTermMode::AsPrinted),
            other => Err(invalid(format!(
                "unknown distance mode `{other}`, expected `per-km` or `as-printed`"
            ))),
        }
    }
}

pub fn baseline_path_loss(scenario: &Scenario, geom: &LinkGeometry) -> f64 {
    let d = geom.distance_m.log10();
    let f = geom.frequency_ghz.log10();
    let loss = match scenario.kind {
        ScenarioKind::Urban => 38.77 + 16.7 * d + 18.2 * f,
        ScenarioKind::Highway => 23.4 + 20.0 * d + 20.0 * f,
    };
    loss + scenario.shadowing_db
}

pub fn modified_path_loss(
    scenario: &Scenario,
    geom: &LinkGeometry,
    attenuation_db_per_km: f64,
    mode: DustTermMode,
) -> f64 {
    baseline_path_loss(scenario, geom) + mode.excess_db(attenuation_db_per_km, geom.distance_m)
}

/// Zero-mean log-normal shadowing: Gaussian in dB with standard deviation
/// `sigma_db`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogNormalShadowing {
    pub sigma_db: f64,
}

impl LogNormalShadowing {
    pub fn new(sigma_db: f64) -> Result<Self> {
        if !(sigma_db.is_finite() && sigma_db >= 0.0) {
            return Err(invalid(format!("shadowing sigma must be >= 0 dB, got {sigma_db}")));
        }
        Ok(Self { sigma_db })
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        if self.sigma_db == 0.0 {
            return 0.0;
        }
        // sigma validated in new()
        Normal::new(0.0, self.sigma_db).unwrap().sample(rng)
    }

    /// `n` draws from a generator seeded with `seed`, in draw order.
    pub fn draws(&self, seed: u64, n: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| self.sample(&mut rng)).collect()
    }
}
