//! JSON run configuration for the command-line tool.
//!
//! Every section is optional and unknown keys are rejected. A minimal file is
//! `{}`, which runs the DSRC preset in the urban scenario at 390 m.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::attenuation::{MieOptions, StormProfile};
use crate::error::{Error, Result};
use crate::linkbudget::{Band, RadioConfig, DEFAULT_DISTANCE_M};
use crate::pathloss::{DustTermMode, LinkGeometry, LogNormalShadowing, Scenario, ScenarioKind};
use crate::permittivity::{load_samples, mean_permittivity, ComplexPermittivity, HumidityModel};

/// Particle radius held fixed by visibility searches and visibility sweeps, μm.
pub const DEFAULT_PARTICLE_RADIUS_UM: f64 = 40.0;
/// Visibility held fixed by radius searches and radius sweeps: 1 m, in km.
pub const DEFAULT_VISIBILITY_KM: f64 = 0.001;
pub const DEFAULT_HUMIDITIES: [f64; 3] = [0.0, 60.0, 100.0];

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// `dsrc-5.9`, `mmwave-28`, or a free label when `radio` is complete.
    pub band: String,
    /// Overrides on the preset's radio parameters.
    pub radio: Option<RadioSpec>,
    pub scenario: ScenarioSpec,
    pub geometry: GeometrySpec,
    pub storm: StormSpec,
    pub humidity: Vec<f64>,
    pub sweep: SweepSpec,
    pub model: ModelSpec,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            band: Band::Dsrc.name().to_string(),
            radio: None,
            scenario: ScenarioSpec::default(),
            geometry: GeometrySpec::default(),
            storm: StormSpec::default(),
            humidity: DEFAULT_HUMIDITIES.to_vec(),
            sweep: SweepSpec::default(),
            model: ModelSpec::default(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadioSpec {
    pub tx_gain_dbi: Option<f64>,
    pub rx_gain_dbi: Option<f64>,
    pub tx_power_dbm: Option<f64>,
    pub data_rate_bps: Option<f64>,
    pub circuit_loss_db: Option<f64>,
    pub noise_figure_db: Option<f64>,
    pub antenna_temperature_k: Option<f64>,
    pub required_ebn0_db: Option<f64>,
    pub margin_threshold_db: Option<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioSpec {
    pub kind: ScenarioKindSpec,
    pub shadowing_db: f64,
    /// Standard deviation of random log-normal shadowing; 0 disables it.
    pub shadowing_sigma_db: f64,
}

impl Default for ScenarioSpec {
    fn default() -> Self {
        Self {
            kind: ScenarioKindSpec::Urban,
            shadowing_db: 0.0,
            shadowing_sigma_db: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioKindSpec {
    Urban,
    Highway,
}

impl From<ScenarioKindSpec> for ScenarioKind {
    fn from(k: ScenarioKindSpec) -> Self {
        match k {
            ScenarioKindSpec::Urban => ScenarioKind::Urban,
            ScenarioKindSpec::Highway => ScenarioKind::Highway,
        }
    }
}

impl From<ScenarioKind> for ScenarioKindSpec {
    fn from(k: ScenarioKind) -> Self {
        match k {
            ScenarioKind::Urban => ScenarioKindSpec::Urban,
            ScenarioKind::Highway => ScenarioKindSpec::Highway,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometrySpec {
    pub distance_m: f64,
    /// Defaults to the preset band's frequency.
    pub frequency_ghz: Option<f64>,
}

impl Default for GeometrySpec {
    fn default() -> Self {
        Self {
            distance_m: DEFAULT_DISTANCE_M,
            frequency_ghz: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StormSpec {
    pub reference_visibility_km: f64,
    pub reference_height_m: f64,
    pub height_m: f64,
    pub particle_radius_um: f64,
    pub gamma: f64,
    pub b: f64,
    pub c_const: f64,
    pub g_const: f64,
    pub size_unit_scale: f64,
}

impl Default for StormSpec {
    fn default() -> Self {
        let p = StormProfile::default();
        Self {
            reference_visibility_km: DEFAULT_VISIBILITY_KM,
            reference_height_m: p.reference_height_m,
            height_m: p.height_m,
            particle_radius_um: DEFAULT_PARTICLE_RADIUS_UM,
            gamma: p.gamma,
            b: p.b,
            c_const: p.c_const,
            g_const: p.g_const,
            size_unit_scale: p.size_unit_scale,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    Visibility,
    ParticleRadius,
    Frequency,
    Distance,
    Humidity,
}

impl SweepVariable {
    fn default_range(self) -> (f64, f64, Spacing) {
        match self {
            SweepVariable::Visibility => (0.001, 10.0, Spacing::Log),
            SweepVariable::ParticleRadius => (0.0, 538.0, Spacing::Linear),
            SweepVariable::Frequency => (1.0, 100.0, Spacing::Log),
            SweepVariable::Distance => (10.0, 1000.0, Spacing::Linear),
            SweepVariable::Humidity => (0.0, 100.0, Spacing::Linear),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

/// Sweep axis; unset bounds fall back to the variable's default range.
/// Units: visibility km, particle radius μm, frequency GHz, distance m,
/// humidity %.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub steps: usize,
    pub spacing: Option<Spacing>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            variable: SweepVariable::Visibility,
            min: None,
            max: None,
            steps: 41,
            spacing: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum DistanceModeSpec {
    #[serde(rename = "per-km")]
    PerKm,
    #[serde(rename = "as-printed")]
    AsPrinted,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSpec {
    pub distance_mode: DistanceModeSpec,
    pub c2_literal: bool,
    pub c3_literal: bool,
    /// Dry-air permittivity anchoring the humidity cubics.
    pub humidity_base: Option<PermittivitySpec>,
    /// Sample table whose mean permittivity becomes the humidity base.
    /// Relative paths resolve against the config file's directory.
    pub samples_csv: Option<PathBuf>,
}

impl Default for ModelSpec {
    fn default() -> Self {
        Self {
            distance_mode: DistanceModeSpec::PerKm,
            c2_literal: false,
            c3_literal: false,
            humidity_base: None,
            samples_csv: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PermittivitySpec {
    pub eps1: f64,
    pub eps2: f64,
}

/// Command-line overrides applied on top of a config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub preset: Option<Band>,
    pub humidity: Option<Vec<f64>>,
    pub distance_m: Option<f64>,
    pub visibility_km: Option<f64>,
    pub particle_um: Option<f64>,
    pub scenario: Option<ScenarioKind>,
    pub seed: Option<u64>,
    pub size_unit_scale: Option<f64>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            config_err(format!("line {} column {}: {e}", e.line(), e.column()))
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg = Self::from_json(&text).map_err(|e| match e {
            Error::Config(msg) => config_err(format!("{}: {msg}", path.display())),
            other => other,
        })?;
        if let Some(csv) = cfg.model.samples_csv.as_mut() {
            if csv.is_relative() {
                if let Some(dir) = path.parent() {
                    *csv = dir.join(&*csv);
                }
            }
        }
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(band) = o.preset {
            self.band = band.name().to_string();
        }
        if let Some(h) = &o.humidity {
            self.humidity = h.clone();
        }
        if let Some(d) = o.distance_m {
            self.geometry.distance_m = d;
        }
        if let Some(v) = o.visibility_km {
            self.storm.reference_visibility_km = v;
        }
        if let Some(a) = o.particle_um {
            self.storm.particle_radius_um = a;
        }
        if let Some(k) = o.scenario {
            self.scenario.kind = k.into();
        }
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(u) = o.size_unit_scale {
            self.storm.size_unit_scale = u;
        }
    }

    /// Validates everything and converts to model types.
    pub fn resolve(&self) -> Result<Run> {
        let preset: Option<Band> = self.band.parse().ok();
        let radio = resolve_radio(&self.band, preset, self.radio.as_ref())?;

        let frequency_ghz = match (self.geometry.frequency_ghz, preset) {
            (Some(f), _) => f,
            (None, Some(b)) => b.frequency_ghz(),
            (None, None) => {
                return Err(config_err(format!(
                    "geometry.frequency_ghz: required for non-preset band `{}`",
                    self.band
                )))
            }
        };
        let geometry = LinkGeometry::new(self.geometry.distance_m, frequency_ghz)
            .map_err(|e| config_err(format!("geometry: {e}")))?;

        let scenario = Scenario::new(self.scenario.kind.into())
            .with_shadowing(self.scenario.shadowing_db)
            .map_err(|e| config_err(format!("scenario.shadowing_db: {e}")))?;
        let shadowing = LogNormalShadowing::new(self.scenario.shadowing_sigma_db)
            .map_err(|e| config_err(format!("scenario.shadowing_sigma_db: {e}")))?;

        let s = &self.storm;
        let storm = StormProfile {
            reference_visibility_km: s.reference_visibility_km,
            reference_height_m: s.reference_height_m,
            height_m: s.height_m,
            particle_radius_m: radius_m_from_um(s.particle_radius_um),
            humidity_pct: 0.0,
            gamma: s.gamma,
            b: s.b,
            c_const: s.c_const,
            g_const: s.g_const,
            size_unit_scale: s.size_unit_scale,
        };
        storm.validate().map_err(|e| config_err(format!("storm: {e}")))?;

        if self.humidity.is_empty() {
            return Err(config_err("humidity: list must not be empty"));
        }
        if let Some(h) = self.humidity.iter().find(|h| !(0.0..=100.0).contains(*h)) {
            return Err(config_err(format!("humidity: {h} is outside [0, 100] %")));
        }
        let mut humidity = self.humidity.clone();
        humidity.sort_by(f64::total_cmp);
        humidity.dedup();

        let sweep = Sweep::from_spec(&self.sweep)?;

        let humidity_model = match (&self.model.humidity_base, &self.model.samples_csv) {
            (Some(_), Some(_)) => {
                return Err(config_err(
                    "model: set at most one of humidity_base and samples_csv",
                ))
            }
            (Some(p), None) => HumidityModel::with_base(
                ComplexPermittivity::new(p.eps1, p.eps2)
                    .map_err(|e| config_err(format!("model.humidity_base: {e}")))?,
            ),
            (None, Some(path)) => {
                let samples = load_samples(path)?;
                let base = mean_permittivity(&samples)
                    .map_err(|e| config_err(format!("model.samples_csv: {e}")))?;
                HumidityModel::with_base(base)
            }
            (None, None) => HumidityModel::default(),
        };

        Ok(Run {
            band_label: self.band.clone(),
            radio,
            scenario,
            shadowing,
            geometry,
            storm,
            humidity,
            sweep,
            dust_mode: match self.model.distance_mode {
                DistanceModeSpec::PerKm => DustTermMode::PerKm,
                DistanceModeSpec::AsPrinted => DustTermMode::AsPrinted,
            },
            mie: MieOptions {
                c2_literal: self.model.c2_literal,
                c3_literal: self.model.c3_literal,
            },
            humidity_model,
            seed: self.seed,
        })
    }
}

fn resolve_radio(band: &str, preset: Option<Band>, spec: Option<&RadioSpec>) -> Result<RadioConfig> {
    let base = preset.map(Band::radio);
    let empty = RadioSpec::default();
    let spec = spec.unwrap_or(&empty);
    let pick = |name: &str, v: Option<f64>, from_preset: Option<f64>| {
        v.or(from_preset).ok_or_else(|| {
            config_err(format!(
                "radio.{name}: required for non-preset band `{band}`"
            ))
        })
    };
    let radio = RadioConfig {
        tx_gain_dbi: pick("tx_gain_dbi", spec.tx_gain_dbi, base.map(|b| b.tx_gain_dbi))?,
        rx_gain_dbi: pick("rx_gain_dbi", spec.rx_gain_dbi, base.map(|b| b.rx_gain_dbi))?,
        tx_power_dbm: pick("tx_power_dbm", spec.tx_power_dbm, base.map(|b| b.tx_power_dbm))?,
        data_rate_bps: pick("data_rate_bps", spec.data_rate_bps, base.map(|b| b.data_rate_bps))?,
        circuit_loss_db: pick("circuit_loss_db", spec.circuit_loss_db, base.map(|b| b.circuit_loss_db))?,
        noise_figure_db: pick("noise_figure_db", spec.noise_figure_db, base.map(|b| b.noise_figure_db))?,
        antenna_temperature_k: spec
            .antenna_temperature_k
            .or(base.map(|b| b.antenna_temperature_k))
            .unwrap_or(crate::linkbudget::REFERENCE_TEMPERATURE_K),
        required_ebn0_db: pick("required_ebn0_db", spec.required_ebn0_db, base.map(|b| b.required_ebn0_db))?,
        margin_threshold_db: spec
            .margin_threshold_db
            .or(base.map(|b| b.margin_threshold_db))
            .unwrap_or(10.0),
    };
    radio.validate().map_err(|e| config_err(format!("radio: {e}")))?;
    Ok(radio)
}

pub fn radius_m_from_um(um: f64) -> f64 {
    um * 1e-6
}

pub fn radius_um_from_m(m: f64) -> f64 {
    m * 1e6
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sweep {
    pub variable: SweepVariable,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
    pub spacing: Spacing,
}

impl Sweep {
    pub fn from_spec(spec: &SweepSpec) -> Result<Self> {
        let (dmin, dmax, dspacing) = spec.variable.default_range();
        let sweep = Self {
            variable: spec.variable,
            min: spec.min.unwrap_or(dmin),
            max: spec.max.unwrap_or(dmax),
            steps: spec.steps,
            spacing: spec.spacing.unwrap_or(dspacing),
        };
        if sweep.steps < 2 {
            return Err(config_err(format!("sweep.steps: must be >= 2, got {}", sweep.steps)));
        }
        if !(sweep.min.is_finite() && sweep.max.is_finite() && sweep.min < sweep.max) {
            return Err(config_err(format!(
                "sweep: min ({}) must be below max ({})",
                sweep.min, sweep.max
            )));
        }
        if sweep.spacing == Spacing::Log && sweep.min <= 0.0 {
            return Err(config_err("sweep.min: log spacing needs a positive minimum"));
        }
        let (lo, hi) = match sweep.variable {
            SweepVariable::Visibility | SweepVariable::Frequency | SweepVariable::Distance => {
                (f64::MIN_POSITIVE, f64::INFINITY)
            }
            SweepVariable::ParticleRadius => (0.0, f64::INFINITY),
            SweepVariable::Humidity => (0.0, 100.0),
        };
        if sweep.min < lo || sweep.max > hi {
            return Err(config_err(format!(
                "sweep: range [{}, {}] is outside the domain of {:?}",
                sweep.min, sweep.max, sweep.variable
            )));
        }
        Ok(sweep)
    }

    /// Grid points, ascending, with both endpoints exact.
    pub fn values(&self) -> Vec<f64> {
        let n = self.steps;
        let last = (n - 1) as f64;
        (0..n)
            .map(|i| {
                if i == 0 {
                    return self.min;
                }
                if i == n - 1 {
                    return self.max;
                }
                let t = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.min + (self.max - self.min) * t,
                    Spacing::Log => self.min * (self.max / self.min).powf(t),
                }
            })
            .collect()
    }
}

/// A validated run.
#[derive(Debug, Clone)]
pub struct Run {
    pub band_label: String,
    pub radio: RadioConfig,
    pub scenario: Scenario,
    pub shadowing: LogNormalShadowing,
    pub geometry: LinkGeometry,
    /// Humidity is taken from [`Run::humidity`], not from this profile.
    pub storm: StormProfile,
    /// Ascending, de-duplicated.
    pub humidity: Vec<f64>,
    pub sweep: Sweep,
    pub dust_mode: DustTermMode,
    pub mie: MieOptions,
    pub humidity_model: HumidityModel,
    pub seed: u64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn err_text(json: &str) -> String {
        match RunConfig::from_json(json).and_then(|c| c.resolve()) {
            Err(Error::Config(msg)) => msg,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn empty_document_gives_defaults() {
        let run = RunConfig::from_json("{}").unwrap().resolve().unwrap();
        assert_eq!(run.band_label, "dsrc-5.9");
        assert_eq!(run.radio, RadioConfig::dsrc());
        assert_eq!(run.geometry.distance_m, 390.0);
        assert_eq!(run.geometry.frequency_ghz, 5.9);
        assert_eq!(run.humidity, vec![0.0, 60.0, 100.0]);
        assert_eq!(run.storm.reference_visibility_km, 0.001);
        assert_eq!(run.sweep.variable, SweepVariable::Visibility);
        assert_eq!(run.sweep.spacing, Spacing::Log);
        assert_eq!(run.dust_mode, DustTermMode::PerKm);
    }

    #[test]
    fn unknown_keys_rejected_with_location() {
        let msg = err_text("{\n  \"storm\": {\"gama\": 1.1}\n}");
        assert!(msg.contains("gama"), "{msg}");
        assert!(msg.contains("line 2"), "{msg}");
        let msg = err_text("{\"bandwidth\": 3}");
        assert!(msg.contains("bandwidth"), "{msg}");
    }

    #[test]
    fn empty_humidity_list_rejected() {
        assert!(err_text("{\"humidity\": []}").contains("humidity"));
        assert!(err_text("{\"humidity\": [120]}").contains("humidity"));
    }

    #[test]
    fn sweep_validation() {
        assert!(err_text(r#"{"sweep": {"steps": 1}}"#).contains("steps"));
        assert!(err_text(r#"{"sweep": {"min": 5, "max": 1}}"#).contains("min"));
        assert!(err_text(r#"{"sweep": {"variable": "particle_radius", "spacing": "log"}}"#).contains("log"));
        assert!(err_text(r#"{"sweep": {"variable": "humidity", "max": 150}}"#).contains("outside"));
        assert!(err_text(r#"{"sweep": {"variable": "pressure"}}"#).contains("pressure"));
    }

    #[test]
    fn custom_band_needs_everything() {
        let msg = err_text(r#"{"band": "wifi", "radio": {"tx_gain_dbi": 3}}"#);
        assert!(msg.contains("radio.rx_gain_dbi"), "{msg}");
        let ok = r#"{"band": "wifi", "geometry": {"frequency_ghz": 2.4},
            "radio": {"tx_gain_dbi": 3, "rx_gain_dbi": 3, "tx_power_dbm": 20,
                      "data_rate_bps": 1e6, "circuit_loss_db": 2, "noise_figure_db": 5,
                      "required_ebn0_db": 10}}"#;
        let run = RunConfig::from_json(ok).unwrap().resolve().unwrap();
        assert_eq!(run.radio.margin_threshold_db, 10.0);
        assert_eq!(run.geometry.frequency_ghz, 2.4);
    }

    #[test]
    fn preset_overrides_and_cli_overrides() {
        let mut cfg = RunConfig::from_json(r#"{"radio": {"noise_figure_db": 4}}"#).unwrap();
        cfg.apply(&Overrides {
            preset: Some(Band::Mmwave),
            humidity: Some(vec![100.0, 0.0, 0.0]),
            scenario: Some(ScenarioKind::Highway),
            size_unit_scale: Some(1e3),
            particle_um: Some(12.0),
            ..Default::default()
        });
        let run = cfg.resolve().unwrap();
        assert_eq!(run.radio.noise_figure_db, 4.0);
        assert_eq!(run.radio.data_rate_bps, 1e9);
        assert_eq!(run.geometry.frequency_ghz, 28.0);
        assert_eq!(run.humidity, vec![0.0, 100.0]);
        assert_eq!(run.scenario.kind, ScenarioKind::Highway);
        assert_eq!(run.storm.size_unit_scale, 1e3);
        assert!((run.storm.particle_radius_m - 12e-6).abs() < 1e-18);
    }

    #[test]
    fn sweep_grid_endpoints() {
        let s = Sweep::from_spec(&SweepSpec::default()).unwrap();
        let v = s.values();
        assert_eq!(v.len(), 41);
        assert_eq!(v[0], 0.001);
        assert_eq!(v[40], 10.0);
        assert!((v[10] - 0.01).abs() < 1e-15);
        assert!(v.windows(2).all(|w| w[0] < w[1]));

        let lin = Sweep::from_spec(&SweepSpec {
            variable: SweepVariable::ParticleRadius,
            steps: 3,
            ..Default::default()
        })
        .unwrap();
        assert_eq!(lin.values(), vec![0.0, 269.0, 538.0]);
    }

    #[test]
    fn humidity_base_from_samples() {
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/libya_samples.csv");
        let json = format!(r#"{{"model": {{"samples_csv": "{path}"}}}}"#);
        let run = RunConfig::from_json(&json).unwrap().resolve().unwrap();
        assert!((run.humidity_model.base.eps1 - 6.3485).abs() < 1e-9);

        let both = format!(r#"{{"model": {{"samples_csv": "{path}", "humidity_base": {{"eps1": 5, "eps2": 0.1}}}}}}"#);
        assert!(err_text(&both).contains("at most one"));
    }
}
