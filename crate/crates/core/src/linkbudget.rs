//! Dust-modified link margin and its inversion into failure thresholds.
//!
//! The margin is the linear ratio `Gt Gr Pt / (k Ts R L0 Lsm (Eb/N0))`
//! evaluated entirely in decibels:
//!
//! ```text
//! M = Pt + Gt + Gr - N - L0 - Lsm - Eb/N0,   N = 10 log10(k Ts R / 1 mW)
//! ```

use std::fmt;
use std::str::FromStr;

use crate::attenuation::{attenuation_from_coefficients, mie_coefficients_with, MieOptions, StormProfile};
use crate::bisect;
use crate::error::{invalid, Error, Result};
use crate::pathloss::{baseline_path_loss, DustTermMode, LinkGeometry, Scenario};
use crate::permittivity::ComplexPermittivity;

/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380649e-23;
/// Reference temperature for noise figure, K.
pub const REFERENCE_TEMPERATURE_K: f64 = 290.0;
pub const DEFAULT_DISTANCE_M: f64 = 390.0;

/// Search bracket for the critical particle radius, m.
pub const RADIUS_BRACKET_M: (f64, f64) = (0.0, 5e-3);
pub const RADIUS_TOLERANCE_M: f64 = 1e-8;
/// Search bracket for the critical visibility, km.
pub const VISIBILITY_BRACKET_KM: (f64, f64) = (1e-4, 100.0);
pub const VISIBILITY_REL_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioConfig {
    pub tx_gain_dbi: f64,
    pub rx_gain_dbi: f64,
    pub tx_power_dbm: f64,
    pub data_rate_bps: f64,
    pub circuit_loss_db: f64,
    pub noise_figure_db: f64,
    pub antenna_temperature_k: f64,
    pub required_ebn0_db: f64,
    pub margin_threshold_db: f64,
}

impl RadioConfig {
    fn table_iii(gain_dbi: f64, data_rate_bps: f64) -> Self {
        Self {
            tx_gain_dbi: gain_dbi,
            rx_gain_dbi: gain_dbi,
            tx_power_dbm: 27.0,
            data_rate_bps,
            circuit_loss_db: 5.0,
            noise_figure_db: 6.0,
            antenna_temperature_k: REFERENCE_TEMPERATURE_K,
            required_ebn0_db: 18.8,
            margin_threshold_db: 10.0,
        }
    }

    pub fn dsrc() -> Self {
        Self::table_iii(9.9, 27e6)
    }

    pub fn mmwave() -> Self {
        Self::table_iii(23.4, 1e9)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("tx_gain_dbi", self.tx_gain_dbi),
            ("rx_gain_dbi", self.rx_gain_dbi),
            ("tx_power_dbm", self.tx_power_dbm),
            ("required_ebn0_db", self.required_ebn0_db),
            ("margin_threshold_db", self.margin_threshold_db),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(invalid(format!("{name} must be finite, got {v}")));
            }
        }
        if !(self.data_rate_bps.is_finite() && self.data_rate_bps > 0.0) {
            return Err(invalid(format!("data rate must be > 0, got {}", self.data_rate_bps)));
        }
        if !(self.antenna_temperature_k.is_finite() && self.antenna_temperature_k > 0.0) {
            return Err(invalid(format!(
                "antenna temperature must be > 0 K, got {}",
                self.antenna_temperature_k
            )));
        }
        if !(self.circuit_loss_db.is_finite() && self.circuit_loss_db >= 0.0) {
            return Err(invalid(format!("circuit loss must be >= 0 dB, got {}", self.circuit_loss_db)));
        }
        if !(self.noise_figure_db.is_finite() && self.noise_figure_db >= 0.0) {
            return Err(invalid(format!("noise figure must be >= 0 dB, got {}", self.noise_figure_db)));
        }
        Ok(())
    }

    /// Display only; never fed back into the budget.
    pub fn eirp_dbm(&self) -> f64 {
        self.tx_power_dbm + self.tx_gain_dbi
    }
}

/// The two radio front ends the tool ships presets for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Band {
    Dsrc,
    Mmwave,
}

impl Band {
    pub const ALL: [Band; 2] = [Band::Dsrc, Band::Mmwave];

    pub fn name(self) -> &'static str {
        match self {
            Band::Dsrc => "dsrc-5.9",
            Band::Mmwave => "mmwave-28",
        }
    }

    pub fn frequency_ghz(self) -> f64 {
        match self {
            Band::Dsrc => 5.9,
            Band::Mmwave => 28.0,
        }
    }

    pub fn radio(self) -> RadioConfig {
        match self {
            Band::Dsrc => RadioConfig::dsrc(),
            Band::Mmwave => RadioConfig::mmwave(),
        }
    }
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Band {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dsrc-5.9" => Ok(Band::Dsrc),
            "mmwave-28" => Ok(Band::Mmwave),
            other => Err(invalid(format!(
                "unknown preset `{other}`, expected `dsrc-5.9` or `mmwave-28`"
            ))),
        }
    }
}

fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// `Ts = TA + (F - 1) * 290 K` with F converted from dB.
pub fn system_noise_temperature(config: &RadioConfig) -> f64 {
    config.antenna_temperature_k + (db_to_linear(config.noise_figure_db) - 1.0) * REFERENCE_TEMPERATURE_K
}

/// Noise power `k Ts R` referred to 1 mW.
pub fn noise_power_dbm(config: &RadioConfig) -> f64 {
    10.0 * (BOLTZMANN * system_noise_temperature(config) * config.data_rate_bps / 1e-3).log10()
}

pub fn link_margin(config: &RadioConfig, modified_loss_db: f64) -> f64 {
    config.tx_power_dbm + config.tx_gain_dbi + config.rx_gain_dbi
        - noise_power_dbm(config)
        - config.circuit_loss_db
        - modified_loss_db
        - config.required_ebn0_db
}

/// Largest dust excess (dB) that keeps the margin at or above threshold.
/// Negative when the link already fails in clear air.
pub fn max_allowed_excess_loss(config: &RadioConfig, scenario: &Scenario, geom: &LinkGeometry) -> f64 {
    link_margin(config, baseline_path_loss(scenario, geom)) - config.margin_threshold_db
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkReport {
    pub baseline_loss_db: f64,
    pub dust_attenuation_db_per_km: f64,
    pub dust_excess_db: f64,
    pub modified_loss_db: f64,
    pub margin_db: f64,
    pub link_ok: bool,
}

/// Result of a threshold search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    At(f64),
    /// The link survives across the whole search bracket.
    NoFailure,
}

impl Threshold {
    pub fn value(self) -> Option<f64> {
        match self {
            Threshold::At(v) => Some(v),
            Threshold::NoFailure => None,
        }
    }

    pub fn is_no_failure(self) -> bool {
        matches!(self, Threshold::NoFailure)
    }
}

/// Everything about a link except the storm: radio, environment and
/// modelling switches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkModel {
    pub radio: RadioConfig,
    pub scenario: Scenario,
    pub geometry: LinkGeometry,
    pub dust_mode: DustTermMode,
    pub mie: MieOptions,
}

impl LinkModel {
    pub fn new(radio: RadioConfig, scenario: Scenario, geometry: LinkGeometry) -> Self {
        Self {
            radio,
            scenario,
            geometry,
            dust_mode: DustTermMode::default(),
            mie: MieOptions::default(),
        }
    }

    /// A preset band at its own frequency.
    pub fn preset(band: Band, scenario: Scenario, distance_m: f64) -> Result<Self> {
        Ok(Self::new(
            band.radio(),
            scenario,
            LinkGeometry::new(distance_m, band.frequency_ghz())?,
        ))
    }

    pub fn baseline_loss_db(&self) -> f64 {
        baseline_path_loss(&self.scenario, &self.geometry)
    }

    pub fn max_allowed_excess_loss(&self) -> f64 {
        max_allowed_excess_loss(&self.radio, &self.scenario, &self.geometry)
    }

    pub fn attenuation_db_per_km(&self, profile: &StormProfile, eps: ComplexPermittivity) -> f64 {
        let coeffs = mie_coefficients_with(eps, self.mie);
        attenuation_from_coefficients(&coeffs, profile, self.geometry.frequency_ghz)
    }

    pub fn evaluate(&self, profile: &StormProfile, eps: ComplexPermittivity) -> LinkReport {
        self.report_for_attenuation(self.attenuation_db_per_km(profile, eps))
    }

    pub fn report_for_attenuation(&self, attenuation_db_per_km: f64) -> LinkReport {
        let baseline = self.baseline_loss_db();
        let excess = self.dust_mode.excess_db(attenuation_db_per_km, self.geometry.distance_m);
        let modified = baseline + excess;
        let margin = link_margin(&self.radio, modified);
        LinkReport {
            baseline_loss_db: baseline,
            dust_attenuation_db_per_km: attenuation_db_per_km,
            dust_excess_db: excess,
            modified_loss_db: modified,
            margin_db: margin,
            link_ok: margin >= self.radio.margin_threshold_db,
        }
    }

    /// Smallest equivalent radius (m) at which the link drops below the
    /// margin threshold, holding the profile's visibility fixed.
    pub fn threshold_particle_radius(&self, profile: &StormProfile, eps: ComplexPermittivity) -> Result<Threshold> {
        let allowed = self.max_allowed_excess_loss();
        if allowed <= 0.0 {
            return Ok(Threshold::At(0.0));
        }
        let coeffs = mie_coefficients_with(eps, self.mie);
        let excess = |radius: f64| {
            let a = attenuation_from_coefficients(&coeffs, &profile.with_particle_radius_m(radius), self.geometry.frequency_ghz);
            self.dust_mode.excess_db(a, self.geometry.distance_m)
        };
        let (lo, hi) = RADIUS_BRACKET_M;
        let (at_lo, at_hi) = (excess(lo), excess(hi));
        if !(at_lo.is_finite() && at_hi.is_finite()) || at_hi < at_lo {
            return Err(Error::NumericAssumptionViolated(format!(
                "dust excess is not increasing over radius bracket [{lo}, {hi}] m ({at_lo} -> {at_hi} dB)"
            )));
        }
        if at_hi <= allowed {
            return Ok(Threshold::NoFailure);
        }
        let fails = |radius: f64| excess(radius) > allowed;
        Ok(Threshold::At(bisect::boundary(lo, hi, RADIUS_TOLERANCE_M, fails)))
    }

    /// Visibility (km) below which the link fails, holding the profile's
    /// particle radius fixed. Returns the bracket ceiling when the link fails
    /// at every visibility.
    pub fn threshold_visibility(&self, profile: &StormProfile, eps: ComplexPermittivity) -> Result<Threshold> {
        let allowed = self.max_allowed_excess_loss();
        let coeffs = mie_coefficients_with(eps, self.mie);
        let excess = |v: f64| {
            let a = attenuation_from_coefficients(&coeffs, &profile.with_visibility_km(v), self.geometry.frequency_ghz);
            self.dust_mode.excess_db(a, self.geometry.distance_m)
        };
        let (lo, hi) = VISIBILITY_BRACKET_KM;
        let (at_lo, at_hi) = (excess(lo), excess(hi));
        if !(at_lo.is_finite() && at_hi.is_finite()) || at_lo < at_hi {
            return Err(Error::NumericAssumptionViolated(format!(
                "dust excess is not decreasing over visibility bracket [{lo}, {hi}] km ({at_lo} -> {at_hi} dB)"
            )));
        }
        if at_hi > allowed {
            return Ok(Threshold::At(hi));
        }
        if at_lo <= allowed {
            return Ok(Threshold::NoFailure);
        }
        // Bisect in log-visibility so the width is a relative tolerance.
        let fails = |log_v: f64| excess(log_v.exp()) > allowed;
        let log_v = bisect::boundary(lo.ln(), hi.ln(), VISIBILITY_REL_TOLERANCE.ln_1p(), fails);
        Ok(Threshold::At(log_v.exp()))
    }

    /// Critical radius at each visibility in `visibilities_km`; traces the
    /// failure boundary in the (visibility, radius) plane.
    pub fn failure_frontier(
        &self,
        profile: &StormProfile,
        eps: ComplexPermittivity,
        visibilities_km: &[f64],
    ) -> Result<Vec<(f64, Threshold)>> {
        visibilities_km
            .iter()
            .map(|&v| Ok((v, self.threshold_particle_radius(&profile.with_visibility_km(v), eps)?)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn noise_temperature() {
        let mut cfg = RadioConfig::dsrc();
        cfg.noise_figure_db = 0.0;
        assert_eq!(system_noise_temperature(&cfg), 290.0);
        cfg.noise_figure_db = 10.0 * 2f64.log10();
        assert_abs_diff_eq!(system_noise_temperature(&cfg), 580.0, epsilon = 1e-9);
        cfg.noise_figure_db = 6.0;
        assert_abs_diff_eq!(system_noise_temperature(&cfg), 1154.5, epsilon = 0.1);
    }

    #[test]
    fn dsrc_urban_clear_air_margin() {
        let m = link_margin(&RadioConfig::dsrc(), 96.07);
        assert_abs_diff_eq!(m, 20.59, epsilon = 0.01);
    }

    #[test]
    fn margin_is_affine_with_unit_slopes() {
        let cfg = RadioConfig::mmwave();
        let m0 = link_margin(&cfg, 100.0);
        assert_abs_diff_eq!(link_margin(&cfg, 101.0), m0 - 1.0, epsilon = 1e-12);
        let louder = RadioConfig { tx_power_dbm: cfg.tx_power_dbm + 3.0, ..cfg };
        assert_abs_diff_eq!(link_margin(&louder, 100.0), m0 + 3.0, epsilon = 1e-12);
    }

    #[test]
    fn exact_threshold_config_allows_zero_excess() {
        let base = LinkModel::preset(Band::Dsrc, Scenario::urban(), 390.0).unwrap();
        let clear = link_margin(&base.radio, base.baseline_loss_db());
        let radio = RadioConfig { margin_threshold_db: clear, ..base.radio };
        let model = LinkModel { radio, ..base };
        assert_eq!(model.max_allowed_excess_loss(), 0.0);
        let eps = ComplexPermittivity::new(6.3485, 0.0929).unwrap();
        let profile = StormProfile::new(0.001, 0.0).unwrap();
        assert_eq!(model.threshold_particle_radius(&profile, eps).unwrap(), Threshold::At(0.0));
    }

    #[test]
    fn presets_and_names() {
        assert_eq!("dsrc-5.9".parse::<Band>().unwrap(), Band::Dsrc);
        assert_eq!(Band::Mmwave.to_string(), "mmwave-28");
        assert!("lte".parse::<Band>().is_err());
        assert_abs_diff_eq!(RadioConfig::dsrc().eirp_dbm(), 36.9, epsilon = 1e-12);
        assert_abs_diff_eq!(RadioConfig::mmwave().eirp_dbm(), 50.4, epsilon = 1e-12);
        assert!(RadioConfig { data_rate_bps: 0.0, ..RadioConfig::dsrc() }.validate().is_err());
        assert!(RadioConfig { antenna_temperature_k: -1.0, ..RadioConfig::dsrc() }.validate().is_err());
        assert!(RadioConfig::mmwave().validate().is_ok());
    }

    #[test]
    fn report_invariants() {
        let model = LinkModel::preset(Band::Mmwave, Scenario::highway(), 390.0).unwrap();
        for a in [0.0, 1.0, 24.0, 35.0, 36.0, 500.0] {
            let r = model.report_for_attenuation(a);
            assert!((r.modified_loss_db - (r.baseline_loss_db + r.dust_excess_db)).abs() < 1e-9);
            assert_eq!(r.link_ok, r.margin_db >= 10.0);
        }
    }

    #[test]
    fn clear_air_failing_link() {
        let radio = RadioConfig { tx_power_dbm: -20.0, ..RadioConfig::dsrc() };
        let model = LinkModel::new(radio, Scenario::urban(), LinkGeometry::new(390.0, 5.9).unwrap());
        assert!(model.max_allowed_excess_loss() < 0.0);
        let eps = ComplexPermittivity::new(6.3485, 0.0929).unwrap();
        let profile = StormProfile::new(1.0, 40e-6).unwrap();
        assert_eq!(model.threshold_particle_radius(&profile, eps).unwrap(), Threshold::At(0.0));
        assert_eq!(model.threshold_visibility(&profile, eps).unwrap(), Threshold::At(100.0));
    }

    #[test]
    fn paper_units_never_fail_in_bracket() {
        // With the radius in metres the dust term stays far below the budget.
        let eps = ComplexPermittivity::new(6.3485, 0.0929).unwrap();
        let model = LinkModel::preset(Band::Mmwave, Scenario::urban(), 390.0).unwrap();
        let profile = StormProfile::new(0.001, 0.0).unwrap();
        assert_eq!(model.threshold_particle_radius(&profile, eps).unwrap(), Threshold::NoFailure);
    }

    #[test]
    fn thresholds_sit_on_the_boundary() {
        let eps = ComplexPermittivity::new(7.14866, 0.55346).unwrap();
        let model = LinkModel::preset(Band::Mmwave, Scenario::highway(), 390.0).unwrap();
        let profile = StormProfile::new(0.001, 40e-6).unwrap().with_size_unit_scale(1e3);

        let a = model.threshold_particle_radius(&profile, eps).unwrap().value().unwrap();
        assert!(model.evaluate(&profile.with_particle_radius_m(a - 2e-8), eps).link_ok);
        assert!(!model.evaluate(&profile.with_particle_radius_m(a + 2e-8), eps).link_ok);

        let v = model.threshold_visibility(&profile, eps).unwrap().value().unwrap();
        assert!(!model.evaluate(&profile.with_visibility_km(v * (1.0 - 2e-6)), eps).link_ok);
        assert!(model.evaluate(&profile.with_visibility_km(v * (1.0 + 2e-6)), eps).link_ok);
    }

    #[test]
    fn frontier_radius_grows_with_visibility() {
        let eps = ComplexPermittivity::new(6.3485, 0.0929).unwrap();
        let model = LinkModel::preset(Band::Mmwave, Scenario::urban(), 390.0).unwrap();
        let profile = StormProfile::new(0.001, 0.0).unwrap().with_size_unit_scale(1e3);
        let frontier = model.failure_frontier(&profile, eps, &[0.001, 0.01, 0.1]).unwrap();
        let radii: Vec<f64> = frontier.iter().map(|(_, t)| t.value().unwrap()).collect();
        assert!(radii.windows(2).all(|w| w[0] < w[1]), "{radii:?}");
    }
}
