//! Dust and sand storm impairment of vehicle-to-vehicle radio links.
//!
//! The pipeline runs permittivity (regional samples, humidity) into the
//! specific attenuation of the storm, adds it to an urban or highway path
//! loss, and evaluates the link margin of a DSRC (5.9 GHz) or mm-wave
//! (28 GHz) radio. [`linkbudget::LinkModel`] also inverts the margin to find
//! the particle radius and visibility at which the link stops closing.
//!
//! [`config`], [`sweep`] and [`plot`] back the `dustlink` command-line tool.

pub mod attenuation;
mod bisect;
pub mod config;
pub mod error;
pub mod linkbudget;
pub mod par;
pub mod pathloss;
pub mod permittivity;
pub mod plot;
pub mod sweep;

pub use attenuation::{
    mie_coefficients, mie_coefficients_with, specific_attenuation, specific_attenuation_with,
    visibility_at_height, MieCoefficients, MieOptions, StormProfile,
};
pub use error::{Error, Result};
pub use linkbudget::{
    link_margin, max_allowed_excess_loss, noise_power_dbm, system_noise_temperature, Band, LinkModel,
    LinkReport, RadioConfig, Threshold,
};
pub use pathloss::{
    baseline_path_loss, modified_path_loss, DustTermMode, LinkGeometry, LogNormalShadowing, Scenario,
    ScenarioKind,
};
pub use permittivity::{
    humidity_adjusted_permittivity, looyenga_mix, mean_density, mean_permittivity, ComplexPermittivity,
    HumidityModel, MineralComponent, SoilSample,
};
