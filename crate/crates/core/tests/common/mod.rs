//! Brute-force references for the threshold searches. They only call the
//! forward model; the bracketing logic under test is not used.
#![allow(dead_code)]

use dustlink::linkbudget::{LinkModel, VISIBILITY_BRACKET_KM};
use dustlink::{Band, ComplexPermittivity, DustTermMode, HumidityModel, Scenario, ScenarioKind, StormProfile, Threshold};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const RADIUS_GRID_STEP_M: f64 = 1e-6;
pub const RADIUS_GRID_MAX_M: f64 = 5e-3;
pub const VISIBILITY_GRID_POINTS: usize = 6001;

/// First radius on a 1 um grid at which the link fails.
pub fn radius_grid_scan(model: &LinkModel, profile: &StormProfile, eps: ComplexPermittivity) -> Option<f64> {
    let n = (RADIUS_GRID_MAX_M / RADIUS_GRID_STEP_M).round() as usize;
    (0..=n)
        .map(|i| i as f64 * RADIUS_GRID_STEP_M)
        .find(|&a| !model.evaluate(&profile.with_particle_radius_m(a), eps).link_ok)
}

pub fn visibility_grid() -> Vec<f64> {
    let (lo, hi) = VISIBILITY_BRACKET_KM;
    let n = VISIBILITY_GRID_POINTS;
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect()
}

/// Largest grid visibility at which the link still fails.
pub fn visibility_grid_scan(model: &LinkModel, profile: &StormProfile, eps: ComplexPermittivity) -> Option<f64> {
    visibility_grid()
        .into_iter()
        .rev()
        .find(|&v| !model.evaluate(&profile.with_visibility_km(v), eps).link_ok)
}

pub fn visibility_grid_ratio() -> f64 {
    let (lo, hi) = VISIBILITY_BRACKET_KM;
    (hi / lo).powf(1.0 / (VISIBILITY_GRID_POINTS - 1) as f64)
}

#[derive(Debug, Clone, Copy)]
pub struct RandomCase {
    pub model: LinkModel,
    pub profile: StormProfile,
    pub eps: ComplexPermittivity,
}

pub fn random_case(rng: &mut ChaCha8Rng) -> RandomCase {
    let band = if rng.gen_bool(0.5) { Band::Dsrc } else { Band::Mmwave };
    let kind = if rng.gen_bool(0.5) { ScenarioKind::Urban } else { ScenarioKind::Highway };
    let scenario = Scenario::new(kind).with_shadowing(rng.gen_range(0.0..4.0)).unwrap();
    let distance = rng.gen_range(50.0..800.0);
    let mut model = LinkModel::preset(band, scenario, distance).unwrap();
    if rng.gen_bool(0.25) {
        model.dust_mode = DustTermMode::AsPrinted;
    }
    let humidity = rng.gen_range(0.0..=100.0);
    let eps = HumidityModel::default().permittivity(humidity).unwrap();
    let profile = StormProfile::new(10f64.powf(rng.gen_range(-3.5..-1.0)), rng.gen_range(5e-6..300e-6))
        .unwrap()
        .with_humidity(humidity)
        .with_size_unit_scale(10f64.powf(rng.gen_range(2.5..3.5)));
    RandomCase { model, profile, eps }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Bisection radius vs grid scan: both must agree within one grid step.
pub fn radius_agrees(case: &RandomCase) -> Result<(), String> {
    let t = case.model.threshold_particle_radius(&case.profile, case.eps).map_err(|e| e.to_string())?;
    let grid = radius_grid_scan(&case.model, &case.profile, case.eps);
    match (t, grid) {
        (Threshold::NoFailure, None) => Ok(()),
        (Threshold::At(a), Some(g)) if (a - g).abs() <= RADIUS_GRID_STEP_M => Ok(()),
        other => Err(format!("radius mismatch: {other:?}")),
    }
}

pub fn visibility_agrees(case: &RandomCase) -> Result<(), String> {
    let t = case.model.threshold_visibility(&case.profile, case.eps).map_err(|e| e.to_string())?;
    let grid = visibility_grid_scan(&case.model, &case.profile, case.eps);
    let ratio = visibility_grid_ratio();
    match (t, grid) {
        (Threshold::NoFailure, None) => Ok(()),
        (Threshold::At(v), Some(g)) if (v / g).ln().abs() <= ratio.ln() * (1.0 + 1e-9) => Ok(()),
        other => Err(format!("visibility mismatch: {other:?}")),
    }
}
