//! Specific attenuation of a dust/sand storm, from the small-particle
//! expansion of Mie scattering:
//!
//! ```text
//! A = (s / V) * (C1 + C2 s^2 + C3 s^3)   [dB/km],   s = scale * a_e * f
//! ```
//!
//! with `a_e` the equivalent particle radius in metres, `f` in GHz and `V`
//! the visibility in km at the evaluation height.

use crate::error::{invalid, Result};
use crate::permittivity::ComplexPermittivity;

/// Storm conditions along the link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StormProfile {
    /// Visibility `V0` measured at `reference_height_m`, km.
    pub reference_visibility_km: f64,
    pub reference_height_m: f64,
    /// Height at which attenuation is evaluated, m.
    pub height_m: f64,
    /// Equivalent particle radius, m.
    pub particle_radius_m: f64,
    pub humidity_pct: f64,
    /// Visibility-height exponent on `V`.
    pub gamma: f64,
    /// Visibility-height exponent on `h / h0`.
    pub b: f64,
    /// Carried for completeness; no formula in this crate consumes it.
    pub c_const: f64,
    /// Carried for completeness; no formula in this crate consumes it.
    pub g_const: f64,
    /// Multiplier on the size-frequency product `a_e * f`. 1.0 keeps metres
    /// times GHz; 1e3 reads the radius in millimetres.
    pub size_unit_scale: f64,
}

impl Default for StormProfile {
    fn default() -> Self {
        Self {
            reference_visibility_km: 1.0,
            reference_height_m: 1.0,
            height_m: 1.0,
            particle_radius_m: 0.0,
            humidity_pct: 0.0,
            gamma: 1.07,
            b: 0.28,
            c_const: 2.3e-5,
            g_const: 1.07,
            size_unit_scale: 1.0,
        }
    }
}

impl StormProfile {
    pub fn new(reference_visibility_km: f64, particle_radius_m: f64) -> Result<Self> {
        let p = Self {
            reference_visibility_km,
            particle_radius_m,
            ..Self::default()
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(invalid(format!("{name} must be > 0, got {v}")))
            }
        };
        positive("reference visibility", self.reference_visibility_km)?;
        positive("reference height", self.reference_height_m)?;
        positive("height", self.height_m)?;
        positive("gamma", self.gamma)?;
        positive("size unit scale", self.size_unit_scale)?;
        if !(self.particle_radius_m.is_finite() && self.particle_radius_m >= 0.0) {
            return Err(invalid(format!(
                "particle radius must be >= 0, got {}",
                self.particle_radius_m
            )));
        }
        if !(0.0..=100.0).contains(&self.humidity_pct) {
            return Err(invalid(format!(
                "humidity must lie in [0, 100] %, got {}",
                self.humidity_pct
            )));
        }
        if !self.b.is_finite() {
            return Err(invalid("b must be finite"));
        }
        Ok(())
    }

    pub fn with_visibility_km(mut self, v: f64) -> Self {
        self.reference_visibility_km = v;
        self
    }

    pub fn with_particle_radius_m(mut self, a: f64) -> Self {
        self.particle_radius_m = a;
        self
    }

    pub fn with_humidity(mut self, h: f64) -> Self {
        self.humidity_pct = h;
        self
    }

    pub fn with_size_unit_scale(mut self, scale: f64) -> Self {
        self.size_unit_scale = scale;
        self
    }
}

/// `V = V0 * (h / h0)^(b / gamma)`.
pub fn visibility_at_height(profile: &StormProfile) -> f64 {
    if profile.height_m == profile.reference_height_m {
        return profile.reference_visibility_km;
    }
    profile.reference_visibility_km
        * (profile.height_m / profile.reference_height_m).powf(profile.b / profile.gamma)
}

/// Selects between the corrected and the as-printed coefficient formulas.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MieOptions {
    /// Use `67 eps1^2` as the leading C2 numerator term instead of `7 eps1^2`.
    pub c2_literal: bool,
    /// Drop the `eps2^2` factor on the middle C3 numerator term.
    pub c3_literal: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MieCoefficients {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl MieCoefficients {
    /// `s * (C1 + C2 s^2 + C3 s^3)`, the attenuation before dividing by visibility.
    #[inline]
    pub fn series(&self, s: f64) -> f64 {
        let s2 = s * s;
        s * (self.c1 + s2 * (self.c2 + self.c3 * s))
    }
}

pub fn mie_coefficients(eps: ComplexPermittivity) -> MieCoefficients {
    mie_coefficients_with(eps, MieOptions::default())
}

pub fn mie_coefficients_with(eps: ComplexPermittivity, opts: MieOptions) -> MieCoefficients {
    let ComplexPermittivity { eps1: e1, eps2: e2 } = eps;
    let e2_sq = e2 * e2;
    let den = (e1 + 2.0).powi(2) + e2_sq;

    let c1 = 6.0 * e2 / den;

    let lead = if opts.c2_literal { 67.0 } else { 7.0 };
    let c2 = e2
        * ((lead * e1 * e1 + 7.0 * e2_sq + 4.0 * e1 - 20.0) / (5.0 * den * den)
            + 1.0 / 15.0
            + 5.0 / (3.0 * ((2.0 * e1 + 3.0).powi(2) + 4.0 * e2_sq)));

    let mut middle = 2.0 * (e1 - 1.0) * (e1 + 2.0) - 9.0;
    if !opts.c3_literal {
        middle *= e2_sq;
    }
    let c3 = 4.0 / 3.0 * (((e1 - 1.0).powi(2) * (e1 + 2.0) + middle + e2_sq * e2_sq) / (den * den));

    MieCoefficients { c1, c2, c3 }
}

/// Dust/sand specific attenuation in dB/km.
pub fn specific_attenuation(profile: &StormProfile, frequency_ghz: f64, eps: ComplexPermittivity) -> f64 {
    specific_attenuation_with(profile, frequency_ghz, eps, MieOptions::default())
}

pub fn specific_attenuation_with(
    profile: &StormProfile,
    frequency_ghz: f64,
    eps: ComplexPermittivity,
    opts: MieOptions,
) -> f64 {
    attenuation_from_coefficients(&mie_coefficients_with(eps, opts), profile, frequency_ghz)
}

/// Same as [`specific_attenuation`] with precomputed coefficients, for
/// inner loops where only radius or visibility change.
pub fn attenuation_from_coefficients(coeffs: &MieCoefficients, profile: &StormProfile, frequency_ghz: f64) -> f64 {
    let s = profile.size_unit_scale * profile.particle_radius_m * frequency_ghz;
    coeffs.series(s) / visibility_at_height(profile)
}
