//! Complex permittivity of dust and sand media.
//!
//! Permittivities are stored as a real dielectric constant `eps1` and a
//! non-negative loss factor `eps2`, standing for `eps1 - j*eps2`. Two
//! reductions are provided and they are not interchangeable:
//! [`looyenga_mix`] combines the constituents of one sample by volume, while
//! [`mean_permittivity`] averages already-mixed samples component-wise.

use std::io::Read;
use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;

use crate::error::{invalid, Result};

/// Tolerance on the sum of volume fractions in a mixture.
pub const FRACTION_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexPermittivity {
    pub eps1: f64,
    pub eps2: f64,
}

impl ComplexPermittivity {
    pub fn new(eps1: f64, eps2: f64) -> Result<Self> {
        let eps = Self { eps1, eps2 };
        eps.validate()?;
        Ok(eps)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps1.is_finite() && self.eps1 >= 1.0) {
            return Err(invalid(format!("eps1 must be >= 1, got {}", self.eps1)));
        }
        if !(self.eps2.is_finite() && self.eps2 >= 0.0) {
            return Err(invalid(format!("eps2 must be >= 0, got {}", self.eps2)));
        }
        Ok(())
    }

    /// Loss tangent `eps2 / eps1`.
    pub fn loss_tangent(&self) -> f64 {
        self.eps2 / self.eps1
    }

    // The loss is carried on the positive imaginary axis so every value sits
    // in the first quadrant, well away from the cube-root branch cut.
    fn to_complex(self) -> Complex64 {
        Complex64::new(self.eps1, self.eps2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MineralComponent {
    pub permittivity: ComplexPermittivity,
    pub volume_fraction: f64,
}

impl MineralComponent {
    pub fn new(permittivity: ComplexPermittivity, volume_fraction: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&volume_fraction) {
            return Err(invalid(format!(
                "volume fraction must lie in [0, 1], got {volume_fraction}"
            )));
        }
        permittivity.validate()?;
        Ok(Self {
            permittivity,
            volume_fraction,
        })
    }
}

/// One row of a sample table.
#[derive(Debug, Clone, PartialEq)]
pub struct SoilSample {
    pub id: String,
    /// g/cm³
    pub density: f64,
    pub permittivity: ComplexPermittivity,
}

#[derive(Deserialize)]
struct SampleRow {
    id: String,
    density_g_cm3: f64,
    eps1: f64,
    eps2: f64,
}

impl From<SampleRow> for SoilSample {
    fn from(r: SampleRow) -> Self {
        Self {
            id: r.id,
            density: r.density_g_cm3,
            permittivity: ComplexPermittivity {
                eps1: r.eps1,
                eps2: r.eps2,
            },
        }
    }
}

impl SoilSample {
    pub fn new(id: impl Into<String>, density: f64, permittivity: ComplexPermittivity) -> Result<Self> {
        let sample = Self {
            id: id.into(),
            density,
            permittivity,
        };
        sample.validate()?;
        Ok(sample)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.density.is_finite() && self.density > 0.0) {
            return Err(invalid(format!(
                "sample {}: density must be > 0, got {}",
                self.id, self.density
            )));
        }
        self.permittivity
            .validate()
            .map_err(|e| invalid(format!("sample {}: {e}", self.id)))
    }
}

/// Effective permittivity of a mixture: `eps_m^(1/3) = sum(v_i * eps_i^(1/3))`,
/// using the principal complex cube root.
pub fn looyenga_mix(components: &[MineralComponent]) -> Result<ComplexPermittivity> {
    if components.is_empty() {
        return Err(invalid("mixture has no components"));
    }
    let total: f64 = components.iter().map(|c| c.volume_fraction).sum();
    if (total - 1.0).abs() > FRACTION_SUM_TOLERANCE {
        return Err(invalid(format!(
            "volume fractions sum to {total}, expected 1"
        )));
    }
    for c in components {
        if !(0.0..=1.0).contains(&c.volume_fraction) {
            return Err(invalid(format!(
                "volume fraction must lie in [0, 1], got {}",
                c.volume_fraction
            )));
        }
        c.permittivity.validate()?;
    }

    let root: Complex64 = components
        .iter()
        .map(|c| c.permittivity.to_complex().cbrt() * c.volume_fraction)
        .sum();
    let mixed = root * root * root;
    Ok(ComplexPermittivity {
        eps1: mixed.re,
        eps2: mixed.im.max(0.0),
    })
}

/// Component-wise arithmetic mean across samples.
pub fn mean_permittivity(samples: &[SoilSample]) -> Result<ComplexPermittivity> {
    if samples.is_empty() {
        return Err(invalid("no samples to average"));
    }
    let n = samples.len() as f64;
    let (s1, s2) = samples.iter().fold((0.0, 0.0), |(a, b), s| {
        (a + s.permittivity.eps1, b + s.permittivity.eps2)
    });
    Ok(ComplexPermittivity {
        eps1: s1 / n,
        eps2: s2 / n,
    })
}

/// Arithmetic mean density in g/cm³.
pub fn mean_density(samples: &[SoilSample]) -> Result<f64> {
    if samples.is_empty() {
        return Err(invalid("no samples to average"));
    }
    Ok(samples.iter().map(|s| s.density).sum::<f64>() / samples.len() as f64)
}

/// Cubic humidity dependence of the regional mean permittivity.
///
/// `eps(H) = base + k1*H + k2*H^2 + k3*H^3` for each component, H in percent.
/// Only the base values are expected to change between regions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HumidityModel {
    pub base: ComplexPermittivity,
    pub eps1_terms: [f64; 3],
    pub eps2_terms: [f64; 3],
}

impl Default for HumidityModel {
    fn default() -> Self {
        Self {
            base: ComplexPermittivity {
                eps1: 6.3485,
                eps2: 0.0929,
            },
            eps1_terms: [0.04, -7.78e-4, 5.56e-6],
            eps2_terms: [0.02, -3.71e-4, 2.76e-6],
        }
    }
}

impl HumidityModel {
    pub fn with_base(base: ComplexPermittivity) -> Self {
        Self {
            base,
            ..Self::default()
        }
    }

    pub fn permittivity(&self, humidity_pct: f64) -> Result<ComplexPermittivity> {
        if !(0.0..=100.0).contains(&humidity_pct) {
            return Err(invalid(format!(
                "humidity must lie in [0, 100] %, got {humidity_pct}"
            )));
        }
        let cubic = |c0: f64, [k1, k2, k3]: [f64; 3]| {
            c0 + humidity_pct * (k1 + humidity_pct * (k2 + humidity_pct * k3))
        };
        ComplexPermittivity::new(
            cubic(self.base.eps1, self.eps1_terms),
            cubic(self.base.eps2, self.eps2_terms),
        )
    }
}

/// Humidity-adjusted permittivity with the default regional constants.
pub fn humidity_adjusted_permittivity(humidity_pct: f64) -> Result<ComplexPermittivity> {
    HumidityModel::default().permittivity(humidity_pct)
}

const SAMPLE_TABLE: [(&str, f64, f64, f64); 9] = [
    ("1", 2.5426, 5.0384, 0.0509),
    ("2", 2.56857, 5.4851, 0.0562),
    ("3", 2.6138, 5.4801, 0.0694),
    ("4", 2.62714, 7.5929, 0.1140),
    ("5", 2.4202, 6.7899, 0.1296),
    ("6", 2.9232, 5.4003, 0.0787),
    ("7", 2.4732, 7.4707, 0.1344),
    ("8", 2.5425, 5.5713, 0.0704),
    ("9", 2.4764, 8.3078, 0.1329),
];

/// The nine southern-Libya dust samples (density and mixed permittivity).
pub fn libya_samples() -> Vec<SoilSample> {
    SAMPLE_TABLE
        .iter()
        .map(|&(id, density, eps1, eps2)| SoilSample {
            id: id.to_string(),
            density,
            permittivity: ComplexPermittivity { eps1, eps2 },
        })
        .collect()
}

/// Reads a sample table with header `id,density_g_cm3,eps1,eps2`.
pub fn read_samples<R: Read>(reader: R) -> Result<Vec<SoilSample>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let expected = ["id", "density_g_cm3", "eps1", "eps2"];
    if headers.iter().ne(expected.iter().copied()) {
        return Err(invalid(format!(
            "sample table header must be `{}`, got `{}`",
            expected.join(","),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut samples = Vec::new();
    for row in rdr.deserialize() {
        let row: SampleRow = row?;
        let sample = SoilSample::from(row);
        sample.validate()?;
        samples.push(sample);
    }
    Ok(samples)
}

pub fn load_samples(path: impl AsRef<Path>) -> Result<Vec<SoilSample>> {
    read_samples(std::fs::File::open(path)?)
}
