//! Physical constants, gravitational scale factors and display-unit conversions.
//!
//! Everything inside the crate is SI. The `*_PER_*` conversions are only used
//! when a value is written out for humans.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const ELECTRON_VOLT: f64 = 1.602_176_634e-19;
/// Joules per peV.
pub const PEV: f64 = ELECTRON_VOLT * 1e-12;
pub const MICROMETRE: f64 = 1e-6;
/// One nm²·mm expressed in m³.
pub const NM2_MM: f64 = 1e-21;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalConstants {
    pub neutron_mass_kg: f64,
    pub gravity_m_s2: f64,
    pub hbar_j_s: f64,
    /// Magnitude of the neutron magnetic moment.
    pub neutron_magnetic_moment_j_t: f64,
    pub earth_rotation_rate_rad_s: f64,
    pub beta_lifetime_s: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            neutron_mass_kg: 1.674_927_498_04e-27,
            gravity_m_s2: 9.806_65,
            hbar_j_s: 1.054_571_817e-34,
            neutron_magnetic_moment_j_t: 9.662_365_1e-27,
            earth_rotation_rate_rad_s: 7.2921e-5,
            beta_lifetime_s: 886.0,
        }
    }
}

impl PhysicalConstants {
    pub fn planck_h(&self) -> f64 {
        2.0 * PI * self.hbar_j_s
    }

    pub fn beta_rate(&self) -> f64 {
        1.0 / self.beta_lifetime_s
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("neutron_mass_kg", self.neutron_mass_kg),
            ("gravity_m_s2", self.gravity_m_s2),
            ("hbar_j_s", self.hbar_j_s),
            (
                "neutron_magnetic_moment_j_t",
                self.neutron_magnetic_moment_j_t,
            ),
            ("earth_rotation_rate_rad_s", self.earth_rotation_rate_rad_s),
            ("beta_lifetime_s", self.beta_lifetime_s),
        ];
        for (name, value) in fields {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::Config(format!(
                    "constants.{name} must be finite and positive, got {value}"
                )));
            }
        }
        Ok(())
    }

    pub fn scales(&self) -> GravityScales {
        GravityScales::new(self)
    }
}

/// Natural units of a particle bound by gravity above a hard floor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GravityScales {
    /// (ħ²/(2m²g))^(1/3)
    pub z0: f64,
    /// m·g·z0
    pub e0: f64,
    /// e0 / h
    pub f0: f64,
}

impl GravityScales {
    pub fn new(c: &PhysicalConstants) -> Self {
        let m = c.neutron_mass_kg;
        let z0 = (c.hbar_j_s * c.hbar_j_s / (2.0 * m * m * c.gravity_m_s2)).cbrt();
        let e0 = m * c.gravity_m_s2 * z0;
        Self {
            z0,
            e0,
            f0: e0 / c.planck_h(),
        }
    }
}
