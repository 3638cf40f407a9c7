//! Geometric loss channels of a mirror trap: waviness of the bottom mirror,
//! tilt of the side walls and the brink at the mirror edges.

mod freefall;
mod psd;
mod wall;
mod waviness;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use freefall::{
    corner_loss_probability, corner_rate, free_fall_direct, free_fall_evolve, FreeFallOptions,
    WaveGrid, MAX_FALL_TIME,
};
pub use psd::{
    fit_power_law, periodogram, psd_estimate, psd_eval, synthesize_profile, PowerLawFit, PsdModel,
    SurfaceProfile, Window,
};
pub use wall::{kick_wavenumber, wall_escape_probability, wall_rate};
pub use waviness::{waviness_rate, waviness_total, WavinessTotal};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrapGeometry {
    pub mirror_length_m: f64,
    /// Angle between the side walls and the vertical.
    pub wall_angle_rad: f64,
    pub brink_size_m: f64,
    /// Horizontal neutron velocity.
    pub velocity_m_s: f64,
    /// Reflection on the side wall doubles the apparent brink.
    pub effective_hole_factor: f64,
}

impl Default for TrapGeometry {
    fn default() -> Self {
        Self {
            mirror_length_m: 0.30,
            wall_angle_rad: 1e-5,
            brink_size_m: 50e-6,
            velocity_m_s: 5.0,
            effective_hole_factor: 2.0,
        }
    }
}

impl TrapGeometry {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("mirror_length_m", self.mirror_length_m),
            ("velocity_m_s", self.velocity_m_s),
            ("effective_hole_factor", self.effective_hole_factor),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!(
                    "geometry.{name} must be positive, got {v}"
                )));
            }
        }
        if !(self.brink_size_m.is_finite() && self.brink_size_m >= 0.0) {
            return Err(Error::Config(format!(
                "geometry.brink_size_m must be non-negative, got {}",
                self.brink_size_m
            )));
        }
        check_wall_angle(self.wall_angle_rad).map_err(|_| {
            Error::Config(format!(
                "geometry.wall_angle_rad must lie in [0, 0.1), got {}",
                self.wall_angle_rad
            ))
        })
    }

    pub fn effective_hole(&self) -> f64 {
        self.effective_hole_factor * self.brink_size_m
    }

    /// Time spent above the brink, `effective hole / v`.
    pub fn fall_time(&self) -> f64 {
        self.effective_hole() / self.velocity_m_s
    }

    /// Wall collisions per second, `v/L`.
    pub fn collision_rate(&self) -> f64 {
        self.velocity_m_s / self.mirror_length_m
    }
}

pub(crate) fn check_wall_angle(alpha: f64) -> Result<()> {
    if !(0.0..0.1).contains(&alpha) {
        return Err(Error::domain(format!(
            "wall angle must lie in [0, 0.1) rad, got {alpha}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_fall_time_is_20_us() {
        let g = TrapGeometry::default();
        g.validate().unwrap();
        assert!((g.fall_time() - 20e-6).abs() < 1e-18);
        assert!((g.effective_hole() - 100e-6).abs() < 1e-18);
    }

    #[test]
    fn validation_names_the_field() {
        let g = TrapGeometry {
            mirror_length_m: -1.0,
            ..Default::default()
        };
        assert!(g
            .validate()
            .unwrap_err()
            .to_string()
            .contains("mirror_length_m"));
        let g = TrapGeometry {
            wall_angle_rad: 0.2,
            ..Default::default()
        };
        assert!(g
            .validate()
            .unwrap_err()
            .to_string()
            .contains("wall_angle_rad"));
    }
}
