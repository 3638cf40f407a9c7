//! Level shifts from the rotation of the Earth.
//!
//! In the rotating frame a neutron moving North–South with velocity `v_ns`
//! feels the extra potential `−Ω_E cosθ m v_ns ẑ`. Its first-order effect on
//! level n is `−Ω_E cosθ m v_ns ⟨n|ẑ|n⟩`; an East–West mover is unaffected,
//! so the spread between the two directions blurs each level.

use serde::{Deserialize, Serialize};

use crate::eigenstates::EigenstateTable;
use crate::error::{Error, Result};

/// cos of a mid-latitude site, about 45° N.
pub const DEFAULT_LATITUDE_COS: f64 = 0.7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationContext {
    pub latitude_cos: f64,
    /// Signed North–South velocity component in m/s.
    pub v_ns: f64,
    pub earth_rate: f64,
}

impl RotationContext {
    pub fn new(latitude_cos: f64, v_ns: f64, earth_rate: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&latitude_cos) {
            return Err(Error::domain(format!(
                "cos(latitude) must lie in [0, 1], got {latitude_cos}"
            )));
        }
        if !v_ns.is_finite() || !(earth_rate >= 0.0) {
            return Err(Error::domain(
                "rotation context needs finite velocity and rate",
            ));
        }
        Ok(Self {
            latitude_cos,
            v_ns,
            earth_rate,
        })
    }

    pub fn with_velocity(&self, v_ns: f64) -> Self {
        Self { v_ns, ..*self }
    }
}

/// First-order energy shift of level `n` in joules.
pub fn rotation_energy_shift(
    table: &EigenstateTable,
    n: usize,
    ctx: &RotationContext,
) -> Result<f64> {
    let mean = table.matrix_element_z(n, n)?;
    let m = table.constants().neutron_mass_kg;
    Ok(-ctx.earth_rate * ctx.latitude_cos * m * ctx.v_ns * mean)
}

/// The same shift read as a change of the effective gravity,
/// `g_eff = g − Ω_E cosθ v_ns`, with energies scaling as `g^{2/3}`.
pub fn rotation_energy_shift_effective_g(
    table: &EigenstateTable,
    n: usize,
    ctx: &RotationContext,
) -> Result<f64> {
    let g = table.constants().gravity_m_s2;
    let ratio = 1.0 - ctx.earth_rate * ctx.latitude_cos * ctx.v_ns / g;
    if !(ratio > 0.0) {
        return Err(Error::domain("effective gravity must stay positive"));
    }
    // (1+ε)^{2/3} − 1 without cancellation
    let growth = ((2.0 / 3.0) * ratio.ln()).exp_m1();
    Ok(table.energy(n)? * growth)
}

/// Frequency spread `|ΔE(v_ns = speed)|/h` between North–South and
/// East–West travellers at the given speed.
pub fn rotation_frequency_blur(
    table: &EigenstateTable,
    n: usize,
    speed: f64,
    ctx: &RotationContext,
) -> Result<f64> {
    if !(speed > 0.0) {
        return Err(Error::domain(format!(
            "speed must be positive, got {speed}"
        )));
    }
    let shift = rotation_energy_shift(table, n, &ctx.with_velocity(speed))?;
    Ok(shift.abs() / table.constants().planck_h())
}

/// Splitting `ħΩ_E` between spin states from the rotation of the frame.
pub fn rotational_zeeman_shift(table: &EigenstateTable) -> f64 {
    let c = table.constants();
    c.hbar_j_s * c.earth_rotation_rate_rad_s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::PEV;
    use std::sync::OnceLock;

    fn table() -> &'static EigenstateTable {
        static T: OnceLock<EigenstateTable> = OnceLock::new();
        T.get_or_init(|| EigenstateTable::new(Default::default(), 30).unwrap())
    }

    fn ctx(v: f64) -> RotationContext {
        RotationContext::new(DEFAULT_LATITUDE_COS, v, 7.2921e-5).unwrap()
    }

    #[test]
    fn east_west_and_polar_limits_vanish() {
        let t = table();
        assert_eq!(rotation_energy_shift(t, 1, &ctx(0.0)).unwrap(), 0.0);
        let polar = RotationContext::new(0.0, 5.0, 7.2921e-5).unwrap();
        assert_eq!(rotation_energy_shift(t, 1, &polar).unwrap(), 0.0);
    }

    #[test]
    fn ground_state_relative_shift_is_order_1e_5() {
        let t = table();
        let rel = rotation_energy_shift(t, 1, &ctx(5.0)).unwrap().abs() / t.energy(1).unwrap();
        assert!(rel > 1e-6 && rel < 1e-4, "{rel}");
    }

    #[test]
    fn effective_gravity_reading_agrees_to_first_order() {
        let t = table();
        for n in [1, 5, 20] {
            let a = rotation_energy_shift(t, n, &ctx(5.0)).unwrap();
            let b = rotation_energy_shift_effective_g(t, n, &ctx(5.0)).unwrap();
            // second-order term is ε/6 relative, ε = Ω cosθ v / g
            let eps = 7.2921e-5 * DEFAULT_LATITUDE_COS * 5.0 / t.constants().gravity_m_s2;
            assert!(
                ((a - b) / a).abs() < eps / 6.0 * 1.01,
                "n = {n}: {a} vs {b}"
            );
        }
    }

    #[test]
    fn blur_scales_with_turning_point() {
        let t = table();
        let c = ctx(0.0);
        let b1 = rotation_frequency_blur(t, 1, 5.0, &c).unwrap();
        let b10 = rotation_frequency_blur(t, 10, 5.0, &c).unwrap();
        let expected = t.lambda(10).unwrap() / t.lambda(1).unwrap();
        assert!((b10 / b1 - expected).abs() < 1e-9);
        let direct =
            rotation_energy_shift(t, 1, &ctx(5.0)).unwrap().abs() / t.constants().planck_h();
        assert_eq!(b1, direct);
        assert!(rotation_frequency_blur(t, 1, 0.0, &c).is_err());
    }

    #[test]
    fn zeeman_shift_is_tiny() {
        let t = table();
        let z = rotational_zeeman_shift(t);
        let pev = z / PEV;
        assert!(pev > 3e-8 && pev < 1.2e-7, "{pev}");
        assert!(z / t.energy(1).unwrap() < 1e-7);
    }

    #[test]
    fn rejects_bad_latitude() {
        assert!(RotationContext::new(1.5, 0.0, 1e-5).is_err());
    }
}
