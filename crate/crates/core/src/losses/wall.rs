//! Escape from a bound state when the neutron bounces off a slightly tilted
//! side wall. The collision is treated as an instantaneous vertical kick
//! `q = k sin 2α` with `k = mv/ħ`, so the state survives with amplitude
//! `⟨N|e^{iqẑ}|N⟩`.

use super::{check_wall_angle, TrapGeometry};
use crate::eigenstates::EigenstateTable;
use crate::error::{Error, Result};

/// Vertical wavenumber transferred by one wall collision.
pub fn kick_wavenumber(table: &EigenstateTable, velocity: f64, alpha: f64) -> f64 {
    let c = table.constants();
    c.neutron_mass_kg * velocity / c.hbar_j_s * (2.0 * alpha).sin()
}

/// `1 − |⟨N|e^{iqẑ}|N⟩|²` for one collision.
pub fn wall_escape_probability(
    table: &EigenstateTable,
    level: usize,
    velocity: f64,
    alpha: f64,
) -> Result<f64> {
    check_wall_angle(alpha)?;
    if !(velocity > 0.0) {
        return Err(Error::domain(format!(
            "velocity must be positive, got {velocity}"
        )));
    }
    table.phase_escape_probability(level, kick_wavenumber(table, velocity, alpha))
}

/// `(v/L)·P_wall`: one collision per traversal of the mirror.
pub fn wall_rate(table: &EigenstateTable, level: usize, geom: &TrapGeometry) -> Result<f64> {
    geom.validate()?;
    let p = wall_escape_probability(table, level, geom.velocity_m_s, geom.wall_angle_rad)?;
    Ok(geom.collision_rate() * p)
}
