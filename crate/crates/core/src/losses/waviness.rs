//! Losses from a wavy bottom mirror. A neutron moving at `v` over the profile
//! ξ(x) sees a time-dependent floor ξ(vt); the rate into level n is
//! `Γ_{N→n} = (mg/ħ)² (1/v) PSD(f_{Nn}/v)`.

use serde::Serialize;

use super::psd::{psd_eval, PsdModel};
use crate::eigenstates::EigenstateTable;
use crate::error::{Error, Result};

pub fn waviness_rate(
    table: &EigenstateTable,
    from: usize,
    to: usize,
    velocity: f64,
    model: &PsdModel,
) -> Result<f64> {
    if from == to {
        return Err(Error::domain("waviness rate needs two distinct levels"));
    }
    if !(velocity > 0.0) {
        return Err(Error::domain(format!(
            "velocity must be positive, got {velocity}"
        )));
    }
    let c = table.constants();
    let coupling = c.neutron_mass_kg * c.gravity_m_s2 / c.hbar_j_s;
    let f = table.transition_frequency(from, to)?;
    Ok(coupling * coupling / velocity * psd_eval(model, f / velocity)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WavinessTotal {
    pub level: usize,
    pub total: f64,
    pub cutoff: usize,
    /// Same sum truncated at `cutoff / 2`, for judging convergence.
    pub half_cutoff_total: f64,
}

impl WavinessTotal {
    pub fn relative_cutoff_change(&self) -> f64 {
        (self.total - self.half_cutoff_total).abs() / self.total
    }
}

/// Sum of [`waviness_rate`] over all bound final states `n ≠ N`, `n <= cutoff`.
pub fn waviness_total(
    table: &EigenstateTable,
    level: usize,
    velocity: f64,
    model: &PsdModel,
    cutoff: usize,
) -> Result<WavinessTotal> {
    if cutoff > table.n_max() {
        return Err(Error::domain(format!(
            "waviness cutoff {cutoff} exceeds table size {}",
            table.n_max()
        )));
    }
    table.lambda(level)?;
    let half = cutoff / 2;
    let mut total = 0.0;
    let mut half_total = 0.0;
    for n in (1..=cutoff).filter(|&n| n != level) {
        let r = waviness_rate(table, level, n, velocity, model)?;
        total += r;
        if n <= half {
            half_total += r;
        }
    }
    Ok(WavinessTotal {
        level,
        total,
        cutoff,
        half_cutoff_total: half_total,
    })
}
