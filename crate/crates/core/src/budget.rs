//! Per-level loss budget of the trap and the characteristic timescales.

use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::eigenstates::EigenstateTable;
use crate::error::{Error, Result};
use crate::losses::{self, FreeFallOptions, PsdModel, TrapGeometry};
use crate::noninertial::{rotation_frequency_blur, RotationContext};

/// Typical speed of neutrons passing once over the mirror.
pub const FLOW_THROUGH_SPEED: f64 = 4.0;
/// Pulse length needed to separate neighbouring levels.
pub const PULSE_RESOLVE_TIME: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LossBudgetRow {
    pub level: usize,
    pub beta_rate: f64,
    pub wavy_rate: f64,
    pub wall_rate: f64,
    pub corner_rate: f64,
    pub total_rate: f64,
    pub resolve_threshold: f64,
    pub earth_blur_threshold: f64,
}

/// Which loss channels enter the total.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Channels {
    pub beta: bool,
    pub waviness: bool,
    pub wall: bool,
    pub corner: bool,
}

impl Default for Channels {
    fn default() -> Self {
        Self {
            beta: true,
            waviness: true,
            wall: true,
            corner: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BudgetSettings {
    pub geometry: TrapGeometry,
    pub psd: PsdModel,
    /// Latitude and Earth rate for the blur threshold; its velocity is ignored.
    pub rotation: RotationContext,
    pub waviness_cutoff: usize,
    pub fall: FreeFallOptions,
    pub channels: Channels,
}

fn channel<T>(name: &'static str, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Channel {
        channel: name,
        source: Box::new(e),
    })
}

fn row(table: &EigenstateTable, level: usize, s: &BudgetSettings) -> Result<LossBudgetRow> {
    let v = s.geometry.velocity_m_s;
    let on = s.channels;
    let beta_rate = if on.beta {
        table.constants().beta_rate()
    } else {
        0.0
    };
    let wavy_rate = if on.waviness {
        channel(
            "waviness",
            losses::waviness_total(table, level, v, &s.psd, s.waviness_cutoff).map(|w| w.total),
        )?
    } else {
        0.0
    };
    let wall_rate = if on.wall {
        channel("wall", losses::wall_rate(table, level, &s.geometry))?
    } else {
        0.0
    };
    let corner_rate = if on.corner {
        channel(
            "corner",
            losses::corner_rate(table, level, &s.geometry, &s.fall),
        )?
    } else {
        0.0
    };
    Ok(LossBudgetRow {
        level,
        beta_rate,
        wavy_rate,
        wall_rate,
        corner_rate,
        total_rate: beta_rate + wavy_rate + wall_rate + corner_rate,
        resolve_threshold: channel("resolve", resolve_threshold(table, level))?,
        earth_blur_threshold: channel("earth", earth_blur_threshold(table, level, v, &s.rotation))?,
    })
}

/// One row per level in `levels`, in ascending order.
pub fn assemble_budget(
    table: &EigenstateTable,
    settings: &BudgetSettings,
    levels: RangeInclusive<usize>,
) -> Result<Vec<LossBudgetRow>> {
    settings.geometry.validate()?;
    settings.psd.validate()?;
    settings.fall.validate()?;
    if levels.is_empty() || *levels.start() == 0 {
        return Err(Error::domain(format!("invalid level range {levels:?}")));
    }
    let levels: Vec<usize> = levels.collect();
    levels
        .par_iter()
        .map(|&n| row(table, n, settings))
        .collect()
}

/// Smallest transition frequency to a neighbouring level, in 1/s.
/// A pulse of this inverse length gives a resonance half as wide as the gap.
pub fn resolve_threshold(table: &EigenstateTable, level: usize) -> Result<f64> {
    if level >= table.n_max() {
        return Err(Error::LevelOutOfRange {
            level: level + 1,
            n_max: table.n_max(),
        });
    }
    let up = table.transition_frequency(level, level + 1)?;
    if level == 1 {
        return Ok(up);
    }
    Ok(up.min(table.transition_frequency(level - 1, level)?))
}

/// Loss rate `2ΔE/h` at which the Heisenberg width equals the blur of level
/// `n` between North–South travel at `speed` and East–West travel.
pub fn earth_blur_threshold(
    table: &EigenstateTable,
    level: usize,
    speed: f64,
    ctx: &RotationContext,
) -> Result<f64> {
    if speed == 0.0 {
        table.lambda(level)?;
        return Ok(0.0);
    }
    Ok(2.0 * rotation_frequency_blur(table, level, speed.abs(), ctx)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timescale {
    pub name: &'static str,
    /// `None` for scales quoted only as an order of magnitude.
    pub seconds: Option<f64>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimescaleLedger {
    pub pulse_resolve: Timescale,
    pub flow_through: Timescale,
    pub beta_lifetime: Timescale,
    pub graviton_decay: Timescale,
}

impl TimescaleLedger {
    pub fn entries(&self) -> [&Timescale; 4] {
        [
            &self.pulse_resolve,
            &self.flow_through,
            &self.beta_lifetime,
            &self.graviton_decay,
        ]
    }
}

pub fn timescale_ledger(constants: &PhysicalConstants, mirror_length: f64) -> TimescaleLedger {
    TimescaleLedger {
        pulse_resolve: Timescale {
            name: "pulse_resolve",
            seconds: Some(PULSE_RESOLVE_TIME),
            note: "pulse needed for a resonance half as wide as the level gap".into(),
        },
        flow_through: Timescale {
            name: "flow_through",
            seconds: Some(mirror_length / FLOW_THROUGH_SPEED),
            note: format!("mirror length / {FLOW_THROUGH_SPEED} m/s"),
        },
        beta_lifetime: Timescale {
            name: "beta_lifetime",
            seconds: Some(constants.beta_lifetime_s),
            note: "free neutron lifetime".into(),
        },
        graviton_decay: Timescale {
            name: "graviton_decay",
            seconds: None,
            note: "negligible, not computed".into(),
        },
    }
}
