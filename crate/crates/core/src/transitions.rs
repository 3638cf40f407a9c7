//! Rabi resonances between bouncer states driven by an oscillating
//! perturbation, and the magnetic gradients needed to drive them.
//!
//! The Rabi frequency convention is `Ω_{Nn} = (2/ħ)|⟨n|V|N⟩|`. With it the
//! transition probability is
//! `P(t) = Ω²/(Ω² + Δ²) · sin²(√(Δ² + Ω²) t/2)`, `Δ = ω − ω_{Nn}`.

use serde::Serialize;
use std::f64::consts::PI;

use crate::eigenstates::EigenstateTable;
use crate::error::{Error, Result};

/// Time a neutron at 4 m/s needs to cross a 0.30 m mirror.
pub const FLOW_THROUGH_TIME: f64 = 0.30 / 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbationKind {
    /// Gradient of the vertical field component; spin state unchanged.
    MagneticVerticalGradient,
    /// Gradient of the horizontal field component; flips the spin.
    MagneticHorizontalGradientSpinFlip,
    Generic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerturbationSpec {
    pub kind: PerturbationKind,
    /// Field gradient in T/m for the magnetic kinds.
    pub amplitude: f64,
    pub angular_frequency: f64,
}

impl PerturbationSpec {
    pub fn new(kind: PerturbationKind, amplitude: f64, angular_frequency: f64) -> Result<Self> {
        if !(amplitude >= 0.0) {
            return Err(Error::domain(format!(
                "perturbation amplitude must be non-negative, got {amplitude}"
            )));
        }
        Ok(Self {
            kind,
            amplitude,
            angular_frequency,
        })
    }

    pub fn spin_flip(&self) -> bool {
        self.kind == PerturbationKind::MagneticHorizontalGradientSpinFlip
    }

    /// Rabi angular frequency for `from → to`. Both magnetic kinds share the
    /// same magnitude; only the spin bookkeeping differs.
    pub fn rabi_frequency(&self, table: &EigenstateTable, from: usize, to: usize) -> Result<f64> {
        match self.kind {
            PerturbationKind::MagneticVerticalGradient
            | PerturbationKind::MagneticHorizontalGradientSpinFlip => {
                magnetic_rabi_frequency(table, from, to, self.amplitude)
            }
            PerturbationKind::Generic => Err(Error::domain(
                "generic perturbations carry no matrix element; build a TransitionSpec directly",
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransitionSpec {
    pub from_level: usize,
    pub to_level: usize,
    /// (E_to − E_from)/ħ, signed.
    pub omega: f64,
    pub rabi_omega: f64,
}

impl TransitionSpec {
    pub fn new(table: &EigenstateTable, from: usize, to: usize, rabi_omega: f64) -> Result<Self> {
        if !(rabi_omega >= 0.0) {
            return Err(Error::domain(format!(
                "Rabi frequency must be non-negative, got {rabi_omega}"
            )));
        }
        Ok(Self {
            from_level: from,
            to_level: to,
            omega: table.transition_angular_frequency(from, to)?,
            rabi_omega,
        })
    }

    /// Drive detuning from the resonance at |ω_{Nn}|.
    pub fn detuning(&self, omega: f64) -> f64 {
        omega - self.omega.abs()
    }

    pub fn frequency_hz(&self) -> f64 {
        self.omega.abs() / (2.0 * PI)
    }
}

/// Transition probability after driving for time `t`. Zero without drive.
pub fn rabi_probability(spec: &TransitionSpec, omega: f64, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::domain(format!(
            "drive time must be non-negative, got {t}"
        )));
    }
    let w = spec.rabi_omega;
    if w == 0.0 {
        return Ok(0.0);
    }
    let d = spec.detuning(omega);
    let generalized = d.hypot(w);
    let amplitude = lorentzian(d, w);
    Ok(amplitude * (0.5 * generalized * t).sin().powi(2))
}

fn lorentzian(detuning: f64, rabi: f64) -> f64 {
    let r = detuning / rabi;
    1.0 / (1.0 + r * r)
}

/// Envelope `1/(1 + (Δ/Ω)²)`, the supremum of [`rabi_probability`] over time.
pub fn max_probability(spec: &TransitionSpec, omega: f64) -> f64 {
    if spec.rabi_omega == 0.0 {
        return 0.0;
    }
    lorentzian(spec.detuning(omega), spec.rabi_omega)
}

/// Drive duration `π/√(Δ² + Ω²)` at which the envelope is reached.
pub fn pulse_time(spec: &TransitionSpec, omega: f64) -> Result<f64> {
    let generalized = spec.detuning(omega).hypot(spec.rabi_omega);
    if generalized == 0.0 {
        return Err(Error::domain(
            "pulse time undefined without drive at zero detuning",
        ));
    }
    Ok(PI / generalized)
}

fn coupling(table: &EigenstateTable, from: usize, to: usize) -> Result<f64> {
    if from == to {
        return Err(Error::domain(format!(
            "a transition needs two distinct levels, got {from} → {to}"
        )));
    }
    Ok(table.matrix_element_z(from, to)?.abs())
}

/// `(2/ħ)·μ·β·|⟨to|ẑ|from⟩|` for a field gradient `beta` in T/m.
pub fn magnetic_rabi_frequency(
    table: &EigenstateTable,
    from: usize,
    to: usize,
    beta: f64,
) -> Result<f64> {
    if !(beta >= 0.0) {
        return Err(Error::domain(format!(
            "gradient must be non-negative, got {beta}"
        )));
    }
    let c = table.constants();
    let z = coupling(table, from, to)?;
    Ok(2.0 / c.hbar_j_s * c.neutron_magnetic_moment_j_t * beta * z)
}

/// Gradient giving a full π pulse in time `t`: `πħ / (2μ|⟨to|ẑ|from⟩| t)`.
pub fn required_gradient(table: &EigenstateTable, from: usize, to: usize, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::domain(format!(
            "pulse time must be positive, got {t}"
        )));
    }
    let c = table.constants();
    let z = coupling(table, from, to)?;
    Ok(PI * c.hbar_j_s / (2.0 * c.neutron_magnetic_moment_j_t * z * t))
}

#[derive(Debug, Clone, Serialize)]
pub struct ResonanceScan {
    pub initial_level: usize,
    pub frequencies_hz: Vec<f64>,
    /// Final levels with a transition frequency inside the scanned range.
    pub final_levels: Vec<usize>,
    /// `curves[k][i]`: envelope towards `final_levels[k]` at `frequencies_hz[i]`.
    pub curves: Vec<Vec<f64>>,
    /// Pointwise maximum over all curves.
    pub envelope: Vec<f64>,
}

/// Maximum transition probability from `initial` as a function of drive
/// frequency. Every final level whose transition frequency falls within the
/// grid range gets its own curve; curves are combined by pointwise maximum.
pub fn resonance_scan(
    table: &EigenstateTable,
    initial: usize,
    frequencies_hz: &[f64],
    rabi_omega: f64,
) -> Result<ResonanceScan> {
    if frequencies_hz.is_empty() {
        return Err(Error::domain(
            "resonance scan needs a non-empty frequency grid",
        ));
    }
    if frequencies_hz.iter().any(|f| !(f.is_finite() && *f >= 0.0)) {
        return Err(Error::domain(
            "scan frequencies must be non-negative and finite",
        ));
    }
    let lo = frequencies_hz.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = frequencies_hz.iter().cloned().fold(0.0, f64::max);

    let mut final_levels = Vec::new();
    let mut specs = Vec::new();
    for n in 1..=table.n_max() {
        if n == initial {
            continue;
        }
        let f = table.transition_frequency(initial, n)?;
        if f >= lo && f <= hi {
            final_levels.push(n);
            specs.push(TransitionSpec::new(table, initial, n, rabi_omega)?);
        }
    }
    let curves: Vec<Vec<f64>> = specs
        .iter()
        .map(|s| {
            frequencies_hz
                .iter()
                .map(|f| max_probability(s, 2.0 * PI * f))
                .collect()
        })
        .collect();
    let envelope = (0..frequencies_hz.len())
        .map(|i| curves.iter().map(|c| c[i]).fold(0.0, f64::max))
        .collect();
    Ok(ResonanceScan {
        initial_level: initial,
        frequencies_hz: frequencies_hz.to_vec(),
        final_levels,
        curves,
        envelope,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyResolution {
    /// h/(2T) in joules.
    pub delta_e: f64,
    pub relative: f64,
}

/// Heisenberg-limited resolution `ΔE = h/(2T)` for observation time `t`.
pub fn energy_resolution(
    table: &EigenstateTable,
    t: f64,
    reference_level: usize,
) -> Result<EnergyResolution> {
    if !(t > 0.0) {
        return Err(Error::domain(format!(
            "observation time must be positive, got {t}"
        )));
    }
    let delta_e = table.constants().planck_h() / (2.0 * t);
    Ok(EnergyResolution {
        delta_e,
        relative: delta_e / table.energy(reference_level)?,
    })
}
