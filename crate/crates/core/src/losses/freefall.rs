//! Free fall over the brink between the bottom mirror and a side wall.
//!
//! While the neutron crosses the gap it evolves without the mirror boundary.
//! The propagator for `H = p²/2m + mgz` is applied on a grid with a spectral
//! split-step; for a linear potential one Strang step is already exact, so
//! the step count only matters for accuracy tests. Phases follow the kernel
//! `(m/2πiħt)^{1/2} exp(i[m(z−z')²/2ħt − mgt(z+z')/2ħ])`, which drops the
//! global factor `exp(−img²t³/24ħ)` of the full propagator.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::TrapGeometry;
use crate::constants::PhysicalConstants;
use crate::eigenstates::{EigenstateTable, TAIL_WIDTH};
use crate::error::{Error, Result};
use crate::quadrature::{self, Tolerance};

/// Longest fall the grid propagator accepts.
pub const MAX_FALL_TIME: f64 = 5e-3;

const BELOW_MIRROR: f64 = 100e-6;
const ABOVE_TURNING_POINT: f64 = 150e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FreeFallOptions {
    pub dz_m: f64,
    pub steps: usize,
    /// Largest probability tolerated near the grid edges after evolution.
    pub boundary_limit: f64,
    /// Fraction of the grid on each side counted as the edge.
    pub edge_fraction: f64,
}

impl Default for FreeFallOptions {
    fn default() -> Self {
        Self {
            dz_m: 50e-9,
            steps: 1,
            boundary_limit: 1e-8,
            edge_fraction: 0.01,
        }
    }
}

impl FreeFallOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.dz_m > 0.0 && self.dz_m <= 50e-9) {
            return Err(Error::Config(format!(
                "fall.dz_m must lie in (0, 5e-8], got {}",
                self.dz_m
            )));
        }
        if self.steps == 0 {
            return Err(Error::Config("fall.steps must be at least 1".into()));
        }
        if !(self.boundary_limit > 0.0 && self.boundary_limit < 1.0) {
            return Err(Error::Config(format!(
                "fall.boundary_limit must lie in (0, 1), got {}",
                self.boundary_limit
            )));
        }
        if !(self.edge_fraction > 0.0 && self.edge_fraction < 0.5) {
            return Err(Error::Config(format!(
                "fall.edge_fraction must lie in (0, 0.5), got {}",
                self.edge_fraction
            )));
        }
        Ok(())
    }
}

/// Wave function sampled at `z_min + i·dz`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveGrid {
    pub z_min: f64,
    pub dz: f64,
    pub values: Vec<Complex64>,
}

impl WaveGrid {
    pub fn from_fn<F>(z_min: f64, dz: f64, len: usize, f: F) -> Self
    where
        F: Fn(f64) -> Complex64,
    {
        let values = (0..len).map(|i| f(z_min + i as f64 * dz)).collect();
        Self { z_min, dz, values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn z(&self, i: usize) -> f64 {
        self.z_min + i as f64 * self.dz
    }

    /// `Σ|ψ|² dz`.
    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.dz
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::domain("cannot normalize a zero wave function"));
        }
        let s = 1.0 / n.sqrt();
        self.values.iter_mut().for_each(|v| *v *= s);
        Ok(())
    }

    /// `⟨z⟩` of the sampled density.
    pub fn centroid(&self) -> f64 {
        let (mut w, mut zw) = (0.0, 0.0);
        for (i, v) in self.values.iter().enumerate() {
            let p = v.norm_sqr();
            w += p;
            zw += p * self.z(i);
        }
        zw / w
    }

    fn edge_probability(&self, fraction: f64) -> f64 {
        let k = ((self.len() as f64 * fraction).ceil() as usize).max(1);
        let n = self.len();
        let sum =
            |r: std::ops::Range<usize>| self.values[r].iter().map(|v| v.norm_sqr()).sum::<f64>();
        (sum(0..k.min(n)) + sum(n.saturating_sub(k)..n)) * self.dz
    }
}

fn check_fall_time(t: f64) -> Result<()> {
    if !(0.0..=MAX_FALL_TIME).contains(&t) {
        return Err(Error::domain(format!(
            "fall time must lie in [0, {MAX_FALL_TIME}] s, got {t}"
        )));
    }
    Ok(())
}

/// Evolves `grid` through a fall of duration `t`.
///
/// The grid is first widened on both sides by the distance covered at the
/// Nyquist velocity plus the drop `gt²/2`, then rounded up to a power of two,
/// so the returned grid is larger than the input. Fails with a truncation
/// error when the evolved packet still reaches the outer edges.
pub fn free_fall_evolve(
    grid: &WaveGrid,
    t: f64,
    constants: &PhysicalConstants,
    opts: &FreeFallOptions,
) -> Result<WaveGrid> {
    check_fall_time(t)?;
    opts.validate()?;
    if grid.is_empty() || !(grid.dz > 0.0) {
        return Err(Error::domain("free fall needs a non-empty grid"));
    }
    if t == 0.0 {
        return Ok(grid.clone());
    }
    let m = constants.neutron_mass_kg;
    let hbar = constants.hbar_j_s;
    let g = constants.gravity_m_s2;
    let dz = grid.dz;

    let k_nyquist = PI / dz;
    let pad = hbar * k_nyquist * t / m + 0.5 * g * t * t;
    let pad_points = (pad / dz).ceil() as usize + 1;
    let len = (grid.len() + 2 * pad_points).next_power_of_two();
    let left = (len - grid.len()) / 2;

    let z_min = grid.z_min - left as f64 * dz;
    let mut psi = vec![Complex64::new(0.0, 0.0); len];
    psi[left..left + grid.len()].copy_from_slice(&grid.values);

    let dt = t / opts.steps as f64;
    let half_potential: Vec<Complex64> = (0..len)
        .map(|i| {
            let z = z_min + i as f64 * dz;
            Complex64::from_polar(1.0, -m * g * z * dt / (2.0 * hbar))
        })
        .collect();
    let dk = 2.0 * PI / (len as f64 * dz);
    let kinetic: Vec<Complex64> = (0..len)
        .map(|j| {
            let idx = if j < len / 2 {
                j as f64
            } else {
                j as f64 - len as f64
            };
            let k = idx * dk;
            // the 1/len of the inverse transform is folded in here
            Complex64::from_polar(1.0 / len as f64, -hbar * k * k * dt / (2.0 * m))
        })
        .collect();

    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(len);
    let inverse = planner.plan_fft_inverse(len);
    let mut scratch = vec![
        Complex64::new(0.0, 0.0);
        forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len())
    ];

    for _ in 0..opts.steps {
        psi.iter_mut()
            .zip(&half_potential)
            .for_each(|(p, v)| *p *= v);
        forward.process_with_scratch(&mut psi, &mut scratch);
        psi.iter_mut().zip(&kinetic).for_each(|(p, k)| *p *= k);
        inverse.process_with_scratch(&mut psi, &mut scratch);
        psi.iter_mut()
            .zip(&half_potential)
            .for_each(|(p, v)| *p *= v);
    }

    // each Strang step carries exp(+img²dt³/24ħ) relative to the full propagator
    let phase = m * g * g * (t.powi(3) - opts.steps as f64 * dt.powi(3)) / (24.0 * hbar);
    let correction = Complex64::from_polar(1.0, phase);
    psi.iter_mut().for_each(|p| *p *= correction);

    let out = WaveGrid {
        z_min,
        dz,
        values: psi,
    };
    let edge = out.edge_probability(opts.edge_fraction);
    if edge > opts.boundary_limit {
        return Err(Error::Truncation {
            boundary_probability: edge,
            limit: opts.boundary_limit,
        });
    }
    Ok(out)
}

/// `ψ_N(z, t)` from the free-fall kernel applied to the bound state by
/// direct quadrature. Slow; kept as a cross-check of the grid propagator.
pub fn free_fall_direct(
    table: &EigenstateTable,
    level: usize,
    t: f64,
    z: f64,
) -> Result<Complex64> {
    if !(t > 0.0 && t <= MAX_FALL_TIME) {
        return Err(Error::domain(format!(
            "direct kernel needs a fall time in (0, {MAX_FALL_TIME}] s, got {t}"
        )));
    }
    if !z.is_finite() {
        return Err(Error::domain(format!("height must be finite, got {z}")));
    }
    let lambda = table.lambda(level)?;
    let i = level - 1;
    let c = table.constants();
    let (m, hbar, g) = (c.neutron_mass_kg, c.hbar_j_s, c.gravity_m_s2);
    let z0 = table.scales().z0;

    let top = lambda + TAIL_WIDTH;
    // phase derivative in reduced units, largest at one of the ends
    let slope = |x: f64| (-m * (z - x * z0) / (hbar * t) - m * g * t / (2.0 * hbar)) * z0;
    let k_max = slope(0.0).abs().max(slope(top).abs()) + lambda.sqrt();
    let width = (PI / k_max.max(1.0)).min(1.0);
    let bp = quadrature::uniform_breakpoints(0.0, top, width);

    let quad = quadrature::integrate_panels(
        |x: f64| {
            let zp = x * z0;
            let phase =
                m * (z - zp).powi(2) / (2.0 * hbar * t) - m * g * t * (z + zp) / (2.0 * hbar);
            Complex64::from_polar(table.reduced_state(i, x), phase)
        },
        &bp,
        Tolerance {
            abs: 1e-11,
            rel: 1e-11,
            max_segments: 10 * bp.len() + 20_000,
        },
    )?;
    let prefactor = (m / (2.0 * PI * hbar * t)).sqrt() * z0.sqrt();
    Ok(quad.value * Complex64::from_polar(prefactor, -PI / 4.0))
}

/// Bound state `N` sampled on the default fall grid, normalized on the grid.
fn bound_state_grid(table: &EigenstateTable, level: usize, dz: f64) -> Result<WaveGrid> {
    let lambda = table.lambda(level)?;
    let z0 = table.scales().z0;
    let z_max = lambda * z0 + ABOVE_TURNING_POINT;
    let len = ((z_max + BELOW_MIRROR) / dz).ceil() as usize + 1;
    let i = level - 1;
    let mut grid = WaveGrid::from_fn(-BELOW_MIRROR, dz, len, |z| {
        Complex64::new(table.reduced_state(i, z / z0), 0.0)
    });
    grid.normalize()?;
    Ok(grid)
}

/// `1 − |⟨ψ_N|ψ_N(t)⟩|²` after a fall of duration `t`.
pub fn corner_loss_probability(
    table: &EigenstateTable,
    level: usize,
    t: f64,
    opts: &FreeFallOptions,
) -> Result<f64> {
    check_fall_time(t)?;
    opts.validate()?;
    table.lambda(level)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    let initial = bound_state_grid(table, level, opts.dz_m)?;
    let evolved = free_fall_evolve(&initial, t, table.constants(), opts)?;
    let offset = ((initial.z_min - evolved.z_min) / evolved.dz).round() as usize;
    let amplitude: Complex64 = initial
        .values
        .iter()
        .zip(&evolved.values[offset..])
        .map(|(a, b)| a.conj() * b)
        .sum::<Complex64>()
        * initial.dz;
    Ok((1.0 - amplitude.norm_sqr()).clamp(0.0, 1.0))
}

/// `(v/L)·P_corner` with the fall time set by the effective hole.
pub fn corner_rate(
    table: &EigenstateTable,
    level: usize,
    geom: &TrapGeometry,
    opts: &FreeFallOptions,
) -> Result<f64> {
    geom.validate()?;
    if geom.brink_size_m == 0.0 {
        table.lambda(level)?;
        return Ok(0.0);
    }
    let p = corner_loss_probability(table, level, geom.fall_time(), opts)?;
    Ok(geom.collision_rate() * p)
}
