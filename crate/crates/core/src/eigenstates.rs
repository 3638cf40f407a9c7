//! Bound states of a neutron above a horizontal mirror.
//!
//! With `x = z/z0` the states are `ψ_n(z) = z0^{-1/2} φ_n(x)` where
//! `φ_n(x) = Ai(x − λ_n) / |Ai'(−λ_n)|` is unit-normalised on `[0, ∞)`.
//! All quadratures run in the dimensionless variable and are rescaled on
//! the way out.

use num_complex::Complex64;
use serde::Serialize;

use crate::airy::ai_pair;
use crate::constants::{GravityScales, PhysicalConstants, MICROMETRE, PEV};
use crate::error::{Error, Result};
use crate::quadrature::{self, Tolerance};

pub use crate::airy::{airy_ai, airy_zero};

pub const DEFAULT_N_MAX: usize = 100;

/// Width of the classically forbidden tail kept in every quadrature, in units of z0.
pub const TAIL_WIDTH: f64 = 15.0;

/// Immutable table of bound states 1..=n_max. Build once, share freely.
#[derive(Debug, Clone)]
pub struct EigenstateTable {
    constants: PhysicalConstants,
    scales: GravityScales,
    lambda: Vec<f64>,
    /// 1/|Ai'(−λ_n)|, the normalisation of φ_n.
    reduced_norm: Vec<f64>,
    tolerance: Tolerance,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyLevel {
    pub joules: f64,
    pub pev: f64,
    pub hz: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanHeight {
    /// ⟨n|ẑ|n⟩
    pub mean: f64,
    /// Classical turning point λ_n·z0.
    pub turning_point: f64,
}

impl EigenstateTable {
    pub fn new(constants: PhysicalConstants, n_max: usize) -> Result<Self> {
        constants.validate()?;
        if n_max == 0 {
            return Err(Error::domain("eigenstate table needs at least one level"));
        }
        let lambda = (1..=n_max).map(airy_zero).collect::<Result<Vec<_>>>()?;
        let reduced_norm = lambda
            .iter()
            .map(|&l| 1.0 / ai_pair(-l).ai_prime.abs())
            .collect();
        Ok(Self {
            scales: constants.scales(),
            constants,
            lambda,
            reduced_norm,
            tolerance: Tolerance {
                abs: 1e-13,
                rel: 1e-13,
                max_segments: 50_000,
            },
        })
    }

    pub fn with_defaults() -> Result<Self> {
        Self::new(PhysicalConstants::default(), DEFAULT_N_MAX)
    }

    pub fn n_max(&self) -> usize {
        self.lambda.len()
    }

    pub fn constants(&self) -> &PhysicalConstants {
        &self.constants
    }

    pub fn scales(&self) -> &GravityScales {
        &self.scales
    }

    fn index(&self, n: usize) -> Result<usize> {
        if n == 0 || n > self.n_max() {
            return Err(Error::LevelOutOfRange {
                level: n,
                n_max: self.n_max(),
            });
        }
        Ok(n - 1)
    }

    pub fn lambda(&self, n: usize) -> Result<f64> {
        Ok(self.lambda[self.index(n)?])
    }

    /// Normalisation constant of ψ_n in m^{-1/2}.
    pub fn norm(&self, n: usize) -> Result<f64> {
        Ok(self.reduced_norm[self.index(n)?] / self.scales.z0.sqrt())
    }

    pub fn energy(&self, n: usize) -> Result<f64> {
        Ok(self.scales.e0 * self.lambda(n)?)
    }

    pub fn energy_of(&self, n: usize) -> Result<EnergyLevel> {
        let joules = self.energy(n)?;
        Ok(EnergyLevel {
            joules,
            pev: joules / PEV,
            hz: joules / self.constants.planck_h(),
        })
    }

    /// Transition frequency |E_n − E_m|/h in Hz.
    pub fn transition_frequency(&self, m: usize, n: usize) -> Result<f64> {
        Ok((self.lambda(n)? - self.lambda(m)?).abs() * self.scales.f0)
    }

    /// Signed transition angular frequency (E_n − E_m)/ħ.
    pub fn transition_angular_frequency(&self, m: usize, n: usize) -> Result<f64> {
        Ok((self.energy(n)? - self.energy(m)?) / self.constants.hbar_j_s)
    }

    /// Dimensionless φ_n(x); zero below the mirror.
    pub(crate) fn reduced_state(&self, i: usize, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        self.reduced_norm[i] * ai_pair(x - self.lambda[i]).ai
    }

    pub fn wavefunction(&self, n: usize, z: f64) -> Result<f64> {
        let i = self.index(n)?;
        if !(z >= 0.0) || !z.is_finite() {
            return Err(Error::domain(format!(
                "wave function height must be finite and non-negative, got {z}"
            )));
        }
        Ok(self.reduced_state(i, z / self.scales.z0) / self.scales.z0.sqrt())
    }

    /// Upper end of the quadrature domain in units of z0.
    fn reduced_extent(&self, i: usize, j: usize) -> f64 {
        self.lambda[i].max(self.lambda[j]) + TAIL_WIDTH
    }

    /// Panels of at most half a local wavelength of the fastest oscillation.
    fn panels(&self, i: usize, j: usize, reduced_wavenumber: f64) -> Vec<f64> {
        let top = self.reduced_extent(i, j);
        let k_state = self.lambda[i].max(self.lambda[j]).sqrt();
        let k = k_state + reduced_wavenumber.abs();
        let width = (std::f64::consts::PI / k.max(1.0)).min(1.0);
        quadrature::uniform_breakpoints(0.0, top, width)
    }

    /// ∫ φ_m φ_n w(x) dx over the bound-state support, with `w` in reduced units.
    fn reduced_integral<F>(&self, m: usize, n: usize, w: F) -> Result<f64>
    where
        F: Fn(f64) -> f64,
    {
        let (i, j) = (self.index(m)?, self.index(n)?);
        let bp = self.panels(i, j, 0.0);
        let est = quadrature::integrate_panels(
            |x: f64| self.reduced_state(i, x) * self.reduced_state(j, x) * w(x),
            &bp,
            self.tolerance,
        )?;
        Ok(est.value)
    }

    /// ⟨m|n⟩ by quadrature.
    pub fn overlap(&self, m: usize, n: usize) -> Result<f64> {
        self.reduced_integral(m, n, |_| 1.0)
    }

    /// ⟨m|ẑ|n⟩ in metres by quadrature.
    pub fn matrix_element_z(&self, m: usize, n: usize) -> Result<f64> {
        Ok(self.scales.z0 * self.reduced_integral(m, n, |x| x)?)
    }

    /// ⟨m|f(ẑ)|n⟩ for an arbitrary real function of height (SI in, SI out).
    pub fn matrix_element_of<F>(&self, m: usize, n: usize, f: F) -> Result<f64>
    where
        F: Fn(f64) -> f64,
    {
        let z0 = self.scales.z0;
        self.reduced_integral(m, n, |x| f(x * z0))
    }

    /// ⟨m|e^{iqẑ}|n⟩ with `q` in 1/m.
    pub fn phase_matrix_element(&self, m: usize, n: usize, q: f64) -> Result<Complex64> {
        if !q.is_finite() {
            return Err(Error::domain(format!("wavenumber must be finite, got {q}")));
        }
        let (i, j) = (self.index(m)?, self.index(n)?);
        if q == 0.0 {
            let v = self.overlap(m, n)?;
            return Ok(Complex64::new(if m == n { 1.0 } else { v }, 0.0));
        }
        let qr = q * self.scales.z0;
        let bp = self.panels(i, j, qr);
        let est = quadrature::integrate_panels(
            |x: f64| {
                let w = self.reduced_state(i, x) * self.reduced_state(j, x);
                let (s, c) = (qr * x).sin_cos();
                Complex64::new(w * c, w * s)
            },
            &bp,
            self.tolerance,
        )?;
        Ok(est.value)
    }

    /// ⟨n|e^{iqẑ}|n⟩.
    pub fn matrix_element_phase(&self, n: usize, q: f64) -> Result<Complex64> {
        self.phase_matrix_element(n, n, q)
    }

    /// `1 − |⟨n|e^{iqẑ}|n⟩|²`, evaluated without the cancellation of the
    /// naive form: with `D = ∫φ² 2sin²(qx/2)` and `S = ∫φ² sin(qx)`,
    /// `1 − |A|² = 2D − D² − S²`.
    pub fn phase_escape_probability(&self, n: usize, q: f64) -> Result<f64> {
        if !q.is_finite() {
            return Err(Error::domain(format!("wavenumber must be finite, got {q}")));
        }
        let i = self.index(n)?;
        if q == 0.0 {
            return Ok(0.0);
        }
        let qr = q * self.scales.z0;
        let bp = self.panels(i, i, qr);
        let est = quadrature::integrate_panels(
            |x: f64| {
                let w = self.reduced_state(i, x).powi(2);
                let half = (0.5 * qr * x).sin();
                Complex64::new(2.0 * w * half * half, w * (qr * x).sin())
            },
            &bp,
            Tolerance {
                abs: 1e-16,
                ..self.tolerance
            },
        )?;
        let (d, s) = (est.value.re, est.value.im);
        Ok((2.0 * d - d * d - s * s).clamp(0.0, 1.0))
    }

    pub fn mean_height(&self, n: usize) -> Result<MeanHeight> {
        Ok(MeanHeight {
            mean: self.matrix_element_z(n, n)?,
            turning_point: self.lambda(n)? * self.scales.z0,
        })
    }

    /// Position variance ⟨z²⟩ − ⟨z⟩² of state n by quadrature.
    pub fn position_variance(&self, n: usize) -> Result<f64> {
        let z0 = self.scales.z0;
        let mean = self.reduced_integral(n, n, |x| x)?;
        let second = self.reduced_integral(n, n, |x| x * x)?;
        Ok((second - mean * mean) * z0 * z0)
    }
}

/// Rounded semiclassical energy estimate 1.7 peV·(n − 1/4)^{2/3}, in peV.
pub fn approximate_energy_pev(n: usize) -> f64 {
    1.7 * (n as f64 - 0.25).powf(2.0 / 3.0)
}

/// Rounded semiclassical mean-height estimate 11 µm·(n − 1/4)^{2/3}, in metres.
pub fn approximate_mean_height(n: usize) -> f64 {
    11.0 * MICROMETRE * (n as f64 - 0.25).powf(2.0 / 3.0)
}
