//! Run configuration for the command-line front end.
//!
//! Every section rejects unknown keys, and [`RunConfig::validate`] runs before
//! any computation so a bad file fails fast with the offending key named.

use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::budget::{BudgetSettings, Channels};
use crate::constants::PhysicalConstants;
use crate::eigenstates::DEFAULT_N_MAX;
use crate::error::{Error, Result};
use crate::losses::{FreeFallOptions, PsdModel, TrapGeometry, MAX_FALL_TIME};
use crate::noninertial::{RotationContext, DEFAULT_LATITUDE_COS};
use crate::output::OutputFormat;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RotationSettings {
    pub latitude_cos: f64,
    /// Speed of North–South travel; defaults to the horizontal velocity.
    pub velocity_m_s: Option<f64>,
}

impl Default for RotationSettings {
    fn default() -> Self {
        Self {
            latitude_cos: DEFAULT_LATITUDE_COS,
            velocity_m_s: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelRange {
    pub first: usize,
    pub last: usize,
}

impl LevelRange {
    pub fn range(&self) -> RangeInclusive<usize> {
        self.first..=self.last
    }

    /// Parses `a..b` (inclusive) or a single level.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("levels: expected `a..b`, got `{s}`"));
        let (a, b) = match s.split_once("..") {
            Some((a, b)) => (a, b.strip_prefix('=').unwrap_or(b)),
            None => (s, s),
        };
        let first = a.trim().parse().map_err(|_| bad())?;
        let last = b.trim().parse().map_err(|_| bad())?;
        Ok(Self { first, last })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSettings {
    pub initial_levels: Vec<usize>,
    pub freq_min_hz: f64,
    pub freq_max_hz: f64,
    pub freq_step_hz: f64,
    /// Pulse length π/Ω that fixes the drive strength.
    pub pi_over_rabi_s: f64,
}

impl Default for ScanSettings {
    fn default() -> Self {
        Self {
            initial_levels: vec![1, 2],
            freq_min_hz: 0.0,
            freq_max_hz: 1000.0,
            freq_step_hz: 0.25,
            pi_over_rabi_s: 0.1,
        }
    }
}

impl ScanSettings {
    pub fn frequencies(&self) -> Vec<f64> {
        let n = ((self.freq_max_hz - self.freq_min_hz) / self.freq_step_hz + 1e-9).floor() as usize;
        (0..=n)
            .map(|i| self.freq_min_hz + i as f64 * self.freq_step_hz)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WallSettings {
    pub alphas_rad: Vec<f64>,
}

impl Default for WallSettings {
    fn default() -> Self {
        Self {
            alphas_rad: vec![1e-6, 1e-5, 1e-4],
        }
    }
}

/// Log-spaced grid of `points` values from `min` to `max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogGrid {
    pub min_s: f64,
    pub max_s: f64,
    pub points: usize,
}

impl LogGrid {
    pub fn values(&self) -> Vec<f64> {
        let (a, b) = (self.min_s.ln(), self.max_s.ln());
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| match i {
                0 => self.min_s,
                i if i + 1 == self.points => self.max_s,
                i => (a + (b - a) * i as f64 / last).exp(),
            })
            .collect()
    }

    fn validate(&self, key: &str, upper: f64) -> Result<()> {
        if !(self.min_s > 0.0 && self.min_s < self.max_s && self.max_s <= upper) {
            return Err(Error::Config(format!(
                "{key}: need 0 < min_s < max_s <= {upper}, got {} and {}",
                self.min_s, self.max_s
            )));
        }
        if self.points < 2 {
            return Err(Error::Config(format!("{key}.points must be at least 2")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GradientSettings {
    /// Pairs `[from, to]`.
    pub transitions: Vec<[usize; 2]>,
    pub times: LogGrid,
    pub markers_s: Vec<f64>,
}

impl Default for GradientSettings {
    fn default() -> Self {
        Self {
            transitions: vec![[1, 2], [2, 7]],
            times: LogGrid {
                min_s: 1e-3,
                max_s: 1e3,
                points: 121,
            },
            markers_s: vec![0.01, 0.075, 886.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FallSettings {
    pub propagator: FreeFallOptions,
    pub levels: LevelRange,
    pub times: LogGrid,
}

impl Default for FallSettings {
    fn default() -> Self {
        Self {
            propagator: FreeFallOptions::default(),
            levels: LevelRange { first: 1, last: 5 },
            times: LogGrid {
                min_s: 1e-6,
                max_s: 2e-3,
                points: 34,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSettings {
    pub directory: PathBuf,
    pub format: OutputFormat,
}

impl Default for OutputSettings {
    fn default() -> Self {
        Self {
            directory: PathBuf::from("out"),
            format: OutputFormat::Csv,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub constants: PhysicalConstants,
    pub geometry: TrapGeometry,
    pub psd: PsdModel,
    pub rotation: RotationSettings,
    pub n_max: usize,
    pub levels: LevelRange,
    pub scan: ScanSettings,
    pub wall: WallSettings,
    pub gradient: GradientSettings,
    pub fall: FallSettings,
    pub waviness_cutoff: usize,
    pub channels: Channels,
    pub output: OutputSettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            constants: PhysicalConstants::default(),
            geometry: TrapGeometry::default(),
            psd: PsdModel::default(),
            rotation: RotationSettings::default(),
            n_max: DEFAULT_N_MAX,
            levels: LevelRange { first: 1, last: 30 },
            scan: ScanSettings::default(),
            wall: WallSettings::default(),
            gradient: GradientSettings::default(),
            fall: FallSettings::default(),
            waviness_cutoff: DEFAULT_N_MAX,
            channels: Channels::default(),
            output: OutputSettings::default(),
        }
    }
}

fn config_err(e: Error, prefix: &str) -> Error {
    match e {
        Error::Config(m) => Error::Config(format!(
            "{prefix}.{}",
            m.trim_start_matches(&format!("{prefix}."))
        )),
        Error::Domain(m) => Error::Config(format!("{prefix}: {m}")),
        other => Error::Config(format!("{prefix}: {other}")),
    }
}

fn check_levels(key: &str, r: &LevelRange, n_max: usize) -> Result<()> {
    if r.first == 0 || r.first > r.last {
        return Err(Error::Config(format!(
            "{key}: empty level range {}..{}",
            r.first, r.last
        )));
    }
    if r.last >= n_max {
        return Err(Error::Config(format!(
            "{key}: last level {} must be below n_max = {n_max}",
            r.last
        )));
    }
    Ok(())
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.constants
            .validate()
            .map_err(|e| config_err(e, "constants"))?;
        self.geometry.validate()?;
        self.psd.validate().map_err(|e| config_err(e, "psd"))?;
        if !(0.0..=1.0).contains(&self.rotation.latitude_cos) {
            return Err(Error::Config(format!(
                "rotation.latitude_cos must lie in [0, 1], got {}",
                self.rotation.latitude_cos
            )));
        }
        if let Some(v) = self.rotation.velocity_m_s {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Config(format!(
                    "rotation.velocity_m_s must be non-negative, got {v}"
                )));
            }
        }
        if self.n_max < 2 {
            return Err(Error::Config(format!(
                "n_max must be at least 2, got {}",
                self.n_max
            )));
        }
        check_levels("levels", &self.levels, self.n_max)?;

        let s = &self.scan;
        if s.initial_levels.is_empty() || s.initial_levels.iter().any(|&n| n == 0 || n > self.n_max)
        {
            return Err(Error::Config(format!(
                "scan.initial_levels must be non-empty and within 1..{}",
                self.n_max
            )));
        }
        if !(s.freq_min_hz >= 0.0 && s.freq_max_hz > s.freq_min_hz && s.freq_max_hz.is_finite()) {
            return Err(Error::Config(format!(
                "scan: need 0 <= freq_min_hz < freq_max_hz, got {} and {}",
                s.freq_min_hz, s.freq_max_hz
            )));
        }
        if !(s.freq_step_hz > 0.0) || (s.freq_max_hz - s.freq_min_hz) / s.freq_step_hz > 1e7 {
            return Err(Error::Config(format!(
                "scan.freq_step_hz is invalid: {}",
                s.freq_step_hz
            )));
        }
        if !(s.pi_over_rabi_s > 0.0 && s.pi_over_rabi_s.is_finite()) {
            return Err(Error::Config(format!(
                "scan.pi_over_rabi_s must be positive, got {}",
                s.pi_over_rabi_s
            )));
        }

        if self.wall.alphas_rad.is_empty()
            || self.wall.alphas_rad.iter().any(|a| !(0.0..0.1).contains(a))
        {
            return Err(Error::Config(
                "wall.alphas_rad must be non-empty with values in [0, 0.1)".into(),
            ));
        }

        let g = &self.gradient;
        for &[a, b] in &g.transitions {
            if a == 0 || b == 0 || a == b || a.max(b) > self.n_max {
                return Err(Error::Config(format!(
                    "gradient.transitions: invalid pair [{a}, {b}]"
                )));
            }
        }
        g.times.validate("gradient.times", f64::INFINITY)?;
        if g.markers_s.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
            return Err(Error::Config("gradient.markers_s must be positive".into()));
        }

        self.fall.propagator.validate()?;
        check_levels("fall.levels", &self.fall.levels, self.n_max + 1)?;
        self.fall.times.validate("fall.times", MAX_FALL_TIME)?;

        if self.waviness_cutoff < 2 || self.waviness_cutoff > self.n_max {
            return Err(Error::Config(format!(
                "waviness_cutoff must lie in 2..={}, got {}",
                self.n_max, self.waviness_cutoff
            )));
        }
        if self.geometry.fall_time() > MAX_FALL_TIME {
            return Err(Error::Config(format!(
                "geometry: fall time {} s over the brink exceeds {MAX_FALL_TIME} s",
                self.geometry.fall_time()
            )));
        }
        Ok(())
    }

    /// Speed used for North–South travel.
    pub fn rotation_speed(&self) -> f64 {
        self.rotation
            .velocity_m_s
            .unwrap_or(self.geometry.velocity_m_s)
    }

    pub fn rotation_context(&self, v_ns: f64) -> Result<RotationContext> {
        RotationContext::new(
            self.rotation.latitude_cos,
            v_ns,
            self.constants.earth_rotation_rate_rad_s,
        )
    }

    pub fn budget_settings(&self) -> Result<BudgetSettings> {
        Ok(BudgetSettings {
            geometry: self.geometry,
            psd: self.psd,
            rotation: self.rotation_context(0.0)?,
            waviness_cutoff: self.waviness_cutoff,
            fall: self.fall.propagator,
            channels: self.channels,
        })
    }
}
