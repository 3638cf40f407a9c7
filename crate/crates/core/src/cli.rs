//! Command-line front end: one command per table.

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use crate::budget::{assemble_budget, timescale_ledger};
use crate::config::{LevelRange, RunConfig};
use crate::constants::{MICROMETRE, PEV};
use crate::eigenstates::EigenstateTable;
use crate::error::{Error, Result};
use crate::losses::{self, PsdModel, SurfaceProfile, Window};
use crate::noninertial::{rotation_energy_shift, rotational_zeeman_shift};
use crate::output::{write_table, Cell, OutputFormat, Table};
use crate::transitions::{energy_resolution, required_gradient, resonance_scan};

/// Relative level-1 shift quoted for North–South travel at 5 m/s.
pub const REFERENCE_EARTH_SHIFT: f64 = 1e-6;
/// Quoted rotational Zeeman splitting in peV.
pub const REFERENCE_ZEEMAN_PEV: f64 = 6e-8;

#[derive(Debug, Parser)]
#[command(
    name = "bouncer",
    version,
    about = "Neutron quantum bouncer spectra, transitions and trap loss tables"
)]
pub struct Cli {
    /// JSON run configuration; built-in defaults when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// Side-wall angles in rad; the first one also sets the trap geometry.
    #[arg(long, global = true, value_delimiter = ',')]
    pub alpha: Vec<f64>,
    /// Horizontal velocity in m/s.
    #[arg(long, global = true)]
    pub velocity: Option<f64>,
    /// Inclusive level range `a..b`.
    #[arg(long, global = true)]
    pub levels: Option<String>,
    /// Upper end of the resonance scan in Hz.
    #[arg(long = "freq-max", global = true)]
    pub freq_max: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Energies, frequencies and heights of the bound states.
    Eigen,
    /// Resonance scans from the configured initial levels.
    Fig1,
    /// Gradient needed for a full transition versus interaction time.
    Fig2,
    /// Side-wall escape probability per level and wall angle.
    Fig4,
    /// Corner loss probability versus fall time.
    Fig5,
    /// Loss-rate budget per level and the timescale ledger.
    Fig6,
    /// Level shifts from the rotation of the Earth.
    Earth,
    /// Periodogram and power-law fit of a surface profile.
    Psd {
        /// Two-column text (x, height) or `.bin` profile; synthesized from the model if omitted.
        #[arg(long)]
        profile: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Window::Rectangular)]
        window: Window,
        /// Samples of the synthetic profile.
        #[arg(long, default_value_t = 8192)]
        samples: usize,
        /// Spacing of the synthetic profile in m.
        #[arg(long, default_value_t = 1e-5)]
        spacing: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Every table above except `psd`.
    All,
    /// Print the effective configuration as JSON.
    Config,
}

/// Files written and a short human-readable summary.
#[derive(Debug, Default)]
pub struct Report {
    pub files: Vec<PathBuf>,
    pub summary: Vec<String>,
}

impl Cli {
    /// Loads the configuration, applies flag overrides and validates.
    pub fn resolve_config(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(out) = &self.out {
            cfg.output.directory = out.clone();
        }
        if let Some(f) = self.format {
            cfg.output.format = f;
        }
        if let Some(&first) = self.alpha.first() {
            cfg.wall.alphas_rad = self.alpha.clone();
            cfg.geometry.wall_angle_rad = first;
        }
        if let Some(v) = self.velocity {
            cfg.geometry.velocity_m_s = v;
        }
        if let Some(l) = &self.levels {
            let r = LevelRange::parse(l)?;
            cfg.levels = r;
            cfg.fall.levels = r;
        }
        if let Some(f) = self.freq_max {
            cfg.scan.freq_max_hz = f;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

pub fn run(cli: &Cli) -> Result<Report> {
    let cfg = cli.resolve_config()?;
    let tables = match &cli.command {
        Command::Config => {
            return Ok(Report {
                files: Vec::new(),
                summary: vec![serde_json::to_string_pretty(&cfg)?],
            })
        }
        Command::Eigen => cmd_eigen(&cfg)?,
        Command::Fig1 => cmd_fig1(&cfg)?,
        Command::Fig2 => cmd_fig2(&cfg)?,
        Command::Fig4 => cmd_fig4(&cfg)?,
        Command::Fig5 => cmd_fig5(&cfg)?,
        Command::Fig6 => cmd_fig6(&cfg)?,
        Command::Earth => cmd_earth(&cfg)?,
        Command::Psd {
            profile,
            window,
            samples,
            spacing,
            seed,
        } => {
            let profile = match profile {
                Some(p) => SurfaceProfile::read(p)?,
                None => losses::synthesize_profile(&cfg.psd, *samples, *spacing, *seed)?,
            };
            cmd_psd(&cfg, &profile, *window)?
        }
        Command::All => {
            let mut all = Vec::new();
            for cmd in [
                cmd_eigen, cmd_fig1, cmd_fig2, cmd_fig4, cmd_fig5, cmd_fig6, cmd_earth,
            ] {
                all.extend(cmd(&cfg)?);
            }
            all
        }
    };
    write_all(&cfg, &tables)
}

/// Writes each table with its sidecar and collects the notes as a summary.
pub fn write_all(cfg: &RunConfig, tables: &[Table]) -> Result<Report> {
    let echo = serde_json::to_value(cfg)?;
    let mut report = Report::default();
    for t in tables {
        let files = write_table(&cfg.output.directory, t, cfg.output.format, &echo)?;
        report
            .summary
            .push(format!("{}: {} rows", t.name, t.rows.len()));
        report
            .summary
            .extend(t.notes.iter().map(|n| format!("  {n}")));
        report.files.extend(files);
    }
    Ok(report)
}

fn eigen_table(cfg: &RunConfig) -> Result<EigenstateTable> {
    EigenstateTable::new(cfg.constants, cfg.n_max)
}

pub fn cmd_eigen(cfg: &RunConfig) -> Result<Vec<Table>> {
    let table = eigen_table(cfg)?;
    let mut t = Table::new(
        "eigen",
        &[
            "level",
            "lambda",
            "energy_j",
            "energy_pev",
            "frequency_hz",
            "mean_height_m",
            "turning_point_m",
            "mean_height_um",
            "turning_point_um",
        ],
    );
    for n in cfg.levels.range() {
        let e = table.energy_of(n)?;
        let h = table.mean_height(n)?;
        t.push(vec![
            n.into(),
            table.lambda(n)?.into(),
            e.joules.into(),
            e.pev.into(),
            e.hz.into(),
            h.mean.into(),
            h.turning_point.into(),
            (h.mean / MICROMETRE).into(),
            (h.turning_point / MICROMETRE).into(),
        ]);
    }
    let s = table.scales();
    t.note(format!(
        "z0 = {:.6e} m, e0 = {:.6e} peV, f0 = {:.6e} Hz",
        s.z0,
        s.e0 / PEV,
        s.f0
    ));
    Ok(vec![t])
}

pub fn cmd_fig1(cfg: &RunConfig) -> Result<Vec<Table>> {
    let table = eigen_table(cfg)?;
    let freqs = cfg.scan.frequencies();
    let rabi = std::f64::consts::PI / cfg.scan.pi_over_rabi_s;
    let scans = cfg
        .scan
        .initial_levels
        .iter()
        .map(|&n| resonance_scan(&table, n, &freqs, rabi))
        .collect::<Result<Vec<_>>>()?;

    let names: Vec<String> = scans
        .iter()
        .map(|s| format!("p_max_from_{}", s.initial_level))
        .collect();
    let mut columns = vec!["frequency_hz", "angular_frequency_rad_s"];
    columns.extend(names.iter().map(String::as_str));
    let mut t = Table::new("fig1", &columns);
    for (i, &f) in freqs.iter().enumerate() {
        let mut row: Vec<Cell> = vec![f.into(), (2.0 * std::f64::consts::PI * f).into()];
        row.extend(scans.iter().map(|s| Cell::from(s.envelope[i])));
        t.push(row);
    }
    t.note(format!(
        "rabi angular frequency {rabi:.6e} rad/s (pi/Omega = {} s)",
        cfg.scan.pi_over_rabi_s
    ));
    for s in &scans {
        let peaks: Vec<String> = s
            .final_levels
            .iter()
            .map(|&m| {
                Ok(format!(
                    "{m}@{:.3}Hz",
                    table.transition_frequency(s.initial_level, m)?
                ))
            })
            .collect::<Result<_>>()?;
        t.note(format!(
            "from level {}: resonances {}",
            s.initial_level,
            peaks.join(" ")
        ));
    }
    Ok(vec![t])
}

fn gradient_columns(cfg: &RunConfig) -> Vec<String> {
    cfg.gradient
        .transitions
        .iter()
        .map(|[a, b]| format!("gradient_{a}_{b}_t_per_m"))
        .collect()
}

fn gradient_rows(
    cfg: &RunConfig,
    table: &EigenstateTable,
    times: &[f64],
    name: &str,
) -> Result<Table> {
    let cols = gradient_columns(cfg);
    let mut columns = vec!["time_s"];
    columns.extend(cols.iter().map(String::as_str));
    let mut t = Table::new(name, &columns);
    for &time in times {
        let mut row: Vec<Cell> = vec![time.into()];
        for &[a, b] in &cfg.gradient.transitions {
            row.push(required_gradient(table, a, b, time)?.into());
        }
        t.push(row);
    }
    Ok(t)
}

pub fn cmd_fig2(cfg: &RunConfig) -> Result<Vec<Table>> {
    let table = eigen_table(cfg)?;
    let mut curve = gradient_rows(cfg, &table, &cfg.gradient.times.values(), "fig2")?;
    curve.note(
        "gradient for a full transition after a pulse of the given length, spin-flip coupling",
    );
    let mut markers = gradient_rows(cfg, &table, &cfg.gradient.markers_s, "fig2_markers")?;
    for &[a, b] in &cfg.gradient.transitions {
        let g = required_gradient(&table, a, b, 10.0)?;
        markers.note(format!("{a}->{b} at 10 s: {g:.4e} T/m"));
    }
    Ok(vec![curve, markers])
}

pub fn cmd_fig4(cfg: &RunConfig) -> Result<Vec<Table>> {
    let table = eigen_table(cfg)?;
    let v = cfg.geometry.velocity_m_s;
    let alphas = &cfg.wall.alphas_rad;
    let names: Vec<String> = alphas.iter().map(|a| format!("p_alpha_{a:e}")).collect();
    let mut columns = vec!["level"];
    columns.extend(names.iter().map(String::as_str));
    let mut t = Table::new("fig4", &columns);
    let levels: Vec<usize> = cfg.levels.range().collect();
    let rows = levels
        .par_iter()
        .map(|&n| {
            let mut row: Vec<Cell> = vec![n.into()];
            for &a in alphas {
                row.push(losses::wall_escape_probability(&table, n, v, a)?.into());
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    rows.into_iter().for_each(|r| t.push(r));
    t.note(format!("velocity {v} m/s, one collision per mirror length"));
    Ok(vec![t])
}

pub fn cmd_fig5(cfg: &RunConfig) -> Result<Vec<Table>> {
    let table = eigen_table(cfg)?;
    let times = cfg.fall.times.values();
    let levels: Vec<usize> = cfg.fall.levels.range().collect();
    let names: Vec<String> = levels.iter().map(|n| format!("p_level_{n}")).collect();
    let mut columns = vec!["time_s", "time_us"];
    columns.extend(names.iter().map(String::as_str));
    let mut t = Table::new("fig5", &columns);
    let rows = times
        .par_iter()
        .map(|&time| {
            let mut row: Vec<Cell> = vec![time.into(), (time * 1e6).into()];
            for &n in &levels {
                let p = losses::corner_loss_probability(&table, n, time, &cfg.fall.propagator)
                    .map_err(|e| Error::Channel {
                        channel: "corner",
                        source: Box::new(e),
                    })?;
                row.push(p.into());
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    rows.into_iter().for_each(|r| t.push(r));
    let tf = cfg.geometry.fall_time();
    let p: Vec<String> = levels
        .iter()
        .map(|&n| {
            Ok(format!(
                "{:.3e}",
                losses::corner_loss_probability(&table, n, tf, &cfg.fall.propagator)?
            ))
        })
        .collect::<Result<_>>()?;
    t.note(format!(
        "at the configured fall time {tf:.3e} s: {}",
        p.join(" ")
    ));
    Ok(vec![t])
}

pub fn cmd_fig6(cfg: &RunConfig) -> Result<Vec<Table>> {
    let table = eigen_table(cfg)?;
    let rows = assemble_budget(&table, &cfg.budget_settings()?, cfg.levels.range())?;
    let mut t = Table::new(
        "fig6",
        &[
            "level",
            "beta_rate",
            "wavy_rate",
            "wall_rate",
            "corner_rate",
            "total_rate",
            "resolve_threshold",
            "earth_blur_threshold",
            "storage_time_s",
        ],
    );
    for r in &rows {
        t.push(vec![
            r.level.into(),
            r.beta_rate.into(),
            r.wavy_rate.into(),
            r.wall_rate.into(),
            r.corner_rate.into(),
            r.total_rate.into(),
            r.resolve_threshold.into(),
            r.earth_blur_threshold.into(),
            (1.0 / r.total_rate).into(),
        ]);
    }
    t.note(
        "rates in 1/s; resolve_threshold = smallest transition frequency to a neighbouring level",
    );
    t.note("earth_blur_threshold = 2 dE/h with dE the North-South shift at the trap velocity");
    let c = &cfg.channels;
    t.note(format!(
        "channels: beta={} waviness={} wall={} corner={}",
        c.beta, c.waviness, c.wall, c.corner
    ));

    let ledger = timescale_ledger(&cfg.constants, cfg.geometry.mirror_length_m);
    let mut ts = Table::new(
        "timescales",
        &[
            "name",
            "seconds",
            "delta_e_pev",
            "relative_to_ground",
            "note",
        ],
    );
    for e in ledger.entries() {
        let (de, rel) = match e.seconds {
            Some(s) => {
                let r = energy_resolution(&table, s, 1)?;
                (Some(r.delta_e / PEV), Some(r.relative))
            }
            None => (None, None),
        };
        ts.push(vec![
            e.name.into(),
            e.seconds.into(),
            de.into(),
            rel.into(),
            e.note.as_str().into(),
        ]);
    }
    ts.note("delta_e = h / (2 T)");
    Ok(vec![t, ts])
}

pub fn cmd_earth(cfg: &RunConfig) -> Result<Vec<Table>> {
    let table = eigen_table(cfg)?;
    let v = cfg.rotation_speed();
    let h = cfg.constants.planck_h();
    let mut t = Table::new(
        "earth",
        &[
            "level",
            "v_ns_m_s",
            "shift_j",
            "shift_pev",
            "frequency_shift_hz",
            "relative_shift",
        ],
    );
    for n in cfg.levels.range() {
        for v_ns in [-v, 0.0, v] {
            let shift = rotation_energy_shift(&table, n, &cfg.rotation_context(v_ns)?)?;
            t.push(vec![
                n.into(),
                v_ns.into(),
                shift.into(),
                (shift / PEV).into(),
                (shift / h).into(),
                (shift / table.energy(n)?).into(),
            ]);
        }
    }

    let ground =
        rotation_energy_shift(&table, 1, &cfg.rotation_context(v)?)?.abs() / table.energy(1)?;
    let zeeman = rotational_zeeman_shift(&table) / PEV;
    let mut s = Table::new(
        "earth_summary",
        &["quantity", "value", "reference", "ratio", "flag"],
    );
    let flag = |ratio: f64, tolerance: f64| {
        if ratio > tolerance || ratio < 1.0 / tolerance {
            "discrepancy"
        } else {
            "ok"
        }
    };
    let r = ground / REFERENCE_EARTH_SHIFT;
    s.push(vec![
        "ground_relative_shift".into(),
        ground.into(),
        REFERENCE_EARTH_SHIFT.into(),
        r.into(),
        flag(r, 3.0).into(),
    ]);
    let r = zeeman / REFERENCE_ZEEMAN_PEV;
    s.push(vec![
        "rotational_zeeman_pev".into(),
        zeeman.into(),
        REFERENCE_ZEEMAN_PEV.into(),
        r.into(),
        flag(r, 2.0).into(),
    ]);
    t.note(format!(
        "shift = -Omega_E cos(latitude) m v_ns <z>, cos(latitude) = {}",
        cfg.rotation.latitude_cos
    ));
    s.note(format!(
        "ground relative shift at {v} m/s is {ground:.3e}, {:.1}x the quoted {REFERENCE_EARTH_SHIFT:e}",
        ground / REFERENCE_EARTH_SHIFT
    ));
    Ok(vec![t, s])
}

pub fn cmd_psd(cfg: &RunConfig, profile: &SurfaceProfile, window: Window) -> Result<Vec<Table>> {
    let (ks, psd) = losses::periodogram(profile, window);
    let mut t = Table::new("psd", &["k_per_m", "psd_m3", "model_m3"]);
    for (&k, &p) in ks.iter().zip(&psd) {
        t.push(vec![
            k.into(),
            p.into(),
            losses::psd_eval(&cfg.psd, k)?.into(),
        ]);
    }
    let fit = losses::fit_power_law(&ks, &psd, cfg.psd.k_ref_per_m)?;
    t.note(format!(
        "fit: amplitude {:.4e} m^3 at k = {} 1/m, exponent {:.4}",
        fit.amplitude_m3, fit.k_ref_per_m, fit.exponent
    ));
    let model = PsdModel {
        amplitude_m3: fit.amplitude_m3,
        exponent: fit.exponent,
        k_ref_per_m: fit.k_ref_per_m,
    };
    if model.validate().is_ok() {
        let rate =
            losses::waviness_rate(&eigen_table(cfg)?, 1, 2, cfg.geometry.velocity_m_s, &model)?;
        t.note(format!(
            "waviness rate 1->2 with the fitted model: {rate:.4e} 1/s"
        ));
    }
    Ok(vec![t])
}
