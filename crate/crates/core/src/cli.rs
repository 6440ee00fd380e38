//! Scenario files and the four commands behind the `mirror-bec` binary.
//!
//! Commands return a [`Table`] (or a [`ValidationReport`]) which renders to CSV
//! or JSON. Rendering is pure, so the same config gives the same bytes no
//! matter how many threads the scans used.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::atom_optics::{AtomicSpecies, CondensateSample, DiskLatticeGeometry};
use crate::bragg_stack::{lattice_stack_with, reflectivity_spectrum_with, stack_matrix, stack_response, QuarterWave};
use crate::error::{Error, Result};
use crate::experiment::{displacement_fringe, KickExperimentConfig};
use crate::fock_opa::{
    contrast, fringe_curve, gain_params, macro_amplitudes, moments_from_amplitudes, phase_grid,
    photon_stats_closed, visibility, DEFAULT_TAIL_TOLERANCE,
};
use crate::oracle::{self, PmMode, TwoModeFockState};

/// Largest gain the validate command hands to the Fock-space oracle.
pub const ORACLE_GAIN_LIMIT: f64 = 1.0;
const ORACLE_TOLERANCE: f64 = 1e-6;
const UNIMODULAR_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OpaSection {
    pub gain: f64,
    pub degradation: f64,
    pub phase_count: usize,
    pub enumerate_amplitudes: bool,
    pub tail_tolerance: f64,
}

impl Default for OpaSection {
    fn default() -> Self {
        Self {
            gain: 1.0,
            degradation: 1.0,
            phase_count: 64,
            enumerate_amplitudes: false,
            tail_tolerance: DEFAULT_TAIL_TOLERANCE,
        }
    }
}

/// A named preset (`"rb87"`, the default) with optional per-field overrides,
/// or `preset = "custom"` with all four fields spelled out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpeciesSection {
    pub preset: String,
    pub linewidth_hz: Option<f64>,
    pub resonance_wavelength_m: Option<f64>,
    pub scattering_length_m: Option<f64>,
    pub mass_kg: Option<f64>,
}

impl Default for SpeciesSection {
    fn default() -> Self {
        Self {
            preset: "rb87".into(),
            linewidth_hz: None,
            resonance_wavelength_m: None,
            scattering_length_m: None,
            mass_kg: None,
        }
    }
}

impl SpeciesSection {
    fn resolve(&self) -> Result<AtomicSpecies> {
        let base = match self.preset.as_str() {
            "rb87" => Some(AtomicSpecies::rubidium_87()),
            "custom" => None,
            other => return Err(Error::Config(format!("unknown species preset `{other}`"))),
        };
        let pick = |v: Option<f64>, from_base: Option<f64>, key: &str| {
            v.or(from_base)
                .ok_or_else(|| Error::Config(format!("[species] needs `{key}` with preset = \"custom\"")))
        };
        let species = AtomicSpecies {
            linewidth_hz: pick(self.linewidth_hz, base.map(|b| b.linewidth_hz), "linewidth_hz")?,
            resonance_wavelength_m: pick(
                self.resonance_wavelength_m,
                base.map(|b| b.resonance_wavelength_m),
                "resonance_wavelength_m",
            )?,
            scattering_length_m: pick(
                self.scattering_length_m,
                base.map(|b| b.scattering_length_m),
                "scattering_length_m",
            )?,
            mass_kg: pick(self.mass_kg, base.map(|b| b.mass_kg), "mass_kg")?,
        };
        species.validate().map_err(config_error)?;
        Ok(species)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometrySection {
    pub disk_count: usize,
    /// Defaults to a quarter of the resonance wavelength.
    pub disk_thickness_m: Option<f64>,
    /// Defaults to half the resonance wavelength.
    pub period_m: Option<f64>,
    /// `"geometric"` keeps the disk thickness fixed; `"optical"` rescales it
    /// to `d/n` at each detuning so every disk stays a quarter wave.
    pub quarter_wave: QuarterWave,
}

impl Default for GeometrySection {
    fn default() -> Self {
        Self {
            disk_count: 200,
            disk_thickness_m: None,
            period_m: None,
            quarter_wave: QuarterWave::Geometric,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanSection {
    pub detuning_start_hz: f64,
    pub detuning_stop_hz: f64,
    pub points: usize,
    /// Defaults to ten linewidths.
    pub cutoff_hz: Option<f64>,
}

impl Default for ScanSection {
    fn default() -> Self {
        Self {
            detuning_start_hz: -2e9,
            detuning_stop_hz: 2e9,
            points: 801,
            cutoff_hz: None,
        }
    }
}

impl ScanSection {
    pub fn grid(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.detuning_start_hz];
        }
        let step = (self.detuning_stop_hz - self.detuning_start_hz) / (self.points - 1) as f64;
        (0..self.points)
            .map(|k| self.detuning_start_hz + step * k as f64)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentSection {
    pub repetitions: u64,
    pub q_factor: f64,
    pub flight_time_s: f64,
    pub pulse_duration_s: f64,
    pub source_bandwidth_hz: f64,
    pub active_bandwidth_hz: f64,
    pub expansion_speed_m_per_s: f64,
    pub scattering_detuning_hz: f64,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        let p = KickExperimentConfig::reference_preset();
        Self {
            repetitions: p.repetitions,
            q_factor: p.cavity_q_factor,
            flight_time_s: p.flight_time_s,
            pulse_duration_s: p.pulse_duration_s,
            source_bandwidth_hz: p.source_bandwidth_hz,
            active_bandwidth_hz: p.active_bandwidth_hz,
            expansion_speed_m_per_s: p.expansion_speed_m_per_s,
            scattering_detuning_hz: p.scattering_detuning_hz,
        }
    }
}

/// A scenario file. Every section and key is optional; unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub opa: OpaSection,
    pub species: SpeciesSection,
    pub sample: CondensateSample,
    pub geometry: GeometrySection,
    pub scan: ScanSection,
    pub experiment: ExperimentSection,
}

fn config_error(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}

/// Fully checked parameters derived from a [`ScenarioConfig`].
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub species: AtomicSpecies,
    pub geometry: DiskLatticeGeometry,
    pub cutoff_hz: f64,
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: ScenarioConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        Self::new(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn new(config: ScenarioConfig) -> Result<Self> {
        let species = config.species.resolve()?;
        config.sample.validate().map_err(config_error)?;
        let opa = &config.opa;
        gain_params(opa.gain).map_err(config_error)?;
        if !(opa.degradation > 0.0 && opa.degradation <= 1.0) {
            return Err(Error::Config(format!(
                "[opa] degradation must lie in (0, 1], got {}",
                opa.degradation
            )));
        }
        if opa.phase_count == 0 {
            return Err(Error::Config("[opa] phase_count must be at least 1".into()));
        }
        if !(opa.tail_tolerance > 0.0 && opa.tail_tolerance < 1.0) {
            return Err(Error::Config("[opa] tail_tolerance must lie in (0, 1)".into()));
        }

        let g = &config.geometry;
        let lambda = species.resonance_wavelength_m;
        let geometry = DiskLatticeGeometry {
            disk_thickness_m: g.disk_thickness_m.unwrap_or(lambda / 4.0),
            period_m: g.period_m.unwrap_or(lambda / 2.0),
            disk_count: g.disk_count,
        };
        if geometry.disk_count == 0
            || !(geometry.disk_thickness_m > 0.0 && geometry.disk_thickness_m < geometry.period_m)
        {
            return Err(Error::Config(
                "[geometry] needs disk_count >= 1 and 0 < disk_thickness_m < period_m".into(),
            ));
        }

        let s = &config.scan;
        if s.points == 0 || !(s.detuning_stop_hz >= s.detuning_start_hz) {
            return Err(Error::Config(
                "[scan] needs points >= 1 and detuning_stop_hz >= detuning_start_hz".into(),
            ));
        }
        let cutoff_hz = s.cutoff_hz.unwrap_or_else(|| species.default_cutoff_hz());
        if !(cutoff_hz > 0.0) {
            return Err(Error::Config("[scan] cutoff_hz must be positive".into()));
        }

        let scenario = Self {
            config,
            species,
            geometry,
            cutoff_hz,
        };
        scenario.experiment().validate().map_err(config_error)?;
        Ok(scenario)
    }

    pub fn experiment(&self) -> KickExperimentConfig {
        let e = &self.config.experiment;
        KickExperimentConfig {
            gain: self.config.opa.gain,
            species: self.species,
            geometry: self.geometry,
            sample: self.config.sample,
            source_bandwidth_hz: e.source_bandwidth_hz,
            active_bandwidth_hz: e.active_bandwidth_hz,
            degradation: self.config.opa.degradation,
            repetitions: e.repetitions,
            cavity_q_factor: e.q_factor,
            flight_time_s: e.flight_time_s,
            pulse_duration_s: e.pulse_duration_s,
            expansion_speed_m_per_s: e.expansion_speed_m_per_s,
            scattering_detuning_hz: e.scattering_detuning_hz,
        }
    }

    pub fn phases(&self) -> Vec<f64> {
        phase_grid(self.config.opa.phase_count)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Num(f64),
    Flag(bool),
    /// Rendered as `NaN` in CSV and `null` in JSON.
    Missing,
}

/// Fixed-header table produced by the data commands.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: &'static [&'static str],
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Shortest decimal that parses back to the same `f64`.
pub fn format_float(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Num(x) => format_float(*x),
                    Cell::Flag(b) => b.to_string(),
                    Cell::Missing => "NaN".into(),
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Array of objects, one per row, keyed by column name.
    pub fn to_json(&self) -> String {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj = self
                    .header
                    .iter()
                    .zip(row)
                    .map(|(k, c)| {
                        let v = match c {
                            Cell::Num(x) => serde_json::Value::from(*x),
                            Cell::Flag(b) => serde_json::Value::from(*b),
                            Cell::Missing => serde_json::Value::Null,
                        };
                        (k.to_string(), v)
                    })
                    .collect();
                serde_json::Value::Object(obj)
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&rows).expect("plain values serialize");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<Cell>> {
        let k = self.header.iter().position(|h| *h == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

pub fn cmd_fringes(scenario: &Scenario) -> Result<Table> {
    let opa = &scenario.config.opa;
    let curve = fringe_curve(gain_params(opa.gain)?, &scenario.phases(), opa.degradation)?;
    let rows = (0..curve.len())
        .map(|k| {
            vec![
                Cell::Num(curve.phases[k]),
                Cell::Num(curve.n_plus[k]),
                Cell::Num(curve.n_minus[k]),
                Cell::Num(curve.n_diff[k]),
            ]
        })
        .collect();
    Ok(Table {
        header: &["phi_rad", "n_plus", "n_minus", "n_diff"],
        rows,
    })
}

pub fn cmd_spectrum(scenario: &Scenario) -> Result<Table> {
    let spectrum = reflectivity_spectrum_with(
        &scenario.species,
        &scenario.config.sample,
        &scenario.geometry,
        &scenario.config.scan.grid(),
        scenario.cutoff_hz,
        scenario.config.geometry.quarter_wave,
    )?;
    let opt = |v: Option<f64>| v.map_or(Cell::Missing, Cell::Num);
    let rows = spectrum
        .samples
        .iter()
        .map(|s| {
            vec![
                Cell::Num(s.detuning_hz),
                Cell::Num(s.wavelength_m),
                opt(s.epsilon),
                opt(s.reflectivity),
                Cell::Flag(s.masked()),
            ]
        })
        .collect();
    Ok(Table {
        header: &["detuning_hz", "wavelength_m", "epsilon", "reflectivity", "masked"],
        rows,
    })
}

pub fn cmd_displacement(scenario: &Scenario) -> Result<Table> {
    let fringe = displacement_fringe(&scenario.experiment(), &scenario.phases())?;
    let feasible = fringe.validity.ok();
    let rows = fringe
        .phases
        .iter()
        .zip(fringe.active_net())
        .zip(&fringe.displacement_m)
        .map(|((phi, active), x)| vec![Cell::Num(*phi), Cell::Num(active), Cell::Num(*x), Cell::Flag(feasible)])
        .collect();
    Ok(Table {
        header: &["phi_rad", "active_photons", "displacement_m", "feasible"],
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
    /// Physical caveat; never fails the run.
    Note,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    fn push(&mut self, name: &str, status: Status, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            status,
            detail: detail.into(),
        });
    }

    fn verdict(&mut self, name: &str, ok: bool, detail: impl Into<String>) {
        self.push(name, if ok { Status::Pass } else { Status::Fail }, detail);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Skip => "SKIP",
                Status::Note => "NOTE",
            };
            let _ = writeln!(out, "{tag:4}  {:<22} {}", c.name, c.detail);
        }
        let failed = self.checks.iter().filter(|c| c.status == Status::Fail).count();
        let _ = writeln!(
            out,
            "{}",
            if failed == 0 {
                "all checks passed".to_string()
            } else {
                format!("{failed} check(s) failed")
            }
        );
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_text(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("plain values serialize");
                s.push('\n');
                s
            }
        }
    }
}

/// Runs the invariant suites on the configured parameters. Failures are
/// recorded in the report rather than returned as errors.
pub fn cmd_validate(scenario: &Scenario) -> ValidationReport {
    let mut report = ValidationReport::default();
    let opa = &scenario.config.opa;
    let params = match gain_params(opa.gain) {
        Ok(p) => p,
        Err(e) => {
            report.verdict("gain", false, e.to_string());
            return report;
        }
    };

    if opa.enumerate_amplitudes {
        match macro_amplitudes(params, opa.tail_tolerance).and_then(|a| Ok((moments_from_amplitudes(&a)?, a))) {
            Ok(((aligned, orthogonal), amps)) => {
                let m = params.m_bar;
                let err = ((aligned - (3.0 * m + 1.0)) / (3.0 * m + 1.0))
                    .abs()
                    .max(if m > 0.0 { ((orthogonal - m) / m).abs() } else { orthogonal.abs() });
                report.verdict(
                    "amplitude table",
                    err <= 1e-6,
                    format!(
                        "{} entries, captured norm {:.12}, moment error {err:.2e}",
                        amps.len(),
                        amps.captured_norm
                    ),
                );
            }
            Err(e) => report.verdict("amplitude table", false, e.to_string()),
        }
    } else {
        report.push("amplitude table", Status::Skip, "enumerate_amplitudes = false");
    }

    let g_oracle = opa.gain.min(ORACLE_GAIN_LIMIT);
    match oracle_deviation(g_oracle) {
        Ok(dev) => report.verdict(
            "oracle equivalence",
            dev <= ORACLE_TOLERANCE,
            format!("g = {g_oracle}, n_max = {}, max deviation {dev:.2e}", oracle::DEFAULT_N_MAX),
        ),
        Err(e) => report.verdict("oracle equivalence", false, e.to_string()),
    }

    let phases = scenario.phases();
    let total = 4.0 * params.m_bar + 1.0;
    let sum_err = phases
        .iter()
        .map(|&phi| {
            let s = photon_stats_closed(params, phi);
            ((s.n_plus + s.n_minus - total) / total).abs()
        })
        .fold(0.0, f64::max);
    report.verdict(
        "photon number sum",
        sum_err <= 1e-9,
        format!("max relative error {sum_err:.2e} against 4m + 1 = {total}"),
    );

    match fringe_curve(params, &phases, opa.degradation) {
        Ok(curve) if phases.len() >= 2 => {
            let measured = contrast(&curve.n_plus).unwrap_or(f64::NAN);
            // the grid always holds φ = 0; it holds φ = π only for even counts
            let expected = if phases.len().is_multiple_of(2) {
                opa.degradation * visibility(params)
            } else {
                let c = curve.n_plus.iter().copied().fold(f64::INFINITY, f64::min);
                let max = curve.n_plus[0];
                (max - c) / (max + c)
            };
            let err = (measured - expected).abs();
            report.verdict(
                "fringe contrast",
                err <= 1e-9,
                format!("measured {measured:.12}, expected {expected:.12}"),
            );
        }
        Ok(_) => report.push("fringe contrast", Status::Skip, "needs at least two phases"),
        Err(e) => report.verdict("fringe contrast", false, e.to_string()),
    }

    match reflectivity_spectrum_with(
        &scenario.species,
        &scenario.config.sample,
        &scenario.geometry,
        &scenario.config.scan.grid(),
        scenario.cutoff_hz,
        scenario.config.geometry.quarter_wave,
    ) {
        Ok(spectrum) => {
            let live: Vec<_> = spectrum
                .samples
                .iter()
                .filter_map(|s| Some((s.wavelength_m, s.epsilon?, s.reflectivity?)))
                .collect();
            let bounded = live.iter().all(|(_, _, r)| (0.0..=1.0).contains(r));
            report.verdict(
                "reflectivity bounds",
                bounded,
                format!("{} unmasked points in [0, 1]", live.len()),
            );
            // unimodularity and energy balance on a handful of points
            let picks: Vec<_> = if live.is_empty() {
                Vec::new()
            } else {
                let n = live.len();
                let mut idx = vec![0, n / 4, n / 2, 3 * n / 4, n - 1];
                idx.dedup();
                idx.into_iter().map(|k| live[k]).collect()
            };
            let mut det_err: f64 = 0.0;
            let mut energy_err: f64 = 0.0;
            for (lambda, eps, _) in &picks {
                let stack = lattice_stack_with(1.0 + eps, &scenario.geometry, scenario.config.geometry.quarter_wave);
                det_err = det_err.max((stack_matrix(&stack, *lambda).determinant() - Complex64::new(1.0, 0.0)).norm());
                let r = stack_response(&stack, *lambda);
                energy_err = energy_err.max((r.reflectivity() + r.transmissivity() - 1.0).abs());
            }
            if picks.is_empty() {
                report.push("unimodularity", Status::Skip, "no unmasked scan points");
            } else {
                report.verdict(
                    "unimodularity",
                    det_err <= UNIMODULAR_TOLERANCE,
                    format!("max |det M - 1| = {det_err:.2e} over {} points", picks.len()),
                );
                report.verdict(
                    "energy balance",
                    energy_err <= UNIMODULAR_TOLERANCE,
                    format!("max |R + T - 1| = {energy_err:.2e}"),
                );
            }
        }
        Err(e) => report.verdict("reflectivity bounds", false, e.to_string()),
    }

    match displacement_fringe(&scenario.experiment(), &[0.0]) {
        Ok(f) => {
            let t = f.validity.timing;
            let s = f.validity.scattering;
            report.push(
                "timing",
                Status::Note,
                format!(
                    "survival {:e} s, flight {:e} s, exposure {:e} s, feasible = {}",
                    t.survival_time_s, t.flight_time_s, t.exposure_time_s, t.feasible
                ),
            );
            report.push(
                "scattering",
                Status::Note,
                format!("probability {:e}, perturbative = {}", s.probability, s.valid),
            );
        }
        Err(e) => report.verdict("displacement", false, e.to_string()),
    }
    report
}

/// Worst amplitude mismatch between the evolved Fock state and the table,
/// over both injected polarizations.
pub fn oracle_deviation(g: f64) -> Result<f64> {
    let params = gain_params(g)?;
    let amps = macro_amplitudes(params, 1e-14)?;
    let mut worst: f64 = 0.0;
    for mode in [PmMode::Minus, PmMode::Plus] {
        let seed = TwoModeFockState::single_photon(oracle::DEFAULT_N_MAX, mode);
        let evolved = oracle::evolve(&seed, g)?;
        let pm = oracle::rotate_to_pm_basis(&evolved.state);
        worst = worst.max(oracle::max_table_deviation(&pm, &amps, mode));
    }
    Ok(worst)
}

/// Process exit status for a library error: 2 for configuration problems,
/// 1 for everything else.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Io(_) => 2,
        _ => 1,
    }
}
