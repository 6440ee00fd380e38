//! Mirror kick: from the amplified photon numbers to the displacement fringe
//! of the condensate versus the remote trigger phase.
//!
//! The chain is a rigid-mirror model. Only the fraction `Δν_a/Δν` of each beam
//! falls inside the mirror's reflection band. Every reflected photon transfers
//! `2hν/c`, and the two counter-propagating beams push in opposite directions,
//! so the net kick per pulse is `(N'₊ − N'₋)·2hν/c`. The cavity multiplies it
//! by `Q` bounces and the switch repeats it once per pulse. The summed momentum
//! moves the whole condensate (`N_D·N_at` atoms) for the free-flight time.

use serde::{Deserialize, Serialize};

use crate::atom_optics::{
    quarter_wave_geometry, scattering_probability, AtomicSpecies, CondensateSample,
    DiskLatticeGeometry, ScatteringEstimate, PLANCK,
};
use crate::error::{ensure, Result};
use crate::fock_opa::{fringe_curve, gain_params, EXPERIMENTAL_DEGRADATION};

/// Share of the disk thickness the expanding cloud may smear before the
/// lattice stops acting as a mirror.
pub const DEFAULT_SPOIL_FRACTION: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KickExperimentConfig {
    pub gain: f64,
    pub species: AtomicSpecies,
    pub geometry: DiskLatticeGeometry,
    pub sample: CondensateSample,
    /// Spectral width Δν of the amplified beams.
    pub source_bandwidth_hz: f64,
    /// Width Δν_a of the near-unity reflection band.
    pub active_bandwidth_hz: f64,
    pub degradation: f64,
    pub repetitions: u64,
    pub cavity_q_factor: f64,
    pub flight_time_s: f64,
    pub pulse_duration_s: f64,
    pub expansion_speed_m_per_s: f64,
    /// Detuning at which the incoherent-scattering estimate is evaluated.
    pub scattering_detuning_hz: f64,
}

impl KickExperimentConfig {
    /// g = 6, 13 % contrast, 10⁴ pulses, no cavity, 50 µs flight, 200 ⁸⁷Rb
    /// disks of 500 atoms, Δν_a = 2 GHz out of Δν = 700 GHz.
    pub fn reference_preset() -> Self {
        let species = AtomicSpecies::rubidium_87();
        Self {
            gain: 6.0,
            species,
            geometry: quarter_wave_geometry(species.resonance_wavelength_m, 200)
                .expect("positive preset wavelength"),
            sample: CondensateSample::typical(),
            source_bandwidth_hz: 700e9,
            active_bandwidth_hz: 2e9,
            degradation: EXPERIMENTAL_DEGRADATION,
            repetitions: 10_000,
            cavity_q_factor: 1.0,
            flight_time_s: 50e-6,
            pulse_duration_s: 1e-12,
            expansion_speed_m_per_s: 1e-3,
            scattering_detuning_hz: 700e9,
        }
    }

    pub fn validate(&self) -> Result<()> {
        gain_params(self.gain)?;
        self.species.validate()?;
        self.sample.validate()?;
        ensure(self.repetitions >= 1, "repetitions", || "need at least one pulse".into())?;
        ensure(self.cavity_q_factor >= 1.0, "cavity_q_factor", || {
            format!("must be at least 1, got {}", self.cavity_q_factor)
        })?;
        ensure(self.flight_time_s > 0.0, "flight_time_s", || {
            format!("must be positive, got {}", self.flight_time_s)
        })?;
        ensure(self.pulse_duration_s > 0.0, "pulse_duration_s", || {
            format!("must be positive, got {}", self.pulse_duration_s)
        })?;
        ensure(self.source_bandwidth_hz > 0.0, "source_bandwidth_hz", || {
            format!("must be positive, got {}", self.source_bandwidth_hz)
        })?;
        ensure(self.active_bandwidth_hz > 0.0, "active_bandwidth_hz", || {
            format!("must be positive, got {}", self.active_bandwidth_hz)
        })?;
        ensure(self.degradation > 0.0 && self.degradation <= 1.0, "degradation", || {
            format!("must lie in (0, 1], got {}", self.degradation)
        })?;
        ensure(
            self.geometry.disk_count >= 1
                && self.geometry.disk_thickness_m > 0.0
                && self.geometry.disk_thickness_m < self.geometry.period_m,
            "geometry",
            || "need disk_count >= 1 and 0 < disk thickness < period".into(),
        )
    }

    /// Atoms in the whole lattice, `N_D · N_at`.
    pub fn total_atoms(&self) -> f64 {
        self.geometry.disk_count as f64 * self.sample.atoms_per_disk
    }

    pub fn total_mass_kg(&self) -> f64 {
        self.total_atoms() * self.species.mass_kg
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActivePhotons {
    pub count: f64,
    /// Set when the reflection band exceeded the source bandwidth.
    pub clamped: bool,
}

/// Photons inside the reflection band, `(Δν_a/Δν)·N`.
pub fn active_photons(n_photons: f64, stopband_hz: f64, source_bandwidth_hz: f64) -> Result<ActivePhotons> {
    ensure(stopband_hz > 0.0, "stopband_hz", || format!("must be positive, got {stopband_hz}"))?;
    ensure(source_bandwidth_hz > 0.0, "source_bandwidth_hz", || {
        format!("must be positive, got {source_bandwidth_hz}")
    })?;
    Ok(if stopband_hz > source_bandwidth_hz {
        ActivePhotons {
            count: n_photons,
            clamped: true,
        }
    } else {
        ActivePhotons {
            count: stopband_hz / source_bandwidth_hz * n_photons,
            clamped: false,
        }
    })
}

/// Photons within one atomic linewidth of resonance, `N·Γ/Δν`.
pub fn resonant_photon_count(n_photons: f64, atomic_linewidth_hz: f64, source_bandwidth_hz: f64) -> Result<f64> {
    ensure(atomic_linewidth_hz > 0.0, "atomic_linewidth_hz", || {
        format!("must be positive, got {atomic_linewidth_hz}")
    })?;
    ensure(source_bandwidth_hz > 0.0, "source_bandwidth_hz", || {
        format!("must be positive, got {source_bandwidth_hz}")
    })?;
    Ok(n_photons * atomic_linewidth_hz / source_bandwidth_hz)
}

/// Momentum `2hν/c = 2h/λ` handed over by one head-on reflection.
pub fn reflection_momentum(wavelength_m: f64) -> f64 {
    2.0 * PLANCK / wavelength_m
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimingReport {
    /// Time before expansion spoils the lattice.
    pub survival_time_s: f64,
    /// All pulses back to back, `repetitions × pulse_duration`.
    pub exposure_time_s: f64,
    pub flight_time_s: f64,
    /// `survival - exposure`
    pub exposure_margin_s: f64,
    /// `survival - flight`
    pub flight_margin_s: f64,
    pub feasible: bool,
}

pub fn timing_check(config: &KickExperimentConfig, expansion_speed_m_per_s: f64) -> Result<TimingReport> {
    timing_check_with(config, expansion_speed_m_per_s, DEFAULT_SPOIL_FRACTION)
}

pub fn timing_check_with(
    config: &KickExperimentConfig,
    expansion_speed_m_per_s: f64,
    spoil_fraction: f64,
) -> Result<TimingReport> {
    ensure(expansion_speed_m_per_s > 0.0, "expansion_speed_m_per_s", || {
        format!("must be positive, got {expansion_speed_m_per_s}")
    })?;
    ensure(spoil_fraction > 0.0, "spoil_fraction", || format!("must be positive, got {spoil_fraction}"))?;
    ensure(config.pulse_duration_s > 0.0, "pulse_duration_s", || {
        format!("must be positive, got {}", config.pulse_duration_s)
    })?;
    let survival = spoil_fraction * config.geometry.disk_thickness_m / expansion_speed_m_per_s;
    let exposure = config.repetitions as f64 * config.pulse_duration_s;
    Ok(TimingReport {
        survival_time_s: survival,
        exposure_time_s: exposure,
        flight_time_s: config.flight_time_s,
        exposure_margin_s: survival - exposure,
        flight_margin_s: survival - config.flight_time_s,
        feasible: exposure <= survival && config.flight_time_s <= survival,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Validity {
    pub scattering: ScatteringEstimate,
    pub timing: TimingReport,
}

impl Validity {
    pub fn ok(&self) -> bool {
        self.scattering.valid && self.timing.feasible
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DisplacementFringe {
    pub phases: Vec<f64>,
    pub displacement_m: Vec<f64>,
    /// Reflected photons per pulse in the beam carrying `N₊(φ)`.
    pub active_plus: Vec<f64>,
    pub active_minus: Vec<f64>,
    pub validity: Validity,
}

impl DisplacementFringe {
    /// Net reflected photons `N'₊ − N'₋` per pulse, the quantity driving the kick.
    pub fn active_net(&self) -> Vec<f64> {
        self.active_plus
            .iter()
            .zip(&self.active_minus)
            .map(|(p, m)| p - m)
            .collect()
    }
}

/// Displacement of the whole lattice after the flight time, per trigger phase.
pub fn displacement_fringe(config: &KickExperimentConfig, phases: &[f64]) -> Result<DisplacementFringe> {
    config.validate()?;
    let params = gain_params(config.gain)?;
    let curve = fringe_curve(params, phases, config.degradation)?;
    let fraction = active_photons(1.0, config.active_bandwidth_hz, config.source_bandwidth_hz)?.count;

    let kick = reflection_momentum(config.species.resonance_wavelength_m)
        * config.cavity_q_factor
        * config.repetitions as f64;
    // metres per net reflected photon per pulse
    let lever = kick / config.total_mass_kg() * config.flight_time_s;

    let active_plus: Vec<f64> = curve.n_plus.iter().map(|n| fraction * n).collect();
    let active_minus: Vec<f64> = curve.n_minus.iter().map(|n| fraction * n).collect();
    // n_diff is computed directly from cos φ, so the φ = π/2 row is free of
    // the cancellation in n_plus - n_minus.
    let displacement_m = curve.n_diff.iter().map(|d| fraction * d * lever).collect();

    let validity = Validity {
        scattering: scattering_probability(
            config.sample.atoms_per_disk,
            &config.species,
            config.scattering_detuning_hz,
        )?,
        timing: timing_check(config, config.expansion_speed_m_per_s)?,
    };
    Ok(DisplacementFringe {
        phases: phases.to_vec(),
        displacement_m,
        active_plus,
        active_minus,
        validity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock_opa::phase_grid;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn active_photon_ratio() {
        assert_eq!(active_photons(1e5, 7e11, 7e11).unwrap().count, 1e5);
        let a = active_photons(1e5, 2e9, 700e9).unwrap();
        assert_relative_eq!(a.count, 285.714_285_714_285_7, max_relative = 1e-14);
        assert!(!a.clamped);
        assert_eq!(active_photons(0.0, 2e9, 700e9).unwrap().count, 0.0);
        let c = active_photons(10.0, 2e12, 700e9).unwrap();
        assert!(c.clamped && c.count == 10.0);
        assert!(active_photons(1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn resonant_photons() {
        let n = resonant_photon_count(1e5, 6e6, 700e9).unwrap();
        assert_relative_eq!(n, 0.857_142_857_142_857, max_relative = 1e-14);
        assert_eq!(resonant_photon_count(42.0, 3e6, 3e6).unwrap(), 42.0);
        assert_eq!(resonant_photon_count(0.0, 6e6, 700e9).unwrap(), 0.0);
    }

    #[test]
    fn timing_values() {
        let mut cfg = KickExperimentConfig::reference_preset();
        cfg.geometry.disk_thickness_m = 200e-9;
        cfg.flight_time_s = 40e-6;
        let t = timing_check(&cfg, 1e-3).unwrap();
        assert_relative_eq!(t.survival_time_s, 50e-6, max_relative = 1e-12);
        assert_relative_eq!(t.exposure_time_s, 1e-8, max_relative = 1e-12);
        assert!(t.feasible);
        let fast = timing_check(&cfg, 1e6).unwrap();
        assert!(!fast.feasible);
        assert!(timing_check(&cfg, 0.0).is_err());
    }

    #[test]
    fn preset_flight_is_marginal() {
        // λ/4 = 198.75 nm leaves 49.69 µs, just short of the 50 µs flight.
        let t = timing_check(&KickExperimentConfig::reference_preset(), 1e-3).unwrap();
        assert_relative_eq!(t.survival_time_s, 49.6875e-6, max_relative = 1e-12);
        assert!(t.flight_margin_s < 0.0 && t.flight_margin_s > -1e-6);
        assert!(!t.feasible);
    }

    #[test]
    fn balanced_phase_gives_no_kick() {
        let cfg = KickExperimentConfig::reference_preset();
        let f = displacement_fringe(&cfg, &[FRAC_PI_2]).unwrap();
        assert!(f.displacement_m[0].abs() < 1e-20);
    }

    /// Independent re-evaluation of the preset chain, step by step.
    #[test]
    fn preset_regression() {
        let cfg = KickExperimentConfig::reference_preset();
        let f = displacement_fringe(&cfg, &[0.0, PI]).unwrap();
        let m_bar = 6f64.sinh().powi(2);
        let n_diff = 0.13 * (2.0 * m_bar + 1.0);
        let active = n_diff * 2e9 / 700e9;
        let p = active * 2.0 * 6.626_070_15e-34 / 795e-9 * 1e4;
        let mass = 200.0 * 500.0 * 86.909_180_527 * 1.660_539_066_60e-27;
        let x = p / mass * 50e-6;
        assert_relative_eq!(f.displacement_m[0], x, max_relative = 1e-12);
        assert_relative_eq!(f.displacement_m[1], -x, max_relative = 1e-12);
        assert_relative_eq!(x, 1.745_634_206_437_252e-6, max_relative = 1e-12);
        assert!(f.validity.scattering.valid);
    }

    #[test]
    fn linear_in_repetitions_q_and_flight() {
        let base = KickExperimentConfig::reference_preset();
        let phases = phase_grid(12);
        let x0 = displacement_fringe(&base, &phases).unwrap().displacement_m;
        for scale in [
            |c: &mut KickExperimentConfig| c.repetitions *= 2,
            |c: &mut KickExperimentConfig| c.cavity_q_factor *= 2.0,
            |c: &mut KickExperimentConfig| c.flight_time_s *= 2.0,
        ] {
            let mut cfg = base;
            scale(&mut cfg);
            let x = displacement_fringe(&cfg, &phases).unwrap().displacement_m;
            for (a, b) in x.iter().zip(&x0) {
                assert!((a - 2.0 * b).abs() <= 1e-12 * b.abs().max(1e-18));
            }
        }
    }

    #[test]
    fn fringe_is_pure_cosine() {
        let mut cfg = KickExperimentConfig::reference_preset();
        cfg.degradation = 1.0;
        let phases = phase_grid(360);
        let f = displacement_fringe(&cfg, &phases).unwrap();
        let amplitude = f.displacement_m[0];
        let worst = phases
            .iter()
            .zip(&f.displacement_m)
            .map(|(phi, x)| (x - amplitude * phi.cos()).abs())
            .fold(0.0, f64::max);
        assert!(worst <= 1e-10 * amplitude.abs());
        for (a, m) in f.active_plus.iter().zip(&f.active_minus) {
            assert!(*a >= 0.0 && *m >= 0.0);
        }
    }

    #[test]
    fn invalid_config() {
        let mut cfg = KickExperimentConfig::reference_preset();
        cfg.repetitions = 0;
        assert!(displacement_fringe(&cfg, &[0.0]).is_err());
        let mut cfg = KickExperimentConfig::reference_preset();
        cfg.cavity_q_factor = 0.5;
        assert!(displacement_fringe(&cfg, &[0.0]).is_err());
    }

    proptest! {
        #[test]
        fn active_never_exceeds_input(n in 0.0..1e7f64, band in 1.0..1e13f64, source in 1.0..1e13f64) {
            let a = active_photons(n, band, source).unwrap();
            prop_assert!(a.count <= n && a.count >= 0.0);
            prop_assert_eq!(a.clamped, band > source);
        }

        #[test]
        fn displacement_linear_in_q(q in 1.0..1e4f64, phi in 0.0..6.3f64) {
            let base = KickExperimentConfig::reference_preset();
            let mut cfg = base;
            cfg.cavity_q_factor = q;
            let x1 = displacement_fringe(&base, &[phi]).unwrap().displacement_m[0];
            let xq = displacement_fringe(&cfg, &[phi]).unwrap().displacement_m[0];
            prop_assert!((xq - q * x1).abs() <= 1e-12 * (q * x1).abs().max(1e-24));
        }

        #[test]
        fn fringe_difference_is_cosine(phi in 0.0..6.3f64, d in 0.01..1.0f64) {
            let mut cfg = KickExperimentConfig::reference_preset();
            cfg.degradation = d;
            let f = displacement_fringe(&cfg, &[0.0, phi, PI - phi]).unwrap();
            let amp = f.displacement_m[0];
            let lhs = f.displacement_m[1] - f.displacement_m[2];
            prop_assert!((lhs - 2.0 * amp * phi.cos()).abs() <= 1e-10 * amp.abs());
        }
    }
}
