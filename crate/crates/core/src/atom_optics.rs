//! Optical response of the condensate: far-detuned two-level refractive index,
//! densities, incoherent scattering estimate and lattice-disk geometry.
//!
//! Detuning convention, used everywhere in this crate: `Δ = ν₀ - ν`, so a
//! positive detuning is red of resonance and raises the index above one.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const PLANCK: f64 = 6.626_070_15e-34;
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;

/// Disk sizes quoted as typical for lattice-loaded condensates, in metres.
pub const TYPICAL_DISK_SIZE: (f64, f64) = (80e-9, 300e-9);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomicSpecies {
    /// Natural linewidth Γ, Hz.
    pub linewidth_hz: f64,
    pub resonance_wavelength_m: f64,
    /// s-wave scattering length, m.
    pub scattering_length_m: f64,
    pub mass_kg: f64,
}

impl AtomicSpecies {
    /// ⁸⁷Rb on the 795 nm D1 line.
    pub fn rubidium_87() -> Self {
        Self {
            linewidth_hz: 6e6,
            resonance_wavelength_m: 795e-9,
            scattering_length_m: 5.77e-9,
            mass_kg: 86.909_180_527 * ATOMIC_MASS_UNIT,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("linewidth_hz", self.linewidth_hz),
            ("resonance_wavelength_m", self.resonance_wavelength_m),
            ("scattering_length_m", self.scattering_length_m),
            ("mass_kg", self.mass_kg),
        ];
        for (name, v) in fields {
            ensure(v.is_finite() && v > 0.0, name, || format!("must be positive, got {v}"))?;
        }
        Ok(())
    }

    pub fn resonance_frequency_hz(&self) -> f64 {
        SPEED_OF_LIGHT / self.resonance_wavelength_m
    }

    /// Vacuum wavelength of light detuned by `detuning_hz` (`Δ = ν₀ - ν`).
    pub fn wavelength_at_detuning(&self, detuning_hz: f64) -> f64 {
        SPEED_OF_LIGHT / (self.resonance_frequency_hz() - detuning_hz)
    }

    /// Default exclusion half-width around resonance, `10 Γ`.
    pub fn default_cutoff_hz(&self) -> f64 {
        10.0 * self.linewidth_hz
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CondensateSample {
    /// Peak number density `N/V`, m⁻³.
    pub number_density_per_m3: f64,
    pub atoms_per_disk: f64,
    pub transverse_radius_m: f64,
    pub longitudinal_size_m: f64,
    /// Averaged harmonic-oscillator length.
    pub ho_length_m: f64,
}

impl Default for CondensateSample {
    fn default() -> Self {
        Self::typical()
    }
}

impl CondensateSample {
    /// `N/V = 10¹⁴ cm⁻³`, 500 atoms per disk, 5 µm × 200 nm disks.
    pub fn typical() -> Self {
        Self {
            number_density_per_m3: 1e20,
            atoms_per_disk: 500.0,
            transverse_radius_m: 5e-6,
            longitudinal_size_m: 200e-9,
            ho_length_m: 1e-6,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("number_density_per_m3", self.number_density_per_m3),
            ("atoms_per_disk", self.atoms_per_disk),
            ("transverse_radius_m", self.transverse_radius_m),
            ("longitudinal_size_m", self.longitudinal_size_m),
            ("ho_length_m", self.ho_length_m),
        ];
        for (name, v) in fields {
            ensure(v.is_finite() && v > 0.0, name, || format!("must be positive, got {v}"))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskLatticeGeometry {
    pub disk_thickness_m: f64,
    pub period_m: f64,
    pub disk_count: usize,
}

impl DiskLatticeGeometry {
    pub fn gap_m(&self) -> f64 {
        self.period_m - self.disk_thickness_m
    }

    /// Whether the disk thickness falls in the typical 80-300 nm window.
    pub fn within_typical_size(&self) -> bool {
        (TYPICAL_DISK_SIZE.0..=TYPICAL_DISK_SIZE.1).contains(&self.disk_thickness_m)
    }
}

/// `𝒩 = ƛ³ N/V` with `ƛ = λ/2π`.
pub fn rescaled_density(wavelength_m: f64, number_density_per_m3: f64) -> f64 {
    let reduced = wavelength_m / (2.0 * PI);
    reduced.powi(3) * number_density_per_m3
}

/// Dispersive index shift `ε = (3π/2) 𝒩 Γ/Δ`; the condensate index is `1 + ε`.
///
/// Refuses detunings inside `cutoff_hz`, where the far-detuned expansion breaks down.
pub fn dispersive_epsilon(
    species: &AtomicSpecies,
    rescaled_density: f64,
    detuning_hz: f64,
    cutoff_hz: f64,
) -> Result<f64> {
    ensure(cutoff_hz > 0.0, "cutoff_hz", || format!("must be positive, got {cutoff_hz}"))?;
    if !(detuning_hz.abs() >= cutoff_hz) {
        return Err(Error::ResonanceRegion {
            detuning_hz,
            cutoff_hz,
        });
    }
    Ok(1.5 * PI * rescaled_density * species.linewidth_hz / detuning_hz)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringEstimate {
    pub probability: f64,
    /// False once the estimate reaches one: the loss is no longer perturbative.
    pub valid: bool,
}

/// Incoherent scattering probability per disk, `N_at Γ/|Δ|`.
pub fn scattering_probability(
    atoms_per_disk: f64,
    species: &AtomicSpecies,
    detuning_hz: f64,
) -> Result<ScatteringEstimate> {
    ensure(detuning_hz != 0.0 && detuning_hz.is_finite(), "detuning_hz", || {
        "scattering estimate needs a non-zero detuning".into()
    })?;
    let p = atoms_per_disk * species.linewidth_hz / detuning_hz.abs();
    Ok(ScatteringEstimate {
        probability: p,
        valid: p < 1.0,
    })
}

/// Peak Thomas-Fermi density, both as the literal expression
/// `(1/8π)(1/(a_ho a))(15 N a/a_ho)^{2/5}` and after the unit audit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThomasFermiDensity {
    /// Literal expression; dimension 1/length², not a volume density.
    pub literal: f64,
    /// Standard central density `μ/g = (15 N a/a_ho)^{2/5} / (8π a_ho² a)`, m⁻³.
    pub audited_per_m3: f64,
    /// Always false: flags that `literal` is not a 3-D density.
    pub literal_is_volume_density: bool,
}

pub fn thomas_fermi_peak_density(
    atoms_per_disk: f64,
    species: &AtomicSpecies,
    ho_length_m: f64,
) -> Result<ThomasFermiDensity> {
    ensure(atoms_per_disk > 0.0, "atoms_per_disk", || {
        format!("must be positive, got {atoms_per_disk}")
    })?;
    ensure(ho_length_m > 0.0, "ho_length_m", || format!("must be positive, got {ho_length_m}"))?;
    let a = species.scattering_length_m;
    let chemical = (15.0 * atoms_per_disk * a / ho_length_m).powf(0.4);
    let literal = chemical / (8.0 * PI * ho_length_m * a);
    Ok(ThomasFermiDensity {
        literal,
        audited_per_m3: literal / ho_length_m,
        literal_is_volume_density: false,
    })
}

/// Disks of thickness `λ/4` on a `λ/2` period.
pub fn quarter_wave_geometry(wavelength_m: f64, disk_count: usize) -> Result<DiskLatticeGeometry> {
    ensure(wavelength_m > 0.0 && wavelength_m.is_finite(), "wavelength_m", || {
        format!("must be positive, got {wavelength_m}")
    })?;
    ensure(disk_count >= 1, "disk_count", || "need at least one disk".into())?;
    Ok(DiskLatticeGeometry {
        disk_thickness_m: wavelength_m / 4.0,
        period_m: wavelength_m / 2.0,
        disk_count,
    })
}

/// Longitudinal disk size `prefactor · s^{-1/4} / k` for lattice depth `s`.
pub fn lattice_disk_size(lattice_depth_s: f64, wavenumber_k: f64, prefactor: f64) -> Result<f64> {
    ensure(lattice_depth_s > 0.0, "lattice_depth_s", || {
        format!("must be positive, got {lattice_depth_s}")
    })?;
    ensure(wavenumber_k > 0.0, "wavenumber_k", || format!("must be positive, got {wavenumber_k}"))?;
    Ok(prefactor * lattice_depth_s.powf(-0.25) / wavenumber_k)
}
