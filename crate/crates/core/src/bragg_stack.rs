//! Normal-incidence transfer-matrix optics of layered media.
//!
//! Each layer of index `n` and thickness `d` contributes the characteristic matrix
//!
//! ```text
//! | cos δ       i sin δ / n |      δ = 2π n d / λ
//! | i n sin δ   cos δ       |
//! ```
//!
//! and a stack is the ordered product, incident side first. Both ambient media
//! are vacuum. A periodic lattice of `N_D` disk/gap pairs is evaluated as the
//! `N_D`-th power of the pair matrix.

use std::ops::Mul;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::atom_optics::{
    dispersive_epsilon, rescaled_density, AtomicSpecies, CondensateSample, DiskLatticeGeometry,
    SPEED_OF_LIGHT,
};
use crate::error::{ensure, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Layer {
    pub refractive_index: f64,
    pub thickness_m: f64,
}

impl Layer {
    pub fn new(refractive_index: f64, thickness_m: f64) -> Result<Self> {
        ensure(refractive_index > 0.0 && refractive_index.is_finite(), "refractive_index", || {
            format!("must be positive, got {refractive_index}")
        })?;
        ensure(thickness_m >= 0.0 && thickness_m.is_finite(), "thickness_m", || {
            format!("must be non-negative, got {thickness_m}")
        })?;
        Ok(Self {
            refractive_index,
            thickness_m,
        })
    }
}

/// Layers between two vacuum half-spaces.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LayerStack {
    layers: Vec<Layer>,
}

/// How a quarter-wave layer's thickness is chosen at the design wavelength.
///
/// For a disk lattice, `Optical` reads the geometry's disk thickness as an
/// optical thickness and shrinks the disk to `d/n` at each index; the vacuum
/// gaps are unchanged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuarterWave {
    /// Optical thickness `λ₀/4`, i.e. geometric `λ₀/(4n)`.
    Optical,
    /// Geometric thickness `λ₀/4` regardless of index.
    #[default]
    Geometric,
}

impl QuarterWave {
    pub fn thickness(self, index: f64, design_wavelength_m: f64) -> f64 {
        match self {
            QuarterWave::Optical => design_wavelength_m / (4.0 * index),
            QuarterWave::Geometric => design_wavelength_m / 4.0,
        }
    }
}

impl LayerStack {
    pub fn new(layers: Vec<Layer>) -> Self {
        Self { layers }
    }

    /// `n_d` pairs of (`n_b` slab, vacuum gap), both a quarter wave thick.
    pub fn quarter_wave(n_b: f64, n_d: usize, design_wavelength_m: f64, mode: QuarterWave) -> Result<Self> {
        let slab = Layer::new(n_b, mode.thickness(n_b, design_wavelength_m))?;
        let gap = Layer::new(1.0, design_wavelength_m / 4.0)?;
        let mut layers = Vec::with_capacity(2 * n_d);
        for _ in 0..n_d {
            layers.push(slab);
            layers.push(gap);
        }
        Ok(Self { layers })
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn push(&mut self, layer: Layer) {
        self.layers.push(layer);
    }

    pub fn len(&self) -> usize {
        self.layers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }

    pub fn reversed(&self) -> Self {
        Self {
            layers: self.layers.iter().rev().copied().collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacteristicMatrix {
    pub m11: Complex64,
    pub m12: Complex64,
    pub m21: Complex64,
    pub m22: Complex64,
}

/// Amplitude response of a stack with vacuum on both sides.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Response {
    pub r: Complex64,
    pub t: Complex64,
}

impl Response {
    pub fn reflectivity(&self) -> f64 {
        // deep in a stopband |r|² can land an ulp above 1
        self.r.norm_sqr().min(1.0)
    }

    pub fn transmissivity(&self) -> f64 {
        self.t.norm_sqr()
    }
}

impl CharacteristicMatrix {
    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self {
            m11: one,
            m12: zero,
            m21: zero,
            m22: one,
        }
    }

    pub fn determinant(&self) -> Complex64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    /// `self^n` by repeated squaring.
    pub fn pow(self, mut n: usize) -> Self {
        let mut base = self;
        let mut acc = Self::identity();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            n >>= 1;
        }
        acc
    }

    pub fn response(&self) -> Response {
        let denom = self.m11 + self.m12 + self.m21 + self.m22;
        Response {
            r: (self.m11 + self.m12 - self.m21 - self.m22) / denom,
            t: Complex64::new(2.0, 0.0) / denom,
        }
    }
}

impl Mul for CharacteristicMatrix {
    type Output = CharacteristicMatrix;

    fn mul(self, o: CharacteristicMatrix) -> CharacteristicMatrix {
        CharacteristicMatrix {
            m11: self.m11 * o.m11 + self.m12 * o.m21,
            m12: self.m11 * o.m12 + self.m12 * o.m22,
            m21: self.m21 * o.m11 + self.m22 * o.m21,
            m22: self.m21 * o.m12 + self.m22 * o.m22,
        }
    }
}

pub fn layer_matrix(layer: &Layer, wavelength_m: f64) -> CharacteristicMatrix {
    let n = layer.refractive_index;
    let delta = 2.0 * std::f64::consts::PI * n * layer.thickness_m / wavelength_m;
    let (s, c) = delta.sin_cos();
    CharacteristicMatrix {
        m11: Complex64::new(c, 0.0),
        m12: Complex64::new(0.0, s / n),
        m21: Complex64::new(0.0, n * s),
        m22: Complex64::new(c, 0.0),
    }
}

pub fn stack_matrix(stack: &LayerStack, wavelength_m: f64) -> CharacteristicMatrix {
    stack
        .layers
        .iter()
        .fold(CharacteristicMatrix::identity(), |acc, l| acc * layer_matrix(l, wavelength_m))
}

pub fn stack_response(stack: &LayerStack, wavelength_m: f64) -> Response {
    stack_matrix(stack, wavelength_m).response()
}

pub fn stack_reflectivity(stack: &LayerStack, wavelength_m: f64) -> f64 {
    stack_response(stack, wavelength_m).reflectivity()
}

/// Peak reflectivity of `n_d` quarter-wave pairs, `((n^{2N}-1)/(n^{2N}+1))²`,
/// evaluated as `tanh²(N ln n)` so large exponents never overflow.
pub fn closed_form_reflectivity(n_b: f64, n_d: usize) -> f64 {
    let x = n_d as f64 * n_b.ln();
    let t = x.tanh();
    t * t
}

/// Full stopband width `(4ν/π) arcsin(|n-1|/(n+1))`.
pub fn stopband_width(n_b: f64, frequency_hz: f64) -> f64 {
    4.0 * frequency_hz / std::f64::consts::PI * ((n_b - 1.0).abs() / (n_b + 1.0)).asin()
}

/// Small-contrast limit `(2ν/π)|ε|`.
pub fn stopband_width_small_contrast(n_b: f64, frequency_hz: f64) -> f64 {
    2.0 * frequency_hz / std::f64::consts::PI * (n_b - 1.0).abs()
}

/// Width of the contiguous frequency band around `center_hz` where a
/// reflectivity curve exceeds `threshold`. Walks outwards in steps of
/// `step_hz`, then bisects each edge to `step_hz·1e-6`. `None` if the
/// centre itself is below threshold.
pub fn measure_band<F>(reflectivity_at: F, center_hz: f64, step_hz: f64, threshold: f64) -> Option<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    if reflectivity_at(center_hz) <= threshold {
        return None;
    }
    let edge = |dir: f64| {
        let mut inside = center_hz;
        let mut outside = center_hz + dir * step_hz;
        while reflectivity_at(outside) > threshold {
            inside = outside;
            outside += dir * step_hz;
        }
        while (outside - inside).abs() > step_hz * 1e-6 {
            let mid = 0.5 * (inside + outside);
            if reflectivity_at(mid) > threshold {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        0.5 * (inside + outside)
    };
    Some((edge(-1.0), edge(1.0)))
}

/// One scanned point of a dispersive reflectivity spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumSample {
    pub detuning_hz: f64,
    pub wavelength_m: f64,
    /// `None` inside the resonance mask.
    pub epsilon: Option<f64>,
    pub reflectivity: Option<f64>,
}

impl SpectrumSample {
    pub fn masked(&self) -> bool {
        self.reflectivity.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReflectivitySpectrum {
    pub samples: Vec<SpectrumSample>,
    /// Detuning interval `[-cutoff, cutoff]` excluded from the model, when the
    /// scan reaches into it.
    pub masked_region: Option<(f64, f64)>,
}

impl ReflectivitySpectrum {
    /// Widest run of consecutive unmasked samples with reflectivity above
    /// `threshold`, as `(first, last)` detunings.
    pub fn widest_band_above(&self, threshold: f64) -> Option<(f64, f64)> {
        let mut best: Option<(usize, usize)> = None;
        let mut start: Option<usize> = None;
        let n = self.samples.len();
        for k in 0..=n {
            let above = k < n && self.samples[k].reflectivity.is_some_and(|r| r > threshold);
            match (above, start) {
                (true, None) => start = Some(k),
                (false, Some(s)) => {
                    if best.is_none_or(|(a, b)| k - s > b - a + 1) {
                        best = Some((s, k - 1));
                    }
                    start = None;
                }
                _ => {}
            }
        }
        best.map(|(a, b)| (self.samples[a].detuning_hz, self.samples[b].detuning_hz))
    }
}

fn disk_thickness(n_b: f64, geometry: &DiskLatticeGeometry, mode: QuarterWave) -> f64 {
    match mode {
        QuarterWave::Optical => geometry.disk_thickness_m / n_b,
        QuarterWave::Geometric => geometry.disk_thickness_m,
    }
}

/// Pair matrix of one disk/gap period raised to the disk count.
fn lattice_matrix(n_b: f64, geometry: &DiskLatticeGeometry, wavelength_m: f64, mode: QuarterWave) -> CharacteristicMatrix {
    let disk = Layer {
        refractive_index: n_b,
        thickness_m: disk_thickness(n_b, geometry, mode),
    };
    let gap = Layer {
        refractive_index: 1.0,
        thickness_m: geometry.gap_m(),
    };
    (layer_matrix(&disk, wavelength_m) * layer_matrix(&gap, wavelength_m)).pow(geometry.disk_count)
}

/// The disk lattice as an explicit layer list, for a given condensate index.
pub fn lattice_stack(n_b: f64, geometry: &DiskLatticeGeometry) -> LayerStack {
    lattice_stack_with(n_b, geometry, QuarterWave::Geometric)
}

pub fn lattice_stack_with(n_b: f64, geometry: &DiskLatticeGeometry, mode: QuarterWave) -> LayerStack {
    let mut stack = LayerStack::default();
    for _ in 0..geometry.disk_count {
        stack.push(Layer {
            refractive_index: n_b,
            thickness_m: disk_thickness(n_b, geometry, mode),
        });
        stack.push(Layer {
            refractive_index: 1.0,
            thickness_m: geometry.gap_m(),
        });
    }
    stack
}

/// Reflectivity of the disk lattice across a detuning scan, with the
/// condensate index re-evaluated at every detuning. Points within `cutoff_hz`
/// of resonance are kept in the output but masked.
pub fn reflectivity_spectrum(
    species: &AtomicSpecies,
    sample: &CondensateSample,
    geometry: &DiskLatticeGeometry,
    scan_hz: &[f64],
    cutoff_hz: f64,
) -> Result<ReflectivitySpectrum> {
    reflectivity_spectrum_with(species, sample, geometry, scan_hz, cutoff_hz, QuarterWave::Geometric)
}

/// As [`reflectivity_spectrum`], with the disk thickness read according to `mode`.
pub fn reflectivity_spectrum_with(
    species: &AtomicSpecies,
    sample: &CondensateSample,
    geometry: &DiskLatticeGeometry,
    scan_hz: &[f64],
    cutoff_hz: f64,
    mode: QuarterWave,
) -> Result<ReflectivitySpectrum> {
    ensure(cutoff_hz > 0.0, "cutoff_hz", || format!("must be positive, got {cutoff_hz}"))?;
    ensure(scan_hz.windows(2).all(|w| w[0] <= w[1]), "scan", || {
        "detuning grid must be sorted".into()
    })?;
    let density = rescaled_density(species.resonance_wavelength_m, sample.number_density_per_m3);

    let samples = scan_hz
        .par_iter()
        .map(|&detuning_hz| {
            let wavelength_m = species.wavelength_at_detuning(detuning_hz);
            match dispersive_epsilon(species, density, detuning_hz, cutoff_hz) {
                Ok(eps) => {
                    let r = lattice_matrix(1.0 + eps, geometry, wavelength_m, mode)
                        .response()
                        .reflectivity();
                    Ok(SpectrumSample {
                        detuning_hz,
                        wavelength_m,
                        epsilon: Some(eps),
                        reflectivity: Some(r),
                    })
                }
                Err(Error::ResonanceRegion { .. }) => Ok(SpectrumSample {
                    detuning_hz,
                    wavelength_m,
                    epsilon: None,
                    reflectivity: None,
                }),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let masked_region = samples
        .iter()
        .any(SpectrumSample::masked)
        .then_some((-cutoff_hz, cutoff_hz));
    Ok(ReflectivitySpectrum {
        samples,
        masked_region,
    })
}

/// Atomic density along the lattice axis.
pub trait DensityProfile {
    /// Density in m⁻³ at position `z_m` measured from the incident face.
    fn density_at(&self, z_m: f64) -> f64;
    /// Axial extent of the profile.
    fn length_m(&self) -> f64;
}

/// Linearly interpolated samples; positions must be increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledProfile {
    positions_m: Vec<f64>,
    densities_per_m3: Vec<f64>,
}

impl SampledProfile {
    pub fn new(positions_m: Vec<f64>, densities_per_m3: Vec<f64>) -> Result<Self> {
        ensure(
            positions_m.len() == densities_per_m3.len() && positions_m.len() >= 2,
            "density_profile",
            || "need at least two (position, density) pairs of equal length".into(),
        )?;
        ensure(positions_m.windows(2).all(|w| w[0] < w[1]), "density_profile", || {
            "positions must be strictly increasing".into()
        })?;
        ensure(densities_per_m3.iter().all(|d| *d >= 0.0), "density_profile", || {
            "densities must be non-negative".into()
        })?;
        Ok(Self {
            positions_m,
            densities_per_m3,
        })
    }
}

impl DensityProfile for SampledProfile {
    fn density_at(&self, z_m: f64) -> f64 {
        let z = z_m + self.positions_m[0];
        let k = self.positions_m.partition_point(|p| *p <= z);
        if k == 0 {
            return self.densities_per_m3[0];
        }
        if k == self.positions_m.len() {
            return *self.densities_per_m3.last().unwrap();
        }
        let (z0, z1) = (self.positions_m[k - 1], self.positions_m[k]);
        let (d0, d1) = (self.densities_per_m3[k - 1], self.densities_per_m3[k]);
        d0 + (d1 - d0) * (z - z0) / (z1 - z0)
    }

    fn length_m(&self) -> f64 {
        self.positions_m.last().unwrap() - self.positions_m[0]
    }
}

/// `peak · sin²(π z/period)` over a whole number of periods: density nodes at
/// every period boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinusoidalProfile {
    pub peak_density_per_m3: f64,
    pub period_m: f64,
    pub periods: usize,
}

impl DensityProfile for SinusoidalProfile {
    fn density_at(&self, z_m: f64) -> f64 {
        let s = (std::f64::consts::PI * z_m / self.period_m).sin();
        self.peak_density_per_m3 * s * s
    }

    fn length_m(&self) -> f64 {
        self.period_m * self.periods as f64
    }
}

/// Uniform disks of `disk_fraction · period` followed by empty gaps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlabProfile {
    pub density_per_m3: f64,
    pub period_m: f64,
    pub disk_fraction: f64,
    pub periods: usize,
}

impl DensityProfile for SlabProfile {
    fn density_at(&self, z_m: f64) -> f64 {
        let phase = (z_m / self.period_m).rem_euclid(1.0);
        if phase < self.disk_fraction {
            self.density_per_m3
        } else {
            0.0
        }
    }

    fn length_m(&self) -> f64 {
        self.period_m * self.periods as f64
    }
}

/// Density-to-index map `n = 1 + ε(𝒩(ρ), Δ)` at a fixed detuning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersiveIndex {
    pub species: AtomicSpecies,
    pub detuning_hz: f64,
    pub cutoff_hz: f64,
}

impl DispersiveIndex {
    pub fn index_for_density(&self, density_per_m3: f64) -> Result<f64> {
        let n = rescaled_density(self.species.resonance_wavelength_m, density_per_m3);
        Ok(1.0 + dispersive_epsilon(&self.species, n, self.detuning_hz, self.cutoff_hz)?)
    }

    pub fn probe_wavelength_m(&self) -> f64 {
        self.species.wavelength_at_detuning(self.detuning_hz)
    }
}

/// Staircase discretization of a graded density profile on a `λ/2` lattice:
/// each period is cut into `sublayers_per_period` equal slabs whose index is
/// taken from the density at the slab midpoint.
pub fn graded_stack_from_profile<P: DensityProfile + ?Sized>(
    profile: &P,
    wavelength_m: f64,
    sublayers_per_period: usize,
    index: &DispersiveIndex,
) -> Result<LayerStack> {
    ensure(sublayers_per_period >= 2, "sublayers_per_period", || {
        format!("need at least 2, got {sublayers_per_period}")
    })?;
    ensure(wavelength_m > 0.0, "wavelength_m", || format!("must be positive, got {wavelength_m}"))?;
    let period = wavelength_m / 2.0;
    let periods = (profile.length_m() / period).round() as usize;
    let count = periods * sublayers_per_period;
    let thickness = period / sublayers_per_period as f64;
    let mut stack = LayerStack::default();
    for k in 0..count {
        let z = (k as f64 + 0.5) * thickness;
        let density = profile.density_at(z);
        ensure(density >= 0.0, "density_profile", || {
            format!("negative density {density} at z = {z}")
        })?;
        stack.push(Layer::new(index.index_for_density(density)?, thickness)?);
    }
    Ok(stack)
}

/// Centre frequency of a design wavelength.
pub fn frequency_of(wavelength_m: f64) -> f64 {
    SPEED_OF_LIGHT / wavelength_m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atom_optics::quarter_wave_geometry;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const LAMBDA: f64 = 795e-9;

    #[test]
    fn zero_thickness_is_identity() {
        let m = layer_matrix(&Layer::new(1.7, 0.0).unwrap(), LAMBDA);
        assert_eq!(m, CharacteristicMatrix::identity());
    }

    #[test]
    fn vacuum_slab_is_invisible() {
        let stack = LayerStack::quarter_wave(1.02, 20, LAMBDA, QuarterWave::Optical).unwrap();
        let mut padded = stack.clone();
        padded.push(Layer::new(1.0, 313e-9).unwrap());
        let mut front = LayerStack::new(vec![Layer::new(1.0, 71e-9).unwrap()]);
        for l in stack.layers() {
            front.push(*l);
        }
        for lam in [700e-9, LAMBDA, 810e-9] {
            let r = stack_reflectivity(&stack, lam);
            assert_relative_eq!(stack_reflectivity(&padded, lam), r, epsilon = 1e-13);
            assert_relative_eq!(stack_reflectivity(&front, lam), r, epsilon = 1e-13);
        }
    }

    #[test]
    fn quarter_wave_optical_thickness() {
        let n = 1.5;
        let m = layer_matrix(&Layer::new(n, LAMBDA / (4.0 * n)).unwrap(), LAMBDA);
        assert!(m.m11.norm() < 1e-15 && m.m22.norm() < 1e-15);
        assert_relative_eq!(m.m12.im, 1.0 / n, epsilon = 1e-15);
        assert_relative_eq!(m.m21.im, n, epsilon = 1e-15);
    }

    #[test]
    fn empty_and_half_wave() {
        assert_eq!(stack_reflectivity(&LayerStack::default(), LAMBDA), 0.0);
        let half = LayerStack::new(vec![Layer::new(1.5, LAMBDA / (2.0 * 1.5)).unwrap()]);
        assert!(stack_reflectivity(&half, LAMBDA) < 1e-28);
        // A single quarter-wave slab is not invisible.
        let quarter = LayerStack::quarter_wave(1.5, 1, LAMBDA, QuarterWave::Optical).unwrap();
        assert_relative_eq!(stack_reflectivity(&quarter, LAMBDA), (1.25f64 / 3.25).powi(2), epsilon = 1e-14);
    }

    #[test]
    fn transfer_matrix_matches_closed_form() {
        let stack = LayerStack::quarter_wave(1.01, 50, LAMBDA, QuarterWave::Optical).unwrap();
        let tmm = stack_reflectivity(&stack, LAMBDA);
        assert!((tmm - closed_form_reflectivity(1.01, 50)).abs() <= 1e-10);
    }

    #[test]
    fn closed_form_values() {
        assert_eq!(closed_form_reflectivity(1.0, 100), 0.0);
        // N_D ε = 0.01
        let eps = 1e-4;
        let r = closed_form_reflectivity(1.0 + eps, 100);
        assert_relative_eq!(r, 1e-4, max_relative = 0.01);
        // Direct powers for a moderate exponent.
        let p = 1.028f64.powi(300);
        let direct = ((p - 1.0) / (p + 1.0)).powi(2);
        let r = closed_form_reflectivity(1.028, 150);
        assert_relative_eq!(r, direct, max_relative = 1e-13);
        assert!(r > 0.998 && r < 0.9992, "{r}");
        // Exponents far past f64 overflow stay finite.
        assert_eq!(closed_form_reflectivity(1.05, 100_000), 1.0);
        assert_eq!(closed_form_reflectivity(1.0 / 1.01, 50), closed_form_reflectivity(1.01, 50));
    }

    #[test]
    fn stopband_limits() {
        let nu = frequency_of(LAMBDA);
        assert_eq!(stopband_width(1.0, nu), 0.0);
        for eps in [1e-2, 1e-4, 1e-6] {
            let ratio = stopband_width(1.0 + eps, nu) / stopband_width_small_contrast(1.0 + eps, nu);
            assert!((ratio - 1.0).abs() < eps, "{eps}: {ratio}");
        }
        // Below-unity indices use |n - 1|.
        let below = 4.0 * nu / std::f64::consts::PI * (0.01f64 / 1.99).asin();
        assert_relative_eq!(stopband_width(0.99, nu), below, max_relative = 1e-15);
    }

    #[test]
    fn measured_stopband_for_long_stack() {
        let n_b = 1.005;
        let stack = LayerStack::quarter_wave(n_b, 3000, LAMBDA, QuarterWave::Optical).unwrap();
        let nu0 = frequency_of(LAMBDA);
        let expected = stopband_width(n_b, nu0);
        let (lo, hi) = measure_band(
            |nu| stack_reflectivity(&stack, SPEED_OF_LIGHT / nu),
            nu0,
            expected / 200.0,
            0.5,
        )
        .unwrap();
        let ratio = (hi - lo) / expected;
        assert!((ratio - 1.0).abs() < 0.05, "{ratio}");
    }

    #[test]
    fn power_matches_explicit_product() {
        let geometry = quarter_wave_geometry(LAMBDA, 137).unwrap();
        for lam in [780e-9, LAMBDA, 801e-9] {
            let fast = lattice_matrix(1.013, &geometry, lam, QuarterWave::Geometric).response().reflectivity();
            let slow = stack_reflectivity(&lattice_stack(1.013, &geometry), lam);
            assert_relative_eq!(fast, slow, epsilon = 1e-12);
        }
    }

    #[test]
    fn spectrum_masks_and_far_wing() {
        let rb = AtomicSpecies::rubidium_87();
        let sample = CondensateSample::typical();
        let geometry = quarter_wave_geometry(rb.resonance_wavelength_m, 150).unwrap();
        let scan = [-1e13, -5e7, 0.0, 3e7, 1e9, 1e13];
        let s = reflectivity_spectrum(&rb, &sample, &geometry, &scan, rb.default_cutoff_hz()).unwrap();
        assert_eq!(s.masked_region, Some((-6e7, 6e7)));
        let masked: Vec<bool> = s.samples.iter().map(|p| p.masked()).collect();
        assert_eq!(masked, [false, true, true, true, false, false]);
        assert!(s.samples[5].reflectivity.unwrap() < 1e-6);
        assert!(s.samples[0].reflectivity.unwrap() < 1e-6);
        assert!(reflectivity_spectrum(&rb, &sample, &geometry, &[1e9, 0.5e9], 6e7).is_err());
        let clear = reflectivity_spectrum(&rb, &sample, &geometry, &[1e9, 2e9], 6e7).unwrap();
        assert_eq!(clear.masked_region, None);
    }

    #[test]
    fn geometric_disks_miss_the_bragg_condition() {
        // Mean index shift ε/2 outruns the half stopband ε/π: R stays near (2/π)².
        let rb = AtomicSpecies::rubidium_87();
        let sample = CondensateSample::typical();
        let geometry = quarter_wave_geometry(rb.resonance_wavelength_m, 150).unwrap();
        let scan: Vec<f64> = (1..=40).map(|k| k as f64 * 25e6 + 50e6).collect();
        let cut = rb.default_cutoff_hz();
        let geo = reflectivity_spectrum(&rb, &sample, &geometry, &scan, cut).unwrap();
        let peak = geo.samples.iter().filter_map(|p| p.reflectivity).fold(0.0, f64::max);
        assert!(peak < 0.45, "{peak}");

        let opt = reflectivity_spectrum_with(&rb, &sample, &geometry, &scan, cut, QuarterWave::Optical).unwrap();
        for p in &opt.samples {
            let r = p.reflectivity.unwrap();
            let closed = closed_form_reflectivity(1.0 + p.epsilon.unwrap(), 150);
            assert!((r - closed).abs() < 1e-6, "{} {r} {closed}", p.detuning_hz);
        }
        assert!(opt.widest_band_above(0.99).is_some());
    }

    #[test]
    fn slab_profile_reproduces_two_level_stack() {
        let rb = AtomicSpecies::rubidium_87();
        let index = DispersiveIndex {
            species: rb,
            detuning_hz: 2e9,
            cutoff_hz: rb.default_cutoff_hz(),
        };
        let geometry = quarter_wave_geometry(rb.resonance_wavelength_m, 80).unwrap();
        let profile = SlabProfile {
            density_per_m3: 1e20,
            period_m: geometry.period_m,
            disk_fraction: 0.5,
            periods: 80,
        };
        let n_b = index.index_for_density(1e20).unwrap();
        let reference = lattice_stack(n_b, &geometry);
        let lam = index.probe_wavelength_m();
        for sub in [2, 4, 8] {
            let stack = graded_stack_from_profile(&profile, rb.resonance_wavelength_m, sub, &index).unwrap();
            assert_relative_eq!(
                stack_reflectivity(&stack, lam),
                stack_reflectivity(&reference, lam),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn empty_profile_is_transparent() {
        let rb = AtomicSpecies::rubidium_87();
        let index = DispersiveIndex {
            species: rb,
            detuning_hz: 1e9,
            cutoff_hz: rb.default_cutoff_hz(),
        };
        let profile = SinusoidalProfile {
            peak_density_per_m3: 0.0,
            period_m: LAMBDA / 2.0,
            periods: 50,
        };
        let stack = graded_stack_from_profile(&profile, LAMBDA, 8, &index).unwrap();
        for lam in [700e-9, LAMBDA, 900e-9] {
            assert!(stack_reflectivity(&stack, lam) < 1e-28);
        }
        assert!(graded_stack_from_profile(&profile, LAMBDA, 1, &index).is_err());
    }

    #[test]
    fn sampled_profile_interpolates() {
        let p = SampledProfile::new(vec![1.0, 2.0, 4.0], vec![0.0, 10.0, 30.0]).unwrap();
        assert_eq!(p.length_m(), 3.0);
        assert_eq!(p.density_at(0.5), 5.0);
        assert_eq!(p.density_at(2.0), 20.0);
        assert_eq!(p.density_at(9.0), 30.0);
        assert!(SampledProfile::new(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(SampledProfile::new(vec![0.0, 1.0], vec![1.0, -1.0]).is_err());
    }

    #[test]
    fn band_detection() {
        let mk = |d: f64, r: Option<f64>| SpectrumSample {
            detuning_hz: d,
            wavelength_m: 0.0,
            epsilon: None,
            reflectivity: r,
        };
        let s = ReflectivitySpectrum {
            samples: vec![
                mk(0.0, Some(0.995)),
                mk(1.0, Some(0.2)),
                mk(2.0, Some(0.999)),
                mk(3.0, Some(0.998)),
                mk(4.0, None),
                mk(5.0, Some(0.999)),
            ],
            masked_region: None,
        };
        assert_eq!(s.widest_band_above(0.99), Some((2.0, 3.0)));
        assert_eq!(s.widest_band_above(0.9999), None);
    }

    fn arb_stack() -> impl Strategy<Value = LayerStack> {
        prop::collection::vec((1.0f64..2.5, 0.0f64..600e-9), 1..40).prop_map(|v| {
            LayerStack::new(
                v.into_iter()
                    .map(|(n, d)| Layer::new(n, d).unwrap())
                    .collect(),
            )
        })
    }

    proptest! {
        #[test]
        fn lossless_invariants(stack in arb_stack(), lam in 400e-9f64..1200e-9) {
            let m = stack_matrix(&stack, lam);
            prop_assert!((m.determinant() - Complex64::new(1.0, 0.0)).norm() < 1e-10);
            let resp = m.response();
            let (r, t) = (resp.reflectivity(), resp.transmissivity());
            prop_assert!((0.0..=1.0).contains(&r));
            prop_assert!((r + t - 1.0).abs() < 1e-9);
            let back = stack_reflectivity(&stack.reversed(), lam);
            prop_assert!((back.sqrt() - r.sqrt()).abs() < 1e-10);
        }

        #[test]
        fn more_pairs_reflect_more(n_b in 1.0001f64..1.1, n_d in 1usize..400) {
            let a = stack_reflectivity(&LayerStack::quarter_wave(n_b, n_d, LAMBDA, QuarterWave::Optical).unwrap(), LAMBDA);
            let b = stack_reflectivity(&LayerStack::quarter_wave(n_b, n_d + 1, LAMBDA, QuarterWave::Optical).unwrap(), LAMBDA);
            prop_assert!(b > a || a > 1.0 - 1e-12, "{a} {b}");
        }
    }

    #[test]
    fn unimodular_for_long_stacks() {
        // Rounding in the determinant grows like eps·‖M‖²; deep inside a
        // stopband (‖M‖ ~ 250 at 800 nm here) it reaches ~1e-10 on its own.
        let stack = LayerStack::quarter_wave(1.03, 500, LAMBDA, QuarterWave::Geometric).unwrap();
        for lam in [700e-9, 790e-9, 795e-9, 900e-9] {
            let m = stack_matrix(&stack, lam);
            let det = m.determinant();
            assert!((det - Complex64::new(1.0, 0.0)).norm() < 1e-10);
        }
    }
}
