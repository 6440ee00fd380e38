//! Photon statistics of the quantum-injected parametric amplifier.
//!
//! A single photon injected in polarization mode `+` (or `-`) is amplified into
//! a macro-state whose Fock expansion carries an odd photon number `2i + 1` in
//! the injected ("aligned") mode and an even number `2j` in the orthogonal one:
//!
//! ```text
//! amplitude(i, j) = C^-2 (-Γ/2)^i (Γ/2)^j sqrt((2i+1)! (2j)!) / (i! j!)
//! C = cosh g,  Γ = tanh g,  m̄ = sinh² g
//! ```
//!
//! The table factorizes as `α_i · β_j` with both marginals normalized to one,
//! which makes the truncation tail computable per mode. Enumeration is an oracle
//! path for moderate gain only; the closed-form moment and visibility formulas
//! are exact and are what large-gain callers should use.

use std::f64::consts::PI;

use crate::error::{ensure, Error, Result};

/// Contrast reduction observed at the amplifier output in the laboratory.
pub const EXPERIMENTAL_DEGRADATION: f64 = 0.13;

pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-10;

/// Derived amplifier quantities for a nonlinear gain `g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainParams {
    pub g: f64,
    /// `cosh g`
    pub big_c: f64,
    /// `tanh g`
    pub gamma: f64,
    /// Mean squeezed-vacuum photon number per polarization mode, `sinh² g`.
    pub m_bar: f64,
}

pub fn gain_params(g: f64) -> Result<GainParams> {
    ensure(g.is_finite() && g >= 0.0, "g", || {
        format!("gain must be finite and non-negative, got {g}")
    })?;
    let s = g.sinh();
    Ok(GainParams {
        g,
        big_c: g.cosh(),
        gamma: g.tanh(),
        m_bar: s * s,
    })
}

/// Limits on the amplitude enumeration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    /// Largest gain for which enumeration is attempted at all.
    pub max_gain: f64,
    /// Hard cap on either truncation index.
    pub max_index: usize,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            max_gain: 3.0,
            max_index: 20_000,
        }
    }
}

/// Truncated Fock table of a macro-state.
#[derive(Debug, Clone, PartialEq)]
pub struct MacroStateAmplitudes {
    pub params: GainParams,
    pub i_max: usize,
    pub j_max: usize,
    /// Signed aligned-mode factors `α_i`, `i = 0..=i_max`.
    aligned: Vec<f64>,
    /// Orthogonal-mode factors `β_j`, `j = 0..=j_max`.
    orthogonal: Vec<f64>,
    aligned_mass: f64,
    orthogonal_mass: f64,
    pub captured_norm: f64,
}

impl MacroStateAmplitudes {
    /// Amplitude of `|2i+1⟩_aligned |2j⟩_orthogonal`, `None` outside the table.
    pub fn amplitude(&self, i: usize, j: usize) -> Option<f64> {
        Some(self.aligned.get(i)? * self.orthogonal.get(j)?)
    }

    /// All stored entries as `(i, j, amplitude)`, row-major in `i`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.aligned.iter().enumerate().flat_map(move |(i, a)| {
            self.orthogonal
                .iter()
                .enumerate()
                .map(move |(j, b)| (i, j, a * b))
        })
    }

    pub fn len(&self) -> usize {
        self.aligned.len() * self.orthogonal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Photon numbers `(aligned, orthogonal)` of the basis ket behind entry `(i, j)`.
    pub fn photon_numbers(i: usize, j: usize) -> (usize, usize) {
        (2 * i + 1, 2 * j)
    }
}

/// Table of `ln k!` for `k = 0..=n`.
fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

struct FactorSeries {
    ln_fact: Vec<f64>,
    ln_c: f64,
    ln_half_gamma: f64,
    sign_flip: bool,
}

impl FactorSeries {
    fn ensure_fact(&mut self, k: usize) {
        if self.ln_fact.len() <= k {
            let mut acc = *self.ln_fact.last().unwrap();
            for m in self.ln_fact.len()..=k.max(2 * self.ln_fact.len()) {
                acc += (m as f64).ln();
                self.ln_fact.push(acc);
            }
        }
    }

    /// `α_i = C^{-3/2} (-Γ/2)^i sqrt((2i+1)!) / i!`
    fn aligned(&mut self, i: usize) -> f64 {
        self.ensure_fact(2 * i + 1);
        let ln = -1.5 * self.ln_c + i as f64 * self.ln_half_gamma + 0.5 * self.ln_fact[2 * i + 1]
            - self.ln_fact[i];
        let sign = if self.sign_flip && i % 2 == 1 { -1.0 } else { 1.0 };
        sign * ln.exp()
    }

    /// `β_j = C^{-1/2} (Γ/2)^j sqrt((2j)!) / j!`
    fn orthogonal(&mut self, j: usize) -> f64 {
        self.ensure_fact(2 * j);
        let ln = -0.5 * self.ln_c + j as f64 * self.ln_half_gamma + 0.5 * self.ln_fact[2 * j]
            - self.ln_fact[j];
        ln.exp()
    }
}

/// Geometric bound on `Σ_{k > last} A_k` for the aligned marginal, whose
/// term ratio `(2k+3)Γ²/(2k+2)` decreases with `k`.
fn aligned_tail_bound(next_term: f64, next_index: usize, gamma2: f64) -> f64 {
    let k = next_index as f64;
    let ratio = (2.0 * k + 3.0) * gamma2 / (2.0 * k + 2.0);
    if ratio < 1.0 {
        next_term / (1.0 - ratio)
    } else {
        f64::INFINITY
    }
}

/// Geometric bound for the orthogonal marginal, whose term ratio
/// `(2k+1)Γ²/(2k+2)` increases towards `Γ²`.
fn orthogonal_tail_bound(next_term: f64, gamma2: f64) -> f64 {
    next_term / (1.0 - gamma2)
}

/// Enumerate the macro-state amplitudes until the certified tail is below
/// `tail_tolerance`.
pub fn macro_amplitudes(params: GainParams, tail_tolerance: f64) -> Result<MacroStateAmplitudes> {
    macro_amplitudes_with(params, tail_tolerance, TruncationPolicy::default())
}

pub fn macro_amplitudes_with(
    params: GainParams,
    tail_tolerance: f64,
    policy: TruncationPolicy,
) -> Result<MacroStateAmplitudes> {
    ensure(tail_tolerance > 0.0 && tail_tolerance < 1.0, "tail_tolerance", || {
        format!("must lie in (0, 1), got {tail_tolerance}")
    })?;
    ensure(params.gamma < 1.0, "gamma", || {
        format!("tanh g must be below 1, got {}", params.gamma)
    })?;

    if params.gamma == 0.0 {
        return Ok(MacroStateAmplitudes {
            params,
            i_max: 0,
            j_max: 0,
            aligned: vec![1.0],
            orthogonal: vec![1.0],
            aligned_mass: 1.0,
            orthogonal_mass: 1.0,
            captured_norm: 1.0,
        });
    }

    let gamma2 = params.gamma * params.gamma;
    let mut series = FactorSeries {
        ln_fact: ln_factorials(64),
        ln_c: params.big_c.ln(),
        ln_half_gamma: (params.gamma / 2.0).ln(),
        sign_flip: true,
    };

    let mut aligned = vec![series.aligned(0)];
    let mut orthogonal = vec![series.orthogonal(0)];
    let mut aligned_mass = aligned[0] * aligned[0];
    let mut orthogonal_mass = orthogonal[0] * orthogonal[0];

    let next_aligned = |s: &mut FactorSeries, i: usize| {
        let a = s.aligned(i);
        a * a
    };
    let next_orth = |s: &mut FactorSeries, j: usize| {
        let b = s.orthogonal(j);
        b * b
    };

    let mut tail_a = aligned_tail_bound(next_aligned(&mut series, 1), 1, gamma2);
    let mut tail_b = orthogonal_tail_bound(next_orth(&mut series, 1), gamma2);

    // 1 - SA·SB <= tail_a + tail_b since each marginal sums to one.
    while tail_a + tail_b > tail_tolerance {
        let i_max = aligned.len() - 1;
        let j_max = orthogonal.len() - 1;
        if i_max >= policy.max_index || j_max >= policy.max_index {
            return Err(Error::TruncationInfeasible {
                gain: params.g,
                achieved_norm: aligned_mass * orthogonal_mass,
                i_max,
                j_max,
            });
        }
        if tail_a >= tail_b {
            let a = series.aligned(i_max + 1);
            aligned.push(a);
            aligned_mass += a * a;
            let k = i_max + 2;
            tail_a = aligned_tail_bound(next_aligned(&mut series, k), k, gamma2);
        } else {
            let b = series.orthogonal(j_max + 1);
            orthogonal.push(b);
            orthogonal_mass += b * b;
            tail_b = orthogonal_tail_bound(next_orth(&mut series, j_max + 2), gamma2);
        }
    }

    let captured_norm = aligned_mass * orthogonal_mass;
    if params.g > policy.max_gain {
        return Err(Error::TruncationInfeasible {
            gain: params.g,
            achieved_norm: captured_norm,
            i_max: aligned.len() - 1,
            j_max: orthogonal.len() - 1,
        });
    }

    Ok(MacroStateAmplitudes {
        params,
        i_max: aligned.len() - 1,
        j_max: orthogonal.len() - 1,
        aligned,
        orthogonal,
        aligned_mass,
        orthogonal_mass,
        captured_norm,
    })
}

/// Mean photon numbers `N₊(φ)`, `N₋(φ)` and their difference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonStats {
    pub n_plus: f64,
    pub n_minus: f64,
    pub n_diff: f64,
}

pub fn photon_stats_closed(params: GainParams, phi: f64) -> PhotonStats {
    let m = params.m_bar;
    let swing = 2.0 * m + 1.0;
    let c = phi.cos();
    PhotonStats {
        n_plus: m + 0.5 * swing * (1.0 + c),
        n_minus: m + 0.5 * swing * (1.0 - c),
        n_diff: swing * c,
    }
}

pub const MIN_CAPTURED_NORM: f64 = 0.999;

/// Renormalized mean photon numbers `(aligned, orthogonal)` of an enumerated table.
pub fn moments_from_amplitudes(amps: &MacroStateAmplitudes) -> Result<(f64, f64)> {
    if !(amps.captured_norm > MIN_CAPTURED_NORM) {
        return Err(Error::UnderTruncated {
            captured_norm: amps.captured_norm,
            required: MIN_CAPTURED_NORM,
        });
    }
    // Σ_ij α_i² β_j² f(i) = SB Σ_i α_i² f(i); the orthogonal mass cancels against the norm.
    let aligned: f64 = amps
        .aligned
        .iter()
        .enumerate()
        .map(|(i, a)| a * a * (2 * i + 1) as f64)
        .sum::<f64>()
        / amps.aligned_mass;
    let orthogonal: f64 = amps
        .orthogonal
        .iter()
        .enumerate()
        .map(|(j, b)| b * b * (2 * j) as f64)
        .sum::<f64>()
        / amps.orthogonal_mass;
    Ok((aligned, orthogonal))
}

/// First-order fringe visibility `(2m̄+1)/(4m̄+1)`.
pub fn visibility(params: GainParams) -> f64 {
    (2.0 * params.m_bar + 1.0) / (4.0 * params.m_bar + 1.0)
}

/// Uniform phase grid `k·2π/count`, `k = 0..count`.
pub fn phase_grid(count: usize) -> Vec<f64> {
    (0..count)
        .map(|k| 2.0 * PI * k as f64 / count as f64)
        .collect()
}

/// Photon-number fringes of the `|Φ⁺⟩` macro-state versus trigger phase.
#[derive(Debug, Clone, PartialEq)]
pub struct FringeCurve {
    pub phases: Vec<f64>,
    pub n_plus: Vec<f64>,
    pub n_minus: Vec<f64>,
    pub n_diff: Vec<f64>,
    pub degradation: f64,
}

impl FringeCurve {
    /// Fringes of the orthogonal macro-state `|Φ⁻⟩`: the same curve shifted by π.
    pub fn opposed(&self) -> FringeCurve {
        FringeCurve {
            phases: self.phases.clone(),
            n_plus: self.n_minus.clone(),
            n_minus: self.n_plus.clone(),
            n_diff: self.n_diff.iter().map(|d| -d).collect(),
            degradation: self.degradation,
        }
    }

    /// `(max - min)/(max + min)` of the `n_plus` samples.
    pub fn contrast(&self) -> Option<f64> {
        contrast(&self.n_plus)
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }
}

pub fn contrast(samples: &[f64]) -> Option<f64> {
    let max = samples.iter().copied().reduce(f64::max)?;
    let min = samples.iter().copied().reduce(f64::min)?;
    Some((max - min) / (max + min))
}

/// Fringe curve with the oscillating part scaled by `degradation`; the total
/// photon number `4m̄ + 1` is unaffected.
pub fn fringe_curve(params: GainParams, phases: &[f64], degradation: f64) -> Result<FringeCurve> {
    ensure(degradation > 0.0 && degradation <= 1.0, "degradation", || {
        format!("must lie in (0, 1], got {degradation}")
    })?;
    let total = 4.0 * params.m_bar + 1.0;
    let swing = 2.0 * params.m_bar + 1.0;
    let n = phases.len();
    let mut curve = FringeCurve {
        phases: phases.to_vec(),
        n_plus: Vec::with_capacity(n),
        n_minus: Vec::with_capacity(n),
        n_diff: Vec::with_capacity(n),
        degradation,
    };
    for &phi in phases {
        let diff = degradation * swing * phi.cos();
        curve.n_plus.push(0.5 * (total + diff));
        curve.n_minus.push(0.5 * (total - diff));
        curve.n_diff.push(diff);
    }
    Ok(curve)
}
