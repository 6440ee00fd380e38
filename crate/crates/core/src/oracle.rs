//! Brute-force two-mode Fock-space evolution under the parametric Hamiltonian
//! `H = i(a_H† a_V† - a_H a_V)` (units with `χt = g`).
//!
//! Used as an independent check on [`crate::fock_opa`]. States live on the
//! square grid `0 <= n_H, n_V <= n_max`; the propagator `exp(-iHg)` is applied
//! with a scaled Taylor series on the truncated space.
//!
//! Phase convention: `exp(-iHg)` maps the vacuum onto the two-mode squeezed
//! vacuum `C⁻¹ Σ Γⁿ |n, n⟩` with positive weights. With the `±` modes
//! `a_±† = (a_H† ± a_V†)/√2`, a photon injected in `-` then evolves exactly into
//! the tabulated macro-state. A photon injected in `+` evolves into the same
//! table with `Γ → -Γ`, i.e. an extra `(-1)^(i+j)` per ket, which is a free
//! quarter-period phase rotation of both modes. Magnitudes and all photon-number
//! moments are identical for both.

use num_complex::Complex64;

use crate::error::{ensure, Error, Result};
use crate::fock_opa::MacroStateAmplitudes;

pub const DEFAULT_LEAKAGE_THRESHOLD: f64 = 1e-8;
pub const DEFAULT_N_MAX: usize = 60;

/// Cutoff guidance for a given mean photon number per mode.
pub fn suggested_n_max(m_bar: f64) -> usize {
    (12.0 * m_bar + 20.0).ceil() as usize
}

/// Polarization mode of the `±` basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PmMode {
    Plus,
    Minus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeFockState {
    n_max: usize,
    amplitudes: Vec<Complex64>,
}

impl TwoModeFockState {
    pub fn vacuum(n_max: usize) -> Self {
        Self::fock(n_max, 0, 0)
    }

    /// Basis ket `|n_first, n_second⟩`.
    pub fn fock(n_max: usize, n_first: usize, n_second: usize) -> Self {
        assert!(n_first <= n_max && n_second <= n_max, "Fock index above cutoff");
        let mut s = Self::zeros(n_max);
        s.set(n_first, n_second, Complex64::new(1.0, 0.0));
        s
    }

    /// A single photon in polarization `±`, written in H/V coordinates.
    pub fn single_photon(n_max: usize, mode: PmMode) -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut s = Self::zeros(n_max);
        s.set(1, 0, Complex64::new(h, 0.0));
        let v = match mode {
            PmMode::Plus => h,
            PmMode::Minus => -h,
        };
        s.set(0, 1, Complex64::new(v, 0.0));
        s
    }

    pub fn zeros(n_max: usize) -> Self {
        assert!(n_max >= 1, "n_max must be at least 1");
        Self {
            n_max,
            amplitudes: vec![Complex64::new(0.0, 0.0); (n_max + 1) * (n_max + 1)],
        }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    #[inline]
    fn index(&self, n_first: usize, n_second: usize) -> usize {
        n_first * (self.n_max + 1) + n_second
    }

    pub fn get(&self, n_first: usize, n_second: usize) -> Complex64 {
        if n_first > self.n_max || n_second > self.n_max {
            return Complex64::new(0.0, 0.0);
        }
        self.amplitudes[self.index(n_first, n_second)]
    }

    pub fn set(&mut self, n_first: usize, n_second: usize, value: Complex64) {
        let k = self.index(n_first, n_second);
        self.amplitudes[k] = value;
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Probability on the cutoff shell `n_first = n_max` or `n_second = n_max`.
    pub fn leakage(&self) -> f64 {
        let n = self.n_max;
        (0..=n)
            .map(|k| {
                let edge = self.get(n, k).norm_sqr() + self.get(k, n).norm_sqr();
                if k == n {
                    edge / 2.0
                } else {
                    edge
                }
            })
            .sum()
    }

    /// Normalized mean photon numbers `(⟨n_first⟩, ⟨n_second⟩)`.
    pub fn photon_moments(&self) -> (f64, f64) {
        let mut first = 0.0;
        let mut second = 0.0;
        let mut norm = 0.0;
        for a in 0..=self.n_max {
            for b in 0..=self.n_max {
                let p = self.get(a, b).norm_sqr();
                first += p * a as f64;
                second += p * b as f64;
                norm += p;
            }
        }
        (first / norm, second / norm)
    }
}

/// Sparse parametric Hamiltonian on the truncated grid.
///
/// Each coupling `(low, high, v)` links `|n_H, n_V⟩` to `|n_H+1, n_V+1⟩` with
/// `⟨high|H|low⟩ = i·v`, `v = √((n_H+1)(n_V+1))`, and the conjugate element
/// below the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianMatrix {
    n_max: usize,
    couplings: Vec<(usize, usize, f64)>,
}

pub fn build_hamiltonian(n_max: usize) -> Result<HamiltonianMatrix> {
    ensure(n_max >= 1, "n_max", || "cutoff must be at least 1".into())?;
    let dim = n_max + 1;
    let mut couplings = Vec::with_capacity(n_max * n_max);
    for h in 0..n_max {
        for v in 0..n_max {
            let low = h * dim + v;
            let high = (h + 1) * dim + (v + 1);
            couplings.push((low, high, (((h + 1) * (v + 1)) as f64).sqrt()));
        }
    }
    Ok(HamiltonianMatrix { n_max, couplings })
}

impl HamiltonianMatrix {
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dimension(&self) -> usize {
        (self.n_max + 1) * (self.n_max + 1)
    }

    pub fn to_dense(&self) -> Vec<Vec<Complex64>> {
        let d = self.dimension();
        let mut m = vec![vec![Complex64::new(0.0, 0.0); d]; d];
        for &(low, high, v) in &self.couplings {
            m[high][low] = Complex64::new(0.0, v);
            m[low][high] = Complex64::new(0.0, -v);
        }
        m
    }

    pub fn trace(&self) -> Complex64 {
        // No coupling sits on the diagonal.
        Complex64::new(0.0, 0.0)
    }

    /// `H ψ`.
    pub fn apply(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
        let i = Complex64::new(0.0, 1.0);
        for &(low, high, v) in &self.couplings {
            out[high] += i * v * psi[low];
            out[low] -= i * v * psi[high];
        }
        out
    }

    /// `-iH ψ`, a real antisymmetric action.
    fn apply_generator(&self, psi: &[Complex64], out: &mut [Complex64]) {
        out.iter_mut().for_each(|o| *o = Complex64::new(0.0, 0.0));
        for &(low, high, v) in &self.couplings {
            out[high] += psi[low] * v;
            out[low] -= psi[high] * v;
        }
    }

    /// Largest absolute row sum of the generator, a bound on its spectral norm.
    fn norm_bound(&self) -> f64 {
        let mut rows = vec![0.0; self.dimension()];
        for &(low, high, v) in &self.couplings {
            rows[low] += v;
            rows[high] += v;
        }
        rows.into_iter().fold(0.0, f64::max)
    }
}

/// `exp(t A) v` for an operator with `‖A‖ <= norm_bound`, by Taylor series with
/// scaling: each of the `s` sub-steps has `‖h A‖ <= 1` and is summed until the
/// remainder bound drops below `1e-17 / s`.
fn expm_apply<F>(v: &[Complex64], t: f64, norm_bound: f64, apply: F) -> Vec<Complex64>
where
    F: Fn(&[Complex64], &mut [Complex64]),
{
    let steps = (t.abs() * norm_bound).ceil().max(1.0) as usize;
    let h = t / steps as f64;
    let scaled = (h.abs() * norm_bound).min(1.0);
    // Remainder of the series after `order` terms is <= 2 scaled^(order+1)/(order+1)!.
    let target = 1e-17 / steps as f64;
    let mut order = 1usize;
    let mut bound = 2.0 * scaled;
    while bound > target && order < 60 {
        order += 1;
        bound *= scaled / order as f64;
    }

    let n = v.len();
    let mut acc = v.to_vec();
    let mut term = vec![Complex64::new(0.0, 0.0); n];
    let mut next = vec![Complex64::new(0.0, 0.0); n];
    for _ in 0..steps {
        term.copy_from_slice(&acc);
        for k in 1..=order {
            apply(&term, &mut next);
            let f = h / k as f64;
            for (t_, nx) in term.iter_mut().zip(&next) {
                *t_ = nx * f;
            }
            for (a, t_) in acc.iter_mut().zip(&term) {
                *a += t_;
            }
        }
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    pub leakage_threshold: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            leakage_threshold: DEFAULT_LEAKAGE_THRESHOLD,
        }
    }
}

/// An evolved state together with its cutoff-shell probability.
#[derive(Debug, Clone, PartialEq)]
pub struct Evolved {
    pub state: TwoModeFockState,
    pub leakage: f64,
}

pub fn evolve(state: &TwoModeFockState, g: f64) -> Result<Evolved> {
    evolve_with(state, g, EvolveOptions::default())
}

pub fn evolve_with(state: &TwoModeFockState, g: f64, opts: EvolveOptions) -> Result<Evolved> {
    ensure(g.is_finite() && g >= 0.0, "g", || {
        format!("gain must be finite and non-negative, got {g}")
    })?;
    let hamiltonian = build_hamiltonian(state.n_max)?;
    let amplitudes = if g == 0.0 {
        state.amplitudes.clone()
    } else {
        expm_apply(&state.amplitudes, g, hamiltonian.norm_bound(), |x, out| {
            hamiltonian.apply_generator(x, out)
        })
    };
    let evolved = TwoModeFockState {
        n_max: state.n_max,
        amplitudes,
    };
    let leakage = evolved.leakage();
    if leakage > opts.leakage_threshold {
        return Err(Error::CutoffTooSmall {
            n_max: state.n_max,
            leakage,
            threshold: opts.leakage_threshold,
        });
    }
    Ok(Evolved {
        state: evolved,
        leakage,
    })
}

/// Re-express an H/V state in the `(+, -)` mode basis.
///
/// The beam-splitter rotation conserves the total photon number, so the output
/// grid has cutoff `2·n_max` and no probability is lost.
pub fn rotate_to_pm_basis(state: &TwoModeFockState) -> TwoModeFockState {
    let n_max = state.n_max;
    let mut out = TwoModeFockState::zeros(2 * n_max);
    let theta = std::f64::consts::FRAC_PI_4;
    for total in 0..=2 * n_max {
        // Sector vector indexed by the photon number in the first mode.
        let lo = total.saturating_sub(n_max);
        let hi = total.min(n_max);
        let mut sector = vec![Complex64::new(0.0, 0.0); total + 1];
        let mut any = false;
        for n_h in lo..=hi {
            let n_v = total - n_h;
            let a = state.get(n_h, n_v);
            if a.norm_sqr() > 0.0 {
                any = true;
            }
            // Mirror the V mode first: (-1)^{n_V}.
            sector[n_h] = if n_v % 2 == 1 { -a } else { a };
        }
        if !any {
            continue;
        }
        // J|p, N-p⟩ = √(p(N-p+1))|p-1, N-p+1⟩ - √((p+1)(N-p))|p+1, N-p-1⟩
        let apply = |x: &[Complex64], y: &mut [Complex64]| {
            y.iter_mut().for_each(|o| *o = Complex64::new(0.0, 0.0));
            for p in 0..=total {
                let q = total - p;
                if p > 0 {
                    y[p - 1] += x[p] * ((p * (q + 1)) as f64).sqrt();
                }
                if q > 0 {
                    y[p + 1] -= x[p] * (((p + 1) * q) as f64).sqrt();
                }
            }
        };
        let rotated = expm_apply(&sector, theta, (total + 1) as f64, apply);
        for (p, a) in rotated.into_iter().enumerate() {
            out.set(p, total - p, a);
        }
    }
    out
}

/// Conjugate-symmetric inner product `⟨a|b⟩`.
pub fn overlap(a: &TwoModeFockState, b: &TwoModeFockState) -> Result<Complex64> {
    if a.n_max != b.n_max {
        return Err(Error::CutoffMismatch {
            left: a.n_max,
            right: b.n_max,
        });
    }
    Ok(a.amplitudes
        .iter()
        .zip(&b.amplitudes)
        .map(|(x, y)| x.conj() * y)
        .sum())
}

/// Expected `±`-basis amplitude of the macro-state for a photon injected in
/// `injected`, following the module's phase convention. `None` when `(n_plus,
/// n_minus)` lies outside the table; zero off the odd/even support.
pub fn table_amplitude(
    amps: &MacroStateAmplitudes,
    injected: PmMode,
    n_plus: usize,
    n_minus: usize,
) -> Option<f64> {
    let (aligned, orthogonal) = match injected {
        PmMode::Plus => (n_plus, n_minus),
        PmMode::Minus => (n_minus, n_plus),
    };
    if aligned % 2 == 0 || orthogonal % 2 == 1 {
        return Some(0.0);
    }
    let (i, j) = ((aligned - 1) / 2, orthogonal / 2);
    let amp = amps.amplitude(i, j)?;
    Some(match injected {
        PmMode::Plus if (i + j) % 2 == 1 => -amp,
        _ => amp,
    })
}

/// Largest absolute deviation between a `±`-basis state and the tabulated
/// macro-state, after removing a global phase fixed by the largest-magnitude
/// component present in both. Grid points beyond the table's truncation bounds
/// are not compared; points off the odd/even support are compared against zero.
pub fn max_table_deviation(
    pm_state: &TwoModeFockState,
    amps: &MacroStateAmplitudes,
    injected: PmMode,
) -> f64 {
    let n = pm_state.n_max();
    let mut anchor = (0.0, Complex64::new(1.0, 0.0));
    for p in 0..=n {
        for q in 0..=n {
            if let Some(t) = table_amplitude(amps, injected, p, q) {
                let s = pm_state.get(p, q);
                if t.abs() > anchor.0 && s.norm() > 0.0 {
                    anchor = (t.abs(), (s / s.norm()) * t.signum());
                }
            }
        }
    }
    let phase = anchor.1.conj();
    let mut worst: f64 = 0.0;
    for p in 0..=n {
        for q in 0..=n {
            if let Some(t) = table_amplitude(amps, injected, p, q) {
                let s = pm_state.get(p, q) * phase;
                worst = worst.max((s - t).norm());
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock_opa::{gain_params, macro_amplitudes};
    use approx::assert_relative_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn smallest_hamiltonian() {
        let h = build_hamiltonian(1).unwrap();
        assert_eq!(h.dimension(), 4);
        let m = h.to_dense();
        // |1,1⟩ is index 3, |0,0⟩ index 0.
        assert_eq!(m[3][0].norm(), 1.0);
        let nonzero = m.iter().flatten().filter(|z| z.norm() > 0.0).count();
        assert_eq!(nonzero, 2);
        assert_eq!(h.trace(), c(0.0));
        assert!(build_hamiltonian(0).is_err());
    }

    #[test]
    fn hamiltonian_is_hermitian_and_conserves_difference() {
        let h = build_hamiltonian(8).unwrap();
        let m = h.to_dense();
        let d = h.dimension();
        let diag_trace: Complex64 = (0..d).map(|k| m[k][k]).sum();
        assert_eq!(diag_trace, c(0.0));
        let dim = 9;
        let diff = |k: usize| (k / dim) as f64 - (k % dim) as f64;
        let mut worst: f64 = 0.0;
        for r in 0..d {
            for col in 0..d {
                assert_eq!(m[r][col], m[col][r].conj());
                // [H, N_H - N_V]_{r,col} = H_{r,col} (diff(col) - diff(r))
                let comm = m[r][col] * (diff(col) - diff(r));
                worst = worst.max(comm.norm());
            }
        }
        assert!(worst <= 1e-12);
    }

    #[test]
    fn zero_gain_is_identity() {
        let s = TwoModeFockState::single_photon(10, PmMode::Plus);
        let e = evolve(&s, 0.0).unwrap();
        assert_eq!(e.state, s);
    }

    #[test]
    fn vacuum_becomes_two_mode_squeezed_vacuum() {
        let g: f64 = 0.5;
        let e = evolve(&TwoModeFockState::vacuum(40), g).unwrap();
        for n in 0..15 {
            let expected = g.tanh().powi(2 * n as i32) / g.cosh().powi(2);
            assert_relative_eq!(e.state.get(n, n).norm_sqr(), expected, epsilon = 1e-13);
            // Positive real weights.
            assert!(e.state.get(n, n).re > 0.0);
        }
        assert!(e.state.get(1, 0).norm() < 1e-15);
    }

    #[test]
    fn cutoff_too_small() {
        let err = evolve(&TwoModeFockState::vacuum(5), 2.0).unwrap_err();
        assert!(matches!(err, Error::CutoffTooSmall { n_max: 5, .. }));
    }

    #[test]
    fn single_photon_rotation() {
        let h = TwoModeFockState::fock(3, 1, 0);
        let r = rotate_to_pm_basis(&h);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_relative_eq!(r.get(1, 0).re, s, epsilon = 1e-15);
        assert_relative_eq!(r.get(0, 1).re, s, epsilon = 1e-15);
        let v = rotate_to_pm_basis(&TwoModeFockState::fock(3, 0, 1));
        assert_relative_eq!(v.get(1, 0).re, s, epsilon = 1e-15);
        assert_relative_eq!(v.get(0, 1).re, -s, epsilon = 1e-15);
        // An injected `+` photon lands entirely in the `+` mode.
        let p = rotate_to_pm_basis(&TwoModeFockState::single_photon(3, PmMode::Plus));
        assert_relative_eq!(p.get(1, 0).re, 1.0, epsilon = 1e-15);
        assert!(p.get(0, 1).norm() < 1e-15);
    }

    #[test]
    fn vacuum_rotates_to_vacuum() {
        let r = rotate_to_pm_basis(&TwoModeFockState::vacuum(4));
        assert_eq!(r.get(0, 0), c(1.0));
        assert!((r.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rotation_preserves_norm() {
        let mut s = TwoModeFockState::zeros(12);
        for a in 0..=12 {
            for b in 0..=12 {
                s.set(a, b, Complex64::new(((a * 7 + b * 3) % 5) as f64 - 2.0, (a as f64 - b as f64) * 0.1));
            }
        }
        let norm = s.norm_sqr();
        let r = rotate_to_pm_basis(&s);
        assert!((r.norm_sqr() - norm).abs() <= 1e-12 * norm);
    }

    #[test]
    fn evolved_pm_state_has_odd_even_support() {
        let e = evolve(&TwoModeFockState::single_photon(60, PmMode::Plus), 1.0).unwrap();
        let r = rotate_to_pm_basis(&e.state);
        let mut off_support: f64 = 0.0;
        for p in 0..=r.n_max() {
            for q in 0..=r.n_max() {
                if p % 2 == 0 || q % 2 == 1 {
                    off_support = off_support.max(r.get(p, q).norm());
                }
            }
        }
        assert!(off_support < 1e-12, "{off_support}");
    }

    #[test]
    fn overlap_basics() {
        let a = TwoModeFockState::single_photon(6, PmMode::Plus);
        assert_relative_eq!(overlap(&a, &a).unwrap().re, a.norm_sqr(), epsilon = 1e-15);
        let vac = TwoModeFockState::vacuum(6);
        assert_eq!(overlap(&vac, &TwoModeFockState::fock(6, 1, 0)).unwrap(), c(0.0));
        assert!(matches!(
            overlap(&vac, &TwoModeFockState::vacuum(7)),
            Err(Error::CutoffMismatch { .. })
        ));
    }

    #[test]
    fn macro_states_are_orthogonal() {
        let plus = evolve(&TwoModeFockState::single_photon(60, PmMode::Plus), 1.0).unwrap();
        let minus = evolve(&TwoModeFockState::single_photon(60, PmMode::Minus), 1.0).unwrap();
        assert!(overlap(&plus.state, &minus.state).unwrap().norm() <= 1e-8);
    }

    #[test]
    fn matches_table_small_gain() {
        let p = gain_params(0.5).unwrap();
        let amps = macro_amplitudes(p, 1e-12).unwrap();
        for mode in [PmMode::Plus, PmMode::Minus] {
            let e = evolve(&TwoModeFockState::single_photon(40, mode), p.g).unwrap();
            let r = rotate_to_pm_basis(&e.state);
            let dev = max_table_deviation(&r, &amps, mode);
            assert!(dev < 1e-9, "{mode:?}: {dev}");
        }
    }

    #[test]
    fn h_polarized_seed_moments() {
        // Stimulated two-mode squeezing: ⟨n_H⟩ = 2m̄ + 1, ⟨n_V⟩ = 2m̄.
        let p = gain_params(0.8).unwrap();
        let e = evolve(&TwoModeFockState::fock(60, 1, 0), p.g).unwrap();
        let (nh, nv) = e.state.photon_moments();
        assert_relative_eq!(nh, 2.0 * p.m_bar + 1.0, max_relative = 1e-10);
        assert_relative_eq!(nv, 2.0 * p.m_bar, max_relative = 1e-10);
    }
}
