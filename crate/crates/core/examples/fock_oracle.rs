//! Brute-force check of the macro-state table: evolve a single photon under the
//! two-mode amplifier Hamiltonian in a truncated Fock space, rotate to the ±
//! basis and compare amplitude by amplitude.
//!
//! Run with `cargo run --release --example fock_oracle`.

use mirror_bec::fock_opa::{gain_params, macro_amplitudes};
use mirror_bec::oracle::{
    evolve, max_table_deviation, overlap, rotate_to_pm_basis, PmMode, TwoModeFockState, DEFAULT_N_MAX,
};

fn main() -> mirror_bec::Result<()> {
    for g in [0.25, 0.5, 1.0] {
        let amps = macro_amplitudes(gain_params(g)?, 1e-14)?;
        let mut states = Vec::new();
        for mode in [PmMode::Minus, PmMode::Plus] {
            let seed = TwoModeFockState::single_photon(DEFAULT_N_MAX, mode);
            let out = evolve(&seed, g)?;
            let pm = rotate_to_pm_basis(&out.state);
            let (n_plus, n_minus) = pm.photon_moments();
            println!(
                "g = {g:<4} {mode:?}: leakage {:.1e}, <n+> = {n_plus:.6}, <n-> = {n_minus:.6}, max deviation {:.1e}",
                out.leakage,
                max_table_deviation(&pm, &amps, mode)
            );
            states.push(out.state);
        }
        println!("          |<Φ+|Φ->| = {:.1e}", overlap(&states[0], &states[1])?.norm());
    }

    // a cutoff that is too small is reported, not silently accepted
    let seed = TwoModeFockState::single_photon(12, PmMode::Plus);
    if let Err(e) = evolve(&seed, 1.0) {
        println!("\nn_max = 12 at g = 1: {e}");
    }
    Ok(())
}
