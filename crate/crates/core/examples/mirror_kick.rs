//! The full chain: amplified photons, the share reflected by the condensate
//! mirror, the momentum they deliver and the displacement fringe versus the
//! trigger phase.
//!
//! Run with `cargo run --example mirror_kick`.

use mirror_bec::experiment::{
    active_photons, displacement_fringe, reflection_momentum, resonant_photon_count, timing_check,
    KickExperimentConfig,
};
use mirror_bec::fock_opa::phase_grid;

fn main() -> mirror_bec::Result<()> {
    let cfg = KickExperimentConfig::reference_preset();
    let a = active_photons(1e5, cfg.active_bandwidth_hz, cfg.source_bandwidth_hz)?;
    println!("10⁵ photons, 2 GHz band out of 700 GHz: {:.1} reflected", a.count);
    println!("  with the 13 % contrast: {:.1}", a.count * cfg.degradation);
    println!(
        "photons within one linewidth: {:.3}",
        resonant_photon_count(1e5, cfg.species.linewidth_hz, cfg.source_bandwidth_hz)?
    );
    println!("kick per reflection: {:.4e} kg m/s", reflection_momentum(cfg.species.resonance_wavelength_m));

    let t = timing_check(&cfg, cfg.expansion_speed_m_per_s)?;
    println!(
        "\ntiming: lattice survives {:.2} µs, pulses take {:.0} ns, flight {:.0} µs -> feasible = {}",
        t.survival_time_s * 1e6,
        t.exposure_time_s * 1e9,
        t.flight_time_s * 1e6,
        t.feasible
    );
    let mut shorter = cfg;
    shorter.flight_time_s = 45e-6;
    println!(
        "  with 45 µs of flight: feasible = {}",
        timing_check(&shorter, cfg.expansion_speed_m_per_s)?.feasible
    );

    let f = displacement_fringe(&cfg, &phase_grid(12))?;
    println!(
        "\nscattering per disk at 700 GHz: {:.2e} (perturbative = {})",
        f.validity.scattering.probability, f.validity.scattering.valid
    );
    println!("   φ       net photons/pulse   Δx");
    for ((phi, n), x) in f.phases.iter().zip(f.active_net()).zip(&f.displacement_m) {
        println!("  {phi:5.3}   {n:>+12.3}       {:>+8.3} µm", x * 1e6);
    }

    let mut cavity = cfg;
    cavity.cavity_q_factor = 100.0;
    let x = displacement_fringe(&cavity, &[0.0])?.displacement_m[0];
    println!("\nQ = 100 cavity: Δx(0) = {:.1} µm", x * 1e6);
    Ok(())
}
