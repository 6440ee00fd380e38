//! Optical response of a condensate: rescaled density, dispersive index,
//! scattering loss, Thomas-Fermi density and the disk lattice geometry.
//!
//! Run with `cargo run --example condensate_optics`.

use mirror_bec::atom_optics::{
    dispersive_epsilon, lattice_disk_size, quarter_wave_geometry, rescaled_density, scattering_probability,
    thomas_fermi_peak_density, AtomicSpecies, CondensateSample,
};

fn main() -> mirror_bec::Result<()> {
    let rb = AtomicSpecies::rubidium_87();
    let sample = CondensateSample::typical();
    let n_resc = rescaled_density(rb.resonance_wavelength_m, sample.number_density_per_m3);
    println!("⁸⁷Rb, N/V = {:e} m⁻³: rescaled density 𝒩 = {n_resc:.6}", sample.number_density_per_m3);

    println!("\n  detuning       ε              scattering/disk");
    for det in [1e8, 1e9, 1e10, 1e11, 7e11, -1e9] {
        let eps = dispersive_epsilon(&rb, n_resc, det, rb.default_cutoff_hz())?;
        let sc = scattering_probability(sample.atoms_per_disk, &rb, det)?;
        println!(
            "  {det:>+9.1e} Hz  {eps:>+12.5e}   {:.3e}{}",
            sc.probability,
            if sc.valid { "" } else { "  (not perturbative)" }
        );
    }
    match dispersive_epsilon(&rb, n_resc, 2e7, rb.default_cutoff_hz()) {
        Err(e) => println!("  20 MHz: {e}"),
        Ok(eps) => println!("  20 MHz: ε = {eps}"),
    }

    let tf = thomas_fermi_peak_density(sample.atoms_per_disk, &rb, sample.ho_length_m)?;
    println!(
        "\nThomas-Fermi, N_at = {}, a_ho = {:e} m:\n  printed expression {:.4e} (1/m², not a density)\n  central density    {:.4e} m⁻³",
        sample.atoms_per_disk, sample.ho_length_m, tf.literal, tf.audited_per_m3
    );

    let geom = quarter_wave_geometry(rb.resonance_wavelength_m, 150)?;
    println!(
        "\nquarter-wave lattice: disks {:.2} nm on a {:.1} nm period, {} disks, typical size: {}",
        geom.disk_thickness_m * 1e9,
        geom.period_m * 1e9,
        geom.disk_count,
        geom.within_typical_size()
    );
    let k = 2.0 * std::f64::consts::PI / 1064e-9;
    for s in [5.0, 20.0, 80.0] {
        println!("  lattice depth s = {s:>4}: R_l = {:.1} nm", lattice_disk_size(s, k, 1.0)? * 1e9);
    }
    Ok(())
}
