//! Smooth density modulation instead of sharp slabs: a sin² profile cut into
//! ever finer staircases converges to a limiting reflectivity.
//!
//! Run with `cargo run --release --example graded_index`.

use mirror_bec::atom_optics::{quarter_wave_geometry, AtomicSpecies};
use mirror_bec::bragg_stack::{
    graded_stack_from_profile, lattice_stack, stack_reflectivity, DispersiveIndex, SinusoidalProfile,
};

fn main() -> mirror_bec::Result<()> {
    let rb = AtomicSpecies::rubidium_87();
    for detuning_hz in [2e9, 5e10] {
        let index = DispersiveIndex {
            species: rb,
            detuning_hz,
            cutoff_hz: rb.default_cutoff_hz(),
        };
        let lambda = index.probe_wavelength_m();
        let profile = SinusoidalProfile {
            peak_density_per_m3: 1e20,
            period_m: lambda / 2.0,
            periods: 150,
        };
        println!("Δ = {detuning_hz:e} Hz, 150 periods, peak 10¹⁴ cm⁻³");
        let mut previous: Option<f64> = None;
        for sub in [4, 8, 16, 32, 64, 128] {
            let r = stack_reflectivity(&graded_stack_from_profile(&profile, lambda, sub, &index)?, lambda);
            match previous {
                Some(p) => println!("  {sub:>3} sublayers: R = {r:.12}  change {:.2e}", (r - p).abs()),
                None => println!("  {sub:>3} sublayers: R = {r:.12}"),
            }
            previous = Some(r);
        }
        // slabs holding the same peak index, for comparison
        let slabs = lattice_stack(index.index_for_density(1e20)?, &quarter_wave_geometry(lambda, 150)?);
        println!("  sharp slabs at the peak index: R = {:.12}\n", stack_reflectivity(&slabs, lambda));
    }
    Ok(())
}
