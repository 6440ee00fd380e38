//! Transfer-matrix optics of quarter-wave stacks and of the patterned condensate.
//!
//! Run with `cargo run --release --example bragg_mirror`.

use mirror_bec::atom_optics::{quarter_wave_geometry, AtomicSpecies, CondensateSample};
use mirror_bec::bragg_stack::{
    closed_form_reflectivity, frequency_of, measure_band, reflectivity_spectrum_with, stack_matrix,
    stack_reflectivity, stopband_width, LayerStack, QuarterWave,
};
use mirror_bec::atom_optics::SPEED_OF_LIGHT;

fn main() -> mirror_bec::Result<()> {
    let lambda = 795e-9;
    println!("quarter-wave stacks at the design wavelength");
    println!("   n_B     N_D   R (matrices)        R (closed form)     |det M - 1|");
    for (n_b, n_d) in [(1.001, 100), (1.01, 50), (1.01, 300), (1.028, 150), (1.05, 40)] {
        let stack = LayerStack::quarter_wave(n_b, n_d, lambda, QuarterWave::Optical)?;
        let det = stack_matrix(&stack, lambda).determinant();
        println!(
            "  {n_b:<6} {n_d:>4}  {:<19.15} {:<19.15} {:.1e}",
            stack_reflectivity(&stack, lambda),
            closed_form_reflectivity(n_b, n_d),
            (det - 1.0).norm()
        );
    }

    let nu0 = frequency_of(lambda);
    println!("\nR > 1/2 band of a fixed-index stack, n_B = 1.005");
    for n_d in [300, 1000, 3000] {
        let stack = LayerStack::quarter_wave(1.005, n_d, lambda, QuarterWave::Optical)?;
        let formula = stopband_width(1.005, nu0);
        let (lo, hi) = measure_band(|nu| stack_reflectivity(&stack, SPEED_OF_LIGHT / nu), nu0, formula / 400.0, 0.5)
            .expect("design wavelength reflects");
        println!("  N_D = {n_d:>4}: measured / arcsin formula = {:.3}", (hi - lo) / formula);
    }

    let rb = AtomicSpecies::rubidium_87();
    let sample = CondensateSample::typical();
    let geometry = quarter_wave_geometry(rb.resonance_wavelength_m, 150)?;
    let scan: Vec<f64> = (0..=400).map(|k| -1e9 + 5e6 * k as f64).collect();
    println!("\ncondensate lattice, N_D = 150, 10¹⁴ cm⁻³, ten-linewidth mask");
    for mode in [QuarterWave::Geometric, QuarterWave::Optical] {
        let s = reflectivity_spectrum_with(&rb, &sample, &geometry, &scan, rb.default_cutoff_hz(), mode)?;
        let peak = s.samples.iter().filter_map(|p| p.reflectivity).fold(0.0, f64::max);
        print!("  {mode:?} disks: peak R = {peak:.6}");
        match s.widest_band_above(0.99) {
            Some((a, b)) => println!(", R > 0.99 from {:.0} to {:.0} MHz", a / 1e6, b / 1e6),
            None => println!(", never above 0.99"),
        }
    }
    Ok(())
}
