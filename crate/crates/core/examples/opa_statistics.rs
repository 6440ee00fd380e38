//! Macro-state amplitudes and photon statistics of the amplified single photon.
//!
//! Run with `cargo run --example opa_statistics`.

use mirror_bec::fock_opa::{
    fringe_curve, gain_params, macro_amplitudes, moments_from_amplitudes, phase_grid,
    photon_stats_closed, visibility, DEFAULT_TAIL_TOLERANCE, EXPERIMENTAL_DEGRADATION,
};

fn main() -> mirror_bec::Result<()> {
    let p = gain_params(1.0)?;
    println!("g = 1: C = {:.6}, Γ = {:.6}, m̄ = {:.6}", p.big_c, p.gamma, p.m_bar);

    let amps = macro_amplitudes(p, DEFAULT_TAIL_TOLERANCE)?;
    println!(
        "table: i ≤ {}, j ≤ {}, {} entries, captured norm 1 - {:.1e}",
        amps.i_max,
        amps.j_max,
        amps.len(),
        1.0 - amps.captured_norm
    );
    println!("  i  j   (odd, even)   amplitude");
    for (i, j, a) in amps.entries().filter(|&(i, j, _)| i + j <= 2) {
        let (odd, even) = mirror_bec::fock_opa::MacroStateAmplitudes::photon_numbers(i, j);
        println!("  {i}  {j}   ({odd:>2}, {even:>2})      {a:+.9}");
    }

    let (aligned, orthogonal) = moments_from_amplitudes(&amps)?;
    println!(
        "moments from table: ({aligned:.9}, {orthogonal:.9}); closed form ({:.9}, {:.9})",
        3.0 * p.m_bar + 1.0,
        p.m_bar
    );

    println!("\n   g      m̄             visibility");
    for g in [0.0, 0.5, 1.0, 2.0, 4.0, 6.0, 12.0] {
        let q = gain_params(g)?;
        println!("  {g:4.1}  {:<14.6e} {:.9}", q.m_bar, visibility(q));
    }

    let g6 = gain_params(6.0)?;
    let s = photon_stats_closed(g6, 0.0);
    println!("\ng = 6, φ = 0: N+ = {:.1}, N- = {:.1}", s.n_plus, s.n_minus);
    let curve = fringe_curve(g6, &phase_grid(8), EXPERIMENTAL_DEGRADATION)?;
    println!("degraded fringe (contrast {:.4}):", curve.contrast().unwrap());
    for k in 0..curve.len() {
        println!(
            "  φ = {:5.3}  N+ = {:>10.1}  N- = {:>10.1}",
            curve.phases[k], curve.n_plus[k], curve.n_minus[k]
        );
    }

    // enumeration is refused where the table would not fit in memory
    match macro_amplitudes(gain_params(4.0)?, DEFAULT_TAIL_TOLERANCE) {
        Err(e) => println!("\ng = 4: {e}"),
        Ok(t) => println!("\ng = 4: {} entries", t.len()),
    }
    Ok(())
}
