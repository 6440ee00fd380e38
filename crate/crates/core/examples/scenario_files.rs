//! Scenario files drive the same commands as the `mirror-bec` binary.
//!
//! Run with `cargo run --release --example scenario_files`; CSV files are
//! written to the system temp directory.

use mirror_bec::cli::{cmd_displacement, cmd_fringes, cmd_spectrum, cmd_validate, Format, Scenario};

fn main() -> mirror_bec::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/reference.toml");
    let scenario = Scenario::load(path.as_ref())?;
    let dir = std::env::temp_dir().join("mirror-bec-example");
    std::fs::create_dir_all(&dir)?;

    for (name, table) in [
        ("fringes", cmd_fringes(&scenario)?),
        ("spectrum", cmd_spectrum(&scenario)?),
        ("displacement", cmd_displacement(&scenario)?),
    ] {
        let file = dir.join(format!("{name}.csv"));
        std::fs::write(&file, table.render(Format::Csv))?;
        println!("{name:>12}: {} rows -> {}", table.rows.len(), file.display());
    }

    println!("\n{}", cmd_validate(&scenario).to_text());

    // inline TOML works too; typos are caught with their location
    let bad = "[opa]\ngain = 1.0\ndegredation = 0.13\n";
    if let Err(e) = Scenario::from_toml(bad) {
        println!("{e}");
    }
    Ok(())
}
