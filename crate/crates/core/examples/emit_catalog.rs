//! Regenerates `data/catalog.json` from the built-in constructors.
fn main() -> Result<(), Box<dyn std::error::Error>> {
    let json = harmonic_core::permgroup::catalog::catalog_json(&harmonic_core::permgroup::catalog::builtin_groups()?)?;
    println!("{json}");
    Ok(())
}
