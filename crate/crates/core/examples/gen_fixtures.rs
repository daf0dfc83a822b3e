//! Regenerates the scenario files under `fixtures/`.
//!
//! cargo run -p wbpose --example gen_fixtures [-- <dir>]

use std::path::PathBuf;

fn main() -> std::io::Result<()> {
    let dir = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures")));
    wbpose::fixtures::write_all(&dir)?;
    println!("wrote fixtures to {}", dir.display());
    Ok(())
}
