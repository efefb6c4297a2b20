//! Regenerates `fixtures/adult_synth.csv` and its schema.

use std::path::Path;

use mdldp::dataset::write_dataset;
use mdldp::synth::{adult_like, ADULT_COLUMNS, FIXTURE_ROWS, FIXTURE_SEED};
use mdldp_core::rng::Seed;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    std::fs::create_dir_all(&dir)?;
    let ids = (0..FIXTURE_ROWS).map(|i| format!("p{i:04}")).collect();
    let ds = adult_like(FIXTURE_ROWS, Seed::new(FIXTURE_SEED)).with_identities(ids)?;
    write_dataset(&ds, std::fs::File::create(dir.join("adult_synth.csv"))?)?;
    let columns = ADULT_COLUMNS.iter().map(|c| format!("\"{c}\"")).collect::<Vec<_>>().join(", ");
    std::fs::write(dir.join("adult_synth.schema.toml"), format!("columns = [{columns}]\nidentity = \"id\"\n"))?;
    Ok(())
}
