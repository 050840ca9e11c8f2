//! Generates the standard synthetic corpus and imports it once.

use std::time::Instant;

use litgraph_ingest::{import_bulk, load_manifest, write_synthetic, SyntheticSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args()
        .nth(1)
        .map(std::path::PathBuf::from)
        .unwrap_or_else(std::env::temp_dir)
        .join("litgraph-synthetic");
    let t = Instant::now();
    let manifest = write_synthetic(&dir, &SyntheticSpec::standard(42))?;
    println!("generated in {:?}", t.elapsed());
    let t = Instant::now();
    let (g, report) = import_bulk(&load_manifest(manifest)?, 8)?;
    println!("imported {} nodes, {} edges in {:?}", g.node_count(), g.edge_count(), t.elapsed());
    println!("{:?}", report.run);
    Ok(())
}
