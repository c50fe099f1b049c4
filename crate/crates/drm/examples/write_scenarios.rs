//! Regenerates the bundled maps: `cargo run -p drm --example write_scenarios`.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use drm::pgm::write_binary;
use drm::scenario::Scenario;

fn main() -> std::io::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("maps");
    std::fs::create_dir_all(&dir)?;
    for s in Scenario::ALL {
        let path = dir.join(format!("{}.pgm", s.name()));
        write_binary(BufWriter::new(File::create(&path)?), &s.raster())?;
        println!("{}", path.display());
    }
    Ok(())
}
