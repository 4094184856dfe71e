//! Samples an eigenfield on a grid and writes CSV and VTK files for a viewer.
//!
//! Usage: cargo run --example export_vtk -- [output-dir]

use std::path::PathBuf;

use ballspec::fieldio::{sample, trace_streamline, Export, FileFormat, GridDims};
use ballspec::{Mode, ModeIndex};

fn main() -> ballspec::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(std::env::temp_dir);
    let mode = Mode::new("1,1,0,+".parse::<ModeIndex>()?, 1.0)?;
    let grid = sample(&mode, GridDims::new(16, 17, 32)?, 1.0)?;
    let sl = trace_streamline(&mode, 1.0, [0.5, 0.0, 0.0], 1e-3, 20_000)?;
    for (name, fmt) in [
        ("field.csv", FileFormat::Csv),
        ("field.vtk", FileFormat::Vtk),
    ] {
        grid.export(fmt, &dir.join(name))?;
    }
    sl.export(FileFormat::Vtk, &dir.join("orbit.vtk"))?;
    sl.export(FileFormat::Csv, &dir.join("orbit.csv"))?;
    println!(
        "wrote field.csv, field.vtk, orbit.vtk, orbit.csv to {}",
        dir.display()
    );
    Ok(())
}
