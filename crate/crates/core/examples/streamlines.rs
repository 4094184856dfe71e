//! Streamlines of the lowest curl eigenfield: the axis orbit and a toroidal one.

use ballspec::fieldio::trace_streamlines;
use ballspec::{Mode, ModeIndex};

fn main() -> ballspec::Result<()> {
    let radius = 1.0;
    let mode = Mode::new(ModeIndex::new(ballspec::Family::CurlPlus, 1, 1, 0)?, radius)?;
    let seeds = [[0.0, 0.0, -0.9], [0.5, 0.0, 0.0], [0.3, 0.0, 0.2]];
    let lines = trace_streamlines(&mode, radius, &seeds, 1e-3, 50_000)?;
    for sl in &lines {
        let axis: Vec<f64> = sl.points.iter().map(|p| p[0].hypot(p[1])).collect();
        let rmax = sl
            .points
            .iter()
            .map(|p| (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt())
            .fold(0.0, f64::max);
        let end = sl.points.last().expect("seed is stored");
        println!(
            "seed {:?}: {} points, {:?}; axis distance [{:.4}, {:.4}], max |x| {rmax:.4}, end z {:.4}",
            sl.seed,
            sl.points.len(),
            sl.termination,
            axis.iter().copied().fold(f64::INFINITY, f64::min),
            axis.iter().copied().fold(0.0, f64::max),
            end[2]
        );
    }
    Ok(())
}
