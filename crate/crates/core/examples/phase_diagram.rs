//! Threshold against inner hopping for several impurity distances, written
//! as CSV and SVG.
//!
//! ```bash
//! cargo run --release --example phase_diagram -- out/
//! ```

use std::path::PathBuf;

use ptlattice::cli::{format_number, sweep_svg, SWEEP_COLUMNS};
use ptlattice::phase::{log_grid, sweep_phase_diagram};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| ".".into()));
    std::fs::create_dir_all(&dir)?;

    let grid = log_grid(0.05, 0.95, 16);
    let outcome = sweep_phase_diagram(20, &[1, 3, 5, 7], &grid, 1.0)?;
    for f in &outcome.failures {
        eprintln!("d={} tb={}: {}", f.distance, f.tb, f.message);
    }

    let mut csv = format!("{SWEEP_COLUMNS}\n");
    for r in &outcome.records {
        csv += &format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.n_sites,
            r.impurity_site,
            r.distance,
            format_number(r.t0),
            format_number(r.tb),
            format_number(r.tb_ratio),
            format_number(r.gamma_c),
            format_number(r.gamma_c_ratio),
            r.n_complex_above,
            format_number(r.bracket_width)
        );
    }
    std::fs::write(dir.join("phase_diagram.csv"), csv)?;
    std::fs::write(dir.join("phase_diagram.svg"), sweep_svg(&outcome.records))?;
    println!("{} points written to {}", outcome.records.len(), dir.display());
    Ok(())
}
