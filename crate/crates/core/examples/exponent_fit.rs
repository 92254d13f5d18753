//! Power-law exponent of the threshold at small inner hopping.
//!
//! ```bash
//! cargo run --release --example exponent_fit
//! ```

use ptlattice::phase::{fit_exponent, log_grid, sweep_phase_diagram, DEFAULT_WINDOW};

fn main() -> ptlattice::Result<()> {
    let (lo, hi) = DEFAULT_WINDOW;
    let grid = log_grid(lo, hi, 10);
    println!(" d      eta     stderr");
    for d in [1, 3, 5, 7] {
        let outcome = sweep_phase_diagram(20, &[d], &grid, 1.0)?;
        let fit = fit_exponent(&outcome.records, DEFAULT_WINDOW)?;
        println!("{d:2} {:8.4} {:10.2e}", fit.eta, fit.stderr);
    }
    Ok(())
}
