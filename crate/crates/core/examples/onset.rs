//! Complex-eigenvalue count as gamma crosses the threshold: sequential
//! for off-centre impurities, all at once for central ones.
//!
//! ```bash
//! cargo run --release --example onset
//! ```

use ptlattice::lattice::{HoppingProfile, LatticeSpec};
use ptlattice::phase::{complex_count_sweep, default_gamma_max, find_gamma_c};

fn main() -> ptlattice::Result<()> {
    for m in [5, 10] {
        let spec = LatticeSpec::new(20, m, 0.0, HoppingProfile::uniform(1.0)?)?;
        let gc = find_gamma_c(&spec, default_gamma_max(&spec))?.gamma_c;
        let gammas: Vec<f64> = [0.99, 1.0001, 1.01, 1.05, 1.2, 1.5, 2.0, 3.0].iter().map(|f| gc * f).collect();
        println!("N = 20, m = {m}, gamma_c = {gc:.6}");
        for (g, count) in complex_count_sweep(&spec, &gammas)? {
            println!("  gamma = {g:.4}: {count} complex");
        }
    }
    Ok(())
}
