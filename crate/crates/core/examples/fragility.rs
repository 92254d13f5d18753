//! Threshold relative to bandwidth for the alpha profile as N grows.
//!
//! ```bash
//! cargo run --release --example fragility
//! ```

use ptlattice::phase::{fragility_exponent, fragility_scan};

fn main() -> ptlattice::Result<()> {
    for alpha in [-1.0, 0.0] {
        let points = fragility_scan(alpha, &[8, 16, 32, 64])?;
        println!("alpha = {alpha}");
        for p in &points {
            println!("  N = {:3}  gamma_c = {:.6}  bandwidth = {:.6}  ratio = {:.6}", p.n_sites, p.gamma_c, p.bandwidth, p.ratio);
        }
        let (slope, stderr) = fragility_exponent(&points);
        println!("  log-log slope {slope:.4} ± {stderr:.4}");
    }
    Ok(())
}
