//! Critical impurity strength by bisection on the complex-eigenvalue count.
//!
//! ```bash
//! cargo run --example threshold
//! ```

use ptlattice::lattice::{HoppingProfile, LatticeSpec};
use ptlattice::phase::{default_gamma_max, find_gamma_c};

fn main() -> ptlattice::Result<()> {
    println!("   N   m   d   t_b      gamma_c          bracket   n_complex above");
    for (n, m, tb) in [(20, 10, 0.7), (20, 7, 3.0), (21, 10, 1.0), (20, 5, 1.0), (2, 1, 3.0)] {
        let spec = LatticeSpec::new(n, m, 0.0, HoppingProfile::two_segment(1.0, tb)?)?;
        let t = find_gamma_c(&spec, default_gamma_max(&spec))?;
        println!(
            "{n:4} {m:3} {:3} {tb:5} {:16.12} {:9.1e} {:6}",
            spec.distance(),
            t.gamma_c,
            t.bracket_width(),
            t.n_complex_above
        );
    }
    Ok(())
}
