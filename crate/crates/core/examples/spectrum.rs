//! Eigenvalues of one lattice on both sides of the threshold.
//!
//! ```bash
//! cargo run --example spectrum
//! ```

use ptlattice::lattice::{build_hamiltonian, HoppingProfile, LatticeSpec};
use ptlattice::spectral::{eigenvalues, Classification};

fn main() -> ptlattice::Result<()> {
    let profile = HoppingProfile::two_segment(1.0, 1.0)?;
    for gamma in [0.6, 1.01] {
        let spec = LatticeSpec::new(20, 10, gamma, profile.clone())?;
        let h = build_hamiltonian(&spec);
        let spectrum = eigenvalues(&h)?;
        println!("N = 20, m = 10, t_b = 1, gamma = {gamma}: {} complex", spectrum.n_complex);
        for (e, c) in spectrum.eigenvalues.iter().zip(&spectrum.classifications).take(4) {
            let tag = if *c == Classification::Real { "real" } else { "complex" };
            println!("  {:+.6} {:+.6}i  {tag}", e.re, e.im);
        }
        println!("  ...");
        let d = spectrum.symmetry_defects(&h);
        println!("  symmetry defects (relative): conj {:.1e}, E -> -E* {:.1e}, trace {:.1e}", d.conjugation, d.particle_hole, d.trace);
    }
    Ok(())
}
