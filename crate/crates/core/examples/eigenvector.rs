//! Eigenvector of a real eigenvalue and its plane-wave decomposition.
//!
//! ```bash
//! cargo run --example eigenvector
//! ```

use ptlattice::lattice::{build_hamiltonian, HoppingProfile, LatticeSpec};
use ptlattice::secular::{fit_ansatz, secular_residual};
use ptlattice::spectral::{eigenvalues, eigenvector};
use ptlattice::Complex64;

fn main() -> ptlattice::Result<()> {
    let spec = LatticeSpec::new(12, 3, 0.2, HoppingProfile::two_segment(1.0, 0.8)?)?;
    let h = build_hamiltonian(&spec);
    let spectrum = eigenvalues(&h)?;
    let e = spectrum.real_eigenvalues().nth(2).expect("unbroken phase");
    let ev = eigenvector(&h, Complex64::new(e, 0.0))?;
    println!("E = {e:.12}, closure residual {:.1e}", ev.closure_residual);
    for (n, psi) in ev.amplitudes.iter().enumerate() {
        println!("  psi({:2}) = {:+.6} {:+.6}i", n + 1, psi.re, psi.im);
    }
    let fit = fit_ansatz(&spec, &ev)?;
    println!("ansatz A = {:.6}, B = {:.6}, fit residual {:.1e}", fit.a_left, fit.b_right, fit.fit_residual);
    println!("secular residual at E: {:.1e}", secular_residual(&spec, Complex64::new(e, 0.0))?);
    Ok(())
}
