//! Cross-checks the secular equation against the polynomial eigenvalues.
//!
//! ```bash
//! cargo run --release --example secular_check
//! ```

use ptlattice::lattice::{build_hamiltonian, HoppingProfile, LatticeSpec};
use ptlattice::phase::{default_gamma_max, find_gamma_c};
use ptlattice::secular::{count_real_secular_roots, nn_secular_residual, secular_residual};
use ptlattice::spectral::eigenvalues;
use ptlattice::Complex64;

fn main() -> ptlattice::Result<()> {
    for (n, m, tb) in [(20, 7, 0.8), (21, 6, 1.5), (20, 10, 0.7)] {
        let base = LatticeSpec::new(n, m, 0.0, HoppingProfile::two_segment(1.0, tb)?)?;
        let gamma_c = find_gamma_c(&base, default_gamma_max(&base))?.gamma_c;
        let spec = base.with_gamma(0.8 * gamma_c)?;
        let spectrum = eigenvalues(&build_hamiltonian(&spec))?;
        let worst = spectrum
            .real_eigenvalues()
            .map(|e| secular_residual(&spec, Complex64::new(e, 0.0)))
            .try_fold(0.0f64, |a, r| r.map(|r| a.max(r)))?;
        let roots = count_real_secular_roots(&spec, 10_000)?;
        println!("N={n} m={m} t_b={tb} gamma=0.8 gamma_c: max residual {worst:.1e}, scan finds {roots} of {n}");
        if 2 * m == n {
            let e = spectrum.real_eigenvalues().next().expect("real");
            println!("  nearest-neighbour form at E={e:.6}: {:.1e}", nn_secular_residual(&spec, Complex64::new(e, 0.0))?);
        }
    }
    Ok(())
}
