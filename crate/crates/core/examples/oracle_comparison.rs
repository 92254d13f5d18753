//! Aberth iteration against the brute-force polynomial oracle.
//!
//! ```bash
//! cargo run --example oracle_comparison -- 42
//! ```

use ptlattice::cli::verify::random_spec;
use ptlattice::lattice::build_hamiltonian;
use ptlattice::spectral::{brute_force_spectrum, eigenvalues, multiset_distance};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> ptlattice::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(42);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let spec = random_spec(&mut rng, 8)?;
        let h = build_hamiltonian(&spec);
        let a = eigenvalues(&h)?;
        let b = brute_force_spectrum(&h)?;
        let dist = multiset_distance(&a.eigenvalues, &b.eigenvalues) / h.energy_scale();
        worst = worst.max(dist);
        if a.n_complex != b.n_complex {
            println!("classification differs for {spec:?}");
        }
    }
    println!("seed {seed}: worst multiset distance {worst:.2e} E_scale over 200 specs");
    Ok(())
}
