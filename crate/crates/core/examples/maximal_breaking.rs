//! Central impurities on an even lattice: the threshold is the central
//! hopping for any symmetric profile, and all eigenvalues go complex at once.
//!
//! ```bash
//! cargo run --release --example maximal_breaking
//! ```

use ptlattice::lattice::HoppingProfile;
use ptlattice::phase::{random_symmetric_profiles, verify_maximal_breaking};

fn main() -> ptlattice::Result<()> {
    let mut profiles = vec![
        ("two-segment t_b=0.5".to_string(), HoppingProfile::two_segment(1.0, 0.5)?),
        ("alpha=-1".to_string(), HoppingProfile::alpha(1.0, -1.0)?),
        ("alpha=0.5".to_string(), HoppingProfile::alpha(1.0, 0.5)?),
    ];
    for (i, p) in random_symmetric_profiles(7, 5, 20, 0.2, 2.0)?.into_iter().enumerate() {
        profiles.push((format!("random #{i}"), p));
    }
    for (name, p) in &profiles {
        let r = verify_maximal_breaking(20, p)?;
        println!(
            "{name:20} t(N/2) = {:.6}  gamma_c = {:.6}  rel err {:.1e}  complex below/above: {}/{}  {}",
            r.central_hopping,
            r.gamma_c,
            r.relative_error,
            r.n_complex_below,
            r.n_complex_above,
            if r.passed() { "ok" } else { "FAILED" }
        );
    }
    Ok(())
}
