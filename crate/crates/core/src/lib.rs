//! Spectra and symmetry-breaking thresholds of PT-symmetric tight-binding
//! lattices.
//!
//! The crate models an open `N`-site chain with a balanced pair of
//! imaginary impurities `+iγ` at site `m` and `-iγ` at the mirror site
//! `N + 1 - m`. It provides:
//!
//! - [`lattice`]: hopping profiles, lattice specifications and the
//!   tridiagonal Hamiltonian.
//! - [`spectral`]: all complex eigenvalues via an Aberth–Ehrlich iteration
//!   on the recurrence-evaluated characteristic polynomial, eigenvectors,
//!   and a brute-force polynomial oracle for small lattices.
//! - [`secular`]: quasimomenta, the two-segment secular function, its
//!   nearest-neighbour reduction, the Bethe-ansatz fit and the 2×2
//!   determinant condition for central impurities.
//! - [`phase`]: threshold bisection, phase-diagram sweeps, power-law
//!   exponent fits and the maximal-breaking and fragility studies.
//! - [`cli`]: the command-line surface (CSV and SVG output).
//!
//! ```
//! use ptlattice::lattice::{HoppingProfile, LatticeSpec};
//! use ptlattice::phase::find_gamma_c;
//!
//! let spec = LatticeSpec::new(20, 10, 0.0, HoppingProfile::two_segment(1.0, 0.7)?)?;
//! let threshold = find_gamma_c(&spec, 40.0)?;
//! assert!((threshold.gamma_c - 0.7).abs() < 1e-6);
//! # Ok::<(), ptlattice::Error>(())
//! ```

pub mod cli;
mod error;
pub mod lattice;
pub mod phase;
pub mod secular;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex::Complex64;
