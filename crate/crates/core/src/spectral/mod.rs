//! Eigenvalues and eigenvectors of complex-symmetric tridiagonal matrices.
//!
//! The characteristic polynomial `p_N(z) = det(H - zI)` is never expanded
//! into coefficients. It is evaluated with the three-term recurrence
//!
//! ```text
//! p_n = (d_n - z) p_{n-1} - t(n-1)^2 p_{n-2}
//! ```
//!
//! carrying a separate power-of-two exponent, and all roots are found
//! together by Aberth–Ehrlich iteration. Coefficient expansion is only used
//! by the small-`N` oracle in [`oracle`].

use std::cmp::Ordering;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::TridiagonalHamiltonian;

pub mod oracle;

pub use oracle::brute_force_spectrum;

/// Relative classification tolerance: an eigenvalue whose imaginary part
/// exceeds `CLASS_RTOL * E_scale` is always complex.
pub const CLASS_RTOL: f64 = 1e-8;
/// Aberth stops once every root moves by less than this times `E_scale`.
pub const ABERTH_RTOL: f64 = 1e-13;
pub const ABERTH_MAX_SWEEPS: usize = 500;
/// Normalized residual bound for simple roots.
pub const RESIDUAL_TOL: f64 = 1e-9;
/// Relaxed residual bound accepted for (near-)degenerate roots.
pub const DEGENERATE_RESIDUAL_TOL: f64 = 1e-6;
pub const CLOSURE_TOL: f64 = 1e-7;

const RESCALE_HI: f64 = 1e100;
const RESCALE_LO: f64 = 1e-100;
// Irrational angular offset for the starting circle.
const START_PHASE: f64 = 0.618_033_988_749_894_8;
const START_RADIUS: f64 = 1.2;
const STALL_SWEEPS: usize = 8;
const STALL_RTOL: f64 = 1e-6;
const COUNT_STALL_RTOL: f64 = 1e-4;
/// Root pairs closer than this (relative to `E_scale`) to a double root
/// are not resolved by the sign test.
const CERT_RTOL: f64 = 1e-15;

/// `p_N(z)` and `p_N'(z)` as `value · 2^scale_exponent` and
/// `derivative · 2^scale_exponent`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CharPoly {
    pub value: Complex64,
    pub derivative: Complex64,
    pub scale_exponent: i32,
}

impl CharPoly {
    /// Unscaled determinant; may overflow or underflow for large `N`.
    pub fn unscaled_value(&self) -> Complex64 {
        self.value * 2f64.powi(self.scale_exponent)
    }

    /// Newton correction `p / p'`, independent of the scale exponent.
    pub fn newton_step(&self) -> Complex64 {
        if self.value == Complex64::new(0.0, 0.0) {
            Complex64::new(0.0, 0.0)
        } else {
            self.value / self.derivative
        }
    }
}

/// Evaluates `det(H - zI)` and its `z`-derivative by the three-term
/// recurrence with running power-of-two rescaling.
pub fn char_poly(h: &TridiagonalHamiltonian, z: Complex64) -> CharPoly {
    let diag = h.diagonal();
    let off = h.off_diagonal();
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);

    // (p_{n-2}, p_{n-1}) and their derivatives.
    let (mut p_prev, mut p) = (one, diag[0] - z);
    let (mut dp_prev, mut dp) = (zero, -one);
    let mut exponent = 0i32;

    for n in 1..diag.len() {
        let shift = diag[n] - z;
        let t2 = off[n - 1] * off[n - 1];
        let p_next = shift * p - p_prev * t2;
        let dp_next = shift * dp - p - dp_prev * t2;
        p_prev = p;
        dp_prev = dp;
        p = p_next;
        dp = dp_next;

        let size = p.norm().max(dp.norm()).max(p_prev.norm()).max(dp_prev.norm());
        if size > RESCALE_HI || (size < RESCALE_LO && size > 0.0) {
            let e = size.log2().round() as i32;
            let factor = 2f64.powi(-e);
            p *= factor;
            dp *= factor;
            p_prev *= factor;
            dp_prev *= factor;
            exponent += e;
        }
    }
    CharPoly { value: p, derivative: dp, scale_exponent: exponent }
}

/// Last two leading minors `(p_k, p_{k-1})` of the tridiagonal matrix
/// given by `diag` and `off` (shifted by `-x`), as mantissas sharing the
/// power-of-two exponent.
fn minors(diag: &[Complex64], off: &[f64], x: f64) -> (Complex64, Complex64, i32) {
    let z = Complex64::new(x, 0.0);
    let (mut p_prev, mut p) = (Complex64::new(1.0, 0.0), diag[0] - z);
    let mut exponent = 0;
    for n in 1..diag.len() {
        let p_next = (diag[n] - z) * p - p_prev * (off[n - 1] * off[n - 1]);
        p_prev = p;
        p = p_next;
        let size = p.norm().max(p_prev.norm());
        if size > RESCALE_HI || (size < RESCALE_LO && size > 0.0) {
            let e = size.log2().round() as i32;
            let factor = 2f64.powi(-e);
            p *= factor;
            p_prev *= factor;
            exponent += e;
        }
    }
    (p, p_prev, exponent)
}

/// `Re p_N(x)` and `Re p_N''(x)` with a shared power-of-two exponent.
fn second_order(h: &TridiagonalHamiltonian, x: f64) -> (f64, f64, i32) {
    let diag = h.diagonal();
    let off = h.off_diagonal();
    let z = Complex64::new(x, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let (mut p_prev, mut p) = (Complex64::new(1.0, 0.0), diag[0] - z);
    let (mut d_prev, mut d) = (zero, Complex64::new(-1.0, 0.0));
    let (mut dd_prev, mut dd) = (zero, zero);
    let mut exponent = 0;
    for n in 1..diag.len() {
        let shift = diag[n] - z;
        let t2 = off[n - 1] * off[n - 1];
        let p_next = shift * p - p_prev * t2;
        let d_next = shift * d - p - d_prev * t2;
        let dd_next = shift * dd - d * 2.0 - dd_prev * t2;
        (p_prev, p) = (p, p_next);
        (d_prev, d) = (d, d_next);
        (dd_prev, dd) = (dd, dd_next);
        let size = [p, p_prev, d, d_prev, dd, dd_prev].iter().fold(0.0f64, |a, v| a.max(v.norm()));
        if size > RESCALE_HI || (size < RESCALE_LO && size > 0.0) {
            let e = size.log2().round() as i32;
            let f = 2f64.powi(-e);
            for v in [&mut p, &mut p_prev, &mut d, &mut d_prev, &mut dd, &mut dd_prev] {
                *v *= f;
            }
            exponent += e;
        }
    }
    (p.re, dd.re, exponent)
}

/// Sign of `Re p_N(x)` at a real point, or `None` when it cannot be
/// trusted.
///
/// Two things can make it untrustworthy. Rounding: `p_N` is evaluated
/// along three paths (recurrence from the first site, from the last site,
/// and split at the middle bond) and must agree to within half its
/// smallest magnitude. Resolution: near a pair of roots
/// `p ≈ (p''/2)((x - c)² - D)`, and a pair closer than `rho` to a double
/// root (`|D| < rho²`) is indistinguishable from one, so the sign is only
/// used when `|p| > |p''| rho² / 2`.
fn real_axis_sign(h: &TridiagonalHamiltonian, x: f64, rho: f64) -> Option<f64> {
    let diag = h.diagonal();
    let off = h.off_diagonal();
    let n = diag.len();
    let (p, p2, e) = second_order(h, x);
    if p.abs() <= 0.5 * p2.abs() * rho * rho {
        return None;
    }
    if n < 4 {
        return Some(p.signum());
    }
    let (fwd, _, e_fwd) = minors(diag, off, x);
    let rdiag: Vec<Complex64> = diag.iter().rev().copied().collect();
    let roff: Vec<f64> = off.iter().rev().copied().collect();
    let (bwd, _, e_bwd) = minors(&rdiag, &roff, x);

    // det = L_k R_{k+1} - t_k² L_{k-1} R_{k+2}, with L the leading minors of
    // sites 1..k and R the trailing minors of sites k+1..N.
    let k = n / 2;
    let (l_k, l_km1, e_l) = minors(&diag[..k], &off[..k - 1], x);
    let (r_k1, r_k2, e_r) = minors(&rdiag[..n - k], &roff[..n - k - 1], x);
    let t2 = off[k - 1] * off[k - 1];
    let split = l_k * r_k1 - l_km1 * r_k2 * t2;
    let e_split = e_l + e_r;

    let top = e_fwd.max(e_bwd).max(e_split).max(e);
    let values = [
        fwd.re * 2f64.powi(e_fwd - top),
        bwd.re * 2f64.powi(e_bwd - top),
        split.re * 2f64.powi(e_split - top),
    ];
    let smallest = values.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
    let spread = values.iter().fold(f64::NEG_INFINITY, |a, &v| a.max(v))
        - values.iter().fold(f64::INFINITY, |a, &v| a.min(v));
    let same_sign = values.iter().all(|v| v.signum() == values[0].signum());
    (smallest > 0.0 && same_sign && spread <= 0.5 * smallest).then(|| values[0].signum())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    Real,
    Complex,
}

/// All `N` eigenvalues, sorted by `(Re, Im)`, with classification and
/// normalized residuals `|p/p'| / E_scale`.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<Complex64>,
    pub classifications: Vec<Classification>,
    pub residuals: Vec<f64>,
    pub n_complex: usize,
    pub energy_scale: f64,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn real_eigenvalues(&self) -> impl Iterator<Item = f64> + '_ {
        self.eigenvalues
            .iter()
            .zip(&self.classifications)
            .filter(|(_, c)| **c == Classification::Real)
            .map(|(e, _)| e.re)
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    /// `CLASS_RTOL * E_scale`.
    pub fn class_tolerance(&self) -> f64 {
        CLASS_RTOL * self.energy_scale
    }
}

/// Spectral symmetry defects, each relative to `E_scale`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymmetryDefects {
    /// Distance between the spectrum and its complex conjugate.
    pub conjugation: f64,
    /// Distance between the spectrum and its image under `E -> -E*`.
    pub particle_hole: f64,
    /// `|Σ λ - tr H|`.
    pub trace: f64,
    /// How far the largest `|λ|` exceeds `E_scale` (zero when inside).
    pub bound_excess: f64,
}

impl SymmetryDefects {
    pub fn max(&self) -> f64 {
        self.conjugation.max(self.particle_hole).max(self.trace).max(self.bound_excess)
    }
}

impl Spectrum {
    pub fn symmetry_defects(&self, h: &TridiagonalHamiltonian) -> SymmetryDefects {
        let s = self.energy_scale;
        let conj: Vec<Complex64> = self.eigenvalues.iter().map(|z| z.conj()).collect();
        let mirror: Vec<Complex64> = self.eigenvalues.iter().map(|z| -z.conj()).collect();
        let sum: Complex64 = self.eigenvalues.iter().sum();
        let trace: Complex64 = h.diagonal().iter().sum();
        let largest = self.eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
        SymmetryDefects {
            conjugation: multiset_distance(&self.eigenvalues, &conj) / s,
            particle_hole: multiset_distance(&self.eigenvalues, &mirror) / s,
            trace: (sum - trace).norm() / s,
            bound_excess: ((largest - s) / s).max(0.0),
        }
    }
}

/// Largest pairing distance when each element of `a` is matched to the
/// nearest unused element of `b`, closest pairs first. Infinite when the
/// lengths differ.
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut pairs: Vec<(f64, usize, usize)> = a
        .iter()
        .enumerate()
        .flat_map(|(i, x)| b.iter().enumerate().map(move |(j, y)| ((x - y).norm(), i, j)))
        .collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut used_a = vec![false; a.len()];
    let mut used_b = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for (dist, i, j) in pairs {
        if !used_a[i] && !used_b[j] {
            used_a[i] = true;
            used_b[j] = true;
            worst = worst.max(dist);
        }
    }
    worst
}

fn cmp_complex(a: &Complex64, b: &Complex64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Assembles a [`Spectrum`] from roots of `det(H - zI)`: sorts, computes
/// residuals and classifies.
///
/// Roots with `|Im| > CLASS_RTOL * E_scale` are complex. For PT-symmetric
/// matrices `p_N` is real on the real axis and a conjugate pair never
/// changes its sign there, so a remaining candidate is real exactly when
/// `p_N` changes sign across it. The sign is sampled at the midpoints
/// between consecutive candidates, which certifies reality however small
/// the imaginary parts of nearby pairs are. Where a sample lies inside the
/// rounding noise of `p_N` (roots closer than working precision resolves)
/// the tolerance verdict stands. Hermitian matrices are real by
/// construction; other matrices use the tolerance alone.
pub(crate) fn assemble_spectrum(h: &TridiagonalHamiltonian, mut roots: Vec<Complex64>) -> Spectrum {
    roots.sort_by(cmp_complex);
    let scale = h.energy_scale();
    let tol = CLASS_RTOL * scale;

    let residuals = roots
        .iter()
        .map(|&z| char_poly(h, z).newton_step().norm() / scale)
        .collect();

    let mut real: Vec<bool> = roots.iter().map(|z| z.im.abs() <= tol).collect();
    if h.is_pt_symmetric() && !h.is_hermitian() {
        let mut candidates: Vec<usize> = (0..roots.len()).filter(|&i| real[i]).collect();
        candidates.sort_by(|&a, &b| roots[a].re.total_cmp(&roots[b].re));
        let k = candidates.len();
        if k > 0 {
            let lo = roots[candidates[0]].re.min(-scale) - scale;
            let hi = roots[candidates[k - 1]].re.max(scale) + scale;
            let samples: Vec<f64> = std::iter::once(lo)
                .chain(candidates.windows(2).map(|w| 0.5 * (roots[w[0]].re + roots[w[1]].re)))
                .chain(std::iter::once(hi))
                .collect();
            let signs: Vec<Option<f64>> = samples.iter().map(|&x| real_axis_sign(h, x, CERT_RTOL * scale)).collect();
            for (j, &i) in candidates.iter().enumerate() {
                // An unresolved sign leaves the tolerance verdict standing.
                if let (Some(a), Some(b)) = (signs[j], signs[j + 1]) {
                    real[i] = a != b;
                }
            }
        }
    }
    let classifications: Vec<Classification> =
        real.iter().map(|&r| if r { Classification::Real } else { Classification::Complex }).collect();

    let n_complex = classifications.iter().filter(|c| **c == Classification::Complex).count();
    Spectrum { eigenvalues: roots, classifications, residuals, n_complex, energy_scale: scale }
}

/// All eigenvalues of `h` by Aberth–Ehrlich simultaneous iteration.
pub fn eigenvalues(h: &TridiagonalHamiltonian) -> Result<Spectrum> {
    let roots = aberth_roots(h, STALL_RTOL)?;
    let spectrum = assemble_spectrum(h, roots);
    let bad: Vec<usize> = spectrum
        .residuals
        .iter()
        .enumerate()
        .filter(|(_, r)| **r > DEGENERATE_RESIDUAL_TOL)
        .map(|(i, _)| i)
        .collect();
    if !bad.is_empty() {
        return Err(Error::ConvergenceFailure {
            sweeps: ABERTH_MAX_SWEEPS,
            residuals: bad.iter().map(|&i| spectrum.residuals[i]).collect(),
            indices: bad,
        });
    }
    Ok(spectrum)
}

/// Classification only: roots near an exceptional point are accepted once
/// their updates stall anywhere inside `COUNT_STALL_RTOL · E_scale`, since
/// the sign-change count does not need them to full accuracy.
pub fn count_complex(h: &TridiagonalHamiltonian) -> Result<usize> {
    Ok(assemble_spectrum(h, aberth_roots(h, COUNT_STALL_RTOL)?).n_complex)
}

fn aberth_roots(h: &TridiagonalHamiltonian, stall_rtol: f64) -> Result<Vec<Complex64>> {
    let n = h.dim();
    let scale = h.energy_scale();
    let tol = ABERTH_RTOL * scale;
    let mut roots: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(START_RADIUS * scale, 2.0 * PI * k as f64 / n as f64 + START_PHASE))
        .collect();
    if n == 1 {
        // Linear: one Newton step is exact.
        let step = char_poly(h, roots[0]).newton_step();
        roots[0] -= step;
        return Ok(roots);
    }

    let mut updates = vec![f64::INFINITY; n];
    let mut best = vec![f64::INFINITY; n];
    let mut stalled = vec![0usize; n];
    let mut frozen = vec![false; n];
    let mut next = roots.clone();
    for _ in 0..ABERTH_MAX_SWEEPS {
        for i in 0..n {
            let z = roots[i];
            next[i] = z;
            if frozen[i] {
                continue;
            }
            let newton = char_poly(h, z).newton_step();
            if newton == Complex64::new(0.0, 0.0) {
                frozen[i] = true;
                updates[i] = 0.0;
                continue;
            }
            let repulsion: Complex64 = roots
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, &zj)| {
                    let diff = z - zj;
                    if diff == Complex64::new(0.0, 0.0) {
                        Complex64::new(0.0, 0.0)
                    } else {
                        diff.inv()
                    }
                })
                .sum();
            let denom = Complex64::new(1.0, 0.0) - newton * repulsion;
            let step = if denom.norm() > 0.0 && denom.is_finite() { newton / denom } else { newton };
            let step = if step.is_finite() { step } else { Complex64::new(tol, tol) };
            next[i] = z - step;
            updates[i] = step.norm();
            if updates[i] < best[i] {
                best[i] = updates[i];
                stalled[i] = 0;
            } else {
                stalled[i] += 1;
            }
            // Near a multiple root the updates bottom out at rounding noise.
            if updates[i] <= tol || (stalled[i] >= STALL_SWEEPS && best[i] <= stall_rtol * scale) {
                frozen[i] = true;
            }
        }
        std::mem::swap(&mut roots, &mut next);
        if frozen.iter().all(|&f| f) {
            return Ok(roots);
        }
    }

    let indices: Vec<usize> = (0..n).filter(|&i| !frozen[i]).collect();
    Err(Error::ConvergenceFailure {
        sweeps: ABERTH_MAX_SWEEPS,
        residuals: indices.iter().map(|&i| char_poly(h, roots[i]).newton_step().norm() / scale).collect(),
        indices,
    })
}

/// Right eigenvector for a converged eigenvalue, normalized so the largest
/// amplitude is `1 + 0i`.
#[derive(Clone, Debug)]
pub struct Eigenvector {
    pub eigenvalue: Complex64,
    pub amplitudes: Vec<Complex64>,
    pub closure_residual: f64,
}

impl Eigenvector {
    /// Largest row defect `|((H - λ) ψ)_n|`, relative to `E_scale · max|ψ|`.
    pub fn max_row_residual(&self, h: &TridiagonalHamiltonian) -> f64 {
        row_residuals(h, self.eigenvalue, &self.amplitudes)
            .into_iter()
            .fold(0.0, f64::max)
            / (h.energy_scale() * max_norm(&self.amplitudes))
    }
}

fn max_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

fn row_residuals(h: &TridiagonalHamiltonian, lambda: Complex64, psi: &[Complex64]) -> Vec<f64> {
    let d = h.diagonal();
    let off = h.off_diagonal();
    let n = d.len();
    (0..n)
        .map(|i| {
            let mut r = (d[i] - lambda) * psi[i];
            if i > 0 {
                r += psi[i - 1] * off[i - 1];
            }
            if i + 1 < n {
                r += psi[i + 1] * off[i];
            }
            r.norm()
        })
        .collect()
}

fn normalize_to_peak(mut psi: Vec<Complex64>) -> Vec<Complex64> {
    let peak = psi
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap_or(Complex64::new(1.0, 0.0));
    if peak.norm() > 0.0 {
        for x in &mut psi {
            *x /= peak;
        }
    }
    psi
}

/// Eigenvector for `lambda` by forward recurrence from `ψ(1) = 1`, falling
/// back to inverse iteration when the last row does not close.
pub fn eigenvector(h: &TridiagonalHamiltonian, lambda: Complex64) -> Result<Eigenvector> {
    let scale = h.energy_scale();
    let psi = forward_recurrence(h, lambda);
    let d = h.diagonal();
    let off = h.off_diagonal();
    let n = d.len();
    let closure = if n == 1 {
        (d[0] - lambda).norm()
    } else {
        ((d[n - 1] - lambda) * psi[n - 1] + psi[n - 2] * off[n - 2]).norm()
    };
    let closure_residual = closure / (scale * max_norm(&psi));
    if closure_residual.is_finite() && closure_residual <= CLOSURE_TOL {
        return Ok(Eigenvector { eigenvalue: lambda, amplitudes: normalize_to_peak(psi), closure_residual });
    }

    let psi = inverse_iteration(h, lambda)?;
    let residual = row_residuals(h, lambda, &psi).into_iter().fold(0.0, f64::max) / (scale * max_norm(&psi));
    if residual.is_finite() && residual <= CLOSURE_TOL {
        Ok(Eigenvector { eigenvalue: lambda, amplitudes: normalize_to_peak(psi), closure_residual: residual })
    } else {
        Err(Error::DefectiveCandidate { lambda, residual: closure_residual.min(residual) })
    }
}

fn forward_recurrence(h: &TridiagonalHamiltonian, lambda: Complex64) -> Vec<Complex64> {
    let d = h.diagonal();
    // Hopping amplitudes t(i) = -off(i).
    let t: Vec<f64> = h.off_diagonal().iter().map(|x| -x).collect();
    let n = d.len();
    let mut psi = vec![Complex64::new(0.0, 0.0); n];
    psi[0] = Complex64::new(1.0, 0.0);
    if n == 1 {
        return psi;
    }
    psi[1] = (d[0] - lambda) * psi[0] / t[0];
    for k in 1..n - 1 {
        psi[k + 1] = ((d[k] - lambda) * psi[k] - psi[k - 1] * t[k - 1]) / t[k];
        let size = psi[k + 1].norm();
        if size > RESCALE_HI {
            for x in &mut psi[..=k + 1] {
                *x /= size;
            }
        }
    }
    psi
}

/// Solves `(H - σ) x = b` for a tridiagonal `H` by Gaussian elimination
/// with partial pivoting.
fn tridiagonal_solve(h: &TridiagonalHamiltonian, shift: Complex64, rhs: &[Complex64]) -> Option<Vec<Complex64>> {
    let n = h.dim();
    let off = h.off_diagonal();
    let zero = Complex64::new(0.0, 0.0);
    // Row i holds (sub, diag, sup, sup2) after pivoting.
    let mut sub: Vec<Complex64> = (0..n).map(|i| if i > 0 { off[i - 1].into() } else { zero }).collect();
    let mut diag: Vec<Complex64> = h.diagonal().iter().map(|&d| d - shift).collect();
    let mut sup: Vec<Complex64> = (0..n).map(|i| if i + 1 < n { off[i].into() } else { zero }).collect();
    let mut sup2 = vec![zero; n];
    let mut b = rhs.to_vec();
    let tiny = f64::EPSILON * h.energy_scale();

    for i in 0..n.saturating_sub(1) {
        if sub[i + 1].norm() > diag[i].norm() {
            // Swap rows i and i + 1.
            std::mem::swap(&mut diag[i], &mut sub[i + 1]);
            let (a, c) = (sup[i], diag[i + 1]);
            sup[i] = c;
            diag[i + 1] = a;
            sup2[i] = sup[i + 1];
            sup[i + 1] = zero;
            b.swap(i, i + 1);
            // Row i+1 now: [sub(i+1) = old diag(i), diag(i+1) = old sup(i), sup(i+1) = 0]
        }
        if diag[i].norm() == 0.0 {
            diag[i] = Complex64::new(tiny, 0.0);
        }
        let factor = sub[i + 1] / diag[i];
        diag[i + 1] -= factor * sup[i];
        sup[i + 1] -= factor * sup2[i];
        let bi = b[i];
        b[i + 1] -= factor * bi;
        sub[i + 1] = zero;
    }
    if diag[n - 1].norm() == 0.0 {
        diag[n - 1] = Complex64::new(tiny, 0.0);
    }
    let mut x = vec![zero; n];
    for i in (0..n).rev() {
        let mut acc = b[i];
        if i + 1 < n {
            acc -= sup[i] * x[i + 1];
        }
        if i + 2 < n {
            acc -= sup2[i] * x[i + 2];
        }
        x[i] = acc / diag[i];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

fn inverse_iteration(h: &TridiagonalHamiltonian, lambda: Complex64) -> Result<Vec<Complex64>> {
    let n = h.dim();
    let shift = lambda + Complex64::new(f64::EPSILON * h.energy_scale(), 0.0);
    let mut x: Vec<Complex64> =
        (0..n).map(|i| Complex64::new(1.0, 0.1 * ((i as f64) * START_PHASE).sin())).collect();
    for _ in 0..3 {
        let y = tridiagonal_solve(h, shift, &x).ok_or(Error::DefectiveCandidate { lambda, residual: f64::INFINITY })?;
        let norm = max_norm(&y);
        x = y.into_iter().map(|v| v / norm).collect();
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_hamiltonian, HoppingProfile, LatticeSpec};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn two_site(gamma: f64, tb: f64) -> TridiagonalHamiltonian {
        build_hamiltonian(&LatticeSpec::new(2, 1, gamma, HoppingProfile::two_segment(1.0, tb).unwrap()).unwrap())
    }

    fn uniform(n: usize) -> TridiagonalHamiltonian {
        build_hamiltonian(&LatticeSpec::new(n, 1, 0.0, HoppingProfile::uniform(1.0).unwrap()).unwrap())
    }

    #[test]
    fn char_poly_base_case() {
        let h = TridiagonalHamiltonian::new(vec![c(0.3, -0.2)], vec![]).unwrap();
        let cp = char_poly(&h, c(1.0, 1.0));
        assert_eq!(cp.unscaled_value(), c(-0.7, -1.2));
        assert_eq!(cp.derivative, c(-1.0, 0.0));
    }

    #[test]
    fn char_poly_vanishes_at_two_site_eigenvalue() {
        let cp = char_poly(&two_site(0.6, 1.0), c(0.8, 0.0));
        assert!(cp.unscaled_value().norm() < 1e-15);
    }

    #[test]
    fn char_poly_real_for_hermitian_on_real_axis() {
        let h = uniform(9);
        for x in [-2.5, -1.0, 0.1, 0.77, 3.0] {
            let cp = char_poly(&h, c(x, 0.0));
            assert!(cp.value.im.abs() <= 1e-14 * cp.value.norm().max(1e-300));
            assert_eq!(cp.value.im, 0.0);
        }
    }

    #[test]
    fn char_poly_derivative_matches_finite_difference() {
        let spec = LatticeSpec::new(7, 2, 0.4, HoppingProfile::two_segment(1.0, 0.6).unwrap()).unwrap();
        let h = build_hamiltonian(&spec);
        let z = c(0.37, 0.21);
        let step = 1e-6;
        let fd = (char_poly(&h, z + step).unscaled_value() - char_poly(&h, z - step).unscaled_value()) / (2.0 * step);
        let cp = char_poly(&h, z);
        let exact = cp.derivative * 2f64.powi(cp.scale_exponent);
        assert!((fd - exact).norm() < 1e-7 * exact.norm());
    }

    #[test]
    fn char_poly_rescales_instead_of_overflowing() {
        let h = build_hamiltonian(&LatticeSpec::new(2000, 1000, 0.3, HoppingProfile::uniform(1e3).unwrap()).unwrap());
        let cp = char_poly(&h, c(10.0, 5.0));
        assert!(cp.value.is_finite() && cp.derivative.is_finite());
        assert!(cp.scale_exponent > 1000);
        assert!(cp.newton_step().is_finite());
    }

    #[test]
    fn two_site_real_pair() {
        let s = eigenvalues(&two_site(0.6, 1.0)).unwrap();
        assert!((s.eigenvalues[0] - c(-0.8, 0.0)).norm() < 1e-12);
        assert!((s.eigenvalues[1] - c(0.8, 0.0)).norm() < 1e-12);
        assert_eq!(s.n_complex, 0);
    }

    #[test]
    fn two_site_imaginary_pair() {
        let s = eigenvalues(&two_site(1.25, 1.0)).unwrap();
        assert!((s.eigenvalues[0] - c(0.0, -0.75)).norm() < 1e-12);
        assert!((s.eigenvalues[1] - c(0.0, 0.75)).norm() < 1e-12);
        assert_eq!(s.n_complex, 2);
    }

    #[test]
    fn uniform_chain_closed_form() {
        let s = eigenvalues(&uniform(5)).unwrap();
        let expected: Vec<f64> = (1..=5).map(|n| -2.0 * (n as f64 * PI / 6.0).cos()).collect();
        for (e, x) in s.eigenvalues.iter().zip(&expected) {
            assert!((e - c(*x, 0.0)).norm() < 1e-12, "{e} vs {x}");
        }
        assert_eq!(s.n_complex, 0);
        assert!(s.max_residual() <= RESIDUAL_TOL);
    }

    #[test]
    fn maximal_breaking_just_above_threshold() {
        let spec = LatticeSpec::new(20, 10, 1.01, HoppingProfile::uniform(1.0).unwrap()).unwrap();
        let s = eigenvalues(&build_hamiltonian(&spec)).unwrap();
        assert_eq!(s.n_complex, 20);
        let below = eigenvalues(&build_hamiltonian(&spec.with_gamma(0.99).unwrap())).unwrap();
        assert_eq!(below.n_complex, 0);
    }

    #[test]
    fn tiny_imaginary_parts_are_certified_complex() {
        // Nearly decoupled halves: the splitting, and so the threshold, is tiny.
        let spec = LatticeSpec::new(12, 3, 0.0, HoppingProfile::two_segment(1.0, 0.05).unwrap()).unwrap();
        let clean = eigenvalues(&build_hamiltonian(&spec)).unwrap();
        assert_eq!(clean.n_complex, 0);
        let strong = eigenvalues(&build_hamiltonian(&spec.with_gamma(1e-3).unwrap())).unwrap();
        assert!(strong.n_complex >= 2);
        assert!(strong.eigenvalues.iter().all(|e| e.im.abs() < 1e-3));
    }

    #[test]
    fn non_pt_matrix_uses_tolerance() {
        let h = TridiagonalHamiltonian::new(vec![c(1.0, 0.5), c(0.0, 0.0)], vec![-1.0]).unwrap();
        let s = eigenvalues(&h).unwrap();
        assert_eq!(s.n_complex, 2);
        let trace: Complex64 = s.eigenvalues.iter().sum();
        assert!((trace - c(1.0, 0.5)).norm() < 1e-12);
    }

    #[test]
    fn two_site_eigenvector() {
        let v = eigenvector(&two_site(0.6, 1.0), c(0.8, 0.0)).unwrap();
        // Row 1: (iγ - λ) ψ(1) - t ψ(2) = 0, so ψ(2)/ψ(1) = -0.8 + 0.6i.
        let ratio = v.amplitudes[1] / v.amplitudes[0];
        assert!((ratio - c(-0.8, 0.6)).norm() < 1e-12);
        assert!(v.closure_residual <= CLOSURE_TOL);
    }

    #[test]
    fn band_centre_eigenvector_of_uniform_chain() {
        let v = eigenvector(&uniform(5), c(0.0, 0.0)).unwrap();
        let expected = [1.0, 0.0, -1.0, 0.0, 1.0];
        for (a, e) in v.amplitudes.iter().zip(expected) {
            assert!((a - c(e, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_eigenvalue() {
        assert!(matches!(eigenvector(&uniform(6), c(0.123, 0.0)), Err(Error::DefectiveCandidate { .. })));
    }

    #[test]
    fn inverse_iteration_recovers_evanescent_state() {
        // Deep inside the weak link the forward recurrence loses accuracy.
        let spec = LatticeSpec::new(40, 5, 0.0, HoppingProfile::two_segment(1.0, 0.02).unwrap()).unwrap();
        let h = build_hamiltonian(&spec);
        let s = eigenvalues(&h).unwrap();
        for &e in &s.eigenvalues {
            let v = eigenvector(&h, e).unwrap();
            assert!(v.max_row_residual(&h) <= CLOSURE_TOL, "{e}");
        }
    }

    #[test]
    fn tridiagonal_solve_matches_matvec() {
        let spec = LatticeSpec::new(6, 2, 0.4, HoppingProfile::two_segment(1.0, 1.7).unwrap()).unwrap();
        let h = build_hamiltonian(&spec);
        let shift = c(0.3, -0.1);
        let b: Vec<Complex64> = (0..6).map(|i| c(i as f64, 1.0)).collect();
        let x = tridiagonal_solve(&h, shift, &b).unwrap();
        let d = h.diagonal();
        let off = h.off_diagonal();
        for i in 0..6 {
            let mut r = (d[i] - shift) * x[i];
            if i > 0 {
                r += x[i - 1] * off[i - 1];
            }
            if i < 5 {
                r += x[i + 1] * off[i];
            }
            assert!((r - b[i]).norm() < 1e-12);
        }
    }
}
