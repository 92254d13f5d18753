//! Analytic structure of the two-segment lattice, used to validate the
//! numerical spectrum.
//!
//! Inside each uniform segment an eigenfunction is a combination of plane
//! waves whose quasimomenta satisfy `E = -2 t0 cos k = -2 t_b cos k'`.
//! Matching the segments at the impurity sites gives a secular function of
//! `(k, k')` whose zeros are the eigenvalues. Everything here evaluates
//! residuals at given energies; nothing here searches for roots except the
//! real-axis counting scan.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;
use crate::spectral::Eigenvector;

/// Terms below this magnitude are treated as exactly zero.
const TINY: f64 = 1e-300;
pub const FIT_MAX_CONDITION: f64 = 1e12;
pub const REALIZABLE_TOL: f64 = 1e-6;
/// Relative half-width of the neighbourhood excluded around band edges in
/// the counting scan.
pub const EDGE_EXCLUSION: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuasimomentumPair {
    pub k: Complex64,
    pub k_prime: Complex64,
    pub energy: Complex64,
}

impl QuasimomentumPair {
    /// Largest defect in `-2 t0 cos k = E = -2 t_b cos k'`.
    pub fn dispersion_defect(&self, t0: f64, tb: f64) -> f64 {
        let a = (-2.0 * t0 * self.k.cos() - self.energy).norm();
        let b = (-2.0 * tb * self.k_prime.cos() - self.energy).norm();
        a.max(b)
    }
}

/// Quasimomenta on the principal branch of `arccos` (real part in `[0, π]`).
pub fn quasimomenta_from_energy(energy: Complex64, t0: f64, tb: f64) -> QuasimomentumPair {
    QuasimomentumPair {
        k: (-energy / (2.0 * t0)).acos(),
        k_prime: (-energy / (2.0 * tb)).acos(),
        energy,
    }
}

fn require_two_segment(spec: &LatticeSpec) -> Result<(f64, f64)> {
    spec.two_segment()
        .ok_or_else(|| Error::InvalidArgument("the secular function is defined for two-segment profiles only".into()))
}

/// The three additive terms of the secular function `M(k, k')`.
fn secular_terms(spec: &LatticeSpec, energy: Complex64) -> Result<SecularTerms> {
    let (t0, tb) = require_two_segment(spec)?;
    let q = quasimomenta_from_energy(energy, t0, tb);
    let (k, kp) = (q.k, q.k_prime);
    let n = spec.n_sites() as f64;
    let m = spec.impurity_site() as f64;
    let gamma = spec.gamma() / t0;
    let t = tb / t0;

    let s_m = (k * m).sin();
    let s_m1 = (k * (m + 1.0)).sin();
    let d = n + 1.0 - 2.0 * m;
    let first = (s_m1 * s_m1 + s_m * s_m * (gamma * gamma)) * (kp * d).sin();
    let second = s_m * s_m * (t * t) * (kp * (d - 2.0)).sin();
    let third = -s_m * s_m1 * (kp * (d - 1.0)).sin() * (2.0 * t);

    // Same terms with every sine of k' replaced by its modulus bound.
    let bound = |x: f64| if x == 0.0 { 0.0 } else { (kp.im * x).cosh() };
    let natural = (s_m1.norm_sqr() + s_m.norm_sqr() * gamma * gamma) * bound(d)
        + s_m.norm_sqr() * t * t * bound(d - 2.0)
        + 2.0 * t * s_m.norm() * s_m1.norm() * bound(d - 1.0);
    Ok(SecularTerms { terms: [first, second, third], natural_scale: natural })
}

struct SecularTerms {
    terms: [Complex64; 3],
    natural_scale: f64,
}

/// Terms whose magnitudes sum to less than this multiple of ε times their
/// natural scale are all rounding noise.
const STRUCTURAL_ZERO: f64 = 1e3 * f64::EPSILON;

fn normalized(terms: &[Complex64], natural_scale: f64) -> Result<f64> {
    let scale: f64 = terms.iter().map(|t| t.norm()).sum();
    let value = terms.iter().sum::<Complex64>().norm();
    if scale.max(natural_scale) < TINY {
        return Err(Error::DegenerateNormalization);
    }
    // Every term vanishes at once (a node of the eigenfunction on the
    // impurity together with a node of the inner wave): measure against
    // the natural scale instead.
    if scale <= STRUCTURAL_ZERO * natural_scale {
        return Ok(value / natural_scale);
    }
    Ok(value / scale)
}

/// Value of the secular function `M(k(E), k'(E))`.
pub fn secular_function(spec: &LatticeSpec, energy: Complex64) -> Result<Complex64> {
    Ok(secular_terms(spec, energy)?.terms.iter().sum())
}

/// `|M|` divided by the sum of the magnitudes of its three terms.
///
/// Where all three terms vanish together the sum is pure rounding noise;
/// there the divisor is the sum of the term magnitudes with each `sin(k'x)`
/// replaced by its bound `cosh(x Im k')`.
pub fn secular_residual(spec: &LatticeSpec, energy: Complex64) -> Result<f64> {
    let t = secular_terms(spec, energy)?;
    normalized(&t.terms, t.natural_scale)
}

/// Residual of the adjacent-impurity reduction
/// `t0² sin²[k(N/2+1)] = (t_b² - γ²) sin²(kN/2)`.
///
/// The right-hand side is kept as two separate terms so the normalization
/// matches [`secular_residual`] term by term.
pub fn nn_secular_residual(spec: &LatticeSpec, energy: Complex64) -> Result<f64> {
    let (t0, tb) = require_two_segment(spec)?;
    let n = spec.n_sites();
    if n % 2 != 0 || spec.impurity_site() != n / 2 {
        return Err(Error::InvalidArgument(format!(
            "the reduced secular equation needs even N and m = N/2, got N = {n}, m = {}",
            spec.impurity_site()
        )));
    }
    let k = quasimomenta_from_energy(energy, t0, tb).k;
    let half = (n / 2) as f64;
    let outer = (k * (half + 1.0)).sin();
    let inner = (k * half).sin();
    let g = spec.gamma();
    let terms = [outer * outer * (t0 * t0), inner * inner * (g * g), -inner * inner * (tb * tb)];
    let natural = terms.iter().map(|t| t.norm()).sum();
    normalized(&terms, natural)
}

/// Number of real roots of the secular function found by scanning a uniform
/// grid over `[-E_scale, E_scale]`.
///
/// On the real axis `M` is purely real or purely imaginary depending on
/// which quasimomenta are real, so `Re M + Im M` carries its sign. The grid
/// is split at the band edges `±2 t0`, `±2 t_b`, where `M` changes phase;
/// points within [`EDGE_EXCLUSION`] of an edge are dropped. Each sign change
/// counts one root. A local minimum of `|M|` between two samples of equal
/// sign is refined by golden-section search, and counts two roots if `M`
/// changes sign there (a close pair inside one grid cell).
pub fn count_real_secular_roots(spec: &LatticeSpec, n_points: usize) -> Result<usize> {
    let (t0, tb) = require_two_segment(spec)?;
    let scale = spec.energy_scale();
    let mut edges = [-2.0 * t0, 2.0 * t0, -2.0 * tb, 2.0 * tb];
    edges.sort_by(f64::total_cmp);
    let segment = |e: f64| edges.iter().filter(|&&x| x < e).count();
    let near_edge = |e: f64| edges.iter().any(|&x| (e - x).abs() <= EDGE_EXCLUSION * scale);
    let signed = |e: f64| -> Result<f64> {
        let m = secular_function(spec, Complex64::new(e, 0.0))?;
        Ok(m.re + m.im)
    };

    // Runs of samples within one segment.
    let mut runs: Vec<Vec<(f64, f64)>> = Vec::new();
    let mut current_seg = usize::MAX;
    for j in 0..n_points {
        let e = -scale + 2.0 * scale * j as f64 / (n_points - 1) as f64;
        if near_edge(e) {
            current_seg = usize::MAX;
            continue;
        }
        let seg = segment(e);
        if seg != current_seg {
            runs.push(Vec::new());
            current_seg = seg;
        }
        runs.last_mut().expect("pushed above").push((e, signed(e)?));
    }

    let mut count = 0;
    for run in &runs {
        let nonzero: Vec<(f64, f64)> = run.iter().copied().filter(|(_, v)| *v != 0.0).collect();
        count += run.len() - nonzero.len();
        for w in nonzero.windows(2) {
            if w[0].1 * w[1].1 < 0.0 {
                count += 1;
            }
        }
        for w in nonzero.windows(3) {
            let (a, b, c) = (w[0], w[1], w[2]);
            let same_sign = a.1 * b.1 > 0.0 && b.1 * c.1 > 0.0;
            if same_sign && b.1.abs() < a.1.abs() && b.1.abs() <= c.1.abs() {
                let sign = b.1.signum();
                let (_, extreme) = golden_minimum(|e| Ok(sign * signed(e)?), a.0, c.0)?;
                if extreme < 0.0 {
                    count += 2;
                }
            }
        }
    }
    Ok(count)
}

/// Minimum of `f` on `[lo, hi]`, assuming a single interior minimum.
fn golden_minimum<F>(f: F, mut lo: f64, mut hi: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    for _ in 0..80 {
        if f1.min(f2) < 0.0 {
            break;
        }
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2)?;
        }
        if hi - lo <= f64::EPSILON * lo.abs().max(hi.abs()) {
            break;
        }
    }
    Ok(if f1 < f2 { (x1, f1) } else { (x2, f2) })
}

/// Coefficients of the piecewise plane-wave form
/// `A sin(kn) | P sin(k'n) + Q cos(k'n) | B sin(k n̄)`, `n̄ = N + 1 - n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnsatzCoefficients {
    pub a_left: Complex64,
    pub b_right: Complex64,
    pub p_mid: Complex64,
    pub q_mid: Complex64,
    /// Root-mean-square mismatch relative to the largest amplitude.
    pub fit_residual: f64,
}

/// Least squares for `y ≈ X c` with one or two columns; returns the
/// coefficients and the 2-norm condition number of `X`.
fn least_squares(columns: &[Vec<Complex64>], y: &[Complex64]) -> (Vec<Complex64>, f64) {
    let dot = |a: &[Complex64], b: &[Complex64]| -> Complex64 { a.iter().zip(b).map(|(x, y)| x.conj() * y).sum() };
    match columns {
        [x] => {
            let g = dot(x, x).re;
            if g < TINY {
                return (vec![Complex64::new(0.0, 0.0)], f64::INFINITY);
            }
            (vec![dot(x, y) / g], 1.0)
        }
        [x1, x2] => {
            let g11 = dot(x1, x1).re;
            let g22 = dot(x2, x2).re;
            let g12 = dot(x1, x2);
            let b1 = dot(x1, y);
            let b2 = dot(x2, y);
            let det = g11 * g22 - g12.norm_sqr();
            // Eigenvalues of the Hermitian Gram matrix.
            let mean = 0.5 * (g11 + g22);
            let spread = (0.25 * (g11 - g22).powi(2) + g12.norm_sqr()).sqrt();
            let (hi, lo) = (mean + spread, (mean - spread).max(det / (mean + spread)));
            let cond = if lo > 0.0 { (hi / lo).sqrt() } else { f64::INFINITY };
            if det.abs() < TINY {
                return (vec![Complex64::new(0.0, 0.0); 2], f64::INFINITY);
            }
            let c1 = (b1 * g22 - g12 * b2) / det;
            let c2 = (b2 * g11 - g12.conj() * b1) / det;
            (vec![c1, c2], cond)
        }
        _ => unreachable!("one or two columns"),
    }
}

/// Fits the piecewise plane-wave form to a computed eigenvector.
///
/// The outer forms are fitted on sites `1..=m` and `m̄..=N`; the inner form
/// on `m..=m̄`, which always has at least two sites.
pub fn fit_ansatz(spec: &LatticeSpec, ev: &Eigenvector) -> Result<AnsatzCoefficients> {
    let (t0, tb) = require_two_segment(spec)?;
    let n = spec.n_sites();
    if ev.amplitudes.len() != n {
        return Err(Error::InvalidArgument(format!("eigenvector has {} sites, lattice has {n}", ev.amplitudes.len())));
    }
    let q = quasimomenta_from_energy(ev.eigenvalue, t0, tb);
    let (k, kp) = (q.k, q.k_prime);
    let m = spec.impurity_site();
    let mbar = spec.mirror_site();
    let psi = &ev.amplitudes;
    let site = |i: usize| i as f64;

    let left: Vec<usize> = (1..=m).collect();
    let mid: Vec<usize> = (m..=mbar).collect();
    let right: Vec<usize> = (mbar..=n).collect();

    let col = |sites: &[usize], f: &dyn Fn(usize) -> Complex64| -> Vec<Complex64> { sites.iter().map(|&i| f(i)).collect() };
    let obs = |sites: &[usize]| -> Vec<Complex64> { sites.iter().map(|&i| psi[i - 1]).collect() };

    let left_col = col(&left, &|i| (k * site(i)).sin());
    let (a, cond_a) = least_squares(std::slice::from_ref(&left_col), &obs(&left));
    let right_col = col(&right, &|i| (k * site(n + 1 - i)).sin());
    let (b, cond_b) = least_squares(std::slice::from_ref(&right_col), &obs(&right));
    let mid_cols = [col(&mid, &|i| (kp * site(i)).sin()), col(&mid, &|i| (kp * site(i)).cos())];
    let (pq, cond_pq) = least_squares(&mid_cols, &obs(&mid));

    let cond = cond_a.max(cond_b).max(cond_pq);
    if !(cond <= FIT_MAX_CONDITION) {
        return Err(Error::IllConditionedFit(cond));
    }

    let (a, b, p, qm) = (a[0], b[0], pq[0], pq[1]);
    let mut sq = 0.0;
    let mut rows = 0usize;
    for (sites, model) in [
        (&left, Box::new(|i: usize| a * (k * site(i)).sin()) as Box<dyn Fn(usize) -> Complex64>),
        (&mid, Box::new(|i: usize| p * (kp * site(i)).sin() + qm * (kp * site(i)).cos())),
        (&right, Box::new(|i: usize| b * (k * site(n + 1 - i)).sin())),
    ] {
        for &i in sites.iter() {
            sq += (model(i) - psi[i - 1]).norm_sqr();
            rows += 1;
        }
    }
    let peak = psi.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let fit_residual = (sq / rows as f64).sqrt() / peak;
    Ok(AnsatzCoefficients { a_left: a, b_right: b, p_mid: p, q_mid: qm, fit_residual })
}

/// Two-by-two determinant condition for a real eigenvalue with impurities
/// on the central sites, evaluated on the eigenvector's central amplitudes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Eq5Decomposition {
    pub epsilon: f64,
    /// `φ(N/2)` after the global phase that makes the left half real.
    pub alpha_mid: Complex64,
    /// `φ(N/2 - 1)`; zero for `N = 2`.
    pub beta_mid: Complex64,
    /// Phase relating the two halves, `φ(N/2 + 1) = e^{iχ} α`.
    pub chi: f64,
    pub det_residual: f64,
    /// Largest of `||φ(N/2+1)| - |α||` and `||φ(N/2+2)| - |β||`, relative
    /// to the largest amplitude.
    pub modulus_mismatch: f64,
}

pub fn eq5_residual(spec: &LatticeSpec, epsilon: f64, ev: &Eigenvector) -> Result<Eq5Decomposition> {
    let n = spec.n_sites();
    let half = n / 2;
    if n % 2 != 0 || spec.impurity_site() != half {
        return Err(Error::InvalidArgument(format!(
            "the determinant condition needs even N and m = N/2, got N = {n}, m = {}",
            spec.impurity_site()
        )));
    }
    if ev.amplitudes.len() != n {
        return Err(Error::InvalidArgument(format!("eigenvector has {} sites, lattice has {n}", ev.amplitudes.len())));
    }

    // Rotate so the largest left-half amplitude is real and positive.
    let left = &ev.amplitudes[..half];
    let pivot = left.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap();
    let peak = ev.amplitudes.iter().map(|x| x.norm()).fold(0.0, f64::max);
    if pivot.norm() <= TINY {
        return Err(Error::NotRealizable("left half of the eigenvector vanishes".into()));
    }
    let rotation = pivot.conj() / pivot.norm();
    let phi: Vec<Complex64> = ev.amplitudes.iter().map(|&x| x * rotation).collect();
    let worst_imag = phi[..half].iter().map(|x| x.im.abs()).fold(0.0, f64::max) / peak;
    if worst_imag > REALIZABLE_TOL {
        return Err(Error::NotRealizable(format!(
            "left-half imaginary parts reach {worst_imag:.3e} of the peak after the best global phase"
        )));
    }

    let alpha = Complex64::new(phi[half - 1].re, 0.0);
    let beta = if half >= 2 { Complex64::new(phi[half - 2].re, 0.0) } else { Complex64::new(0.0, 0.0) };
    let chi = if alpha.norm() > REALIZABLE_TOL * peak {
        (phi[half] / alpha).arg()
    } else {
        // φ(N+1-n) = e^{iχ} φ(n) on the left half.
        (0..half).map(|i| phi[n - 1 - i] * phi[i]).sum::<Complex64>().arg()
    };

    let t = spec.hopping();
    let t_mid = t[half - 1];
    let t_side = if half >= 2 { t[half - 2] } else { 0.0 };
    let gamma = spec.gamma();
    let i = Complex64::new(0.0, 1.0);
    let x_minus = beta * t_side + alpha * (epsilon - i * gamma);
    let x_plus = beta * t_side + alpha * (epsilon + i * gamma);
    let coupling = alpha * t_mid;
    let det = x_minus * x_plus - coupling * coupling;
    let norm = x_minus.norm() * x_plus.norm() + coupling.norm_sqr();
    let det_residual = if norm < TINY { 0.0 } else { det.norm() / norm };

    let mut modulus_mismatch = (phi[half].norm() - alpha.norm()).abs();
    if half >= 2 {
        modulus_mismatch = modulus_mismatch.max((phi[half + 1].norm() - beta.norm()).abs());
    }
    Ok(Eq5Decomposition {
        epsilon,
        alpha_mid: alpha,
        beta_mid: beta,
        chi,
        det_residual,
        modulus_mismatch: modulus_mismatch / peak,
    })
}
