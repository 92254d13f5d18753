//! Brute-force spectrum for small lattices.
//!
//! Expands the characteristic polynomial into coefficients with
//! double-double accumulation, then extracts roots one at a time by Newton
//! iteration with deflation and polishes them against the undeflated
//! polynomial. Shares nothing with the Aberth path except the final
//! classification; it exists to check that path.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::{assemble_spectrum, Spectrum};
use crate::error::{Error, Result};
use crate::lattice::TridiagonalHamiltonian;

pub const ORACLE_MAX_SITES: usize = 12;

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
struct Dd {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    fn new(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    fn renorm(hi: f64, lo: f64) -> Self {
        let (hi, lo) = two_sum(hi, lo);
        Dd { hi, lo }
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = {
            let (s2, e2) = two_sum(s, e + t);
            (s2, e2 + f)
        };
        Dd::renorm(s, e)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, o: Dd) -> Dd {
        self + (-o)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        Dd::renorm(p, e + (self.hi * o.lo + self.lo * o.hi))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
struct CDd {
    re: Dd,
    im: Dd,
}

impl CDd {
    fn from_c64(z: Complex64) -> Self {
        CDd { re: Dd::new(z.re), im: Dd::new(z.im) }
    }

    fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    fn scale(self, x: Dd) -> Self {
        CDd { re: self.re * x, im: self.im * x }
    }
}

impl Add for CDd {
    type Output = CDd;
    fn add(self, o: CDd) -> CDd {
        CDd { re: self.re + o.re, im: self.im + o.im }
    }
}

impl Sub for CDd {
    type Output = CDd;
    fn sub(self, o: CDd) -> CDd {
        CDd { re: self.re - o.re, im: self.im - o.im }
    }
}

impl Mul for CDd {
    type Output = CDd;
    fn mul(self, o: CDd) -> CDd {
        CDd { re: self.re * o.re - self.im * o.im, im: self.re * o.im + self.im * o.re }
    }
}

/// Coefficients `c[k]` of `det(H/s - wI) = Σ c[k] w^k` where `s` is the
/// energy scale.
fn normalized_coefficients(h: &TridiagonalHamiltonian, s: f64) -> Vec<CDd> {
    let inv = Dd::new(1.0 / s);
    let diag: Vec<CDd> = h.diagonal().iter().map(|&d| CDd::from_c64(d).scale(inv)).collect();
    let t2: Vec<Dd> = h
        .off_diagonal()
        .iter()
        .map(|&t| {
            let x = Dd::new(t) * inv;
            x * x
        })
        .collect();
    let one = CDd::from_c64(Complex64::new(1.0, 0.0));

    let mut prev = vec![one];
    let mut cur = vec![diag[0], CDd::default() - one];
    for n in 1..diag.len() {
        let mut next = vec![CDd::default(); n + 2];
        for (k, &c) in cur.iter().enumerate() {
            next[k] = next[k] + diag[n] * c;
            next[k + 1] = next[k + 1] - c;
        }
        for (k, &c) in prev.iter().enumerate() {
            next[k] = next[k] - c.scale(t2[n - 1]);
        }
        prev = cur;
        cur = next;
    }
    cur
}

fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

fn horner_dd(coeffs: &[CDd], z: Complex64) -> (Complex64, Complex64) {
    let z = CDd::from_c64(z);
    let mut p = CDd::default();
    let mut dp = CDd::default();
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p.to_c64(), dp.to_c64())
}

fn newton(coeffs: &[Complex64], start: Complex64) -> Option<Complex64> {
    let mut z = start;
    for _ in 0..200 {
        let (p, dp) = horner(coeffs, z);
        if p == Complex64::new(0.0, 0.0) {
            return Some(z);
        }
        if dp == Complex64::new(0.0, 0.0) {
            return None;
        }
        let step = p / dp;
        // Damp wild steps; the roots of the normalized polynomial lie in |w| <= 1.
        let step = if step.norm() > 1.0 { step / step.norm() } else { step };
        z -= step;
        if step.norm() <= 1e-15 * z.norm().max(1e-3) {
            return Some(z);
        }
    }
    let (p, dp) = horner(coeffs, z);
    (dp.norm() > 0.0 && (p / dp).norm() < 1e-10).then_some(z)
}

/// Divides by `(w - root)`, dropping the remainder.
fn deflate(coeffs: &[Complex64], root: Complex64) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    let mut carry = coeffs[n];
    for k in (0..n).rev() {
        out[k] = carry;
        carry = coeffs[k] + carry * root;
    }
    out
}

/// Independent spectrum for `N <= 12`, for use as a test oracle.
pub fn brute_force_spectrum(h: &TridiagonalHamiltonian) -> Result<Spectrum> {
    let n = h.dim();
    if n > ORACLE_MAX_SITES {
        return Err(Error::OracleTooLarge(n));
    }
    let s = h.energy_scale();
    let exact = normalized_coefficients(h, s);
    let mut work: Vec<Complex64> = exact.iter().map(|c| c.to_c64()).collect();

    let starts: Vec<Complex64> =
        (0..16).map(|k| Complex64::from_polar(0.5 + 0.03 * k as f64, 0.7 + 2.4 * k as f64)).collect();
    let mut roots = Vec::with_capacity(n);
    while work.len() > 1 {
        let root = if work.len() == 2 {
            -work[0] / work[1]
        } else {
            starts
                .iter()
                .find_map(|&z0| newton(&work, z0))
                .ok_or(Error::ConvergenceFailure { sweeps: 200, indices: vec![roots.len()], residuals: vec![] })?
        };
        roots.push(root);
        work = deflate(&work, root);
    }

    // Polish against the undeflated polynomial without letting a root
    // wander onto a neighbour.
    let polished: Vec<Complex64> = (0..roots.len())
        .map(|i| {
            let nearest = roots
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, r)| (r - roots[i]).norm())
                .fold(f64::INFINITY, f64::min);
            let mut z = roots[i];
            for _ in 0..4 {
                let (p, dp) = horner_dd(&exact, z);
                if dp == Complex64::new(0.0, 0.0) {
                    break;
                }
                let step = p / dp;
                if !step.is_finite() || (z - step - roots[i]).norm() > 0.25 * nearest {
                    break;
                }
                z -= step;
            }
            z * s
        })
        .collect();

    Ok(assemble_spectrum(h, polished))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_hamiltonian, HoppingProfile, LatticeSpec};

    #[test]
    fn double_double_keeps_low_bits() {
        let a = Dd::new(1.0) + Dd::new(1e-20);
        assert_eq!(a.hi, 1.0);
        assert_eq!(a.lo, 1e-20);
        // 3 · fl(1/3) is exactly representable as a double-double.
        let prod = Dd::new(1.0 / 3.0) * Dd::new(3.0);
        assert_eq!((prod - Dd::new(1.0)).to_f64(), 3.0f64.mul_add(1.0 / 3.0, -1.0));
    }

    #[test]
    fn coefficients_of_two_site_lattice() {
        // det(H - z) = z^2 + γ^2 - t^2 with γ = 0.6, t = 1; scale s = 2.6.
        let h = build_hamiltonian(&LatticeSpec::new(2, 1, 0.6, HoppingProfile::uniform(1.0).unwrap()).unwrap());
        let c: Vec<Complex64> = normalized_coefficients(&h, 2.6).iter().map(|c| c.to_c64()).collect();
        assert!((c[0].re - (0.36 - 1.0) / 6.76).abs() < 1e-16);
        assert!(c[0].im.abs() < 1e-16 && c[1].norm() < 1e-16);
        assert_eq!(c[2], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn analytic_two_site_family() {
        for (gamma, tb) in [(0.6, 1.0), (0.0, 2.0), (1.25, 1.0), (0.3, 0.5)] {
            let h = build_hamiltonian(&LatticeSpec::new(2, 1, gamma, HoppingProfile::two_segment(1.0, tb).unwrap()).unwrap());
            let s = brute_force_spectrum(&h).unwrap();
            let e = num_complex::Complex64::new(tb * tb - gamma * gamma, 0.0).sqrt();
            let mut expected = [-e, e];
            expected.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
            for (a, b) in s.eigenvalues.iter().zip(expected) {
                assert!((a - b).norm() < 1e-10, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn hermitian_inputs_give_real_roots() {
        let h = build_hamiltonian(&LatticeSpec::new(9, 3, 0.0, HoppingProfile::two_segment(1.0, 0.4).unwrap()).unwrap());
        let s = brute_force_spectrum(&h).unwrap();
        assert_eq!(s.n_complex, 0);
        assert!(s.eigenvalues.iter().all(|e| e.im.abs() < 1e-10));
    }

    #[test]
    fn rejects_large_lattices() {
        let h = build_hamiltonian(&LatticeSpec::new(13, 3, 0.0, HoppingProfile::uniform(1.0).unwrap()).unwrap());
        assert!(matches!(brute_force_spectrum(&h), Err(Error::OracleTooLarge(13))));
    }
}
