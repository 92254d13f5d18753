//! Lattice specifications, hopping profiles and the tridiagonal Hamiltonian.
//!
//! Sites and bonds are numbered from 1 in the physics convention; bond `i`
//! joins sites `i` and `i + 1`. Internally every sequence is a zero-based
//! `Vec`, so bond `i` lives at index `i - 1`.

use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral;

/// Relative tolerance for the parity check of computed custom profiles.
pub const PROFILE_SYMMETRY_RTOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum HoppingProfile {
    /// `t_b` on the bonds between the impurities, `t0` elsewhere.
    TwoSegment { t0: f64, tb: f64 },
    /// `t(k) = t0 [k (N - k)]^(alpha / 2)`.
    Alpha { t0: f64, alpha: f64 },
    /// Explicit bond amplitudes `t(1..N-1)`, parity-symmetric.
    Custom(Vec<f64>),
}

fn check_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidProfile(format!("{name} must be a positive finite number, got {value}")))
    }
}

impl HoppingProfile {
    pub fn two_segment(t0: f64, tb: f64) -> Result<Self> {
        check_positive("t0", t0)?;
        check_positive("tb", tb)?;
        Ok(Self::TwoSegment { t0, tb })
    }

    pub fn uniform(t0: f64) -> Result<Self> {
        Self::two_segment(t0, t0)
    }

    pub fn alpha(t0: f64, alpha: f64) -> Result<Self> {
        check_positive("t0", t0)?;
        if !alpha.is_finite() {
            return Err(Error::InvalidProfile(format!("alpha must be finite, got {alpha}")));
        }
        Ok(Self::Alpha { t0, alpha })
    }

    /// Custom amplitudes, required to satisfy `t(k) = t(N - k)` exactly.
    pub fn custom(amplitudes: Vec<f64>) -> Result<Self> {
        Self::custom_with_tolerance(amplitudes, 0.0)
    }

    /// Custom amplitudes produced by a computation, with parity checked to
    /// [`PROFILE_SYMMETRY_RTOL`].
    pub fn custom_approx(amplitudes: Vec<f64>) -> Result<Self> {
        Self::custom_with_tolerance(amplitudes, PROFILE_SYMMETRY_RTOL)
    }

    fn custom_with_tolerance(amplitudes: Vec<f64>, rtol: f64) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidProfile("custom profile needs at least one bond".into()));
        }
        for (i, &t) in amplitudes.iter().enumerate() {
            check_positive(&format!("t({})", i + 1), t)?;
        }
        let n_bonds = amplitudes.len();
        for i in 0..n_bonds / 2 {
            let (a, b) = (amplitudes[i], amplitudes[n_bonds - 1 - i]);
            if (a - b).abs() > rtol * a.abs().max(b.abs()) {
                return Err(Error::InvalidProfile(format!(
                    "custom profile is not parity-symmetric: t({}) = {a} but t({}) = {b}",
                    i + 1,
                    n_bonds - i
                )));
            }
        }
        Ok(Self::Custom(amplitudes))
    }

    /// Reads a custom profile: one positive decimal per line, blank lines
    /// and `#` comments ignored.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut amplitudes = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let value: f64 = line.parse().map_err(|_| {
                Error::InvalidProfile(format!("line {}: {line:?} is not a decimal number", lineno + 1))
            })?;
            amplitudes.push(value);
        }
        Self::custom(amplitudes)
    }

    /// Bond amplitudes `t(1..N-1)` for a lattice with impurity at `m`.
    ///
    /// Only the two-segment profile depends on `m`.
    pub fn amplitudes(&self, n_sites: usize, impurity_site: usize) -> Result<Vec<f64>> {
        match self {
            Self::TwoSegment { t0, tb } => {
                let mirror = n_sites + 1 - impurity_site;
                Ok((1..n_sites)
                    .map(|i| if impurity_site <= i && i < mirror { *tb } else { *t0 })
                    .collect())
            }
            Self::Alpha { t0, alpha } => Ok((1..n_sites)
                .map(|k| t0 * ((k * (n_sites - k)) as f64).powf(alpha / 2.0))
                .collect()),
            Self::Custom(t) => {
                if t.len() + 1 != n_sites {
                    return Err(Error::InvalidProfile(format!(
                        "custom profile has {} bonds but the lattice has {} sites",
                        t.len(),
                        n_sites
                    )));
                }
                Ok(t.clone())
            }
        }
    }

    /// The outer hopping `t0`, if the profile has one.
    pub fn t0(&self) -> Option<f64> {
        match self {
            Self::TwoSegment { t0, .. } | Self::Alpha { t0, .. } => Some(*t0),
            Self::Custom(_) => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::TwoSegment { .. } => "two-segment",
            Self::Alpha { .. } => "alpha",
            Self::Custom(_) => "custom",
        }
    }

    /// Same profile with every energy multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        match self {
            Self::TwoSegment { t0, tb } => Self::two_segment(t0 * factor, tb * factor),
            Self::Alpha { t0, alpha } => Self::alpha(t0 * factor, *alpha),
            Self::Custom(t) => Self::custom(t.iter().map(|x| x * factor).collect()),
        }
    }
}

/// Full parameter set of the lattice: size, impurity position and strength,
/// and hopping profile. Validated on construction and immutable afterwards.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeSpec {
    n_sites: usize,
    impurity_site: usize,
    gamma: f64,
    profile: HoppingProfile,
    hopping: Vec<f64>,
}

impl LatticeSpec {
    pub fn new(n_sites: usize, impurity_site: usize, gamma: f64, profile: HoppingProfile) -> Result<Self> {
        if n_sites < 2 {
            return Err(Error::InvalidLattice(format!("need N >= 2 sites, got {n_sites}")));
        }
        if impurity_site < 1 || impurity_site > n_sites / 2 {
            return Err(Error::InvalidLattice(format!(
                "impurity site m = {impurity_site} must satisfy 1 <= m <= N/2 = {}",
                n_sites / 2
            )));
        }
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::InvalidLattice(format!("gamma must be finite and >= 0, got {gamma}")));
        }
        let hopping = profile.amplitudes(n_sites, impurity_site)?;
        Ok(Self { n_sites, impurity_site, gamma, profile, hopping })
    }

    /// Builds the spec from the inter-impurity distance `d = N + 1 - 2m`.
    pub fn with_distance(n_sites: usize, distance: usize, gamma: f64, profile: HoppingProfile) -> Result<Self> {
        if distance == 0 || distance > n_sites.saturating_sub(1) || (n_sites + 1 - distance) % 2 != 0 {
            return Err(Error::InvalidLattice(format!(
                "distance d = {distance} is incompatible with N = {n_sites} (need 1 <= d < N and N + 1 - d even)"
            )));
        }
        Self::new(n_sites, (n_sites + 1 - distance) / 2, gamma, profile)
    }

    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        Self::new(self.n_sites, self.impurity_site, gamma, self.profile.clone())
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn impurity_site(&self) -> usize {
        self.impurity_site
    }

    pub fn mirror_site(&self) -> usize {
        self.n_sites + 1 - self.impurity_site
    }

    /// Inter-impurity distance `d = N + 1 - 2m`.
    pub fn distance(&self) -> usize {
        self.n_sites + 1 - 2 * self.impurity_site
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn profile(&self) -> &HoppingProfile {
        &self.profile
    }

    /// Bond amplitudes `t(1..N-1)`, all positive.
    pub fn hopping(&self) -> &[f64] {
        &self.hopping
    }

    pub fn max_hopping(&self) -> f64 {
        self.hopping.iter().copied().fold(0.0, f64::max)
    }

    /// Amplitude `t(N/2)` of the central bond, for even `N`.
    pub fn central_hopping(&self) -> Option<f64> {
        (self.n_sites % 2 == 0).then(|| self.hopping[self.n_sites / 2 - 1])
    }

    /// Energy scale `2 max t + γ`, a Gershgorin bound on the spectrum.
    pub fn energy_scale(&self) -> f64 {
        2.0 * self.max_hopping() + self.gamma
    }

    /// `(t0, tb)` for a two-segment profile.
    pub fn two_segment(&self) -> Option<(f64, f64)> {
        match self.profile {
            HoppingProfile::TwoSegment { t0, tb } => Some((t0, tb)),
            _ => None,
        }
    }

    /// Dimensionless impurity strength `Γ = γ / t0`.
    pub fn gamma_ratio(&self) -> Option<f64> {
        self.profile.t0().map(|t0| self.gamma / t0)
    }

    /// Dimensionless inner hopping `T_b = t_b / t0`.
    pub fn tb_ratio(&self) -> Option<f64> {
        self.two_segment().map(|(t0, tb)| tb / t0)
    }
}

/// Complex-symmetric tridiagonal matrix stored as its diagonal and the
/// common off-diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct TridiagonalHamiltonian {
    diagonal: Vec<Complex64>,
    off_diagonal: Vec<f64>,
}

impl TridiagonalHamiltonian {
    pub fn new(diagonal: Vec<Complex64>, off_diagonal: Vec<f64>) -> Result<Self> {
        if diagonal.is_empty() || off_diagonal.len() + 1 != diagonal.len() {
            return Err(Error::InvalidArgument(format!(
                "tridiagonal matrix needs N >= 1 diagonal and N - 1 off-diagonal entries, got {} and {}",
                diagonal.len(),
                off_diagonal.len()
            )));
        }
        Ok(Self { diagonal, off_diagonal })
    }

    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    pub fn diagonal(&self) -> &[Complex64] {
        &self.diagonal
    }

    pub fn off_diagonal(&self) -> &[f64] {
        &self.off_diagonal
    }

    /// `2 max |off| + max |Im diag| + max |Re diag|`; bounds every eigenvalue.
    pub fn energy_scale(&self) -> f64 {
        let hop = self.off_diagonal.iter().fold(0.0_f64, |a, t| a.max(t.abs()));
        let (re, im) = self
            .diagonal
            .iter()
            .fold((0.0_f64, 0.0_f64), |(r, i), d| (r.max(d.re.abs()), i.max(d.im.abs())));
        (2.0 * hop + re + im).max(f64::MIN_POSITIVE)
    }

    pub fn is_hermitian(&self) -> bool {
        self.diagonal.iter().all(|d| d.im == 0.0)
    }

    pub fn is_pt_symmetric(&self) -> bool {
        pt_transform_hamiltonian(self) == *self
    }
}

/// Matrix of the lattice in the site basis: `+iγ` at `m`, `-iγ` at the
/// mirror site, `-t(i)` on the off-diagonal.
pub fn build_hamiltonian(spec: &LatticeSpec) -> TridiagonalHamiltonian {
    let n = spec.n_sites();
    let mut diagonal = vec![Complex64::new(0.0, 0.0); n];
    diagonal[spec.impurity_site() - 1] = Complex64::new(0.0, spec.gamma());
    diagonal[spec.mirror_site() - 1] = Complex64::new(0.0, -spec.gamma());
    let off_diagonal = spec.hopping().iter().map(|t| -t).collect();
    TridiagonalHamiltonian { diagonal, off_diagonal }
}

/// Parity: `out(n) = in(N + 1 - n)`.
pub fn apply_parity<T: Clone>(amplitudes: &[T]) -> Vec<T> {
    amplitudes.iter().rev().cloned().collect()
}

/// `PT H PT`: reversed and conjugated entries.
pub fn pt_transform_hamiltonian(h: &TridiagonalHamiltonian) -> TridiagonalHamiltonian {
    TridiagonalHamiltonian {
        diagonal: apply_parity(&h.diagonal).into_iter().map(|d| d.conj()).collect(),
        off_diagonal: apply_parity(&h.off_diagonal),
    }
}

/// Bandwidth `E_max - E_min` of the clean (`γ = 0`) lattice.
///
/// The two-segment profile depends on the impurity position, so this takes
/// the whole spec and ignores its `gamma`.
pub fn bandwidth(spec: &LatticeSpec) -> Result<f64> {
    let clean = spec.with_gamma(0.0)?;
    let spectrum = spectral::eigenvalues(&build_hamiltonian(&clean))?;
    let (lo, hi) = spectrum
        .eigenvalues
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), e| (lo.min(e.re), hi.max(e.re)));
    Ok(hi - lo)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn two_site_hamiltonian() {
        let spec = LatticeSpec::new(2, 1, 0.6, HoppingProfile::two_segment(1.0, 1.0).unwrap()).unwrap();
        let h = build_hamiltonian(&spec);
        assert_eq!(h.diagonal(), &[c(0.0, 0.6), c(0.0, -0.6)]);
        assert_eq!(h.off_diagonal(), &[-1.0]);
    }

    #[test]
    fn four_site_nearest_neighbour_impurities() {
        let spec = LatticeSpec::new(4, 2, 0.5, HoppingProfile::two_segment(1.0, 2.0).unwrap()).unwrap();
        let h = build_hamiltonian(&spec);
        assert_eq!(h.diagonal(), &[c(0.0, 0.0), c(0.0, 0.5), c(0.0, -0.5), c(0.0, 0.0)]);
        assert_eq!(h.off_diagonal(), &[-1.0, -2.0, -1.0]);
        assert_eq!(spec.distance(), 1);
    }

    #[test]
    fn clean_uniform_chain_is_hermitian() {
        let spec = LatticeSpec::new(5, 2, 0.0, HoppingProfile::uniform(1.0).unwrap()).unwrap();
        let h = build_hamiltonian(&spec);
        assert!(h.is_hermitian());
        assert!(h.diagonal().iter().all(|d| *d == c(0.0, 0.0)));
        assert_eq!(h.off_diagonal(), &[-1.0; 4]);
    }

    #[test]
    fn rejects_invalid_specs() {
        let p = HoppingProfile::uniform(1.0).unwrap();
        assert!(LatticeSpec::new(1, 1, 0.0, p.clone()).is_err());
        assert!(LatticeSpec::new(20, 0, 0.0, p.clone()).is_err());
        assert!(LatticeSpec::new(20, 11, 0.0, p.clone()).is_err());
        assert!(LatticeSpec::new(21, 11, 0.0, p.clone()).is_err());
        assert!(LatticeSpec::new(20, 10, -0.1, p).is_err());
        assert!(HoppingProfile::two_segment(0.0, 1.0).is_err());
        assert!(HoppingProfile::two_segment(1.0, -1.0).is_err());
        assert!(HoppingProfile::custom(vec![1.0, 2.0, 3.0]).is_err());
        assert!(HoppingProfile::custom(vec![1.0, -2.0, 1.0]).is_err());
        let custom = HoppingProfile::custom(vec![1.0, 2.0, 1.0]).unwrap();
        assert!(LatticeSpec::new(5, 2, 0.0, custom).is_err());
    }

    #[test]
    fn computed_profiles_get_relative_tolerance() {
        let t = vec![1.0, 2.0, 1.0 + 1e-14];
        assert!(HoppingProfile::custom(t.clone()).is_err());
        assert!(HoppingProfile::custom_approx(t).is_ok());
        assert!(HoppingProfile::custom_approx(vec![1.0, 2.0, 1.0 + 1e-9]).is_err());
    }

    #[test]
    fn alpha_profile_is_symmetric() {
        let spec = LatticeSpec::new(9, 4, 0.0, HoppingProfile::alpha(1.0, -0.7).unwrap()).unwrap();
        let t = spec.hopping();
        assert_eq!(t, apply_parity(t).as_slice());
        assert!((t[0] - 8f64.powf(-0.35)).abs() < 1e-15);
    }

    #[test]
    fn parity_reverses_and_is_an_involution() {
        assert_eq!(apply_parity(&[1, 2, 3]), vec![3, 2, 1]);
        assert_eq!(apply_parity(&["a", "b"]), vec!["b", "a"]);
        let v = [c(1.0, 2.0), c(-3.0, 0.5), c(0.0, 1.0)];
        assert_eq!(apply_parity(&apply_parity(&v)), v.to_vec());
    }

    #[test]
    fn pt_transform_of_toy_diagonal() {
        let h = TridiagonalHamiltonian::new(vec![c(0.0, 0.3), c(0.0, 0.0), c(0.0, -0.3)], vec![-1.0, -1.0])
            .unwrap();
        assert_eq!(pt_transform_hamiltonian(&h), h);
    }

    #[test]
    fn custom_profile_is_pt_invariant() {
        let profile = HoppingProfile::custom(vec![0.3, 1.7, 0.9, 1.7, 0.3]).unwrap();
        let spec = LatticeSpec::new(6, 2, 0.4, profile).unwrap();
        let h = build_hamiltonian(&spec);
        assert_eq!(pt_transform_hamiltonian(&h).off_diagonal(), h.off_diagonal());
        assert!(h.is_pt_symmetric());
    }

    #[test]
    fn two_segment_equal_hopping_matches_uniform_custom() {
        let a = LatticeSpec::new(7, 2, 0.3, HoppingProfile::two_segment(1.3, 1.3).unwrap()).unwrap();
        let b = LatticeSpec::new(7, 2, 0.3, HoppingProfile::custom(vec![1.3; 6]).unwrap()).unwrap();
        assert_eq!(build_hamiltonian(&a), build_hamiltonian(&b));
    }

    #[test]
    fn central_bond_carries_tb_for_adjacent_impurities() {
        let spec = LatticeSpec::new(20, 10, 0.0, HoppingProfile::two_segment(1.0, 0.3).unwrap()).unwrap();
        assert_eq!(spec.distance(), 1);
        assert_eq!(spec.central_hopping(), Some(0.3));
        let inner: Vec<usize> = (1..20).filter(|&i| spec.hopping()[i - 1] == 0.3).collect();
        assert_eq!(inner, vec![10]);
    }

    #[test]
    fn with_distance_recovers_impurity_site() {
        let p = HoppingProfile::uniform(1.0).unwrap();
        assert_eq!(LatticeSpec::with_distance(20, 7, 0.0, p.clone()).unwrap().impurity_site(), 7);
        assert_eq!(LatticeSpec::with_distance(21, 2, 0.0, p.clone()).unwrap().impurity_site(), 10);
        assert!(LatticeSpec::with_distance(20, 2, 0.0, p).is_err());
    }

    #[test]
    fn parses_profile_files() {
        let p = HoppingProfile::parse("# bonds\n0.5\n1.25\n\n0.5\n").unwrap();
        assert_eq!(p, HoppingProfile::Custom(vec![0.5, 1.25, 0.5]));
        assert!(HoppingProfile::parse("0.5\nabc\n0.5\n").is_err());
        assert!(HoppingProfile::parse("0.5\n1.0\n0.6\n").is_err());
    }

    #[test]
    fn uniform_bandwidth() {
        let spec = LatticeSpec::new(5, 1, 0.7, HoppingProfile::uniform(1.0).unwrap()).unwrap();
        let oracle = 2.0 * 2.0 * (std::f64::consts::PI / 6.0).cos();
        assert!((bandwidth(&spec).unwrap() - oracle).abs() < 1e-12);
        assert!((oracle - 2.0 * 3f64.sqrt()).abs() < 1e-14);

        let big = LatticeSpec::new(200, 100, 0.0, HoppingProfile::uniform(1.0).unwrap()).unwrap();
        let w = bandwidth(&big).unwrap();
        assert!(w < 4.0 && w > 3.99);
    }

    #[test]
    fn negative_alpha_bandwidth_shrinks() {
        let widths: Vec<f64> = [8, 16, 32, 64]
            .iter()
            .map(|&n| {
                let spec = LatticeSpec::new(n, n / 2, 0.0, HoppingProfile::alpha(1.0, -1.0).unwrap()).unwrap();
                bandwidth(&spec).unwrap()
            })
            .collect();
        assert!(widths.windows(2).all(|w| w[1] < w[0]), "{widths:?}");
    }
}
