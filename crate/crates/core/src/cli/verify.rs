//! Invariant suites behind `ptlattice verify`.

use std::fmt;

use clap::ValueEnum;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::lattice::{build_hamiltonian, pt_transform_hamiltonian, HoppingProfile, LatticeSpec};
use crate::phase::{
    default_gamma_max, find_gamma_c, random_symmetric_profile, random_symmetric_profiles, verify_maximal_breaking,
};
use crate::secular::{count_real_secular_roots, eq5_residual, secular_residual};
use crate::spectral::{brute_force_spectrum, eigenvalues, eigenvector, multiset_distance};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Oracle,
    Symmetry,
    Maximal,
    Secular,
    Eq5,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Oracle => "oracle",
            Suite::Symmetry => "symmetry",
            Suite::Maximal => "maximal",
            Suite::Secular => "secular",
            Suite::Eq5 => "eq5",
            Suite::All => "all",
        }
    }

    /// Suites that draw random specs and therefore need a seed.
    pub fn is_randomized(self) -> bool {
        !matches!(self, Suite::Secular)
    }
}

/// One verified property with its measured worst case.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl Check {
    fn new(suite: &'static str, name: &'static str, measured: f64, tolerance: f64, detail: String) -> Self {
        Check { suite, name, passed: measured <= tolerance, measured, tolerance, detail }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}/{}: measured {:.3e}, tolerance {:.1e} ({})",
            if self.passed { "PASS" } else { "FAIL" },
            self.suite,
            self.name,
            self.measured,
            self.tolerance,
            self.detail
        )
    }
}

pub const ORACLE_SPECS: usize = 200;
pub const ORACLE_MAX_N: usize = 8;
pub const ORACLE_RTOL: f64 = 1e-8;
pub const SYMMETRY_SPECS: usize = 100;
pub const SYMMETRY_RTOL: f64 = 1e-8;
pub const MAXIMAL_PROFILES: usize = 50;
pub const SECULAR_TOL: f64 = 1e-6;
pub const SCAN_POINTS: usize = 10_000;
pub const EQ5_PROFILES: usize = 10;
pub const EQ5_TOL: f64 = 1e-6;

/// Random valid spec with `2 <= N <= max_n`: any impurity site, any of the
/// three profile kinds, and `γ` up to 1.5 times the largest hopping.
pub fn random_spec<R: Rng>(rng: &mut R, max_n: usize) -> Result<LatticeSpec> {
    let n = rng.gen_range(2..=max_n);
    let m = rng.gen_range(1..=n / 2);
    let profile = match rng.gen_range(0..3) {
        0 => HoppingProfile::two_segment(rng.gen_range(0.5..2.0), rng.gen_range(0.2..3.0))?,
        1 => HoppingProfile::alpha(rng.gen_range(0.5..2.0), rng.gen_range(-1.5..1.5))?,
        _ => random_symmetric_profile(rng, n, 0.2, 2.0)?,
    };
    let spec = LatticeSpec::new(n, m, 0.0, profile)?;
    let gamma = rng.gen_range(0.0..1.5) * spec.max_hopping();
    spec.with_gamma(gamma)
}

/// Runs `suite`; randomized suites draw from `seed`.
pub fn run_suite(suite: Suite, seed: u64) -> Result<Vec<Check>> {
    Ok(match suite {
        Suite::Oracle => oracle(seed)?,
        Suite::Symmetry => symmetry(seed)?,
        Suite::Maximal => maximal(seed)?,
        Suite::Secular => secular()?,
        Suite::Eq5 => eq5(seed)?,
        Suite::All => {
            let mut all = oracle(seed)?;
            all.extend(symmetry(seed)?);
            all.extend(maximal(seed)?);
            all.extend(secular()?);
            all.extend(eq5(seed)?);
            all
        }
    })
}

fn oracle(seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..ORACLE_SPECS {
        let h = build_hamiltonian(&random_spec(&mut rng, ORACLE_MAX_N)?);
        let fast = eigenvalues(&h)?;
        let slow = brute_force_spectrum(&h)?;
        worst = worst.max(multiset_distance(&fast.eigenvalues, &slow.eigenvalues) / h.energy_scale());
    }

    // E = ±sqrt(tb² - γ²) on two sites.
    let mut analytic: f64 = 0.0;
    for tb in [0.5, 1.0, 2.0, 3.0] {
        for ratio in [0.0, 0.3, 0.9, 1.1, 2.0] {
            let gamma = ratio * tb;
            let h = build_hamiltonian(&LatticeSpec::new(2, 1, gamma, HoppingProfile::two_segment(1.0, tb)?)?);
            let e = Complex64::new(tb * tb - gamma * gamma, 0.0).sqrt();
            let spectrum = eigenvalues(&h)?;
            analytic = analytic.max(multiset_distance(&spectrum.eigenvalues, &[e, -e]) / h.energy_scale());
        }
    }
    Ok(vec![
        Check::new(
            "oracle",
            "aberth-vs-brute-force",
            worst,
            ORACLE_RTOL,
            format!("{ORACLE_SPECS} seeded specs, N <= {ORACLE_MAX_N}, relative to E_scale"),
        ),
        Check::new("oracle", "two-site-analytic", analytic, 1e-14, "E = ±sqrt(tb² - γ²), 20 cases".into()),
    ])
}

fn symmetry(seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0001);
    let mut pt_defects = 0usize;
    let (mut conj, mut ph, mut trace, mut bound) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..SYMMETRY_SPECS {
        let h = build_hamiltonian(&random_spec(&mut rng, 40)?);
        if pt_transform_hamiltonian(&h) != h {
            pt_defects += 1;
        }
        let d = eigenvalues(&h)?.symmetry_defects(&h);
        conj = conj.max(d.conjugation);
        ph = ph.max(d.particle_hole);
        trace = trace.max(d.trace);
        bound = bound.max(d.bound_excess);
    }
    let detail = format!("{SYMMETRY_SPECS} seeded specs, N <= 40, relative to E_scale");
    Ok(vec![
        Check::new("symmetry", "pt-invariance", pt_defects as f64, 0.0, format!("{SYMMETRY_SPECS} Hamiltonians, exact")),
        Check::new("symmetry", "conjugation-closure", conj, SYMMETRY_RTOL, detail.clone()),
        Check::new("symmetry", "particle-hole-closure", ph, SYMMETRY_RTOL, detail.clone()),
        Check::new("symmetry", "zero-trace", trace, SYMMETRY_RTOL, detail.clone()),
        Check::new("symmetry", "gershgorin-bound", bound, 0.0, detail),
    ])
}

fn maximal(seed: u64) -> Result<Vec<Check>> {
    let mut profiles = random_symmetric_profiles(seed, MAXIMAL_PROFILES, 20, 0.2, 2.0)?;
    for alpha in [-1.0, 0.0, 0.5, 1.0] {
        profiles.push(HoppingProfile::alpha(1.0, alpha)?);
    }
    for tb in [0.5, 1.0, 2.0, 5.0] {
        profiles.push(HoppingProfile::two_segment(1.0, tb)?);
    }
    let mut worst: f64 = 0.0;
    let mut failed = Vec::new();
    for (i, p) in profiles.iter().enumerate() {
        let report = verify_maximal_breaking(20, p)?;
        worst = worst.max(report.relative_error);
        if !report.passed() {
            failed.push(format!("profile {i}: {}", report.failed_clauses.join("; ")));
        }
    }
    let mut detail = format!(
        "{} profiles ({MAXIMAL_PROFILES} random, 4 alpha, 4 two-segment), N = 20, m = N/2",
        profiles.len()
    );
    let passed = failed.is_empty();
    if !passed {
        detail = format!("{detail}; {}", failed.join(" | "));
    }
    let mut check = Check::new("maximal", "threshold-equals-central-hopping", worst, 1e-6, detail);
    check.passed &= passed;
    Ok(vec![check])
}

/// Stratified two-segment sample in the PT-symmetric phase: lattice sizes
/// of both parities, impurities near the edge, in the middle and central,
/// inner hoppings below and above `t0`, and `γ` at fixed fractions of the
/// threshold.
pub fn secular_sample() -> Result<Vec<LatticeSpec>> {
    let mut specs = Vec::new();
    for n in [8usize, 9, 12, 15, 20, 21] {
        let mut sites = vec![2, n / 4, n / 2];
        sites.sort_unstable();
        sites.dedup();
        for &m in &sites {
            for tb in [0.6, 0.9, 1.5, 3.0] {
                let spec = LatticeSpec::new(n, m, 0.0, HoppingProfile::two_segment(1.0, tb)?)?;
                let gamma_c = find_gamma_c(&spec, default_gamma_max(&spec))?.gamma_c;
                for fraction in [0.5, 0.9] {
                    specs.push(spec.with_gamma(fraction * gamma_c)?);
                }
            }
        }
    }
    Ok(specs)
}

fn secular() -> Result<Vec<Check>> {
    let specs = secular_sample()?;
    let mut worst: f64 = 0.0;
    let mut miscounts = Vec::new();
    for s in &specs {
        let spectrum = eigenvalues(&build_hamiltonian(s))?;
        for e in spectrum.real_eigenvalues() {
            worst = worst.max(secular_residual(s, Complex64::new(e, 0.0))?);
        }
        let count = count_real_secular_roots(s, SCAN_POINTS)?;
        if count != s.n_sites() || spectrum.n_complex != 0 {
            miscounts.push(format!(
                "N={} m={} γ={:.3e}: {count} scan roots, {} complex",
                s.n_sites(),
                s.impurity_site(),
                s.gamma(),
                spectrum.n_complex
            ));
        }
    }
    let detail = format!("{} specs", specs.len());
    let mut count_detail = format!("{} specs, {SCAN_POINTS}-point scan over [-E_scale, E_scale]", specs.len());
    if !miscounts.is_empty() {
        count_detail = format!("{count_detail}; {}", miscounts.join(" | "));
    }
    Ok(vec![
        Check::new("secular", "residual-at-real-eigenvalues", worst, SECULAR_TOL, detail),
        Check::new("secular", "scan-count-equals-n", miscounts.len() as f64, 0.0, count_detail),
    ])
}

fn eq5(seed: u64) -> Result<Vec<Check>> {
    let mut profiles = random_symmetric_profiles(seed ^ 0x5eed_0005, EQ5_PROFILES, 20, 0.2, 2.0)?;
    for alpha in [-1.0, 0.5] {
        profiles.push(HoppingProfile::alpha(1.0, alpha)?);
    }
    let mut worst: f64 = 0.0;
    let mut pairs = 0;
    for p in &profiles {
        let base = LatticeSpec::new(20, 10, 0.0, p.clone())?;
        let tc = base.central_hopping().expect("even N");
        let spec = base.with_gamma(0.5 * tc)?;
        let h = build_hamiltonian(&spec);
        for e in eigenvalues(&h)?.real_eigenvalues() {
            let ev = eigenvector(&h, Complex64::new(e, 0.0))?;
            worst = worst.max(eq5_residual(&spec, e, &ev)?.det_residual);
            pairs += 1;
        }
    }
    Ok(vec![Check::new(
        "eq5",
        "determinant-at-real-eigenpairs",
        worst,
        EQ5_TOL,
        format!("{pairs} eigenpairs over {} profiles, N = 20, γ = t(N/2)/2", profiles.len()),
    )])
}
