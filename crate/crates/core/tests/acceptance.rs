//! Acceptance criteria A1–A10. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::process::ExitCode;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ptlattice::cli::verify::{random_spec, secular_sample};
use ptlattice::lattice::{build_hamiltonian, HoppingProfile, LatticeSpec, TridiagonalHamiltonian};
use ptlattice::phase::{
    complex_count_sweep, default_gamma_max, find_gamma_c, fit_exponent, fragility_exponent, fragility_scan, log_grid,
    random_symmetric_profiles, sweep_phase_diagram, sweep_point, verify_maximal_breaking,
};
use ptlattice::secular::{count_real_secular_roots, secular_residual};
use ptlattice::spectral::{brute_force_spectrum, eigenvalues, multiset_distance, Spectrum};

type Outcome = ptlattice::Result<(bool, String)>;

/// Every spectrum computed by A1–A7, for the symmetry audit.
#[derive(Default)]
struct Log {
    spectra: Vec<(TridiagonalHamiltonian, Spectrum)>,
}

impl Log {
    fn spectrum(&mut self, spec: &LatticeSpec) -> ptlattice::Result<Spectrum> {
        let h = build_hamiltonian(spec);
        let s = eigenvalues(&h)?;
        self.spectra.push((h, s.clone()));
        Ok(s)
    }
}

fn central(n: usize, tb: f64) -> ptlattice::Result<LatticeSpec> {
    LatticeSpec::new(n, n / 2, 0.0, HoppingProfile::two_segment(1.0, tb)?)
}

fn a1(log: &mut Log) -> Outcome {
    let mut worst: f64 = 0.0;
    for tb in [0.5, 1.0, 2.0, 5.0] {
        let spec = central(20, tb)?;
        let gc = find_gamma_c(&spec, default_gamma_max(&spec))?.gamma_c;
        worst = worst.max((gc - tb).abs() / tb);
        log.spectrum(&spec.with_gamma(gc)?)?;
    }
    Ok((worst <= 1e-6, format!("max |γ_c - t_b|/t_b = {worst:.2e}")))
}

fn a2(log: &mut Log) -> Outcome {
    let mut bad = Vec::new();
    for tb in [0.5, 1.0, 2.0, 5.0] {
        let spec = central(20, tb)?;
        let above = log.spectrum(&spec.with_gamma(1.01 * tb)?)?.n_complex;
        let below = log.spectrum(&spec.with_gamma(0.99 * tb)?)?.n_complex;
        if above != 20 || below != 0 {
            bad.push(format!("t_b={tb}: {below} below, {above} above"));
        }
    }
    Ok((bad.is_empty(), if bad.is_empty() { "20 above, 0 below for all t_b".into() } else { bad.join("; ") }))
}

fn a3(log: &mut Log) -> Outcome {
    let mut profiles = random_symmetric_profiles(20_240_601, 50, 20, 0.2, 2.0)?;
    for alpha in [-1.0, 0.0, 0.5, 1.0] {
        profiles.push(HoppingProfile::alpha(1.0, alpha)?);
    }
    let mut worst: f64 = 0.0;
    let mut failed = 0;
    for p in &profiles {
        let report = verify_maximal_breaking(20, p)?;
        let t_mid = p.amplitudes(20, 10)?[9];
        worst = worst.max((report.gamma_c - t_mid).abs() / t_mid);
        if !report.passed() {
            failed += 1;
        }
        let spec = LatticeSpec::new(20, 10, 0.0, p.clone())?;
        log.spectrum(&spec.with_gamma(0.99 * t_mid)?)?;
        log.spectrum(&spec.with_gamma(1.01 * t_mid)?)?;
    }
    Ok((
        worst <= 1e-6 && failed == 0,
        format!("{} profiles, max rel err {worst:.2e}, {failed} reports failed", profiles.len()),
    ))
}

fn a4(log: &mut Log) -> Outcome {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for d in [1, 3, 5, 7] {
        for tb in [2.0, 3.0, 5.0, 8.0] {
            let r = sweep_point(20, d, 1.0, tb)?;
            let q = r.gamma_c_ratio / r.tb_ratio;
            lo = lo.min(q);
            hi = hi.max(q);
            let spec = LatticeSpec::with_distance(20, d, r.gamma_c, HoppingProfile::two_segment(1.0, tb)?)?;
            log.spectrum(&spec)?;
        }
    }
    Ok((lo >= 0.9 && hi <= 1.01, format!("Γ_c/T_b in [{lo:.4}, {hi:.4}]")))
}

fn a5() -> Outcome {
    let outcome = sweep_phase_diagram(20, &[1, 3, 5, 7], &log_grid(0.05, 0.3, 10), 1.0)?;
    if !outcome.failures.is_empty() {
        return Ok((false, format!("{} sweep points failed", outcome.failures.len())));
    }
    let mut etas = Vec::new();
    for d in [1, 3, 5, 7] {
        let recs: Vec<_> = outcome.records.iter().filter(|r| r.distance == d).cloned().collect();
        etas.push((d, fit_exponent(&recs, (0.05, 0.3))?.eta));
    }
    let eta1 = (etas[0].1 - 1.0).abs() <= 0.01;
    let increasing = etas.windows(2).all(|w| w[1].1 > w[0].1);
    let ratio = etas.iter().all(|&(d, e)| (0.5..=1.5).contains(&(e / d as f64)));
    let list: Vec<String> = etas.iter().map(|(d, e)| format!("η({d})={e:.4}")).collect();
    Ok((eta1 && increasing && ratio, list.join(" ")))
}

fn a6(log: &mut Log) -> Outcome {
    let specs = secular_sample()?;
    let mut worst: f64 = 0.0;
    let mut miscounts = 0;
    for s in &specs {
        let spectrum = log.spectrum(s)?;
        for e in spectrum.real_eigenvalues() {
            worst = worst.max(secular_residual(s, Complex64::new(e, 0.0))?);
        }
        if count_real_secular_roots(s, 10_000)? != s.n_sites() {
            miscounts += 1;
        }
    }
    Ok((
        specs.len() >= 100 && worst <= 1e-6 && miscounts == 0,
        format!("{} specs, max residual {worst:.2e}, {miscounts} miscounts", specs.len()),
    ))
}

fn a7(log: &mut Log) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let spec = random_spec(&mut rng, 8)?;
        let engine = log.spectrum(&spec)?;
        let oracle = brute_force_spectrum(&build_hamiltonian(&spec))?;
        worst = worst.max(multiset_distance(&engine.eigenvalues, &oracle.eigenvalues) / engine.energy_scale);
    }
    let mut worst_2x2: f64 = 0.0;
    for tb in [0.5, 1.0, 3.0] {
        for f in [0.0, 0.3, 0.6, 0.9, 1.1, 1.25, 2.0] {
            let gamma = f * tb;
            let spec = LatticeSpec::new(2, 1, gamma, HoppingProfile::custom(vec![tb])?)?;
            let s = log.spectrum(&spec)?;
            let e = Complex64::new(tb * tb - gamma * gamma, 0.0).sqrt();
            let err = multiset_distance(&s.eigenvalues, &[e, -e]) / s.energy_scale;
            worst_2x2 = worst_2x2.max(err);
        }
    }
    Ok((
        worst <= 1e-8 && worst_2x2 <= 1e-12,
        format!("oracle distance {worst:.2e}·E_scale over 200 specs, 2x2 family {worst_2x2:.2e}·E_scale"),
    ))
}

fn a8(log: &Log) -> Outcome {
    let worst = log.spectra.iter().map(|(h, s)| s.symmetry_defects(h).max()).fold(0.0, f64::max);
    Ok((worst <= 1e-8, format!("{} spectra, worst defect {worst:.2e}·E_scale", log.spectra.len())))
}

fn a9() -> Outcome {
    let points = fragility_scan(-1.0, &[8, 16, 32, 64])?;
    let decreasing = points.windows(2).all(|w| w[1].ratio < w[0].ratio);
    let (slope, stderr) = fragility_exponent(&points);
    let ok = decreasing && (slope + 0.5).abs() <= 0.15;
    Ok((ok, format!("slope {slope:.4} ± {stderr:.4}, strictly decreasing: {decreasing}")))
}

fn first_onset(m: usize) -> ptlattice::Result<usize> {
    let spec = LatticeSpec::new(20, m, 0.0, HoppingProfile::uniform(1.0)?)?;
    let gc = find_gamma_c(&spec, default_gamma_max(&spec))?.gamma_c;
    let gammas: Vec<f64> = (1..=200).map(|k| gc * (1.0 + 1e-4 * k as f64)).collect();
    let counts = complex_count_sweep(&spec, &gammas)?;
    Ok(counts.iter().map(|&(_, c)| c).find(|&c| c > 0).unwrap_or(0))
}

fn a10() -> Outcome {
    let off = first_onset(5)?;
    let mid = first_onset(10)?;
    Ok((off == 4 && mid == 20, format!("first nonzero count {off} at m=5, {mid} at m=10")))
}

fn main() -> ExitCode {
    let mut log = Log::default();
    let results: Vec<(&str, Outcome)> = vec![
        ("A1 nearest-neighbour threshold", a1(&mut log)),
        ("A2 maximal breaking", a2(&mut log)),
        ("A3 symmetric profiles", a3(&mut log)),
        ("A4 saturation", a4(&mut log)),
        ("A5 power law", a5()),
        ("A6 secular cross-validation", a6(&mut log)),
        ("A7 oracle equivalence", a7(&mut log)),
        ("A8 symmetry invariants", a8(&log)),
        ("A9 fragility", a9()),
        ("A10 onset", a10()),
    ];

    let mut all = true;
    for (name, outcome) in results {
        let (ok, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
        all &= ok;
        println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
