//! Symmetry-breaking thresholds and phase diagrams.
//!
//! The order parameter is the number of complex eigenvalues, a discrete
//! count, so thresholds are located by bisection on the broken/unbroken
//! predicate rather than by any smooth root finder.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{bandwidth, build_hamiltonian, HoppingProfile, LatticeSpec, TridiagonalHamiltonian};
use crate::spectral;

pub const MAX_BISECTIONS: usize = 80;
/// Bracket width bound relative to the largest hopping amplitude.
pub const BRACKET_ATOL: f64 = 1e-10;
/// Bracket width bound relative to the threshold itself, so that tiny
/// thresholds are still resolved to many digits.
pub const BRACKET_RTOL: f64 = 1e-9;
pub const AUDIT_POINTS: usize = 64;
pub const DEFAULT_WINDOW: (f64, f64) = (0.05, 0.3);
pub const MIN_FIT_POINTS: usize = 8;

/// Suggested upper bracket `2 max(t) N`.
pub fn default_gamma_max(spec: &LatticeSpec) -> f64 {
    2.0 * spec.max_hopping() * spec.n_sites() as f64
}

/// `(broken, n_complex)` for the spec's own `gamma`.
pub fn is_pt_broken(spec: &LatticeSpec) -> Result<(bool, usize)> {
    broken(&build_hamiltonian(spec))
}

fn broken(h: &TridiagonalHamiltonian) -> Result<(bool, usize)> {
    let n = spectral::count_complex(h)?;
    Ok((n > 0, n))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdResult {
    pub gamma_c: f64,
    /// Final bracket `(γ_low, γ_high)`.
    pub bracket: (f64, f64),
    pub n_complex_below: usize,
    pub n_complex_above: usize,
    pub iterations: usize,
}

impl ThresholdResult {
    pub fn bracket_width(&self) -> f64 {
        self.bracket.1 - self.bracket.0
    }
}

/// Bisection for the smallest `γ` at which `build(γ)` has a complex
/// eigenvalue. `hop_scale` sets the absolute bracket tolerance.
pub fn bisect_threshold<F>(build: F, gamma_max: f64, hop_scale: f64) -> Result<ThresholdResult>
where
    F: Fn(f64) -> Result<TridiagonalHamiltonian>,
{
    let (broken_top, n_top) = broken(&build(gamma_max)?)?;
    if !broken_top {
        return Err(Error::BracketFailure { gamma_max });
    }
    let (broken_zero, n_zero) = broken(&build(0.0)?)?;
    if broken_zero {
        return Err(Error::NonMonotone { broken_at: 0.0, unbroken_at: f64::NAN });
    }

    let (mut lo, mut hi) = (0.0, gamma_max);
    let (mut n_lo, mut n_hi) = (n_zero, n_top);
    let mut iterations = 0;
    while iterations < MAX_BISECTIONS {
        let width = hi - lo;
        if width <= BRACKET_ATOL * hop_scale && width <= BRACKET_RTOL * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let (broken, n) = broken(&build(mid)?)?;
        if broken {
            hi = mid;
            n_hi = n;
        } else {
            lo = mid;
            n_lo = n;
        }
        iterations += 1;
    }
    Ok(ThresholdResult {
        gamma_c: 0.5 * (lo + hi),
        bracket: (lo, hi),
        n_complex_below: n_lo,
        n_complex_above: n_hi,
        iterations,
    })
}

/// Critical impurity strength for the spec's geometry and profile; the
/// spec's own `gamma` is ignored.
pub fn find_gamma_c(spec: &LatticeSpec, gamma_max: f64) -> Result<ThresholdResult> {
    bisect_threshold(|g| Ok(build_hamiltonian(&spec.with_gamma(g)?)), gamma_max, spec.max_hopping())
}

/// Checks the broken-phase predicate on a 64-point grid: unbroken on
/// `(0, γ_low]`, broken on `[γ_high, gamma_max]`.
pub fn audit_monotonicity(spec: &LatticeSpec, threshold: &ThresholdResult, gamma_max: f64) -> Result<()> {
    let half = AUDIT_POINTS / 2;
    let (lo, hi) = threshold.bracket;
    let below = (1..=half).map(|k| lo * k as f64 / half as f64);
    let ratio = (gamma_max / hi).max(1.0);
    let above = (0..half).map(|k| hi * ratio.powf(k as f64 / (half - 1) as f64));
    for g in below {
        if g > 0.0 && is_pt_broken(&spec.with_gamma(g)?)?.0 {
            return Err(Error::NonMonotone { broken_at: g, unbroken_at: lo });
        }
    }
    for g in above {
        if !is_pt_broken(&spec.with_gamma(g)?)?.0 {
            return Err(Error::NonMonotone { broken_at: hi, unbroken_at: g });
        }
    }
    Ok(())
}

/// Number of complex eigenvalues along a list of impurity strengths.
pub fn complex_count_sweep(spec: &LatticeSpec, gammas: &[f64]) -> Result<Vec<(f64, usize)>> {
    gammas.iter().map(|&g| Ok((g, is_pt_broken(&spec.with_gamma(g)?)?.1))).collect()
}

/// One point of a phase diagram.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRecord {
    pub n_sites: usize,
    pub impurity_site: usize,
    pub distance: usize,
    pub t0: f64,
    pub tb: f64,
    /// `T_b = t_b / t0`.
    pub tb_ratio: f64,
    pub gamma_c: f64,
    /// `Γ_c = γ_c / t0`.
    pub gamma_c_ratio: f64,
    pub n_complex_above: usize,
    pub bracket_width: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepFailure {
    pub n_sites: usize,
    pub distance: usize,
    pub t0: f64,
    pub tb: f64,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepOutcome {
    pub records: Vec<SweepRecord>,
    pub failures: Vec<SweepFailure>,
}

/// Threshold of a two-segment lattice at distance `d`, audited for
/// monotonicity.
pub fn sweep_point(n_sites: usize, distance: usize, t0: f64, tb: f64) -> Result<SweepRecord> {
    let spec = LatticeSpec::with_distance(n_sites, distance, 0.0, HoppingProfile::two_segment(t0, tb)?)?;
    let gamma_max = default_gamma_max(&spec);
    let threshold = find_gamma_c(&spec, gamma_max)?;
    audit_monotonicity(&spec, &threshold, gamma_max)?;
    Ok(SweepRecord {
        n_sites,
        impurity_site: spec.impurity_site(),
        distance,
        t0,
        tb,
        tb_ratio: tb / t0,
        gamma_c: threshold.gamma_c,
        gamma_c_ratio: threshold.gamma_c / t0,
        n_complex_above: threshold.n_complex_above,
        bracket_width: threshold.bracket_width(),
    })
}

/// Thresholds over the `(d, t_b)` grid, run in parallel and ordered by
/// `(d, t_b)`. Points whose threshold search fails are reported, not fatal.
pub fn sweep_phase_diagram(n_sites: usize, distances: &[usize], tb_grid: &[f64], t0: f64) -> Result<SweepOutcome> {
    if distances.is_empty() {
        return Err(Error::InvalidArgument("distance list is empty".into()));
    }
    if tb_grid.is_empty() || tb_grid.iter().any(|&tb| !(tb.is_finite() && tb > 0.0)) {
        return Err(Error::InvalidArgument("t_b grid must be non-empty and strictly positive".into()));
    }
    for &d in distances {
        if d == 0 || d >= n_sites || (n_sites + 1 - d) % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "distance d = {d} is incompatible with N = {n_sites} (d must be {} and < N)",
                if n_sites % 2 == 0 { "odd" } else { "even" }
            )));
        }
    }
    let mut jobs: Vec<(usize, f64)> =
        distances.iter().flat_map(|&d| tb_grid.iter().map(move |&tb| (d, tb))).collect();
    jobs.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    jobs.dedup();

    let results: Vec<(usize, f64, Result<SweepRecord>)> =
        jobs.par_iter().map(|&(d, tb)| (d, tb, sweep_point(n_sites, d, t0, tb))).collect();
    let mut outcome = SweepOutcome::default();
    for (distance, tb, result) in results {
        match result {
            Ok(record) => outcome.records.push(record),
            Err(e) => outcome.failures.push(SweepFailure { n_sites, distance, t0, tb, message: e.to_string() }),
        }
    }
    Ok(outcome)
}

/// Ordinary least-squares slope and its standard error.
pub fn ols_slope(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let stderr = if xs.len() > 2 { (ssr / (n - 2.0) / sxx).sqrt() } else { f64::NAN };
    (slope, stderr)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExponentFit {
    pub distance: usize,
    pub eta: f64,
    pub stderr: f64,
    pub window: (f64, f64),
    /// `(ln T_b, ln Γ_c)` pairs used in the fit.
    pub points: Vec<(f64, f64)>,
}

/// Power-law exponent `η` in `Γ_c ∝ T_b^η` by least squares on the
/// log-log pairs inside `window`.
pub fn fit_exponent(records: &[SweepRecord], window: (f64, f64)) -> Result<ExponentFit> {
    let (lo, hi) = window;
    if !(lo > 0.0 && lo < hi && hi < 1.0) {
        return Err(Error::InvalidArgument(format!("fit window ({lo}, {hi}) must lie inside (0, 1)")));
    }
    let inside: Vec<&SweepRecord> =
        records.iter().filter(|r| r.tb_ratio >= lo && r.tb_ratio <= hi).collect();
    let Some(first) = inside.first() else {
        return Err(Error::InsufficientData("no records inside the fit window".into()));
    };
    if inside.iter().any(|r| r.distance != first.distance || r.n_sites != first.n_sites) {
        return Err(Error::InvalidArgument("records mix different (N, d)".into()));
    }
    if inside.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientData(format!(
            "{} records inside the window, need at least {MIN_FIT_POINTS}",
            inside.len()
        )));
    }
    let points: Vec<(f64, f64)> = inside.iter().map(|r| (r.tb_ratio.ln(), r.gamma_c_ratio.ln())).collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().copied().unzip();
    let (eta, stderr) = ols_slope(&xs, &ys);
    Ok(ExponentFit { distance: first.distance, eta, stderr, window, points })
}

/// Geometric grid of `n` points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let ratio = (hi / lo).ln();
    let mut grid: Vec<f64> = (0..n).map(|k| lo * (ratio * k as f64 / (n - 1) as f64).exp()).collect();
    grid[n - 1] = hi;
    grid
}

/// Linear grid of `n` points from `lo` to `hi` inclusive.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

/// Outcome of the maximal-breaking check for central impurities.
#[derive(Clone, Debug, PartialEq)]
pub struct MaximalBreakingReport {
    pub n_sites: usize,
    pub central_hopping: f64,
    pub gamma_c: f64,
    pub relative_error: f64,
    /// Complex count at `1.01 t(N/2)`.
    pub n_complex_above: usize,
    /// Complex count at `0.99 t(N/2)`.
    pub n_complex_below: usize,
    pub failed_clauses: Vec<String>,
}

impl MaximalBreakingReport {
    pub fn passed(&self) -> bool {
        self.failed_clauses.is_empty()
    }
}

pub const MAXIMAL_RTOL: f64 = 1e-6;

/// For even `N` and impurities on the two central sites: the threshold
/// equals the central hopping, every eigenvalue turns complex just above
/// it, and none just below it.
pub fn verify_maximal_breaking(n_sites: usize, profile: &HoppingProfile) -> Result<MaximalBreakingReport> {
    if n_sites % 2 != 0 {
        return Err(Error::InvalidArgument(format!("maximal breaking needs even N, got {n_sites}")));
    }
    let spec = LatticeSpec::new(n_sites, n_sites / 2, 0.0, profile.clone())?;
    let tc = spec.central_hopping().expect("even N has a central bond");
    let threshold = find_gamma_c(&spec, default_gamma_max(&spec))?;
    let relative_error = (threshold.gamma_c - tc).abs() / tc;
    let n_complex_above = is_pt_broken(&spec.with_gamma(1.01 * tc)?)?.1;
    let n_complex_below = is_pt_broken(&spec.with_gamma(0.99 * tc)?)?.1;

    let mut failed_clauses = Vec::new();
    if relative_error > MAXIMAL_RTOL {
        failed_clauses.push(format!(
            "threshold {} differs from t(N/2) = {tc} by {relative_error:.3e} relative",
            threshold.gamma_c
        ));
    }
    if n_complex_above != n_sites {
        failed_clauses.push(format!("{n_complex_above} of {n_sites} eigenvalues complex at 1.01 t(N/2)"));
    }
    if n_complex_below != 0 {
        failed_clauses.push(format!("{n_complex_below} eigenvalues complex at 0.99 t(N/2)"));
    }
    Ok(MaximalBreakingReport {
        n_sites,
        central_hopping: tc,
        gamma_c: threshold.gamma_c,
        relative_error,
        n_complex_above,
        n_complex_below,
        failed_clauses,
    })
}

/// Parity-symmetric profile with amplitudes drawn uniformly from `[lo, hi]`.
pub fn random_symmetric_profile<R: Rng>(rng: &mut R, n_sites: usize, lo: f64, hi: f64) -> Result<HoppingProfile> {
    let n_bonds = n_sites - 1;
    let mut t = vec![0.0; n_bonds];
    for k in 0..n_bonds.div_ceil(2) {
        let x = rng.gen_range(lo..=hi);
        t[k] = x;
        t[n_bonds - 1 - k] = x;
    }
    HoppingProfile::custom(t)
}

/// Seeded batch of random symmetric profiles.
pub fn random_symmetric_profiles(seed: u64, count: usize, n_sites: usize, lo: f64, hi: f64) -> Result<Vec<HoppingProfile>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_symmetric_profile(&mut rng, n_sites, lo, hi)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct FragilityPoint {
    pub n_sites: usize,
    pub gamma_c: f64,
    pub bandwidth: f64,
    /// `γ_c / Δ_α`.
    pub ratio: f64,
}

/// Threshold relative to the clean bandwidth for the `α` profile with
/// central impurities, for each even `N`.
pub fn fragility_scan(alpha: f64, n_list: &[usize]) -> Result<Vec<FragilityPoint>> {
    let profile = HoppingProfile::alpha(1.0, alpha)?;
    n_list
        .par_iter()
        .map(|&n| {
            if n % 2 != 0 {
                return Err(Error::InvalidArgument(format!("fragility scan needs even N, got {n}")));
            }
            let spec = LatticeSpec::new(n, n / 2, 0.0, profile.clone())?;
            let gamma_c = find_gamma_c(&spec, default_gamma_max(&spec))?.gamma_c;
            let width = bandwidth(&spec)?;
            Ok(FragilityPoint { n_sites: n, gamma_c, bandwidth: width, ratio: gamma_c / width })
        })
        .collect()
}

/// Log-log slope of `γ_c / Δ` against `N`.
pub fn fragility_exponent(points: &[FragilityPoint]) -> (f64, f64) {
    let xs: Vec<f64> = points.iter().map(|p| (p.n_sites as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.ratio.ln()).collect();
    ols_slope(&xs, &ys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::apply_parity;

    fn two_segment(n: usize, m: usize, t0: f64, tb: f64) -> LatticeSpec {
        LatticeSpec::new(n, m, 0.0, HoppingProfile::two_segment(t0, tb).unwrap()).unwrap()
    }

    #[test]
    fn clean_lattice_is_unbroken() {
        assert_eq!(is_pt_broken(&two_segment(9, 2, 1.0, 0.4)).unwrap(), (false, 0));
    }

    #[test]
    fn two_site_broken_phase() {
        let spec = two_segment(2, 1, 1.0, 1.0).with_gamma(1.25).unwrap();
        assert_eq!(is_pt_broken(&spec).unwrap(), (true, 2));
    }

    #[test]
    fn central_impurities_break_maximally() {
        let spec = two_segment(20, 10, 1.0, 1.0).with_gamma(1.01).unwrap();
        assert_eq!(is_pt_broken(&spec).unwrap(), (true, 20));
    }

    #[test]
    fn nearest_neighbour_threshold_is_tb() {
        let t = find_gamma_c(&two_segment(20, 10, 1.0, 0.7), 40.0).unwrap();
        assert!((t.gamma_c - 0.7).abs() < 1e-6);
        assert_eq!(t.n_complex_below, 0);
        assert_eq!(t.n_complex_above, 20);
        assert!(t.bracket_width() <= BRACKET_ATOL);
    }

    #[test]
    fn two_site_threshold() {
        let t = find_gamma_c(&two_segment(2, 1, 1.0, 3.0), 12.0).unwrap();
        assert!((t.gamma_c - 3.0).abs() < 1e-6);
    }

    #[test]
    fn odd_lattice_threshold_in_range() {
        let spec = two_segment(21, 10, 1.0, 1.0);
        let t = find_gamma_c(&spec, default_gamma_max(&spec)).unwrap();
        assert!(t.gamma_c > 0.0 && t.gamma_c < 4.0);
        audit_monotonicity(&spec, &t, default_gamma_max(&spec)).unwrap();
    }

    #[test]
    fn unbroken_upper_bracket_is_reported() {
        let err = find_gamma_c(&two_segment(20, 10, 1.0, 0.7), 0.5).unwrap_err();
        assert!(matches!(err, Error::BracketFailure { .. }));
    }

    #[test]
    fn mirrored_impurities_give_the_same_threshold() {
        let spec = two_segment(14, 4, 1.0, 0.6);
        let direct = find_gamma_c(&spec, 30.0).unwrap();
        let mirrored = bisect_threshold(
            |g| {
                let h = build_hamiltonian(&spec.with_gamma(g)?);
                TridiagonalHamiltonian::new(apply_parity(h.diagonal()), h.off_diagonal().to_vec())
            },
            30.0,
            spec.max_hopping(),
        )
        .unwrap();
        assert!((direct.gamma_c - mirrored.gamma_c).abs() <= 1e-10);
    }

    #[test]
    fn threshold_scales_with_energy_units() {
        let spec = two_segment(12, 3, 1.0, 0.8);
        let base = find_gamma_c(&spec, 30.0).unwrap().gamma_c;
        let s = 3.7;
        let scaled_spec = LatticeSpec::new(12, 3, 0.0, spec.profile().scaled(s).unwrap()).unwrap();
        let scaled = find_gamma_c(&scaled_spec, 30.0 * s).unwrap().gamma_c;
        assert!((scaled / (s * base) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn generic_position_breaks_four_at_a_time() {
        let spec = two_segment(20, 5, 1.0, 1.0);
        assert_eq!(find_gamma_c(&spec, 40.0).unwrap().n_complex_above, 4);
    }

    #[test]
    fn ols_recovers_exact_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [1.0, 3.0, 5.0, 7.0];
        let (slope, err) = ols_slope(&xs, &ys);
        assert!((slope - 2.0).abs() < 1e-14);
        assert!(err < 1e-14);
    }

    #[test]
    fn exponent_fit_validation() {
        let rec = |tb: f64, d: usize| SweepRecord {
            n_sites: 20,
            impurity_site: (21 - d) / 2,
            distance: d,
            t0: 1.0,
            tb,
            tb_ratio: tb,
            gamma_c: tb.powi(3),
            gamma_c_ratio: tb.powi(3),
            n_complex_above: 4,
            bracket_width: 0.0,
        };
        let records: Vec<SweepRecord> = log_grid(0.05, 0.3, 10).into_iter().map(|tb| rec(tb, 3)).collect();
        let fit = fit_exponent(&records, DEFAULT_WINDOW).unwrap();
        assert!((fit.eta - 3.0).abs() < 1e-12);
        assert_eq!(fit.points.len(), 10);
        assert!(matches!(fit_exponent(&records[..5], DEFAULT_WINDOW), Err(Error::InsufficientData(_))));
        assert!(fit_exponent(&records, (0.05, 1.5)).is_err());
        let mut mixed = records.clone();
        mixed[0] = rec(0.06, 5);
        assert!(fit_exponent(&mixed, DEFAULT_WINDOW).is_err());
    }

    #[test]
    fn sweep_rejects_bad_distances() {
        assert!(sweep_phase_diagram(20, &[], &[0.5], 1.0).is_err());
        assert!(sweep_phase_diagram(20, &[2], &[0.5], 1.0).is_err());
        assert!(sweep_phase_diagram(21, &[3], &[0.5], 1.0).is_err());
        assert!(sweep_phase_diagram(20, &[1], &[0.0], 1.0).is_err());
    }

    #[test]
    fn sweep_orders_records() {
        let out = sweep_phase_diagram(12, &[3, 1], &[2.0, 0.5], 1.0).unwrap();
        assert!(out.failures.is_empty());
        let keys: Vec<(usize, f64)> = out.records.iter().map(|r| (r.distance, r.tb)).collect();
        assert_eq!(keys, vec![(1, 0.5), (1, 2.0), (3, 0.5), (3, 2.0)]);
        assert!((out.records[0].gamma_c_ratio - 0.5).abs() < 1e-6);
    }

    #[test]
    fn maximal_breaking_for_alpha_profile() {
        let report = verify_maximal_breaking(20, &HoppingProfile::alpha(1.0, 0.5).unwrap()).unwrap();
        assert!(report.passed(), "{:?}", report.failed_clauses);
        assert!((report.central_hopping - 10.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn random_profiles_are_reproducible() {
        let a = random_symmetric_profiles(7, 3, 9, 0.2, 2.0).unwrap();
        let b = random_symmetric_profiles(7, 3, 9, 0.2, 2.0).unwrap();
        assert_eq!(a, b);
        assert_ne!(a[0], a[1]);
    }

    #[test]
    fn grids() {
        let g = log_grid(0.05, 0.3, 8);
        assert_eq!(g.len(), 8);
        assert!((g[0] - 0.05).abs() < 1e-15 && (g[7] - 0.3).abs() < 1e-15);
        assert_eq!(linear_grid(1.0, 8.0, 8), vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]);
    }
}
