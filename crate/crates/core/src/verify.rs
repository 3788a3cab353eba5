//! The acceptance suite: twelve numbered checks shared by the `acceptance`
//! test target and the `verify` command.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::determinants::{
    delta_ees, find_eigenvalues, spectral_report, ScanConfig, SpectralReport,
};
use crate::lattice::{CouplingTriple, Quasimomentum, SectorTag, SideTag};
use crate::oracle::{
    build_momentum_fiber, build_position_fiber, eigenvalues_dense, minimax_table, verify_theorems, StructuredFiber,
    DENSE_CAP,
};
use crate::regions::{big_q, constants, predicted_counts, self_calibrate, CalibrationConfig, Calibration, Component};
use crate::torus::{asymptotic_reference, greens_entry, greens_matrix, greens_matrix_direct, oos_integral, QuadratureSpec};
use crate::{Error, Result};

pub const CHECK_COUNT: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub seed: u64,
    pub quadrature: QuadratureSpec,
    pub scan: ScanConfig,
    /// Oracle grid for the determinant comparison of check 5.
    pub comparison_grid: usize,
    /// Oracle grid for the quasimomentum checks 7, 8 and 12.
    pub theorem_grid: usize,
    pub samples_per_component: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 0x5eed,
            quadrature: QuadratureSpec::default(),
            scan: ScanConfig::default(),
            comparison_grid: 64,
            theorem_grid: 48,
            samples_per_component: 20,
        }
    }
}

impl VerifyConfig {
    pub fn validate(&self) -> Result<()> {
        self.quadrature.validate()?;
        self.scan.validate()?;
        for l in [self.comparison_grid, self.theorem_grid] {
            if l % 2 != 0 || l < 8 {
                return Err(Error::GridSize(l));
            }
        }
        if self.samples_per_component == 0 {
            return Err(Error::Config("samples_per_component must be positive".into()));
        }
        Ok(())
    }

    /// Distance from the band edge beyond which determinant and oracle
    /// eigenvalues are compared: 1e−3 at L = 64, growing as L⁻² on coarser grids.
    pub fn comparison_threshold(&self) -> f64 {
        let r = 64.0 / self.comparison_grid as f64;
        1e-3 * (r * r).max(1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: usize,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl std::fmt::Display for CheckRecord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{status}] {:>2} {:<28} {:>7.2}s  {}", self.id, self.name, self.seconds, self.detail)
    }
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { passed, detail })
}

pub fn check_name(id: usize) -> &'static str {
    match id {
        1 => "green-identities",
        2 => "threshold-asymptotics",
        3 => "oos-threshold",
        4 => "classifier-constants",
        5 => "exact-counts-k0",
        6 => "rank-bounds",
        7 => "counts-grow-away-from-k0",
        8 => "lowest-gap-monotone",
        9 => "determinant-log-slope",
        10 => "dft-cospectral",
        11 => "zero-mu-ees-counts",
        12 => "equality-m-plus-n-7",
        _ => "unknown",
    }
}

/// Runs one check; errors inside a check turn into a failed record.
pub fn run_check(id: usize, cfg: &VerifyConfig) -> CheckRecord {
    let start = Instant::now();
    let result = match id {
        1 => green_identities(cfg),
        2 => threshold_asymptotics(cfg),
        3 => oos_threshold(cfg),
        4 => classifier_constants(),
        5 => exact_counts(cfg),
        6 => rank_bounds(cfg),
        7 => counts_grow(cfg),
        8 => gap_monotone(cfg),
        9 => log_slope(cfg),
        10 => dft_cospectral(cfg),
        11 => zero_mu_counts(cfg),
        12 => equality_case(cfg),
        _ => Err(Error::Config(format!("no check {id}"))),
    };
    let seconds = start.elapsed().as_secs_f64();
    let (passed, detail) = match result {
        Ok(o) => (o.passed, o.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    let (passed, detail) = match time_budget(id) {
        Some(budget) if seconds > budget => (false, format!("{detail}; over the {budget} s budget")),
        _ => (passed, detail),
    };
    CheckRecord { id, name: check_name(id).to_string(), passed, detail, seconds }
}

fn time_budget(id: usize) -> Option<f64> {
    match id {
        1 => Some(2.0),
        5 => Some(180.0),
        10 => Some(30.0),
        _ => None,
    }
}

pub fn run_all(cfg: &VerifyConfig) -> Vec<CheckRecord> {
    (1..=CHECK_COUNT).map(|id| run_check(id, cfg)).collect()
}

fn rng(cfg: &VerifyConfig, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn random_triple(rng: &mut ChaCha8Rng, radius: f64) -> CouplingTriple {
    let mut draw = || rng.gen_range(-radius..=radius);
    CouplingTriple { gamma: draw(), lambda: draw(), mu: draw() }
}

fn random_k(rng: &mut ChaCha8Rng) -> Quasimomentum {
    Quasimomentum::new(rng.gen_range(-PI..PI), rng.gen_range(-PI..PI))
}

const IDENTITY_POINTS: [f64; 6] = [-5.0, -1.0, -1e-3, 8.001, 9.0, 12.0];

fn green_identities(cfg: &VerifyConfig) -> Result<Outcome> {
    let rel = |x: f64, y: f64| (x - y).abs() / y.abs().max(f64::MIN_POSITIVE);
    let mut worst: f64 = 0.0;
    for z in IDENTITY_POINTS {
        let g = greens_matrix_direct(z, &cfg.quadrature)?;
        let h = 0.5 * (4.0 - z);
        worst = worst
            .max(rel(g.entry(1, 2), h * g.entry(1, 1) - 0.25))
            .max(rel(g.entry(2, 2), h * g.entry(1, 2)))
            .max(rel(g.entry(2, 3), h * g.entry(1, 3)))
            .max(rel(g.entry(2, 4), h * g.entry(1, 4)));
        for i in 1..=4 {
            for j in i + 1..=4 {
                worst = worst.max(rel(greens_entry(j, i, z, &cfg.quadrature)?, g.entry(i, j)));
            }
        }
    }
    outcome(worst < 1e-10, format!("max relative residual {worst:.2e} (tol 1e-10)"))
}

fn threshold_asymptotics(cfg: &VerifyConfig) -> Result<Outcome> {
    let mut worst_at_closest: f64 = 0.0;
    let mut non_monotone = Vec::new();
    for side in SideTag::BOTH {
        let at = |d: f64| match side {
            SideTag::Below => -d,
            SideTag::Above => 8.0 + d,
        };
        let mut errors = Vec::new();
        for k in 2..=6 {
            let z = at(10f64.powi(-k));
            let g = greens_matrix(z, &cfg.quadrature)?;
            let mut row = [[0.0; 4]; 4];
            for i in 1..=4 {
                for j in i..=4 {
                    row[i - 1][j - 1] = (g.entry(i, j) - asymptotic_reference((i, j), side, z)).abs();
                }
            }
            errors.push(row);
        }
        for i in 0..4 {
            for j in i..4 {
                worst_at_closest = worst_at_closest.max(errors[4][i][j]);
                if errors.windows(2).any(|w| w[1][i][j] >= w[0][i][j]) {
                    non_monotone.push(format!("{}:a{}{}", side.name(), i + 1, j + 1));
                }
            }
        }
    }
    outcome(
        worst_at_closest < 1e-3 && non_monotone.is_empty(),
        format!(
            "max error at distance 1e-6 {worst_at_closest:.2e} (tol 1e-3); non-monotone entries {:?}",
            non_monotone
        ),
    )
}

fn bisect(mut lo: f64, mut hi: f64, tol: f64, f: impl Fn(f64) -> f64) -> f64 {
    let flo = f(lo).signum();
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if f(mid).signum() == flo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn oos_threshold(cfg: &VerifyConfig) -> Result<Outcome> {
    let exact = 3.0 * PI / (3.0 * PI - 8.0);
    let above = oos_integral(8.0, &cfg.quadrature)?;
    let below = oos_integral(0.0, &cfg.quadrature)?;
    let mu_above = bisect(0.0, 50.0, 1e-10, |mu| 1.0 + mu * above);
    let mu_below = bisect(-50.0, 0.0, 1e-10, |mu| 1.0 + mu * below);
    let err = (mu_above - exact).abs().max((mu_below + exact).abs());
    outcome(
        err < 1e-6,
        format!("thresholds {mu_above:.9} / {mu_below:.9}, closed form ±{exact:.9}, error {err:.1e} (tol 1e-6)"),
    )
}

fn classifier_constants() -> Result<Outcome> {
    let k = constants();
    let err = (k.mu0_minus + 7.7170).abs().max((k.mu0_plus + 2.7880).abs());
    let chain = k.mu0_minus < k.mu1_minus && k.mu1_minus < k.mu0_plus && k.mu0_plus < k.mu1_plus && k.mu1_plus < 0.0;
    outcome(
        err < 5e-4 && chain,
        format!(
            "mu0 = ({:.5}, {:.5}) error {err:.1e} (tol 5e-4); mu1 = ({:.5}, {:.5}); ordering {}",
            k.mu0_minus,
            k.mu0_plus,
            k.mu1_minus,
            k.mu1_plus,
            if chain { "holds" } else { "broken" }
        ),
    )
}

/// Distances of determinant eigenvalues from the edge on `side`, with
/// unresolved near-edge roots at distance zero, sorted descending.
fn determinant_distances(report: &SpectralReport, side: SideTag) -> Vec<f64> {
    let mut d: Vec<f64> = Vec::new();
    for l in report.lists.iter().filter(|l| l.side == side) {
        d.extend(l.values.iter().map(|&z| edge_distance(side, z)));
        d.extend(std::iter::repeat_n(0.0, l.unresolved));
    }
    d.sort_by(|a, b| b.total_cmp(a));
    d
}

fn edge_distance(side: SideTag, z: f64) -> f64 {
    match side {
        SideTag::Below => -z,
        SideTag::Above => z - 8.0,
    }
}

/// Outcome of pairing determinant and oracle eigenvalues on one side.
#[derive(Debug, Clone, Copy, Default)]
struct Pairing {
    agrees: bool,
    /// Largest |z_det − z_oracle| over pairs at least 0.05 from the edge.
    max_shift: f64,
    /// A count mismatch explained by an eigenvalue within ten thresholds of the edge.
    near_edge_mismatch: bool,
}

/// Compares counts beyond `thr`. Both lists are sorted by distance and
/// paired one to one; an excess on either side is tolerated only when every
/// unpaired eigenvalue sits within 10·thr of the edge and the determinant
/// holds at least as many eigenvalues in total.
fn pair_side(det: &[f64], oracle: &[f64], thr: f64) -> Pairing {
    let far_det = det.iter().filter(|&&d| d >= thr).count();
    let far_oracle = oracle.iter().filter(|&&d| d >= thr).count();
    let max_shift = det
        .iter()
        .zip(oracle)
        .filter(|(a, b)| a.min(**b) >= 0.05)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if far_det == far_oracle {
        return Pairing { agrees: true, max_shift, near_edge_mismatch: false };
    }
    let (lo, hi) = (far_det.min(far_oracle), far_det.max(far_oracle));
    let longer = if far_det > far_oracle { det } else { oracle };
    let explained = longer[lo..hi].iter().all(|&d| d < 10.0 * thr) && det.len() >= far_oracle;
    Pairing { agrees: explained, max_shift, near_edge_mismatch: explained }
}

fn exact_counts(cfg: &VerifyConfig) -> Result<Outcome> {
    let calibration = self_calibrate(&CalibrationConfig {
        samples_per_component: cfg.samples_per_component,
        seed: cfg.seed,
        scan: cfg.scan,
        ..CalibrationConfig::default()
    })?;
    let mut failures = Vec::new();
    let test_points = [((1.0, 0.0, 0.0), 0), ((0.0, -1.0, 0.0), 1), ((-5.0, -11.0, 0.0), 2)];
    let mut points: Vec<CouplingTriple> = Vec::new();
    for ((g, l, m), zeta) in test_points {
        let c = CouplingTriple::new(g, l, m)?;
        let count = find_eigenvalues(SectorTag::Ees, c, SideTag::Below, &cfg.scan)?.count;
        let comp = Component { sector: SectorTag::Ees, side: SideTag::Below, index: zeta };
        let label = calibration.label(comp);
        if count != zeta || label != Some(zeta) || !comp.contains(c) {
            failures.push(format!("test point ({g},{l},{m}): count {count}, label {label:?}, expected {zeta}"));
        }
        points.push(c);
    }
    let mut sample_count = 0;
    for comp in &calibration.components {
        sample_count += comp.samples.len();
        if comp.samples.len() < cfg.samples_per_component || comp.counts.iter().any(|&n| n != comp.calibrated) {
            failures.push(format!("{} samples {} counts {:?}", comp.component.id(), comp.samples.len(), comp.counts));
        }
        if comp.calibrated != comp.component.index {
            failures.push(format!("{} calibrated to {}", comp.component.id(), comp.calibrated));
        }
        points.extend(&comp.samples);
    }

    let thr = cfg.comparison_threshold();
    let l = cfg.comparison_grid;
    let compared: Vec<Result<(CouplingTriple, bool, Pairing, Pairing)>> = points
        .par_iter()
        .map(|&c| {
            let report = spectral_report(c, &cfg.scan)?;
            let predicted = calibration.predicted_counts(c);
            let labels_agree = predicted.on_boundary() || (predicted.m, predicted.n) == (report.m, report.n);
            let fiber = StructuredFiber::new(Quasimomentum::ZERO, c, l)?;
            let mut sides = [Pairing::default(); 2];
            for (slot, side) in sides.iter_mut().zip(SideTag::BOTH) {
                let mut oracle: Vec<f64> = fiber
                    .eigenvalues_beyond(side, thr / 16.0, None)
                    .into_iter()
                    .map(|z| edge_distance(side, z))
                    .collect();
                oracle.sort_by(|a, b| b.total_cmp(a));
                *slot = pair_side(&determinant_distances(&report, side), &oracle, thr);
            }
            Ok((c, labels_agree, sides[0], sides[1]))
        })
        .collect();
    let mut max_shift: f64 = 0.0;
    let mut near_edge = 0;
    for r in compared {
        let (c, labels_agree, below, above) = r?;
        if !labels_agree {
            failures.push(format!("({:.4},{:.4},{:.4}): determinant totals differ from calibrated labels", c.gamma, c.lambda, c.mu));
        }
        for p in [below, above] {
            max_shift = max_shift.max(p.max_shift);
            near_edge += usize::from(p.near_edge_mismatch);
            if !p.agrees {
                failures.push(format!("({:.4},{:.4},{:.4}): oracle counts differ", c.gamma, c.lambda, c.mu));
            }
        }
    }
    if max_shift >= 1e-5 {
        failures.push(format!("eigenvalue shift {max_shift:.2e} exceeds 1e-5"));
    }
    let discrepancies = calibration.discrepancies.len();
    let detail = format!(
        "{} components, {sample_count} samples + 3 test points at L={l}, threshold {thr:.1e}; max shift {max_shift:.1e}; \
         {near_edge} near-edge pairings; {discrepancies} literal-label discrepancies logged{}",
        calibration.components.len(),
        if failures.is_empty() { String::new() } else { format!("; failures: {}", failures.join(" | ")) }
    );
    outcome(failures.is_empty(), detail)
}

fn rank_bounds(cfg: &VerifyConfig) -> Result<Outcome> {
    let mut r = rng(cfg, 6);
    let triples: Vec<CouplingTriple> = (0..200).map(|_| random_triple(&mut r, 20.0)).collect();
    let reports: Vec<SpectralReport> = triples.par_iter().map(|&c| spectral_report(c, &cfg.scan)).collect::<Result<_>>()?;
    let mut max_total = 0;
    let mut max_sector = [0usize; 3];
    let mut violations = 0;
    for rep in &reports {
        max_total = max_total.max(rep.m + rep.n);
        for (slot, sector) in max_sector.iter_mut().zip(SectorTag::ALL) {
            for side in SideTag::BOTH {
                let n = rep.count(sector, side);
                *slot = (*slot).max(n);
                violations += usize::from(n > sector.rank());
            }
        }
        violations += usize::from(rep.m + rep.n > 7);
    }
    let names: Vec<String> = SectorTag::ALL.iter().zip(max_sector).map(|(s, n)| format!("{}={n}", s.name())).collect();
    outcome(
        violations == 0,
        format!("200 triples; max per-sector counts {}; max m+n {max_total}; violations {violations}", names.join(" ")),
    )
}

fn counts_grow(cfg: &VerifyConfig) -> Result<Outcome> {
    let mut r = rng(cfg, 7);
    let triples: Vec<CouplingTriple> = (0..10).map(|_| random_triple(&mut r, 20.0)).collect();
    let ks: Vec<Quasimomentum> = (0..64)
        .map(|i| Quasimomentum::new(-PI + 2.0 * PI * (i / 8) as f64 / 8.0, -PI + 2.0 * PI * (i % 8) as f64 / 8.0))
        .collect();
    let l = cfg.theorem_grid;
    let records = triples
        .par_iter()
        .map(|&c| verify_theorems(c, &ks, l, None))
        .collect::<Result<Vec<_>>>()?;
    let failed = records.iter().filter(|r| !r.passed()).count();
    let counts: Vec<String> = records.iter().map(|r| format!("({},{})", r.m0, r.n0)).collect();
    outcome(failed == 0, format!("10 triples × 64 K at L={l}; (m,n) at K=0 {}; failing triples {failed}", counts.join(" ")))
}

fn gap_monotone(cfg: &VerifyConfig) -> Result<Outcome> {
    let mut r = rng(cfg, 8);
    let triples: Vec<CouplingTriple> = (0..5).map(|_| random_triple(&mut r, 20.0)).collect();
    let l = cfg.theorem_grid;
    let jobs: Vec<(usize, usize, usize)> =
        (0..5).flat_map(|t| (0..2).flat_map(move |j| (0..=8).map(move |i| (t, j, i)))).collect();
    let gaps: Vec<f64> = jobs
        .par_iter()
        .map(|&(t, j, i)| {
            let k = Quasimomentum::new(PI * i as f64 / 8.0, PI * j as f64 / 2.0);
            minimax_table(k, triples[t], l).map(|m| m.band.lo - m.e[0])
        })
        .collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    for row in gaps.chunks(9) {
        for w in row.windows(2) {
            worst = worst.max(w[0] - w[1]);
        }
    }
    let bound = gaps.iter().filter(|&&g| g > 0.0).count();
    outcome(
        worst <= 1e-9,
        format!("5 triples, 2 rows of 9 K at L={l}; {bound}/90 points with a bound state below; largest decrease {worst:.2e} (allowance 1e-9)"),
    )
}

fn log_slope(cfg: &VerifyConfig) -> Result<Outcome> {
    let mut r = rng(cfg, 9);
    let dist: f64 = 1e-8;
    let mut chosen = Vec::new();
    while chosen.len() < 5 {
        let c = random_triple(&mut r, 20.0);
        if SideTag::BOTH.iter().all(|&s| big_q(c, s).abs() > 0.1) {
            chosen.push(c);
        }
    }
    let mut worst: f64 = 0.0;
    let mut worst_slope: f64 = 0.0;
    let mut errors = Vec::new();
    for &c in &chosen {
        for side in SideTag::BOTH {
            let q = big_q(c, side);
            let at = |d: f64| match side {
                SideTag::Below => -d,
                SideTag::Above => 8.0 + d,
            };
            let delta = delta_ees(c, at(dist), &cfg.quadrature)?;
            let err = (delta * 4.0 * PI / dist.ln() + q).abs() / q.abs();
            // The log coefficient itself, free of the constant term.
            let far = delta_ees(c, at(1e-6), &cfg.quadrature)?;
            let slope = -4.0 * PI * (delta - far) / (dist.ln() - 1e-6f64.ln());
            worst_slope = worst_slope.max((slope - q).abs() / q.abs());
            worst = worst.max(err);
            errors.push(format!("{err:.3}"));
        }
    }
    outcome(
        worst < 0.05,
        format!(
            "relative error at distance 1e-8 per (triple, side) [{}] (tol 0.05); two-point log coefficient error {worst_slope:.1e}",
            errors.join(" ")
        ),
    )
}

fn dft_cospectral(cfg: &VerifyConfig) -> Result<Outcome> {
    let mut r = rng(cfg, 10);
    let mut jobs = Vec::new();
    for l in [16, 32] {
        for _ in 0..5 {
            jobs.push((l, random_k(&mut r), random_triple(&mut r, 20.0)));
        }
    }
    let diffs: Vec<f64> = jobs
        .par_iter()
        .map(|&(l, k, c)| {
            let a = eigenvalues_dense(&build_momentum_fiber(k, c, l)?, DENSE_CAP)?;
            let b = eigenvalues_dense(&build_position_fiber(k, c, l)?, DENSE_CAP)?;
            Ok(a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
        })
        .collect::<Result<_>>()?;
    let worst = diffs.iter().cloned().fold(0.0, f64::max);
    outcome(worst < 1e-9, format!("10 builds at L=16,32; max eigenvalue difference {worst:.1e} (tol 1e-9)"))
}

/// Closed-form number of ees eigenvalues beyond the band at μ = 0, decided by
/// the sign of γλ + 4λ + 2γ and the side of λ = −2.
fn zero_mu_count(gamma: f64, lambda: f64, side: SideTag) -> usize {
    // above the band use the mirror image (γ, λ) → (−γ, −λ)
    let (g, l) = match side {
        SideTag::Below => (gamma, lambda),
        SideTag::Above => (-gamma, -lambda),
    };
    let f = g * l + 4.0 * l + 2.0 * g;
    if f < 0.0 || (f == 0.0 && l < -2.0) {
        1
    } else if l > -2.0 {
        0
    } else {
        2
    }
}

fn zero_mu_counts(cfg: &VerifyConfig) -> Result<Outcome> {
    let mut mismatches = Vec::new();
    let mut seen = [[false; 3]; 2];
    for gamma in [-8.0, 1.0, 8.0] {
        for lambda in [-5.0, 0.0, 5.0] {
            let c = CouplingTriple::new(gamma, lambda, 0.0)?;
            for (s, side) in SideTag::BOTH.into_iter().enumerate() {
                let expected = zero_mu_count(gamma, lambda, side);
                seen[s][expected] = true;
                let list = find_eigenvalues(SectorTag::Ees, c, side, &cfg.scan)?;
                let simple = list.values.windows(2).all(|w| w[1] - w[0] > cfg.scan.proximity);
                if list.count != expected || !simple || list.even_multiplicity_suspect {
                    mismatches.push(format!("({gamma},{lambda}) {}: {} vs {expected}", side.name(), list.count));
                }
            }
        }
    }
    let all_cases = seen.iter().all(|s| s.iter().all(|&b| b));
    outcome(
        mismatches.is_empty() && all_cases,
        format!(
            "9 points × 2 sides; counts 0/1/2 all exercised: {all_cases}; mismatches {}",
            if mismatches.is_empty() { "none".to_string() } else { mismatches.join(" | ") }
        ),
    )
}

/// Seeded sweep for an interior triple with m + n = 7, keeping the one whose
/// eigenvalues lie deepest outside the band.
pub fn find_full_triple(cfg: &VerifyConfig) -> Result<(CouplingTriple, SpectralReport)> {
    let mut r = rng(cfg, 12);
    let mut candidates = Vec::new();
    for _ in 0..2_000_000 {
        let c = random_triple(&mut r, 20.0);
        let p = predicted_counts(c);
        if p.m + p.n == 7 && !p.on_boundary() {
            candidates.push(c);
            if candidates.len() == 48 {
                break;
            }
        }
    }
    let reports: Vec<SpectralReport> =
        candidates.par_iter().map(|&c| spectral_report(c, &cfg.scan)).collect::<Result<_>>()?;
    let depth = |rep: &SpectralReport| {
        rep.lists
            .iter()
            .flat_map(|l| l.values.iter().map(move |&z| edge_distance(l.side, z)))
            .fold(f64::INFINITY, f64::min)
    };
    reports
        .into_iter()
        .filter(|rep| rep.m + rep.n == 7 && rep.unresolved() == 0)
        .max_by(|a, b| depth(a).total_cmp(&depth(b)))
        .map(|rep| (rep.couplings, rep))
        .ok_or(Error::ScanExhausted(candidates.len()))
}

fn equality_case(cfg: &VerifyConfig) -> Result<Outcome> {
    let (c, report) = find_full_triple(cfg)?;
    let predicted = predicted_counts(c);
    let mut r = rng(cfg, 13);
    let ks: Vec<Quasimomentum> = (0..5).map(|_| random_k(&mut r)).collect();
    let record = verify_theorems(c, &ks, cfg.theorem_grid, Some((predicted.m, predicted.n)))?;
    let seen: Vec<String> = record.checks.iter().map(|k| format!("({},{})", k.m, k.n)).collect();
    outcome(
        record.passed() && (report.m, report.n) == (predicted.m, predicted.n),
        format!(
            "triple ({:.4},{:.4},{:.4}) predicted ({},{}) determinant ({},{}); oracle at 5 K, L={}: {}",
            c.gamma,
            c.lambda,
            c.mu,
            predicted.m,
            predicted.n,
            report.m,
            report.n,
            cfg.theorem_grid,
            seen.join(" ")
        ),
    )
}

/// Calibration shared by commands that want calibrated labels.
pub fn calibrate(cfg: &VerifyConfig) -> Result<Calibration> {
    self_calibrate(&CalibrationConfig { samples_per_component: cfg.samples_per_component, seed: cfg.seed, scan: cfg.scan, ..CalibrationConfig::default() })
}
