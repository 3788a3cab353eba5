//! Lippmann–Schwinger determinants of the three K = 0 sectors and their zeros.
//!
//! Each sector's interaction is a finite sum w_k |φ_k⟩⟨φ_k| over orthonormal
//! kernels, so besides the determinant Δ(z) = det(I + W G(z)) with
//! G_kl(z) = ⟨φ_k, (H_0 − z)^{-1} φ_l⟩ we also have an exact eigenvalue count
//! from the inertia of W^{-1} + G(z). The scan brackets zeros of Δ by sign
//! changes; the count certifies each bracket and exposes roots of even
//! multiplicity or pairs closer than the scan spacing.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{CouplingTriple, SectorTag, SideTag};
use crate::torus::{
    asymptotic_reference, ea_integrals, greens_matrix, greens_matrix_direct, oos_integral, sector_integrals,
    GreensMatrix, QuadratureSpec, SectorIntegrals,
};

const BAND_LO: f64 = 0.0;
const BAND_HI: f64 = 8.0;

/// Controls for the outward root scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    /// Closest approach to the band edge.
    pub edge_offset: f64,
    /// Spacing at which the scan switches from log-spaced to stepped points.
    pub initial_step: f64,
    /// Geometric growth of the step.
    pub growth: f64,
    /// Absolute bisection tolerance in z.
    pub bisect_tol: f64,
    /// Roots this close to the edge or to each other raise the proximity flag.
    pub proximity: f64,
    /// Integrate every Green's entry instead of deriving the second row.
    pub direct_greens: bool,
    pub quadrature: QuadratureSpec,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            edge_offset: 1e-9,
            initial_step: 1e-3,
            growth: 1.5,
            bisect_tol: 1e-12,
            proximity: 1e-6,
            direct_greens: false,
            quadrature: QuadratureSpec::default(),
        }
    }
}

impl ScanConfig {
    pub fn validate(&self) -> Result<()> {
        self.quadrature.validate()?;
        let positive = [
            ("edge_offset", self.edge_offset),
            ("initial_step", self.initial_step),
            ("bisect_tol", self.bisect_tol),
            ("proximity", self.proximity),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.edge_offset >= 1.0 {
            return Err(Error::Config(format!("edge_offset must be below 1, got {}", self.edge_offset)));
        }
        if !(self.growth > 1.0 && self.growth.is_finite()) {
            return Err(Error::Config(format!("growth must exceed 1, got {}", self.growth)));
        }
        Ok(())
    }
}

/// Eigenvalues of one sector on one side of the band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueList {
    pub sector: SectorTag,
    pub side: SideTag,
    /// Located eigenvalues, ascending, with multiplicity.
    pub values: Vec<f64>,
    /// Eigenvalues closer to the edge than `edge_offset`; counted but not located.
    pub unresolved: usize,
    pub count: usize,
    /// Some root sits within `proximity` of the edge or of another root.
    pub boundary_proximity: bool,
    /// Some root was found by counting rather than by a sign change of Δ.
    pub even_multiplicity_suspect: bool,
}

/// All six sector lists at K = 0 and the totals below (m) and above (n).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub couplings: CouplingTriple,
    pub lists: Vec<EigenvalueList>,
    pub m: usize,
    pub n: usize,
}

impl SpectralReport {
    pub fn list(&self, sector: SectorTag, side: SideTag) -> &EigenvalueList {
        self.lists
            .iter()
            .find(|l| l.sector == sector && l.side == side)
            .expect("report holds all six lists")
    }

    pub fn count(&self, sector: SectorTag, side: SideTag) -> usize {
        self.list(sector, side).count
    }

    pub fn unresolved(&self) -> usize {
        self.lists.iter().map(|l| l.unresolved).sum()
    }
}

fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Cofactor expansion along the first row.
pub fn det4(m: [[f64; 4]; 4]) -> f64 {
    let mut total = 0.0;
    for col in 0..4 {
        let mut minor = [[0.0; 3]; 3];
        for (r, row) in m.iter().skip(1).enumerate() {
            let mut c = 0;
            for (k, &v) in row.iter().enumerate() {
                if k != col {
                    minor[r][c] = v;
                    c += 1;
                }
            }
        }
        let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * m[0][col] * det3(minor);
    }
    total
}

/// Column weights (2γ, λ, μ, μ) of the ees determinant.
fn ees_columns(c: CouplingTriple) -> [f64; 4] {
    [2.0 * c.gamma, c.lambda, c.mu, c.mu]
}

/// det[δ_ij + a_ij κ_j] with κ = (2γ, λ, μ, μ).
pub fn ees_determinant(c: CouplingTriple, a: &[[f64; 4]; 4]) -> f64 {
    let k = ees_columns(c);
    let mut m = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            m[i][j] = a[i][j] * k[j] + if i == j { 1.0 } else { 0.0 };
        }
    }
    det4(m)
}

pub fn oos_determinant(mu: f64, c_oos: f64) -> f64 {
    1.0 + mu * c_oos
}

/// (1 + λg11)(1 + μg22) − λμ g12².
pub fn ea_determinant(lambda: f64, mu: f64, g: [f64; 3]) -> f64 {
    (1.0 + lambda * g[0]) * (1.0 + mu * g[2]) - lambda * mu * g[1] * g[1]
}

pub fn delta_oos(mu: f64, z: f64, spec: &QuadratureSpec) -> Result<f64> {
    Ok(oos_determinant(mu, oos_integral(z, spec)?))
}

pub fn delta_ea(lambda: f64, mu: f64, z: f64, spec: &QuadratureSpec) -> Result<f64> {
    Ok(ea_determinant(lambda, mu, ea_integrals(z, spec)?))
}

pub fn delta_ees(c: CouplingTriple, z: f64, spec: &QuadratureSpec) -> Result<f64> {
    Ok(ees_determinant(c, &greens_matrix(z, spec)?.a))
}

/// Same as [`delta_ees`] with every Green's entry integrated directly.
pub fn delta_ees_direct(c: CouplingTriple, z: f64, spec: &QuadratureSpec) -> Result<f64> {
    Ok(ees_determinant(c, &greens_matrix_direct(z, spec)?.a))
}

/// Threshold expansion Δ^ees ≈ slope·ln(dist) + constant, where `dist` is the
/// distance to the band edge on `side`; returns (slope, constant).
///
/// Green's entries are affine in L = ln(dist) to this order and the L-part has
/// rank one, so the determinant is affine in L and two evaluations fix it.
pub fn ees_threshold_expansion(c: CouplingTriple, side: SideTag) -> (f64, f64) {
    let at = |log_dist: f64| {
        let dist = log_dist.exp();
        let z = match side {
            SideTag::Below => BAND_LO - dist,
            SideTag::Above => BAND_HI + dist,
        };
        let mut a = [[0.0; 4]; 4];
        for (i, row) in a.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = asymptotic_reference((i + 1, j + 1), side, z);
            }
        }
        ees_determinant(c, &a)
    };
    let d0 = at(0.0);
    (at(1.0) - d0, d0)
}

/// Orthonormal-kernel form w_k|φ_k⟩⟨φ_k| of one sector.
#[derive(Debug, Clone)]
struct SectorForm {
    sector: SectorTag,
    c: CouplingTriple,
}

impl SectorForm {
    /// Kernel weights in the normalisation where G = 2 × (stored integrals).
    fn weights(&self) -> Vec<f64> {
        let c = self.c;
        match self.sector {
            SectorTag::Ees => vec![c.gamma, 0.5 * c.lambda, 0.5 * c.mu, 0.5 * c.mu],
            SectorTag::Oos => vec![0.5 * c.mu],
            SectorTag::Ea => vec![0.5 * c.lambda, 0.5 * c.mu],
        }
    }

    fn gram(&self, s: &SectorIntegrals) -> DMatrix<f64> {
        match self.sector {
            SectorTag::Ees => DMatrix::from_fn(4, 4, |i, j| 2.0 * s.greens.a[i][j]),
            SectorTag::Oos => DMatrix::from_element(1, 1, 2.0 * s.c_oos),
            SectorTag::Ea => {
                let g = s.g;
                DMatrix::from_row_slice(2, 2, &[2.0 * g[0], 2.0 * g[1], 2.0 * g[1], 2.0 * g[2]])
            }
        }
    }

    fn determinant(&self, s: &SectorIntegrals) -> f64 {
        match self.sector {
            SectorTag::Ees => ees_determinant(self.c, &s.greens.a),
            SectorTag::Oos => oos_determinant(self.c.mu, s.c_oos),
            SectorTag::Ea => ea_determinant(self.c.lambda, self.c.mu, s.g),
        }
    }

    fn is_trivial(&self) -> bool {
        self.weights().iter().all(|&w| w == 0.0)
    }

    /// Number of eigenvalues strictly beyond z on `side` (below z for `Below`).
    fn count_beyond(&self, side: SideTag, s: &SectorIntegrals) -> usize {
        let w = self.weights();
        let active: Vec<usize> = (0..w.len()).filter(|&k| w[k] != 0.0).collect();
        if active.is_empty() {
            return 0;
        }
        let g = self.gram(s);
        let n = active.len();
        let m = DMatrix::from_fn(n, n, |i, j| {
            let (a, b) = (active[i], active[j]);
            g[(a, b)] + if i == j { 1.0 / w[a] } else { 0.0 }
        });
        let eig = SymmetricEigen::new(m).eigenvalues;
        match side {
            SideTag::Below => {
                let pos = eig.iter().filter(|&&v| v > 0.0).count();
                pos.saturating_sub(active.iter().filter(|&&k| w[k] > 0.0).count())
            }
            SideTag::Above => {
                let neg = eig.iter().filter(|&&v| v < 0.0).count();
                neg.saturating_sub(active.iter().filter(|&&k| w[k] < 0.0).count())
            }
        }
    }
}

/// Evaluates sector integrals at a distance from the band edge.
struct Probe<'a> {
    side: SideTag,
    cfg: &'a ScanConfig,
}

impl Probe<'_> {
    fn z(&self, dist: f64) -> f64 {
        match self.side {
            SideTag::Below => BAND_LO - dist,
            SideTag::Above => BAND_HI + dist,
        }
    }

    fn at(&self, dist: f64) -> Result<SectorIntegrals> {
        sector_integrals(self.z(dist), &self.cfg.quadrature, self.cfg.direct_greens)
    }

    /// Integrals exactly at the band edge, where only the oos and ea ones are finite.
    fn at_edge(&self) -> Result<SectorIntegrals> {
        let z = self.z(0.0);
        let nan = [[f64::NAN; 4]; 4];
        Ok(SectorIntegrals {
            z,
            greens: GreensMatrix { z, a: nan },
            c_oos: oos_integral(z, &self.cfg.quadrature)?,
            g: ea_integrals(z, &self.cfg.quadrature)?,
        })
    }
}

/// Scan distances: log-spaced up to `initial_step`, then geometrically growing steps.
fn scan_distances(cfg: &ScanConfig, reach: f64) -> Result<Vec<f64>> {
    const MAX_STEPS: usize = 1_000_000;
    let mut out = vec![cfg.edge_offset];
    let mut d = cfg.edge_offset;
    while d * cfg.growth < cfg.initial_step.min(reach) {
        d *= cfg.growth;
        out.push(d);
    }
    let mut step = cfg.initial_step;
    while d < reach {
        d = (d + step).min(reach);
        out.push(d);
        step *= cfg.growth;
        if out.len() > MAX_STEPS {
            return Err(Error::ScanExhausted(MAX_STEPS));
        }
    }
    Ok(out)
}

struct Sample {
    dist: f64,
    delta: f64,
    beyond: usize,
}

fn sample(form: &SectorForm, probe: &Probe, dist: f64) -> Result<Sample> {
    let s = probe.at(dist)?;
    Ok(Sample { dist, delta: form.determinant(&s), beyond: form.count_beyond(probe.side, &s) })
}

/// Number of eigenvalues strictly between the edge and `edge_offset`.
fn unresolved_near_edge(form: &SectorForm, probe: &Probe, first: &Sample) -> Result<usize> {
    match form.sector {
        SectorTag::Ees => {
            // Δ → −sign(slope)·∞ as dist → 0 unless the log coefficient vanishes.
            let (slope, constant) = ees_threshold_expansion(form.c, probe.side);
            let scale = ees_columns(form.c).iter().map(|k| 1.0 + k.abs()).product::<f64>();
            let limit = if slope.abs() > 1e-13 * scale { -slope } else { constant };
            Ok(usize::from(limit * first.delta < 0.0))
        }
        SectorTag::Oos | SectorTag::Ea => {
            let edge = probe.at_edge()?;
            let total = form.count_beyond(probe.side, &edge);
            Ok(total.saturating_sub(first.beyond))
        }
    }
}

/// Bisects a bracket holding exactly one sign change of Δ.
fn bisect_sign(form: &SectorForm, probe: &Probe, mut lo: Sample, mut hi: Sample) -> Result<f64> {
    while hi.dist - lo.dist > probe.cfg.bisect_tol {
        let mid = 0.5 * (lo.dist + hi.dist);
        if mid <= lo.dist || mid >= hi.dist {
            break;
        }
        let s = sample(form, probe, mid)?;
        if (s.delta > 0.0) == (lo.delta > 0.0) {
            lo = s;
        } else {
            hi = s;
        }
    }
    Ok(probe.z(0.5 * (lo.dist + hi.dist)))
}

/// Splits a bracket by counts until every piece isolates one eigenvalue.
fn isolate(form: &SectorForm, probe: &Probe, lo: Sample, hi: Sample, out: &mut Vec<(f64, bool)>) -> Result<()> {
    let inside = lo.beyond - hi.beyond;
    if inside == 0 {
        return Ok(());
    }
    let sign_change = (lo.delta > 0.0) != (hi.delta > 0.0);
    if inside == 1 && sign_change {
        out.push((bisect_sign(form, probe, lo, hi)?, false));
        return Ok(());
    }
    if hi.dist - lo.dist <= probe.cfg.bisect_tol {
        let z = probe.z(0.5 * (lo.dist + hi.dist));
        out.extend(std::iter::repeat_n((z, true), inside));
        return Ok(());
    }
    let mid = sample(form, probe, 0.5 * (lo.dist + hi.dist))?;
    let upper = Sample { dist: mid.dist, delta: mid.delta, beyond: mid.beyond };
    isolate(form, probe, lo, mid, out)?;
    isolate(form, probe, upper, hi, out)
}

/// Eigenvalues of one sector of H(0) on one side of the band.
pub fn find_eigenvalues(sector: SectorTag, c: CouplingTriple, side: SideTag, cfg: &ScanConfig) -> Result<EigenvalueList> {
    cfg.validate()?;
    let form = SectorForm { sector, c };
    let mut list = EigenvalueList {
        sector,
        side,
        values: Vec::new(),
        unresolved: 0,
        count: 0,
        boundary_proximity: false,
        even_multiplicity_suspect: false,
    };
    if form.is_trivial() {
        return Ok(list);
    }
    let probe = Probe { side, cfg };
    // No eigenvalue lies farther from the band than the interaction norm.
    let reach = c.interaction_norm() * (1.0 + 1e-9) + 1e-6;
    let dists = scan_distances(cfg, reach)?;
    let mut samples = Vec::with_capacity(dists.len());
    for &d in &dists {
        samples.push(sample(&form, &probe, d)?);
    }
    list.unresolved = unresolved_near_edge(&form, &probe, &samples[0])?;
    let mut roots = Vec::new();
    let mut iter = samples.into_iter();
    let mut prev = iter.next().expect("at least one scan point");
    for next in iter {
        let keep = Sample { dist: next.dist, delta: next.delta, beyond: next.beyond };
        let sign_change = (prev.delta > 0.0) != (next.delta > 0.0);
        if prev.beyond > next.beyond || sign_change {
            isolate(&form, &probe, prev, next, &mut roots)?;
        }
        prev = keep;
    }
    list.even_multiplicity_suspect = roots.iter().any(|r| r.1);
    let mut values: Vec<f64> = roots.into_iter().map(|r| r.0).collect();
    values.sort_by(f64::total_cmp);
    let edge = probe.z(0.0);
    list.boundary_proximity = list.unresolved > 0
        || values.iter().any(|&z| (z - edge).abs() < cfg.proximity)
        || values.windows(2).any(|w| w[1] - w[0] < cfg.proximity);
    list.count = values.len() + list.unresolved;
    list.values = values;
    Ok(list)
}

pub fn spectral_report(c: CouplingTriple, cfg: &ScanConfig) -> Result<SpectralReport> {
    let mut lists = Vec::with_capacity(6);
    for side in SideTag::BOTH {
        for sector in SectorTag::ALL {
            lists.push(find_eigenvalues(sector, c, side, cfg)?);
        }
    }
    let total = |side: SideTag| lists.iter().filter(|l| l.side == side).map(|l| l.count).sum();
    let (m, n) = (total(SideTag::Below), total(SideTag::Above));
    Ok(SpectralReport { couplings: c, lists, m, n })
}

/// Eigenvalue count of one sector beyond `z` (below z if z < 0, above z if z > 8).
pub fn sector_count_beyond(sector: SectorTag, c: CouplingTriple, z: f64, spec: &QuadratureSpec) -> Result<usize> {
    let side = if z < BAND_LO { SideTag::Below } else { SideTag::Above };
    let s = sector_integrals(z, spec, false)?;
    Ok(SectorForm { sector, c }.count_beyond(side, &s))
}
