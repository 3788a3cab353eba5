//! Coupling-space regions at K = 0 with constant eigenvalue counts per sector.
//!
//! Below the band the ees count is governed by the sign structure of
//! Q^−(γ,λ,μ) = (γ+4)(λQ_0(μ) + Q_1(μ)) − 8Q_0(μ); the above-band regions are
//! the point reflections c → −c of the below-band ones, because
//! Δ_c(z) = Δ_{−c}(8 − z) in every sector.

use std::f64::consts::PI;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::determinants::{find_eigenvalues, ScanConfig};
use crate::error::{Error, Result};
use crate::lattice::{CouplingTriple, SectorTag, SideTag};

/// Relative distance below which a point counts as lying on a boundary.
const BOUNDARY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifierConstants {
    /// Roots μ_0^− < μ_0^+ of Q_0^−.
    pub mu0_minus: f64,
    pub mu0_plus: f64,
    /// Roots μ_1^− < μ_1^+ of Q_1^−, from the discriminant that makes
    /// Q^− the threshold log coefficient of Δ^ees.
    pub mu1_minus: f64,
    pub mu1_plus: f64,
    /// Roots from the discriminant 1161π² − 5664π + 6400, for comparison only.
    pub mu1_minus_alt: f64,
    pub mu1_plus_alt: f64,
    /// 4(4−π)/(32−9π), the asymptote used by [`classify_ea_literal`].
    pub mu_star: f64,
    /// 2(4−π)/(16−5π): the ea boundary below the band is λ = 4/(μ + μ̃) − 8.
    pub mu_tilde: f64,
    /// 3π/(3π−8): oos threshold coupling.
    pub s_threshold: f64,
}

fn quadratic_roots(b: f64, disc: f64, denom: f64) -> (f64, f64) {
    let r = disc.sqrt();
    let (a, c) = ((b - r) / denom, (b + r) / denom);
    (a.min(c), a.max(c))
}

pub fn constants() -> &'static ClassifierConstants {
    static CONSTANTS: OnceLock<ClassifierConstants> = OnceLock::new();
    CONSTANTS.get_or_init(|| {
        let p2 = PI * PI;
        let d = 16.0 - 5.0 * PI;
        let (mu0_minus, mu0_plus) =
            quadratic_roots(-80.0 + 24.0 * PI, 666.0 * p2 - 4128.0 * PI + 6400.0, 3.0 * d);
        let (mu1_minus, mu1_plus) =
            quadratic_roots(-80.0 + 21.0 * PI, 801.0 * p2 - 4512.0 * PI + 6400.0, 12.0 * d);
        let (mu1_minus_alt, mu1_plus_alt) =
            quadratic_roots(-80.0 + 21.0 * PI, 1161.0 * p2 - 5664.0 * PI + 6400.0, 12.0 * d);
        ClassifierConstants {
            mu0_minus,
            mu0_plus,
            mu1_minus,
            mu1_plus,
            mu1_minus_alt,
            mu1_plus_alt,
            mu_star: 4.0 * (4.0 - PI) / (32.0 - 9.0 * PI),
            mu_tilde: 2.0 * (4.0 - PI) / d,
            s_threshold: 3.0 * PI / (3.0 * PI - 8.0),
        }
    })
}

/// Maps the above-band argument onto the below-band one.
fn reflect(mu: f64, side: SideTag) -> f64 {
    match side {
        SideTag::Below => mu,
        SideTag::Above => -mu,
    }
}

/// Q_0^∓(μ) = ((16−5π)/(4π))(μ ∓ μ_0^−)(μ ∓ μ_0^+).
pub fn q0_poly(mu: f64, side: SideTag) -> f64 {
    let k = constants();
    let m = reflect(mu, side);
    (16.0 - 5.0 * PI) / (4.0 * PI) * (m - k.mu0_minus) * (m - k.mu0_plus)
}

/// Q_1^∓(μ) = (2(16−5π)/π)(μ ∓ μ_1^−)(μ ∓ μ_1^+).
pub fn q1_poly(mu: f64, side: SideTag) -> f64 {
    let k = constants();
    let m = reflect(mu, side);
    2.0 * (16.0 - 5.0 * PI) / PI * (m - k.mu1_minus) * (m - k.mu1_plus)
}

/// ∓1: the sign carried by the γ shift and the Q_1 term.
fn orient(side: SideTag) -> f64 {
    match side {
        SideTag::Below => 1.0,
        SideTag::Above => -1.0,
    }
}

/// λQ_0^∓(μ) ± Q_1^∓(μ), the denominator of the γ surface.
fn lambda_form(lambda: f64, mu: f64, side: SideTag) -> f64 {
    lambda * q0_poly(mu, side) + orient(side) * q1_poly(mu, side)
}

/// Q^∓(γ,λ,μ) = (γ ± 4)(λQ_0^∓ ± Q_1^∓) − 8Q_0^∓ (Below is the "−" variant).
pub fn big_q(c: CouplingTriple, side: SideTag) -> f64 {
    let s = orient(side);
    (c.gamma + 4.0 * s) * lambda_form(c.lambda, c.mu, side) - 8.0 * q0_poly(c.mu, side)
}

/// The fully expanded cubic form of Q^∓ as printed; it does not reproduce
/// [`big_q`] and is only used to report the deviation.
pub fn big_q_expanded(c: CouplingTriple, side: SideTag) -> f64 {
    let (g, l, m) = (c.gamma, c.lambda, c.mu);
    let s = orient(side);
    let p2 = PI * PI;
    s * (g + 2.0 * l + 4.0 * m) + 0.5 * g * l + (39.0 * PI - 104.0) / (3.0 * PI) * g * m
        + (153.0 * PI - 448.0) / (6.0 * PI) * l * m
        + (15.0 * PI - 40.0) / (3.0 * PI) * m * m
        + s * ((18.0 * PI - 52.0) / (3.0 * PI) * g * l * m
            + 2.0 * (900.0 * PI - 135.0 * p2 - 1472.0) / (9.0 * p2) * g * m * m
            + (3720.0 * PI - 585.0 * p2 - 5888.0) / (9.0 * p2) * l * m * m)
        + (3720.0 * PI - 585.0 * p2 - 5888.0) / (32.0 * p2) * g * l * m * m
}

/// λ^∓(μ) = ∓Q_1^∓(μ)/Q_0^∓(μ); the zero set of λQ_0^∓ ± Q_1^∓.
pub fn lambda_curve(mu: f64, side: SideTag) -> Result<f64> {
    let q0 = q0_poly(mu, side);
    if q0 == 0.0 {
        return Err(Error::Pole { what: "lambda curve", at: mu });
    }
    Ok(-orient(side) * q1_poly(mu, side) / q0)
}

/// γ^∓(λ,μ) = 8Q_0^∓/(λQ_0^∓ ± Q_1^∓) ∓ 4; the zero set of Q^∓.
pub fn gamma_surface(lambda: f64, mu: f64, side: SideTag) -> Result<f64> {
    let den = lambda_form(lambda, mu, side);
    if den == 0.0 {
        return Err(Error::Pole { what: "gamma surface", at: lambda });
    }
    Ok(8.0 * q0_poly(mu, side) / den - 4.0 * orient(side))
}

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() <= BOUNDARY_TOL * a.abs().max(b.abs()).max(1.0)
}

/// Sector indices of one side together with boundary flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionLabel {
    pub side: SideTag,
    /// oos index 0..=1.
    pub alpha: usize,
    /// ea index 0..=2.
    pub beta: usize,
    /// ees index 0..=4.
    pub zeta: usize,
    /// Boundary flags in the order oos, ea, ees.
    pub on_boundary: [bool; 3],
}

impl RegionLabel {
    pub fn total(&self) -> usize {
        self.alpha + self.beta + self.zeta
    }

    pub fn index(&self, sector: SectorTag) -> usize {
        match sector {
            SectorTag::Oos => self.alpha,
            SectorTag::Ea => self.beta,
            SectorTag::Ees => self.zeta,
        }
    }

    pub fn boundary(&self, sector: SectorTag) -> bool {
        match sector {
            SectorTag::Oos => self.on_boundary[0],
            SectorTag::Ea => self.on_boundary[1],
            SectorTag::Ees => self.on_boundary[2],
        }
    }
}

/// Index and boundary flag of one sector classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectorIndex {
    pub index: usize,
    pub on_boundary: bool,
}

/// α: 1 iff ∓μ > 3π/(3π−8); the threshold itself belongs to index 0.
pub fn classify_oos(mu: f64, side: SideTag) -> SectorIndex {
    let m = reflect(mu, side);
    let s = constants().s_threshold;
    SectorIndex { index: usize::from(m < -s), on_boundary: near(m, -s) }
}

/// β below the band from the exact edge values of the ea integrals:
/// index 0 for λ ≥ 4/(μ+μ̃) − 8 with μ > −μ̃, index 2 for λ below the curve
/// with μ < −μ̃, index 1 otherwise (including the line μ = −μ̃).
/// Above the band the same rule applies to (−λ, −μ).
pub fn classify_ea(lambda: f64, mu: f64, side: SideTag) -> SectorIndex {
    let (l, m) = (reflect(lambda, side), reflect(mu, side));
    let mt = constants().mu_tilde;
    if near(m, -mt) {
        return SectorIndex { index: 1, on_boundary: true };
    }
    let curve = 4.0 / (m + mt) - 8.0;
    let above_curve = l >= curve;
    let index = match (above_curve, m > -mt) {
        (true, true) => 0,
        (false, false) => 2,
        _ => 1,
    };
    SectorIndex { index, on_boundary: near(l, curve) }
}

/// β from the printed three-piece sets with asymptote μ* and shift +8,
/// evaluated literally, including the line μ = ±μ* in index 1.
pub fn classify_ea_literal(lambda: f64, mu: f64, side: SideTag) -> SectorIndex {
    let s = orient(side);
    let ms = constants().mu_star;
    let (l, m) = (s * lambda, s * mu);
    // here `m` plays the role of ∓μ, so ±μ = −m
    if near(-m, ms) {
        return SectorIndex { index: 1, on_boundary: true };
    }
    let curve = 4.0 / (m + ms) + 8.0;
    let ge = l >= curve;
    let index = match (ge, -m < ms) {
        (true, true) => 0,
        (false, false) => 2,
        _ => 1,
    };
    SectorIndex { index, on_boundary: near(l, curve) }
}

/// D-region index 1..=4 of (λ, μ) and whether it lies on a τ curve or a
/// vertical boundary line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DPlacement {
    Region { index: usize, on_boundary: bool },
    /// On τ_j, which belongs to C_j for every γ.
    Curve(usize),
}

pub fn d_region(lambda: f64, mu: f64, side: SideTag) -> DPlacement {
    let k = constants();
    let (l, m) = (reflect(lambda, side), reflect(mu, side));
    let on_line = near(m, k.mu0_minus) || near(m, k.mu0_plus);
    // the vertical lines μ = μ_0^+ and μ = μ_0^− go to D_2 and D_3
    if m == k.mu0_plus {
        return DPlacement::Region { index: 2, on_boundary: true };
    }
    if m == k.mu0_minus {
        return DPlacement::Region { index: 3, on_boundary: true };
    }
    let interval = if m > k.mu0_plus {
        1
    } else if m > k.mu0_minus {
        2
    } else {
        3
    };
    let curve = -q1_poly(m, SideTag::Below) / q0_poly(m, SideTag::Below);
    if l == curve {
        return DPlacement::Curve(interval);
    }
    let index = if l > curve { interval } else { interval + 1 };
    DPlacement::Region { index, on_boundary: on_line || near(l, curve) }
}

/// ζ on one side: inside D_j the surface Γ_j splits C_{j−1} (γ above it)
/// from C_j (γ below it); points on Γ_j are assigned to the lower index.
pub fn classify_ees(c: CouplingTriple, side: SideTag) -> SectorIndex {
    let r = match side {
        SideTag::Below => c,
        SideTag::Above => c.negated(),
    };
    match d_region(r.lambda, r.mu, SideTag::Below) {
        DPlacement::Curve(j) => SectorIndex { index: j, on_boundary: true },
        DPlacement::Region { index: j, on_boundary } => {
            let surface = gamma_surface(r.lambda, r.mu, SideTag::Below).unwrap_or(f64::INFINITY);
            let zeta = if r.gamma >= surface { j - 1 } else { j };
            SectorIndex { index: zeta, on_boundary: on_boundary || near(r.gamma, surface) }
        }
    }
}

/// ζ⁺ from the printed above-band inequalities (λ > λ⁺(μ) for D⁺_1,
/// γ > γ⁺ for C⁺_0) taken literally, for comparison only.
pub fn classify_ees_literal_above(c: CouplingTriple) -> SectorIndex {
    let k = constants();
    let side = SideTag::Above;
    let m = c.mu;
    let (lo, hi) = (-k.mu0_plus, -k.mu0_minus);
    let interval = if m < lo {
        1
    } else if m < hi {
        2
    } else {
        3
    };
    if m == lo || m == hi {
        let j = if m == lo { 2 } else { 3 };
        let surface = gamma_surface(c.lambda, m, side).unwrap_or(f64::INFINITY);
        let zeta = if c.gamma >= surface { j - 1 } else { j };
        return SectorIndex { index: zeta, on_boundary: true };
    }
    let curve = q1_poly(m, side) / q0_poly(m, side);
    if c.lambda == curve {
        return SectorIndex { index: interval, on_boundary: true };
    }
    let j = if c.lambda > curve { interval } else { interval + 1 };
    let surface = gamma_surface(c.lambda, m, side).unwrap_or(f64::INFINITY);
    let zeta = if c.gamma >= surface { j - 1 } else { j };
    SectorIndex { index: zeta, on_boundary: near(c.lambda, curve) || near(c.gamma, surface) }
}

pub fn classify(c: CouplingTriple, side: SideTag) -> RegionLabel {
    let a = classify_oos(c.mu, side);
    let b = classify_ea(c.lambda, c.mu, side);
    let z = classify_ees(c, side);
    RegionLabel {
        side,
        alpha: a.index,
        beta: b.index,
        zeta: z.index,
        on_boundary: [a.on_boundary, b.on_boundary, z.on_boundary],
    }
}

fn sector_index(c: CouplingTriple, sector: SectorTag, side: SideTag) -> SectorIndex {
    match sector {
        SectorTag::Oos => classify_oos(c.mu, side),
        SectorTag::Ea => classify_ea(c.lambda, c.mu, side),
        SectorTag::Ees => classify_ees(c, side),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LabelSource {
    Printed,
    SelfCalibrated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictedCounts {
    pub m: usize,
    pub n: usize,
    pub below: RegionLabel,
    pub above: RegionLabel,
    pub source: LabelSource,
}

impl PredictedCounts {
    pub fn on_boundary(&self) -> bool {
        self.below.on_boundary.iter().chain(&self.above.on_boundary).any(|&b| b)
    }
}

/// One connected component of a sector's decomposition on one side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Component {
    pub sector: SectorTag,
    pub side: SideTag,
    pub index: usize,
}

impl Component {
    pub fn all() -> Vec<Component> {
        let mut out = Vec::new();
        for side in SideTag::BOTH {
            for sector in SectorTag::ALL {
                let top = match sector {
                    SectorTag::Oos => 1,
                    SectorTag::Ea => 2,
                    SectorTag::Ees => 4,
                };
                out.extend((0..=top).map(|index| Component { sector, side, index }));
            }
        }
        out
    }

    pub fn id(&self) -> String {
        let set = match self.sector {
            SectorTag::Oos => "S",
            SectorTag::Ea => "A",
            SectorTag::Ees => "C",
        };
        let sign = match self.side {
            SideTag::Below => "-",
            SideTag::Above => "+",
        };
        format!("{set}{sign}{}", self.index)
    }

    pub fn contains(&self, c: CouplingTriple) -> bool {
        sector_index(c, self.sector, self.side).index == self.index
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationConfig {
    pub samples_per_component: usize,
    pub seed: u64,
    /// Half-width of the sampling box in every coupling.
    pub radius: f64,
    /// Minimum relative distance of a sample from any boundary of its sector.
    pub margin: f64,
    pub max_draws: usize,
    pub scan: ScanConfig,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        Self {
            samples_per_component: 20,
            seed: 0x5eed,
            radius: 20.0,
            margin: 0.05,
            max_draws: 2_000_000,
            scan: ScanConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentCalibration {
    pub component: Component,
    pub printed: usize,
    pub calibrated: usize,
    pub samples: Vec<CouplingTriple>,
    pub counts: Vec<usize>,
}

/// A structured discrepancy line: component, printed label, calibrated label and sample points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub component: String,
    pub printed: usize,
    pub calibrated: usize,
    pub points: Vec<CouplingTriple>,
    pub note: String,
}

impl std::fmt::Display for Discrepancy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "component={} printed={} calibrated={} note=\"{}\" points=", self.component, self.printed, self.calibrated, self.note)?;
        for (k, p) in self.points.iter().enumerate() {
            let sep = if k == 0 { "" } else { ";" };
            write!(f, "{sep}({},{},{})", p.gamma, p.lambda, p.mu)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub components: Vec<ComponentCalibration>,
    pub discrepancies: Vec<Discrepancy>,
}

impl Calibration {
    pub fn label(&self, component: Component) -> Option<usize> {
        self.components.iter().find(|k| k.component == component).map(|k| k.calibrated)
    }

    /// Counts predicted from calibrated labels of the components containing `c`.
    pub fn predicted_counts(&self, c: CouplingTriple) -> PredictedCounts {
        let mut p = predicted_counts(c);
        for label in [&mut p.below, &mut p.above] {
            for sector in SectorTag::ALL {
                let index = label.index(sector);
                let value = self.label(Component { sector, side: label.side, index }).unwrap_or(index);
                match sector {
                    SectorTag::Oos => label.alpha = value,
                    SectorTag::Ea => label.beta = value,
                    SectorTag::Ees => label.zeta = value,
                }
            }
        }
        p.m = p.below.total();
        p.n = p.above.total();
        p.source = LabelSource::SelfCalibrated;
        p
    }
}

/// m = α⁻+β⁻+ζ⁻ and n = α⁺+β⁺+ζ⁺ from the region indices.
pub fn predicted_counts(c: CouplingTriple) -> PredictedCounts {
    let below = classify(c, SideTag::Below);
    let above = classify(c, SideTag::Above);
    PredictedCounts { m: below.total(), n: above.total(), below, above, source: LabelSource::Printed }
}

/// Whether `c` keeps a relative distance `margin` from every boundary of `sector` on `side`.
pub fn is_interior(c: CouplingTriple, sector: SectorTag, side: SideTag, margin: f64) -> bool {
    let k = constants();
    let r = match side {
        SideTag::Below => c,
        SideTag::Above => c.negated(),
    };
    let far = |a: f64, b: f64| (a - b).abs() > margin * a.abs().max(b.abs()).max(1.0);
    match sector {
        SectorTag::Oos => far(r.mu, -k.s_threshold),
        SectorTag::Ea => far(r.mu, -k.mu_tilde) && far(r.lambda, 4.0 / (r.mu + k.mu_tilde) - 8.0),
        SectorTag::Ees => {
            if !(far(r.mu, k.mu0_minus) && far(r.mu, k.mu0_plus)) {
                return false;
            }
            let Ok(curve) = lambda_curve(r.mu, SideTag::Below) else { return false };
            let Ok(surface) = gamma_surface(r.lambda, r.mu, SideTag::Below) else { return false };
            far(r.lambda, curve) && far(r.gamma, surface)
        }
    }
}

/// Draws interior sample points of a component.
pub fn sample_component(component: Component, cfg: &CalibrationConfig, seed: u64) -> Result<Vec<CouplingTriple>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(cfg.samples_per_component);
    for _ in 0..cfg.max_draws {
        let mut draw = || rng.gen_range(-cfg.radius..=cfg.radius);
        let c = CouplingTriple::new(draw(), draw(), draw())?;
        if component.contains(c) && is_interior(c, component.sector, component.side, cfg.margin) {
            out.push(c);
            if out.len() == cfg.samples_per_component {
                return Ok(out);
            }
        }
    }
    Err(Error::Calibration(format!(
        "found only {} of {} interior points of {} in {} draws",
        out.len(),
        cfg.samples_per_component,
        component.id(),
        cfg.max_draws
    )))
}

fn component_seed(base: u64, k: usize) -> u64 {
    base ^ (k as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

/// Samples every component, counts with the determinant path, checks that
/// counts are constant per component and records them as labels.
pub fn self_calibrate(cfg: &CalibrationConfig) -> Result<Calibration> {
    cfg.scan.validate()?;
    let components = Component::all();
    let sampled: Vec<(Component, Vec<CouplingTriple>)> = components
        .iter()
        .enumerate()
        .map(|(k, &comp)| Ok((comp, sample_component(comp, cfg, component_seed(cfg.seed, k))?)))
        .collect::<Result<_>>()?;
    let jobs: Vec<(usize, CouplingTriple)> = sampled
        .iter()
        .enumerate()
        .flat_map(|(k, (_, pts))| pts.iter().map(move |&c| (k, c)))
        .collect();
    let counts: Vec<usize> = jobs
        .par_iter()
        .map(|&(k, c)| {
            let comp = sampled[k].0;
            find_eigenvalues(comp.sector, c, comp.side, &cfg.scan).map(|l| l.count)
        })
        .collect::<Result<_>>()?;

    let mut result = Calibration { components: Vec::new(), discrepancies: Vec::new() };
    let mut offset = 0;
    for (comp, samples) in sampled {
        let counts = counts[offset..offset + samples.len()].to_vec();
        offset += samples.len();
        let first = counts[0];
        if let Some(bad) = counts.iter().position(|&n| n != first) {
            return Err(Error::Calibration(format!(
                "{} is not count-constant: {:?} gives {} but {:?} gives {}",
                comp.id(),
                samples[0],
                first,
                samples[bad],
                counts[bad]
            )));
        }
        if first != comp.index {
            result.discrepancies.push(Discrepancy {
                component: comp.id(),
                printed: comp.index,
                calibrated: first,
                points: samples.clone(),
                note: "count differs from the region index".into(),
            });
        }
        record_literal_mismatches(comp, &samples, first, &mut result.discrepancies);
        result.components.push(ComponentCalibration { component: comp, printed: comp.index, calibrated: first, samples, counts });
    }
    Ok(result)
}

/// Logs samples where the literal printed membership tests disagree with the count.
fn record_literal_mismatches(comp: Component, samples: &[CouplingTriple], count: usize, log: &mut Vec<Discrepancy>) {
    let literal = |c: CouplingTriple| match (comp.sector, comp.side) {
        (SectorTag::Ea, side) => Some(classify_ea_literal(c.lambda, c.mu, side).index),
        (SectorTag::Ees, SideTag::Above) => Some(classify_ees_literal_above(c).index),
        _ => None,
    };
    let mut by_label: Vec<(usize, Vec<CouplingTriple>)> = Vec::new();
    for &c in samples {
        if let Some(l) = literal(c).filter(|&l| l != count) {
            match by_label.iter_mut().find(|(k, _)| *k == l) {
                Some((_, pts)) => pts.push(c),
                None => by_label.push((l, vec![c])),
            }
        }
    }
    for (printed, points) in by_label {
        log.push(Discrepancy {
            component: comp.id(),
            printed,
            calibrated: count,
            points,
            note: "literal printed membership disagrees with the count".into(),
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triple(g: f64, l: f64, m: f64) -> CouplingTriple {
        CouplingTriple::new(g, l, m).unwrap()
    }

    #[test]
    fn root_constants() {
        let k = constants();
        assert!((k.mu0_minus + 7.7170).abs() < 5e-4);
        assert!((k.mu0_plus + 2.7880).abs() < 5e-4);
        assert!((k.mu1_minus + 7.2646).abs() < 5e-4);
        assert!((k.mu1_plus + 0.7404).abs() < 5e-4);
        assert!(k.mu0_minus < k.mu1_minus && k.mu1_minus < k.mu0_plus && k.mu0_plus < k.mu1_plus && k.mu1_plus < 0.0);
        assert!((k.s_threshold - 6.6149).abs() < 1e-4);
        assert!(k.mu_star > 0.0 && (k.mu_star - 0.9216).abs() < 1e-4);
        assert!((k.mu1_minus_alt + k.mu1_plus_alt - k.mu1_minus - k.mu1_plus).abs() < 1e-12);
    }

    #[test]
    fn polynomial_roots_and_coefficients() {
        let k = constants();
        for mu in [k.mu0_minus, k.mu0_plus] {
            assert!(q0_poly(mu, SideTag::Below).abs() < 1e-12);
            assert!(q0_poly(-mu, SideTag::Above).abs() < 1e-12);
        }
        for mu in [k.mu1_minus, k.mu1_plus] {
            assert!(q1_poly(mu, SideTag::Below).abs() < 1e-12);
        }
        // Q_0(μ) = (4/π − 5/4)μ² + (40/(3π) − 4)μ + 1/2
        for mu in [-3.0, 0.0, 2.5] {
            let direct = (4.0 / PI - 1.25) * mu * mu + (40.0 / (3.0 * PI) - 4.0) * mu + 0.5;
            assert!((q0_poly(mu, SideTag::Below) - direct).abs() < 1e-12);
            let direct = (32.0 / PI - 10.0) * mu * mu + (80.0 / (3.0 * PI) - 7.0) * mu + 1.0;
            assert!((q1_poly(mu, SideTag::Below) - direct).abs() < 1e-12);
            assert_eq!(q1_poly(mu, SideTag::Above), q1_poly(-mu, SideTag::Below));
        }
        assert!((2.0 * (16.0 - 5.0 * PI) / PI - 0.1859).abs() < 1e-4);
    }

    #[test]
    fn q_without_next_nearest_coupling() {
        for (g, l) in [(1.0, 0.0), (-5.0, -11.0), (0.3, 2.0)] {
            let q = big_q(triple(g, l, 0.0), SideTag::Below);
            assert!((q - 0.5 * (g * l + 4.0 * l + 2.0 * g)).abs() < 1e-12 * (1.0 + q.abs()));
            let q = big_q(triple(g, l, 0.0), SideTag::Above);
            assert!((q - 0.5 * (g * l - 4.0 * l - 2.0 * g)).abs() < 1e-12 * (1.0 + q.abs()));
        }
    }

    #[test]
    fn surfaces_are_zero_sets() {
        let k = constants();
        let mu = k.mu1_minus;
        assert!(lambda_curve(mu, SideTag::Below).unwrap().abs() < 1e-12);
        match lambda_curve(k.mu0_plus, SideTag::Below) {
            Ok(v) => assert!(v.abs() > 1e10),
            Err(e) => assert!(matches!(e, Error::Pole { .. })),
        }
        for (l, m) in [(0.5, 1.0), (-3.0, -4.0), (7.0, -9.0)] {
            for side in SideTag::BOTH {
                let g = gamma_surface(l, m, side).unwrap();
                assert!(big_q(triple(g, l, m), side).abs() < 1e-10);
            }
        }
        let g = gamma_surface(1e12, 0.5, SideTag::Below).unwrap();
        assert!((g + 4.0).abs() < 1e-9);
    }

    #[test]
    fn oos_labels() {
        let s = constants().s_threshold;
        assert_eq!(classify_oos(0.0, SideTag::Above).index, 0);
        assert_eq!(classify_oos(s, SideTag::Above), SectorIndex { index: 0, on_boundary: true });
        assert_eq!(classify_oos(10.0, SideTag::Above).index, 1);
        assert_eq!(classify_oos(-10.0, SideTag::Below).index, 1);
        assert_eq!(classify_oos(10.0, SideTag::Below).index, 0);
    }

    #[test]
    fn ea_labels() {
        for side in SideTag::BOTH {
            assert_eq!(classify_ea(0.0, 0.0, side).index, 0);
            assert_eq!(classify_ea_literal(0.0, 0.0, side).index, 1);
        }
        assert_eq!(classify_ea(-30.0, -30.0, SideTag::Below).index, 2);
        assert_eq!(classify_ea(30.0, 30.0, SideTag::Above).index, 2);
        assert_eq!(classify_ea(-8.0, 0.0, SideTag::Below).index, 1);
        let ms = constants().mu_star;
        assert_eq!(classify_ea_literal(0.0, ms, SideTag::Above), SectorIndex { index: 1, on_boundary: true });
    }

    #[test]
    fn ees_test_points() {
        assert_eq!(classify_ees(triple(1.0, 0.0, 0.0), SideTag::Below).index, 0);
        assert_eq!(classify_ees(triple(0.0, -1.0, 0.0), SideTag::Below).index, 1);
        assert_eq!(classify_ees(triple(-5.0, -11.0, 0.0), SideTag::Below).index, 2);
        let zero = classify_ees(CouplingTriple::ZERO, SideTag::Above);
        assert_eq!(zero, SectorIndex { index: 0, on_boundary: true });
        let literal = classify_ees_literal_above(CouplingTriple::ZERO);
        assert!(literal.index > 0 && literal.on_boundary);
    }

    #[test]
    fn q_sign_alternates_across_components() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..2000 {
            let c = triple(rng.gen_range(-20.0..20.0), rng.gen_range(-20.0..20.0), rng.gen_range(-20.0..20.0));
            for side in SideTag::BOTH {
                let z = classify_ees(c, side);
                if z.on_boundary {
                    continue;
                }
                let q = big_q(c, side);
                assert_eq!(q > 0.0, z.index.is_multiple_of(2), "{c:?} {side:?}");
            }
        }
    }

    #[test]
    fn predicted_counts_compose() {
        let p = predicted_counts(triple(-5.0, -11.0, 0.0));
        assert_eq!(p.m, classify_ea(-11.0, 0.0, SideTag::Below).index + 2);
        let p = predicted_counts(CouplingTriple::ZERO);
        assert_eq!((p.m, p.n), (0, 0));
    }

    #[test]
    fn component_ids_are_distinct() {
        let all = Component::all();
        assert_eq!(all.len(), 20);
        let mut ids: Vec<String> = all.iter().map(Component::id).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), 20);
    }
}
