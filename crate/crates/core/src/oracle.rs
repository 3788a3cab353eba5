//! Finite-lattice fiber Hamiltonians used as an independent check of the
//! determinant path.
//!
//! Both discretisations live on an L×L periodic grid: the momentum build
//! uses the points p_n = −π + 2πn/L, the position build the relative
//! coordinate with minimal-image interaction. They are unitarily equivalent
//! through the discrete Fourier transform. Bosonic states are even under
//! p → −p, so counting is done on that subspace, where the interaction is
//! the diagonal plus a sum of seven rank-one terms.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{
    essential_band, fiber_dispersion, position_potential, potential_symbol, CouplingTriple, EssentialBand,
    MomentumPoint, Quasimomentum, SectorTag, SideTag,
};

/// Default bound on the dimension of matrices handed to the dense solver.
pub const DENSE_CAP: usize = 10_000;

/// Absolute tolerance of eigenvalues located by count bisection.
const BISECT_TOL: f64 = 1e-13;

/// Smallest distance from the band edge at which the grid resolvent is evaluated.
const MIN_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Representation {
    Momentum,
    Position,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub l: usize,
    pub representation: Representation,
}

impl GridSpec {
    pub fn new(l: usize, representation: Representation) -> Result<Self> {
        check_size(l)?;
        Ok(Self { l, representation })
    }
}

fn check_size(l: usize) -> Result<()> {
    if l < 8 || !l.is_multiple_of(2) {
        return Err(Error::GridSize(l));
    }
    Ok(())
}

/// p_n = −π + 2πn/L, n = 0..L.
pub fn grid_points(l: usize) -> Vec<f64> {
    let h = std::f64::consts::TAU / l as f64;
    (0..l).map(|n| -std::f64::consts::PI + n as f64 * h).collect()
}

/// Index of −p_n on the grid.
fn mirror(n: usize, l: usize) -> usize {
    (l - n) % l
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiberMatrix {
    pub k: Quasimomentum,
    pub couplings: CouplingTriple,
    pub grid: GridSpec,
    /// Rows and columns indexed by n1·L + n2.
    pub matrix: DMatrix<f64>,
}

impl FiberMatrix {
    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }
}

/// ℰ_K(p_m)δ_mn + v(p_m − p_n)/L².
pub fn build_momentum_fiber(k: Quasimomentum, c: CouplingTriple, l: usize) -> Result<FiberMatrix> {
    check_size(l)?;
    let p = grid_points(l);
    let n = l * l;
    let point = |i: usize| MomentumPoint { p1: p[i / l], p2: p[i % l] };
    let scale = 1.0 / n as f64;
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        let pi = point(i);
        for j in 0..=i {
            let pj = point(j);
            let v = scale * potential_symbol(MomentumPoint { p1: pi.p1 - pj.p1, p2: pi.p2 - pj.p2 }, c);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
        m[(i, i)] += fiber_dispersion(k, pi);
    }
    Ok(FiberMatrix { k, couplings: c, grid: GridSpec { l, representation: Representation::Momentum }, matrix: m })
}

fn minimal_image(x: usize, l: usize) -> i64 {
    if x < l / 2 {
        x as i64
    } else {
        x as i64 - l as i64
    }
}

/// Diagonal 4 + v̂(x), hopping −cos(K_i/2) to the periodic neighbours x ± e_i.
pub fn build_position_fiber(k: Quasimomentum, c: CouplingTriple, l: usize) -> Result<FiberMatrix> {
    check_size(l)?;
    let n = l * l;
    let hop = k.hopping();
    let mut m = DMatrix::zeros(n, n);
    for x1 in 0..l {
        for x2 in 0..l {
            let i = x1 * l + x2;
            m[(i, i)] = 4.0 + position_potential((minimal_image(x1, l), minimal_image(x2, l)), c);
            for (j, h) in [(((x1 + 1) % l) * l + x2, hop[0]), (x1 * l + (x2 + 1) % l, hop[1])] {
                m[(i, j)] -= h;
                m[(j, i)] -= h;
            }
        }
    }
    Ok(FiberMatrix { k, couplings: c, grid: GridSpec { l, representation: Representation::Position }, matrix: m })
}

/// All eigenvalues, ascending.
pub fn eigenvalues_dense(m: &FiberMatrix, cap: usize) -> Result<Vec<f64>> {
    symmetric_eigenvalues(m.matrix.clone(), cap)
}

fn symmetric_eigenvalues(m: DMatrix<f64>, cap: usize) -> Result<Vec<f64>> {
    if m.nrows() > cap {
        return Err(Error::DimensionCap { dim: m.nrows(), cap });
    }
    let mut e: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    e.sort_by(f64::total_cmp);
    Ok(e)
}

/// Orthonormal basis of functions even under p → −p (or x → −x): one
/// column per orbit, (e_i + e_{−i})/√2 for pairs and e_i for the four fixed points.
pub fn even_basis(l: usize) -> DMatrix<f64> {
    let n = l * l;
    let mut cols: Vec<(usize, usize)> = Vec::with_capacity((n + 4) / 2);
    for i in 0..n {
        let j = mirror(i / l, l) * l + mirror(i % l, l);
        if i <= j {
            cols.push((i, j));
        }
    }
    let mut b = DMatrix::zeros(n, cols.len());
    for (col, &(i, j)) in cols.iter().enumerate() {
        if i == j {
            b[(i, col)] = 1.0;
        } else {
            b[(i, col)] = std::f64::consts::FRAC_1_SQRT_2;
            b[(j, col)] = std::f64::consts::FRAC_1_SQRT_2;
        }
    }
    b
}

/// The matrix compressed to the even subspace, of dimension (L² + 4)/2.
pub fn restrict_even(m: &FiberMatrix) -> DMatrix<f64> {
    let b = even_basis(m.grid.l);
    b.transpose() * &m.matrix * b
}

pub fn even_eigenvalues_dense(m: &FiberMatrix, cap: usize) -> Result<Vec<f64>> {
    let dim = (m.grid.l * m.grid.l + 4) / 2;
    if dim > cap {
        return Err(Error::DimensionCap { dim, cap });
    }
    symmetric_eigenvalues(restrict_even(m), cap)
}

/// Gap between the band edge and the nearest grid dispersion value along
/// the stiffer direction: 2 max_i cos(K_i/2) (1 − cos(2π/L)).
pub fn edge_resolution(k: Quasimomentum, l: usize) -> f64 {
    let [h1, h2] = k.hopping();
    2.0 * h1.max(h2) * (1.0 - (std::f64::consts::TAU / l as f64).cos())
}

/// Ten times the edge resolution; never larger than its value at K = 0.
pub fn default_margin(k: Quasimomentum, l: usize) -> f64 {
    10.0 * edge_resolution(k, l)
}

/// (#eigenvalues below lo − margin, #eigenvalues above hi + margin).
pub fn count_outside_band(eigs: &[f64], band: EssentialBand, margin: f64) -> (usize, usize) {
    let m = eigs.iter().filter(|&&e| e < band.lo - margin).count();
    let n = eigs.iter().filter(|&&e| e > band.hi + margin).count();
    (m, n)
}

#[derive(Debug, Clone, PartialEq)]
struct RankOne {
    sector: SectorTag,
    weight: f64,
    /// Factor values on the full grid, scaled by 1/L.
    values: Vec<f64>,
}

/// Diagonal plus the seven even rank-one terms of the interaction, on the full grid.
///
/// Odd functions only see the diagonal, so outside the band this has the
/// spectrum of the even restriction.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuredFiber {
    pub k: Quasimomentum,
    pub couplings: CouplingTriple,
    pub l: usize,
    pub band: EssentialBand,
    diag: Vec<f64>,
    terms: Vec<RankOne>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSpectrum {
    pub band: EssentialBand,
    pub margin: f64,
    /// Eigenvalues below lo − margin, ascending.
    pub below: Vec<f64>,
    /// Eigenvalues above hi + margin, ascending.
    pub above: Vec<f64>,
}

impl OracleSpectrum {
    pub fn counts(&self) -> (usize, usize) {
        (self.below.len(), self.above.len())
    }
}

impl StructuredFiber {
    pub fn new(k: Quasimomentum, c: CouplingTriple, l: usize) -> Result<Self> {
        check_size(l)?;
        let p = grid_points(l);
        let inv = 1.0 / l as f64;
        let mut diag = Vec::with_capacity(l * l);
        let mut columns: Vec<(SectorTag, f64, Vec<f64>)> = vec![
            (SectorTag::Ees, c.gamma, Vec::new()),
            (SectorTag::Ees, 0.5 * c.lambda, Vec::new()),
            (SectorTag::Ees, 0.5 * c.mu, Vec::new()),
            (SectorTag::Ees, 0.5 * c.mu, Vec::new()),
            (SectorTag::Ea, 0.5 * c.lambda, Vec::new()),
            (SectorTag::Ea, 0.5 * c.mu, Vec::new()),
            (SectorTag::Oos, 2.0 * c.mu, Vec::new()),
        ];
        for &p1 in &p {
            for &p2 in &p {
                diag.push(fiber_dispersion(k, MomentumPoint { p1, p2 }));
                let (c1, c2) = (p1.cos(), p2.cos());
                let (d1, d2) = ((2.0 * p1).cos(), (2.0 * p2).cos());
                let f = [1.0, c1 + c2, d1 + d2, 2.0 * c1 * c2, c1 - c2, d1 - d2, p1.sin() * p2.sin()];
                for (col, v) in columns.iter_mut().zip(f) {
                    col.2.push(inv * v);
                }
            }
        }
        let terms = columns
            .into_iter()
            .filter(|t| t.1 != 0.0)
            .map(|(sector, weight, values)| RankOne { sector, weight, values })
            .collect();
        Ok(Self { k, couplings: c, l, band: essential_band(k), diag, terms })
    }

    fn active(&self, sector: Option<SectorTag>) -> Vec<&RankOne> {
        self.terms.iter().filter(|t| sector.is_none_or(|s| t.sector == s)).collect()
    }

    /// W⁻¹ + Uᵀ(D − z)⁻¹U on the selected terms.
    fn secular(&self, z: f64, terms: &[&RankOne]) -> DMatrix<f64> {
        let r = terms.len();
        let mut g = DMatrix::zeros(r, r);
        let resolvent: Vec<f64> = self.diag.iter().map(|d| 1.0 / (d - z)).collect();
        for a in 0..r {
            for b in 0..=a {
                let s: f64 = terms[a]
                    .values
                    .iter()
                    .zip(&terms[b].values)
                    .zip(&resolvent)
                    .map(|((x, y), w)| x * y * w)
                    .sum();
                g[(a, b)] = s;
                g[(b, a)] = s;
            }
            g[(a, a)] += 1.0 / terms[a].weight;
        }
        g
    }

    /// Number of eigenvalues strictly beyond z on `side`; z must lie outside the band.
    pub fn count_beyond(&self, side: SideTag, z: f64, sector: Option<SectorTag>) -> usize {
        let terms = self.active(sector);
        if terms.is_empty() {
            return 0;
        }
        let eig = SymmetricEigen::new(self.secular(z, &terms)).eigenvalues;
        match side {
            SideTag::Below => {
                let pos = eig.iter().filter(|&&v| v > 0.0).count();
                pos.saturating_sub(terms.iter().filter(|t| t.weight > 0.0).count())
            }
            SideTag::Above => {
                let neg = eig.iter().filter(|&&v| v < 0.0).count();
                neg.saturating_sub(terms.iter().filter(|t| t.weight < 0.0).count())
            }
        }
    }

    /// Eigenvalues farther than `margin` from the band on `side`, by count bisection.
    pub fn eigenvalues_beyond(&self, side: SideTag, margin: f64, sector: Option<SectorTag>) -> Vec<f64> {
        let edge = self.band.edge(side) + side.outward() * margin.max(MIN_MARGIN);
        let far = self.band.edge(side) + side.outward() * (self.couplings.interaction_norm() + 1.0);
        let total = self.count_beyond(side, edge, sector);
        let mut out = Vec::with_capacity(total);
        // the k-th eigenvalue counted from the far end
        for rank in 1..=total {
            let (mut inner, mut outer) = (edge, far);
            while (inner - outer).abs() > BISECT_TOL {
                let mid = 0.5 * (inner + outer);
                if mid == inner || mid == outer {
                    break;
                }
                if self.count_beyond(side, mid, sector) >= rank {
                    inner = mid;
                } else {
                    outer = mid;
                }
            }
            out.push(0.5 * (inner + outer));
        }
        out.sort_by(f64::total_cmp);
        out
    }

    pub fn outside_band(&self, margin: f64) -> OracleSpectrum {
        OracleSpectrum {
            band: self.band,
            margin,
            below: self.eigenvalues_beyond(SideTag::Below, margin, None),
            above: self.eigenvalues_beyond(SideTag::Above, margin, None),
        }
    }

    pub fn counts(&self, margin: f64) -> (usize, usize) {
        let lo = self.band.lo - margin.max(MIN_MARGIN);
        let hi = self.band.hi + margin.max(MIN_MARGIN);
        (self.count_beyond(SideTag::Below, lo, None), self.count_beyond(SideTag::Above, hi, None))
    }

    /// Orthonormal eigenvectors for a cluster of `multiplicity` eigenvalues near z,
    /// as (D − z)⁻¹U c with c spanning the near-null space of W⁻¹ + Uᵀ(D − z)⁻¹U.
    pub fn eigenvectors(&self, z: f64, multiplicity: usize) -> Vec<Vec<f64>> {
        let terms = self.active(None);
        if terms.is_empty() || multiplicity == 0 {
            return Vec::new();
        }
        let eig = SymmetricEigen::new(self.secular(z, &terms));
        let mut order: Vec<usize> = (0..terms.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].abs().total_cmp(&eig.eigenvalues[b].abs()));
        let mut basis: Vec<Vec<f64>> = Vec::new();
        for &col in order.iter().take(multiplicity) {
            let c = eig.eigenvectors.column(col);
            let mut v: Vec<f64> = (0..self.diag.len())
                .map(|i| terms.iter().enumerate().map(|(a, t)| c[a] * t.values[i]).sum::<f64>() / (z - self.diag[i]))
                .collect();
            for b in &basis {
                let proj: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= proj * y);
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.0 {
                v.iter_mut().for_each(|x| *x /= norm);
                basis.push(v);
            }
        }
        basis
    }
}

/// Norm fractions of a grid function in the ees, oos and ea sectors, plus the remainder.
fn sector_weights(v: &[f64], l: usize) -> [f64; 4] {
    let at = |n1: usize, n2: usize| v[n1 * l + n2];
    let mut acc = [0.0; 4];
    for n1 in 0..l {
        for n2 in 0..l {
            let (m1, m2) = (mirror(n1, l), mirror(n2, l));
            let f = at(n1, n2);
            let fx = at(m1, n2);
            let fy = at(n1, m2);
            let fxy = at(m1, m2);
            let even = 0.25 * (f + fx + fy + fxy);
            let odd = 0.25 * (f - fx - fy + fxy);
            let swap_even = 0.25 * (at(n2, n1) + at(m2, n1) + at(n2, m1) + at(m2, m1));
            let swap_odd = 0.25 * (at(n2, n1) - at(m2, n1) - at(n2, m1) + at(m2, m1));
            let ees = 0.5 * (even + swap_even);
            let ea = 0.5 * (even - swap_even);
            let oos = 0.5 * (odd + swap_odd);
            acc[0] += ees * ees;
            acc[1] += oos * oos;
            acc[2] += ea * ea;
        }
    }
    let total: f64 = v.iter().map(|x| x * x).sum();
    acc[3] = (total - acc[0] - acc[1] - acc[2]).max(0.0);
    acc.map(|a| a / total.max(f64::MIN_POSITIVE))
}

/// Sector tags of an orthonormal set of eigenvectors spanning one
/// eigenspace at K = 0. Each tag must carry at least 99% of its share of the
/// projected weight; otherwise the projection is reported as ambiguous.
pub fn sector_project(vectors: &[Vec<f64>], l: usize) -> Result<Vec<SectorTag>> {
    let mut totals = [0.0; 4];
    for v in vectors {
        let w = sector_weights(v, l);
        for (t, x) in totals.iter_mut().zip(w) {
            *t += x;
        }
    }
    let mut tags = Vec::new();
    for (k, tag) in SectorTag::ALL.iter().enumerate() {
        let count = totals[k].round();
        if (totals[k] - count).abs() > 0.01 {
            return Err(Error::Config(format!("ambiguous sector projection, weights {totals:?}")));
        }
        tags.extend(std::iter::repeat_n(*tag, count as usize));
    }
    if tags.len() != vectors.len() {
        return Err(Error::Config(format!("projection leaves weight outside the sectors: {totals:?}")));
    }
    Ok(tags)
}

/// Eigenvalues outside the band at K = 0 with the sector of each eigenvector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaggedEigenvalue {
    pub value: f64,
    pub side: SideTag,
    pub sector: SectorTag,
}

/// Tags every eigenvalue of a K = 0 fiber beyond `margin`; eigenvalues
/// within 1e−8 of each other are projected jointly.
pub fn tag_sectors(fiber: &StructuredFiber, margin: f64) -> Result<Vec<TaggedEigenvalue>> {
    if fiber.k != Quasimomentum::ZERO {
        return Err(Error::Config("sector projection needs K = 0".into()));
    }
    let mut out = Vec::new();
    for side in SideTag::BOTH {
        let values = fiber.eigenvalues_beyond(side, margin, None);
        let mut start = 0;
        while start < values.len() {
            let mut end = start + 1;
            while end < values.len() && values[end] - values[end - 1] < 1e-8 {
                end += 1;
            }
            let cluster = &values[start..end];
            let centre = cluster.iter().sum::<f64>() / cluster.len() as f64;
            let vectors = fiber.eigenvectors(centre, cluster.len());
            let tags = sector_project(&vectors, fiber.l)?;
            for (&value, sector) in cluster.iter().zip(tags) {
                out.push(TaggedEigenvalue { value, side, sector });
            }
            start = end;
        }
    }
    Ok(out)
}

/// The seven lowest and highest variational values, clipped at the band edges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinimaxTable {
    pub k: Quasimomentum,
    pub band: EssentialBand,
    /// e_1 ≤ … ≤ e_7 ≤ ℰ_min(K).
    pub e: [f64; 7],
    /// E_1 ≥ … ≥ E_7 ≥ ℰ_max(K).
    pub big_e: [f64; 7],
}

pub fn minimax_table(k: Quasimomentum, c: CouplingTriple, l: usize) -> Result<MinimaxTable> {
    let fiber = StructuredFiber::new(k, c, l)?;
    let band = fiber.band;
    let below = fiber.eigenvalues_beyond(SideTag::Below, 0.0, None);
    let mut above = fiber.eigenvalues_beyond(SideTag::Above, 0.0, None);
    above.reverse();
    let mut e = [band.lo; 7];
    let mut big_e = [band.hi; 7];
    for (slot, v) in e.iter_mut().zip(&below) {
        *slot = v.min(band.lo);
    }
    for (slot, v) in big_e.iter_mut().zip(&above) {
        *slot = v.max(band.hi);
    }
    Ok(MinimaxTable { k, band, e, big_e })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuasimomentumCheck {
    pub k: Quasimomentum,
    pub m: usize,
    pub n: usize,
    pub margin: f64,
    /// m ≥ m(0) and n ≥ n(0).
    pub lower_bound: bool,
    /// (m, n) equals the predicted pair, when one was supplied.
    pub equality: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremRecord {
    pub couplings: CouplingTriple,
    pub l: usize,
    pub m0: usize,
    pub n0: usize,
    pub checks: Vec<QuasimomentumCheck>,
}

impl TheoremRecord {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.lower_bound && c.equality.unwrap_or(true))
    }
}

/// Checks n_±(K) ≥ n_±(0) at every sampled K and, when `predicted` carries
/// a pair with m + n = 7, that the counts equal it.
pub fn verify_theorems(
    c: CouplingTriple,
    ks: &[Quasimomentum],
    l: usize,
    predicted: Option<(usize, usize)>,
) -> Result<TheoremRecord> {
    let zero = StructuredFiber::new(Quasimomentum::ZERO, c, l)?;
    let (m0, n0) = zero.counts(default_margin(Quasimomentum::ZERO, l));
    let full = predicted.filter(|(m, n)| m + n == 7);
    let mut checks = Vec::with_capacity(ks.len());
    for &k in ks {
        let margin = default_margin(k, l);
        let (m, n) = StructuredFiber::new(k, c, l)?.counts(margin);
        checks.push(QuasimomentumCheck {
            k,
            m,
            n,
            margin,
            lower_bound: m >= m0 && n >= n0,
            equality: full.map(|p| p == (m, n)),
        });
    }
    Ok(TheoremRecord { couplings: c, l, m0, n0, checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triple(g: f64, l: f64, m: f64) -> CouplingTriple {
        CouplingTriple::new(g, l, m).unwrap()
    }

    #[test]
    fn grid_size_validation() {
        assert!(GridSpec::new(6, Representation::Momentum).is_err());
        assert!(GridSpec::new(9, Representation::Position).is_err());
        assert!(GridSpec::new(8, Representation::Position).is_ok());
    }

    #[test]
    fn free_fiber_is_the_dispersion() {
        let k = Quasimomentum::new(0.4, -1.1);
        let m = build_momentum_fiber(k, CouplingTriple::ZERO, 8).unwrap();
        let mut expected: Vec<f64> = (0..64)
            .map(|i| {
                let p = grid_points(8);
                fiber_dispersion(k, MomentumPoint { p1: p[i / 8], p2: p[i % 8] })
            })
            .collect();
        expected.sort_by(f64::total_cmp);
        let e = eigenvalues_dense(&m, DENSE_CAP).unwrap();
        for (a, b) in e.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-12);
        }
        let corner = build_momentum_fiber(Quasimomentum::new(std::f64::consts::PI, std::f64::consts::PI), triple(1.0, 0.0, 0.0), 8).unwrap();
        for i in 0..64 {
            assert!((corner.matrix[(i, i)] - 1.0 / 64.0 - 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn position_build_entries() {
        let c = triple(1.5, -2.0, 3.2);
        let m = build_position_fiber(Quasimomentum::ZERO, c, 8).unwrap();
        let site = |x1: usize, x2: usize| x1 * 8 + x2;
        assert_eq!(m.matrix[(site(0, 0), site(0, 0))], 4.0 + 1.5);
        assert_eq!(m.matrix[(site(0, 1), site(0, 1))], 4.0 - 1.0);
        assert_eq!(m.matrix[(site(7, 0), site(7, 0))], 4.0 - 1.0);
        assert_eq!(m.matrix[(site(1, 1), site(1, 1))], 4.0 + 1.6);
        assert_eq!(m.matrix[(site(3, 0), site(3, 0))], 4.0);
        assert_eq!(m.matrix[(site(0, 0), site(0, 1))], -1.0);
        assert_eq!(m.matrix[(site(0, 0), site(0, 7))], -1.0);
        assert_eq!(m.matrix[(site(0, 0), site(1, 1))], 0.0);
        assert_eq!((&m.matrix - m.matrix.transpose()).amax(), 0.0);
    }

    #[test]
    fn interaction_rank_on_the_even_subspace() {
        let c = triple(1.3, -0.7, 2.1);
        let m = build_momentum_fiber(Quasimomentum::ZERO, c, 8).unwrap();
        let free = build_momentum_fiber(Quasimomentum::ZERO, CouplingTriple::ZERO, 8).unwrap();
        let b = even_basis(8);
        let v = b.transpose() * (&m.matrix - &free.matrix) * &b;
        let sv = v.singular_values();
        let rank = sv.iter().filter(|&&s| s > 1e-10 * sv.max()).count();
        assert_eq!(rank, 7);
        assert_eq!(b.ncols(), (64 + 4) / 2);
    }

    #[test]
    fn structured_matches_dense_restriction() {
        let k = Quasimomentum::new(0.7, 2.0);
        let c = triple(-3.0, 2.5, -4.0);
        let dense = even_eigenvalues_dense(&build_momentum_fiber(k, c, 12).unwrap(), DENSE_CAP).unwrap();
        let fiber = StructuredFiber::new(k, c, 12).unwrap();
        let spec = fiber.outside_band(0.0);
        let band = essential_band(k);
        let below: Vec<f64> = dense.iter().copied().filter(|&e| e < band.lo - 1e-9).collect();
        let above: Vec<f64> = dense.iter().copied().filter(|&e| e > band.hi + 1e-9).collect();
        assert_eq!(below.len(), spec.below.len());
        assert_eq!(above.len(), spec.above.len());
        for (a, b) in below.iter().chain(&above).zip(spec.below.iter().chain(&spec.above)) {
            assert!((a - b).abs() < 1e-9, "{a} {b}");
        }
    }

    #[test]
    fn counts_of_the_free_fiber_vanish() {
        let f = StructuredFiber::new(Quasimomentum::new(1.0, 0.3), CouplingTriple::ZERO, 16).unwrap();
        assert_eq!(f.counts(0.0), (0, 0));
        let e = [-1.0, 0.5, 9.0];
        assert_eq!(count_outside_band(&e, EssentialBand { lo: 0.0, hi: 8.0 }, 0.1), (1, 1));
    }

    #[test]
    fn projection_of_single_sector_problems() {
        for (c, sector) in [
            (triple(-6.0, 0.0, 0.0), SectorTag::Ees),
            (triple(0.0, -12.0, 0.0), SectorTag::Ea),
        ] {
            let f = StructuredFiber::new(Quasimomentum::ZERO, c, 16).unwrap();
            let tagged = tag_sectors(&f, 0.05).unwrap();
            assert!(!tagged.is_empty());
            assert!(tagged.iter().any(|t| t.sector == sector));
        }
        let f = StructuredFiber::new(Quasimomentum::ZERO, triple(0.0, 0.0, 20.0), 16).unwrap();
        let tagged = tag_sectors(&f, 0.05).unwrap();
        assert!(tagged.iter().any(|t| t.sector == SectorTag::Oos && t.side == SideTag::Above));
    }

    #[test]
    fn minimax_of_the_free_fiber() {
        let k = Quasimomentum::new(0.5, 1.0);
        let t = minimax_table(k, CouplingTriple::ZERO, 16).unwrap();
        let band = essential_band(k);
        assert!(t.e.iter().all(|&e| e == band.lo));
        assert!(t.big_e.iter().all(|&e| e == band.hi));
    }

    #[test]
    fn margin_shrinks_away_from_zero() {
        let m0 = default_margin(Quasimomentum::ZERO, 48);
        for k in [(0.3, 0.0), (1.0, 2.0), (3.0, 3.0)] {
            assert!(default_margin(Quasimomentum::new(k.0, k.1), 48) <= m0);
        }
    }
}
