//! Dispersion relations, band geometry, the interaction symbol in momentum and
//! position form, and the kernels spanning the three even symmetry sectors.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduces an angle modulo 2π into `[-π, π)`.
pub fn reduce_angle(x: f64) -> f64 {
    let r = x - TAU * ((x + PI) / TAU).floor();
    if r >= PI {
        r - TAU
    } else {
        r
    }
}

/// On-site, nearest-neighbour and next-nearest-neighbour interaction strengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingTriple {
    pub gamma: f64,
    pub lambda: f64,
    pub mu: f64,
}

impl CouplingTriple {
    pub fn new(gamma: f64, lambda: f64, mu: f64) -> Result<Self> {
        for (name, v) in [("gamma", gamma), ("lambda", lambda), ("mu", mu)] {
            if !v.is_finite() {
                return Err(Error::NonFiniteCoupling(name));
            }
        }
        Ok(Self { gamma, lambda, mu })
    }

    pub const ZERO: Self = Self { gamma: 0.0, lambda: 0.0, mu: 0.0 };

    /// The triple `(-γ, -λ, -μ)`, which exchanges the roles of the two band sides.
    pub fn negated(self) -> Self {
        Self { gamma: -self.gamma, lambda: -self.lambda, mu: -self.mu }
    }

    /// Operator norm of the interaction: the largest |v̂(x)| over the support.
    pub fn interaction_norm(self) -> f64 {
        self.gamma.abs().max(0.5 * self.lambda.abs()).max(0.5 * self.mu.abs())
    }
}

/// Total quasimomentum of the pair, components in `[-π, π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quasimomentum {
    pub k1: f64,
    pub k2: f64,
}

impl Quasimomentum {
    pub fn new(k1: f64, k2: f64) -> Self {
        Self { k1: reduce_angle(k1), k2: reduce_angle(k2) }
    }

    pub const ZERO: Self = Self { k1: 0.0, k2: 0.0 };

    /// Hopping weights `cos(K_i/2)`; non-negative because `K_i ∈ [-π, π)`.
    pub fn hopping(self) -> [f64; 2] {
        [(0.5 * self.k1).cos(), (0.5 * self.k2).cos()]
    }
}

/// A point of the torus, components in `[-π, π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentumPoint {
    pub p1: f64,
    pub p2: f64,
}

impl MomentumPoint {
    pub fn new(p1: f64, p2: f64) -> Self {
        Self { p1: reduce_angle(p1), p2: reduce_angle(p2) }
    }

    pub fn swapped(self) -> Self {
        Self { p1: self.p2, p2: self.p1 }
    }

    pub fn negated(self) -> Self {
        Self::new(-self.p1, -self.p2)
    }
}

/// The interval `[ℰ_min(K), ℰ_max(K)]` of essential spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EssentialBand {
    pub lo: f64,
    pub hi: f64,
}

impl EssentialBand {
    pub fn edge(&self, side: SideTag) -> f64 {
        match side {
            SideTag::Below => self.lo,
            SideTag::Above => self.hi,
        }
    }

    /// Signed distance of `z` outside the band on the given side (positive when outside).
    pub fn distance(&self, side: SideTag, z: f64) -> f64 {
        match side {
            SideTag::Below => self.lo - z,
            SideTag::Above => z - self.hi,
        }
    }

    pub fn contains(&self, z: f64) -> bool {
        self.lo <= z && z <= self.hi
    }
}

/// Symmetry sectors of even functions on the torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SectorTag {
    /// Even in each coordinate, symmetric under swap.
    Ees,
    /// Odd in each coordinate, symmetric under swap.
    Oos,
    /// Even in each coordinate, antisymmetric under swap.
    Ea,
}

impl SectorTag {
    pub const ALL: [SectorTag; 3] = [SectorTag::Ees, SectorTag::Oos, SectorTag::Ea];

    pub fn name(self) -> &'static str {
        match self {
            SectorTag::Ees => "ees",
            SectorTag::Oos => "oos",
            SectorTag::Ea => "ea",
        }
    }

    /// Number of independent kernels, which bounds the eigenvalue count per side.
    pub fn rank(self) -> usize {
        match self {
            SectorTag::Ees => 4,
            SectorTag::Oos => 1,
            SectorTag::Ea => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SideTag {
    Below,
    Above,
}

impl SideTag {
    pub const BOTH: [SideTag; 2] = [SideTag::Below, SideTag::Above];

    pub fn name(self) -> &'static str {
        match self {
            SideTag::Below => "below",
            SideTag::Above => "above",
        }
    }

    /// Direction pointing away from the band: -1 below, +1 above.
    pub fn outward(self) -> f64 {
        match self {
            SideTag::Below => -1.0,
            SideTag::Above => 1.0,
        }
    }
}

/// ε(p) = Σ (1 − cos p_i).
pub fn single_dispersion(p: MomentumPoint) -> f64 {
    (1.0 - p.p1.cos()) + (1.0 - p.p2.cos())
}

/// ℰ_K(p) = 2 Σ (1 − cos(K_i/2) cos p_i).
pub fn fiber_dispersion(k: Quasimomentum, p: MomentumPoint) -> f64 {
    let [h1, h2] = k.hopping();
    2.0 * ((1.0 - h1 * p.p1.cos()) + (1.0 - h2 * p.p2.cos()))
}

pub fn essential_band(k: Quasimomentum) -> EssentialBand {
    let [h1, h2] = k.hopping();
    EssentialBand {
        lo: 2.0 * ((1.0 - h1) + (1.0 - h2)),
        hi: 2.0 * ((1.0 + h1) + (1.0 + h2)),
    }
}

/// Fourier symbol v(p) of the interaction.
pub fn potential_symbol(p: MomentumPoint, c: CouplingTriple) -> f64 {
    let (c1, c2) = (p.p1.cos(), p.p2.cos());
    c.gamma
        + c.lambda * (c1 + c2)
        + c.mu * ((2.0 * p.p1).cos() + (2.0 * p.p2).cos())
        + 2.0 * c.mu * c1 * c2
}

/// Interaction in position space; `|x|` is the ℓ¹ norm.
pub fn position_potential(x: (i64, i64), c: CouplingTriple) -> f64 {
    match x.0.abs() + x.1.abs() {
        0 => c.gamma,
        1 => 0.5 * c.lambda,
        2 => 0.5 * c.mu,
        _ => 0.0,
    }
}

/// The thirteen lattice sites where the interaction can be non-zero.
pub fn potential_support() -> Vec<(i64, i64)> {
    let mut sites = Vec::with_capacity(13);
    for x1 in -2i64..=2 {
        for x2 in -2i64..=2 {
            if x1.abs() + x2.abs() <= 2 {
                sites.push((x1, x2));
            }
        }
    }
    sites
}

/// Orthonormal basis of the ees part of the interaction range, `i ∈ 1..=4`.
pub fn sector_basis_ees(i: usize, p: MomentumPoint) -> Result<f64> {
    let v = match i {
        1 => 1.0,
        2 => p.p1.cos() + p.p2.cos(),
        3 => (2.0 * p.p1).cos() + (2.0 * p.p2).cos(),
        4 => 2.0 * p.p1.cos() * p.p2.cos(),
        _ => return Err(Error::BasisIndex(i)),
    };
    Ok(v / TAU)
}

/// Unnormalised kernel factors of each sector; ees delegates to the orthonormal basis.
pub fn sector_kernel(tag: SectorTag, j: usize, p: MomentumPoint) -> Result<f64> {
    match (tag, j) {
        (SectorTag::Ees, _) => sector_basis_ees(j, p),
        (SectorTag::Oos, 1) => Ok(p.p1.sin() * p.p2.sin()),
        (SectorTag::Ea, 1) => Ok(p.p1.cos() - p.p2.cos()),
        (SectorTag::Ea, 2) => Ok((2.0 * p.p1).cos() - (2.0 * p.p2).cos()),
        (tag, j) => Err(Error::KernelIndex { sector: tag.name(), index: j }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn pt(p1: f64, p2: f64) -> MomentumPoint {
        MomentumPoint::new(p1, p2)
    }

    #[test]
    fn angle_reduction_lands_in_half_open_interval() {
        assert_eq!(reduce_angle(PI), -PI);
        assert_eq!(reduce_angle(-PI), -PI);
        assert!((reduce_angle(3.0 * PI + 0.25) - (-PI + 0.25)).abs() < 1e-12);
        assert!((reduce_angle(-0.5) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn single_dispersion_examples() {
        assert_eq!(single_dispersion(pt(0.0, 0.0)), 0.0);
        assert!((single_dispersion(pt(PI, PI)) - 4.0).abs() < 1e-15);
        assert!((single_dispersion(pt(FRAC_PI_2, 0.0)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn fiber_dispersion_examples() {
        let zero = Quasimomentum::ZERO;
        assert_eq!(fiber_dispersion(zero, pt(0.0, 0.0)), 0.0);
        assert!((fiber_dispersion(zero, pt(PI, PI)) - 8.0).abs() < 1e-15);
        let corner = Quasimomentum::new(PI, PI);
        for p in [pt(0.3, -1.2), pt(PI, 0.0), pt(0.0, 0.0)] {
            assert!((fiber_dispersion(corner, p) - 4.0).abs() < 1e-15);
        }
        let p = pt(0.7, -2.1);
        assert!((fiber_dispersion(zero, p) - 2.0 * single_dispersion(p)).abs() < 1e-15);
    }

    #[test]
    fn band_examples() {
        let b = essential_band(Quasimomentum::ZERO);
        assert_eq!((b.lo, b.hi), (0.0, 8.0));
        let b = essential_band(Quasimomentum::new(PI, PI));
        assert!((b.lo - 4.0).abs() < 1e-15 && (b.hi - 4.0).abs() < 1e-15);
        let b = essential_band(Quasimomentum::new(PI, 0.0));
        assert!((b.lo - 2.0).abs() < 1e-15 && (b.hi - 6.0).abs() < 1e-15);
    }

    #[test]
    fn symbol_examples() {
        let one = CouplingTriple::new(1.0, 1.0, 1.0).unwrap();
        assert!((potential_symbol(pt(0.0, 0.0), one) - 7.0).abs() < 1e-15);
        assert_eq!(potential_symbol(pt(0.4, 2.0), CouplingTriple::ZERO), 0.0);
        let lam = CouplingTriple::new(0.0, 1.0, 0.0).unwrap();
        assert!(potential_symbol(pt(PI, 0.0), lam).abs() < 1e-15);
    }

    #[test]
    fn position_examples() {
        let c = CouplingTriple::new(3.0, 5.0, 7.0).unwrap();
        assert_eq!(position_potential((0, 0), c), 3.0);
        assert_eq!(position_potential((1, 1), c), 3.5);
        assert_eq!(position_potential((0, -1), c), 2.5);
        assert_eq!(position_potential((3, 0), c), 0.0);
        assert_eq!(potential_support().len(), 13);
    }

    #[test]
    fn basis_examples() {
        assert!((sector_basis_ees(1, pt(1.0, 2.0)).unwrap() - 1.0 / TAU).abs() < 1e-16);
        assert!((sector_basis_ees(4, pt(0.0, 0.0)).unwrap() - 1.0 / PI).abs() < 1e-16);
        assert!(sector_basis_ees(2, pt(PI, 0.0)).unwrap().abs() < 1e-16);
        assert_eq!(sector_basis_ees(5, pt(0.0, 0.0)), Err(Error::BasisIndex(5)));
    }

    #[test]
    fn kernel_examples() {
        let k = sector_kernel(SectorTag::Oos, 1, pt(FRAC_PI_2, FRAC_PI_2)).unwrap();
        assert!((k - 1.0).abs() < 1e-15);
        assert_eq!(sector_kernel(SectorTag::Ea, 1, pt(0.8, 0.8)).unwrap(), 0.0);
        let k = sector_kernel(SectorTag::Ea, 2, pt(FRAC_PI_2, 0.0)).unwrap();
        assert!((k + 2.0).abs() < 1e-15);
        assert!(sector_kernel(SectorTag::Oos, 2, pt(0.0, 0.0)).is_err());
        assert!(sector_kernel(SectorTag::Ea, 0, pt(0.0, 0.0)).is_err());
    }

    #[test]
    fn non_finite_couplings_rejected() {
        assert_eq!(
            CouplingTriple::new(f64::NAN, 0.0, 0.0),
            Err(Error::NonFiniteCoupling("gamma"))
        );
        assert!(CouplingTriple::new(0.0, 0.0, f64::INFINITY).is_err());
    }
}
