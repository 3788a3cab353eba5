//! Torus integrals against the free resolvent at zero quasimomentum.
//!
//! All integrals have the form ∫_{T²} f(p)/(ℰ_0(p) − z) dp with f a
//! trigonometric polynomial. The default path integrates p1 in closed form and
//! the remaining p2 integral by Gauss–Legendre panels on a sinh-stretched
//! variable that resolves the √ε-wide peak near the band edge. A plain periodic
//! trapezoid on the full torus is kept as an independent second method.

mod asymptotics;
mod semi_analytic;
mod trapezoid;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{fiber_dispersion, sector_basis_ees, MomentumPoint, Quasimomentum};

pub use asymptotics::{asymptote_printed, asymptotic_reference, threshold_constant, threshold_slope};
pub use semi_analytic::poisson_moment;
pub use trapezoid::{integrate_torus_2d, TorusIntegral};

use semi_analytic::{Factor, Moments};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureMethod {
    SemiAnalytic1d,
    Trapezoid2d,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub method: QuadratureMethod,
    /// Starting node count (per axis for the 2D rule).
    pub initial_points: usize,
    pub rel_tol: f64,
    pub max_doublings: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            method: QuadratureMethod::SemiAnalytic1d,
            initial_points: 64,
            rel_tol: 1e-12,
            max_doublings: 12,
        }
    }
}

impl QuadratureSpec {
    pub fn trapezoid() -> Self {
        Self { method: QuadratureMethod::Trapezoid2d, initial_points: 32, max_doublings: 7, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) {
            return Err(Error::Config(format!("rel_tol must be positive, got {}", self.rel_tol)));
        }
        if self.initial_points < 8 {
            return Err(Error::Config(format!("initial_points must be at least 8, got {}", self.initial_points)));
        }
        if self.max_doublings > 16 {
            return Err(Error::Config(format!("max_doublings must be at most 16, got {}", self.max_doublings)));
        }
        Ok(())
    }
}

/// Symmetric 4×4 array of the ees Green's entries a_ij(z).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreensMatrix {
    pub z: f64,
    pub a: [[f64; 4]; 4],
}

impl GreensMatrix {
    /// Entry with 1-based indices.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.a[i - 1][j - 1]
    }
}

/// Everything the K = 0 determinants need at one spectral parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorIntegrals {
    pub z: f64,
    pub greens: GreensMatrix,
    pub c_oos: f64,
    pub g: [f64; 3],
}

const EES_FACTORS: [Factor; 4] = [Factor::One, Factor::CosSum, Factor::Cos2Sum, Factor::CosProd];
const PAIRS: [(usize, usize); 10] = [(0, 0), (0, 1), (0, 2), (0, 3), (1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3)];
const CORE_PAIRS: [(usize, usize); 6] = [(0, 0), (0, 2), (0, 3), (2, 2), (2, 3), (3, 3)];

/// a_ij = (1/2)∫α_iα_j/(ℰ_0−z) with α_i = f_i/(2π).
const GREENS_SCALE: f64 = 1.0 / (8.0 * std::f64::consts::PI * std::f64::consts::PI);
const EA_SCALE: f64 = GREENS_SCALE;
const OOS_SCALE: f64 = 1.0 / (2.0 * std::f64::consts::PI * std::f64::consts::PI);

fn reject_band(z: f64, allow_edge: bool) -> Result<()> {
    let outside = if allow_edge { z <= 0.0 || z >= 8.0 } else { !(0.0..=8.0).contains(&z) };
    if outside && z.is_finite() {
        Ok(())
    } else {
        Err(Error::InsideBand { z, lo: 0.0, hi: 8.0 })
    }
}

fn ees_value(i: usize, p: MomentumPoint) -> f64 {
    sector_basis_ees(i, p).expect("index checked by caller")
}

/// The ees Green's entry a_ij(z), 1-based indices.
pub fn greens_entry(i: usize, j: usize, z: f64, spec: &QuadratureSpec) -> Result<f64> {
    spec.validate()?;
    for k in [i, j] {
        if !(1..=4).contains(&k) {
            return Err(Error::BasisIndex(k));
        }
    }
    reject_band(z, false)?;
    match spec.method {
        QuadratureMethod::SemiAnalytic1d => {
            let m = Moments::compute(z, spec, &[(EES_FACTORS[i - 1], EES_FACTORS[j - 1])])?;
            Ok(GREENS_SCALE * m.values[0])
        }
        QuadratureMethod::Trapezoid2d => {
            let f = |p1: f64, p2: f64| {
                let p = MomentumPoint { p1, p2 };
                0.5 * ees_value(i, p) * ees_value(j, p) / (fiber_dispersion(Quasimomentum::ZERO, p) - z)
            };
            Ok(integrate_torus_2d(f, spec).value)
        }
    }
}

fn fill_symmetric(a: &mut [[f64; 4]; 4], pairs: &[(usize, usize)], values: &[f64]) {
    for (&(i, j), &v) in pairs.iter().zip(values) {
        a[i][j] = GREENS_SCALE * v;
        a[j][i] = GREENS_SCALE * v;
    }
}

/// Completes the second row and column from the first via the recursion
/// a_2j = (4−z)/2 · a_1j − δ_1j/4.
fn derive_second_row(a: &mut [[f64; 4]; 4], z: f64) {
    let h = 0.5 * (4.0 - z);
    a[0][1] = h * a[0][0] - 0.25;
    a[1][0] = a[0][1];
    a[1][1] = h * a[0][1];
    a[1][2] = h * a[0][2];
    a[1][3] = h * a[0][3];
    for j in 1..4 {
        a[j][1] = a[1][j];
    }
}

/// All ten Green's entries with every entry integrated directly.
pub fn greens_matrix_direct(z: f64, spec: &QuadratureSpec) -> Result<GreensMatrix> {
    spec.validate()?;
    reject_band(z, false)?;
    let mut a = [[0.0; 4]; 4];
    match spec.method {
        QuadratureMethod::SemiAnalytic1d => {
            let products: Vec<_> = PAIRS.iter().map(|&(i, j)| (EES_FACTORS[i], EES_FACTORS[j])).collect();
            let m = Moments::compute(z, spec, &products)?;
            fill_symmetric(&mut a, &PAIRS, &m.values);
        }
        QuadratureMethod::Trapezoid2d => {
            for &(i, j) in &PAIRS {
                let v = greens_entry(i + 1, j + 1, z, spec)?;
                a[i][j] = v;
                a[j][i] = v;
            }
        }
    }
    Ok(GreensMatrix { z, a })
}

/// All ten Green's entries; the second row is derived from the first by the
/// exact recursion, which saves four integrals.
pub fn greens_matrix(z: f64, spec: &QuadratureSpec) -> Result<GreensMatrix> {
    spec.validate()?;
    reject_band(z, false)?;
    if spec.method == QuadratureMethod::Trapezoid2d {
        return greens_matrix_direct(z, spec);
    }
    let products: Vec<_> = CORE_PAIRS.iter().map(|&(i, j)| (EES_FACTORS[i], EES_FACTORS[j])).collect();
    let m = Moments::compute(z, spec, &products)?;
    let mut a = [[0.0; 4]; 4];
    fill_symmetric(&mut a, &CORE_PAIRS, &m.values);
    derive_second_row(&mut a, z);
    Ok(GreensMatrix { z, a })
}

/// c_oos(z) = (1/(2π²))∫ sin²q1 sin²q2/(ℰ_0(q)−z) dq; band edges allowed.
pub fn oos_integral(z: f64, spec: &QuadratureSpec) -> Result<f64> {
    spec.validate()?;
    reject_band(z, true)?;
    match spec.method {
        QuadratureMethod::SemiAnalytic1d => {
            let m = Moments::compute(z, spec, &[(Factor::SinProd, Factor::SinProd)])?;
            Ok(OOS_SCALE * m.values[0])
        }
        QuadratureMethod::Trapezoid2d => {
            reject_band(z, false)?;
            let f = |p1: f64, p2: f64| {
                let s = p1.sin() * p2.sin();
                OOS_SCALE * s * s / (fiber_dispersion(Quasimomentum::ZERO, MomentumPoint { p1, p2 }) - z)
            };
            Ok(integrate_torus_2d(f, spec).value)
        }
    }
}

/// (g11, g12, g22) with g_kl = (1/(8π²))∫ u_k u_l/(ℰ_0−z); band edges allowed.
pub fn ea_integrals(z: f64, spec: &QuadratureSpec) -> Result<[f64; 3]> {
    spec.validate()?;
    reject_band(z, true)?;
    match spec.method {
        QuadratureMethod::SemiAnalytic1d => {
            let m = Moments::compute(
                z,
                spec,
                &[
                    (Factor::CosDiff, Factor::CosDiff),
                    (Factor::CosDiff, Factor::Cos2Diff),
                    (Factor::Cos2Diff, Factor::Cos2Diff),
                ],
            )?;
            Ok([EA_SCALE * m.values[0], EA_SCALE * m.values[1], EA_SCALE * m.values[2]])
        }
        QuadratureMethod::Trapezoid2d => {
            reject_band(z, false)?;
            let mut out = [0.0; 3];
            for (slot, (k, l)) in [(1, 1), (1, 2), (2, 2)].into_iter().enumerate() {
                let f = |p1: f64, p2: f64| {
                    let u = |n: i32| (n as f64 * p1).cos() - (n as f64 * p2).cos();
                    EA_SCALE * u(k) * u(l) / (fiber_dispersion(Quasimomentum::ZERO, MomentumPoint { p1, p2 }) - z)
                };
                out[slot] = integrate_torus_2d(f, spec).value;
            }
            Ok(out)
        }
    }
}

/// One pass over the quadrature nodes producing everything the determinants
/// need at `z` (strictly outside the band).
pub fn sector_integrals(z: f64, spec: &QuadratureSpec, direct_greens: bool) -> Result<SectorIntegrals> {
    spec.validate()?;
    reject_band(z, false)?;
    if spec.method == QuadratureMethod::Trapezoid2d {
        return Ok(SectorIntegrals {
            z,
            greens: greens_matrix_direct(z, spec)?,
            c_oos: oos_integral(z, spec)?,
            g: ea_integrals(z, spec)?,
        });
    }
    let pairs: &[(usize, usize)] = if direct_greens { &PAIRS } else { &CORE_PAIRS };
    let mut products: Vec<_> = pairs.iter().map(|&(i, j)| (EES_FACTORS[i], EES_FACTORS[j])).collect();
    products.extend([
        (Factor::SinProd, Factor::SinProd),
        (Factor::CosDiff, Factor::CosDiff),
        (Factor::CosDiff, Factor::Cos2Diff),
        (Factor::Cos2Diff, Factor::Cos2Diff),
    ]);
    let m = Moments::compute(z, spec, &products)?;
    let n = pairs.len();
    let mut a = [[0.0; 4]; 4];
    fill_symmetric(&mut a, pairs, &m.values[..n]);
    if !direct_greens {
        derive_second_row(&mut a, z);
    }
    let tail = &m.values[n..];
    Ok(SectorIntegrals {
        z,
        greens: GreensMatrix { z, a },
        c_oos: OOS_SCALE * tail[0],
        g: [EA_SCALE * tail[1], EA_SCALE * tail[2], EA_SCALE * tail[3]],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn second_row_identities_hold() {
        for z in [-5.0, -1.0, -1e-3, 8.001, 9.0, 12.0] {
            let g = greens_matrix_direct(z, &spec()).unwrap();
            let h = 0.5 * (4.0 - z);
            let rel = |x: f64, y: f64| (x - y).abs() / y.abs();
            assert!(rel(g.entry(1, 2), h * g.entry(1, 1) - 0.25) < 1e-10, "a12 at {z}");
            assert!(rel(g.entry(2, 2), h * g.entry(1, 2)) < 1e-10, "a22 at {z}");
            assert!(rel(g.entry(2, 3), h * g.entry(1, 3)) < 1e-10, "a23 at {z}");
            assert!(rel(g.entry(2, 4), h * g.entry(1, 4)) < 1e-10, "a24 at {z}");
        }
    }

    #[test]
    fn derived_and_direct_matrices_agree() {
        for z in [-3.0, -0.01, 8.5, 20.0] {
            let d = greens_matrix_direct(z, &spec()).unwrap();
            let r = greens_matrix(z, &spec()).unwrap();
            for i in 0..4 {
                for j in 0..4 {
                    assert!((d.a[i][j] - r.a[i][j]).abs() <= 1e-12 * d.a[i][j].abs().max(1e-3), "z={z} {i}{j} {} {}", d.a[i][j], r.a[i][j]);
                }
            }
        }
    }

    #[test]
    fn band_interior_is_rejected() {
        assert!(greens_entry(1, 1, 4.0, &spec()).is_err());
        assert!(greens_entry(1, 1, 0.0, &spec()).is_err());
        assert!(greens_matrix(8.0, &spec()).is_err());
        assert!(oos_integral(0.5, &spec()).is_err());
        assert!(ea_integrals(7.9, &spec()).is_err());
        assert!(oos_integral(0.0, &spec()).is_ok());
        assert!(ea_integrals(8.0, &spec()).is_ok());
        assert_eq!(greens_entry(0, 1, -1.0, &spec()), Err(Error::BasisIndex(0)));
    }

    #[test]
    fn far_field_of_a11() {
        // (1/2)∫(2π)^{-2}/(ℰ_0 − z) expanded in 1/|z|: (1/(2|z|))(1 − 4/|z| + ...) with z < 0.
        let z = -1e6;
        let a = greens_entry(1, 1, z, &spec()).unwrap();
        let w = 1.0 / -z;
        let expected = 0.5 * w * (1.0 - 4.0 * w + (16.0 + 6.0) * w * w);
        assert!((a - expected).abs() < 1e-11, "{a} vs {expected}");
        for z in [-1e4, -1e6] {
            let a = greens_entry(1, 1, z, &spec()).unwrap();
            assert!((-z * a - 0.5).abs() < 1e-3 * 0.5);
        }
    }

    #[test]
    fn exact_edge_values_of_sector_integrals() {
        let c0 = oos_integral(0.0, &spec()).unwrap();
        let c8 = oos_integral(8.0, &spec()).unwrap();
        assert!((c0 - (1.0 - 8.0 / (3.0 * PI))).abs() < 1e-12, "{c0}");
        assert!((c0 + c8).abs() < 1e-12);
        let g = ea_integrals(0.0, &spec()).unwrap();
        assert!((g[0] - (4.0 - PI) / (2.0 * PI)).abs() < 1e-12);
        assert!((g[1] - (16.0 - 5.0 * PI) / (2.0 * PI)).abs() < 1e-12);
        assert!((g[2] - 2.0 * (16.0 - 5.0 * PI) / PI).abs() < 1e-12);
        let h = ea_integrals(8.0, &spec()).unwrap();
        assert!((h[0] + g[0]).abs() < 1e-12 && (h[1] - g[1]).abs() < 1e-12 && (h[2] + g[2]).abs() < 1e-12);
    }

    #[test]
    fn combined_pass_matches_separate_calls() {
        for z in [-0.3, 9.5] {
            let s = sector_integrals(z, &spec(), false).unwrap();
            let g = greens_matrix(z, &spec()).unwrap();
            for i in 0..4 {
                for j in 0..4 {
                    assert!((s.greens.a[i][j] - g.a[i][j]).abs() <= 1e-13 * g.a[i][j].abs().max(1e-3));
                }
            }
            assert!((s.c_oos - oos_integral(z, &spec()).unwrap()).abs() < 1e-14);
            let g = ea_integrals(z, &spec()).unwrap();
            for k in 0..3 {
                assert!((s.g[k] - g[k]).abs() < 1e-14);
            }
        }
    }
}
