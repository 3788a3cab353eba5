//! Closed-form p1 integration followed by stretched Gauss–Legendre in p2.

use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

use gauss_quad::GaussLegendre;

use super::QuadratureSpec;
use crate::error::{Error, Result};

const PANEL_ORDER: usize = 16;
const HARMONICS: usize = 5;

fn panel_rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        GaussLegendre::new(PANEL_ORDER)
            .expect("order above 1")
            .as_node_weight_pairs()
            .to_vec()
    })
}

/// ∫_{-π}^{π} cos(nt)/(a − cos t) dt = 2π βⁿ/√(a²−1), β = a − √(a²−1).
pub fn poisson_moment(a: f64, n: u32) -> Result<f64> {
    if !(a > 1.0 + 1e-14) || !a.is_finite() {
        return Err(Error::PoissonDomain(a));
    }
    let (base, beta) = moment_parts(a - 1.0);
    Ok(base * beta.powi(n as i32))
}

/// For `a = 1 + excess`, returns (2π/√(a²−1), β) without cancellation.
fn moment_parts(excess: f64) -> (f64, f64) {
    let s = excess.sqrt();
    let t = (excess + 2.0).sqrt();
    let beta = 2.0 / ((t + s) * (t + s));
    (TAU / (s * t), beta)
}

/// Trigonometric factors in p1 whose pairwise products make up every kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Factor {
    One,
    /// cos p1 + cos p2
    CosSum,
    /// cos 2p1 + cos 2p2
    Cos2Sum,
    /// 2 cos p1 cos p2
    CosProd,
    /// cos p1 − cos p2
    CosDiff,
    /// cos 2p1 − cos 2p2
    Cos2Diff,
    /// sin p1 sin p2
    SinProd,
}

impl Factor {
    /// Cosine-series coefficients in p1 (orders 0..=2) at fixed p2.
    fn series(self, cp: f64, c2p: f64) -> [f64; 3] {
        match self {
            Factor::One => [1.0, 0.0, 0.0],
            Factor::CosSum => [cp, 1.0, 0.0],
            Factor::Cos2Sum => [c2p, 0.0, 1.0],
            Factor::CosProd => [0.0, 2.0 * cp, 0.0],
            Factor::CosDiff => [-cp, 1.0, 0.0],
            Factor::Cos2Diff => [-c2p, 0.0, 1.0],
            Factor::SinProd => unreachable!("sine factor has no cosine series"),
        }
    }
}

fn product_series(f: Factor, g: Factor, cp: f64, c2p: f64, sp: f64) -> [f64; HARMONICS] {
    match (f, g) {
        (Factor::SinProd, Factor::SinProd) => {
            let w = 0.5 * sp * sp;
            [w, 0.0, -w, 0.0, 0.0]
        }
        // odd in p1 against an even factor
        (Factor::SinProd, _) | (_, Factor::SinProd) => [0.0; HARMONICS],
        _ => {
            let (a, b) = (f.series(cp, c2p), g.series(cp, c2p));
            let mut out = [0.0; HARMONICS];
            for m in 0..3 {
                for n in 0..3 {
                    let h = 0.5 * a[m] * b[n];
                    out[m + n] += h;
                    out[m.abs_diff(n)] += h;
                }
            }
            out
        }
    }
}

pub(crate) struct Moments {
    /// ∫_{T²} f(p)g(p)/(ℰ_0(p) − z) dp for each requested product.
    pub values: Vec<f64>,
}

struct Geometry {
    /// Distance of z from the nearest band edge.
    eps: f64,
    /// −1 above the band, where the inner integral picks up alternating signs.
    parity: f64,
}

impl Geometry {
    fn new(z: f64) -> Self {
        if z <= 0.0 {
            Self { eps: -z, parity: 1.0 }
        } else {
            Self { eps: z - 8.0, parity: -1.0 }
        }
    }

    /// Upper end of the integration variable.
    fn span(&self) -> f64 {
        if self.eps > 0.0 {
            (PI / self.eps.sqrt()).asinh()
        } else {
            PI
        }
    }

    /// Distance `d` from the singular end (p2 = 0 below, p2 = π above) and the Jacobian.
    fn map(&self, u: f64) -> (f64, f64) {
        if self.eps > 0.0 {
            let r = self.eps.sqrt();
            (r * u.sinh(), r * u.cosh())
        } else {
            (u, 1.0)
        }
    }
}

impl Moments {
    pub fn compute(z: f64, spec: &QuadratureSpec, products: &[(Factor, Factor)]) -> Result<Self> {
        let geo = Geometry::new(z);
        let mut panels = spec.initial_points.div_ceil(PANEL_ORDER).max(1);
        let (mut prev, _) = Self::sweep(&geo, panels, products);
        for _ in 0..spec.max_doublings {
            panels *= 2;
            let (next, scale) = Self::sweep(&geo, panels, products);
            let settled = next.iter().zip(&prev).zip(&scale).all(|((v, p), s)| {
                (v - p).abs() <= spec.rel_tol * v.abs() + 64.0 * f64::EPSILON * s
            });
            prev = next;
            if settled {
                return Ok(Self { values: prev });
            }
        }
        Err(Error::Quadrature(z))
    }

    /// One composite rule; also returns ∫|integrand| per product as a roundoff scale.
    fn sweep(geo: &Geometry, panels: usize, products: &[(Factor, Factor)]) -> (Vec<f64>, Vec<f64>) {
        let rule = panel_rule();
        let width = geo.span() / panels as f64;
        let mut sums = vec![0.0; products.len()];
        let mut scale = vec![0.0; products.len()];
        let mut moments = [0.0; HARMONICS];
        for k in 0..panels {
            let mid = (k as f64 + 0.5) * width;
            for &(x, w) in rule {
                let (d, jac) = geo.map(mid + 0.5 * width * x);
                let half = (0.5 * d).sin();
                let excess = 2.0 * half * half + 0.5 * geo.eps;
                let (base, beta) = moment_parts(excess);
                // above the band the n-th moment carries the sign (−1)^{n+1}
                let mut term = geo.parity * base;
                let step = geo.parity * beta;
                for slot in moments.iter_mut() {
                    *slot = term;
                    term *= step;
                }
                // p2 = d below the band and π − d above it
                let cp = geo.parity * d.cos();
                let c2p = (2.0 * d).cos();
                let sp = d.sin();
                let weight = 0.5 * width * w * jac;
                for (slot, &(f, g)) in products.iter().enumerate() {
                    let series = product_series(f, g, cp, c2p, sp);
                    let v: f64 = series.iter().zip(&moments).map(|(c, m)| c * m).sum();
                    sums[slot] += weight * v;
                    scale[slot] += weight * v.abs();
                }
            }
        }
        (sums, scale)
    }
}
