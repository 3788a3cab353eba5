//! Boundary curves of the sector decompositions, sampled branch by branch.

use std::io::Write;

use clap::{Args, ValueEnum};
use serde_json::{json, Value};

use twoboson::lattice::SideTag;
use twoboson::regions::{constants, gamma_surface, lambda_curve};
use twoboson::{Error, Result};

use crate::commands::{csv_writer, io_error, write_json};
use crate::config::{parse_pair, Format, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    /// τ_j curves λ = λ(μ), one branch per interval between the roots of Q_0.
    Tau,
    /// γ = γ(λ) at fixed μ, split at its pole.
    GammaSlice,
    /// ea boundary λ = 4/(μ + μ̃) − 8 (mirrored above the band).
    ABoundary,
    /// oos thresholds μ = ∓3π/(3π − 8) as vertical segments.
    SThreshold,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Sign {
    Minus,
    Plus,
    Both,
}

#[derive(Args, Debug)]
pub struct PhaseArgs {
    #[arg(value_enum)]
    which: Which,
    #[arg(long, value_enum, default_value = "both")]
    sign: Sign,
    /// Range of the horizontal variable (μ, or λ for gamma-slice).
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true, default_value = "-20,20")]
    range: (f64, f64),
    /// Samples per branch.
    #[arg(long, default_value_t = 400)]
    points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub side: SideTag,
    pub index: usize,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

/// Relative gap kept from poles so that samples stay finite.
const POLE_GAP: f64 = 1e-6;

/// Samples of the open interval (lo, hi) ∩ range, or nothing if it is empty.
fn samples(lo: f64, hi: f64, range: (f64, f64), n: usize) -> Vec<f64> {
    let gap = |v: f64| POLE_GAP * v.abs().max(1.0);
    let a = if lo.is_finite() { (lo + gap(lo)).max(range.0) } else { range.0 };
    let b = if hi.is_finite() { (hi - gap(hi)).min(range.1) } else { range.1 };
    if !(a < b) || n < 2 {
        return Vec::new();
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn sides(sign: Sign) -> Vec<SideTag> {
    match sign {
        Sign::Minus => vec![SideTag::Below],
        Sign::Plus => vec![SideTag::Above],
        Sign::Both => SideTag::BOTH.to_vec(),
    }
}

/// ∓ applied to a below-band abscissa.
fn mirror(v: f64, side: SideTag) -> f64 {
    match side {
        SideTag::Below => v,
        SideTag::Above => -v,
    }
}

pub fn branches(which: Which, side: SideTag, mu: Option<f64>, range: (f64, f64), n: usize) -> Result<Vec<Branch>> {
    let k = constants();
    let mut out = Vec::new();
    match which {
        Which::Tau => {
            // I_1 = (μ_0^+, ∞), I_2 = (μ_0^−, μ_0^+), I_3 = (−∞, μ_0^−) below the band
            let cuts = [(k.mu0_plus, f64::INFINITY), (k.mu0_minus, k.mu0_plus), (f64::NEG_INFINITY, k.mu0_minus)];
            for (j, (lo, hi)) in cuts.into_iter().enumerate() {
                let (lo, hi) = match side {
                    SideTag::Below => (lo, hi),
                    SideTag::Above => (-hi, -lo),
                };
                let x = samples(lo, hi, range, n);
                let y = x.iter().map(|&m| lambda_curve(m, side)).collect::<Result<Vec<_>>>()?;
                out.push(Branch { side, index: j + 1, x, y });
            }
        }
        Which::GammaSlice => {
            let mu = mu.ok_or_else(|| Error::Config("gamma-slice needs -u/--mu".into()))?;
            if [k.mu0_minus, k.mu0_plus].iter().any(|&r| (mirror(mu, side) - r).abs() <= 1e-9 * r.abs()) {
                return Err(Error::Pole { what: "Q_0 at the slice", at: mu });
            }
            let pole = lambda_curve(mu, side)?;
            for (j, (lo, hi)) in [(f64::NEG_INFINITY, pole), (pole, f64::INFINITY)].into_iter().enumerate() {
                let x = samples(lo, hi, range, n);
                let y = x.iter().map(|&l| gamma_surface(l, mu, side)).collect::<Result<Vec<_>>>()?;
                out.push(Branch { side, index: j + 1, x, y });
            }
        }
        Which::ABoundary => {
            let pole = mirror(-k.mu_tilde, side);
            for (j, (lo, hi)) in [(f64::NEG_INFINITY, pole), (pole, f64::INFINITY)].into_iter().enumerate() {
                let x = samples(lo, hi, range, n);
                let y = x.iter().map(|&m| mirror(4.0 / (mirror(m, side) + k.mu_tilde) - 8.0, side)).collect();
                out.push(Branch { side, index: j + 1, x, y });
            }
        }
        Which::SThreshold => {
            let m = mirror(-k.s_threshold, side);
            out.push(Branch { side, index: 1, x: vec![m, m], y: vec![range.0, range.1] });
        }
    }
    out.retain(|b| !b.x.is_empty());
    Ok(out)
}

fn axis_names(which: Which) -> (&'static str, &'static str) {
    match which {
        Which::GammaSlice => ("lambda", "gamma"),
        _ => ("mu", "lambda"),
    }
}

fn sign_name(side: SideTag) -> &'static str {
    match side {
        SideTag::Below => "minus",
        SideTag::Above => "plus",
    }
}

pub fn phase_diagram(cfg: &RunConfig, args: &PhaseArgs, out: &mut dyn Write) -> Result<()> {
    let (lo, hi) = args.range;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) || args.points < 2 {
        return Err(Error::Config("range must be finite and increasing, points at least 2".into()));
    }
    let mut all = Vec::new();
    for side in sides(args.sign) {
        all.extend(branches(args.which, side, cfg.mu, args.range, args.points)?);
    }
    let set = args.which.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
    let (xn, yn) = axis_names(args.which);
    match cfg.format {
        Format::Json => {
            let bs: Vec<Value> = all
                .iter()
                .map(|b| json!({ "sign": sign_name(b.side), "branch": b.index, "x": b.x, "y": b.y }))
                .collect();
            write_json(out, &json!({ "set": set, "x": xn, "y": yn, "branches": bs }))
        }
        Format::Csv => {
            let mut w = csv_writer(out);
            w.write_record(["set", "sign", "branch", xn, yn]).map_err(io_error)?;
            for (n, b) in all.iter().enumerate() {
                if n > 0 {
                    w.serialize((&set, sign_name(b.side), b.index, f64::NAN, f64::NAN)).map_err(io_error)?;
                }
                for (x, y) in b.x.iter().zip(&b.y) {
                    w.serialize((&set, sign_name(b.side), b.index, x, y)).map_err(io_error)?;
                }
            }
            w.flush().map_err(io_error)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau_has_three_branches_per_side() {
        for side in SideTag::BOTH {
            let b = branches(Which::Tau, side, None, (-20.0, 20.0), 50).unwrap();
            assert_eq!(b.iter().map(|b| b.index).collect::<Vec<_>>(), vec![1, 2, 3]);
            assert!(b.iter().all(|b| b.y.iter().all(|v| v.is_finite())));
        }
    }

    #[test]
    fn gamma_slice_at_zero_mu_is_a_hyperbola() {
        let b = branches(Which::GammaSlice, SideTag::Below, Some(0.0), (-20.0, 20.0), 50).unwrap();
        assert_eq!(b.len(), 2);
        for br in &b {
            for (&l, &g) in br.x.iter().zip(&br.y) {
                // γλ + 4λ + 2γ = 0
                assert!((g * l + 4.0 * l + 2.0 * g).abs() < 1e-9 * (1.0 + (g * l).abs()), "({l}, {g})");
            }
        }
    }

    #[test]
    fn slice_on_a_root_of_q0_is_rejected() {
        let mu = constants().mu0_plus;
        assert!(matches!(branches(Which::GammaSlice, SideTag::Below, Some(mu), (-1.0, 1.0), 5), Err(Error::Pole { .. })));
    }

    #[test]
    fn s_threshold_is_symmetric() {
        let m = branches(Which::SThreshold, SideTag::Below, None, (-1.0, 1.0), 2).unwrap()[0].x[0];
        let p = branches(Which::SThreshold, SideTag::Above, None, (-1.0, 1.0), 2).unwrap()[0].x[0];
        assert!((m + p).abs() < 1e-15 && (p - 3.0 * std::f64::consts::PI / (3.0 * std::f64::consts::PI - 8.0)).abs() < 1e-12);
    }
}
