//! Two-term threshold asymptotes of the Green's entries.

use std::f64::consts::{LN_2, PI};

use crate::lattice::SideTag;

/// Weights w = (1, 2, 2, 2): each basis function's value at p = 0 in units of 1/(2π).
const EDGE_WEIGHT: [f64; 4] = [1.0, 2.0, 2.0, 2.0];

/// Parity of each basis function under p → p + (π, π).
const SHIFT_PARITY: [f64; 4] = [1.0, -1.0, 1.0, 1.0];

/// Coefficient of ln(−z) in a_ij(z) as z ↗ 0.
pub fn threshold_slope(i: usize, j: usize) -> f64 {
    -EDGE_WEIGHT[i - 1] * EDGE_WEIGHT[j - 1] / (8.0 * PI)
}

/// Constant term of a_ij(z) as z ↗ 0.
pub fn threshold_constant(i: usize, j: usize) -> f64 {
    let l5 = 5.0 * LN_2;
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    match (i, j) {
        (1, 1) => l5 / (8.0 * PI),
        (1, 2) => (l5 - PI) / (4.0 * PI),
        (1, 3) => (l5 - 4.0 * PI + 8.0) / (4.0 * PI),
        (1, 4) => (l5 - 4.0) / (4.0 * PI),
        (2, 2) => (l5 - PI) / (2.0 * PI),
        (2, 3) => (l5 - 4.0 * PI + 8.0) / (2.0 * PI),
        (2, 4) => (l5 - 4.0) / (2.0 * PI),
        (3, 3) => (l5 - 20.0 * PI + 176.0 / 3.0) / (2.0 * PI),
        (3, 4) => (l5 + 4.0 * PI - 52.0 / 3.0) / (2.0 * PI),
        (4, 4) => (l5 - 2.0 * PI + 8.0 / 3.0) / (2.0 * PI),
        _ => panic!("Green's entry ({i}, {j}) outside 1..=4"),
    }
}

fn below_edge(i: usize, j: usize, dist: f64) -> f64 {
    threshold_slope(i, j) * dist.ln() + threshold_constant(i, j)
}

/// Log term plus constant approximating a_ij(z) near the band edge on `side`.
///
/// Above the band the asymptote follows from a_ij(z) = −s_i s_j a_ij(8 − z),
/// where s_i is the parity of the i-th basis function under p → p + (π, π).
/// Indices are 1-based; panics outside 1..=4.
pub fn asymptotic_reference(entry: (usize, usize), side: SideTag, z: f64) -> f64 {
    let (i, j) = entry;
    match side {
        SideTag::Below => below_edge(i, j, -z),
        SideTag::Above => -SHIFT_PARITY[i - 1] * SHIFT_PARITY[j - 1] * below_edge(i, j, z - 8.0),
    }
}

/// The above-band asymptote with every entry mirrored as
/// `−slope·ln(z−8) − constant`, which has the wrong sign for the entries that
/// pair the second basis function with another; kept for discrepancy reports.
pub fn asymptote_printed(entry: (usize, usize), side: SideTag, z: f64) -> f64 {
    let (i, j) = entry;
    match side {
        SideTag::Below => below_edge(i, j, -z),
        SideTag::Above => -below_edge(i, j, z - 8.0),
    }
}
