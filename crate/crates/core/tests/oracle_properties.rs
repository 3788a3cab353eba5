//! Representation independence and operator monotonicity of the grid fiber.

use std::f64::consts::PI;

use proptest::prelude::*;
use twoboson::lattice::{CouplingTriple, Quasimomentum};
use twoboson::oracle::{build_momentum_fiber, build_position_fiber, eigenvalues_dense, minimax_table, DENSE_CAP};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn momentum_and_position_builds_are_cospectral(
        k1 in -PI..PI, k2 in -PI..PI,
        g in -20.0..20.0f64, l in -20.0..20.0f64, m in -20.0..20.0f64,
        size in prop::sample::select(vec![8usize, 10, 12]),
    ) {
        let (k, c) = (Quasimomentum::new(k1, k2), CouplingTriple { gamma: g, lambda: l, mu: m });
        let a = eigenvalues_dense(&build_momentum_fiber(k, c, size).unwrap(), DENSE_CAP).unwrap();
        let b = eigenvalues_dense(&build_position_fiber(k, c, size).unwrap(), DENSE_CAP).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }
}

#[test]
fn lowering_the_on_site_coupling_never_raises_a_minimax_value() {
    let k = Quasimomentum::new(0.7, -1.9);
    for (l, m) in [(-3.0, 2.0), (4.0, -6.0), (0.0, 0.0)] {
        let mut previous: Option<[f64; 7]> = None;
        for g in [6.0, 3.0, 0.0, -3.0, -6.0, -12.0] {
            let t = minimax_table(k, CouplingTriple::new(g, l, m).unwrap(), 16).unwrap();
            if let Some(p) = previous {
                for (a, b) in t.e.iter().zip(&p) {
                    assert!(a <= &(b + 1e-12), "γ={g}: {a} > {b}");
                }
            }
            previous = Some(t.e);
        }
    }
}
