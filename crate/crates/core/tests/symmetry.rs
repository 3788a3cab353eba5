//! Point symmetry c → −c, z → 8 − z and the structure of the classifier.

use proptest::prelude::*;
use twoboson::determinants::{delta_ea, delta_ees, delta_oos};
use twoboson::lattice::{CouplingTriple, SectorTag, SideTag};
use twoboson::regions::{big_q, classify, predicted_counts, Component};
use twoboson::torus::QuadratureSpec;

fn triple() -> impl Strategy<Value = CouplingTriple> {
    (-20.0..20.0f64, -20.0..20.0f64, -20.0..20.0f64).prop_map(|(g, l, m)| CouplingTriple { gamma: g, lambda: l, mu: m })
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn determinants_are_reflected(c in triple(), d in 1e-4..5.0f64) {
        let spec = QuadratureSpec::default();
        let n = c.negated();
        prop_assert!(close(delta_ees(c, -d, &spec).unwrap(), delta_ees(n, 8.0 + d, &spec).unwrap(), 1e-9));
        prop_assert!(close(delta_oos(c.mu, -d, &spec).unwrap(), delta_oos(n.mu, 8.0 + d, &spec).unwrap(), 1e-9));
        prop_assert!(close(
            delta_ea(c.lambda, c.mu, -d, &spec).unwrap(),
            delta_ea(n.lambda, n.mu, 8.0 + d, &spec).unwrap(),
            1e-9
        ));
    }

    #[test]
    fn classifier_is_point_symmetric(c in triple()) {
        let n = c.negated();
        let (a, b) = (classify(c, SideTag::Above), classify(n, SideTag::Below));
        prop_assert_eq!((a.alpha, a.beta, a.zeta), (b.alpha, b.beta, b.zeta));
        prop_assert!(close(big_q(c, SideTag::Above), big_q(n, SideTag::Below), 1e-12));
        let (p, q) = (predicted_counts(c), predicted_counts(n));
        prop_assert_eq!((p.m, p.n), (q.n, q.m));
    }

    #[test]
    fn components_cover_disjointly(c in triple()) {
        for side in SideTag::BOTH {
            for sector in SectorTag::ALL {
                let hits = Component::all().into_iter().filter(|k| k.sector == sector && k.side == side && k.contains(c)).count();
                prop_assert_eq!(hits, 1);
            }
        }
        let p = predicted_counts(c);
        prop_assert!(p.m + p.n <= 7);
    }
}
