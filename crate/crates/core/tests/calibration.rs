//! Self-calibration is stable under a change of seed.

use twoboson::lattice::{CouplingTriple, SectorTag, SideTag};
use twoboson::regions::{big_q, big_q_expanded, self_calibrate, CalibrationConfig, Component};

#[test]
fn labels_do_not_depend_on_the_seed() {
    for seed in [7, 1234] {
        let cal = self_calibrate(&CalibrationConfig { samples_per_component: 6, seed, ..Default::default() }).unwrap();
        assert_eq!(cal.components.len(), Component::all().len());
        for k in &cal.components {
            assert_eq!(k.calibrated, k.component.index, "{} with seed {seed}", k.component.id());
            assert!(k.samples.iter().all(|&c| k.component.contains(c)));
        }
        // only the literal printed ea and above-band ees sets are logged
        for d in &cal.discrepancies {
            assert!(d.component.starts_with('A') || d.component.starts_with("C+"), "{d}");
        }
        let p = cal.predicted_counts(CouplingTriple::new(-5.0, -11.0, 0.0).unwrap());
        assert_eq!(p.below.index(SectorTag::Ees), 2);
    }
}

#[test]
fn expanded_q_deviation_is_reported() {
    let mut worst: f64 = 0.0;
    for g in [-3.0, 0.5, 4.0] {
        for l in [-2.0, 1.0] {
            for m in [-1.5, 0.0, 2.5] {
                let c = CouplingTriple::new(g, l, m).unwrap();
                for side in SideTag::BOTH {
                    worst = worst.max((big_q(c, side) - big_q_expanded(c, side)).abs());
                }
            }
        }
    }
    println!("max |Q - expanded Q| on the grid: {worst:.3e}");
    assert!(worst.is_finite() && worst > 1e-3);
}
