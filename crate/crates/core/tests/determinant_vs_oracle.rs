//! The determinant path against the finite-grid oracle at K = 0.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twoboson::determinants::{spectral_report, ScanConfig};
use twoboson::lattice::{CouplingTriple, Quasimomentum, SectorTag, SideTag};
use twoboson::oracle::{tag_sectors, StructuredFiber};

fn triples(seed: u64, n: usize) -> Vec<CouplingTriple> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| CouplingTriple::new(rng.gen_range(-20.0..20.0), rng.gen_range(-20.0..20.0), rng.gen_range(-20.0..20.0)).unwrap())
        .collect()
}

fn distance(side: SideTag, z: f64) -> f64 {
    match side {
        SideTag::Below => -z,
        SideTag::Above => z - 8.0,
    }
}

#[test]
fn sector_eigenvalues_agree_away_from_the_edges() {
    let far = 0.05;
    for c in triples(31, 12) {
        let report = spectral_report(c, &ScanConfig::default()).unwrap();
        let fiber = StructuredFiber::new(Quasimomentum::ZERO, c, 64).unwrap();
        for list in &report.lists {
            let det: Vec<f64> = list.values.iter().copied().filter(|&z| distance(list.side, z) >= far).collect();
            let oracle = fiber.eigenvalues_beyond(list.side, far, Some(list.sector));
            assert_eq!(det.len(), oracle.len(), "{c:?} {:?} {:?}", list.sector, list.side);
            for (a, b) in det.iter().zip(&oracle) {
                assert!((a - b).abs() < 1e-5, "{c:?}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn sector_tags_add_up_to_the_counts() {
    let margin = 0.05;
    for c in triples(32, 6) {
        let fiber = StructuredFiber::new(Quasimomentum::ZERO, c, 32).unwrap();
        let tagged = tag_sectors(&fiber, margin).unwrap();
        let (m, n) = fiber.counts(margin);
        assert_eq!(tagged.iter().filter(|t| t.side == SideTag::Below).count(), m);
        assert_eq!(tagged.iter().filter(|t| t.side == SideTag::Above).count(), n);
        for side in SideTag::BOTH {
            for sector in SectorTag::ALL {
                let tags = tagged.iter().filter(|t| t.side == side && t.sector == sector).count();
                let direct = fiber.eigenvalues_beyond(side, margin, Some(sector)).len();
                assert_eq!(tags, direct, "{c:?} {sector:?} {side:?}");
            }
        }
    }
}

#[test]
fn grid_refinement_approaches_the_determinant_roots() {
    let c = CouplingTriple::new(-6.0, -3.0, 1.5).unwrap();
    let report = spectral_report(c, &ScanConfig::default()).unwrap();
    let exact = report.list(SectorTag::Ees, SideTag::Below).values[0];
    let err = |l: usize| {
        let f = StructuredFiber::new(Quasimomentum::ZERO, c, l).unwrap();
        (f.eigenvalues_beyond(SideTag::Below, 0.05, Some(SectorTag::Ees))[0] - exact).abs()
    };
    let (e16, e32, e64) = (err(16), err(32), err(64));
    // exponential convergence reaches rounding level by L = 32
    assert!(e32 < e16 && e32.max(e64) < 1e-10, "{e16} {e32} {e64}");
}
