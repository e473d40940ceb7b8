//! Property tests of the geometry kernel invariants.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use sphere_split::dirdist::DirectionDistribution;
use sphere_split::sphgeo::{
    geodesic_distance, sample_uniform_sphere, segment_crossing, Cell2, GeodesicSegment,
    GreatHypersphere, UnitVector, EPS_INNER,
};

fn unit_vector() -> impl Strategy<Value = UnitVector> {
    (
        -1.0f64..1.0,
        -1.0f64..1.0,
        -1.0f64..1.0,
    )
        .prop_filter_map("usable norm", |(x, y, z)| {
            let n = (x * x + y * y + z * z).sqrt();
            if n < 0.05 {
                return None;
            }
            UnitVector::from_slice(&[x, y, z]).ok()
        })
}

proptest! {
    #[test]
    fn canonicalization_identifies_antipodes(u in unit_vector()) {
        let s1 = GreatHypersphere::new(u.clone());
        let s2 = GreatHypersphere::new(u.neg());
        prop_assert_eq!(s1.normal().coords(), s2.normal().coords());
        // idempotence
        let s3 = GreatHypersphere::new(s1.normal().clone());
        prop_assert_eq!(s1.normal().coords(), s3.normal().coords());
    }

    #[test]
    fn geodesic_distance_is_a_metric_sample(a in unit_vector(), b in unit_vector(), c in unit_vector()) {
        let ab = geodesic_distance(&a, &b);
        let ba = geodesic_distance(&b, &a);
        prop_assert!((ab - ba).abs() < 1e-15);
        prop_assert!((0.0..=std::f64::consts::PI + 1e-15).contains(&ab));
        let ac = geodesic_distance(&a, &c);
        let cb = geodesic_distance(&c, &b);
        prop_assert!(ab <= ac + cb + 1e-12);
    }

    #[test]
    fn segment_crossing_lies_on_both(a in unit_vector(), b in unit_vector(), u in unit_vector()) {
        prop_assume!(a.dot(&b) > -1.0 + 1e-6);
        let seg = GeodesicSegment::new(a.clone(), b.clone()).unwrap();
        let s = GreatHypersphere::new(u);
        if let Some(q) = segment_crossing(&s, &seg) {
            prop_assert!(s.normal().dot(&q).abs() < 1e-9);
            let split = geodesic_distance(&a, &q) + geodesic_distance(&q, &b);
            prop_assert!((split - seg.length).abs() < 1e-9);
        }
    }

    #[test]
    fn split_chain_conserves_area_and_perimeter(seed in 0u64..10_000) {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut cells = vec![Cell2::whole_sphere()];
        let mut splits = 0;
        let mut guard = 0;
        while splits < 12 && guard < 600 {
            guard += 1;
            let idx = (seed as usize + guard) % cells.len();
            let u = sample_uniform_sphere(2, &mut rng);
            let cell = cells[idx].clone();
            let Ok(true) = cell.hits_interior(&u, EPS_INNER) else { continue };
            let (plus, minus, piece) = cell.split(&u, EPS_INNER).unwrap();
            prop_assert!((plus.area() + minus.area() - cell.area()).abs() < 1e-9);
            prop_assert!(
                (plus.perimeter() + minus.perimeter() - cell.perimeter() - 2.0 * piece.length())
                    .abs()
                    < 1e-9
            );
            plus.validate().unwrap();
            minus.validate().unwrap();
            cells.swap_remove(idx);
            cells.push(plus);
            cells.push(minus);
            splits += 1;
        }
        let total: f64 = cells.iter().map(|c| c.area()).sum();
        prop_assert!((total - 4.0 * std::f64::consts::PI).abs() < 1e-8);
    }

    #[test]
    fn direction_samples_are_unit_and_symmetrically_distributed(seed in 0u64..5_000, beta in 0.0f64..10.0) {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let kappa = DirectionDistribution::axial(UnitVector::basis(2, 2), beta).unwrap();
        let s = kappa.sample_great_hypersphere(&mut rng);
        let n = s.normal();
        let norm: f64 = n.coords().iter().map(|c| c * c).sum::<f64>().sqrt();
        prop_assert!((norm - 1.0).abs() < 1e-12);
        // canonical form: first coordinate beyond tolerance is positive
        let first = n.coords().iter().find(|c| c.abs() > 1e-12).copied().unwrap_or(0.0);
        prop_assert!(first > 0.0);
    }
}
