//! Great hyperspheres S = u^perp cap S^d in canonical-normal form, boundary
//! classification, and geodesic segments with their hit predicate.

use super::vector::{geodesic_distance, UnitVector, EPS_INNER};
use crate::error::{Result, SphereSplitError};

/// Which side of a great hypersphere a point falls on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
    OnBoundary,
}

/// A great hypersphere of S^d, stored by its canonical unit normal: the first
/// coordinate that is nonzero (beyond tolerance) is strictly positive, so u
/// and -u map to the same value.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GreatHypersphere {
    normal: UnitVector,
}

impl GreatHypersphere {
    pub fn new(normal: UnitVector) -> Self {
        GreatHypersphere {
            normal: canonicalize(normal),
        }
    }

    pub fn normal(&self) -> &UnitVector {
        &self.normal
    }

    pub fn dim_ambient(&self) -> usize {
        self.normal.dim_ambient()
    }

    /// Classifies x against the half-spheres S^+ (nonnegative inner product
    /// with the canonical normal) and S^-.
    pub fn side_of(&self, x: &UnitVector, eps: f64) -> Side {
        let v = self.normal.dot(x);
        if v > eps {
            Side::Plus
        } else if v < -eps {
            Side::Minus
        } else {
            Side::OnBoundary
        }
    }
}

fn canonicalize(u: UnitVector) -> UnitVector {
    for &c in u.coords() {
        if c > EPS_INNER {
            return u;
        }
        if c < -EPS_INNER {
            return u.neg();
        }
    }
    u
}

/// A geodesic segment between two non-antipodal points.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GeodesicSegment {
    pub a: UnitVector,
    pub b: UnitVector,
    pub length: f64,
}

impl GeodesicSegment {
    /// Rejects antipodal endpoints (the connecting geodesic would not be
    /// unique). Zero-length segments (single points) are allowed.
    pub fn new(a: UnitVector, b: UnitVector) -> Result<Self> {
        if a.dim_ambient() != b.dim_ambient() {
            return Err(SphereSplitError::Precondition(
                "segment endpoints in different ambient dimensions".into(),
            ));
        }
        if a.dot(&b) < -1.0 + 1e-12 {
            return Err(SphereSplitError::Precondition(
                "antipodal endpoints: geodesic not unique".into(),
            ));
        }
        let length = geodesic_distance(&a, &b);
        Ok(GeodesicSegment { a, b, length })
    }

    pub fn point(a: UnitVector) -> Self {
        GeodesicSegment {
            b: a.clone(),
            a,
            length: 0.0,
        }
    }

    /// The point at arc parameter `phi in [0, length]` from a towards b.
    pub fn point_at(&self, phi: f64) -> UnitVector {
        if self.length == 0.0 {
            return self.a.clone();
        }
        let t = self.length;
        let (s_total, _) = t.sin_cos();
        let wa = ((t - phi).sin()) / s_total;
        let wb = (phi.sin()) / s_total;
        let coords: super::vector::Coords = self
            .a
            .coords()
            .iter()
            .zip(self.b.coords())
            .map(|(x, y)| wa * x + wb * y)
            .collect();
        UnitVector::new(coords).expect("interior point of geodesic")
    }
}

/// True iff the segment meets S: opposite strict endpoint signs, or either
/// endpoint within `eps` of S (endpoint touching counts as a hit).
///
/// For segments shorter than pi the endpoint sign test is exact: along a
/// great-circle arc the inner product with u is a sinusoid, and a sign
/// excursion between two like-signed endpoints would require an arc of length
/// at least pi.
pub fn segment_hit(s: &GreatHypersphere, seg: &GeodesicSegment, eps: f64) -> bool {
    let sa = s.normal().dot(&seg.a);
    let sb = s.normal().dot(&seg.b);
    if sa.abs() <= eps || sb.abs() <= eps {
        return true;
    }
    sa * sb < 0.0
}

/// The crossing point of a segment with S when the endpoint signs differ.
pub fn segment_crossing(s: &GreatHypersphere, seg: &GeodesicSegment) -> Option<UnitVector> {
    let a_val = s.normal().dot(&seg.a);
    let b_val = s.normal().dot(&seg.b);
    if a_val * b_val >= 0.0 || seg.length == 0.0 {
        return None;
    }
    // <u, x(phi)> = (A sin(theta - phi) + B sin(phi)) / sin(theta), zero at
    // tan(phi) = A sin(theta) / (A cos(theta) - B); the root lies in
    // (0, theta) and is unique there, so lift a negative atan2 branch by pi
    let theta = seg.length;
    let mut phi = (a_val * theta.sin()).atan2(a_val * theta.cos() - b_val);
    if phi < 0.0 {
        phi += std::f64::consts::PI;
    }
    Some(seg.point_at(phi.clamp(0.0, theta)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphgeo::vector::sample_uniform_sphere;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn e(k: usize) -> UnitVector {
        UnitVector::basis(2, k)
    }

    #[test]
    fn canonical_form_identifies_antipodes() {
        let u = UnitVector::from_slice(&[-0.3, 0.5, 0.81]).unwrap();
        let s1 = GreatHypersphere::new(u.clone());
        let s2 = GreatHypersphere::new(u.neg());
        assert_eq!(s1, s2);
        assert!(s1.normal().coords()[0] > 0.0);
        // idempotence
        let s3 = GreatHypersphere::new(s1.normal().clone());
        assert_eq!(s1, s3);
    }

    #[test]
    fn side_classification() {
        let equator = GreatHypersphere::new(e(2));
        assert_eq!(equator.side_of(&e(2), EPS_INNER), Side::Plus);
        assert_eq!(equator.side_of(&e(0), EPS_INNER), Side::OnBoundary);
        assert_eq!(equator.side_of(&e(2).neg(), EPS_INNER), Side::Minus);
    }

    #[test]
    fn segment_hit_cases() {
        let equator = GreatHypersphere::new(e(2));
        // symmetric crossing of the equator
        let a = UnitVector::from_slice(&[0.6, 0.0, 0.8]).unwrap();
        let b = UnitVector::from_slice(&[0.6, 0.0, -0.8]).unwrap();
        let seg = GeodesicSegment::new(a, b).unwrap();
        assert!(segment_hit(&equator, &seg, EPS_INNER));
        let q = segment_crossing(&equator, &seg).unwrap();
        assert!(q.coords()[2].abs() < 1e-12);
        // strictly inside the northern hemisphere
        let a = UnitVector::from_slice(&[0.3, 0.1, 0.9]).unwrap();
        let b = UnitVector::from_slice(&[-0.2, 0.4, 0.8]).unwrap();
        let seg = GeodesicSegment::new(a, b).unwrap();
        assert!(!segment_hit(&equator, &seg, EPS_INNER));
    }

    #[test]
    fn antipodal_segment_rejected() {
        assert!(GeodesicSegment::new(e(0), e(0).neg()).is_err());
    }

    #[test]
    fn uniform_hit_frequency_matches_length_over_pi() {
        // nu(S_{d-1}<xy>) = l(x,y)/pi for a segment of length pi/2
        let a = e(2);
        let b = e(0);
        let seg = GeodesicSegment::new(a, b).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let n = 100_000;
        let mut hits = 0usize;
        for _ in 0..n {
            let s = GreatHypersphere::new(sample_uniform_sphere(2, &mut rng));
            if segment_hit(&s, &seg, EPS_INNER) {
                hits += 1;
            }
        }
        let freq = hits as f64 / n as f64;
        let se = (0.5 * 0.5 / n as f64).sqrt();
        assert!((freq - 0.5).abs() < 4.0 * se, "freq {freq}");
    }

    #[test]
    fn crossing_point_is_on_segment_and_boundary() {
        let mut rng = ChaCha12Rng::seed_from_u64(12);
        for _ in 0..200 {
            let a = sample_uniform_sphere(3, &mut rng);
            let b = sample_uniform_sphere(3, &mut rng);
            let Ok(seg) = GeodesicSegment::new(a.clone(), b.clone()) else {
                continue;
            };
            let s = GreatHypersphere::new(sample_uniform_sphere(3, &mut rng));
            if let Some(q) = segment_crossing(&s, &seg) {
                assert!(s.normal().dot(&q).abs() < 1e-9);
                let d_a = geodesic_distance(&seg.a, &q);
                let d_b = geodesic_distance(&q, &seg.b);
                assert!((d_a + d_b - seg.length).abs() < 1e-9);
            }
        }
    }
}
