//! Oriented arcs of great circles on S^2. An arc is the set swept from
//! `start` by rotating a positive angle up to `span` around the circle
//! normal; `span = 2 pi` encodes a full great circle.

use super::vector::{dot, rotate_around_3, UnitVector};

pub const FULL_TURN: f64 = 2.0 * std::f64::consts::PI;

#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct Arc2 {
    /// Oriented normal of the supporting great circle (not canonicalized:
    /// the sign fixes the traversal direction).
    pub circle: UnitVector,
    pub start: UnitVector,
    pub span: f64,
}

impl Arc2 {
    pub fn full_circle(circle: UnitVector) -> Arc2 {
        let start = super::vector::orthonormal_complement(&circle)
            .into_iter()
            .next()
            .expect("complement of a point on S^2");
        Arc2 {
            circle,
            start,
            span: FULL_TURN,
        }
    }

    pub fn is_full_circle(&self) -> bool {
        self.span >= FULL_TURN - 1e-9
    }

    /// Arc length (the sphere has radius 1).
    pub fn length(&self) -> f64 {
        self.span
    }

    pub fn point_at(&self, phi: f64) -> UnitVector {
        rotate_around_3(&self.start, &self.circle, phi)
    }

    pub fn end(&self) -> UnitVector {
        self.point_at(self.span)
    }

    /// Angle of `p` (assumed on the supporting circle) measured from `start`
    /// in the positive direction, in [0, 2 pi).
    pub fn angle_of(&self, p: &UnitVector) -> f64 {
        let s = dot(&self.circle.cross3_raw(&self.start.clone()), p.coords());
        let c = self.start.dot(p);
        let a = s.atan2(c);
        if a < 0.0 {
            a + FULL_TURN
        } else {
            a
        }
    }

    /// Whether `p` lies on the arc, assuming it lies on the supporting
    /// circle; `tol` is an angular tolerance applied at the endpoints.
    pub fn contains_on_circle(&self, p: &UnitVector, tol: f64) -> bool {
        if self.is_full_circle() {
            return true;
        }
        let a = self.angle_of(p);
        a <= self.span + tol || a >= FULL_TURN - tol
    }

    /// Spherical intrinsic volumes (V0, V1) of the arc viewed as a degenerate
    /// spherical polytope: a full great circle has (0, 1); an arc of length
    /// L < 2 pi is a geodesic segment with (1/2, L / (2 pi)).
    pub fn intrinsic_volumes(&self) -> (f64, f64) {
        if self.is_full_circle() {
            (0.0, 1.0)
        } else {
            (0.5, self.span / FULL_TURN)
        }
    }
}

/// (V0, V1) of a geodesic segment of length `len`.
pub fn segment_intrinsic_volumes(len: f64) -> (f64, f64) {
    (0.5, len / FULL_TURN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_circle_basics() {
        let a = Arc2::full_circle(UnitVector::basis(2, 2));
        assert!(a.is_full_circle());
        assert!((a.length() - FULL_TURN).abs() < 1e-15);
        assert_eq!(a.intrinsic_volumes(), (0.0, 1.0));
        let p = a.point_at(1.234);
        assert!(p.dot(&a.circle).abs() < 1e-12);
        assert!((a.angle_of(&p) - 1.234).abs() < 1e-12);
    }

    #[test]
    fn arc_membership() {
        let mut arc = Arc2::full_circle(UnitVector::basis(2, 2));
        arc.span = 1.0;
        let inside = arc.point_at(0.5);
        let outside = arc.point_at(2.0);
        assert!(arc.contains_on_circle(&inside, 1e-12));
        assert!(!arc.contains_on_circle(&outside, 1e-12));
        let (v0, v1) = arc.intrinsic_volumes();
        assert_eq!(v0, 0.5);
        assert!((v1 - 1.0 / FULL_TURN).abs() < 1e-15);
    }
}
