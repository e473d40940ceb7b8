//! Points of S^d as unit vectors of R^{d+1}, with the handful of linear
//! algebra primitives the kernel needs. Coordinates are stored inline for
//! ambient dimensions up to 4 (d <= 3), spilling to the heap above that.

use crate::error::{Result, SphereSplitError};
use rand::Rng;
use rand_distr::StandardNormal;
use smallvec::SmallVec;

pub type Coords = SmallVec<[f64; 4]>;

/// Unit-norm tolerance enforced at construction.
pub const UNIT_TOL: f64 = 1e-12;

/// Default inner-product tolerance for boundary classification.
pub const EPS_INNER: f64 = 1e-12;

/// A point of S^d, kept at unit Euclidean norm.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct UnitVector {
    coords: Coords,
}

impl UnitVector {
    /// Normalizes on construction; rejects vectors of near-zero norm and
    /// ambient dimensions below 3 (d >= 2).
    pub fn new(coords: impl Into<Coords>) -> Result<Self> {
        let mut coords: Coords = coords.into();
        if coords.len() < 3 {
            return Err(SphereSplitError::UnsupportedDimension(format!(
                "ambient dimension {} < 3",
                coords.len()
            )));
        }
        let norm = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !(norm > 1e-14) || !norm.is_finite() {
            return Err(SphereSplitError::InvalidArgument(format!(
                "cannot normalize vector with norm {norm}"
            )));
        }
        if (norm - 1.0).abs() > UNIT_TOL {
            for c in coords.iter_mut() {
                *c /= norm;
            }
        }
        Ok(UnitVector { coords })
    }

    pub fn from_slice(s: &[f64]) -> Result<Self> {
        Self::new(Coords::from_slice(s))
    }

    /// k-th standard basis vector of R^{d+1}.
    pub fn basis(dim_ambient: usize, k: usize) -> Self {
        assert!(k <= dim_ambient);
        let mut c = Coords::from_elem(0.0, dim_ambient + 1);
        c[k] = 1.0;
        UnitVector { coords: c }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// d, the dimension of the sphere the point lives on.
    pub fn dim_ambient(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn dot(&self, other: &UnitVector) -> f64 {
        dot(&self.coords, &other.coords)
    }

    pub fn neg(&self) -> UnitVector {
        UnitVector {
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }

    /// Cross product, ambient R^3 only (d = 2). Not normalized.
    pub fn cross3_raw(&self, other: &UnitVector) -> Coords {
        cross3(&self.coords, &other.coords)
    }

    /// Normalized cross product in R^3; error when the inputs are parallel
    /// within tolerance.
    pub fn cross3_unit(&self, other: &UnitVector) -> Result<UnitVector> {
        let c = self.cross3_raw(other);
        let norm = dot(&c, &c).sqrt();
        if norm < 1e-12 {
            return Err(SphereSplitError::Degenerate(
                "cross product of near-parallel vectors".into(),
            ));
        }
        UnitVector::new(c)
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn cross3(a: &[f64], b: &[f64]) -> Coords {
    debug_assert_eq!(a.len(), 3);
    debug_assert_eq!(b.len(), 3);
    Coords::from_slice(&[
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ])
}

/// Geodesic distance `arccos <x, y>`, inner product clamped to [-1, 1].
pub fn geodesic_distance(x: &UnitVector, y: &UnitVector) -> f64 {
    x.dot(y).clamp(-1.0, 1.0).acos()
}

/// Rotate `x` by angle `phi` around axis `n` (R^3, n unit, Rodrigues).
pub fn rotate_around_3(x: &UnitVector, n: &UnitVector, phi: f64) -> UnitVector {
    let (s, c) = phi.sin_cos();
    let k = n.coords();
    let v = x.coords();
    let cr = cross3(k, v);
    let kd = dot(k, v);
    let mut out = Coords::from_elem(0.0, 3);
    for i in 0..3 {
        out[i] = v[i] * c + cr[i] * s + k[i] * kd * (1.0 - c);
    }
    UnitVector::new(out).expect("rotation preserves norm")
}

/// Uniform point on S^d via normalized Gaussians.
pub fn sample_uniform_sphere<R: Rng + ?Sized>(d: usize, rng: &mut R) -> UnitVector {
    loop {
        let coords: Coords = (0..=d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        if let Ok(v) = UnitVector::new(coords) {
            return v;
        }
    }
}

/// Orthonormal basis of the hyperplane u^perp in R^{d+1} (d vectors),
/// built deterministically by Gram-Schmidt over the coordinate axes.
pub fn orthonormal_complement(u: &UnitVector) -> Vec<UnitVector> {
    let dim = u.coords.len();
    let mut basis: Vec<Coords> = vec![u.coords.clone()];
    // skip the axis most aligned with u to keep the seed vectors independent
    let skip = u
        .coords
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map(|(i, _)| i)
        .unwrap_or(0);
    for axis in 0..dim {
        if axis == skip {
            continue;
        }
        let mut v = Coords::from_elem(0.0, dim);
        v[axis] = 1.0;
        for b in &basis {
            let proj = dot(&v, b);
            for i in 0..dim {
                v[i] -= proj * b[i];
            }
        }
        let norm = dot(&v, &v).sqrt();
        if norm < 1e-10 {
            continue;
        }
        for c in v.iter_mut() {
            *c /= norm;
        }
        basis.push(v);
    }
    debug_assert_eq!(basis.len(), dim);
    basis
        .into_iter()
        .skip(1)
        .map(|c| UnitVector { coords: c })
        .collect()
}

/// Coordinates of `x` in the frame `frame` (x assumed in its span).
pub fn frame_coordinates(x: &UnitVector, frame: &[UnitVector]) -> Coords {
    frame.iter().map(|b| x.dot(b)).collect()
}

/// Point of the ambient sphere with the given frame coordinates.
pub fn from_frame_coordinates(coords: &[f64], frame: &[UnitVector]) -> Result<UnitVector> {
    let dim = frame[0].coords.len();
    let mut out = Coords::from_elem(0.0, dim);
    for (c, b) in coords.iter().zip(frame) {
        for i in 0..dim {
            out[i] += c * b.coords[i];
        }
    }
    UnitVector::new(out)
}

/// Uniform point on the subsphere u^perp cap S^d (a copy of S^{d-1}):
/// Gaussian coefficients over an orthonormal frame of u^perp, normalized in
/// ambient coordinates.
pub fn sample_uniform_on_subsphere<R: Rng + ?Sized>(u: &UnitVector, rng: &mut R) -> UnitVector {
    let frame = orthonormal_complement(u);
    sample_uniform_in_frame(&frame, rng)
}

/// Uniform point of the unit sphere of the span of an orthonormal frame.
pub fn sample_uniform_in_frame<R: Rng + ?Sized>(
    frame: &[UnitVector],
    rng: &mut R,
) -> UnitVector {
    let dim = frame[0].coords.len();
    loop {
        let mut out = Coords::from_elem(0.0, dim);
        for b in frame {
            let c: f64 = rng.sample(StandardNormal);
            for (oi, bi) in out.iter_mut().zip(b.coords()) {
                *oi += c * bi;
            }
        }
        if let Ok(v) = UnitVector::new(out) {
            return v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn distance_basics() {
        let e = UnitVector::basis(2, 0);
        assert_eq!(geodesic_distance(&e, &e), 0.0);
        assert!((geodesic_distance(&e, &e.neg()) - std::f64::consts::PI).abs() < 1e-15);
        let e2 = UnitVector::basis(2, 1);
        assert!((geodesic_distance(&e, &e2) - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn normalization_and_rejects() {
        let v = UnitVector::from_slice(&[3.0, 0.0, 4.0]).unwrap();
        assert!((v.coords()[0] - 0.6).abs() < 1e-15);
        assert!(UnitVector::from_slice(&[0.0, 0.0, 0.0]).is_err());
        assert!(UnitVector::from_slice(&[1.0, 0.0]).is_err());
    }

    #[test]
    fn uniform_sphere_moments() {
        // E<x, e>^2 = 1/(d+1) for the uniform law
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        for d in [2usize, 3, 4] {
            let n = 40_000;
            let e = UnitVector::basis(d, 0);
            let mut s = 0.0;
            let mut s2 = 0.0;
            for _ in 0..n {
                let x = sample_uniform_sphere(d, &mut rng);
                let t = x.dot(&e);
                s += t * t;
                s2 += t * t * t * t;
            }
            let mean = s / n as f64;
            let var = (s2 / n as f64 - mean * mean).max(0.0);
            let se = (var / n as f64).sqrt();
            let want = 1.0 / (d as f64 + 1.0);
            assert!(
                (mean - want).abs() < 4.0 * se + 1e-9,
                "d={d}: {mean} vs {want} (se {se})"
            );
        }
    }

    #[test]
    fn subsphere_sampling_orthogonal() {
        let mut rng = ChaCha12Rng::seed_from_u64(8);
        for d in [2usize, 3, 5] {
            let u = sample_uniform_sphere(d, &mut rng);
            for _ in 0..200 {
                let x = sample_uniform_on_subsphere(&u, &mut rng);
                assert!(x.dot(&u).abs() < 1e-12);
                assert_eq!(x.dim_ambient(), d);
            }
        }
    }

    #[test]
    fn complement_frame_is_orthonormal() {
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        for d in [2usize, 3, 6] {
            let u = sample_uniform_sphere(d, &mut rng);
            let frame = orthonormal_complement(&u);
            assert_eq!(frame.len(), d);
            for (i, a) in frame.iter().enumerate() {
                assert!(a.dot(&u).abs() < 1e-12);
                for (j, b) in frame.iter().enumerate() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((a.dot(b) - want).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn rotation_moves_by_expected_angle() {
        let n = UnitVector::basis(2, 2);
        let x = UnitVector::basis(2, 0);
        let y = rotate_around_3(&x, &n, std::f64::consts::FRAC_PI_2);
        assert!(geodesic_distance(&y, &UnitVector::basis(2, 1)) < 1e-12);
    }
}
