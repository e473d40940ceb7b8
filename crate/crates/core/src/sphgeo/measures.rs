//! Localized spherical curvature measures phi_j(c, h) on S^2, for bounded
//! weight functions h evaluated pointwise.
//!
//! phi_0 sums external angles at the vertices, phi_1 integrates h along the
//! boundary arcs with fixed-order Gauss-Legendre quadrature, and phi_2
//! integrates h over the interior by uniform rejection sampling inside a
//! bounding cap of the cell. With h = 1 the three measures reduce to the
//! intrinsic volumes.

use super::cell2::Cell2;
use super::vector::{geodesic_distance, sample_uniform_sphere, UnitVector};
use crate::error::{Result, SphereSplitError};
use crate::quad::gauss_legendre;
use rand::Rng;
use rand_distr::StandardNormal;

const PI: f64 = std::f64::consts::PI;

#[derive(Clone, Copy, Debug)]
pub struct CurvatureConfig {
    /// Gauss-Legendre nodes per boundary arc (j = 1).
    pub boundary_nodes: usize,
    /// Uniform samples for the interior integral (j = 2).
    pub interior_samples: usize,
}

impl Default for CurvatureConfig {
    fn default() -> Self {
        CurvatureConfig {
            boundary_nodes: 64,
            interior_samples: 20_000,
        }
    }
}

/// phi_j(c, h) for j in {0, 1, 2}; j = 2 is a Monte Carlo value and needs a
/// generator.
pub fn curvature_measure_2d<R: Rng + ?Sized>(
    cell: &Cell2,
    j: usize,
    h: &dyn Fn(&UnitVector) -> f64,
    cfg: &CurvatureConfig,
    rng: &mut R,
) -> Result<f64> {
    match j {
        0 => Ok(curvature_vertex(cell, h)),
        1 => Ok(curvature_boundary(cell, h, cfg.boundary_nodes)),
        2 => Ok(curvature_interior(cell, h, cfg.interior_samples, rng)),
        _ => Err(SphereSplitError::InvalidArgument(format!(
            "curvature order {j} not in 0..=2"
        ))),
    }
}

/// phi_0(c, h): sum over vertices of h(v) (pi - alpha_v) / (4 pi).
pub fn curvature_vertex(cell: &Cell2, h: &dyn Fn(&UnitVector) -> f64) -> f64 {
    let angles = cell.interior_angles();
    cell.vertices()
        .iter()
        .zip(&angles)
        .map(|(v, a)| h(v) * (PI - a) / (4.0 * PI))
        .sum()
}

/// phi_1(c, h): boundary line integral of h / (4 pi) by per-arc quadrature.
pub fn curvature_boundary(cell: &Cell2, h: &dyn Fn(&UnitVector) -> f64, nodes: usize) -> f64 {
    let gl = gauss_legendre(nodes.max(1));
    let mut total = 0.0;
    for arc in cell.boundary_arcs() {
        let half = 0.5 * arc.span;
        let mut s = 0.0;
        for &(x, w) in &gl {
            let phi = half * (x + 1.0);
            s += w * h(&arc.point_at(phi));
        }
        total += s * half;
    }
    total / (4.0 * PI)
}

/// phi_2(c, h): interior integral of h / (4 pi), by uniform sampling in a
/// bounding cap (the whole sphere when the cell has fewer than 3 vertices).
pub fn curvature_interior<R: Rng + ?Sized>(
    cell: &Cell2,
    h: &dyn Fn(&UnitVector) -> f64,
    samples: usize,
    rng: &mut R,
) -> f64 {
    let cap = bounding_cap(cell);
    let mut acc = 0.0;
    match cap {
        None => {
            for _ in 0..samples {
                let x = sample_uniform_sphere(2, rng);
                if cell.contains(&x, 1e-12) {
                    acc += h(&x);
                }
            }
            acc / samples as f64
        }
        Some((center, rho)) => {
            // uniform on the cap: z uniform in [cos rho, 1] in the cap frame
            let frame = super::vector::orthonormal_complement(&center);
            let zmin = rho.cos();
            let cap_fraction = 0.5 * (1.0 - zmin);
            for _ in 0..samples {
                let z: f64 = zmin + (1.0 - zmin) * rng.gen::<f64>();
                let phi = 2.0 * PI * rng.gen::<f64>();
                let r = (1.0 - z * z).max(0.0).sqrt();
                let mut coords = super::vector::Coords::from_slice(center.coords());
                for (ci, fi) in coords.iter_mut().zip(center.coords()) {
                    *ci = fi * z;
                }
                for (k, b) in frame.iter().enumerate() {
                    let amp = if k == 0 { r * phi.cos() } else { r * phi.sin() };
                    for (ci, bi) in coords.iter_mut().zip(b.coords()) {
                        *ci += amp * bi;
                    }
                }
                let x = UnitVector::new(coords).expect("cap point is unit");
                if cell.contains(&x, 1e-12) {
                    acc += h(&x);
                }
            }
            // phi_2 = E_cap[1_c h] * (cap area) / (4 pi)
            acc / samples as f64 * cap_fraction
        }
    }
}

/// A cap (center, geodesic radius) containing the cell, when the cell is
/// small enough for one to help; `None` falls back to whole-sphere sampling.
fn bounding_cap(cell: &Cell2) -> Option<(UnitVector, f64)> {
    let vertices = cell.vertices();
    if vertices.len() < 3 {
        return None;
    }
    let dim = vertices[0].coords().len();
    let mut sum = super::vector::Coords::from_elem(0.0, dim);
    for v in vertices {
        for (s, c) in sum.iter_mut().zip(v.coords()) {
            *s += c;
        }
    }
    let center = UnitVector::new(sum).ok()?;
    let rho = vertices
        .iter()
        .map(|v| geodesic_distance(&center, v))
        .fold(0.0f64, f64::max);
    // margin for edge bulge: a geodesic edge stays within the vertex hull of
    // its endpoints only in the pointed case; pad generously and cap at the
    // whole sphere
    let rho = (1.2 * rho + 0.05).min(PI);
    if rho >= PI - 1e-9 {
        None
    } else {
        Some((center, rho))
    }
}

/// Samples a point uniformly in the cell by rejection (used by tests).
pub fn sample_in_cell<R: Rng + ?Sized>(cell: &Cell2, rng: &mut R) -> UnitVector {
    loop {
        let coords: super::vector::Coords =
            (0..3).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        if let Ok(x) = UnitVector::new(coords) {
            if cell.contains(&x, 0.0) {
                return x;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn e(k: usize) -> UnitVector {
        UnitVector::basis(2, k)
    }

    fn octant() -> Cell2 {
        Cell2::Polygon {
            vertices: vec![e(0), e(1), e(2)],
            edge_normals: vec![e(2), e(0), e(1)],
        }
    }

    #[test]
    fn unit_weight_recovers_intrinsic_volumes() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let cell = octant();
        let one = |_: &UnitVector| 1.0;
        let cfg = CurvatureConfig::default();
        let iv = cell.intrinsic_volumes();
        let p0 = curvature_measure_2d(&cell, 0, &one, &cfg, &mut rng).unwrap();
        let p1 = curvature_measure_2d(&cell, 1, &one, &cfg, &mut rng).unwrap();
        let p2 = curvature_measure_2d(&cell, 2, &one, &cfg, &mut rng).unwrap();
        assert!((p0 - iv[0]).abs() < 1e-12);
        assert!((p1 - iv[1]).abs() < 1e-12);
        let se = (iv[2] * (1.0 - iv[2]) / cfg.interior_samples as f64).sqrt();
        assert!((p2 - iv[2]).abs() < 5.0 * se + 1e-3, "{p2} vs {}", iv[2]);
    }

    #[test]
    fn hemisphere_weight_symmetry() {
        // smooth weight h = (1 + x_0)/2 averages to 1/2 on the equator by
        // symmetry, so phi_1(hemisphere, h) = V_1 / 2 = 1/4
        let cell = Cell2::hemisphere(e(2));
        let h = |x: &UnitVector| 0.5 * (1.0 + x.coords()[0]);
        let p1 = curvature_boundary(&cell, &h, 256);
        assert!((p1 - 0.25).abs() < 1e-9, "{p1}");
        // discontinuous indicator weight converges at first order in the
        // node count: check the trend rather than a tight tolerance
        let ind = |x: &UnitVector| if x.coords()[0] >= 0.0 { 1.0 } else { 0.0 };
        let coarse = (curvature_boundary(&cell, &ind, 64) - 0.25f64).abs();
        let fine = (curvature_boundary(&cell, &ind, 1024) - 0.25f64).abs();
        assert!(fine < coarse && fine < 2e-3, "{coarse} -> {fine}");
    }

    #[test]
    fn boundary_quadrature_richardson_stable() {
        let cell = octant();
        let h = |x: &UnitVector| (1.0 + x.coords()[0]).exp() * (2.0 + x.coords()[2]);
        let a = curvature_boundary(&cell, &h, 64);
        let b = curvature_boundary(&cell, &h, 128);
        assert!((a - b).abs() < 1e-6, "{a} vs {b}");
    }
}
