//! Exact cells of tessellations of S^2: spherically convex polygons kept as a
//! vertex cycle with per-edge inward normals, plus the degenerate whole-sphere
//! and half-sphere states that occur before a cell has two cutting circles.
//!
//! Conventions. Edge `i` runs from `vertices[i]` to `vertices[i+1 mod n]`
//! along the great circle with inward normal `edge_normals[i]`, traversed in
//! the positive rotation sense around that normal. With this convention the
//! interior always lies to the same side of the traversal, and a split only
//! ever inserts one new edge per child. The half-sphere constraint list is
//! therefore minimal by construction: every stored normal supports exactly
//! one edge with two distinct endpoints, so redundant constraints never
//! accumulate across splits.

use super::arc::{Arc2, FULL_TURN};
use super::vector::{dot, UnitVector};
use crate::error::{Result, SphereSplitError};

const PI: f64 = std::f64::consts::PI;

/// Classification of a great circle against a cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CircleSide {
    /// The circle meets the interior of the cell.
    Hit,
    /// The cell lies in the closed positive half-sphere of the circle normal.
    AllPlus,
    /// The cell lies in the closed negative half-sphere.
    AllMinus,
}

#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub enum Cell2 {
    /// The whole sphere S^2 (initial state, no constraints).
    Sphere,
    /// One constraint {x : <normal, x> >= 0}.
    Hemisphere { normal: UnitVector },
    /// n >= 2 vertices in cyclic order with per-edge inward normals.
    /// n = 2 is a lune (both edges of length pi).
    Polygon {
        vertices: Vec<UnitVector>,
        edge_normals: Vec<UnitVector>,
    },
}

/// Angle swept from `a` to `b` in the positive sense around `n`, in (0, 2pi).
/// Exactly antipodal points give pi.
pub fn edge_span(a: &UnitVector, b: &UnitVector, n: &UnitVector) -> f64 {
    let s = dot(&n.cross3_raw(a), b.coords());
    let c = a.dot(b);
    let mut span = s.atan2(c);
    if span <= 0.0 {
        span += FULL_TURN;
    }
    span
}

impl Cell2 {
    pub fn whole_sphere() -> Cell2 {
        Cell2::Sphere
    }

    pub fn hemisphere(normal: UnitVector) -> Cell2 {
        Cell2::Hemisphere { normal }
    }

    pub fn vertex_count(&self) -> usize {
        match self {
            Cell2::Sphere | Cell2::Hemisphere { .. } => 0,
            Cell2::Polygon { vertices, .. } => vertices.len(),
        }
    }

    pub fn vertices(&self) -> &[UnitVector] {
        match self {
            Cell2::Sphere | Cell2::Hemisphere { .. } => &[],
            Cell2::Polygon { vertices, .. } => vertices,
        }
    }

    /// Inward normals of the bounding half-spheres (the H-representation).
    pub fn inward_normals(&self) -> Vec<UnitVector> {
        match self {
            Cell2::Sphere => vec![],
            Cell2::Hemisphere { normal } => vec![normal.clone()],
            Cell2::Polygon { edge_normals, .. } => edge_normals.clone(),
        }
    }

    pub fn contains(&self, x: &UnitVector, tol: f64) -> bool {
        match self {
            Cell2::Sphere => true,
            Cell2::Hemisphere { normal } => normal.dot(x) >= -tol,
            Cell2::Polygon { edge_normals, .. } => {
                edge_normals.iter().all(|m| m.dot(x) >= -tol)
            }
        }
    }

    /// The boundary as oriented arcs (one per edge; a full circle for the
    /// half-sphere, nothing for the whole sphere).
    pub fn boundary_arcs(&self) -> Vec<Arc2> {
        match self {
            Cell2::Sphere => vec![],
            Cell2::Hemisphere { normal } => vec![Arc2::full_circle(normal.clone())],
            Cell2::Polygon {
                vertices,
                edge_normals,
            } => {
                let n = vertices.len();
                (0..n)
                    .map(|i| {
                        let a = &vertices[i];
                        let b = &vertices[(i + 1) % n];
                        Arc2 {
                            circle: edge_normals[i].clone(),
                            start: a.clone(),
                            span: edge_span(a, b, &edge_normals[i]),
                        }
                    })
                    .collect()
            }
        }
    }

    /// Interior angles, one per vertex (empty for sphere and half-sphere).
    pub fn interior_angles(&self) -> Vec<f64> {
        match self {
            Cell2::Sphere | Cell2::Hemisphere { .. } => vec![],
            Cell2::Polygon {
                vertices,
                edge_normals,
            } => {
                let n = vertices.len();
                (0..n)
                    .map(|k| {
                        let v = &vertices[k];
                        let m_in = &edge_normals[(k + n - 1) % n];
                        let m_out = &edge_normals[k];
                        // tangent directions at v: arriving edge travels along
                        // m_in x v, departing along m_out x v
                        let t_in = m_in.cross3_raw(v);
                        let t_out = m_out.cross3_raw(v);
                        let back: Vec<f64> = t_in.iter().map(|c| -c).collect();
                        let cosb = dot(&back, &t_out);
                        let cr = super::vector::cross3(&back, &t_out);
                        let sinb = dot(&cr, &cr).sqrt();
                        sinb.atan2(cosb)
                    })
                    .collect()
            }
        }
    }

    /// Spherical area by the excess formula: sum of interior angles minus
    /// (n - 2) pi. Half-spheres and the full sphere are handled directly.
    pub fn area(&self) -> f64 {
        match self {
            Cell2::Sphere => 4.0 * PI,
            Cell2::Hemisphere { .. } => 2.0 * PI,
            Cell2::Polygon { vertices, .. } => {
                let n = vertices.len() as f64;
                let excess: f64 = self.interior_angles().iter().sum::<f64>() - (n - 2.0) * PI;
                excess.max(0.0)
            }
        }
    }

    pub fn perimeter(&self) -> f64 {
        match self {
            Cell2::Sphere => 0.0,
            Cell2::Hemisphere { .. } => 2.0 * PI,
            Cell2::Polygon { .. } => self.boundary_arcs().iter().map(|a| a.span).sum(),
        }
    }

    /// Spherical intrinsic volumes (V0, V1, V2) of the cell.
    ///
    /// V2 = area / (4 pi), V1 = perimeter / (4 pi) and V0 accumulates the
    /// external angles (pi - alpha) / (4 pi) over the vertices. Great
    /// subspheres obey V_j(S_k) = delta_{jk}: the whole sphere reports
    /// (0, 0, 1) and a half-sphere (0, 1/2, 1/2).
    pub fn intrinsic_volumes(&self) -> [f64; 3] {
        match self {
            Cell2::Sphere => [0.0, 0.0, 1.0],
            Cell2::Hemisphere { .. } => [0.0, 0.5, 0.5],
            Cell2::Polygon { .. } => {
                let v0: f64 = self
                    .interior_angles()
                    .iter()
                    .map(|a| (PI - a) / (4.0 * PI))
                    .sum();
                [v0, self.perimeter() / (4.0 * PI), self.area() / (4.0 * PI)]
            }
        }
    }

    /// Classifies the circle u^perp against the cell. Vertex evaluation is
    /// exact here: the extreme points of the cell are its vertices, except
    /// in the vertex-free states which are handled directly.
    pub fn classify_circle(&self, u: &UnitVector, eps: f64) -> Result<CircleSide> {
        match self {
            Cell2::Sphere => Ok(CircleSide::Hit),
            Cell2::Hemisphere { normal } => {
                if normal.dot(u).abs() >= 1.0 - 1e-12 {
                    Err(SphereSplitError::Degenerate(
                        "circle coincides with half-sphere boundary".into(),
                    ))
                } else {
                    Ok(CircleSide::Hit)
                }
            }
            Cell2::Polygon { vertices, .. } => {
                let mut pos = false;
                let mut neg = false;
                for v in vertices {
                    let s = u.dot(v);
                    if s.abs() <= eps {
                        return Err(SphereSplitError::Degenerate(
                            "vertex on splitting circle".into(),
                        ));
                    }
                    if s > 0.0 {
                        pos = true;
                    } else {
                        neg = true;
                    }
                }
                Ok(match (pos, neg) {
                    (true, true) => CircleSide::Hit,
                    (true, false) => CircleSide::AllPlus,
                    (false, true) => CircleSide::AllMinus,
                    (false, false) => unreachable!("polygon has vertices"),
                })
            }
        }
    }

    /// True iff u^perp meets the interior of the cell.
    pub fn hits_interior(&self, u: &UnitVector, eps: f64) -> Result<bool> {
        Ok(self.classify_circle(u, eps)? == CircleSide::Hit)
    }

    /// Splits the cell by the circle u^perp. Returns the two children (the
    /// one on the positive side of u first) and the inserted piece arc.
    pub fn split(&self, u: &UnitVector, eps: f64) -> Result<(Cell2, Cell2, Arc2)> {
        match self {
            Cell2::Sphere => {
                let piece = Arc2::full_circle(u.clone());
                Ok((
                    Cell2::hemisphere(u.clone()),
                    Cell2::hemisphere(u.neg()),
                    piece,
                ))
            }
            Cell2::Hemisphere { normal } => {
                let n = normal;
                if n.dot(u).abs() >= 1.0 - 1e-12 {
                    return Err(SphereSplitError::Degenerate(
                        "splitting circle parallel to half-sphere boundary".into(),
                    ));
                }
                let v = u.cross3_unit(n)?;
                let piece = Arc2 {
                    circle: u.clone(),
                    start: v.neg(),
                    span: PI,
                };
                let plus = Cell2::Polygon {
                    vertices: vec![v.neg(), v.clone()],
                    edge_normals: vec![u.clone(), n.clone()],
                };
                let minus = Cell2::Polygon {
                    vertices: vec![v.clone(), v.neg()],
                    edge_normals: vec![u.neg(), n.clone()],
                };
                Ok((plus, minus, piece))
            }
            Cell2::Polygon {
                vertices,
                edge_normals,
            } => self.split_polygon(vertices, edge_normals, u, eps),
        }
    }

    fn split_polygon(
        &self,
        vertices: &[UnitVector],
        edge_normals: &[UnitVector],
        u: &UnitVector,
        eps: f64,
    ) -> Result<(Cell2, Cell2, Arc2)> {
        let n = vertices.len();
        let signs: Vec<f64> = vertices.iter().map(|v| u.dot(v)).collect();
        if signs.iter().any(|s| s.abs() <= eps) {
            return Err(SphereSplitError::Degenerate(
                "vertex on splitting circle".into(),
            ));
        }
        let pos_any = signs.iter().any(|&s| s > 0.0);
        let neg_any = signs.iter().any(|&s| s < 0.0);
        if !(pos_any && neg_any) {
            return Err(SphereSplitError::Precondition(
                "splitting circle does not hit the cell interior".into(),
            ));
        }
        // the two sign-change edges: exit (+ -> -) and entry (- -> +)
        let mut exit = None;
        let mut entry = None;
        let mut changes = 0;
        for i in 0..n {
            let a = signs[i] > 0.0;
            let b = signs[(i + 1) % n] > 0.0;
            if a != b {
                changes += 1;
                if a {
                    exit = Some(i);
                } else {
                    entry = Some(i);
                }
            }
        }
        if changes != 2 {
            return Err(SphereSplitError::Degenerate(format!(
                "sign pattern with {changes} changes on a convex cell"
            )));
        }
        let (i1, i2) = (exit.unwrap(), entry.unwrap());
        let p1 = edge_circle_crossing(vertices, edge_normals, i1, u)?;
        let p2 = edge_circle_crossing(vertices, edge_normals, i2, u)?;

        // positive child: p2, the + run, p1, closed by the new edge on u
        let mut plus_v = vec![p2.clone()];
        let mut plus_e = vec![edge_normals[i2].clone()];
        let mut k = (i2 + 1) % n;
        loop {
            plus_v.push(vertices[k].clone());
            plus_e.push(edge_normals[k].clone());
            if k == i1 {
                break;
            }
            k = (k + 1) % n;
        }
        plus_v.push(p1.clone());
        plus_e.push(u.clone());

        // negative child: p1, the - run, p2, closed by the new edge on -u
        let mut minus_v = vec![p1.clone()];
        let mut minus_e = vec![edge_normals[i1].clone()];
        let mut k = (i1 + 1) % n;
        loop {
            minus_v.push(vertices[k].clone());
            minus_e.push(edge_normals[k].clone());
            if k == i2 {
                break;
            }
            k = (k + 1) % n;
        }
        minus_v.push(p2.clone());
        minus_e.push(u.neg());

        let span = edge_span(&p1, &p2, u);
        let piece = Arc2 {
            circle: u.clone(),
            start: p1,
            span,
        };
        Ok((
            Cell2::Polygon {
                vertices: plus_v,
                edge_normals: plus_e,
            },
            Cell2::Polygon {
                vertices: minus_v,
                edge_normals: minus_e,
            },
            piece,
        ))
    }

    /// The chord c cap u^perp as an arc, without constructing the children.
    /// `None` when the circle misses the cell.
    pub fn chord(&self, u: &UnitVector, eps: f64) -> Result<Option<Arc2>> {
        match self.classify_circle(u, eps)? {
            CircleSide::Hit => {
                let (_, _, piece) = self.split(u, eps)?;
                Ok(Some(piece))
            }
            _ => Ok(None),
        }
    }

    /// Intersects the cell with the half-sphere {<u, x> >= 0}: `None` when
    /// the intersection has empty interior.
    pub fn clip_plus(&self, u: &UnitVector, eps: f64) -> Result<Option<Cell2>> {
        match self.classify_circle(u, eps)? {
            CircleSide::Hit => {
                let (plus, _, _) = self.split(u, eps)?;
                Ok(Some(plus))
            }
            CircleSide::AllPlus => Ok(Some(self.clone())),
            CircleSide::AllMinus => Ok(None),
        }
    }

    /// Builds the cell cut out by a list of inward normals, starting from the
    /// whole sphere. `None` when the intersection has empty interior.
    pub fn from_inward_normals(normals: &[UnitVector], eps: f64) -> Result<Option<Cell2>> {
        let mut cell = Cell2::Sphere;
        for u in normals {
            match cell.clip_plus(u, eps)? {
                Some(next) => cell = next,
                None => return Ok(None),
            }
        }
        Ok(Some(cell))
    }

    /// H/V consistency checks: vertices satisfy every constraint, lie on
    /// their two adjacent edge circles, and edge spans are positive.
    pub fn validate(&self) -> Result<()> {
        let tol = 1e-10;
        if let Cell2::Polygon {
            vertices,
            edge_normals,
        } = self
        {
            let n = vertices.len();
            if n < 2 || edge_normals.len() != n {
                return Err(SphereSplitError::Precondition(format!(
                    "polygon with {n} vertices and {} edge normals",
                    edge_normals.len()
                )));
            }
            for (k, v) in vertices.iter().enumerate() {
                for m in edge_normals {
                    if m.dot(v) < -tol {
                        return Err(SphereSplitError::Precondition(format!(
                            "vertex {k} violates a bounding half-sphere by {}",
                            m.dot(v)
                        )));
                    }
                }
                let m_in = &edge_normals[(k + n - 1) % n];
                let m_out = &edge_normals[k];
                if m_in.dot(v).abs() > tol || m_out.dot(v).abs() > tol {
                    return Err(SphereSplitError::Precondition(format!(
                        "vertex {k} not on its two bounding circles"
                    )));
                }
            }
            for arc in self.boundary_arcs() {
                if !(arc.span > 0.0 && arc.span < FULL_TURN) {
                    return Err(SphereSplitError::Precondition(format!(
                        "edge span {} out of range",
                        arc.span
                    )));
                }
            }
        }
        Ok(())
    }
}

fn edge_circle_crossing(
    vertices: &[UnitVector],
    edge_normals: &[UnitVector],
    i: usize,
    u: &UnitVector,
) -> Result<UnitVector> {
    let n = vertices.len();
    let a = &vertices[i];
    let b = &vertices[(i + 1) % n];
    let m = &edge_normals[i];
    let w = u.cross3_unit(m)?;
    let span = edge_span(a, b, m);
    let mut found: Option<UnitVector> = None;
    for cand in [w.clone(), w.neg()] {
        let phi = edge_span(a, &cand, m);
        if phi < span {
            if found.is_some() {
                return Err(SphereSplitError::Degenerate(
                    "both circle intersections on one edge".into(),
                ));
            }
            found = Some(cand);
        }
    }
    found.ok_or_else(|| {
        SphereSplitError::Degenerate("no circle intersection on a sign-change edge".into())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphgeo::vector::{sample_uniform_sphere, EPS_INNER};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn e(k: usize) -> UnitVector {
        UnitVector::basis(2, k)
    }

    /// The positive octant {x, y, z >= 0}.
    fn octant() -> Cell2 {
        Cell2::Polygon {
            vertices: vec![e(0), e(1), e(2)],
            edge_normals: vec![e(2), e(0), e(1)],
        }
    }

    #[test]
    fn octant_measures() {
        let c = octant();
        c.validate().unwrap();
        assert!((c.area() - PI / 2.0).abs() < 1e-12);
        assert!((c.perimeter() - 1.5 * PI).abs() < 1e-12);
        let iv = c.intrinsic_volumes();
        assert!((iv[0] - 3.0 / 8.0).abs() < 1e-12);
        assert!((iv[1] - 3.0 / 8.0).abs() < 1e-12);
        assert!((iv[2] - 1.0 / 8.0).abs() < 1e-12);
        for a in c.interior_angles() {
            assert!((a - PI / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sphere_and_hemisphere_measures() {
        assert!((Cell2::Sphere.area() - 4.0 * PI).abs() < 1e-12);
        assert_eq!(Cell2::Sphere.intrinsic_volumes(), [0.0, 0.0, 1.0]);
        let h = Cell2::hemisphere(e(2));
        assert!((h.area() - 2.0 * PI).abs() < 1e-12);
        assert!((h.perimeter() - 2.0 * PI).abs() < 1e-12);
        assert_eq!(h.intrinsic_volumes(), [0.0, 0.5, 0.5]);
    }

    #[test]
    fn split_sphere_gives_hemispheres_and_full_circle() {
        let (plus, minus, piece) = Cell2::Sphere.split(&e(2), EPS_INNER).unwrap();
        assert!(piece.is_full_circle());
        assert!((piece.length() - FULL_TURN).abs() < 1e-12);
        assert!((plus.area() - 2.0 * PI).abs() < 1e-12);
        assert!((minus.area() - 2.0 * PI).abs() < 1e-12);
        assert!(plus.contains(&e(2), 1e-12));
        assert!(minus.contains(&e(2).neg(), 1e-12));
    }

    #[test]
    fn split_hemisphere_gives_quarter_lunes() {
        let h = Cell2::hemisphere(e(2));
        let (plus, minus, piece) = h.split(&e(0), EPS_INNER).unwrap();
        assert!((piece.length() - PI).abs() < 1e-12);
        plus.validate().unwrap();
        minus.validate().unwrap();
        assert!((plus.area() - PI).abs() < 1e-12);
        assert!((minus.area() - PI).abs() < 1e-12);
        // lune perimeter is always 2 pi
        assert!((plus.perimeter() - 2.0 * PI).abs() < 1e-12);
        // both vertices antipodal on the e2 axis
        assert_eq!(plus.vertex_count(), 2);
    }

    #[test]
    fn octant_hit_classification() {
        let c = octant();
        // equator through the octant's interior
        let u = UnitVector::from_slice(&[0.4, 0.3, -0.6]).unwrap();
        assert_eq!(c.classify_circle(&u, EPS_INNER).unwrap(), CircleSide::Hit);
        // circle keeping the octant strictly on one side
        let far = UnitVector::from_slice(&[1.0, 1.0, 1.0]).unwrap();
        assert_ne!(
            c.classify_circle(&far, EPS_INNER).unwrap(),
            CircleSide::Hit
        );
        // circle through a vertex
        assert!(c.classify_circle(&e(2), EPS_INNER).is_err());
    }

    #[test]
    fn split_additivity_random_cells() {
        let mut rng = ChaCha12Rng::seed_from_u64(21);
        let mut cells = vec![Cell2::Sphere];
        let mut checked = 0;
        while checked < 400 {
            let idx = rng.gen_range(0..cells.len());
            let u = sample_uniform_sphere(2, &mut rng);
            let cell = cells[idx].clone();
            match cell.hits_interior(&u, EPS_INNER) {
                Ok(true) => {}
                _ => continue,
            }
            let (plus, minus, piece) = cell.split(&u, EPS_INNER).unwrap();
            plus.validate().unwrap();
            minus.validate().unwrap();
            let a = cell.area();
            assert!(
                (plus.area() + minus.area() - a).abs() < 1e-9,
                "area additivity: {} vs {}",
                plus.area() + minus.area(),
                a
            );
            let p = cell.perimeter();
            assert!(
                (plus.perimeter() + minus.perimeter() - p - 2.0 * piece.length()).abs() < 1e-9,
                "perimeter identity"
            );
            // children partition: piece midpoint on both children boundaries
            let mid = piece.point_at(0.5 * piece.length());
            assert!(plus.contains(&mid, 1e-10));
            assert!(minus.contains(&mid, 1e-10));
            cells.swap_remove(idx);
            cells.push(plus);
            cells.push(minus);
            checked += 1;
        }
        let total: f64 = cells.iter().map(|c| c.area()).sum();
        assert!(
            (total - 4.0 * PI).abs() < 1e-8,
            "partition of the sphere: {total}"
        );
    }

    #[test]
    fn from_normals_recovers_octant() {
        let c = Cell2::from_inward_normals(&[e(0), e(1), e(2)], EPS_INNER)
            .unwrap()
            .unwrap();
        assert!((c.area() - PI / 2.0).abs() < 1e-12);
        assert_eq!(c.vertex_count(), 3);
        // infeasible list
        let none = Cell2::from_inward_normals(
            &[e(0), e(0).neg()],
            EPS_INNER,
        );
        assert!(none.is_err() || none.unwrap().is_none());
    }

    #[test]
    fn chord_of_octant() {
        let c = octant();
        let u = UnitVector::from_slice(&[0.2, 0.6, -0.75]).unwrap();
        let chord = c.chord(&u, EPS_INNER).unwrap().unwrap();
        // chord endpoints on the boundary, interior inside
        assert!(c.contains(&chord.start, 1e-9));
        assert!(c.contains(&chord.end(), 1e-9));
        assert!(c.contains(&chord.point_at(chord.length() / 2.0), 1e-9));
        assert!(chord.length() > 0.0 && chord.length() < PI + 1e-12);
    }
}
