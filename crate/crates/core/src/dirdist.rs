//! Direction distributions for the splitting hyperspheres: the isotropic law
//! and an axial-quadratic anisotropic family, together with the hitting and
//! separation measures of compact test sets under those laws.
//!
//! Both families are symmetric (u and -u equidistributed) and have bounded
//! densities with respect to the uniform law, so they are regular: no fixed
//! point lies on a sampled hypersphere with positive probability.

use crate::error::{Result, SphereSplitError};
use crate::sphgeo::{
    geodesic_distance, sample_uniform_sphere, segment_hit, Cell2, CircleSide, GeodesicSegment,
    GreatHypersphere, UnitVector, EPS_INNER,
};
use rand::Rng;

/// Law of the unit normal of a splitting great hypersphere.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub enum DirectionDistribution {
    /// Rotation invariant law (normal uniform on S^d).
    Uniform { dim: usize },
    /// Density proportional to 1 + beta <u, axis>^2, beta >= 0. Symmetric and
    /// regular for every beta; beta = 0 reduces to the uniform law.
    AxialQuadratic {
        dim: usize,
        axis: UnitVector,
        beta: f64,
    },
}

impl DirectionDistribution {
    pub fn uniform(dim: usize) -> Self {
        DirectionDistribution::Uniform { dim }
    }

    pub fn axial(axis: UnitVector, beta: f64) -> Result<Self> {
        if !(beta >= 0.0) {
            return Err(SphereSplitError::InvalidArgument(format!(
                "axial concentration beta must be >= 0, got {beta}"
            )));
        }
        Ok(DirectionDistribution::AxialQuadratic {
            dim: axis.dim_ambient(),
            axis,
            beta,
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            DirectionDistribution::Uniform { dim } => *dim,
            DirectionDistribution::AxialQuadratic { dim, .. } => *dim,
        }
    }

    pub fn is_isotropic(&self) -> bool {
        match self {
            DirectionDistribution::Uniform { .. } => true,
            DirectionDistribution::AxialQuadratic { beta, .. } => *beta == 0.0,
        }
    }

    /// Samples a great hypersphere with this direction distribution
    /// (canonicalized normal). The axial family is drawn by rejection against
    /// the uniform proposal with acceptance bound 1 + beta.
    pub fn sample_great_hypersphere<R: Rng + ?Sized>(&self, rng: &mut R) -> GreatHypersphere {
        GreatHypersphere::new(self.sample_normal(rng))
    }

    /// Samples the (non-canonicalized) normal direction.
    pub fn sample_normal<R: Rng + ?Sized>(&self, rng: &mut R) -> UnitVector {
        match self {
            DirectionDistribution::Uniform { dim } => sample_uniform_sphere(*dim, rng),
            DirectionDistribution::AxialQuadratic { dim, axis, beta } => loop {
                let u = sample_uniform_sphere(*dim, rng);
                let t = u.dot(axis);
                let accept = (1.0 + beta * t * t) / (1.0 + beta);
                if rng.gen::<f64>() < accept {
                    return u;
                }
            },
        }
    }

    /// Parses the CLI specification string: `uniform` or
    /// `axial:beta=<v>:axis=<c0,c1,...>`.
    pub fn parse_spec(spec: &str, dim: usize) -> Result<Self> {
        let spec = spec.trim();
        if spec.eq_ignore_ascii_case("uniform") {
            return Ok(DirectionDistribution::uniform(dim));
        }
        if let Some(rest) = spec.strip_prefix("axial:") {
            let mut beta = None;
            let mut axis = None;
            for part in rest.split(':') {
                if let Some(v) = part.strip_prefix("beta=") {
                    beta = Some(v.parse::<f64>().map_err(|e| {
                        SphereSplitError::InvalidArgument(format!("bad beta {v}: {e}"))
                    })?);
                } else if let Some(v) = part.strip_prefix("axis=") {
                    let coords: Vec<f64> = v
                        .split(',')
                        .map(|c| {
                            c.trim().parse::<f64>().map_err(|e| {
                                SphereSplitError::InvalidArgument(format!(
                                    "bad axis entry {c}: {e}"
                                ))
                            })
                        })
                        .collect::<Result<_>>()?;
                    axis = Some(UnitVector::from_slice(&coords)?);
                } else {
                    return Err(SphereSplitError::InvalidArgument(format!(
                        "unknown axial key in `{part}`"
                    )));
                }
            }
            let beta = beta.ok_or_else(|| {
                SphereSplitError::InvalidArgument("axial spec missing beta=".into())
            })?;
            let axis = axis.unwrap_or_else(|| UnitVector::basis(dim, dim));
            if axis.dim_ambient() != dim {
                return Err(SphereSplitError::InvalidArgument(format!(
                    "axis has ambient dimension {}, expected {}",
                    axis.dim_ambient() + 1,
                    dim + 1
                )));
            }
            return DirectionDistribution::axial(axis, beta);
        }
        Err(SphereSplitError::InvalidArgument(format!(
            "unknown direction distribution spec `{spec}` (use `uniform` or `axial:beta=<v>:axis=<coords>`)"
        )))
    }
}

/// A compact test set: a union of segments, points and convex cells.
#[derive(Clone, Debug)]
pub enum CompactSet {
    Point(UnitVector),
    Segment(GeodesicSegment),
    Cell(Cell2),
}

impl CompactSet {
    /// Whether the great hypersphere meets the set (boundary touching within
    /// eps counts as a hit).
    pub fn hit_by(&self, s: &GreatHypersphere, eps: f64) -> bool {
        match self {
            CompactSet::Point(p) => s.normal().dot(p).abs() <= eps,
            CompactSet::Segment(seg) => segment_hit(s, seg, eps),
            CompactSet::Cell(c) => match c.classify_circle(s.normal(), eps) {
                Ok(CircleSide::Hit) => true,
                Ok(_) => false,
                Err(_) => true, // tangent within tolerance counts as a hit
            },
        }
    }

    /// Points generating the spherical convex hull (endpoints / vertices).
    pub fn support_points(&self) -> Vec<UnitVector> {
        match self {
            CompactSet::Point(p) => vec![p.clone()],
            CompactSet::Segment(seg) => vec![seg.a.clone(), seg.b.clone()],
            CompactSet::Cell(c) => c.vertices().to_vec(),
        }
    }
}

/// Hitting probability of a convex d = 2 cell under the isotropic law:
/// twice the first intrinsic volume, i.e. perimeter / (2 pi). Cells that
/// contain antipodal point pairs (sphere, half-spheres, lunes) are hit by
/// every great circle.
pub fn hitting_measure_isotropic(cell: &Cell2) -> f64 {
    match cell {
        Cell2::Sphere | Cell2::Hemisphere { .. } => 1.0,
        Cell2::Polygon { .. } => (cell.perimeter() / (2.0 * std::f64::consts::PI)).min(1.0),
    }
}

/// Hitting probability of a segment under the isotropic law: length / pi.
pub fn hitting_measure_isotropic_segment(len: f64) -> f64 {
    len / std::f64::consts::PI
}

/// kappa(x, y): probability that a kappa-distributed great hypersphere
/// separates x from y, i.e. hits the segment between them. Exact under the
/// uniform law, Monte Carlo otherwise.
pub fn kappa_two_point<R: Rng + ?Sized>(
    kappa: &DirectionDistribution,
    x: &UnitVector,
    y: &UnitVector,
    n: usize,
    rng: &mut R,
) -> Result<f64> {
    let l = geodesic_distance(x, y);
    if l >= std::f64::consts::PI - 1e-12 {
        return Err(SphereSplitError::Precondition(
            "two-point measure needs l(x,y) < pi".into(),
        ));
    }
    if kappa.is_isotropic() {
        return Ok(l / std::f64::consts::PI);
    }
    if l == 0.0 {
        return Ok(0.0);
    }
    let seg = GeodesicSegment::new(x.clone(), y.clone())?;
    let mut hits = 0usize;
    for _ in 0..n {
        let s = kappa.sample_great_hypersphere(rng);
        if segment_hit(&s, &seg, EPS_INNER) {
            hits += 1;
        }
    }
    Ok(hits as f64 / n as f64)
}

/// Monte Carlo estimate of the hitting measure of a union of compact sets,
/// with standard error.
pub fn hitting_measure_estimate<R: Rng + ?Sized>(
    kappa: &DirectionDistribution,
    sets: &[CompactSet],
    n: usize,
    rng: &mut R,
) -> (f64, f64) {
    let mut hits = 0usize;
    for _ in 0..n {
        let s = kappa.sample_great_hypersphere(rng);
        if sets.iter().any(|c| c.hit_by(&s, EPS_INNER)) {
            hits += 1;
        }
    }
    let p = hits as f64 / n as f64;
    (p, (p * (1.0 - p) / n as f64).sqrt())
}

/// The spherical convex hull of the support points of the given sets,
/// returned in its natural dimension: a point, a geodesic segment, or a
/// full-dimensional cell. Exact for polytopal inputs; requires the union to
/// fit in an open half-sphere so the hull is a proper convex body.
pub fn convex_hull_set(sets: &[CompactSet]) -> Result<CompactSet> {
    let mut pts: Vec<UnitVector> = Vec::new();
    for s in sets {
        for p in s.support_points() {
            if !pts.iter().any(|q| geodesic_distance(q, &p) < 1e-12) {
                pts.push(p);
            }
        }
    }
    match pts.len() {
        0 => Err(SphereSplitError::Precondition("hull of an empty set".into())),
        1 => Ok(CompactSet::Point(pts.pop().expect("one point"))),
        2 => {
            let b = pts.pop().expect("two points");
            let a = pts.pop().expect("two points");
            Ok(GeodesicSegment::new(a, b).map(CompactSet::Segment)?)
        }
        _ => {
            // collinear inputs hull into the extremal segment
            if let Ok(axis) = pts[0].cross3_unit(&pts[1]) {
                if pts.iter().all(|p| axis.dot(p).abs() < 1e-12) {
                    let mut best = (0usize, 1usize, geodesic_distance(&pts[0], &pts[1]));
                    for i in 0..pts.len() {
                        for j in i + 1..pts.len() {
                            let d = geodesic_distance(&pts[i], &pts[j]);
                            if d > best.2 {
                                best = (i, j, d);
                            }
                        }
                    }
                    let seg = GeodesicSegment::new(pts[best.0].clone(), pts[best.1].clone())?;
                    return Ok(CompactSet::Segment(seg));
                }
            }
            Ok(CompactSet::Cell(convex_hull_cell(&pts)?))
        }
    }
}

fn convex_hull_cell(pts: &[UnitVector]) -> Result<Cell2> {
    // centroid direction witnesses the open half-sphere containing the input
    let dim = pts[0].coords().len();
    let mut sum = crate::sphgeo::vector::Coords::from_elem(0.0, dim);
    for p in pts {
        for (s, c) in sum.iter_mut().zip(p.coords()) {
            *s += c;
        }
    }
    let center = UnitVector::new(sum).map_err(|_| {
        SphereSplitError::Precondition("support points not in an open half-sphere".into())
    })?;
    if pts.iter().any(|p| p.dot(&center) <= 1e-9) {
        return Err(SphereSplitError::Precondition(
            "support points not strictly inside a half-sphere around their centroid".into(),
        ));
    }
    // gift wrapping on the sphere: facet normals are cross products of point
    // pairs with all points on the nonnegative side
    let mut normals: Vec<UnitVector> = Vec::new();
    for i in 0..pts.len() {
        for j in 0..pts.len() {
            if i == j {
                continue;
            }
            let Ok(m) = pts[i].cross3_unit(&pts[j]) else {
                continue;
            };
            if pts.iter().all(|p| m.dot(p) >= -1e-10) {
                normals.push(m);
            }
        }
    }
    if normals.is_empty() {
        return Err(SphereSplitError::Precondition(
            "hull has no supporting half-spheres (degenerate input)".into(),
        ));
    }
    Cell2::from_inward_normals(&normals, EPS_INNER)?.ok_or_else(|| {
        SphereSplitError::Precondition("hull construction produced an empty cell".into())
    })
}

/// Monte Carlo estimate (value, standard error) of the separation measure:
/// hyperspheres missing both sets but hitting the convex hull of their union.
pub fn separation_measure_estimate<R: Rng + ?Sized>(
    kappa: &DirectionDistribution,
    b1: &[CompactSet],
    b2: &[CompactSet],
    n: usize,
    rng: &mut R,
) -> Result<(f64, f64)> {
    let all: Vec<CompactSet> = b1.iter().chain(b2.iter()).cloned().collect();
    let hull = convex_hull_set(&all)?;
    let mut count = 0usize;
    for _ in 0..n {
        let s = kappa.sample_great_hypersphere(rng);
        let hit1 = b1.iter().any(|c| c.hit_by(&s, EPS_INNER));
        let hit2 = b2.iter().any(|c| c.hit_by(&s, EPS_INNER));
        if !hit1 && !hit2 && hull.hit_by(&s, EPS_INNER) {
            count += 1;
        }
    }
    let p = count as f64 / n as f64;
    Ok((p, (p * (1.0 - p) / n as f64).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn e(k: usize) -> UnitVector {
        UnitVector::basis(2, k)
    }

    #[test]
    fn uniform_hit_frequency_of_quarter_segment() {
        let mut rng = ChaCha12Rng::seed_from_u64(41);
        let seg = GeodesicSegment::new(e(2), e(0)).unwrap();
        let kappa = DirectionDistribution::uniform(2);
        let (p, se) =
            hitting_measure_estimate(&kappa, &[CompactSet::Segment(seg)], 100_000, &mut rng);
        assert!((p - 0.5).abs() < 4.0 * se, "{p} +- {se}");
    }

    #[test]
    fn singleton_and_antipodal_pair_have_measure_zero() {
        let mut rng = ChaCha12Rng::seed_from_u64(42);
        let kappa = DirectionDistribution::uniform(2);
        let x = UnitVector::from_slice(&[0.3, -0.5, 0.81]).unwrap();
        let (p, _) =
            hitting_measure_estimate(&kappa, &[CompactSet::Point(x.clone())], 50_000, &mut rng);
        assert_eq!(p, 0.0);
        let (p, _) = hitting_measure_estimate(
            &kappa,
            &[CompactSet::Point(x.clone()), CompactSet::Point(x.neg())],
            50_000,
            &mut rng,
        );
        assert_eq!(p, 0.0);
    }

    #[test]
    fn hitting_measure_cells() {
        let octant = Cell2::from_inward_normals(&[e(0), e(1), e(2)], EPS_INNER)
            .unwrap()
            .unwrap();
        assert!((hitting_measure_isotropic(&octant) - 0.75).abs() < 1e-12);
        assert!((hitting_measure_isotropic(&Cell2::hemisphere(e(2))) - 1.0).abs() < 1e-15);
        // MC agreement for the octant
        let mut rng = ChaCha12Rng::seed_from_u64(43);
        let kappa = DirectionDistribution::uniform(2);
        let (p, se) =
            hitting_measure_estimate(&kappa, &[CompactSet::Cell(octant)], 100_000, &mut rng);
        assert!((p - 0.75).abs() < 4.0 * se, "{p} +- {se}");
    }

    #[test]
    fn axial_moment_matches_quadrature_oracle() {
        // density prop to (1 + beta cos^2 theta) sin theta over colatitude:
        // E<u,a>^2 = (1/3 + beta/5) / (1 + beta/3); beta = 4 gives 17/35
        let mut rng = ChaCha12Rng::seed_from_u64(44);
        let axis = e(2);
        let kappa = DirectionDistribution::axial(axis.clone(), 4.0).unwrap();
        let n = 200_000;
        let mut s = 0.0;
        let mut s2 = 0.0;
        for _ in 0..n {
            let u = kappa.sample_normal(&mut rng);
            let t = u.dot(&axis);
            s += t * t;
            s2 += t * t * t * t;
        }
        let mean = s / n as f64;
        let var = (s2 / n as f64 - mean * mean).max(0.0);
        let se = (var / n as f64).sqrt();
        let want = 17.0 / 35.0;
        assert!((mean - want).abs() < 4.0 * se, "{mean} vs {want}");
    }

    #[test]
    fn axial_beta_zero_matches_uniform() {
        // two-sample z test on <u, axis>^2 at the 1% level
        let mut rng = ChaCha12Rng::seed_from_u64(45);
        let axis = e(2);
        let a = DirectionDistribution::axial(axis.clone(), 0.0).unwrap();
        let b = DirectionDistribution::uniform(2);
        let n = 50_000;
        let stats = |kappa: &DirectionDistribution, rng: &mut ChaCha12Rng| {
            let mut s = 0.0;
            let mut s2 = 0.0;
            for _ in 0..n {
                let u = kappa.sample_normal(rng);
                let t = u.dot(&axis);
                s += t * t;
                s2 += t * t * t * t;
            }
            let m = s / n as f64;
            (m, ((s2 / n as f64 - m * m).max(0.0) / n as f64).sqrt())
        };
        let (ma, sa) = stats(&a, &mut rng);
        let (mb, sb) = stats(&b, &mut rng);
        let z = (ma - mb) / (sa * sa + sb * sb).sqrt();
        assert!(z.abs() < 2.576, "z = {z}");
    }

    #[test]
    fn two_point_measure() {
        let mut rng = ChaCha12Rng::seed_from_u64(46);
        let kappa = DirectionDistribution::uniform(2);
        let x = e(2);
        let y = e(0);
        let v = kappa_two_point(&kappa, &x, &y, 0, &mut rng).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
        assert_eq!(kappa_two_point(&kappa, &x, &x, 0, &mut rng).unwrap(), 0.0);
        // anisotropic vs brute-force sign test
        let kappa = DirectionDistribution::axial(e(2), 4.0).unwrap();
        let v = kappa_two_point(&kappa, &x, &y, 100_000, &mut rng).unwrap();
        let seg = GeodesicSegment::new(x, y).unwrap();
        let mut hits = 0;
        let n = 100_000;
        for _ in 0..n {
            let u = kappa.sample_normal(&mut rng);
            let (sa, sb) = (u.dot(&seg.a), u.dot(&seg.b));
            if sa * sb < 0.0 {
                hits += 1;
            }
        }
        let brute = hits as f64 / n as f64;
        let se = 2.0 * (0.25 / n as f64).sqrt();
        assert!((v - brute).abs() < 4.0 * se, "{v} vs {brute}");
    }

    #[test]
    fn separation_of_two_points_at_right_angle() {
        // separating = hitting the segment minus hitting the endpoints; the
        // endpoints carry measure zero, so the frequency is l / pi = 1/2
        let mut rng = ChaCha12Rng::seed_from_u64(47);
        let kappa = DirectionDistribution::uniform(2);
        let b1 = [CompactSet::Point(e(2))];
        let b2 = [CompactSet::Point(e(0))];
        let (p, se) = separation_measure_estimate(&kappa, &b1, &b2, 100_000, &mut rng).unwrap();
        assert!((p - 0.5).abs() < 4.0 * se, "{p} +- {se}");
    }

    #[test]
    fn separation_bounded_by_hull_hitting() {
        let mut rng = ChaCha12Rng::seed_from_u64(48);
        let kappa = DirectionDistribution::uniform(2);
        // two tiny segments in general position inside a small cap
        let base = UnitVector::from_slice(&[0.02, -0.04, 1.0]).unwrap();
        let p1 = UnitVector::from_slice(&[0.11, 0.015, 1.0]).unwrap();
        let p2 = UnitVector::from_slice(&[-0.01, 0.09, 1.0]).unwrap();
        let b1 = [CompactSet::Segment(
            GeodesicSegment::new(base.clone(), p1).unwrap(),
        )];
        let b2 = [CompactSet::Segment(
            GeodesicSegment::new(UnitVector::from_slice(&[-0.12, -0.02, 1.0]).unwrap(), p2).unwrap(),
        )];
        let (sep, _) = separation_measure_estimate(&kappa, &b1, &b2, 40_000, &mut rng).unwrap();
        let all: Vec<CompactSet> = b1.iter().chain(b2.iter()).cloned().collect();
        let hull = convex_hull_set(&all).unwrap();
        let (hull_hit, se) = hitting_measure_estimate(&kappa, &[hull], 40_000, &mut rng);
        assert!(sep <= hull_hit + 4.0 * se, "{sep} vs {hull_hit}");
    }

    #[test]
    fn crofton_average_of_chord_v0_recovers_v1() {
        // for a fixed convex cell, the mean of V_0(c cap S) over uniform
        // great circles equals V_1(c): each chord is a segment with V_0 = 1/2,
        // so the average is half the hitting probability
        let mut rng = ChaCha12Rng::seed_from_u64(49);
        let octant = Cell2::from_inward_normals(&[e(0), e(1), e(2)], EPS_INNER)
            .unwrap()
            .unwrap();
        let want = octant.intrinsic_volumes()[1];
        let n = 100_000;
        let mut sum = 0.0;
        let mut sum2 = 0.0;
        for _ in 0..n {
            let u = crate::sphgeo::sample_uniform_sphere(2, &mut rng);
            let v0 = match octant.chord(&u, EPS_INNER) {
                Ok(Some(chord)) => chord.intrinsic_volumes().0,
                _ => 0.0,
            };
            sum += v0;
            sum2 += v0 * v0;
        }
        let mean = sum / n as f64;
        let var = (sum2 / n as f64 - mean * mean).max(0.0);
        let se = (var / n as f64).sqrt();
        assert!((mean - want).abs() < 4.0 * se, "{mean} vs {want}");
    }

    #[test]
    fn spec_string_parsing() {
        let k = DirectionDistribution::parse_spec("uniform", 2).unwrap();
        assert!(k.is_isotropic());
        let k = DirectionDistribution::parse_spec("axial:beta=4:axis=0,0,1", 2).unwrap();
        match k {
            DirectionDistribution::AxialQuadratic { beta, .. } => assert_eq!(beta, 4.0),
            _ => panic!("expected axial"),
        }
        assert!(DirectionDistribution::parse_spec("vonmises", 2).is_err());
        assert!(DirectionDistribution::parse_spec("axial:beta=-1:axis=0,0,1", 2).is_err());
    }
}
