//! Cells of tessellations of S^d for d >= 3, kept as polyhedral cones in
//! R^{d+1}: an inward-normal list plus the generator structure (orthonormal
//! lineality basis and extreme rays of the pointed part), recomputed from the
//! normals after every split.
//!
//! Early cells are genuinely non-pointed — the whole sphere, half-spheres and
//! wedges contain full lines — so the generator set always carries the
//! lineality basis with both signs implied. Linear-functional sign tests over
//! (rays, +-lineality) are exact for membership of a circle in the hitting
//! set, which is all the simulator needs in dimensions where no closed-form
//! cell measure exists.

use super::cell2::Cell2;
use super::vector::{dot, orthonormal_complement, Coords, UnitVector};
use crate::error::{Result, SphereSplitError};

const DEP_TOL: f64 = 1e-9;

/// Orthonormalizes `rows`, returning the surviving basis (the row space).
fn gram_schmidt(rows: &[Coords], tol: f64) -> Vec<Coords> {
    let mut basis: Vec<Coords> = Vec::new();
    for row in rows {
        let mut v = row.clone();
        for b in &basis {
            let p = dot(&v, b);
            for (vi, bi) in v.iter_mut().zip(b.iter()) {
                *vi -= p * bi;
            }
        }
        let norm = dot(&v, &v).sqrt();
        if norm > tol {
            for c in v.iter_mut() {
                *c /= norm;
            }
            basis.push(v);
        }
    }
    basis
}

/// Orthonormal basis of the orthogonal complement of `span` in R^dim.
fn complement_basis(span: &[Coords], dim: usize, tol: f64) -> Vec<Coords> {
    let mut basis: Vec<Coords> = span.to_vec();
    let mut out = Vec::new();
    for axis in 0..dim {
        let mut v = Coords::from_elem(0.0, dim);
        v[axis] = 1.0;
        for b in &basis {
            let p = dot(&v, b);
            for (vi, bi) in v.iter_mut().zip(b.iter()) {
                *vi -= p * bi;
            }
        }
        let norm = dot(&v, &v).sqrt();
        if norm > tol {
            for c in v.iter_mut() {
                *c /= norm;
            }
            basis.push(v.clone());
            out.push(v);
        }
    }
    out
}

#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct ConeCell {
    dim_ambient: usize,
    normals: Vec<UnitVector>,
    lineality: Vec<UnitVector>,
    rays: Vec<UnitVector>,
}

impl ConeCell {
    /// The whole sphere S^d.
    pub fn whole_sphere(d: usize) -> ConeCell {
        let mut lineality = Vec::with_capacity(d + 1);
        for k in 0..=d {
            lineality.push(UnitVector::basis(d, k));
        }
        ConeCell {
            dim_ambient: d,
            normals: vec![],
            lineality,
            rays: vec![],
        }
    }

    /// Builds the cell {x : <n_i, x> >= 0 for all i} and its generators.
    /// Degenerate (rank-deficient beyond general position) inputs and empty
    /// interiors are rejected.
    pub fn from_normals(d: usize, normals: Vec<UnitVector>) -> Result<ConeCell> {
        let dim = d + 1;
        if normals.is_empty() {
            return Ok(ConeCell::whole_sphere(d));
        }
        let rows: Vec<Coords> = normals.iter().map(|n| Coords::from_slice(n.coords())).collect();
        let row_basis = gram_schmidt(&rows, DEP_TOL);
        let r = row_basis.len();
        let lin_basis = complement_basis(&row_basis, dim, DEP_TOL);
        debug_assert_eq!(lin_basis.len(), dim - r);

        // constraints in row-space coordinates (r-dimensional, full rank)
        let reduced: Vec<Coords> = rows
            .iter()
            .map(|n| row_basis.iter().map(|b| dot(n, b)).collect())
            .collect();
        let reduced_rays = enumerate_rays(&reduced, r)?;
        if reduced_rays.is_empty() && r > 0 {
            return Err(SphereSplitError::Precondition(
                "cone has empty interior".into(),
            ));
        }
        // back to ambient coordinates
        let rays = reduced_rays
            .iter()
            .map(|w| {
                let mut v = Coords::from_elem(0.0, dim);
                for (c, b) in w.iter().zip(&row_basis) {
                    for i in 0..dim {
                        v[i] += c * b[i];
                    }
                }
                UnitVector::new(v)
            })
            .collect::<Result<Vec<_>>>()?;
        let lineality = lin_basis
            .into_iter()
            .map(UnitVector::new)
            .collect::<Result<Vec<_>>>()?;

        let mut cell = ConeCell {
            dim_ambient: d,
            normals,
            lineality,
            rays,
        };
        cell.prune_redundant(r);
        Ok(cell)
    }

    /// Drops constraints that do not support a facet. In the pointed case a
    /// facet of a (d+1)-dimensional cone carries at least d extreme rays; with
    /// lineality of dimension l the pointed part lives in rank r = d+1-l and a
    /// facet needs r-1 rays.
    fn prune_redundant(&mut self, rank: usize) {
        if self.normals.len() <= 1 || rank == 0 {
            return;
        }
        let need = rank.saturating_sub(1).max(1);
        let keep: Vec<bool> = self
            .normals
            .iter()
            .map(|n| {
                let tight = self
                    .rays
                    .iter()
                    .filter(|r| n.dot(r).abs() <= 1e-9)
                    .count();
                tight >= need
            })
            .collect();
        if keep.iter().all(|&k| k) {
            return;
        }
        self.normals = self
            .normals
            .iter()
            .zip(&keep)
            .filter(|(_, &k)| k)
            .map(|(n, _)| n.clone())
            .collect();
    }

    pub fn dim_ambient(&self) -> usize {
        self.dim_ambient
    }

    pub fn normals(&self) -> &[UnitVector] {
        &self.normals
    }

    pub fn rays(&self) -> &[UnitVector] {
        &self.rays
    }

    pub fn lineality(&self) -> &[UnitVector] {
        &self.lineality
    }

    pub fn contains(&self, x: &UnitVector, tol: f64) -> bool {
        self.normals.iter().all(|n| n.dot(x) >= -tol)
    }

    /// True iff the great hypersphere u^perp meets the interior: the linear
    /// functional <u, .> takes both strict signs on the generator set.
    /// Evaluations inside the tolerance band are degenerate and resampled by
    /// the caller.
    pub fn hits_interior(&self, u: &UnitVector, eps: f64) -> Result<bool> {
        if self.normals.is_empty() {
            return Ok(true);
        }
        let mut pos = false;
        let mut neg = false;
        let mut band = false;
        for l in &self.lineality {
            let v = u.dot(l);
            if v.abs() > eps {
                pos = true;
                neg = true;
            } else {
                band = true;
            }
        }
        for r in &self.rays {
            let v = u.dot(r);
            if v > eps {
                pos = true;
            } else if v < -eps {
                neg = true;
            } else {
                band = true;
            }
        }
        if band {
            return Err(SphereSplitError::Degenerate(
                "generator on splitting hypersphere".into(),
            ));
        }
        Ok(pos && neg)
    }

    /// Splits by u^perp, returning the children (positive side first) and the
    /// piece description: the projected constraints of the cell inside the
    /// subsphere, expressed in an orthonormal frame of u^perp.
    pub fn split(&self, u: &UnitVector, eps: f64) -> Result<(ConeCell, ConeCell, SubspherePiece)> {
        if !(self.hits_interior(u, eps)?) {
            return Err(SphereSplitError::Precondition(
                "hypersphere does not hit the cell interior".into(),
            ));
        }
        let mut plus_normals = self.normals.clone();
        plus_normals.push(u.clone());
        let mut minus_normals = self.normals.clone();
        minus_normals.push(u.neg());
        let plus = ConeCell::from_normals(self.dim_ambient, plus_normals)?;
        let minus = ConeCell::from_normals(self.dim_ambient, minus_normals)?;
        let piece = self.piece_in_subsphere(u)?;
        Ok((plus, minus, piece))
    }

    /// The intersection c cap u^perp as constraints in u^perp coordinates.
    pub fn piece_in_subsphere(&self, u: &UnitVector) -> Result<SubspherePiece> {
        let frame = orthonormal_complement(u);
        let mut frame_normals = Vec::with_capacity(self.normals.len());
        for n in &self.normals {
            let nu = n.dot(u);
            let mut p = Coords::from_slice(n.coords());
            for (pi, ui) in p.iter_mut().zip(u.coords()) {
                *pi -= nu * ui;
            }
            let norm = dot(&p, &p).sqrt();
            if norm < 1e-9 {
                return Err(SphereSplitError::Degenerate(
                    "splitting hypersphere parallel to a cell facet".into(),
                ));
            }
            let coords: Coords = frame.iter().map(|b| dot(&p, b.coords()) / norm).collect();
            frame_normals.push(UnitVector::new(coords)?);
        }
        let polygon = if self.dim_ambient == 3 {
            match Cell2::from_inward_normals(&frame_normals, super::vector::EPS_INNER)? {
                Some(c) => Some(c),
                None => {
                    return Err(SphereSplitError::Degenerate(
                        "piece with empty interior in the subsphere".into(),
                    ))
                }
            }
        } else {
            None
        };
        Ok(SubspherePiece {
            normal: u.clone(),
            frame,
            frame_normals,
            polygon,
        })
    }

    /// Areas of the facets (d = 3 only): each facet is the cell clipped into
    /// the subsphere of one of its own bounding normals.
    pub fn facet_areas(&self) -> Result<Vec<f64>> {
        if self.dim_ambient != 3 {
            return Err(SphereSplitError::UnsupportedDimension(
                "facet areas are exact only on S^3".into(),
            ));
        }
        let mut out = Vec::with_capacity(self.normals.len());
        for (i, n) in self.normals.iter().enumerate() {
            let others: Vec<UnitVector> = self
                .normals
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, m)| m.clone())
                .collect();
            let sub = ConeCell {
                dim_ambient: self.dim_ambient,
                normals: others,
                lineality: vec![],
                rays: vec![],
            };
            let piece = sub.piece_in_subsphere(n)?;
            out.push(piece.polygon.as_ref().map(|p| p.area()).unwrap_or(0.0));
        }
        Ok(out)
    }

    /// H/V consistency: every generator satisfies every constraint.
    pub fn validate(&self) -> Result<()> {
        for r in self.rays.iter().chain(self.lineality.iter()) {
            for n in &self.normals {
                let v = n.dot(r);
                let bound = if self.lineality.iter().any(|l| std::ptr::eq(l, r)) {
                    v.abs()
                } else {
                    -v
                };
                if bound > 1e-8 {
                    return Err(SphereSplitError::Precondition(format!(
                        "generator violates constraint by {v}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Extreme rays of the full-rank cone {y in R^r : A y >= 0}: feasible
/// directions with r-1 independent tight constraints.
fn enumerate_rays(reduced: &[Coords], r: usize) -> Result<Vec<Coords>> {
    if r == 0 {
        return Ok(vec![]);
    }
    let m = reduced.len();
    if r == 1 {
        let mut out = Vec::new();
        for w in [1.0f64, -1.0] {
            if reduced.iter().all(|n| n[0] * w >= -DEP_TOL) {
                out.push(Coords::from_slice(&[w]));
            }
        }
        return Ok(out);
    }
    let mut rays: Vec<Coords> = Vec::new();
    let mut subset: Vec<usize> = (0..r - 1).collect();
    if m < r - 1 {
        return Err(SphereSplitError::Degenerate(format!(
            "{m} constraints cannot pin rays in rank {r}"
        )));
    }
    loop {
        let rows: Vec<Coords> = subset.iter().map(|&i| reduced[i].clone()).collect();
        let span = gram_schmidt(&rows, DEP_TOL);
        if span.len() == r - 1 {
            let null = complement_basis(&span, r, DEP_TOL);
            if null.len() == 1 {
                let w = &null[0];
                for sign in [1.0f64, -1.0] {
                    let cand: Coords = w.iter().map(|c| c * sign).collect();
                    if reduced
                        .iter()
                        .all(|n| dot(n, &cand) >= -DEP_TOL)
                        && !rays.iter().any(|existing| dot(existing, &cand) > 1.0 - 1e-9)
                    {
                        rays.push(cand);
                    }
                }
            }
        }
        // next (r-1)-subset of {0..m}
        let k = r - 1;
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(rays);
            }
            i -= 1;
            if subset[i] != i + m - k {
                subset[i] += 1;
                for j in i + 1..k {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// The (d-1)-dimensional piece c cap S of a split, living in the subsphere
/// S = u^perp cap S^d and described in an orthonormal frame of u^perp. On S^3
/// the piece is resolved into an exact spherical polygon.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct SubspherePiece {
    pub normal: UnitVector,
    pub frame: Vec<UnitVector>,
    pub frame_normals: Vec<UnitVector>,
    pub polygon: Option<Cell2>,
}

impl SubspherePiece {
    /// Exact (d-1)-Hausdorff measure where available (d = 3).
    pub fn measure_exact(&self) -> Option<f64> {
        self.polygon.as_ref().map(|p| p.area())
    }

    /// Monte Carlo membership estimate of the piece measure over its
    /// subsphere, with standard error. Works in every dimension.
    pub fn measure_mc<R: rand::Rng + ?Sized>(&self, n: usize, rng: &mut R) -> (f64, f64) {
        let sub_d = self.frame.len() - 1;
        let beta = crate::special::beta_dim(sub_d);
        let mut hits = 0usize;
        for _ in 0..n {
            let y = super::vector::sample_uniform_sphere(sub_d, rng);
            if self
                .frame_normals
                .iter()
                .all(|m| m.dot(&y) >= -1e-12)
            {
                hits += 1;
            }
        }
        let p = hits as f64 / n as f64;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        (beta * p, beta * se)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphgeo::vector::{sample_uniform_sphere, EPS_INNER};
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn e4(k: usize) -> UnitVector {
        UnitVector::basis(3, k)
    }

    #[test]
    fn orthant_of_s3() {
        let c = ConeCell::from_normals(3, vec![e4(0), e4(1), e4(2), e4(3)]).unwrap();
        assert_eq!(c.rays().len(), 4);
        assert!(c.lineality().is_empty());
        c.validate().unwrap();
        // facet of the orthant: an octant of S^2, area pi/2
        let areas = c.facet_areas().unwrap();
        assert_eq!(areas.len(), 4);
        for a in areas {
            assert!((a - std::f64::consts::PI / 2.0).abs() < 1e-10, "{a}");
        }
    }

    #[test]
    fn wedge_generators() {
        let c = ConeCell::from_normals(3, vec![e4(0), e4(1)]).unwrap();
        assert_eq!(c.lineality().len(), 2);
        assert_eq!(c.rays().len(), 2);
        c.validate().unwrap();
    }

    #[test]
    fn hit_classification_on_s3() {
        let c = ConeCell::from_normals(3, vec![e4(0), e4(1), e4(2), e4(3)]).unwrap();
        // hypersphere separating e0 from the others
        let u = UnitVector::from_slice(&[3.0, -1.0, -1.0, -1.0]).unwrap();
        assert!(c.hits_interior(&u, EPS_INNER).unwrap());
        // hypersphere keeping the orthant on one side
        let v = UnitVector::from_slice(&[1.0, 1.0, 1.0, 1.0]).unwrap();
        assert!(!c.hits_interior(&v, EPS_INNER).unwrap());
        // whole sphere is always hit
        let s = ConeCell::whole_sphere(3);
        assert!(s.hits_interior(&v, EPS_INNER).unwrap());
    }

    #[test]
    fn first_split_piece_is_full_subsphere() {
        let s = ConeCell::whole_sphere(3);
        let u = UnitVector::from_slice(&[0.3, -0.2, 0.5, 0.7]).unwrap();
        let (plus, minus, piece) = s.split(&u, EPS_INNER).unwrap();
        assert_eq!(plus.normals().len(), 1);
        assert_eq!(minus.normals().len(), 1);
        // piece is the whole 2-subsphere: area 4 pi
        let area = piece.measure_exact().unwrap();
        assert!((area - 4.0 * std::f64::consts::PI).abs() < 1e-10, "{area}");
    }

    #[test]
    fn split_measures_add_up_statistically() {
        // split a random cell and check the piece area against an
        // independent Monte Carlo membership estimate
        let mut rng = ChaCha12Rng::seed_from_u64(33);
        let mut cell = ConeCell::whole_sphere(3);
        for _ in 0..3 {
            loop {
                let u = sample_uniform_sphere(3, &mut rng);
                match cell.hits_interior(&u, EPS_INNER) {
                    Ok(true) => {
                        let (plus, _, piece) = cell.split(&u, EPS_INNER).unwrap();
                        let exact = piece.measure_exact().unwrap();
                        let (mc, se) = piece.measure_mc(20_000, &mut rng);
                        assert!(
                            (mc - exact).abs() < 4.0 * se + 1e-9,
                            "piece area {exact} vs mc {mc} (se {se})"
                        );
                        cell = plus;
                        break;
                    }
                    _ => continue,
                }
            }
        }
    }

    #[test]
    fn half_subsphere_piece_area() {
        // splitting a half-sphere of S^3: the piece is half of the cutting
        // 2-subsphere, area 2 pi
        let h = ConeCell::from_normals(3, vec![e4(0)]).unwrap();
        let u = UnitVector::from_slice(&[0.2, -0.5, 0.6, 0.6]).unwrap();
        let (_, _, piece) = h.split(&u, EPS_INNER).unwrap();
        let a = piece.measure_exact().unwrap();
        assert!((a - 2.0 * std::f64::consts::PI).abs() < 1e-10, "{a}");
    }

    #[test]
    fn mc_cell_volumes_partition_s3() {
        // independent per-cell Monte Carlo volumes sum to beta_3 within the
        // combined standard error
        let mut rng = ChaCha12Rng::seed_from_u64(40);
        let kappa = crate::dirdist::DirectionDistribution::uniform(3);
        let y = crate::splitproc::simulate(3, &kappa, 1.5, &mut rng, None, 40).unwrap();
        let beta3 = crate::special::beta_dim(3);
        let n = 40_000usize;
        let mut total = 0.0;
        let mut var = 0.0;
        for (_, cell) in &y.cells {
            let mut hits = 0usize;
            for _ in 0..n {
                let x = sample_uniform_sphere(3, &mut rng);
                if cell.contains(&x, 0.0) {
                    hits += 1;
                }
            }
            let p = hits as f64 / n as f64;
            total += beta3 * p;
            var += beta3 * beta3 * p * (1.0 - p) / n as f64;
        }
        let se = var.sqrt().max(1e-9);
        assert!(
            (total - beta3).abs() < 4.0 * se,
            "sum {total} vs {beta3} (se {se})"
        );
    }

    #[test]
    fn mc_measure_on_s4_piece() {
        let s = ConeCell::whole_sphere(4);
        let u = UnitVector::from_slice(&[0.1, 0.2, -0.4, 0.8, 0.4]).unwrap();
        let (_, _, piece) = s.split(&u, EPS_INNER).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let (mc, _) = piece.measure_mc(4_000, &mut rng);
        // the piece is a full 3-subsphere: measure beta_3 = 2 pi^2
        assert!((mc - crate::special::beta_dim(3)).abs() < 1e-9);
    }
}
