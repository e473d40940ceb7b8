//! Poisson great hypersphere tessellations: a Poisson number of i.i.d.
//! hyperspheres, the dynamic insertion process that shares their law at every
//! fixed time, closed-form face counts under general position, and exact
//! d = 2 arrangements with per-edge lengths.

use crate::dirdist::DirectionDistribution;
use crate::error::{Result, SphereSplitError};
use crate::splitproc::CellShape;
use crate::sphgeo::{orthonormal_complement, Cell2, GreatHypersphere, EPS_INNER};
use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson};

#[derive(Clone, Debug)]
pub struct PoissonGHT {
    pub dim: usize,
    pub t: f64,
    pub normals: Vec<GreatHypersphere>,
    pub seed: u64,
}

/// Samples a Poisson great hypersphere tessellation: N ~ Poisson(t)
/// hyperspheres, i.i.d. with the given direction distribution. Draws that
/// violate general position within tolerance are resampled (they carry
/// probability zero, so resampling preserves the law).
pub fn sample<R: Rng + ?Sized>(
    d: usize,
    kappa: &DirectionDistribution,
    t: f64,
    rng: &mut R,
    seed_label: u64,
) -> Result<PoissonGHT> {
    if t < 0.0 {
        return Err(SphereSplitError::Precondition(format!(
            "intensity must be nonnegative, got {t}"
        )));
    }
    let n = if t == 0.0 {
        0
    } else {
        Poisson::new(t)
            .map_err(|e| SphereSplitError::InvalidArgument(format!("poisson({t}): {e}")))?
            .sample(rng) as usize
    };
    for _ in 0..200 {
        let normals: Vec<GreatHypersphere> =
            (0..n).map(|_| kappa.sample_great_hypersphere(rng)).collect();
        if in_general_position(d, &normals) {
            return Ok(PoissonGHT {
                dim: d,
                t,
                normals,
                seed: seed_label,
            });
        }
    }
    Err(SphereSplitError::Degenerate(
        "persistent general-position violations".into(),
    ))
}

/// Numerical general-position check at tolerance 1e-10: pairwise distinct
/// normals, and (d = 2) no three circles through a common point pair.
pub fn in_general_position(d: usize, normals: &[GreatHypersphere]) -> bool {
    let tol = 1e-10;
    let n = normals.len();
    for i in 0..n {
        for j in i + 1..n {
            if normals[i].normal().dot(normals[j].normal()).abs() > 1.0 - tol {
                return false;
            }
        }
    }
    if d == 2 {
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let a = normals[i].normal().coords();
                    let b = normals[j].normal().coords();
                    let c = normals[k].normal().coords();
                    let det = a[0] * (b[1] * c[2] - b[2] * c[1])
                        - a[1] * (b[0] * c[2] - b[2] * c[0])
                        + a[2] * (b[0] * c[1] - b[1] * c[0]);
                    if det.abs() < tol {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Splits every cell whose interior the hypersphere meets (the simultaneous
/// dissection step of the dynamic process). Degenerate geometry anywhere
/// aborts with the Degenerate error so the caller can resample the draw.
pub fn dissect_all(cells: &[CellShape], s: &GreatHypersphere) -> Result<Vec<CellShape>> {
    let mut out = Vec::with_capacity(cells.len() + 2);
    for cell in cells {
        if cell.hits_interior(s.normal(), EPS_INNER)? {
            let (plus, minus, _) = cell.split(s.normal(), EPS_INNER)?;
            out.push(plus);
            out.push(minus);
        } else {
            out.push(cell.clone());
        }
    }
    Ok(out)
}

/// One step of the dynamic path: arrival time, inserted hypersphere, and the
/// number of cells after the dissection.
#[derive(Clone, Debug)]
pub struct DynamicArrival {
    pub time: f64,
    pub hypersphere: GreatHypersphere,
    pub cell_count_after: usize,
}

#[derive(Clone, Debug)]
pub struct DynamicPoissonPath {
    pub dim: usize,
    pub t_end: f64,
    pub arrivals: Vec<DynamicArrival>,
    pub cells: Vec<CellShape>,
}

/// The dynamic Poisson great hypersphere tessellation process: arrivals at
/// unit-rate exponential gaps; each arriving hypersphere dissects every cell
/// it meets. At any fixed time the state is distributed as `sample` with the
/// same intensity.
pub fn dynamic_simulate<R: Rng + ?Sized>(
    d: usize,
    kappa: &DirectionDistribution,
    t: f64,
    rng: &mut R,
) -> Result<DynamicPoissonPath> {
    if t < 0.0 {
        return Err(SphereSplitError::Precondition(format!(
            "time must be nonnegative, got {t}"
        )));
    }
    let mut cells = vec![CellShape::initial(d)];
    let mut arrivals = Vec::new();
    let mut now = 0.0f64;
    loop {
        now += rng.sample::<f64, _>(Exp1);
        if now > t {
            break;
        }
        // resample degenerate insertions in place
        let mut done = false;
        for _ in 0..200 {
            let s = kappa.sample_great_hypersphere(rng);
            match dissect_all(&cells, &s) {
                Ok(next) => {
                    cells = next;
                    arrivals.push(DynamicArrival {
                        time: now,
                        hypersphere: s,
                        cell_count_after: cells.len(),
                    });
                    done = true;
                    break;
                }
                Err(SphereSplitError::Degenerate(_)) => continue,
                Err(e) => return Err(e),
            }
        }
        if !done {
            return Err(SphereSplitError::Degenerate(
                "persistent degenerate insertions".into(),
            ));
        }
    }
    Ok(DynamicPoissonPath {
        dim: d,
        t_end: t,
        arrivals,
        cells,
    })
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut out = 1u64;
    for i in 0..k {
        out = out * (n - i) / (i + 1);
    }
    out
}

/// Closed-form face counts of an arrangement of `n` great hyperspheres of
/// S^d in general position, for face dimension k in {0, 1, d}.
pub fn face_counts(n: u64, d: usize, k: usize) -> Result<u64> {
    let dd = d as u64;
    match k {
        0 => Ok(if n >= dd { 2 * binomial(n, dd) } else { 0 }),
        1 => Ok(if n >= dd {
            2 * dd * binomial(n, dd)
        } else if n + 1 == dd {
            // d-1 hyperspheres meet in a single great circle: one closed edge
            1
        } else {
            0
        }),
        _ if k == d => {
            if n == 0 {
                return Ok(1);
            }
            // cells of n central hyperplanes of R^{d+1} in general position
            let mut cells = 0u64;
            for j in 0..=dd {
                cells += binomial(n - 1, j);
            }
            Ok(2 * cells)
        }
        _ => Err(SphereSplitError::UnsupportedDimension(format!(
            "face counts support k in {{0, 1, {d}}}, got {k}"
        ))),
    }
}

/// Expected-structure helper: total edge length of an arrangement of n great
/// hyperspheres is 2 pi per great circle of intersection, i.e.
/// 2 pi * C(n, d-1).
pub fn total_edge_length(n: u64, d: usize) -> f64 {
    2.0 * std::f64::consts::PI * binomial(n, d as u64 - 1) as f64
}

/// Exact d = 2 arrangement: polygonal cells plus per-edge lengths grouped by
/// supporting circle.
#[derive(Clone, Debug)]
pub struct Arrangement2D {
    pub cells: Vec<Cell2>,
    /// (circle index, edge length); every circle's edges sum to 2 pi.
    pub edges: Vec<(usize, f64)>,
}

impl Arrangement2D {
    pub fn total_edge_length(&self) -> f64 {
        self.edges.iter().map(|(_, l)| l).sum()
    }
}

/// Builds the exact arrangement of the given circles by incremental
/// dissection. Degenerate (non-general-position) inputs are rejected.
pub fn arrangement_2d(p: &PoissonGHT) -> Result<Arrangement2D> {
    if p.dim != 2 {
        return Err(SphereSplitError::UnsupportedDimension(
            "arrangements are exact on S^2 only".into(),
        ));
    }
    let cells = tessellation_from_circles(&p.normals)?;
    let n = p.normals.len();
    let mut edges = Vec::new();
    for i in 0..n {
        let u = p.normals[i].normal();
        // crossing angles of every other circle on circle i
        let reference = orthonormal_complement(u)
            .into_iter()
            .next()
            .expect("complement on S^2");
        let ref_arc = crate::sphgeo::Arc2 {
            circle: u.clone(),
            start: reference,
            span: 2.0 * std::f64::consts::PI,
        };
        let mut angles = Vec::new();
        for (j, other) in p.normals.iter().enumerate() {
            if j == i {
                continue;
            }
            let w = u.cross3_unit(other.normal())?;
            angles.push(ref_arc.angle_of(&w));
            angles.push(ref_arc.angle_of(&w.neg()));
        }
        if angles.is_empty() {
            edges.push((i, 2.0 * std::f64::consts::PI));
            continue;
        }
        angles.sort_by(f64::total_cmp);
        for w in angles.windows(2) {
            edges.push((i, w[1] - w[0]));
        }
        let wrap = angles[0] + 2.0 * std::f64::consts::PI - angles[angles.len() - 1];
        edges.push((i, wrap));
    }
    Ok(Arrangement2D {
        cells,
        edges,
    })
}

/// Dissects the sphere by the given circles in order, returning the cell
/// list. Also used to build fixed initial tessellations for the splitting
/// process.
pub fn tessellation_from_circles(normals: &[GreatHypersphere]) -> Result<Vec<Cell2>> {
    let mut cells = vec![CellShape::Two(Cell2::whole_sphere())];
    for s in normals {
        cells = dissect_all(&cells, s)?;
    }
    Ok(cells
        .into_iter()
        .map(|c| match c {
            CellShape::Two(c2) => c2,
            CellShape::Cone(_) => unreachable!("d = 2 dissection"),
        })
        .collect())
}

/// Normal-list CSV export (the Poisson analogue of the event log).
pub fn normals_to_csv(p: &PoissonGHT) -> String {
    let mut out = String::new();
    out.push_str(&crate::csv_schema_header("normals"));
    out.push('\n');
    out.push_str("index,normal_coords\n");
    for (i, s) in p.normals.iter().enumerate() {
        let coords = s
            .normal()
            .coords()
            .iter()
            .map(|c| format!("{c}"))
            .collect::<Vec<_>>()
            .join(";");
        out.push_str(&format!("{i},{coords}\n"));
    }
    out
}

/// Snapshot JSON export, mirroring the splitting-tessellation schema with
/// the event list replaced by the normal list.
pub fn snapshot_json(p: &PoissonGHT) -> Result<serde_json::Value> {
    let cells_json: Vec<serde_json::Value> = if p.dim == 2 {
        let arr = arrangement_2d(p)?;
        arr.cells
            .iter()
            .enumerate()
            .map(|(id, c)| {
                serde_json::json!({
                    "id": id,
                    "normals": c.inward_normals().iter().map(|n| n.coords().to_vec()).collect::<Vec<_>>(),
                    "vertices": c.vertices().iter().map(|v| v.coords().to_vec()).collect::<Vec<_>>(),
                })
            })
            .collect()
    } else {
        vec![]
    };
    Ok(serde_json::json!({
        "schema": "snapshot",
        "version": env!("CARGO_PKG_VERSION"),
        "model": "poisson",
        "dim": p.dim,
        "t": p.t,
        "seed": p.seed,
        "hypersphere_count": p.normals.len(),
        "normals": p.normals.iter().map(|s| s.normal().coords().to_vec()).collect::<Vec<_>>(),
        "cells": cells_json,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphgeo::UnitVector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    const PI: f64 = std::f64::consts::PI;

    #[test]
    fn zero_intensity() {
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let p = sample(2, &DirectionDistribution::uniform(2), 0.0, &mut rng, 1).unwrap();
        assert!(p.normals.is_empty());
        let arr = arrangement_2d(&p).unwrap();
        assert_eq!(arr.cells.len(), 1);
    }

    #[test]
    fn poisson_count_moments() {
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let kappa = DirectionDistribution::uniform(2);
        let runs = 10_000;
        let t = 5.0;
        let mut s = 0.0;
        let mut s2 = 0.0;
        for i in 0..runs {
            let p = sample(2, &kappa, t, &mut rng, i).unwrap();
            let n = p.normals.len() as f64;
            s += n;
            s2 += n * n;
        }
        let mean = s / runs as f64;
        let var = s2 / runs as f64 - mean * mean;
        let se_mean = (t / runs as f64).sqrt();
        assert!((mean - t).abs() < 4.0 * se_mean, "mean {mean}");
        // Var(N) = t; SE of sample variance ~ sqrt((mu4 - var^2)/n), for
        // Poisson mu4 = t(1 + 3t) -> se ~ sqrt((t + 2t^2)/n)
        let se_var = ((t + 2.0 * t * t) / runs as f64).sqrt();
        assert!((var - t).abs() < 5.0 * se_var, "var {var}");
    }

    #[test]
    fn face_count_formulas() {
        // d = 2, three circles: 8 cells, 6 vertices, 12 edges, Euler 2
        assert_eq!(face_counts(3, 2, 2).unwrap(), 8);
        assert_eq!(face_counts(3, 2, 0).unwrap(), 6);
        assert_eq!(face_counts(3, 2, 1).unwrap(), 12);
        assert_eq!(6 - 12 + 8, 2);
        // single circle
        assert_eq!(face_counts(1, 2, 2).unwrap(), 2);
        assert_eq!(face_counts(1, 2, 0).unwrap(), 0);
        assert_eq!(face_counts(1, 2, 1).unwrap(), 1);
        // d = 3 with 3 hyperspheres: 2 d C(3,3) = 6 edges
        assert_eq!(face_counts(3, 3, 1).unwrap(), 6);
        // the d-1 convention
        assert_eq!(face_counts(2, 3, 1).unwrap(), 1);
        assert_eq!(face_counts(0, 2, 2).unwrap(), 1);
        assert!(face_counts(3, 3, 2).is_err());
    }

    #[test]
    fn arrangement_counts_match_formulas() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let kappa = DirectionDistribution::uniform(2);
        for seed in 0..25u64 {
            let p = sample(2, &kappa, 3.0, &mut rng, seed).unwrap();
            let n = p.normals.len() as u64;
            let arr = arrangement_2d(&p).unwrap();
            assert_eq!(arr.cells.len() as u64, face_counts(n, 2, 2).unwrap());
            if n >= 1 {
                assert_eq!(arr.edges.len() as u64, face_counts(n, 2, 1).unwrap().max(1));
                // total edge length = 2 pi n
                assert!(
                    (arr.total_edge_length() - 2.0 * PI * n as f64).abs() < 1e-8,
                    "total length"
                );
                assert!(
                    (arr.total_edge_length() - total_edge_length(n, 2)).abs() < 1e-8
                );
            }
            // cells partition the sphere
            let area: f64 = arr.cells.iter().map(|c| c.area()).sum();
            assert!((area - 4.0 * PI).abs() < 1e-8, "area {area}");
        }
    }

    #[test]
    fn two_generic_circles_give_four_lunes() {
        let a = GreatHypersphere::new(UnitVector::from_slice(&[0.0, 0.0, 1.0]).unwrap());
        let b = GreatHypersphere::new(UnitVector::from_slice(&[0.3, 0.9, 0.1]).unwrap());
        let cells = tessellation_from_circles(&[a, b]).unwrap();
        assert_eq!(cells.len(), 4);
        for c in &cells {
            assert_eq!(c.vertex_count(), 2);
        }
    }

    #[test]
    fn dynamic_marginal_counts() {
        // every arrival with at least one circle present splits >= 2 cells
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        let kappa = DirectionDistribution::uniform(2);
        for _ in 0..20 {
            let path = dynamic_simulate(2, &kappa, 2.0, &mut rng).unwrap();
            let mut prev = 1usize;
            for (i, a) in path.arrivals.iter().enumerate() {
                if i == 0 {
                    assert_eq!(a.cell_count_after, 2);
                } else {
                    assert!(
                        a.cell_count_after >= prev + 2,
                        "arrival added {} cells",
                        a.cell_count_after - prev
                    );
                }
                prev = a.cell_count_after;
            }
            // final count consistent with the closed form
            let n = path.arrivals.len() as u64;
            assert_eq!(path.cells.len() as u64, face_counts(n, 2, 2).unwrap());
        }
    }

    #[test]
    fn capacity_functional_is_exponential_in_hitting_measure() {
        // P(Z_t misses B) = exp(-t kappa<B>) for the Poisson model: test on
        // a segment of length pi/2 (hitting measure 1/2) at t = 2
        let mut rng = ChaCha12Rng::seed_from_u64(6);
        let kappa = DirectionDistribution::uniform(2);
        let seg = crate::sphgeo::GeodesicSegment::new(
            UnitVector::basis(2, 2),
            UnitVector::basis(2, 0),
        )
        .unwrap();
        let t = 2.0;
        let runs = 20_000;
        let mut avoid = 0usize;
        for i in 0..runs {
            let p = sample(2, &kappa, t, &mut rng, i).unwrap();
            if p
                .normals
                .iter()
                .all(|s| !crate::sphgeo::segment_hit(s, &seg, crate::sphgeo::EPS_INNER))
            {
                avoid += 1;
            }
        }
        let freq = avoid as f64 / runs as f64;
        let want = (-t * 0.5f64).exp();
        let se = (want * (1.0 - want) / runs as f64).sqrt();
        assert!((freq - want).abs() < 4.0 * se, "{freq} vs {want}");
    }

    #[test]
    fn surface_intensity_matches_splitting_model() {
        // the two models share E(cell count), E Sigma_1, E Sigma_0
        let report =
            crate::estimate::mc_intensity_equality(&DirectionDistribution::uniform(2), 2.0, 600, 77)
                .unwrap();
        assert!(report.z_cell_count.abs() < 4.0, "{report:?}");
        assert!(report.z_sigma1.abs() < 4.0, "{report:?}");
        assert!(report.z_sigma0.abs() < 4.0, "{report:?}");
    }

    #[test]
    fn csv_and_json_exports() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let p = sample(2, &DirectionDistribution::uniform(2), 3.0, &mut rng, 5).unwrap();
        let csv = normals_to_csv(&p);
        assert!(csv.starts_with("# sphere-split v"));
        assert!(csv.contains("schema=normals"));
        assert_eq!(csv.lines().count(), 2 + p.normals.len());
        let js = snapshot_json(&p).unwrap();
        assert_eq!(js["model"], "poisson");
        assert_eq!(js["hypersphere_count"], p.normals.len());
    }
}
