//! Exact-in-distribution simulator of the splitting tessellation process on
//! S^d, with a full event log and maximal-face tracking.
//!
//! The sampler is a uniformization/thinning scheme. Every cell's splitting
//! rate equals the probability that a kappa-distributed great hypersphere
//! hits its interior, which never exceeds one. Proposing candidate events at
//! unit rate per live cell (total rate = cell count), picking a cell
//! uniformly and accepting the drawn hypersphere exactly when it hits the
//! interior therefore realizes each cell's true rate, and an accepted draw
//! has the law of kappa restricted to the hitting set of that cell. The
//! scheme only ever evaluates the hit predicate, never the hitting measure
//! itself, so it applies in every dimension and under every sampleable
//! direction distribution. The direct competing-exponentials construction
//! below (d = 2, isotropic) serves as its statistical twin for
//! cross-validation.

use crate::dirdist::{hitting_measure_isotropic, CompactSet, DirectionDistribution};
use crate::error::{Result, SphereSplitError};
use crate::sphgeo::{
    segment_crossing, Arc2, Cell2, ConeCell, GreatHypersphere, SubspherePiece, UnitVector,
    EPS_INNER,
};
use rand::Rng;
use rand_distr::Exp1;

pub type CellId = u64;

/// Cell geometry: the exact vertex-cycle representation on S^2, the cone
/// representation above.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub enum CellShape {
    Two(Cell2),
    Cone(ConeCell),
}

impl CellShape {
    pub fn initial(d: usize) -> CellShape {
        if d == 2 {
            CellShape::Two(Cell2::whole_sphere())
        } else {
            CellShape::Cone(ConeCell::whole_sphere(d))
        }
    }

    pub fn hits_interior(&self, u: &UnitVector, eps: f64) -> Result<bool> {
        match self {
            CellShape::Two(c) => c.hits_interior(u, eps),
            CellShape::Cone(c) => c.hits_interior(u, eps),
        }
    }

    pub fn split(&self, u: &UnitVector, eps: f64) -> Result<(CellShape, CellShape, Piece)> {
        match self {
            CellShape::Two(c) => {
                let (p, m, arc) = c.split(u, eps)?;
                Ok((CellShape::Two(p), CellShape::Two(m), Piece::Arc(arc)))
            }
            CellShape::Cone(c) => {
                let (p, m, piece) = c.split(u, eps)?;
                Ok((
                    CellShape::Cone(p),
                    CellShape::Cone(m),
                    Piece::Subsphere(Box::new(piece)),
                ))
            }
        }
    }

    pub fn contains(&self, x: &UnitVector, tol: f64) -> bool {
        match self {
            CellShape::Two(c) => c.contains(x, tol),
            CellShape::Cone(c) => c.contains(x, tol),
        }
    }

    pub fn as_cell2(&self) -> Option<&Cell2> {
        match self {
            CellShape::Two(c) => Some(c),
            CellShape::Cone(_) => None,
        }
    }

    pub fn inward_normals(&self) -> Vec<UnitVector> {
        match self {
            CellShape::Two(c) => c.inward_normals(),
            CellShape::Cone(c) => c.normals().to_vec(),
        }
    }
}

/// The (d-1)-dimensional piece inserted by a split.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub enum Piece {
    Arc(Arc2),
    Subsphere(Box<SubspherePiece>),
}

impl Piece {
    /// Exact (d-1)-Hausdorff measure: arc length on S^2, subsphere polygon
    /// area on S^3; `None` in higher dimensions (use `measure_mc`).
    pub fn measure_exact(&self) -> Option<f64> {
        match self {
            Piece::Arc(a) => Some(a.length()),
            Piece::Subsphere(p) => p.measure_exact(),
        }
    }

    pub fn measure_mc<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> (f64, f64) {
        match self {
            Piece::Arc(a) => (a.length(), 0.0),
            Piece::Subsphere(p) => p.measure_mc(n, rng),
        }
    }

    pub fn as_arc(&self) -> Option<&Arc2> {
        match self {
            Piece::Arc(a) => Some(a),
            Piece::Subsphere(_) => None,
        }
    }
}

#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct SplittingEvent {
    pub time: f64,
    pub parent_id: CellId,
    pub hypersphere: GreatHypersphere,
    pub piece: Piece,
    pub child_ids: (CellId, CellId),
}

#[derive(Clone, Debug)]
pub struct SplittingTessellation {
    pub dim: usize,
    pub t_end: f64,
    pub cells: Vec<(CellId, CellShape)>,
    pub events: Vec<SplittingEvent>,
    /// Thinning candidates whose drawn hypersphere missed the picked cell.
    pub rejected_count: u64,
    /// Degenerate draws that were resampled in place.
    pub degenerate_count: u64,
    pub seed: u64,
}

/// A maximal 1-face of a d = 2 splitting tessellation: on S^2 every inserted
/// piece is one maximal segment, whose endpoints are the maximal 0-faces.
#[derive(Clone, Debug)]
pub struct MaximalSegment {
    pub birth_time: f64,
    pub arc: Arc2,
    pub length: f64,
}

const MAX_DEGENERATE_RETRIES: usize = 1000;

/// Simulates Y_t by uniformization/thinning (see the module docs), starting
/// from the given initial tessellation (default: the whole sphere).
pub fn simulate<R: Rng + ?Sized>(
    d: usize,
    kappa: &DirectionDistribution,
    t: f64,
    rng: &mut R,
    initial: Option<Vec<CellShape>>,
    seed_label: u64,
) -> Result<SplittingTessellation> {
    if t < 0.0 {
        return Err(SphereSplitError::Precondition(format!(
            "time parameter must be nonnegative, got {t}"
        )));
    }
    if d < 2 {
        return Err(SphereSplitError::UnsupportedDimension(format!("d = {d} < 2")));
    }
    if kappa.dim() != d {
        return Err(SphereSplitError::Precondition(
            "direction distribution dimension mismatch".into(),
        ));
    }
    let mut cells: Vec<(CellId, CellShape)> = match initial {
        Some(list) => {
            validate_initial(d, &list)?;
            list.into_iter()
                .enumerate()
                .map(|(i, c)| (i as CellId, c))
                .collect()
        }
        None => vec![(0, CellShape::initial(d))],
    };
    let mut next_id: CellId = cells.len() as CellId;
    let mut events = Vec::new();
    let mut rejected = 0u64;
    let mut degenerate = 0u64;
    let mut now = 0.0f64;
    loop {
        let rate = cells.len() as f64;
        let dt: f64 = rng.sample::<f64, _>(Exp1) / rate;
        now += dt;
        if now > t {
            break;
        }
        let idx = rng.gen_range(0..cells.len());
        // resample degenerate draws in place: they carry probability zero
        // under a regular direction distribution, so redrawing does not bias
        // the law
        let mut accepted = None;
        let mut attempt = 0;
        loop {
            let s = kappa.sample_great_hypersphere(rng);
            match cells[idx].1.hits_interior(s.normal(), EPS_INNER) {
                Ok(true) => match cells[idx].1.split(s.normal(), EPS_INNER) {
                    Ok(halves) => {
                        accepted = Some((s, halves));
                        break;
                    }
                    Err(SphereSplitError::Degenerate(_)) => degenerate += 1,
                    Err(e) => return Err(e),
                },
                Ok(false) => {
                    rejected += 1;
                    break;
                }
                Err(SphereSplitError::Degenerate(_)) => degenerate += 1,
                Err(e) => return Err(e),
            }
            attempt += 1;
            if attempt > MAX_DEGENERATE_RETRIES {
                return Err(SphereSplitError::Degenerate(
                    "persistent degenerate draws; geometry likely corrupted".into(),
                ));
            }
        }
        if let Some((s, (plus, minus, piece))) = accepted {
            let (parent_id, _) = cells[idx];
            let ids = (next_id, next_id + 1);
            next_id += 2;
            cells.swap_remove(idx);
            cells.push((ids.0, plus));
            cells.push((ids.1, minus));
            events.push(SplittingEvent {
                time: now,
                parent_id,
                hypersphere: s,
                piece,
                child_ids: ids,
            });
        }
    }
    Ok(SplittingTessellation {
        dim: d,
        t_end: t,
        cells,
        events,
        rejected_count: rejected,
        degenerate_count: degenerate,
        seed: seed_label,
    })
}

/// The direct competing-exponentials construction for isotropic d = 2: exact
/// per-cell rates (the hitting measure, perimeter / 2 pi for polygon cells)
/// and per-cell conditional sampling of the splitting circle by rejection.
/// Statistically identical to `simulate`; kept as its cross-validation twin.
pub fn simulate_direct_2d<R: Rng + ?Sized>(
    kappa: &DirectionDistribution,
    t: f64,
    rng: &mut R,
    seed_label: u64,
) -> Result<SplittingTessellation> {
    if !kappa.is_isotropic() || kappa.dim() != 2 {
        return Err(SphereSplitError::Precondition(
            "direct construction requires the isotropic law on S^2".into(),
        ));
    }
    if t < 0.0 {
        return Err(SphereSplitError::Precondition(format!(
            "time parameter must be nonnegative, got {t}"
        )));
    }
    let mut cells: Vec<(CellId, Cell2)> = vec![(0, Cell2::whole_sphere())];
    let mut next_id: CellId = 1;
    let mut events = Vec::new();
    let mut degenerate = 0u64;
    let mut now = 0.0f64;
    loop {
        let rates: Vec<f64> = cells
            .iter()
            .map(|(_, c)| hitting_measure_isotropic(c))
            .collect();
        let total: f64 = rates.iter().sum();
        let dt: f64 = rng.sample::<f64, _>(Exp1) / total;
        now += dt;
        if now > t {
            break;
        }
        // pick a cell proportionally to its rate
        let mut target = rng.gen::<f64>() * total;
        let mut idx = cells.len() - 1;
        for (i, r) in rates.iter().enumerate() {
            if target < *r {
                idx = i;
                break;
            }
            target -= r;
        }
        // conditional law of the splitting circle: kappa restricted to the
        // hitting set, realized by rejection
        let mut attempt = 0usize;
        let (s, (plus, minus, piece)) = loop {
            let s = kappa.sample_great_hypersphere(rng);
            match cells[idx].1.hits_interior(s.normal(), EPS_INNER) {
                Ok(true) => match cells[idx].1.split(s.normal(), EPS_INNER) {
                    Ok(h) => break (s, h),
                    Err(SphereSplitError::Degenerate(_)) => degenerate += 1,
                    Err(e) => return Err(e),
                },
                Ok(false) => {}
                Err(SphereSplitError::Degenerate(_)) => degenerate += 1,
                Err(e) => return Err(e),
            }
            attempt += 1;
            if attempt > MAX_DEGENERATE_RETRIES * 100 {
                return Err(SphereSplitError::Degenerate(
                    "conditional circle sampling failed to accept".into(),
                ));
            }
        };
        let (parent_id, _) = cells[idx];
        let ids = (next_id, next_id + 1);
        next_id += 2;
        cells.swap_remove(idx);
        cells.push((ids.0, plus));
        cells.push((ids.1, minus));
        events.push(SplittingEvent {
            time: now,
            parent_id,
            hypersphere: s,
            piece: Piece::Arc(piece),
            child_ids: ids,
        });
    }
    Ok(SplittingTessellation {
        dim: 2,
        t_end: t,
        cells: cells
            .into_iter()
            .map(|(i, c)| (i, CellShape::Two(c)))
            .collect(),
        events,
        rejected_count: 0,
        degenerate_count: degenerate,
        seed: seed_label,
    })
}

fn validate_initial(d: usize, cells: &[CellShape]) -> Result<()> {
    if cells.is_empty() {
        return Err(SphereSplitError::Precondition(
            "initial tessellation must contain at least one cell".into(),
        ));
    }
    if d == 2 {
        let mut area = 0.0;
        for c in cells {
            match c {
                CellShape::Two(c2) => {
                    c2.validate()?;
                    area += c2.area();
                }
                CellShape::Cone(_) => {
                    return Err(SphereSplitError::Precondition(
                        "d = 2 initial tessellation must use Cell2 geometry".into(),
                    ))
                }
            }
        }
        if (area - 4.0 * std::f64::consts::PI).abs() > 1e-8 {
            return Err(SphereSplitError::Precondition(format!(
                "initial cells cover area {area}, expected 4 pi"
            )));
        }
    }
    Ok(())
}

impl SplittingTessellation {
    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    /// Total (d-1)-measure of the union of cell boundaries Z_t: the sum of
    /// the inserted piece measures, each piece counted exactly once.
    pub fn union_measure(&self) -> Result<f64> {
        let mut total = 0.0;
        for ev in &self.events {
            total += ev.piece.measure_exact().ok_or_else(|| {
                SphereSplitError::UnsupportedDimension(
                    "exact union measure needs d <= 3; use union_measure_mc".into(),
                )
            })?;
        }
        Ok(total)
    }

    /// h-weighted union measure on S^2, integrating h along every inserted
    /// arc with fixed-order quadrature.
    pub fn union_measure_weighted(
        &self,
        h: &dyn Fn(&UnitVector) -> f64,
        nodes: usize,
    ) -> Result<f64> {
        if self.dim != 2 {
            return Err(SphereSplitError::UnsupportedDimension(
                "weighted union measure implemented on S^2".into(),
            ));
        }
        let gl = crate::quad::gauss_legendre(nodes.max(1));
        let mut total = 0.0;
        for ev in &self.events {
            let arc = ev.piece.as_arc().expect("d = 2 pieces are arcs");
            let half = 0.5 * arc.span;
            let mut s = 0.0;
            for &(x, w) in &gl {
                s += w * h(&arc.point_at(half * (x + 1.0)));
            }
            total += s * half;
        }
        Ok(total)
    }

    /// Monte Carlo union measure for d >= 4 (per-piece membership sampling).
    pub fn union_measure_mc<R: Rng + ?Sized>(
        &self,
        n_per_piece: usize,
        rng: &mut R,
    ) -> (f64, f64) {
        let mut total = 0.0;
        let mut var = 0.0;
        for ev in &self.events {
            let (v, se) = ev.piece.measure_mc(n_per_piece, rng);
            total += v;
            var += se * se;
        }
        (total, var.sqrt())
    }

    /// Sum of the j-th intrinsic volume over all live cells: Sigma_j(t).
    /// Exact for d = 2 (all j) and for d = 3 with j in {2, 3}.
    pub fn sigma_j(&self, j: usize) -> Result<f64> {
        match self.dim {
            2 => {
                if j > 2 {
                    return Err(SphereSplitError::InvalidArgument(format!(
                        "sigma_{j} undefined on S^2"
                    )));
                }
                Ok(self
                    .cells
                    .iter()
                    .map(|(_, c)| c.as_cell2().expect("d = 2 cells").intrinsic_volumes()[j])
                    .sum())
            }
            3 => match j {
                3 => Ok(1.0),
                2 => {
                    let beta2 = crate::special::beta_dim(2);
                    let mut total = 0.0;
                    for (_, c) in &self.cells {
                        match c {
                            CellShape::Cone(cone) => {
                                let boundary: f64 = cone.facet_areas()?.iter().sum();
                                total += boundary / (2.0 * beta2);
                            }
                            CellShape::Two(_) => unreachable!("d = 3 cells are cones"),
                        }
                    }
                    Ok(total)
                }
                _ => Err(SphereSplitError::UnsupportedDimension(format!(
                    "sigma_{j} on S^3 supports j in {{2, 3}}"
                ))),
            },
            d => Err(SphereSplitError::UnsupportedDimension(format!(
                "sigma_j not implemented for d = {d}"
            ))),
        }
    }

    /// The maximal 1-faces of a d = 2 tessellation: one per event.
    pub fn maximal_segments(&self) -> Result<Vec<MaximalSegment>> {
        if self.dim != 2 {
            return Err(SphereSplitError::UnsupportedDimension(
                "maximal segments tracked on S^2".into(),
            ));
        }
        Ok(self
            .events
            .iter()
            .map(|ev| {
                let arc = ev.piece.as_arc().expect("d = 2 pieces are arcs").clone();
                MaximalSegment {
                    birth_time: ev.time,
                    length: arc.length(),
                    arc,
                }
            })
            .collect())
    }

    /// True iff no inserted piece meets any of the given compact sets
    /// (the avoidance indicator of Z_t for the union of the sets).
    pub fn avoids(&self, sets: &[CompactSet]) -> Result<bool> {
        for ev in &self.events {
            for set in sets {
                if piece_meets_set(&ev.piece, ev.hypersphere.normal(), set)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Intersection test between an inserted piece and a compact test set.
fn piece_meets_set(piece: &Piece, normal: &UnitVector, set: &CompactSet) -> Result<bool> {
    match piece {
        Piece::Arc(arc) => match set {
            CompactSet::Point(p) => {
                Ok(normal.dot(p).abs() <= EPS_INNER && arc.contains_on_circle(p, 1e-9))
            }
            CompactSet::Segment(seg) => {
                let s = GreatHypersphere::new(normal.clone());
                let (sa, sb) = (normal.dot(&seg.a), normal.dot(&seg.b));
                if sa.abs() <= EPS_INNER && arc.contains_on_circle(&seg.a, 1e-9) {
                    return Ok(true);
                }
                if sb.abs() <= EPS_INNER && arc.contains_on_circle(&seg.b, 1e-9) {
                    return Ok(true);
                }
                if let Some(q) = segment_crossing(&s, seg) {
                    return Ok(arc.contains_on_circle(&q, 1e-9));
                }
                Ok(false)
            }
            CompactSet::Cell(c) => match c.chord(&arc.circle, EPS_INNER) {
                Ok(Some(chord)) => Ok(arcs_overlap(arc, &chord)),
                Ok(None) => Ok(false),
                Err(_) => Ok(true), // tangency within tolerance: count as hit
            },
        },
        Piece::Subsphere(p) => match set {
            CompactSet::Point(pt) => {
                if normal.dot(pt).abs() > EPS_INNER {
                    return Ok(false);
                }
                let coords = crate::sphgeo::frame_coordinates(pt, &p.frame);
                let y = UnitVector::new(coords)?;
                Ok(p.frame_normals.iter().all(|m| m.dot(&y) >= -1e-9))
            }
            CompactSet::Segment(seg) => {
                let s = GreatHypersphere::new(normal.clone());
                let mut candidates = Vec::new();
                if normal.dot(&seg.a).abs() <= EPS_INNER {
                    candidates.push(seg.a.clone());
                }
                if normal.dot(&seg.b).abs() <= EPS_INNER {
                    candidates.push(seg.b.clone());
                }
                if let Some(q) = segment_crossing(&s, seg) {
                    candidates.push(q);
                }
                for q in candidates {
                    let coords = crate::sphgeo::frame_coordinates(&q, &p.frame);
                    let y = UnitVector::new(coords)?;
                    if p.frame_normals.iter().all(|m| m.dot(&y) >= -1e-9) {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            CompactSet::Cell(_) => Err(SphereSplitError::UnsupportedDimension(
                "polytopal test sets against pieces are d = 2 only".into(),
            )),
        },
    }
}

/// Overlap of two arcs on the same great circle (orientations may differ).
fn arcs_overlap(a: &Arc2, b: &Arc2) -> bool {
    if a.is_full_circle() || b.is_full_circle() {
        return true;
    }
    let tol = 1e-9;
    let same_dir = a.circle.dot(&b.circle) > 0.0;
    let (b_start, b_end) = if same_dir {
        (b.start.clone(), b.end())
    } else {
        (b.end(), b.start.clone())
    };
    if a.contains_on_circle(&b_start, tol) || a.contains_on_circle(&b_end, tol) {
        return true;
    }
    let bb = Arc2 {
        circle: if same_dir {
            b.circle.clone()
        } else {
            b.circle.neg()
        },
        start: b_start,
        span: b.span,
    };
    bb.contains_on_circle(&a.start, tol) || bb.contains_on_circle(&a.end(), tol)
}

/// Audit of the d = 2 arrangement graph built by a run started from the
/// whole sphere: vertex / edge / face counts, Euler characteristic and the
/// T-junction (degree 3) property of every arc endpoint.
#[derive(Clone, Copy, Debug)]
pub struct ArrangementAudit {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub euler: i64,
    pub all_endpoints_degree3: bool,
}

pub fn arrangement_graph_2d(tess: &SplittingTessellation) -> Result<ArrangementAudit> {
    if tess.dim != 2 {
        return Err(SphereSplitError::UnsupportedDimension(
            "arrangement audit is d = 2 only".into(),
        ));
    }
    if tess.events.is_empty() {
        return Err(SphereSplitError::Precondition(
            "arrangement audit needs at least one event".into(),
        ));
    }
    let arcs: Vec<(&Arc2, &UnitVector)> = tess
        .events
        .iter()
        .map(|ev| {
            (
                ev.piece.as_arc().expect("d = 2 pieces are arcs"),
                ev.hypersphere.normal(),
            )
        })
        .collect();
    let n = arcs.len();
    let mut landed = vec![0usize; n];
    let mut vertices = 0usize;
    let mut degree3 = true;
    for k in 0..n {
        let (arc, _) = arcs[k];
        if arc.is_full_circle() {
            continue;
        }
        for endpoint in [arc.start.clone(), arc.end()] {
            // the endpoint must lie in the relative interior of exactly one
            // older arc
            let mut hosts = Vec::new();
            for (j, (old, old_normal)) in arcs.iter().enumerate().take(k) {
                if old_normal.dot(&endpoint).abs() > 1e-9 {
                    continue;
                }
                if old.is_full_circle() {
                    hosts.push(j);
                    continue;
                }
                let phi = old.angle_of(&endpoint);
                if phi > 1e-9 && phi < old.span - 1e-9 {
                    hosts.push(j);
                }
            }
            if hosts.len() != 1 {
                degree3 = false;
            }
            if let Some(&j) = hosts.first() {
                landed[j] += 1;
            }
            vertices += 1;
        }
    }
    let mut edges = 0usize;
    let mut loops = 0usize;
    for (k, (arc, _)) in arcs.iter().enumerate() {
        if arc.is_full_circle() {
            if landed[k] == 0 {
                // a vertex-free closed loop; see the Euler convention below
                loops += 1;
                edges += 1;
            } else {
                edges += landed[k];
            }
        } else {
            edges += landed[k] + 1;
        }
    }
    let faces = tess.cell_count();
    // loop convention: a vertex-free closed loop counts as one edge with a
    // virtual basepoint, so each loop contributes +1 to the characteristic
    let euler = vertices as i64 - edges as i64 + faces as i64 + loops as i64;
    Ok(ArrangementAudit {
        vertices,
        edges,
        faces,
        euler,
        all_endpoints_degree3: degree3,
    })
}

/// Event-log CSV export: one record per split.
pub fn events_to_csv(tess: &SplittingTessellation) -> String {
    let mut out = String::new();
    out.push_str(&crate::csv_schema_header("events"));
    out.push('\n');
    out.push_str("time,parent_id,child_id_a,child_id_b,normal_coords,piece_measure\n");
    for ev in &tess.events {
        let coords = ev
            .hypersphere
            .normal()
            .coords()
            .iter()
            .map(|c| format!("{c}"))
            .collect::<Vec<_>>()
            .join(";");
        let measure = ev
            .piece
            .measure_exact()
            .map(|m| format!("{m}"))
            .unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            ev.time, ev.parent_id, ev.child_ids.0, ev.child_ids.1, coords, measure
        ));
    }
    out
}

/// Tessellation snapshot as JSON: cells with their bounding normals and
/// (d = 2) vertex cycles.
pub fn snapshot_json(tess: &SplittingTessellation, model: &str) -> serde_json::Value {
    let cells: Vec<serde_json::Value> = tess
        .cells
        .iter()
        .map(|(id, shape)| {
            let normals: Vec<Vec<f64>> = shape
                .inward_normals()
                .iter()
                .map(|n| n.coords().to_vec())
                .collect();
            let vertices: Vec<Vec<f64>> = shape
                .as_cell2()
                .map(|c| c.vertices().iter().map(|v| v.coords().to_vec()).collect())
                .unwrap_or_default();
            serde_json::json!({
                "id": id,
                "normals": normals,
                "vertices": vertices,
            })
        })
        .collect();
    serde_json::json!({
        "schema": "snapshot",
        "version": env!("CARGO_PKG_VERSION"),
        "model": model,
        "dim": tess.dim,
        "t": tess.t_end,
        "seed": tess.seed,
        "cell_count": tess.cell_count(),
        "event_count": tess.events.len(),
        "rejected_count": tess.rejected_count,
        "cells": cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn uniform2() -> DirectionDistribution {
        DirectionDistribution::uniform(2)
    }

    #[test]
    fn zero_time_returns_initial() {
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let y = simulate(2, &uniform2(), 0.0, &mut rng, None, 1).unwrap();
        assert_eq!(y.cell_count(), 1);
        assert!(y.events.is_empty());
        assert_eq!(y.union_measure().unwrap(), 0.0);
        assert!(simulate(2, &uniform2(), -1.0, &mut rng, None, 1).is_err());
    }

    #[test]
    fn cell_count_matches_event_count() {
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let y = simulate(2, &uniform2(), 3.0, &mut rng, None, 2).unwrap();
        assert_eq!(y.cell_count(), y.events.len() + 1);
        for w in y.events.windows(2) {
            assert!(w[0].time < w[1].time);
        }
    }

    #[test]
    fn partition_invariant_d2() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        for seed in 0..20u64 {
            let y = simulate(2, &uniform2(), 2.5, &mut rng, None, seed).unwrap();
            let total: f64 = y
                .cells
                .iter()
                .map(|(_, c)| c.as_cell2().unwrap().area())
                .sum();
            assert!(
                (total - 4.0 * std::f64::consts::PI).abs() < 1e-8,
                "partition area {total}"
            );
        }
    }

    #[test]
    fn one_event_union_measure() {
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        loop {
            let y = simulate(2, &uniform2(), 0.3, &mut rng, None, 4).unwrap();
            if y.events.len() == 1 {
                let m = y.union_measure().unwrap();
                assert!((m - 2.0 * std::f64::consts::PI).abs() < 1e-12);
                break;
            }
        }
        loop {
            let y = simulate(3, &DirectionDistribution::uniform(3), 0.3, &mut rng, None, 4)
                .unwrap();
            if y.events.len() == 1 {
                let m = y.union_measure().unwrap();
                assert!((m - 4.0 * std::f64::consts::PI).abs() < 1e-10);
                break;
            }
        }
    }

    #[test]
    fn sigma_d_is_one() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let y = simulate(2, &uniform2(), 2.0, &mut rng, None, 5).unwrap();
        assert!((y.sigma_j(2).unwrap() - 1.0).abs() < 1e-9);
        let y0 = simulate(2, &uniform2(), 0.0, &mut rng, None, 5).unwrap();
        // V_j of the whole sphere vanishes below the top degree
        assert_eq!(y0.sigma_j(0).unwrap(), 0.0);
        assert_eq!(y0.sigma_j(1).unwrap(), 0.0);
    }

    #[test]
    fn reproducibility_same_seed_same_log() {
        let kappa = uniform2();
        let mut rng1 = ChaCha12Rng::seed_from_u64(99);
        let mut rng2 = ChaCha12Rng::seed_from_u64(99);
        let y1 = simulate(2, &kappa, 2.0, &mut rng1, None, 99).unwrap();
        let y2 = simulate(2, &kappa, 2.0, &mut rng2, None, 99).unwrap();
        assert_eq!(events_to_csv(&y1), events_to_csv(&y2));
    }

    #[test]
    fn arrangement_audit_small_runs() {
        let mut rng = ChaCha12Rng::seed_from_u64(6);
        let mut seen_multi = false;
        for _ in 0..30 {
            let y = simulate(2, &uniform2(), 2.0, &mut rng, None, 6).unwrap();
            if y.events.is_empty() {
                continue;
            }
            let audit = arrangement_graph_2d(&y).unwrap();
            let n = y.events.len();
            assert_eq!(audit.faces, n + 1);
            assert_eq!(audit.vertices, 2 * (n - 1));
            assert_eq!(audit.euler, 2, "euler failed with {n} events: {audit:?}");
            assert!(audit.all_endpoints_degree3);
            if n >= 3 {
                seen_multi = true;
            }
        }
        assert!(seen_multi, "never saw a multi-event run");
    }

    #[test]
    fn capacity_indicator_basics() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let y = simulate(2, &uniform2(), 2.0, &mut rng, None, 7).unwrap();
        // an antipodal point pair lies on no inserted arc almost surely
        let x = crate::sphgeo::sample_uniform_sphere(2, &mut rng);
        let pair = [CompactSet::Point(x.clone()), CompactSet::Point(x.neg())];
        assert!(y.avoids(&pair).unwrap());
    }

    #[test]
    fn twin_constructions_share_first_split_law() {
        // both simulators: time of first event is Exp(1)
        let kappa = uniform2();
        let n = 3000;
        let mut rng = ChaCha12Rng::seed_from_u64(8);
        let mut mean_a = 0.0;
        let mut mean_b = 0.0;
        let mut count_a = 0;
        let mut count_b = 0;
        for _ in 0..n {
            let y = simulate(2, &kappa, 6.0, &mut rng, None, 8).unwrap();
            if let Some(ev) = y.events.first() {
                mean_a += ev.time;
                count_a += 1;
            }
            let y = simulate_direct_2d(&kappa, 6.0, &mut rng, 8).unwrap();
            if let Some(ev) = y.events.first() {
                mean_b += ev.time;
                count_b += 1;
            }
        }
        let ma = mean_a / count_a as f64;
        let mb = mean_b / count_b as f64;
        // Exp(1) truncated at 6 has mean ~ 0.985; allow monte carlo slack
        assert!((ma - 1.0).abs() < 0.08, "{ma}");
        assert!((mb - 1.0).abs() < 0.08, "{mb}");
    }

    #[test]
    fn thinning_acceptance_slope_is_one() {
        // the acceptance probability of a candidate equals the picked cell's
        // hitting measure: regressing the acceptance indicator on the
        // measure through the origin gives slope one
        let mut rng = ChaCha12Rng::seed_from_u64(10);
        let kappa = uniform2();
        let mut sxy = 0.0f64;
        let mut sxx = 0.0f64;
        let mut pairs = Vec::new();
        for _ in 0..60 {
            let y = simulate(2, &kappa, 2.5, &mut rng, None, 10).unwrap();
            for (_, cell) in &y.cells {
                let c2 = cell.as_cell2().unwrap();
                let m = hitting_measure_isotropic(c2);
                for _ in 0..20 {
                    let u = crate::sphgeo::sample_uniform_sphere(2, &mut rng);
                    let a = matches!(c2.hits_interior(&u, EPS_INNER), Ok(true));
                    let a = if a { 1.0 } else { 0.0 };
                    sxy += a * m;
                    sxx += m * m;
                    pairs.push((m, a));
                }
            }
        }
        let slope = sxy / sxx;
        // var(slope) = sum m^2 var(a|m) / sxx^2 with var(a|m) = m(1-m)
        let var: f64 = pairs.iter().map(|(m, _)| m * m * m * (1.0 - m)).sum::<f64>()
            / (sxx * sxx);
        let se = var.sqrt();
        assert!((slope - 1.0).abs() < 4.0 * se, "slope {slope} +- {se}");
    }

    #[test]
    fn initial_tessellation_accepted() {
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let e2 = UnitVector::basis(2, 2);
        let initial = vec![
            CellShape::Two(Cell2::hemisphere(e2.clone())),
            CellShape::Two(Cell2::hemisphere(e2.neg())),
        ];
        let y = simulate(2, &uniform2(), 1.0, &mut rng, Some(initial), 9).unwrap();
        assert!(y.cell_count() >= 2);
        let total: f64 = y
            .cells
            .iter()
            .map(|(_, c)| c.as_cell2().unwrap().area())
            .sum();
        assert!((total - 4.0 * std::f64::consts::PI).abs() < 1e-8);
        // invalid partition rejected
        let bad = vec![CellShape::Two(Cell2::hemisphere(e2))];
        assert!(simulate(2, &uniform2(), 1.0, &mut rng, Some(bad), 9).is_err());
    }
}
