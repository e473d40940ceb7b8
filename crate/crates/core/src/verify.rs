//! The verification gate suite: every comparison the library promises is
//! encoded here as a pass/fail gate with its tolerance pinned in code.
//! Monte Carlo gates use 4-standard-error bands unless a distributional test
//! (Kolmogorov-Smirnov or a two-sample z at the 1% level) is called for; the
//! quick scale shrinks the replicate counts, never the tolerances.
//!
//! The suite is shared between `cargo test` (the acceptance integration
//! test) and the CLI `verify` subcommand.

use crate::analytics;
use crate::dirdist::{
    hitting_measure_estimate, separation_measure_estimate, CompactSet, DirectionDistribution,
};
use crate::error::Result;
use crate::estimate::{
    self, mc_capacity, mc_ea_curves, mc_moments, mc_moments_direct, mc_pcf, mc_surface,
    mc_typical_segment, mean_se, two_sample_z, variance_with_se, PcfConfig,
};
use crate::quad::QuadratureConfig;
use crate::special::kolmogorov_critical;
use crate::sphgeo::{
    sample_uniform_sphere, Cell2, GeodesicSegment, GreatHypersphere, UnitVector, EPS_INNER,
};
use crate::splitproc::CellShape;

const PI: f64 = std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scale {
    Quick,
    Full,
}

impl Scale {
    pub fn parse(s: &str) -> Option<Scale> {
        match s {
            "quick" => Some(Scale::Quick),
            "full" => Some(Scale::Full),
            _ => None,
        }
    }

    fn pick(self, quick: usize, full: usize) -> usize {
        match self {
            Scale::Quick => quick,
            Scale::Full => full,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GateResult {
    pub id: &'static str,
    pub description: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyConfig {
    pub scale: Scale,
    pub master_seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            scale: Scale::Quick,
            master_seed: 2026,
        }
    }
}

pub const GATES: &[(&str, &str)] = &[
    ("c01", "first-split time is Exp(1) (KS, 1% level)"),
    ("c02", "mean boundary length at t=3 equals 6 pi (4 SE)"),
    ("c03", "mean curvature sums at t=3: Sigma_0 = 4.5, Sigma_1 = 3 (4 SE)"),
    ("c04", "mean cell count at t=3 matches the Poisson-mixture value (4 SE)"),
    ("c05", "Var H^1(Z_1) = 31.4485 (4 SE); quadrature matches closed form to 1e-8"),
    ("c06", "variance-vs-dimension table reproduced d=2..20; d=3 MC spot check (4 SE)"),
    ("c07", "Var Sigma_0(2), Cov(Sigma_0,Sigma_1)(2) and the recursion engine agree (4 SE)"),
    ("c08", "avoidance probabilities: segment, two arcs, nontrivial initial tessellation"),
    ("c09", "pair correlation at r in {pi/4, pi/2, 3pi/4} (4 SE) with discretization audit"),
    ("c10", "typical maximal segments: count, length, birth-time law (KS 1%)"),
    ("c11", "two-flag integral identity: both estimators agree (4 combined SE)"),
    ("c12", "structural invariants: partition, additivity, Euler, degree-3, exact counts"),
    ("c13", "thinning and direct simulators statistically indistinguishable (1% level)"),
    ("c14", "anisotropic law: mean surface 2 pi t and variance route agreement (4 SE)"),
];

pub fn list_gates() -> Vec<(&'static str, &'static str)> {
    GATES.to_vec()
}

fn gate(id: &'static str, passed: bool, detail: String) -> GateResult {
    let description = GATES
        .iter()
        .find(|(gid, _)| *gid == id)
        .map(|(_, d)| *d)
        .unwrap_or("");
    GateResult {
        id,
        description,
        passed,
        detail,
    }
}

/// Runs all gates, returning one result per acceptance criterion.
pub fn run_all(cfg: &VerifyConfig) -> Result<Vec<GateResult>> {
    let quad = QuadratureConfig::default();
    let uniform = DirectionDistribution::uniform(2);
    let seed = cfg.master_seed;
    let scale = cfg.scale;
    let mut out = Vec::new();

    // shared batch at t = 3 feeding c01..c04
    let n_a = scale.pick(3000, 10_000);
    let batch_a = mc_moments(&uniform, 3.0, n_a, seed ^ 0xa1)?;

    out.push(gate_c01(&batch_a, 3.0));
    out.push(gate_c02(&batch_a, seed));
    out.push(gate_c03(&batch_a, seed));
    out.push(gate_c04(&batch_a, &quad, seed)?);
    out.push(gate_c05(&uniform, scale, seed, &quad)?);
    out.push(gate_c06(&quad, scale, seed)?);
    out.push(gate_c07(&uniform, scale, seed)?);
    out.push(gate_c08(&uniform, scale, seed, &quad)?);
    out.push(gate_c09(&uniform, scale, seed)?);
    out.push(gate_c10(&uniform, scale, seed, &quad)?);
    out.push(gate_c11(scale, seed));
    out.push(gate_c12(scale, seed)?);
    out.push(gate_c13(&uniform, scale, seed)?);
    out.push(gate_c14(scale, seed)?);
    Ok(out)
}

// ---------------------------------------------------------------------------

fn gate_c01(batch: &estimate::MomentSamples, t_max: f64) -> GateResult {
    // first event time is Exp(1); runs without an event by t are censored,
    // so the KS supremum is restricted to [0, t] (a conservative variant of
    // the standard test)
    let n = batch.first_event_time.len() as f64;
    let mut finite: Vec<f64> = batch
        .first_event_time
        .iter()
        .copied()
        .filter(|x| x.is_finite())
        .collect();
    finite.sort_by(f64::total_cmp);
    let cdf = |x: f64| 1.0 - (-x).exp();
    let mut d = 0.0f64;
    for (i, x) in finite.iter().enumerate() {
        let f = cdf(*x);
        d = d.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs());
    }
    d = d.max((finite.len() as f64 / n - cdf(t_max)).abs());
    let stat = n.sqrt() * d;
    let crit = kolmogorov_critical(0.01);
    gate(
        "c01",
        stat <= crit,
        format!("sqrt(n) D = {stat:.4} vs critical {crit:.4} (n = {n})"),
    )
}

fn gate_c02(batch: &estimate::MomentSamples, seed: u64) -> GateResult {
    let (m, se) = mean_se(&batch.surface);
    let want = analytics::expected_surface(2, 3.0);
    let r = estimate::EstimateReport::new("mean_surface", batch.surface.len(), m, se, seed)
        .with_reference(want, 4.0);
    gate(
        "c02",
        r.pass.unwrap_or(false),
        format!("E H^1(Z_3) = {m:.4} +- {se:.4} vs {want:.4} (z = {:+.2})", r.z_score.unwrap()),
    )
}

fn gate_c03(batch: &estimate::MomentSamples, _seed: u64) -> GateResult {
    let (m0, se0) = mean_se(&batch.sigma0);
    let (m1, se1) = mean_se(&batch.sigma1);
    let w0 = analytics::expected_sigma(2, 0, 3.0, crate::special::beta_dim(2)).unwrap();
    let w1 = analytics::expected_sigma(2, 1, 3.0, crate::special::beta_dim(2)).unwrap();
    let z0 = (m0 - w0) / se0;
    let z1 = (m1 - w1) / se1;
    gate(
        "c03",
        z0.abs() <= 4.0 && z1.abs() <= 4.0,
        format!("Sigma_0 = {m0:.4} vs {w0} (z = {z0:+.2}); Sigma_1 = {m1:.4} vs {w1} (z = {z1:+.2})"),
    )
}

fn gate_c04(
    batch: &estimate::MomentSamples,
    _quad: &QuadratureConfig,
    _seed: u64,
) -> Result<GateResult> {
    let (m, se) = mean_se(&batch.cell_count);
    let want = analytics::expected_cell_count(2, 3.0)?;
    let z = (m - want) / se;
    Ok(gate(
        "c04",
        z.abs() <= 4.0,
        format!("E|Y_3| = {m:.4} +- {se:.4} vs {want:.4} (z = {z:+.2})"),
    ))
}

fn gate_c05(
    uniform: &DirectionDistribution,
    scale: Scale,
    seed: u64,
    quad: &QuadratureConfig,
) -> Result<GateResult> {
    let n = scale.pick(6000, 100_000);
    let surfaces = mc_surface(2, uniform, 1.0, n, seed ^ 0xa5)?;
    let (v, vse) = variance_with_se(&surfaces);
    let want = analytics::var_surface_closed_2d(1.0)?;
    let z = (v - want) / vse;
    let mut quad_ok = true;
    let mut worst = 0.0f64;
    for t in [0.5, 1.0, 2.0, 5.0] {
        let a = analytics::var_surface_isotropic(2, t, quad)?;
        let b = analytics::var_surface_closed_2d(t)?;
        worst = worst.max((a - b).abs());
        quad_ok &= (a - b).abs() <= 1e-8;
    }
    Ok(gate(
        "c05",
        z.abs() <= 4.0 && quad_ok,
        format!(
            "Var H^1(Z_1) = {v:.3} +- {vse:.3} vs {want:.4} (z = {z:+.2}); quadrature-vs-closed max diff {worst:.2e}"
        ),
    ))
}

/// The 19 reference variances Var H^{d-1}(Z_1), d = 2..20, recomputed
/// independently at 40-digit precision from both the integral and the series
/// route. Three published entries are misprinted (31.449 double-rounds
/// 31.44849, 1.772 transposes 1.72201, 0.209 truncates 0.20980); the table
/// below carries the verified values.
const VAR_TABLE: [f64; 19] = [
    31.448_491_644_5,
    125.133_444_7,
    308.090_75,
    547.088_689_8,
    758.773_889_8,
    862.902_379_7,
    831.402_784_4,
    694.803_884_2,
    512.613_261_6,
    338.514_941,
    202.311_562_5,
    110.419_483_9,
    55.453_437_08,
    25.789_475_34,
    11.167_768_5,
    4.524_415_363,
    1.722_010_727,
    0.617_987_639_4,
    0.209_802_578_8,
];

fn gate_c06(quad: &QuadratureConfig, scale: Scale, seed: u64) -> Result<GateResult> {
    let mut max_err = 0.0f64;
    for (i, want) in VAR_TABLE.iter().enumerate() {
        let d = i + 2;
        let v = analytics::var_surface_isotropic(d, 1.0, quad)?;
        max_err = max_err.max((v - want).abs() / want.max(1.0));
    }
    let table_ok = max_err <= 1e-6;
    // Monte Carlo spot check on S^3
    let n = scale.pick(6000, 100_000);
    let uniform3 = DirectionDistribution::uniform(3);
    let surfaces = mc_surface(3, &uniform3, 1.0, n, seed ^ 0xa6)?;
    let (v, vse) = variance_with_se(&surfaces);
    let want = VAR_TABLE[1];
    let z = (v - want) / vse;
    Ok(gate(
        "c06",
        table_ok && z.abs() <= 4.0,
        format!(
            "19 table values max rel err {max_err:.2e}; d=3 MC Var = {v:.2} +- {vse:.2} vs {want:.3} (z = {z:+.2})"
        ),
    ))
}

fn gate_c07(
    uniform: &DirectionDistribution,
    scale: Scale,
    seed: u64,
) -> Result<GateResult> {
    let t = 2.0;
    let n = scale.pick(12_000, 100_000);
    let batch = mc_moments(uniform, t, n, seed ^ 0xa7)?;
    let (v0, v0se) = variance_with_se(&batch.sigma0);
    let want_v0 = analytics::var_sigma0_2d(t)?;
    let z_v0 = (v0 - want_v0) / v0se;
    let (c01, c01se) = estimate::covariance_with_se(&batch.sigma0, &batch.sigma1);
    let want_c = analytics::cov_sigma0_sigma1_2d(t)?;
    let z_c = (c01 - want_c) / c01se;
    // the recursion engine fed with Monte Carlo chord-product curves
    let grid_n = scale.pick(9, 17);
    let grid: Vec<f64> = (0..grid_n).map(|i| t * i as f64 / (grid_n - 1) as f64).collect();
    let n_curve = scale.pick(400, 2500);
    let curves = mc_ea_curves(
        uniform,
        &grid,
        &[(0, 0), (0, 1), (1, 0), (1, 1)],
        n_curve,
        48,
        seed ^ 0xa77,
    )?;
    let (engine, engine_se) = analytics::covariance_recursion_tabulated(2, 1, 1, t, &curves)?;
    let z_e = (engine - want_v0) / engine_se;
    Ok(gate(
        "c07",
        z_v0.abs() <= 4.0 && z_c.abs() <= 4.0 && z_e.abs() <= 4.0,
        format!(
            "Var Sigma_0 = {v0:.4} vs {want_v0:.4} (z = {z_v0:+.2}); Cov = {c01:.4} vs {want_c:.4} (z = {z_c:+.2}); engine = {engine:.4} +- {engine_se:.4} (z = {z_e:+.2})"
        ),
    ))
}

fn quarter_segment() -> GeodesicSegment {
    // length pi/2 along the great circle through the pole e2 and the
    // mid-direction of the {x > 0, y > 0} wedge; the whole segment stays
    // strictly inside that wedge, which is one cell of the 4-cell initial
    // tessellation used in the nontrivial-start check
    let s = 0.5f64;
    let c = std::f64::consts::FRAC_1_SQRT_2;
    let a = UnitVector::from_slice(&[s, s, c]).unwrap();
    let b = UnitVector::from_slice(&[s, s, -c]).unwrap();
    GeodesicSegment::new(a, b).unwrap()
}

fn gate_c08(
    uniform: &DirectionDistribution,
    scale: Scale,
    seed: u64,
    quad: &QuadratureConfig,
) -> Result<GateResult> {
    let _ = quad;
    // (a) a segment of length pi/2 at t = 3: avoidance e^{-1.5}
    let seg = quarter_segment();
    let n = scale.pick(10_000, 100_000);
    let sets = [CompactSet::Segment(seg.clone())];
    let (p, pse) = mc_capacity(2, uniform, 3.0, &sets, n, seed ^ 0xa8, None)?;
    let want = analytics::capacity_connected(seg.length / PI, 3.0);
    let z_a = (p - want) / pse;

    // (b) two disjoint arcs at t = 2 vs the two-component closed form with
    // Monte Carlo measures
    let arc1 = GeodesicSegment::new(
        UnitVector::from_slice(&[0.95, 0.05, 0.35]).unwrap(),
        UnitVector::from_slice(&[0.8, 0.35, 0.5]).unwrap(),
    )
    .unwrap();
    let arc2 = GeodesicSegment::new(
        UnitVector::from_slice(&[0.75, -0.3, 0.55]).unwrap(),
        UnitVector::from_slice(&[0.9, -0.25, 0.3]).unwrap(),
    )
    .unwrap();
    let b1 = [CompactSet::Segment(arc1.clone())];
    let b2 = [CompactSet::Segment(arc2.clone())];
    let n_meas = scale.pick(200_000, 400_000);
    let mut rng = estimate::replicate_rng(seed ^ 0xa88, 0);
    let k1 = arc1.length / PI;
    let k2 = arc2.length / PI;
    let all: Vec<CompactSet> = b1.iter().chain(b2.iter()).cloned().collect();
    let hull = crate::dirdist::convex_hull_set(&all)?;
    let (k_hull, k_hull_se) = hitting_measure_estimate(uniform, &[hull], n_meas, &mut rng);
    let (k_sep, k_sep_se) = separation_measure_estimate(uniform, &b1, &b2, n_meas, &mut rng)?;
    let t2 = 2.0;
    let formula = analytics::capacity_two_components(k1, k2, k_hull, k_sep, t2);
    // delta-method error from the two estimated measures
    let dh = 1e-5;
    let grad_hull = (analytics::capacity_two_components(k1, k2, k_hull + dh, k_sep, t2)
        - analytics::capacity_two_components(k1, k2, k_hull - dh, k_sep, t2))
        / (2.0 * dh);
    let grad_sep = (analytics::capacity_two_components(k1, k2, k_hull, k_sep + dh, t2)
        - analytics::capacity_two_components(k1, k2, k_hull, k_sep - dh, t2))
        / (2.0 * dh);
    let formula_se =
        ((grad_hull * k_hull_se).powi(2) + (grad_sep * k_sep_se).powi(2)).sqrt();
    let n_two = scale.pick(6000, 30_000);
    let both = [CompactSet::Segment(arc1), CompactSet::Segment(arc2)];
    let (p2, p2se) = mc_capacity(2, uniform, t2, &both, n_two, seed ^ 0xa89, None)?;
    let z_b = (p2 - formula) / (p2se * p2se + formula_se * formula_se).sqrt();

    // (c) the first avoidance probability is unchanged under a nontrivial
    // initial tessellation keeping the segment inside one cell
    let circles = [
        GreatHypersphere::new(UnitVector::basis(2, 0)),
        GreatHypersphere::new(UnitVector::basis(2, 1)),
    ];
    let initial: Vec<CellShape> = crate::poissontess::tessellation_from_circles(&circles)?
        .into_iter()
        .map(CellShape::Two)
        .collect();
    // the segment must sit strictly inside one initial cell
    let host = initial
        .iter()
        .filter_map(|c| c.as_cell2())
        .find(|c| c.contains(&seg.a, -1e-9));
    debug_assert!(host.is_some_and(|c| c.contains(&seg.b, -1e-9)));
    let n_c = scale.pick(6000, 30_000);
    let (p3, p3se) = mc_capacity(2, uniform, 3.0, &sets, n_c, seed ^ 0xa8a, Some(initial))?;
    let z_c1 = (p3 - want) / p3se;
    let z_c2 = (p3 - p) / (p3se * p3se + pse * pse).sqrt();

    Ok(gate(
        "c08",
        z_a.abs() <= 4.0 && z_b.abs() <= 4.0 && z_c1.abs() <= 4.0 && z_c2.abs() <= 4.0,
        format!(
            "segment: {p:.4} vs {want:.4} (z = {z_a:+.2}); two arcs: {p2:.4} vs {formula:.4} (z = {z_b:+.2}); nontrivial start: {p3:.4} (z vs formula {z_c1:+.2}, z vs default {z_c2:+.2})"
        ),
    ))
}

fn gate_c09(
    uniform: &DirectionDistribution,
    scale: Scale,
    seed: u64,
) -> Result<GateResult> {
    let t = 2.0;
    let r_values = vec![PI / 4.0, PI / 2.0, 3.0 * PI / 4.0];
    let n = scale.pick(150, 1200);
    let cfg = PcfConfig::new(t, n, r_values.clone(), seed ^ 0xa9);
    let split_est = mc_pcf(&cfg, uniform, false)?;
    let quad = QuadratureConfig::default();
    let mut ok = true;
    let mut details = Vec::new();
    for (k, &r) in r_values.iter().enumerate() {
        let want = analytics::pcf_split(2, t, r)?;
        let (g, gse) = split_est.g[k];
        let z = (g - want) / gse;
        ok &= z.abs() <= 4.0;
        details.push(format!("g({r:.2}) = {g:.3} vs {want:.3} (z = {z:+.2})"));
        // the empirical K-function against its quadrature form
        let want_k = analytics::k_function_split(2, t, r, &quad)?;
        let (kv, kse) = split_est.k[k];
        let zk = (kv - want_k) / kse;
        ok &= zk.abs() <= 4.0;
        details.push(format!("K({r:.2}) z = {zk:+.2}"));
    }
    // discretization audit with common random numbers: halving the node
    // spacing must move the estimates by less than 1%
    let n_audit = scale.pick(80, 400);
    let coarse_cfg = PcfConfig::new(t, n_audit, r_values.clone(), seed ^ 0xa9);
    let mut fine_cfg = coarse_cfg.clone();
    fine_cfg.delta = coarse_cfg.delta / 2.0;
    let coarse = mc_pcf(&coarse_cfg, uniform, false)?;
    let fine = mc_pcf(&fine_cfg, uniform, false)?;
    let mut audit_shift = 0.0f64;
    for k in 0..r_values.len() {
        audit_shift = audit_shift.max((coarse.g[k].0 - fine.g[k].0).abs() / fine.g[k].0.abs());
    }
    ok &= audit_shift <= 0.01;
    // Poisson counterpart: matches its closed form and dominates pointwise
    let poisson_cfg = PcfConfig::new(t, n, r_values.clone(), seed ^ 0xa91);
    let poisson_est = mc_pcf(&poisson_cfg, uniform, true)?;
    for (k, &r) in r_values.iter().enumerate() {
        let want = analytics::pcf_poisson(2, t, r)?;
        let (g, gse) = poisson_est.g[k];
        let z = (g - want) / gse;
        ok &= z.abs() <= 4.0;
        let (gs, gsse) = split_est.g[k];
        // dominance within noise
        ok &= g + 4.0 * (gse * gse + gsse * gsse).sqrt() >= gs;
        // closed-form dominance
        ok &= analytics::pcf_poisson(2, t, r)? >= analytics::pcf_split(2, t, r)?;
        details.push(format!("poisson g({r:.2}) = {g:.3} vs {want:.3} (z = {z:+.2})"));
    }
    details.push(format!("audit shift {:.3}%", 100.0 * audit_shift));
    Ok(gate("c09", ok, details.join("; ")))
}

fn gate_c10(
    uniform: &DirectionDistribution,
    scale: Scale,
    seed: u64,
    quad: &QuadratureConfig,
) -> Result<GateResult> {
    let t = 3.0;
    let n = scale.pick(3000, 10_000);
    let est = mc_typical_segment(uniform, t, n, seed ^ 0xaa, 0.01)?;
    let want_count = analytics::n1_split(2, t)?;
    let z_count = (est.mean_count.0 - want_count) / est.mean_count.1;
    let want_len = analytics::mean_segment_length_split(2, t)?;
    let z_len = (est.mean_length.0 - want_len) / est.mean_length.1;
    // the mixture identity: N_1(t) = (d-1) 2^{d-2} int_0^t N1bar(s)/s ds
    let coeff = 1.0;
    let integral = crate::quad::integrate(
        |s| {
            if s == 0.0 {
                1.0
            } else {
                analytics::n1_poisson(2, s).unwrap() / s
            }
        },
        0.0,
        t,
        quad,
    )?;
    let identity_err = (want_count - coeff * integral.value).abs();
    Ok(gate(
        "c10",
        z_count.abs() <= 4.0 && z_len.abs() <= 4.0 && est.ks_pass && identity_err <= 1e-10,
        format!(
            "count {:.3} vs {want_count:.4} (z = {z_count:+.2}); length {:.4} vs {want_len:.4} (z = {z_len:+.2}); birth KS sqrt(n)D = {:.3} vs {:.3}; mixture identity err {identity_err:.1e}",
            est.mean_count.0, est.mean_length.0, est.ks_statistic, est.ks_critical
        ),
    ))
}

fn gate_c11(scale: Scale, seed: u64) -> GateResult {
    let n = scale.pick(100_000, 1_000_000);
    let mut ok = true;
    let mut details = Vec::new();
    for d in [2usize, 3] {
        for (name, g) in [
            ("indicator", 0usize),
            ("constant", 1usize),
        ] {
            let func = move |_x: &UnitVector, _y: &UnitVector, l: f64| -> f64 {
                if g == 0 {
                    if l <= PI / 2.0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    1.0
                }
            };
            let ((lhs, lse), (rhs, rse)) =
                estimate::mc_bp_identity(d, func, n, seed ^ 0xab ^ (d as u64) << 8);
            let z = (lhs - rhs) / (lse * lse + rse * rse).sqrt().max(1e-300);
            ok &= z.abs() <= 4.0;
            details.push(format!("d={d} {name}: {lhs:.2} vs {rhs:.2} (z = {z:+.2})"));
        }
    }
    gate("c11", ok, details.join("; "))
}

fn gate_c12(scale: Scale, seed: u64) -> Result<GateResult> {
    let uniform = DirectionDistribution::uniform(2);
    let mut ok = true;
    let mut worst_add = 0.0f64;
    let mut worst_part = 0.0f64;
    // per-split additivity and the partition along a manual splitting chain
    // (the same kernel calls the simulator makes)
    let chains = scale.pick(40, 200);
    for c in 0..chains {
        let mut rng = estimate::replicate_rng(seed ^ 0xac, c as u64);
        let mut cells = vec![Cell2::whole_sphere()];
        for _ in 0..25 {
            let idx = (c + cells.len()) % cells.len();
            let u = sample_uniform_sphere(2, &mut rng);
            let cell = cells[idx].clone();
            match cell.hits_interior(&u, EPS_INNER) {
                Ok(true) => {}
                _ => continue,
            }
            let (plus, minus, piece) = cell.split(&u, EPS_INNER)?;
            let add = (plus.area() + minus.area() - cell.area()).abs();
            let per = (plus.perimeter() + minus.perimeter()
                - cell.perimeter()
                - 2.0 * piece.length())
            .abs();
            worst_add = worst_add.max(add).max(per);
            ok &= add <= 1e-9 && per <= 1e-9;
            cells.swap_remove(idx);
            cells.push(plus);
            cells.push(minus);
        }
        let total: f64 = cells.iter().map(|c| c.area()).sum();
        worst_part = worst_part.max((total - 4.0 * PI).abs());
        ok &= (total - 4.0 * PI).abs() <= 1e-8;
    }
    // Euler characteristic and T-junction structure of simulated arrangements
    let audits = scale.pick(30, 150);
    let mut audited = 0usize;
    for c in 0..audits {
        let mut rng = estimate::replicate_rng(seed ^ 0xac1, c as u64);
        let y = crate::splitproc::simulate(2, &uniform, 2.5, &mut rng, None, c as u64)?;
        if y.events.len() < 2 {
            continue;
        }
        let audit = crate::splitproc::arrangement_graph_2d(&y)?;
        ok &= audit.euler == 2
            && audit.all_endpoints_degree3
            && audit.vertices == 2 * (y.events.len() - 1)
            && audit.faces == y.events.len() + 1;
        audited += 1;
    }
    // Poisson arrangements match the closed-form counts exactly
    let draws = scale.pick(25, 120);
    for c in 0..draws {
        let mut rng = estimate::replicate_rng(seed ^ 0xac2, c as u64);
        let p = crate::poissontess::sample(2, &uniform, 3.0, &mut rng, c as u64)?;
        let arr = crate::poissontess::arrangement_2d(&p)?;
        let n = p.normals.len() as u64;
        ok &= arr.cells.len() as u64 == crate::poissontess::face_counts(n, 2, 2)?;
        if n >= 1 {
            let total = arr.total_edge_length();
            ok &= (total - 2.0 * PI * n as f64).abs() <= 1e-8;
        }
        let area: f64 = arr.cells.iter().map(|c| c.area()).sum();
        ok &= (area - 4.0 * PI).abs() <= 1e-8;
    }
    Ok(gate(
        "c12",
        ok,
        format!(
            "worst additivity residual {worst_add:.2e} (tol 1e-9); worst partition residual {worst_part:.2e} (tol 1e-8); {audited} arrangements audited"
        ),
    ))
}

fn gate_c13(
    uniform: &DirectionDistribution,
    scale: Scale,
    seed: u64,
) -> Result<GateResult> {
    let t = 2.0;
    let n = scale.pick(4000, 10_000);
    let a = mc_moments(uniform, t, n, seed ^ 0xad)?;
    let b = mc_moments_direct(uniform, t, n, seed ^ 0xad1)?;
    let z_count = two_sample_z(&a.cell_count, &b.cell_count);
    let z_len = two_sample_z(&a.surface, &b.surface);
    let z_s0 = two_sample_z(&a.sigma0, &b.sigma0);
    let crit = 2.576; // 1% two-sided
    Ok(gate(
        "c13",
        z_count.abs() <= crit && z_len.abs() <= crit && z_s0.abs() <= crit,
        format!("z(cell count) = {z_count:+.2}, z(total length) = {z_len:+.2}, z(Sigma_0) = {z_s0:+.2} (1% critical 2.58)"),
    ))
}

fn gate_c14(scale: Scale, seed: u64) -> Result<GateResult> {
    let t = 2.0;
    let axial = DirectionDistribution::axial(UnitVector::basis(2, 2), 4.0)?;
    // mean surface: t beta_1 kappa_bar(1) = 2 pi t for any probability law
    let n = scale.pick(3000, 20_000);
    let rows: Vec<Result<f64>> = estimate::run_replicated(n, seed ^ 0xae, |i, rng| {
        let y = crate::splitproc::simulate(2, &axial, t, rng, None, i)?;
        y.union_measure()
    });
    let surfaces: Vec<f64> = rows.into_iter().collect::<Result<_>>()?;
    let (m, se) = mean_se(&surfaces);
    let want = analytics::expected_surface(2, t);
    let z_mean = (m - want) / se;
    // variance: the general triple-integral route vs the replicate variance
    let (v_emp, v_emp_se) = variance_with_se(&surfaces);
    let n_outer = scale.pick(8000, 60_000);
    let n_inner = scale.pick(600, 1500);
    let (v_mc, v_mc_se) =
        estimate::var_surface_general_mc(&axial, t, n_outer, n_inner, seed ^ 0xae1)?;
    let z_var = (v_emp - v_mc) / (v_emp_se * v_emp_se + v_mc_se * v_mc_se).sqrt();
    Ok(gate(
        "c14",
        z_mean.abs() <= 4.0 && z_var.abs() <= 4.0,
        format!(
            "E H^1 = {m:.4} vs {want:.4} (z = {z_mean:+.2}); Var via formula {v_mc:.2} vs empirical {v_emp:.2} (z = {z_var:+.2})"
        ),
    ))
}
