//! Monte Carlo estimators over simulated tessellations and the statistical
//! comparison harness against the closed-form references.
//!
//! Replicates run in parallel over independent counter-derived rng streams
//! (one ChaCha stream per replicate index off the master seed), results are
//! collected in replicate order and reduced by pairwise summation, so a
//! report depends only on (master seed, parameters) and never on thread
//! scheduling.

use crate::analytics::TabulatedCurve;
use crate::dirdist::{hitting_measure_isotropic, kappa_two_point, CompactSet, DirectionDistribution};
use crate::error::{Result, SphereSplitError};
use crate::special::{kolmogorov_critical, normal_two_sided_quantile};
use crate::sphgeo::{
    geodesic_distance, sample_uniform_on_subsphere, sample_uniform_sphere, UnitVector,
    EPS_INNER,
};
use crate::splitproc::{simulate, CellShape, SplittingTessellation};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use std::collections::BTreeMap;

// ---------------------------------------------------------------------------
// replication and reduction

/// Independent generator for replicate `index` under `master_seed`.
pub fn replicate_rng(master_seed: u64, index: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// Runs `n` replicates in parallel, collecting results in replicate order.
pub fn run_replicated<T, F>(n: usize, master_seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &mut ChaCha12Rng) -> T + Sync,
{
    (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = replicate_rng(master_seed, i);
            f(i, &mut rng)
        })
        .collect()
}

/// Pairwise (cascade) summation.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}

// ---------------------------------------------------------------------------
// statistics

pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = pairwise_sum(xs) / n;
    let sq: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
    let var = pairwise_sum(&sq) / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Batch-means standard error of the mean: replicates are grouped into
/// ~sqrt(n) consecutive batches and the batch means are treated as the
/// sample.
pub fn batch_means_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    let b = (n as f64).sqrt().floor() as usize;
    if b < 2 {
        return mean_se(xs);
    }
    let per = n / b;
    let mut batch_means = Vec::with_capacity(b);
    for k in 0..b {
        let lo = k * per;
        let hi = if k == b - 1 { n } else { (k + 1) * per };
        let chunk = &xs[lo..hi];
        batch_means.push(pairwise_sum(chunk) / chunk.len() as f64);
    }
    let (m, _) = mean_se(xs);
    let sq: Vec<f64> = batch_means.iter().map(|x| (x - m) * (x - m)).collect();
    let var_bm = pairwise_sum(&sq) / (b as f64 - 1.0);
    (m, (var_bm / b as f64).sqrt())
}

/// Sample variance with the fourth-central-moment standard error
/// sqrt((m4 - s^4 (n-3)/(n-1)) / n).
pub fn variance_with_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let (mean, _) = mean_se(xs);
    let m2: Vec<f64> = xs.iter().map(|x| (x - mean).powi(2)).collect();
    let m4: Vec<f64> = xs.iter().map(|x| (x - mean).powi(4)).collect();
    let s2 = pairwise_sum(&m2) / (n - 1.0);
    let mu4 = pairwise_sum(&m4) / n;
    let var_of_var = (mu4 - s2 * s2 * (n - 3.0) / (n - 1.0)) / n;
    (s2, var_of_var.max(0.0).sqrt())
}

/// Sample covariance with its asymptotic standard error
/// sqrt((m22 - s_xy^2) / n).
pub fn covariance_with_se(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let (mx, _) = mean_se(xs);
    let (my, _) = mean_se(ys);
    let prod: Vec<f64> = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).collect();
    let s_xy = pairwise_sum(&prod) / (n - 1.0);
    let m22: Vec<f64> = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| ((x - mx) * (y - my) - s_xy).powi(2))
        .collect();
    let var_of_cov = pairwise_sum(&m22) / n / n;
    (s_xy, var_of_cov.max(0.0).sqrt())
}

/// Wilson-style binomial point estimate and standard error.
pub fn binomial_se(successes: usize, n: usize) -> (f64, f64) {
    let p = successes as f64 / n as f64;
    // Wilson midpoint stabilizes the zero-count corner
    let z = 1.96f64;
    let n_f = n as f64;
    let center = (p + z * z / (2.0 * n_f)) / (1.0 + z * z / n_f);
    let se = ((center * (1.0 - center)) / n_f).sqrt();
    (p, se.max((p * (1.0 - p) / n_f).sqrt()))
}

/// Two-sided Kolmogorov-Smirnov test of the samples against a CDF.
pub fn ks_test<F: Fn(f64) -> f64>(samples: &mut [f64], cdf: F, alpha: f64) -> (f64, f64, bool) {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    let mut d = 0.0f64;
    for (i, x) in samples.iter().enumerate() {
        let f = cdf(*x);
        let lo = i as f64 / n;
        let hi = (i + 1) as f64 / n;
        d = d.max((f - lo).abs()).max((hi - f).abs());
    }
    let stat = n.sqrt() * d;
    let crit = kolmogorov_critical(alpha);
    (stat, crit, stat <= crit)
}

/// Welch two-sample z statistic for equality of means.
pub fn two_sample_z(xs: &[f64], ys: &[f64]) -> f64 {
    let (mx, sx) = mean_se(xs);
    let (my, sy) = mean_se(ys);
    (mx - my) / (sx * sx + sy * sy).sqrt().max(1e-300)
}

// ---------------------------------------------------------------------------
// reports

/// Threshold in standard errors for a comparison gate; suites running more
/// than 20 simultaneous gates widen it Bonferroni-style so the familywise
/// false-alarm rate matches the 20-gate baseline.
pub fn gate_threshold(base_se: f64, gates: usize) -> f64 {
    if gates <= 20 {
        return base_se;
    }
    let base_alpha = 2.0 * crate::special::normal_tail(base_se);
    normal_two_sided_quantile(base_alpha * 20.0 / gates as f64)
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct EstimateReport {
    pub name: String,
    pub n_replicates: usize,
    pub point_estimate: f64,
    pub std_error: f64,
    pub ci95: (f64, f64),
    pub analytic_reference: Option<f64>,
    pub z_score: Option<f64>,
    pub pass: Option<bool>,
    pub threshold: f64,
    pub seed: u64,
    /// Wall-clock metadata only; excluded from CSV to keep outputs
    /// byte-reproducible.
    pub wall_time_ms: u128,
}

impl EstimateReport {
    pub fn new(name: &str, n: usize, estimate: f64, se: f64, seed: u64) -> Self {
        EstimateReport {
            name: name.to_string(),
            n_replicates: n,
            point_estimate: estimate,
            std_error: se,
            ci95: (estimate - 1.96 * se, estimate + 1.96 * se),
            analytic_reference: None,
            z_score: None,
            pass: None,
            threshold: 4.0,
            seed,
            wall_time_ms: 0,
        }
    }

    /// Attaches the analytic reference: the gate passes when the estimate is
    /// within `threshold` standard errors of it.
    pub fn with_reference(mut self, reference: f64, threshold: f64) -> Self {
        let z = (self.point_estimate - reference) / self.std_error.max(1e-300);
        self.analytic_reference = Some(reference);
        self.z_score = Some(z);
        self.threshold = threshold;
        self.pass = Some(z.abs() <= threshold);
        self
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.name,
            self.n_replicates,
            self.point_estimate,
            self.std_error,
            self.analytic_reference.map(|v| v.to_string()).unwrap_or_default(),
            self.z_score.map(|v| v.to_string()).unwrap_or_default(),
            self.pass.map(|v| v.to_string()).unwrap_or_default(),
            self.threshold,
            self.seed,
        )
    }

    pub fn csv_header() -> &'static str {
        "name,n_replicates,point_estimate,std_error,analytic_reference,z_score,pass,threshold,seed"
    }
}

// ---------------------------------------------------------------------------
// per-replicate functionals of the splitting tessellation

/// Raw per-replicate functionals of d = 2 splitting runs.
#[derive(Clone, Debug, Default)]
pub struct MomentSamples {
    pub cell_count: Vec<f64>,
    pub sigma0: Vec<f64>,
    pub sigma1: Vec<f64>,
    pub surface: Vec<f64>,
    pub first_event_time: Vec<f64>,
}

/// Simulates `n` replicates of the splitting tessellation on S^2 and records
/// the standard functionals. Requires n >= 100 to keep the error estimates
/// meaningful.
pub fn mc_moments(
    kappa: &DirectionDistribution,
    t: f64,
    n: usize,
    master_seed: u64,
) -> Result<MomentSamples> {
    if n < 100 {
        return Err(SphereSplitError::Precondition(format!(
            "n = {n} < 100 replicates"
        )));
    }
    let rows: Vec<Result<[f64; 5]>> = run_replicated(n, master_seed, |i, rng| {
        let y = simulate(2, kappa, t, rng, None, master_seed ^ i)?;
        Ok([
            y.cell_count() as f64,
            y.sigma_j(0)?,
            y.sigma_j(1)?,
            y.union_measure()?,
            y.events.first().map(|e| e.time).unwrap_or(f64::INFINITY),
        ])
    });
    let mut out = MomentSamples::default();
    for row in rows {
        let r = row?;
        out.cell_count.push(r[0]);
        out.sigma0.push(r[1]);
        out.sigma1.push(r[2]);
        out.surface.push(r[3]);
        out.first_event_time.push(r[4]);
    }
    Ok(out)
}

/// Same functionals from the direct competing-exponentials twin.
pub fn mc_moments_direct(
    kappa: &DirectionDistribution,
    t: f64,
    n: usize,
    master_seed: u64,
) -> Result<MomentSamples> {
    if n < 100 {
        return Err(SphereSplitError::Precondition(format!(
            "n = {n} < 100 replicates"
        )));
    }
    let rows: Vec<Result<[f64; 5]>> = run_replicated(n, master_seed, |i, rng| {
        let y = crate::splitproc::simulate_direct_2d(kappa, t, rng, master_seed ^ i)?;
        Ok([
            y.cell_count() as f64,
            y.sigma_j(0)?,
            y.sigma_j(1)?,
            y.union_measure()?,
            y.events.first().map(|e| e.time).unwrap_or(f64::INFINITY),
        ])
    });
    let mut out = MomentSamples::default();
    for row in rows {
        let r = row?;
        out.cell_count.push(r[0]);
        out.sigma0.push(r[1]);
        out.sigma1.push(r[2]);
        out.surface.push(r[3]);
        out.first_event_time.push(r[4]);
    }
    Ok(out)
}

/// Surface functional H^{d-1}(Z_t) replicated in arbitrary dimension d <= 3.
pub fn mc_surface(
    d: usize,
    kappa: &DirectionDistribution,
    t: f64,
    n: usize,
    master_seed: u64,
) -> Result<Vec<f64>> {
    let rows: Vec<Result<f64>> = run_replicated(n, master_seed, |i, rng| {
        let y = simulate(d, kappa, t, rng, None, master_seed ^ i)?;
        y.union_measure()
    });
    rows.into_iter().collect()
}

// ---------------------------------------------------------------------------
// capacity estimation

/// Frequency of {Z_t misses the test sets} over n replicates.
pub fn mc_capacity(
    d: usize,
    kappa: &DirectionDistribution,
    t: f64,
    sets: &[CompactSet],
    n: usize,
    master_seed: u64,
    initial: Option<Vec<CellShape>>,
) -> Result<(f64, f64)> {
    let rows: Vec<Result<bool>> = run_replicated(n, master_seed, |i, rng| {
        let y = simulate(d, kappa, t, rng, initial.clone(), master_seed ^ i)?;
        y.avoids(sets)
    });
    let mut hits = 0usize;
    for r in rows {
        if r? {
            hits += 1;
        }
    }
    Ok(binomial_se(hits, n))
}

// ---------------------------------------------------------------------------
// pair correlation estimation

#[derive(Clone, Debug)]
pub struct PcfConfig {
    pub t: f64,
    pub n_replicates: usize,
    /// Node spacing along arcs (radians).
    pub delta: f64,
    /// Half-window used for the central difference of the K-function.
    pub half_window: f64,
    pub r_values: Vec<f64>,
    pub master_seed: u64,
}

impl PcfConfig {
    pub fn new(t: f64, n: usize, r_values: Vec<f64>, master_seed: u64) -> Self {
        PcfConfig {
            t,
            n_replicates: n,
            delta: std::f64::consts::PI / 720.0,
            half_window: std::f64::consts::PI / 64.0,
            r_values,
            master_seed,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PcfEstimate {
    pub r_values: Vec<f64>,
    /// Empirical pair-correlation estimates and standard errors per radius.
    pub g: Vec<(f64, f64)>,
    /// Empirical K-function estimates and standard errors per radius.
    pub k: Vec<(f64, f64)>,
}

fn pcf_weights_for_arcs(arcs: &[(crate::sphgeo::Arc2, f64)], delta: f64) -> Vec<([f64; 3], f64)> {
    let mut nodes = Vec::new();
    for (arc, len) in arcs {
        let m = (len / delta).ceil().max(1.0) as usize;
        let w = len / m as f64;
        for j in 0..m {
            let p = arc.point_at((j as f64 + 0.5) * w);
            let c = p.coords();
            nodes.push(([c[0], c[1], c[2]], w));
        }
    }
    nodes
}

/// Per-replicate weighted pair counts below the cos-thresholds (descending
/// in r means ascending in cos; we keep the thresholds as given).
fn pair_mass(nodes: &[([f64; 3], f64)], cos_thresholds: &[f64]) -> Vec<f64> {
    let mut acc = vec![0.0f64; cos_thresholds.len()];
    for i in 0..nodes.len() {
        let (pi, wi) = nodes[i];
        for j in i + 1..nodes.len() {
            let (pj, wj) = nodes[j];
            let dot = pi[0] * pj[0] + pi[1] * pj[1] + pi[2] * pj[2];
            let w = 2.0 * wi * wj; // ordered pairs
            for (k, c) in cos_thresholds.iter().enumerate() {
                if dot >= *c {
                    acc[k] += w;
                }
            }
        }
    }
    acc
}

/// Empirical K and pair-correlation estimates for the d = 2 splitting model
/// (`poisson = false`) or the Poisson model (`poisson = true`), by arc
/// discretization with midpoint weights.
pub fn mc_pcf(cfg: &PcfConfig, kappa: &DirectionDistribution, poisson: bool) -> Result<PcfEstimate> {
    let h = cfg.half_window;
    let mu = crate::analytics::expected_surface(2, cfg.t);
    // thresholds: for each r, the pair masses below r-h, r+h and r
    let mut cos_thresholds = Vec::new();
    for &r in &cfg.r_values {
        if !(r - h > 0.0 && r + h < std::f64::consts::PI) {
            return Err(SphereSplitError::InvalidArgument(format!(
                "radius {r} with window {h} outside (0, pi)"
            )));
        }
        cos_thresholds.push((r - h).cos());
        cos_thresholds.push((r + h).cos());
        cos_thresholds.push(r.cos());
    }
    let rows: Vec<Result<Vec<f64>>> = run_replicated(cfg.n_replicates, cfg.master_seed, |i, rng| {
        let arcs: Vec<(crate::sphgeo::Arc2, f64)> = if poisson {
            let p = crate::poissontess::sample(2, kappa, cfg.t, rng, cfg.master_seed ^ i)?;
            p.normals
                .iter()
                .map(|s| {
                    let arc = crate::sphgeo::Arc2::full_circle(s.normal().clone());
                    let l = arc.length();
                    (arc, l)
                })
                .collect()
        } else {
            let y = simulate(2, kappa, cfg.t, rng, None, cfg.master_seed ^ i)?;
            y.events
                .iter()
                .map(|ev| {
                    let arc = ev.piece.as_arc().expect("d = 2 pieces are arcs").clone();
                    let l = arc.length();
                    (arc, l)
                })
                .collect()
        };
        let nodes = pcf_weights_for_arcs(&arcs, cfg.delta);
        Ok(pair_mass(&nodes, &cos_thresholds))
    });
    let mut per_radius_g: Vec<Vec<f64>> = vec![Vec::new(); cfg.r_values.len()];
    let mut per_radius_k: Vec<Vec<f64>> = vec![Vec::new(); cfg.r_values.len()];
    for row in rows {
        let masses = row?;
        for (k, &r) in cfg.r_values.iter().enumerate() {
            let below_lo = masses[3 * k];
            let below_hi = masses[3 * k + 1];
            let below_r = masses[3 * k + 2];
            // g(r) = beta_2/(beta_1 sin r) K'(r) = 2 K'(r)/sin r on S^2
            let kprime = (below_hi - below_lo) / (2.0 * h) / (mu * mu);
            per_radius_g[k].push(2.0 * kprime / r.sin());
            per_radius_k[k].push(below_r / (mu * mu));
        }
    }
    Ok(PcfEstimate {
        r_values: cfg.r_values.clone(),
        g: per_radius_g.iter().map(|v| mean_se(v)).collect(),
        k: per_radius_k.iter().map(|v| mean_se(v)).collect(),
    })
}

// ---------------------------------------------------------------------------
// typical maximal segments

#[derive(Clone, Debug)]
pub struct TypicalSegmentEstimate {
    pub mean_count: (f64, f64),
    pub mean_length: (f64, f64),
    pub ks_statistic: f64,
    pub ks_critical: f64,
    pub ks_pass: bool,
}

/// Pooled maximal-segment statistics over n replicates at time t on S^2:
/// mean count, mean (typical) length as a ratio estimator with a delta-method
/// standard error, and a Kolmogorov-Smirnov test of the pooled birth times
/// against the closed-form birth density.
pub fn mc_typical_segment(
    kappa: &DirectionDistribution,
    t: f64,
    n: usize,
    master_seed: u64,
    ks_alpha: f64,
) -> Result<TypicalSegmentEstimate> {
    let rows: Vec<Result<(f64, f64, Vec<f64>)>> = run_replicated(n, master_seed, |i, rng| {
        let y = simulate(2, kappa, t, rng, None, master_seed ^ i)?;
        let segs = y.maximal_segments()?;
        let total_len: f64 = segs.iter().map(|s| s.length).sum();
        let births: Vec<f64> = segs.iter().map(|s| s.birth_time).collect();
        Ok((segs.len() as f64, total_len, births))
    });
    let mut counts = Vec::with_capacity(n);
    let mut lengths = Vec::with_capacity(n);
    let mut births = Vec::new();
    for row in rows {
        let (c, l, b) = row?;
        counts.push(c);
        lengths.push(l);
        births.extend(b);
    }
    let mean_count = mean_se(&counts);
    // ratio estimator E[sum of lengths]/E[count] with delta-method SE
    let (ml, _) = mean_se(&lengths);
    let (mc, _) = mean_se(&counts);
    let ratio = ml / mc;
    let n_f = counts.len() as f64;
    let resid: Vec<f64> = lengths
        .iter()
        .zip(&counts)
        .map(|(l, c)| l - ratio * c)
        .collect();
    let (_, se_resid) = mean_se(&resid);
    let ratio_se = se_resid / mc;
    let cdf = |s: f64| crate::analytics::birth_cdf(2, t, s).unwrap_or(f64::NAN);
    let (ks, crit, pass) = ks_test(&mut births, cdf, ks_alpha);
    let _ = n_f;
    Ok(TypicalSegmentEstimate {
        mean_count,
        mean_length: (ratio, ratio_se),
        ks_statistic: ks,
        ks_critical: crit,
        ks_pass: pass,
    })
}

// ---------------------------------------------------------------------------
// chord-product curves (the covariance recursion inputs)

/// Monte Carlo tabulation of s -> E A_{i,j}(s) on a shared grid, for the
/// requested index pairs. For every grid time the tessellation is simulated
/// `n` times; each cell contributes its exact hitting measure times the mean
/// chord functional product over `m` hitting hyperspheres drawn by rejection.
pub fn mc_ea_curves(
    kappa: &DirectionDistribution,
    grid: &[f64],
    pairs: &[(usize, usize)],
    n: usize,
    m_chords: usize,
    master_seed: u64,
) -> Result<BTreeMap<(usize, usize), TabulatedCurve>> {
    if !kappa.is_isotropic() {
        return Err(SphereSplitError::Precondition(
            "chord-product curves assume the isotropic law".into(),
        ));
    }
    let mut curves: BTreeMap<(usize, usize), TabulatedCurve> = pairs
        .iter()
        .map(|&key| {
            (
                key,
                TabulatedCurve {
                    grid: grid.to_vec(),
                    values: Vec::with_capacity(grid.len()),
                    std_errors: Vec::with_capacity(grid.len()),
                },
            )
        })
        .collect();
    for (gi, &s) in grid.iter().enumerate() {
        let rows: Vec<Result<Vec<f64>>> =
            run_replicated(n, master_seed ^ (gi as u64) << 32, |i, rng| {
                let y = simulate(2, kappa, s, rng, None, i)?;
                let mut acc = vec![0.0f64; pairs.len()];
                for (_, cell) in &y.cells {
                    let c2 = cell.as_cell2().expect("d = 2 cells");
                    let hit_measure = hitting_measure_isotropic(c2);
                    let mut prod_means = vec![0.0f64; pairs.len()];
                    let mut draws = 0usize;
                    let mut guard = 0usize;
                    // rejection accepts at rate hit_measure, which can be
                    // small for slim cells; budget accordingly
                    let budget =
                        (50.0 * m_chords as f64 / hit_measure.max(1e-6)) as usize + 10_000;
                    while draws < m_chords {
                        guard += 1;
                        if guard > budget {
                            return Err(SphereSplitError::Degenerate(
                                "chord sampling starved by rejections".into(),
                            ));
                        }
                        let u = kappa.sample_normal(rng);
                        match c2.chord(&u, EPS_INNER) {
                            Ok(Some(chord)) => {
                                let (v0, v1) = chord.intrinsic_volumes();
                                for (k, (i1, j1)) in pairs.iter().enumerate() {
                                    let f = |idx: usize| if idx == 0 { v0 } else { v1 };
                                    prod_means[k] += f(*i1) * f(*j1);
                                }
                                draws += 1;
                            }
                            Ok(None) => continue,
                            Err(_) => continue,
                        }
                    }
                    for k in 0..pairs.len() {
                        acc[k] += hit_measure * prod_means[k] / m_chords as f64;
                    }
                }
                Ok(acc)
            });
        let mut per_pair: Vec<Vec<f64>> = vec![Vec::with_capacity(n); pairs.len()];
        for row in rows {
            let vals = row?;
            for (k, v) in vals.into_iter().enumerate() {
                per_pair[k].push(v);
            }
        }
        for (k, key) in pairs.iter().enumerate() {
            let (m, se) = mean_se(&per_pair[k]);
            let curve = curves.get_mut(key).expect("pre-seeded");
            curve.values.push(m);
            curve.std_errors.push(se);
        }
    }
    Ok(curves)
}

// ---------------------------------------------------------------------------
// integral-geometric identity check

/// Monte Carlo check of the two-flag transformation identity: the left side
/// integrates g over point pairs of a uniform great hypersphere (scale
/// beta_{d-1}^2), the right side over independent uniform point pairs of the
/// sphere weighted by 1/sin of their distance (scale beta_{d-2} beta_d).
pub fn mc_bp_identity<G>(
    d: usize,
    g: G,
    n: usize,
    master_seed: u64,
) -> ((f64, f64), (f64, f64))
where
    G: Fn(&UnitVector, &UnitVector, f64) -> f64 + Sync,
{
    let b = crate::special::beta_dim(d - 1);
    let lhs: Vec<f64> = run_replicated(n, master_seed, |_, rng| {
        let u = sample_uniform_sphere(d, rng);
        let x = sample_uniform_on_subsphere(&u, rng);
        let y = sample_uniform_on_subsphere(&u, rng);
        let l = geodesic_distance(&x, &y);
        b * b * g(&x, &y, l)
    });
    let scale_rhs = crate::special::beta_dim(d - 2) * crate::special::beta_dim(d);
    let rhs: Vec<f64> = run_replicated(n, master_seed ^ 0x9e3779b97f4a7c15, |_, rng| {
        let x = sample_uniform_sphere(d, rng);
        let y = sample_uniform_sphere(d, rng);
        let l = geodesic_distance(&x, &y);
        let s = l.sin();
        if s <= 0.0 {
            0.0
        } else {
            scale_rhs * g(&x, &y, l) / s
        }
    });
    (mean_se(&lhs), mean_se(&rhs))
}

// ---------------------------------------------------------------------------
// variance of the surface measure, general direction distributions

/// Monte Carlo evaluation of the general variance formula for
/// Var H^{d-1}(t; 1): sample S ~ kappa, then x, y uniform on S, average
/// (1 - e^{-kappa(x,y) t}) / kappa(x,y) and scale by beta_{d-1}^2. The
/// two-point measure is exact under the isotropic law and an inner Monte
/// Carlo (n_inner draws) otherwise.
pub fn var_surface_general_mc(
    kappa: &DirectionDistribution,
    t: f64,
    n: usize,
    n_inner: usize,
    master_seed: u64,
) -> Result<(f64, f64)> {
    let d = kappa.dim();
    let b = crate::special::beta_dim(d - 1);
    let rows: Vec<Result<f64>> = run_replicated(n, master_seed, |_, rng| {
        let s = kappa.sample_great_hypersphere(rng);
        let x = sample_uniform_on_subsphere(s.normal(), rng);
        let y = sample_uniform_on_subsphere(s.normal(), rng);
        let kxy = kappa_two_point(kappa, &x, &y, n_inner, rng)?;
        let f = if kxy < 1e-12 {
            t // the integrand's x = y limit
        } else {
            (1.0 - (-kxy * t).exp()) / kxy
        };
        Ok(b * b * f)
    });
    let vals: Vec<f64> = rows.into_iter().collect::<Result<_>>()?;
    Ok(mean_se(&vals))
}

// ---------------------------------------------------------------------------
// intensity-measure equivalence between the two models

#[derive(Clone, Debug)]
pub struct IntensityEqualityReport {
    pub z_cell_count: f64,
    pub z_sigma1: f64,
    pub z_sigma0: f64,
    pub split_cell_count: (f64, f64),
    pub poisson_cell_count: (f64, f64),
}

/// Compares E(cell count), E Sigma_1 and E Sigma_0 between the splitting
/// model and the Poisson model at equal time parameter (d = 2), reporting
/// the two-sample z statistics.
pub fn mc_intensity_equality(
    kappa: &DirectionDistribution,
    t: f64,
    n: usize,
    master_seed: u64,
) -> Result<IntensityEqualityReport> {
    let split_rows: Vec<Result<[f64; 3]>> = run_replicated(n, master_seed, |i, rng| {
        let y = simulate(2, kappa, t, rng, None, i)?;
        Ok([y.cell_count() as f64, y.sigma_j(1)?, y.sigma_j(0)?])
    });
    let poisson_rows: Vec<Result<[f64; 3]>> =
        run_replicated(n, master_seed ^ 0x5bd1e995, |i, rng| {
            let p = crate::poissontess::sample(2, kappa, t, rng, i)?;
            let arr = crate::poissontess::arrangement_2d(&p)?;
            let mut s1 = 0.0;
            let mut s0 = 0.0;
            for c in &arr.cells {
                let iv = c.intrinsic_volumes();
                s0 += iv[0];
                s1 += iv[1];
            }
            Ok([arr.cells.len() as f64, s1, s0])
        });
    let mut split = [Vec::new(), Vec::new(), Vec::new()];
    for row in split_rows {
        let r = row?;
        for k in 0..3 {
            split[k].push(r[k]);
        }
    }
    let mut poisson = [Vec::new(), Vec::new(), Vec::new()];
    for row in poisson_rows {
        let r = row?;
        for k in 0..3 {
            poisson[k].push(r[k]);
        }
    }
    Ok(IntensityEqualityReport {
        z_cell_count: two_sample_z(&split[0], &poisson[0]),
        z_sigma1: two_sample_z(&split[1], &poisson[1]),
        z_sigma0: two_sample_z(&split[2], &poisson[2]),
        split_cell_count: mean_se(&split[0]),
        poisson_cell_count: mean_se(&poisson[0]),
    })
}

// ---------------------------------------------------------------------------
// helper: one tessellation for export paths

pub fn single_run(
    d: usize,
    kappa: &DirectionDistribution,
    t: f64,
    seed: u64,
) -> Result<SplittingTessellation> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    simulate(d, kappa, t, &mut rng, None, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn pairwise_sum_matches_naive() {
        let xs: Vec<f64> = (0..1001).map(|i| (i as f64).sin()).collect();
        let naive: f64 = xs.iter().sum();
        assert!((pairwise_sum(&xs) - naive).abs() < 1e-9);
    }

    #[test]
    fn mean_se_shrinks_with_n() {
        // doubling n shrinks the SE by ~ 1/sqrt(2)
        let xs: Vec<f64> = run_replicated(4000, 7, |_, rng| rng.gen::<f64>());
        let (_, se1) = mean_se(&xs[..2000]);
        let (_, se2) = mean_se(&xs);
        let shrink = se2 / se1;
        assert!(
            (shrink - std::f64::consts::FRAC_1_SQRT_2).abs() < 0.2,
            "{shrink}"
        );
        // batch means agree with the plain SE for i.i.d. data
        let (m1, s1) = mean_se(&xs);
        let (m2, s2) = batch_means_se(&xs);
        assert!((m1 - m2).abs() < 1e-12);
        assert!((s1 - s2).abs() < 0.5 * s1, "{s1} vs {s2}");
    }

    #[test]
    fn variance_and_covariance_se() {
        let xs: Vec<f64> = run_replicated(20000, 11, |_, rng| {
            rng.sample::<f64, _>(rand_distr::StandardNormal)
        });
        let (v, se) = variance_with_se(&xs);
        assert!((v - 1.0).abs() < 4.0 * se, "{v} +- {se}");
        // Var(s^2) for the normal is 2 sigma^4 / n
        let want_se = (2.0 / 20000.0f64).sqrt();
        assert!((se - want_se).abs() < 0.3 * want_se, "{se} vs {want_se}");
        let ys: Vec<f64> = xs.iter().map(|x| 0.5 * x).collect();
        let (c, cse) = covariance_with_se(&xs, &ys);
        assert!((c - 0.5).abs() < 4.0 * cse);
    }

    #[test]
    fn ks_test_calibration() {
        // uniform samples against the uniform CDF pass at the 1% level
        let mut xs: Vec<f64> = run_replicated(5000, 13, |_, rng| rng.gen::<f64>());
        let (stat, crit, pass) = ks_test(&mut xs, |x| x.clamp(0.0, 1.0), 0.01);
        assert!(pass, "stat {stat} crit {crit}");
        // shifted samples fail
        let mut ys: Vec<f64> = xs.iter().map(|x| (x * 0.8) + 0.1).collect();
        let (_, _, pass) = ks_test(&mut ys, |x| x.clamp(0.0, 1.0), 0.01);
        assert!(!pass);
    }

    #[test]
    fn replicate_streams_are_independent_and_reproducible() {
        let a: Vec<f64> = run_replicated(8, 99, |_, rng| rng.gen::<f64>());
        let b: Vec<f64> = run_replicated(8, 99, |_, rng| rng.gen::<f64>());
        assert_eq!(a, b);
        let c: Vec<f64> = run_replicated(8, 100, |_, rng| rng.gen::<f64>());
        assert_ne!(a, c);
        // streams differ from one another
        assert!(a.windows(2).any(|w| w[0] != w[1]));
    }

    #[test]
    fn gate_threshold_widens() {
        assert_eq!(gate_threshold(4.0, 10), 4.0);
        let widened = gate_threshold(4.0, 100);
        assert!(widened > 4.0 && widened < 5.0, "{widened}");
    }

    #[test]
    fn report_pass_logic() {
        // z = 2.5: inside a 4-SE gate, outside a 2-SE gate
        let r = EstimateReport::new("x", 100, 1.05, 0.02, 1).with_reference(1.0, 4.0);
        assert_eq!(r.pass, Some(true));
        let r = EstimateReport::new("x", 100, 1.05, 0.02, 1).with_reference(1.0, 2.0);
        assert_eq!(r.pass, Some(false));
    }
}
