//! Closed-form reference values for the two tessellation models: capacity
//! functionals, expected curvature sums, variances and covariances, the
//! K-function / pair-correlation pair for both models, and the maximal-face
//! statistics, with adaptive quadrature wherever a one-dimensional integral
//! remains.
//!
//! Integrable endpoint behaviour is always removable here; integrands are
//! continued by their analytic limits at the endpoints before quadrature.

use crate::error::{Result, SphereSplitError};
use crate::quad::{integrate, QuadratureConfig};
use crate::special::{beta_dim, exp_integral_e1, lower_incomplete_gamma, EULER_GAMMA};
use std::collections::BTreeMap;

const PI: f64 = std::f64::consts::PI;

// ---------------------------------------------------------------------------
// capacity functionals

/// Avoidance probability of a connected compact set with hitting measure
/// `kappa_hit`: exp(-kappa_hit t).
pub fn capacity_connected(kappa_hit: f64, t: f64) -> f64 {
    (-kappa_hit * t).exp()
}

/// Avoidance probability of a two-component set, given the single-component
/// hitting measures, the hull hitting measure and the separation measure.
pub fn capacity_two_components(k1: f64, k2: f64, k_hull: f64, k_sep: f64, t: f64) -> f64 {
    let denom = k1 + k2 - k_hull;
    if denom.abs() <= 1e-12 {
        (-t * k_hull).exp() + t * k_sep * (-t * (k1 + k2)).exp()
    } else {
        (-t * k_hull).exp() + k_sep * ((-t * k_hull).exp() - (-t * (k1 + k2)).exp()) / denom
    }
}

/// Hull and separation measures of a set with m <= 6 connected components,
/// indexed by component bitmask. `hull[mask]` is the hitting measure of the
/// convex hull of the components in `mask` (for singletons, of the component
/// itself); `sep[(p, q)]` is the measure of hyperspheres separating the two
/// halves of a 2-partition of some subset.
#[derive(Clone, Debug, Default)]
pub struct ComponentMeasures {
    pub m: usize,
    pub hull: BTreeMap<u32, f64>,
    pub sep: BTreeMap<(u32, u32), f64>,
}

impl ComponentMeasures {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 || m > 6 {
            return Err(SphereSplitError::InvalidArgument(format!(
                "component count {m} outside 1..=6"
            )));
        }
        Ok(ComponentMeasures {
            m,
            hull: BTreeMap::new(),
            sep: BTreeMap::new(),
        })
    }

    pub fn set_hull(&mut self, mask: u32, v: f64) -> &mut Self {
        self.hull.insert(mask, v);
        self
    }

    pub fn set_sep(&mut self, p: u32, q: u32, v: f64) -> &mut Self {
        let key = if p < q { (p, q) } else { (q, p) };
        self.sep.insert(key, v);
        self
    }

    fn hull_of(&self, mask: u32) -> Result<f64> {
        self.hull.get(&mask).copied().ok_or_else(|| {
            SphereSplitError::Precondition(format!("missing hull measure for subset {mask:b}"))
        })
    }

    fn sep_of(&self, p: u32, q: u32) -> Result<f64> {
        let key = if p < q { (p, q) } else { (q, p) };
        self.sep.get(&key).copied().ok_or_else(|| {
            SphereSplitError::Precondition(format!(
                "missing separation measure for partition {p:b} | {q:b}"
            ))
        })
    }
}

/// Avoidance probability of the full component set at time t, by the
/// recursion over 2-partitions with memoized closed forms at the base.
pub fn capacity_recursive(
    meas: &ComponentMeasures,
    t: f64,
    quad: &QuadratureConfig,
) -> Result<f64> {
    let full: u32 = (1u32 << meas.m) - 1;
    capacity_subset(meas, full, t, quad)
}

fn capacity_subset(
    meas: &ComponentMeasures,
    mask: u32,
    t: f64,
    quad: &QuadratureConfig,
) -> Result<f64> {
    let k = mask.count_ones();
    if k == 1 {
        return Ok(capacity_connected(meas.hull_of(mask)?, t));
    }
    if k == 2 {
        let p = 1u32 << mask.trailing_zeros();
        let q = mask ^ p;
        return Ok(capacity_two_components(
            meas.hull_of(p)?,
            meas.hull_of(q)?,
            meas.hull_of(mask)?,
            meas.sep_of(p, q)?,
            t,
        ));
    }
    let hull = meas.hull_of(mask)?;
    let mut total = (-t * hull).exp();
    // unordered proper 2-partitions of the subset
    let anchor = 1u32 << mask.trailing_zeros();
    let mut sub = (mask - 1) & mask;
    while sub > 0 {
        if sub & anchor != 0 {
            let p = sub;
            let q = mask ^ sub;
            let sep = meas.sep_of(p, q)?;
            if sep != 0.0 {
                let inner = integrate(
                    |s| {
                        let up = capacity_subset(meas, p, t - s, quad).unwrap_or(f64::NAN);
                        let uq = capacity_subset(meas, q, t - s, quad).unwrap_or(f64::NAN);
                        (-s * hull).exp() * up * uq
                    },
                    0.0,
                    t,
                    quad,
                )?;
                total += sep * inner.value;
            }
        }
        sub = (sub - 1) & mask;
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// first-order expectations

/// E Sigma_j(t; h) under the isotropic law: t^{d-j} / (d-j)! * H^d(h) / beta_d.
pub fn expected_sigma(d: usize, j: usize, t: f64, h_integral: f64) -> Result<f64> {
    if j > d {
        return Err(SphereSplitError::InvalidArgument(format!(
            "sigma order {j} exceeds d = {d}"
        )));
    }
    let n = d - j;
    let mut fact = 1.0;
    for i in 1..=n {
        fact *= i as f64;
    }
    Ok(t.powi(n as i32) / fact * h_integral / beta_dim(d))
}

/// E H^{d-1}(Z_t) = beta_{d-1} t, for every regular direction distribution.
pub fn expected_surface(d: usize, t: f64) -> f64 {
    beta_dim(d - 1) * t
}

/// The mean of h over a kappa-weighted great hypersphere: sample S ~ kappa,
/// then a uniform point of S, and average h. Returns (value, standard
/// error). Under the uniform law this equals the normalized sphere integral
/// of h; E Sigma_{d-1}(t; h) = t kappa_bar(h) in general.
pub fn kappa_bar_mc<R: rand::Rng + ?Sized>(
    kappa: &crate::dirdist::DirectionDistribution,
    h: &dyn Fn(&crate::sphgeo::UnitVector) -> f64,
    n: usize,
    rng: &mut R,
) -> (f64, f64) {
    let mut sum = 0.0;
    let mut sum2 = 0.0;
    for _ in 0..n {
        let s = kappa.sample_great_hypersphere(rng);
        let x = crate::sphgeo::sample_uniform_on_subsphere(s.normal(), rng);
        let v = h(&x);
        sum += v;
        sum2 += v * v;
    }
    let mean = sum / n as f64;
    let var = (sum2 / n as f64 - mean * mean).max(0.0);
    (mean, (var / n as f64).sqrt())
}

/// E H^{d-1}(t; h) = t beta_{d-1} kappa_bar(h).
pub fn expected_surface_weighted(d: usize, t: f64, kappa_bar_h: f64) -> f64 {
    beta_dim(d - 1) * t * kappa_bar_h
}

/// Expected cell count at time t: the Poisson mixture of the closed-form
/// arrangement cell counts (the splitting and Poisson models share it).
pub fn expected_cell_count(d: usize, t: f64) -> Result<f64> {
    let mut total = 0.0;
    let mut weight = (-t).exp();
    let mut tail = 1.0 - weight;
    total += weight; // n = 0: one cell
    let mut n = 0u64;
    loop {
        n += 1;
        weight *= t / n as f64;
        tail -= weight;
        total += weight * crate::poissontess::face_counts(n, d, d)? as f64;
        if n > 4 && tail.abs() < 1e-14 && weight * (n * n) as f64 / t.max(1.0) < 1e-13 {
            break;
        }
        if n > 500 {
            return Err(SphereSplitError::Convergence(
                "cell-count series truncated".into(),
            ));
        }
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// variance of the surface measure

/// Var H^{d-1}(Z_t) under the isotropic law, by quadrature of
/// (2 pi)^d / (d-2)! int_0^1 sin(pi z)^{d-2} (1 - e^{-z t}) / z dz.
pub fn var_surface_isotropic(d: usize, t: f64, quad: &QuadratureConfig) -> Result<f64> {
    if d < 2 {
        return Err(SphereSplitError::UnsupportedDimension(format!("d = {d} < 2")));
    }
    if t < 0.0 {
        return Err(SphereSplitError::Precondition("t >= 0 required".into()));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let p = d as i32 - 2;
    let f = move |z: f64| {
        let osc = (PI * z).sin().powi(p);
        if z == 0.0 {
            // limit of (1 - e^{-zt})/z as z -> 0 is t
            t * osc
        } else {
            osc * (1.0 - (-z * t).exp()) / z
        }
    };
    let integral = integrate(f, 0.0, 1.0, quad)?;
    let mut fact = 1.0;
    for i in 1..=(d - 2) {
        fact *= i as f64;
    }
    Ok((2.0 * PI).powi(d as i32) / fact * integral.value)
}

/// The d = 2 closed form Var H^1(Z_t) = 4 pi^2 (gamma + ln t + E_1(t)).
pub fn var_surface_closed_2d(t: f64) -> Result<f64> {
    if t == 0.0 {
        return Ok(0.0);
    }
    Ok(4.0 * PI * PI * (EULER_GAMMA + t.ln() + exp_integral_e1(t)?))
}

// ---------------------------------------------------------------------------
// second-order d = 2 closed forms

/// Var Sigma_0(t) on S^2 under the isotropic law:
/// t^2 ln t + t^2 (gamma - 3/4 + E_1(t)) + t (1 - e^{-t}).
pub fn var_sigma0_2d(t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(SphereSplitError::Precondition(
            "var_sigma0 needs t > 0".into(),
        ));
    }
    Ok(t * t * t.ln() + t * t * (EULER_GAMMA - 0.75 + exp_integral_e1(t)?) + t * (1.0 - (-t).exp()))
}

/// The same variance in its integral form (used as a cross-check):
/// t^2 int_0^1 (1-z)^2 (1 - e^{-tz})/z dz + 1 - t + (3/4) t^2 - e^{-t}.
pub fn var_sigma0_2d_integral_form(t: f64, quad: &QuadratureConfig) -> Result<f64> {
    if !(t > 0.0) {
        return Err(SphereSplitError::Precondition(
            "var_sigma0 needs t > 0".into(),
        ));
    }
    let f = move |z: f64| {
        if z == 0.0 {
            t // (1 - e^{-tz})/z -> t
        } else {
            (1.0 - z) * (1.0 - z) * (1.0 - (-t * z).exp()) / z
        }
    };
    let integral = integrate(f, 0.0, 1.0, quad)?;
    Ok(t * t * integral.value + 1.0 - t + 0.75 * t * t - (-t).exp())
}

/// Cov(Sigma_0(t), Sigma_1(t)) on S^2 under the isotropic law:
/// t ln t + t (gamma - 1/2 + E_1(t)) + (1 - e^{-t}) / 2.
pub fn cov_sigma0_sigma1_2d(t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(SphereSplitError::Precondition(
            "cov_sigma0_sigma1 needs t > 0".into(),
        ));
    }
    Ok(t * t.ln() + t * (EULER_GAMMA - 0.5 + exp_integral_e1(t)?) + 0.5 * (1.0 - (-t).exp()))
}

/// Integral form of the covariance (cross-check):
/// t int_0^1 (1-z)(1 - e^{-tz})/z dz + (t - 1 + e^{-t}) / 2.
pub fn cov_sigma0_sigma1_2d_integral_form(t: f64, quad: &QuadratureConfig) -> Result<f64> {
    if !(t > 0.0) {
        return Err(SphereSplitError::Precondition(
            "cov_sigma0_sigma1 needs t > 0".into(),
        ));
    }
    let f = move |z: f64| {
        if z == 0.0 {
            t
        } else {
            (1.0 - z) * (1.0 - (-t * z).exp()) / z
        }
    };
    let integral = integrate(f, 0.0, 1.0, quad)?;
    Ok(t * integral.value + 0.5 * (t - 1.0 + (-t).exp()))
}

// ---------------------------------------------------------------------------
// the covariance recursion engine

fn binom_f64(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut out = 1.0;
    for i in 0..k {
        out = out * (n - i) as f64 / (i + 1) as f64;
    }
    out
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// The iterated integral I^n(f, t) = 1/(n-1)! int_0^t (t-s)^{n-1} f(s) ds.
pub fn iterated_integral<F: Fn(f64) -> f64>(
    f: F,
    order: usize,
    t: f64,
    quad: &QuadratureConfig,
) -> Result<f64> {
    if order == 0 {
        return Err(SphereSplitError::InvalidArgument(
            "iterated integral order must be >= 1".into(),
        ));
    }
    let p = (order - 1) as i32;
    let norm = factorial(order - 1);
    let r = integrate(|s| (t - s).powi(p) * f(s), 0.0, t, quad)?;
    Ok(r.value / norm)
}

/// Cov(Sigma_{d-1-k}(t), Sigma_{d-1-l}(t)) from the mean chord-product curves
/// s -> E A_{i,j}(s): the weighted sum of iterated integrals
/// sum_{m<=k, n<=l} C(k+l-m-n, k-m) I^{k+l-m-n+1}(E A_{d-1-m,d-1-n}, t).
///
/// `curve(i, j, s)` evaluates E A_{i,j}(s); the isotropic law is assumed.
pub fn covariance_recursion<F: Fn(usize, usize, f64) -> f64>(
    d: usize,
    k: usize,
    l: usize,
    t: f64,
    curve: F,
    quad: &QuadratureConfig,
) -> Result<f64> {
    if k > d - 1 || l > d - 1 {
        return Err(SphereSplitError::InvalidArgument(format!(
            "orders (k, l) = ({k}, {l}) exceed d - 1 = {}",
            d - 1
        )));
    }
    let mut total = 0.0;
    for m in 0..=k {
        for n in 0..=l {
            let order = k + l - m - n + 1;
            let w = binom_f64(k + l - m - n, k - m);
            let i_val = iterated_integral(|s| curve(d - 1 - m, d - 1 - n, s), order, t, quad)?;
            total += w * i_val;
        }
    }
    Ok(total)
}

/// A Monte Carlo curve tabulated on a shared grid, with per-node standard
/// errors.
#[derive(Clone, Debug)]
pub struct TabulatedCurve {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub std_errors: Vec<f64>,
}

/// The covariance recursion applied to tabulated curves: piecewise-linear
/// interpolation integrated exactly against the (t-s)^{n-1} kernels, so the
/// result is a linear combination of the curve nodes and the standard error
/// propagates through those weights. All curves must share `grid`, which must
/// cover [0, t].
pub fn covariance_recursion_tabulated(
    d: usize,
    k: usize,
    l: usize,
    t: f64,
    curves: &BTreeMap<(usize, usize), TabulatedCurve>,
) -> Result<(f64, f64)> {
    let first = curves
        .values()
        .next()
        .ok_or_else(|| SphereSplitError::Precondition("no curves supplied".into()))?;
    let grid = &first.grid;
    if grid.first().copied().unwrap_or(1.0) > 1e-12 || grid.last().copied().unwrap_or(0.0) < t - 1e-12
    {
        return Err(SphereSplitError::Precondition(format!(
            "curve grid does not cover [0, {t}]"
        )));
    }
    for c in curves.values() {
        if c.grid != *grid {
            return Err(SphereSplitError::Precondition(
                "curves tabulated on different grids".into(),
            ));
        }
    }
    let mut total = 0.0;
    let mut var = 0.0;
    for m in 0..=k {
        for n in 0..=l {
            let order = k + l - m - n + 1;
            let w = binom_f64(k + l - m - n, k - m);
            let key = (d - 1 - m, d - 1 - n);
            let curve = curves.get(&key).ok_or_else(|| {
                SphereSplitError::Precondition(format!("missing curve for indices {key:?}"))
            })?;
            let weights = hat_weights(grid, order, t);
            for (i, wi) in weights.iter().enumerate() {
                total += w * wi * curve.values[i];
                var += (w * wi * curve.std_errors[i]).powi(2);
            }
        }
    }
    Ok((total, var.sqrt()))
}

/// Node weights of the exact integration of a piecewise-linear interpolant
/// against (t-s)^{p-1}/(p-1)! over [0, t].
fn hat_weights(grid: &[f64], order: usize, t: f64) -> Vec<f64> {
    let p = order as i32;
    let norm = factorial(order - 1);
    let mut w = vec![0.0; grid.len()];
    for seg in 0..grid.len() - 1 {
        let a = grid[seg];
        let b = grid[seg + 1];
        if a >= t {
            break;
        }
        let hi = b.min(t);
        let za = t - a;
        let zb = t - hi;
        // I1 = int_a^hi (t-s)^{p-1} ds, I2 = int_a^hi s (t-s)^{p-1} ds
        let i1 = (za.powi(p) - zb.powi(p)) / p as f64;
        let i2 = t * i1 - (za.powi(p + 1) - zb.powi(p + 1)) / (p as f64 + 1.0);
        let len = b - a;
        w[seg] += (i1 * b - i2) / len / norm;
        w[seg + 1] += (i2 - i1 * a) / len / norm;
    }
    w
}

// ---------------------------------------------------------------------------
// K-functions and pair-correlation functions

fn check_r(r: f64) -> Result<()> {
    if !(r > 0.0 && r < PI) {
        return Err(SphereSplitError::InvalidArgument(format!(
            "radius {r} outside (0, pi)"
        )));
    }
    Ok(())
}

fn pcf_constant(d: usize) -> f64 {
    PI * beta_dim(d - 2) * beta_dim(d) / beta_dim(d - 1).powi(2)
}

/// Pair-correlation function of the splitting tessellation's boundary
/// measure: 1 + pi b_{d-2} b_d / b_{d-1}^2 (1 - e^{-tr/pi}) / (t^2 r sin r).
pub fn pcf_split(d: usize, t: f64, r: f64) -> Result<f64> {
    check_r(r)?;
    if !(t > 0.0) {
        return Err(SphereSplitError::Precondition("t > 0 required".into()));
    }
    Ok(1.0 + pcf_constant(d) * (1.0 - (-t * r / PI).exp()) / (t * t * r * r.sin()))
}

/// K-function of the splitting tessellation's boundary measure.
pub fn k_function_split(d: usize, t: f64, r: f64, quad: &QuadratureConfig) -> Result<f64> {
    check_r(r)?;
    if !(t > 0.0) {
        return Err(SphereSplitError::Precondition("t > 0 required".into()));
    }
    let c = pcf_constant(d);
    let dd = d as i32;
    let f = move |phi: f64| {
        if phi == 0.0 {
            // sin^{d-1} * correction -> c phi^{d-2} / (pi t): nonzero only d = 2
            if d == 2 {
                c / (PI * t)
            } else {
                0.0
            }
        } else {
            (1.0 + c * (1.0 - (-t * phi / PI).exp()) / (t * t * phi * phi.sin()))
                * phi.sin().powi(dd - 1)
        }
    };
    let integral = integrate(f, 0.0, r, quad)?;
    Ok(beta_dim(d - 1) / beta_dim(d) * integral.value)
}

/// Pair-correlation function of the Poisson model:
/// 1 + b_{d-2} b_d / b_{d-1}^2 / (t sin r).
pub fn pcf_poisson(d: usize, t: f64, r: f64) -> Result<f64> {
    check_r(r)?;
    if !(t > 0.0) {
        return Err(SphereSplitError::Precondition("t > 0 required".into()));
    }
    Ok(1.0 + pcf_constant(d) / PI / (t * r.sin()))
}

/// K-function of the Poisson model by direct quadrature of its two terms.
pub fn k_function_poisson(d: usize, t: f64, r: f64, quad: &QuadratureConfig) -> Result<f64> {
    check_r(r)?;
    if !(t > 0.0) {
        return Err(SphereSplitError::Precondition("t > 0 required".into()));
    }
    let dd = d as i32;
    let first = integrate(|phi| phi.sin().powi(dd - 1), 0.0, r, quad)?;
    let second = integrate(|phi| phi.sin().powi(dd - 2), 0.0, r, quad)?;
    Ok(beta_dim(d - 1) / beta_dim(d) * first.value
        + beta_dim(d - 2) / beta_dim(d - 1) / t * second.value)
}

/// Geodesic cap volume H^d(B(e, r)) = beta_{d-1} int_0^r sin^{d-1}.
pub fn cap_volume(d: usize, r: f64, quad: &QuadratureConfig) -> Result<f64> {
    let dd = d as i32;
    let v = integrate(|phi| phi.sin().powi(dd - 1), 0.0, r, quad)?;
    Ok(beta_dim(d - 1) * v.value)
}

/// The Poisson K-function written through cap measures: the normalized cap
/// volume plus the normalized cap section of one great hypersphere through
/// the reference point. Used as a cross-check of `k_function_poisson`.
pub fn k_function_poisson_cap_form(
    d: usize,
    t: f64,
    r: f64,
    quad: &QuadratureConfig,
) -> Result<f64> {
    check_r(r)?;
    Ok(cap_volume(d, r, quad)? / beta_dim(d)
        + cap_volume(d - 1, r, quad)? / beta_dim(d - 1) / t)
}

// ---------------------------------------------------------------------------
// maximal-face statistics

/// Expected number of maximal segments (1-faces) of the splitting
/// tessellation: 2^{d-2}/(d-2)! (2 t^d / d + gamma(d-1, t)).
pub fn n1_split(d: usize, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(SphereSplitError::Precondition("t > 0 required".into()));
    }
    let inc = lower_incomplete_gamma(d as f64 - 1.0, t)?;
    Ok(2f64.powi(d as i32 - 2) / factorial(d - 2) * (2.0 * t.powi(d as i32) / d as f64 + inc))
}

/// Expected number of edges of the Poisson tessellation at intensity s:
/// s^{d-1}/(d-1)! (2s + e^{-s}).
pub fn n1_poisson(d: usize, s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(SphereSplitError::Precondition("s > 0 required".into()));
    }
    Ok(s.powi(d as i32 - 1) / factorial(d - 1) * (2.0 * s + (-s).exp()))
}

/// Expected total edge length of the Poisson tessellation:
/// 2 pi s^{d-1} / (d-1)!.
pub fn expected_total_edge_length_poisson(d: usize, s: f64) -> f64 {
    2.0 * PI * s.powi(d as i32 - 1) / factorial(d - 1)
}

/// Expected length of the typical maximal segment of the splitting
/// tessellation: d/(d-1) 2 pi t^{d-1} / (2 t^d + d gamma(d-1, t)).
pub fn mean_segment_length_split(d: usize, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(SphereSplitError::Precondition("t > 0 required".into()));
    }
    let inc = lower_incomplete_gamma(d as f64 - 1.0, t)?;
    let df = d as f64;
    Ok(df / (df - 1.0) * 2.0 * PI * t.powi(d as i32 - 1) / (2.0 * t.powi(d as i32) + df * inc))
}

/// Expected length of the typical edge of the Poisson tessellation:
/// 2 pi / (2t + e^{-t}), independent of the dimension.
pub fn mean_edge_length_poisson(t: f64) -> f64 {
    2.0 * PI / (2.0 * t + (-t).exp())
}

/// Density of the birth time of the typical maximal segment on (0, t):
/// d s^{d-2} (2s + e^{-s}) / (2 t^d + d gamma(d-1, t)).
pub fn birth_density(d: usize, t: f64, s: f64) -> Result<f64> {
    if !(t > 0.0 && s > 0.0 && s < t) {
        return Err(SphereSplitError::InvalidArgument(format!(
            "birth density needs 0 < s < t, got s = {s}, t = {t}"
        )));
    }
    let inc = lower_incomplete_gamma(d as f64 - 1.0, t)?;
    let df = d as f64;
    Ok(df * s.powi(d as i32 - 2) * (2.0 * s + (-s).exp())
        / (2.0 * t.powi(d as i32) + df * inc))
}

/// Mixture weight over the Poisson edge laws at ages s in (0, t); this
/// coincides with the birth-time density.
pub fn mixture_weight(d: usize, t: f64, s: f64) -> Result<f64> {
    birth_density(d, t, s)
}

/// Distribution function of the birth time: N_1(s) / N_1(t).
pub fn birth_cdf(d: usize, t: f64, s: f64) -> Result<f64> {
    if s <= 0.0 {
        return Ok(0.0);
    }
    if s >= t {
        return Ok(1.0);
    }
    Ok(n1_split(d, s)? / n1_split(d, t)?)
}
