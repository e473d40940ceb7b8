//! Numerical quadrature: an adaptive Gauss-Kronrod (G7,K15) rule for the
//! closed-form integrals, and Gauss-Legendre node generation for fixed-order
//! boundary quadrature in the curvature measures.
//!
//! Integrable endpoint singularities in this crate are always removable after
//! substituting the analytic limit at the endpoint, so the integrand passed in
//! is expected to be finite everywhere on the closed interval.

use crate::error::{Result, SphereSplitError};

/// Contract for adaptive quadrature: the reported error estimate must not
/// exceed `abs_tol + rel_tol * |value|`.
#[derive(Clone, Copy, Debug)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_subdivisions: 4000,
        }
    }
}

/// Quadrature outcome: value plus the accumulated error estimate.
#[derive(Clone, Copy, Debug)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
}

// 15-point Kronrod abscissae (positive half, descending) and weights, with
// the embedded 7-point Gauss weights on the shared nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_813,
    0.949_107_912_342_759,
    0.864_864_423_359_769,
    0.741_531_185_599_394,
    0.586_087_235_467_691,
    0.405_845_151_377_397,
    0.207_784_955_007_898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529,
    0.063_092_092_629_979,
    0.104_790_010_322_250,
    0.140_653_259_715_525,
    0.169_004_726_639_267,
    0.190_350_578_064_785,
    0.204_432_940_075_298,
    0.209_482_141_084_728,
];
const WG: [f64; 4] = [
    0.129_484_966_168_870,
    0.279_705_391_489_277,
    0.381_830_050_505_119,
    0.417_959_183_673_469,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let x = h * XGK[i];
        let fsum = f(c - x) + f(c + x);
        kronrod += WGK[i] * fsum;
        if i % 2 == 1 {
            gauss += WG[i / 2] * fsum;
        }
    }
    let value = kronrod * h;
    let err = ((kronrod - gauss) * h).abs();
    // QUADPACK-style sharpening of the raw difference
    let err = if err > 0.0 {
        (200.0 * err).powf(1.5).min(err)
    } else {
        err
    };
    (value, err)
}

/// Adaptive integration of `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error_estimate: 0.0,
        });
    }
    // worklist of (a, b, value, err), splitting the worst interval first
    let (v, e) = gk15(&f, a, b);
    let mut intervals = vec![(a, b, v, e)];
    for _ in 0..cfg.max_subdivisions {
        let value: f64 = intervals.iter().map(|t| t.2).sum();
        let err: f64 = intervals.iter().map(|t| t.3).sum();
        if err <= cfg.abs_tol + cfg.rel_tol * value.abs() {
            return Ok(QuadResult {
                value,
                error_estimate: err,
            });
        }
        let (worst, _) = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty interval list");
        let (ia, ib, _, _) = intervals.swap_remove(worst);
        let mid = 0.5 * (ia + ib);
        if mid <= ia || mid >= ib {
            return Err(SphereSplitError::Convergence(format!(
                "quadrature interval collapsed near {mid}"
            )));
        }
        let (v1, e1) = gk15(&f, ia, mid);
        let (v2, e2) = gk15(&f, mid, ib);
        intervals.push((ia, mid, v1, e1));
        intervals.push((mid, ib, v2, e2));
    }
    Err(SphereSplitError::Convergence(format!(
        "quadrature did not reach tolerance after {} subdivisions",
        cfg.max_subdivisions
    )))
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1);
    let mut out = Vec::with_capacity(n);
    let m = n.div_ceil(2);
    for i in 0..m {
        // initial guess (Chebyshev-like)
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // evaluate P_n(x) and P_n'(x)
            let mut p0 = 1.0f64;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((-x, w));
        if !(n % 2 == 1 && i == m - 1) {
            out.push((x, w));
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        let cfg = QuadratureConfig::default();
        let r = integrate(|x| x * x * x - 2.0 * x + 1.0, -1.0, 3.0, &cfg).unwrap();
        // antiderivative x^4/4 - x^2 + x
        let exact = (81.0 / 4.0 - 9.0 + 3.0) - (0.25 - 1.0 - 1.0);
        assert!((r.value - exact).abs() < 1e-12);
    }

    #[test]
    fn integrates_removable_singularity() {
        // int_0^1 (1 - e^{-z})/z dz = Ein(1)
        let cfg = QuadratureConfig::default();
        let f = |z: f64| if z == 0.0 { 1.0 } else { (1.0 - (-z).exp()) / z };
        let r = integrate(f, 0.0, 1.0, &cfg).unwrap();
        let want = crate::special::ein(1.0).unwrap();
        assert!((r.value - want).abs() < 1e-11, "{} vs {}", r.value, want);
        assert!(r.error_estimate <= cfg.abs_tol + cfg.rel_tol * r.value.abs());
    }

    #[test]
    fn gauss_legendre_orders() {
        for n in [1, 2, 5, 16, 64] {
            let nodes = gauss_legendre(n);
            assert_eq!(nodes.len(), n);
            let s: f64 = nodes.iter().map(|(_, w)| w).sum();
            assert!((s - 2.0).abs() < 1e-12, "n={n} weight sum {s}");
            // degree-(2n-1) exactness: x^2 needs n >= 2
            if n >= 2 {
                let int_x2: f64 = nodes.iter().map(|(x, w)| w * x * x).sum();
                assert!((int_x2 - 2.0 / 3.0).abs() < 1e-12);
            }
        }
    }
}
