//! One-dimensional quadrature building blocks.
//!
//! Layer potentials and surface integrals are assembled from Gauss-Legendre
//! panels. Near-singular integrands get panels graded geometrically toward
//! the singular parameter value; error estimates come from re-evaluating each
//! panel at half the node count.

use crate::error::{Error, Result};
use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

/// A value together with a quadrature error estimate.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate { value, error: 0.0 }
    }

    pub fn add(&self, other: &Estimate) -> Estimate {
        Estimate { value: self.value + other.value, error: self.error + other.error }
    }

    pub fn scale(&self, c: f64) -> Estimate {
        Estimate { value: c * self.value, error: c.abs() * self.error }
    }
}

/// Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    fn build(m: usize) -> GaussRule {
        assert!(m >= 1);
        let mut nodes = vec![0.0; m];
        let mut weights = vec![0.0; m];
        // Newton iteration on P_m from the Chebyshev initial guess.
        for i in 0..m.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_deriv(m, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[m - 1 - i] = x;
            weights[i] = w;
            weights[m - 1 - i] = w;
        }
        if m % 2 == 1 {
            nodes[m / 2] = 0.0;
        }
        GaussRule { nodes, weights }
    }

    /// Integrate `f` over `[a, b]`.
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut s = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s += w * f(mid + half * x);
        }
        s * half
    }
}

fn legendre_with_deriv(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Cached Gauss-Legendre rule of order `m`.
pub fn gauss_legendre(m: usize) -> Arc<GaussRule> {
    static CACHE: OnceLock<RwLock<HashMap<usize, Arc<GaussRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(rule) = cache.read().unwrap().get(&m) {
        return rule.clone();
    }
    let rule = Arc::new(GaussRule::build(m));
    cache.write().unwrap().entry(m).or_insert_with(|| rule.clone()).clone()
}

/// Integrate `f` over a list of panels with Gauss-Legendre of order `order`,
/// estimating the error from the half-order rule on the same panels.
pub fn integrate_panels(
    panels: &[(f64, f64)],
    order: usize,
    mut f: impl FnMut(f64) -> f64,
) -> Result<Estimate> {
    let hi = gauss_legendre(order.max(2));
    let lo = gauss_legendre((order / 2).max(1));
    let mut value = 0.0;
    let mut error = 0.0;
    for &(a, b) in panels {
        if b <= a {
            continue;
        }
        let mut bad = false;
        let vh = hi.integrate(a, b, |t| {
            let y = f(t);
            if !y.is_finite() {
                bad = true;
            }
            y
        });
        if bad {
            return Err(Error::Evaluation(format!(
                "non-finite integrand sample on panel [{a}, {b}]"
            )));
        }
        let vl = lo.integrate(a, b, &mut f);
        value += vh;
        error += (vh - vl).abs();
    }
    Ok(Estimate { value, error })
}

/// Panels over `[a, b]` graded geometrically toward `focus` (clamped into the
/// interval). The first panel at the focus has width `start`, widths double
/// outward and are capped at `max_width`.
pub fn graded_panels(a: f64, b: f64, focus: f64, start: f64, max_width: f64) -> Vec<(f64, f64)> {
    debug_assert!(b > a);
    let start = start.max(1e-13).min(max_width);
    let f = focus.clamp(a, b);
    let mut edges_left = vec![f];
    let mut w = start;
    let mut t = f;
    while t > a {
        t = (t - w).max(a);
        edges_left.push(t);
        w = (2.0 * w).min(max_width);
    }
    let mut edges_right = vec![f];
    let mut w = start;
    let mut t = f;
    while t < b {
        t = (t + w).min(b);
        edges_right.push(t);
        w = (2.0 * w).min(max_width);
    }
    let mut panels = Vec::with_capacity(edges_left.len() + edges_right.len());
    for pair in edges_left.windows(2) {
        panels.push((pair[1], pair[0]));
    }
    panels.reverse();
    for pair in edges_right.windows(2) {
        panels.push((pair[0], pair[1]));
    }
    panels
}

/// Split existing panels at the given breakpoints (used to restore per-panel
/// smoothness when the integrand has known kink locations).
pub fn split_panels(panels: &[(f64, f64)], breakpoints: &[f64]) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(panels.len() + breakpoints.len());
    for &(a, b) in panels {
        let mut cuts: Vec<f64> =
            breakpoints.iter().copied().filter(|&t| t > a + 1e-15 && t < b - 1e-15).collect();
        cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let mut lo = a;
        for c in cuts {
            out.push((lo, c));
            lo = c;
        }
        out.push((lo, b));
    }
    out
}

/// Periodic trapezoid rule over `[0, 2π)` with `m` nodes (spectrally accurate
/// for smooth periodic integrands).
pub fn trapezoid_periodic(m: usize, mut f: impl FnMut(f64) -> f64) -> f64 {
    let h = 2.0 * std::f64::consts::PI / m as f64;
    let mut s = 0.0;
    for j in 0..m {
        s += f(j as f64 * h);
    }
    s * h
}

/// Find all roots of `f` on `[a, b]` by scanning `m` subintervals for sign
/// changes and bisecting each bracket.
pub fn scan_roots(a: f64, b: f64, m: usize, mut f: impl FnMut(f64) -> f64) -> Vec<f64> {
    let mut roots = Vec::new();
    if b <= a {
        return roots;
    }
    let h = (b - a) / m as f64;
    let mut t0 = a;
    let mut f0 = f(t0);
    for j in 1..=m {
        let t1 = a + j as f64 * h;
        let f1 = f(t1);
        if f0 == 0.0 {
            roots.push(t0);
        } else if f0 * f1 < 0.0 {
            let (mut lo, mut hi) = (t0, t1);
            let (mut flo, _) = (f0, f1);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                let fm = f(mid);
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if flo * fm < 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        t0 = t1;
        f0 = f1;
    }
    if f0 == 0.0 {
        roots.push(t0);
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_exact_on_polynomials() {
        let rule = gauss_legendre(8);
        // degree 15 is integrated exactly by an 8-point rule
        let v = rule.integrate(-1.0, 1.0, |x| x.powi(14));
        assert!((v - 2.0 / 15.0).abs() < 1e-14, "got {v}");
        let w: f64 = rule.weights.iter().sum();
        assert!((w - 2.0).abs() < 1e-14);
    }

    #[test]
    fn panel_integration_with_error_estimate() {
        let panels = [(0.0, 0.5), (0.5, 1.0)];
        let est = integrate_panels(&panels, 16, |x| (3.0 * x).sin()).unwrap();
        let exact = (1.0 - (3.0f64).cos()) / 3.0;
        assert!((est.value - exact).abs() < 1e-13);
        assert!(est.error < 1e-6);
    }

    #[test]
    fn graded_panels_resolve_log_singularity() {
        // integral of ln|t| over [-1, 1] = -2
        let panels = graded_panels(-1.0, 1.0, 0.0, 1e-13, 0.5);
        let est = integrate_panels(&panels, 16, |t| t.abs().max(1e-300).ln()).unwrap();
        assert!((est.value + 2.0).abs() < 1e-10, "got {}", est.value);
    }

    #[test]
    fn non_finite_sample_is_reported() {
        let panels = [(0.0, 1.0)];
        let err = integrate_panels(&panels, 8, |t| 1.0 / (t - t)).unwrap_err();
        assert!(matches!(err, Error::Evaluation(_)));
    }

    #[test]
    fn scan_roots_finds_crossings() {
        let roots = scan_roots(0.0, 7.0, 64, |t| t.cos());
        assert_eq!(roots.len(), 2);
        assert!((roots[0] - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        assert!((roots[1] - 3.0 * std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn trapezoid_periodic_is_spectral() {
        let v = trapezoid_periodic(32, |t| (t.sin()).exp());
        // modified Bessel I_0(1) * 2π
        let exact = 2.0 * std::f64::consts::PI * 1.2660658777520083;
        assert!((v - exact).abs() < 1e-12);
    }
}
