//! Graph interfaces `Γ = {(x', ψ(x')) : x' ∈ B_1'}` and their differential
//! geometry.
//!
//! Profiles are closed-form callables with exact gradients, so the normal
//! `ν = (-∇'ψ, 1)/√(1+|∇'ψ|²)` and the area element `√(1+|∇'ψ|²)` carry no
//! differentiation noise. The upward orientation (ν_n > 0, pointing into the
//! upper phase) is the default; a flag flips it for callers that want the
//! normal interior to the lower phase.

use crate::error::{Error, Result};
use crate::point::{Ball, Point};
use crate::quad::{self, Estimate};
use std::fmt;
use std::sync::Arc;

type ProfileFn = dyn Fn(&[f64]) -> f64 + Send + Sync;
type GradientFn = dyn Fn(&[f64]) -> [f64; 2] + Send + Sync;

/// The height profile of a graph interface.
#[derive(Clone)]
pub enum Profile {
    /// ψ ≡ 0.
    Flat,
    /// ψ(x') = slope · x'.
    Linear { slope: [f64; 2] },
    /// ψ(x') = amplitude · sin(frequency · x'_1).
    Sinusoid { amplitude: f64, frequency: f64 },
    /// ψ(x') = coeff · |x'|^(1+exponent); exactly C^{1,exponent} at the origin.
    Cusp { coeff: f64, exponent: f64 },
    /// User-supplied profile with its gradient and a resolution length scale
    /// that quadrature panels must not exceed.
    Custom { psi: Arc<ProfileFn>, grad: Arc<GradientFn>, resolution: f64 },
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Flat => write!(f, "Flat"),
            Profile::Linear { slope } => write!(f, "Linear({slope:?})"),
            Profile::Sinusoid { amplitude, frequency } => {
                write!(f, "Sinusoid(amp={amplitude}, freq={frequency})")
            }
            Profile::Cusp { coeff, exponent } => write!(f, "Cusp(c={coeff}, alpha0={exponent})"),
            Profile::Custom { .. } => write!(f, "Custom"),
        }
    }
}

/// Hölder regularity metadata of a profile, when known in closed form.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct HolderData {
    /// Exponent α₀ of the gradient modulus.
    pub exponent: f64,
    /// Bound on the `C^{1,α₀}` seminorm of ψ over the unit base ball.
    pub seminorm: f64,
}

/// A sample of the interface: the ambient point, the unit normal, and the
/// surface area element at that point.
#[derive(Debug, Clone, Copy)]
pub struct SurfaceSample {
    pub point: Point,
    pub normal: Point,
    pub area_element: f64,
}

/// The interface as a graph over the unit (n-1)-ball.
#[derive(Debug, Clone)]
pub struct InterfaceGraph {
    n: usize,
    profile: Profile,
    holder: Option<HolderData>,
    upward: bool,
}

impl InterfaceGraph {
    pub fn new(n: usize, profile: Profile) -> Result<Self> {
        if n != 2 && n != 3 {
            return Err(Error::Config(format!("dimension must be 2 or 3, got {n}")));
        }
        let holder = match profile {
            Profile::Flat => Some(HolderData { exponent: 1.0, seminorm: 0.0 }),
            Profile::Linear { .. } => Some(HolderData { exponent: 1.0, seminorm: 0.0 }),
            Profile::Sinusoid { amplitude, frequency } => Some(HolderData {
                exponent: 1.0,
                seminorm: (amplitude * frequency * frequency).abs(),
            }),
            Profile::Cusp { coeff, exponent } => {
                if !(0.0 < exponent && exponent < 1.0) {
                    return Err(Error::Config(format!(
                        "cusp exponent must lie in (0,1), got {exponent}"
                    )));
                }
                // sup |∇'ψ(x')| / |x'|^α₀ = c(1+α₀)
                Some(HolderData { exponent, seminorm: coeff.abs() * (1.0 + exponent) })
            }
            Profile::Custom { .. } => None,
        };
        Ok(InterfaceGraph { n, profile, holder, upward: true })
    }

    /// Flip the normal to point downward (interior to the lower phase).
    pub fn with_downward_normal(mut self) -> Self {
        self.upward = false;
        self
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn holder_data(&self) -> Option<HolderData> {
        self.holder
    }

    pub fn family_name(&self) -> &'static str {
        match self.profile {
            Profile::Flat => "flat",
            Profile::Linear { .. } => "linear",
            Profile::Sinusoid { .. } => "sinusoid",
            Profile::Cusp { .. } => "cusp",
            Profile::Custom { .. } => "custom",
        }
    }

    /// Height ψ(x').
    pub fn psi(&self, xp: &[f64]) -> f64 {
        match &self.profile {
            Profile::Flat => 0.0,
            Profile::Linear { slope } => {
                slope[..xp.len()].iter().zip(xp).map(|(s, x)| s * x).sum()
            }
            Profile::Sinusoid { amplitude, frequency } => amplitude * (frequency * xp[0]).sin(),
            Profile::Cusp { coeff, exponent } => {
                let r = base_norm(xp);
                coeff * r.powf(1.0 + exponent)
            }
            Profile::Custom { psi, .. } => psi(xp),
        }
    }

    /// Gradient ∇'ψ(x') (padded with zeros to length 2).
    pub fn grad_psi(&self, xp: &[f64]) -> [f64; 2] {
        match &self.profile {
            Profile::Flat => [0.0, 0.0],
            Profile::Linear { slope } => {
                let mut g = [0.0, 0.0];
                g[..xp.len()].copy_from_slice(&slope[..xp.len()]);
                g
            }
            Profile::Sinusoid { amplitude, frequency } => {
                [amplitude * frequency * (frequency * xp[0]).cos(), 0.0]
            }
            Profile::Cusp { coeff, exponent } => {
                let r = base_norm(xp);
                if r == 0.0 {
                    return [0.0, 0.0];
                }
                let scale = coeff * (1.0 + exponent) * r.powf(exponent - 1.0);
                let mut g = [0.0, 0.0];
                for (gi, xi) in g.iter_mut().zip(xp) {
                    *gi = scale * xi;
                }
                g
            }
            Profile::Custom { grad, .. } => grad(xp),
        }
    }

    /// Shortest wavelength-like feature size; quadrature panels are capped by
    /// a fraction of this.
    pub fn resolution_scale(&self) -> f64 {
        match &self.profile {
            Profile::Flat | Profile::Linear { .. } => f64::INFINITY,
            Profile::Sinusoid { frequency, .. } => {
                if *frequency == 0.0 {
                    f64::INFINITY
                } else {
                    2.0 * std::f64::consts::PI / frequency.abs()
                }
            }
            // cusp gradients vary fastest near the origin; graded panels
            // toward 0 handle that, so no global cap is needed
            Profile::Cusp { .. } => f64::INFINITY,
            Profile::Custom { resolution, .. } => *resolution,
        }
    }

    /// Evaluate the interface at a base point `x'` in the open unit ball:
    /// returns the ambient point, unit normal, and area element.
    pub fn eval(&self, xp: &[f64]) -> Result<SurfaceSample> {
        if xp.len() != self.n - 1 {
            return Err(Error::Domain(format!(
                "base point has {} coordinates, expected {}",
                xp.len(),
                self.n - 1
            )));
        }
        let r = base_norm(xp);
        if r >= 1.0 {
            return Err(Error::Domain(format!("|x'| = {r} is not < 1")));
        }
        Ok(self.eval_unchecked(xp))
    }

    pub(crate) fn eval_unchecked(&self, xp: &[f64]) -> SurfaceSample {
        let h = self.psi(xp);
        let g = self.grad_psi(xp);
        let gsq: f64 = g[..self.n - 1].iter().map(|v| v * v).sum();
        let area = (1.0 + gsq).sqrt();
        let sign = if self.upward { 1.0 } else { -1.0 };
        let mut nu = [0.0; 3];
        for i in 0..self.n - 1 {
            nu[i] = -sign * g[i] / area;
        }
        nu[self.n - 1] = sign / area;
        SurfaceSample {
            point: Point::graph(xp, h),
            normal: Point::new(&nu[..self.n]),
            area_element: area,
        }
    }

    /// Rescale the profile vertically by `factor` (ψ ↦ factor · ψ).
    pub fn scaled(&self, factor: f64) -> InterfaceGraph {
        let profile = match &self.profile {
            Profile::Flat => Profile::Flat,
            Profile::Linear { slope } => {
                Profile::Linear { slope: [slope[0] * factor, slope[1] * factor] }
            }
            Profile::Sinusoid { amplitude, frequency } => {
                Profile::Sinusoid { amplitude: amplitude * factor, frequency: *frequency }
            }
            Profile::Cusp { coeff, exponent } => {
                Profile::Cusp { coeff: coeff * factor, exponent: *exponent }
            }
            Profile::Custom { psi, grad, resolution } => {
                let (p, g) = (psi.clone(), grad.clone());
                Profile::Custom {
                    psi: Arc::new(move |xp: &[f64]| factor * p(xp)),
                    grad: Arc::new(move |xp: &[f64]| {
                        let gg = g(xp);
                        [factor * gg[0], factor * gg[1]]
                    }),
                    resolution: *resolution,
                }
            }
        };
        let mut out = InterfaceGraph::new(self.n, profile).expect("rescale preserves validity");
        out.upward = self.upward;
        out
    }

    /// Grid extrema of |ψ| and of the vertical normal component:
    /// `(sup |ψ|, min ν_n)`. Callers compare against θε and 1-ε.
    pub fn flatness_horizontality(&self, resolution: usize) -> Result<(f64, f64)> {
        if resolution < 64 {
            return Err(Error::Precondition(format!(
                "grid resolution must be >= 64 points per axis, got {resolution}"
            )));
        }
        let mut sup_psi: f64 = 0.0;
        let mut min_nun: f64 = f64::INFINITY;
        let mut visit = |xp: &[f64]| {
            let s = self.eval_unchecked(xp);
            sup_psi = sup_psi.max(s.point.vertical().abs());
            min_nun = min_nun.min(s.normal.coord(self.n - 1).abs());
        };
        if self.n == 2 {
            for i in 0..resolution {
                let t = -1.0 + 2.0 * (i as f64 + 0.5) / resolution as f64;
                visit(&[t]);
            }
        } else {
            for i in 0..resolution {
                let u = -1.0 + 2.0 * (i as f64 + 0.5) / resolution as f64;
                for j in 0..resolution {
                    let v = -1.0 + 2.0 * (j as f64 + 0.5) / resolution as f64;
                    if u * u + v * v < 1.0 {
                        visit(&[u, v]);
                    }
                }
            }
        }
        Ok((sup_psi, min_nun))
    }

    /// Surface integral `∫_Γ f dH^{n-1}` via the pullback
    /// `∫ f(x', ψ(x')) √(1+|∇'ψ|²) dx'` over the unit base ball, with an
    /// order-doubling error estimate.
    pub fn surface_integral(
        &self,
        f: &(dyn Fn(&Point) -> f64 + Sync),
        order: usize,
    ) -> Result<Estimate> {
        let coarse = self.surface_integral_fixed(f, order)?;
        let fine = self.surface_integral_fixed(f, 2 * order)?;
        Ok(Estimate { value: fine, error: (fine - coarse).abs() })
    }

    fn surface_integral_fixed(
        &self,
        f: &(dyn Fn(&Point) -> f64 + Sync),
        order: usize,
    ) -> Result<f64> {
        let order = order.max(4);
        let max_panel = (self.resolution_scale() * 0.5).min(2.0);
        if self.n == 2 {
            let panels = quad::graded_panels(-1.0, 1.0, 0.0, max_panel, max_panel);
            let est = quad::integrate_panels(&panels, order, |t| {
                let s = self.eval_unchecked(&[t]);
                f(&s.point) * s.area_element
            })?;
            Ok(est.value)
        } else {
            // polar rule: GL in radius, periodic trapezoid in angle
            let m_ang = (2 * order).max(16);
            let rule = quad::gauss_legendre(order);
            let mut bad = false;
            let v = quad::trapezoid_periodic(m_ang, |phi| {
                let (c, s) = (phi.cos(), phi.sin());
                rule.integrate(0.0, 1.0, |r| {
                    let xp = [r * c, r * s];
                    let smp = self.eval_unchecked(&xp);
                    let y = f(&smp.point) * smp.area_element * r;
                    if !y.is_finite() {
                        bad = true;
                    }
                    y
                })
            });
            if bad {
                return Err(Error::Evaluation("non-finite surface integrand sample".into()));
            }
            Ok(v)
        }
    }

    /// Base-parameter intervals over which the graph lies strictly inside the
    /// given ball (n = 2). The layer-potential integration is restricted to
    /// these, matching `Γ ⊂ B_1`.
    pub(crate) fn inside_ball_intervals(&self, ball: &Ball) -> Vec<(f64, f64)> {
        let inside = |t: f64| -> f64 {
            let p = Point::graph(&[t], self.psi(&[t]));
            ball.radius * ball.radius - p.sub(&ball.center).norm_sq()
        };
        intervals_where_positive(-1.0, 1.0, 2048, inside)
    }

    /// Radial extent of the in-ball part of the base domain along the ray
    /// `x' = p + ρ·dir` (n = 3): first the unit-disk rim, then shortened if
    /// the graph exits the ambient ball earlier.
    pub(crate) fn ray_extent(&self, ball: &Ball, p: &[f64; 2], dir: &[f64; 2]) -> f64 {
        let rim = ray_circle_exit(p, dir, &[0.0, 0.0], 1.0);
        let inside = |rho: f64| -> f64 {
            let xp = [p[0] + rho * dir[0], p[1] + rho * dir[1]];
            let q = Point::graph(&xp, self.psi(&xp));
            ball.radius * ball.radius - q.sub(&ball.center).norm_sq()
        };
        if inside(rim) >= 0.0 {
            return rim;
        }
        // bisect the exit point on [0, rim]
        let (mut lo, mut hi) = (0.0, rim);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if inside(mid) >= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }
}

fn base_norm(xp: &[f64]) -> f64 {
    xp.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Intervals of `[a, b]` where `f > 0`, found by scanning and bisection.
pub(crate) fn intervals_where_positive(
    a: f64,
    b: f64,
    m: usize,
    f: impl Fn(f64) -> f64,
) -> Vec<(f64, f64)> {
    let roots = quad::scan_roots(a, b, m, &f);
    let mut edges = vec![a];
    edges.extend(roots);
    edges.push(b);
    let mut out: Vec<(f64, f64)> = Vec::new();
    for pair in edges.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        if hi - lo < 1e-14 {
            continue;
        }
        if f(0.5 * (lo + hi)) > 0.0 {
            if let Some((_, prev_hi)) = out.last_mut() {
                if (*prev_hi - lo).abs() < 1e-13 {
                    *prev_hi = hi;
                    continue;
                }
            }
            out.push((lo, hi));
        }
    }
    out
}

/// Exit parameter of the ray `p + t·dir` (|dir| = 1) from the disk of the
/// given center and radius; `p` must lie inside.
pub(crate) fn ray_circle_exit(
    p: &[f64; 2],
    dir: &[f64; 2],
    center: &[f64; 2],
    radius: f64,
) -> f64 {
    let dx = [p[0] - center[0], p[1] - center[1]];
    let b = dir[0] * dx[0] + dir[1] * dx[1];
    let c0 = dx[0] * dx[0] + dx[1] * dx[1] - radius * radius;
    let disc = (b * b - c0).max(0.0);
    -b + disc.sqrt()
}

/// Parameters of the stability experiment. `M = 1 + 2θ` is derived, never
/// stored independently.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct StabilityParams {
    pub theta: f64,
    pub eps: f64,
    pub delta: f64,
    pub gamma: f64,
}

impl StabilityParams {
    pub fn new(theta: f64, eps: f64, delta: f64, gamma: f64) -> Result<Self> {
        if !(0.0 < theta && theta < 0.5) || !(0.0 < eps && eps < 0.5) {
            return Err(Error::Precondition(format!(
                "need 0 < theta, eps < 1/2 (got theta={theta}, eps={eps})"
            )));
        }
        if !(0.0 < delta && delta < 1.0) || !(0.0 < gamma && gamma < 1.0) {
            return Err(Error::Precondition(format!(
                "need 0 < delta, gamma < 1 (got delta={delta}, gamma={gamma})"
            )));
        }
        Ok(StabilityParams { theta, eps, delta, gamma })
    }

    pub fn m(&self) -> f64 {
        1.0 + 2.0 * self.theta
    }

    /// Barrier densities `(Mⁿ(1+δ)(1-ε)⁻¹, M⁻ⁿ(1-δ))`.
    pub fn barrier_densities(&self, n: usize) -> (f64, f64) {
        let mn = self.m().powi(n as i32);
        ((1.0 + self.delta) / (1.0 - self.eps) * mn, (1.0 - self.delta) / mn)
    }

    /// The barrier imbalance: `1 + η` is the mean of the two barrier
    /// densities.
    pub fn eta(&self, n: usize) -> f64 {
        let (lo, hi) = self.barrier_densities(n);
        0.5 * (lo + hi) - 1.0
    }
}

/// Mean-value inclusion radii around a point at height `x_n`:
/// outer = `√((Mε)² - (x_n+θε)²)`, inner = `√(ε² - (x_n+θε)²)`.
///
/// `outer = None` marks the vacuous case (negative radicand); `inner = None`
/// when `x_n ≥ (1-θ)ε`, where the inner comparison set is empty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InclusionRadii {
    pub outer: Option<f64>,
    pub inner: Option<f64>,
}

/// Inclusion radii for the chord sets of `B_ε(x)` and `B_Mε(x)` against the
/// reference plane at height `-θε`. Callers must have `x ∈ B_{1-Mε}` and the
/// height context `|x_n| < (1+θ)ε` for nonvacuous output.
pub fn inclusion_radii(params: &StabilityParams, x_n: f64) -> InclusionRadii {
    let shift = x_n + params.theta * params.eps;
    let m_eps = params.m() * params.eps;
    let outer_sq = m_eps * m_eps - shift * shift;
    let outer = if outer_sq > 0.0 { Some(outer_sq.sqrt()) } else { None };
    let inner = if x_n < (1.0 - params.theta) * params.eps {
        let inner_sq = params.eps * params.eps - shift * shift;
        if inner_sq > 0.0 {
            Some(inner_sq.sqrt())
        } else {
            None
        }
    } else {
        None
    };
    InclusionRadii { outer, inner }
}

/// Build one of the named test interfaces.
///
/// Families: `flat`, `linear` (slope), `sinusoid` (amplitude, frequency),
/// `cusp` (coeff, exponent in (0,1)).
pub fn make_test_interface(n: usize, family: &str, params: &[f64]) -> Result<InterfaceGraph> {
    let profile = match family {
        "flat" => Profile::Flat,
        "linear" => {
            let mut slope = [0.0, 0.0];
            if params.is_empty() || params.len() > n - 1 {
                return Err(Error::Config(format!(
                    "linear family needs 1..{} slope components, got {}",
                    n - 1,
                    params.len()
                )));
            }
            slope[..params.len()].copy_from_slice(params);
            Profile::Linear { slope }
        }
        "sinusoid" => {
            if params.len() != 2 {
                return Err(Error::Config(
                    "sinusoid family needs (amplitude, frequency)".into(),
                ));
            }
            Profile::Sinusoid { amplitude: params[0], frequency: params[1] }
        }
        "cusp" => {
            if params.len() != 2 {
                return Err(Error::Config("cusp family needs (coeff, exponent)".into()));
            }
            Profile::Cusp { coeff: params[0], exponent: params[1] }
        }
        other => {
            return Err(Error::Config(format!("unknown interface family `{other}`")));
        }
    };
    InterfaceGraph::new(n, profile)
}

/// Sinusoid that is θε-flat and ε-horizontal by construction: amplitude θε
/// and the largest frequency with `max |ψ'| = √((1-ε)⁻² - 1)`.
pub fn admissible_sinusoid(n: usize, theta: f64, eps: f64) -> Result<InterfaceGraph> {
    let amp = theta * eps;
    let slope_max = ((1.0 - eps).powi(-2) - 1.0).sqrt();
    let freq = if amp == 0.0 { 0.0 } else { slope_max / amp };
    InterfaceGraph::new(n, Profile::Sinusoid { amplitude: amp, frequency: freq })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_graph_at_origin() {
        let g = make_test_interface(2, "flat", &[]).unwrap();
        let s = g.eval(&[0.0]).unwrap();
        assert_eq!(s.point, Point::xy(0.0, 0.0));
        assert_eq!(s.normal, Point::xy(0.0, 1.0));
        assert_eq!(s.area_element, 1.0);
    }

    #[test]
    fn linear_graph_sample() {
        // ψ(x') = x'/2 at x' = 0.4: point (0.4, 0.2), ν = (-0.5, 1)/√1.25
        let g = make_test_interface(2, "linear", &[0.5]).unwrap();
        let s = g.eval(&[0.4]).unwrap();
        assert!((s.point.coord(0) - 0.4).abs() < 1e-15);
        assert!((s.point.coord(1) - 0.2).abs() < 1e-15);
        let scale = 1.25f64.sqrt();
        assert!((s.normal.coord(0) + 0.5 / scale).abs() < 1e-15);
        assert!((s.normal.coord(1) - 1.0 / scale).abs() < 1e-15);
        assert!((s.area_element - 1.118034).abs() < 1e-6);
    }

    #[test]
    fn sinusoid_normal_component() {
        // ψ = 0.004 sin(10 x'): ν_n at 0 is 1/√(1+0.0016)
        let g = make_test_interface(2, "sinusoid", &[0.004, 10.0]).unwrap();
        let s = g.eval(&[0.0]).unwrap();
        assert!((s.normal.coord(1) - 0.999201).abs() < 1e-6);
    }

    #[test]
    fn out_of_domain_base_point_errors() {
        let g = make_test_interface(2, "flat", &[]).unwrap();
        assert!(matches!(g.eval(&[1.0]), Err(Error::Domain(_))));
        assert!(matches!(g.eval(&[-1.2]), Err(Error::Domain(_))));
    }

    #[test]
    fn downward_flag_flips_normal() {
        let g = make_test_interface(2, "linear", &[0.5]).unwrap().with_downward_normal();
        let s = g.eval(&[0.4]).unwrap();
        let scale = 1.25f64.sqrt();
        assert!((s.normal.coord(0) - 0.5 / scale).abs() < 1e-15);
        assert!((s.normal.coord(1) + 1.0 / scale).abs() < 1e-15);
    }

    #[test]
    fn cusp_gradient_matches_symbolic_form() {
        // ψ = 0.01 |x'|^1.5, ∇'ψ = 0.015 |x'|^0.5 sign(x')
        let g = make_test_interface(2, "cusp", &[0.01, 0.5]).unwrap();
        let d = g.grad_psi(&[0.25]);
        assert!((d[0] - 0.015 * 0.5).abs() < 1e-15);
        let d = g.grad_psi(&[-0.25]);
        assert!((d[0] + 0.015 * 0.5).abs() < 1e-15);
        assert!((g.holder_data().unwrap().seminorm - 0.015).abs() < 1e-15);
        // 3d cusp gradient points radially
        let g3 = make_test_interface(3, "cusp", &[0.01, 0.5]).unwrap();
        let d3 = g3.grad_psi(&[0.3, 0.4]);
        let r: f64 = 0.5;
        let scale = 0.015 * r.sqrt() / r;
        assert!((d3[0] - scale * 0.3).abs() < 1e-14);
        assert!((d3[1] - scale * 0.4).abs() < 1e-14);
    }

    #[test]
    fn unknown_family_is_config_error() {
        assert!(matches!(make_test_interface(2, "sawtooth", &[]), Err(Error::Config(_))));
        assert!(matches!(
            make_test_interface(2, "cusp", &[0.01, 1.5]),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn flatness_horizontality_on_profiles() {
        let flat = make_test_interface(2, "flat", &[]).unwrap();
        let (f, h) = flat.flatness_horizontality(64).unwrap();
        assert_eq!(f, 0.0);
        assert_eq!(h, 1.0);

        let sin = make_test_interface(2, "sinusoid", &[0.004, 10.0]).unwrap();
        let (f, h) = sin.flatness_horizontality(512).unwrap();
        assert!((f - 0.004).abs() < 1e-6);
        assert!((h - 0.999201).abs() < 1e-6);

        let lin = make_test_interface(2, "linear", &[0.3]).unwrap();
        let (f, h) = lin.flatness_horizontality(64).unwrap();
        assert!((f - 0.3).abs() < 0.01); // midpoint grid, sup at the open rim
        assert!((h - 0.957826).abs() < 1e-6);

        assert!(flat.flatness_horizontality(32).is_err());
    }

    #[test]
    fn admissible_sinusoid_passes_hypotheses() {
        let g = admissible_sinusoid(2, 0.1, 0.1).unwrap();
        let (f, h) = g.flatness_horizontality(512).unwrap();
        assert!(f <= 0.1 * 0.1 + 1e-12);
        assert!(h >= 1.0 - 0.1 - 1e-12);
    }

    #[test]
    fn surface_integral_closed_forms() {
        let flat = make_test_interface(2, "flat", &[]).unwrap();
        let est = flat.surface_integral(&|_: &Point| 1.0, 16).unwrap();
        assert!((est.value - 2.0).abs() < 1e-12);

        // ψ = x'/2: length = 2√1.25 = √5
        let lin = make_test_interface(2, "linear", &[0.5]).unwrap();
        let est = lin.surface_integral(&|_: &Point| 1.0, 16).unwrap();
        assert!((est.value - 5.0f64.sqrt()).abs() < 1e-12);

        // odd integrand over a symmetric flat graph
        let est = flat.surface_integral(&|p: &Point| p.coord(0), 16).unwrap();
        assert!(est.value.abs() < 1e-13);

        // n = 3 flat: area of the unit disk
        let flat3 = make_test_interface(3, "flat", &[]).unwrap();
        let est = flat3.surface_integral(&|_: &Point| 1.0, 16).unwrap();
        assert!((est.value - std::f64::consts::PI).abs() < 1e-10);
    }

    #[test]
    fn surface_integral_rejects_non_finite() {
        let flat = make_test_interface(2, "flat", &[]).unwrap();
        let res = flat.surface_integral(
            &|p: &Point| if p.coord(0) > 0.5 { f64::NAN } else { 1.0 },
            16,
        );
        assert!(matches!(res, Err(Error::Evaluation(_))));
    }

    #[test]
    fn inclusion_radii_closed_forms() {
        let p = StabilityParams::new(0.1, 0.1, 0.5, 0.5).unwrap();
        let r = inclusion_radii(&p, 0.05);
        assert!((r.outer.unwrap() - 0.103923).abs() < 1e-6);
        assert!((r.inner.unwrap() - 0.08).abs() < 1e-12);

        // x_n ≥ (1-θ)ε: inner set empty
        let r = inclusion_radii(&p, 0.095);
        assert!(r.inner.is_none());
        assert!(r.outer.is_some());

        // θ → 0 limit: inner = outer = ε
        let p0 = StabilityParams::new(1e-300, 0.1, 0.5, 0.5).unwrap();
        let r = inclusion_radii(&p0, 0.0);
        assert!((r.outer.unwrap() - 0.1).abs() < 1e-12);
        assert!((r.inner.unwrap() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn stability_params_validation() {
        assert!(StabilityParams::new(0.6, 0.1, 0.5, 0.5).is_err());
        assert!(StabilityParams::new(0.1, 0.1, 1.5, 0.5).is_err());
        let p = StabilityParams::new(0.1, 0.1, 0.05, 0.5).unwrap();
        assert!((p.m() - 1.2).abs() < 1e-15);
        // n = 2: densities 1.68 and 0.659722, η = 0.169861
        let (lo, hi) = p.barrier_densities(2);
        assert!((lo - 1.68).abs() < 1e-12);
        assert!((hi - 0.6597222222222222).abs() < 1e-12);
        assert!((p.eta(2) - 0.1698611111111111).abs() < 1e-12);
    }

    #[test]
    fn inside_ball_intervals_truncate_steep_graphs() {
        let lin = make_test_interface(2, "linear", &[0.3]).unwrap();
        let iv = lin.inside_ball_intervals(&Ball::unit(2));
        assert_eq!(iv.len(), 1);
        let lim = 1.0 / (1.09f64).sqrt();
        assert!((iv[0].0 + lim).abs() < 1e-9);
        assert!((iv[0].1 - lim).abs() < 1e-9);
    }
}
