//! Mean-value averaging: `u_ε(x) = |B_ε|⁻¹ ∫_{B_ε(x)} u`, the interface
//! average `g_ε(x) = |B_ε|⁻¹ ∫_{Γ∩B_ε(x)} g dH^{n-1}`, and the identity
//! `Δu_ε = g_ε`.
//!
//! Two routes to `u_ε` coexist on purpose. The generic `ball_average` is a
//! polar-grid rule over `B_ε(x)` for any field; [`AveragedField`] instead
//! averages the Green kernel itself in closed form (harmonic image part via
//! the mean value property, fundamental part via the uniform-ball potential),
//! which keeps discrete Laplacians of `u_ε` quadrature-clean. The two routes
//! cross-validate each other in tests.

use crate::error::{Error, Result};
use crate::point::{Ball, Point};
use crate::potential::{LayerSurface, ScalarField, SolutionField};
use crate::quad::{self, Estimate};

/// Polar-grid average of any field over `B_eps(x)`: Gauss-Legendre in
/// radius, uniform in angle, with an order-halving error estimate.
pub fn ball_average(
    u: &dyn ScalarField,
    x: &Point,
    eps: f64,
    order: usize,
) -> Result<Estimate> {
    if eps <= 0.0 {
        return Err(Error::Domain("averaging radius must be positive".into()));
    }
    if let Some(ball) = u.domain() {
        if ball.boundary_dist(x) <= eps {
            return Err(Error::Domain(format!(
                "averaging ball of radius {eps} exits the domain (boundary distance {:.3e})",
                ball.boundary_dist(x)
            )));
        }
    }
    let fine = ball_average_fixed(u, x, eps, order.max(4))?;
    let coarse = ball_average_fixed(u, x, eps, (order.max(4) / 2).max(2))?;
    Ok(Estimate { value: fine, error: (fine - coarse).abs() + fine_eval_error(u, x)? })
}

// evaluation error of the base field at the center, a proxy for the
// integrand's own accuracy
fn fine_eval_error(u: &dyn ScalarField, x: &Point) -> Result<f64> {
    Ok(u.value(x)?.error)
}

fn ball_average_fixed(u: &dyn ScalarField, x: &Point, eps: f64, order: usize) -> Result<f64> {
    let n = u.dim();
    let rule = quad::gauss_legendre(order);
    if n == 2 {
        let m = (2 * order).max(8);
        let mut acc = 0.0;
        for j in 0..m {
            let a = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
            let dir = Point::xy(a.cos(), a.sin());
            let mut failure = None;
            acc += rule.integrate(0.0, eps, |r| match u.value(&x.offset(&dir, r)) {
                Ok(v) => r * v.value,
                Err(e) => {
                    failure = Some(e);
                    f64::NAN
                }
            });
            if let Some(e) = failure {
                return Err(e);
            }
        }
        Ok(acc * (2.0 * std::f64::consts::PI / m as f64) / (std::f64::consts::PI * eps * eps))
    } else {
        let mu_rule = quad::gauss_legendre(order);
        let m = (2 * order).max(8);
        let mut acc = 0.0;
        for j in 0..m {
            let a = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
            let mut failure = None;
            acc += mu_rule.integrate(-1.0, 1.0, |mu| {
                let s = (1.0 - mu * mu).max(0.0).sqrt();
                let dir = Point::xyz(s * a.cos(), s * a.sin(), mu);
                rule.integrate(0.0, eps, |r| match u.value(&x.offset(&dir, r)) {
                    Ok(v) => r * r * v.value,
                    Err(e) => {
                        failure = Some(e);
                        f64::NAN
                    }
                })
            });
            if let Some(e) = failure {
                return Err(e);
            }
        }
        Ok(acc * (2.0 * std::f64::consts::PI / m as f64) / Ball::volume_of(3, eps))
    }
}

/// Interface average `g_ε(x) = |B_ε|⁻¹ ∫ over the chord set
/// {y' : (y', ψ(y')) ∈ B_ε(x)}` of `g √(1+|∇'ψ|²)`. Returns 0 when the chord
/// set is empty. Chord boundaries are located by bisection on the crossing
/// equation `|(y', ψ(y')) - x| = ε`.
pub fn interface_average(
    g: &crate::potential::DensityField,
    surface: &LayerSurface,
    x: &Point,
    eps: f64,
    order: usize,
) -> Result<Estimate> {
    interface_average_in(&Ball::unit(x.dim()), g, surface, x, eps, order)
}

fn interface_average_in(
    ball: &Ball,
    g: &crate::potential::DensityField,
    surface: &LayerSurface,
    x: &Point,
    eps: f64,
    order: usize,
) -> Result<Estimate> {
    let n = x.dim();
    if ball.boundary_dist(x) <= eps {
        return Err(Error::Domain(format!(
            "averaging ball of radius {eps} exits the domain"
        )));
    }
    let order = order.max(8);
    let vol = Ball::volume_of(n, eps);
    if n == 2 {
        let mut acc = Estimate::exact(0.0);
        for (lo, hi) in surface.base_intervals(ball)? {
            // the chord set is within |y' - x'| < eps
            let lo = lo.max(x.coord(0) - eps);
            let hi = hi.min(x.coord(0) + eps);
            if hi <= lo {
                continue;
            }
            let cuts = surface.sphere_crossings_1d((lo, hi), x, eps);
            let panels = quad::split_panels(&[(lo, hi)], &cuts);
            for (a, b) in panels {
                let mid = 0.5 * (a + b);
                let (p, _) = surface.sample(&[mid]);
                if p.dist(x) >= eps {
                    continue;
                }
                let est = quad::integrate_panels(&[(a, b)], order, |t| {
                    let (p, area) = surface.sample(&[t]);
                    g.eval(&p) * area
                })?;
                acc = acc.add(&est);
            }
        }
        Ok(acc.scale(1.0 / vol))
    } else {
        let (disk_c, disk_r) = surface.base_disk(ball)?;
        // project x' into the base disk
        let mut p0 = [x.coord(0) - disk_c[0], x.coord(1) - disk_c[1]];
        let pr = (p0[0] * p0[0] + p0[1] * p0[1]).sqrt();
        if pr > disk_r * (1.0 - 1e-9) {
            let s = disk_r * (1.0 - 1e-9) / pr;
            p0[0] *= s;
            p0[1] *= s;
        }
        let p0 = [disk_c[0] + p0[0], disk_c[1] + p0[1]];
        let m = 64usize;
        let h = 2.0 * std::f64::consts::PI / m as f64;
        let mut val = 0.0;
        let mut err = 0.0;
        for j in 0..m {
            let a = j as f64 * h;
            let dir = [a.cos(), a.sin()];
            let rho_max = surface.ray_extent(ball, &p0, &dir).min(2.0 * eps);
            if rho_max <= 0.0 {
                continue;
            }
            let cuts = surface.sphere_crossings_ray(&p0, &dir, rho_max, x, eps);
            let panels = quad::split_panels(&[(0.0, rho_max)], &cuts);
            for (lo, hi) in panels {
                let mid = 0.5 * (lo + hi);
                let xp = [p0[0] + mid * dir[0], p0[1] + mid * dir[1]];
                let (p, _) = surface.sample(&xp);
                if p.dist(x) >= eps {
                    continue;
                }
                let est = quad::integrate_panels(&[(lo, hi)], order, |rho| {
                    let xp = [p0[0] + rho * dir[0], p0[1] + rho * dir[1]];
                    let (p, area) = surface.sample(&xp);
                    g.eval(&p) * area * rho
                })?;
                val += est.value * h;
                err += est.error * h;
            }
        }
        Ok(Estimate { value: val / vol, error: err / vol })
    }
}

/// The averaged field `u_ε` with its companion interface average `g_ε`,
/// built on the exactly averaged kernel of the base field.
pub struct AveragedField<'a> {
    base: &'a SolutionField,
    radius: f64,
}

impl<'a> AveragedField<'a> {
    pub fn new(base: &'a SolutionField, radius: f64) -> Result<Self> {
        if radius <= 0.0 {
            return Err(Error::Domain("averaging radius must be positive".into()));
        }
        Ok(AveragedField { base, radius })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// `u_ε(x)`; defined for `dist(x, ∂B) > ε`.
    pub fn value(&self, x: &Point) -> Result<Estimate> {
        self.base.ball_mean(x, self.radius)
    }

    /// `g_ε(x)`: the interface averages of the base field's layer densities,
    /// weighted by their coefficients. Vanishes when `dist(x, Γ) ≥ ε`.
    pub fn interface_average(&self, x: &Point) -> Result<Estimate> {
        let mut acc = Estimate::exact(0.0);
        let order = self.base.quad_config().surface_order.clamp(8, 32);
        for (coeff, comp) in self.base.components() {
            if let crate::potential::Component::Layer { surface, density } = comp {
                let est = interface_average_in(
                    self.base.ball(),
                    density,
                    surface,
                    x,
                    self.radius,
                    order,
                )?;
                acc = acc.add(&est.scale(coeff));
            }
        }
        Ok(acc)
    }
}

/// Outcome of checking `Δu_ε(x) = g_ε(x)` with a discrete Laplacian.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct LaplacianMatch {
    pub residual: f64,
    pub discrete_laplacian: f64,
    pub interface_average: f64,
    /// The O(h²) truncation budget of the stencil, estimated by Richardson
    /// comparison with the 2h stencil: `|Δ_{2h} - Δ_h| / 3`.
    pub fd_budget: f64,
    /// Quadrature error of the stencil entries propagated through `1/h²`.
    pub quad_budget: f64,
}

/// Compare the 5-point (n = 2) / 7-point (n = 3) discrete Laplacian of `u_ε`
/// at `x` with `g_ε(x)`.
pub fn laplacian_match(field: &AveragedField, x: &Point, h: f64) -> Result<LaplacianMatch> {
    let eps = field.radius();
    let ball = *field.base.ball();
    if ball.boundary_dist(x) <= eps + 2.0 * h {
        return Err(Error::Domain(format!(
            "stencil of step 2*{h} plus averaging radius {eps} exceeds the boundary margin {:.3e}",
            ball.boundary_dist(x)
        )));
    }
    let n = x.dim();
    let center = field.value(x)?;
    let mut acc = -2.0 * n as f64 * center.value;
    let mut acc2 = acc;
    let mut quad = 2.0 * n as f64 * center.error;
    for i in 0..n {
        let mut e = [0.0; 3];
        e[i] = 1.0;
        let dir = Point::new(&e[..n]);
        for s in [-1.0, 1.0] {
            let v = field.value(&x.offset(&dir, s * h))?;
            acc += v.value;
            quad += v.error;
            let v2 = field.value(&x.offset(&dir, 2.0 * s * h))?;
            acc2 += v2.value;
        }
    }
    let lap = acc / (h * h);
    let lap2 = acc2 / (4.0 * h * h);
    let g_eps = field.interface_average(x)?;
    Ok(LaplacianMatch {
        residual: (lap - g_eps.value).abs(),
        discrete_laplacian: lap,
        interface_average: g_eps.value,
        fd_budget: (lap2 - lap).abs() / 3.0,
        quad_budget: quad / (h * h) + g_eps.error,
    })
}
