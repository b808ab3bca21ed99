//! Quadrature engine for layer potentials.
//!
//! n = 2: panels over the base parameter, graded geometrically toward the
//! projection of the target onto the surface, capped by the profile's
//! resolution scale. n = 3: polar coordinates around the projected target,
//! graded radially, periodic trapezoid in angle. Averaged kernels get extra
//! panel breaks where the surface crosses the averaging sphere, restoring
//! per-panel smoothness.

use super::green;
use super::surface::{DensityField, LayerSurface};
use super::QuadConfig;
use crate::error::{Error, Result};
use crate::point::{Ball, Point};
use crate::quad::{self, Estimate};

/// What to integrate against the density.
#[derive(Clone, Copy)]
pub(crate) enum Kernel {
    /// `G(x, ·)`.
    Value,
    /// Mean of `G(·, y)` over `B_eps(x)` (exact averaged kernel).
    Mean(f64),
    /// `∇_x G(x, ·)`, all components.
    Gradient,
}

impl Kernel {
    fn ncomp(&self, n: usize) -> usize {
        match self {
            Kernel::Gradient => n,
            _ => 1,
        }
    }

    fn eval(&self, ball: &Ball, x: &Point, y: &Point, out: &mut [f64; 3]) -> Result<()> {
        match self {
            Kernel::Value => {
                out[0] = green::green(ball, x, y)?;
            }
            Kernel::Mean(eps) => {
                out[0] = green::green_ball_mean(ball, x, y, *eps)?;
            }
            Kernel::Gradient => {
                let g = green::green_gradient(ball, x, y)?;
                out[..x.dim()].copy_from_slice(g.coords());
            }
        }
        Ok(())
    }

    /// Radius at which the integrand loses smoothness (averaged kernels).
    fn break_radius(&self) -> Option<f64> {
        match self {
            Kernel::Mean(eps) => Some(*eps),
            _ => None,
        }
    }
}

pub(crate) struct LayerEval<'a> {
    pub ball: &'a Ball,
    pub surface: &'a LayerSurface,
    pub density: &'a DensityField,
    /// Base intervals inside the ambient ball (n = 2), cached at field
    /// construction.
    pub intervals: &'a [(f64, f64)],
    pub cfg: &'a QuadConfig,
}

impl LayerEval<'_> {
    pub fn value(&self, x: &Point) -> Result<Estimate> {
        let (v, e) = self.run(x, Kernel::Value)?;
        Ok(Estimate { value: v[0], error: e })
    }

    pub fn mean_value(&self, x: &Point, eps: f64) -> Result<Estimate> {
        let (v, e) = self.run(x, Kernel::Mean(eps))?;
        Ok(Estimate { value: v[0], error: e })
    }

    pub fn gradient(&self, x: &Point) -> Result<(Point, f64)> {
        let (v, e) = self.run(x, Kernel::Gradient)?;
        Ok((Point::new(&v[..self.ball.dim()]), e))
    }

    fn run(&self, x: &Point, kernel: Kernel) -> Result<([f64; 3], f64)> {
        if self.ball.boundary_dist(x) < -1e-12 {
            return Err(Error::Domain(format!(
                "evaluation point at distance {:.3e} outside the ambient ball",
                -self.ball.boundary_dist(x)
            )));
        }
        match self.ball.dim() {
            2 => self.run_2d(x, kernel),
            3 => self.run_3d(x, kernel),
            _ => unreachable!(),
        }
    }

    fn max_panel(&self) -> f64 {
        (0.75 * self.surface.resolution_scale()).min(0.5)
    }

    fn run_2d(&self, x: &Point, kernel: Kernel) -> Result<([f64; 3], f64)> {
        let ncomp = kernel.ncomp(2);
        let focus = x.coord(0);
        let max_panel = self.max_panel();
        let mut total = [0.0; 3];
        let mut err = 0.0;
        for &(lo, hi) in self.intervals {
            let t0 = focus.clamp(lo, hi);
            let (fp, _) = self.surface.sample(&[t0]);
            let start = (0.25 * fp.dist(x)).max(self.cfg.min_panel);
            let mut panels = quad::graded_panels(lo, hi, focus, start, max_panel);
            if let Some(r) = kernel.break_radius() {
                let cuts = self.surface.sphere_crossings_1d((lo, hi), x, r);
                panels = quad::split_panels(&panels, &cuts);
            }
            let (v, e) = integrate_panels_vec(&panels, self.cfg.surface_order, ncomp, |t| {
                let (p, area) = self.surface.sample(&[t]);
                let mut k = [0.0; 3];
                kernel.eval(self.ball, x, &p, &mut k)?;
                let w = self.density.eval(&p) * area;
                Ok([k[0] * w, k[1] * w, k[2] * w])
            })?;
            for i in 0..ncomp {
                total[i] += v[i];
            }
            err += e;
        }
        Ok((total, err))
    }

    fn run_3d(&self, x: &Point, kernel: Kernel) -> Result<([f64; 3], f64)> {
        let ncomp = kernel.ncomp(3);
        let (disk_c, disk_r) = self.surface.base_disk(self.ball)?;
        // project the target's base point into the disk
        let mut p0 = [x.coord(0) - disk_c[0], x.coord(1) - disk_c[1]];
        let pr = (p0[0] * p0[0] + p0[1] * p0[1]).sqrt();
        if pr > disk_r * (1.0 - 1e-9) {
            let scale = disk_r * (1.0 - 1e-9) / pr;
            p0[0] *= scale;
            p0[1] *= scale;
        }
        let p0 = [disk_c[0] + p0[0], disk_c[1] + p0[1]];
        let (fp, _) = self.surface.sample(&p0);
        let start = (0.25 * fp.dist(x)).max(self.cfg.min_panel);
        let max_panel = self.max_panel();
        let radial_order = (self.cfg.surface_order / 2).clamp(8, 32);

        let m = self.cfg.angular_order.max(8) & !1; // even
        let mut per_angle = vec![[0.0; 3]; m];
        let mut err_radial = 0.0;
        for (j, slot) in per_angle.iter_mut().enumerate() {
            let phi = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
            let dir = [phi.cos(), phi.sin()];
            let rho_max = self.surface.ray_extent(self.ball, &p0, &dir);
            if rho_max <= 0.0 {
                continue;
            }
            let mut panels = quad::graded_panels(0.0, rho_max, 0.0, start, max_panel);
            if let Some(r) = kernel.break_radius() {
                let cuts = self.surface.sphere_crossings_ray(&p0, &dir, rho_max, x, r);
                panels = quad::split_panels(&panels, &cuts);
            }
            let (v, e) = integrate_panels_vec(&panels, radial_order, ncomp, |rho| {
                let xp = [p0[0] + rho * dir[0], p0[1] + rho * dir[1]];
                let (p, area) = self.surface.sample(&xp);
                let mut k = [0.0; 3];
                kernel.eval(self.ball, x, &p, &mut k)?;
                let w = self.density.eval(&p) * area * rho;
                Ok([k[0] * w, k[1] * w, k[2] * w])
            })?;
            *slot = v;
            err_radial += e;
        }
        let h = 2.0 * std::f64::consts::PI / m as f64;
        let mut total = [0.0; 3];
        let mut coarse = [0.0; 3];
        for (j, v) in per_angle.iter().enumerate() {
            for i in 0..ncomp {
                total[i] += v[i] * h;
                if j % 2 == 0 {
                    coarse[i] += v[i] * 2.0 * h;
                }
            }
        }
        let mut err_ang = 0.0;
        for i in 0..ncomp {
            err_ang += (total[i] - coarse[i]).abs();
        }
        Ok((total, err_radial * h + err_ang))
    }
}

/// Panel-sum driver for vector-valued integrands with an embedded half-order
/// error estimate.
pub(crate) fn integrate_panels_vec(
    panels: &[(f64, f64)],
    order: usize,
    ncomp: usize,
    mut f: impl FnMut(f64) -> Result<[f64; 3]>,
) -> Result<([f64; 3], f64)> {
    let hi = quad::gauss_legendre(order.max(2));
    let lo = quad::gauss_legendre((order / 2).max(1));
    let mut total = [0.0; 3];
    let mut err = 0.0;
    for &(a, b) in panels {
        if b <= a {
            continue;
        }
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut vh = [0.0; 3];
        for (t, w) in hi.nodes.iter().zip(&hi.weights) {
            let v = f(mid + half * t)?;
            for i in 0..ncomp {
                if !v[i].is_finite() {
                    return Err(Error::Evaluation(
                        "non-finite layer integrand sample".into(),
                    ));
                }
                vh[i] += w * v[i];
            }
        }
        let mut vl = [0.0; 3];
        for (t, w) in lo.nodes.iter().zip(&lo.weights) {
            let v = f(mid + half * t)?;
            for i in 0..ncomp {
                vl[i] += w * v[i];
            }
        }
        let mut panel_err = 0.0;
        for i in 0..ncomp {
            total[i] += vh[i] * half;
            panel_err += (vh[i] - vl[i]).abs() * half;
        }
        err += panel_err;
    }
    Ok((total, err))
}
