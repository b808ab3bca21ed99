//! Poisson integral: the harmonic extension of continuous boundary data.
//!
//! Angular panels are graded toward the boundary projection of the target, so
//! evaluation stays accurate as the kernel peak sharpens near the boundary.

use super::field::BoundaryData;
use super::QuadConfig;
use crate::error::{Error, Result};
use crate::point::{Ball, Point};
use crate::quad::{self, Estimate};

const ON_BOUNDARY_TOL: f64 = 1e-12;

/// Evaluate the Poisson extension of `data` at `x`.
pub(crate) fn poisson_value(
    ball: &Ball,
    data: &BoundaryData,
    x: &Point,
    cfg: &QuadConfig,
) -> Result<Estimate> {
    let xh = x.sub(&ball.center).scale(1.0 / ball.radius);
    let r = xh.norm();
    if r > 1.0 + 1e-12 {
        return Err(Error::Domain("Poisson evaluation outside the closed ball".into()));
    }
    if r >= 1.0 - ON_BOUNDARY_TOL {
        // continuous attainment of the boundary data
        let proj = ball.center.add(&xh.scale(ball.radius / r));
        return Ok(Estimate::exact(data.eval(&proj)?));
    }
    match ball.dim() {
        2 => poisson_2d(ball, data, &xh, cfg),
        3 => poisson_3d(ball, data, &xh, cfg),
        _ => unreachable!(),
    }
}

fn poisson_2d(ball: &Ball, data: &BoundaryData, xh: &Point, cfg: &QuadConfig) -> Result<Estimate> {
    let r = xh.norm();
    let theta0 = xh.coord(1).atan2(xh.coord(0));
    let order = (cfg.poisson_order / 16).clamp(8, 32);
    let start = (0.25 * (1.0 - r)).max(1e-10);
    let panels = quad::graded_panels(
        theta0 - std::f64::consts::PI,
        theta0 + std::f64::consts::PI,
        theta0,
        start,
        0.5,
    );
    let mut failure = None;
    let k = 1.0 - r * r;
    let est = quad::integrate_panels(&panels, order, |theta| {
        let e = Point::xy(theta.cos(), theta.sin());
        let dsq = xh.sub(&e).norm_sq();
        let bp = ball.center.add(&e.scale(ball.radius));
        let f = match data.eval(&bp) {
            Ok(v) => v,
            Err(err) => {
                failure = Some(err);
                f64::NAN
            }
        };
        k / (2.0 * std::f64::consts::PI * dsq) * f
    });
    if let Some(err) = failure {
        return Err(err);
    }
    est
}

fn poisson_3d(ball: &Ball, data: &BoundaryData, xh: &Point, cfg: &QuadConfig) -> Result<Estimate> {
    let r = xh.norm();
    // frame with e3 pointing at the target (kernel peak at mu = 1)
    let e3 = if r > 1e-14 { xh.scale(1.0 / r) } else { Point::xyz(0.0, 0.0, 1.0) };
    let (e1, e2) = orthonormal_complement(&e3);
    let order = (cfg.poisson_order / 16).clamp(8, 32);
    let m_phi = (cfg.poisson_order / 4).clamp(16, 128);
    let start = (0.25 * (1.0 - r) * (1.0 - r)).max(1e-12);
    let panels = quad::graded_panels(-1.0, 1.0, 1.0, start, 0.5);
    let k = 1.0 - r * r;
    let mut failure = None;
    let est = quad::integrate_panels(&panels, order, |mu| {
        let s = (1.0 - mu * mu).max(0.0).sqrt();
        let inner = quad::trapezoid_periodic(m_phi, |phi| {
            let y = e3
                .scale(mu)
                .add(&e1.scale(s * phi.cos()))
                .add(&e2.scale(s * phi.sin()));
            let dsq = xh.sub(&y).norm_sq();
            let bp = ball.center.add(&y.scale(ball.radius));
            let f = match data.eval(&bp) {
                Ok(v) => v,
                Err(err) => {
                    failure = Some(err);
                    f64::NAN
                }
            };
            f / dsq.powf(1.5)
        });
        k / (4.0 * std::f64::consts::PI) * inner
    });
    if let Some(err) = failure {
        return Err(err);
    }
    est
}

/// Gradient of the Poisson extension, analytic kernel derivative.
pub(crate) fn poisson_gradient(
    ball: &Ball,
    data: &BoundaryData,
    x: &Point,
    cfg: &QuadConfig,
) -> Result<(Point, f64)> {
    let xh = x.sub(&ball.center).scale(1.0 / ball.radius);
    let r = xh.norm();
    if r >= 1.0 - 1e-9 {
        return Err(Error::Domain(
            "Poisson gradient needs an interior evaluation point".into(),
        ));
    }
    match ball.dim() {
        2 => {
            let theta0 = xh.coord(1).atan2(xh.coord(0));
            let order = (cfg.poisson_order / 16).clamp(8, 32);
            let start = (0.25 * (1.0 - r)).max(1e-10);
            let panels = quad::graded_panels(
                theta0 - std::f64::consts::PI,
                theta0 + std::f64::consts::PI,
                theta0,
                start,
                0.5,
            );
            let mut failure = None;
            let kfac = 1.0 - r * r;
            let (v, e) = super::layer_eval::integrate_panels_vec(&panels, order, 2, |theta| {
                let ey = Point::xy(theta.cos(), theta.sin());
                let diff = xh.sub(&ey);
                let dsq = diff.norm_sq();
                let bp = ball.center.add(&ey.scale(ball.radius));
                let f = match data.eval(&bp) {
                    Ok(v) => v,
                    Err(err) => {
                        failure = Some(err);
                        0.0
                    }
                };
                // ∇_x [(1-|x|²)/|x-y|²] = -2x/|x-y|² - 2(1-|x|²)(x-y)/|x-y|⁴
                let gx = (-2.0 * xh.coord(0) - 2.0 * kfac * diff.coord(0) / dsq) / dsq;
                let gy = (-2.0 * xh.coord(1) - 2.0 * kfac * diff.coord(1) / dsq) / dsq;
                let c = f / (2.0 * std::f64::consts::PI * ball.radius);
                Ok([c * gx, c * gy, 0.0])
            })?;
            if let Some(err) = failure {
                return Err(err);
            }
            Ok((Point::new(&v[..2]), e))
        }
        3 => {
            let e3 = if r > 1e-14 { xh.scale(1.0 / r) } else { Point::xyz(0.0, 0.0, 1.0) };
            let (e1, e2) = orthonormal_complement(&e3);
            let order = (cfg.poisson_order / 16).clamp(8, 32);
            let m_phi = (cfg.poisson_order / 4).clamp(16, 128);
            let start = (0.25 * (1.0 - r) * (1.0 - r)).max(1e-12);
            let panels = quad::graded_panels(-1.0, 1.0, 1.0, start, 0.5);
            let kfac = 1.0 - r * r;
            let mut failure = None;
            let (v, e) = super::layer_eval::integrate_panels_vec(&panels, order, 3, |mu| {
                let s = (1.0 - mu * mu).max(0.0).sqrt();
                let mut acc = [0.0; 3];
                let h = 2.0 * std::f64::consts::PI / m_phi as f64;
                for j in 0..m_phi {
                    let phi = j as f64 * h;
                    let y = e3
                        .scale(mu)
                        .add(&e1.scale(s * phi.cos()))
                        .add(&e2.scale(s * phi.sin()));
                    let diff = xh.sub(&y);
                    let dsq = diff.norm_sq();
                    let d3 = dsq.powf(1.5);
                    let bp = ball.center.add(&y.scale(ball.radius));
                    let f = match data.eval(&bp) {
                        Ok(v) => v,
                        Err(err) => {
                            failure = Some(err);
                            0.0
                        }
                    };
                    // ∇_x [(1-|x|²)/|x-y|³]
                    let c = f * h / (4.0 * std::f64::consts::PI * ball.radius);
                    for i in 0..3 {
                        acc[i] += c * (-2.0 * xh.coord(i) - 3.0 * kfac * diff.coord(i) / dsq) / d3;
                    }
                }
                Ok(acc)
            })?;
            if let Some(err) = failure {
                return Err(err);
            }
            Ok((Point::new(&v[..3]), e))
        }
        _ => unreachable!(),
    }
}

fn orthonormal_complement(e3: &Point) -> (Point, Point) {
    let trial = if e3.coord(0).abs() < 0.9 {
        Point::xyz(1.0, 0.0, 0.0)
    } else {
        Point::xyz(0.0, 1.0, 0.0)
    };
    let p = trial.sub(&e3.scale(trial.dot(e3)));
    let e1 = p.scale(1.0 / p.norm());
    let e2 = Point::xyz(
        e3.coord(1) * e1.coord(2) - e3.coord(2) * e1.coord(1),
        e3.coord(2) * e1.coord(0) - e3.coord(0) * e1.coord(2),
        e3.coord(0) * e1.coord(1) - e3.coord(1) * e1.coord(0),
    );
    (e1, e2)
}
