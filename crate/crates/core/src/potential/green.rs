//! Green's function of a ball for the Laplacian, in the convention
//! `Δ_x G(·,y) = δ_y`, `G(·,y) = 0` on the boundary, so `G ≤ 0` inside.
//!
//! Both dimensions use the symmetric image form built on
//! `s(x,y) = √(|x|²|y|² - 2x·y + 1)` (unit-ball coordinates): `s ≥ |x-y|`
//! with equality exactly on the boundary, which gives the sign, the boundary
//! vanishing and the symmetry `G(x,y) = G(y,x)` for free, and the `y → 0`
//! image degeneracy disappears (`s → 1`).

use crate::error::{Error, Result};
use crate::point::{Ball, Point};

const INV_2PI: f64 = 1.0 / (2.0 * std::f64::consts::PI);
const INV_4PI: f64 = 1.0 / (4.0 * std::f64::consts::PI);

fn unit_coords(ball: &Ball, x: &Point) -> Point {
    x.sub(&ball.center).scale(1.0 / ball.radius)
}

fn s_sq(xh: &Point, yh: &Point) -> f64 {
    xh.norm_sq() * yh.norm_sq() - 2.0 * xh.dot(yh) + 1.0
}

/// `G(x, y)` for the ball. `x` may lie on the closed ball, `y` must be
/// interior and distinct from `x`.
pub fn green(ball: &Ball, x: &Point, y: &Point) -> Result<f64> {
    let n = ball.dim();
    let xh = unit_coords(ball, x);
    let yh = unit_coords(ball, y);
    if yh.norm() >= 1.0 {
        return Err(Error::Domain(format!("source |y| = {} is not < 1", yh.norm())));
    }
    if xh.norm() > 1.0 + 1e-12 {
        return Err(Error::Domain(format!("target |x| = {} is not <= 1", xh.norm())));
    }
    let d = xh.dist(&yh);
    if d == 0.0 {
        return Err(Error::Singularity("green kernel evaluated at x = y".into()));
    }
    let s = s_sq(&xh, &yh).sqrt();
    Ok(match n {
        2 => INV_2PI * (d / s).ln(),
        3 => -INV_4PI / ball.radius * (1.0 / d - 1.0 / s),
        _ => unreachable!(),
    })
}

/// `∇_x G(x, y)`, analytic.
pub fn green_gradient(ball: &Ball, x: &Point, y: &Point) -> Result<Point> {
    let n = ball.dim();
    let xh = unit_coords(ball, x);
    let yh = unit_coords(ball, y);
    if yh.norm() >= 1.0 {
        return Err(Error::Domain(format!("source |y| = {} is not < 1", yh.norm())));
    }
    let diff = xh.sub(&yh);
    let d = diff.norm();
    if d == 0.0 {
        return Err(Error::Singularity("green gradient evaluated at x = y".into()));
    }
    let ssq = s_sq(&xh, &yh);
    // ∇ of the image part through s: ∇s = (|y|²x - y)/s
    let img = xh.scale(yh.norm_sq()).sub(&yh);
    Ok(match n {
        2 => diff
            .scale(1.0 / (d * d))
            .sub(&img.scale(1.0 / ssq))
            .scale(INV_2PI / ball.radius),
        3 => diff
            .scale(1.0 / (d * d * d))
            .sub(&img.scale(1.0 / ssq.powf(1.5)))
            .scale(INV_4PI / (ball.radius * ball.radius)),
        _ => unreachable!(),
    })
}

/// Mean of `Φ(|z - y|)` over the ball `B_eps(x)` with `d = |x - y| < eps`,
/// in closed form (the potential of a uniform unit mass on the ball).
fn fundamental_ball_mean(n: usize, d: f64, eps: f64) -> f64 {
    match n {
        2 => INV_2PI * (eps.ln() - 0.5 + d * d / (2.0 * eps * eps)),
        3 => -(3.0 * eps * eps - d * d) / (8.0 * std::f64::consts::PI * eps.powi(3)),
        _ => unreachable!(),
    }
}

/// The regular (image) part `G(x,y) - Φ(|x-y|)`, harmonic in `x` throughout
/// the ball; finite at `x = y`.
fn regular_part(ball: &Ball, xh: &Point, yh: &Point) -> f64 {
    let s = s_sq(xh, yh).sqrt();
    match ball.dim() {
        2 => -INV_2PI * (ball.radius.ln() + s.ln()),
        3 => INV_4PI / (ball.radius * s),
        _ => unreachable!(),
    }
}

/// Mean of `G(·, y)` over `B_eps(x)`, exact: the regular part is harmonic
/// (mean value property) and the singular part has the closed-form ball mean.
/// Requires `B_eps(x)` inside the ambient ball.
pub fn green_ball_mean(ball: &Ball, x: &Point, y: &Point, eps: f64) -> Result<f64> {
    let xh = unit_coords(ball, x);
    let yh = unit_coords(ball, y);
    if yh.norm() >= 1.0 {
        return Err(Error::Domain(format!("source |y| = {} is not < 1", yh.norm())));
    }
    let n = ball.dim();
    let d = x.dist(y);
    if d >= eps {
        return green(ball, x, y);
    }
    // Φ scales trivially between the ambient ball and unit coordinates for
    // n = 3; for n = 2 the log offset is absorbed into regular_part.
    Ok(regular_part(ball, &xh, &yh) + fundamental_ball_mean(n, d, eps))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(n: usize) -> Ball {
        Ball::unit(n)
    }

    #[test]
    fn center_value_n2() {
        // G(0, (0.5, 0)) = ln(0.5)/2π ≈ -0.110318
        let v = green(&unit(2), &Point::xy(0.0, 0.0), &Point::xy(0.5, 0.0)).unwrap();
        assert!((v + 0.110318).abs() < 1e-6, "got {v}");
    }

    #[test]
    fn boundary_value_vanishes() {
        let v = green(&unit(2), &Point::xy(1.0, 0.0), &Point::xy(0.5, 0.0)).unwrap();
        assert!(v.abs() < 1e-14);
        let v = green(&unit(3), &Point::xyz(0.0, 0.0, 1.0), &Point::xyz(0.2, 0.1, -0.3)).unwrap();
        assert!(v.abs() < 1e-14);
    }

    #[test]
    fn symmetry_and_sign() {
        let pairs = [
            (Point::xy(0.3, -0.2), Point::xy(-0.5, 0.1)),
            (Point::xy(0.0, 0.0), Point::xy(0.7, 0.2)),
            (Point::xy(0.9, 0.1), Point::xy(0.85, 0.12)),
        ];
        for (x, y) in pairs {
            let a = green(&unit(2), &x, &y).unwrap();
            let b = green(&unit(2), &y, &x).unwrap();
            assert!((a - b).abs() < 1e-14);
            assert!(a <= 0.0);
        }
        let x = Point::xyz(0.1, 0.2, -0.3);
        let y = Point::xyz(-0.4, 0.0, 0.2);
        let a = green(&unit(3), &x, &y).unwrap();
        let b = green(&unit(3), &y, &x).unwrap();
        assert!((a - b).abs() < 1e-14);
        assert!(a <= 0.0);
    }

    #[test]
    fn degenerate_source_at_origin() {
        // s → 1: G(x, 0) = ln|x|/2π in n = 2
        let v = green(&unit(2), &Point::xy(0.25, 0.0), &Point::xy(0.0, 0.0)).unwrap();
        assert!((v - INV_2PI * 0.25f64.ln()).abs() < 1e-15);
        // n = 3: G(x, 0) = -(1/4π)(1/|x| - 1)
        let v = green(&unit(3), &Point::xyz(0.25, 0.0, 0.0), &Point::xyz(0.0, 0.0, 0.0)).unwrap();
        assert!((v + INV_4PI * (4.0 - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn singularity_and_domain_errors() {
        let p = Point::xy(0.3, 0.3);
        assert!(matches!(green(&unit(2), &p, &p), Err(Error::Singularity(_))));
        assert!(matches!(
            green(&unit(2), &p, &Point::xy(1.0, 0.0)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn gradient_matches_finite_differences() {
        for (ball, x, y) in [
            (unit(2), Point::xy(0.2, -0.1), Point::xy(-0.3, 0.4)),
            (unit(2), Point::xy(0.0, 0.0), Point::xy(0.5, 0.0)),
            (unit(3), Point::xyz(0.1, 0.2, 0.3), Point::xyz(-0.2, 0.1, -0.1)),
        ] {
            let g = green_gradient(&ball, &x, &y).unwrap();
            let h = 1e-5;
            for i in 0..ball.dim() {
                let mut e = [0.0; 3];
                e[i] = 1.0;
                let dir = Point::new(&e[..ball.dim()]);
                let vp = green(&ball, &x.offset(&dir, h), &y).unwrap();
                let vm = green(&ball, &x.offset(&dir, -h), &y).unwrap();
                let fd = (vp - vm) / (2.0 * h);
                assert!((g.coord(i) - fd).abs() < 1e-8, "component {i}: {} vs {fd}", g.coord(i));
            }
        }
    }

    #[test]
    fn gradient_symmetry_under_relabeling() {
        // ∇ in the first slot at (x,y) equals ∇ in the second slot at (y,x)
        let x = Point::xy(0.2, -0.1);
        let y = Point::xy(-0.3, 0.4);
        let g1 = green_gradient(&unit(2), &x, &y).unwrap();
        let h = 1e-6;
        for i in 0..2 {
            let mut e = [0.0; 2];
            e[i] = 1.0;
            let dir = Point::new(&e);
            let vp = green(&unit(2), &y, &x.offset(&dir, h)).unwrap();
            let vm = green(&unit(2), &y, &x.offset(&dir, -h)).unwrap();
            assert!((g1.coord(i) - (vp - vm) / (2.0 * h)).abs() < 1e-8);
        }
        // radial case n = 3, x = 0: gradient parallel to -y
        let y3 = Point::xyz(0.3, 0.2, -0.1);
        let g = green_gradient(&unit(3), &Point::zero(3), &y3).unwrap();
        let cross = g.coord(0) * y3.coord(1) - g.coord(1) * y3.coord(0);
        assert!(cross.abs() < 1e-14);
        assert!(g.dot(&y3) < 0.0);
    }

    #[test]
    fn ball_mean_agrees_with_kernel_outside_radius() {
        let x = Point::xy(0.3, 0.1);
        let y = Point::xy(-0.2, -0.4);
        let exact = green(&unit(2), &x, &y).unwrap();
        let mean = green_ball_mean(&unit(2), &x, &y, 0.1).unwrap();
        assert_eq!(exact, mean);
    }

    #[test]
    fn ball_mean_matches_polar_quadrature_inside_radius() {
        // oracle: direct polar average of G(·,y) over B_eps(x)
        let ball = unit(2);
        let x = Point::xy(0.1, 0.05);
        let y = Point::xy(0.12, 0.02);
        let eps = 0.1;
        let exact = green_ball_mean(&ball, &x, &y, eps).unwrap();
        let rule = crate::quad::gauss_legendre(200);
        let m = 512;
        let mut acc = 0.0;
        for j in 0..m {
            let phi = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
            let dir = Point::xy(phi.cos(), phi.sin());
            acc += rule.integrate(0.0, eps, |r| {
                let z = x.offset(&dir, r);
                r * green(&ball, &z, &y).unwrap()
            });
        }
        let oracle = acc * (2.0 * std::f64::consts::PI / m as f64)
            / (std::f64::consts::PI * eps * eps);
        assert!((exact - oracle).abs() < 1e-6, "exact {exact} vs oracle {oracle}");
    }

    #[test]
    fn ball_mean_in_3d_matches_shell_oracle() {
        // split the oracle: the image part of G is smooth (polar quadrature
        // converges), the fundamental part's ball mean follows from the shell
        // theorem: a unit-mass shell of radius s contributes -(1/4π)/max(d,s)
        let ball = unit(3);
        let x = Point::xyz(0.05, -0.02, 0.1);
        let y = Point::xyz(0.02, 0.01, 0.08);
        let eps = 0.15;
        let d = x.dist(&y);
        assert!(d < eps);
        let exact = green_ball_mean(&ball, &x, &y, eps).unwrap();

        let rule_r = crate::quad::gauss_legendre(48);
        let rule_mu = crate::quad::gauss_legendre(32);
        let m_phi = 32;
        let vol = 4.0 / 3.0 * std::f64::consts::PI * eps.powi(3);
        let mut acc = 0.0;
        for j in 0..m_phi {
            let phi = 2.0 * std::f64::consts::PI * j as f64 / m_phi as f64;
            acc += rule_mu.integrate(-1.0, 1.0, |mu| {
                let s = (1.0 - mu * mu).sqrt();
                let dir = Point::xyz(s * phi.cos(), s * phi.sin(), mu);
                rule_r.integrate(0.0, eps, |r| {
                    let z = x.offset(&dir, r);
                    let dist = z.dist(&y);
                    r * r * (green(&ball, &z, &y).unwrap() + INV_4PI / dist)
                })
            });
        }
        let regular_mean = acc * (2.0 * std::f64::consts::PI / m_phi as f64) / vol;

        let shell = |s: f64| -> f64 {
            let potential = -INV_4PI / d.max(s);
            4.0 * std::f64::consts::PI * s * s / vol * potential
        };
        let rule = crate::quad::gauss_legendre(64);
        let fundamental_mean = rule.integrate(0.0, d, shell) + rule.integrate(d, eps, shell);

        let oracle = regular_mean + fundamental_mean;
        assert!((exact - oracle).abs() < 1e-9, "exact {exact} vs oracle {oracle}");
    }
}
