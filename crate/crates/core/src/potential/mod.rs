//! Green's function of the ball, single-layer potentials, Poisson
//! extensions, and the distributional verification of the transmission
//! condition.

mod bump;
mod distributional;
mod field;
pub(crate) mod green;
mod layer_eval;
mod poisson;
mod surface;

pub use bump::TestFunction;
pub use distributional::{verify_distributional, DistributionalCheck};
pub use field::{BoundaryData, ClosureField, Component, ScalarField, SolutionField};
pub use surface::{DensityField, LayerSurface, Side};

use crate::error::Result;
use crate::geometry::InterfaceGraph;
use crate::point::{Ball, Point};

/// Quadrature budgets shared by the evaluators. Defaults: surface order 64,
/// volume order 32, Poisson order 256.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct QuadConfig {
    /// Gauss-Legendre nodes per surface panel.
    pub surface_order: usize,
    /// Angular nodes for n = 3 surface rules.
    pub angular_order: usize,
    /// Nodes controlling Poisson boundary rules.
    pub poisson_order: usize,
    /// Default order for volume rules (distributional checks, ball
    /// averages).
    pub volume_order: usize,
    /// Smallest panel width when grading toward a singularity.
    pub min_panel: f64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            surface_order: 64,
            angular_order: 64,
            poisson_order: 256,
            volume_order: 32,
            min_panel: 1e-12,
        }
    }
}

impl QuadConfig {
    /// Scale all orders by an integer factor (order-doubling studies).
    pub fn refined(&self, factor: usize) -> QuadConfig {
        QuadConfig {
            surface_order: self.surface_order * factor,
            angular_order: self.angular_order * factor,
            poisson_order: self.poisson_order * factor,
            volume_order: self.volume_order * factor,
            min_panel: self.min_panel,
        }
    }

    pub fn with_surface_order(mut self, order: usize) -> Self {
        self.surface_order = order;
        self
    }

    pub fn with_volume_order(mut self, order: usize) -> Self {
        self.volume_order = order;
        self
    }
}

/// Green's function of the unit ball, `ΔG = δ_y`, `G = 0` on the boundary.
pub fn green_ball(x: &Point, y: &Point, n: usize) -> Result<f64> {
    green::green(&Ball::unit(n), x, y)
}

/// `∇_x G(x,y)` for the unit ball.
pub fn green_gradient(x: &Point, y: &Point, n: usize) -> Result<Point> {
    green::green_gradient(&Ball::unit(n), x, y)
}

/// Single-layer solve: `u(x) = ∫_Γ G(x,y) g(y) dH^{n-1}` with zero boundary
/// values on the unit sphere.
pub fn single_layer_solve(
    interface: InterfaceGraph,
    density: DensityField,
    cfg: QuadConfig,
) -> Result<SolutionField> {
    SolutionField::single_layer(interface, density, cfg)
}

/// Poisson extension of continuous boundary data on the unit ball.
pub fn poisson_extend(data: BoundaryData, n: usize, cfg: QuadConfig) -> SolutionField {
    SolutionField::poisson(Ball::unit(n), data, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::make_test_interface;
    use crate::quad::Estimate;
    use std::sync::Arc;

    fn test_cfg() -> QuadConfig {
        QuadConfig { surface_order: 16, angular_order: 32, poisson_order: 128, ..Default::default() }
    }

    #[test]
    fn zero_density_gives_zero_field() {
        let g = make_test_interface(2, "flat", &[]).unwrap();
        let u = single_layer_solve(g, DensityField::constant(0.0), test_cfg()).unwrap();
        let v = u.value(&Point::xy(0.2, 0.3)).unwrap();
        assert_eq!(v.value, 0.0);
    }

    #[test]
    fn nonnegative_density_gives_nonpositive_field() {
        let g = make_test_interface(2, "sinusoid", &[0.05, 3.0]).unwrap();
        let u = single_layer_solve(g, DensityField::constant(1.0), test_cfg()).unwrap();
        for p in [
            Point::xy(0.0, 0.4),
            Point::xy(-0.3, -0.2),
            Point::xy(0.6, 0.01),
            Point::xy(0.0, 0.02),
        ] {
            let v = u.value(&p).unwrap();
            assert!(v.value < 0.0, "u({:?}) = {}", p.coords(), v.value);
        }
    }

    #[test]
    fn refined_quadrature_oracle_agrees() {
        // flat interface, g = 1, x = (0, 0.5): self-convergence against a
        // refined rule
        let g = make_test_interface(2, "flat", &[]).unwrap();
        let u = single_layer_solve(g.clone(), DensityField::constant(1.0), test_cfg()).unwrap();
        let u_ref =
            single_layer_solve(g, DensityField::constant(1.0), test_cfg().refined(10)).unwrap();
        let x = Point::xy(0.0, 0.5);
        let a = u.value(&x).unwrap();
        let b = u_ref.value(&x).unwrap();
        assert!(
            (a.value - b.value).abs() <= 1e-6 * b.value.abs(),
            "coarse {} vs refined {}",
            a.value,
            b.value
        );
    }

    #[test]
    fn boundary_values_vanish() {
        let g = make_test_interface(2, "flat", &[]).unwrap();
        let u = single_layer_solve(g, DensityField::constant(1.0), test_cfg()).unwrap();
        for k in 0..8 {
            let a = 2.0 * std::f64::consts::PI * k as f64 / 8.0 + 0.05;
            let v = u.value(&Point::xy(a.cos(), a.sin())).unwrap();
            assert!(v.value.abs() < 1e-10, "boundary value {}", v.value);
        }
    }

    #[test]
    fn on_interface_evaluation_is_finite_and_continuous() {
        let g = make_test_interface(2, "flat", &[]).unwrap();
        let u = single_layer_solve(g, DensityField::constant(1.0), test_cfg()).unwrap();
        let on = u.value(&Point::xy(0.3, 0.0)).unwrap();
        assert!(on.value.is_finite());
        // trace continuity: values just above and below match the on-surface value
        let above = u.value(&Point::xy(0.3, 1e-7)).unwrap();
        let below = u.value(&Point::xy(0.3, -1e-7)).unwrap();
        assert!((above.value - on.value).abs() < 1e-5);
        assert!((below.value - on.value).abs() < 1e-5);
    }

    #[test]
    fn poisson_reproduces_harmonic_polynomials() {
        let cfg = test_cfg();
        // constant data
        let h = poisson_extend(BoundaryData::Constant(3.5), 2, cfg);
        let v = h.value(&Point::xy(0.3, -0.4)).unwrap();
        assert!((v.value - 3.5).abs() < 1e-10);

        // f = x1 is its own harmonic extension
        let f = BoundaryData::Closure(Arc::new(|p: &Point| p.coord(0)));
        let h = poisson_extend(f, 2, cfg);
        let v = h.value(&Point::xy(0.25, 0.6)).unwrap();
        assert!((v.value - 0.25).abs() < 1e-10);

        // f = x1² on the circle extends to (1 + x1² - x2²)/2
        let f = BoundaryData::Closure(Arc::new(|p: &Point| p.coord(0) * p.coord(0)));
        let h = poisson_extend(f, 2, cfg);
        for p in [Point::xy(0.3, 0.2), Point::xy(-0.5, 0.1), Point::xy(0.0, 0.9)] {
            let v = h.value(&p).unwrap();
            let exact = 0.5 * (1.0 + p.coord(0) * p.coord(0) - p.coord(1) * p.coord(1));
            assert!((v.value - exact).abs() < 1e-9, "at {:?}: {} vs {exact}", p.coords(), v.value);
        }
        // attains the data continuously near the boundary
        let v = h.value(&Point::xy(0.9995, 0.0)).unwrap();
        assert!((v.value - 0.5 * (1.0 + 0.9995f64.powi(2))).abs() < 1e-3);

        // n = 3: f = x3 extends to x3
        let f = BoundaryData::Closure(Arc::new(|p: &Point| p.coord(2)));
        let h = poisson_extend(f, 3, cfg);
        let v = h.value(&Point::xyz(0.1, 0.2, 0.4)).unwrap();
        assert!((v.value - 0.4).abs() < 1e-8, "got {}", v.value);
    }

    #[test]
    fn poisson_rejects_non_finite_data() {
        let f = BoundaryData::Closure(Arc::new(|p: &Point| 1.0 / (p.coord(0) - p.coord(0))));
        let h = poisson_extend(f, 2, test_cfg());
        assert!(h.value(&Point::xy(0.1, 0.0)).is_err());
    }

    #[test]
    fn field_gradient_matches_finite_differences() {
        let g = make_test_interface(2, "sinusoid", &[0.05, 3.0]).unwrap();
        let u = single_layer_solve(g, DensityField::constant(1.0), test_cfg()).unwrap();
        let x = Point::xy(0.2, 0.35);
        let (grad, _) = u.gradient(&x).unwrap();
        let h = 1e-5;
        for i in 0..2 {
            let mut e = [0.0; 2];
            e[i] = 1.0;
            let dir = Point::new(&e);
            let vp = u.value(&x.offset(&dir, h)).unwrap().value;
            let vm = u.value(&x.offset(&dir, -h)).unwrap().value;
            let fd = (vp - vm) / (2.0 * h);
            assert!((grad.coord(i) - fd).abs() < 1e-7, "{} vs {fd}", grad.coord(i));
        }
    }

    #[test]
    fn poisson_gradients_match_finite_differences() {
        let h = 1e-5;
        // n = 2, data x1²: gradient of (1 + x1² - x2²)/2 is (x1, -x2)
        let f = BoundaryData::Closure(Arc::new(|p: &Point| p.coord(0) * p.coord(0)));
        let u = poisson_extend(f, 2, test_cfg());
        let x = Point::xy(0.3, -0.2);
        let (grad, _) = u.gradient(&x).unwrap();
        assert!((grad.coord(0) - 0.3).abs() < 1e-8, "got {}", grad.coord(0));
        assert!((grad.coord(1) - 0.2).abs() < 1e-8, "got {}", grad.coord(1));

        // n = 3, against central differences of the evaluator
        let f = BoundaryData::Closure(Arc::new(|p: &Point| {
            p.coord(2) * p.coord(2) + 0.5 * p.coord(0)
        }));
        let u = poisson_extend(f, 3, test_cfg());
        let x = Point::xyz(0.2, 0.1, -0.3);
        let (grad, _) = u.gradient(&x).unwrap();
        for i in 0..3 {
            let mut e = [0.0; 3];
            e[i] = 1.0;
            let dir = Point::new(&e);
            let vp = u.value(&x.offset(&dir, h)).unwrap().value;
            let vm = u.value(&x.offset(&dir, -h)).unwrap().value;
            let fd = (vp - vm) / (2.0 * h);
            assert!((grad.coord(i) - fd).abs() < 1e-6, "comp {i}: {} vs {fd}", grad.coord(i));
        }
    }

    #[test]
    fn distributional_identity_harmonic_field() {
        // u harmonic (pure Poisson part): ∫ u Δφ = 0 for any bump
        let f = BoundaryData::Closure(Arc::new(|p: &Point| p.coord(0) * p.coord(0)));
        let u = poisson_extend(f, 2, test_cfg());
        let phi = TestFunction::new(Point::xy(0.1, 0.2), 0.3).unwrap();
        let surface = LayerSurface::Plane { level: 0.0 };
        let check =
            verify_distributional(&u, &surface, &DensityField::constant(0.0), &phi, 32).unwrap();
        assert!(check.volume_term.value.abs() < 1e-8, "got {}", check.volume_term.value);
        assert_eq!(check.surface_term.value, 0.0);
    }

    #[test]
    fn distributional_identity_flat_layer() {
        let g = make_test_interface(2, "flat", &[]).unwrap();
        let u = single_layer_solve(g.clone(), DensityField::constant(1.0), test_cfg()).unwrap();
        let phi = TestFunction::new(Point::xy(0.0, 0.0), 0.4).unwrap();
        let check = verify_distributional(
            &u,
            &LayerSurface::Graph(g),
            &DensityField::constant(1.0),
            &phi,
            32,
        )
        .unwrap();
        assert!(check.residual < 1e-5, "residual {}", check.residual);
    }

    #[test]
    fn distributional_bump_away_from_interface() {
        // φ supported off Γ: both sides vanish
        let g = make_test_interface(2, "flat", &[]).unwrap();
        let u = single_layer_solve(g.clone(), DensityField::constant(1.0), test_cfg()).unwrap();
        let phi = TestFunction::new(Point::xy(0.0, 0.55), 0.25).unwrap();
        let check = verify_distributional(
            &u,
            &LayerSurface::Graph(g),
            &DensityField::constant(1.0),
            &phi,
            32,
        )
        .unwrap();
        assert!(check.surface_term.value.abs() < 1e-14);
        assert!(check.volume_term.value.abs() < 1e-7, "got {}", check.volume_term.value);
    }

    #[test]
    fn combine_and_trace() {
        let cfg = test_cfg();
        let g = make_test_interface(2, "flat", &[]).unwrap();
        let layer = single_layer_solve(g, DensityField::constant(1.0), cfg).unwrap();
        let pois = poisson_extend(BoundaryData::Constant(2.0), 2, cfg);
        let sum = SolutionField::combine(&[(1.0, &layer), (0.5, &pois)]).unwrap();
        let x = Point::xy(0.1, 0.3);
        let a = sum.value(&x).unwrap().value;
        let b = layer.value(&x).unwrap().value + 0.5 * pois.value(&x).unwrap().value;
        assert!((a - b).abs() < 1e-14);
        // trace keeps only the Poisson part
        let tr = sum.boundary_trace();
        let v = tr.eval(&Point::xy(1.0, 0.0)).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn side_classification_via_primary_surface() {
        let g = make_test_interface(2, "linear", &[0.5]).unwrap();
        let u = single_layer_solve(g, DensityField::constant(1.0), test_cfg()).unwrap();
        assert_eq!(u.classify(&Point::xy(0.4, 0.5), 1e-12), Some(Side::Upper));
        assert_eq!(u.classify(&Point::xy(0.4, 0.0), 1e-12), Some(Side::Lower));
    }

    #[test]
    fn ball_mean_of_harmonic_part_is_exact() {
        let f = BoundaryData::Closure(Arc::new(|p: &Point| p.coord(0) * p.coord(0)));
        let u = poisson_extend(f, 2, test_cfg());
        let x = Point::xy(0.2, -0.1);
        let mean = u.ball_mean(&x, 0.15).unwrap();
        let val = u.value(&x).unwrap();
        assert!((mean.value - val.value).abs() < 1e-12);
        // averaging ball must stay inside the domain
        assert!(u.ball_mean(&Point::xy(0.95, 0.0), 0.2).is_err());
    }

    #[test]
    fn ball_mean_matches_polar_average_across_interface() {
        // dual route: exact averaged kernel vs direct polar quadrature of u
        let g = make_test_interface(2, "flat", &[]).unwrap();
        let u = single_layer_solve(g, DensityField::constant(1.0), test_cfg()).unwrap();
        let x = Point::xy(0.1, 0.03);
        let eps = 0.1;
        let exact = u.ball_mean(&x, eps).unwrap();

        let rule = crate::quad::gauss_legendre(48);
        let m = 96;
        let mut acc = 0.0;
        for j in 0..m {
            let a = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
            let dir = Point::xy(a.cos(), a.sin());
            // split the radial line at the interface crossing x_n = 0
            let cross = if dir.coord(1).abs() > 1e-14 {
                let t = -x.coord(1) / dir.coord(1);
                (t > 0.0 && t < eps).then_some(t)
            } else {
                None
            };
            let panels: Vec<(f64, f64)> = match cross {
                Some(t) => vec![(0.0, t), (t, eps)],
                None => vec![(0.0, eps)],
            };
            for (lo, hi) in panels {
                acc += rule.integrate(lo, hi, |r| r * u.value(&x.offset(&dir, r)).unwrap().value);
            }
        }
        let oracle = acc * (2.0 * std::f64::consts::PI / m as f64)
            / (std::f64::consts::PI * eps * eps);
        assert!(
            (exact.value - oracle).abs() < 5e-7,
            "kernel route {} vs polar oracle {oracle}",
            exact.value
        );
    }

    #[test]
    fn estimate_arithmetic() {
        let a = Estimate { value: 1.0, error: 0.1 };
        let b = a.scale(-2.0);
        assert_eq!(b.value, -2.0);
        assert!((b.error - 0.2).abs() < 1e-15);
    }
}
