//! Flat-interface transmission problems on a ball.
//!
//! The slab problem `Δv = g dH^{n-1}|_{T_{r,a}}` in `B_r((0', a))` with
//! `v = f` on the sphere is assembled as a single layer on the equatorial
//! disk against the ball's own Green kernel (zero boundary values by
//! construction) plus the Poisson extension of `f`. One-sided derivatives up
//! to the interface come from a Richardson ladder on analytic-kernel
//! gradients.

use crate::error::{Error, Result};
use crate::point::{Ball, Point};
use crate::potential::{
    BoundaryData, DensityField, QuadConfig, ScalarField, Side, SolutionField,
};

/// The flat slab geometry: ball `B_r((0', a))` with interface plane
/// `T_{r,a} = {x ∈ B_r((0',a)) : x_n = a}`.
#[derive(Debug, Clone, Copy)]
pub struct FlatSlab {
    n: usize,
    radius: f64,
    height: f64,
}

impl FlatSlab {
    pub fn new(n: usize, radius: f64, height: f64) -> Result<FlatSlab> {
        if radius <= 0.0 {
            return Err(Error::Domain(format!("slab radius must be positive, got {radius}")));
        }
        Ok(FlatSlab { n, radius, height })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn ball(&self) -> Ball {
        let mut c = [0.0; 3];
        c[self.n - 1] = self.height;
        Ball::new(Point::new(&c[..self.n]), self.radius)
    }

    /// Is `x` on the interface disk `T_{r,a}`?
    pub fn on_interface(&self, x: &Point, tol: f64) -> bool {
        (x.vertical() - self.height).abs() <= tol && self.ball().contains(x)
    }

    /// Upper half `B⁺_{r,a}` membership.
    pub fn in_upper(&self, x: &Point) -> bool {
        self.ball().contains(x) && x.vertical() > self.height
    }

    /// Lower half `B⁻_{r,a}` membership.
    pub fn in_lower(&self, x: &Point) -> bool {
        self.ball().contains(x) && x.vertical() < self.height
    }

    /// Distance from `x'` to the rim `∂T_{r,a}` within the interface plane.
    pub fn rim_distance(&self, x: &Point) -> f64 {
        let mut hsq = 0.0;
        for i in 0..self.n - 1 {
            hsq += x.coord(i) * x.coord(i);
        }
        self.radius - hsq.sqrt()
    }
}

/// Solve the flat transmission problem on the slab: `Δv = g dH|_{T_{r,a}}`,
/// `v = f` on `∂B_{r,a}`.
pub fn flat_solve(
    slab: &FlatSlab,
    density: DensityField,
    boundary: BoundaryData,
    cfg: QuadConfig,
) -> Result<SolutionField> {
    let ball = slab.ball();
    let layer = SolutionField::plane_layer(ball, slab.height, density, cfg)?;
    if boundary.is_zero() {
        Ok(layer)
    } else {
        Ok(layer.with_poisson(1.0, boundary))
    }
}

/// One-sided derivative from a Richardson ladder.
#[derive(Debug, Clone)]
pub struct OneSidedDerivative {
    pub gradient: Point,
    /// Extrapolation error estimate (distance between the last two
    /// extrapolants) plus accumulated quadrature error.
    pub error: f64,
    /// False when the extrapolant differences grow along the ladder.
    pub converged: bool,
}

/// Gradient of `v` extrapolated to the interface point `x` from the given
/// side along `normal`: first-order Richardson over the geometric ladder
/// `t0, t0/2, t0/4, t0/8`.
pub fn one_sided_derivative(
    v: &dyn ScalarField,
    x: &Point,
    normal: &Point,
    side: Side,
    t0: f64,
) -> Result<OneSidedDerivative> {
    let sign = match side {
        Side::Upper => 1.0,
        Side::Lower => -1.0,
        Side::On => {
            return Err(Error::Precondition(
                "one-sided derivative needs a side, not On".into(),
            ))
        }
    };
    if t0 <= 0.0 {
        return Err(Error::Precondition("ladder extent t0 must be positive".into()));
    }
    let mut rungs = Vec::with_capacity(4);
    let mut quad_err: f64 = 0.0;
    for i in 0..4 {
        let t = t0 / f64::powi(2.0, i);
        let (grad, e) = v.gradient(&x.offset(normal, sign * t))?;
        rungs.push(grad);
        quad_err = quad_err.max(e);
    }
    // linear extrapolation to t = 0 from consecutive halved rungs
    let extrap: Vec<Point> =
        rungs.windows(2).map(|w| w[1].scale(2.0).sub(&w[0])).collect();
    let d1 = extrap[1].sub(&extrap[0]).norm();
    let d2 = extrap[2].sub(&extrap[1]).norm();
    Ok(OneSidedDerivative {
        gradient: *extrap.last().unwrap(),
        error: d2 + quad_err,
        converged: d2 <= d1 + quad_err + 1e-14,
    })
}

/// Measured jump of the normal derivative across the interface at `x`:
/// `(∂_ν v)⁺ - (∂_ν v)⁻`.
pub fn normal_jump(
    v: &dyn ScalarField,
    x: &Point,
    normal: &Point,
    t0: f64,
) -> Result<(f64, f64)> {
    let up = one_sided_derivative(v, x, normal, Side::Upper, t0)?;
    let lo = one_sided_derivative(v, x, normal, Side::Lower, t0)?;
    Ok((up.gradient.sub(&lo.gradient).dot(normal), up.error + lo.error))
}

/// Max asymmetry `|v(x', x_n) - v(x', -x_n)|` over a symmetric grid with
/// `res` points per axis spanning `[-extent, extent]` in every coordinate,
/// filtered to `|x| <= extent`.
pub fn reflection_check(v: &dyn ScalarField, res: usize, extent: f64) -> Result<f64> {
    let n = v.dim();
    let mut max_asym: f64 = 0.0;
    let coords_1d: Vec<f64> =
        (0..res).map(|i| -extent + 2.0 * extent * i as f64 / (res - 1) as f64).collect();
    let mut visit = |p: Point| -> Result<()> {
        if p.norm() > extent || p.vertical() <= 0.0 {
            return Ok(());
        }
        let above = v.value(&p)?.value;
        let below = v.value(&p.with_vertical(-p.vertical()))?.value;
        max_asym = max_asym.max((above - below).abs());
        Ok(())
    };
    if n == 2 {
        for &a in &coords_1d {
            for &b in &coords_1d {
                visit(Point::xy(a, b))?;
            }
        }
    } else {
        for &a in &coords_1d {
            for &b in &coords_1d {
                for &c in &coords_1d {
                    visit(Point::xyz(a, b, c))?;
                }
            }
        }
    }
    Ok(max_asym)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::poisson_extend;
    use std::sync::Arc;

    fn cfg() -> QuadConfig {
        QuadConfig { surface_order: 16, poisson_order: 128, ..Default::default() }
    }

    #[test]
    fn zero_data_gives_zero_solution() {
        let slab = FlatSlab::new(2, 1.0, 0.0).unwrap();
        let v = flat_solve(&slab, DensityField::constant(0.0), BoundaryData::Zero, cfg()).unwrap();
        assert_eq!(v.value(&Point::xy(0.2, 0.1)).unwrap().value, 0.0);
    }

    #[test]
    fn reflection_symmetry_of_centered_slab() {
        let slab = FlatSlab::new(2, 1.0, 0.0).unwrap();
        let v = flat_solve(&slab, DensityField::constant(1.0), BoundaryData::Zero, cfg()).unwrap();
        let asym = reflection_check(&v, 33, 0.75).unwrap();
        assert!(asym < 1e-8, "asymmetry {asym}");
    }

    #[test]
    fn reflection_check_controls() {
        // x1 is even in x_n: zero asymmetry
        let even = poisson_extend(
            BoundaryData::Closure(Arc::new(|p: &Point| p.coord(0))),
            2,
            cfg(),
        );
        assert!(reflection_check(&even, 17, 0.75).unwrap() < 1e-12);
        // x_n is odd: asymmetry is exactly 2 max |x_n| over the grid
        let odd = poisson_extend(
            BoundaryData::Closure(Arc::new(|p: &Point| p.coord(1))),
            2,
            cfg(),
        );
        let asym = reflection_check(&odd, 17, 0.75).unwrap();
        assert!((asym - 1.5).abs() < 1e-9, "asymmetry {asym}");
    }

    #[test]
    fn normal_derivative_jump_equals_density() {
        // c0 = 1, a = 0: (∂v)⁺ = 1/2 at the origin and the jump is 1
        let slab = FlatSlab::new(2, 1.0, 0.0).unwrap();
        let v = flat_solve(&slab, DensityField::constant(1.0), BoundaryData::Zero, cfg()).unwrap();
        let e_n = Point::xy(0.0, 1.0);
        let x = Point::xy(0.0, 0.0);
        let up = one_sided_derivative(&v, &x, &e_n, Side::Upper, 0.05).unwrap();
        assert!(up.converged);
        assert!((up.gradient.coord(1) - 0.5).abs() < 1e-3, "got {}", up.gradient.coord(1));
        let (jump, _) = normal_jump(&v, &x, &e_n, 0.05).unwrap();
        assert!((jump - 1.0).abs() < 1e-3, "jump {jump}");
        // tangential component continuous across the interface
        let lo = one_sided_derivative(&v, &x, &e_n, Side::Lower, 0.05).unwrap();
        assert!((up.gradient.coord(0) - lo.gradient.coord(0)).abs() < 1e-3);
    }

    #[test]
    fn no_jump_for_harmonic_fields() {
        let v = poisson_extend(
            BoundaryData::Closure(Arc::new(|p: &Point| p.coord(0) * p.coord(0))),
            2,
            cfg(),
        );
        let (jump, err) = normal_jump(&v, &Point::xy(0.1, 0.0), &Point::xy(0.0, 1.0), 0.05).unwrap();
        assert!(jump.abs() < 1e-6 + 10.0 * err, "jump {jump}, err {err}");
    }

    #[test]
    fn holder_density_jump_is_pointwise() {
        // g(x') = 1 + 0.1 |x'|^0.6
        let slab = FlatSlab::new(2, 1.0, 0.0).unwrap();
        let g = DensityField::closure(
            |p: &Point| 1.0 + 0.1 * p.coord(0).abs().powf(0.6),
            1.1,
            Some((0.6, 0.1)),
        );
        let v = flat_solve(&slab, g.clone(), BoundaryData::Zero, cfg()).unwrap();
        let e_n = Point::xy(0.0, 1.0);
        for xp in [0.0, 0.3, -0.45] {
            let x = Point::xy(xp, 0.0);
            let (jump, err) = normal_jump(&v, &x, &e_n, 0.05).unwrap();
            let expected = g.eval(&x);
            assert!(
                (jump - expected).abs() < f64::max(1e-3, 10.0 * err),
                "at x'={xp}: jump {jump} vs g {expected}"
            );
        }
    }

    #[test]
    fn rescaling_law_reproduces_solution() {
        // g on T_{r,a} with g(x) = r⁻¹ g̃(r⁻¹x', r⁻¹(x_n - a)):
        // v(x) = ṽ(r⁻¹x', r⁻¹(x_n - a))
        let (r, a) = (0.5, 0.1);
        let g = DensityField::closure(|p: &Point| 1.0 + p.coord(0), 2.0, None);
        let slab = FlatSlab::new(2, r, a).unwrap();
        let v = flat_solve(&slab, g, BoundaryData::Zero, cfg()).unwrap();

        let g_tilde =
            DensityField::closure(move |p: &Point| r * (1.0 + r * p.coord(0)), 2.0, None);
        let unit_slab = FlatSlab::new(2, 1.0, 0.0).unwrap();
        let v_tilde = flat_solve(&unit_slab, g_tilde, BoundaryData::Zero, cfg()).unwrap();

        for (xp, xn) in [(0.1, 0.2), (-0.2, 0.05), (0.0, 0.1), (0.15, -0.1)] {
            let x = Point::xy(xp, a + xn);
            let lhs = v.value(&x).unwrap();
            let rhs = v_tilde.value(&Point::xy(xp / r, xn / r)).unwrap();
            let tol = 1e-8 + 10.0 * (lhs.error + rhs.error);
            assert!(
                (lhs.value - rhs.value).abs() < tol,
                "at ({xp}, {xn}): {} vs {}",
                lhs.value,
                rhs.value
            );
        }
    }

    #[test]
    fn uniqueness_surrogate_under_order_change() {
        let slab = FlatSlab::new(2, 1.0, 0.0).unwrap();
        let coarse =
            flat_solve(&slab, DensityField::constant(1.0), BoundaryData::Zero, cfg()).unwrap();
        let fine = flat_solve(
            &slab,
            DensityField::constant(1.0),
            BoundaryData::Zero,
            cfg().refined(2),
        )
        .unwrap();
        for p in [Point::xy(0.3, 0.2), Point::xy(-0.1, -0.4), Point::xy(0.5, 0.01)] {
            let c = coarse.value(&p).unwrap();
            let f = fine.value(&p).unwrap();
            assert!((c.value - f.value).abs() <= c.error.max(1e-12) * 10.0 + 1e-12);
        }
    }

    #[test]
    fn one_sided_second_differences_stay_bounded() {
        // v restricted to one side stays C² up to T: second differences along
        // the normal do not blow up as the foot point approaches T
        let slab = FlatSlab::new(2, 1.0, 0.0).unwrap();
        let v = flat_solve(&slab, DensityField::constant(1.0), BoundaryData::Zero, cfg()).unwrap();
        let e_n = Point::xy(0.0, 1.0);
        let x = Point::xy(0.1, 0.0);
        let mut diffs = Vec::new();
        for j in 0..5 {
            let t = 0.2 / f64::powi(2.0, j);
            let s = t / 2.0;
            let vp = v.value(&x.offset(&e_n, t + s)).unwrap().value;
            let vm = v.value(&x.offset(&e_n, t - s)).unwrap().value;
            let vc = v.value(&x.offset(&e_n, t)).unwrap().value;
            diffs.push(((vp - 2.0 * vc + vm) / (s * s)).abs());
        }
        let first = diffs[0].max(diffs[1]);
        let last = *diffs.last().unwrap();
        assert!(last <= 4.0 * first + 1e-4, "second differences grew: {diffs:?}");
    }

    #[test]
    fn boundary_data_is_attained() {
        let slab = FlatSlab::new(2, 1.0, 0.0).unwrap();
        let f = BoundaryData::Closure(Arc::new(|p: &Point| p.coord(0) + 0.3));
        let v = flat_solve(&slab, DensityField::constant(1.0), f.clone(), cfg()).unwrap();
        for k in 0..6 {
            let ang = 0.4 + k as f64;
            let p = Point::xy(ang.cos(), ang.sin());
            let got = v.value(&p).unwrap().value;
            assert!((got - f.eval(&p).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn jump_in_three_dimensions() {
        let slab = FlatSlab::new(3, 1.0, 0.0).unwrap();
        let v = flat_solve(&slab, DensityField::constant(1.0), BoundaryData::Zero, cfg()).unwrap();
        let e_n = Point::xyz(0.0, 0.0, 1.0);
        let (jump, err) = normal_jump(&v, &Point::xyz(0.0, 0.0, 0.0), &e_n, 0.05).unwrap();
        assert!((jump - 1.0).abs() < f64::max(2e-3, 10.0 * err), "jump {jump} (err {err})");
    }

    #[test]
    fn slab_geometry_predicates() {
        let slab = FlatSlab::new(2, 0.5, 0.1).unwrap();
        assert!(slab.on_interface(&Point::xy(0.2, 0.1), 1e-12));
        assert!(slab.in_upper(&Point::xy(0.0, 0.3)));
        assert!(slab.in_lower(&Point::xy(0.0, -0.2)));
        assert!((slab.rim_distance(&Point::xy(0.2, 0.1)) - 0.3).abs() < 1e-15);
        assert!(FlatSlab::new(2, -1.0, 0.0).is_err());
    }
}
