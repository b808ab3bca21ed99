//! Carrier surfaces for layer potentials and the densities living on them.
//!
//! A layer lives either on a graph interface `x_n = ψ(x')` or on the chord
//! `T_a = B ∩ {x_n = a}` of the ambient ball. Both are parametrized over a
//! base region in `R^{n-1}`; integration is always restricted to the part of
//! the surface strictly inside the ambient ball.

use crate::error::{Error, Result};
use crate::geometry::{self, InterfaceGraph};
use crate::point::{Ball, Point};
use crate::quad;
use std::fmt;
use std::sync::Arc;

/// Which side of the interface a point lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Side {
    /// `x_n > ψ(x')` (the phase the upward normal points into).
    Upper,
    /// `x_n < ψ(x')`.
    Lower,
    /// Within tolerance of the surface.
    On,
}

/// The surface carrying a layer density.
#[derive(Clone)]
pub enum LayerSurface {
    Graph(InterfaceGraph),
    /// The horizontal plane `x_n = level`, truncated to the ambient ball.
    Plane { level: f64 },
}

impl fmt::Debug for LayerSurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LayerSurface::Graph(g) => write!(f, "Graph({:?})", g.profile()),
            LayerSurface::Plane { level } => write!(f, "Plane(level={level})"),
        }
    }
}

impl LayerSurface {
    /// Height of the surface over the base point.
    pub fn height(&self, xp: &[f64]) -> f64 {
        match self {
            LayerSurface::Graph(g) => g.psi(xp),
            LayerSurface::Plane { level } => *level,
        }
    }

    /// Surface point and area element over the base point.
    pub fn sample(&self, xp: &[f64]) -> (Point, f64) {
        match self {
            LayerSurface::Graph(g) => {
                let s = g.eval_unchecked(xp);
                (s.point, s.area_element)
            }
            LayerSurface::Plane { level } => (Point::graph(xp, *level), 1.0),
        }
    }

    /// Classify a point by the sign of `x_n - height(x')`.
    pub fn classify(&self, x: &Point, tol: f64) -> Side {
        let d = x.vertical() - self.height(x.horizontal());
        if d > tol {
            Side::Upper
        } else if d < -tol {
            Side::Lower
        } else {
            Side::On
        }
    }

    /// Signed vertical offset `x_n - height(x')`, a cheap distance proxy for
    /// grading quadrature panels.
    pub fn vertical_offset(&self, x: &Point) -> f64 {
        x.vertical() - self.height(x.horizontal())
    }

    pub fn resolution_scale(&self) -> f64 {
        match self {
            LayerSurface::Graph(g) => g.resolution_scale(),
            LayerSurface::Plane { .. } => f64::INFINITY,
        }
    }

    /// Base-parameter intervals inside the ambient ball (n = 2).
    pub(crate) fn base_intervals(&self, ball: &Ball) -> Result<Vec<(f64, f64)>> {
        match self {
            LayerSurface::Graph(g) => {
                let iv = g.inside_ball_intervals(ball);
                if iv.is_empty() {
                    return Err(Error::Precondition(
                        "interface graph lies entirely outside the ambient ball".into(),
                    ));
                }
                Ok(iv)
            }
            LayerSurface::Plane { level } => {
                let rho = chord_radius(ball, *level)?;
                let c = ball.center.coord(0);
                Ok(vec![(c - rho, c + rho)])
            }
        }
    }

    /// Base disk of the plane chord / unit disk of a graph (n = 3):
    /// `(center, radius)` in base coordinates.
    pub(crate) fn base_disk(&self, ball: &Ball) -> Result<([f64; 2], f64)> {
        match self {
            LayerSurface::Graph(_) => Ok(([0.0, 0.0], 1.0)),
            LayerSurface::Plane { level } => {
                let rho = chord_radius(ball, *level)?;
                Ok(([ball.center.coord(0), ball.center.coord(1)], rho))
            }
        }
    }

    /// Largest `ρ` with the surface point over `p + ρ·dir` inside the ambient
    /// ball (n = 3).
    pub(crate) fn ray_extent(&self, ball: &Ball, p: &[f64; 2], dir: &[f64; 2]) -> f64 {
        match self {
            LayerSurface::Graph(g) => g.ray_extent(ball, p, dir),
            LayerSurface::Plane { level } => {
                let (c, rho) = (
                    [ball.center.coord(0), ball.center.coord(1)],
                    chord_radius(ball, *level).unwrap_or(0.0),
                );
                geometry::ray_circle_exit(p, dir, &c, rho)
            }
        }
    }

    /// Base parameters where `|P(t) - x| = radius` (n = 2), used to split
    /// quadrature panels at kink locations of averaged kernels and compactly
    /// supported test functions.
    pub(crate) fn sphere_crossings_1d(
        &self,
        interval: (f64, f64),
        x: &Point,
        radius: f64,
    ) -> Vec<f64> {
        quad::scan_roots(interval.0, interval.1, 256, |t| {
            let (p, _) = self.sample(&[t]);
            p.dist(x) - radius
        })
    }

    /// Ray parameters (n = 3) where the surface point crosses the sphere
    /// `|P - x| = radius` along `p + ρ·dir`.
    pub(crate) fn sphere_crossings_ray(
        &self,
        p: &[f64; 2],
        dir: &[f64; 2],
        rho_max: f64,
        x: &Point,
        radius: f64,
    ) -> Vec<f64> {
        quad::scan_roots(0.0, rho_max, 128, |rho| {
            let xp = [p[0] + rho * dir[0], p[1] + rho * dir[1]];
            let (q, _) = self.sample(&xp);
            q.dist(x) - radius
        })
    }
}

pub(crate) fn chord_radius(ball: &Ball, level: f64) -> Result<f64> {
    let dz = level - ball.center.vertical();
    let sq = ball.radius * ball.radius - dz * dz;
    if sq <= 0.0 {
        return Err(Error::Domain(format!(
            "plane level {level} misses the ball of radius {} at height {}",
            ball.radius,
            ball.center.vertical()
        )));
    }
    Ok(sq.sqrt())
}

type DensityFn = dyn Fn(&Point) -> f64 + Send + Sync;

/// The transmission datum `g` on the interface, with sup and Hölder
/// seminorm accessors.
#[derive(Clone)]
pub struct DensityField {
    kind: DensityKind,
}

#[derive(Clone)]
enum DensityKind {
    Constant(f64),
    Closure { f: Arc<DensityFn>, sup: f64, holder: Option<(f64, f64)> },
}

impl fmt::Debug for DensityField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            DensityKind::Constant(c) => write!(f, "Density({c})"),
            DensityKind::Closure { sup, .. } => write!(f, "Density(closure, sup={sup})"),
        }
    }
}

impl DensityField {
    pub fn constant(c: f64) -> Self {
        DensityField { kind: DensityKind::Constant(c) }
    }

    /// A closure density with its sup bound and, when known, the Hölder
    /// exponent/seminorm pair at the origin.
    pub fn closure(
        f: impl Fn(&Point) -> f64 + Send + Sync + 'static,
        sup: f64,
        holder: Option<(f64, f64)>,
    ) -> Self {
        DensityField { kind: DensityKind::Closure { f: Arc::new(f), sup, holder } }
    }

    pub fn eval(&self, p: &Point) -> f64 {
        match &self.kind {
            DensityKind::Constant(c) => *c,
            DensityKind::Closure { f, .. } => f(p),
        }
    }

    pub fn sup_bound(&self) -> f64 {
        match &self.kind {
            DensityKind::Constant(c) => c.abs(),
            DensityKind::Closure { sup, .. } => *sup,
        }
    }

    /// `(exponent, seminorm)` of the Hölder modulus at 0, when declared.
    pub fn holder(&self) -> Option<(f64, f64)> {
        match &self.kind {
            DensityKind::Constant(_) => Some((1.0, 0.0)),
            DensityKind::Closure { holder, .. } => *holder,
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        match &self.kind {
            DensityKind::Constant(v) => DensityField::constant(c * v),
            DensityKind::Closure { f, sup, holder } => {
                let f = f.clone();
                DensityField {
                    kind: DensityKind::Closure {
                        f: Arc::new(move |p: &Point| c * f(p)),
                        sup: c.abs() * sup,
                        holder: holder.map(|(b, s)| (b, c.abs() * s)),
                    },
                }
            }
        }
    }
}
