//! Solution fields: sums of layer potentials and Poisson extensions over a
//! common ambient ball.

use super::layer_eval::LayerEval;
use super::poisson;
use super::surface::{DensityField, LayerSurface, Side};
use super::QuadConfig;
use crate::error::{Error, Result};
use crate::point::{Ball, Point};
use crate::quad::Estimate;
use std::fmt;
use std::sync::Arc;

/// Minimal field interface shared by solution fields and test closures:
/// point values with error estimates and gradients.
pub trait ScalarField: Send + Sync {
    fn dim(&self) -> usize;

    fn value(&self, x: &Point) -> Result<Estimate>;

    /// Gradient with an error estimate; the default is a central difference
    /// of `value`, overridden by analytic kernels where available.
    fn gradient(&self, x: &Point) -> Result<(Point, f64)> {
        let h = 1e-6;
        let mut g = [0.0; 3];
        let mut err = 0.0;
        for i in 0..self.dim() {
            let mut e = [0.0; 3];
            e[i] = 1.0;
            let dir = Point::new(&e[..self.dim()]);
            let vp = self.value(&x.offset(&dir, h))?;
            let vm = self.value(&x.offset(&dir, -h))?;
            g[i] = (vp.value - vm.value) / (2.0 * h);
            err += (vp.error + vm.error) / (2.0 * h);
        }
        Ok((Point::new(&g[..self.dim()]), err + h * h))
    }

    /// Domain of validity, when the field knows one.
    fn domain(&self) -> Option<Ball> {
        None
    }
}

type BoundaryFn = dyn Fn(&Point) -> f64 + Send + Sync;

/// Boundary data for Poisson extensions.
#[derive(Clone)]
pub enum BoundaryData {
    Zero,
    Constant(f64),
    Closure(Arc<BoundaryFn>),
    /// The trace of another field (its layer parts vanish on the boundary,
    /// so this evaluates only what survives there).
    Trace(Arc<SolutionField>),
    Sum(Vec<(f64, BoundaryData)>),
}

impl fmt::Debug for BoundaryData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryData::Zero => write!(f, "Zero"),
            BoundaryData::Constant(c) => write!(f, "Constant({c})"),
            BoundaryData::Closure(_) => write!(f, "Closure"),
            BoundaryData::Trace(_) => write!(f, "Trace"),
            BoundaryData::Sum(v) => write!(f, "Sum({} parts)", v.len()),
        }
    }
}

impl BoundaryData {
    pub fn eval(&self, p: &Point) -> Result<f64> {
        match self {
            BoundaryData::Zero => Ok(0.0),
            BoundaryData::Constant(c) => Ok(*c),
            BoundaryData::Closure(f) => {
                let v = f(p);
                if !v.is_finite() {
                    return Err(Error::Evaluation(format!(
                        "non-finite boundary sample at {:?}",
                        p.coords()
                    )));
                }
                Ok(v)
            }
            BoundaryData::Trace(field) => Ok(field.value(p)?.value),
            BoundaryData::Sum(parts) => {
                let mut acc = 0.0;
                for (c, d) in parts {
                    acc += c * d.eval(p)?;
                }
                Ok(acc)
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, BoundaryData::Zero)
    }
}

/// One building block of a solution field.
#[derive(Debug, Clone)]
pub enum Component {
    Layer { surface: LayerSurface, density: DensityField },
    Poisson { data: BoundaryData },
}

#[derive(Debug, Clone)]
struct Term {
    coeff: f64,
    component: Component,
    /// n = 2 layer terms: cached base intervals inside the ambient ball.
    intervals: Vec<(f64, f64)>,
}

/// A solution evaluator: a linear combination of single-layer potentials and
/// Poisson extensions on a fixed ambient ball. Immutable after construction;
/// point evaluations are pure.
#[derive(Debug, Clone)]
pub struct SolutionField {
    ball: Ball,
    terms: Vec<Term>,
    cfg: QuadConfig,
}

impl SolutionField {
    fn make_term(ball: &Ball, coeff: f64, component: Component) -> Result<Term> {
        let intervals = match (&component, ball.dim()) {
            (Component::Layer { surface, .. }, 2) => surface.base_intervals(ball)?,
            (Component::Layer { surface, .. }, 3) => {
                surface.base_disk(ball)?;
                Vec::new()
            }
            _ => Vec::new(),
        };
        Ok(Term { coeff, component, intervals })
    }

    /// Single-layer potential `u(x) = ∫_Γ G(x,y) g(y) dH^{n-1}` on the unit
    /// ball, zero boundary values. The graph must stay in the vertical band
    /// `|ψ| < 1` so the in-ball part of Γ is nonempty.
    pub fn single_layer(
        graph: crate::geometry::InterfaceGraph,
        density: DensityField,
        cfg: QuadConfig,
    ) -> Result<SolutionField> {
        let ball = Ball::unit(graph.dim());
        let (flatness, _) = graph.flatness_horizontality(128)?;
        if flatness >= 1.0 {
            return Err(Error::Precondition(format!(
                "interface leaves the vertical band |psi| < 1 (sup |psi| = {flatness})"
            )));
        }
        let term = Self::make_term(
            &ball,
            1.0,
            Component::Layer { surface: LayerSurface::Graph(graph), density },
        )?;
        Ok(SolutionField { ball, terms: vec![term], cfg })
    }

    /// Single-layer potential on the plane chord `T_level` of the given ball.
    pub fn plane_layer(
        ball: Ball,
        level: f64,
        density: DensityField,
        cfg: QuadConfig,
    ) -> Result<SolutionField> {
        let term = Self::make_term(
            &ball,
            1.0,
            Component::Layer { surface: LayerSurface::Plane { level }, density },
        )?;
        Ok(SolutionField { ball, terms: vec![term], cfg })
    }

    /// Harmonic extension of boundary data.
    pub fn poisson(ball: Ball, data: BoundaryData, cfg: QuadConfig) -> SolutionField {
        let term = Term { coeff: 1.0, component: Component::Poisson { data }, intervals: vec![] };
        SolutionField { ball, terms: vec![term], cfg }
    }

    /// Linear combination of fields sharing one ambient ball.
    pub fn combine(parts: &[(f64, &SolutionField)]) -> Result<SolutionField> {
        let first = parts
            .first()
            .ok_or_else(|| Error::Config("empty field combination".into()))?
            .1;
        let mut terms = Vec::new();
        for (c, f) in parts {
            if f.ball != first.ball {
                return Err(Error::Config(
                    "cannot combine fields over different ambient balls".into(),
                ));
            }
            for t in &f.terms {
                terms.push(Term {
                    coeff: c * t.coeff,
                    component: t.component.clone(),
                    intervals: t.intervals.clone(),
                });
            }
        }
        Ok(SolutionField { ball: first.ball, terms, cfg: first.cfg })
    }

    pub fn scaled(&self, c: f64) -> SolutionField {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.coeff *= c;
        }
        out
    }

    /// Append a Poisson term with the given data.
    pub fn with_poisson(mut self, coeff: f64, data: BoundaryData) -> SolutionField {
        self.terms.push(Term {
            coeff,
            component: Component::Poisson { data },
            intervals: vec![],
        });
        self
    }

    pub fn ball(&self) -> &Ball {
        &self.ball
    }

    pub fn quad_config(&self) -> &QuadConfig {
        &self.cfg
    }

    pub fn with_quad_config(mut self, cfg: QuadConfig) -> SolutionField {
        self.cfg = cfg;
        self
    }

    pub fn components(&self) -> impl Iterator<Item = (f64, &Component)> {
        self.terms.iter().map(|t| (t.coeff, &t.component))
    }

    /// The first layer surface, which defines the two phases for side
    /// classification.
    pub fn primary_surface(&self) -> Option<&LayerSurface> {
        self.terms.iter().find_map(|t| match &t.component {
            Component::Layer { surface, .. } => Some(surface),
            _ => None,
        })
    }

    /// Side of the primary interface the point lies on.
    pub fn classify(&self, x: &Point, tol: f64) -> Option<Side> {
        self.primary_surface().map(|s| s.classify(x, tol))
    }

    /// The boundary trace: layer potentials against the ball's Green kernel
    /// vanish on the boundary, so only Poisson terms survive.
    pub fn boundary_trace(&self) -> BoundaryData {
        let mut parts: Vec<(f64, BoundaryData)> = Vec::new();
        for t in &self.terms {
            if let Component::Poisson { data } = &t.component {
                parts.push((t.coeff, data.clone()));
            }
        }
        match parts.len() {
            0 => BoundaryData::Zero,
            1 if parts[0].0 == 1.0 => parts.pop().unwrap().1,
            _ => BoundaryData::Sum(parts),
        }
    }

    /// Mean of the field over `B_eps(x)`, computed with the exactly averaged
    /// Green kernel (layer terms) and the mean value property (Poisson
    /// terms). Requires `B_eps(x)` inside the ambient ball.
    pub fn ball_mean(&self, x: &Point, eps: f64) -> Result<Estimate> {
        if self.ball.boundary_dist(x) <= eps {
            return Err(Error::Domain(format!(
                "averaging ball of radius {eps} exits the domain (boundary distance {:.3e})",
                self.ball.boundary_dist(x)
            )));
        }
        let mut acc = Estimate::exact(0.0);
        for t in &self.terms {
            let part = match &t.component {
                Component::Layer { surface, density } => LayerEval {
                    ball: &self.ball,
                    surface,
                    density,
                    intervals: &t.intervals,
                    cfg: &self.cfg,
                }
                .mean_value(x, eps)?,
                // harmonic part: ball mean equals the value
                Component::Poisson { data } => poisson::poisson_value(&self.ball, data, x, &self.cfg)?,
            };
            acc = acc.add(&part.scale(t.coeff));
        }
        Ok(acc)
    }
}

impl ScalarField for SolutionField {
    fn dim(&self) -> usize {
        self.ball.dim()
    }

    fn value(&self, x: &Point) -> Result<Estimate> {
        let mut acc = Estimate::exact(0.0);
        for t in &self.terms {
            let part = match &t.component {
                Component::Layer { surface, density } => LayerEval {
                    ball: &self.ball,
                    surface,
                    density,
                    intervals: &t.intervals,
                    cfg: &self.cfg,
                }
                .value(x)?,
                Component::Poisson { data } => poisson::poisson_value(&self.ball, data, x, &self.cfg)?,
            };
            acc = acc.add(&part.scale(t.coeff));
        }
        Ok(acc)
    }

    fn gradient(&self, x: &Point) -> Result<(Point, f64)> {
        let mut g = Point::zero(self.dim());
        let mut err = 0.0;
        for t in &self.terms {
            let (part, e) = match &t.component {
                Component::Layer { surface, density } => LayerEval {
                    ball: &self.ball,
                    surface,
                    density,
                    intervals: &t.intervals,
                    cfg: &self.cfg,
                }
                .gradient(x)?,
                Component::Poisson { data } => {
                    poisson::poisson_gradient(&self.ball, data, x, &self.cfg)?
                }
            };
            g = g.add(&part.scale(t.coeff));
            err += t.coeff.abs() * e;
        }
        Ok((g, err))
    }

    fn domain(&self) -> Option<Ball> {
        Some(self.ball)
    }
}

/// A test field defined by closures.
pub struct ClosureField {
    n: usize,
    f: Arc<BoundaryFn>,
    grad: Option<Arc<dyn Fn(&Point) -> Point + Send + Sync>>,
}

impl ClosureField {
    pub fn new(n: usize, f: impl Fn(&Point) -> f64 + Send + Sync + 'static) -> Self {
        ClosureField { n, f: Arc::new(f), grad: None }
    }

    pub fn with_gradient(
        mut self,
        g: impl Fn(&Point) -> Point + Send + Sync + 'static,
    ) -> Self {
        self.grad = Some(Arc::new(g));
        self
    }
}

impl ScalarField for ClosureField {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, x: &Point) -> Result<Estimate> {
        let v = (self.f)(x);
        if !v.is_finite() {
            return Err(Error::Evaluation("non-finite closure field sample".into()));
        }
        Ok(Estimate::exact(v))
    }

    fn gradient(&self, x: &Point) -> Result<(Point, f64)> {
        if let Some(g) = &self.grad {
            return Ok((g(x), 0.0));
        }
        let h = 1e-6;
        let mut out = [0.0; 3];
        for i in 0..self.n {
            let mut e = [0.0; 3];
            e[i] = 1.0;
            let dir = Point::new(&e[..self.n]);
            out[i] = ((self.f)(&x.offset(&dir, h)) - (self.f)(&x.offset(&dir, -h))) / (2.0 * h);
        }
        Ok((Point::new(&out[..self.n]), 1e-9))
    }
}
