//! The curved-vs-flat stability experiment: a curved-interface solution, its
//! flat companion on `T_{-θε}`, the barrier pair with densities
//! `Mⁿ(1+δ)(1-ε)⁻¹` and `M⁻ⁿ(1-δ)`, and the gap `sup_{B_{1/2}} |u - v|`.

use crate::error::{Error, Result};
use crate::geometry::{InterfaceGraph, StabilityParams};
use crate::point::Point;
use crate::potential::{DensityField, QuadConfig, ScalarField, SolutionField};

/// Hypothesis-check resolution for flatness/horizontality grids.
const HYPOTHESIS_GRID: usize = 512;

/// One stability run: parameters, measured interface metrics, the gap, the
/// barrier margins and the imbalance η.
#[derive(Debug, Clone, serde::Serialize)]
pub struct StabilityReport {
    pub params: StabilityParams,
    pub dimension: usize,
    pub flatness: f64,
    pub horizontality: f64,
    /// `sup_{B_{1/2}} |u - v|`.
    pub gap: f64,
    /// `sup_{B_{1-Mε}} (w̲ - u)`.
    pub barrier_low_margin: f64,
    /// `sup_{B_{1-Mε}} (u - w̄)`.
    pub barrier_high_margin: f64,
    pub eta: f64,
    pub grid: usize,
    pub quad: QuadConfig,
}

/// Validate the hypotheses and build `u` as the single-layer solution with
/// zero boundary data. The violated bound is named on failure.
pub fn solve_curved(
    interface: InterfaceGraph,
    density: DensityField,
    params: &StabilityParams,
    cfg: QuadConfig,
) -> Result<SolutionField> {
    let (flatness, horizontality) = interface.flatness_horizontality(HYPOTHESIS_GRID)?;
    let bound = params.theta * params.eps;
    if flatness > bound + 1e-12 {
        return Err(Error::Precondition(format!(
            "interface is not θε-flat: sup|ψ| = {flatness} > θε = {bound}"
        )));
    }
    if horizontality < 1.0 - params.eps - 1e-12 {
        return Err(Error::Precondition(format!(
            "interface is not ε-horizontal: min ν_n = {horizontality} < 1-ε = {}",
            1.0 - params.eps
        )));
    }
    // |g - 1| ≤ δ, sampled over the interface
    let mut worst: f64 = 0.0;
    let mut check = |base: &[f64]| {
        let p = Point::graph(base, interface.psi(base));
        worst = worst.max((density.eval(&p) - 1.0).abs());
    };
    if interface.dim() == 2 {
        for i in 0..HYPOTHESIS_GRID {
            let t = -1.0 + 2.0 * (i as f64 + 0.5) / HYPOTHESIS_GRID as f64;
            check(&[t]);
        }
    } else {
        let m = 64;
        for i in 0..m {
            let a = -1.0 + 2.0 * (i as f64 + 0.5) / m as f64;
            for j in 0..m {
                let b = -1.0 + 2.0 * (j as f64 + 0.5) / m as f64;
                if a * a + b * b < 1.0 {
                    check(&[a, b]);
                }
            }
        }
    }
    if worst > params.delta + 1e-12 {
        return Err(Error::Precondition(format!(
            "density oscillation sup|g-1| = {worst} > δ = {}",
            params.delta
        )));
    }
    SolutionField::single_layer(interface, density, cfg)
}

/// The flat companion: `Δv = dH^{n-1}|_{T_level}`, `v = u` on the boundary.
/// The trace of `u` rides along exactly (layer parts vanish on the sphere).
pub fn flat_companion(u: &SolutionField, level: f64, cfg: QuadConfig) -> Result<SolutionField> {
    if level.abs() >= 0.25 {
        return Err(Error::Precondition(format!(
            "companion level |{level}| >= 1/4 violates the flat-problem hypothesis"
        )));
    }
    let ball = *u.ball();
    let v = SolutionField::plane_layer(ball, level, DensityField::constant(1.0), cfg)?;
    Ok(attach_trace(v, u))
}

fn attach_trace(field: SolutionField, u: &SolutionField) -> SolutionField {
    let trace = u.boundary_trace();
    if trace.is_zero() {
        field
    } else {
        field.with_poisson(1.0, trace)
    }
}

/// The barrier pair on `T_{-θε}` sharing `u`'s boundary data, plus η in
/// closed form.
pub fn barrier_pair(
    u: &SolutionField,
    params: &StabilityParams,
    cfg: QuadConfig,
) -> Result<(SolutionField, SolutionField, f64)> {
    let n = u.dim();
    let level = -params.theta * params.eps;
    let (low_density, high_density) = params.barrier_densities(n);
    let ball = *u.ball();
    let w_low =
        SolutionField::plane_layer(ball, level, DensityField::constant(low_density), cfg)?;
    let w_high =
        SolutionField::plane_layer(ball, level, DensityField::constant(high_density), cfg)?;
    Ok((attach_trace(w_low, u), attach_trace(w_high, u), params.eta(n)))
}

/// `sup |u - v|` over a grid on `B_{1/2}` with at least 64 points per axis.
pub fn stability_gap(
    u: &dyn ScalarField,
    v: &dyn ScalarField,
    grid: usize,
) -> Result<f64> {
    if grid < 64 {
        return Err(Error::Precondition(format!(
            "gap grid must be at least 64 per axis, got {grid}"
        )));
    }
    sup_abs_difference(u, v, grid, 0.5)
}

/// `sup (a - b)` over a filtered grid of the ball of the given radius; also
/// used for barrier margins on `B_{1-Mε}`.
pub fn sup_signed_difference(
    a: &dyn ScalarField,
    b: &dyn ScalarField,
    grid: usize,
    radius: f64,
) -> Result<f64> {
    fold_grid(a, b, grid, radius, f64::NEG_INFINITY, |acc, da| acc.max(da))
}

fn sup_abs_difference(
    a: &dyn ScalarField,
    b: &dyn ScalarField,
    grid: usize,
    radius: f64,
) -> Result<f64> {
    fold_grid(a, b, grid, radius, 0.0, |acc, da| acc.max(da.abs()))
}

fn fold_grid(
    a: &dyn ScalarField,
    b: &dyn ScalarField,
    grid: usize,
    radius: f64,
    init: f64,
    fold: impl Fn(f64, f64) -> f64,
) -> Result<f64> {
    let n = a.dim();
    let mut acc = init;
    let coord = |i: usize| -radius + 2.0 * radius * i as f64 / (grid - 1) as f64;
    let mut visit = |p: Point| -> Result<()> {
        if p.norm() > radius {
            return Ok(());
        }
        let da = a.value(&p)?.value - b.value(&p)?.value;
        acc = fold(acc, da);
        Ok(())
    };
    if n == 2 {
        for i in 0..grid {
            for j in 0..grid {
                visit(Point::xy(coord(i), coord(j)))?;
            }
        }
    } else {
        for i in 0..grid {
            for j in 0..grid {
                for k in 0..grid {
                    visit(Point::xyz(coord(i), coord(j), coord(k)))?;
                }
            }
        }
    }
    Ok(acc)
}

/// Full stability experiment for one parameter triple on the admissible
/// sinusoid family. The density is `g ≡ 1 + δ`, saturating the oscillation
/// budget the same way the sinusoid saturates flatness and horizontality, so
/// the sweep exercises every hypothesis of the estimate.
pub fn stability_experiment(
    n: usize,
    params: &StabilityParams,
    grid: usize,
    cfg: QuadConfig,
) -> Result<StabilityReport> {
    let interface = crate::geometry::admissible_sinusoid(n, params.theta, params.eps)?;
    stability_experiment_on(interface, params, grid, cfg)
}

/// Stability experiment on a caller-supplied interface (it must pass the
/// θε-flatness and ε-horizontality checks).
pub fn stability_experiment_on(
    interface: InterfaceGraph,
    params: &StabilityParams,
    grid: usize,
    cfg: QuadConfig,
) -> Result<StabilityReport> {
    let n = interface.dim();
    let (flatness, horizontality) = interface.flatness_horizontality(HYPOTHESIS_GRID)?;
    let u = solve_curved(interface, DensityField::constant(1.0 + params.delta), params, cfg)?;
    let v = flat_companion(&u, -params.theta * params.eps, cfg)?;
    let gap = stability_gap(&u, &v, grid)?;
    let (w_low, w_high, eta) = barrier_pair(&u, params, cfg)?;
    let margin_radius = 1.0 - params.m() * params.eps;
    let margin_grid = grid.max(64);
    let barrier_low_margin = sup_signed_difference(&w_low, &u, margin_grid, margin_radius)?;
    let barrier_high_margin = sup_signed_difference(&u, &w_high, margin_grid, margin_radius)?;
    Ok(StabilityReport {
        params: *params,
        dimension: n,
        flatness,
        horizontality,
        gap,
        barrier_low_margin,
        barrier_high_margin,
        eta,
        grid,
        quad: cfg,
    })
}
