//! The five experiment pipelines behind the CLI subcommands.

use crate::config::{CommandKind, ExperimentConfig};
use crate::report::{fmt_f64, write_csv, ExperimentReport};
use anyhow::Context;
use rayon::prelude::*;
use serde_json::json;
use std::path::{Path, PathBuf};
use translab_core::averaging::{ball_average, interface_average, laplacian_match, AveragedField};
use translab_core::flat::{flat_solve, normal_jump, FlatSlab};
use translab_core::geometry::StabilityParams;
use translab_core::potential::{
    single_layer_solve, BoundaryData, DensityField, LayerSurface, ScalarField,
};
use translab_core::regularity::{
    estimate_exponent, fit_polynomial_single, fit_polynomials, normalize, sup_on_grid,
    NormalizeInput,
};
use translab_core::stability::stability_experiment;
use translab_core::{Ball, Point};

pub struct PipelineOutcome {
    pub report: ExperimentReport,
    pub files: Vec<PathBuf>,
    /// Nonzero when a verification-style pipeline had failing checks.
    pub failed_checks: usize,
}

pub fn run_pipeline(
    command: CommandKind,
    cfg: &ExperimentConfig,
    seed: u64,
    out_dir: &Path,
) -> anyhow::Result<PipelineOutcome> {
    match command {
        CommandKind::Solve => run_solve(cfg, seed, out_dir),
        CommandKind::Flat => run_flat(cfg, seed, out_dir),
        CommandKind::StabilitySweep => run_sweep(cfg, seed, out_dir),
        CommandKind::RegularityFit => run_regularity(cfg, seed, out_dir),
        CommandKind::Verify => run_verify(cfg, seed, out_dir),
    }
}

fn grid_points(n: usize, size: usize, radius: f64) -> Vec<Point> {
    let coord = |i: usize| -radius + 2.0 * radius * i as f64 / (size - 1) as f64;
    let mut pts = Vec::new();
    if n == 2 {
        for i in 0..size {
            for j in 0..size {
                let p = Point::xy(coord(i), coord(j));
                if p.norm() < radius {
                    pts.push(p);
                }
            }
        }
    } else {
        for i in 0..size {
            for j in 0..size {
                for k in 0..size {
                    let p = Point::xyz(coord(i), coord(j), coord(k));
                    if p.norm() < radius {
                        pts.push(p);
                    }
                }
            }
        }
    }
    pts
}

fn run_solve(cfg: &ExperimentConfig, seed: u64, out_dir: &Path) -> anyhow::Result<PipelineOutcome> {
    let mut report = ExperimentReport::new("solve", seed, cfg);
    let interface = cfg.build_interface()?;
    let density = cfg.build_density();
    let quad = cfg.quadrature.to_core();
    report.record_op(
        "single_layer_solve",
        &[
            ("family", json!(interface.family_name())),
            ("surface_order", json!(quad.surface_order)),
        ],
    );
    let u = single_layer_solve(interface, density, quad).context("single-layer solve failed")?;

    let pts = grid_points(cfg.dimension, cfg.grid.size, 1.0 - 1e-9);
    let rows: Vec<String> = pts
        .par_iter()
        .map(|p| {
            let est = u.value(p).map_err(|e| anyhow::anyhow!("{e}"))?;
            let coords: Vec<String> = p.coords().iter().map(|c| fmt_f64(*c)).collect();
            Ok(format!("{},{},{}", coords.join(","), fmt_f64(est.value), fmt_f64(est.error)))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let header = if cfg.dimension == 2 { "x1,x2,u,err_est" } else { "x1,x2,x3,u,err_est" };
    let csv = write_csv(out_dir, "solution.csv", header, &rows)?;
    report.record_op("grid_evaluation", &[("points", json!(rows.len()))]);

    let mut u_min = f64::INFINITY;
    let mut u_max = f64::NEG_INFINITY;
    for p in &pts {
        let v = u.value(p).map_err(|e| anyhow::anyhow!("{e}"))?.value;
        u_min = u_min.min(v);
        u_max = u_max.max(v);
    }
    let mut boundary_max: f64 = 0.0;
    for k in 0..64 {
        let a = 2.0 * std::f64::consts::PI * k as f64 / 64.0;
        let p = if cfg.dimension == 2 {
            Point::xy(a.cos(), a.sin())
        } else {
            Point::xyz(a.cos(), a.sin(), 0.0)
        };
        boundary_max = boundary_max.max(u.value(&p).map_err(|e| anyhow::anyhow!("{e}"))?.value.abs());
    }
    report.metric("u_min", u_min);
    report.metric("u_max", u_max);
    report.metric("boundary_max_abs", boundary_max);
    report.metric("rows", rows.len());
    let rp = report.write(out_dir)?;
    Ok(PipelineOutcome { report, files: vec![csv, rp], failed_checks: 0 })
}

fn run_flat(cfg: &ExperimentConfig, seed: u64, out_dir: &Path) -> anyhow::Result<PipelineOutcome> {
    let mut report = ExperimentReport::new("flat", seed, cfg);
    let f = &cfg.flat;
    let slab = FlatSlab::new(cfg.dimension, f.r, f.a).map_err(|e| anyhow::anyhow!("{e}"))?;
    let quad = cfg.quadrature.to_core();
    report.record_op(
        "flat_solve",
        &[("c0", json!(f.c0)), ("a", json!(f.a)), ("r", json!(f.r))],
    );
    let v = flat_solve(&slab, DensityField::constant(f.c0), BoundaryData::Zero, quad)
        .map_err(|e| anyhow::anyhow!("{e}"))?;

    let mut rows = Vec::new();
    for &line in &f.lines {
        let height = (f.r * f.r - line * line).sqrt() * 0.999;
        for s in 0..f.samples_per_line {
            let xn = f.a - height + 2.0 * height * s as f64 / (f.samples_per_line - 1) as f64;
            let p = if cfg.dimension == 2 {
                Point::xy(line, xn)
            } else {
                Point::xyz(line, 0.0, xn)
            };
            let est = v.value(&p).map_err(|e| anyhow::anyhow!("{e}"))?;
            rows.push(format!(
                "{},{},{},{}",
                fmt_f64(line),
                fmt_f64(xn),
                fmt_f64(est.value),
                fmt_f64(est.error)
            ));
        }
    }
    let csv = write_csv(out_dir, "flat_profile.csv", "line,x_n,v,err_est", &rows)?;

    // normal-derivative jump at the interface points of each profile line
    let mut e = [0.0; 3];
    e[cfg.dimension - 1] = 1.0;
    let e_n = Point::new(&e[..cfg.dimension]);
    for &line in &f.lines {
        if slab.rim_distance(&Point::graph(
            &vec![line, 0.0][..cfg.dimension - 1],
            f.a,
        )) < 0.2 * f.r
        {
            continue;
        }
        let x = Point::graph(&vec![line, 0.0][..cfg.dimension - 1], f.a);
        let (jump, err) = normal_jump(&v, &x, &e_n, 0.05 * f.r)
            .map_err(|e| anyhow::anyhow!("{e}"))?;
        report.record_op(
            "one_sided_derivative",
            &[("line", json!(line)), ("ladder_t0", json!(0.05 * f.r))],
        );
        report.table_row(
            "jumps",
            json!({"line": line, "jump": jump, "err_est": err, "expected": f.c0}),
        );
    }
    report.metric("rows", rows.len());
    let rp = report.write(out_dir)?;
    Ok(PipelineOutcome { report, files: vec![csv, rp], failed_checks: 0 })
}

#[derive(serde::Serialize)]
struct SweepRow {
    theta: f64,
    delta: f64,
    eps: f64,
    gamma: f64,
    flatness: f64,
    horizontality: f64,
    gap: f64,
    eta: f64,
    barrier_low: f64,
    barrier_high: f64,
}

fn run_sweep(cfg: &ExperimentConfig, seed: u64, out_dir: &Path) -> anyhow::Result<PipelineOutcome> {
    let mut report = ExperimentReport::new("stability-sweep", seed, cfg);
    let quad = cfg.quadrature.to_core();
    let s = &cfg.stability;
    let n = cfg.dimension;
    // sweep entries are independent jobs; results are merged by index
    let results: Vec<_> = s
        .sweep
        .par_iter()
        .map(|&e| {
            let params = StabilityParams::new(e, e, e, s.gamma)
                .map_err(|err| anyhow::anyhow!("{err}"))?;
            stability_experiment(n, &params, s.grid, quad).map_err(|err| anyhow::anyhow!("{err}"))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    for r in &results {
        report.record_op(
            "stability_experiment",
            &[
                ("theta", json!(r.params.theta)),
                ("eps", json!(r.params.eps)),
                ("delta", json!(r.params.delta)),
                ("grid", json!(r.grid)),
            ],
        );
        let row = SweepRow {
            theta: r.params.theta,
            delta: r.params.delta,
            eps: r.params.eps,
            gamma: r.params.gamma,
            flatness: r.flatness,
            horizontality: r.horizontality,
            gap: r.gap,
            eta: r.eta,
            barrier_low: r.barrier_low_margin,
            barrier_high: r.barrier_high_margin,
        };
        rows.push(format!(
            "{},{},{},{},{},{},{},{},{},{}",
            fmt_f64(row.theta),
            fmt_f64(row.delta),
            fmt_f64(row.eps),
            fmt_f64(row.gamma),
            fmt_f64(row.flatness),
            fmt_f64(row.horizontality),
            fmt_f64(row.gap),
            fmt_f64(row.eta),
            fmt_f64(row.barrier_low),
            fmt_f64(row.barrier_high),
        ));
        report.table_row("stability_sweep", row);
    }
    let csv = write_csv(
        out_dir,
        "stability_sweep.csv",
        "theta,delta,eps,gamma,flatness,horizontality,gap,eta,barrier_low,barrier_high",
        &rows,
    )?;

    // log-log slope of the gap against ε over the sweep
    if results.len() >= 2 {
        let xs: Vec<f64> = results.iter().map(|r| r.params.eps.ln()).collect();
        let ys: Vec<f64> = results.iter().map(|r| r.gap.max(1e-300).ln()).collect();
        let mx = xs.iter().sum::<f64>() / xs.len() as f64;
        let my = ys.iter().sum::<f64>() / ys.len() as f64;
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        report.metric("gap_loglog_slope", sxy / sxx);
    }
    report.metric("rows", rows.len());
    let rp = report.write(out_dir)?;
    Ok(PipelineOutcome { report, files: vec![csv, rp], failed_checks: 0 })
}

fn run_regularity(
    cfg: &ExperimentConfig,
    seed: u64,
    out_dir: &Path,
) -> anyhow::Result<PipelineOutcome> {
    let mut report = ExperimentReport::new("regularity-fit", seed, cfg);
    let r = &cfg.regularity;
    let quad = cfg.quadrature.to_core();
    let n = cfg.dimension;

    let interface0 = cfg.build_interface()?;
    let density0 = cfg.build_density();
    let origin = vec![0.0; n - 1];
    let psi0 = interface0.psi(&origin);
    let grad0 = interface0.grad_psi(&origin);
    let grad0_norm = grad0[..n - 1].iter().map(|v| v * v).sum::<f64>().sqrt();
    let psi_seminorm = interface0.holder_data().map(|h| h.seminorm).unwrap_or(0.0);
    let g0 = density0.eval(&Point::graph(&origin, psi0));
    let g_holder = density0.holder().map(|(_, s)| s).unwrap_or(0.0);

    // ψ normalization happens before the solve: scaling the profile changes
    // the problem, so the solution is built for the normalized interface
    let pre = normalize(
        &NormalizeInput {
            sup_u: 0.0,
            g0,
            g_holder,
            psi_seminorm,
            grad_psi_origin: grad0_norm,
            psi_origin: psi0,
        },
        r.delta0,
    )
    .map_err(|e| anyhow::anyhow!("{e}"))?;
    let interface = interface0.scaled(pre.psi_scale);
    report.record_op(
        "normalize",
        &[("psi_scale", json!(pre.psi_scale)), ("delta0", json!(r.delta0))],
    );

    report.record_op(
        "single_layer_solve",
        &[
            ("family", json!(interface.family_name())),
            ("surface_order", json!(quad.surface_order)),
        ],
    );
    let u = single_layer_solve(interface.clone(), density0, quad)
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    let sup_u = sup_on_grid(&u, &Ball::unit(n), 48).map_err(|e| anyhow::anyhow!("{e}"))?;
    let nz = normalize(
        &NormalizeInput {
            sup_u,
            g0,
            g_holder,
            psi_seminorm: psi_seminorm * pre.psi_scale,
            grad_psi_origin: grad0_norm,
            psi_origin: psi0,
        },
        r.delta0,
    )
    .map_err(|e| anyhow::anyhow!("{e}"))?;
    report.record_op(
        "normalize",
        &[
            ("field_scale", json!(nz.field_scale)),
            ("harmonic_branch", json!(nz.harmonic_branch)),
            ("sup_u", json!(sup_u)),
        ],
    );
    let u_fit = u.scaled(nz.field_scale);
    let g0_fit = g0 * nz.field_scale;

    let mut rows = Vec::new();
    let residuals: Vec<f64>;
    let mut truncated = false;
    if nz.harmonic_branch {
        report.record_op(
            "fit_polynomial_single",
            &[("lambda", json!(r.lambda)), ("depth", json!(r.depth))],
        );
        let fits = fit_polynomial_single(
            &u_fit,
            r.lambda,
            r.depth,
            2 * r.samples_per_scale,
            seed,
        )
        .map_err(|e| anyhow::anyhow!("{e}"))?;
        residuals = fits.iter().map(|(_, _, res)| *res).collect();
        for (k, poly, res) in &fits {
            let a: Vec<String> =
                poly.gradient.coords().iter().map(|c| fmt_f64(*c)).collect();
            // single-polynomial branch: both residual columns and both
            // coefficient blocks carry the same fit
            rows.push(format!(
                "{},{},{},{},{},{},0,0",
                k,
                fmt_f64(*res),
                fmt_f64(*res),
                a.join(","),
                fmt_f64(poly.constant),
                a.join(","),
            ));
        }
    } else {
        report.record_op(
            "fit_polynomials",
            &[
                ("lambda", json!(r.lambda)),
                ("depth", json!(r.depth)),
                ("samples_per_scale", json!(r.samples_per_scale)),
                ("g0", json!(g0_fit)),
            ],
        );
        let fit = fit_polynomials(
            &u_fit,
            &interface,
            g0_fit,
            r.lambda,
            r.depth,
            r.samples_per_scale,
            seed,
        )
        .map_err(|e| anyhow::anyhow!("{e}"))?;
        truncated = fit.truncated;
        residuals = fit.residuals();
        for s in &fit.scales {
            let a: Vec<String> =
                s.upper.gradient.coords().iter().map(|c| fmt_f64(*c)).collect();
            let c: Vec<String> =
                s.lower.gradient.coords().iter().map(|c| fmt_f64(*c)).collect();
            rows.push(format!(
                "{},{},{},{},{},{},{},{}",
                s.k,
                fmt_f64(s.res_upper),
                fmt_f64(s.res_lower),
                a.join(","),
                fmt_f64(s.upper.constant),
                c.join(","),
                fmt_f64(s.tangential_mismatch),
                fmt_f64(s.jump_error),
            ));
            report.table_row(
                "scales",
                json!({
                    "k": s.k,
                    "res1": s.res_upper,
                    "res2": s.res_lower,
                    "tangential_mismatch": s.tangential_mismatch,
                    "jump_error": s.jump_error,
                    "samples": s.samples,
                }),
            );
        }
    }
    let a_cols: Vec<String> = (1..=n).map(|i| format!("a_{i}")).collect();
    let c_cols: Vec<String> = (1..=n).map(|i| format!("c_{i}")).collect();
    let header = format!(
        "k,res1,res2,{},b,{},tangential_mismatch,jump_error",
        a_cols.join(","),
        c_cols.join(",")
    );
    let csv = write_csv(out_dir, "regularity_fit.csv", &header, &rows)?;

    report.record_op("estimate_exponent", &[("lambda", json!(r.lambda))]);
    match estimate_exponent(&residuals, r.lambda, sup_u.max(1e-300)) {
        Ok(est) => {
            println!(
                "alpha_hat = {:.6} (band [{:.6}, {:.6}], slope {:.6}, {} scales{})",
                est.alpha_hat,
                est.band.0,
                est.band.1,
                est.slope,
                est.scales_used,
                if est.saturated { ", saturated" } else { "" }
            );
            report.metric("alpha_hat", est.alpha_hat);
            report.metric("alpha_band", est.band);
            report.metric("slope", est.slope);
            report.metric("saturated", est.saturated);
            report.metric("scales_used", est.scales_used);
        }
        Err(e) => {
            println!("alpha_hat unavailable: {e}");
            report.metric("alpha_hat_error", e.to_string());
        }
    }
    report.metric("truncated", truncated);
    report.metric("residuals", &residuals);
    let rp = report.write(out_dir)?;
    Ok(PipelineOutcome { report, files: vec![csv, rp], failed_checks: 0 })
}

struct Check {
    name: &'static str,
    value: f64,
    threshold: f64,
    pass: bool,
}

fn run_verify(cfg: &ExperimentConfig, seed: u64, out_dir: &Path) -> anyhow::Result<PipelineOutcome> {
    let mut report = ExperimentReport::new("verify", seed, cfg);
    let v = &cfg.verify;
    let quad = cfg.quadrature.to_core();
    let interface = cfg.build_interface()?;
    let density = cfg.build_density();
    let surface = LayerSurface::Graph(interface.clone());
    let u = single_layer_solve(interface, density.clone(), quad)
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    report.record_op("single_layer_solve", &[("surface_order", json!(quad.surface_order))]);
    let mut checks: Vec<Check> = Vec::new();

    // mean value property off the interface
    let eps = v.eps;
    let mut worst_mv: f64 = 0.0;
    let mut used = 0usize;
    let mut k = 0usize;
    while used < v.points && k < 50 * v.points {
        k += 1;
        // golden-angle spiral, deterministic
        let rad = 0.15 + 0.8 * (k as f64 * 0.6180339887498949).fract();
        let ang = 2.39996322972865 * k as f64;
        let p = Point::xy(rad * ang.cos(), rad * ang.sin());
        if p.norm() > 1.0 - eps - 0.02 {
            continue;
        }
        if translab_core::regularity::surface_distance(&surface, &p) < eps + 0.02 {
            continue;
        }
        used += 1;
        let avg = ball_average(&u, &p, eps, 16).map_err(|e| anyhow::anyhow!("{e}"))?;
        let val = u.value(&p).map_err(|e| anyhow::anyhow!("{e}"))?;
        worst_mv = worst_mv.max((avg.value - val.value).abs());
    }
    report.record_op("ball_average", &[("points", json!(used)), ("eps", json!(eps))]);
    checks.push(Check {
        name: "mean_value_off_interface",
        value: worst_mv,
        threshold: 1e-6,
        pass: worst_mv < 1e-6,
    });

    // Δu_ε = g_ε inside the band, at the configured step and after halving
    let avg_field = AveragedField::new(&u, eps).map_err(|e| anyhow::anyhow!("{e}"))?;
    let x_band = Point::xy(0.1, 0.0);
    let m1 = laplacian_match(&avg_field, &x_band, v.h).map_err(|e| anyhow::anyhow!("{e}"))?;
    report.record_op("laplacian_match", &[("h", json!(v.h)), ("eps", json!(eps))]);
    let budget = f64::max(1e-3, 1.5 * (m1.fd_budget + m1.quad_budget));
    checks.push(Check {
        name: "laplacian_match_at_h",
        value: m1.residual,
        threshold: budget,
        pass: m1.residual < budget,
    });
    let m2 =
        laplacian_match(&avg_field, &x_band, v.h / 2.0).map_err(|e| anyhow::anyhow!("{e}"))?;
    let m3 =
        laplacian_match(&avg_field, &x_band, v.h / 4.0).map_err(|e| anyhow::anyhow!("{e}"))?;
    checks.push(Check {
        name: "laplacian_match_refines",
        value: m3.residual,
        threshold: f64::max(1e-3, m2.residual),
        pass: m3.residual < m2.residual.max(1e-3) && m2.residual < m1.residual.max(1e-3),
    });

    // off-band: harmonic, so the averaged Laplacian vanishes at O(h²)
    let x_off = Point::xy(0.0, 0.55);
    let m_off = laplacian_match(&avg_field, &x_off, v.h).map_err(|e| anyhow::anyhow!("{e}"))?;
    checks.push(Check {
        name: "laplacian_vanishes_off_band",
        value: m_off.residual,
        threshold: 1e-3,
        pass: m_off.residual < 1e-3 && m_off.interface_average == 0.0,
    });

    // g_ε is continuous across the edge of Γ_ε: adjacent-sample jumps shrink
    // under path refinement
    let max_jump = |m: usize| -> anyhow::Result<f64> {
        let mut worst: f64 = 0.0;
        let mut prev: Option<f64> = None;
        for j in 0..=m {
            let z = eps * 0.5 + eps * j as f64 / m as f64;
            let g = avg_field
                .interface_average(&Point::xy(0.2, z))
                .map_err(|e| anyhow::anyhow!("{e}"))?;
            if let Some(p) = prev {
                worst = worst.max((g.value - p).abs());
            }
            prev = Some(g.value);
        }
        Ok(worst)
    };
    let coarse = max_jump(50)?;
    let fine = max_jump(200)?;
    report.record_op("interface_average", &[("path_samples", json!(200))]);
    checks.push(Check {
        name: "g_eps_edge_continuity",
        value: fine / coarse.max(1e-300),
        threshold: 0.6,
        pass: fine < 0.6 * coarse,
    });

    // linearity of the interface average in the density
    let g1 = interface_average(&density, &surface, &Point::xy(0.1, 0.02), eps, 16)
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    let g3 = interface_average(&density.scaled(3.0), &surface, &Point::xy(0.1, 0.02), eps, 16)
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    let lin_err = (g3.value - 3.0 * g1.value).abs();
    checks.push(Check {
        name: "interface_average_linearity",
        value: lin_err,
        threshold: 1e-12,
        pass: lin_err < 1e-12,
    });

    let rows: Vec<String> = checks
        .iter()
        .map(|c| {
            format!("{},{},{},{}", c.name, fmt_f64(c.value), fmt_f64(c.threshold), c.pass)
        })
        .collect();
    let csv = write_csv(out_dir, "verify.csv", "check,value,threshold,pass", &rows)?;
    let failed = checks.iter().filter(|c| !c.pass).count();
    for c in &checks {
        report.table_row(
            "checks",
            json!({
                "check": c.name,
                "value": c.value,
                "threshold": c.threshold,
                "pass": c.pass,
            }),
        );
        println!(
            "{:<32} {:<10} value {:.3e} threshold {:.3e}",
            c.name,
            if c.pass { "PASS" } else { "FAIL" },
            c.value,
            c.threshold
        );
    }
    report.metric("failed_checks", failed);
    let rp = report.write(out_dir)?;
    Ok(PipelineOutcome { report, files: vec![csv, rp], failed_checks: failed })
}
