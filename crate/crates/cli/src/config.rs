//! Experiment configuration: TOML on disk, fully validated before any heavy
//! computation starts. Every module precondition that can be checked from
//! the config alone is checked here.

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};
use translab_core::geometry::{make_test_interface, InterfaceGraph};
use translab_core::potential::{DensityField, QuadConfig};
use translab_core::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Solve,
    Flat,
    StabilitySweep,
    RegularityFit,
    Verify,
}

impl std::fmt::Display for CommandKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CommandKind::Solve => "solve",
            CommandKind::Flat => "flat",
            CommandKind::StabilitySweep => "stability-sweep",
            CommandKind::RegularityFit => "regularity-fit",
            CommandKind::Verify => "verify",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Optional echo of the command; must match the CLI subcommand when set.
    pub command: Option<CommandKind>,
    #[serde(default = "default_dimension")]
    pub dimension: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub interface: InterfaceConfig,
    #[serde(default)]
    pub density: DensityConfig,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub flat: FlatConfig,
    #[serde(default)]
    pub stability: StabilityConfig,
    #[serde(default)]
    pub regularity: RegularityConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
}

fn default_dimension() -> usize {
    2
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterfaceConfig {
    pub family: String,
    #[serde(default)]
    pub params: Vec<f64>,
}

impl Default for InterfaceConfig {
    fn default() -> Self {
        InterfaceConfig { family: "flat".into(), params: vec![] }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct DensityConfig {
    /// `constant` or `holder-radial` (`value + coeff |x'|^exponent`).
    pub kind: String,
    #[serde(default = "one")]
    pub value: f64,
    #[serde(default)]
    pub coeff: f64,
    #[serde(default = "one")]
    pub exponent: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for DensityConfig {
    fn default() -> Self {
        DensityConfig { kind: "constant".into(), value: 1.0, coeff: 0.0, exponent: 1.0 }
    }
}

/// Documented defaults: surface order 64, volume order 32.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    #[serde(default = "d_surface")]
    pub surface_order: usize,
    #[serde(default = "d_angular")]
    pub angular_order: usize,
    #[serde(default = "d_poisson")]
    pub poisson_order: usize,
    #[serde(default = "d_volume")]
    pub volume_order: usize,
}

fn d_surface() -> usize {
    64
}
fn d_angular() -> usize {
    64
}
fn d_poisson() -> usize {
    256
}
fn d_volume() -> usize {
    32
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            surface_order: 64,
            angular_order: 64,
            poisson_order: 256,
            volume_order: 32,
        }
    }
}

impl QuadratureConfig {
    pub fn to_core(self) -> QuadConfig {
        QuadConfig {
            surface_order: self.surface_order,
            angular_order: self.angular_order,
            poisson_order: self.poisson_order,
            volume_order: self.volume_order,
            min_panel: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "d_grid")]
    pub size: usize,
}

fn d_grid() -> usize {
    128
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { size: 128 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlatConfig {
    #[serde(default = "one")]
    pub c0: f64,
    #[serde(default)]
    pub a: f64,
    #[serde(default = "one")]
    pub r: f64,
    /// Base coordinates of the vertical profile lines.
    #[serde(default = "d_lines")]
    pub lines: Vec<f64>,
    #[serde(default = "d_line_samples")]
    pub samples_per_line: usize,
}

fn d_lines() -> Vec<f64> {
    vec![0.0, 0.25]
}
fn d_line_samples() -> usize {
    65
}

impl Default for FlatConfig {
    fn default() -> Self {
        FlatConfig { c0: 1.0, a: 0.0, r: 1.0, lines: d_lines(), samples_per_line: 65 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilityConfig {
    #[serde(default = "d_gamma")]
    pub gamma: f64,
    /// The sweep sets θ = δ = ε to each listed value.
    #[serde(default = "d_sweep")]
    pub sweep: Vec<f64>,
    #[serde(default = "d_stab_grid")]
    pub grid: usize,
}

fn d_gamma() -> f64 {
    0.5
}
fn d_sweep() -> Vec<f64> {
    vec![0.2, 0.1, 0.05, 0.025]
}
fn d_stab_grid() -> usize {
    64
}

impl Default for StabilityConfig {
    fn default() -> Self {
        StabilityConfig { gamma: 0.5, sweep: d_sweep(), grid: 64 }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegularityConfig {
    #[serde(default = "d_lambda")]
    pub lambda: f64,
    #[serde(default = "d_depth")]
    pub depth: usize,
    #[serde(default = "d_samples")]
    pub samples_per_scale: usize,
    #[serde(default = "d_delta0")]
    pub delta0: f64,
}

fn d_lambda() -> f64 {
    0.5
}
fn d_depth() -> usize {
    8
}
fn d_samples() -> usize {
    200
}
fn d_delta0() -> f64 {
    0.05
}

impl Default for RegularityConfig {
    fn default() -> Self {
        RegularityConfig { lambda: 0.5, depth: 8, samples_per_scale: 200, delta0: 0.05 }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    #[serde(default = "d_eps")]
    pub eps: f64,
    #[serde(default = "d_step")]
    pub h: f64,
    #[serde(default = "d_points")]
    pub points: usize,
}

fn d_eps() -> f64 {
    0.1
}
fn d_step() -> f64 {
    0.01
}
fn d_points() -> usize {
    200
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { eps: 0.1, h: 0.01, points: 200 }
    }
}

impl ExperimentConfig {
    pub fn load(path: &std::path::Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let cfg: ExperimentConfig =
            toml::from_str(&text).with_context(|| format!("invalid config {}", path.display()))?;
        Ok(cfg)
    }

    /// Validate everything checkable without computation; returns the
    /// interface to catch family errors early.
    pub fn validate(&self, command: CommandKind) -> anyhow::Result<InterfaceGraph> {
        if let Some(declared) = self.command {
            if declared != command {
                bail!("config declares command `{declared}` but `{command}` was invoked");
            }
        }
        if self.dimension != 2 && self.dimension != 3 {
            bail!("dimension must be 2 or 3, got {}", self.dimension);
        }
        let q = &self.quadrature;
        for (name, v) in [
            ("surface_order", q.surface_order),
            ("angular_order", q.angular_order),
            ("poisson_order", q.poisson_order),
            ("volume_order", q.volume_order),
        ] {
            if v < 4 {
                bail!("quadrature.{name} must be at least 4, got {v}");
            }
        }
        if self.grid.size < 2 {
            bail!("grid.size must be at least 2");
        }
        match self.density.kind.as_str() {
            "constant" => {}
            "holder-radial" => {
                if !(0.0 < self.density.exponent && self.density.exponent <= 1.0) {
                    bail!(
                        "density.exponent must lie in (0, 1], got {}",
                        self.density.exponent
                    );
                }
            }
            other => bail!("unknown density.kind `{other}`"),
        }
        match command {
            CommandKind::Flat => {
                let f = &self.flat;
                if f.r <= 0.0 {
                    bail!("flat.r must be positive");
                }
                if f.a.abs() >= f.r {
                    bail!("flat.a must satisfy |a| < r so the interface meets the ball");
                }
                if f.samples_per_line < 2 || f.lines.is_empty() {
                    bail!("flat profile needs at least one line and two samples");
                }
                for line in &f.lines {
                    if line.abs() >= f.r {
                        bail!("profile line x' = {line} lies outside the slab of radius {}", f.r);
                    }
                }
            }
            CommandKind::StabilitySweep => {
                let s = &self.stability;
                if !(0.0 < s.gamma && s.gamma < 1.0) {
                    bail!("stability.gamma must lie in (0, 1)");
                }
                if s.sweep.is_empty() {
                    bail!("stability.sweep must not be empty");
                }
                for &e in &s.sweep {
                    if !(0.0 < e && e < 0.5) {
                        bail!("sweep value {e} must lie in (0, 1/2)");
                    }
                    if e * e >= 0.25 {
                        bail!("sweep value {e} puts the companion level θε = {} past 1/4", e * e);
                    }
                }
                if s.grid < 64 {
                    bail!("stability.grid must be at least 64 points per axis");
                }
            }
            CommandKind::RegularityFit => {
                let r = &self.regularity;
                if !(0.0 < r.lambda && r.lambda <= 0.5) {
                    bail!("regularity.lambda must lie in (0, 1/2]");
                }
                if r.depth == 0 {
                    bail!("regularity.depth must be at least 1");
                }
                if r.lambda.powi(r.depth as i32) < 1e-10 {
                    bail!(
                        "regularity depth {} at lambda {} drops below the solver's \
                         resolvable scale (lambda^depth < 1e-10)",
                        r.depth,
                        r.lambda
                    );
                }
                if r.samples_per_scale < self.dimension + 2 {
                    bail!("regularity.samples_per_scale too small for a linear fit");
                }
                if r.delta0 <= 0.0 {
                    bail!("regularity.delta0 must be positive");
                }
                // the fit is anchored at the origin with a horizontal tangent
                let probe = self.build_interface()?;
                let origin = vec![0.0; self.dimension - 1];
                if probe.psi(&origin).abs() > 1e-12 {
                    bail!("regularity fitting needs psi(0) = 0 (origin on the interface)");
                }
                let grad = probe.grad_psi(&origin);
                let gnorm: f64 =
                    grad[..self.dimension - 1].iter().map(|v| v * v).sum::<f64>().sqrt();
                if gnorm > 1e-12 {
                    bail!(
                        "regularity fitting needs a horizontal tangent at the origin \
                         (grad psi(0) = {gnorm}); rotate the interface first"
                    );
                }
            }
            CommandKind::Verify => {
                let v = &self.verify;
                if !(0.0 < v.eps && v.eps < 0.5) {
                    bail!("verify.eps must lie in (0, 1/2)");
                }
                if !(0.0 < v.h && v.h < v.eps) {
                    bail!("verify.h must lie in (0, eps)");
                }
                if v.points == 0 {
                    bail!("verify.points must be positive");
                }
            }
            CommandKind::Solve => {}
        }
        make_test_interface(self.dimension, &self.interface.family, &self.interface.params)
            .map_err(|e| anyhow::anyhow!("interface configuration rejected: {e}"))
    }

    pub fn build_interface(&self) -> anyhow::Result<InterfaceGraph> {
        make_test_interface(self.dimension, &self.interface.family, &self.interface.params)
            .map_err(|e| anyhow::anyhow!("{e}"))
    }

    pub fn build_density(&self) -> DensityField {
        match self.density.kind.as_str() {
            "constant" => DensityField::constant(self.density.value),
            _ => {
                let base = self.density.value;
                let coeff = self.density.coeff;
                let expo = self.density.exponent;
                let sup = base.abs() + coeff.abs();
                DensityField::closure(
                    move |p: &Point| {
                        let mut rsq = 0.0;
                        for i in 0..p.dim() - 1 {
                            rsq += p.coord(i) * p.coord(i);
                        }
                        base + coeff * rsq.sqrt().powf(expo)
                    },
                    sup,
                    Some((expo, coeff.abs())),
                )
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_documented_values() {
        let cfg: ExperimentConfig = toml::from_str("[interface]\nfamily = \"flat\"").unwrap();
        assert_eq!(cfg.quadrature.surface_order, 64);
        assert_eq!(cfg.quadrature.volume_order, 32);
        assert_eq!(cfg.grid.size, 128);
        assert_eq!(cfg.regularity.lambda, 0.5);
        assert_eq!(cfg.regularity.depth, 8);
        assert_eq!(cfg.regularity.samples_per_scale, 200);
        assert_eq!(cfg.stability.sweep, vec![0.2, 0.1, 0.05, 0.025]);
        cfg.validate(CommandKind::Solve).unwrap();
    }

    #[test]
    fn regularity_preconditions_checked_from_config() {
        let cfg: ExperimentConfig = toml::from_str(
            "[interface]\nfamily = \"linear\"\nparams = [0.3]",
        )
        .unwrap();
        let err = cfg.validate(CommandKind::RegularityFit).unwrap_err().to_string();
        assert!(err.contains("horizontal tangent"), "{err}");
        let cfg: ExperimentConfig = toml::from_str(
            "[interface]\nfamily = \"flat\"\n[regularity]\ndepth = 60",
        )
        .unwrap();
        let err = cfg.validate(CommandKind::RegularityFit).unwrap_err().to_string();
        assert!(err.contains("resolvable"), "{err}");
    }

    #[test]
    fn unknown_fields_and_bad_values_rejected() {
        assert!(toml::from_str::<ExperimentConfig>("nonsense = 1").is_err());
        let cfg: ExperimentConfig =
            toml::from_str("dimension = 4\n[interface]\nfamily = \"flat\"").unwrap();
        assert!(cfg.validate(CommandKind::Solve).is_err());
        let cfg: ExperimentConfig = toml::from_str(
            "[interface]\nfamily = \"flat\"\n[stability]\nsweep = [0.6]",
        )
        .unwrap();
        assert!(cfg.validate(CommandKind::StabilitySweep).is_err());
        let cfg: ExperimentConfig = toml::from_str(
            "command = \"solve\"\n[interface]\nfamily = \"flat\"",
        )
        .unwrap();
        assert!(cfg.validate(CommandKind::Verify).is_err());
        let cfg: ExperimentConfig = toml::from_str(
            "[interface]\nfamily = \"spiral\"",
        )
        .unwrap();
        assert!(cfg.validate(CommandKind::Solve).is_err());
    }
}
