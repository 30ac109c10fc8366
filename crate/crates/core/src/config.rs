//! Run configuration.
//!
//! The on-disk format is one `section.key = value` assignment per line with
//! `#` comments, SI units throughout:
//!
//! ```text
//! # bubble collapse next to a steel wall
//! grid.n_solid = 600
//! grid.n_fluid = 600
//! time.t_end = 0.001
//! time.output_times = [0.0, 5e-5, 1e-4]
//! scenario.id = "bubble"
//! ```
//!
//! Every line is a TOML dotted-key assignment, so parsing goes through the
//! `toml` crate; serialization flattens the same tree back into dotted lines.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::eos::{ElasticMaterial, GasEos};
use crate::error::{Error, Result};
use crate::fvm::{Grid, RelaxationMode, StepMode, TimeControl};
use crate::path::{NonconservativeOps, QuadratureRule};
use crate::state::InterfacialParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n_solid: usize,
    pub n_fluid: usize,
    /// Left end of the solid (m); the interface is at `x = 0`.
    pub x_min: f64,
    /// Right end of the fluid (m).
    pub x_max: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { n_solid: 600, n_fluid: 600, x_min: -0.2, x_max: 0.2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolidConfig {
    pub rho: f64,
    pub c: f64,
}

impl Default for SolidConfig {
    fn default() -> Self {
        Self { rho: 7800.0, c: 5990.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluidConfig {
    pub c1: f64,
    pub pi1: f64,
    pub c2: f64,
    pub pi2: f64,
    #[serde(default)]
    pub interfacial: InterfacialParams,
}

impl Default for FluidConfig {
    fn default() -> Self {
        Self { c1: 367.58, pi1: 0.0, c2: 1483.3, pi2: 1.1358e9, interfacial: InterfacialParams::Mixture }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub cfl: f64,
    #[serde(default)]
    pub mode: StepMode,
    pub t_end: f64,
    #[serde(default)]
    pub output_times: Vec<f64>,
    #[serde(default)]
    pub fixed_lambda: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelaxationConfig {
    #[serde(default)]
    pub mode: RelaxationMode,
}

/// Initial data. Defaults reproduce the two reference experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "lowercase", deny_unknown_fields)]
pub enum Scenario {
    /// Vapor bubble in liquid water next to a pre-stressed steel wall.
    Bubble {
        #[serde(default = "defaults::bubble_sigma")]
        sigma: f64,
        #[serde(default = "defaults::bubble_left")]
        bubble_left: f64,
        #[serde(default = "defaults::bubble_right")]
        bubble_right: f64,
        #[serde(default = "defaults::alpha_bubble")]
        alpha_bubble: f64,
        #[serde(default = "defaults::p_bubble")]
        p_bubble: f64,
        #[serde(default = "defaults::alpha_liquid")]
        alpha_liquid: f64,
        #[serde(default = "defaults::p_liquid")]
        p_liquid: f64,
    },
    /// Smooth data `alpha1 = exp(-alpha_width x^2)`, `p = p_ref exp(x)`.
    Gridstudy {
        #[serde(default = "defaults::grid_sigma")]
        sigma: f64,
        #[serde(default = "defaults::alpha_width")]
        alpha_width: f64,
        #[serde(default = "defaults::p_ref")]
        p_ref: f64,
    },
}

mod defaults {
    pub fn bubble_sigma() -> f64 {
        -3.5e7
    }
    pub fn bubble_left() -> f64 {
        0.075
    }
    pub fn bubble_right() -> f64 {
        0.125
    }
    pub fn alpha_bubble() -> f64 {
        0.9
    }
    pub fn p_bubble() -> f64 {
        3.5e3
    }
    pub fn alpha_liquid() -> f64 {
        0.1
    }
    pub fn p_liquid() -> f64 {
        1.75e7
    }
    pub fn grid_sigma() -> f64 {
        -3.5e5
    }
    pub fn alpha_width() -> f64 {
        200.0
    }
    pub fn p_ref() -> f64 {
        3.5e5
    }
    pub fn quadrature_order() -> usize {
        3
    }
    pub fn residual_check_interval() -> u64 {
        100
    }
    pub fn output_dir() -> std::path::PathBuf {
        "output".into()
    }
    pub fn cells() -> Vec<usize> {
        vec![200, 400, 800, 1600]
    }
    pub fn reference_cells() -> usize {
        3200
    }
}

impl Scenario {
    pub fn bubble() -> Self {
        Scenario::Bubble {
            sigma: defaults::bubble_sigma(),
            bubble_left: defaults::bubble_left(),
            bubble_right: defaults::bubble_right(),
            alpha_bubble: defaults::alpha_bubble(),
            p_bubble: defaults::p_bubble(),
            alpha_liquid: defaults::alpha_liquid(),
            p_liquid: defaults::p_liquid(),
        }
    }

    pub fn grid_study() -> Self {
        Scenario::Gridstudy {
            sigma: defaults::grid_sigma(),
            alpha_width: defaults::alpha_width(),
            p_ref: defaults::p_ref(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsConfig {
    #[serde(default = "defaults::quadrature_order")]
    pub quadrature_order: usize,
    #[serde(default = "defaults::residual_check_interval")]
    pub residual_check_interval: u64,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        Self {
            quadrature_order: defaults::quadrature_order(),
            residual_check_interval: defaults::residual_check_interval(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "defaults::output_dir")]
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: defaults::output_dir() }
    }
}

/// Resolutions of a grid-refinement study. `N` counts cells per subdomain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    #[serde(default = "defaults::cells")]
    pub cells: Vec<usize>,
    #[serde(default = "defaults::reference_cells")]
    pub reference_cells: usize,
    /// Advance the reference with the time step of the finest ladder run
    /// instead of its own parabolic step (16x fewer steps at 2x refinement).
    #[serde(default)]
    pub reference_uses_finest_dt: bool,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self { cells: defaults::cells(), reference_cells: defaults::reference_cells(), reference_uses_finest_dt: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub solid: SolidConfig,
    #[serde(default)]
    pub fluid: FluidConfig,
    pub time: TimeConfig,
    #[serde(default)]
    pub relaxation: RelaxationConfig,
    pub scenario: Scenario,
    #[serde(default)]
    pub numerics: NumericsConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub study: StudyConfig,
}

impl SimulationConfig {
    /// Bubble collapse on 600 + 600 cells up to 1 ms.
    pub fn bubble() -> Self {
        let mut output_times: Vec<f64> = [0.0, 50.0, 80.0, 100.0, 140.0, 200.0, 300.0].to_vec();
        output_times.extend((4..=10).map(|k| 100.0 * k as f64));
        Self {
            grid: GridConfig::default(),
            solid: SolidConfig::default(),
            fluid: FluidConfig::default(),
            time: TimeConfig {
                cfl: 0.2,
                mode: StepMode::Hyperbolic,
                t_end: 1e-3,
                output_times: output_times.into_iter().map(|t| t * 1e-6).collect(),
                fixed_lambda: false,
            },
            relaxation: RelaxationConfig::default(),
            scenario: Scenario::bubble(),
            numerics: NumericsConfig::default(),
            output: OutputConfig::default(),
            study: StudyConfig::default(),
        }
    }

    /// Smooth grid-refinement experiment at 10 microseconds.
    pub fn grid_study() -> Self {
        Self {
            time: TimeConfig {
                cfl: 0.2,
                mode: StepMode::Parabolic,
                t_end: 1e-5,
                output_times: vec![1e-5],
                fixed_lambda: false,
            },
            scenario: Scenario::grid_study(),
            ..Self::bubble()
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Flat `section.key = value` lines, one per leaf.
    pub fn serialize(&self) -> Result<String> {
        let tree = toml::Value::try_from(self).map_err(|e| Error::Config(e.to_string()))?;
        let mut out = String::new();
        flatten(&tree, "", &mut out);
        Ok(out)
    }

    /// Same uniform cell width on both sides of the interface.
    pub fn dx(&self) -> f64 {
        -self.grid.x_min / self.grid.n_solid as f64
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.grid;
        if !(g.x_min < 0.0 && g.x_max > 0.0) {
            return Err(Error::Config(format!(
                "domain ({}, {}) must contain the interface x = 0 in its interior",
                g.x_min, g.x_max
            )));
        }
        if g.n_solid == 0 || g.n_fluid == 0 {
            return Err(Error::Config("grid.n_solid and grid.n_fluid must be positive".into()));
        }
        let dx_s = -g.x_min / g.n_solid as f64;
        let dx_f = g.x_max / g.n_fluid as f64;
        if (dx_s - dx_f).abs() > 1e-12 * dx_s {
            return Err(Error::Config(format!("solid cell width {dx_s} differs from fluid cell width {dx_f}")));
        }
        self.solid_material()?;
        self.eos_pair()?;
        if let InterfacialParams::Weighted { d1, d2 } = self.fluid.interfacial {
            InterfacialParams::weighted(d1, d2)?;
        }
        TimeControl::new(self.time.cfl, self.time.mode, self.time.t_end)?;
        if let Some(t) = self.time.output_times.iter().find(|t| !(**t >= 0.0 && **t <= self.time.t_end)) {
            return Err(Error::Config(format!("output time {t} outside [0, {}]", self.time.t_end)));
        }
        QuadratureRule::gauss_legendre(self.numerics.quadrature_order).map_err(|e| Error::Config(e.to_string()))?;
        if self.numerics.residual_check_interval == 0 {
            return Err(Error::Config("numerics.residual_check_interval must be positive".into()));
        }
        match self.scenario {
            Scenario::Bubble { bubble_left, bubble_right, alpha_bubble, alpha_liquid, .. } => {
                if !(bubble_left < bubble_right && bubble_left >= 0.0 && bubble_right <= g.x_max) {
                    return Err(Error::Config(format!(
                        "bubble ({bubble_left}, {bubble_right}) must lie inside the fluid (0, {})",
                        g.x_max
                    )));
                }
                for a in [alpha_bubble, alpha_liquid] {
                    if !(a > 0.0 && a < 1.0) {
                        return Err(Error::Config(format!("volume fraction {a} outside (0, 1)")));
                    }
                }
            }
            Scenario::Gridstudy { alpha_width, .. } => {
                if !(alpha_width > 0.0) {
                    return Err(Error::Config("scenario.alpha_width must be positive".into()));
                }
            }
        }
        Ok(())
    }

    /// Uses `n` cells on each side of the interface.
    pub fn with_cells(mut self, n: usize) -> Self {
        self.grid.n_solid = n;
        self.grid.n_fluid = n;
        self
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.grid.n_solid, self.grid.n_fluid, self.dx())
    }

    pub fn solid_material(&self) -> Result<ElasticMaterial> {
        ElasticMaterial::new(self.solid.rho, self.solid.c)
    }

    pub fn eos_pair(&self) -> Result<(GasEos, GasEos)> {
        Ok((GasEos::new(self.fluid.c1, self.fluid.pi1)?, GasEos::new(self.fluid.c2, self.fluid.pi2)?))
    }

    pub fn time_control(&self) -> Result<TimeControl> {
        let mut tc = TimeControl::new(self.time.cfl, self.time.mode, self.time.t_end)?;
        tc.fixed_lambda = self.time.fixed_lambda;
        Ok(tc)
    }

    pub fn nonconservative_ops(&self) -> Result<NonconservativeOps> {
        let (eos1, eos2) = self.eos_pair()?;
        let quad = QuadratureRule::gauss_legendre(self.numerics.quadrature_order)?;
        Ok(NonconservativeOps::new(eos1, eos2, self.fluid.interfacial, quad))
    }
}

/// Trace states of a single interface solve, in primitive variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceConfig {
    /// Solid cell next to the interface.
    pub w: f64,
    pub sigma: f64,
    /// Fluid cell next to the interface.
    pub alpha1: f64,
    pub p1: f64,
    pub v1: f64,
    pub p2: f64,
    pub v2: f64,
    /// Fluid relaxation speed; the wave bound of the fluid trace when absent.
    #[serde(default)]
    pub lambda: Option<f64>,
    /// Solid relaxation speed; `c_s` when absent.
    #[serde(default)]
    pub lambda_bar: Option<f64>,
    /// `V_0`; `F(U_0)` when absent.
    #[serde(default)]
    pub v0: Option<[f64; 5]>,
}

/// Input file of `fsi1d riemann`: materials plus `trace.*` keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RiemannConfig {
    #[serde(default)]
    pub solid: SolidConfig,
    #[serde(default)]
    pub fluid: FluidConfig,
    pub trace: TraceConfig,
}

impl RiemannConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn solid_material(&self) -> Result<ElasticMaterial> {
        ElasticMaterial::new(self.solid.rho, self.solid.c)
    }

    pub fn eos_pair(&self) -> Result<(GasEos, GasEos)> {
        Ok((GasEos::new(self.fluid.c1, self.fluid.pi1)?, GasEos::new(self.fluid.c2, self.fluid.pi2)?))
    }
}

fn flatten(value: &toml::Value, prefix: &str, out: &mut String) {
    match value {
        toml::Value::Table(table) => {
            for (key, v) in table {
                let path = if prefix.is_empty() { key.clone() } else { format!("{prefix}.{key}") };
                flatten(v, &path, out);
            }
        }
        leaf => {
            out.push_str(prefix);
            out.push_str(" = ");
            out.push_str(&leaf.to_string());
            out.push('\n');
        }
    }
}
