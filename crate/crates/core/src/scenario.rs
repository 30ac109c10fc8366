//! Initial data of the two reference experiments, sampled at cell midpoints.

use crate::config::{Scenario, SimulationConfig};
use crate::eos::GasEos;
use crate::error::{Error, Result};
use crate::fvm::CoupledField;
use crate::state::{ElasticState, FluidConserved, FluidPrimitive};

/// Resting fluid in pressure equilibrium.
pub fn resting_fluid(alpha1: f64, p: f64, eos1: &GasEos, eos2: &GasEos) -> Result<FluidConserved> {
    FluidPrimitive {
        alpha1,
        rho1: eos1.density_from_pressure(p)?,
        v1: 0.0,
        rho2: eos2.density_from_pressure(p)?,
        v2: 0.0,
    }
    .to_conserved()
}

pub fn initial_field(cfg: &SimulationConfig) -> Result<CoupledField> {
    match cfg.scenario {
        Scenario::Bubble { .. } => scenario_bubble_collapse(cfg),
        Scenario::Gridstudy { .. } => scenario_grid_study(cfg),
    }
}

/// Steel at rest under `sigma`; vapor bubble `(bubble_left, bubble_right)` in water.
pub fn scenario_bubble_collapse(cfg: &SimulationConfig) -> Result<CoupledField> {
    let Scenario::Bubble { sigma, bubble_left, bubble_right, alpha_bubble, p_bubble, alpha_liquid, p_liquid } =
        cfg.scenario
    else {
        return Err(Error::Config("scenario.id must be \"bubble\"".into()));
    };
    cfg.validate()?;
    let grid = cfg.grid()?;
    let (eos1, eos2) = cfg.eos_pair()?;
    let bubble = resting_fluid(alpha_bubble, p_bubble, &eos1, &eos2)?;
    let liquid = resting_fluid(alpha_liquid, p_liquid, &eos1, &eos2)?;
    let fluid = (0..grid.n_fluid)
        .map(|j| {
            let x = grid.fluid_center(j);
            if x > bubble_left && x < bubble_right {
                bubble
            } else {
                liquid
            }
        })
        .collect();
    CoupledField::new(grid, vec![ElasticState::new(0.0, sigma); grid.n_solid], fluid)
}

/// Steel at rest under `sigma`; `alpha1 = exp(-alpha_width x^2)`, `p = p_ref exp(x)`.
pub fn scenario_grid_study(cfg: &SimulationConfig) -> Result<CoupledField> {
    let Scenario::Gridstudy { sigma, alpha_width, p_ref } = cfg.scenario else {
        return Err(Error::Config("scenario.id must be \"gridstudy\"".into()));
    };
    cfg.validate()?;
    let grid = cfg.grid()?;
    let (eos1, eos2) = cfg.eos_pair()?;
    let fluid = (0..grid.n_fluid)
        .map(|j| {
            let x = grid.fluid_center(j);
            resting_fluid((-alpha_width * x * x).exp(), p_ref * x.exp(), &eos1, &eos2)
        })
        .collect::<Result<Vec<_>>>()?;
    CoupledField::new(grid, vec![ElasticState::new(0.0, sigma); grid.n_solid], fluid)
}
