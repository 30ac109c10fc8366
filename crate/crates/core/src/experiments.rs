//! Drivers for single runs and grid-refinement studies.

use log::info;

use crate::config::{RiemannConfig, SimulationConfig};
use crate::coupling::{coupling_residuals, solve_coupling, CouplingStates, TraceStates};
use crate::eos::{elastic_wave_bound, fluid_wave_bound};
use crate::error::Result;
use crate::fvm::{time_step, CoupledField, CoupledSolver};
use crate::metrics::{coupling_errors, l1_error, ConvergenceReport, ConvergenceRow, Quantity};
use crate::output::FieldSnapshot;
use crate::scenario::initial_field;
use crate::state::{fluid_flux, AuxVector5, ElasticState, FluidPrimitive};

pub fn solver(cfg: &SimulationConfig) -> Result<CoupledSolver> {
    let mut s =
        CoupledSolver::new(cfg.solid_material()?, cfg.nonconservative_ops()?, cfg.time_control()?, cfg.relaxation.mode);
    s.residual_check_interval = cfg.numerics.residual_check_interval;
    Ok(s)
}

/// Runs the configured scenario and returns one snapshot per output time, in
/// increasing time order.
pub fn run(cfg: &SimulationConfig) -> Result<Vec<FieldSnapshot>> {
    cfg.validate()?;
    let field = initial_field(cfg)?;
    let mut targets = cfg.time.output_times.clone();
    targets.sort_by(|a, b| a.total_cmp(b));
    let fields = solver(cfg)?.run(field, &targets)?;
    let (eos1, eos2) = cfg.eos_pair()?;
    Ok(fields.iter().zip(&targets).map(|(f, &t)| FieldSnapshot::from_field(f, t, &eos1, &eos2)).collect())
}

/// Final field of the configured scenario at `t_end`.
pub fn run_to_end(cfg: &SimulationConfig) -> Result<(CoupledField, u64)> {
    cfg.validate()?;
    let mut field = initial_field(cfg)?;
    let steps = solver(cfg)?.advance(&mut field, |_, _| {})?;
    Ok((field, steps))
}

/// Results of a grid-refinement study at `t_end`.
#[derive(Debug, Clone)]
pub struct StudyOutcome {
    pub report: ConvergenceReport,
    /// Final snapshots of the ladder, coarse to fine.
    pub snapshots: Vec<FieldSnapshot>,
    pub reference: FieldSnapshot,
}

/// Runs `study.cells` and the `study.reference_cells` reference; the L1
/// errors compare each final state against the reference restricted to the
/// coarse grid.
pub fn converge(cfg: &SimulationConfig) -> Result<StudyOutcome> {
    cfg.validate()?;
    let (eos1, eos2) = cfg.eos_pair()?;
    let mut ladder = cfg.study.cells.clone();
    ladder.sort_unstable();
    let mut rows = Vec::new();
    let mut snapshots = Vec::new();
    let mut finest_dt = None;
    for &n in &ladder {
        let c = cfg.clone().with_cells(n);
        let (field, steps) = run_to_end(&c)?;
        let (ec1, ec2) = coupling_errors(&field, &eos1, &eos2);
        info!("N = {n}: {steps} steps, E_C1 = {ec1:.4e}, E_C2 = {ec2:.4e}");
        rows.push((n, ec1, ec2));
        snapshots.push(FieldSnapshot::from_field(&field, cfg.time.t_end, &eos1, &eos2));
        finest_dt = Some(first_step(&c)?);
    }

    let mut rc = cfg.clone().with_cells(cfg.study.reference_cells);
    rc.time.output_times.clear();
    let mut s = solver(&rc)?;
    if cfg.study.reference_uses_finest_dt {
        s.time.fixed_dt = finest_dt;
    }
    let mut field = initial_field(&rc)?;
    let steps = s.advance(&mut field, |_, _| {})?;
    info!("reference N = {}: {steps} steps", rc.grid.n_fluid);
    let reference = FieldSnapshot::from_field(&field, cfg.time.t_end, &eos1, &eos2);

    let mut out = Vec::new();
    for ((n, ec1, ec2), s) in rows.into_iter().zip(&snapshots) {
        out.push(ConvergenceRow {
            n,
            ec1,
            ec2,
            ew: l1_error(s, &reference, Quantity::W)?,
            esigma: l1_error(s, &reference, Quantity::Sigma)?,
            erho: l1_error(s, &reference, Quantity::Rho)?,
            erhov: l1_error(s, &reference, Quantity::RhoV)?,
        });
    }
    Ok(StudyOutcome { report: ConvergenceReport::new(out), snapshots, reference })
}

fn first_step(cfg: &SimulationConfig) -> Result<f64> {
    let field = initial_field(cfg)?;
    let mut s = solver(cfg)?;
    let (lambda_bar, lambda) = s.wave_speeds(&field);
    Ok(time_step(&field, &s.time, lambda_bar, lambda)?.0)
}

/// One interface solve with its nondimensional residuals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannOutcome {
    pub traces: TraceStates,
    pub states: CouplingStates,
    pub residuals: [f64; 7],
}

impl RiemannOutcome {
    /// `quantity,value` rows.
    pub fn to_csv(&self) -> String {
        let s = &self.states;
        let mut rows: Vec<(String, f64)> = vec![
            ("lambda".into(), self.traces.lambda),
            ("lambda_bar".into(), self.traces.lambda_bar),
            ("w_R".into(), s.ubar_r.w),
            ("sigma_R".into(), s.ubar_r.sigma),
            ("Vw_R".into(), s.vbar_r[0]),
            ("Vsigma_R".into(), s.vbar_r[1]),
            ("alpha1_L".into(), s.u_l.alpha1),
            ("m1_L".into(), s.u_l.m1),
            ("q1_L".into(), s.u_l.q1),
            ("m2_L".into(), s.u_l.m2),
            ("q2_L".into(), s.u_l.q2),
        ];
        for (k, name) in ["alpha1", "m1", "q1", "m2", "q2"].iter().enumerate() {
            rows.push((format!("V{name}_L"), s.v_l[k]));
        }
        let names = [
            "velocity_1",
            "velocity_2",
            "stress_1",
            "stress_2",
            "relaxed_velocity_1",
            "relaxed_velocity_2",
            "relaxed_stress",
        ];
        for (name, r) in names.iter().zip(self.residuals) {
            rows.push((format!("residual_{name}"), r));
        }
        let mut out = String::from("quantity,value\n");
        for (name, v) in rows {
            out.push_str(&format!("{name},{v:e}\n"));
        }
        out
    }
}

pub fn riemann(cfg: &RiemannConfig) -> Result<RiemannOutcome> {
    let mat = cfg.solid_material()?;
    let (eos1, eos2) = cfg.eos_pair()?;
    let t = &cfg.trace;
    let fluid = FluidPrimitive {
        alpha1: t.alpha1,
        rho1: eos1.density_from_pressure(t.p1)?,
        v1: t.v1,
        rho2: eos2.density_from_pressure(t.p2)?,
        v2: t.v2,
    }
    .to_conserved()?;
    let solid = ElasticState::new(t.w, t.sigma);
    let v0 = match t.v0 {
        Some(v) => AuxVector5(v),
        None => fluid_flux(&fluid, &eos1, &eos2)?,
    };
    let lambda = match t.lambda {
        Some(l) => l,
        None => fluid_wave_bound(&fluid, &eos1, &eos2)?,
    };
    let lambda_bar = t.lambda_bar.unwrap_or_else(|| elastic_wave_bound(&mat));
    let traces = TraceStates::relaxed(&mat, solid, fluid, v0, lambda, lambda_bar)?;
    let states = solve_coupling(&traces, &mat, &eos1, &eos2)?;
    let residuals = coupling_residuals(&states, &traces, &mat, &eos1, &eos2);
    Ok(RiemannOutcome { traces, states, residuals })
}
