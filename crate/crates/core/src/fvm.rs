//! Coupled finite-volume scheme on a uniform mesh with the material interface
//! at `x = 0`: solid cells `j < 0`, fluid cells `j >= 0`.
//!
//! Cell `j` is updated with the edge fluxes on both sides,
//! `W_j <- W_j - dt/dx (E_{j+1/2} - E_{j-1/2})`, where the edge flux between
//! cells `j-1` and `j` is the relaxation (Lax-Friedrichs type) flux with
//! minmod-limited MUSCL corrections. At `x = 0` the solid and the fluid each
//! see their own first-order flux built from the coupling states. Outer
//! boundaries and the interface side of each subdomain use copied ghost cells.

use log::{debug, warn};

use crate::coupling::{
    coupling_residuals, max_abs_residual, residual_floor, solve_coupling, CouplingStates, TraceStates,
};
use crate::eos::{elastic_wave_bound, fluid_wave_bound_unchecked, ElasticMaterial, GasEos};
use crate::error::{Error, Result};
use crate::path::NonconservativeOps;
use crate::state::{check_array, elastic_flux, AuxVector2, AuxVector5, ElasticState, FluidConserved};

/// Uniform mesh; `x_{-1/2} = 0` is the coupling interface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub n_solid: usize,
    pub n_fluid: usize,
    pub dx: f64,
}

impl Grid {
    pub fn new(n_solid: usize, n_fluid: usize, dx: f64) -> Result<Self> {
        if n_solid == 0 || n_fluid == 0 {
            return Err(Error::Config("both subdomains need at least one cell".into()));
        }
        if !(dx > 0.0 && dx.is_finite()) {
            return Err(Error::Config(format!("cell width must be positive, got {dx}")));
        }
        Ok(Self { n_solid, n_fluid, dx })
    }

    /// Center of solid cell `i` (storage index, cell `j = i - n_solid`).
    pub fn solid_center(&self, i: usize) -> f64 {
        (i as f64 - self.n_solid as f64 + 0.5) * self.dx
    }

    pub fn fluid_center(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.dx
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepMode {
    /// `dt = CFL dx / max(lambda_bar, lambda)`
    #[default]
    Hyperbolic,
    /// `dt = CFL dx^2 / lambda_bar`, for grid studies where the first-order
    /// time error must not mask the spatial error.
    Parabolic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeControl {
    pub cfl: f64,
    pub mode: StepMode,
    pub t_end: f64,
    /// Keep the fluid relaxation speed from the initial data instead of
    /// recomputing it every step.
    pub fixed_lambda: bool,
    /// Use this step instead of the CFL-based one (still clipped at `t_end`).
    pub fixed_dt: Option<f64>,
}

impl TimeControl {
    pub fn new(cfl: f64, mode: StepMode, t_end: f64) -> Result<Self> {
        if !(cfl > 0.0 && cfl <= 1.0) {
            return Err(Error::Config(format!("CFL number must be in (0, 1], got {cfl}")));
        }
        if !(t_end >= 0.0 && t_end.is_finite()) {
            return Err(Error::Config(format!("final time must be non-negative, got {t_end}")));
        }
        Ok(Self { cfl, mode, t_end, fixed_lambda: false, fixed_dt: None })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RelaxationMode {
    /// Velocity then pressure equilibrium projection after every update.
    #[default]
    Instantaneous,
    None,
}

/// Solid and fluid cell averages at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledField {
    pub grid: Grid,
    /// Cells `j = -n_solid .. -1`, left to right.
    pub solid: Vec<ElasticState>,
    /// Cells `j = 0 .. n_fluid - 1`.
    pub fluid: Vec<FluidConserved>,
    pub time: f64,
}

impl CoupledField {
    pub fn new(grid: Grid, solid: Vec<ElasticState>, fluid: Vec<FluidConserved>) -> Result<Self> {
        if solid.len() != grid.n_solid || fluid.len() != grid.n_fluid {
            return Err(Error::Config(format!(
                "field sizes ({}, {}) do not match grid ({}, {})",
                solid.len(),
                fluid.len(),
                grid.n_solid,
                grid.n_fluid
            )));
        }
        for (j, u) in fluid.iter().enumerate() {
            check_array(&u.to_array()).map_err(|reason| Error::InadmissibleCell {
                cell: j as i64,
                time: 0.0,
                reason,
            })?;
        }
        Ok(Self { grid, solid, fluid, time: 0.0 })
    }

    /// Solid trace (cell -1).
    pub fn solid_trace(&self) -> ElasticState {
        *self.solid.last().expect("non-empty solid")
    }

    /// Fluid trace (cell 0).
    pub fn fluid_trace(&self) -> FluidConserved {
        self.fluid[0]
    }
}

/// `0` on sign disagreement, otherwise the argument of smaller magnitude (`a` on ties).
#[inline]
pub fn minmod(a: f64, b: f64) -> f64 {
    // branch-free: at most one of the two parts is nonzero
    let positive = a.max(0.0).min(b.max(0.0));
    let negative = a.min(0.0).max(b.min(0.0));
    positive + negative
}

/// Limited slopes `(S^-, S^+)` of the characteristic combinations `F ∓/± lambda U`
/// at the middle of a three-cell stencil.
#[inline]
pub fn limited_slopes<const N: usize>(
    f: [&[f64; N]; 3],
    u: [&[f64; N]; 3],
    lambda: f64,
    dx: f64,
) -> ([f64; N], [f64; N]) {
    let inv = 1.0 / (2.0 * dx);
    let mut minus = [0.0; N];
    let mut plus = [0.0; N];
    for i in 0..N {
        let dfl = f[1][i] - f[0][i];
        let dfr = f[2][i] - f[1][i];
        let dul = lambda * (u[1][i] - u[0][i]);
        let dur = lambda * (u[2][i] - u[1][i]);
        minus[i] = minmod((dfl - dul) * inv, (dfr - dur) * inv);
        plus[i] = minmod((dfl + dul) * inv, (dfr + dur) * inv);
    }
    (minus, plus)
}

/// Edge flux between a left and a right cell,
/// `1/2 (F_l + F_r) - lambda/2 (U_r - U_l) - dx/2 (S^-_r - S^+_l)`.
#[inline]
#[allow(clippy::too_many_arguments)]
pub fn edge_flux<const N: usize>(
    f_l: &[f64; N],
    f_r: &[f64; N],
    u_l: &[f64; N],
    u_r: &[f64; N],
    s_minus_r: &[f64; N],
    s_plus_l: &[f64; N],
    lambda: f64,
    dx: f64,
) -> [f64; N] {
    std::array::from_fn(|i| {
        0.5 * (f_l[i] + f_r[i]) - 0.5 * lambda * (u_r[i] - u_l[i]) - 0.5 * dx * (s_minus_r[i] - s_plus_l[i])
    })
}

/// Solid slopes at storage index `i`, ghost cells by copy.
pub fn solid_slopes(field: &CoupledField, i: usize, mat: &ElasticMaterial) -> (AuxVector2, AuxVector2) {
    let n = field.solid.len();
    let at = |k: isize| field.solid[k.clamp(0, n as isize - 1) as usize];
    let s = [at(i as isize - 1), at(i as isize), at(i as isize + 1)];
    let u = s.map(|x| x.to_array());
    let f = s.map(|x| elastic_flux(mat, &x).0);
    let (m, p) = limited_slopes([&f[0], &f[1], &f[2]], [&u[0], &u[1], &u[2]], elastic_wave_bound(mat), field.grid.dx);
    (AuxVector2(m), AuxVector2(p))
}

/// Fluid slopes at cell `j` from the operator values `t`, ghost cells by copy.
pub fn fluid_slopes(field: &CoupledField, t: &[AuxVector5], j: usize, lambda: f64) -> (AuxVector5, AuxVector5) {
    let n = field.fluid.len();
    let idx = |k: isize| k.clamp(0, n as isize - 1) as usize;
    let ks = [idx(j as isize - 1), j, idx(j as isize + 1)];
    let u = ks.map(|k| field.fluid[k].to_array());
    let f = ks.map(|k| t[k].0);
    let (m, p) = limited_slopes([&f[0], &f[1], &f[2]], [&u[0], &u[1], &u[2]], lambda, field.grid.dx);
    (AuxVector5(m), AuxVector5(p))
}

/// Solid flux on the edge between storage cells `i - 1` and `i` (`1 <= i < n_solid`).
pub fn interior_flux_solid(field: &CoupledField, i: usize, mat: &ElasticMaterial) -> AuxVector2 {
    let (sm, _) = solid_slopes(field, i, mat);
    let (_, sp) = solid_slopes(field, i - 1, mat);
    let (l, r) = (field.solid[i - 1], field.solid[i]);
    AuxVector2(edge_flux(
        &elastic_flux(mat, &l).0,
        &elastic_flux(mat, &r).0,
        &l.to_array(),
        &r.to_array(),
        &sm.0,
        &sp.0,
        elastic_wave_bound(mat),
        field.grid.dx,
    ))
}

/// Fluid flux on the edge between cells `j - 1` and `j` (`1 <= j < n_fluid`).
pub fn interior_flux_fluid(field: &CoupledField, t: &[AuxVector5], j: usize, lambda: f64) -> AuxVector5 {
    let (sm, _) = fluid_slopes(field, t, j, lambda);
    let (_, sp) = fluid_slopes(field, t, j - 1, lambda);
    AuxVector5(edge_flux(
        &t[j - 1].0,
        &t[j].0,
        &field.fluid[j - 1].to_array(),
        &field.fluid[j].to_array(),
        &sm.0,
        &sp.0,
        lambda,
        field.grid.dx,
    ))
}

/// First-order fluxes at the coupling interface: the solid sees
/// `1/2 (Fbar(U_{-1}) + Vbar_R) - lambda_bar/2 (Ubar_R - Ubar_{-1})`, the fluid
/// sees `1/2 (V_L + T_0) - lambda/2 (U_0 - U_L)`.
pub fn interface_fluxes(cs: &CouplingStates, t: &TraceStates, mat: &ElasticMaterial) -> (AuxVector2, AuxVector5) {
    let fbar = elastic_flux(mat, &t.solid);
    let dub = AuxVector2(cs.ubar_r.to_array()) - AuxVector2(t.solid.to_array());
    let solid = 0.5 * (fbar + cs.vbar_r) - (0.5 * t.lambda_bar) * dub;
    let du = AuxVector5(t.fluid.to_array()) - AuxVector5(cs.u_l.to_array());
    let fluid = 0.5 * (cs.v_l + t.v0) - (0.5 * t.lambda) * du;
    (solid, fluid)
}

/// Splits `total` into `(a', b)` with `a'` within a few ulps of `a` such that
/// `a' + b == total` in floating point. Adjusting `b` alone is not always
/// enough: when `a` carries finer bits than `total`, the exact sum can sit on a
/// rounding tie for every `b`.
fn split_preserving_sum(total: f64, a: f64) -> (f64, f64) {
    let b = total - a;
    if a + b == total {
        return (a, b);
    }
    let mut candidate = a;
    for k in 0..5 {
        let mut b = total - candidate;
        for _ in 0..4 {
            let s = candidate + b;
            if s == total {
                return (candidate, b);
            }
            // total - s is exact for nearby values
            b += total - s;
        }
        // a, a+1, a-1, a+2, a-2 ulps
        candidate = if k % 2 == 0 { a.next_up() } else { a.next_down() };
        if k >= 2 {
            candidate = if k % 2 == 0 { candidate.next_up() } else { candidate.next_down() };
        }
    }
    (a, b)
}

/// Instantaneous velocity relaxation: both phases take the mixture velocity.
/// Masses and `alpha1` are untouched and `q1 + q2` is preserved.
pub fn velocity_projection(u: &FluidConserved) -> FluidConserved {
    let total = u.q1 + u.q2;
    let v = total / (u.m1 + u.m2);
    let (q1, q2) = split_preserving_sum(total, u.m1 * v);
    FluidConserved { q1, q2, ..*u }
}

/// Instantaneous pressure relaxation at fixed phasic masses and momenta:
/// solves `c1^2 m1 / a - pi1 = c2^2 m2 / (1 - a) - pi2` for `a = alpha1`.
///
/// With `A = c1^2 m1`, `B = c2^2 m2`, `d = pi2 - pi1` this is
/// `d a^2 + (A + B - d) a - A = 0` with `b = A + B - d`, whose root in
/// `(0, 1)` is `2A / (b + sqrt(b^2 + 4 d A))`.
pub fn pressure_projection(u: &FluidConserved, eos1: &GasEos, eos2: &GasEos) -> FluidConserved {
    let a = eos1.c2() * u.m1;
    let b_ = eos2.c2() * u.m2;
    let d = eos2.pi - eos1.pi;
    let b = a + b_ - d;
    let disc = b * b + 4.0 * d * a;
    // pick the cancellation-free form of the positive root
    let mut alpha = if disc < 0.0 {
        f64::NAN
    } else if b >= 0.0 {
        2.0 * a / (b + disc.sqrt())
    } else {
        (disc.sqrt() - b) / (2.0 * d)
    };
    if !(alpha > 0.0 && alpha < 1.0) {
        alpha = bisect_pressure_balance(a, b_, d);
    }
    FluidConserved { alpha1: alpha, ..*u }
}

/// Bisection on the strictly decreasing `a / x - b / (1 - x) + d` over `(0, 1)`.
fn bisect_pressure_balance(a: f64, b: f64, d: f64) -> f64 {
    let h = |x: f64| a / x - b / (1.0 - x) + d;
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if h(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Per-step diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    pub dt: f64,
    pub lambda: f64,
    pub lambda_bar: f64,
    pub coupling: CouplingStates,
    pub traces: TraceStates,
    /// Solid flux through the outer boundary at `x = -L_s`.
    pub solid_outer_flux: AuxVector2,
    /// Solid flux at `x = 0^-`.
    pub solid_interface_flux: AuxVector2,
    /// Fluid flux at `x = 0^+`.
    pub fluid_interface_flux: AuxVector5,
    /// Fluid flux through the outer boundary at `x = L_f`.
    pub fluid_outer_flux: AuxVector5,
}

/// Owns the model parameters and the scratch buffers of the time loop.
#[derive(Debug, Clone)]
pub struct CoupledSolver {
    pub mat: ElasticMaterial,
    pub ops: NonconservativeOps,
    pub time: TimeControl,
    pub relaxation: RelaxationMode,
    /// Coupling residuals are verified every `residual_check_interval`-th
    /// solve in release builds and on every solve in debug builds.
    pub residual_check_interval: u64,
    /// `U_inf` of the operator `T`; the last fluid cell when `None`.
    pub far_field: Option<FluidConserved>,
    fixed_lambda: Option<f64>,
    solves: u64,
    scratch: Scratch,
}

#[derive(Debug, Clone, Default)]
struct Scratch {
    solid: Vec<[f64; 2]>,
    raw: Vec<[f64; 5]>,
    t: Vec<[f64; 5]>,
}

/// Tolerance on the nondimensional coupling residuals checked during a run,
/// on top of [`residual_floor`].
pub const RESIDUAL_TOL: f64 = 1e-9;

impl CoupledSolver {
    pub fn new(mat: ElasticMaterial, ops: NonconservativeOps, time: TimeControl, relaxation: RelaxationMode) -> Self {
        Self {
            mat,
            ops,
            time,
            relaxation,
            residual_check_interval: 100,
            far_field: None,
            fixed_lambda: None,
            solves: 0,
            scratch: Scratch::default(),
        }
    }

    /// `(lambda_bar, lambda)` for the current field.
    pub fn wave_speeds(&mut self, field: &CoupledField) -> (f64, f64) {
        let lambda_bar = elastic_wave_bound(&self.mat);
        let current = || {
            field
                .fluid
                .iter()
                .map(|u| fluid_wave_bound_unchecked(&u.to_array(), &self.ops.eos1, &self.ops.eos2))
                .fold(0.0_f64, f64::max)
        };
        let lambda = if self.time.fixed_lambda { *self.fixed_lambda.get_or_insert_with(current) } else { current() };
        (lambda_bar, lambda)
    }

    /// Time step for the current field, clipped to land on `t_end`.
    pub fn compute_dt(&mut self, field: &CoupledField) -> Result<f64> {
        let (lambda_bar, lambda) = self.wave_speeds(field);
        Ok(time_step(field, &self.time, lambda_bar, lambda)?.0)
    }

    /// One coupled update of `field` by `dt`.
    pub fn step(&mut self, field: &mut CoupledField, dt: f64) -> Result<StepInfo> {
        let (lambda_bar, lambda) = self.wave_speeds(field);
        self.step_with_speeds(field, dt, lambda_bar, lambda)
    }

    fn step_with_speeds(
        &mut self,
        field: &mut CoupledField,
        dt: f64,
        lambda_bar: f64,
        lambda: f64,
    ) -> Result<StepInfo> {
        if !(lambda > 0.0 && lambda_bar > 0.0) {
            return Err(Error::DegenerateTimeStep(format!("wave speeds lambda={lambda}, lambda_bar={lambda_bar}")));
        }
        let dx = field.grid.dx;
        let ratio = dt / dx;
        let mat = self.mat;
        let s = &mut self.scratch;

        // fluid operator T with the far field taken from the last cell
        s.raw.clear();
        s.raw.extend(field.fluid.iter().map(|u| u.to_array()));
        let far = match self.far_field {
            Some(u) => u.to_array(),
            None => *s.raw.last().expect("non-empty fluid"),
        };
        self.ops.discrete_t_into(&s.raw, &far, &mut s.t)?;

        // interface solve in the relaxation limit
        let traces = TraceStates {
            solid: field.solid_trace(),
            fluid: field.fluid_trace(),
            vbar: elastic_flux(&mat, &field.solid_trace()),
            v0: AuxVector5(s.t[0]),
            lambda_bar,
            lambda,
        };
        let cs = solve_coupling(&traces, &mat, &self.ops.eos1, &self.ops.eos2)?;
        self.solves += 1;
        let check = cfg!(debug_assertions)
            || self.residual_check_interval <= 1
            || self.solves % self.residual_check_interval == 1;
        if check {
            let r = coupling_residuals(&cs, &traces, &mat, &self.ops.eos1, &self.ops.eos2);
            let worst = max_abs_residual(&r);
            let tol = RESIDUAL_TOL + residual_floor(&cs, &mat, &self.ops.eos1, &self.ops.eos2);
            if !(worst <= tol) {
                return Err(Error::SolverFailure {
                    reason: format!("coupling residuals {r:?} exceed {tol:e}"),
                    traces: Box::new(traces),
                });
            }
        }
        let (solid_iface, fluid_iface) = interface_fluxes(&cs, &traces, &mat);

        let time = field.time + dt;
        let solid_outer_flux =
            solid_sweep(&mut field.solid, &mut s.solid, &mat, solid_iface.0, lambda_bar, ratio, time)?;
        let fluid_outer_flux = fluid_sweep(
            &mut field.fluid,
            &s.raw,
            &s.t,
            fluid_iface.0,
            lambda,
            ratio,
            time,
            (self.relaxation == RelaxationMode::Instantaneous).then_some((&self.ops.eos1, &self.ops.eos2)),
        )?;
        field.time = time;

        Ok(StepInfo {
            dt,
            lambda,
            lambda_bar,
            coupling: cs,
            traces,
            solid_outer_flux: AuxVector2(solid_outer_flux),
            solid_interface_flux: solid_iface,
            fluid_interface_flux: fluid_iface,
            fluid_outer_flux: AuxVector5(fluid_outer_flux),
        })
    }

    /// Advances to `t_end`, handing the field to `observer` at `t = 0` and after every step.
    pub fn advance(
        &mut self,
        field: &mut CoupledField,
        mut observer: impl FnMut(&CoupledField, Option<&StepInfo>),
    ) -> Result<u64> {
        observer(field, None);
        let mut steps = 0;
        while field.time < self.time.t_end {
            let (lambda_bar, lambda) = self.wave_speeds(field);
            let (dt, _) = time_step(field, &self.time, lambda_bar, lambda)?;
            let info = self.step_with_speeds(field, dt, lambda_bar, lambda)?;
            steps += 1;
            if steps % 100_000 == 0 {
                debug!("step {steps}: t = {:.6e}, dt = {dt:.3e}, lambda = {lambda:.2}", field.time);
            }
            observer(field, Some(&info));
        }
        Ok(steps)
    }

    /// Runs to `t_end` and returns the fields nearest to each requested output
    /// time (snapped to completed steps, never interpolated).
    pub fn run(&mut self, mut field: CoupledField, output_times: &[f64]) -> Result<Vec<CoupledField>> {
        let mut targets: Vec<f64> = output_times.to_vec();
        targets.sort_by(|a, b| a.total_cmp(b));
        if let Some(&bad) = targets.iter().find(|&&t| t < 0.0 || t > self.time.t_end) {
            return Err(Error::Config(format!("output time {bad} outside [0, {}]", self.time.t_end)));
        }
        let mut out = Vec::with_capacity(targets.len());
        let mut next = 0;
        while next < targets.len() && targets[next] <= field.time {
            out.push(field.clone());
            next += 1;
        }
        while field.time < self.time.t_end {
            let (lambda_bar, lambda) = self.wave_speeds(&field);
            let (dt, _) = time_step(&field, &self.time, lambda_bar, lambda)?;
            let t_next = field.time + dt;
            // targets closer to the current level than to the next one are taken now
            while next < targets.len() && targets[next] < t_next && targets[next] - field.time <= t_next - targets[next]
            {
                out.push(field.clone());
                next += 1;
            }
            self.step_with_speeds(&mut field, dt, lambda_bar, lambda)?;
            while next < targets.len() && targets[next] <= field.time {
                out.push(field.clone());
                next += 1;
            }
        }
        while next < targets.len() {
            out.push(field.clone());
            next += 1;
        }
        Ok(out)
    }
}

/// Characteristic differences `dF -/+ lambda dU` across the edge between two cells.
#[inline(always)]
fn char_diff<const N: usize>(
    fl: &[f64; N],
    fr: &[f64; N],
    ul: &[f64; N],
    ur: &[f64; N],
    lambda: f64,
) -> ([f64; N], [f64; N]) {
    let mut minus = [0.0; N];
    let mut plus = [0.0; N];
    for i in 0..N {
        let df = fr[i] - fl[i];
        let du = lambda * (ur[i] - ul[i]);
        minus[i] = df - du;
        plus[i] = df + du;
    }
    (minus, plus)
}

/// Edge flux from rolling characteristic differences. With `w[i]` the
/// difference across edge `i`, the limited slopes are
/// `minmod(w[i], w[i+1]) / (2 dx)`, so the slope term `dx/2 (S^-_r - S^+_l)`
/// becomes a quarter of the minmod difference.
#[inline(always)]
#[allow(clippy::too_many_arguments)]
fn rolling_flux<const N: usize>(
    fl: &[f64; N],
    fr: &[f64; N],
    ul: &[f64; N],
    ur: &[f64; N],
    wp_left: &[f64; N],
    w_mid: &([f64; N], [f64; N]),
    wm_right: &[f64; N],
    lambda: f64,
) -> [f64; N] {
    std::array::from_fn(|i| {
        let sm = minmod(w_mid.0[i], wm_right[i]);
        let sp = minmod(wp_left[i], w_mid.1[i]);
        0.5 * (fl[i] + fr[i]) - 0.5 * lambda * (ur[i] - ul[i]) - 0.25 * (sm - sp)
    })
}

/// One update of a solid on its own, with copied ghost cells at both ends.
pub fn solid_only_step(cells: &mut [ElasticState], mat: &ElasticMaterial, dt: f64, dx: f64) -> Result<()> {
    let last = *cells.last().ok_or_else(|| Error::Domain("empty solid".into()))?;
    let right = elastic_flux(mat, &last).0;
    let mut old = Vec::with_capacity(cells.len());
    solid_sweep(cells, &mut old, mat, right, elastic_wave_bound(mat), dt / dx, 0.0)?;
    Ok(())
}

/// Updates the solid cells in place; returns the flux through the outer boundary.
#[allow(clippy::too_many_arguments)]
fn solid_sweep(
    cells: &mut [ElasticState],
    old: &mut Vec<[f64; 2]>,
    mat: &ElasticMaterial,
    interface_flux: [f64; 2],
    lambda_bar: f64,
    ratio: f64,
    time: f64,
) -> Result<[f64; 2]> {
    let n = cells.len();
    old.clear();
    old.extend(cells.iter().map(|c| c.to_array()));
    let k_stiff = mat.stiffness();
    let inv_rho = 1.0 / mat.rho_s;
    let flux = |u: &[f64; 2]| [-u[1] * inv_rho, -k_stiff * u[0]];
    let zero = ([0.0; 2], [0.0; 2]);
    // w(i): characteristic difference across the left edge of cell i; copied
    // ghosts make it vanish on both outer edges
    let w = |i: usize| {
        if i == 0 || i >= n {
            zero
        } else {
            char_diff(&flux(&old[i - 1]), &flux(&old[i]), &old[i - 1], &old[i], lambda_bar)
        }
    };
    let outer = flux(&old[0]);
    let mut left = outer;
    let (mut w_a, mut w_b) = (zero, w(1));
    for k in 1..=n {
        let w_c = w(k + 1);
        let edge = if k == n {
            interface_flux
        } else {
            rolling_flux(&flux(&old[k - 1]), &flux(&old[k]), &old[k - 1], &old[k], &w_a.1, &w_b, &w_c.0, lambda_bar)
        };
        let u = &old[k - 1];
        let next = [u[0] - ratio * (edge[0] - left[0]), u[1] - ratio * (edge[1] - left[1])];
        if !(next[0].is_finite() && next[1].is_finite()) {
            return Err(Error::InadmissibleCell {
                cell: k as i64 - 1 - n as i64,
                time,
                reason: "non-finite solid state".into(),
            });
        }
        cells[k - 1] = ElasticState::from_array(next);
        left = edge;
        w_a = w_b;
        w_b = w_c;
    }
    Ok(outer)
}

/// Updates the fluid cells in place from the old states `old` and operator
/// values `t`, then applies the relaxation projection when `relax` is given;
/// returns the flux through the outer boundary.
#[allow(clippy::too_many_arguments)]
fn fluid_sweep(
    cells: &mut [FluidConserved],
    old: &[[f64; 5]],
    t: &[[f64; 5]],
    interface_flux: [f64; 5],
    lambda: f64,
    ratio: f64,
    time: f64,
    relax: Option<(&GasEos, &GasEos)>,
) -> Result<[f64; 5]> {
    let n = cells.len();
    let zero = ([0.0; 5], [0.0; 5]);
    let w = |i: usize| {
        if i == 0 || i >= n {
            zero
        } else {
            char_diff(&t[i - 1], &t[i], &old[i - 1], &old[i], lambda)
        }
    };
    let mut left = interface_flux;
    let (mut w_a, mut w_b) = (zero, w(1));
    for k in 1..=n {
        let w_c = w(k + 1);
        let r = k.min(n - 1);
        let edge = rolling_flux(&t[k - 1], &t[r], &old[k - 1], &old[r], &w_a.1, &w_b, &w_c.0, lambda);
        let u = &old[k - 1];
        let next: [f64; 5] = std::array::from_fn(|i| u[i] - ratio * (edge[i] - left[i]));
        let cell = (k - 1) as i64;
        check_array(&next).map_err(|reason| Error::InadmissibleCell { cell, time, reason })?;
        let mut next = FluidConserved::from_array(next);
        if let Some((eos1, eos2)) = relax {
            next = pressure_projection(&velocity_projection(&next), eos1, eos2);
            check_array(&next.to_array()).map_err(|reason| Error::InadmissibleCell { cell, time, reason })?;
        }
        cells[k - 1] = next;
        left = edge;
        w_a = w_b;
        w_b = w_c;
    }
    Ok(left)
}

/// `(dt, cfl_number)` for the given speeds; `dt` is clipped at `t_end`.
pub fn time_step(field: &CoupledField, tc: &TimeControl, lambda_bar: f64, lambda: f64) -> Result<(f64, f64)> {
    let speed = lambda_bar.max(lambda);
    if !(speed > 0.0 && speed.is_finite()) {
        return Err(Error::DegenerateTimeStep(format!("maximal wave speed {speed}")));
    }
    let dx = field.grid.dx;
    let hyperbolic = tc.cfl * dx / speed;
    let mut dt = match (tc.fixed_dt, tc.mode) {
        (Some(dt), _) => dt,
        (None, StepMode::Hyperbolic) => hyperbolic,
        // never exceed the hyperbolic bound, which only matters for dx > 1 m
        (None, StepMode::Parabolic) => (tc.cfl * dx * dx / lambda_bar).min(hyperbolic),
    };
    let remaining = tc.t_end - field.time;
    if dt >= remaining {
        dt = remaining;
    }
    if !(dt > 0.0) {
        warn!("non-positive time step {dt} at t = {}", field.time);
        return Err(Error::DegenerateTimeStep(format!("dt = {dt} at t = {}", field.time)));
    }
    Ok((dt, speed * dt / dx))
}

/// Time step for `field` with wave speeds from the current states.
pub fn compute_dt(
    field: &CoupledField,
    tc: &TimeControl,
    mat: &ElasticMaterial,
    eos1: &GasEos,
    eos2: &GasEos,
) -> Result<f64> {
    let lambda =
        field.fluid.iter().map(|u| fluid_wave_bound_unchecked(&u.to_array(), eos1, eos2)).fold(0.0_f64, f64::max);
    Ok(time_step(field, tc, elastic_wave_bound(mat), lambda)?.0)
}
