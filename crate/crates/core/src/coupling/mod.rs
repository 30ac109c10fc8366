//! Interface Riemann solver for the coupled relaxation systems.
//!
//! Given the solid trace `U_{-1}` and the fluid trace `U_0`, the solver returns
//! boundary states `(Ubar_R, Vbar_R)` for the solid and `(U_L, V_L)` for the
//! fluid. The seven unknowns `(w_R, sigma_R, U_L)` satisfy
//!
//! * equal velocities `w_R = v_1L = v_2L`,
//! * stress balance `sigma_R = -p_1(rho_1L) = -p_2(rho_2L)`,
//! * the relaxed velocity conditions for both phases, and
//! * the relaxed stress condition `rho_s V^w_R = sum_k (...)`.
//!
//! The auxiliary states follow from the waves of the linear relaxation
//! systems: `Vbar_R = Vbar_{-1} + lambda_bar (Ubar_{-1} - Ubar_R)` and
//! `V_L = V_0 + lambda (U_L - U_0)`.
//!
//! The system reduces to a cubic `R1` in `[alpha1 rho1]_L` (middle real root
//! selected) and a quadratic `R2` in `[alpha2 rho2 v2]_L` (smaller root
//! selected). The closed-form coefficients assume the relaxation-limit
//! inputs `Vbar_{-1} = Fbar(Ubar_{-1})` and are derived for the mixture
//! interfacial closure.

mod roots;

pub use roots::{cubic_real_roots, quadratic_roots, CubicCoeffs, CubicRoots, QuadCoeffs};

use nalgebra::{SMatrix, SVector};

use crate::eos::{ElasticMaterial, GasEos};
use crate::error::{Error, Result};
use crate::state::{elastic_flux, AuxVector2, AuxVector5, ElasticState, FluidConserved};

/// Inputs of the interface solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceStates {
    /// Solid state in cell -1.
    pub solid: ElasticState,
    /// Fluid state in cell 0.
    pub fluid: FluidConserved,
    /// `Vbar_{-1}`, equal to `Fbar(Ubar_{-1})` in the relaxation limit.
    pub vbar: AuxVector2,
    /// `V_0`, equal to `T_0[U]` in the relaxation limit.
    pub v0: AuxVector5,
    pub lambda_bar: f64,
    pub lambda: f64,
}

impl TraceStates {
    /// Traces in the relaxation limit: `Vbar_{-1} = Fbar(Ubar_{-1})`, `V_0 = T_0`.
    pub fn relaxed(
        mat: &ElasticMaterial,
        solid: ElasticState,
        fluid: FluidConserved,
        t0: AuxVector5,
        lambda: f64,
        lambda_bar: f64,
    ) -> Result<Self> {
        if !(lambda > 0.0) || !(lambda_bar > 0.0) {
            return Err(Error::Domain(format!(
                "relaxation speeds must be positive (lambda={lambda}, lambda_bar={lambda_bar})"
            )));
        }
        fluid.check()?;
        Ok(Self { solid, fluid, vbar: elastic_flux(mat, &solid), v0: t0, lambda_bar, lambda })
    }
}

/// Solver output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingStates {
    pub ubar_r: ElasticState,
    pub vbar_r: AuxVector2,
    pub u_l: FluidConserved,
    pub v_l: AuxVector5,
}

/// Scalar parameters shared by all closed-form expressions.
struct Coefficients {
    lam: f64,
    lb: f64,
    rs: f64,
    cs2: f64,
    c1s: f64,
    c2s: f64,
    pi1: f64,
    pi2: f64,
    s0: f64,
    w0: f64,
    a10: f64,
    m10: f64,
    q10: f64,
    m20: f64,
    q20: f64,
}

impl Coefficients {
    fn new(t: &TraceStates, mat: &ElasticMaterial, eos1: &GasEos, eos2: &GasEos) -> Self {
        Self {
            lam: t.lambda,
            lb: t.lambda_bar,
            rs: mat.rho_s,
            cs2: mat.c_s * mat.c_s,
            c1s: eos1.c2(),
            c2s: eos2.c2(),
            pi1: eos1.pi,
            pi2: eos2.pi,
            s0: t.solid.sigma,
            w0: t.solid.w,
            a10: t.fluid.alpha1,
            m10: t.fluid.m1,
            q10: t.fluid.q1,
            m20: t.fluid.m2,
            q20: t.fluid.q2,
        }
    }

    /// `D2(x)`, shared by the denominators of both step-2 and step-3 expressions.
    #[inline]
    fn d2(&self, x: f64) -> f64 {
        let k = self.cs2 * self.rs;
        k * (self.lam * x - self.lam * self.m10 - x * self.w0 + self.q10) + self.lb * x * (self.s0 - self.pi1)
    }

    fn r1(&self) -> CubicCoeffs {
        let Self { lam, lb, rs, cs2, c1s, c2s, pi1, pi2, s0, w0, m10, q10, m20, q20, .. } = *self;
        let cs4 = cs2 * cs2;
        let g = lam * m10 - q10;
        let a3 = ((lam - w0) * rs * ((m10 * c1s + m20 * c2s) * lam - q10 * c1s - q20 * c2s) * cs2
            - lb * ((c1s * (pi2 - s0) * m10 + m20 * c2s * (pi1 - s0)) * lam
                - c1s * (pi2 - s0) * q10
                - q20 * c2s * (pi1 - s0)))
            * lb;
        let a2 = (rs * rs * (lam - w0) * (lam - w0) * cs4
            - lb * rs
                * ((m10 * c1s + m20 * c2s - 2.0 * s0 + pi1 + pi2) * lam - q10 * c1s + (-pi1 - pi2 + 2.0 * s0) * w0
                    - q20 * c2s)
                * cs2
            + lb * lb * (pi2 - s0) * (pi1 - s0))
            * g;
        let a1 = -2.0 * rs * cs2 * g * g * (rs * (lam - w0) * cs2 - lb * (pi1 + pi2 - 2.0 * s0) / 2.0);
        let a0 = rs * rs * cs4 * g * g * g;
        CubicCoeffs { a3, a2, a1, a0 }
    }

    fn n1_d1(&self, x: f64) -> (f64, f64) {
        let d2 = self.d2(x);
        // first factor of N1 differs from D2 only by pi2 in place of pi1
        let f1 = d2 + self.lb * x * (self.pi1 - self.pi2);
        let f2 = d2 + self.lb * x * x * self.c1s;
        (f1 * f2, x * self.lb * self.c2s * d2)
    }

    fn r2(&self, x: f64, y: f64) -> QuadCoeffs {
        let Self { lam, lb, rs, c1s, c2s, pi1, pi2, s0, w0, a10, m10, q10, m20, q20, .. } = *self;
        let b2 = -(x + y) * m20 * m10;
        let b1 = (lb * rs + lam * y + lam * x) * m10 * y * m20;
        let b0 = (((-pi1 + pi2) * a10 - (q10 + q20) * lam - w0 * rs * lb + s0 - pi2) * y * m20
            + lb * rs * m20
            + q20 * q20 * y
            + y * c2s * m20 * m20
            - m20 * lb * rs)
            * m10
            * y
            + (m10 * m10 * c1s + q10 * q10) * y * y * m20;
        QuadCoeffs { b2, b1, b0 }
    }
}

/// Relative size below which a denominator is treated as singular.
const SINGULAR_TOL: f64 = 1e-13;

pub fn r1_coefficients(t: &TraceStates, mat: &ElasticMaterial, eos1: &GasEos, eos2: &GasEos) -> CubicCoeffs {
    Coefficients::new(t, mat, eos1, eos2).r1()
}

/// `[alpha2 rho2]_L = -N1(x) / D1(x)`.
pub fn alpha2rho2_of_x(x: f64, t: &TraceStates, mat: &ElasticMaterial, eos1: &GasEos, eos2: &GasEos) -> Result<f64> {
    let k = Coefficients::new(t, mat, eos1, eos2);
    let (n1, d1) = k.n1_d1(x);
    let d2 = k.d2(x);
    let d2_scale = (k.cs2 * k.rs * (k.lam * (x.abs() + k.m10) + (x * k.w0).abs() + k.q10.abs()))
        .max(k.lb * (x * (k.s0 - k.pi1)).abs());
    if d1 == 0.0 || x == 0.0 || d2.abs() <= SINGULAR_TOL * d2_scale {
        return Err(Error::SingularDenominator("[alpha2 rho2]_L"));
    }
    Ok(-n1 / d1)
}

/// `alpha_1L = -N2(x) / D2(x)` with `N2 = lambda_bar x^2 c1^2`.
pub fn alpha1l_of_x(x: f64, t: &TraceStates, mat: &ElasticMaterial, eos1: &GasEos, eos2: &GasEos) -> Result<f64> {
    let k = Coefficients::new(t, mat, eos1, eos2);
    let d2 = k.d2(x);
    let d2_scale = (k.cs2 * k.rs * (k.lam * (x.abs() + k.m10) + (x * k.w0).abs() + k.q10.abs()))
        .max(k.lb * (x * (k.s0 - k.pi1)).abs());
    if d2.abs() <= SINGULAR_TOL * d2_scale {
        return Err(Error::SingularDenominator("alpha_1L"));
    }
    let alpha = -k.lb * x * x * k.c1s / d2;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::UnphysicalRoot(alpha));
    }
    Ok(alpha)
}

pub fn r2_coefficients(
    x: f64,
    y: f64,
    t: &TraceStates,
    mat: &ElasticMaterial,
    eos1: &GasEos,
    eos2: &GasEos,
) -> QuadCoeffs {
    Coefficients::new(t, mat, eos1, eos2).r2(x, y)
}

/// Runs the seven-step root selection and closes the auxiliary states.
pub fn solve_coupling(t: &TraceStates, mat: &ElasticMaterial, eos1: &GasEos, eos2: &GasEos) -> Result<CouplingStates> {
    let fail = |reason: String| Error::SolverFailure { reason, traces: Box::new(*t) };
    let k = Coefficients::new(t, mat, eos1, eos2);

    let roots = cubic_real_roots(&k.r1()).map_err(|e| fail(format!("R1: {e}")))?;
    let x = match roots {
        CubicRoots::Three(r) => r[1],
        CubicRoots::One(r) => return Err(fail(format!("R1 has a single real root {r}"))),
    };
    if !(x > 0.0) {
        return Err(fail(format!("selected root [a1r1]_L = {x} is not positive")));
    }
    let y = alpha2rho2_of_x(x, t, mat, eos1, eos2).map_err(|e| fail(e.to_string()))?;
    if !(y > 0.0) {
        return Err(fail(format!("[a2r2]_L = {y} is not positive")));
    }
    let alpha1l = alpha1l_of_x(x, t, mat, eos1, eos2).map_err(|e| fail(e.to_string()))?;
    if !(alpha1l > 0.0 && alpha1l < 1.0) {
        return Err(fail(format!("unphysical alpha_1L = {alpha1l}")));
    }
    let sigma_r = (k.pi1 * alpha1l - k.c1s * x) / alpha1l;
    let (q2l, _) = quadratic_roots(&k.r2(x, y)).map_err(|e| fail(format!("R2: {e}")))?;
    let w_r = q2l / y;
    let q1l = w_r * x;

    let ubar_r = ElasticState::new(w_r, sigma_r);
    let u_l = FluidConserved { alpha1: alpha1l, m1: x, q1: q1l, m2: y, q2: q2l };
    if u_l.to_array().iter().any(|v| !v.is_finite()) || !sigma_r.is_finite() {
        return Err(fail(format!("non-finite coupling state {u_l:?}, sigma_R = {sigma_r}")));
    }
    Ok(refine(t, mat, eos1, eos2, close_auxiliary(t, ubar_r, u_l)))
}

/// Newton polish of the closed-form solution on the original seven coupling
/// conditions. The cubic can have a second root very close to the selected
/// one, which costs several digits in the eliminated variables; the unreduced
/// system does not share that conditioning. Steps are halved until the
/// residual decreases.
fn refine(t: &TraceStates, mat: &ElasticMaterial, eos1: &GasEos, eos2: &GasEos, cs: CouplingStates) -> CouplingStates {
    let unpack = |z: &[f64; 7]| {
        close_auxiliary(
            t,
            ElasticState::new(z[0], z[1]),
            FluidConserved { alpha1: z[2], m1: z[3], q1: z[4], m2: z[5], q2: z[6] },
        )
    };
    let residual = |z: &[f64; 7]| coupling_residuals(&unpack(z), t, mat, eos1, eos2);
    let u = cs.u_l;
    let mut z = [cs.ubar_r.w, cs.ubar_r.sigma, u.alpha1, u.m1, u.q1, u.m2, u.q2];
    // near a pure phase the step in alpha1 must stay well inside (0, 1)
    let scale = [
        mat.c_s,
        mat.stiffness(),
        u.alpha1.min(u.alpha2()),
        u.m1,
        u.m1 * eos1.c.max(mat.c_s),
        u.m2,
        u.m2 * eos2.c.max(mat.c_s),
    ];
    let mut r = residual(&z);
    let mut best = max_abs_residual(&r);
    let mut best_cs = cs;
    for _ in 0..8 {
        if best == 0.0 {
            break;
        }
        let mut jac = SMatrix::<f64, 7, 7>::zeros();
        for j in 0..7 {
            let h = 1e-7 * scale[j];
            let mut zp = z;
            zp[j] += h;
            let mut zm = z;
            zm[j] -= h;
            let (rp, rm) = (residual(&zp), residual(&zm));
            for i in 0..7 {
                jac[(i, j)] = (rp[i] - rm[i]) / (2.0 * h);
            }
        }
        let Some(dz) = jac.lu().solve(&SVector::<f64, 7>::from_column_slice(&r)) else {
            break;
        };
        // p_2 ~ 1/alpha_2 is far from linear near pure vapor, so full steps can overshoot
        let mut damping = 1.0;
        let mut accepted = None;
        for _ in 0..10 {
            let next: [f64; 7] = std::array::from_fn(|i| z[i] - damping * dz[i]);
            if next[2] > 0.0 && next[2] < 1.0 && next[3] > 0.0 && next[5] > 0.0 {
                let rn = residual(&next);
                if max_abs_residual(&rn) < best {
                    accepted = Some((next, rn));
                    break;
                }
            }
            damping *= 0.5;
        }
        let Some((next, rn)) = accepted else {
            break;
        };
        z = next;
        r = rn;
        best = max_abs_residual(&r);
        best_cs = unpack(&z);
    }
    best_cs
}

fn close_auxiliary(t: &TraceStates, ubar_r: ElasticState, u_l: FluidConserved) -> CouplingStates {
    let dub = AuxVector2([t.solid.w - ubar_r.w, t.solid.sigma - ubar_r.sigma]);
    let vbar_r = t.vbar + t.lambda_bar * dub;
    let du = AuxVector5(u_l.to_array()) - AuxVector5(t.fluid.to_array());
    let v_l = t.v0 + t.lambda * du;
    CouplingStates { ubar_r, vbar_r, u_l, v_l }
}

/// Nondimensional residuals of the seven coupling conditions, in the order
/// `w_R - v_1L`, `w_R - v_2L`, `sigma_R + p_1L`, `sigma_R + p_2L`, relaxed
/// velocity condition for phase 1 and 2, relaxed stress condition.
/// Velocities are scaled by `c_s`, stresses by `rho_s c_s^2`.
pub fn coupling_residuals(
    cs: &CouplingStates,
    t: &TraceStates,
    mat: &ElasticMaterial,
    eos1: &GasEos,
    eos2: &GasEos,
) -> [f64; 7] {
    let vel = mat.c_s;
    let stress = mat.stiffness();
    let u = cs.u_l;
    let u0 = t.fluid;
    let w_r = cs.ubar_r.w;
    let sigma_r = cs.ubar_r.sigma;
    let v1l = u.q1 / u.m1;
    let v2l = u.q2 / u.m2;
    let p1l = eos1.pressure_unchecked(u.m1 / u.alpha1);
    let p2l = eos2.pressure_unchecked(u.m2 / u.alpha2());

    let w_relaxed = -cs.vbar_r[1] / (mat.c_s * mat.c_s * mat.rho_s);
    let vk = |dv: f64, q0: f64, m: f64| (dv + q0) / m;
    let v1_relaxed = vk(cs.v_l[1] - t.v0[1], u0.q1, u.m1);
    let v2_relaxed = vk(cs.v_l[3] - t.v0[3], u0.q2, u.m2);

    let a1p10 = eos1.c2() * u0.m1 - u0.alpha1 * eos1.pi;
    let a2p20 = eos2.c2() * u0.m2 - u0.alpha2() * eos2.pi;
    let sum = (cs.v_l[2] - t.v0[2] + u0.q1 * u0.q1 / u0.m1 + a1p10 - u.q1 * u.q1 / u.m1)
        + (cs.v_l[4] - t.v0[4] + u0.q2 * u0.q2 / u0.m2 + a2p20 - u.q2 * u.q2 / u.m2);

    [
        (w_r - v1l) / vel,
        (w_r - v2l) / vel,
        (sigma_r + p1l) / stress,
        (sigma_r + p2l) / stress,
        (w_relaxed - v1_relaxed) / vel,
        (w_relaxed - v2_relaxed) / vel,
        (mat.rho_s * cs.vbar_r[0] - sum) / stress,
    ]
}

/// Pressure residual left by rounding `alpha_1L` to one ulp. Near a pure
/// phase `dp_k / dalpha_k = (p_k + pi_k) / alpha_k` makes this larger than any
/// fixed tolerance; elsewhere it is of order 1e-17.
pub fn residual_floor(cs: &CouplingStates, mat: &ElasticMaterial, eos1: &GasEos, eos2: &GasEos) -> f64 {
    let u = cs.u_l;
    let (a1, a2) = (u.alpha1, u.alpha2());
    let slope = (eos1.c2() * u.m1 / (a1 * a1)).max(eos2.c2() * u.m2 / (a2 * a2));
    4.0 * f64::EPSILON * slope / mat.stiffness()
}

pub fn max_abs_residual(r: &[f64; 7]) -> f64 {
    r.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{fluid_flux, FluidPrimitive};

    const WATER: GasEos = GasEos { c: 1483.3, pi: 1.1358e9 };
    const VAPOR: GasEos = GasEos { c: 367.58, pi: 0.0 };
    const STEEL: ElasticMaterial = ElasticMaterial { rho_s: 7800.0, c_s: 5990.0 };

    fn equilibrium(alpha1: f64, p: f64, v: f64) -> FluidConserved {
        FluidPrimitive {
            alpha1,
            rho1: VAPOR.density_from_pressure(p).unwrap(),
            v1: v,
            rho2: WATER.density_from_pressure(p).unwrap(),
            v2: v,
        }
        .to_conserved()
        .unwrap()
    }

    fn bubble_traces() -> TraceStates {
        let fluid = equilibrium(0.1, 1.75e7, 0.0);
        let t0 = fluid_flux(&fluid, &VAPOR, &WATER).unwrap();
        TraceStates::relaxed(&STEEL, ElasticState::new(0.0, -3.5e7), fluid, t0, 1483.3, 5990.0).unwrap()
    }

    #[test]
    fn a0_for_resting_traces() {
        let t = bubble_traces();
        let c = r1_coefficients(&t, &STEEL, &VAPOR, &WATER);
        let g = t.lambda * t.fluid.m1;
        let expect = STEEL.rho_s.powi(2) * STEEL.c_s.powi(4) * g * g * g;
        assert!((c.a0 - expect).abs() <= 1e-15 * expect.abs());
    }

    #[test]
    fn a3_is_linear_in_q10() {
        let t = bubble_traces();
        let a3 = |q: f64| {
            let mut tt = t;
            tt.fluid.q1 = q;
            r1_coefficients(&tt, &STEEL, &VAPOR, &WATER).a3
        };
        // a3 is affine in q10 with slope -(lambda - w0) rho_s c1^2 c_s^2 lb + lb^2 c1^2 (pi2 - s0)
        let lb = t.lambda_bar;
        let slope = -(t.lambda - t.solid.w) * STEEL.rho_s * VAPOR.c2() * STEEL.c_s.powi(2) * lb
            + lb * lb * VAPOR.c2() * (WATER.pi - t.solid.sigma);
        let h = 1.0;
        let fd = (a3(h) - a3(-h)) / (2.0 * h);
        assert!((fd - slope).abs() <= 1e-6 * slope.abs(), "{fd} vs {slope}");
    }

    #[test]
    fn bubble_traces_solve_with_small_residuals() {
        let t = bubble_traces();
        let cs = solve_coupling(&t, &STEEL, &VAPOR, &WATER).unwrap();
        let r = coupling_residuals(&cs, &t, &STEEL, &VAPOR, &WATER);
        assert!(max_abs_residual(&r) <= 1e-9, "{r:?}");
        assert!(cs.u_l.alpha1 > 0.0 && cs.u_l.alpha1 < 1.0);
        // the interface stress relaxes between solid stress and fluid pressure
        assert!(cs.ubar_r.sigma < -1.75e7 && cs.ubar_r.sigma > -3.5e7, "{:?}", cs.ubar_r);
    }

    #[test]
    fn root_pattern_matches_selection_rule() {
        let t = bubble_traces();
        let roots = cubic_real_roots(&r1_coefficients(&t, &STEEL, &VAPOR, &WATER)).unwrap();
        let CubicRoots::Three(r) = roots else { panic!("{roots:?}") };
        assert!(r[0] < 0.0, "{r:?}");
        assert!(matches!(alpha1l_of_x(r[2], &t, &STEEL, &VAPOR, &WATER), Err(Error::UnphysicalRoot(_))));
        let y = alpha2rho2_of_x(r[1], &t, &STEEL, &VAPOR, &WATER).unwrap();
        assert!(y > 0.0);
        let q = r2_coefficients(r[1], y, &t, &STEEL, &VAPOR, &WATER);
        assert!(q.b2 < 0.0);
        assert!(q.b1 * q.b1 - 4.0 * q.b2 * q.b0 >= 0.0);
    }

    #[test]
    fn n2_nonnegative_and_singular_denominator() {
        let t = bubble_traces();
        let k = Coefficients::new(&t, &STEEL, &VAPOR, &WATER);
        // D2 is affine in x: find its zero and evaluate there
        let d0 = k.d2(0.0);
        let d1 = k.d2(1.0) - d0;
        let x_sing = -d0 / d1;
        assert!(matches!(alpha1l_of_x(x_sing, &t, &STEEL, &VAPOR, &WATER), Err(Error::SingularDenominator(_))));
        assert!(matches!(alpha2rho2_of_x(x_sing, &t, &STEEL, &VAPOR, &WATER), Err(Error::SingularDenominator(_))));
        for x in [-3.0, 0.0, 1e-3, 7.0] {
            assert!(k.lb * x * x * k.c1s >= 0.0);
        }
    }

    #[test]
    fn residuals_shift_with_w() {
        let t = bubble_traces();
        let mut cs = solve_coupling(&t, &STEEL, &VAPOR, &WATER).unwrap();
        let base = coupling_residuals(&cs, &t, &STEEL, &VAPOR, &WATER);
        let delta = 0.25;
        cs.ubar_r.w += delta;
        let moved = coupling_residuals(&cs, &t, &STEEL, &VAPOR, &WATER);
        for i in 0..2 {
            let shift = moved[i] - base[i];
            assert!((shift - delta / STEEL.c_s).abs() <= 1e-15, "{shift}");
        }
    }

    #[test]
    fn continuous_states_reduce_to_trace_conditions() {
        // U_L = U_0 and V_L = V_0: the relaxed conditions become
        // V^sigma = -c_s^2 rho_s v_k and rho_s V^w = alpha1 p1 + alpha2 p2.
        let p = 2.0e6;
        let v = 1.5;
        let fluid = equilibrium(0.4, p, v);
        let solid = ElasticState::new(v, -p);
        let t0 = fluid_flux(&fluid, &VAPOR, &WATER).unwrap();
        let t = TraceStates::relaxed(&STEEL, solid, fluid, t0, 1500.0, 5990.0).unwrap();
        let cs = CouplingStates { ubar_r: solid, vbar_r: t.vbar, u_l: fluid, v_l: t.v0 };
        let r = coupling_residuals(&cs, &t, &STEEL, &VAPOR, &WATER);
        let scale = 1e-12;
        assert!(r[0].abs() < scale && r[1].abs() < scale, "{r:?}");
        assert!(r[2].abs() < 1e-12 && r[3].abs() < 1e-12, "{r:?}");
        // -V^sigma/(c_s^2 rho_s) = w = v and rho_s V^w = -sigma = p
        assert!(r[4].abs() < 1e-12 && r[5].abs() < 1e-12, "{r:?}");
        assert!(r[6].abs() < 1e-12, "{r:?}");

        // and the solver keeps such states
        let solved = solve_coupling(&t, &STEEL, &VAPOR, &WATER).unwrap();
        let fa = solved.u_l.to_array();
        for (a, b) in fa.iter().zip(fluid.to_array()) {
            assert!((a - b).abs() <= 1e-9 * b.abs().max(1e-9), "{solved:?}");
        }
    }

    #[test]
    fn residual_floor_negligible_away_from_pure_phases() {
        let t = bubble_traces();
        let cs = solve_coupling(&t, &STEEL, &VAPOR, &WATER).unwrap();
        assert!(residual_floor(&cs, &STEEL, &VAPOR, &WATER) < 1e-15);
    }

    #[test]
    fn deterministic() {
        let t = bubble_traces();
        let a = solve_coupling(&t, &STEEL, &VAPOR, &WATER).unwrap();
        let b = solve_coupling(&t, &STEEL, &VAPOR, &WATER).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn failure_carries_traces() {
        let mut t = bubble_traces();
        // a stress far beyond any fluid pressure leaves no admissible root
        t.solid.sigma = 3.0e12;
        t.vbar = elastic_flux(&STEEL, &t.solid);
        match solve_coupling(&t, &STEEL, &VAPOR, &WATER) {
            Err(Error::SolverFailure { traces, .. }) => assert_eq!(*traces, t),
            other => panic!("expected failure, got {other:?}"),
        }
    }
}
