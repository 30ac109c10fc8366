//! Shared helpers for the integration tests: random interface traces in the
//! bubble-collapse regime and an independent Newton solve of the coupling
//! conditions.

#![allow(dead_code)]

use fsi_relax::coupling::{CouplingStates, TraceStates};
use fsi_relax::eos::{fluid_wave_bound, ElasticMaterial, GasEos};
use fsi_relax::state::{fluid_flux, ElasticState, FluidPrimitive};
use nalgebra::{SMatrix, SVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const VAPOR: GasEos = GasEos { c: 367.58, pi: 0.0 };
pub const WATER: GasEos = GasEos { c: 1483.3, pi: 1.1358e9 };
pub const STEEL: ElasticMaterial = ElasticMaterial { rho_s: 7800.0, c_s: 5990.0 };

/// Relaxed traces at pressure `p` and velocity `v` next to `solid`, with the
/// wave bound of the fluid state as `lambda` and `c_s` as `lambda_bar`.
pub fn trace(alpha1: f64, p: f64, v: f64, solid: ElasticState) -> TraceStates {
    let fluid = FluidPrimitive {
        alpha1,
        rho1: VAPOR.density_from_pressure(p).unwrap(),
        v1: v,
        rho2: WATER.density_from_pressure(p).unwrap(),
        v2: v,
    }
    .to_conserved()
    .unwrap();
    let t0 = fluid_flux(&fluid, &VAPOR, &WATER).unwrap();
    let lambda = fluid_wave_bound(&fluid, &VAPOR, &WATER).unwrap();
    TraceStates::relaxed(&STEEL, solid, fluid, t0, lambda, STEEL.c_s).unwrap()
}

/// Traces as the scheme produces them: relaxed fluid (`p1 = p2`, `v1 = v2`)
/// between the bubble and liquid states, solid stresses up to the initial
/// loading, velocities of the order seen during the collapse, and relaxation
/// speeds at or above the local wave bounds.
pub fn random_traces(n: usize, seed: u64) -> Vec<TraceStates> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let alpha1 = rng.gen_range(0.1..0.9);
            let p = 10f64.powf(rng.gen_range(3.5..7.6));
            let v = rng.gen_range(-150.0..150.0);
            let fluid = FluidPrimitive {
                alpha1,
                rho1: VAPOR.density_from_pressure(p).unwrap(),
                v1: v,
                rho2: WATER.density_from_pressure(p).unwrap(),
                v2: v,
            }
            .to_conserved()
            .unwrap();
            let solid = ElasticState::new(rng.gen_range(-150.0..150.0), -10f64.powf(rng.gen_range(3.5..7.6)));
            let t0 = fluid_flux(&fluid, &VAPOR, &WATER).unwrap();
            let lambda = fluid_wave_bound(&fluid, &VAPOR, &WATER).unwrap() * rng.gen_range(1.0..1.5);
            let lambda_bar = STEEL.c_s * rng.gen_range(1.0..1.2);
            TraceStates::relaxed(&STEEL, solid, fluid, t0, lambda, lambda_bar).unwrap()
        })
        .collect()
}

/// Unknowns `(w_R, sigma_R, alpha1_L, m1_L, q1_L, m2_L, q2_L)`.
pub type Unknowns = [f64; 7];

/// The seven coupling conditions written directly in the unknowns, with the
/// auxiliary states eliminated through the relaxation waves.
pub fn oracle_residuals(z: &Unknowns, t: &TraceStates) -> [f64; 7] {
    let (rs, cs) = (STEEL.rho_s, STEEL.c_s);
    let [w, sigma, a1, m1, q1, m2, q2] = *z;
    let a2 = 1.0 - a1;
    let u0 = t.fluid;
    let p = |eos: &GasEos, rho: f64| eos.c * eos.c * rho - eos.pi;

    // Vbar_R = Vbar_{-1} + lambda_bar (Ubar_{-1} - Ubar_R)
    let vw = t.vbar[0] + t.lambda_bar * (t.solid.w - w);
    let vsigma = t.vbar[1] + t.lambda_bar * (t.solid.sigma - sigma);
    // V_L - V_0 = lambda (U_L - U_0)
    let dv = |ul: f64, u0: f64| t.lambda * (ul - u0);

    let w_relaxed = -vsigma / (cs * cs * rs);
    let momentum =
        |dq: f64, q0: f64, m0: f64, alpha0: f64, p0: f64, q: f64, m: f64| dq + q0 * q0 / m0 + alpha0 * p0 - q * q / m;
    let p10 = p(&VAPOR, u0.m1 / u0.alpha1);
    let p20 = p(&WATER, u0.m2 / (1.0 - u0.alpha1));
    let stress_sum = momentum(dv(q1, u0.q1), u0.q1, u0.m1, u0.alpha1, p10, q1, m1)
        + momentum(dv(q2, u0.q2), u0.q2, u0.m2, 1.0 - u0.alpha1, p20, q2, m2);

    let vel = cs;
    let stress = rs * cs * cs;
    [
        (w - q1 / m1) / vel,
        (w - q2 / m2) / vel,
        (sigma + p(&VAPOR, m1 / a1)) / stress,
        (sigma + p(&WATER, m2 / a2)) / stress,
        (w_relaxed - (dv(m1, u0.m1) + u0.q1) / m1) / vel,
        (w_relaxed - (dv(m2, u0.m2) + u0.q2) / m2) / vel,
        (rs * vw - stress_sum) / stress,
    ]
}

fn norm(r: &[f64; 7]) -> f64 {
    r.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn admissible(z: &Unknowns) -> bool {
    z.iter().all(|v| v.is_finite()) && z[2] > 0.0 && z[2] < 1.0 && z[3] > 0.0 && z[5] > 0.0
}

/// Pressure residuals reachable when `alpha1` is only known to one ulp:
/// `dp_k / dalpha_k = (p_k + pi_k) / alpha_k` blows up near a pure phase.
pub fn alpha_ulp_floor(z: &Unknowns) -> f64 {
    let [_, _, a1, m1, _, m2, _] = *z;
    let a2 = 1.0 - a1;
    let slope = (VAPOR.c * VAPOR.c * m1 / (a1 * a1)).max(WATER.c * WATER.c * m2 / (a2 * a2));
    4.0 * f64::EPSILON * slope / (STEEL.rho_s * STEEL.c_s * STEEL.c_s)
}

/// Damped Newton iteration on [`oracle_residuals`] from the trace state, with
/// a central-difference Jacobian and step halving until the residual norm
/// decreases. Returns `None` when it stalls above `1e-13` plus
/// [`alpha_ulp_floor`].
pub fn newton_oracle(t: &TraceStates) -> Option<Unknowns> {
    let u0 = t.fluid;
    let v0 = (u0.q1 + u0.q2) / (u0.m1 + u0.m2);
    let p0 = VAPOR.c * VAPOR.c * u0.m1 / u0.alpha1 - VAPOR.pi;
    let mut z: Unknowns = [v0, -p0, u0.alpha1, u0.m1, u0.m1 * v0, u0.m2, u0.m2 * v0];
    let scale = |z: &Unknowns| {
        [
            STEEL.c_s,
            STEEL.rho_s * STEEL.c_s * STEEL.c_s,
            z[2].min(1.0 - z[2]),
            z[3],
            z[3] * STEEL.c_s,
            z[5],
            z[5] * STEEL.c_s,
        ]
    };

    let mut r = oracle_residuals(&z, t);
    for _ in 0..200 {
        if norm(&r) < 1e-15 {
            break;
        }
        let s = scale(&z);
        let mut jac = SMatrix::<f64, 7, 7>::zeros();
        for j in 0..7 {
            let h = 1e-6 * s[j];
            let (mut zp, mut zm) = (z, z);
            zp[j] += h;
            zm[j] -= h;
            let (rp, rm) = (oracle_residuals(&zp, t), oracle_residuals(&zm, t));
            for i in 0..7 {
                jac[(i, j)] = (rp[i] - rm[i]) / (2.0 * h);
            }
        }
        let dz = jac.lu().solve(&SVector::<f64, 7>::from_column_slice(&r))?;
        let mut step = 1.0;
        let mut accepted = false;
        while step > 1e-12 {
            let next: Unknowns = std::array::from_fn(|i| z[i] - step * dz[i]);
            if admissible(&next) {
                let rn = oracle_residuals(&next, t);
                if norm(&rn) < norm(&r) {
                    z = next;
                    r = rn;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (norm(&r) < 1e-13 + alpha_ulp_floor(&z)).then_some(z)
}

pub fn unknowns(cs: &CouplingStates) -> Unknowns {
    let u = cs.u_l;
    [cs.ubar_r.w, cs.ubar_r.sigma, u.alpha1, u.m1, u.q1, u.m2, u.q2]
}

/// Per-component relative deviation, with floors of 1 m/s for velocities,
/// 1 kPa for stresses and `m_k * 1 m/s` for momenta.
pub fn relative_deviation(a: &Unknowns, b: &Unknowns) -> [f64; 7] {
    let floors = [1.0, 1e3, 0.0, 0.0, b[3], 0.0, b[5]];
    std::array::from_fn(|i| (a[i] - b[i]).abs() / b[i].abs().max(floors[i]))
}
