//! State vectors of both subsystems, their fluxes, and the interfacial closure.
//!
//! The fluid is stored in conserved form `(alpha1, a1 rho1, a1 rho1 v1, a2 rho2,
//! a2 rho2 v2)`; `alpha2` is always reconstructed as `1 - alpha1`.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::eos::{ElasticMaterial, GasEos};
use crate::error::{Error, Result};

/// Smallest admissible distance of `alpha1` from 0 and 1.
pub const ALPHA_MARGIN: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ElasticState {
    /// Deformation velocity (m/s).
    pub w: f64,
    /// Shear stress (Pa).
    pub sigma: f64,
}

impl ElasticState {
    pub fn new(w: f64, sigma: f64) -> Self {
        Self { w, sigma }
    }

    #[inline]
    pub fn to_array(self) -> [f64; 2] {
        [self.w, self.sigma]
    }

    #[inline]
    pub fn from_array(a: [f64; 2]) -> Self {
        Self { w: a[0], sigma: a[1] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FluidConserved {
    pub alpha1: f64,
    /// alpha1 rho1
    pub m1: f64,
    /// alpha1 rho1 v1
    pub q1: f64,
    /// alpha2 rho2
    pub m2: f64,
    /// alpha2 rho2 v2
    pub q2: f64,
}

impl FluidConserved {
    #[inline]
    pub fn to_array(self) -> [f64; 5] {
        [self.alpha1, self.m1, self.q1, self.m2, self.q2]
    }

    #[inline]
    pub fn from_array(a: [f64; 5]) -> Self {
        Self { alpha1: a[0], m1: a[1], q1: a[2], m2: a[3], q2: a[4] }
    }

    #[inline]
    pub fn alpha2(&self) -> f64 {
        1.0 - self.alpha1
    }

    /// Checks admissibility: finite, `alpha1` inside the margin, positive masses.
    pub fn check(&self) -> Result<()> {
        check_array(&self.to_array()).map_err(Error::InvalidState)
    }

    pub fn to_primitive(&self) -> Result<FluidPrimitive> {
        cons_to_prim(self)
    }
}

pub(crate) fn check_array(u: &[f64; 5]) -> std::result::Result<(), String> {
    if !(u[0] + u[1] + u[2] + u[3] + u[4]).is_finite() {
        return Err(format!("non-finite component in {u:?}"));
    }
    if !(u[0] >= ALPHA_MARGIN && u[0] <= 1.0 - ALPHA_MARGIN) {
        return Err(format!("volume fraction {} outside [{ALPHA_MARGIN}, 1 - {ALPHA_MARGIN}]", u[0]));
    }
    if !(u[1] > 0.0) || !(u[3] > 0.0) {
        return Err(format!("non-positive phasic mass (m1={}, m2={})", u[1], u[3]));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FluidPrimitive {
    pub alpha1: f64,
    pub rho1: f64,
    pub v1: f64,
    pub rho2: f64,
    pub v2: f64,
}

impl FluidPrimitive {
    pub fn to_conserved(&self) -> Result<FluidConserved> {
        prim_to_cons(self)
    }

    pub fn pressures(&self, eos1: &GasEos, eos2: &GasEos) -> (f64, f64) {
        (eos1.pressure_unchecked(self.rho1), eos2.pressure_unchecked(self.rho2))
    }
}

pub fn cons_to_prim(u: &FluidConserved) -> Result<FluidPrimitive> {
    u.check()?;
    Ok(FluidPrimitive {
        alpha1: u.alpha1,
        rho1: u.m1 / u.alpha1,
        v1: u.q1 / u.m1,
        rho2: u.m2 / u.alpha2(),
        v2: u.q2 / u.m2,
    })
}

pub fn prim_to_cons(p: &FluidPrimitive) -> Result<FluidConserved> {
    let ok = [p.alpha1, p.rho1, p.v1, p.rho2, p.v2].iter().all(|x| x.is_finite())
        && p.alpha1 >= ALPHA_MARGIN
        && p.alpha1 <= 1.0 - ALPHA_MARGIN
        && p.rho1 > 0.0
        && p.rho2 > 0.0;
    if !ok {
        return Err(Error::InvalidState(format!("inadmissible primitive state {p:?}")));
    }
    let alpha2 = 1.0 - p.alpha1;
    let m1 = p.alpha1 * p.rho1;
    let m2 = alpha2 * p.rho2;
    Ok(FluidConserved { alpha1: p.alpha1, m1, q1: m1 * p.v1, m2, q2: m2 * p.v2 })
}

/// Five-component vector with flux units, laid out like [`FluidConserved`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AuxVector5(pub [f64; 5]);

/// Flux-scale auxiliary pair `(V^w, V^sigma)` of the elastic system.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AuxVector2(pub [f64; 2]);

macro_rules! vector_ops {
    ($t:ident, $n:expr) => {
        impl $t {
            pub const ZERO: Self = Self([0.0; $n]);

            pub fn max_abs(&self) -> f64 {
                self.0.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
            }
        }

        impl Index<usize> for $t {
            type Output = f64;
            fn index(&self, i: usize) -> &f64 {
                &self.0[i]
            }
        }

        impl IndexMut<usize> for $t {
            fn index_mut(&mut self, i: usize) -> &mut f64 {
                &mut self.0[i]
            }
        }

        impl Add for $t {
            type Output = Self;
            fn add(mut self, rhs: Self) -> Self {
                self += rhs;
                self
            }
        }

        impl AddAssign for $t {
            fn add_assign(&mut self, rhs: Self) {
                for (a, b) in self.0.iter_mut().zip(rhs.0) {
                    *a += b;
                }
            }
        }

        impl Sub for $t {
            type Output = Self;
            fn sub(mut self, rhs: Self) -> Self {
                self -= rhs;
                self
            }
        }

        impl SubAssign for $t {
            fn sub_assign(&mut self, rhs: Self) {
                for (a, b) in self.0.iter_mut().zip(rhs.0) {
                    *a -= b;
                }
            }
        }

        impl Mul<$t> for f64 {
            type Output = $t;
            fn mul(self, mut rhs: $t) -> $t {
                for a in rhs.0.iter_mut() {
                    *a *= self;
                }
                rhs
            }
        }

        impl Neg for $t {
            type Output = Self;
            fn neg(self) -> Self {
                -1.0 * self
            }
        }
    };
}

vector_ops!(AuxVector5, 5);
vector_ops!(AuxVector2, 2);

/// Closure for the interfacial velocity and pressure.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum InterfacialParams {
    /// `v_I = v`, `p_I = p` (mixture velocity and pressure).
    #[default]
    Mixture,
    /// Mass-weighted combination with `d1 + d2 = 1`.
    Weighted { d1: f64, d2: f64 },
}

impl InterfacialParams {
    pub fn weighted(d1: f64, d2: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&d1) || !(0.0..=1.0).contains(&d2) || (d1 + d2 - 1.0).abs() > 1e-14 {
            return Err(Error::Domain(format!(
                "interfacial weights need d1, d2 in [0,1], d1 + d2 = 1 (got {d1}, {d2})"
            )));
        }
        Ok(Self::Weighted { d1, d2 })
    }
}

/// Mixture density, momentum and pressure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mixture {
    pub rho: f64,
    pub rho_v: f64,
    pub p: f64,
}

impl Mixture {
    pub fn velocity(&self) -> f64 {
        self.rho_v / self.rho
    }
}

pub fn mixture(u: &FluidConserved, eos1: &GasEos, eos2: &GasEos) -> Result<Mixture> {
    let prim = cons_to_prim(u)?;
    let (p1, p2) = prim.pressures(eos1, eos2);
    Ok(Mixture { rho: u.m1 + u.m2, rho_v: u.q1 + u.q2, p: u.alpha1 * p1 + u.alpha2() * p2 })
}

/// Mixture pressure written as the affine function
/// `c1^2 m1 + c2^2 m2 - alpha1 pi1 - alpha2 pi2` of the conserved variables.
#[inline]
pub(crate) fn mixture_pressure_affine(u: &[f64; 5], eos1: &GasEos, eos2: &GasEos) -> f64 {
    eos1.c2() * u[1] + eos2.c2() * u[3] - u[0] * eos1.pi - (1.0 - u[0]) * eos2.pi
}

/// Interfacial velocity and pressure `(v_I, p_I)`.
pub fn interfacial_states(
    u: &FluidConserved,
    params: &InterfacialParams,
    eos1: &GasEos,
    eos2: &GasEos,
) -> Result<(f64, f64)> {
    u.check()?;
    interfacial_unchecked(&u.to_array(), params, eos1, eos2)
}

#[inline]
pub(crate) fn interfacial_unchecked(
    u: &[f64; 5],
    params: &InterfacialParams,
    eos1: &GasEos,
    eos2: &GasEos,
) -> Result<(f64, f64)> {
    match *params {
        InterfacialParams::Mixture => Ok(((u[2] + u[4]) / (u[1] + u[3]), mixture_pressure_affine(u, eos1, eos2))),
        InterfacialParams::Weighted { d1, d2 } => {
            let denom = d1 * u[1] + d2 * u[3];
            if denom == 0.0 {
                return Err(Error::DegenerateWeights);
            }
            let beta1 = d1 * u[1] / denom;
            let beta2 = d2 * u[3] / denom;
            let p1 = eos1.pressure_unchecked(u[1] / u[0]);
            let p2 = eos2.pressure_unchecked(u[3] / (1.0 - u[0]));
            Ok((beta1 * u[2] / u[1] + beta2 * u[4] / u[3], beta2 * p1 + beta1 * p2))
        }
    }
}

/// Elastic flux `-(sigma / rho_s, rho_s c_s^2 w)`.
#[inline]
pub fn elastic_flux(mat: &ElasticMaterial, s: &ElasticState) -> AuxVector2 {
    AuxVector2([-s.sigma / mat.rho_s, -mat.stiffness() * s.w])
}

/// Conservative part `(0, q1, q1 v1 + alpha1 p1, q2, q2 v2 + alpha2 p2)` of the fluid flux.
pub fn fluid_flux(u: &FluidConserved, eos1: &GasEos, eos2: &GasEos) -> Result<AuxVector5> {
    u.check()?;
    Ok(AuxVector5(fluid_flux_unchecked(&u.to_array(), eos1, eos2)))
}

#[inline]
pub(crate) fn fluid_flux_unchecked(u: &[f64; 5], eos1: &GasEos, eos2: &GasEos) -> [f64; 5] {
    let alpha2 = 1.0 - u[0];
    // alpha_k p_k = c_k^2 m_k - alpha_k pi_k
    let a1p1 = eos1.c2() * u[1] - u[0] * eos1.pi;
    let a2p2 = eos2.c2() * u[3] - alpha2 * eos2.pi;
    [0.0, u[2], u[2] * u[2] / u[1] + a1p1, u[4], u[4] * u[4] / u[3] + a2p2]
}

/// Nonconservative coefficient column `g(U) = (v_I, 0, p_I, 0, -p_I)`.
pub fn noncons_coeff(
    u: &FluidConserved,
    params: &InterfacialParams,
    eos1: &GasEos,
    eos2: &GasEos,
) -> Result<AuxVector5> {
    let (vi, pi) = interfacial_states(u, params, eos1, eos2)?;
    Ok(AuxVector5([vi, 0.0, pi, 0.0, -pi]))
}
