//! Barotropic closures for the two fluid phases and the linear-elastic solid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::FluidConserved;

/// Isothermal stiffened gas, `p(rho) = c^2 rho - pi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasEos {
    /// Isothermal sound speed (m/s).
    pub c: f64,
    /// Minimal pressure (Pa).
    pub pi: f64,
}

impl GasEos {
    pub fn new(c: f64, pi: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) || !(pi >= 0.0 && pi.is_finite()) {
            return Err(Error::InvalidState(format!("gas eos needs c > 0, pi >= 0 (c={c}, pi={pi})")));
        }
        Ok(Self { c, pi })
    }

    #[inline]
    pub fn c2(&self) -> f64 {
        self.c * self.c
    }

    pub fn pressure(&self, rho: f64) -> Result<f64> {
        if !(rho > 0.0) {
            return Err(Error::InvalidState(format!("non-positive density {rho}")));
        }
        Ok(self.pressure_unchecked(rho))
    }

    #[inline]
    pub(crate) fn pressure_unchecked(&self, rho: f64) -> f64 {
        self.c2() * rho - self.pi
    }

    pub fn density_from_pressure(&self, p: f64) -> Result<f64> {
        if !(p + self.pi > 0.0) {
            return Err(Error::InvalidState(format!("pressure {p} at or below -pi = {}", -self.pi)));
        }
        Ok((p + self.pi) / self.c2())
    }
}

/// Parameters of the linear-elastic solid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElasticMaterial {
    /// Density (kg/m^3).
    pub rho_s: f64,
    /// Dilatation wave velocity (m/s).
    pub c_s: f64,
}

impl ElasticMaterial {
    pub fn new(rho_s: f64, c_s: f64) -> Result<Self> {
        if !(rho_s > 0.0 && rho_s.is_finite()) || !(c_s > 0.0 && c_s.is_finite()) {
            return Err(Error::InvalidState(format!(
                "elastic material needs rho_s > 0, c_s > 0 (rho_s={rho_s}, c_s={c_s})"
            )));
        }
        Ok(Self { rho_s, c_s })
    }

    /// Acoustic impedance `rho_s c_s`.
    #[inline]
    pub fn impedance(&self) -> f64 {
        self.rho_s * self.c_s
    }

    /// Stress scale `rho_s c_s^2`.
    #[inline]
    pub fn stiffness(&self) -> f64 {
        self.rho_s * self.c_s * self.c_s
    }
}

/// Spectral radius of the elastic flux Jacobian. The eigenvalues are `±c_s`.
pub fn elastic_wave_bound(mat: &ElasticMaterial) -> f64 {
    mat.c_s
}

/// Upper bound `max(|v1| + c1, |v2| + c2, |v|)` for the spectral radius of the
/// Baer-Nunziato system matrix. The interfacial velocity is a convex
/// combination of the phasic velocities, so `|v|` covers it in either closure.
pub fn fluid_wave_bound(u: &FluidConserved, eos1: &GasEos, eos2: &GasEos) -> Result<f64> {
    u.check()?;
    Ok(fluid_wave_bound_unchecked(&u.to_array(), eos1, eos2))
}

#[inline]
pub(crate) fn fluid_wave_bound_unchecked(u: &[f64; 5], eos1: &GasEos, eos2: &GasEos) -> f64 {
    let v1 = u[2] / u[1];
    let v2 = u[4] / u[3];
    let v = (u[2] + u[4]) / (u[1] + u[3]);
    (v1.abs() + eos1.c).max(v2.abs() + eos2.c).max(v.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::FluidPrimitive;
    use proptest::prelude::*;

    const WATER: GasEos = GasEos { c: 1483.3, pi: 1.1358e9 };
    const VAPOR: GasEos = GasEos { c: 367.58, pi: 0.0 };

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn pressure_examples() {
        let unit = GasEos::new(1.0, 0.0).unwrap();
        assert_eq!(unit.pressure(1.0).unwrap(), 1.0);
        // 1483.3^2 * 1000 - 1.1358e9
        assert!(rel(WATER.pressure(1000.0).unwrap(), 1.06437889e9) < 1e-12);
        let rho = 3.5e3 / (367.58 * 367.58);
        assert!(rel(VAPOR.pressure(rho).unwrap(), 3.5e3) < 1e-14);
    }

    #[test]
    fn density_examples() {
        let unit = GasEos::new(1.0, 0.0).unwrap();
        assert_eq!(unit.density_from_pressure(5.0).unwrap(), 5.0);
        let rho = WATER.density_from_pressure(1.75e7).unwrap();
        assert!((rho - 524.18).abs() < 0.01, "{rho}");
        let rho = VAPOR.density_from_pressure(3.5e3).unwrap();
        assert!((rho - 2.5903e-2).abs() < 1e-6, "{rho}");
    }

    #[test]
    fn invalid_inputs_rejected() {
        assert!(WATER.pressure(0.0).is_err());
        assert!(WATER.pressure(-1.0).is_err());
        assert!(WATER.density_from_pressure(-1.1358e9).is_err());
        assert!(VAPOR.density_from_pressure(0.0).is_err());
        assert!(GasEos::new(0.0, 0.0).is_err());
        assert!(GasEos::new(1.0, -1.0).is_err());
        assert!(ElasticMaterial::new(1.0, 0.0).is_err());
    }

    #[test]
    fn elastic_bound_is_c_s() {
        for (rho_s, c_s) in [(7800.0, 5990.0), (1.0, 1.0), (2.0, 3.0)] {
            let m = ElasticMaterial::new(rho_s, c_s).unwrap();
            assert_eq!(elastic_wave_bound(&m), c_s);
        }
    }

    #[test]
    fn fluid_bound_examples() {
        let e1 = GasEos::new(1.0, 0.0).unwrap();
        let e2 = GasEos::new(2.0, 0.0).unwrap();
        let at =
            |v1: f64, v2: f64| FluidPrimitive { alpha1: 0.5, rho1: 1.0, v1, rho2: 1.0, v2 }.to_conserved().unwrap();
        assert_eq!(fluid_wave_bound(&at(0.0, 0.0), &e1, &e2).unwrap(), 2.0);
        assert_eq!(fluid_wave_bound(&at(3.0, 0.0), &e1, &e2).unwrap(), 4.0);

        let bubble = FluidPrimitive {
            alpha1: 0.9,
            rho1: VAPOR.density_from_pressure(3.5e3).unwrap(),
            v1: 0.0,
            rho2: WATER.density_from_pressure(3.5e3).unwrap(),
            v2: 0.0,
        };
        let b = fluid_wave_bound(&bubble.to_conserved().unwrap(), &VAPOR, &WATER).unwrap();
        assert_eq!(b, 1483.3);
    }

    proptest! {
        #[test]
        fn pressure_density_roundtrip(c in 1.0f64..2000.0, pi in 0.0f64..2e9, frac in 1e-6f64..1e3) {
            let eos = GasEos::new(c, pi).unwrap();
            // p + pi = frac * (1 + pi) keeps p > -pi
            let p = frac * (1.0 + pi) - pi;
            let rho = eos.density_from_pressure(p).unwrap();
            let back = eos.pressure(rho).unwrap();
            prop_assert!((back - p).abs() <= 1e-14 * (p.abs() + pi).max(1e-300) * 4.0);
            prop_assert!(rel(eos.density_from_pressure(back).unwrap(), rho) < 1e-14 * 4.0);
        }

        #[test]
        fn pressure_affine_slope(c in 1.0f64..2000.0, pi in 0.0f64..2e9, rho in 1e-3f64..2e3) {
            let eos = GasEos::new(c, pi).unwrap();
            let h = rho * 1e-3;
            let slope = (eos.pressure(rho + h).unwrap() - eos.pressure(rho - h).unwrap()) / (2.0 * h);
            // cancellation in p = c^2 rho - pi limits the achievable accuracy to eps*(c^2 rho + pi)/(c^2 h)
            let tol = 1e-12_f64.max(8.0 * f64::EPSILON * (eos.c2() * rho + pi) / (eos.c2() * h));
            prop_assert!(rel(slope, eos.c2()) < tol, "slope {} vs {}", slope, eos.c2());
            prop_assert!(eos.pressure(rho + h).unwrap() > eos.pressure(rho).unwrap());
        }

        #[test]
        fn fluid_bound_dominates_velocities(
            alpha1 in 0.01f64..0.99, rho1 in 0.01f64..1e3, rho2 in 0.01f64..1e3,
            v1 in -500.0f64..500.0, v2 in -500.0f64..500.0,
        ) {
            let u = FluidPrimitive { alpha1, rho1, v1, rho2, v2 }.to_conserved().unwrap();
            let b = fluid_wave_bound(&u, &VAPOR, &WATER).unwrap();
            let v = (u.q1 + u.q2) / (u.m1 + u.m2);
            prop_assert!(b >= v1.abs() && b >= v2.abs() && b >= v.abs());
        }
    }
}
