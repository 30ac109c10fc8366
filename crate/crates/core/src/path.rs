//! Segment paths, path integrals of the nonconservative coefficient, and the
//! discretized nonlocal operator `T`.

use crate::eos::GasEos;
use crate::error::{Error, Result};
use crate::state::{
    check_array, fluid_flux_unchecked, interfacial_unchecked, mixture_pressure_affine, AuxVector5, FluidConserved,
    InterfacialParams,
};

/// Straight-line path `U- + s (U+ - U-)` in conserved variables.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SegmentPath;

impl SegmentPath {
    #[inline]
    pub fn eval(&self, s: f64, minus: &[f64; 5], plus: &[f64; 5]) -> [f64; 5] {
        if s == 0.0 {
            return *minus;
        }
        if s == 1.0 {
            return *plus;
        }
        std::array::from_fn(|i| minus[i] + s * (plus[i] - minus[i]))
    }
}

pub fn segment_eval(s: f64, minus: &FluidConserved, plus: &FluidConserved) -> Result<FluidConserved> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::Domain(format!("path parameter {s} outside [0, 1]")));
    }
    Ok(FluidConserved::from_array(SegmentPath.eval(s, &minus.to_array(), &plus.to_array())))
}

/// Gauss-Legendre rule mapped to `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Default for QuadratureRule {
    fn default() -> Self {
        Self::gauss_legendre(3).expect("3-point rule")
    }
}

impl QuadratureRule {
    /// `n`-point Gauss-Legendre on `[0, 1]`, exact up to degree `2n - 1`.
    /// Nodes come from Newton iteration on the Legendre recurrence.
    pub fn gauss_legendre(n: usize) -> Result<Self> {
        if n == 0 || n > 64 {
            return Err(Error::Domain(format!("quadrature order {n} not in 1..=64")));
        }
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n {
            // Chebyshev-type initial guess for the i-th root on [-1, 1]
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = 0.5 * (1.0 - x);
            weights[i] = 0.5 * w;
        }
        Ok(Self { nodes, weights })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&s, &w)| w * f(s)).sum()
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let dp = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, dp)
}

/// Piecewise-constant fluid field with its far-field state.
#[derive(Debug, Clone, PartialEq)]
pub struct FluidField {
    pub cells: Vec<FluidConserved>,
    pub far_field: FluidConserved,
}

impl FluidField {
    /// Far field taken from the rightmost cell.
    pub fn new(cells: Vec<FluidConserved>) -> Result<Self> {
        let far_field = *cells.last().ok_or_else(|| Error::Domain("empty fluid field".into()))?;
        Ok(Self { cells, far_field })
    }
}

/// Evaluation context bundling closures and quadrature for the fluid path integrals.
#[derive(Debug, Clone)]
pub struct NonconservativeOps {
    pub eos1: GasEos,
    pub eos2: GasEos,
    pub params: InterfacialParams,
    pub quad: QuadratureRule,
}

impl NonconservativeOps {
    pub fn new(eos1: GasEos, eos2: GasEos, params: InterfacialParams, quad: QuadratureRule) -> Self {
        Self { eos1, eos2, params, quad }
    }

    /// `Delta alpha1 * sum_i w_i g(Phi(s_i))`. Only components 0, 2, 4 can be nonzero.
    #[inline]
    pub(crate) fn path_integral_raw(&self, minus: &[f64; 5], plus: &[f64; 5]) -> Result<[f64; 5]> {
        let dalpha = plus[0] - minus[0];
        if dalpha == 0.0 {
            return Ok([0.0; 5]);
        }
        let (mut vi_int, mut pi_int) = (0.0, 0.0);
        if let InterfacialParams::Mixture = self.params {
            // only the mixture velocity and the affine mixture pressure are needed
            let (qa, ma) = (minus[2] + minus[4], minus[1] + minus[3]);
            let (dq, dm) = (plus[2] + plus[4] - qa, plus[1] + plus[3] - ma);
            for (&s, &w) in self.quad.nodes.iter().zip(&self.quad.weights) {
                vi_int += w * (qa + s * dq) / (ma + s * dm);
                pi_int += w * mixture_pressure_affine(&SegmentPath.eval(s, minus, plus), &self.eos1, &self.eos2);
            }
        } else {
            for (&s, &w) in self.quad.nodes.iter().zip(&self.quad.weights) {
                let u = SegmentPath.eval(s, minus, plus);
                let (vi, pi) = interfacial_unchecked(&u, &self.params, &self.eos1, &self.eos2)?;
                vi_int += w * vi;
                pi_int += w * pi;
            }
        }
        let p = dalpha * pi_int;
        Ok([dalpha * vi_int, 0.0, p, 0.0, -p])
    }

    pub fn path_integral(&self, minus: &FluidConserved, plus: &FluidConserved) -> Result<AuxVector5> {
        minus.check()?;
        plus.check()?;
        Ok(AuxVector5(self.path_integral_raw(&minus.to_array(), &plus.to_array())?))
    }

    /// Fills `out[j] = F(U_j) - F(U_inf) - sum_{k >= j} P(U_k, U_{k+1}; G)` for
    /// every cell in one right-to-left pass. The cell past the last one is the
    /// far field, so its path integral uses `U_inf` as the right state.
    pub(crate) fn discrete_t_into(
        &self,
        cells: &[[f64; 5]],
        far_field: &[f64; 5],
        out: &mut Vec<[f64; 5]>,
    ) -> Result<()> {
        let n = cells.len();
        out.clear();
        out.resize(n, [0.0; 5]);
        let f_inf = fluid_flux_unchecked(far_field, &self.eos1, &self.eos2);
        let mut acc = [0.0; 5];
        let mut right = far_field;
        for j in (0..n).rev() {
            let p = self.path_integral_raw(&cells[j], right)?;
            for i in 0..5 {
                acc[i] += p[i];
            }
            let f = fluid_flux_unchecked(&cells[j], &self.eos1, &self.eos2);
            out[j] = std::array::from_fn(|i| f[i] - f_inf[i] - acc[i]);
            right = &cells[j];
        }
        Ok(())
    }

    pub fn discrete_t(&self, field: &FluidField) -> Result<Vec<AuxVector5>> {
        if field.cells.is_empty() {
            return Err(Error::Domain("empty fluid field".into()));
        }
        let mut raw = Vec::with_capacity(field.cells.len());
        for (j, c) in field.cells.iter().enumerate() {
            check_array(&c.to_array()).map_err(|r| Error::InvalidState(format!("cell {j}: {r}")))?;
            raw.push(c.to_array());
        }
        field.far_field.check()?;
        let mut out = Vec::new();
        self.discrete_t_into(&raw, &field.far_field.to_array(), &mut out)?;
        Ok(out.into_iter().map(AuxVector5).collect())
    }
}

pub fn path_integral_g(
    minus: &FluidConserved,
    plus: &FluidConserved,
    params: &InterfacialParams,
    eos1: &GasEos,
    eos2: &GasEos,
    quad: &QuadratureRule,
) -> Result<AuxVector5> {
    NonconservativeOps::new(*eos1, *eos2, *params, quad.clone()).path_integral(minus, plus)
}

pub fn discrete_t(
    field: &FluidField,
    params: &InterfacialParams,
    eos1: &GasEos,
    eos2: &GasEos,
    quad: &QuadratureRule,
) -> Result<Vec<AuxVector5>> {
    NonconservativeOps::new(*eos1, *eos2, *params, quad.clone()).discrete_t(field)
}
