//! Coupling errors at the interface, L1 distances between resolutions and
//! experimental orders of convergence.

use std::fmt;

use crate::eos::GasEos;
use crate::error::{Error, Result};
use crate::fvm::CoupledField;
use crate::output::FieldSnapshot;

/// `(E_C1, E_C2)`: velocity and normal-stress mismatch between fluid cell 0
/// and solid cell -1.
pub fn coupling_errors(field: &CoupledField, eos1: &GasEos, eos2: &GasEos) -> (f64, f64) {
    let u = field.fluid_trace();
    let s = field.solid_trace();
    let v = (u.q1 + u.q2) / (u.m1 + u.m2);
    // alpha_k p_k = c_k^2 m_k - alpha_k pi_k
    let p = eos1.c2() * u.m1 - u.alpha1 * eos1.pi + eos2.c2() * u.m2 - (1.0 - u.alpha1) * eos2.pi;
    ((v - s.w).abs(), (p + s.sigma).abs())
}

/// [`coupling_errors`] evaluated on written records.
pub fn snapshot_coupling_errors(s: &FieldSnapshot) -> Option<(f64, f64)> {
    let (solid, fluid) = (s.solid.last()?, s.fluid.first()?);
    Some(((fluid.v - solid.w).abs(), (fluid.p + solid.sigma).abs()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    /// Solid dilatation velocity.
    W,
    /// Solid stress.
    Sigma,
    /// Mixture density `m1 + m2`.
    Rho,
    /// Mixture momentum `q1 + q2`.
    RhoV,
}

impl Quantity {
    fn values(self, s: &FieldSnapshot) -> Vec<f64> {
        match self {
            Quantity::W => s.solid.iter().map(|r| r.w).collect(),
            Quantity::Sigma => s.solid.iter().map(|r| r.sigma).collect(),
            Quantity::Rho => s.fluid.iter().map(|r| r.rho).collect(),
            Quantity::RhoV => s.fluid.iter().map(|r| r.rho * r.v).collect(),
        }
    }
}

/// Averages groups of `ratio` consecutive cells.
pub fn restrict(fine: &[f64], ratio: usize) -> Vec<f64> {
    fine.chunks_exact(ratio).map(|c| c.iter().sum::<f64>() / ratio as f64).collect()
}

/// `dx_coarse * sum_j |coarse_j - restricted_j|` over the subdomain of `q`.
pub fn l1_error(coarse: &FieldSnapshot, reference: &FieldSnapshot, q: Quantity) -> Result<f64> {
    let c = q.values(coarse);
    let r = q.values(reference);
    if c.is_empty() || !r.len().is_multiple_of(c.len()) {
        return Err(Error::ResolutionMismatch(format!(
            "reference with {} cells is not an integer refinement of {} cells",
            r.len(),
            c.len()
        )));
    }
    let restricted = restrict(&r, r.len() / c.len());
    Ok(coarse.dx * c.iter().zip(&restricted).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// `log2(e_coarse / e_fine)`.
pub fn eoc(e_coarse: f64, e_fine: f64) -> Result<f64> {
    if !(e_coarse > 0.0 && e_fine > 0.0) {
        return Err(Error::Domain(format!("orders need positive errors, got {e_coarse} and {e_fine}")));
    }
    Ok((e_coarse / e_fine).log2())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    /// Cells per subdomain.
    pub n: usize,
    pub ec1: f64,
    pub ec2: f64,
    pub ew: f64,
    pub esigma: f64,
    pub erho: f64,
    pub erhov: f64,
}

impl ConvergenceRow {
    fn errors(&self) -> [f64; 6] {
        [self.ec1, self.ec2, self.ew, self.esigma, self.erho, self.erhov]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    rows: Vec<ConvergenceRow>,
}

pub const CONVERGENCE_HEADER: [&str; 13] = [
    "N",
    "EC1",
    "EC1_eoc",
    "EC2",
    "EC2_eoc",
    "Ew",
    "Ew_eoc",
    "Esigma",
    "Esigma_eoc",
    "Erho",
    "Erho_eoc",
    "Erhov",
    "Erhov_eoc",
];

impl ConvergenceReport {
    /// Rows are sorted by resolution.
    pub fn new(mut rows: Vec<ConvergenceRow>) -> Self {
        rows.sort_by_key(|r| r.n);
        Self { rows }
    }

    pub fn rows(&self) -> &[ConvergenceRow] {
        &self.rows
    }

    /// Orders between row `i - 1` and row `i`, in error-column order
    /// `(EC1, EC2, Ew, Esigma, Erho, Erhov)`; `NaN` where undefined.
    pub fn eocs(&self, i: usize) -> [f64; 6] {
        if i == 0 || i >= self.rows.len() {
            return [f64::NAN; 6];
        }
        let (a, b) = (self.rows[i - 1].errors(), self.rows[i].errors());
        std::array::from_fn(|k| eoc(a[k], b[k]).unwrap_or(f64::NAN))
    }

    /// Numeric table in the column order of [`CONVERGENCE_HEADER`]; the
    /// orders of the first row are `NaN`.
    pub fn table(&self) -> Vec<[f64; 13]> {
        (0..self.rows.len())
            .map(|i| {
                let e = self.rows[i].errors();
                let o = self.eocs(i);
                let mut row = [self.rows[i].n as f64; 13];
                for k in 0..6 {
                    row[1 + 2 * k] = e[k];
                    row[2 + 2 * k] = o[k];
                }
                row
            })
            .collect()
    }

    /// CSV text; undefined orders are left empty.
    pub fn to_csv(&self) -> String {
        let mut out = CONVERGENCE_HEADER.join(",");
        out.push('\n');
        for (i, row) in self.table().into_iter().enumerate() {
            let cells: Vec<String> = row
                .iter()
                .enumerate()
                .map(|(k, v)| match k {
                    0 => self.rows[i].n.to_string(),
                    _ if v.is_nan() => String::new(),
                    _ => format!("{v:e}"),
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for ConvergenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:>6} {:>10} {:>6} {:>10} {:>6} {:>10} {:>6} {:>10} {:>6} {:>10} {:>6} {:>10} {:>6}",
            "N", "E_C1", "EoC", "E_C2", "EoC", "E_w", "EoC", "E_sigma", "EoC", "E_rho", "EoC", "E_rhov", "EoC"
        )?;
        for (i, r) in self.rows.iter().enumerate() {
            let o = self.eocs(i);
            write!(f, "{:>6}", r.n)?;
            for (e, o) in r.errors().iter().zip(o) {
                if o.is_nan() {
                    write!(f, " {e:>10.3e} {:>6}", "")?;
                } else {
                    write!(f, " {e:>10.3e} {o:>6.3}")?;
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
