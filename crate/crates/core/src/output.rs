//! Per-cell snapshots and their CSV files.
//!
//! Numbers are written with Rust's shortest round-trip scientific notation,
//! so reading a file back reproduces every value bit for bit.

use std::fs::File;
use std::path::{Path, PathBuf};

use crate::eos::GasEos;
use crate::error::{Error, Result};
use crate::fvm::CoupledField;

pub const SOLID_HEADER: [&str; 3] = ["x", "w", "sigma"];
pub const FLUID_HEADER: [&str; 11] = ["x", "alpha1", "rho1", "v1", "p1", "rho2", "v2", "p2", "rho", "v", "p"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolidRecord {
    pub x: f64,
    pub w: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluidRecord {
    pub x: f64,
    pub alpha1: f64,
    pub rho1: f64,
    pub v1: f64,
    pub p1: f64,
    pub rho2: f64,
    pub v2: f64,
    pub p2: f64,
    /// Mixture density, velocity and pressure.
    pub rho: f64,
    pub v: f64,
    pub p: f64,
}

impl FluidRecord {
    fn to_row(self) -> [f64; 11] {
        [self.x, self.alpha1, self.rho1, self.v1, self.p1, self.rho2, self.v2, self.p2, self.rho, self.v, self.p]
    }

    fn from_row(r: [f64; 11]) -> Self {
        Self {
            x: r[0],
            alpha1: r[1],
            rho1: r[2],
            v1: r[3],
            p1: r[4],
            rho2: r[5],
            v2: r[6],
            p2: r[7],
            rho: r[8],
            v: r[9],
            p: r[10],
        }
    }
}

/// Cell records at one output time.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSnapshot {
    /// Requested output time (s); names the files.
    pub target_time: f64,
    /// Time of the completed step the data belongs to (s).
    pub time: f64,
    pub dx: f64,
    pub solid: Vec<SolidRecord>,
    pub fluid: Vec<FluidRecord>,
}

impl FieldSnapshot {
    pub fn from_field(field: &CoupledField, target_time: f64, eos1: &GasEos, eos2: &GasEos) -> Self {
        let g = field.grid;
        let solid = field
            .solid
            .iter()
            .enumerate()
            .map(|(i, s)| SolidRecord { x: g.solid_center(i), w: s.w, sigma: s.sigma })
            .collect();
        let fluid = field
            .fluid
            .iter()
            .enumerate()
            .map(|(j, u)| {
                let alpha2 = 1.0 - u.alpha1;
                let rho1 = u.m1 / u.alpha1;
                let rho2 = u.m2 / alpha2;
                let p1 = eos1.c2() * rho1 - eos1.pi;
                let p2 = eos2.c2() * rho2 - eos2.pi;
                let rho = u.m1 + u.m2;
                FluidRecord {
                    x: g.fluid_center(j),
                    alpha1: u.alpha1,
                    rho1,
                    v1: u.q1 / u.m1,
                    p1,
                    rho2,
                    v2: u.q2 / u.m2,
                    p2,
                    rho,
                    v: (u.q1 + u.q2) / rho,
                    p: u.alpha1 * p1 + alpha2 * p2,
                }
            })
            .collect();
        Self { target_time, time: field.time, dx: g.dx, solid, fluid }
    }

    /// File stem suffix `t<microseconds>`, e.g. `t50` or `t12.5`.
    pub fn time_label(&self) -> String {
        time_label(self.target_time)
    }
}

pub fn time_label(t: f64) -> String {
    let us = t * 1e6;
    let rounded = us.round();
    if (us - rounded).abs() <= 1e-6 * rounded.abs().max(1.0) {
        format!("t{}", rounded as i64)
    } else {
        format!("t{us}")
    }
}

fn fmt(x: f64) -> String {
    format!("{x:e}")
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |source| Error::Csv { path: path.to_path_buf(), source }
}

fn write_rows<const N: usize>(path: &Path, header: [&str; N], rows: impl Iterator<Item = [f64; N]>) -> Result<()> {
    let file = File::create(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(header).map_err(csv_err(path))?;
    for row in rows {
        w.write_record(row.map(fmt)).map_err(csv_err(path))?;
    }
    w.flush().map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

fn read_rows<const N: usize>(path: &Path, header: [&str; N]) -> Result<Vec<[f64; N]>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let found: Vec<String> = r.headers().map_err(csv_err(path))?.iter().map(str::to_owned).collect();
    if found != header {
        return Err(Error::Config(format!("{}: unexpected header {found:?}", path.display())));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err(path))?;
        let mut row = [0.0; N];
        for (k, field) in rec.iter().enumerate().take(N) {
            row[k] =
                field.parse().map_err(|e| Error::Config(format!("{}: bad number {field:?}: {e}", path.display())))?;
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Writes `solid_t<us>.csv` and `fluid_t<us>.csv` into `dir`; returns both paths.
pub fn write_snapshot_csv(s: &FieldSnapshot, dir: &Path) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.to_path_buf(), source })?;
    let label = s.time_label();
    let solid = dir.join(format!("solid_{label}.csv"));
    let fluid = dir.join(format!("fluid_{label}.csv"));
    write_rows(&solid, SOLID_HEADER, s.solid.iter().map(|r| [r.x, r.w, r.sigma]))?;
    write_rows(&fluid, FLUID_HEADER, s.fluid.iter().map(|r| r.to_row()))?;
    Ok((solid, fluid))
}

pub fn read_solid_csv(path: &Path) -> Result<Vec<SolidRecord>> {
    Ok(read_rows(path, SOLID_HEADER)?.into_iter().map(|r| SolidRecord { x: r[0], w: r[1], sigma: r[2] }).collect())
}

pub fn read_fluid_csv(path: &Path) -> Result<Vec<FluidRecord>> {
    Ok(read_rows(path, FLUID_HEADER)?.into_iter().map(FluidRecord::from_row).collect())
}

/// Writes any table of numbers with the given header.
pub fn write_table_csv<const N: usize>(path: &Path, header: [&str; N], rows: &[[f64; N]]) -> Result<()> {
    write_rows(path, header, rows.iter().copied())
}
