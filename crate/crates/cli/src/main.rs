//! Command-line front end: single runs, grid studies, single interface solves
//! and the built-in property suite.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{CommandFactory, Parser, Subcommand};
use log::info;

use fsi_relax::checks;
use fsi_relax::config::{RiemannConfig, SimulationConfig};
use fsi_relax::experiments;
use fsi_relax::metrics::snapshot_coupling_errors;
use fsi_relax::output::{write_snapshot_csv, write_table_csv};
use fsi_relax::Error;

#[derive(Parser, Debug)]
#[command(name = "fsi1d", version, about = "1D elastic solid / two-phase fluid coupling solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Directory for CSV output (overrides `output.dir`).
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// Courant number (overrides `time.cfl`).
    #[arg(long, global = true)]
    cfl: Option<f64>,
    /// Cells per subdomain; a comma-separated ladder for `converge`.
    #[arg(long, global = true, value_delimiter = ',')]
    cells: Option<Vec<usize>>,
    /// Gauss-Legendre points for the path integrals.
    #[arg(long, global = true)]
    quadrature_order: Option<usize>,
    /// Freeze the fluid relaxation speed at its initial value.
    #[arg(long, global = true)]
    fixed_lambda: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one simulation and write a snapshot per output time.
    Run { config: PathBuf },
    /// Run the grid ladder and a reference, then write the convergence table.
    Converge { config: PathBuf },
    /// Solve the interface problem for one set of trace states.
    Riemann { traces: PathBuf },
    /// Run the built-in property suite.
    Check,
}

impl Cli {
    fn load(&self, path: &Path, ladder: bool) -> Result<SimulationConfig, Error> {
        let mut cfg = SimulationConfig::load(path)?;
        if let Some(dir) = &self.output_dir {
            cfg.output.dir = dir.clone();
        }
        if let Some(cfl) = self.cfl {
            cfg.time.cfl = cfl;
        }
        if let Some(q) = self.quadrature_order {
            cfg.numerics.quadrature_order = q;
        }
        if self.fixed_lambda {
            cfg.time.fixed_lambda = true;
        }
        match (&self.cells, ladder) {
            (Some(c), true) => cfg.study.cells = c.clone(),
            (Some(c), false) if c.len() == 1 => cfg = cfg.with_cells(c[0]),
            (Some(c), false) => return Err(Error::Config(format!("--cells takes a single value here, got {c:?}"))),
            (None, _) => {}
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cli: &Cli, path: &Path) -> Result<(), Error> {
    let cfg = cli.load(path, false)?;
    let start = Instant::now();
    let snapshots = experiments::run(&cfg)?;
    let dir = &cfg.output.dir;
    let mut summary = Vec::new();
    println!("{:>10} {:>14} {:>12} {:>12}", "t (us)", "time (s)", "E_C1", "E_C2");
    for s in &snapshots {
        let (solid, fluid) = write_snapshot_csv(s, dir)?;
        info!("wrote {} and {}", solid.display(), fluid.display());
        let (ec1, ec2) = snapshot_coupling_errors(s).unwrap_or((f64::NAN, f64::NAN));
        println!("{:>10} {:>14.6e} {ec1:>12.4e} {ec2:>12.4e}", s.time_label().trim_start_matches('t'), s.time);
        summary.push([s.target_time, s.time, ec1, ec2]);
    }
    if !summary.is_empty() {
        write_table_csv(&dir.join("summary.csv"), ["t", "time", "EC1", "EC2"], &summary)?;
    }
    println!("{} snapshots in {} ({:.1} s)", snapshots.len(), dir.display(), start.elapsed().as_secs_f64());
    Ok(())
}

fn converge(cli: &Cli, path: &Path) -> Result<(), Error> {
    let cfg = cli.load(path, true)?;
    let start = Instant::now();
    let outcome = experiments::converge(&cfg)?;
    let dir = &cfg.output.dir;
    fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.clone(), source })?;
    let csv = dir.join("convergence.csv");
    fs::write(&csv, outcome.report.to_csv()).map_err(|source| Error::Io { path: csv.clone(), source })?;
    for s in outcome.snapshots.iter().chain(std::iter::once(&outcome.reference)) {
        write_snapshot_csv(s, &dir.join(format!("N{}", s.fluid.len())))?;
    }
    print!("{}", outcome.report);
    println!("wrote {} ({:.1} s)", csv.display(), start.elapsed().as_secs_f64());
    Ok(())
}

fn riemann(cli: &Cli, path: &Path) -> Result<(), Error> {
    let cfg = RiemannConfig::load(path)?;
    let outcome = experiments::riemann(&cfg)?;
    let csv = outcome.to_csv();
    print!("{csv}");
    if let Some(dir) = &cli.output_dir {
        fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.clone(), source })?;
        let file = dir.join("riemann.csv");
        fs::write(&file, csv).map_err(|source| Error::Io { path: file, source })?;
    }
    Ok(())
}

fn check() -> bool {
    let start = Instant::now();
    let mut ok = true;
    for (name, check) in checks::CHECKS {
        let t = Instant::now();
        let outcome =
            check().unwrap_or_else(|e| checks::CheckOutcome { name, passed: false, detail: format!("error: {e}") });
        let tag = if outcome.passed { "PASS" } else { "FAIL" };
        println!("{tag} {name}: {} [{:.2} s]", outcome.detail, t.elapsed().as_secs_f64());
        ok &= outcome.passed;
    }
    println!("property suite finished in {:.1} s", start.elapsed().as_secs_f64());
    ok
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { config } => run(&cli, config),
        Command::Converge { config } => converge(&cli, config),
        Command::Riemann { traces } => riemann(&cli, traces),
        Command::Check => {
            return if check() { ExitCode::SUCCESS } else { ExitCode::FAILURE };
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, Error::Config(_) | Error::Io { .. }) {
                let mut cmd = Cli::command();
                let sub = match &cli.command {
                    Command::Run { .. } => "run",
                    Command::Converge { .. } => "converge",
                    Command::Riemann { .. } => "riemann",
                    Command::Check => "check",
                };
                if let Some(sc) = cmd.find_subcommand_mut(sub) {
                    eprintln!("{}", sc.render_usage());
                }
            }
            ExitCode::FAILURE
        }
    }
}
