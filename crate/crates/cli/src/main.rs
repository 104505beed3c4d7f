//! `kicktop`: batch runner for kicked-top disturbance experiments.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use kicktop::experiments::{
    run_classical, run_contour, run_kappa_sweep, run_kappa_zero_scan, run_odd_n, ExperimentConfig,
    ExperimentKind,
};
use kicktop::verify::IdentitySuite;
use log::info;

use crate::config::{ConfigFile, Overrides};
use crate::output::{Manifest, OutputDir};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] kicktop::Error),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("csv error on {path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{0} verification check(s) failed")]
    Verification(usize),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(kicktop::Error::NumericalIntegrity(_))
            | CliError::Core(kicktop::Error::InvalidDistribution(_)) => 2,
            CliError::Verification(_) => 3,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "kicktop",
    version,
    about = "Kicked-top measurement disturbance experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Time-averaged Delta, H and C over a kappa0 grid for even n.
    SweepKappa(RunArgs),
    /// Unaveraged Delta and C over a (t_alpha, kappa0) grid.
    Contour(RunArgs),
    /// Delta_n and H_n against t_alpha at kappa0 = 0.
    KappaZero(RunArgs),
    /// Same as sweep-kappa with odd n.
    OddN(RunArgs),
    /// Classical map: cycle stability, boundaries, pole divergence, orbits.
    Classical(RunArgs),
    /// Run the operator identity suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// TOML config with per-experiment sections.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Initial coherent state, e.g. `z`, `y`, `-z`.
    #[arg(long, allow_hyphen_values = true)]
    state: Option<String>,
    #[arg(long)]
    j: Option<f64>,
    /// Averaging window.
    #[arg(long = "T")]
    window: Option<usize>,
    /// Comma-separated list of time gaps.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[arg(long)]
    kappa_min: Option<f64>,
    #[arg(long)]
    kappa_max: Option<f64>,
    #[arg(long)]
    kappa_step: Option<f64>,
    #[arg(long)]
    t_alpha_max: Option<usize>,
    #[arg(long)]
    threads: Option<usize>,
}

impl RunArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            j: self.j,
            state: self.state.clone(),
            kappa_min: self.kappa_min,
            kappa_max: self.kappa_max,
            kappa_step: self.kappa_step,
            n: self.n.clone(),
            window: self.window,
            t_alpha_max: self.t_alpha_max,
            threads: self.threads,
            ..Default::default()
        }
    }

    fn resolve(&self, kind: ExperimentKind) -> Result<ExperimentConfig, CliError> {
        let file = match &self.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let base = file.section(kind).cloned().unwrap_or_default();
        base.merged(&self.overrides())
            .apply(ExperimentConfig::defaults(kind))
    }
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Comma-separated spins to check.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 5.0, 15.0])]
    spins: Vec<f64>,
    /// Flip the torsion sign (fault injection).
    #[arg(long, hide = true)]
    corrupt_torsion: bool,
}

fn run_experiment(kind: ExperimentKind, args: &RunArgs) -> Result<(), CliError> {
    let config = args.resolve(kind)?;
    let out = OutputDir::create(&args.out)?;
    let start = Instant::now();
    info!("running {} with {:?}", kind.name(), config);

    let tag = config.state.to_string().replace('-', "m");
    let files = match kind {
        ExperimentKind::SweepKappa => {
            let rows = run_kappa_sweep(&config)?;
            vec![out.write_rows(
                &format!("sweep_kappa_{tag}.csv"),
                output::SWEEP_HEADER,
                &rows,
            )?]
        }
        ExperimentKind::OddN => {
            let rows = run_odd_n(&config)?;
            vec![out.write_rows(&format!("odd_n_{tag}.csv"), output::SWEEP_HEADER, &rows)?]
        }
        ExperimentKind::Contour => {
            let rows = run_contour(&config)?;
            vec![out.write_rows(&format!("contour_{tag}.csv"), output::CONTOUR_HEADER, &rows)?]
        }
        ExperimentKind::KappaZero => {
            let rows = run_kappa_zero_scan(&config)?;
            vec![out.write_rows(
                &format!("kappa_zero_{tag}.csv"),
                output::CONTOUR_HEADER,
                &rows,
            )?]
        }
        ExperimentKind::Classical => {
            let report = run_classical(&config)?;
            let boundaries: Vec<_> = report
                .boundaries
                .iter()
                .enumerate()
                .map(|(index, &kappa0)| output::BoundaryRow { index, kappa0 })
                .collect();
            vec![
                out.write_rows(
                    "classical_indicator.csv",
                    output::INDICATOR_HEADER,
                    &report.indicator,
                )?,
                out.write_rows(
                    "classical_boundaries.csv",
                    output::BOUNDARY_HEADER,
                    &boundaries,
                )?,
                out.write_rows("classical_orbits.csv", output::ORBIT_HEADER, &report.orbits)?,
            ]
        }
    };

    let manifest = Manifest {
        command: kind.name(),
        config: &config,
        elapsed: start.elapsed(),
        files: &files,
    };
    let path = out.write_manifest(
        &format!("{}_manifest.txt", kind.name().replace('-', "_")),
        &manifest,
    )?;
    for (name, rows) in &files {
        println!("wrote {} ({rows} rows)", out.path(name).display());
    }
    println!("wrote {}", path.display());
    Ok(())
}

fn run_verify(args: &VerifyArgs) -> Result<(), CliError> {
    if args.spins.is_empty() {
        return Err(CliError::Config("no spins given".into()));
    }
    let mut suite = IdentitySuite::new(args.spins.clone());
    if args.corrupt_torsion {
        suite = suite.with_corrupted_torsion();
    }
    let report = suite.run().map_err(|e| match e {
        kicktop::Error::InvalidSpin(_) => CliError::Config(e.to_string()),
        other => CliError::Core(other),
    })?;
    for check in &report.checks {
        println!("{check}");
    }
    let failed = report.failures().count();
    println!(
        "{} checks, {failed} failed, max identity residual {:.3e}",
        report.checks.len(),
        report.max_identity_residual()
    );
    if failed > 0 {
        return Err(CliError::Verification(failed));
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match &cli.command {
        Command::SweepKappa(args) => run_experiment(ExperimentKind::SweepKappa, args),
        Command::Contour(args) => run_experiment(ExperimentKind::Contour, args),
        Command::KappaZero(args) => run_experiment(ExperimentKind::KappaZero, args),
        Command::OddN(args) => run_experiment(ExperimentKind::OddN, args),
        Command::Classical(args) => run_experiment(ExperimentKind::Classical, args),
        Command::Verify(args) => run_verify(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
