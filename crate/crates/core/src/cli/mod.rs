//! `pathspin` command-line front end.
//!
//! Configuration is layered: built-in defaults, then an optional `--config`
//! JSON file, then individual flags. Exit codes: 0 success, 1 I/O failure,
//! 2 configuration error, 3 internal invariant breach.

pub mod commands;
pub mod config;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use config::{parse_angle, resolve_amplitudes, wrap_phase, OutputFormat, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("internal invariant breached: {0}")]
    Invariant(Error),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn config(field: &str, message: String) -> Self {
        CliError::Config {
            field: field.to_string(),
            message,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config { .. } => 2,
            CliError::Invariant(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_invariant_breach() {
            return CliError::Invariant(e);
        }
        let field = match &e {
            Error::Preparation(_) | Error::NotNormalized { .. } => "preparation",
            Error::NonUnitDirection { .. } | Error::NotDichotomic { .. } => "settings",
            Error::InvalidModel(_) => "lhv_weights",
            Error::Detector(_) | Error::NoDetections => "detector",
            Error::InvalidParameter { field, .. } => field,
            Error::NonFinite(what) => what,
            _ => "config",
        };
        CliError::config(field, e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "pathspin",
    version,
    about = "Single-particle path-spin CHSH experiment: exact values, optimization, Monte Carlo"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SourceKind {
    /// Quantum predictions for the prepared state.
    Qm,
    /// Noncontextual hidden-variable model (`--lhv-weights`, uniform by default).
    Lhv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepKind {
    /// BS1 transmission amplitude, with b = sqrt(1 − a²).
    A,
    /// Path setting θ₁.
    Theta1,
    /// Misalignment std. dev.; reports the violation fraction.
    Epsilon,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact correlations and S for the configured state and settings.
    Chsh,
    /// Search settings maximizing |S| for the configured state.
    Optimize,
    /// Tabulate S (or the violation fraction) over a parameter range.
    Sweep {
        #[arg(long, value_enum)]
        sweep: SweepKind,
        #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
        to: f64,
        #[arg(long)]
        steps: usize,
        /// Optimize settings at each point (sweep over `a` only).
        #[arg(long)]
        optimize: bool,
        #[arg(long, value_enum, default_value = "qm")]
        source: SourceKind,
    },
    /// Shot-level Monte Carlo of the four setting pairs.
    Simulate {
        #[arg(long, value_enum, default_value = "qm")]
        source: SourceKind,
    },
    /// Noncontextual model: exact S, plus a shot-level estimate when a seed
    /// is given.
    Lhv,
    /// Fraction of misaligned runs that violate the bound significantly.
    Imprecision {
        #[arg(long, value_enum, default_value = "qm")]
        source: SourceKind,
    },
    /// Free-flight spreading of a Gaussian wave packet.
    Wavepacket {
        /// Initial width, m.
        #[arg(long)]
        sigma0: Option<f64>,
        /// Mean velocity, m/s.
        #[arg(long)]
        velocity: Option<f64>,
        /// Flight distance, m.
        #[arg(long)]
        distance: Option<f64>,
        /// Particle mass, kg.
        #[arg(long)]
        mass: Option<f64>,
    },
}

/// Flags shared by every subcommand. Angles are radians unless suffixed
/// with `deg`.
#[derive(Debug, Default, Args)]
pub struct CommonArgs {
    /// JSON file with a run configuration (or a previous JSON report).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub prep_a: Option<f64>,
    #[arg(long, global = true)]
    pub prep_b: Option<f64>,
    #[arg(long, global = true, value_parser = parse_angle, allow_hyphen_values = true)]
    pub prep_delta: Option<f64>,
    #[arg(long, global = true, value_parser = parse_angle, allow_hyphen_values = true)]
    pub theta1: Option<f64>,
    #[arg(long, global = true, value_parser = parse_angle, allow_hyphen_values = true)]
    pub theta2: Option<f64>,
    #[arg(long, global = true, value_parser = parse_angle, allow_hyphen_values = true)]
    pub phi1: Option<f64>,
    #[arg(long, global = true, value_parser = parse_angle, allow_hyphen_values = true)]
    pub phi2: Option<f64>,
    /// Polar angle of spin setting B₁ (from +z).
    #[arg(long, global = true, value_parser = parse_angle, allow_hyphen_values = true)]
    pub b1: Option<f64>,
    /// Polar angle of spin setting B₂ (from +z).
    #[arg(long, global = true, value_parser = parse_angle, allow_hyphen_values = true)]
    pub b2: Option<f64>,
    #[arg(long, global = true, value_parser = parse_angle, allow_hyphen_values = true)]
    pub b1_azimuth: Option<f64>,
    #[arg(long, global = true, value_parser = parse_angle, allow_hyphen_values = true)]
    pub b2_azimuth: Option<f64>,
    #[arg(long, global = true)]
    pub shots: Option<u64>,
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    #[arg(long, global = true, value_parser = parse_angle)]
    pub epsilon: Option<f64>,
    #[arg(long, global = true)]
    pub sigma_threshold: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub efficiency: Option<f64>,
    #[arg(long, global = true)]
    pub absorption: Option<f64>,
    /// 16 comma-separated weights in canonical assignment order.
    #[arg(long, global = true)]
    pub lhv_weights: Option<String>,
    #[arg(long, global = true)]
    pub grid_resolution: Option<usize>,
    #[arg(long, global = true)]
    pub refine_iterations: Option<usize>,
    /// Let the optimizer search spin axes off the x–z plane.
    #[arg(long, global = true)]
    pub full_sphere: bool,
    #[arg(long, global = true, value_enum)]
    pub output: Option<OutputFormat>,
    #[arg(long, global = true)]
    pub out_file: Option<PathBuf>,
    /// Worker threads (results do not depend on this).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

impl CommonArgs {
    /// Defaults, then the config file, then flags.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };

        let (a, b) = resolve_amplitudes(cfg.preparation, self.prep_a, self.prep_b)?;
        cfg.preparation.a = a;
        cfg.preparation.b = b;
        if let Some(delta) = self.prep_delta {
            cfg.preparation.delta = wrap_phase(delta);
        }
        cfg.preparation
            .validate()
            .map_err(|e| CliError::config("prep_a/prep_b/prep_delta", e.to_string()))?;

        let s = &mut cfg.settings;
        for (target, value) in [
            (&mut s.theta1, self.theta1),
            (&mut s.theta2, self.theta2),
            (&mut s.phi1, self.phi1),
            (&mut s.phi2, self.phi2),
            (&mut s.b1_polar, self.b1),
            (&mut s.b2_polar, self.b2),
            (&mut s.b1_azimuth, self.b1_azimuth),
            (&mut s.b2_azimuth, self.b2_azimuth),
        ] {
            if let Some(v) = value {
                *target = v;
            }
        }
        cfg.settings
            .to_settings()
            .map_err(|e| CliError::config("settings", e.to_string()))?;

        if let Some(shots) = self.shots {
            cfg.shots = shots;
        }
        if let Some(trials) = self.trials {
            cfg.trials = trials;
        }
        if let Some(epsilon) = self.epsilon {
            cfg.epsilon = epsilon;
        }
        if let Some(k) = self.sigma_threshold {
            cfg.sigma_threshold = k;
        }
        if self.seed.is_some() {
            cfg.seed = self.seed;
        }
        if let Some(e) = self.efficiency {
            cfg.detector.efficiency = e;
        }
        if let Some(a) = self.absorption {
            cfg.detector.absorption = a;
        }
        cfg.detector
            .validate()
            .map_err(|e| CliError::config("efficiency/absorption", e.to_string()))?;
        if let Some(text) = &self.lhv_weights {
            let weights = text
                .split(',')
                .map(|w| w.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| CliError::config("lhv_weights", e.to_string()))?;
            cfg.lhv_weights = Some(
                weights
                    .try_into()
                    .map_err(|e: Error| CliError::config("lhv_weights", e.to_string()))?,
            );
        }
        if let Some(r) = self.grid_resolution {
            cfg.optimizer.grid_resolution = r;
        }
        if let Some(n) = self.refine_iterations {
            cfg.optimizer.refine_iterations = n;
        }
        if self.full_sphere {
            cfg.optimizer.spin_search = crate::chsh::SpinSearch::FullSphere;
        }
        if let Some(format) = self.output {
            cfg.output = format;
        }

        if cfg.shots == 0 {
            return Err(CliError::config("shots", "must be at least 1".into()));
        }
        if cfg.trials == 0 {
            return Err(CliError::config("trials", "must be at least 1".into()));
        }
        if !(cfg.epsilon.is_finite() && cfg.epsilon >= 0.0) {
            return Err(CliError::config("epsilon", "must be non-negative".into()));
        }
        if !(cfg.sigma_threshold.is_finite() && cfg.sigma_threshold >= 0.0) {
            return Err(CliError::config("sigma_threshold", "must be non-negative".into()));
        }
        cfg.optimizer.validate()?;
        Ok(cfg)
    }
}

/// Resolves configuration and runs the subcommand, returning the rendered
/// report.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    let mut cfg = cli.common.resolve()?;
    if let Command::Wavepacket {
        sigma0,
        velocity,
        distance,
        mass,
    } = &cli.command
    {
        let w = &mut cfg.wavepacket;
        for (target, value) in [
            (&mut w.sigma0, sigma0),
            (&mut w.velocity, velocity),
            (&mut w.distance, distance),
            (&mut w.mass, mass),
        ] {
            if let Some(v) = value {
                *target = *v;
            }
        }
    }

    let run = || -> Result<report::Report, CliError> {
        match &cli.command {
            Command::Chsh => commands::cmd_chsh(&cfg),
            Command::Optimize => commands::cmd_optimize(&cfg),
            Command::Sweep {
                sweep,
                from,
                to,
                steps,
                optimize,
                source,
            } => commands::cmd_sweep(
                &cfg,
                &commands::SweepSpec {
                    kind: *sweep,
                    from: *from,
                    to: *to,
                    steps: *steps,
                    optimize: *optimize,
                    source: *source,
                },
            ),
            Command::Simulate { source } => commands::cmd_simulate(&cfg, *source),
            Command::Lhv => commands::cmd_lhv(&cfg),
            Command::Imprecision { source } => commands::cmd_imprecision(&cfg, *source),
            Command::Wavepacket { .. } => commands::cmd_wavepacket(&cfg),
        }
    };

    let report = match cli.common.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::config("threads", e.to_string()))?
            .install(run)?,
        None => run()?,
    };
    Ok(report.render(cfg.output))
}

/// Process entry point; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let output = match execute(&cli) {
        Ok(output) => output,
        Err(e) => {
            eprintln!("pathspin: {e}");
            return e.exit_code();
        }
    };
    let written = match &cli.common.out_file {
        Some(path) => std::fs::write(path, &output)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(output.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    };
    match written {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("pathspin: {e}");
            e.exit_code()
        }
    }
}
