use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use awi_core::commands::{self, Artifact, PressureSweep};
use awi_core::config::{DriveStrength, RunConfig, ScanSpec};
use awi_core::output::{ensure_dir, write_file};
use awi_core::{Error, Result};

/// Probe gain and thresholds for collision-assisted amplification without
/// inversion in alkali vapors with a buffer gas.
#[derive(Parser, Debug)]
#[command(name = "awi", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Probe absorption/dispersion spectrum.
    Spectrum(RunArgs),
    /// Inversion and gain thresholds against buffer pressure.
    Thresholds {
        #[command(flatten)]
        run: RunArgs,
        /// Lowest pressure of the sweep (Torr).
        #[arg(long, default_value_t = 0.1, allow_hyphen_values = true)]
        p_min: f64,
        /// Highest pressure of the sweep (Torr).
        #[arg(long, default_value_t = 3000.0, allow_hyphen_values = true)]
        p_max: f64,
        /// Number of log-spaced pressures.
        #[arg(long, default_value_t = 64)]
        p_n: usize,
    },
    /// Level populations under the three population models.
    Populations(RunArgs),
    /// Velocity-averaged probe spectrum.
    Doppler(RunArgs),
    /// Run the internal cross-check suite.
    Validate {
        /// Species catalog (TOML); the built-in table otherwise.
        #[arg(long)]
        catalog: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long, default_value = "K")]
    species: String,
    #[arg(long, default_value = "He")]
    buffer: String,
    #[arg(long, default_value_t = 16.0, allow_hyphen_values = true)]
    pressure_torr: f64,
    #[arg(long, default_value_t = 550.0, allow_hyphen_values = true)]
    temperature_k: f64,
    /// Drive strength as 4|g|^2/A21^2.
    #[arg(long, group = "drive", allow_hyphen_values = true)]
    kappa0: Option<f64>,
    /// Drive Rabi frequency |g| (s^-1).
    #[arg(long, group = "drive", allow_hyphen_values = true)]
    rabi: Option<f64>,
    /// Drive intensity (W/cm^2).
    #[arg(long, group = "drive", allow_hyphen_values = true)]
    intensity: Option<f64>,
    /// Drive detuning (s^-1).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    delta: f64,
    /// Scan start, in units of Gamma31.
    #[arg(long, default_value_t = -10.0, allow_hyphen_values = true)]
    scan_min: f64,
    /// Scan end, in units of Gamma31.
    #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
    scan_max: f64,
    #[arg(long, default_value_t = 401)]
    scan_n: usize,
    /// Average over the thermal velocity distribution.
    #[arg(long)]
    doppler: bool,
    /// Velocity nodes (default: 64, doubled until the line is resolved).
    #[arg(long)]
    nodes: Option<usize>,
    /// Extra Raman-coherence dephasing, in units of the mean line broadening.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    chi_raman: f64,
    /// Species catalog (TOML); the built-in table otherwise.
    #[arg(long)]
    catalog: Option<PathBuf>,
    /// Output directory; CSV goes to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write an SVG chart (needs --out).
    #[arg(long)]
    plot: bool,
}

impl RunArgs {
    fn config(self) -> Result<RunConfig> {
        let cfg = RunConfig {
            species: self.species,
            buffer: self.buffer,
            pressure: self.pressure_torr,
            temperature: self.temperature_k,
            drive: DriveStrength::from_options(self.kappa0, self.rabi, self.intensity)?,
            delta: self.delta,
            scan: ScanSpec {
                min: self.scan_min,
                max: self.scan_max,
                n: self.scan_n,
            },
            doppler: self.doppler,
            nodes: self.nodes,
            chi_raman: self.chi_raman,
            catalog: self.catalog,
            out: self.out,
            plot: self.plot,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn emit(cfg: &RunConfig, artifact: Artifact) -> Result<()> {
    for w in &artifact.warnings {
        eprintln!("warning: {w}");
    }
    match &cfg.out {
        None => print!("{}", artifact.csv.render()),
        Some(dir) => {
            ensure_dir(dir)?;
            let csv_path = dir.join(format!("{}.csv", artifact.name));
            write_file(&csv_path, &artifact.csv.render())?;
            println!("wrote {}", csv_path.display());
            if cfg.plot
                && let Some(chart) = &artifact.chart
            {
                let svg_path = dir.join(format!("{}.svg", artifact.name));
                write_file(&svg_path, &chart.render_svg())?;
                println!("wrote {}", svg_path.display());
            }
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Spectrum(args) => {
            let cfg = args.config()?;
            let catalog = cfg.load_catalog()?;
            emit(&cfg, commands::spectrum(&cfg, &catalog)?)?;
        }
        Command::Doppler(args) => {
            let cfg = RunConfig {
                doppler: true,
                ..args.config()?
            };
            let catalog = cfg.load_catalog()?;
            emit(&cfg, commands::doppler(&cfg, &catalog)?)?;
        }
        Command::Populations(args) => {
            let cfg = args.config()?;
            let catalog = cfg.load_catalog()?;
            emit(&cfg, commands::populations(&cfg, &catalog)?)?;
        }
        Command::Thresholds { run, p_min, p_max, p_n } => {
            let cfg = run.config()?;
            let catalog = cfg.load_catalog()?;
            let sweep = PressureSweep {
                min: p_min,
                max: p_max,
                n: p_n,
            };
            emit(&cfg, commands::thresholds(&cfg, &sweep, &catalog)?)?;
        }
        Command::Validate { catalog } => {
            let catalog = match catalog {
                Some(p) => awi_core::species::load_catalog(p)?,
                None => awi_core::SpeciesCatalog::builtin(),
            };
            let checks = commands::validate(&catalog);
            for c in &checks {
                println!("{}", c.line());
            }
            let failed = checks.iter().filter(|c| !c.passed).count();
            println!("{} checks, {} failed", checks.len(), failed);
            if failed > 0 {
                return Ok(3);
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Bad flags are configuration errors.
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    u8::try_from(e.exit_code()).unwrap_or(1)
}
