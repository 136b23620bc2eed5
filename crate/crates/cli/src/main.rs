use std::fs::{File, OpenOptions};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dustlink::config::{Overrides, Run, RunConfig, Sweep, SweepSpec, SweepVariable};
use dustlink::plot::{figure_from_csv, render_svg};
use dustlink::sweep::{
    format_margin_report, run_attenuation_sweep, run_failure_frontier, run_margin_report, run_threshold_table,
    write_frontier_csv, write_sweep_csv, write_sweep_rows, write_threshold_csv,
};
use dustlink::{Band, Error, ScenarioKind};

const EXIT_RUNTIME: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_IO: u8 = 3;

/// Dust and sand storm impairment of DSRC and 28 GHz vehicle-to-vehicle links.
#[derive(Parser)]
#[command(name = "dustlink", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Attenuation and margin along one swept variable, one series per humidity.
    Sweep(RunArgs),
    /// Full link budget at the configured storm, one report per humidity.
    Margin(RunArgs),
    /// Critical visibility and particle radius for both bands and scenarios.
    Thresholds {
        #[command(flatten)]
        run: RunArgs,
        /// Also write the critical radius along a visibility grid to this CSV.
        #[arg(long, value_name = "PATH")]
        frontier: Option<PathBuf>,
    },
    /// Render a sweep CSV as an SVG figure.
    Plot {
        /// Sweep CSV produced by `dustlink sweep`.
        #[arg(value_name = "CSV")]
        input: PathBuf,
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output CSV (stdout when omitted).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_parser = parse_band, value_name = "dsrc-5.9|mmwave-28")]
    preset: Option<Band>,
    /// Relative humidities in percent, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    humidity: Option<Vec<f64>>,
    #[arg(long)]
    distance_m: Option<f64>,
    #[arg(long)]
    visibility_km: Option<f64>,
    #[arg(long)]
    particle_um: Option<f64>,
    #[arg(long, value_parser = parse_scenario, value_name = "urban|highway")]
    scenario: Option<ScenarioKind>,
    /// Seed for random shadowing draws.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    size_unit_scale: Option<f64>,
}

fn parse_band(s: &str) -> Result<Band, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_scenario(s: &str) -> Result<ScenarioKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

impl RunArgs {
    fn resolve(&self) -> Result<Run, Error> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        cfg.apply(&Overrides {
            preset: self.preset,
            humidity: self.humidity.clone(),
            distance_m: self.distance_m,
            visibility_km: self.visibility_km,
            particle_um: self.particle_um,
            scenario: self.scenario,
            seed: self.seed,
            size_unit_scale: self.size_unit_scale,
        });
        cfg.resolve()
    }
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>, Error> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Sweep(args) => {
            let run = args.resolve()?;
            let rows = run_attenuation_sweep(&run)?;
            let mut out = open_out(args.out.as_deref())?;
            write_sweep_csv(&rows, &mut out)?;
            out.flush()?;
        }
        Command::Margin(args) => {
            let run = args.resolve()?;
            let reports = run_margin_report(&run)?;
            let mut stdout = io::stdout().lock();
            for (i, m) in reports.iter().enumerate() {
                if i > 0 {
                    writeln!(stdout)?;
                }
                write!(stdout, "{}", format_margin_report(m, run.radio.margin_threshold_db))?;
            }
            let rows: Vec<_> = reports.into_iter().map(|m| m.row).collect();
            match &args.out {
                Some(path) => {
                    let fresh = std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
                    let file = OpenOptions::new().create(true).append(true).open(path)?;
                    write_sweep_rows(&rows, file, fresh)?;
                }
                None => {
                    writeln!(stdout)?;
                    write_sweep_csv(&rows, &mut stdout)?;
                }
            }
            stdout.flush()?;
        }
        Command::Thresholds { run: args, frontier } => {
            let run = args.resolve()?;
            let rows = run_threshold_table(&run)?;
            let mut out = open_out(args.out.as_deref())?;
            write_threshold_csv(&rows, &mut out)?;
            out.flush()?;
            if let Some(path) = frontier {
                let grid = if run.sweep.variable == SweepVariable::Visibility {
                    run.sweep.values()
                } else {
                    Sweep::from_spec(&SweepSpec::default())?.values()
                };
                let rows = run_failure_frontier(&run, &grid)?;
                let mut f = BufWriter::new(File::create(path)?);
                write_frontier_csv(&rows, &mut f)?;
                f.flush()?;
            }
        }
        Command::Plot { input, out } => {
            let figure = figure_from_csv(File::open(&input)?)?;
            std::fs::write(&out, render_svg(&figure))?;
        }
    }
    Ok(())
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::InvalidInput(_) => EXIT_CONFIG,
        Error::Io(_) | Error::Csv(_) => EXIT_IO,
        Error::NumericAssumptionViolated(_) => EXIT_RUNTIME,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Error::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dustlink: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
