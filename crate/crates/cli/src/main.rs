use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hkdelay::dynamics::{write_trajectory_csv, IntegratorSpec};
use hkdelay::experiment::{run_experiment, run_sweep, write_sweep_csv, ExperimentSpec, OutputKind, SweepParam};
use hkdelay::model::DelayKind;
use hkdelay::rates::{shrink_iteration, solve_halanay, HalanayProblem, Measure, PreconditionReport, RateResult, ShrinkEstimate};
use hkdelay::toy::toy_report;

#[derive(Parser)]
#[command(name = "hkdelay", version, about = "Delayed Hegselmann-Krause consensus experiments")]
struct Cli {
    /// Directory for output files.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Overrides the integrator step; must divide tau.
    #[arg(long, global = true)]
    dt: Option<f64>,
    /// Overrides the simulated horizon.
    #[arg(long, global = true)]
    horizon: Option<f64>,
    /// Overrides the seed used for random initial data.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write trajectory.csv, metrics.csv, rates.json and report.json.
    Simulate { spec: PathBuf },
    /// Run one experiment per value and write sweep.csv.
    Sweep {
        spec: PathBuf,
        /// One of tau, N, gamma, horizon.
        #[arg(long)]
        param: String,
        /// Comma-separated values; may be empty.
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        values: String,
    },
    /// Solve the Halanay rate equation and print the result as JSON.
    Rate {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true)]
        beta: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        tau: f64,
        #[arg(long, value_enum, default_value_t = MeasureArg::Dirac)]
        measure: MeasureArg,
    },
    /// Classify and simulate the two-agent toy model.
    Toy {
        #[arg(long)]
        tau: f64,
        #[arg(long, value_enum, default_value_t = KindArg::Reaction)]
        kind: KindArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MeasureArg {
    Dirac,
    Uniform,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Transmission,
    Reaction,
}

#[derive(Serialize)]
struct RatesDoc<'a> {
    preconditions: &'a PreconditionReport,
    theoretical_rate: &'a Option<RateResult>,
    /// Per-coordinate window iteration; transmission runs only.
    shrink: Option<Vec<ShrinkEstimate>>,
}

enum Outcome {
    Done,
    BlowUp,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::BlowUp) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Simulate { spec } => simulate(cli, spec),
        Command::Sweep { spec, param, values } => sweep(cli, spec, param, values),
        Command::Rate { alpha, beta, tau, measure } => {
            let measure = match measure {
                MeasureArg::Dirac => Measure::DiracAtZero,
                MeasureArg::Uniform => Measure::UniformOnDelay,
            };
            let r = solve_halanay(&HalanayProblem { alpha: *alpha, beta: *beta, tau: *tau, measure })?;
            println!("{}", serde_json::to_string_pretty(&r)?);
            Ok(Outcome::Done)
        }
        Command::Toy { tau, kind } => {
            let kind = match kind {
                KindArg::Transmission => DelayKind::Transmission,
                KindArg::Reaction => DelayKind::Reaction,
            };
            let r = toy_report(kind, *tau)?;
            println!("{}", serde_json::to_string_pretty(&r)?);
            Ok(Outcome::Done)
        }
    }
}

fn load_spec(cli: &Cli, path: &Path) -> Result<ExperimentSpec> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut spec = ExperimentSpec::from_json(&text).with_context(|| format!("parsing {}", path.display()))?;
    if let Some(dt) = cli.dt {
        let method = spec.integrator().method;
        spec.integrator = Some(IntegratorSpec { method, dt });
    }
    if let Some(h) = cli.horizon {
        spec.horizon = Some(h);
    }
    if let Some(seed) = cli.seed {
        spec.seed = seed;
    }
    Ok(spec)
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    let mut w = create(dir, name)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    std::io::Write::write_all(&mut w, b"\n")?;
    Ok(())
}

fn simulate(cli: &Cli, path: &Path) -> Result<Outcome> {
    let spec = load_spec(cli, path)?;
    let out = run_experiment(&spec)?;
    fs::create_dir_all(&cli.out).with_context(|| format!("creating {}", cli.out.display()))?;
    let dir = cli.out.as_path();
    let resolved = &out.report.spec;
    if resolved.wants(OutputKind::Trajectory) {
        write_trajectory_csv(&out.trajectory, create(dir, OutputKind::Trajectory.file_name())?)?;
    }
    if resolved.wants(OutputKind::Metrics) {
        out.metrics.write_csv(create(dir, OutputKind::Metrics.file_name())?)?;
    }
    if resolved.wants(OutputKind::Rates) {
        let shrink = match resolved.config.delay_kind {
            DelayKind::Transmission => Some(shrink_iteration(&out.trajectory)?),
            DelayKind::Reaction => None,
        };
        let doc = RatesDoc {
            preconditions: &out.report.preconditions,
            theoretical_rate: &out.report.theoretical_rate,
            shrink,
        };
        write_json(dir, OutputKind::Rates.file_name(), &doc)?;
    }
    if resolved.wants(OutputKind::Report) {
        write_json(dir, OutputKind::Report.file_name(), &out.report)?;
    }
    if let Some(t) = out.report.blow_up_time {
        eprintln!("blow-up at t = {t}; partial series written");
        return Ok(Outcome::BlowUp);
    }
    Ok(Outcome::Done)
}

fn parse_values(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().with_context(|| format!("invalid value '{s}'")))
        .collect()
}

fn sweep(cli: &Cli, path: &Path, param: &str, values: &str) -> Result<Outcome> {
    let param: SweepParam = param.parse()?;
    let values = parse_values(values)?;
    let spec = load_spec(cli, path)?;
    let rows = run_sweep(&spec, param, &values);
    fs::create_dir_all(&cli.out).with_context(|| format!("creating {}", cli.out.display()))?;
    write_sweep_csv(&rows, create(&cli.out, "sweep.csv")?)?;
    Ok(Outcome::Done)
}
