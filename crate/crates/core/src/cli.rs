//! Command-line front end: `bounds`, `simulate`, `frontier`, `validate`.
//!
//! Every subcommand reads a [`RunConfig`] and writes `report.json` and
//! `report.csv` into `--out`. Exit status: 0 on success, 1 when `validate`
//! finds a violated bound or on I/O failure, 2 for bad arguments or config,
//! 3 for numerical infeasibility.

use std::ffi::OsString;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::bounds::{bounds_report, BoundsReport, ReportInputs, SCHEMA_VERSION};
use crate::codec::{build_code, BuildMode, HomogeneousCode};
use crate::config::{RegionMethodSpec, RunConfig, Scenario};
use crate::detection::{region_probs, MapDetector};
use crate::error::{Error, Result};
use crate::frontier::{
    dep_energy_curve, exhaustive_types, family_gap, lambda_grid, pareto_front, sweep_deltas,
    FrontierPoint, FrontierSetup,
};
use crate::montecarlo::{simulate_dep, simulate_eop, SimulationReport, ValidationLedger};
use crate::output::{sig12, write_rows};
use crate::typespace::{multinomial, rationalize};

const DEFAULT_TRIALS: u64 = 100_000;
const DEFAULT_MESSAGES: u64 = 1024;
const DEFAULT_LAMBDA_POINTS: usize = 21;

#[derive(Parser, Debug)]
#[command(
    name = "siet",
    version,
    about = "Rate, energy and error bounds for SWIPT over AWGN"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Rate, energy and decoding-error bounds for the configured type.
    Bounds(Common),
    /// Monte Carlo decoding-error and energy-outage estimates.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Also write the codebook as CSV.
        #[arg(long)]
        codebook: Option<PathBuf>,
    },
    /// Sweep the interpolation family or locate the DEP/energy curve.
    Frontier {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = FrontierMode::Family)]
        mode: FrontierMode,
    },
    /// Simulate and check every bound; exits 1 if any check fails.
    Validate(Common),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum FrontierMode {
    Family,
    DepCurve,
    Exhaustive,
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    /// Energy threshold.
    #[arg(long = "B")]
    b: Option<f64>,
    #[arg(long)]
    region_samples: Option<u64>,
    #[arg(long, value_enum)]
    region_method: Option<MethodArg>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Auto,
    Quadrature,
    MonteCarlo,
}

struct Job {
    cfg: RunConfig,
    scenario: Scenario,
    seed: u64,
    trials: u64,
    b: Option<f64>,
    out: PathBuf,
}

impl Job {
    fn load(c: &Common) -> Result<Job> {
        let mut cfg = RunConfig::from_path(&c.config)?;
        if let Some(m) = c.region_method {
            cfg.region.method = match m {
                MethodArg::Auto => RegionMethodSpec::Auto,
                MethodArg::Quadrature => RegionMethodSpec::Quadrature,
                MethodArg::MonteCarlo => RegionMethodSpec::MonteCarlo,
            };
        }
        if c.region_samples.is_some() {
            cfg.region.samples = c.region_samples;
        }
        if c.b.is_some() {
            cfg.energy_threshold = c.b;
        }
        let scenario = cfg.resolve()?;
        let trials = c.trials.or(cfg.trials).unwrap_or(DEFAULT_TRIALS);
        if trials == 0 {
            return Err(Error::config("trials", "must be positive"));
        }
        std::fs::create_dir_all(&c.out)?;
        Ok(Job {
            seed: c.seed.or(cfg.seed).unwrap_or(0),
            trials,
            b: cfg.energy_threshold,
            out: c.out.clone(),
            scenario,
            cfg,
        })
    }

    fn write_json<T: Serialize>(&self, value: &T) -> Result<()> {
        let text = serde_json::to_string_pretty(value)?;
        let path = self.out.join("report.json");
        std::fs::write(&path, format!("{text}\n"))?;
        println!("wrote {} and report.csv", path.display());
        Ok(())
    }

    fn write_csv(&self, header: &[String], rows: &[Vec<String>]) -> Result<()> {
        write_rows(
            BufWriter::new(File::create(self.out.join("report.csv"))?),
            header,
            rows,
        )
    }

    fn code(&self) -> Result<HomogeneousCode> {
        let counts = rationalize(&self.scenario.input_type, self.scenario.n)?;
        let m = match self.cfg.messages {
            Some(m) => m,
            None => multinomial(&counts)
                .to_u64()
                .map_or(DEFAULT_MESSAGES, |c| c.min(DEFAULT_MESSAGES)),
        };
        build_code(&counts, m, BuildMode::Sample { seed: self.seed })
    }

    fn setup(&self) -> FrontierSetup {
        let s = &self.scenario;
        FrontierSetup {
            constellation: s.constellation.clone(),
            ch: s.ch,
            harvester: s.harvester,
            n: s.n,
            delta: s.delta,
            sampler: s.sampler(self.seed),
        }
    }
}

fn strings(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn opt(x: Option<f64>) -> String {
    x.map(sig12).unwrap_or_default()
}

fn bounds_csv(r: &BoundsReport) -> (Vec<String>, Vec<String>) {
    let mut header = strings(&[
        "n",
        "delta",
        "sigma2",
        "k2",
        "k4",
        "h_mag",
        "rate_ub_exact",
        "rate_ub_stirling",
        "energy_rate_ub",
        "mean_expected_energy",
        "dep_lb",
        "dep_lb_raw",
        "region_method",
        "region_est_error",
        "B",
        "eop_lb",
        "reference_rate_ub",
        "reference_rate_gap",
        "reference_rate_discrepancy",
    ]);
    let mut row = vec![
        r.n.to_string(),
        sig12(r.delta),
        sig12(r.sigma2),
        sig12(r.harvester.k2),
        sig12(r.harvester.k4),
        sig12(r.harvester.h_mag),
        sig12(r.rate_ub_exact),
        sig12(r.rate_ub_stirling),
        sig12(r.energy_rate_ub),
        sig12(r.mean_expected_energy),
        sig12(r.dep_lb),
        sig12(r.dep_lb_raw),
        serde_json::to_value(r.region_method)
            .ok()
            .and_then(|v| v.as_str().map(String::from))
            .unwrap_or_default(),
        sig12(r.region_est_error),
        opt(r.energy_threshold),
        opt(r.eop_lb),
        opt(r.reference_rate_ub),
        opt(r.reference_rate_gap),
        r.reference_rate_discrepancy.to_string(),
    ];
    for (i, p) in r.probs.iter().enumerate() {
        header.push(format!("p_{}", i + 1));
        row.push(sig12(*p));
    }
    (header, row)
}

fn run_bounds(c: &Common) -> Result<i32> {
    let job = Job::load(c)?;
    let s = &job.scenario;
    let detector = MapDetector::new(&s.constellation, &s.input_type, s.ch)?;
    let rp = region_probs(&detector, s.sampler(job.seed));
    let inputs = ReportInputs {
        constellation: &s.constellation,
        n: s.n,
        delta: s.delta,
        ch: s.ch,
        harvester: s.harvester,
        energy_threshold: job.b,
        reference_rate_ub: job.cfg.reference_rate_ub,
    };
    let report = bounds_report(&s.input_type, &inputs, &rp)?;
    let (header, row) = bounds_csv(&report);
    job.write_csv(&header, &[row])?;
    job.write_json(&report)?;
    Ok(0)
}

fn simulation_csv(r: &SimulationReport) -> (Vec<String>, Vec<String>) {
    let header = strings(&[
        "n",
        "messages",
        "sigma2",
        "trials",
        "seed",
        "dep_hat",
        "dep_stderr",
        "errors",
        "analytic_dep",
        "rare_event",
        "B",
        "eop_hat",
        "eop_stderr",
        "outages",
    ]);
    let d = &r.dep;
    let e = r.eop.as_ref();
    let row = vec![
        r.n.to_string(),
        r.messages.to_string(),
        sig12(r.sigma2),
        d.trials.to_string(),
        d.seed.to_string(),
        sig12(d.dep_hat),
        sig12(d.dep_stderr),
        d.errors.to_string(),
        sig12(d.analytic_dep),
        d.rare_event.to_string(),
        opt(e.map(|e| e.energy_threshold)),
        opt(e.map(|e| e.eop_hat)),
        opt(e.map(|e| e.eop_stderr)),
        e.map(|e| e.outages.to_string()).unwrap_or_default(),
    ];
    (header, row)
}

fn run_simulate(c: &Common, codebook: Option<&Path>) -> Result<i32> {
    let job = Job::load(c)?;
    let s = &job.scenario;
    let code = job.code()?;
    if let Some(path) = codebook {
        code.write_csv(BufWriter::new(File::create(path)?))?;
    }
    let detector = MapDetector::new(&s.constellation, &code.code_type(), s.ch)?;
    let dep = simulate_dep(&code, &detector, job.trials, job.seed)?;
    let eop = job
        .b
        .map(|b| {
            simulate_eop(
                &code,
                &s.constellation,
                &s.ch,
                &s.harvester,
                b,
                job.trials,
                job.seed,
            )
        })
        .transpose()?;
    let report = SimulationReport {
        schema_version: SCHEMA_VERSION,
        n: s.n,
        messages: code.messages() as u64,
        sigma2: s.ch.sigma2(),
        counts: code.counts().counts().to_vec(),
        dep,
        eop,
    };
    let (header, row) = simulation_csv(&report);
    job.write_csv(&header, &[row])?;
    job.write_json(&report)?;
    Ok(0)
}

#[derive(Serialize)]
struct FrontierReport {
    schema_version: u32,
    mode: FrontierMode,
    points: Vec<FrontierPoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pareto: Option<Vec<FrontierPoint>>,
    /// Largest rate shortfall of the family against the exhaustive front.
    #[serde(skip_serializing_if = "Option::is_none")]
    family_gap: Option<f64>,
}

fn default_dep_targets() -> Vec<f64> {
    (0..12)
        .map(|i| 10f64.powf(-7.0 + i as f64 * 6.0 / 11.0))
        .collect()
}

fn run_frontier(c: &Common, mode: FrontierMode) -> Result<i32> {
    let job = Job::load(c)?;
    let setup = job.setup();
    let grid = match (&job.cfg.lambda_grid, job.cfg.lambda_points) {
        (Some(g), _) => g.clone(),
        (None, Some(k)) => lambda_grid(k),
        (None, None) => lambda_grid(DEFAULT_LAMBDA_POINTS),
    };
    let deltas = job.cfg.deltas.clone().unwrap_or_else(|| vec![setup.delta]);
    if let Some(d) = deltas.iter().find(|d| !(0.0..1.0).contains(*d)) {
        return Err(Error::config(
            "deltas",
            format!("must lie in [0, 1), got {d}"),
        ));
    }
    let report = match mode {
        FrontierMode::Family => FrontierReport {
            schema_version: SCHEMA_VERSION,
            mode,
            points: sweep_deltas(&setup, &grid, &deltas)?,
            pareto: None,
            family_gap: None,
        },
        FrontierMode::DepCurve => {
            let targets = job
                .cfg
                .dep_targets
                .clone()
                .unwrap_or_else(default_dep_targets);
            FrontierReport {
                schema_version: SCHEMA_VERSION,
                mode,
                points: dep_energy_curve(&setup, &targets)?,
                pareto: None,
                family_gap: None,
            }
        }
        FrontierMode::Exhaustive => {
            let points = exhaustive_types(&setup)?;
            let front = pareto_front(&points);
            let family = sweep_deltas(&setup, &grid, &[setup.delta])?;
            FrontierReport {
                schema_version: SCHEMA_VERSION,
                mode,
                family_gap: Some(family_gap(&family, &front)),
                pareto: Some(front),
                points,
            }
        }
    };
    crate::frontier::write_csv(
        &report.points,
        BufWriter::new(File::create(job.out.join("report.csv"))?),
    )?;
    job.write_json(&report)?;
    Ok(0)
}

fn run_validate(c: &Common) -> Result<i32> {
    let job = Job::load(c)?;
    let s = &job.scenario;
    let b = job.b.ok_or_else(|| {
        Error::config(
            "B",
            "validate needs an energy threshold (config `B` or --B)",
        )
    })?;
    let code = job.code()?;
    let detector = MapDetector::new(&s.constellation, &code.code_type(), s.ch)?;
    let ledger: ValidationLedger = crate::montecarlo::validate_bounds(
        &code,
        &detector,
        &s.harvester,
        b,
        s.delta,
        job.trials,
        job.seed,
    )?;
    let header = strings(&["check", "passed", "skipped", "margin"]);
    let rows: Vec<Vec<String>> = ledger
        .checks
        .iter()
        .map(|c| {
            vec![
                c.name.clone(),
                c.passed.to_string(),
                c.skipped.to_string(),
                sig12(c.margin),
            ]
        })
        .collect();
    job.write_csv(&header, &rows)?;
    job.write_json(&ledger)?;
    Ok(if ledger.all_passed() { 0 } else { 1 })
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    error: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    field: Option<&'a str>,
    message: String,
}

fn exit_code(e: &Error) -> (i32, &'static str) {
    match e {
        Error::Config { .. } => (2, "config"),
        Error::InvalidArgument(_) => (2, "invalid_argument"),
        Error::Json(_) => (2, "json"),
        Error::Infeasible(_) => (3, "infeasible"),
        Error::DegenerateDetector => (3, "degenerate_detector"),
        Error::CapacityExceeded { .. } => (3, "capacity_exceeded"),
        Error::Io(_) => (1, "io"),
    }
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match &cli.command {
        Command::Bounds(c) => run_bounds(c),
        Command::Simulate { common, codebook } => run_simulate(common, codebook.as_deref()),
        Command::Frontier { common, mode } => run_frontier(common, *mode),
        Command::Validate(c) => run_validate(c),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let (code, kind) = exit_code(&e);
            let field = match &e {
                Error::Config { field, .. } => Some(field.as_str()),
                _ => None,
            };
            let message = match &e {
                Error::Config { message, .. } => message.clone(),
                other => other.to_string(),
            };
            let report = ErrorReport {
                error: kind,
                field,
                message,
            };
            eprintln!(
                "{}",
                serde_json::to_string(&report).unwrap_or_else(|_| e.to_string())
            );
            code
        }
    }
}
