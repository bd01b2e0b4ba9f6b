use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use corrflux::conditions::{check_conditions_sampled, ConditionReport, DEFAULT_TOL};
use corrflux::dynamics::{integrate, IntegrationSettings, TrajectoryStatus};
use corrflux::qubit_example::{build_example, ExampleParams};
use rayon::prelude::*;

use crate::records::{format_float, records, to_csv, to_json, RunRecord};
use crate::scenario::{self, parameter_pointer, set_parameter, Prepared};

/// `|ΔU_χ|` at or below this counts as zero in sweep summaries.
pub const SIGN_TOL: f64 = 1e-12;

pub const SEED_ENV: &str = "CORRFLUX_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Clean,
    /// The trajectory breached a diagnostic threshold; output was still written.
    Breach,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Clean => 0,
            Status::Breach => 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub records: Vec<RunRecord>,
    pub status: Status,
}

impl RunOutcome {
    pub fn delta_u_chi(&self) -> f64 {
        match (self.records.first(), self.records.last()) {
            (Some(first), Some(last)) => last.u_chi - first.u_chi,
            _ => 0.0,
        }
    }
}

pub fn simulate(p: &Prepared) -> Result<RunOutcome> {
    let traj = integrate(&p.sys, &p.rho0, p.settings)?;
    let status = match traj.status {
        TrajectoryStatus::Clean => Status::Clean,
        TrajectoryStatus::Flagged { first_breach } => {
            log::warn!("diagnostic breach at record {first_breach} (t = {})", traj.times[first_breach]);
            Status::Breach
        }
    };
    Ok(RunOutcome { records: records(&p.sys, &traj)?, status })
}

pub fn render(records: &[RunRecord], format: Format) -> Result<String> {
    match format {
        Format::Csv => Ok(to_csv(records)),
        Format::Json => to_json(records),
    }
}

/// Writes to `output`, or to stdout when absent.
pub fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn run(path: &Path, output: Option<&Path>, format: Format) -> Result<Status> {
    let prepared = scenario::load(path)?.prepare()?;
    let outcome = simulate(&prepared)?;
    emit(&render(&outcome.records, format)?, output)?;
    Ok(outcome.status)
}

pub fn example(params: &ExampleParams, settings: IntegrationSettings, output: Option<&Path>, format: Format) -> Result<Status> {
    settings.validate()?;
    let (sys, rho0) = build_example(params)?;
    let outcome = simulate(&Prepared { sys, rho0, settings })?;
    emit(&render(&outcome.records, format)?, output)?;
    Ok(outcome.status)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub param: String,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl SweepSpec {
    pub fn grid(&self) -> Result<Vec<f64>> {
        if !(self.min.is_finite() && self.max.is_finite()) {
            bail!("sweep bounds must be finite");
        }
        match self.steps {
            0 => bail!("steps must be at least 1"),
            1 => Ok(vec![self.min]),
            n => Ok((0..n).map(|i| self.min + (self.max - self.min) * i as f64 / (n - 1) as f64).collect()),
        }
    }

    /// Parameter name as it appears in output file names.
    pub fn file_tag(&self) -> String {
        self.param.trim_start_matches('/').replace('/', "_")
    }
}

pub fn point_file(dir: &Path, spec: &SweepSpec, index: usize) -> PathBuf {
    dir.join(format!("sweep_{}_{index}.csv", spec.file_tag()))
}

pub fn summary_file(dir: &Path, spec: &SweepSpec) -> PathBuf {
    dir.join(format!("sweep_{}_summary.csv", spec.file_tag()))
}

fn sign(x: f64) -> i32 {
    if x.abs() <= SIGN_TOL {
        0
    } else if x > 0.0 {
        1
    } else {
        -1
    }
}

pub fn sweep(path: &Path, spec: &SweepSpec, output_dir: &Path) -> Result<Status> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let origin = path.display().to_string();
    let base = scenario::parse_value(&text, &origin)?;
    let pointer = parameter_pointer(&spec.param)?;
    let grid = spec.grid()?;
    // resolve every grid point before running anything
    let prepared = grid
        .iter()
        .map(|&x| {
            let mut value = base.clone();
            set_parameter(&mut value, &pointer, x)?;
            scenario::from_value(value, &origin)?.prepare().with_context(|| format!("{} = {x}", spec.param))
        })
        .collect::<Result<Vec<_>>>()?;
    fs::create_dir_all(output_dir).with_context(|| format!("cannot create {}", output_dir.display()))?;

    let outcomes = prepared
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let outcome = simulate(p)?;
            emit(&to_csv(&outcome.records), Some(&point_file(output_dir, spec, i)))?;
            Ok((outcome.delta_u_chi(), outcome.status))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut summary = String::from("param,DeltaU_chi_final,sign\n");
    for (x, (delta, _)) in grid.iter().zip(&outcomes) {
        summary.push_str(&format!("{},{},{}\n", format_float(*x), format_float(*delta), sign(*delta)));
    }
    emit(&summary, Some(&summary_file(output_dir, spec)))?;
    let breach = outcomes.iter().any(|(_, s)| *s == Status::Breach);
    Ok(if breach { Status::Breach } else { Status::Clean })
}

/// Seed from `CORRFLUX_SEED` when set, else `fallback`.
pub fn resolve_seed(fallback: u64) -> Result<u64> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s.trim().parse().with_context(|| format!("{SEED_ENV} must be an unsigned integer, got {s:?}")),
        Err(_) => Ok(fallback),
    }
}

pub fn check(path: &Path, samples: usize, seed: u64) -> Result<ConditionReport> {
    if samples == 0 {
        bail!("samples must be at least 1");
    }
    let prepared = scenario::load(path)?.prepare()?;
    Ok(check_conditions_sampled(&prepared.sys, samples, seed, DEFAULT_TOL)?)
}
