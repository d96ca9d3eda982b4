//! The `run`, `stationary`, `linearize`, `sweep` and `verify` commands.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::thread;
use std::time::Instant;

use anomaly_core::algebra::GroupKind;
use anomaly_core::analysis::{classify_solvable_stationary, find_stationary, spectrum};
use anomaly_core::flow::{integrate, FlowState, Termination};
use anyhow::Context;
use serde::Serialize;

use crate::dto::{SpectrumReportDto, StationaryReportDto};
use crate::output::{write_trajectory_csv, RunSummary};
use crate::scenario::{read_json, Scenario};
use crate::sweep::{run_sweep, write_sweep_csv, SweepFile};
use crate::verify::{self, Level};

/// Process exit status: 0 success, 1 input or IO error (or a failed check in `verify`),
/// 2 expected dynamical outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    Failed = 1,
    Dynamical = 2,
}

pub fn exit_for(t: Termination) -> Exit {
    match t {
        Termination::ReachedHorizon | Termination::Stationary => Exit::Ok,
        Termination::BlowUp | Termination::Degenerate | Termination::StepUnderflow | Termination::StepLimit => {
            Exit::Dynamical
        }
    }
}

const NEWTON_MAX_ITER: usize = 100;
const LINEARIZE_WARN: f64 = 1e-6;

fn create(out_dir: &Path, rel: &str) -> anyhow::Result<(PathBuf, BufWriter<File>)> {
    let path = out_dir.join(rel);
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    Ok((path, BufWriter::new(f)))
}

fn write_json<T: Serialize>(out_dir: &Path, rel: &str, value: &T) -> anyhow::Result<PathBuf> {
    let (path, mut w) = create(out_dir, rel)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    std::io::Write::write_all(&mut w, b"\n")?;
    Ok(path)
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "scenario".into())
}

pub fn cmd_run(scenario: &Path, out_dir: &Path) -> anyhow::Result<Exit> {
    let setup = Scenario::load(scenario)?;
    for w in &setup.warnings {
        eprintln!("warning: {w}");
    }
    let start = Instant::now();
    let tr = integrate(FlowState::new(0.0, setup.initial), &setup.constants, setup.params, &setup.config)?;
    let elapsed = start.elapsed();
    let (csv_path, w) = create(out_dir, &setup.csv_path)?;
    write_trajectory_csv(&tr, w)?;
    let summary = RunSummary::new(&setup.name, &tr, elapsed, setup.warnings.clone());
    let json_path = write_json(out_dir, &setup.json_path, &summary)?;
    println!(
        "{}: {} at t = {} ({} samples) -> {}, {}",
        setup.name,
        tr.termination,
        tr.final_time(),
        tr.samples.len(),
        csv_path.display(),
        json_path.display()
    );
    Ok(exit_for(tr.termination))
}

pub fn cmd_stationary(scenario: &Path, out_dir: &Path) -> anyhow::Result<Exit> {
    let setup = Scenario::load(scenario)?;
    let report = find_stationary(
        &setup.constants,
        setup.params,
        &setup.initial,
        NEWTON_MAX_ITER,
        setup.config.events.stationary_tol,
    )?;
    let mut dto = StationaryReportDto::from(&report);
    if setup.constants.kind() == Some(GroupKind::Solvable) {
        let tol = 1e3 * setup.config.events.stationary_tol.max(f64::EPSILON);
        dto.solvable_stationary = Some(classify_solvable_stationary(&report.metric, setup.params.beta(), tol));
    }
    let path = write_json(out_dir, &format!("{}.stationary.json", setup.name), &dto)?;
    if let Some(w) = report.warning {
        eprintln!("warning: {w}");
    }
    println!(
        "{}: converged = {}, classification = {}, |rhs| = {:e} -> {}",
        setup.name,
        report.converged,
        dto.classification,
        report.rhs_norm,
        path.display()
    );
    Ok(if report.converged { Exit::Ok } else { Exit::Dynamical })
}

pub fn cmd_linearize(scenario: &Path, out_dir: &Path) -> anyhow::Result<Exit> {
    let setup = Scenario::load(scenario)?;
    let report = spectrum(&setup.initial, &setup.constants, setup.params)?;
    if report.rhs_norm > LINEARIZE_WARN {
        eprintln!("warning: |rhs| = {:e} at the initial metric; it is not a stationary point", report.rhs_norm);
    }
    let dto = SpectrumReportDto::from(&report);
    let path = write_json(out_dir, &format!("{}.spectrum.json", setup.name), &dto)?;
    println!("{}: {} -> {}", setup.name, dto.stability, path.display());
    Ok(Exit::Ok)
}

pub fn cmd_sweep(sweep: &Path, out_dir: &Path) -> anyhow::Result<Exit> {
    let file: SweepFile = read_json(sweep)?;
    let plan = file.plan(&sweep.display().to_string(), &stem(sweep))?;
    let workers = thread_count();
    let results = run_sweep(&plan, workers);
    let (path, w) = create(out_dir, &plan.csv_path)?;
    write_sweep_csv(&plan, &results, w)?;
    let failed = results.iter().filter(|r| r.outcome.is_err()).count();
    println!("{} cells ({} failed) on {} workers -> {}", results.len(), failed, workers, path.display());
    Ok(Exit::Ok)
}

fn thread_count() -> usize {
    thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

pub fn cmd_verify(level: Level, seed: u64, out_dir: Option<&Path>) -> anyhow::Result<Exit> {
    let report = verify::run(level, seed);
    for line in &report {
        println!("{line}");
    }
    let all = report.iter().all(|c| c.passed);
    println!("{} of {} checks passed", report.iter().filter(|c| c.passed).count(), report.len());
    if let Some(dir) = out_dir {
        write_json(dir, "verify.json", &report)?;
    }
    Ok(if all { Exit::Ok } else { Exit::Failed })
}
