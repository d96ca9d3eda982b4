//! Parameter sweeps: a grid of runs derived from a base scenario, executed on a worker pool.

use std::io::Write;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::thread;

use anomaly_core::algebra::GroupKind;
use anomaly_core::analysis::blow_up_time;
use anomaly_core::curvature::ConnectionParams;
use anomaly_core::flow::{integrate, FlowState, Termination, Trajectory};
use anomaly_core::geometry::HermitianMetric;
use serde::{Deserialize, Serialize};

use crate::output::fmt_f64;
use crate::scenario::{InputError, Scenario, Setup, SCHEMA_VERSION};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    /// Diagonal initial metrics; the base metric is used when absent.
    pub initial_eigenvalues: Option<Vec<[f64; 3]>>,
    pub kappa: Option<Vec<f64>>,
    pub alpha_prime: Option<Vec<f64>>,
    /// Sets `kappa = 1`, `alpha_prime = 2 beta`; exclusive with `kappa` and `alpha_prime`.
    pub beta: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepFile {
    pub schema_version: u32,
    pub base: Scenario,
    pub grid: Grid,
    pub csv_path: Option<String>,
}

#[derive(Debug, Clone)]
pub struct Cell {
    pub index: usize,
    pub lambda0: Option<[f64; 3]>,
    pub params: ConnectionParams,
}

#[derive(Debug, Clone)]
pub struct SweepPlan {
    pub base: Setup,
    pub cells: Vec<Cell>,
    pub csv_path: String,
}

impl SweepFile {
    pub fn plan(&self, file: &str, name: &str) -> Result<SweepPlan, InputError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(InputError::Schema { file: file.to_string(), found: self.schema_version });
        }
        let base = self.base.validate(file, name)?;
        let g = &self.grid;
        let config_err = |message: &str| InputError::Config { file: file.to_string(), message: message.to_string() };
        let params: Vec<ConnectionParams> = match (&g.beta, &g.kappa, &g.alpha_prime) {
            (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
                return Err(config_err("grid.beta excludes grid.kappa and grid.alpha_prime"))
            }
            (Some(betas), None, None) => betas.iter().map(|&b| ConnectionParams::with_beta(b)).collect(),
            (None, kappas, aps) => {
                let kappas = kappas.clone().unwrap_or_else(|| vec![base.params.kappa]);
                let aps = aps.clone().unwrap_or_else(|| vec![base.params.alpha_prime]);
                kappas.iter().flat_map(|&k| aps.iter().map(move |&a| ConnectionParams::new(k, a))).collect()
            }
        };
        if params.iter().any(|p| !p.kappa.is_finite() || !p.alpha_prime.is_finite()) {
            return Err(config_err("grid parameters must be finite"));
        }
        let eigen: Vec<Option<[f64; 3]>> = match &g.initial_eigenvalues {
            Some(list) => list.iter().copied().map(Some).collect(),
            None => vec![None],
        };
        let mut cells = Vec::new();
        for lambda0 in &eigen {
            for p in &params {
                cells.push(Cell { index: cells.len(), lambda0: *lambda0, params: *p });
            }
        }
        if cells.is_empty() {
            return Err(config_err("the grid is empty"));
        }
        Ok(SweepPlan { base, cells, csv_path: self.csv_path.clone().unwrap_or_else(|| format!("{name}.sweep.csv")) })
    }
}

/// Outcome of one cell; errors are recorded rather than propagated.
#[derive(Debug, Clone)]
pub struct CellResult {
    pub cell: Cell,
    pub outcome: Result<Trajectory, String>,
}

fn run_cell(base: &Setup, cell: &Cell) -> Result<Trajectory, String> {
    let g0 = match cell.lambda0 {
        Some(l) => HermitianMetric::diagonal(l).map_err(|e| e.to_string())?,
        None => base.initial,
    };
    integrate(FlowState::new(0.0, g0), &base.constants, cell.params, &base.config).map_err(|e| e.to_string())
}

/// Runs every cell on `workers` threads; results come back in cell order.
pub fn run_sweep(plan: &SweepPlan, workers: usize) -> Vec<CellResult> {
    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel();
    thread::scope(|scope| {
        for _ in 0..workers.max(1).min(plan.cells.len()) {
            let tx = tx.clone();
            let next = &next;
            scope.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(cell) = plan.cells.get(i) else { break };
                let outcome = run_cell(&plan.base, cell);
                if tx.send(CellResult { cell: cell.clone(), outcome }).is_err() {
                    break;
                }
            });
        }
    });
    drop(tx);
    let mut results: Vec<CellResult> = rx.into_iter().collect();
    results.sort_by_key(|r| r.cell.index);
    results
}

fn isotropic_time(plan: &SweepPlan, cell: &Cell) -> Option<f64> {
    if plan.base.constants.kind() != Some(GroupKind::SL2C) {
        return None;
    }
    let g0 = cell.lambda0.map(|l| HermitianMetric::diagonal(l).ok()).unwrap_or(Some(plan.base.initial))?;
    let l = g0.entry(0, 0).re;
    let isotropic = (0..3).all(|a| (g0.entry(a, a).re - l).abs() <= 1e-15 * l) && g0.off_diagonal_max() == 0.0;
    if !isotropic {
        return None;
    }
    blow_up_time(l, cell.params.beta()).ok()
}

pub fn write_sweep_csv<W: Write>(plan: &SweepPlan, results: &[CellResult], out: W) -> csv::Result<()> {
    let group_cols: Vec<&str> = anomaly_core::flow::group_monitors(&plan.base.initial, plan.base.constants.kind())
        .map(|m| m.columns().to_vec())
        .unwrap_or_default();
    let conserved: Vec<&str> = anomaly_core::flow::group_monitors(&plan.base.initial, plan.base.constants.kind())
        .map(|m| m.conserved().to_vec())
        .unwrap_or_default();
    let mut header: Vec<String> = [
        "cell",
        "lambda1_0",
        "lambda2_0",
        "lambda3_0",
        "kappa",
        "alpha_prime",
        "beta",
        "termination",
        "final_t",
        "termination_time",
        "isotropic_oracle_time",
        "final_eigenvalue1",
        "final_eigenvalue2",
        "final_eigenvalue3",
        "final_rhs_norm",
    ]
    .map(String::from)
    .to_vec();
    header.extend(group_cols.iter().map(|c| format!("final_{c}")));
    header.extend(conserved.iter().map(|c| format!("drift_{c}")));
    header.push("error".into());

    let mut w = csv::Writer::from_writer(out);
    w.write_record(&header)?;
    for r in results {
        let c = &r.cell;
        let mut row = vec![c.index.to_string()];
        match c.lambda0 {
            Some(l) => row.extend(l.map(fmt_f64)),
            None => row.extend([String::new(), String::new(), String::new()]),
        }
        row.extend([c.params.kappa, c.params.alpha_prime, c.params.beta()].map(fmt_f64));
        let opt = |x: Option<f64>| x.map(fmt_f64).unwrap_or_default();
        match &r.outcome {
            Ok(tr) => {
                let last = tr.last();
                let ended_early = matches!(tr.termination, Termination::BlowUp | Termination::Degenerate);
                row.push(tr.termination.name().to_string());
                row.push(fmt_f64(last.state.t));
                row.push(opt(ended_early.then_some(last.state.t)));
                row.push(opt(isotropic_time(plan, c)));
                let e = last.state.g.eigenvalues();
                row.extend([e[2], e[1], e[0], last.monitors.rhs_norm].map(fmt_f64));
                row.extend(last.monitors.group.values().into_iter().map(fmt_f64));
                let drifts = tr.monitor_drifts();
                for name in &conserved {
                    row.push(opt(drifts.iter().find(|(n, _)| n == name).map(|(_, d)| *d)));
                }
                row.push(String::new());
            }
            Err(msg) => {
                row.push("Error".into());
                row.resize(header.len() - 1, String::new());
                row.push(msg.clone());
            }
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::parse_json;

    fn sweep(grid: &str) -> Result<SweepPlan, InputError> {
        let text = format!(
            r#"{{"schema_version": 1,
                "base": {{"schema_version": 1, "group": "sl2c", "initial_metric": {{"diagonal": [1, 1, 1]}},
                          "kappa": 1, "alpha_prime": 1, "integrator": {{"t_max": 5}}, "events": {{"blow_up_cap": 1e6}}}},
                "grid": {grid}}}"#
        );
        parse_json::<SweepFile>(&text, "s.json")?.plan("s.json", "s")
    }

    #[test]
    fn grid_expansion() {
        let p = sweep(r#"{"initial_eigenvalues": [[1,1,1],[2,2,2]], "kappa": [1, 0.5], "alpha_prime": [1, 2, 3]}"#)
            .unwrap();
        assert_eq!(p.cells.len(), 12);
        assert_eq!(p.csv_path, "s.sweep.csv");
        assert!(sweep(r#"{"beta": [1], "kappa": [1]}"#).is_err());
        assert!(sweep(r#"{"initial_eigenvalues": []}"#).is_err());
        assert!(sweep(r#"{"betas": [1]}"#).is_err());
    }

    #[test]
    fn isotropic_blow_up_times() {
        // lambda0 in {0.5, 1, 2, 4} * 2 beta with beta = 1/2
        let p = sweep(r#"{"initial_eigenvalues": [[0.5,0.5,0.5],[1,1,1],[2,2,2],[4,4,4]], "beta": [0.5]}"#).unwrap();
        let results = run_sweep(&p, 3);
        assert_eq!(results.len(), 4);
        for r in &results {
            let tr = r.outcome.as_ref().unwrap();
            match isotropic_time(&p, &r.cell) {
                Some(t) => {
                    assert!(matches!(tr.termination, Termination::BlowUp | Termination::Degenerate));
                    assert!((tr.final_time() - t).abs() <= 0.01 * t, "{} vs {t}", tr.final_time());
                }
                None => assert_eq!(tr.termination, Termination::ReachedHorizon),
            }
        }
        let mut buf = Vec::new();
        write_sweep_csv(&p, &results, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 5);
        let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
        let unique: std::collections::HashSet<&&str> = header.iter().collect();
        assert_eq!(unique.len(), header.len());
        let width = header.len();
        assert!(text.lines().all(|l| l.split(',').count() == width));
    }

    #[test]
    fn failing_cells_do_not_abort() {
        let p = sweep(r#"{"initial_eigenvalues": [[1,1,1],[-1,1,1]], "beta": [0.5]}"#).unwrap();
        let results = run_sweep(&p, 2);
        assert!(results[0].outcome.is_ok());
        assert!(results[1].outcome.is_err());
        let mut buf = Vec::new();
        write_sweep_csv(&p, &results, &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().lines().nth(2).unwrap().contains("Error"));
    }
}
