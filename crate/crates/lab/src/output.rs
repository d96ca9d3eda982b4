//! Trajectory CSV and run summaries.

use std::io::Write;
use std::time::Duration;

use anomaly_core::flow::{to_coords, Sample, Termination, Trajectory, COORD_NAMES};
use serde::Serialize;

use crate::dto::MetricDto;

/// Shortest representation that parses back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

pub fn trajectory_header(tr: &Trajectory) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    h.extend(COORD_NAMES.iter().map(|s| s.to_string()));
    h.extend(["det_g", "omega_norm", "rhs_norm"].map(String::from));
    h.extend(tr.samples[0].monitors.group.columns().iter().map(|s| s.to_string()));
    h
}

fn sample_row(s: &Sample) -> Vec<String> {
    let mut row = vec![fmt_f64(s.state.t)];
    row.extend(to_coords(s.state.g.matrix()).iter().map(|&x| fmt_f64(x)));
    let m = &s.monitors;
    row.extend([m.det_g, m.omega_norm, m.rhs_norm].map(fmt_f64));
    row.extend(m.group.values().into_iter().map(fmt_f64));
    row
}

pub fn write_trajectory_csv<W: Write>(tr: &Trajectory, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(trajectory_header(tr))?;
    for s in &tr.samples {
        w.write_record(sample_row(s))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct FinalState {
    pub t: f64,
    pub metric: MetricDto,
    pub eigenvalues: [f64; 3],
}

#[derive(Debug, Clone, Serialize)]
pub struct Drift {
    pub monitor: &'static str,
    pub max_relative_drift: f64,
    pub conserved: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct StepSummary {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
    pub min_dt: f64,
    pub max_dt: f64,
    pub max_hermitian_drift: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub scenario: String,
    pub termination: &'static str,
    /// Time of the last state when the run ended by leaving the positive cone.
    pub termination_time: Option<f64>,
    pub final_state: FinalState,
    pub final_rhs_norm: f64,
    pub monitor_drifts: Vec<Drift>,
    pub samples: usize,
    pub steps: StepSummary,
    pub wall_clock_seconds: f64,
    pub warnings: Vec<String>,
}

impl RunSummary {
    pub fn new(scenario: &str, tr: &Trajectory, wall_clock: Duration, warnings: Vec<String>) -> Self {
        let last = tr.last();
        let conserved = last.monitors.group.conserved();
        let ended_early = matches!(tr.termination, Termination::BlowUp | Termination::Degenerate);
        let mut eigenvalues = last.state.g.eigenvalues();
        eigenvalues.reverse();
        RunSummary {
            scenario: scenario.to_string(),
            termination: tr.termination.name(),
            termination_time: ended_early.then_some(last.state.t),
            final_state: FinalState { t: last.state.t, metric: MetricDto::from(&last.state.g), eigenvalues },
            final_rhs_norm: last.monitors.rhs_norm,
            monitor_drifts: tr
                .monitor_drifts()
                .into_iter()
                .map(|(monitor, d)| Drift { monitor, max_relative_drift: d, conserved: conserved.contains(&monitor) })
                .collect(),
            samples: tr.samples.len(),
            steps: StepSummary {
                accepted: tr.stats.accepted,
                rejected: tr.stats.rejected,
                rhs_evals: tr.stats.rhs_evals,
                min_dt: tr.stats.min_dt,
                max_dt: tr.stats.max_dt,
                max_hermitian_drift: tr.stats.max_hermitian_drift,
            },
            wall_clock_seconds: wall_clock.as_secs_f64(),
            warnings,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use anomaly_core::algebra::{catalog, GroupKind};
    use anomaly_core::curvature::ConnectionParams;
    use anomaly_core::flow::{integrate, FlowState, IntegratorConfig};
    use anomaly_core::geometry::HermitianMetric;

    #[test]
    fn shortest_round_trip() {
        for x in [0.1, 1.0, 1e-20, 123456.789, -2.5e300, std::f64::consts::PI] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_f64(0.1), "0.1");
    }

    #[test]
    fn csv_columns_and_rows() {
        let g = HermitianMetric::diagonal([2.0, 1.0, 1.0]).unwrap();
        let cfg = IntegratorConfig { t_max: 0.1, ..Default::default() };
        let tr =
            integrate(FlowState::new(0.0, g), &catalog(GroupKind::Nilpotent), ConnectionParams::with_beta(1.0), &cfg)
                .unwrap();
        let mut buf = Vec::new();
        write_trajectory_csv(&tr, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "t,re_g11,re_g22,re_g33,re_g12,im_g12,re_g13,im_g13,re_g23,im_g23,det_g,omega_norm,rhs_norm,lambda3,ratio12,off_diagonal"
        );
        let rows: Vec<_> = lines.collect();
        assert_eq!(rows.len(), tr.samples.len());
        assert!(rows[0].starts_with("0.0,2.0,1.0,1.0,"));
        let summary = RunSummary::new("nil", &tr, Duration::from_millis(1), vec![]);
        assert_eq!(summary.termination, "ReachedHorizon");
        assert_eq!(summary.termination_time, None);
        assert!(summary.monitor_drifts.iter().any(|d| d.monitor == "lambda3" && d.conserved));
    }
}
