use alloc::vec::Vec;

use crate::algebra::StructureConstants;
use crate::curvature::ConnectionParams;
use crate::geometry::HermitianMetric;
use crate::linalg::hermitian_defect;
use crate::math;
use crate::{Error, Result};

use super::{from_coords, monitors, rhs, to_coords, Coords, FlowState, MonitorRecord, DIM};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Rk4Fixed,
    Rkf45Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventThresholds {
    /// Max-modulus of the right-hand side below which the run is declared stationary.
    pub stationary_tol: f64,
    /// Largest eigenvalue above which the run is declared a blow-up.
    pub blow_up_cap: f64,
    /// Smallest eigenvalue below which the run is declared degenerate.
    pub degeneracy_floor: f64,
    /// Smallest adaptive step.
    pub dt_min: f64,
}

impl Default for EventThresholds {
    fn default() -> Self {
        EventThresholds { stationary_tol: 1e-10, blow_up_cap: 1e8, degeneracy_floor: 1e-10, dt_min: 1e-12 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub scheme: Scheme,
    /// Fixed step, or the first trial step of the adaptive scheme.
    pub dt: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Length of the time interval; the run covers `[t0, t0 + t_max]` forward
    /// or `[t0 - t_max, t0]` backward.
    pub t_max: f64,
    pub direction: Direction,
    pub events: EventThresholds,
    pub max_steps: usize,
    /// Record every `record_stride`-th accepted step; the first and last states are always kept.
    pub record_stride: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            scheme: Scheme::Rkf45Adaptive,
            dt: 1e-3,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            t_max: 1.0,
            direction: Direction::Forward,
            events: EventThresholds::default(),
            max_steps: 1_000_000,
            record_stride: 1,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x > 0.0 && x.is_finite();
        if !positive(self.dt) {
            return Err(Error::InvalidConfig("dt must be positive and finite"));
        }
        if !positive(self.rel_tol) || !positive(self.abs_tol) {
            return Err(Error::InvalidConfig("tolerances must be positive and finite"));
        }
        if !(self.t_max >= 0.0) || !self.t_max.is_finite() {
            return Err(Error::InvalidConfig("t_max must be non-negative and finite"));
        }
        let e = &self.events;
        if !(e.stationary_tol >= 0.0) || !positive(e.blow_up_cap) || !(e.degeneracy_floor >= 0.0) || !positive(e.dt_min)
        {
            return Err(Error::InvalidConfig("event thresholds must be non-negative, caps positive"));
        }
        if self.max_steps == 0 || self.record_stride == 0 {
            return Err(Error::InvalidConfig("max_steps and record_stride must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    ReachedHorizon,
    Stationary,
    BlowUp,
    Degenerate,
    StepUnderflow,
    StepLimit,
}

impl Termination {
    pub fn name(self) -> &'static str {
        match self {
            Termination::ReachedHorizon => "ReachedHorizon",
            Termination::Stationary => "Stationary",
            Termination::BlowUp => "BlowUp",
            Termination::Degenerate => "Degenerate",
            Termination::StepUnderflow => "StepUnderflow",
            Termination::StepLimit => "StepLimit",
        }
    }
}

impl core::fmt::Display for Termination {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub state: FlowState,
    pub monitors: MonitorRecord,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
    pub min_dt: f64,
    pub max_dt: f64,
    /// Largest anti-Hermitian part of any right-hand side evaluated; the
    /// integrator only advances the Hermitian part.
    pub max_hermitian_drift: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub termination: Termination,
    pub stats: StepStats,
}

impl Trajectory {
    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectory always holds the initial sample")
    }

    pub fn final_time(&self) -> f64 {
        self.last().state.t
    }

    /// For each group monitor column, `max_t |v(t) - v(0)| / max(|v(0)|, tiny)`.
    pub fn monitor_drifts(&self) -> Vec<(&'static str, f64)> {
        let first = &self.samples[0].monitors.group;
        let v0 = first.values();
        let mut drift = alloc::vec![0.0f64; v0.len()];
        for s in &self.samples {
            for (k, v) in s.monitors.group.values().iter().enumerate() {
                let scale = v0[k].abs().max(f64::MIN_POSITIVE);
                drift[k] = drift[k].max((v - v0[k]).abs() / scale);
            }
        }
        first.columns().iter().copied().zip(drift).collect()
    }
}

struct System<'a> {
    c: &'a StructureConstants,
    params: ConnectionParams,
    sign: f64,
    stats: StepStats,
}

impl System<'_> {
    fn eval(&mut self, x: &Coords) -> Result<Coords> {
        self.stats.rhs_evals += 1;
        let g = HermitianMetric::hermitize(from_coords(x))?;
        let v = rhs(&g, self.c, self.params)?;
        self.stats.max_hermitian_drift = self.stats.max_hermitian_drift.max(hermitian_defect(&v));
        let mut y = to_coords(&v);
        if !y.iter().all(|z| z.is_finite()) {
            return Err(Error::DegenerateMetric);
        }
        for z in y.iter_mut() {
            *z *= self.sign;
        }
        Ok(y)
    }
}

fn axpy(x: &Coords, h: f64, terms: &[(f64, &Coords)]) -> Coords {
    let mut out = *x;
    for i in 0..DIM {
        let mut s = 0.0;
        for (w, k) in terms {
            s += w * k[i];
        }
        out[i] += h * s;
    }
    out
}

fn rk4_step(sys: &mut System<'_>, x: &Coords, k1: &Coords, h: f64) -> Result<Coords> {
    let k2 = sys.eval(&axpy(x, h, &[(0.5, k1)]))?;
    let k3 = sys.eval(&axpy(x, h, &[(0.5, &k2)]))?;
    let k4 = sys.eval(&axpy(x, h, &[(1.0, &k3)]))?;
    Ok(axpy(x, h, &[(1.0 / 6.0, k1), (1.0 / 3.0, &k2), (1.0 / 3.0, &k3), (1.0 / 6.0, &k4)]))
}

/// Fehlberg 4(5) pair; returns the fifth-order solution and the error estimate.
fn rkf45_step(sys: &mut System<'_>, x: &Coords, k1: &Coords, h: f64) -> Result<(Coords, Coords)> {
    let k2 = sys.eval(&axpy(x, h, &[(1.0 / 4.0, k1)]))?;
    let k3 = sys.eval(&axpy(x, h, &[(3.0 / 32.0, k1), (9.0 / 32.0, &k2)]))?;
    let k4 = sys.eval(&axpy(x, h, &[(1932.0 / 2197.0, k1), (-7200.0 / 2197.0, &k2), (7296.0 / 2197.0, &k3)]))?;
    let k5 =
        sys.eval(&axpy(x, h, &[(439.0 / 216.0, k1), (-8.0, &k2), (3680.0 / 513.0, &k3), (-845.0 / 4104.0, &k4)]))?;
    let k6 = sys.eval(&axpy(
        x,
        h,
        &[(-8.0 / 27.0, k1), (2.0, &k2), (-3544.0 / 2565.0, &k3), (1859.0 / 4104.0, &k4), (-11.0 / 40.0, &k5)],
    ))?;
    let y5 = axpy(
        x,
        h,
        &[(16.0 / 135.0, k1), (6656.0 / 12825.0, &k3), (28561.0 / 56430.0, &k4), (-9.0 / 50.0, &k5), (2.0 / 55.0, &k6)],
    );
    let err = axpy(
        &[0.0; DIM],
        h,
        &[(1.0 / 360.0, k1), (-128.0 / 4275.0, &k3), (-2197.0 / 75240.0, &k4), (1.0 / 50.0, &k5), (2.0 / 55.0, &k6)],
    );
    Ok((y5, err))
}

enum Check {
    Continue(HermitianMetric),
    Stop(Termination, Option<HermitianMetric>),
}

fn check_state(x: &Coords, events: &EventThresholds) -> Check {
    match HermitianMetric::hermitize(from_coords(x)) {
        Err(_) => Check::Stop(Termination::Degenerate, None),
        Ok(g) => {
            let e = g.eigenvalues();
            if !e.iter().all(|v| v.is_finite()) {
                Check::Stop(Termination::BlowUp, None)
            } else if e[2] > events.blow_up_cap {
                Check::Stop(Termination::BlowUp, Some(g))
            } else if e[0] < events.degeneracy_floor {
                Check::Stop(Termination::Degenerate, Some(g))
            } else {
                Check::Continue(g)
            }
        }
    }
}

fn max_abs(x: &Coords) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Integrates the flow from `initial`.
///
/// Terminates at the horizon, when the right-hand side drops below
/// `stationary_tol` after having been above it, when an eigenvalue leaves
/// `[degeneracy_floor, blow_up_cap]`, when the adaptive step falls below
/// `dt_min`, or after `max_steps` steps.
pub fn integrate(
    initial: FlowState,
    c: &StructureConstants,
    params: ConnectionParams,
    config: &IntegratorConfig,
) -> Result<Trajectory> {
    config.validate()?;
    let sign = config.direction.sign();
    let mut sys = System { c, params, sign, stats: StepStats { min_dt: f64::INFINITY, ..StepStats::default() } };
    let record = |t: f64, g: HermitianMetric| -> Result<Sample> {
        Ok(Sample { state: FlowState::new(t, g), monitors: monitors(&g, c, params)? })
    };

    let mut samples = Vec::new();
    samples.push(record(initial.t, initial.g)?);
    let mut x = to_coords(initial.g.matrix());
    let mut g = initial.g;
    // elapsed time in the direction of integration
    let mut s = 0.0;
    let mut h = config.dt;
    let mut k1 = sys.eval(&x)?;
    let was_moving = max_abs(&k1) >= config.events.stationary_tol;
    let mut since_record = 0usize;

    let termination = loop {
        if s >= config.t_max {
            break Termination::ReachedHorizon;
        }
        if was_moving && max_abs(&k1) < config.events.stationary_tol {
            break Termination::Stationary;
        }
        if sys.stats.accepted >= config.max_steps {
            break Termination::StepLimit;
        }
        let remaining = config.t_max - s;
        let last = h >= remaining * (1.0 - 1e-10);
        let step = if last { remaining } else { h };

        let (next, taken) = match config.scheme {
            Scheme::Rk4Fixed => match rk4_step(&mut sys, &x, &k1, step) {
                Ok(y) => (y, step),
                Err(_) => break Termination::Degenerate,
            },
            Scheme::Rkf45Adaptive => {
                let trial = rkf45_step(&mut sys, &x, &k1, step);
                let accepted = match trial {
                    Ok((y, err)) => {
                        let mut norm: f64 = 0.0;
                        for i in 0..DIM {
                            let scale = config.abs_tol + config.rel_tol * x[i].abs().max(y[i].abs());
                            norm = norm.max(err[i].abs() / scale);
                        }
                        let pd = HermitianMetric::hermitize(from_coords(&y)).is_ok();
                        let factor = if norm > 0.0 { 0.9 * math::powf(norm, -0.2) } else { 5.0 };
                        if norm <= 1.0 && pd && y.iter().all(|v| v.is_finite()) {
                            h = step * factor.clamp(0.2, 5.0);
                            Some(y)
                        } else {
                            h = step * if norm.is_finite() && pd { factor.clamp(0.1, 0.9) } else { 0.25 };
                            None
                        }
                    }
                    Err(_) => {
                        h = step * 0.25;
                        None
                    }
                };
                match accepted {
                    Some(y) => (y, step),
                    None => {
                        sys.stats.rejected += 1;
                        if h < config.events.dt_min {
                            break Termination::StepUnderflow;
                        }
                        continue;
                    }
                }
            }
        };

        sys.stats.accepted += 1;
        sys.stats.min_dt = sys.stats.min_dt.min(taken);
        sys.stats.max_dt = sys.stats.max_dt.max(taken);
        s = if last { config.t_max } else { s + taken };
        x = next;
        let t = initial.t + sign * s;
        match check_state(&x, &config.events) {
            Check::Continue(next_g) => {
                g = next_g;
                x = to_coords(g.matrix());
            }
            Check::Stop(reason, last_g) => {
                if let Some(lg) = last_g {
                    if let Ok(sample) = record(t, lg) {
                        samples.push(sample);
                    }
                }
                let stats = finish(sys.stats);
                return Ok(Trajectory { samples, termination: reason, stats });
            }
        }
        since_record += 1;
        if since_record >= config.record_stride {
            samples.push(record(t, g)?);
            since_record = 0;
        }
        k1 = match sys.eval(&x) {
            Ok(k) => k,
            Err(_) => break Termination::Degenerate,
        };
    };
    let t = initial.t + sign * s;
    if samples.last().map(|p| p.state.t) != Some(t) {
        samples.push(record(t, g)?);
    }
    Ok(Trajectory { samples, termination, stats: finish(sys.stats) })
}

fn finish(mut stats: StepStats) -> StepStats {
    if stats.accepted == 0 {
        stats.min_dt = 0.0;
    }
    stats
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{catalog, GroupKind};

    #[test]
    fn abelian_reaches_horizon_unchanged() {
        let g = HermitianMetric::diagonal([1.0, 2.0, 3.0]).unwrap();
        let cfg = IntegratorConfig { t_max: 2.0, dt: 0.1, ..Default::default() };
        let tr =
            integrate(FlowState::new(0.0, g), &catalog(GroupKind::Abelian), ConnectionParams::with_beta(1.0), &cfg)
                .unwrap();
        assert_eq!(tr.termination, Termination::ReachedHorizon);
        assert_eq!(tr.final_time(), 2.0);
        assert!(tr.samples.iter().all(|s| s.state.g == g));
    }

    #[test]
    fn rk4_and_rkf45_agree_on_nilpotent() {
        let g = HermitianMetric::diagonal([2.0, 1.0, 1.0]).unwrap();
        let c = catalog(GroupKind::Nilpotent);
        let p = ConnectionParams::with_beta(1.0);
        let a = integrate(
            FlowState::new(0.0, g),
            &c,
            p,
            &IntegratorConfig { scheme: Scheme::Rk4Fixed, dt: 1e-2, t_max: 1.0, ..Default::default() },
        )
        .unwrap();
        let b =
            integrate(FlowState::new(0.0, g), &c, p, &IntegratorConfig { t_max: 1.0, ..Default::default() }).unwrap();
        let ga = a.last().state.g.entry(0, 0);
        let gb = b.last().state.g.entry(0, 0);
        assert!((ga - gb).norm() < 1e-8);
        assert_eq!(a.samples.len(), 101);
    }

    #[test]
    fn backward_time_decreases() {
        let g = HermitianMetric::diagonal([2.0, 1.0, 1.0]).unwrap();
        let cfg = IntegratorConfig { t_max: 0.5, direction: Direction::Backward, ..Default::default() };
        let tr =
            integrate(FlowState::new(1.0, g), &catalog(GroupKind::Nilpotent), ConnectionParams::with_beta(1.0), &cfg)
                .unwrap();
        assert_eq!(tr.final_time(), 0.5);
        assert!(tr.samples.windows(2).all(|w| w[1].state.t < w[0].state.t));
        assert!(tr.last().state.g.entry(0, 0).re < 2.0);
    }

    #[test]
    fn rejects_bad_config() {
        let g = HermitianMetric::identity();
        let cfg = IntegratorConfig { dt: -1.0, ..Default::default() };
        let r = integrate(FlowState::new(0.0, g), &catalog(GroupKind::Abelian), ConnectionParams::with_beta(1.0), &cfg);
        assert!(matches!(r, Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn step_limit() {
        let g = HermitianMetric::diagonal([2.0, 1.0, 1.0]).unwrap();
        let cfg =
            IntegratorConfig { scheme: Scheme::Rk4Fixed, dt: 1e-3, t_max: 10.0, max_steps: 5, ..Default::default() };
        let tr =
            integrate(FlowState::new(0.0, g), &catalog(GroupKind::Nilpotent), ConnectionParams::with_beta(1.0), &cfg)
                .unwrap();
        assert_eq!(tr.termination, Termination::StepLimit);
        assert_eq!(tr.stats.accepted, 5);
    }
}
