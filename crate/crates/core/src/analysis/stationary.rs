use alloc::vec::Vec;

use crate::algebra::{GroupKind, StructureConstants};
use crate::curvature::ConnectionParams;
use crate::flow::{from_coords, rhs_coords, rhs_norm, to_coords, Coords, DIM};
use crate::geometry::{inverse_and_det, HermitianMetric};
use crate::linalg::{identity3, max_abs3, scale3, sub3, RealMatrix};
use crate::math;
use crate::{Error, Result, C64};

use super::eigen::eigenvalues;

/// Threshold on real parts used by [`classify_stability`].
pub const SPECTRAL_TOL: f64 = 1e-7;

const JACOBIAN_SHRINKS: usize = 3;
const LINE_SEARCH_HALVINGS: usize = 20;
/// Smallest eigenvalue ratio `min/max` of an acceptable stationary metric.
/// The right-hand side also decays towards the boundary of the positive cone,
/// so a small residual alone does not certify a stationary point.
pub const MIN_CONDITION: f64 = 1e-4;

/// Central-difference Jacobian of the right-hand side in real coordinates.
/// `h = None` uses `1e-6 (1 + max|g|)`.
pub fn jacobian(
    g: &HermitianMetric,
    c: &StructureConstants,
    params: ConnectionParams,
    h: Option<f64>,
) -> Result<RealMatrix> {
    let x0 = to_coords(g.matrix());
    let mut h = h.unwrap_or(1e-6 * (1.0 + max_abs3(g.matrix())));
    for _ in 0..=JACOBIAN_SHRINKS {
        if let Some(j) = try_jacobian(&x0, c, params, h) {
            return Ok(j);
        }
        h *= 0.5;
    }
    Err(Error::DegenerateMetric)
}

fn try_jacobian(x0: &Coords, c: &StructureConstants, params: ConnectionParams, h: f64) -> Option<RealMatrix> {
    let mut jac = RealMatrix::zeros(DIM);
    for k in 0..DIM {
        let mut xp = *x0;
        let mut xm = *x0;
        xp[k] += h;
        xm[k] -= h;
        let fp = rhs_coords(&xp, c, params).ok()?;
        let fm = rhs_coords(&xm, c, params).ok()?;
        for i in 0..DIM {
            jac[(i, k)] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    Some(jac)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    AsymptoticallyStable,
    Unstable,
    Marginal,
}

pub fn classify_stability(eigenvalues: &[C64], spectral_tol: f64) -> Stability {
    let max_re = eigenvalues.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    if max_re > spectral_tol {
        Stability::Unstable
    } else if max_re >= -spectral_tol {
        Stability::Marginal
    } else {
        Stability::AsymptoticallyStable
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub jacobian: RealMatrix,
    /// Sorted by real part.
    pub eigenvalues: Vec<C64>,
    pub stability: Stability,
    pub rhs_norm: f64,
}

/// Linearization of the flow at `g`.
pub fn spectrum(g: &HermitianMetric, c: &StructureConstants, params: ConnectionParams) -> Result<SpectrumReport> {
    let jac = jacobian(g, c, params, None)?;
    let ev = eigenvalues(&jac)?;
    Ok(SpectrumReport {
        stability: classify_stability(&ev, SPECTRAL_TOL),
        eigenvalues: ev,
        jacobian: jac,
        rhs_norm: rhs_norm(g, c, params)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StationaryClass {
    SolvableFamily,
    Sl2cUnique,
    AbelianAny,
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationaryReport {
    pub metric: HermitianMetric,
    pub rhs_norm: f64,
    pub classification: StationaryClass,
    pub converged: bool,
    pub iterations: usize,
    pub warning: Option<&'static str>,
}

fn norm2(x: &Coords) -> f64 {
    math::sqrt(x.iter().map(|v| v * v).sum())
}

fn max_norm(x: &Coords) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Minimum-norm-leaning Newton direction: solves `(J^T J + mu I) d = -J^T f`.
fn newton_direction(jac: &RealMatrix, f: &Coords) -> Result<Coords> {
    let jt = jac.transpose();
    let mut normal = jt.mul(jac);
    let diag_max = (0..DIM).map(|i| normal[(i, i)]).fold(0.0, f64::max);
    let mu = 1e-14 * diag_max + f64::MIN_POSITIVE;
    for i in 0..DIM {
        normal[(i, i)] += mu;
    }
    let rhs: Vec<f64> = jt.mul_vec(f).into_iter().map(|v| -v).collect();
    let d = normal.solve(&rhs, 0.0).ok_or(Error::SingularJacobian)?;
    let mut out = [0.0; DIM];
    out.copy_from_slice(&d);
    if out.iter().all(|v| v.is_finite()) {
        Ok(out)
    } else {
        Err(Error::SingularJacobian)
    }
}

/// Damped Newton iteration on the right-hand side, started at `guess`.
///
/// Steps are halved until the iterate stays positive definite and the
/// Euclidean norm of the right-hand side decreases.
pub fn find_stationary(
    c: &StructureConstants,
    params: ConnectionParams,
    guess: &HermitianMetric,
    max_iter: usize,
    tol: f64,
) -> Result<StationaryReport> {
    let warning = match c.kind() {
        Some(GroupKind::Solvable | GroupKind::SL2C) if params.beta() <= 0.0 => {
            Some("beta <= 0: this group has no stationary metric")
        }
        Some(GroupKind::Nilpotent) => Some("the nilpotent group has no stationary metric"),
        _ => None,
    };
    let mut x = to_coords(guess.matrix());
    let mut f = rhs_coords(&x, c, params)?;
    let mut iterations = 0;
    while max_norm(&f) > tol && iterations < max_iter {
        iterations += 1;
        let g = HermitianMetric::hermitize(from_coords(&x))?;
        let jac = jacobian(&g, c, params, None)?;
        let d = newton_direction(&jac, &f)?;
        let f_norm = norm2(&f);
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..=LINE_SEARCH_HALVINGS {
            let mut trial = x;
            for i in 0..DIM {
                trial[i] += step * d[i];
            }
            if let Ok(ft) = rhs_coords(&trial, c, params) {
                if norm2(&ft) < f_norm {
                    accepted = Some((trial, ft));
                    break;
                }
            }
            step *= 0.5;
        }
        match accepted {
            Some((xn, fnew)) => {
                x = xn;
                f = fnew;
                let ev = HermitianMetric::hermitize(from_coords(&x))?.eigenvalues();
                if ev[0] < MIN_CONDITION * ev[2] {
                    break;
                }
            }
            None => break,
        }
    }
    let metric = HermitianMetric::hermitize(from_coords(&x))?;
    let residual = rhs_norm(&metric, c, params)?;
    let ev = metric.eigenvalues();
    let interior = ev[0] >= MIN_CONDITION * ev[2];
    let converged = residual <= tol && interior;
    let classification = if converged { classify(&metric, c, params) } else { StationaryClass::None };
    let warning = if !interior {
        Some("iterate ran into the boundary of the positive cone")
    } else if converged && classification == StationaryClass::None {
        Some("the right-hand side vanishes at a metric outside the expected stationary set")
    } else {
        warning
    };
    Ok(StationaryReport { classification, metric, rhs_norm: residual, converged, iterations, warning })
}

fn classify(g: &HermitianMetric, c: &StructureConstants, params: ConnectionParams) -> StationaryClass {
    let beta = params.beta();
    match c.kind() {
        Some(GroupKind::Abelian) => StationaryClass::AbelianAny,
        Some(GroupKind::Solvable) if classify_solvable_stationary(g, beta, 1e-6) => StationaryClass::SolvableFamily,
        Some(GroupKind::SL2C) if beta > 0.0 => {
            let target = scale3(&identity3(), 2.0 * beta);
            if max_abs3(&sub3(g.matrix(), &target)) <= 1e-6 * (2.0 * beta).max(1.0) {
                StationaryClass::Sl2cUnique
            } else {
                StationaryClass::None
            }
        }
        _ => StationaryClass::None,
    }
}

/// `g12 = 0` and `g^{3 \bar 3} = 1/beta`, with the equivalent form
/// `|g13|^2/g11 + |g23|^2/g22 = g33 - beta` checked to the same tolerance
/// (relative to `max(1, g33)`).
pub fn classify_solvable_stationary(g: &HermitianMetric, beta: f64, tol: f64) -> bool {
    if !(beta > 0.0) {
        return false;
    }
    let m = g.matrix();
    if m[0][1].norm() > tol {
        return false;
    }
    let Ok((ginv, _)) = inverse_and_det(g) else {
        return false;
    };
    if (ginv[2][2].re - 1.0 / beta).abs() > tol {
        return false;
    }
    let lhs = m[0][2].norm_sqr() / m[0][0].re + m[1][2].norm_sqr() / m[1][1].re;
    (lhs - (m[2][2].re - beta)).abs() <= tol * m[2][2].re.max(1.0)
}
