//! The anomaly flow as an ODE on Hermitian metrics.
//!
//! `d/dt g_{\bar a b} = 1/(2|Omega|) g^{d \bar p} conj(c^m_{ap}) (g_{\bar m s} - beta M_{ms}) c^s_{bd}`
//! with `M` the quartic kernel of `Tr(Rm ^ Rm)`.

mod integrate;
mod monitors;

pub use integrate::{
    integrate, Direction, EventThresholds, IntegratorConfig, Sample, Scheme, StepStats, Termination, Trajectory,
};
pub use monitors::{group_monitors, monitors, GroupMonitors, MonitorRecord};

use crate::algebra::StructureConstants;
use crate::curvature::{anomaly_form, anomaly_kernel, ConnectionParams};
use crate::geometry::{inverse_and_det, normalized_omega_squared, HermitianMetric};
use crate::linalg::{max_abs3, zero3, zero_t3, Mat3};
use crate::math;
use crate::{Error, Result, C64};

/// Number of real coordinates of a Hermitian 3x3 matrix.
pub const DIM: usize = 9;

/// Real coordinates in the order
/// `re g11, re g22, re g33, re g12, im g12, re g13, im g13, re g23, im g23`.
pub type Coords = [f64; DIM];

pub const COORD_NAMES: [&str; DIM] =
    ["re_g11", "re_g22", "re_g33", "re_g12", "im_g12", "re_g13", "im_g13", "re_g23", "im_g23"];

const OFF_DIAGONAL: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

/// Reads the diagonal and the upper triangle.
pub fn to_coords(g: &Mat3) -> Coords {
    let mut x = [0.0; DIM];
    for a in 0..3 {
        x[a] = g[a][a].re;
    }
    for (k, &(a, b)) in OFF_DIAGONAL.iter().enumerate() {
        x[3 + 2 * k] = g[a][b].re;
        x[4 + 2 * k] = g[a][b].im;
    }
    x
}

/// Hermitian matrix with the given coordinates.
pub fn from_coords(x: &Coords) -> Mat3 {
    let mut g = zero3();
    for a in 0..3 {
        g[a][a] = C64::new(x[a], 0.0);
    }
    for (k, &(a, b)) in OFF_DIAGONAL.iter().enumerate() {
        let z = C64::new(x[3 + 2 * k], x[4 + 2 * k]);
        g[a][b] = z;
        g[b][a] = z.conj();
    }
    g
}

/// Point of the flow: time and metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowState {
    pub t: f64,
    pub g: HermitianMetric,
}

impl FlowState {
    pub fn new(t: f64, g: HermitianMetric) -> Self {
        FlowState { t, g }
    }
}

/// `d/dt g_{\bar a b}`. Not symmetrized: Hermiticity of the output is a property of the formula.
pub fn rhs(g: &HermitianMetric, c: &StructureConstants, params: ConnectionParams) -> Result<Mat3> {
    let (ginv, det) = inverse_and_det(g)?;
    let cc = c.as_array();
    let k = anomaly_kernel(cc, g.matrix(), &ginv, params.beta());
    // x[m][b][d] = sum_s K[m][s] c^s_{bd}
    let mut x = zero_t3();
    for m in 0..3 {
        for b in 0..3 {
            for d in 0..3 {
                x[m][b][d] = (0..3).map(|s| k[m][s] * cc[s][b][d]).sum();
            }
        }
    }
    // y[m][b][p] = sum_d x[m][b][d] g^{d \bar p}
    let mut y = zero_t3();
    for m in 0..3 {
        for b in 0..3 {
            for p in 0..3 {
                y[m][b][p] = (0..3).map(|d| x[m][b][d] * ginv[d][p]).sum();
            }
        }
    }
    // 1/(2|Omega|) = sqrt(det g) / 2
    let pref = math::sqrt(det) / 2.0;
    let mut out = zero3();
    for a in 0..3 {
        for b in 0..3 {
            let mut s = C64::new(0.0, 0.0);
            for m in 0..3 {
                for p in 0..3 {
                    s += cc[m][a][p].conj() * y[m][b][p];
                }
            }
            out[a][b] = s * pref;
        }
    }
    Ok(out)
}

/// [`rhs`] in real coordinates. Fails with `DegenerateMetric` outside the positive cone.
pub fn rhs_coords(x: &Coords, c: &StructureConstants, params: ConnectionParams) -> Result<Coords> {
    let g = HermitianMetric::hermitize(from_coords(x))?;
    Ok(to_coords(&rhs(&g, c, params)?))
}

/// Max-modulus of the right-hand side.
pub fn rhs_norm(g: &HermitianMetric, c: &StructureConstants, params: ConnectionParams) -> Result<f64> {
    Ok(max_abs3(&rhs(g, c, params)?))
}

/// Largest entrywise gap between the central difference of `|Omega| omega^2`
/// along `g + t rhs(g)` and the anomaly form at `g`.
pub fn flow_form_consistency(
    g: &HermitianMetric,
    c: &StructureConstants,
    params: ConnectionParams,
    h: f64,
) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::InvalidConfig("finite-difference step must be positive"));
    }
    let v = rhs(g, c, params)?;
    let shifted = |s: f64| -> Result<HermitianMetric> {
        let mut m = *g.matrix();
        for a in 0..3 {
            for b in 0..3 {
                m[a][b] += v[a][b] * s;
            }
        }
        HermitianMetric::hermitize(m)
    };
    let plus = normalized_omega_squared(&shifted(h)?)?;
    let minus = normalized_omega_squared(&shifted(-h)?)?;
    let derivative = plus.sub(&minus).scale(0.5 / h);
    Ok(derivative.max_abs_diff(&anomaly_form(c, g, params)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{catalog, GroupKind};
    use crate::linalg::{diag3, hermitian_defect, sub3};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn metric() -> HermitianMetric {
        HermitianMetric::new([
            [c(1.3, 0.0), c(0.2, 0.4), c(-0.3, 0.1)],
            [c(0.2, -0.4), c(0.9, 0.0), c(0.1, 0.2)],
            [c(-0.3, -0.1), c(0.1, -0.2), c(2.1, 0.0)],
        ])
        .unwrap()
    }

    #[test]
    fn coordinate_round_trip() {
        let g = *metric().matrix();
        let x = to_coords(&g);
        assert_eq!(x[3], 0.2);
        assert_eq!(x[4], 0.4);
        assert_eq!(from_coords(&x), g);
    }

    #[test]
    fn abelian_is_static() {
        let p = ConnectionParams::new(1.0, 3.0);
        assert_eq!(rhs_norm(&metric(), &catalog(GroupKind::Abelian), p).unwrap(), 0.0);
    }

    #[test]
    fn nilpotent_at_identity() {
        for p in [ConnectionParams::new(1.0, 1.0), ConnectionParams::new(0.0, 0.0), ConnectionParams::new(-2.0, 5.0)] {
            let v = rhs(&HermitianMetric::identity(), &catalog(GroupKind::Nilpotent), p).unwrap();
            assert!(max_abs3(&sub3(&v, &diag3([0.5, 0.5, 0.0]))) < 1e-15);
        }
    }

    #[test]
    fn solvable_example_is_stationary() {
        let beta = 1.0;
        let one = c(1.0, 0.0);
        let g =
            HermitianMetric::new([[one, c(0.0, 0.0), one], [c(0.0, 0.0), one, one], [one, one, c(2.0 + beta, 0.0)]])
                .unwrap();
        let n = rhs_norm(&g, &catalog(GroupKind::Solvable), ConnectionParams::with_beta(beta)).unwrap();
        assert!(n < 1e-14);
    }

    #[test]
    fn output_is_hermitian() {
        let p = ConnectionParams::new(0.9, 1.4);
        for kind in GroupKind::ALL {
            let v = rhs(&metric(), &catalog(kind), p).unwrap();
            assert!(hermitian_defect(&v) < 1e-13);
        }
    }

    #[test]
    fn reduction_matches_form_flow() {
        let p = ConnectionParams::new(1.0, 1.2);
        for kind in GroupKind::ALL {
            let d = flow_form_consistency(&metric(), &catalog(kind), p, 1e-5).unwrap();
            assert!(d < 1e-8, "{kind}: {d}");
        }
    }
}
