use alloc::vec::Vec;

use crate::algebra::{GroupKind, StructureConstants};
use crate::curvature::ConnectionParams;
use crate::geometry::{inverse_and_det, HermitianMetric};
use crate::math;
use crate::Result;

use super::rhs_norm;

/// Relative tolerance for the equal-eigenvalue flags.
const EQUAL_PAIR_TOL: f64 = 1e-9;

/// Quantities evaluated at every recorded sample.
#[derive(Debug, Clone, PartialEq)]
pub struct MonitorRecord {
    pub det_g: f64,
    pub omega_norm: f64,
    pub rhs_norm: f64,
    pub group: GroupMonitors,
}

/// Group-specific quantities that the case analysis predicts to be conserved or monotone.
#[derive(Debug, Clone, PartialEq)]
pub enum GroupMonitors {
    None,
    Nilpotent {
        lambda3: f64,
        ratio12: f64,
        off_diagonal: f64,
    },
    Solvable {
        /// `g22 / g11`
        a: f64,
        /// `|g13| / g11`
        b: f64,
        /// `|g23| / g11`
        c: f64,
        /// `g11^2 g^{33}`
        d: f64,
        /// `|g12| / g11`
        g12_ratio: f64,
        g12_abs: f64,
        g33_upper: f64,
    },
    Sl2c {
        /// Descending.
        eigenvalues: [f64; 3],
        off_diagonal: f64,
        /// Pairs (1,2), (1,3), (2,3) of the descending eigenvalues.
        equal_pairs: [bool; 3],
    },
}

impl GroupMonitors {
    pub fn columns(&self) -> &'static [&'static str] {
        match self {
            GroupMonitors::None => &[],
            GroupMonitors::Nilpotent { .. } => &["lambda3", "ratio12", "off_diagonal"],
            GroupMonitors::Solvable { .. } => &["a", "b", "c", "d", "g12_ratio", "g12_abs", "g33_upper"],
            GroupMonitors::Sl2c { .. } => &["lambda1", "lambda2", "lambda3", "off_diagonal", "eq12", "eq13", "eq23"],
        }
    }

    /// Values in the order of [`GroupMonitors::columns`]; flags as 0 or 1.
    pub fn values(&self) -> Vec<f64> {
        let flag = |b: bool| if b { 1.0 } else { 0.0 };
        match *self {
            GroupMonitors::None => Vec::new(),
            GroupMonitors::Nilpotent { lambda3, ratio12, off_diagonal } => alloc::vec![lambda3, ratio12, off_diagonal],
            GroupMonitors::Solvable { a, b, c, d, g12_ratio, g12_abs, g33_upper } => {
                alloc::vec![a, b, c, d, g12_ratio, g12_abs, g33_upper]
            }
            GroupMonitors::Sl2c { eigenvalues, off_diagonal, equal_pairs } => alloc::vec![
                eigenvalues[0],
                eigenvalues[1],
                eigenvalues[2],
                off_diagonal,
                flag(equal_pairs[0]),
                flag(equal_pairs[1]),
                flag(equal_pairs[2]),
            ],
        }
    }

    /// Column names whose values the flow should conserve for the given data.
    pub fn conserved(&self) -> &'static [&'static str] {
        match self {
            GroupMonitors::Nilpotent { .. } => &["lambda3", "ratio12"],
            GroupMonitors::Solvable { .. } => &["a", "b", "c", "d", "g12_ratio"],
            _ => &[],
        }
    }
}

pub fn group_monitors(g: &HermitianMetric, kind: Option<GroupKind>) -> Result<GroupMonitors> {
    let m = g.matrix();
    Ok(match kind {
        Some(GroupKind::Nilpotent) => GroupMonitors::Nilpotent {
            lambda3: m[2][2].re,
            ratio12: m[0][0].re / m[1][1].re,
            off_diagonal: g.off_diagonal_max(),
        },
        Some(GroupKind::Solvable) => {
            let (ginv, _) = inverse_and_det(g)?;
            let g11 = m[0][0].re;
            GroupMonitors::Solvable {
                a: m[1][1].re / g11,
                b: m[0][2].norm() / g11,
                c: m[1][2].norm() / g11,
                d: g11 * g11 * ginv[2][2].re,
                g12_ratio: m[0][1].norm() / g11,
                g12_abs: m[0][1].norm(),
                g33_upper: ginv[2][2].re,
            }
        }
        Some(GroupKind::SL2C) => {
            let e = g.eigenvalues();
            let eigenvalues = [e[2], e[1], e[0]];
            let eq = |x: f64, y: f64| math::abs(x - y) <= EQUAL_PAIR_TOL * x.abs().max(y.abs()).max(1.0);
            GroupMonitors::Sl2c {
                eigenvalues,
                off_diagonal: g.off_diagonal_max(),
                equal_pairs: [
                    eq(eigenvalues[0], eigenvalues[1]),
                    eq(eigenvalues[0], eigenvalues[2]),
                    eq(eigenvalues[1], eigenvalues[2]),
                ],
            }
        }
        _ => GroupMonitors::None,
    })
}

/// Monitor values at `g`; the group is taken from the catalog tag of `c`.
pub fn monitors(g: &HermitianMetric, c: &StructureConstants, params: ConnectionParams) -> Result<MonitorRecord> {
    let (_, det) = inverse_and_det(g)?;
    Ok(MonitorRecord {
        det_g: det,
        omega_norm: 1.0 / math::sqrt(det),
        rhs_norm: rhs_norm(g, c, params)?,
        group: group_monitors(g, c.kind())?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::catalog;
    use crate::C64;

    #[test]
    fn nilpotent_record() {
        let g = HermitianMetric::diagonal([2.0, 1.0, 3.0]).unwrap();
        let r = monitors(&g, &catalog(GroupKind::Nilpotent), ConnectionParams::with_beta(1.0)).unwrap();
        assert_eq!(r.det_g, 6.0);
        assert_eq!(r.group, GroupMonitors::Nilpotent { lambda3: 3.0, ratio12: 2.0, off_diagonal: 0.0 });
        assert_eq!(r.group.values().len(), r.group.columns().len());
    }

    #[test]
    fn solvable_record() {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        let g = HermitianMetric::new([[one, zero, one], [zero, one, one], [one, one, C64::new(3.0, 0.0)]]).unwrap();
        match group_monitors(&g, Some(GroupKind::Solvable)).unwrap() {
            GroupMonitors::Solvable { a, b, c, d, g12_ratio, g33_upper, .. } => {
                assert_eq!((a, b, c, g12_ratio), (1.0, 1.0, 1.0, 0.0));
                assert!((g33_upper - 1.0).abs() < 1e-15);
                assert!((d - 1.0).abs() < 1e-15);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sl2c_record() {
        let g = HermitianMetric::diagonal([1.0, 3.0, 1.0]).unwrap();
        match group_monitors(&g, Some(GroupKind::SL2C)).unwrap() {
            GroupMonitors::Sl2c { eigenvalues, equal_pairs, .. } => {
                assert!((eigenvalues[0] - 3.0).abs() < 1e-14);
                assert_eq!(equal_pairs, [false, false, true]);
            }
            other => panic!("{other:?}"),
        }
    }
}
