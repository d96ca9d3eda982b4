//! Curvature of the Yano-Gauduchon line `nabla^(kappa)` and the anomaly form
//! `Phi = i ddbar omega - (alpha'/4) Tr(Rm ^ Rm)`.
//!
//! Curvature blocks are computed in a unitary frame; general metrics go through
//! [`orthonormalizing_basis`] and a pull-back of the resulting form.

use crate::algebra::{transform_structure_constants, StructureConstants};
use crate::geometry::{i_del_delbar_omega, inverse_and_det, orthonormalizing_basis, FourForm22, HermitianMetric};
use crate::linalg::{zero3, zero_t3, zero_t4, Mat3, Tensor3, Tensor4};
use crate::{Result, C64};

/// A point on the connection line together with the string tension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectionParams {
    pub kappa: f64,
    pub alpha_prime: f64,
}

impl ConnectionParams {
    pub const CHERN: f64 = 0.0;
    pub const LICHNEROWICZ: f64 = 0.5;
    pub const BISMUT: f64 = 1.0;

    pub fn new(kappa: f64, alpha_prime: f64) -> Self {
        ConnectionParams { kappa, alpha_prime }
    }

    pub fn chern(alpha_prime: f64) -> Self {
        Self::new(Self::CHERN, alpha_prime)
    }

    pub fn lichnerowicz(alpha_prime: f64) -> Self {
        Self::new(Self::LICHNEROWICZ, alpha_prime)
    }

    pub fn bismut(alpha_prime: f64) -> Self {
        Self::new(Self::BISMUT, alpha_prime)
    }

    /// Bismut connection with `alpha'` chosen so that `beta()` returns `beta`.
    pub fn with_beta(beta: f64) -> Self {
        Self::bismut(2.0 * beta)
    }

    /// `tau = 2 kappa^2 (2 kappa - 1)`.
    pub fn tau(&self) -> f64 {
        tau(self.kappa)
    }

    /// `beta = alpha' tau / 4`.
    pub fn beta(&self) -> f64 {
        self.alpha_prime * self.tau() / 4.0
    }
}

pub fn tau(kappa: f64) -> f64 {
    2.0 * kappa * kappa * (2.0 * kappa - 1.0)
}

/// Connection coefficients in a unitary frame:
/// `holomorphic[a][b][d] = A^a_{bd}` and `mixed[a][b][d] = A^a_{\bar b d}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionCoefficients {
    pub holomorphic: Tensor3,
    pub mixed: Tensor3,
}

/// `A^a_{bd} = kappa c^a_{bd}`, `A^a_{\bar b d} = -kappa conj(c^d_{ba})`.
pub fn connection_coefficients(c: &StructureConstants, kappa: f64) -> ConnectionCoefficients {
    let cc = c.as_array();
    let mut holomorphic = zero_t3();
    let mut mixed = zero_t3();
    for a in 0..3 {
        for b in 0..3 {
            for d in 0..3 {
                holomorphic[a][b][d] = cc[a][b][d] * kappa;
                mixed[a][b][d] = -cc[d][b][a].conj() * kappa;
            }
        }
    }
    ConnectionCoefficients { holomorphic, mixed }
}

/// Curvature blocks in a unitary frame, each indexed `[k][j][p][q]`:
/// `r20 = R_{kj}^p_q`, `r02 = R_{\bar k \bar j}^p_q`, `r11 = R_{\bar k j}^p_q`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureTensor {
    pub r20: Tensor4,
    pub r02: Tensor4,
    pub r11: Tensor4,
}

impl CurvatureTensor {
    /// Largest violation of the antisymmetry and conjugation relations between blocks.
    pub fn symmetry_residual(&self) -> f64 {
        let mut r: f64 = 0.0;
        for k in 0..3 {
            for j in 0..3 {
                for p in 0..3 {
                    for q in 0..3 {
                        r = r
                            .max((self.r20[k][j][p][q] + self.r20[j][k][p][q]).norm())
                            .max((self.r02[k][j][p][q] + self.r02[j][k][p][q]).norm())
                            .max((self.r02[k][j][p][q] + self.r20[k][j][q][p].conj()).norm())
                            .max((self.r11[k][j][p][q] - self.r11[j][k][q][p].conj()).norm());
                    }
                }
            }
        }
        r
    }

    pub fn max_abs(&self) -> f64 {
        [&self.r20, &self.r02, &self.r11]
            .iter()
            .flat_map(|t| t.iter().flatten().flatten().flatten())
            .fold(0.0, |m, z| m.max(z.norm()))
    }
}

/// Curvature of `nabla^(kappa)` for the metric that makes the frame unitary.
pub fn curvature_orthonormal(c: &StructureConstants, kappa: f64) -> CurvatureTensor {
    let cc = c.as_array();
    let s = kappa - kappa * kappa;
    let k2 = kappa * kappa;
    let mut r20 = zero_t4();
    let mut r02 = zero_t4();
    let mut r11 = zero_t4();
    for k in 0..3 {
        for j in 0..3 {
            for p in 0..3 {
                for q in 0..3 {
                    let mut a = C64::new(0.0, 0.0);
                    let mut b = C64::new(0.0, 0.0);
                    let mut m = C64::new(0.0, 0.0);
                    for r in 0..3 {
                        a += cc[r][k][j] * cc[p][r][q];
                        b += cc[r][k][j] * cc[q][r][p];
                        m += -cc[p][j][r] * cc[q][k][r].conj() + cc[r][k][p].conj() * cc[r][j][q];
                    }
                    r20[k][j][p][q] = a * s;
                    r02[k][j][p][q] = -b.conj() * s;
                    r11[k][j][p][q] = m * k2;
                }
            }
        }
    }
    CurvatureTensor { r20, r02, r11 }
}

/// Curvature of `nabla^(kappa)` for `g`, expressed in a `g`-unitary frame
/// `f_i = e_r P^r_i` with `P = orthonormalizing_basis(g)`.
pub fn curvature_in_unitary_frame(c: &StructureConstants, g: &HermitianMetric, kappa: f64) -> Result<CurvatureTensor> {
    let basis = orthonormalizing_basis(g)?;
    Ok(curvature_orthonormal(&transform_structure_constants(c, &basis), kappa))
}

/// `M[m][s] = sum g_{\bar l i} g^{n \bar j} conj(c^l_{mj}) c^i_{sn}`, the quartic kernel
/// shared by `Tr(Rm ^ Rm)` and the flow.
pub(crate) fn quartic_kernel(c: &Tensor3, g: &Mat3, ginv: &Mat3) -> Mat3 {
    // u[l][s][j] = sum_{i,n} g_{\bar l i} c^i_{sn} g^{n \bar j}
    let mut gc = zero_t3();
    for l in 0..3 {
        for s in 0..3 {
            for n in 0..3 {
                gc[l][s][n] = (0..3).map(|i| g[l][i] * c[i][s][n]).sum();
            }
        }
    }
    let mut u = zero_t3();
    for l in 0..3 {
        for s in 0..3 {
            for j in 0..3 {
                u[l][s][j] = (0..3).map(|n| gc[l][s][n] * ginv[n][j]).sum();
            }
        }
    }
    let mut m = zero3();
    for a in 0..3 {
        for s in 0..3 {
            let mut acc = C64::new(0.0, 0.0);
            for l in 0..3 {
                for j in 0..3 {
                    acc += c[l][a][j].conj() * u[l][s][j];
                }
            }
            m[a][s] = acc;
        }
    }
    m
}

/// `F[a][b][c][d] = scale * sum conj(c^m_{ab}) k[m][s] c^s_{cd}`.
fn sandwich(c: &Tensor3, k: &Mat3, scale: f64) -> FourForm22 {
    let mut kc = zero_t3();
    for m in 0..3 {
        for x in 0..3 {
            for y in 0..3 {
                kc[m][x][y] = (0..3).map(|s| k[m][s] * c[s][x][y]).sum();
            }
        }
    }
    let mut f = zero_t4();
    for a in 0..3 {
        for b in 0..3 {
            for x in 0..3 {
                for y in 0..3 {
                    let v: C64 = (0..3).map(|m| c[m][a][b].conj() * kc[m][x][y]).sum();
                    f[a][b][x][y] = v * scale;
                }
            }
        }
    }
    FourForm22::from_antisymmetric(f)
}

/// `Tr(Rm ^ Rm) = (tau/4) g_{\bar l i} g^{n \bar j} conj(c^m_{ab}) conj(c^l_{mj}) c^i_{sn} c^s_{cd}`
/// in the frame `e^d ^ e^c ^ \bar e^b ^ \bar e^a`.
pub fn tr_rm_wedge_rm(c: &StructureConstants, g: &HermitianMetric, kappa: f64) -> Result<FourForm22> {
    let (ginv, _) = inverse_and_det(g)?;
    let k = quartic_kernel(c.as_array(), g.matrix(), &ginv);
    Ok(sandwich(c.as_array(), &k, tau(kappa) / 4.0))
}

/// `Tr(Rm ^ Rm)` assembled from the curvature blocks in a `g`-unitary frame and
/// pulled back to the original frame.
pub fn tr_rm_wedge_rm_by_frame(c: &StructureConstants, g: &HermitianMetric, kappa: f64) -> Result<FourForm22> {
    let basis = orthonormalizing_basis(g)?;
    let k = transform_structure_constants(c, &basis);
    let parts = wedge_trace(&curvature_orthonormal(&k, kappa));
    Ok(FourForm22::from_antisymmetric(scale4(&parts.c22, 0.25)).pull_back(&basis))
}

/// Components `T_{XYZW}` of `Tr(Rm ^ Rm)` in a unitary frame, split by type.
/// Barred slots come first in each array:
/// `c40[i][j][k][l] = T_{ijkl}`, `c31[l][i][j][k] = T_{\bar l ijk}`,
/// `c22[k][l][i][j] = T_{\bar k \bar l ij}`, `c13[i][j][k][l] = T_{\bar i \bar j \bar k l}`,
/// `c04[i][j][k][l] = T_{\bar i \bar j \bar k \bar l}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceComponents {
    pub c40: Tensor4,
    pub c31: Tensor4,
    pub c22: Tensor4,
    pub c13: Tensor4,
    pub c04: Tensor4,
}

fn max_abs4(t: &Tensor4) -> f64 {
    t.iter().flatten().flatten().flatten().fold(0.0, |m, z| m.max(z.norm()))
}

fn scale4(t: &Tensor4, s: f64) -> Tensor4 {
    t.map(|x| x.map(|y| y.map(|z| z.map(|w| w * s))))
}

impl TraceComponents {
    /// Largest entry among the components that are not of type (2,2).
    pub fn off_type_max(&self) -> f64 {
        [&self.c40, &self.c31, &self.c13, &self.c04].into_iter().map(max_abs4).fold(0.0, f64::max)
    }

    pub fn mixed_max(&self) -> f64 {
        max_abs4(&self.c31).max(max_abs4(&self.c13))
    }

    pub fn pure_max(&self) -> f64 {
        max_abs4(&self.c40).max(max_abs4(&self.c04))
    }
}

pub fn full_tr_rm_wedge_rm_components(c: &StructureConstants, kappa: f64) -> TraceComponents {
    wedge_trace(&curvature_orthonormal(c, kappa))
}

/// Slot `0..3` is holomorphic, `3..6` antiholomorphic.
fn block(r: &CurvatureTensor, x: usize, y: usize) -> Mat3 {
    let mut out = zero3();
    for p in 0..3 {
        for q in 0..3 {
            out[p][q] = match (x < 3, y < 3) {
                (true, true) => r.r20[x][y][p][q],
                (false, false) => r.r02[x - 3][y - 3][p][q],
                (false, true) => r.r11[x - 3][y][p][q],
                (true, false) => -r.r11[y - 3][x][p][q],
            };
        }
    }
    out
}

fn wedge_trace(r: &CurvatureTensor) -> TraceComponents {
    let mut blocks = [[zero3(); 6]; 6];
    for (x, row) in blocks.iter_mut().enumerate() {
        for (y, b) in row.iter_mut().enumerate() {
            *b = block(r, x, y);
        }
    }
    let tr = |a: &Mat3, b: &Mat3| -> C64 {
        let mut s = C64::new(0.0, 0.0);
        for p in 0..3 {
            for q in 0..3 {
                s += a[p][q] * b[q][p];
            }
        }
        s
    };
    let t = |x: usize, y: usize, z: usize, w: usize| -> C64 {
        (tr(&blocks[x][y], &blocks[z][w]) - tr(&blocks[x][z], &blocks[y][w]) + tr(&blocks[x][w], &blocks[y][z])) * 2.0
    };
    let mut out = TraceComponents { c40: zero_t4(), c31: zero_t4(), c22: zero_t4(), c13: zero_t4(), c04: zero_t4() };
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
                    out.c40[i][j][k][l] = t(i, j, k, l);
                    out.c31[i][j][k][l] = t(i + 3, j, k, l);
                    out.c22[i][j][k][l] = t(i + 3, j + 3, k, l);
                    out.c13[i][j][k][l] = t(i + 3, j + 3, k + 3, l);
                    out.c04[i][j][k][l] = t(i + 3, j + 3, k + 3, l + 3);
                }
            }
        }
    }
    out
}

/// `Phi = i ddbar omega - (alpha'/4) Tr(Rm ^ Rm)`, evaluated term by term.
pub fn anomaly_form(c: &StructureConstants, g: &HermitianMetric, params: ConnectionParams) -> Result<FourForm22> {
    let ddbar = i_del_delbar_omega(c, g);
    let tr = tr_rm_wedge_rm(c, g, params.kappa)?;
    Ok(ddbar.sub(&tr.scale(params.alpha_prime / 4.0)))
}

/// `Phi = 1/4 conj(c^m_{ab}) (g_{\bar m s} - beta M_{ms}) c^s_{cd}` in one contraction.
pub fn anomaly_form_combined(
    c: &StructureConstants,
    g: &HermitianMetric,
    params: ConnectionParams,
) -> Result<FourForm22> {
    let (ginv, _) = inverse_and_det(g)?;
    Ok(sandwich(c.as_array(), &anomaly_kernel(c.as_array(), g.matrix(), &ginv, params.beta()), 0.25))
}

/// `g_{\bar m s} - beta M_{ms}`.
pub(crate) fn anomaly_kernel(c: &Tensor3, g: &Mat3, ginv: &Mat3, beta: f64) -> Mat3 {
    let m = quartic_kernel(c, g, ginv);
    let mut k = *g;
    for a in 0..3 {
        for b in 0..3 {
            k[a][b] -= m[a][b] * beta;
        }
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{catalog, GroupKind};

    fn metric() -> HermitianMetric {
        HermitianMetric::new([
            [C64::new(1.7, 0.0), C64::new(0.2, -0.3), C64::new(0.1, 0.5)],
            [C64::new(0.2, 0.3), C64::new(2.2, 0.0), C64::new(-0.4, 0.1)],
            [C64::new(0.1, -0.5), C64::new(-0.4, -0.1), C64::new(1.4, 0.0)],
        ])
        .unwrap()
    }

    fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
        match (i, j, k) {
            (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
            (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
            _ => 0.0,
        }
    }

    #[test]
    fn tau_and_beta() {
        assert_eq!(tau(0.0), 0.0);
        assert_eq!(tau(0.5), 0.0);
        assert_eq!(tau(1.0), 2.0);
        let p = ConnectionParams::with_beta(0.75);
        assert_eq!(p.beta(), 0.75);
        assert_eq!(ConnectionParams::new(2.0, 1.0).beta(), 6.0);
    }

    #[test]
    fn connection_coefficient_examples() {
        let nil = catalog(GroupKind::Nilpotent);
        let a0 = connection_coefficients(&nil, 0.0);
        assert!(a0.holomorphic.iter().chain(a0.mixed.iter()).flatten().flatten().all(|z| z.norm() == 0.0));
        let a1 = connection_coefficients(&nil, 1.0);
        assert_eq!(a1.holomorphic[2][0][1], C64::new(1.0, 0.0));
        assert_eq!(a1.holomorphic[2][1][0], C64::new(-1.0, 0.0));
        // A^1_{\bar 2 3} = -conj(c^3_{21}) = 1
        assert_eq!(a1.mixed[0][1][2], C64::new(1.0, 0.0));
        let a2 = connection_coefficients(&nil, 2.0);
        for a in 0..3 {
            for b in 0..3 {
                for d in 0..3 {
                    assert_eq!(a2.holomorphic[a][b][d], a1.holomorphic[a][b][d] * 2.0);
                    assert_eq!(a2.mixed[a][b][d], a1.mixed[a][b][d] * 2.0);
                }
            }
        }
    }

    #[test]
    fn curvature_vanishing_cases() {
        for kappa in [-1.0, 0.3, 1.0, 2.0] {
            assert_eq!(curvature_orthonormal(&catalog(GroupKind::Abelian), kappa).max_abs(), 0.0);
        }
        for kind in GroupKind::ALL {
            assert_eq!(curvature_orthonormal(&catalog(kind), 0.0).max_abs(), 0.0);
        }
    }

    #[test]
    fn sl2c_bismut_curvature() {
        let r = curvature_orthonormal(&catalog(GroupKind::SL2C), 1.0);
        assert!(max_abs4(&r.r20) == 0.0 && max_abs4(&r.r02) == 0.0);
        for k in 0..3 {
            for j in 0..3 {
                for p in 0..3 {
                    for q in 0..3 {
                        let e: f64 = (0..3)
                            .map(|x| {
                                -levi_civita(p, j, x) * levi_civita(q, k, x)
                                    + levi_civita(x, k, p) * levi_civita(x, j, q)
                            })
                            .sum();
                        assert!((r.r11[k][j][p][q] - C64::new(e, 0.0)).norm() < 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn curvature_symmetries() {
        for kind in GroupKind::ALL {
            for kappa in [-1.0, 0.0, 0.3, 0.5, 1.0, 2.0] {
                let r = curvature_in_unitary_frame(&catalog(kind), &metric(), kappa).unwrap();
                assert!(r.symmetry_residual() < 1e-13);
            }
        }
    }

    #[test]
    fn only_the_22_part_survives() {
        for kind in GroupKind::ALL {
            for kappa in [0.7, 1.0, -0.4] {
                let t = full_tr_rm_wedge_rm_components(&catalog(kind), kappa);
                assert!(t.off_type_max() < 1e-13, "{kind} {kappa}");
            }
        }
        let t = full_tr_rm_wedge_rm_components(&catalog(GroupKind::SL2C), 1.0);
        assert!(max_abs4(&t.c22) > 0.1);
    }

    #[test]
    fn trace_vanishes_at_chern_and_lichnerowicz() {
        for kind in GroupKind::ALL {
            for kappa in [0.0, 0.5] {
                assert_eq!(tr_rm_wedge_rm(&catalog(kind), &metric(), kappa).unwrap().max_abs(), 0.0);
            }
        }
    }

    #[test]
    fn trace_two_paths_agree() {
        for kind in GroupKind::ALL {
            for kappa in [1.0, 0.3, 2.0] {
                let c = catalog(kind);
                let direct = tr_rm_wedge_rm(&c, &metric(), kappa).unwrap();
                let framed = tr_rm_wedge_rm_by_frame(&c, &metric(), kappa).unwrap();
                assert!(direct.max_abs_diff(&framed) < 1e-12, "{kind} {kappa}");
            }
        }
        let s = tr_rm_wedge_rm(&catalog(GroupKind::SL2C), &HermitianMetric::identity(), 1.0).unwrap();
        assert!(s.max_abs() > 0.1);
    }

    #[test]
    fn trace_scales_with_tau() {
        let c = catalog(GroupKind::SL2C);
        let t1 = tr_rm_wedge_rm(&c, &metric(), 1.0).unwrap();
        let t2 = tr_rm_wedge_rm(&c, &metric(), 2.0).unwrap();
        let ratio = tau(2.0) / tau(1.0);
        assert!(t2.max_abs_diff(&t1.clone().scale(ratio)) < 1e-12);
    }

    #[test]
    fn nilpotent_quartic_term_vanishes() {
        let c = catalog(GroupKind::Nilpotent);
        assert_eq!(tr_rm_wedge_rm(&c, &metric(), 1.0).unwrap().max_abs(), 0.0);
        let phi = anomaly_form(&c, &metric(), ConnectionParams::new(1.3, 0.8)).unwrap();
        assert!(phi.max_abs_diff(&i_del_delbar_omega(&c, &metric())) < 1e-15);
    }

    #[test]
    fn anomaly_form_paths_and_reality() {
        let params = ConnectionParams::new(0.8, 1.7);
        for kind in GroupKind::ALL {
            let c = catalog(kind);
            let a = anomaly_form(&c, &metric(), params).unwrap();
            let b = anomaly_form_combined(&c, &metric(), params).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-12);
            assert!(a.reality_residual() < 1e-12);
            assert!(a.antisymmetry_residual() < 1e-12);
        }
    }

    #[test]
    fn sl2c_stationary_metric_kills_phi() {
        for beta in [0.5, 1.0, 2.3] {
            let g = HermitianMetric::scaled_identity(2.0 * beta).unwrap();
            let phi = anomaly_form(&catalog(GroupKind::SL2C), &g, ConnectionParams::with_beta(beta)).unwrap();
            assert!(phi.max_abs() < 1e-13);
        }
    }
}
