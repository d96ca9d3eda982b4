//! Left-invariant Hermitian metrics and the forms built from them.
//!
//! A metric is stored as `g[a][b] = g_{\bar a b}`, so `g[b][a] = conj(g[a][b])`
//! and `omega = i g_{\bar b a} e^a ^ \bar e^b`. The inverse `g^{a \bar b}` is the
//! ordinary matrix inverse: `sum_b g^{a \bar b} g_{\bar b c} = delta^a_c`.
//!
//! (2,2)-forms are stored as [`FourForm22`] with `F[a][b][c][d]` the coefficient
//! of `e^d ^ e^c ^ \bar e^b ^ \bar e^a`, summed over all index values.

use crate::algebra::{transform_structure_constants, BasisChange, StructureConstants};
use crate::linalg::{
    adjoint, cholesky3, det3, diag3, hermitian_defect, hermitian_eigenvalues, hermitian_part, identity3, inverse3,
    max_abs3, scale3, zero_t3, zero_t4, zero_t5, Mat3, Tensor3, Tensor4, Tensor5,
};
use crate::math;
use crate::{Error, Result, C64};

/// Hermitian defect accepted by [`HermitianMetric::new`], relative to `max(1, max|g|)`.
pub const HERMITIAN_TOL: f64 = 1e-14;

/// Positive-definite Hermitian 3x3 matrix `g_{\bar a b}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermitianMetric {
    g: Mat3,
}

impl HermitianMetric {
    /// Validates Hermiticity (to [`HERMITIAN_TOL`]) and positive definiteness.
    pub fn new(g: Mat3) -> Result<Self> {
        let deviation = hermitian_defect(&g);
        if !(deviation <= HERMITIAN_TOL * max_abs3(&g).max(1.0)) {
            return Err(Error::NotHermitian { deviation });
        }
        Self::hermitize(g)
    }

    /// Replaces `g` by `(g + g^H) / 2` and checks positive definiteness.
    pub fn hermitize(g: Mat3) -> Result<Self> {
        let g = hermitian_part(&g);
        cholesky3(&g).ok_or(Error::DegenerateMetric)?;
        Ok(HermitianMetric { g })
    }

    pub fn identity() -> Self {
        HermitianMetric { g: identity3() }
    }

    pub fn diagonal(lambda: [f64; 3]) -> Result<Self> {
        Self::hermitize(diag3(lambda))
    }

    pub fn scaled_identity(s: f64) -> Result<Self> {
        Self::diagonal([s, s, s])
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.g
    }

    /// `g_{\bar a b}`, zero-based.
    pub fn entry(&self, a: usize, b: usize) -> C64 {
        self.g[a][b]
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 3] {
        hermitian_eigenvalues(&self.g)
    }

    /// Largest modulus of an off-diagonal entry.
    pub fn off_diagonal_max(&self) -> f64 {
        let mut m: f64 = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                if a != b {
                    m = m.max(self.g[a][b].norm());
                }
            }
        }
        m
    }

    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::hermitize(scale3(&self.g, s))
    }
}

/// `(g^{a \bar b}, det g)`.
pub fn inverse_and_det(g: &HermitianMetric) -> Result<(Mat3, f64)> {
    let det = det3(&g.g).re;
    if !(det > 0.0) || !det.is_finite() {
        return Err(Error::DegenerateMetric);
    }
    let inv = inverse3(&g.g).ok_or(Error::DegenerateMetric)?;
    Ok((hermitian_part(&inv), det))
}

/// `|Omega|_omega = (det g)^{-1/2}` for `Omega = e^1 ^ e^2 ^ e^3`.
pub fn omega_norm(g: &HermitianMetric) -> Result<f64> {
    let (_, det) = inverse_and_det(g)?;
    Ok(1.0 / math::sqrt(det))
}

/// A frame change `P` with `P^H g P = I`, namely `P = (L^H)^{-1}` for the
/// Cholesky factor `g = L L^H`. Then `g = (P^{-1})^H P^{-1}` and
/// `g^{-1} = P P^H`.
pub fn orthonormalizing_basis(g: &HermitianMetric) -> Result<BasisChange> {
    let l = cholesky3(&g.g).ok_or(Error::DegenerateMetric)?;
    let p = inverse3(&adjoint(&l)).ok_or(Error::DegenerateMetric)?;
    BasisChange::with_tolerance(p, 0.0)
}

/// Torsion form `H = i d omega`, as `H[d][a][b] = H_{\bar d a b}` with
/// `H = 1/2 H_{\bar d a b} e^b ^ e^a ^ \bar e^d`.
///
/// Evaluated in an orthonormal frame, where `H_{\bar d a b} = -k^d_{ab}`, and
/// pulled back to the original frame.
pub fn i_del_omega(c: &StructureConstants, g: &HermitianMetric) -> Result<Tensor3> {
    let basis = orthonormalizing_basis(g)?;
    let k = transform_structure_constants(c, &basis);
    let q = basis.inverse_matrix();
    let mut hf = zero_t3();
    for d in 0..3 {
        for a in 0..3 {
            for b in 0..3 {
                hf[d][a][b] = -k.get(d, a, b);
            }
        }
    }
    // f^i = Q^i_r e^r: barred slot picks up conj(Q), holomorphic slots Q.
    let mut out = zero_t3();
    for d in 0..3 {
        for a in 0..3 {
            for b in 0..3 {
                let mut s = C64::new(0.0, 0.0);
                for dd in 0..3 {
                    for aa in 0..3 {
                        for bb in 0..3 {
                            s += hf[dd][aa][bb] * q[dd][d].conj() * q[aa][a] * q[bb][b];
                        }
                    }
                }
                out[d][a][b] = s;
            }
        }
    }
    Ok(out)
}

/// `i ddbar omega = 1/4 g_{\bar i s} conj(c^i_{ab}) c^s_{cd} e^d ^ e^c ^ \bar e^b ^ \bar e^a`.
pub fn i_del_delbar_omega(c: &StructureConstants, g: &HermitianMetric) -> FourForm22 {
    let cc = c.as_array();
    let gm = &g.g;
    // u[i][c][d] = sum_s g_{\bar i s} c^s_{cd}
    let mut u = zero_t3();
    for i in 0..3 {
        for x in 0..3 {
            for y in 0..3 {
                u[i][x][y] = (0..3).map(|s| gm[i][s] * cc[s][x][y]).sum();
            }
        }
    }
    let mut f = zero_t4();
    for a in 0..3 {
        for b in 0..3 {
            for x in 0..3 {
                for y in 0..3 {
                    let s: C64 = (0..3).map(|i| cc[i][a][b].conj() * u[i][x][y]).sum();
                    f[a][b][x][y] = s * 0.25;
                }
            }
        }
    }
    FourForm22 { f }
}

/// `omega^2` as a (2,2)-form: `F[a][b][c][d] = (g_{\bar a c} g_{\bar b d} - g_{\bar a d} g_{\bar b c}) / 2`.
pub fn omega_squared(g: &HermitianMetric) -> FourForm22 {
    let gm = &g.g;
    let mut f = zero_t4();
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                for d in 0..3 {
                    f[a][b][c][d] = (gm[a][c] * gm[b][d] - gm[a][d] * gm[b][c]) * 0.5;
                }
            }
        }
    }
    FourForm22 { f }
}

/// `|Omega|_omega omega^2`, the quantity evolved by the anomaly flow.
pub fn normalized_omega_squared(g: &HermitianMetric) -> Result<FourForm22> {
    Ok(omega_squared(g).scale(omega_norm(g)?))
}

/// Coefficients of `d omega^2 = d omega^2` restricted to its (3,2) part,
/// `sum 1/2 (g_{\bar p r} g_{\bar q c} - g_{\bar p c} g_{\bar q r}) c^r_{ab} e^a ^ e^b ^ e^c ^ \bar e^p ^ \bar e^q`,
/// returned alternated over `(a, b, c)` as `out[a][b][c][p][q]`.
///
/// The raw summand is not alternating in `(a, b, c)`; only its alternation is
/// the form, and the form vanishes iff the metric is balanced.
pub fn del_omega_squared(c: &StructureConstants, g: &HermitianMetric) -> Tensor5 {
    let cc = c.as_array();
    let gm = &g.g;
    let mut raw = zero_t5();
    for a in 0..3 {
        for b in 0..3 {
            for x in 0..3 {
                for p in 0..3 {
                    for q in 0..3 {
                        let s: C64 = (0..3).map(|r| (gm[p][r] * gm[q][x] - gm[p][x] * gm[q][r]) * cc[r][a][b]).sum();
                        raw[a][b][x][p][q] = s * 0.5;
                    }
                }
            }
        }
    }
    const PERMS: [([usize; 3], f64); 6] =
        [([0, 1, 2], 1.0), ([1, 2, 0], 1.0), ([2, 0, 1], 1.0), ([1, 0, 2], -1.0), ([0, 2, 1], -1.0), ([2, 1, 0], -1.0)];
    let mut out = zero_t5();
    for a in 0..3 {
        for b in 0..3 {
            for x in 0..3 {
                let idx = [a, b, x];
                for p in 0..3 {
                    for q in 0..3 {
                        let mut s = C64::new(0.0, 0.0);
                        for (perm, sign) in PERMS {
                            s += raw[idx[perm[0]]][idx[perm[1]]][idx[perm[2]]][p][q] * sign;
                        }
                        out[a][b][x][p][q] = s / 6.0;
                    }
                }
            }
        }
    }
    out
}

pub fn max_abs_t5(t: &Tensor5) -> f64 {
    t.iter().flatten().flatten().flatten().flatten().fold(0.0, |m, z| m.max(z.norm()))
}

/// Coefficients of a (2,2)-form in the frame `e^d ^ e^c ^ \bar e^b ^ \bar e^a`,
/// antisymmetric in `(a, b)` and in `(c, d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourForm22 {
    f: Tensor4,
}

impl FourForm22 {
    pub fn zero() -> Self {
        FourForm22 { f: zero_t4() }
    }

    /// Projects `raw` onto arrays antisymmetric in `(a, b)` and in `(c, d)`.
    pub fn from_raw(raw: &Tensor4) -> Self {
        let mut f = zero_t4();
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    for d in 0..3 {
                        f[a][b][c][d] = (raw[a][b][c][d] - raw[b][a][c][d] - raw[a][b][d][c] + raw[b][a][d][c]) * 0.25;
                    }
                }
            }
        }
        FourForm22 { f }
    }

    pub(crate) fn from_antisymmetric(f: Tensor4) -> Self {
        FourForm22 { f }
    }

    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> C64 {
        self.f[a][b][c][d]
    }

    pub fn as_array(&self) -> &Tensor4 {
        &self.f
    }

    fn entries(&self) -> impl Iterator<Item = &C64> {
        self.f.iter().flatten().flatten().flatten()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn max_abs_diff(&self, other: &FourForm22) -> f64 {
        self.entries().zip(other.entries()).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
    }

    /// Largest violation of antisymmetry in `(a, b)` or `(c, d)`.
    pub fn antisymmetry_residual(&self) -> f64 {
        let mut r: f64 = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    for d in 0..3 {
                        let v = self.f[a][b][c][d];
                        r = r.max((v + self.f[b][a][c][d]).norm()).max((v + self.f[a][b][d][c]).norm());
                    }
                }
            }
        }
        r
    }

    /// Largest `|F[a][b][c][d] - conj(F[c][d][a][b])|`; zero for real forms.
    pub fn reality_residual(&self) -> f64 {
        let mut r: f64 = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    for d in 0..3 {
                        r = r.max((self.f[a][b][c][d] - self.f[c][d][a][b].conj()).norm());
                    }
                }
            }
        }
        r
    }

    pub fn scale(mut self, s: f64) -> Self {
        for z in self.f.iter_mut().flatten().flatten().flatten() {
            *z *= s;
        }
        self
    }

    pub fn sub(&self, other: &FourForm22) -> Self {
        let mut f = self.f;
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    for d in 0..3 {
                        f[a][b][c][d] -= other.f[a][b][c][d];
                    }
                }
            }
        }
        FourForm22 { f }
    }

    /// Re-expresses a form given in the frame `f_i = e_r P^r_i` in the `e` frame.
    pub fn pull_back(&self, basis: &BasisChange) -> FourForm22 {
        let q = basis.inverse_matrix();
        let qc = q.map(|row| row.map(|z| z.conj()));
        // contract one slot at a time
        let mut t = self.f;
        for slot in 0..4 {
            let m = if slot < 2 { &qc } else { q };
            let mut out = zero_t4();
            for i0 in 0..3 {
                for i1 in 0..3 {
                    for i2 in 0..3 {
                        for i3 in 0..3 {
                            let idx = [i0, i1, i2, i3];
                            let mut s = C64::new(0.0, 0.0);
                            for k in 0..3 {
                                let mut src = idx;
                                src[slot] = k;
                                s += t[src[0]][src[1]][src[2]][src[3]] * m[k][idx[slot]];
                            }
                            out[i0][i1][i2][i3] = s;
                        }
                    }
                }
            }
            t = out;
        }
        FourForm22 { f: t }
    }
}
