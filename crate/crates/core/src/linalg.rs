//! Small dense linear algebra: 3x3 complex matrices, rank-3/4/5 index arrays
//! over `{0,1,2}`, and a row-major real square matrix.
//!
//! Everything here is sized for three complex dimensions (nine real
//! coordinates), so the routines are plain loops without blocking.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::math;
use crate::C64;

/// Complex 3x3 matrix, `m[row][col]`.
pub type Mat3 = [[C64; 3]; 3];
/// Rank-3 complex array, e.g. structure constants `c[d][a][b]`.
pub type Tensor3 = [[[C64; 3]; 3]; 3];
/// Rank-4 complex array.
pub type Tensor4 = [[[[C64; 3]; 3]; 3]; 3];
/// Rank-5 complex array.
pub type Tensor5 = [[[[[C64; 3]; 3]; 3]; 3]; 3];

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

pub const fn zero3() -> Mat3 {
    [[ZERO; 3]; 3]
}

pub const fn zero_t3() -> Tensor3 {
    [[[ZERO; 3]; 3]; 3]
}

pub const fn zero_t4() -> Tensor4 {
    [[[[ZERO; 3]; 3]; 3]; 3]
}

pub const fn zero_t5() -> Tensor5 {
    [[[[[ZERO; 3]; 3]; 3]; 3]; 3]
}

pub fn identity3() -> Mat3 {
    let mut m = zero3();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = ONE;
    }
    m
}

pub fn diag3(d: [f64; 3]) -> Mat3 {
    let mut m = zero3();
    for i in 0..3 {
        m[i][i] = C64::new(d[i], 0.0);
    }
    m
}

pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = zero3();
    for i in 0..3 {
        for j in 0..3 {
            let mut s = ZERO;
            for k in 0..3 {
                s += a[i][k] * b[k][j];
            }
            out[i][j] = s;
        }
    }
    out
}

/// Conjugate transpose.
pub fn adjoint(a: &Mat3) -> Mat3 {
    let mut out = zero3();
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[j][i].conj();
        }
    }
    out
}

pub fn conj3(a: &Mat3) -> Mat3 {
    a.map(|row| row.map(|z| z.conj()))
}

pub fn scale3(a: &Mat3, s: f64) -> Mat3 {
    a.map(|row| row.map(|z| z * s))
}

pub fn add3(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = *a;
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] += b[i][j];
        }
    }
    out
}

pub fn sub3(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = *a;
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] -= b[i][j];
        }
    }
    out
}

pub fn max_abs3(a: &Mat3) -> f64 {
    a.iter().flatten().fold(0.0, |m, z| m.max(z.norm()))
}

/// Largest entry of `|a - a^H|`.
pub fn hermitian_defect(a: &Mat3) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            d = d.max((a[i][j] - a[j][i].conj()).norm());
        }
    }
    d
}

/// `(a + a^H) / 2`.
pub fn hermitian_part(a: &Mat3) -> Mat3 {
    let mut out = zero3();
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (a[i][j] + a[j][i].conj()) * 0.5;
        }
    }
    out
}

pub fn det3(m: &Mat3) -> C64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Inverse by the adjugate; `None` when the determinant is zero or not finite.
pub fn inverse3(m: &Mat3) -> Option<Mat3> {
    let det = det3(m);
    if det.norm() == 0.0 || !det.re.is_finite() || !det.im.is_finite() {
        return None;
    }
    let inv_det = det.inv();
    let mut out = zero3();
    for i in 0..3 {
        for j in 0..3 {
            // cofactor C[j][i] gives adj[i][j]
            let (r0, r1) = other_two(j);
            let (c0, c1) = other_two(i);
            let minor = m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            out[i][j] = minor * sign * inv_det;
        }
    }
    Some(out)
}

fn other_two(i: usize) -> (usize, usize) {
    match i {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

/// Cholesky factor `L` (lower triangular, positive real diagonal) with
/// `m = L L^H`. `None` if `m` is not positive definite.
pub fn cholesky3(m: &Mat3) -> Option<Mat3> {
    let mut l = zero3();
    for j in 0..3 {
        let mut d = m[j][j].re;
        for k in 0..j {
            d -= l[j][k].norm_sqr();
        }
        if !(d > 0.0) || !d.is_finite() {
            return None;
        }
        let djj = math::sqrt(d);
        l[j][j] = C64::new(djj, 0.0);
        for i in (j + 1)..3 {
            let mut s = m[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k].conj();
            }
            l[i][j] = s / djj;
        }
    }
    Some(l)
}

/// Eigenvalues of a Hermitian 3x3 matrix in ascending order.
///
/// Uses the real symmetric 6x6 embedding `[[Re, -Im], [Im, Re]]`, whose
/// spectrum is the Hermitian spectrum with every value doubled.
pub fn hermitian_eigenvalues(m: &Mat3) -> [f64; 3] {
    let mut e = RealMatrix::zeros(6);
    for i in 0..3 {
        for j in 0..3 {
            let z = (m[i][j] + m[j][i].conj()) * 0.5;
            e[(i, j)] = z.re;
            e[(i + 3, j + 3)] = z.re;
            e[(i, j + 3)] = -z.im;
            e[(i + 3, j)] = z.im;
        }
    }
    let mut ev = symmetric_eigenvalues(e);
    ev.sort_by(|a, b| a.total_cmp(b));
    [ev[0], ev[2], ev[4]]
}

/// Cyclic Jacobi eigenvalues of a real symmetric matrix (unsorted).
pub fn symmetric_eigenvalues(mut a: RealMatrix) -> Vec<f64> {
    let n = a.n;
    for _sweep in 0..100 {
        let mut off = 0.0;
        let mut scale = 0.0;
        for i in 0..n {
            for j in 0..n {
                let v = a[(i, j)] * a[(i, j)];
                if i == j {
                    scale += v;
                } else {
                    off += v;
                }
            }
        }
        if off <= 1e-32 * scale || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (math::abs(theta) + math::sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / math::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[(i, i)]).collect()
}

/// Row-major real square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    n: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn zeros(n: usize) -> Self {
        RealMatrix { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Build from rows; `None` if the rows do not form a square matrix.
    pub fn from_rows(rows: &[Vec<f64>]) -> Option<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return None;
        }
        Some(RealMatrix { n, data: rows.iter().flatten().copied().collect() })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n.max(1)).map(|r| r.to_vec()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(math::abs(*v)))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// The square block on rows and columns `idx`.
    pub fn submatrix(&self, idx: &[usize]) -> RealMatrix {
        let mut m = RealMatrix::zeros(idx.len());
        for (i, &r) in idx.iter().enumerate() {
            for (j, &c) in idx.iter().enumerate() {
                m[(i, j)] = self[(r, c)];
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| (0..self.n).map(|j| self[(i, j)] * v[j]).sum()).collect()
    }

    pub fn transpose(&self) -> RealMatrix {
        let mut t = RealMatrix::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, other: &RealMatrix) -> RealMatrix {
        let n = self.n;
        let mut out = RealMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// Solve `self * x = b` by Gaussian elimination with partial pivoting.
    /// Returns `None` when a pivot falls below `rel_pivot_tol * max|entry|`.
    pub fn solve(&self, b: &[f64], rel_pivot_tol: f64) -> Option<Vec<f64>> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut x = b.to_vec();
        let scale = self.max_abs();
        if scale == 0.0 {
            return None;
        }
        for col in 0..n {
            let (piv, pmax) = (col..n).map(|r| (r, math::abs(a[r * n + col]))).fold((col, -1.0), |best, cur| {
                if cur.1 > best.1 {
                    cur
                } else {
                    best
                }
            });
            if pmax <= rel_pivot_tol * scale {
                return None;
            }
            if piv != col {
                for j in 0..n {
                    a.swap(col * n + j, piv * n + j);
                }
                x.swap(col, piv);
            }
            let d = a[col * n + col];
            for r in (col + 1)..n {
                let f = a[r * n + col] / d;
                if f == 0.0 {
                    continue;
                }
                for j in col..n {
                    a[r * n + j] -= f * a[col * n + j];
                }
                x[r] -= f * x[col];
            }
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in (i + 1)..n {
                s -= a[i * n + j] * x[j];
            }
            x[i] = s / a[i * n + i];
        }
        Some(x)
    }
}

impl Index<(usize, usize)> for RealMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for RealMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sample() -> Mat3 {
        [
            [c(3.0, 0.0), c(0.5, 0.25), c(-0.2, 0.1)],
            [c(0.5, -0.25), c(2.0, 0.0), c(0.3, -0.4)],
            [c(-0.2, -0.1), c(0.3, 0.4), c(1.5, 0.0)],
        ]
    }

    #[test]
    fn inverse_round_trip() {
        let m = sample();
        let inv = inverse3(&m).unwrap();
        let p = mat_mul(&m, &inv);
        assert!(max_abs3(&sub3(&p, &identity3())) < 1e-14);
    }

    #[test]
    fn cholesky_reconstructs() {
        let m = sample();
        let l = cholesky3(&m).unwrap();
        let back = mat_mul(&l, &adjoint(&l));
        assert!(max_abs3(&sub3(&back, &m)) < 1e-14);
        assert!(cholesky3(&diag3([1.0, -1.0, 1.0])).is_none());
    }

    #[test]
    fn hermitian_eigenvalues_match_trace_and_det() {
        let m = sample();
        let ev = hermitian_eigenvalues(&m);
        let tr: f64 = (0..3).map(|i| m[i][i].re).sum();
        assert!((ev.iter().sum::<f64>() - tr).abs() < 1e-13);
        assert!((ev.iter().product::<f64>() - det3(&m).re).abs() < 1e-13);
        assert!(ev[0] <= ev[1] && ev[1] <= ev[2]);
        assert_eq!(hermitian_eigenvalues(&diag3([3.0, 1.0, 2.0])), [1.0, 2.0, 3.0]);
    }

    #[test]
    fn solve_small_system() {
        let m = RealMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]).unwrap();
        let x = m.solve(&[3.0, 5.0], 1e-14).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-15 && (x[1] - 1.4).abs() < 1e-15);
        let s = RealMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(s.solve(&[1.0, 1.0], 1e-12).is_none());
    }
}
