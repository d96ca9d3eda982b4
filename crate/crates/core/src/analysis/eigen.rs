use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::RealMatrix;
use crate::math;
use crate::{Error, Result, C64};

const MAX_ITERATIONS_PER_ROOT: usize = 60;

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Householder reduction to upper Hessenberg form.
fn hessenberg(a: &mut [Vec<f64>]) {
    let n = a.len();
    for k in 0..n.saturating_sub(2) {
        let norm = math::sqrt((k + 1..n).map(|i| a[i][k] * a[i][k]).sum());
        if norm == 0.0 {
            continue;
        }
        let alpha = -sign(norm, a[k + 1][k]);
        let mut v: Vec<f64> = (k + 1..n).map(|i| a[i][k]).collect();
        v[0] -= alpha;
        let vn = math::sqrt(v.iter().map(|x| x * x).sum());
        if vn == 0.0 {
            continue;
        }
        for x in v.iter_mut() {
            *x /= vn;
        }
        for j in 0..n {
            let s: f64 = (0..v.len()).map(|i| v[i] * a[k + 1 + i][j]).sum();
            for i in 0..v.len() {
                a[k + 1 + i][j] -= 2.0 * v[i] * s;
            }
        }
        for row in a.iter_mut() {
            let s: f64 = (0..v.len()).map(|j| row[k + 1 + j] * v[j]).sum();
            for j in 0..v.len() {
                row[k + 1 + j] -= 2.0 * s * v[j];
            }
        }
        for i in k + 2..n {
            a[i][k] = 0.0;
        }
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix.
fn hessenberg_qr(a: &mut [Vec<f64>]) -> Result<Vec<C64>> {
    let n = a.len();
    let mut wr = vec![0.0; n];
    let mut wi = vec![0.0; n];
    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a[i][j].abs();
        }
    }
    let mut nn = n as isize - 1;
    let mut t = 0.0;
    let mut total = 0usize;
    while nn >= 0 {
        let mut its = 0;
        loop {
            let nu = nn as usize;
            let mut l = nu;
            while l >= 1 {
                let mut s = a[l - 1][l - 1].abs() + a[l][l].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[l][l - 1].abs() + s == s {
                    a[l][l - 1] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a[nu][nu];
            if l == nu {
                wr[nu] = x + t;
                wi[nu] = 0.0;
                nn -= 1;
                break;
            }
            let mut y = a[nu - 1][nu - 1];
            let mut w = a[nu][nu - 1] * a[nu - 1][nu];
            if l == nu - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let mut z = math::sqrt(q.abs());
                x += t;
                if q >= 0.0 {
                    z = p + sign(z, p);
                    wr[nu - 1] = x + z;
                    wr[nu] = x + z;
                    if z != 0.0 {
                        wr[nu] = x - w / z;
                    }
                    wi[nu - 1] = 0.0;
                    wi[nu] = 0.0;
                } else {
                    wr[nu - 1] = x + p;
                    wr[nu] = x + p;
                    wi[nu - 1] = -z;
                    wi[nu] = z;
                }
                nn -= 2;
                break;
            }
            if its == MAX_ITERATIONS_PER_ROOT {
                return Err(Error::NoConvergence { iterations: total });
            }
            if its > 0 && its % 10 == 0 {
                t += x;
                for i in 0..=nu {
                    a[i][i] -= x;
                }
                let s = a[nu][nu - 1].abs() + a[nu - 1][nu - 2].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            total += 1;
            let mut m = nu - 2;
            let (mut p, mut q, mut r);
            loop {
                let z = a[m][m];
                let r0 = x - z;
                let s0 = y - z;
                p = (r0 * s0 - w) / a[m + 1][m] + a[m][m + 1];
                q = a[m + 1][m + 1] - z - r0 - s0;
                r = a[m + 2][m + 1];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[m][m - 1].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[m - 1][m - 1].abs() + z.abs() + a[m + 1][m + 1].abs());
                if u + v == v {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nu {
                a[i][i - 2] = 0.0;
                if i != m + 2 {
                    a[i][i - 3] = 0.0;
                }
            }
            let mut k = m;
            while k < nu {
                if k != m {
                    p = a[k][k - 1];
                    q = a[k + 1][k - 1];
                    r = if k != nu - 1 { a[k + 2][k - 1] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = sign(math::sqrt(p * p + q * q + r * r), p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            a[k][k - 1] = -a[k][k - 1];
                        }
                    } else {
                        a[k][k - 1] = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    let z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nu {
                        let mut pp = a[k][j] + q * a[k + 1][j];
                        if k != nu - 1 {
                            pp += r * a[k + 2][j];
                            a[k + 2][j] -= pp * z;
                        }
                        a[k + 1][j] -= pp * y;
                        a[k][j] -= pp * x;
                    }
                    let mmin = if nu < k + 3 { nu } else { k + 3 };
                    for row in a.iter_mut().take(mmin + 1).skip(l) {
                        let mut pp = x * row[k] + y * row[k + 1];
                        if k != nu - 1 {
                            pp += z * row[k + 2];
                            row[k + 2] -= pp * r;
                        }
                        row[k + 1] -= pp * q;
                        row[k] -= pp;
                    }
                }
                k += 1;
            }
        }
    }
    Ok(wr.into_iter().zip(wi).map(|(re, im)| C64::new(re, im)).collect())
}

/// All eigenvalues with multiplicity, sorted by real part then imaginary part.
pub fn eigenvalues(m: &RealMatrix) -> Result<Vec<C64>> {
    if !m.is_finite() {
        return Err(Error::DomainError("matrix has non-finite entries"));
    }
    let mut a = m.rows();
    hessenberg(&mut a);
    let mut ev = hessenberg_qr(&mut a)?;
    ev.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    Ok(ev)
}

/// Solves `a x = b` over the complex numbers by Gaussian elimination with partial pivoting.
fn complex_solve(mut a: Vec<Vec<C64>>, mut b: Vec<C64>) -> Option<Vec<C64>> {
    let n = b.len();
    for k in 0..n {
        let piv = (k..n).max_by(|&i, &j| a[i][k].norm().total_cmp(&a[j][k].norm()))?;
        if a[piv][k].norm() == 0.0 {
            return None;
        }
        a.swap(k, piv);
        b.swap(k, piv);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                let v = a[k][j];
                a[i][j] -= f * v;
            }
            let v = b[k];
            b[i] -= f * v;
        }
    }
    let mut x = vec![C64::new(0.0, 0.0); n];
    for i in (0..n).rev() {
        let s: C64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    x.iter().all(|z| z.re.is_finite() && z.im.is_finite()).then_some(x)
}

/// `|m v - lambda v|_inf / |v|_inf` for an eigenvector `v` recomputed by inverse iteration.
pub fn eigen_residual(m: &RealMatrix, lambda: C64) -> f64 {
    let n = m.dim();
    let scale = m.max_abs().max(1.0);
    let shift = lambda + C64::new(1e-10 * scale, 0.0);
    let shifted: Vec<Vec<C64>> = (0..n)
        .map(|i| (0..n).map(|j| C64::new(m[(i, j)], 0.0) - if i == j { shift } else { C64::new(0.0, 0.0) }).collect())
        .collect();
    let mut v: Vec<C64> = (0..n).map(|i| C64::new(1.0 + 0.1 * i as f64, 0.05 * i as f64)).collect();
    for _ in 0..3 {
        match complex_solve(shifted.clone(), v.clone()) {
            Some(x) => {
                let nrm = x.iter().fold(0.0f64, |a, z| a.max(z.norm()));
                v = x.into_iter().map(|z| z / nrm).collect();
            }
            // the shift hit the eigenvalue exactly: any unit solution of the singular system is fine
            None => break,
        }
    }
    let vn = v.iter().fold(0.0f64, |a, z| a.max(z.norm()));
    let mut res: f64 = 0.0;
    for i in 0..n {
        let mv: C64 = (0..n).map(|j| v[j] * m[(i, j)]).sum();
        res = res.max((mv - lambda * v[i]).norm());
    }
    res / vn
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(ev: &[C64], expected: &[f64], tol: f64) {
        assert_eq!(ev.len(), expected.len());
        for (z, e) in ev.iter().zip(expected) {
            assert!((z.re - e).abs() <= tol && z.im.abs() <= tol, "{ev:?}");
        }
    }

    #[test]
    fn trivial_cases() {
        close(&eigenvalues(&RealMatrix::identity(3)).unwrap(), &[1.0, 1.0, 1.0], 1e-14);
        let d = RealMatrix::from_rows(&[vec![1.0, 0.0, 0.0], vec![0.0, 2.0, 0.0], vec![0.0, 0.0, 3.0]]).unwrap();
        close(&eigenvalues(&d).unwrap(), &[1.0, 2.0, 3.0], 1e-14);
    }

    #[test]
    fn q_matrix() {
        let h = 0.5;
        let q = RealMatrix::from_rows(&[vec![0.0, h, h], vec![h, 0.0, h], vec![h, h, 0.0]]).unwrap();
        let ev = eigenvalues(&q).unwrap();
        close(&ev, &[-0.5, -0.5, 1.0], 1e-12);
        for z in ev {
            assert!(eigen_residual(&q, z) < 1e-8);
        }
    }

    #[test]
    fn rotation_has_complex_pair() {
        let r = RealMatrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
        let ev = eigenvalues(&r).unwrap();
        assert!(ev[0].re.abs() < 1e-15);
        assert!((ev[0].im + 1.0).abs() < 1e-15 && (ev[1].im - 1.0).abs() < 1e-15);
    }

    #[test]
    fn companion_matrix_roots() {
        // x^4 - 10x^3 + 35x^2 - 50x + 24 = (x-1)(x-2)(x-3)(x-4)
        let c = RealMatrix::from_rows(&[
            vec![10.0, -35.0, 50.0, -24.0],
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0],
        ])
        .unwrap();
        close(&eigenvalues(&c).unwrap(), &[1.0, 2.0, 3.0, 4.0], 1e-10);
    }

    #[test]
    fn zero_matrix() {
        close(&eigenvalues(&RealMatrix::zeros(9)).unwrap(), &[0.0; 9], 0.0);
    }
}
