//! Hand-reduced flow equations for the nilpotent and solvable groups, kept
//! term by term as an external reference. `g[a][b] = g_{\bar a b}` and `u[a][b] = g^{a \bar b}`, zero-based.

use anomaly_core::geometry::{inverse_and_det, HermitianMetric};
use anomaly_core::linalg::{zero3, Mat3};
use anomaly_core::C64;

fn fill_lower(mut v: Mat3) -> Mat3 {
    for a in 0..3 {
        for b in 0..a {
            v[a][b] = v[b][a].conj();
        }
    }
    v
}

pub fn nilpotent(g: &HermitianMetric) -> anomaly_core::Result<Mat3> {
    let (u, det) = inverse_and_det(g)?;
    let m = g.matrix();
    let s = det.sqrt() / 2.0;
    let mut v = zero3();
    v[0][0] = u[1][1] * m[2][2] * s;
    v[0][1] = -u[0][1] * m[2][2] * s;
    v[1][1] = u[0][0] * m[2][2] * s;
    Ok(fill_lower(v))
}

pub fn solvable(g: &HermitianMetric, beta: f64) -> anomaly_core::Result<Mat3> {
    let (u, det) = inverse_and_det(g)?;
    let m = g.matrix();
    let s = C64::new(det.sqrt() / 2.0, 0.0);
    let u33 = u[2][2];
    let mut v = zero3();
    v[0][0] = s * (u33 * m[0][0] - u33 * u33 * m[0][0] * beta);
    v[0][1] = s * (u33 * m[0][1] - u33 * u33 * m[0][1] * beta);
    v[0][2] =
        s * (-u[0][2] * m[0][0] + u[2][1] * m[0][1] + u[0][2] * u33 * m[0][0] * beta + u[2][1] * u33 * m[0][1] * beta);
    v[1][1] = s * (u33 * m[1][1] - u33 * u33 * m[1][1] * beta);
    v[1][2] =
        s * (u[0][2] * m[1][0] - u[1][2] * m[1][1] + u[0][2] * u33 * m[1][0] * beta + u[1][2] * u33 * m[1][1] * beta);
    v[2][2] = s
        * (u[0][0] * m[0][0] + u[1][1] * m[1][1]
            - u[1][0] * m[0][1]
            - u[0][1] * m[1][0]
            - (u[0][0] * u33 * m[0][0] + u[1][1] * u33 * m[1][1] + u[1][0] * u33 * m[0][1] + u[0][1] * u33 * m[1][0])
                * beta);
    Ok(fill_lower(v))
}
