#![allow(dead_code)]

use anomaly_core::geometry::HermitianMetric;
use anomaly_core::linalg::{adjoint, hermitian_eigenvalues, mat_mul, Mat3};
use anomaly_core::C64;
use proptest::prelude::*;
use rand::Rng;

pub fn random_matrix<R: Rng>(rng: &mut R) -> Mat3 {
    let mut m = [[C64::new(0.0, 0.0); 3]; 3];
    for row in m.iter_mut() {
        for z in row.iter_mut() {
            *z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
    }
    m
}

/// `A A^H + 0.5 I` for a random `A`.
pub fn random_metric<R: Rng>(rng: &mut R) -> HermitianMetric {
    let a = random_matrix(rng);
    let mut g = mat_mul(&a, &adjoint(&a));
    for (i, row) in g.iter_mut().enumerate() {
        row[i] += 0.5;
    }
    HermitianMetric::hermitize(g).unwrap()
}

pub fn condition_number(p: &Mat3) -> f64 {
    let e = hermitian_eigenvalues(&mat_mul(&adjoint(p), p));
    (e[2] / e[0]).sqrt()
}

fn complex() -> impl Strategy<Value = C64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| C64::new(re, im))
}

pub fn matrix_strategy() -> impl Strategy<Value = Mat3> {
    proptest::array::uniform3(proptest::array::uniform3(complex()))
}

pub fn metric_strategy() -> impl Strategy<Value = HermitianMetric> {
    matrix_strategy().prop_map(|a| {
        let mut g = mat_mul(&a, &adjoint(&a));
        for (i, row) in g.iter_mut().enumerate() {
            row[i] += 0.5;
        }
        HermitianMetric::hermitize(g).unwrap()
    })
}
