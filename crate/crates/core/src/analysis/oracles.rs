use crate::geometry::{inverse_and_det, HermitianMetric};
use crate::linalg::zero3;
use crate::math;
use crate::{Error, Result, C64};

/// Slopes `(d lambda1/dt, d lambda2/dt)` of the nilpotent flow on diagonal metrics.
///
/// On `diag(l1, l2, l3)` the right-hand side reduces to
/// `d l1/dt = sqrt(det)/2 * l3 / l2 = l3^{3/2}/2 * sqrt(l1/l2)` and symmetrically
/// for `l2`; both are constant because `l1/l2` and `l3` are.
pub fn nilpotent_diagonal_slope(lambda0: [f64; 3]) -> [f64; 2] {
    let [l1, l2, l3] = lambda0;
    let p = math::powf(l3, 1.5) / 2.0;
    [p * math::sqrt(l1 / l2), p * math::sqrt(l2 / l1)]
}

/// Diagonal solution of the nilpotent flow: `lambda3` constant, `lambda1`, `lambda2` affine.
pub fn nilpotent_diagonal_oracle(lambda0: [f64; 3], t: f64) -> [f64; 3] {
    let [s1, s2] = nilpotent_diagonal_slope(lambda0);
    [lambda0[0] + s1 * t, lambda0[1] + s2 * t, lambda0[2]]
}

/// Invariants `(a, b, c, d)` of the solvable flow with `g12 = 0`.
pub fn solvable_invariants(g: &HermitianMetric) -> Result<[f64; 4]> {
    let (ginv, _) = inverse_and_det(g)?;
    let m = g.matrix();
    let l = m[0][0].re;
    Ok([m[1][1].re / l, m[0][2].norm() / l, m[1][2].norm() / l, l * l * ginv[2][2].re])
}

/// Closed-form solvable flow for `g12(0) = 0`:
/// `|l^2(t) - beta d| = |l^2(0) - beta d| e^{sqrt(ad) t}` with `l = g11`, and the
/// remaining entries rebuilt from `a, b, c, d`; the phases of `g13`, `g23` stay fixed.
pub fn solvable_reduced_oracle(initial: &HermitianMetric, beta: f64, t: f64) -> Result<HermitianMetric> {
    let m0 = initial.matrix();
    if m0[0][1].norm() > 1e-14 * m0[0][0].re {
        return Err(Error::DomainError("solvable oracle needs g12 = 0"));
    }
    let [a, b, c, d] = solvable_invariants(initial)?;
    let l0 = m0[0][0].re;
    let l_sq = beta * d + (l0 * l0 - beta * d) * math::exp(math::sqrt(a * d) * t);
    if !(l_sq > 0.0) || !l_sq.is_finite() {
        return Err(Error::DomainError("solution leaves the positive cone"));
    }
    let l = math::sqrt(l_sq);
    let mut g = zero3();
    g[0][0] = C64::new(l, 0.0);
    g[1][1] = C64::new(a * l, 0.0);
    g[2][2] = C64::new(l_sq / d + (c * c / a + b * b) * l, 0.0);
    g[0][2] = m0[0][2] * (l / l0);
    g[1][2] = m0[1][2] * (l / l0);
    g[2][0] = g[0][2].conj();
    g[2][1] = g[1][2].conj();
    HermitianMetric::hermitize(g).map_err(|_| Error::DomainError("solution leaves the positive cone"))
}

/// Signed constant `(sqrt(l0) - sqrt(2 beta)) / (sqrt(l0) + sqrt(2 beta))`.
fn isotropic_signed_constant(lambda0: f64, beta: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::NonPositiveBeta { beta });
    }
    if !(lambda0 > 0.0) {
        return Err(Error::DomainError("lambda0 must be positive"));
    }
    let u = math::sqrt(lambda0);
    let s = math::sqrt(2.0 * beta);
    Ok((u - s) / (u + s))
}

/// `C = |sqrt(l0) - sqrt(2 beta)| / (sqrt(l0) + sqrt(2 beta))`.
pub fn sl2c_isotropic_constant(lambda0: f64, beta: f64) -> Result<f64> {
    Ok(isotropic_signed_constant(lambda0, beta)?.abs())
}

/// `T = log(1/C) / sqrt(2 beta)`; the isotropic solution leaves the positive
/// cone (blow-up for `l0 > 2 beta`, collapse for `l0 < 2 beta`) at `T`.
pub fn blow_up_time(lambda0: f64, beta: f64) -> Result<f64> {
    let c = sl2c_isotropic_constant(lambda0, beta)?;
    if c == 0.0 {
        return Err(Error::DomainError("the stationary metric does not blow up"));
    }
    Ok(math::ln(1.0 / c) / math::sqrt(2.0 * beta))
}

/// `lambda(t)` for the SL(2,C) flow started at `lambda0 * identity`.
///
/// With `u = sqrt(lambda)` and `s = sqrt(2 beta)`, `(u - s)/(u + s) = C' e^{s t}`.
pub fn sl2c_isotropic_oracle(lambda0: f64, beta: f64, t: f64) -> Result<f64> {
    let cs = isotropic_signed_constant(lambda0, beta)?;
    let s = math::sqrt(2.0 * beta);
    if cs != 0.0 && t >= blow_up_time(lambda0, beta)? {
        return Err(Error::DomainError("t is past the blow-up time"));
    }
    let e = cs * math::exp(s * t);
    let u = s * (1.0 + e) / (1.0 - e);
    Ok(u * u)
}

/// The diagonal SL(2,C) system:
/// `d l1/dt = sqrt(l1 l2 l3)/2 (l3/l2 + l2/l3 - 2 beta/l1 - beta l1/l2^2 - beta l1/l3^2)`
/// and cyclically.
pub fn sl2c_diagonal_rhs(lambda: [f64; 3], beta: f64) -> [f64; 3] {
    let p = math::sqrt(lambda[0] * lambda[1] * lambda[2]) / 2.0;
    let f = |x: f64, y: f64, z: f64| p * (z / y + y / z - 2.0 * beta / x - beta * x / (y * y) - beta * x / (z * z));
    [f(lambda[0], lambda[1], lambda[2]), f(lambda[1], lambda[0], lambda[2]), f(lambda[2], lambda[0], lambda[1])]
}
