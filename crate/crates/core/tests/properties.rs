mod common;

use anomaly_core::algebra::{
    catalog, is_unimodular, jacobi_residual, transform_structure_constants, BasisChange, GroupKind, StructureConstants,
};
use anomaly_core::curvature::{
    anomaly_form, anomaly_form_combined, curvature_in_unitary_frame, full_tr_rm_wedge_rm_components, tr_rm_wedge_rm,
    tr_rm_wedge_rm_by_frame, ConnectionParams,
};
use anomaly_core::flow::{flow_form_consistency, rhs};
use anomaly_core::geometry::{
    del_omega_squared, i_del_delbar_omega, max_abs_t5, omega_norm, orthonormalizing_basis, FourForm22,
};
use anomaly_core::linalg::{hermitian_defect, identity3, max_abs3, sub3};
use anomaly_core::C64;
use common::{condition_number, matrix_strategy, metric_strategy};
use proptest::prelude::*;

fn kind_strategy() -> impl Strategy<Value = GroupKind> {
    prop::sample::select(GroupKind::ALL.to_vec())
}

fn kappa_strategy() -> impl Strategy<Value = f64> {
    prop_oneof![prop::sample::select(vec![-1.0, 0.0, 0.3, 0.5, 1.0, 2.0]), -2.0f64..2.0]
}

fn basis_strategy() -> impl Strategy<Value = BasisChange> {
    matrix_strategy().prop_filter_map("ill-conditioned", |mut p| {
        for (i, row) in p.iter_mut().enumerate() {
            row[i] += C64::new(1.5, 0.0);
        }
        (condition_number(&p) <= 1e3).then(|| BasisChange::new(p).ok()).flatten()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rhs_is_hermitian(kind in kind_strategy(), g in metric_strategy(), kappa in kappa_strategy(), ap in -2.0f64..2.0) {
        let v = rhs(&g, &catalog(kind), ConnectionParams::new(kappa, ap)).unwrap();
        prop_assert!(hermitian_defect(&v) <= 1e-12 * max_abs3(&v).max(1.0));
    }

    #[test]
    fn omega_norm_scaling(g in metric_strategy(), s in 0.1f64..10.0) {
        let lhs = omega_norm(&g.scaled(s).unwrap()).unwrap();
        let rhs = s.powf(-1.5) * omega_norm(&g).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs);
    }

    #[test]
    fn unimodular_metrics_are_balanced(kind in kind_strategy(), g in metric_strategy()) {
        prop_assert!(max_abs_t5(&del_omega_squared(&catalog(kind), &g)) <= 1e-12);
    }

    #[test]
    fn orthonormal_frame(g in metric_strategy()) {
        let p = orthonormalizing_basis(&g).unwrap();
        let pm = p.matrix();
        let unit = anomaly_core::linalg::mat_mul(&anomaly_core::linalg::adjoint(pm), &anomaly_core::linalg::mat_mul(g.matrix(), pm));
        prop_assert!(max_abs3(&sub3(&unit, &identity3())) <= 1e-12);
    }

    #[test]
    fn ddbar_omega_through_a_unitary_frame(kind in kind_strategy(), g in metric_strategy()) {
        let c = catalog(kind);
        let p = orthonormalizing_basis(&g).unwrap();
        let k = transform_structure_constants(&c, &p);
        let framed = i_del_delbar_omega(&k, &anomaly_core::geometry::HermitianMetric::identity()).pull_back(&p);
        prop_assert!(framed.max_abs_diff(&i_del_delbar_omega(&c, &g)) <= 1e-10);
    }

    #[test]
    fn forms_are_real(kind in kind_strategy(), g in metric_strategy(), kappa in kappa_strategy(), ap in -2.0f64..2.0) {
        let phi = anomaly_form(&catalog(kind), &g, ConnectionParams::new(kappa, ap)).unwrap();
        prop_assert!(phi.reality_residual() <= 1e-12 * phi.max_abs().max(1.0));
        prop_assert!(phi.antisymmetry_residual() <= 1e-12 * phi.max_abs().max(1.0));
    }

    #[test]
    fn anomaly_form_paths(kind in kind_strategy(), g in metric_strategy(), kappa in kappa_strategy(), ap in -2.0f64..2.0) {
        let params = ConnectionParams::new(kappa, ap);
        let a = anomaly_form(&catalog(kind), &g, params).unwrap();
        let b = anomaly_form_combined(&catalog(kind), &g, params).unwrap();
        prop_assert!(a.max_abs_diff(&b) <= 1e-12 * a.max_abs().max(1.0));
    }

    #[test]
    fn curvature_symmetries(kind in kind_strategy(), g in metric_strategy(), kappa in kappa_strategy()) {
        let r = curvature_in_unitary_frame(&catalog(kind), &g, kappa).unwrap();
        prop_assert!(r.symmetry_residual() <= 1e-13 * r.max_abs().max(1.0));
    }

    #[test]
    fn trace_is_22_type(kind in kind_strategy(), p in basis_strategy(), kappa in kappa_strategy()) {
        let k = transform_structure_constants(&catalog(kind), &p);
        let t = full_tr_rm_wedge_rm_components(&k, kappa);
        let scale = k.max_abs().powi(4).max(1.0);
        prop_assert!(t.off_type_max() <= 1e-12 * scale);
    }

    #[test]
    fn trace_two_paths(kind in kind_strategy(), g in metric_strategy(), kappa in kappa_strategy()) {
        let c = catalog(kind);
        let a = tr_rm_wedge_rm(&c, &g, kappa).unwrap();
        let b = tr_rm_wedge_rm_by_frame(&c, &g, kappa).unwrap();
        prop_assert!(a.max_abs_diff(&b) <= 1e-10 * a.max_abs().max(1.0));
    }

    #[test]
    fn basis_change_preserves_jacobi_and_unimodularity(kind in kind_strategy(), p in basis_strategy()) {
        let c = catalog(kind);
        let k = transform_structure_constants(&c, &p);
        prop_assert!(jacobi_residual(&k) <= 1e-10);
        prop_assert!(is_unimodular(&k, 1e-10));
        let back = transform_structure_constants(&k, &p.inverse());
        prop_assert!(back.max_abs_diff(&c) <= 1e-10);
    }

    #[test]
    fn basis_change_keeps_non_unimodular(p in basis_strategy()) {
        let c = StructureConstants::from_brackets(&[(0, 0, 1, C64::new(1.0, 0.0))]);
        prop_assert!(!is_unimodular(&transform_structure_constants(&c, &p), 1e-10));
    }

    #[test]
    fn form_flow_reduction(kind in kind_strategy(), g in metric_strategy()) {
        let d = flow_form_consistency(&g, &catalog(kind), ConnectionParams::with_beta(0.8), 1e-5).unwrap();
        prop_assert!(d <= 1e-7);
    }
}

#[test]
fn pull_back_of_identity_frame_is_identity() {
    let mut raw = [[[[C64::new(0.0, 0.0); 3]; 3]; 3]; 3];
    raw[0][1][2][0] = C64::new(0.3, -0.2);
    raw[2][1][1][0] = C64::new(-1.1, 0.4);
    let f = FourForm22::from_raw(&raw);
    assert!(f.max_abs() > 0.0);
    assert_eq!(f.pull_back(&BasisChange::identity()), f);
}
