use anomaly_core::analysis::{eigen_residual, eigenvalues};
use anomaly_core::linalg::RealMatrix;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sorted(mut v: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    v
}

#[test]
fn matches_nalgebra_on_random_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in [2usize, 3, 5, 9] {
        for _ in 0..25 {
            let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect()).collect();
            let m = RealMatrix::from_rows(&rows).unwrap();
            let ours = sorted(eigenvalues(&m).unwrap().iter().map(|z| (z.re, z.im)).collect());
            let na = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
            let theirs = sorted(na.complex_eigenvalues().iter().map(|z| (z.re, z.im)).collect());
            for (a, b) in ours.iter().zip(&theirs) {
                assert!((a.0 - b.0).abs() < 1e-9 && (a.1 - b.1).abs() < 1e-9, "{ours:?} vs {theirs:?}");
            }
            for (re, im) in &ours {
                let r = eigen_residual(&m, anomaly_core::C64::new(*re, *im));
                assert!(r <= 1e-8 * m.max_abs(), "residual {r}");
            }
        }
    }
}

#[test]
fn symmetric_spectrum_matches() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 9;
    let a: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    let rows: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| a[i][j] + a[j][i]).collect()).collect();
    let ours: Vec<f64> = eigenvalues(&RealMatrix::from_rows(&rows).unwrap()).unwrap().iter().map(|z| z.re).collect();
    let mut theirs: Vec<f64> =
        DMatrix::from_fn(n, n, |i, j| rows[i][j]).symmetric_eigenvalues().iter().copied().collect();
    theirs.sort_by(f64::total_cmp);
    for (x, y) in ours.iter().zip(&theirs) {
        approx::assert_abs_diff_eq!(x, y, epsilon = 1e-10);
    }
}
