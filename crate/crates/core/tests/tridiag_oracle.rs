mod common;

use common::{dense_solve, random_dominant_system};
use hwlod::tridiag::{check_m_matrix, thomas_solve, ThomasFactorization, TridiagonalSystem};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn max_rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
        / scale
}

#[test]
fn thomas_matches_dense_elimination_on_fifty_systems() {
    let mut rng = ChaCha8Rng::seed_from_u64(20240611);
    for trial in 0..50 {
        let n = 2 + trial * 3;
        let sys = random_dominant_system(&mut rng, n);
        let x = thomas_solve(&sys).unwrap();
        let d = dense_solve(&sys);
        assert!(max_rel_diff(&x, &d) < 1e-12, "trial {trial}");
    }
}

#[test]
fn residual_is_at_rounding_level() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let sys = random_dominant_system(&mut rng, 400);
    let x = thomas_solve(&sys).unwrap();
    let ax = sys.mul_vec(&x);
    for (l, r) in ax.iter().zip(&sys.rhs) {
        assert!((l - r).abs() < 1e-12 * (1.0 + r.abs()));
    }
}

fn dominant_system() -> impl Strategy<Value = TridiagonalSystem> {
    (2usize..40).prop_flat_map(|n| {
        (
            prop::collection::vec(-1.0f64..1.0, n),
            prop::collection::vec(-1.0f64..1.0, n),
            prop::collection::vec(0.05f64..3.0, n),
            prop::collection::vec(-5.0f64..5.0, n),
        )
            .prop_map(move |(lo, up, margin, rhs)| {
                let mut s = TridiagonalSystem::zeros(n);
                for i in 0..n {
                    s.lower[i] = if i > 0 { lo[i] } else { 0.0 };
                    s.upper[i] = if i + 1 < n { up[i] } else { 0.0 };
                    s.diag[i] = s.lower[i].abs() + s.upper[i].abs() + margin[i];
                    s.rhs[i] = rhs[i];
                }
                s
            })
    })
}

proptest! {
    #[test]
    fn thomas_agrees_with_dense(sys in dominant_system()) {
        let x = thomas_solve(&sys).unwrap();
        prop_assert!(max_rel_diff(&x, &dense_solve(&sys)) < 1e-12);
    }

    #[test]
    fn factorization_is_reusable(sys in dominant_system(), scale in -3.0f64..3.0) {
        let f = ThomasFactorization::new(&sys.lower, &sys.diag, &sys.upper).unwrap();
        let mut a = sys.rhs.clone();
        f.solve_in_place(&mut a);
        let mut b: Vec<f64> = sys.rhs.iter().map(|v| v * scale).collect();
        f.solve_in_place(&mut b);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x * scale - y).abs() < 1e-10 * (1.0 + y.abs()));
        }
    }

    #[test]
    fn nonpositive_off_diagonals_with_dominance_are_m_matrices(mut sys in dominant_system()) {
        for i in 0..sys.len() {
            sys.lower[i] = -sys.lower[i].abs();
            sys.upper[i] = -sys.upper[i].abs();
        }
        prop_assert!(check_m_matrix(&sys).is_m_matrix_after_reduction);
        // M-matrix inverse is nonnegative
        let mut e = vec![0.0; sys.len()];
        e[sys.len() / 2] = 1.0;
        sys.rhs = e;
        prop_assert!(thomas_solve(&sys).unwrap().iter().all(|&v| v >= -1e-15));
    }
}
