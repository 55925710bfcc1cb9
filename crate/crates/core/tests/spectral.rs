use approx::assert_abs_diff_eq;
use hft::deriv::fd_matrix_derivative;
use hft::models::{six_site_analytic_eigenvalues, OscillatorModel, SixSiteModel};
use hft::tracking::track;
use hft::{eigh, fd_derivative, AffineModel, Matrix, ParametricModel, SymmetricMatrix};
use proptest::prelude::*;

/// Closed-form `ε₂(λ) = (λ − √(λ² + 8)) / 2` and its derivative.
fn eps2(lambda: f64) -> f64 {
    (lambda - (lambda * lambda + 8.0).sqrt()) / 2.0
}

fn eps2_slope(lambda: f64) -> f64 {
    (1.0 - lambda / (lambda * lambda + 8.0).sqrt()) / 2.0
}

#[test]
fn six_site_eigenvalues_at_half() {
    let s = SixSiteModel.spectrum(0.5).unwrap();
    let expected = [-1.68614, -1.18614, -0.5, 0.5, 1.18614, 1.68614];
    for (a, b) in s.values.iter().zip(expected) {
        assert_abs_diff_eq!(*a, b, epsilon = 1e-5);
    }
    let h = SixSiteModel.hamiltonian(0.5).unwrap();
    assert!(s.orthonormality_error() <= 1e-12);
    assert!(s.residual(&h).unwrap() <= 1e-10 * (1.0 + h.as_matrix().norm_inf()));
}

#[test]
fn six_site_matches_closed_forms_on_grid() {
    for i in 0..50 {
        let lambda = 0.2 + 1.8 * i as f64 / 49.0;
        let s = SixSiteModel.spectrum(lambda).unwrap();
        let exact = six_site_analytic_eigenvalues(lambda).unwrap();
        for (a, b) in s.values.iter().zip(exact) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-10);
        }
    }
}

#[test]
fn fd_of_branch_two() {
    let d = fd_derivative(eps2, 0.5, 1e-4).unwrap();
    assert_abs_diff_eq!(d, 0.41296, epsilon = 1e-5);
    assert_abs_diff_eq!(d, eps2_slope(0.5), epsilon = 1e-7);
}

#[test]
fn fd_matrix_derivative_of_affine_models() {
    let hp = fd_matrix_derivative(&SixSiteModel, 0.8, 1e-4).unwrap();
    assert!(
        hp.as_matrix()
            .max_abs_diff(SixSiteModel::coupling().as_matrix())
            <= 1e-9
    );

    let osc = OscillatorModel::new(1.0, 4).unwrap();
    let hp = fd_matrix_derivative(&osc, 0.3, 1e-4).unwrap();
    assert!(hp.as_matrix().max_abs_diff(osc.coupling().as_matrix()) <= 1e-9);

    let constant = AffineModel::constant(
        "c",
        SymmetricMatrix::from_rows(&[[1.0, 2.0], [2.0, 0.0]]).unwrap(),
    );
    let hp = fd_matrix_derivative(&constant, 0.0, 1e-4).unwrap();
    assert_eq!(hp.as_matrix().max_abs(), 0.0);

    // Stepping outside the domain is refused.
    assert!(fd_matrix_derivative(&SixSiteModel, 5e-5, 1e-4).is_err());
}

#[test]
fn analytic_derivatives_agree_with_fd() {
    let osc = OscillatorModel::new(1.2, 5).unwrap();
    for lambda in [-0.7, 0.0, 0.4] {
        let fd = fd_matrix_derivative(&osc, lambda, 1e-4).unwrap();
        let an = osc.derivative(lambda).unwrap();
        assert!(fd.as_matrix().max_abs_diff(an.as_matrix()) <= 1e-6);
    }
}

#[test]
fn tracking_through_the_crossing() {
    let before = SixSiteModel.spectrum(0.99).unwrap();
    let after = SixSiteModel.spectrum(1.01).unwrap();
    // In sorted order index 1 is ε₂ below the crossing and ε₃ above it.
    let tracked = track(&before, &after).unwrap();
    assert_eq!(tracked.permutation[1], 2);
    assert_eq!(tracked.permutation[2], 1);
    assert_abs_diff_eq!(tracked.spectrum.values[1], eps2(1.01), epsilon = 1e-12);
    let overlap: f64 = before
        .vector(1)
        .iter()
        .zip(tracked.spectrum.vector(1))
        .map(|(a, b)| a * b)
        .sum();
    assert!(overlap >= 0.999, "overlap {overlap}");
}

#[test]
fn eigh_is_deterministic_bitwise() {
    let osc = OscillatorModel::new(1.0, 8).unwrap();
    let h = osc.hamiltonian(0.37).unwrap();
    let a = eigh(&h).unwrap();
    let b = eigh(&h).unwrap();
    assert_eq!(a, b);
    let bits = |m: &Matrix| m.as_slice().iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&a.vectors), bits(&b.vectors));
}

fn symmetric_matrix(max_dim: usize) -> impl Strategy<Value = SymmetricMatrix> {
    (1..=max_dim).prop_flat_map(|n| {
        prop::collection::vec(-10.0..10.0f64, n * n).prop_map(move |data| {
            let m = Matrix::from_vec(n, n, data).unwrap();
            SymmetricMatrix::symmetrize(m).unwrap()
        })
    })
}

/// Matrices with forced exact degeneracies: `Q diag(d) Qᵀ` with repeated `d`.
fn degenerate_matrix() -> impl Strategy<Value = SymmetricMatrix> {
    (2..=6usize).prop_flat_map(|n| {
        (
            prop::collection::vec(-3.0..3.0f64, n * n),
            prop::collection::vec(-2i32..=2, n),
        )
            .prop_map(move |(data, levels)| {
                let q = gram_schmidt(&Matrix::from_vec(n, n, data).unwrap());
                let d = Matrix::from_fn(n, n, |i, j| if i == j { levels[i] as f64 } else { 0.0 });
                SymmetricMatrix::symmetrize(q.matmul(&d).unwrap().matmul(&q.transpose()).unwrap())
                    .unwrap()
            })
    })
}

fn gram_schmidt(m: &Matrix) -> Matrix {
    let n = m.rows();
    let mut cols: Vec<Vec<f64>> = Vec::new();
    for j in 0..n {
        let mut v = m.column(j);
        for c in &cols {
            let p: f64 = v.iter().zip(c).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(c).for_each(|(x, y)| *x -= p * y);
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-6 {
            v = (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect();
            for c in &cols {
                let p: f64 = v.iter().zip(c).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(c).for_each(|(x, y)| *x -= p * y);
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        cols.push(v.iter().map(|x| x / norm).collect());
    }
    Matrix::from_columns(&cols).unwrap()
}

proptest! {
    #[test]
    fn eigh_reconstructs_and_is_orthonormal(m in symmetric_matrix(9)) {
        let s = eigh(&m).unwrap().at(0.0);
        let scale = 1.0 + m.as_matrix().norm_inf();
        prop_assert!(s.reconstruction_error(&m) <= 1e-10 * scale);
        prop_assert!(s.orthonormality_error() <= 1e-12);
        prop_assert!(s.residual(&m).unwrap() <= 1e-10 * scale);
        prop_assert!(s.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn eigh_handles_exact_degeneracies(m in degenerate_matrix()) {
        let s = eigh(&m).unwrap().at(0.0);
        let scale = 1.0 + m.as_matrix().norm_inf();
        prop_assert!(s.reconstruction_error(&m) <= 1e-10 * scale);
        prop_assert!(s.orthonormality_error() <= 1e-12);
    }

    #[test]
    fn fd_exact_on_quadratics(a in -5.0..5.0f64, b in -5.0..5.0f64, c in -5.0..5.0f64, x in -3.0..3.0f64) {
        let d = fd_derivative(|t| a * t * t + b * t + c, x, 1e-4).unwrap();
        prop_assert!((d - (2.0 * a * x + b)).abs() <= 1e-9);
    }

    #[test]
    fn tracking_back_recovers_identity(m in symmetric_matrix(6), shift in prop::collection::vec(-0.05..0.05f64, 36)) {
        let n = m.dim();
        let p = Matrix::from_fn(n, n, |i, j| shift[(i.min(j)) * 6 + i.max(j)]);
        let m2 = SymmetricMatrix::symmetrize(
            Matrix::from_fn(n, n, |i, j| m[(i, j)] + p[(i, j)])
        ).unwrap();
        let prev = eigh(&m).unwrap().at(0.0);
        let next = eigh(&m2).unwrap().at(0.01);
        let forward = track(&prev, &next);
        prop_assume!(forward.is_ok());
        let forward = forward.unwrap();
        // With every matched overlap above 0.9 the best match is unique in
        // both directions, so going back must undo the permutation.
        let min_overlap = (0..n)
            .map(|k| hft::linalg::dot(&prev.vector(k), &forward.spectrum.vector(k)))
            .fold(f64::INFINITY, f64::min);
        prop_assume!(min_overlap > 0.9);
        let back = track(&forward.spectrum, &prev).unwrap();
        prop_assert_eq!(&back.permutation, &(0..n).collect::<Vec<_>>());
        prop_assert_eq!(back.flip_count(), 0);
        let mut sorted = forward.permutation.clone();
        sorted.sort_unstable();
        prop_assert_eq!(sorted, (0..n).collect::<Vec<_>>());
    }
}
