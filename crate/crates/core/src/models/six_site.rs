//! Two three-site chains joined by λ bonds between sites (1,6) and (3,4).
//!
//! The closed-form spectrum with `s = √(λ² + 8)` is
//! `{−(λ+s)/2, (λ−s)/2, −λ, λ, (s−λ)/2, (λ+s)/2}`; the pairs `(λ−s)/2, −λ`
//! and `λ, (s−λ)/2` cross at λ = 1.

use crate::error::{Error, Result};
use crate::linalg::{Matrix, SymmetricMatrix};
use crate::model::{Branch, Domain, ParametricModel, Symmetry};
use crate::symmetry::{c2v_table, GroupRep};

const DIM: usize = 6;
const CHAIN_BONDS: [(usize, usize); 4] = [(0, 1), (1, 2), (3, 4), (4, 5)];
const LAMBDA_BONDS: [(usize, usize); 2] = [(0, 5), (2, 3)];

#[derive(Clone, Copy, Debug, Default)]
pub struct SixSiteModel;

impl SixSiteModel {
    pub fn new() -> Self {
        Self
    }

    /// Constant `dH/dλ`: ones at the λ positions.
    pub fn coupling() -> SymmetricMatrix {
        let mut m = Matrix::zeros(DIM, DIM);
        for (i, j) in LAMBDA_BONDS {
            m[(i, j)] = 1.0;
            m[(j, i)] = 1.0;
        }
        SymmetricMatrix::new(m).expect("coupling matrix is symmetric")
    }
}

/// Closed-form branches `(ε₁, …, ε₆)` in the labelling of the closed forms
/// (not sorted).
pub fn six_site_branches(lambda: f64) -> Result<[Branch; 6]> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::OutOfDomain {
            lambda,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    let s = (lambda * lambda + 8.0).sqrt();
    let ds = lambda / s;
    let b = |value, slope| Branch { value, slope };
    Ok([
        b(-(lambda + s) / 2.0, -(1.0 + ds) / 2.0),
        b((lambda - s) / 2.0, (1.0 - ds) / 2.0),
        b(-lambda, -1.0),
        b(lambda, 1.0),
        b((s - lambda) / 2.0, (ds - 1.0) / 2.0),
        b((lambda + s) / 2.0, (1.0 + ds) / 2.0),
    ])
}

/// Closed-form eigenvalues, ascending.
pub fn six_site_analytic_eigenvalues(lambda: f64) -> Result<[f64; 6]> {
    let mut values = six_site_branches(lambda)?.map(|b| b.value);
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// `(E, C2, σv1, σv2)` as 6×6 permutation matrices.
pub fn six_site_c2v() -> GroupRep {
    let perm = |p: [usize; 6]| Matrix::from_fn(DIM, DIM, |i, j| if p[i] == j { 1.0 } else { 0.0 });
    GroupRep::new(
        "C2v",
        vec![
            ("E".into(), Matrix::identity(DIM)),
            ("C2".into(), perm([3, 4, 5, 0, 1, 2])),
            ("sv1".into(), perm([5, 4, 3, 2, 1, 0])),
            ("sv2".into(), perm([2, 1, 0, 5, 4, 3])),
        ],
    )
}

impl ParametricModel for SixSiteModel {
    fn name(&self) -> &str {
        "six-site"
    }

    fn dim(&self) -> usize {
        DIM
    }

    fn domain(&self) -> Domain {
        Domain::new(0.0, f64::INFINITY)
    }

    fn hamiltonian(&self, lambda: f64) -> Result<SymmetricMatrix> {
        self.domain().check(lambda)?;
        let mut m = Matrix::zeros(DIM, DIM);
        for (i, j) in CHAIN_BONDS {
            m[(i, j)] = 1.0;
            m[(j, i)] = 1.0;
        }
        for (i, j) in LAMBDA_BONDS {
            m[(i, j)] = lambda;
            m[(j, i)] = lambda;
        }
        SymmetricMatrix::new(m)
    }

    fn derivative(&self, lambda: f64) -> Result<SymmetricMatrix> {
        self.domain().check(lambda)?;
        Ok(Self::coupling())
    }

    fn analytic_branches(&self, lambda: f64) -> Option<Vec<Branch>> {
        six_site_branches(lambda).ok().map(|b| b.to_vec())
    }

    fn symmetry(&self) -> Option<Symmetry> {
        Some(Symmetry {
            rep: six_site_c2v(),
            table: c2v_table(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn closed_form_values() {
        assert_eq!(
            six_site_analytic_eigenvalues(1.0).unwrap(),
            [-2.0, -1.0, -1.0, 1.0, 1.0, 2.0]
        );
        let expected = [-1.68614, -1.18614, -0.5, 0.5, 1.18614, 1.68614];
        for (a, b) in six_site_analytic_eigenvalues(0.5)
            .unwrap()
            .iter()
            .zip(expected)
        {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-5);
        }
        for lambda in [0.1, 0.7, 1.3, 5.0] {
            let sum: f64 = six_site_analytic_eigenvalues(lambda).unwrap().iter().sum();
            assert_abs_diff_eq!(sum, 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn non_positive_lambda_is_rejected() {
        assert!(six_site_analytic_eigenvalues(0.0).is_err());
        assert!(six_site_analytic_eigenvalues(-1.0).is_err());
        assert!(SixSiteModel.hamiltonian(-0.5).is_err());
    }

    #[test]
    fn matrix_pattern() {
        let h = SixSiteModel.hamiltonian(0.25).unwrap();
        assert_eq!(h[(0, 5)], 0.25);
        assert_eq!(h[(2, 3)], 0.25);
        assert_eq!(h[(0, 1)], 1.0);
        assert_eq!(h[(3, 4)], 1.0);
        assert_eq!(h[(2, 4)], 0.0);
        assert_eq!(h.trace(), 0.0);
        let hp = SixSiteModel::coupling();
        assert_eq!(hp.as_matrix().as_slice().iter().sum::<f64>(), 4.0);
    }
}
