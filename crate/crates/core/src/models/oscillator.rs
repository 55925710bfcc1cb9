//! Two coupled oscillators `H = (p_x² + p_y²)/2 + ω²(x² + y²)/2 + λ·x·y` in
//! the truncated product basis `|m, n⟩`, `m + n <= n_max`, with ħ = mass = 1.
//!
//! Basis order: shells `ν = m + n` ascending, ascending `m` within a shell.
//! Truncating by total shell keeps every `H₀` shell complete and commutes
//! with the exchange `|m, n⟩ → |n, m⟩`, so the degenerate structure at λ = 0
//! survives intact.

use crate::error::{Error, Result};
use crate::linalg::{Matrix, SymmetricMatrix};
use crate::model::{Branch, Domain, ParametricModel, Symmetry};
use crate::symmetry::{c2v_table, GroupRep};

#[derive(Clone, Debug)]
pub struct OscillatorModel {
    omega: f64,
    n_max: usize,
    basis: Vec<(usize, usize)>,
    coupling: SymmetricMatrix,
}

impl OscillatorModel {
    pub fn new(omega: f64, n_max: usize) -> Result<Self> {
        check_omega(omega)?;
        let basis = basis(n_max);
        let coupling = xy_matrix(omega, n_max)?;
        Ok(Self {
            omega,
            n_max,
            basis,
            coupling,
        })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Quantum numbers `(m, n)` of each basis state.
    pub fn basis(&self) -> &[(usize, usize)] {
        &self.basis
    }

    pub fn index_of(&self, m: usize, n: usize) -> Option<usize> {
        (m + n <= self.n_max).then(|| state_index(m, n))
    }

    /// The `x·y` matrix in this basis.
    pub fn coupling(&self) -> &SymmetricMatrix {
        &self.coupling
    }

    /// `(E, C2, σv1, σv2)` acting on the basis: `C2: (x,y) → (−x,−y)` is
    /// diagonal `(−1)^(m+n)`, `σv1: (x,y) → (y,x)` swaps `m` and `n`, and
    /// `σv2 = C2·σv1`.
    pub fn c2v(&self) -> GroupRep {
        let d = self.basis.len();
        let mut inversion = Matrix::zeros(d, d);
        let mut exchange = Matrix::zeros(d, d);
        for (i, &(m, n)) in self.basis.iter().enumerate() {
            inversion[(i, i)] = if (m + n) % 2 == 0 { 1.0 } else { -1.0 };
            exchange[(state_index(n, m), i)] = 1.0;
        }
        let both = inversion.matmul(&exchange).expect("square");
        GroupRep::new(
            "C2v",
            vec![
                ("E".into(), Matrix::identity(d)),
                ("C2".into(), inversion),
                ("sv1".into(), exchange),
                ("sv2".into(), both),
            ],
        )
    }
}

fn check_omega(omega: f64) -> Result<()> {
    if omega > 0.0 && omega.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "omega must be positive and finite, got {omega}"
        )))
    }
}

fn state_index(m: usize, n: usize) -> usize {
    let shell = m + n;
    shell * (shell + 1) / 2 + m
}

fn basis(n_max: usize) -> Vec<(usize, usize)> {
    (0..=n_max)
        .flat_map(|shell| (0..=shell).map(move |m| (m, shell - m)))
        .collect()
}

/// `⟨a|x|b⟩ = √(max(a, b) / 2ω)` for `|a − b| = 1`, else 0.
fn position_element(omega: f64, a: usize, b: usize) -> f64 {
    if a.abs_diff(b) == 1 {
        (a.max(b) as f64 / (2.0 * omega)).sqrt()
    } else {
        0.0
    }
}

fn xy_matrix(omega: f64, n_max: usize) -> Result<SymmetricMatrix> {
    let states = basis(n_max);
    let d = states.len();
    let mut xy = Matrix::zeros(d, d);
    for (i, &(m, n)) in states.iter().enumerate() {
        for (m2, n2) in [
            (m + 1, n + 1),
            (m + 1, n.wrapping_sub(1)),
            (m.wrapping_sub(1), n + 1),
        ] {
            if m2 == usize::MAX || n2 == usize::MAX || m2 + n2 > n_max {
                continue;
            }
            let j = state_index(m2, n2);
            let value = position_element(omega, m, m2) * position_element(omega, n, n2);
            xy[(i, j)] = value;
            xy[(j, i)] = value;
        }
    }
    SymmetricMatrix::new(xy)
}

/// `H₀ + λ·XY` with `H₀ = diag((m + n + 1)·ω)`.
pub fn oscillator_matrix(omega: f64, lambda: f64, n_max: usize) -> Result<SymmetricMatrix> {
    check_omega(omega)?;
    if !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "lambda must be finite, got {lambda}"
        )));
    }
    let xy = xy_matrix(omega, n_max)?;
    let h0 = diagonal_h0(omega, n_max);
    h0.linear_combination(1.0, &xy, lambda)
}

fn diagonal_h0(omega: f64, n_max: usize) -> SymmetricMatrix {
    let states = basis(n_max);
    let d = states.len();
    let mut h0 = Matrix::zeros(d, d);
    for (i, &(m, n)) in states.iter().enumerate() {
        h0[(i, i)] = (m + n + 1) as f64 * omega;
    }
    SymmetricMatrix::new(h0).expect("diagonal")
}

/// Exact `(E_mn, dE_mn/dλ)` of the untruncated problem:
/// `E = (m+½)√k₁ + (n+½)√k₂`, `dE/dλ = (2m+1)/(4√k₁) − (2n+1)/(4√k₂)`,
/// `k₁ = ω² + λ`, `k₂ = ω² − λ`.
pub fn oscillator_analytic(omega: f64, lambda: f64, m: usize, n: usize) -> Result<(f64, f64)> {
    check_omega(omega)?;
    let k1 = omega * omega + lambda;
    let k2 = omega * omega - lambda;
    if !(k1 > 0.0 && k2 > 0.0) {
        return Err(Error::OutOfDomain {
            lambda,
            lo: -omega * omega,
            hi: omega * omega,
        });
    }
    let (r1, r2) = (k1.sqrt(), k2.sqrt());
    let (m, n) = (m as f64, n as f64);
    let energy = (m + 0.5) * r1 + (n + 0.5) * r2;
    let slope = (2.0 * m + 1.0) / (4.0 * r1) - (2.0 * n + 1.0) / (4.0 * r2);
    Ok((energy, slope))
}

/// `⟨φ_{ν−i} φ_i| x·y |φ_{ν−i} φ_i⟩` for the uncoupled product state, from
/// the truncated-basis matrix.
pub fn oscillator_product_expectation(omega: f64, shell: usize, i: usize) -> Result<f64> {
    if i > shell {
        return Err(Error::InvalidParameter(format!(
            "product index {i} exceeds shell {shell}"
        )));
    }
    let xy = xy_matrix(omega, shell)?;
    let mut v = vec![0.0; xy.dim()];
    v[state_index(shell - i, i)] = 1.0;
    xy.bilinear(&v, &v)
}

impl ParametricModel for OscillatorModel {
    fn name(&self) -> &str {
        "oscillator"
    }

    fn dim(&self) -> usize {
        self.basis.len()
    }

    fn domain(&self) -> Domain {
        let w2 = self.omega * self.omega;
        Domain::new(-w2, w2)
    }

    fn hamiltonian(&self, lambda: f64) -> Result<SymmetricMatrix> {
        self.domain().check(lambda)?;
        diagonal_h0(self.omega, self.n_max).linear_combination(1.0, &self.coupling, lambda)
    }

    fn derivative(&self, lambda: f64) -> Result<SymmetricMatrix> {
        self.domain().check(lambda)?;
        Ok(self.coupling.clone())
    }

    /// Only at λ = 0, where the truncated matrix is exact: each shell block
    /// of `x·y` has eigenvalues `(m − n)/2ω`. Elsewhere truncation shifts
    /// the levels and there is no closed form for the matrix.
    fn analytic_branches(&self, lambda: f64) -> Option<Vec<Branch>> {
        (lambda == 0.0).then(|| {
            self.basis
                .iter()
                .map(|&(m, n)| Branch {
                    value: (m + n + 1) as f64 * self.omega,
                    slope: (m as f64 - n as f64) / (2.0 * self.omega),
                })
                .collect()
        })
    }

    fn symmetry(&self) -> Option<Symmetry> {
        Some(Symmetry {
            rep: self.c2v(),
            table: c2v_table(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn basis_order_and_dimension() {
        let model = OscillatorModel::new(1.0, 2).unwrap();
        assert_eq!(
            model.basis(),
            &[(0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0)]
        );
        for n_max in 0..8 {
            let model = OscillatorModel::new(1.0, n_max).unwrap();
            assert_eq!(model.dim(), (n_max + 1) * (n_max + 2) / 2);
            for (i, &(m, n)) in model.basis().iter().enumerate() {
                assert_eq!(model.index_of(m, n), Some(i));
            }
        }
    }

    #[test]
    fn unperturbed_diagonal() {
        let h = oscillator_matrix(1.0, 0.0, 2).unwrap();
        let diag: Vec<f64> = (0..6).map(|i| h[(i, i)]).collect();
        assert_eq!(diag, vec![1.0, 2.0, 2.0, 3.0, 3.0, 3.0]);
        assert_eq!(
            h.as_matrix()
                .max_abs_diff(&Matrix::from_fn(6, 6, |i, j| if i == j {
                    diag[i]
                } else {
                    0.0
                })),
            0.0
        );
    }

    #[test]
    fn shell_one_coupling_is_one_half() {
        let model = OscillatorModel::new(1.0, 1).unwrap();
        let (a, b) = (model.index_of(1, 0).unwrap(), model.index_of(0, 1).unwrap());
        assert_abs_diff_eq!(model.coupling()[(a, b)], 0.5, epsilon = 1e-15);
        assert_eq!(model.coupling()[(a, a)], 0.0);
    }

    #[test]
    fn coupling_connects_only_diagonal_neighbours() {
        let model = OscillatorModel::new(1.3, 5).unwrap();
        let xy = model.coupling();
        for (i, &(m, n)) in model.basis().iter().enumerate() {
            for (j, &(m2, n2)) in model.basis().iter().enumerate() {
                if xy[(i, j)] != 0.0 {
                    assert_eq!(m.abs_diff(m2), 1);
                    assert_eq!(n.abs_diff(n2), 1);
                }
            }
        }
    }

    #[test]
    fn analytic_values() {
        let (e, s) = oscillator_analytic(1.0, 0.0, 1, 0).unwrap();
        assert_abs_diff_eq!(e, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s, 0.5, epsilon = 1e-15);
        for m in 0..5 {
            assert_abs_diff_eq!(
                oscillator_analytic(1.0, 0.0, m, m).unwrap().1,
                0.0,
                epsilon = 1e-15
            );
        }
        let (e, s) = oscillator_analytic(1.0, 0.5, 0, 0).unwrap();
        assert_abs_diff_eq!(e, 0.965926, epsilon = 1e-6);
        assert_abs_diff_eq!(s, -0.149429, epsilon = 1e-6);
        assert!(oscillator_analytic(1.0, 1.0, 0, 0).is_err());
        assert!(oscillator_analytic(1.0, -1.5, 0, 0).is_err());
    }

    #[test]
    fn product_states_have_zero_expectation() {
        assert_eq!(oscillator_product_expectation(1.0, 1, 0).unwrap(), 0.0);
        assert_eq!(oscillator_product_expectation(1.0, 3, 2).unwrap(), 0.0);
        assert!(oscillator_product_expectation(1.0, 2, 3).is_err());
    }

    #[test]
    fn invalid_parameters() {
        assert!(OscillatorModel::new(0.0, 3).is_err());
        assert!(OscillatorModel::new(f64::NAN, 3).is_err());
        assert!(oscillator_matrix(-1.0, 0.0, 2).is_err());
        let model = OscillatorModel::new(1.0, 3).unwrap();
        assert!(model.hamiltonian(1.0).is_err());
        assert!(model.hamiltonian(0.99).is_ok());
    }
}
