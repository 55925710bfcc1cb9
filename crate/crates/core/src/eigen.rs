//! Dense real-symmetric eigendecomposition by cyclic Jacobi sweeps.
//!
//! The solver first splits the matrix into the connected components of its
//! sparsity graph (exact zeros only) and diagonalizes each block separately;
//! this is exact and keeps the oscillator models, whose parity sectors never
//! couple, at half the work. Output is deterministic: fixed sweep order,
//! stable ascending sort, and each eigenvector is normalized so that its
//! largest-magnitude component is positive (ties go to the lowest index).

use crate::error::{Error, Result};
use crate::linalg::{Matrix, SymmetricMatrix};

/// Relative off-diagonal threshold `|off(A)|_F <= CONVERGENCE * |A|_F`.
pub const CONVERGENCE: f64 = 1e-13;
/// Sweep limit before reporting non-convergence.
pub const MAX_SWEEPS: usize = 64;

/// Two components whose magnitudes differ by less than this count as tied
/// for the sign convention.
const SIGN_TIE: f64 = 1e-12;

/// Eigenvalues (ascending) and orthonormal eigenvectors (columns).
#[derive(Clone, Debug, PartialEq)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

impl Eigensystem {
    pub fn at(self, lambda: f64) -> Spectrum {
        Spectrum {
            lambda,
            values: self.values,
            vectors: self.vectors,
        }
    }
}

/// Eigenpairs of `H(lambda)`. Column `k` of `vectors` pairs with `values[k]`.
///
/// Fresh from [`eigh`] the values are ascending. Spectra produced by
/// [`crate::tracking::track`] are in branch order instead.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub lambda: f64,
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, k: usize) -> Vec<f64> {
        self.vectors.column(k)
    }

    /// Largest `|eigenvalue|`.
    pub fn spectral_radius(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
    }

    /// `max |VᵀV - I|`.
    pub fn orthonormality_error(&self) -> f64 {
        let vtv = self
            .vectors
            .transpose()
            .matmul(&self.vectors)
            .expect("square eigenvector matrix");
        vtv.max_abs_diff(&Matrix::identity(self.dim()))
    }

    /// `max_k |H v_k - e_k v_k|_inf`.
    pub fn residual(&self, h: &SymmetricMatrix) -> Result<f64> {
        let hv = h.as_matrix().matmul(&self.vectors)?;
        let mut worst = 0.0_f64;
        for k in 0..self.dim() {
            for i in 0..self.dim() {
                let r = hv[(i, k)] - self.values[k] * self.vectors[(i, k)];
                worst = worst.max(r.abs());
            }
        }
        Ok(worst)
    }

    /// `max |V diag(e) Vᵀ - H|`.
    pub fn reconstruction_error(&self, h: &SymmetricMatrix) -> f64 {
        let n = self.dim();
        let scaled = Matrix::from_fn(n, n, |i, k| self.vectors[(i, k)] * self.values[k]);
        let rebuilt = scaled
            .matmul(&self.vectors.transpose())
            .expect("square eigenvector matrix");
        rebuilt.max_abs_diff(h.as_matrix())
    }
}

/// Diagonalizes a symmetric matrix.
pub fn eigh(m: &SymmetricMatrix) -> Result<Eigensystem> {
    let n = m.dim();
    let a = m.as_matrix();
    let mut pairs: Vec<(f64, Vec<f64>)> = Vec::with_capacity(n);

    for block in components(a) {
        let size = block.len();
        let mut sub = Vec::with_capacity(size * size);
        for &i in &block {
            for &j in &block {
                sub.push(a[(i, j)]);
            }
        }
        let (values, vt) = jacobi(&mut sub, size)?;
        for (k, &value) in values.iter().enumerate() {
            let mut v = vec![0.0; n];
            for (local, &global) in block.iter().enumerate() {
                v[global] = vt[k * size + local];
            }
            pairs.push((value, v));
        }
    }

    // Stable: ties keep component order, then in-block order.
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));

    let mut values = Vec::with_capacity(n);
    let mut vectors = Matrix::zeros(n, n);
    for (k, (value, mut v)) in pairs.into_iter().enumerate() {
        fix_sign(&mut v);
        values.push(value);
        vectors.set_column(k, &v);
    }
    Ok(Eigensystem { values, vectors })
}

/// Flips `v` so its largest-magnitude component is positive.
pub fn fix_sign(v: &mut [f64]) {
    if violates_sign_convention(v) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Whether the leading component of `v` (largest magnitude, lowest index on
/// ties) is negative.
pub fn violates_sign_convention(v: &[f64]) -> bool {
    let max = v.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
    v.iter()
        .find(|x| x.abs() >= max - SIGN_TIE)
        .is_some_and(|lead| *lead < 0.0)
}

/// Connected components of the off-diagonal nonzero pattern, each sorted,
/// ordered by smallest member.
fn components(a: &Matrix) -> Vec<Vec<usize>> {
    let n = a.rows();
    let mut parent: Vec<usize> = (0..n).collect();

    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }

    for i in 0..n {
        for j in (i + 1)..n {
            if a[(i, j)] != 0.0 {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    let (lo, hi) = if ri < rj { (ri, rj) } else { (rj, ri) };
                    parent[hi] = lo;
                }
            }
        }
    }

    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
}

/// Cyclic Jacobi on a dense row-major `n x n` block. Returns the diagonal
/// and the eigenvectors as rows.
fn jacobi(a: &mut [f64], n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut vt = vec![0.0; n * n];
    for i in 0..n {
        vt[i * n + i] = 1.0;
    }
    let scale = a.iter().map(|x| x * x).sum::<f64>().sqrt();

    let mut sweep = 0;
    loop {
        let off = off_norm(a, n);
        if off <= CONVERGENCE * scale {
            break;
        }
        if sweep == MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps: MAX_SWEEPS,
                off_norm: off,
            });
        }
        // Early sweeps only rotate the larger elements.
        let threshold = if sweep < 3 {
            0.2 * off / (n * n) as f64
        } else {
            0.0
        };

        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let g = 100.0 * apq.abs();
                if sweep > 3 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    continue;
                }
                if apq.abs() <= threshold {
                    continue;
                }
                rotate(a, &mut vt, n, p, q);
            }
        }
        sweep += 1;
    }

    let diag = (0..n).map(|i| a[i * n + i]).collect();
    Ok((diag, vt))
}

fn off_norm(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j] * a[i * n + j];
            }
        }
    }
    s.sqrt()
}

/// Annihilates `a[p][q]` (p < q) with a plane rotation, updating rows and
/// mirrored columns of `a` and rows `p`, `q` of `vt`.
fn rotate(a: &mut [f64], vt: &mut [f64], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    let app = a[p * n + p];
    let aqq = a[q * n + q];

    let theta = (aqq - app) / (2.0 * apq);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    {
        let (head, tail) = a.split_at_mut(q * n);
        let row_p = &mut head[p * n..(p + 1) * n];
        let row_q = &mut tail[..n];
        for (xp, xq) in row_p.iter_mut().zip(row_q.iter_mut()) {
            let (vp, vq) = (*xp, *xq);
            *xp = c * vp - s * vq;
            *xq = s * vp + c * vq;
        }
    }
    a[p * n + p] = app - t * apq;
    a[q * n + q] = aqq + t * apq;
    a[p * n + q] = 0.0;
    a[q * n + p] = 0.0;
    for k in 0..n {
        if k != p && k != q {
            a[k * n + p] = a[p * n + k];
            a[k * n + q] = a[q * n + k];
        }
    }

    let (head, tail) = vt.split_at_mut(q * n);
    let row_p = &mut head[p * n..(p + 1) * n];
    let row_q = &mut tail[..n];
    for (xp, xq) in row_p.iter_mut().zip(row_q.iter_mut()) {
        let (vp, vq) = (*xp, *xq);
        *xp = c * vp - s * vq;
        *xq = s * vp + c * vq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn identity_has_unit_eigenvalues() {
        let es = eigh(&SymmetricMatrix::identity(2)).unwrap();
        assert_eq!(es.values, vec![1.0, 1.0]);
        assert_eq!(es.vectors, Matrix::identity(2));
    }

    #[test]
    fn swap_matrix_eigenpairs_and_sign_convention() {
        let m = SymmetricMatrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let es = eigh(&m).unwrap();
        assert_abs_diff_eq!(es.values[0], -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(es.values[1], 1.0, epsilon = 1e-15);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let v0 = es.vectors.column(0);
        let v1 = es.vectors.column(1);
        assert_abs_diff_eq!(v0[0], r, epsilon = 1e-15);
        assert_abs_diff_eq!(v0[1], -r, epsilon = 1e-15);
        assert_abs_diff_eq!(v1[0], r, epsilon = 1e-15);
        assert_abs_diff_eq!(v1[1], r, epsilon = 1e-15);
    }

    #[test]
    fn zero_and_empty_matrices() {
        let es = eigh(&SymmetricMatrix::zeros(3)).unwrap();
        assert_eq!(es.values, vec![0.0; 3]);
        let es = eigh(&SymmetricMatrix::zeros(0)).unwrap();
        assert!(es.values.is_empty());
    }

    #[test]
    fn block_split_matches_component_structure() {
        // Two decoupled 2x2 blocks interleaved: {0, 2} and {1, 3}.
        let m = SymmetricMatrix::from_rows(&[
            [1.0, 0.0, 2.0, 0.0],
            [0.0, -1.0, 0.0, 0.5],
            [2.0, 0.0, 1.0, 0.0],
            [0.0, 0.5, 0.0, 3.0],
        ])
        .unwrap();
        assert_eq!(components(m.as_matrix()), vec![vec![0, 2], vec![1, 3]]);
        let spectrum = eigh(&m).unwrap().at(0.0);
        assert!(spectrum.residual(&m).unwrap() < 1e-14);
        assert!(spectrum.orthonormality_error() < 1e-14);
        // Block {1, 3} has eigenvalues 1 ± √4.25; block {0, 2} has -1 and 3.
        let r = 4.25_f64.sqrt();
        let expected = [1.0 - r, -1.0, 3.0, 1.0 + r];
        for (a, b) in spectrum.values.iter().zip(expected) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-14);
        }
    }

    #[test]
    fn sign_convention_prefers_largest_then_lowest_index() {
        let mut v = vec![0.1, -0.9, 0.3];
        fix_sign(&mut v);
        assert_eq!(v, vec![-0.1, 0.9, -0.3]);
        let mut v = vec![-0.5, 0.5];
        fix_sign(&mut v);
        assert_eq!(v, vec![0.5, -0.5]);
    }
}
