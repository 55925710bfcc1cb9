//! Degenerate subspaces and Hellmann–Feynman slopes.
//!
//! At a degeneracy any orthonormal basis of the eigenspace diagonalizes `H`,
//! but only the basis that also diagonalizes the block of `H′ = dH/dλ`
//! inside the eigenspace reproduces the eigenvalue slopes as expectation
//! values. Any other basis returns weighted averages of those slopes (see
//! [`mixed_slope`]). This module builds that basis, reports the diagonal and
//! off-diagonal identities against independent references, and measures
//! how well the basis continues the eigenvectors from either side of λ₀.

use std::ops::Range;

use crate::deriv::{try_fd_derivative, try_fd_vector_derivative, DEFAULT_FD_STEP};
use crate::eigen::{eigh, violates_sign_convention, Spectrum};
use crate::error::{Error, Result};
use crate::linalg::{dot, norm, Matrix, SymmetricMatrix};
use crate::model::ParametricModel;
use crate::tracking::best_match;

/// Unit-norm tolerance for vectors and coefficient sets.
pub const NORM_TOL: f64 = 1e-10;

/// Default degeneracy tolerance `1e-8 · (1 + spectral radius)`.
pub fn default_tolerance(spectral_radius: f64) -> f64 {
    1e-8 * (1.0 + spectral_radius)
}

/// A maximal run of eigenvalues linked by gaps `<= tol_used`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DegenerateCluster {
    pub start: usize,
    pub size: usize,
    pub tol_used: f64,
}

impl DegenerateCluster {
    pub fn end(&self) -> usize {
        self.start + self.size
    }

    pub fn range(&self) -> Range<usize> {
        self.start..self.end()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.range().contains(&index)
    }

    pub fn is_degenerate(&self) -> bool {
        self.size > 1
    }
}

/// Partitions ascending `values` into clusters.
pub fn cluster_degeneracies(values: &[f64], tol: f64) -> Vec<DegenerateCluster> {
    let mut clusters = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i] - values[i - 1] > tol {
            clusters.push(DegenerateCluster {
                start,
                size: i - start,
                tol_used: tol,
            });
            start = i;
        }
    }
    clusters
}

/// `vᵀ · hp · v` for a unit vector.
pub fn expectation(hp: &SymmetricMatrix, v: &[f64]) -> Result<f64> {
    let norm_sq = dot(v, v);
    if (norm_sq - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized { norm_sq });
    }
    hp.bilinear(v, v)
}

/// Diagonal value `Σ_j c_j² s_j` that a mixed degenerate vector produces.
pub fn mixed_slope(cluster_slopes: &[f64], coeffs: &[f64]) -> Result<f64> {
    if cluster_slopes.len() != coeffs.len() {
        return Err(Error::DimensionMismatch {
            expected: cluster_slopes.len(),
            found: coeffs.len(),
        });
    }
    let norm_sq = dot(coeffs, coeffs);
    if (norm_sq - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized { norm_sq });
    }
    Ok(coeffs
        .iter()
        .zip(cluster_slopes)
        .map(|(c, s)| c * c * s)
        .sum())
}

/// Neighbouring levels whose gap lies in `(tol, 10·tol]`: clustered
/// separately, but the split is numerically fragile.
#[derive(Clone, Debug, PartialEq)]
pub struct NearDegeneracy {
    pub lower: usize,
    pub upper: usize,
    pub gap: f64,
    pub tol: f64,
}

/// A spectrum whose degenerate clusters have been rotated to diagonalize `H′`.
#[derive(Clone, Debug)]
pub struct RotatedSpectrum {
    pub base: Spectrum,
    /// `base` with every cluster rotated; values unchanged.
    pub rotated: Spectrum,
    pub clusters: Vec<DegenerateCluster>,
    /// Slope per state: block eigenvalues inside clusters (ascending),
    /// plain expectations for singletons.
    pub slopes: Vec<f64>,
    /// Block-orthogonal `R` with `rotated.vectors = base.vectors · R`.
    pub rotation: Matrix,
    pub warnings: Vec<NearDegeneracy>,
}

impl RotatedSpectrum {
    pub fn cluster_of(&self, index: usize) -> Option<&DegenerateCluster> {
        self.clusters.iter().find(|c| c.contains(index))
    }

    pub fn cluster_slopes(&self, cluster: &DegenerateCluster) -> &[f64] {
        &self.slopes[cluster.range()]
    }
}

/// Rotates each degenerate cluster onto the eigenvectors of its `H′` block.
pub fn hft_consistent_basis(
    spectrum: &Spectrum,
    hp: &SymmetricMatrix,
    tol: f64,
) -> Result<RotatedSpectrum> {
    let d = spectrum.dim();
    if hp.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: hp.dim(),
        });
    }
    let clusters = cluster_degeneracies(&spectrum.values, tol);
    let mut rotation = Matrix::identity(d);
    let mut vectors = spectrum.vectors.clone();
    let mut slopes = vec![0.0; d];

    for cluster in &clusters {
        if !cluster.is_degenerate() {
            let k = cluster.start;
            slopes[k] = hp.bilinear(&spectrum.vector(k), &spectrum.vector(k))?;
            continue;
        }
        let columns: Vec<Vec<f64>> = cluster.range().map(|k| spectrum.vector(k)).collect();
        let basis = Matrix::from_columns(&columns)?;
        let block = hp.project(&basis)?;
        let inner = eigh(&block)?;
        for (i, k) in cluster.range().enumerate() {
            let mut coeffs = inner.vectors.column(i);
            let mut v = basis.matvec(&coeffs)?;
            if violates_sign_convention(&v) {
                v.iter_mut().for_each(|x| *x = -*x);
                coeffs.iter_mut().for_each(|c| *c = -*c);
            }
            vectors.set_column(k, &v);
            slopes[k] = inner.values[i];
            for (j, kk) in cluster.range().enumerate() {
                rotation[(kk, k)] = coeffs[j];
            }
        }
    }

    let warnings = spectrum
        .values
        .windows(2)
        .enumerate()
        .filter_map(|(i, w)| {
            let gap = w[1] - w[0];
            (gap > tol && gap <= 10.0 * tol).then_some(NearDegeneracy {
                lower: i,
                upper: i + 1,
                gap,
                tol,
            })
        })
        .collect();

    Ok(RotatedSpectrum {
        base: spectrum.clone(),
        rotated: Spectrum {
            lambda: spectrum.lambda,
            values: spectrum.values.clone(),
            vectors,
        },
        clusters,
        slopes,
        rotation,
        warnings,
    })
}

/// Diagonalizes `H(λ)` and builds the HFT-consistent basis. `tol = None`
/// selects [`default_tolerance`].
pub fn rotated_spectrum<M: ParametricModel + ?Sized>(
    model: &M,
    lambda: f64,
    tol: Option<f64>,
) -> Result<RotatedSpectrum> {
    let spectrum = model.spectrum(lambda)?;
    let hp = model.derivative(lambda)?;
    let tol = tol.unwrap_or_else(|| default_tolerance(spectrum.spectral_radius()));
    hft_consistent_basis(&spectrum, &hp, tol)
}

/// The eigenvector at `lambda` that continues `reference`, sign-aligned.
fn continued_vector<M: ParametricModel + ?Sized>(
    model: &M,
    reference: &[f64],
    state: usize,
    from: f64,
    lambda: f64,
) -> Result<(f64, Vec<f64>)> {
    let spectrum = model.spectrum(lambda)?;
    let (j, overlap) = best_match(reference, &spectrum, state, from)?;
    let mut v = spectrum.vector(j);
    if overlap < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    Ok((spectrum.values[j], v))
}

/// Residual of the off-diagonal identity
/// `⟨ψ_m|H′|ψ_n⟩ = (E_n − E_m)·⟨ψ_m|∂ψ_n/∂λ⟩` in the HFT-consistent basis.
///
/// For a degenerate pair the right-hand side vanishes and the residual is
/// `|⟨ψ_m|H′|ψ_n⟩|`. `∂ψ_n/∂λ` comes from a Richardson difference of the
/// continued eigenvector, in the gauge where its overlap with `ψ_n(λ)` is
/// positive.
pub fn offdiag_identity_residual<M: ParametricModel + ?Sized>(
    model: &M,
    lambda: f64,
    m: usize,
    n: usize,
    h: f64,
) -> Result<f64> {
    if m == n {
        return Err(Error::SameIndex(m));
    }
    let dim = model.dim();
    for index in [m, n] {
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, dim });
        }
    }
    let rs = rotated_spectrum(model, lambda, None)?;
    let hp = model.derivative(lambda)?;
    let psi_m = rs.rotated.vector(m);
    let psi_n = rs.rotated.vector(n);
    let lhs = hp.bilinear(&psi_m, &psi_n)?;

    let same_cluster = rs.cluster_of(m).is_some_and(|c| c.contains(n));
    if same_cluster {
        return Ok(lhs.abs());
    }

    let d_psi_n = try_fd_vector_derivative(
        |x| continued_vector(model, &psi_n, n, lambda, x).map(|(_, v)| v),
        lambda,
        h,
    )
    .map_err(|e| match e {
        Error::AmbiguousTracking { .. } => Error::TrackingFailure {
            m,
            n,
            lambda,
            reason: e.to_string(),
        },
        other => other,
    })?;
    let gap = rs.rotated.values[n] - rs.rotated.values[m];
    Ok((lhs - gap * dot(&psi_m, &d_psi_n)).abs())
}

/// Where the reference slopes in an [`HftReport`] came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReferenceSource {
    Analytic,
    FiniteDifference,
}

/// One row of an [`HftReport`].
#[derive(Clone, Debug, PartialEq)]
pub struct StateCheck {
    pub index: usize,
    pub eigenvalue: f64,
    /// `⟨ψ_n|H′|ψ_n⟩` in the HFT-consistent basis.
    pub lhs: f64,
    pub reference: f64,
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct HftReport {
    pub lambda: f64,
    pub source: ReferenceSource,
    pub states: Vec<StateCheck>,
    pub clusters: Vec<DegenerateCluster>,
    pub warnings: Vec<NearDegeneracy>,
    pub worst_residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HftOptions {
    /// `None` uses [`default_tolerance`].
    pub degeneracy_tol: Option<f64>,
    pub fd_step: f64,
}

impl Default for HftOptions {
    fn default() -> Self {
        Self {
            degeneracy_tol: None,
            fd_step: DEFAULT_FD_STEP,
        }
    }
}

/// Compares HFT slopes with analytic branch slopes when the model has them,
/// otherwise with finite differences of the continued eigenvalue branches.
/// Inside a cluster the two sides are compared as multisets.
pub fn hft_report<M: ParametricModel + ?Sized>(
    model: &M,
    lambda: f64,
    opts: &HftOptions,
) -> Result<HftReport> {
    let rs = rotated_spectrum(model, lambda, opts.degeneracy_tol)?;
    let hp = model.derivative(lambda)?;
    let d = rs.rotated.dim();
    let lhs: Vec<f64> = (0..d)
        .map(|k| expectation(&hp, &rs.rotated.vector(k)))
        .collect::<Result<_>>()?;

    let (source, reference) = match model.analytic_branches(lambda) {
        Some(mut branches) if branches.len() == d => {
            branches.sort_by(|a, b| {
                a.value
                    .total_cmp(&b.value)
                    .then(a.slope.total_cmp(&b.slope))
            });
            (
                ReferenceSource::Analytic,
                branches.iter().map(|b| b.slope).collect::<Vec<_>>(),
            )
        }
        _ => {
            let reference = (0..d)
                .map(|k| {
                    let psi = rs.rotated.vector(k);
                    try_fd_derivative(
                        |x| continued_vector(model, &psi, k, lambda, x).map(|(e, _)| e),
                        lambda,
                        opts.fd_step,
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            (ReferenceSource::FiniteDifference, reference)
        }
    };

    let mut states = Vec::with_capacity(d);
    for cluster in &rs.clusters {
        let mut ours: Vec<(usize, f64)> = cluster.range().map(|k| (k, lhs[k])).collect();
        ours.sort_by(|a, b| a.1.total_cmp(&b.1));
        let mut refs: Vec<f64> = reference[cluster.range()].to_vec();
        refs.sort_by(f64::total_cmp);
        for ((k, value), r) in ours.into_iter().zip(refs) {
            states.push(StateCheck {
                index: k,
                eigenvalue: rs.rotated.values[k],
                lhs: value,
                reference: r,
                residual: (value - r).abs(),
            });
        }
    }
    states.sort_by_key(|s| s.index);
    let worst_residual = states.iter().fold(0.0_f64, |acc, s| acc.max(s.residual));

    Ok(HftReport {
        lambda,
        source,
        states,
        clusters: rs.clusters,
        warnings: rs.warnings,
        worst_residual,
    })
}

/// Smallest `|⟨ψ_n(λ₀ ± δ)|ψ_n^rot(λ₀)⟩|` over states and both sides, with
/// `ψ_n(λ₀ ± δ)` the best-matching eigenvector. Values near 1 mean the
/// HFT-consistent basis at λ₀ is the two-sided limit of the eigenvectors.
pub fn continuity_overlap<M: ParametricModel + ?Sized>(
    model: &M,
    lambda0: f64,
    delta: f64,
    tol: Option<f64>,
) -> Result<f64> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::BadStep(delta));
    }
    let rs = rotated_spectrum(model, lambda0, tol)?;
    let mut worst = f64::INFINITY;
    for side in [lambda0 - delta, lambda0 + delta] {
        let spectrum = model.spectrum(side)?;
        for k in 0..rs.rotated.dim() {
            let (_, overlap) = best_match(&rs.rotated.vector(k), &spectrum, k, lambda0)?;
            worst = worst.min(overlap.abs());
        }
    }
    Ok(worst)
}

/// Unit vector `v / |v|`; `None` for the zero vector.
pub fn normalized(v: &[f64]) -> Option<Vec<f64>> {
    let n = norm(v);
    (n > 0.0).then(|| v.iter().map(|x| x / n).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::AffineModel;
    use approx::assert_abs_diff_eq;

    #[test]
    fn clusters_partition_indices() {
        let c = cluster_degeneracies(&[-2.0, -1.0, -1.0, 1.0, 1.0, 2.0], 1e-8);
        let sizes: Vec<_> = c.iter().map(|c| (c.start, c.size)).collect();
        assert_eq!(sizes, vec![(0, 1), (1, 2), (3, 2), (5, 1)]);

        let c = cluster_degeneracies(&[1.0, 2.0, 3.0], 1e-8);
        assert_eq!(c.len(), 3);
        assert!(c.iter().all(|c| c.size == 1));

        let c = cluster_degeneracies(&[0.0, 0.0, 0.0], 1e-8);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].size, 3);

        let c = cluster_degeneracies(&[0.0, 0.0, 1e-20], 0.0);
        assert_eq!(c.iter().map(|c| c.size).collect::<Vec<_>>(), vec![2, 1]);

        assert!(cluster_degeneracies(&[], 1e-8).is_empty());
    }

    #[test]
    fn expectation_requires_unit_vector() {
        let hp = SymmetricMatrix::identity(2);
        assert!(matches!(
            expectation(&hp, &[1.0, 1.0]).unwrap_err(),
            Error::NotNormalized { .. }
        ));
        assert_eq!(
            expectation(&SymmetricMatrix::zeros(2), &[0.6, 0.8]).unwrap(),
            0.0
        );
    }

    #[test]
    fn mixed_slope_examples() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(
            mixed_slope(&[1.0 / 3.0, -1.0], &[r, r]).unwrap(),
            -1.0 / 3.0,
            epsilon = 1e-15
        );
        assert_eq!(mixed_slope(&[0.7], &[1.0]).unwrap(), 0.7);
        assert_abs_diff_eq!(
            mixed_slope(&[-0.5, 0.5], &[r, r]).unwrap(),
            0.0,
            epsilon = 1e-16
        );
        assert!(matches!(
            mixed_slope(&[1.0, 2.0], &[1.0, 1.0]).unwrap_err(),
            Error::NotNormalized { .. }
        ));
        assert!(mixed_slope(&[1.0], &[0.6, 0.8]).is_err());
    }

    #[test]
    fn no_degeneracy_means_identity_rotation() {
        let h = SymmetricMatrix::from_rows(&[[1.0, 0.2, 0.0], [0.2, 2.0, 0.1], [0.0, 0.1, 3.5]])
            .unwrap();
        let hp = SymmetricMatrix::from_rows(&[[0.3, 1.0, 0.0], [1.0, -0.4, 0.5], [0.0, 0.5, 1.0]])
            .unwrap();
        let s = eigh(&h).unwrap().at(0.0);
        let rs = hft_consistent_basis(&s, &hp, 1e-8).unwrap();
        assert_eq!(rs.rotation, Matrix::identity(3));
        assert_eq!(rs.rotated.vectors, s.vectors);
        for k in 0..3 {
            assert_abs_diff_eq!(
                rs.slopes[k],
                expectation(&hp, &s.vector(k)).unwrap(),
                epsilon = 1e-15
            );
        }
        assert!(rs.warnings.is_empty());
    }

    #[test]
    fn rotation_diagonalizes_block_and_keeps_eigenspace() {
        // H = diag(1, 1, 2); H′ couples the two degenerate states.
        let h = SymmetricMatrix::from_rows(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 2.0]])
            .unwrap();
        let hp = SymmetricMatrix::from_rows(&[[0.0, 1.0, 0.3], [1.0, 0.0, 0.0], [0.3, 0.0, 0.0]])
            .unwrap();
        let s = eigh(&h).unwrap().at(0.0);
        let rs = hft_consistent_basis(&s, &hp, 1e-8).unwrap();
        assert_eq!(rs.clusters[0].size, 2);
        assert_abs_diff_eq!(rs.slopes[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(rs.slopes[1], 1.0, epsilon = 1e-14);
        let v0 = rs.rotated.vector(0);
        let v1 = rs.rotated.vector(1);
        assert_abs_diff_eq!(hp.bilinear(&v0, &v1).unwrap(), 0.0, epsilon = 1e-14);
        assert!(rs.rotated.residual(&h).unwrap() < 1e-14);
        let rebuilt = s.vectors.matmul(&rs.rotation).unwrap();
        assert!(rebuilt.max_abs_diff(&rs.rotated.vectors) < 1e-15);
    }

    #[test]
    fn near_degenerate_gap_is_flagged() {
        let h = SymmetricMatrix::from_rows(&[[0.0, 0.0], [0.0, 5e-8]]).unwrap();
        let s = eigh(&h).unwrap().at(0.0);
        let rs = hft_consistent_basis(&s, &SymmetricMatrix::zeros(2), 1e-8).unwrap();
        assert_eq!(rs.clusters.len(), 2);
        assert_eq!(rs.warnings.len(), 1);
        assert_eq!((rs.warnings[0].lower, rs.warnings[0].upper), (0, 1));
    }

    #[test]
    fn offdiag_rejects_equal_indices() {
        let model = AffineModel::constant("c", SymmetricMatrix::identity(2));
        assert!(matches!(
            offdiag_identity_residual(&model, 0.0, 1, 1, 1e-4).unwrap_err(),
            Error::SameIndex(1)
        ));
        assert!(matches!(
            offdiag_identity_residual(&model, 0.0, 0, 5, 1e-4).unwrap_err(),
            Error::IndexOutOfRange { index: 5, .. }
        ));
    }

    #[test]
    fn report_without_oracle_uses_finite_differences() {
        let h0 = SymmetricMatrix::from_rows(&[[0.0, 1.0, 0.0], [1.0, 1.0, 0.5], [0.0, 0.5, 2.0]])
            .unwrap();
        let h1 = SymmetricMatrix::from_rows(&[[1.0, 0.0, 0.2], [0.0, -1.0, 0.0], [0.2, 0.0, 0.5]])
            .unwrap();
        let model = AffineModel::new("affine", h0, h1).unwrap();
        let report = hft_report(&model, 0.3, &HftOptions::default()).unwrap();
        assert_eq!(report.source, ReferenceSource::FiniteDifference);
        assert!(report.worst_residual < 1e-8, "{}", report.worst_residual);
    }
}
