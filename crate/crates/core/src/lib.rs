//! Spectra of parameter-dependent real symmetric operators `H(λ)`, with
//! Hellmann–Feynman slopes that stay well defined at degeneracies.
//!
//! * [`eigen`], [`deriv`], [`tracking`]: Jacobi eigensolver, Richardson
//!   finite differences, overlap-based continuation of eigenpairs.
//! * [`degenerate`]: degeneracy clusters, the basis that diagonalizes
//!   `dH/dλ` inside each cluster, slope and off-diagonal identity reports.
//! * [`symmetry`]: abelian point-group representations and irrep labels.
//! * [`models`]: the six-site two-chain matrix and the coupled oscillator.
//! * [`fermi`]: fixed-`Nₚ` ground-state energies and cusp slopes.

pub mod branches;
pub mod degenerate;
pub mod deriv;
pub mod eigen;
pub mod error;
pub mod fermi;
pub mod linalg;
pub mod model;
pub mod models;
pub mod symmetry;
pub mod tracking;

pub use degenerate::{
    cluster_degeneracies, continuity_overlap, default_tolerance, expectation, hft_consistent_basis,
    hft_report, mixed_slope, offdiag_identity_residual, rotated_spectrum, DegenerateCluster,
    HftOptions, HftReport, RotatedSpectrum,
};
pub use deriv::{fd_derivative, fd_matrix_derivative, DEFAULT_FD_STEP};
pub use eigen::{eigh, Eigensystem, Spectrum};
pub use error::{Error, Result};
pub use fermi::{
    cusp_report, find_crossings, ground_energy, ground_slope_hft, ground_state_curve, CuspReport,
    FillingSpec, GroundSlope, GroundStateCurve,
};
pub use linalg::{Matrix, SymmetricMatrix};
pub use model::{AffineModel, Branch, Domain, ParametricModel, Symmetry};
pub use tracking::{track, Tracked};
