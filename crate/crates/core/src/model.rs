//! Parameter-dependent Hamiltonians `H(λ)` and their λ-derivatives.

use crate::deriv::{fd_matrix_derivative, DEFAULT_FD_STEP};
use crate::eigen::{eigh, Spectrum};
use crate::error::{Error, Result};
use crate::linalg::SymmetricMatrix;
use crate::symmetry::{CharacterTable, GroupRep};

/// Open interval of admissible λ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Domain {
    pub lo: f64,
    pub hi: f64,
}

impl Domain {
    pub const REAL_LINE: Domain = Domain {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, lambda: f64) -> bool {
        lambda.is_finite() && lambda > self.lo && lambda < self.hi
    }

    pub fn check(&self, lambda: f64) -> Result<()> {
        if self.contains(lambda) {
            Ok(())
        } else {
            Err(Error::OutOfDomain {
                lambda,
                lo: self.lo,
                hi: self.hi,
            })
        }
    }
}

/// One analytic eigenvalue branch evaluated at some λ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Branch {
    pub value: f64,
    pub slope: f64,
}

/// A symmetry group representation together with its character table.
#[derive(Clone, Debug)]
pub struct Symmetry {
    pub rep: GroupRep,
    pub table: CharacterTable,
}

/// The pair `(H(λ), dH/dλ)` plus optional oracles.
pub trait ParametricModel: Send + Sync {
    fn name(&self) -> &str;

    fn dim(&self) -> usize;

    fn domain(&self) -> Domain;

    fn hamiltonian(&self, lambda: f64) -> Result<SymmetricMatrix>;

    /// `dH/dλ`. Models without an analytic form fall back to a central
    /// difference of [`ParametricModel::hamiltonian`].
    fn derivative(&self, lambda: f64) -> Result<SymmetricMatrix> {
        fd_matrix_derivative(self, lambda, DEFAULT_FD_STEP)
    }

    /// Exact eigenvalue branches of the matrix `H(λ)`, in any order, when
    /// known in closed form. Must cover every state when present.
    fn analytic_branches(&self, _lambda: f64) -> Option<Vec<Branch>> {
        None
    }

    fn symmetry(&self) -> Option<Symmetry> {
        None
    }

    /// Diagonalizes `H(λ)`.
    fn spectrum(&self, lambda: f64) -> Result<Spectrum> {
        self.domain().check(lambda)?;
        Ok(eigh(&self.hamiltonian(lambda)?)?.at(lambda))
    }
}

/// `H(λ) = H₀ + λ·H₁` on the whole real line.
#[derive(Clone, Debug)]
pub struct AffineModel {
    name: String,
    h0: SymmetricMatrix,
    h1: SymmetricMatrix,
    domain: Domain,
}

impl AffineModel {
    pub fn new(name: impl Into<String>, h0: SymmetricMatrix, h1: SymmetricMatrix) -> Result<Self> {
        if h0.dim() != h1.dim() {
            return Err(Error::DimensionMismatch {
                expected: h0.dim(),
                found: h1.dim(),
            });
        }
        Ok(Self {
            name: name.into(),
            h0,
            h1,
            domain: Domain::REAL_LINE,
        })
    }

    /// λ-independent `H`.
    pub fn constant(name: impl Into<String>, h: SymmetricMatrix) -> Self {
        let dim = h.dim();
        Self {
            name: name.into(),
            h0: h,
            h1: SymmetricMatrix::zeros(dim),
            domain: Domain::REAL_LINE,
        }
    }

    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }
}

impl ParametricModel for AffineModel {
    fn name(&self) -> &str {
        &self.name
    }

    fn dim(&self) -> usize {
        self.h0.dim()
    }

    fn domain(&self) -> Domain {
        self.domain
    }

    fn hamiltonian(&self, lambda: f64) -> Result<SymmetricMatrix> {
        self.domain.check(lambda)?;
        self.h0.linear_combination(1.0, &self.h1, lambda)
    }

    fn derivative(&self, lambda: f64) -> Result<SymmetricMatrix> {
        self.domain.check(lambda)?;
        Ok(self.h1.clone())
    }
}
