//! Eigenvalue branches followed across a λ grid.

use rayon::prelude::*;

use crate::degenerate::{rotated_spectrum, RotatedSpectrum};
use crate::eigen::Spectrum;
use crate::error::{Error, Result};
use crate::model::ParametricModel;
use crate::tracking::track;

/// `steps` equally spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let width = hi - lo;
            let last = (steps - 1) as f64;
            (0..steps)
                .map(|i| {
                    if i + 1 == steps {
                        hi
                    } else {
                        lo + width * (i as f64 / last)
                    }
                })
                .collect()
        }
    }
}

/// Validates a scan interval against the model domain.
pub fn check_grid<M: ParametricModel + ?Sized>(
    model: &M,
    lo: f64,
    hi: f64,
    steps: usize,
) -> Result<()> {
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(Error::InvalidParameter(format!(
            "lambda range must satisfy lmin < lmax, got [{lo}, {hi}]"
        )));
    }
    if steps < 2 {
        return Err(Error::InvalidParameter(format!(
            "steps must be >= 2, got {steps}"
        )));
    }
    model.domain().check(lo)?;
    model.domain().check(hi)
}

/// One grid point, with columns in branch order.
#[derive(Clone, Debug)]
pub struct BranchPoint {
    pub lambda: f64,
    /// HFT-consistent eigenvectors, branch-ordered and sign-continued.
    pub spectrum: Spectrum,
    /// HFT slope of each branch.
    pub slopes: Vec<f64>,
}

impl BranchPoint {
    pub fn values(&self) -> &[f64] {
        &self.spectrum.values
    }

    /// Branch indices of the `count` lowest levels, ascending by value
    /// (ties by branch index).
    pub fn lowest(&self, count: usize) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.spectrum.dim()).collect();
        order.sort_by(|&a, &b| {
            self.spectrum.values[a]
                .total_cmp(&self.spectrum.values[b])
                .then(a.cmp(&b))
        });
        order.truncate(count);
        order
    }
}

/// Follows every branch through `lambdas` (in the given order).
///
/// Each point is diagonalized in the HFT-consistent basis, so exact
/// degeneracies on the grid do not break the continuation. Points are
/// evaluated in parallel; the matching is sequential.
pub fn track_branches<M: ParametricModel + ?Sized>(
    model: &M,
    lambdas: &[f64],
    tol: Option<f64>,
) -> Result<Vec<BranchPoint>> {
    let rotated: Vec<RotatedSpectrum> = lambdas
        .par_iter()
        .map(|&lambda| rotated_spectrum(model, lambda, tol))
        .collect::<Result<_>>()?;

    let mut points: Vec<BranchPoint> = Vec::with_capacity(lambdas.len());
    for rs in rotated {
        let point = match points.last() {
            None => BranchPoint {
                lambda: rs.rotated.lambda,
                spectrum: rs.rotated,
                slopes: rs.slopes,
            },
            Some(prev) => {
                let tracked = track(&prev.spectrum, &rs.rotated)?;
                let slopes = tracked.permutation.iter().map(|&j| rs.slopes[j]).collect();
                BranchPoint {
                    lambda: rs.rotated.lambda,
                    spectrum: tracked.spectrum,
                    slopes,
                }
            }
        };
        points.push(point);
    }
    Ok(points)
}
